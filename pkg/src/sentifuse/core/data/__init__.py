from sentifuse.core.data.align import align_frames, aligned_pairs_frame, bind_align
from sentifuse.core.data.frames import DataConfig, build_day_frames, movement_label, prepare_samples
from sentifuse.core.data.indicators import INDICATOR_COLUMNS, compute_indicators
from sentifuse.core.data.records import (
    SENTIMENT_FEATURES,
    SENTIMENT_INDICES,
    TRADING_COLUMNS,
    AlignedSample,
    Bar,
    Movement,
    PsychVarRecord,
    TrmiPolarity,
    TrmiRecord,
)
from sentifuse.core.data.streams import (
    bars_frame,
    bars_from_frame,
    load_bars,
    load_trmi,
    trmi_frame,
    trmi_from_frame,
)
from sentifuse.core.data.synthetic import (
    SynthConfig,
    SyntheticData,
    generate_psychvars,
    generate_synthetic,
    stump_accuracy,
)
from sentifuse.core.data.trmi import (
    aggregate_trmi,
    aggregate_trmi_frame,
    compute_trmi_from_psychvars,
    default_polarity,
    load_polarity,
    psychvars_to_trmi,
)

__all__ = [
    "AlignedSample",
    "DataConfig",
    "Bar",
    "INDICATOR_COLUMNS",
    "Movement",
    "PsychVarRecord",
    "SENTIMENT_FEATURES",
    "SENTIMENT_INDICES",
    "SynthConfig",
    "SyntheticData",
    "TRADING_COLUMNS",
    "TrmiPolarity",
    "TrmiRecord",
    "aggregate_trmi",
    "aggregate_trmi_frame",
    "align_frames",
    "aligned_pairs_frame",
    "bars_frame",
    "bars_from_frame",
    "bind_align",
    "build_day_frames",
    "compute_indicators",
    "compute_trmi_from_psychvars",
    "default_polarity",
    "generate_psychvars",
    "generate_synthetic",
    "load_bars",
    "load_polarity",
    "load_trmi",
    "movement_label",
    "prepare_samples",
    "psychvars_to_trmi",
    "stump_accuracy",
    "trmi_frame",
    "trmi_from_frame",
]
