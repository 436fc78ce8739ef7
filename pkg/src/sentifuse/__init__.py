from sentifuse.config import RunConfig, load_config
from sentifuse.core import (
    BacktestConfig,
    ModelConfig,
    SynthConfig,
    TrainConfig,
    build_model,
    generate_synthetic,
    get_table,
    run_backtest,
    walk_forward,
)

__all__ = [
    "BacktestConfig",
    "ModelConfig",
    "RunConfig",
    "SynthConfig",
    "TrainConfig",
    "build_model",
    "generate_synthetic",
    "get_table",
    "load_config",
    "run_backtest",
    "walk_forward",
]


def repl():
    """
    Starts an interactive python session with the sentifuse pipeline
    preloaded, for poking at datasets, models and reports.
    """

    import IPython
    import numpy as np
    import polars as pl

    from sentifuse.core import Filter, prepare_samples
    from sentifuse.core.tables import TABLES

    print(
        r"""
------------------------------------------------
                 sentifuse
   trading x sentiment movement prediction
------------------------------------------------
"""
    )

    IPython.start_ipython(
        colors="neutral",
        display_banner=False,
        user_ns={
            "RunConfig": RunConfig,
            "load_config": load_config,
            "generate_synthetic": generate_synthetic,
            "prepare_samples": prepare_samples,
            "build_model": build_model,
            "walk_forward": walk_forward,
            "run_backtest": run_backtest,
            "tables": TABLES,
            "Filter": Filter,
            "np": np,
            "pl": pl,
        },
        argv=[],
    )
