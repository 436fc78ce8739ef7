from sentifuse.core.backtest import BacktestConfig, BacktestReport, run_backtest
from sentifuse.core.data import DataConfig, SynthConfig, generate_synthetic, prepare_samples
from sentifuse.core.dataframe import Frame
from sentifuse.core.experiments import get_experiment
from sentifuse.core.models import ModelConfig, build_model, load_checkpoint, save_checkpoint
from sentifuse.core.tables import TABLES, CsvTable, Filter, get_table
from sentifuse.core.training import TrainConfig, walk_forward

__all__ = [
    "TABLES",
    "BacktestConfig",
    "BacktestReport",
    "CsvTable",
    "DataConfig",
    "Filter",
    "Frame",
    "ModelConfig",
    "SynthConfig",
    "TrainConfig",
    "build_model",
    "generate_synthetic",
    "get_experiment",
    "get_table",
    "load_checkpoint",
    "prepare_samples",
    "run_backtest",
    "save_checkpoint",
    "walk_forward",
]
