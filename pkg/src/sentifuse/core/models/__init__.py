from sentifuse.core.models.attention import InterAttention, SelfAttention
from sentifuse.core.models.checkpoint import load_checkpoint, save_checkpoint
from sentifuse.core.models.convlstm import ConvLSTM, ConvLSTMCell
from sentifuse.core.models.layers import LSTM, CdtConv, Dense, FeatureGroup, LSTMCell
from sentifuse.core.models.module import Module
from sentifuse.core.models.variational import LatentState, VariationalPath
from sentifuse.core.models.zoo import (
    VARIANTS,
    Channel,
    ChannelOutput,
    Model,
    ModelConfig,
    ModelOutput,
    build_model,
    sentiment_groups,
    trading_groups,
)

__all__ = [
    "CdtConv",
    "Channel",
    "ChannelOutput",
    "ConvLSTM",
    "ConvLSTMCell",
    "Dense",
    "FeatureGroup",
    "InterAttention",
    "LSTM",
    "LSTMCell",
    "LatentState",
    "Model",
    "ModelConfig",
    "ModelOutput",
    "Module",
    "SelfAttention",
    "VARIANTS",
    "VariationalPath",
    "build_model",
    "load_checkpoint",
    "save_checkpoint",
    "sentiment_groups",
    "trading_groups",
]
