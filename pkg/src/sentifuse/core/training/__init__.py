from sentifuse.core.training.loss import kld_weight_at, variational_loss
from sentifuse.core.training.metrics import (
    accuracy,
    average_precision,
    map_from_logits,
    mean_average_precision,
    softmax_rows,
)
from sentifuse.core.training.optim import Adam, clip_grad_norm, global_norm
from sentifuse.core.training.trainer import (
    TrainConfig,
    TrainResult,
    consecutive_pairs,
    predict,
    train_fold,
)
from sentifuse.core.training.walk_forward import (
    FoldResult,
    FoldWindow,
    fold_windows,
    month_index,
    predictions_frame,
    training_log_frame,
    walk_forward,
)

__all__ = [
    "Adam",
    "FoldResult",
    "FoldWindow",
    "TrainConfig",
    "TrainResult",
    "accuracy",
    "average_precision",
    "clip_grad_norm",
    "consecutive_pairs",
    "fold_windows",
    "global_norm",
    "kld_weight_at",
    "map_from_logits",
    "mean_average_precision",
    "month_index",
    "predict",
    "predictions_frame",
    "softmax_rows",
    "train_fold",
    "training_log_frame",
    "variational_loss",
    "walk_forward",
]
