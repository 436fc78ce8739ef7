from typing import Sequence

import numpy as np

from sentifuse.errors import ContractError


def softmax_rows(logits: np.ndarray) -> np.ndarray:
    logits = np.atleast_2d(np.asarray(logits, dtype=np.float64))
    shifted = np.exp(logits - logits.max(axis=1, keepdims=True))
    return shifted / shifted.sum(axis=1, keepdims=True)


def average_precision(scores: np.ndarray, relevant: np.ndarray) -> float:
    """Mean of precision@k over the ranks k holding a relevant item; ties keep input order."""
    order = np.argsort(-np.asarray(scores, dtype=np.float64), kind="stable")
    hits = np.asarray(relevant, dtype=bool)[order]
    precision = np.cumsum(hits) / np.arange(1, hits.size + 1)
    return float(precision[hits].mean())


def mean_average_precision(scores: np.ndarray, labels: Sequence[int]) -> float:
    """
    Macro average precision over classes: each class ranks every sample by
    its score for that class. Classes without a positive sample are skipped.
    """
    scores = np.atleast_2d(np.asarray(scores, dtype=np.float64))
    labels = np.asarray(labels, dtype=np.int64)
    if labels.size == 0 or scores.shape[0] != labels.size:
        raise ContractError(
            f"mean_average_precision needs one score row per label, got {scores.shape[0]} and {labels.size}"
        )
    per_class = [
        average_precision(scores[:, c], labels == c)
        for c in range(scores.shape[1])
        if np.any(labels == c)
    ]
    return float(np.mean(per_class))


def map_from_logits(predictions: Sequence[tuple[np.ndarray, int]]) -> float:
    if not predictions:
        raise ContractError("mean_average_precision needs at least one prediction")
    logits = np.vstack([np.reshape(logit, (1, -1)) for logit, _ in predictions])
    return mean_average_precision(softmax_rows(logits), [label for _, label in predictions])


def accuracy(scores: np.ndarray, labels: Sequence[int]) -> float:
    labels = np.asarray(labels, dtype=np.int64)
    if labels.size == 0:
        return float("nan")
    return float(np.mean(np.argmax(np.atleast_2d(scores), axis=1) == labels))
