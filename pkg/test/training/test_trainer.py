from dataclasses import replace

import numpy as np
import pytest
from numpy import testing as np_testing

from sentifuse.core.autodiff import Tensor
from sentifuse.core.data import DataConfig, Movement, SynthConfig, generate_synthetic, prepare_samples
from sentifuse.core.models import VARIANTS, build_model
from sentifuse.core.training import TrainConfig, consecutive_pairs, predict, train_fold
from sentifuse.errors import ConfigurationError, ContractError, NumericalError
from test.data.builders import random_sample, tiny_model_config


def _learnable_pairs(count: int = 12, seed: int = 0):
    """Days whose trading rows all lean up or down, labeled by the lean."""
    rng = np.random.default_rng(seed)
    samples = []
    for day in range(count + 1):
        label = Movement.UP if day % 2 else Movement.DOWN
        sample = random_sample(rng, day=day, label=label)
        lean = 2.0 if label == Movement.UP else -2.0
        samples.append(replace(sample, trading_frame=Tensor(sample.trading_frame.data + lean)))
    return consecutive_pairs(samples)


def test_consecutive_pairs():
    rng = np.random.default_rng(0)
    samples = [random_sample(rng, day=day) for day in range(3)]

    pairs = consecutive_pairs(samples)

    assert pairs == [(samples[0], samples[1]), (samples[1], samples[2])]
    assert consecutive_pairs(samples[:1]) == []


def test_loss_decreases():
    model = build_model(tiny_model_config("lstm_s"), seed=0)

    result = train_fold(model, _learnable_pairs(), TrainConfig(epochs=30, batch_size=4, learning_rate=0.02))

    assert len(result.losses) == 30
    assert result.losses[-1] < result.losses[0]
    assert result.steps == 30 * 3


def test_same_seed_same_training():
    pairs = _learnable_pairs()
    config = TrainConfig(epochs=3, batch_size=4, seed=9)

    first = train_fold(build_model(tiny_model_config("clvsa"), seed=0), pairs, config)
    second = train_fold(build_model(tiny_model_config("clvsa"), seed=0), pairs, config)

    assert first.losses == second.losses


def test_zero_learning_rate_keeps_parameters():
    model = build_model(tiny_model_config("clvsa"), seed=0)
    before = model.state_dict()

    train_fold(model, _learnable_pairs(4), TrainConfig(epochs=2, batch_size=2, learning_rate=0.0))

    for name, values in model.state_dict().items():
        np_testing.assert_array_equal(values, before[name])


def test_stop_at_perfect():
    model = build_model(tiny_model_config("lstm_s"), seed=0)

    result = train_fold(
        model,
        _learnable_pairs(),
        TrainConfig(epochs=200, batch_size=4, learning_rate=0.05, stop_at_perfect=True),
    )

    assert result.train_accuracy == 1.0
    assert len(result.losses) < 200


@pytest.mark.parametrize("variant", VARIANTS)
def test_every_variant_overfits_signal_bearing_days(variant):
    data = generate_synthetic(SynthConfig(days=20, signal_channel="both"), seed=0)
    samples = prepare_samples(data.bars, data.trmi, DataConfig())[:17]
    model = build_model(tiny_model_config(variant), seed=0)

    result = train_fold(
        model,
        consecutive_pairs(samples),
        TrainConfig(epochs=200, batch_size=16, learning_rate=1e-2, stop_at_perfect=True),
    )

    assert len(samples) == 17
    assert result.train_accuracy == 1.0


def test_needs_two_samples():
    model = build_model(tiny_model_config("lstm_s"), seed=0)

    with pytest.raises(ContractError):
        train_fold(model, _learnable_pairs()[:1], TrainConfig())


def test_non_finite_loss_names_the_op():
    model = build_model(tiny_model_config("lstm_s"), seed=0)
    pairs = _learnable_pairs(4)
    prev, sample = pairs[0]
    broken = replace(sample, trading_frame=Tensor(np.full(sample.trading_frame.shape, np.nan)))

    with pytest.raises(NumericalError) as exc_info:
        train_fold(model, [(prev, broken)] * 2, TrainConfig(epochs=1))

    assert "first produced by op" in str(exc_info.value)


def test_predict_scores_are_distributions():
    model = build_model(tiny_model_config("dual_clvsa"), seed=0)

    scores = predict(model, _learnable_pairs(4))

    assert scores.shape == (4, 3)
    np_testing.assert_allclose(scores.sum(axis=1), np.ones(4))
    assert predict(model, []).shape == (0, 3)


@pytest.mark.parametrize(
    "overrides",
    [{"epochs": 0}, {"batch_size": 0}, {"learning_rate": -1.0}, {"kld_warmup_fraction": 1.5}, {"step_months": 0}],
)
def test_invalid_config(overrides):
    with pytest.raises(ConfigurationError):
        TrainConfig(**overrides).validate()
