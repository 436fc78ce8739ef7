from dataclasses import replace

import numpy as np
import pytest
from numpy import testing as np_testing

from sentifuse.core.autodiff import Tensor, backward, parameter_subset_check
from sentifuse.core.models import VARIANTS, ModelConfig, build_model
from sentifuse.core.models.zoo import DualClvsa
from sentifuse.core.training import variational_loss
from sentifuse.errors import ConfigurationError, DimensionError
from test.data.builders import random_sample, sample_pair, tiny_model_config

GRADIENT_TOLERANCE = 1e-3


def _loss_fn(model, sample, prev_sample, seed=0):
    def loss():
        out = model.forward(sample, prev_sample, mode="train", rng=np.random.default_rng(seed))
        return variational_loss(out.logits, sample.label, out.kld, beta=0.5)

    return loss


def _without_sentiment(sample):
    return replace(
        sample,
        sentiment_frame=Tensor(np.zeros(sample.sentiment_frame.shape)),
        sentiment_mask=np.zeros_like(sample.sentiment_mask),
    )


class TestForward:
    @pytest.mark.parametrize("variant", VARIANTS)
    def test_logits_shape(self, variant):
        model = build_model(tiny_model_config(variant), seed=0)
        prev_sample, sample = sample_pair(seed=1)

        out = model.forward(sample, prev_sample)

        assert out.logits.shape == (1, 3)
        assert np.isfinite(out.logits.data).all()

    @pytest.mark.parametrize("variant", ["clvsa", "clvsa_input_fusion", "dual_clvsa"])
    def test_divergence_is_zero_at_initialization(self, variant):
        model = build_model(tiny_model_config(variant), seed=3)
        prev_sample, sample = sample_pair(seed=4)

        out = model.forward(sample, prev_sample, mode="eval")

        assert out.kld.item() == pytest.approx(0.0, abs=1e-9)

    @pytest.mark.parametrize("variant", VARIANTS)
    def test_same_seed_same_model(self, variant):
        prev_sample, sample = sample_pair(seed=2)

        first = build_model(tiny_model_config(variant), seed=5).forward(sample, prev_sample)
        second = build_model(tiny_model_config(variant), seed=5).forward(sample, prev_sample)
        other = build_model(tiny_model_config(variant), seed=6).forward(sample, prev_sample)

        np_testing.assert_array_equal(first.logits.data, second.logits.data)
        assert not np.array_equal(first.logits.data, other.logits.data)

    def test_eval_mode_is_deterministic(self):
        model = build_model(tiny_model_config("dual_clvsa"), seed=0)
        prev_sample, sample = sample_pair(seed=0)

        np_testing.assert_array_equal(
            model.forward(sample, prev_sample).logits.data, model.forward(sample, prev_sample).logits.data
        )

    def test_train_mode_samples_the_latent(self):
        model = build_model(tiny_model_config("clvsa"), seed=0)
        prev_sample, sample = sample_pair(seed=0)

        first = model.forward(sample, prev_sample, mode="train", rng=np.random.default_rng(0))
        second = model.forward(sample, prev_sample, mode="train", rng=np.random.default_rng(1))

        assert not np.array_equal(first.logits.data, second.logits.data)

    def test_trading_only_model_ignores_sentiment(self):
        model = build_model(tiny_model_config("clvsa"), seed=0)
        prev_sample, sample = sample_pair(seed=0)
        prev_blank, blank = _without_sentiment(prev_sample), _without_sentiment(sample)

        np_testing.assert_array_equal(
            model.forward(sample, prev_sample).logits.data, model.forward(blank, prev_blank).logits.data
        )

    def test_dual_model_reads_sentiment(self):
        model = build_model(tiny_model_config("dual_clvsa"), seed=0)
        prev_sample, sample = sample_pair(seed=0)
        prev_blank, blank = _without_sentiment(prev_sample), _without_sentiment(sample)

        assert not np.array_equal(
            model.forward(sample, prev_sample).logits.data, model.forward(blank, prev_blank).logits.data
        )

    @pytest.mark.parametrize("seed", range(5))
    def test_dual_logits_respond_to_each_channel(self, seed):
        model = build_model(tiny_model_config("dual_clvsa"), seed=seed)
        prev_sample, sample = sample_pair(seed=seed)
        logits = model.forward(sample, prev_sample).logits.data

        rescaled = replace(sample, trading_frame=Tensor(sample.trading_frame.data * 2.0))
        blank = _without_sentiment(sample)

        assert not np.allclose(model.forward(rescaled, prev_sample).logits.data, logits)
        assert not np.allclose(model.forward(blank, _without_sentiment(prev_sample)).logits.data, logits)

    @pytest.mark.parametrize("variant", VARIANTS)
    def test_head_units_start_active(self, variant):
        model = build_model(tiny_model_config(variant), seed=0)

        np_testing.assert_array_equal(model.head.hidden.bias.data, np.full_like(model.head.hidden.bias.data, 0.1))

    def test_dual_channels_are_reported(self):
        model = build_model(tiny_model_config("dual_clvsa", sentiment_latent=True), seed=0)
        prev_sample, sample = sample_pair(seed=0)

        out = model.forward(sample, prev_sample)

        assert set(out.channels) == {"trading", "sentiment"}
        assert out.channels["sentiment"].kld.item() == 0.0
        assert out.channels["sentiment"].latent is not None
        weights = out.channels["trading"].inter_weights
        assert len(weights) == sample.intervals
        np_testing.assert_allclose(weights[0].data.sum(), 1.0)

    def test_days_of_different_length(self):
        model = build_model(tiny_model_config("clvsa"), seed=0)
        rng = np.random.default_rng(0)

        with pytest.raises(DimensionError):
            model.forward(random_sample(rng, intervals=4), random_sample(rng, intervals=3))

    def test_indicator_rows_must_match(self):
        model = build_model(tiny_model_config("clvsa", use_indicators=True), seed=0)
        prev_sample, sample = sample_pair(seed=0)

        with pytest.raises(ConfigurationError):
            model.forward(sample, prev_sample)

    def test_indicator_model_reads_wider_frames(self):
        model = build_model(tiny_model_config("dual_clvsa", use_indicators=True), seed=0)
        prev_sample, sample = sample_pair(seed=0, trading_features=11)

        assert model.forward(sample, prev_sample).logits.shape == (1, 3)


class TestGradients:
    @pytest.mark.parametrize("variant", VARIANTS)
    def test_parameter_gradients(self, variant):
        model = build_model(tiny_model_config(variant), seed=0)
        prev_sample, sample = sample_pair(seed=1)

        worst = parameter_subset_check(_loss_fn(model, sample, prev_sample), model.parameters(), count=32)

        assert worst <= GRADIENT_TOLERANCE

    def test_parameter_gradients_with_sentiment_latent(self):
        model = build_model(tiny_model_config("dual_clvsa", sentiment_latent=True), seed=0)
        prev_sample, sample = sample_pair(seed=1)

        worst = parameter_subset_check(_loss_fn(model, sample, prev_sample), model.parameters(), count=32)

        assert worst <= GRADIENT_TOLERANCE

    def test_padded_sentiment_leaves_sentiment_kernels_untouched(self):
        model = build_model(tiny_model_config("dual_clvsa"), seed=0)
        assert isinstance(model, DualClvsa)
        prev_sample, sample = sample_pair(seed=0, padded=True)

        backward(_loss_fn(model, sample, prev_sample)())

        for kernel in model.sentiment.conv.kernels:
            np_testing.assert_array_equal(kernel.grad, np.zeros_like(kernel.data))
        assert any(np.any(kernel.grad != 0) for kernel in model.trading.conv.kernels)

    def test_sentiment_divergence_is_not_trained(self):
        model = build_model(tiny_model_config("dual_clvsa", sentiment_latent=True), seed=0)
        prev_sample, sample = sample_pair(seed=0)

        out = model.forward(sample, prev_sample, mode="train", rng=np.random.default_rng(0))

        assert out.kld is out.channels["trading"].kld


class TestParameters:
    def test_counts_grow_with_fusion(self):
        counts = {
            variant: build_model(tiny_model_config(variant), seed=0).parameter_count() for variant in VARIANTS
        }

        assert counts["lstm_s"] < counts["clvsa"] < counts["clvsa_input_fusion"] < counts["dual_clvsa"]

    def test_names_are_unique_and_stable(self):
        first = [name for name, _ in build_model(tiny_model_config(), seed=0).named_parameters()]
        second = [name for name, _ in build_model(tiny_model_config(), seed=1).named_parameters()]

        assert first == second
        assert len(set(first)) == len(first)
        assert any(name.startswith("sentiment.conv.kernels.") for name in first)

    def test_ungrouped_convolution_has_one_bank(self):
        model = build_model(tiny_model_config("clvsa", grouped_conv=False), seed=0)

        assert len(model.channel.conv.kernels) == 1
        assert model.channel.conv.out_channels == 2 * 2


class TestModelConfig:
    @pytest.mark.parametrize(
        "overrides",
        [
            {"variant": "transformer"},
            {"variant": "dual_clvsa", "use_sentiment": False},
            {"variant": "clvsa_input_fusion", "use_sentiment": False},
            {"variant": "clvsa", "use_sentiment": True},
            {"conv_width": 4},
            {"hidden_size": 0},
            {"attention_heads": 2},
            {"kld_weight": -1.0},
        ],
    )
    def test_invalid(self, overrides):
        with pytest.raises(ConfigurationError):
            ModelConfig(**overrides).validate()

    def test_defaults_are_valid(self):
        ModelConfig().validate()

    def test_feature_counts(self):
        assert ModelConfig().trading_features == 5
        assert ModelConfig(use_indicators=True).trading_features == 11
        assert ModelConfig().sentiment_features == 5
