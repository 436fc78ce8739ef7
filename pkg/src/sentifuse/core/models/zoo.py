import logging
from dataclasses import asdict, dataclass, field
from typing import Literal

import numpy as np

from sentifuse.core.autodiff import Tensor, concat, relu, tanh
from sentifuse.core.data.indicators import INDICATOR_COLUMNS
from sentifuse.core.data.records import PRICE_COLUMNS, SENTIMENT_FEATURES, AlignedSample
from sentifuse.core.models.attention import InterAttention, SelfAttention
from sentifuse.core.models.convlstm import ConvLSTM
from sentifuse.core.models.layers import LSTM, CdtConv, Dense, FeatureGroup, contiguous_groups
from sentifuse.core.models.module import Module
from sentifuse.core.models.variational import BackwardRecurrence, LatentState, Mode, VariationalPath
from sentifuse.errors import ConfigurationError, DimensionError

logger = logging.getLogger(__name__)

Variant = Literal["lstm_s", "clvsa", "clvsa_input_fusion", "dual_clvsa"]
VARIANTS = ("lstm_s", "clvsa", "clvsa_input_fusion", "dual_clvsa")
# Positive so the ReLU layer is not born dead on small channel summaries.
HEAD_BIAS = 0.1


@dataclass
class ModelConfig:
    variant: Variant = "clvsa"
    use_indicators: bool = False
    use_sentiment: bool = False
    conv_channels: int = 16
    conv_width: int = 3
    grouped_conv: bool = True
    hidden_size: int = 64
    latent_size: int = 16
    layers: int = 2
    window: int = 4
    attention_heads: int = 1
    head_size: int = 128
    kld_weight: float = 0.1
    classes: int = 3
    sentiment_latent: bool = False

    def validate(self) -> None:
        if self.variant not in VARIANTS:
            raise ConfigurationError(f"variant must be one of {VARIANTS}, got {self.variant!r}")
        if self.variant in ("dual_clvsa", "clvsa_input_fusion") and not self.use_sentiment:
            raise ConfigurationError(f"{self.variant} requires sentiment features")
        if self.variant == "clvsa" and self.use_sentiment:
            raise ConfigurationError(
                "clvsa reads trading data only; use clvsa_input_fusion or dual_clvsa with sentiment"
            )
        sizes = {
            "conv_channels": self.conv_channels,
            "conv_width": self.conv_width,
            "hidden_size": self.hidden_size,
            "latent_size": self.latent_size,
            "layers": self.layers,
            "window": self.window,
            "head_size": self.head_size,
        }
        for name, value in sizes.items():
            if value < 1:
                raise ConfigurationError(f"{name} must be positive, got {value}")
        if self.conv_width % 2 == 0:
            raise ConfigurationError(f"conv_width must be odd, got {self.conv_width}")
        if self.attention_heads != 1:
            raise ConfigurationError(f"only single-head attention is supported, got {self.attention_heads}")
        if self.kld_weight < 0:
            raise ConfigurationError(f"kld_weight must be non-negative, got {self.kld_weight}")
        if self.classes < 2:
            raise ConfigurationError(f"classes must be at least 2, got {self.classes}")

    @property
    def trading_features(self) -> int:
        return len(PRICE_COLUMNS) + 1 + (len(INDICATOR_COLUMNS) if self.use_indicators else 0)

    @property
    def sentiment_features(self) -> int:
        return len(SENTIMENT_FEATURES)

    def to_dict(self) -> dict:
        return asdict(self)


def trading_groups(config: ModelConfig) -> list[FeatureGroup]:
    named = [("prices", len(PRICE_COLUMNS)), ("volume", 1)]
    if config.use_indicators:
        named.append(("indicators", len(INDICATOR_COLUMNS)))
    return contiguous_groups(named)


def sentiment_groups(offset: int = 0) -> list[FeatureGroup]:
    return contiguous_groups([(feature, 1) for feature in SENTIMENT_FEATURES], offset=offset)


@dataclass
class ChannelOutput:
    decoder_states: Tensor
    context: Tensor
    kld: Tensor
    summary: Tensor
    inter_weights: list[Tensor] = field(default_factory=list)
    self_weights: Tensor | None = None
    latent: LatentState | None = None


@dataclass
class ModelOutput:
    logits: Tensor
    kld: Tensor
    channels: dict[str, ChannelOutput] = field(default_factory=dict)


class Channel(Module):
    """
    One seq2seq stream: CDT convolution, ConvLSTM encoder over the previous
    day, ConvLSTM decoder over the current day seeded with the encoder's
    final state, inter-attention on the encoder states per decoder step,
    self-attention over the decoder states and, optionally, the variational
    path. The summary is the last decoder state joined with the last latent.
    """

    def __init__(
        self,
        groups: list[FeatureGroup],
        config: ModelConfig,
        rng: np.random.Generator,
        latent: bool,
    ):
        hidden = config.hidden_size
        self.conv = CdtConv(groups, config.conv_channels, config.conv_width, rng, grouped=config.grouped_conv)
        channels = self.conv.out_channels
        self.encoder = ConvLSTM(channels, hidden, config.layers, config.conv_width, config.window, rng)
        self.decoder = ConvLSTM(channels, hidden, config.layers, config.conv_width, config.window, rng)
        self.inter_attention = InterAttention(hidden, rng)
        self.combine = Dense(2 * hidden, hidden, rng)
        self.self_attention = SelfAttention(hidden, rng)
        self.backward_recurrence = BackwardRecurrence(hidden, rng) if latent else None
        self.variational = VariationalPath(hidden, config.latent_size, rng) if latent else None
        self.summary_size = hidden + (config.latent_size if latent else 0)

    def __call__(
        self,
        prev_frame: Tensor,
        frame: Tensor,
        mode: Mode = "eval",
        rng: np.random.Generator | None = None,
    ) -> ChannelOutput:
        encoder_states, encoder_final = self.encoder(self.conv(prev_frame))
        decoder_raw, _ = self.decoder(self.conv(frame), encoder_final)

        contexts: list[Tensor] = []
        inter_weights: list[Tensor] = []
        combined: list[Tensor] = []
        for t in range(decoder_raw.shape[0]):
            step = decoder_raw[t : t + 1, :]
            context, weights = self.inter_attention(encoder_states, step)
            contexts.append(context)
            inter_weights.append(weights)
            combined.append(tanh(self.combine(concat([step, context], axis=1))))
        states, self_weights = self.self_attention(concat(combined, axis=0))

        last = states.shape[0] - 1
        summary = states[last : last + 1, :]
        latent = None
        kld = Tensor(0.0)
        if self.variational is not None:
            latent = self.variational(states, self.backward_recurrence(states), mode, rng)
            kld = latent.kld
            summary = concat([summary, latent.z[last : last + 1, :]], axis=1)

        return ChannelOutput(
            decoder_states=states,
            context=contexts[-1],
            kld=kld,
            summary=summary,
            inter_weights=inter_weights,
            self_weights=self_weights,
            latent=latent,
        )


class Head(Module):
    """Dense(ReLU) then Dense to class logits; hidden units start active."""

    def __init__(self, in_features: int, config: ModelConfig, rng: np.random.Generator):
        self.hidden = Dense(in_features, config.head_size, rng)
        self.hidden.bias.data[:] = HEAD_BIAS
        self.out = Dense(config.head_size, config.classes, rng)

    def __call__(self, x: Tensor) -> Tensor:
        return self.out(relu(self.hidden(x)))


def _check_pair(sample: AlignedSample, prev_sample: AlignedSample) -> None:
    if sample.intervals != prev_sample.intervals:
        raise DimensionError(
            f"Consecutive days have {prev_sample.intervals} and {sample.intervals} intervals"
        )


class Model(Module):
    config: ModelConfig

    def forward(
        self,
        sample: AlignedSample,
        prev_sample: AlignedSample,
        mode: Mode = "eval",
        rng: np.random.Generator | None = None,
    ) -> ModelOutput:
        raise NotImplementedError

    def _trading(self, sample: AlignedSample) -> Tensor:
        if sample.trading_frame.shape[0] != self.config.trading_features:
            raise ConfigurationError(
                f"Sample has {sample.trading_frame.shape[0]} trading rows, the model expects "
                f"{self.config.trading_features} (use_indicators={self.config.use_indicators})"
            )
        return sample.trading_frame


class LstmS(Model):
    """Stacked LSTM over the per-interval feature vectors of both days."""

    def __init__(self, config: ModelConfig, rng: np.random.Generator):
        self.config = config
        features = config.trading_features + (config.sentiment_features if config.use_sentiment else 0)
        self.lstm = LSTM(features, config.hidden_size, config.layers, rng)
        self.head = Head(config.hidden_size, config, rng)

    def _frame(self, sample: AlignedSample) -> Tensor:
        if self.config.use_sentiment:
            return concat([self._trading(sample), sample.sentiment_frame], axis=0)
        return self._trading(sample)

    def forward(self, sample, prev_sample, mode="eval", rng=None) -> ModelOutput:
        _check_pair(sample, prev_sample)
        sequence = concat([self._frame(prev_sample), self._frame(sample)], axis=1).T
        outputs, _ = self.lstm(sequence)
        return ModelOutput(logits=self.head(outputs[-1]), kld=Tensor(0.0))


class Clvsa(Model):
    """
    Single seq2seq channel with the variational path. In the input-fusion
    variant the sentiment rows join the trading rows before the convolution,
    each as its own kernel group.
    """

    def __init__(self, config: ModelConfig, rng: np.random.Generator):
        self.config = config
        groups = trading_groups(config)
        if config.variant == "clvsa_input_fusion":
            groups += sentiment_groups(offset=config.trading_features)
        self.channel = Channel(groups, config, rng, latent=True)
        self.head = Head(self.channel.summary_size, config, rng)

    def _frame(self, sample: AlignedSample) -> Tensor:
        if self.config.variant == "clvsa_input_fusion":
            return concat([self._trading(sample), sample.sentiment_frame], axis=0)
        return self._trading(sample)

    def forward(self, sample, prev_sample, mode="eval", rng=None) -> ModelOutput:
        _check_pair(sample, prev_sample)
        out = self.channel(self._frame(prev_sample), self._frame(sample), mode, rng)
        return ModelOutput(logits=self.head(out.summary), kld=out.kld, channels={"trading": out})


class DualClvsa(Model):
    """
    Separate trading and sentiment channels, fused only by concatenating
    their summaries before the head. Only the trading channel's divergence
    enters the loss.
    """

    def __init__(self, config: ModelConfig, rng: np.random.Generator):
        self.config = config
        self.trading = Channel(trading_groups(config), config, rng, latent=True)
        self.sentiment = Channel(sentiment_groups(), config, rng, latent=config.sentiment_latent)
        self.head = Head(self.trading.summary_size + self.sentiment.summary_size, config, rng)

    def forward(self, sample, prev_sample, mode="eval", rng=None) -> ModelOutput:
        _check_pair(sample, prev_sample)
        trading = self.trading(self._trading(prev_sample), self._trading(sample), mode, rng)
        sentiment = self.sentiment(prev_sample.sentiment_frame, sample.sentiment_frame, mode, rng)
        sentiment.kld = Tensor(0.0)
        logits = self.head(concat([trading.summary, sentiment.summary], axis=1))
        return ModelOutput(
            logits=logits, kld=trading.kld, channels={"trading": trading, "sentiment": sentiment}
        )


MODELS: dict[str, type[Model]] = {
    "lstm_s": LstmS,
    "clvsa": Clvsa,
    "clvsa_input_fusion": Clvsa,
    "dual_clvsa": DualClvsa,
}


def build_model(config: ModelConfig, seed: int) -> Model:
    config.validate()
    model = MODELS[config.variant](config, np.random.default_rng(seed))
    logger.debug(f"Built {config.variant} with {model.parameter_count()} parameters (seed {seed})")
    return model
