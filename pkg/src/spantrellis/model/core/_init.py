"""Draw initial parameters for either architecture."""

import numpy as np

from .main import (
    AttentionLayerParams,
    BiGRULayerParams,
    EncoderParams,
    GRUParams,
    JointParams,
    ModelConfig,
    ModelParams,
    PredictionParams,
    Seq2SeqHardAttnParams,
    Seq2SeqParams,
    TransducerParams,
)


class ParamInitializer:
    """Uniform(-s, s) initialization from a single generator.

    Arrays are drawn in a fixed order, so the same config and seed always
    give the same parameters.
    """

    def __init__(self, config: ModelConfig, rng: np.random.Generator | None = None) -> None:
        """
        Args:
            config (ModelConfig): Architecture and sizes.
            rng (np.random.Generator | None): Defaults to one seeded with
                ``config.seed``.
        """
        self.config = config
        self.rng = rng if rng is not None else np.random.default_rng(config.seed)

    def _uniform(self, *shape: int) -> np.ndarray:
        s = self.config.init_scale
        return self.rng.uniform(-s, s, size=shape)

    def gru(self, n_in: int, d: int) -> GRUParams:
        return GRUParams(
            Wz=self._uniform(n_in, d), Uz=self._uniform(d, d), bz=np.zeros(d),
            Wr=self._uniform(n_in, d), Ur=self._uniform(d, d), br=np.zeros(d),
            Wn=self._uniform(n_in, d), Un=self._uniform(d, d), bn=np.zeros(d),
        )

    def encoder(self) -> EncoderParams:
        c = self.config
        d = c.hidden
        layers: list = []
        for _ in range(c.layers):
            if c.encoder == "attention":
                layers.append(
                    AttentionLayerParams(
                        Wq=self._uniform(d, d), Wk=self._uniform(d, d), Wv=self._uniform(d, d),
                        Wo=self._uniform(d, d), bo=np.zeros(d),
                    )
                )
            else:
                layers.append(BiGRULayerParams(forward=self.gru(d, d), backward=self.gru(d, d)))
        return EncoderParams(
            embedding=self._uniform(c.input_vocab, d),
            layers=tuple(layers),
            kind=c.encoder,
            window=c.window,
        )

    def transducer(self) -> TransducerParams:
        c = self.config
        d, n_out = c.hidden, c.output_vocab + 1
        encoder = self.encoder()
        prediction = PredictionParams(
            embedding=self._uniform(c.output_vocab + 1, d),
            cell=self.gru(d, d),
            initial_state=np.zeros(d),
        )
        joint = JointParams(W=self._uniform(d, n_out), b=np.zeros(n_out))
        return TransducerParams(encoder=encoder, prediction=prediction, joint=joint)

    def seq2seq(self) -> Seq2SeqParams:
        c = self.config
        d, n_out = c.hidden, c.output_vocab + 1
        encoder = self.encoder()
        decoder = Seq2SeqHardAttnParams(
            embedding=self._uniform(n_out, c.embedding),
            cell=self.gru(c.embedding + d, d),
            W=self._uniform(d, n_out),
            b=np.zeros(n_out),
            initial_state=np.zeros(d),
        )
        return Seq2SeqParams(encoder=encoder, decoder=decoder)

    def build(self) -> ModelParams:
        """Return parameters for ``config.architecture``."""
        if self.config.architecture == "seq2seq":
            return self.seq2seq()
        return self.transducer()
