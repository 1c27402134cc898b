"""Channel model: per-user power, noise variances, and noise substreams.

Both users transmit with the same power P over

    Y  = sqrt(P) X1 + sqrt(P) X2 + W1,   W1 ~ CN(0, sigma1_sq)
    Ye = sqrt(P) X1 + sqrt(P) X2 + W2,   W2 ~ CN(0, sigma2_sq)

Noise for Monte Carlo integration is drawn from substreams keyed by
``(seed, *indices)``, so an estimate never depends on the order in
which outer terms are evaluated.
"""

from __future__ import annotations

import math
from dataclasses import dataclass

import numpy as np

from .errors import InvalidInputError, PreconditionError

__all__ = [
    "ChannelParams",
    "MCConfig",
    "params_from_snr",
    "substream",
    "sample_noise",
    "STREAM_POLICY",
]

STREAM_POLICY = "seedseq-philox"


@dataclass(frozen=True)
class ChannelParams:
    """Linear-scale powers and complex noise variances (E|W|^2)."""

    power_per_user: float = 1.0
    sigma1_sq: float = 1.0
    sigma2_sq: float = 1.0

    def __post_init__(self):
        if not (self.power_per_user >= 0.0 and math.isfinite(self.power_per_user)):
            raise InvalidInputError(f"power_per_user must be finite and >= 0, got {self.power_per_user}")
        for name in ("sigma1_sq", "sigma2_sq"):
            v = getattr(self, name)
            if not (v > 0.0 and math.isfinite(v)):
                raise InvalidInputError(f"{name} must be finite and > 0, got {v}")

    @property
    def snr_db(self) -> float:
        return 10.0 * math.log10(self.power_per_user / self.sigma1_sq) if self.power_per_user > 0 else -math.inf

    @property
    def is_degraded(self) -> bool:
        return self.sigma2_sq >= self.sigma1_sq

    def require_degraded(self) -> None:
        if not self.is_degraded:
            raise PreconditionError(
                f"eavesdropper noise variance {self.sigma2_sq:g} is below the main channel's "
                f"{self.sigma1_sq:g}; the wiretap model needs a degraded eavesdropper"
            )


@dataclass(frozen=True)
class MCConfig:
    """Monte Carlo settings.

    ``n_samples`` is the number of noise draws per outer symbol index
    (per (r1, r2) pair for the joint terms).
    """

    n_samples: int = 10_000
    seed: int = 0
    stream_policy: str = STREAM_POLICY

    def __post_init__(self):
        if isinstance(self.n_samples, bool) or int(self.n_samples) != self.n_samples or self.n_samples < 1:
            raise InvalidInputError(f"n_samples must be a positive integer, got {self.n_samples!r}")
        if int(self.seed) != self.seed or not (0 <= self.seed < 2**64):
            raise InvalidInputError(f"seed must be an integer in [0, 2**64), got {self.seed!r}")
        if self.stream_policy != STREAM_POLICY:
            raise InvalidInputError(f"unknown stream policy {self.stream_policy!r}")
        object.__setattr__(self, "n_samples", int(self.n_samples))
        object.__setattr__(self, "seed", int(self.seed))


def params_from_snr(snr_db: float, eve_snr_db: float | None = None) -> ChannelParams:
    """Map per-user SNR (P / sigma^2 with P = 1) to channel parameters."""
    sigma1_sq = 10.0 ** (-snr_db / 10.0)
    sigma2_sq = sigma1_sq if eve_snr_db is None else 10.0 ** (-eve_snr_db / 10.0)
    return ChannelParams(1.0, sigma1_sq, sigma2_sq)


def substream(mc: MCConfig, *key: int) -> np.random.Generator:
    """Independent generator for the integer index tuple ``key``.

    The seed and key are hashed by :class:`numpy.random.SeedSequence`
    into a Philox counter-based generator.
    """
    ss = np.random.SeedSequence(mc.seed, spawn_key=tuple(int(k) for k in key))
    return np.random.Generator(np.random.Philox(ss))


def sample_noise(sigma_sq: float, stream: np.random.Generator, size=None):
    """Circularly symmetric complex Gaussian draws with E|W|^2 = sigma_sq.

    Real and imaginary parts are independent N(0, sigma_sq / 2). Returns
    a Python complex when ``size`` is None, else a complex128 array.
    """
    if not sigma_sq > 0.0:
        raise InvalidInputError(f"sigma_sq must be > 0, got {sigma_sq}")
    scale = math.sqrt(sigma_sq / 2.0)
    if size is None:
        z = stream.standard_normal(2)
        return complex(scale * z[0], scale * z[1])
    shape = (size,) if np.isscalar(size) else tuple(size)
    z = stream.standard_normal((2, *shape))
    out = np.empty(shape, dtype=np.complex128)
    out.real = scale * z[0]
    out.imag = scale * z[1]
    return out
