"""Monte Carlo estimators for the mutual-information terms of the two-user
Gaussian MAC and its degraded wiretap variant.

Two kernels cover every term:

* :func:`mi_marginal` gives I(B; Z) for Z = sqrt(P) A + sqrt(P) B + W,
  treating A as interference. With (A, B) = (X1, X2) and the main-channel
  noise this is I(X2; Y); swapping roles and using the eavesdropper's
  noise gives I(X1; Ye) and I(X2; Ye).
* :func:`mi_conditional` gives I(A; Z | B), which does not depend on B.

Each outer symbol index owns a noise substream keyed by
``(stream, r_a[, r_b])``; the ``stream`` tag separates the terms of a
composite rate so their errors are independent, while reusing the same
tags across angles or SNR points gives common random numbers.
"""

from __future__ import annotations

import enum
import math
from dataclasses import dataclass

import numpy as np

from . import kernels
from .channel import ChannelParams, MCConfig, sample_noise, substream
from .constellation import Constellation, average_energy
from .errors import ContractError, NumericalError

__all__ = [
    "Method",
    "MIEstimate",
    "RatePair",
    "SecrecyComponents",
    "SecrecyRates",
    "Stream",
    "mi_marginal",
    "mi_conditional",
    "sum_rate",
    "rate_region_corner",
    "secrecy_rates",
    "combine",
]

_LN2 = math.log(2.0)
_ENERGY_TOL = 1e-9
# elements of noise held in memory per kernel call
_CHUNK_ELEMENTS = 1 << 21


class Method(str, enum.Enum):
    MONTE_CARLO = "MONTE_CARLO"
    QUADRATURE = "QUADRATURE"


class Stream(enum.IntEnum):
    """Substream tags for the terms of composite rates."""

    MAIN_MARGINAL = 0
    MAIN_COND_X1 = 1
    MAIN_COND_X2 = 2
    EVE_X1 = 3
    EVE_X2 = 4


@dataclass(frozen=True)
class MIEstimate:
    """Mutual information in bits with its Monte Carlo standard error."""

    bits: float
    std_error: float
    n_samples: int
    method: Method = Method.MONTE_CARLO

    def __post_init__(self):
        if not self.std_error >= 0.0:
            raise ValueError(f"std_error must be >= 0, got {self.std_error}")


def combine(*terms: tuple[float, MIEstimate]) -> MIEstimate:
    """Signed sum of independent estimates; errors add in quadrature."""
    bits = sum(sign * t.bits for sign, t in terms)
    se = math.sqrt(sum(t.std_error**2 for _, t in terms))
    methods = {t.method for _, t in terms}
    method = methods.pop() if len(methods) == 1 else Method.MONTE_CARLO
    return MIEstimate(bits, se, min(t.n_samples for _, t in terms), method)


@dataclass(frozen=True)
class RatePair:
    """Corner-point bounds of the rate region: R1, R2 and R1 + R2."""

    r1: MIEstimate
    r2: MIEstimate
    sum: MIEstimate

    @property
    def r1_bits(self) -> float:
        return self.r1.bits

    @property
    def r2_bits(self) -> float:
        return self.r2.bits

    @property
    def sum_bits(self) -> float:
        return self.sum.bits


@dataclass(frozen=True)
class SecrecyComponents:
    """Unclamped mutual-information terms behind the secrecy rates."""

    i_x2_y: MIEstimate
    i_x1_y_given_x2: MIEstimate
    i_x2_y_given_x1: MIEstimate
    i_x1_ye: MIEstimate
    i_x2_ye: MIEstimate

    @property
    def sum_rate(self) -> MIEstimate:
        return combine((1, self.i_x2_y), (1, self.i_x1_y_given_x2))

    @property
    def ssr_raw(self) -> MIEstimate:
        return combine((1, self.i_x2_y), (1, self.i_x1_y_given_x2), (-1, self.i_x1_ye), (-1, self.i_x2_ye))

    @property
    def r1_raw(self) -> MIEstimate:
        return combine((1, self.i_x1_y_given_x2), (-1, self.i_x1_ye))

    @property
    def r2_raw(self) -> MIEstimate:
        return combine((1, self.i_x2_y_given_x1), (-1, self.i_x2_ye))


@dataclass(frozen=True)
class SecrecyRates:
    r1_sec_bits: float
    r2_sec_bits: float
    ssr_bits: float
    ssr_std_error: float
    components: SecrecyComponents

    @classmethod
    def from_components(cls, comp: SecrecyComponents) -> "SecrecyRates":
        ssr = comp.ssr_raw
        return cls(
            max(0.0, comp.r1_raw.bits),
            max(0.0, comp.r2_raw.bits),
            max(0.0, ssr.bits),
            ssr.std_error,
            comp,
        )

    @property
    def ssr(self) -> MIEstimate:
        raw = self.components.ssr_raw
        return MIEstimate(self.ssr_bits, raw.std_error, raw.n_samples, raw.method)


def _check_normalized(c: Constellation) -> None:
    energy = average_energy(c)
    if abs(energy - 1.0) > _ENERGY_TOL:
        raise ContractError(
            f"{c.name}: estimators need unit average energy (got {energy:.6g}); call normalize() first"
        )


def _check_sigma(sigma_sq: float) -> None:
    if not (sigma_sq > 0.0 and math.isfinite(sigma_sq)):
        raise ContractError(f"noise variance must be finite and > 0, got {sigma_sq}")


def _row_noise(mc: MCConfig, sigma_sq: float, keys) -> np.ndarray:
    return np.stack([sample_noise(sigma_sq, substream(mc, *key), mc.n_samples) for key in keys])


def _finish(per_draw: np.ndarray, log2_m: float, mc: MCConfig) -> MIEstimate:
    if not np.all(np.isfinite(per_draw)):
        raise NumericalError("non-finite log-ratio in Monte Carlo kernel")
    n = mc.n_samples
    bits = log2_m - float(per_draw.mean())
    se = float(per_draw.std(ddof=1)) / math.sqrt(n) if n > 1 else math.inf
    return MIEstimate(bits, se, n, Method.MONTE_CARLO)


def _rows_per_chunk(mc: MCConfig) -> int:
    return max(1, _CHUNK_ELEMENTS // mc.n_samples)


def mi_marginal(
    a: Constellation,
    b: Constellation,
    sigma_sq: float,
    mc: MCConfig,
    *,
    power: float = 1.0,
    stream: int = Stream.MAIN_MARGINAL,
    threads: int | None = None,
    backend: str | None = None,
) -> MIEstimate:
    """Estimate I(B; Z) with A as interference.

    Per outer pair (r_a, r_b) and noise draw W the integrand is

        log2  sum_{t_a,t_b} exp(-|da + db + W|^2 / s2)
              ------------------------------------------
              sum_{t_a}     exp(-|da + W|^2 / s2)

    with da = sqrt(P)(a[r_a] - a[t_a]) and db likewise; the estimate is
    log2(M_B) minus its average.
    """
    _check_normalized(a)
    _check_normalized(b)
    _check_sigma(sigma_sq)
    ma, mb = a.order, b.order
    if mb == 1 or power == 0.0:
        # B is deterministic or invisible: I(B; Z) = 0
        return MIEstimate(0.0, 0.0, mc.n_samples)
    amp = math.sqrt(power)
    xa = amp * a.points
    xb = amp * b.points
    sums = (xa[:, None] + xb[None, :]).ravel()
    n_rows = ma * mb
    acc = np.zeros(mc.n_samples)
    step = _rows_per_chunk(mc)
    for start in range(0, n_rows, step):
        rows = np.arange(start, min(start + step, n_rows))
        ra, rb = np.divmod(rows, mb)
        noise = _row_noise(mc, sigma_sq, [(stream, i, j) for i, j in zip(ra, rb)])
        num = kernels.log_mixture_excess(sums[rows], sums, noise, sigma_sq, threads=threads, backend=backend)
        den = kernels.log_mixture_excess(xa[ra], xa, noise, sigma_sq, threads=threads, backend=backend)
        acc += (num - den).sum(axis=0)
    return _finish(acc / (n_rows * _LN2), math.log2(mb), mc)


def mi_conditional(
    a: Constellation,
    b: Constellation,
    sigma_sq: float,
    mc: MCConfig,
    *,
    power: float = 1.0,
    stream: int = Stream.MAIN_COND_X1,
    threads: int | None = None,
    backend: str | None = None,
) -> MIEstimate:
    """Estimate I(A; Z | B).

    Knowing B removes it from the output exactly, so ``b`` only has to
    satisfy the input contract; its geometry never enters.
    """
    _check_normalized(a)
    _check_normalized(b)
    _check_sigma(sigma_sq)
    ma = a.order
    if ma == 1 or power == 0.0:
        return MIEstimate(0.0, 0.0, mc.n_samples)
    xa = math.sqrt(power) * a.points
    acc = np.zeros(mc.n_samples)
    step = _rows_per_chunk(mc)
    for start in range(0, ma, step):
        rows = np.arange(start, min(start + step, ma))
        noise = _row_noise(mc, sigma_sq, [(stream, i) for i in rows])
        acc += kernels.log_mixture_excess(xa[rows], xa, noise, sigma_sq, threads=threads, backend=backend).sum(
            axis=0
        )
    return _finish(acc / (ma * _LN2), math.log2(ma), mc)


def sum_rate(
    c1: Constellation, c2: Constellation, p: ChannelParams, mc: MCConfig, **kw
) -> MIEstimate:
    """I(X1, X2; Y) = I(X2; Y) + I(X1; Y | X2) on the main channel."""
    marginal = mi_marginal(c1, c2, p.sigma1_sq, mc, power=p.power_per_user, stream=Stream.MAIN_MARGINAL, **kw)
    cond = mi_conditional(c1, c2, p.sigma1_sq, mc, power=p.power_per_user, stream=Stream.MAIN_COND_X1, **kw)
    return combine((1, marginal), (1, cond))


def rate_region_corner(
    c1: Constellation, c2: Constellation, p: ChannelParams, mc: MCConfig, **kw
) -> RatePair:
    r1 = mi_conditional(c1, c2, p.sigma1_sq, mc, power=p.power_per_user, stream=Stream.MAIN_COND_X1, **kw)
    r2 = mi_conditional(c2, c1, p.sigma1_sq, mc, power=p.power_per_user, stream=Stream.MAIN_COND_X2, **kw)
    marginal = mi_marginal(c1, c2, p.sigma1_sq, mc, power=p.power_per_user, stream=Stream.MAIN_MARGINAL, **kw)
    return RatePair(r1, r2, combine((1, marginal), (1, r1)))


def secrecy_rates(
    c1: Constellation, c2: Constellation, p: ChannelParams, mc: MCConfig, **kw
) -> SecrecyRates:
    """Secrecy rate bounds of the degraded two-user wiretap MAC.

    R1' = I(X1;Y|X2) - I(X1;Ye), R2' = I(X2;Y|X1) - I(X2;Ye) and
    SSR = I(X1,X2;Y) - I(X1;Ye) - I(X2;Ye), each clamped at zero for
    reporting; the unclamped terms stay in ``components``.
    """
    p.require_degraded()
    pw = p.power_per_user
    s1, s2 = p.sigma1_sq, p.sigma2_sq
    comp = SecrecyComponents(
        i_x2_y=mi_marginal(c1, c2, s1, mc, power=pw, stream=Stream.MAIN_MARGINAL, **kw),
        i_x1_y_given_x2=mi_conditional(c1, c2, s1, mc, power=pw, stream=Stream.MAIN_COND_X1, **kw),
        i_x2_y_given_x1=mi_conditional(c2, c1, s1, mc, power=pw, stream=Stream.MAIN_COND_X2, **kw),
        i_x1_ye=mi_marginal(c2, c1, s2, mc, power=pw, stream=Stream.EVE_X1, **kw),
        i_x2_ye=mi_marginal(c1, c2, s2, mc, power=pw, stream=Stream.EVE_X2, **kw),
    )
    return SecrecyRates.from_components(comp)
