"""Deterministic reference values for small constellations.

Every mutual-information term is written through differential entropies
of Gaussian mixtures,

    I(X2; Y)      = h(Y) - h(Y | X2)
    I(X1; Y | X2) = h(Y | X2) - log2(pi e sigma^2)

and each mixture entropy is integrated component by component over the
complex noise with a tensor-product rule. ``h(Y | X2 = x2)`` does not
depend on x2 (it is a translate of the same mixture), so one integral
covers every conditional term.

The tensor-product grid is only symmetric under quarter turns, so a
rotated mixture would integrate to a slightly different value. Each
mixture is therefore turned into a canonical orientation first (see
:func:`_canonical_phase`), which makes results exactly invariant to a
joint rotation of the inputs.

This module deliberately shares no code with the Monte Carlo path.
"""

from __future__ import annotations

import math
from dataclasses import dataclass
from functools import lru_cache

import numpy as np
from scipy.sparse import coo_matrix
from scipy.sparse.csgraph import connected_components
from scipy.special import logsumexp

from .channel import ChannelParams
from .constellation import Constellation, average_energy
from .errors import ContractError, InvalidInputError, TooLargeError
from .mi import Method, MIEstimate, RatePair, SecrecyComponents, SecrecyRates

__all__ = [
    "QuadratureConfig",
    "QuadTerms",
    "quad_mi_terms",
    "quad_sum_rate",
    "quad_rate_region_corner",
    "quad_secrecy_rates",
    "mixture_entropy",
    "sumset_entropy",
    "gaussian_capacity_bound",
]

_LN2 = math.log(2.0)
_BLOCK = 1 << 22


@dataclass(frozen=True)
class QuadratureConfig:
    """Integration rule for the mixture entropies.

    ``rule="trapezoid"`` places ``nodes_per_dim`` equispaced nodes on
    [-half_width, half_width] (in units where the weight is exp(-x^2)).
    ``rule="gauss-hermite"`` uses the classical Hermite nodes instead.
    """

    nodes_per_dim: int = 64
    joint_size_limit: int = 256
    rule: str = "trapezoid"
    half_width: float = 5.5

    def __post_init__(self):
        if self.nodes_per_dim < 8:
            raise InvalidInputError(f"nodes_per_dim must be >= 8, got {self.nodes_per_dim}")
        if self.joint_size_limit < 1:
            raise InvalidInputError("joint_size_limit must be positive")
        if self.rule not in ("trapezoid", "gauss-hermite"):
            raise InvalidInputError(f"unknown quadrature rule {self.rule!r}")
        if not self.half_width > 0:
            raise InvalidInputError("half_width must be positive")


@lru_cache(maxsize=16)
def _nodes_1d(rule: str, n: int, half_width: float) -> tuple[np.ndarray, np.ndarray]:
    if rule == "gauss-hermite":
        x, w = np.polynomial.hermite.hermgauss(n)
    else:
        x = np.linspace(-half_width, half_width, n)
        w = np.exp(-x * x)
    w = w / w.sum()
    x.setflags(write=False)
    w.setflags(write=False)
    return x, w


def _noise_nodes(q: QuadratureConfig, sigma_sq: float) -> tuple[np.ndarray, np.ndarray]:
    """Complex noise nodes (E|W|^2 = sigma_sq) and their probability weights."""
    x, w = _nodes_1d(q.rule, q.nodes_per_dim, q.half_width)
    s = math.sqrt(sigma_sq)
    nodes = s * (x[:, None] + 1j * x[None, :]).ravel()
    weights = (w[:, None] * w[None, :]).ravel()
    return nodes, weights


def _group(points: np.ndarray, tol: float) -> tuple[np.ndarray, np.ndarray]:
    """Merge points closer than ``tol``; returns representatives and counts."""
    pts = np.asarray(points, dtype=np.complex128)
    if pts.size == 1:
        return pts.copy(), np.ones(1)
    close = np.abs(pts[:, None] - pts[None, :]) <= tol
    i, j = np.nonzero(close)
    graph = coo_matrix((np.ones(i.size), (i, j)), shape=(pts.size, pts.size))
    n_groups, labels = connected_components(graph, directed=False)
    counts = np.bincount(labels, minlength=n_groups).astype(float)
    first = np.full(n_groups, -1)
    for idx in range(pts.size - 1, -1, -1):
        first[labels[idx]] = idx
    return pts[first], counts


_MAX_MOMENT = 24
_MOMENT_FLOOR = 1e-9


def _rotation_invariants(m: np.ndarray, weight: int):
    """Products of normalized moments that turn by ``weight * phi`` under rotation by phi."""
    if weight <= _MAX_MOMENT:
        yield m[weight]
    for a in range(2, weight // 2 + 1):
        yield m[a] * m[weight - a]
    for b in range(2, _MAX_MOMENT - weight + 1):
        yield m[b + weight] * np.conj(m[b])


def _canonical_phase(centered: np.ndarray) -> complex:
    """Unit factor that turns a centered point set into a canonical orientation.

    The angle comes from the first non-negligible invariant of weight
    4, 8, 12, ...; it is defined modulo 2*pi/weight. For a set with
    n-fold symmetry the first weight reached is lcm(4, n), and the
    leftover ambiguity is a symmetry of the set combined with the
    quarter-turn symmetry of the grid, so the integral does not depend
    on it.
    """
    radius = float(np.max(np.abs(centered)))
    if radius == 0.0:
        return 1.0 + 0.0j
    u = centered / radius
    powers = np.cumprod(np.broadcast_to(u, (_MAX_MOMENT, u.size)), axis=0)
    # each moment scaled by its largest possible modulus so rounding stays relative
    bound = np.cumprod(np.broadcast_to(np.abs(u), (_MAX_MOMENT, u.size)), axis=0).mean(axis=1)
    m = np.concatenate([[1.0 + 0.0j], powers.mean(axis=1) / bound])
    for weight in range(4, _MAX_MOMENT + 1, 4):
        for inv in _rotation_invariants(m, weight):
            if abs(inv) > _MOMENT_FLOOR:
                return complex(np.exp(-1j * np.angle(inv) / weight))
    return 1.0 + 0.0j


def mixture_entropy(centers, sigma_sq: float, q: QuadratureConfig = QuadratureConfig()) -> float:
    """Differential entropy in bits of the uniform mixture of CN(c, sigma_sq)."""
    centers = np.asarray(centers, dtype=np.complex128).reshape(-1)
    centered = centers - centers.mean()
    reps, counts = _group(centered * _canonical_phase(centered), 1e-12)
    total = counts.sum()
    log_mix = np.log(counts / total)
    nodes, weights = _noise_nodes(q, sigma_sq)
    norm = math.log(math.pi * sigma_sq)
    n_nodes = nodes.size
    chunk = max(1, _BLOCK // (n_nodes * reps.size))
    expected_logp = 0.0
    for start in range(0, reps.size, chunk):
        block = reps[start : start + chunk]
        y = block[:, None] + nodes[None, :]
        d2 = (y.real[..., None] - reps.real) ** 2 + (y.imag[..., None] - reps.imag) ** 2
        logp = logsumexp(log_mix - d2 / sigma_sq, axis=-1) - norm
        expected_logp += float(np.dot(counts[start : start + chunk] / total, logp @ weights))
    return -expected_logp / _LN2


def _gaussian_entropy_bits(sigma_sq: float) -> float:
    return math.log2(math.pi * math.e * sigma_sq)


@dataclass(frozen=True)
class QuadTerms:
    """The five mutual-information terms, in bits."""

    i_x2_y: float
    i_x1_y_given_x2: float
    i_x2_y_given_x1: float
    i_x1_ye: float
    i_x2_ye: float
    i_x1_y: float

    @property
    def sum_rate(self) -> float:
        return self.i_x2_y + self.i_x1_y_given_x2

    @property
    def sum_rate_alt(self) -> float:
        return self.i_x1_y + self.i_x2_y_given_x1

    @property
    def ssr_raw(self) -> float:
        return self.sum_rate - self.i_x1_ye - self.i_x2_ye


def _check(c: Constellation) -> None:
    if abs(average_energy(c) - 1.0) > 1e-9:
        raise ContractError(f"{c.name}: quadrature oracle needs normalized constellations")


def quad_mi_terms(
    c1: Constellation,
    c2: Constellation,
    p: ChannelParams,
    q: QuadratureConfig = QuadratureConfig(),
) -> QuadTerms:
    _check(c1)
    _check(c2)
    m1, m2 = c1.order, c2.order
    if m1 * m2 > q.joint_size_limit:
        raise TooLargeError(f"joint alphabet {m1}x{m2} exceeds the quadrature limit {q.joint_size_limit}")
    if p.power_per_user == 0.0:
        return QuadTerms(0.0, 0.0, 0.0, 0.0, 0.0, 0.0)
    amp = math.sqrt(p.power_per_user)
    x1 = amp * c1.points
    x2 = amp * c2.points
    sums = (x1[:, None] + x2[None, :]).ravel()

    def entropies(s2: float) -> tuple[float, float, float, float]:
        h_y = mixture_entropy(sums, s2, q)
        h_y_x2 = mixture_entropy(x1, s2, q) if m1 > 1 else _gaussian_entropy_bits(s2)
        h_y_x1 = mixture_entropy(x2, s2, q) if m2 > 1 else _gaussian_entropy_bits(s2)
        return h_y, h_y_x2, h_y_x1, _gaussian_entropy_bits(s2)

    h_y, h_y_x2, h_y_x1, h_w = entropies(p.sigma1_sq)
    if p.sigma2_sq == p.sigma1_sq:
        h_e, h_e_x2, h_e_x1 = h_y, h_y_x2, h_y_x1
    else:
        h_e, h_e_x2, h_e_x1, _ = entropies(p.sigma2_sq)
    # single-symbol alphabets carry no information by definition
    return QuadTerms(
        i_x2_y=h_y - h_y_x2 if m2 > 1 else 0.0,
        i_x1_y_given_x2=h_y_x2 - h_w if m1 > 1 else 0.0,
        i_x2_y_given_x1=h_y_x1 - h_w if m2 > 1 else 0.0,
        i_x1_ye=h_e - h_e_x1 if m1 > 1 else 0.0,
        i_x2_ye=h_e - h_e_x2 if m2 > 1 else 0.0,
        i_x1_y=h_y - h_y_x1 if m1 > 1 else 0.0,
    )


def _exact(bits: float, q: QuadratureConfig) -> MIEstimate:
    return MIEstimate(bits, 0.0, q.nodes_per_dim**2, Method.QUADRATURE)


def quad_sum_rate(c1, c2, p: ChannelParams, q: QuadratureConfig = QuadratureConfig()) -> MIEstimate:
    return _exact(quad_mi_terms(c1, c2, p, q).sum_rate, q)


def quad_rate_region_corner(c1, c2, p: ChannelParams, q: QuadratureConfig = QuadratureConfig()) -> RatePair:
    t = quad_mi_terms(c1, c2, p, q)
    return RatePair(_exact(t.i_x1_y_given_x2, q), _exact(t.i_x2_y_given_x1, q), _exact(t.sum_rate, q))


def quad_secrecy_rates(c1, c2, p: ChannelParams, q: QuadratureConfig = QuadratureConfig()) -> SecrecyRates:
    p.require_degraded()
    t = quad_mi_terms(c1, c2, p, q)
    comp = SecrecyComponents(
        i_x2_y=_exact(t.i_x2_y, q),
        i_x1_y_given_x2=_exact(t.i_x1_y_given_x2, q),
        i_x2_y_given_x1=_exact(t.i_x2_y_given_x1, q),
        i_x1_ye=_exact(t.i_x1_ye, q),
        i_x2_ye=_exact(t.i_x2_ye, q),
    )
    return SecrecyRates.from_components(comp)


def sumset_entropy(c1: Constellation, c2: Constellation, power: float = 1.0, tol: float = 1e-9) -> float:
    """Entropy (bits) of sqrt(P) (X1 + X2) for uniform independent inputs.

    Sums closer than ``tol`` count as the same output symbol. This is the
    high-SNR limit of the sum rate.
    """
    amp = math.sqrt(power)
    sums = (amp * c1.points[:, None] + amp * c2.points[None, :]).ravel()
    _, counts = _group(sums, tol)
    prob = counts / counts.sum()
    return float(-(prob * np.log2(prob)).sum()) + 0.0


def gaussian_capacity_bound(p: ChannelParams) -> float:
    """Gaussian-input sum capacity log2(1 + 2P / sigma1^2)."""
    return math.log2(1.0 + 2.0 * p.power_per_user / p.sigma1_sq)
