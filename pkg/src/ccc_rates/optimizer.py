"""Rotation of user 2's constellation to maximize the sum rate or the
secrecy sum rate.

Rotating both users by the same angle changes nothing (the noise is
circularly symmetric), so the relative rotation of user 2 is the only
degree of freedom. Monte Carlo sweeps reuse the same noise substreams at
every angle, which makes differences between angles far less noisy than
the individual estimates.
"""

from __future__ import annotations

import enum
import math
from dataclasses import dataclass
from typing import Sequence

import numpy as np

from .channel import ChannelParams, MCConfig
from .constellation import Constellation, rotate
from .errors import InvalidInputError
from .mi import Method, MIEstimate, secrecy_rates, sum_rate
from .oracle import QuadratureConfig, quad_secrecy_rates, quad_sum_rate

__all__ = [
    "Objective",
    "ThetaGrid",
    "SweepResult",
    "RefinedRotation",
    "evaluate_objective",
    "sweep_rotation",
    "refine_rotation",
]

_INV_PHI = (math.sqrt(5.0) - 1.0) / 2.0


class Objective(str, enum.Enum):
    SUM_RATE = "SUM_RATE"
    SECRECY_SUM_RATE = "SECRECY_SUM_RATE"


@dataclass(frozen=True)
class ThetaGrid:
    """Half-open angle grid [start, stop) in radians."""

    start: float = 0.0
    stop: float = math.pi / 2
    step: float = math.pi / 360

    def __post_init__(self):
        if not self.step > 0:
            raise InvalidInputError(f"grid step must be positive, got {self.step}")
        if not self.stop > self.start:
            raise InvalidInputError("grid stop must exceed start")

    def angles(self) -> np.ndarray:
        n = max(1, math.ceil((self.stop - self.start) / self.step - 1e-9))
        return self.start + self.step * np.arange(n)


@dataclass(frozen=True)
class SweepResult:
    angles: np.ndarray
    values: tuple[MIEstimate, ...]
    theta_opt: float
    value_opt: MIEstimate
    objective: Objective
    baseline: MIEstimate

    @property
    def bits(self) -> np.ndarray:
        return np.array([v.bits for v in self.values])

    @property
    def gain(self) -> float:
        return self.value_opt.bits - self.baseline.bits

    @property
    def gain_std_error(self) -> float:
        """Conservative error of ``gain``, treating both ends as independent."""
        return math.hypot(self.value_opt.std_error, self.baseline.std_error)


@dataclass(frozen=True)
class RefinedRotation:
    theta_opt: float
    value_opt: MIEstimate
    fallback: bool
    method: Method
    evaluations: int


def _resolve_method(method, c1: Constellation, c2: Constellation, q: QuadratureConfig) -> Method:
    if method is None or method == "auto":
        return Method.QUADRATURE if c1.order * c2.order <= q.joint_size_limit else Method.MONTE_CARLO
    return Method(method)


def evaluate_objective(
    objective: Objective,
    c1: Constellation,
    c2: Constellation,
    p: ChannelParams,
    *,
    method: Method = Method.MONTE_CARLO,
    mc: MCConfig | None = None,
    q: QuadratureConfig | None = None,
    threads: int | None = None,
) -> MIEstimate:
    """Sum rate, or clamped secrecy sum rate, of the pair (c1, c2)."""
    objective = Objective(objective)
    method = Method(method)
    if method is Method.QUADRATURE:
        q = q or QuadratureConfig()
        if objective is Objective.SUM_RATE:
            return quad_sum_rate(c1, c2, p, q)
        return quad_secrecy_rates(c1, c2, p, q).ssr
    mc = mc or MCConfig()
    if objective is Objective.SUM_RATE:
        return sum_rate(c1, c2, p, mc, threads=threads)
    return secrecy_rates(c1, c2, p, mc, threads=threads).ssr


def sweep_rotation(
    c1: Constellation,
    c2: Constellation,
    p: ChannelParams,
    mc: MCConfig | None = None,
    objective: Objective = Objective.SUM_RATE,
    grid: ThetaGrid | Sequence[float] | None = None,
    *,
    method: Method = Method.MONTE_CARLO,
    q: QuadratureConfig | None = None,
    threads: int | None = None,
) -> SweepResult:
    """Evaluate the objective with user 2 rotated by every grid angle.

    The baseline is the unrotated pair; it is taken from the grid when
    the grid starts at 0 and evaluated separately otherwise.
    """
    if grid is None:
        grid = ThetaGrid()
    angles = grid.angles() if isinstance(grid, ThetaGrid) else np.asarray(grid, dtype=float).reshape(-1)
    if angles.size == 0:
        raise InvalidInputError("rotation grid is empty")
    kw = dict(method=method, mc=mc, q=q, threads=threads)
    values = tuple(evaluate_objective(objective, c1, rotate(c2, float(t)), p, **kw) for t in angles)
    bits = np.array([v.bits for v in values])
    best = int(np.argmax(bits))
    baseline = values[0] if angles[0] == 0.0 else evaluate_objective(objective, c1, c2, p, **kw)
    return SweepResult(angles, values, float(angles[best]), values[best], Objective(objective), baseline)


def refine_rotation(
    sweep: SweepResult,
    c1: Constellation,
    c2: Constellation,
    p: ChannelParams,
    mc: MCConfig | None = None,
    tol_radians: float = 1e-3,
    *,
    method: Method | str | None = None,
    q: QuadratureConfig | None = None,
    threads: int | None = None,
) -> RefinedRotation:
    """Golden-section search inside the grid cell around the sweep optimum.

    Uses the quadrature objective when the joint alphabet fits the
    quadrature limit (``method=None``), otherwise fixed-seed Monte Carlo.
    If an end of the bracket beats its centre the objective is not
    unimodal there; the sweep optimum is returned with ``fallback=True``.
    """
    if len(sweep.angles) < 3:
        raise InvalidInputError("refinement needs a sweep with at least 3 angles")
    if not tol_radians > 0:
        raise InvalidInputError("tol_radians must be positive")
    q = q or QuadratureConfig()
    use = _resolve_method(method, c1, c2, q)
    angles = sweep.angles
    i = int(np.argmin(np.abs(angles - sweep.theta_opt)))
    left = angles[i] - angles[i - 1] if i > 0 else angles[1] - angles[0]
    right = angles[i + 1] - angles[i] if i + 1 < len(angles) else angles[-1] - angles[-2]
    lo, mid, hi = angles[i] - left, float(angles[i]), angles[i] + right

    evals = 0
    cache: dict[float, MIEstimate] = {}

    def f(theta: float) -> MIEstimate:
        nonlocal evals
        if theta not in cache:
            evals += 1
            cache[theta] = evaluate_objective(
                sweep.objective, c1, rotate(c2, theta), p, method=use, mc=mc, q=q, threads=threads
            )
        return cache[theta]

    f_mid = f(mid)
    if max(f(lo).bits, f(hi).bits) > f_mid.bits:
        return RefinedRotation(sweep.theta_opt, sweep.value_opt, True, sweep.value_opt.method, evals)

    a, b = lo, hi
    x1 = b - _INV_PHI * (b - a)
    x2 = a + _INV_PHI * (b - a)
    while b - a > tol_radians:
        if f(x1).bits >= f(x2).bits:
            b, x2 = x2, x1
            x1 = b - _INV_PHI * (b - a)
        else:
            a, x1 = x1, x2
            x2 = a + _INV_PHI * (b - a)
    theta, value = max(cache.items(), key=lambda kv: (kv[1].bits, -abs(kv[0] - mid)))
    return RefinedRotation(float(theta), value, False, use, evals)
