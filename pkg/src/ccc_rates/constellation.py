"""Finite-alphabet constellations: generators, normalization, rotation.

Generators return raw (unnormalized) geometry. Every rate computation in
the package expects unit-average-energy points, so callers go through
:func:`normalize` before estimating anything.
"""

from __future__ import annotations

import enum
import json
import math
from dataclasses import dataclass, field
from typing import Sequence

import numpy as np

from .errors import DegenerateEnergyError, InvalidInputError, InvalidOrderError, InvalidSpecError

__all__ = [
    "Family",
    "Constellation",
    "RingSpec",
    "gen_square_qam",
    "gen_cross_qam",
    "gen_hex_qam",
    "gen_star_qam",
    "gen_apsk",
    "gen_psk",
    "single_point",
    "normalize",
    "rotate",
    "min_distance",
    "average_energy",
    "default_star_rings",
    "default_apsk_rings",
]

_NORM_TOL = 1e-12


class Family(str, enum.Enum):
    SQUARE_QAM = "SQUARE_QAM"
    CROSS_QAM = "CROSS_QAM"
    HEX_QAM = "HEX_QAM"
    STAR_QAM = "STAR_QAM"
    APSK = "APSK"
    CUSTOM = "CUSTOM"


def _freeze(points) -> np.ndarray:
    arr = np.array(points, dtype=np.complex128).reshape(-1)
    arr.setflags(write=False)
    return arr


@dataclass(frozen=True, eq=False)
class Constellation:
    """An ordered, immutable set of complex symbols.

    Attributes
    ----------
    name : str
        Human-readable label, e.g. ``"16-HQAM"``.
    points : ndarray of complex128
        Read-only array of symbols.
    family : Family
        Generating family; governs which orders are admissible.
    normalized : bool
        True iff the average energy is one.
    rotation : float
        Total rotation (radians) applied since generation.
    """

    name: str
    points: np.ndarray
    family: Family = Family.CUSTOM
    normalized: bool = False
    rotation: float = 0.0

    def __post_init__(self):
        pts = _freeze(self.points)
        object.__setattr__(self, "points", pts)
        object.__setattr__(self, "family", Family(self.family))
        if pts.size < 1:
            raise InvalidInputError("constellation must contain at least one point")
        if not np.all(np.isfinite(pts)):
            raise InvalidInputError("constellation points must be finite")
        if pts.size > 1:
            d = np.abs(pts[:, None] - pts[None, :])
            d[np.diag_indices_from(d)] = np.inf
            if d.min() <= 0.0:
                raise InvalidInputError(f"{self.name}: constellation points must be distinct")
        if self.normalized and abs(average_energy(pts) - 1.0) > _NORM_TOL:
            raise InvalidInputError(f"{self.name}: flagged normalized but average energy is not 1")

    @property
    def order(self) -> int:
        return int(self.points.size)

    def __len__(self) -> int:
        return self.order

    def __eq__(self, other) -> bool:
        if not isinstance(other, Constellation):
            return NotImplemented
        return (
            self.name == other.name
            and self.family == other.family
            and self.normalized == other.normalized
            and self.rotation == other.rotation
            and np.array_equal(self.points, other.points)
        )

    __hash__ = None

    def to_dict(self) -> dict:
        return {
            "name": self.name,
            "family": self.family.value,
            "points": [[float(p.real), float(p.imag)] for p in self.points],
            "normalized": bool(self.normalized),
            "rotation": float(self.rotation),
        }

    def to_json(self, **kwargs) -> str:
        return json.dumps(self.to_dict(), **kwargs)

    @classmethod
    def from_dict(cls, data: dict) -> "Constellation":
        try:
            pts = [complex(re, im) for re, im in data["points"]]
            return cls(
                name=str(data["name"]),
                points=pts,
                family=Family(data.get("family", "CUSTOM")),
                normalized=bool(data.get("normalized", False)),
                rotation=float(data.get("rotation", 0.0)),
            )
        except (KeyError, TypeError, ValueError) as exc:
            if isinstance(exc, InvalidInputError):
                raise
            raise InvalidInputError(f"malformed constellation JSON: {exc}") from exc

    @classmethod
    def from_json(cls, text: str) -> "Constellation":
        return cls.from_dict(json.loads(text))


@dataclass(frozen=True)
class RingSpec:
    """Concentric-ring geometry shared by Star-QAM and APSK.

    ``radii`` are relative (pre-normalization) and strictly increasing;
    ``points_per_ring`` and ``phase_offsets`` carry one entry per ring.
    """

    radii: tuple[float, ...]
    points_per_ring: tuple[int, ...]
    phase_offsets: tuple[float, ...] = field(default=())

    def __post_init__(self):
        radii = tuple(float(r) for r in self.radii)
        counts = tuple(int(n) for n in self.points_per_ring)
        offsets = tuple(float(o) for o in self.phase_offsets) or (0.0,) * len(radii)
        object.__setattr__(self, "radii", radii)
        object.__setattr__(self, "points_per_ring", counts)
        object.__setattr__(self, "phase_offsets", offsets)
        if not radii:
            raise InvalidSpecError("ring spec needs at least one ring")
        if not (len(radii) == len(counts) == len(offsets)):
            raise InvalidSpecError("radii, points_per_ring and phase_offsets must have equal length")
        if any(r <= 0 or not math.isfinite(r) for r in radii):
            raise InvalidSpecError("ring radii must be positive and finite")
        if any(b <= a for a, b in zip(radii, radii[1:])):
            raise InvalidSpecError(f"ring radii must be strictly increasing, got {list(radii)}")
        if any(n < 1 for n in counts):
            raise InvalidSpecError("every ring needs at least one point")

    @property
    def order(self) -> int:
        return sum(self.points_per_ring)

    def points(self) -> np.ndarray:
        rings = []
        for r, n, off in zip(self.radii, self.points_per_ring, self.phase_offsets):
            phases = 2.0 * np.pi * np.arange(n) / n + off
            rings.append(r * np.exp(1j * phases))
        return np.concatenate(rings)


def average_energy(points) -> float:
    pts = np.asarray(points.points if isinstance(points, Constellation) else points)
    return float(np.mean(pts.real**2 + pts.imag**2))


def _is_power_of_two(m: int) -> bool:
    return m >= 1 and (m & (m - 1)) == 0


def _check_int(m, what: str) -> int:
    if isinstance(m, bool) or int(m) != m:
        raise InvalidOrderError(f"{what}: order must be an integer, got {m!r}")
    return int(m)


def gen_square_qam(m: int) -> Constellation:
    """Square M-QAM on odd-integer levels; M must be an even power of two."""
    m = _check_int(m, "square QAM")
    side = math.isqrt(m) if m > 0 else 0
    if m < 4 or side * side != m or not _is_power_of_two(m):
        raise InvalidOrderError(f"square QAM needs M in {{4, 16, 64, 256, ...}}, got {m}")
    levels = np.arange(-(side - 1), side, 2, dtype=float)
    re, im = np.meshgrid(levels, levels[::-1])
    return Constellation(f"{m}-QAM", (re + 1j * im).ravel(), Family.SQUARE_QAM)


def gen_cross_qam(m: int) -> Constellation:
    """Cross QAM for M = 2**(2k+1), k >= 2.

    Built from a square of side 3 * 2**(k-1) odd-integer levels with a
    2**(k-2) square block cut from each corner. For M=32 this is the
    6x6 grid on {+-1, +-3, +-5} without the four (+-5, +-5) corners.
    """
    m = _check_int(m, "cross QAM")
    k2 = m.bit_length() - 1
    if not _is_power_of_two(m) or k2 % 2 == 0 or k2 < 5:
        raise InvalidOrderError(f"cross QAM needs M = 2^(2k+1) with k >= 2 (32, 128, 512, ...), got {m}")
    k = (k2 - 1) // 2
    side = 3 * 2 ** (k - 1)
    cut = 2 ** (k - 2)
    levels = np.arange(-(side - 1), side, 2, dtype=float)
    edge = side - 1 - 2 * cut  # largest level kept on both axes simultaneously
    pts = [
        complex(x, y)
        for y in levels[::-1]
        for x in levels
        if not (abs(x) > edge and abs(y) > edge)
    ]
    assert len(pts) == m
    return Constellation(f"{m}-XQAM", pts, Family.CROSS_QAM)


def gen_hex_qam(m: int, d: float = 1.0) -> Constellation:
    """Regular hexagonal QAM with M = L**2 points in L rows of L.

    Points in a row sit 2d apart; rows are sqrt(3)*d apart and every odd
    row is shifted right by d. The result is translated so its centroid
    is the origin.
    """
    m = _check_int(m, "hex QAM")
    side = math.isqrt(m) if m > 0 else 0
    if side < 2 or side * side != m:
        raise InvalidOrderError(f"hex QAM needs M = L^2 with L >= 2 (4, 9, 16, 25, 36, 64, ...), got {m}")
    if not d > 0 or not math.isfinite(d):
        raise InvalidInputError(f"hex QAM spacing d must be positive, got {d}")
    rows = np.arange(side)
    cols = np.arange(side)
    x = 2.0 * d * cols[None, :] + d * (rows[:, None] % 2)
    y = math.sqrt(3.0) * d * np.broadcast_to(rows[:, None], (side, side))
    pts = (x + 1j * y).ravel()
    pts = pts - pts.mean()
    return Constellation(f"{m}-HQAM", pts, Family.HEX_QAM)


def default_star_rings(m: int) -> RingSpec:
    """8 points per ring, radii doubling ring to ring, zero phase offsets."""
    c = m // 8
    return RingSpec(tuple(2.0**i for i in range(c)), (8,) * c, (0.0,) * c)


def gen_star_qam(m: int, ring: RingSpec | None = None) -> Constellation:
    """Star QAM: concentric 8-PSK rings sharing the phase grid n*pi/4."""
    m = _check_int(m, "star QAM")
    if m < 8 or m % 8:
        raise InvalidSpecError(f"star QAM needs M divisible by 8 (8, 16, 24, 32, ...), got {m}")
    ring = ring if ring is not None else default_star_rings(m)
    if any(n != 8 for n in ring.points_per_ring) or ring.order != m:
        raise InvalidSpecError(
            f"star QAM with M={m} needs {m // 8} rings of 8 points, got {list(ring.points_per_ring)}"
        )
    return Constellation(f"{m}-STAR", ring.points(), Family.STAR_QAM)


_APSK_DEFAULTS = {
    16: RingSpec((1.0, 2.57), (4, 12), (math.pi / 4, math.pi / 12)),
    32: RingSpec((1.0, 2.53, 4.30), (4, 12, 16), (math.pi / 4, math.pi / 12, 0.0)),
}


def default_apsk_rings(m: int) -> RingSpec:
    try:
        return _APSK_DEFAULTS[m]
    except KeyError:
        raise InvalidSpecError(f"no default APSK geometry for M={m}; pass an explicit RingSpec") from None


def gen_apsk(m: int, ring: RingSpec | None = None) -> Constellation:
    """APSK with the DVB-S2 style 4+12 / 4+12+16 defaults, or any explicit rings."""
    m = _check_int(m, "APSK")
    ring = ring if ring is not None else default_apsk_rings(m)
    if ring.order != m:
        raise InvalidSpecError(f"ring spec holds {ring.order} points but M={m}")
    return Constellation(f"{m}-APSK", ring.points(), Family.APSK)


def gen_psk(m: int) -> Constellation:
    """Unit-circle M-PSK (a single APSK ring); M=2 gives BPSK {+1, -1}."""
    m = _check_int(m, "PSK")
    if m < 1:
        raise InvalidOrderError(f"PSK needs M >= 1, got {m}")
    c = gen_apsk(m, RingSpec((1.0,), (m,), (0.0,)))
    pts = c.points.copy()
    # snap the exactly-representable axis points (sin(pi) is not 0 in floating point)
    pts.real[np.abs(pts.real) < 1e-15] = 0.0
    pts.imag[np.abs(pts.imag) < 1e-15] = 0.0
    return Constellation(f"{m}-PSK", pts, Family.APSK, normalized=True)


def single_point(value: complex = 1.0 + 0.0j) -> Constellation:
    """Degenerate one-symbol alphabet; normalized when |value| = 1."""
    return Constellation("1-POINT", [value], Family.CUSTOM, normalized=abs(abs(value) - 1.0) <= _NORM_TOL)


def normalize(c: Constellation) -> Constellation:
    """Scale to unit average energy. Idempotent."""
    energy = average_energy(c)
    if energy <= 0.0:
        raise DegenerateEnergyError(f"{c.name}: average energy is zero")
    if c.normalized and abs(energy - 1.0) <= _NORM_TOL:
        return c
    return Constellation(c.name, c.points / math.sqrt(energy), c.family, True, c.rotation)


def rotate(c: Constellation, theta: float) -> Constellation:
    """Multiply every point by exp(j*theta)."""
    if theta == 0.0:
        return c
    pts = c.points * complex(math.cos(theta), math.sin(theta))
    normalized = c.normalized and abs(average_energy(pts) - 1.0) <= _NORM_TOL
    return Constellation(c.name, pts, c.family, normalized, c.rotation + float(theta))


def min_distance(c: Constellation | Sequence[complex]) -> float:
    pts = np.asarray(c.points if isinstance(c, Constellation) else c, dtype=np.complex128)
    if pts.size < 2:
        raise InvalidInputError("minimum distance needs at least two points")
    d = np.abs(pts[:, None] - pts[None, :])
    d[np.diag_indices_from(d)] = np.inf
    return float(d.min())
