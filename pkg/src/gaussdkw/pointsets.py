"""Finite point sets on the unit sphere S^{d-1}.

Generators for the index sets the deviation experiments range over: seeded
sphere grids, spherical caps of radius 1/sqrt(d) around e_1, the
near-collapsed family {sqrt(1-delta^2) e_1 + delta e_k}, and greedy
separated subsets.  Sets carry a symmetry flag (A = -A) because the uniform
deviation theorems assume it; generators that symmetrise do so by exact
negation so the flag is checkable bit-for-bit.
"""

from __future__ import annotations

import math
from dataclasses import dataclass, field

import numpy as np

from gaussdkw.errors import ConfigError, DomainError
from gaussdkw.rng import STREAM_CAP, STREAM_SPHERE, counter_normals, counter_uniforms

_NORM_TOL = 1e-12
_DUP_TOL = 1e-12


@dataclass(frozen=True)
class UnitPointSet:
    """A finite subset of the unit sphere with symmetry metadata.

    Invariants (checked on construction): every row of `points` has unit
    Euclidean norm within 1e-12, no two rows coincide within 1e-12, and if
    `symmetric` is set, -x is present for every row x.
    """

    dim: int
    points: np.ndarray
    symmetric: bool
    label: str
    _cache: dict = field(default_factory=dict, repr=False, compare=False)

    def __post_init__(self):
        pts = np.ascontiguousarray(np.asarray(self.points, dtype=np.float64))
        if pts.ndim != 2 or pts.shape[1] != self.dim:
            raise ConfigError(f"point array must be (n, {self.dim}), got {pts.shape}")
        if pts.shape[0] == 0:
            raise ConfigError("point set must be nonempty")
        object.__setattr__(self, "points", pts)
        norms = np.linalg.norm(pts, axis=1)
        worst = float(np.max(np.abs(norms - 1.0)))
        if worst > _NORM_TOL:
            raise DomainError(f"non-unit point in set (norm error {worst:.3e})")
        if _has_duplicates(pts):
            raise ConfigError("duplicate points within tolerance")
        if self.symmetric and not is_symmetric(pts):
            raise ConfigError("set flagged symmetric but some -x is missing")

    @property
    def n(self) -> int:
        return self.points.shape[0]


def _round_keys(pts: np.ndarray):
    return [tuple(row) for row in np.round(pts, decimals=9)]


def _has_duplicates(pts: np.ndarray) -> bool:
    groups: dict = {}
    for i, key in enumerate(_round_keys(pts)):
        groups.setdefault(key, []).append(i)
    for idx in groups.values():
        if len(idx) > 1:
            sub = pts[idx]
            d2 = np.sum((sub[:, None, :] - sub[None, :, :]) ** 2, axis=-1)
            np.fill_diagonal(d2, np.inf)
            if np.min(d2) <= _DUP_TOL**2:
                return True
    return False


def is_symmetric(pts: np.ndarray) -> bool:
    """True when -x is present (within 1e-12) for every point x."""
    lookup = {}
    for i, key in enumerate(_round_keys(pts)):
        lookup.setdefault(key, []).append(i)
    for i, key in enumerate(_round_keys(-pts)):
        found = False
        for j in lookup.get(key, []):
            if np.linalg.norm(pts[j] + pts[i]) <= _DUP_TOL:
                found = True
                break
        if not found:
            return False
    return True


def _symmetrize(pts: np.ndarray) -> np.ndarray:
    return np.concatenate([pts, -pts], axis=0)


def make_sphere_grid(d: int, n: int, seed: int) -> UnitPointSet:
    """2n points: n normalised Gaussian directions plus their antipodes."""
    if d < 2:
        raise ConfigError(f"make_sphere_grid: d must be >= 2, got {d}")
    if n < 1:
        raise ConfigError(f"make_sphere_grid: n must be >= 1, got {n}")
    g = counter_normals(seed, (n, d), stream=STREAM_SPHERE)
    pts = g / np.linalg.norm(g, axis=1, keepdims=True)
    return UnitPointSet(dim=d, points=_symmetrize(pts), symmetric=True,
                        label=f"sphere(d={d},n={n},seed={seed})")


def make_cap(d: int, n: int, seed: int) -> UnitPointSet:
    """2n points in the caps of Euclidean radius 1/sqrt(d) around +-e_1.

    Each point is built in polar form: a tangent direction w orthogonal to
    e_1 and a chord length rho = R * u^{1/(d-1)} (the cap's surface measure
    in the chord radius), then x = cos(theta) e_1 + sin(theta) w with
    2(1 - cos theta) = rho^2, so membership ||x - e_1|| = rho <= R is exact.
    """
    if d < 2:
        raise ConfigError(f"make_cap: d must be >= 2, got {d}")
    if n < 1:
        raise ConfigError(f"make_cap: n must be >= 1, got {n}")
    radius = 1.0 / math.sqrt(d)
    g = counter_normals(seed, (n, d), stream=STREAM_CAP)
    g[:, 0] = 0.0
    w = g / np.linalg.norm(g, axis=1, keepdims=True)
    u = counter_uniforms(seed, n, stream=STREAM_CAP + 1)
    rho = radius * u ** (1.0 / (d - 1))
    cos_t = 1.0 - 0.5 * rho**2
    sin_t = np.sqrt(np.maximum(1.0 - cos_t**2, 0.0))
    pts = sin_t[:, None] * w
    pts[:, 0] = cos_t
    return UnitPointSet(dim=d, points=_symmetrize(pts), symmetric=True,
                        label=f"cap(d={d},n={n},seed={seed})")


def make_density_example(d: int, delta: float) -> UnitPointSet:
    """The d-1 points sqrt(1-delta^2) e_1 + delta e_k, k = 2..d.

    All pairwise distances equal delta*sqrt(2) and the diameter is below
    2*delta; the set is deliberately not symmetrised.  Requires
    delta <= 1/(2 log d), the regime in which its chaining functional stays
    below 1.
    """
    if d < 2:
        raise ConfigError(f"make_density_example: d must be >= 2, got {d}")
    limit = 1.0 / (2.0 * math.log(d))
    if not (0.0 < delta <= limit + 1e-12):
        raise ConfigError(
            f"make_density_example: need 0 < delta <= 1/(2 log d) = {limit:.6g}, got {delta!r}")
    pts = np.zeros((d - 1, d))
    pts[:, 0] = math.sqrt(1.0 - delta**2)
    pts[np.arange(d - 1), np.arange(1, d)] = delta
    return UnitPointSet(dim=d, points=pts, symmetric=False,
                        label=f"density-example(d={d},delta={delta:.6g})")


def make_separated_subset(a: UnitPointSet, delta: float) -> UnitPointSet:
    """Greedy maximal delta/2-packing of `a`, scanned in index order.

    Output points are pairwise >= delta/2 apart and every point of `a` lies
    within delta/2 of some output point (maximality of the greedy scan).
    """
    if delta <= 0.0:
        raise ConfigError(f"make_separated_subset: delta must be > 0, got {delta!r}")
    sep2 = (0.5 * delta) ** 2
    pts = a.points
    chosen: list[int] = []
    min_d2 = np.full(pts.shape[0], np.inf)
    for i in range(pts.shape[0]):
        if min_d2[i] >= sep2:
            chosen.append(i)
            d2 = np.maximum(2.0 - 2.0 * (pts @ pts[i]), 0.0)
            min_d2 = np.minimum(min_d2, d2)
    sub = pts[chosen]
    return UnitPointSet(dim=a.dim, points=sub, symmetric=bool(is_symmetric(sub)),
                        label=f"{a.label}|sep(delta={delta:.6g})")


# ---------------------------------------------------------------------------
# CSV serialisation

_SCHEMA = "# gaussdkw-csv pointset v1"


def save_pointset_csv(a: UnitPointSet, path) -> None:
    """Write schema line, metadata header+row, then one coordinate row per point."""
    lines = [_SCHEMA, "dim,n,symmetric,label",
             f"{a.dim},{a.n},{'true' if a.symmetric else 'false'},{a.label}"]
    for row in a.points:
        lines.append(",".join(repr(float(v)) for v in row))
    with open(path, "w") as fh:
        fh.write("\n".join(lines) + "\n")


def load_pointset_csv(path) -> UnitPointSet:
    """Load and re-validate a point set written by save_pointset_csv."""
    with open(path) as fh:
        lines = [ln.rstrip("\n") for ln in fh if ln.strip()]
    if not lines or lines[0].strip() != _SCHEMA:
        raise ConfigError(f"{path}: missing or wrong schema line (expected {_SCHEMA!r})")
    if len(lines) < 3 or lines[1].strip() != "dim,n,symmetric,label":
        raise ConfigError(f"{path}: malformed point-set header")
    dim_s, n_s, sym_s, label = lines[2].split(",", 3)
    dim, n = int(dim_s), int(n_s)
    rows = lines[3:]
    if len(rows) != n:
        raise ConfigError(f"{path}: expected {n} point rows, found {len(rows)}")
    pts = np.array([[float(v) for v in row.split(",")] for row in rows])
    return UnitPointSet(dim=dim, points=pts, symmetric=sym_s.strip() == "true",
                        label=label)
