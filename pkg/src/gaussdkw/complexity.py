"""Covering numbers, admissible sequences, and chaining-functional bounds.

Everything here is driven by one farthest-point-sampling pass over the set:
the insertion radii of that pass give greedy covering numbers at every scale
simultaneously, and its prefixes of size min(n, 2^{2^s}) serve as the levels
of an admissible sequence.  Greedy covers are upper estimates of the true
covering number within the standard packing/covering sandwich
N(A, delta) <= greedy(delta) <= N(A, delta/2); the functional estimates
inherit that slack and all cross-checks in the test-suite carry it
explicitly.
"""

from __future__ import annotations

import json
import math
from dataclasses import dataclass

import numpy as np

from gaussdkw.errors import ConfigError
from gaussdkw.pointsets import UnitPointSet
from gaussdkw.rng import STREAM_NET, counter_normals, counter_uniforms, derive_seed

_CENTER_CANDIDATES = 512
_CENTER_SEED = 0x466153


@dataclass(frozen=True)
class FarthestPointProfile:
    """Result of one farthest-point pass.

    order[k] is the k-th chosen input index; radii[k] is the distance of
    order[k] to the first k centres at selection time (non-increasing), with
    radii[0] = inf by convention.  level_dists[s] holds, for every input
    point, its distance to the first min(n, 2^{2^s}) centres.
    """

    order: np.ndarray
    radii: np.ndarray
    level_sizes: list[int]
    level_dists: list[np.ndarray]


def _level_sizes(n: int) -> list[int]:
    sizes = [1]
    s = 1
    while sizes[-1] < n:
        sizes.append(min(n, 2 ** (2**s)))
        s += 1
    return sizes


def _pick_center(pts: np.ndarray) -> int:
    """Candidate point minimising the maximal distance to the set."""
    n = pts.shape[0]
    if n <= _CENTER_CANDIDATES:
        cand = np.arange(n)
    else:
        u = counter_uniforms(_CENTER_SEED, n)
        cand = np.sort(np.argsort(u)[:_CENTER_CANDIDATES])
    gram = pts @ pts[cand].T
    worst = np.max(np.maximum(2.0 - 2.0 * gram, 0.0), axis=0)
    return int(cand[int(np.argmin(worst))])


def _profile(a: UnitPointSet) -> FarthestPointProfile:
    cached = a._cache.get("fps")
    if cached is not None:
        return cached
    pts = a.points
    n = pts.shape[0]
    start = _pick_center(pts)
    sizes = _level_sizes(n)
    order = np.empty(n, dtype=np.int64)
    radii = np.empty(n, dtype=np.float64)
    order[0], radii[0] = start, np.inf
    d2 = np.maximum(2.0 - 2.0 * (pts @ pts[start]), 0.0)
    d2[start] = 0.0
    level_dists: list[np.ndarray] = []
    snap = {size for size in sizes}
    if 1 in snap:
        level_dists.append(np.sqrt(d2))
    for k in range(1, n):
        j = int(np.argmax(d2))
        radii[k] = math.sqrt(float(d2[j]))
        order[k] = j
        nd2 = np.maximum(2.0 - 2.0 * (pts @ pts[j]), 0.0)
        nd2[j] = 0.0
        np.minimum(d2, nd2, out=d2)
        if (k + 1) in snap:
            level_dists.append(np.sqrt(d2))
    prof = FarthestPointProfile(order=order, radii=radii, level_sizes=sizes,
                                level_dists=level_dists)
    a._cache["fps"] = prof
    return prof


def covering_number(a: UnitPointSet, delta: float) -> int:
    """Greedy farthest-point estimate of N(A, delta) with open balls.

    Upper bound on the true covering number; at most N(A, delta/2) by the
    packing/covering sandwich.
    """
    if delta <= 0.0:
        raise ConfigError(f"covering_number: delta must be > 0, got {delta!r}")
    radii = _profile(a).radii
    return 1 + int(np.sum(radii[1:] >= delta))


@dataclass(frozen=True)
class AdmissibleSequence:
    """Nested level sets A_s (|A_0| = 1, |A_s| <= 2^{2^s}) with nearest maps.

    levels[s] lists input indices of A_s; assignments[s][i] is the input
    index of the Euclidean-nearest point of A_s to point i, ties resolved
    toward the lowest input index.
    """

    levels: list[np.ndarray]
    assignments: list[np.ndarray]


def build_admissible_sequence(a: UnitPointSet) -> AdmissibleSequence:
    """Farthest-point prefixes of sizes min(n, 2^{2^s}) as the level sets."""
    prof = _profile(a)
    pts = a.points
    levels, assignments = [], []
    for size in prof.level_sizes:
        idx = np.sort(prof.order[:size])
        gram = pts @ pts[idx].T
        nearest = idx[np.argmax(gram, axis=1)]
        levels.append(idx)
        assignments.append(nearest)
    return AdmissibleSequence(levels=levels, assignments=assignments)


def gamma_upper(a: UnitPointSet, alpha: float) -> float:
    """sup_x sum_s 2^{s/alpha} ||x - pi_s x|| over the greedy admissible sequence.

    An upper bound on the alpha-chaining functional of the set.
    """
    if alpha <= 0.0:
        raise ConfigError(f"gamma_upper: alpha must be > 0, got {alpha!r}")
    prof = _profile(a)
    total = np.zeros(a.n)
    for s, dists in enumerate(prof.level_dists):
        total += (2.0 ** (s / alpha)) * dists
    return float(np.max(total))


def sudakov_lower(a: UnitPointSet) -> float:
    """max over dyadic delta in {2, 1, ..., 2^-20} of delta * log N(A, delta).

    Single-scale entropy functional; with the greedy covering estimate it is
    approximate, with slack bounded by the greedy factor.
    """
    radii = _profile(a).radii
    best = 0.0
    for j in range(-1, 21):
        delta = 2.0 ** (-j)
        n_delta = 1 + int(np.sum(radii[1:] >= delta))
        best = max(best, delta * math.log(n_delta))
    return best


def dudley_upper(a: UnitPointSet) -> float:
    """Entropy integral of the greedy covering profile, integral of log N d(delta).

    The greedy profile is a step function of delta, so the dyadic Riemann
    sum is evaluated in closed form (its step-halving limit): with insertion
    radii r_1 >= r_2 >= ..., the integral equals sum_k r_k (log(k+1) - log k).
    """
    radii = _profile(a).radii[1:]
    if radii.size == 0:
        return 0.0
    k = np.arange(1, radii.size + 1, dtype=np.float64)
    return float(np.sum(radii * (np.log(k + 1.0) - np.log(k))))


@dataclass(frozen=True)
class ComplexityReport:
    """Functional estimates plus the covering profile they derive from."""

    gamma1_upper: float
    gamma2_upper: float
    sudakov_lower: float
    dudley_upper: float
    covering_profile: list[tuple[float, int]]

    def to_json(self) -> str:
        payload = {
            "gamma1_upper": self.gamma1_upper,
            "gamma2_upper": self.gamma2_upper,
            "sudakov_lower": self.sudakov_lower,
            "dudley_upper": self.dudley_upper,
            "covering_profile": [[d, n] for d, n in self.covering_profile],
        }
        return json.dumps(payload, sort_keys=True, indent=2)


def complexity_report(a: UnitPointSet) -> ComplexityReport:
    radii = _profile(a).radii
    profile = []
    for j in range(-1, 21):
        delta = 2.0 ** (-j)
        profile.append((delta, 1 + int(np.sum(radii[1:] >= delta))))
    return ComplexityReport(
        gamma1_upper=gamma_upper(a, 1.0),
        gamma2_upper=gamma_upper(a, 2.0),
        sudakov_lower=sudakov_lower(a),
        dudley_upper=dudley_upper(a),
        covering_profile=profile,
    )


# ---------------------------------------------------------------------------
# sparse-sphere cover

_NET_RATE = 4.0          # net size exp(_NET_RATE * |E|) per support
_NET_BUDGET = 2_000_000  # total vectors allowed at desk scale
_TESTS_PER_DIM = 256
_HALF_NET_GRAM = 1.0 - 0.5**2 / 2.0  # ||b - b'|| <= 1/2  <=>  <b,b'> >= 7/8


def _support_net(size: int, seed: int) -> np.ndarray:
    """A verified 1/2-net of the unit sphere in R^size."""
    if size == 1:
        return np.array([[1.0], [-1.0]])
    n_net = int(math.ceil(math.exp(_NET_RATE * size)))
    g = counter_normals(seed, (n_net, size), stream=STREAM_NET)
    net = g / np.linalg.norm(g, axis=1, keepdims=True)
    tests = counter_normals(seed, (_TESTS_PER_DIM * size, size), stream=STREAM_NET + 1)
    tests /= np.linalg.norm(tests, axis=1, keepdims=True)
    extras = []
    best = np.max(tests @ net.T, axis=1)
    for i in np.nonzero(best < _HALF_NET_GRAM)[0]:
        extras.append(tests[i])
    if extras:
        net = np.concatenate([net, np.array(extras)], axis=0)
    return net


def sparse_cover(m: int, k: int, seed: int) -> np.ndarray:
    """Union over supports |E| <= k of verified 1/2-nets of the sub-spheres S_E.

    Guarantees, for every a in R^m, that the Euclidean norm of its k largest
    coordinates is at most 2 * sup over returned b of <a, b>.  Rows are
    returned in lexicographic order.
    """
    from itertools import combinations

    if not (1 <= k <= m <= 16):
        raise ConfigError(f"sparse_cover: need 1 <= k <= m <= 16, got k={k}, m={m}")
    total = 0
    for ell in range(1, k + 1):
        per = 2 if ell == 1 else int(math.ceil(math.exp(_NET_RATE * ell)))
        total += math.comb(m, ell) * per
    if total > _NET_BUDGET:
        raise ConfigError(
            f"sparse_cover: {total} net vectors exceed the desk-scale budget {_NET_BUDGET}")
    blocks = []
    support_index = 0
    for ell in range(1, k + 1):
        for supp in combinations(range(m), ell):
            sub = _support_net(ell, derive_seed(seed, support_index))
            block = np.zeros((sub.shape[0], m))
            block[:, list(supp)] = sub
            blocks.append(block)
            support_index += 1
    cover = np.concatenate(blocks, axis=0)
    return cover[np.lexsort(cover.T[::-1])]


def top_k_norm(a: np.ndarray, k: int) -> float:
    """Euclidean norm of the k largest-in-magnitude coordinates of a."""
    mags = np.sort(np.abs(np.asarray(a, dtype=np.float64)))[::-1]
    return float(np.linalg.norm(mags[:k]))
