"""Generator and serialisation tests for unit point sets."""

import math

import numpy as np
import pytest

from gaussdkw import pointsets as ps
from gaussdkw.errors import ConfigError, DomainError


def pairwise_distances(pts: np.ndarray) -> np.ndarray:
    d = np.linalg.norm(pts[:, None, :] - pts[None, :, :], axis=-1)
    np.fill_diagonal(d, np.inf)
    return d


class TestUnitPointSet:
    def test_rejects_non_unit(self):
        with pytest.raises(DomainError):
            ps.UnitPointSet(dim=2, points=np.array([[0.5, 0.5]]), symmetric=False,
                            label="bad")

    def test_rejects_duplicates(self):
        pts = np.array([[1.0, 0.0], [1.0, 0.0]])
        with pytest.raises(ConfigError):
            ps.UnitPointSet(dim=2, points=pts, symmetric=False, label="dup")

    def test_rejects_false_symmetry_flag(self):
        pts = np.array([[1.0, 0.0], [0.0, 1.0]])
        with pytest.raises(ConfigError):
            ps.UnitPointSet(dim=2, points=pts, symmetric=True, label="asym")

    def test_rejects_empty(self):
        with pytest.raises(ConfigError):
            ps.UnitPointSet(dim=3, points=np.zeros((0, 3)), symmetric=False, label="e")


class TestSphereGrid:
    def test_single_pair_antipodal(self):
        a = ps.make_sphere_grid(2, 1, seed=5)
        assert a.n == 2
        assert np.allclose(a.points[0], -a.points[1])

    def test_norms(self):
        a = ps.make_sphere_grid(50, 100, seed=7)
        assert np.max(np.abs(np.linalg.norm(a.points, axis=1) - 1.0)) <= 1e-12

    def test_deterministic(self):
        a = ps.make_sphere_grid(5, 20, seed=9)
        b = ps.make_sphere_grid(5, 20, seed=9)
        assert np.array_equal(a.points, b.points)
        c = ps.make_sphere_grid(5, 20, seed=10)
        assert not np.array_equal(a.points, c.points)

    def test_rejects_zero_points(self):
        with pytest.raises(ConfigError):
            ps.make_sphere_grid(4, 0, seed=1)


class TestCap:
    def test_membership_single(self):
        a = ps.make_cap(9, 1, seed=3)
        e1 = np.eye(9)[0]
        r = 1.0 / math.sqrt(9)
        assert min(np.linalg.norm(a.points[0] - e1), np.linalg.norm(a.points[0] + e1)) <= r

    def test_membership_radius(self):
        d = 4
        a = ps.make_cap(d, 40, seed=3)
        e1 = np.eye(d)[0]
        dist = np.minimum(np.linalg.norm(a.points - e1, axis=1),
                          np.linalg.norm(a.points + e1, axis=1))
        assert np.max(dist) <= 1.0 / math.sqrt(d) + 1e-12

    def test_half_cap_diameter(self):
        d = 100
        a = ps.make_cap(d, 200, seed=11)
        plus = a.points[:200]
        dist = pairwise_distances(plus)
        assert dist[np.isfinite(dist)].max() <= 2.0 / math.sqrt(d)

    def test_symmetric(self):
        a = ps.make_cap(16, 13, seed=2)
        assert a.symmetric
        assert a.n == 26


class TestDensityExample:
    def test_small_case(self):
        a = ps.make_density_example(3, 0.1)
        assert a.n == 2
        assert np.max(np.abs(np.linalg.norm(a.points, axis=1) - 1.0)) <= 1e-12
        assert not a.symmetric

    def test_pairwise_distance(self):
        delta = 0.05
        a = ps.make_density_example(10, delta)
        d = pairwise_distances(a.points)
        finite = d[np.isfinite(d)]
        assert np.allclose(finite, delta * math.sqrt(2.0))

    def test_diameter_bound(self):
        delta = 1.0 / (2.0 * math.log(10))
        a = ps.make_density_example(10, delta)
        d = pairwise_distances(a.points)
        assert d[np.isfinite(d)].max() <= 2.0 * delta

    def test_delta_range(self):
        with pytest.raises(ConfigError):
            ps.make_density_example(10, 0.5)
        with pytest.raises(ConfigError):
            ps.make_density_example(10, 0.0)


class TestSeparatedSubset:
    def test_large_delta_single_point(self):
        a = ps.make_sphere_grid(6, 10, seed=4)
        sub = ps.make_separated_subset(a, 5.0)
        assert sub.n == 1

    def test_antipodal_retained(self):
        a = ps.make_sphere_grid(2, 1, seed=5)
        sub = ps.make_separated_subset(a, 1.0)
        assert sub.n == 2

    def test_postconditions(self):
        a = ps.make_sphere_grid(7, 50, seed=6)
        delta = 0.3
        sub = ps.make_separated_subset(a, delta)
        d = pairwise_distances(sub.points)
        assert d[np.isfinite(d)].min() >= delta / 2.0
        # maximality: every input point within delta/2 of some output point
        cross = np.linalg.norm(a.points[:, None, :] - sub.points[None, :, :], axis=-1)
        assert np.max(np.min(cross, axis=1)) <= delta / 2.0

    def test_rejects_nonpositive_delta(self):
        a = ps.make_sphere_grid(3, 4, seed=8)
        with pytest.raises(ConfigError):
            ps.make_separated_subset(a, 0.0)


class TestCsvRoundTrip:
    def test_exact_round_trip(self, tmp_path):
        a = ps.make_cap(12, 17, seed=21)
        path = tmp_path / "set.csv"
        ps.save_pointset_csv(a, path)
        b = ps.load_pointset_csv(path)
        assert b.dim == a.dim and b.n == a.n and b.symmetric == a.symmetric
        assert b.label == a.label
        assert np.array_equal(a.points, b.points)

    def test_loader_validates(self, tmp_path):
        path = tmp_path / "bad.csv"
        path.write_text("# gaussdkw-csv pointset v1\ndim,n,symmetric,label\n"
                        "2,1,false,broken\n0.5,0.5\n")
        with pytest.raises(DomainError):
            ps.load_pointset_csv(path)

    def test_loader_rejects_missing_schema(self, tmp_path):
        path = tmp_path / "noschema.csv"
        path.write_text("dim,n,symmetric,label\n2,1,false,x\n1.0,0.0\n")
        with pytest.raises(ConfigError):
            ps.load_pointset_csv(path)
