import numpy as np
import pytest
from hypothesis import given, settings
from hypothesis import strategies as st

from grinterp import (
    ChartFrame,
    IllConditionedBlock,
    LocalCoordMatrix,
    StiefelPoint,
    chart_psi,
    cond_phi_bound,
    coord_distance_to_base,
    dphi,
    dpsi,
    grassmann_exp,
    param_phi,
    psi_spread_bound,
    subspace_distance,
)
from grinterp.coords import block_inv_norm_sq

from _dense import canonical_norm_dense, projector, random_horizontal, random_point

DPHI_CAP = np.sqrt(2.5) + 1.0


def base_point(frame: ChartFrame) -> StiefelPoint:
    return param_phi(LocalCoordMatrix(np.zeros((frame.n - frame.p, frame.p)), frame))


class TestChartFrame:
    def test_rejects_non_permutation(self):
        with pytest.raises(ValueError, match="permutation"):
            ChartFrame(np.array([0, 0, 1]), 1)

    def test_rejects_bad_p(self):
        with pytest.raises(ValueError):
            ChartFrame(np.arange(4), 5)

    @settings(max_examples=30, deadline=None)
    @given(seed=st.integers(0, 10_000))
    def test_apply_unapply_roundtrip(self, seed):
        rng = np.random.default_rng(seed)
        n = int(rng.integers(2, 15))
        perm = rng.permutation(n)
        frame = ChartFrame(perm, 1)
        m = rng.standard_normal((n, 3))
        assert np.array_equal(frame.unapply(frame.apply(m)), m)
        assert np.array_equal(frame.apply(frame.unapply(m)), m)

    def test_identity(self):
        assert ChartFrame.identity(5, 2).is_identity()
        assert not ChartFrame(np.array([1, 0, 2, 3, 4]), 2).is_identity()


class TestChartRoundtrip:
    @pytest.mark.parametrize("n,p", [(8, 2), (30, 5)])
    def test_psi_phi_roundtrip(self, n, p):
        rng = np.random.default_rng(n + p)
        frame = ChartFrame(rng.permutation(n), p)
        u = random_point(rng, n, p)
        b = chart_psi(u, frame)
        v = param_phi(b)
        assert subspace_distance(u, v) < 1e-10
        assert v.feasibility() < 1e-12

    def test_phi_psi_roundtrip(self):
        rng = np.random.default_rng(1)
        frame = ChartFrame.identity(12, 3)
        b = LocalCoordMatrix(rng.standard_normal((9, 3)), frame)
        b2 = chart_psi(param_phi(b), frame)
        assert np.allclose(b2.b, b.b, atol=1e-12)

    def test_variants_agree(self):
        rng = np.random.default_rng(2)
        frame = ChartFrame.identity(15, 4)
        b = LocalCoordMatrix(rng.standard_normal((11, 4)), frame)
        u1 = param_phi(b, variant="cholesky")
        u2 = param_phi(b, variant="sqrt")
        assert subspace_distance(u1, u2) < 1e-10

    def test_unknown_variant(self):
        frame = ChartFrame.identity(5, 2)
        b = LocalCoordMatrix(np.zeros((3, 2)), frame)
        with pytest.raises(ValueError, match="variant"):
            param_phi(b, variant="qr")

    def test_zero_coordinates_give_base(self):
        frame = ChartFrame.identity(7, 2)
        u = base_point(frame)
        assert np.allclose(u.u, np.eye(7)[:, :2])
        assert np.allclose(chart_psi(u, frame).b, 0.0)

    def test_singular_block_raises(self):
        u = StiefelPoint(np.eye(8)[:, 4:6])  # top 2x2 block is zero
        with pytest.raises(IllConditionedBlock):
            chart_psi(u, ChartFrame.identity(8, 2))


class TestDpsi:
    def test_matches_finite_difference(self):
        rng = np.random.default_rng(3)
        frame = ChartFrame.identity(14, 3)
        u = random_point(rng, 14, 3)
        d = random_horizontal(rng, u, 1.0)
        h = 1e-6
        b_plus = chart_psi(grassmann_exp(u, d, h), frame).b
        b_minus = chart_psi(grassmann_exp(u, d, -h), frame).b
        fd = (b_plus - b_minus) / (2 * h)
        assert np.allclose(dpsi(u, d.delta, frame), fd, atol=1e-7)

    def test_lift_invariance(self):
        # adding a vertical component u A (A skew) must not change dpsi
        rng = np.random.default_rng(4)
        frame = ChartFrame.identity(10, 3)
        u = random_point(rng, 10, 3)
        d = random_horizontal(rng, u, 1.0)
        skew = rng.standard_normal((3, 3))
        skew = skew - skew.T
        a = dpsi(u, d.delta, frame)
        b = dpsi(u, d.delta + u.u @ skew, frame)
        assert np.allclose(a, b, atol=1e-10)


class TestDphi:
    def test_densified_matches_finite_difference(self):
        rng = np.random.default_rng(5)
        frame = ChartFrame.identity(9, 3)
        b = rng.standard_normal((6, 3))
        v = rng.standard_normal((6, 3))
        h = 1e-6
        pp = projector(param_phi(LocalCoordMatrix(b + h * v, frame)))
        pm = projector(param_phi(LocalCoordMatrix(b - h * v, frame)))
        fd = (pp - pm) / (2 * h)
        dense = dphi(LocalCoordMatrix(b, frame), v).densify()
        assert np.linalg.norm(dense - fd) < 1e-7

    def test_respects_frame_permutation(self):
        rng = np.random.default_rng(6)
        frame = ChartFrame(rng.permutation(9), 3)
        b = rng.standard_normal((6, 3))
        v = rng.standard_normal((6, 3))
        h = 1e-6
        pp = projector(param_phi(LocalCoordMatrix(b + h * v, frame)))
        pm = projector(param_phi(LocalCoordMatrix(b - h * v, frame)))
        fd = (pp - pm) / (2 * h)
        dense = dphi(LocalCoordMatrix(b, frame), v).densify()
        assert np.linalg.norm(dense - fd) < 1e-7

    def test_canonical_norm_matches_dense(self):
        rng = np.random.default_rng(7)
        frame = ChartFrame.identity(11, 3)
        b = LocalCoordMatrix(rng.standard_normal((8, 3)), frame)
        ft = dphi(b, rng.standard_normal((8, 3)))
        assert ft.canonical_norm() == pytest.approx(
            canonical_norm_dense(ft.densify()), abs=1e-10
        )

    def test_isometric_at_origin(self):
        rng = np.random.default_rng(8)
        frame = ChartFrame.identity(10, 2)
        b = LocalCoordMatrix(np.zeros((8, 2)), frame)
        v = rng.standard_normal((8, 2))
        assert dphi(b, v).canonical_norm() == pytest.approx(np.linalg.norm(v), abs=1e-12)

    @pytest.mark.parametrize("scale", [0.1, 1.0, 5.0])
    def test_bounded_by_cond_phi(self, scale):
        rng = np.random.default_rng(int(scale * 10))
        frame = ChartFrame.identity(12, 4)
        b = LocalCoordMatrix(scale * rng.standard_normal((8, 4)), frame)
        for _ in range(50):
            v = rng.standard_normal((8, 4))
            v /= np.linalg.norm(v)
            assert dphi(b, v).canonical_norm() <= cond_phi_bound(b) + 1e-10


class TestBounds:
    def test_cond_phi_global_cap(self):
        rng = np.random.default_rng(9)
        frame = ChartFrame.identity(20, 5)
        for scale in (0.0, 0.3, 1.0, 10.0):
            b = LocalCoordMatrix(scale * rng.standard_normal((15, 5)), frame)
            assert cond_phi_bound(b) <= DPHI_CAP + 1e-12

    def test_cond_phi_at_origin(self):
        frame = ChartFrame.identity(6, 2)
        b = LocalCoordMatrix(np.zeros((4, 2)), frame)
        assert cond_phi_bound(b) == pytest.approx(np.sqrt(2.0) + 1.0)

    def test_spread_bound_holds(self):
        rng = np.random.default_rng(10)
        frame = ChartFrame.identity(16, 4)
        for _ in range(100):
            u = random_point(rng, 16, 4)
            v = random_point(rng, 16, 4)
            spread = np.linalg.norm(chart_psi(u, frame).b - chart_psi(v, frame).b)
            assert spread <= psi_spread_bound(u, v, frame) * (1 + 1e-12) + 1e-12

    def test_spread_identity(self):
        rng = np.random.default_rng(11)
        frame = ChartFrame.identity(16, 4)
        u = random_point(rng, 16, 4)
        lhs = np.linalg.norm(chart_psi(u, frame).b) ** 2
        rhs = block_inv_norm_sq(u, frame) - 4
        assert lhs == pytest.approx(rhs, rel=1e-10)

    def test_coord_distance_formula(self):
        rng = np.random.default_rng(12)
        frame = ChartFrame.identity(18, 3)
        base = base_point(frame)
        for _ in range(20):
            b = LocalCoordMatrix(rng.standard_normal((15, 3)), frame)
            d = coord_distance_to_base(b)
            assert d == pytest.approx(subspace_distance(base, param_phi(b)), abs=1e-10)
            assert d <= np.sqrt(3) * np.arctan(np.linalg.norm(b.b, 2)) + 1e-12


class TestLocalCoordMatrix:
    def test_shape_validation(self):
        frame = ChartFrame.identity(6, 2)
        with pytest.raises(ValueError):
            LocalCoordMatrix(np.zeros((3, 2)), frame)

    def test_mv_size_warning(self):
        frame = ChartFrame(np.arange(6), 2, mv_delta=0.01)
        big = np.full((4, 2), 10.0)
        with pytest.warns(UserWarning, match="maxvol bound"):
            LocalCoordMatrix(big, frame)

    def test_velocity_shape(self):
        frame = ChartFrame.identity(6, 2)
        with pytest.raises(ValueError, match="velocity"):
            LocalCoordMatrix(np.zeros((4, 2)), frame, velocity=np.zeros((3, 2)))
