import numpy as np
import pytest

import grinterp.experiments as exp
from grinterp import (
    ChartFrame,
    HorizontalTangent,
    RankDeficient,
    Scheme,
    StiefelPoint,
    Unstable,
    grassmann_exp,
    make_stiefel,
    pod_basis,
    subspace_distance,
)
from grinterp.experiments import (
    ErrorRecord,
    FnModelSpec,
    QrCurveSpec,
    fn_solve,
    pod_basis_derivative,
    qr_curve_sample,
    run_convergence_study,
    run_experiment1,
    run_experiment2,
)

from _dense import projector_tangent, random_horizontal, random_point

TINY_FN = FnModelSpec(
    n_x=40, n_snapshots=251, pod_rank=4, dt=4e-3, i_a_samples=(0.04, 0.05, 0.06)
)


class TestQrCurve:
    def test_deterministic(self):
        spec = QrCurveSpec(n=30, p=3, seed=5)
        u1, d1 = qr_curve_sample(spec, 0.37)
        u2, d2 = qr_curve_sample(spec, 0.37)
        assert np.array_equal(u1.u, u2.u)
        assert np.array_equal(d1.delta, d2.delta)

    def test_seed_changes_curve(self):
        a, _ = qr_curve_sample(QrCurveSpec(n=30, p=3, seed=1), 0.5)
        b, _ = qr_curve_sample(QrCurveSpec(n=30, p=3, seed=2), 0.5)
        assert subspace_distance(a, b) > 1e-3

    def test_feasibility(self):
        u, _ = qr_curve_sample(QrCurveSpec(n=50, p=5, seed=3), 0.8)
        assert u.feasibility() < 1e-12

    def test_velocity_matches_projector_derivative(self):
        spec = QrCurveSpec(n=25, p=3, seed=7)
        t, h = 0.4, 1e-6
        u, d = qr_curve_sample(spec, t)
        up, _ = qr_curve_sample(spec, t + h)
        um, _ = qr_curve_sample(spec, t - h)
        fd = (up.u @ up.u.T - um.u @ um.u.T) / (2 * h)
        assert np.linalg.norm(projector_tangent(d) - fd) < 1e-7


class TestFnSolve:
    def test_zero_data_without_forcing(self):
        spec = FnModelSpec(
            n_x=20, n_snapshots=11, dt=4e-3, boundary_forcing=False
        )
        u, v = fn_solve(spec, 0.0)
        assert np.all(u == 0.0) and np.all(v == 0.0)

    def test_deterministic(self):
        u1, _ = fn_solve(TINY_FN, 0.05)
        u2, _ = fn_solve(TINY_FN, 0.05)
        assert np.array_equal(u1, u2)

    def test_freeze_i_a(self):
        spec = FnModelSpec(n_x=20, n_snapshots=21, dt=4e-3, freeze_i_a=0.05)
        u1, _ = fn_solve(spec, 0.03)
        u2, _ = fn_solve(spec, 0.08)
        assert np.array_equal(u1, u2)

    def test_wave_forms(self):
        u, v = fn_solve(TINY_FN, 0.05)
        assert 0.5 < u.max() < 2.0  # excitation wave of amplitude ~1
        assert v.max() > 0.05

    def test_unstable_detected(self):
        spec = FnModelSpec(n_x=20, n_snapshots=11, dt=4e-3)
        with pytest.raises(Unstable) as excinfo:
            fn_solve(spec, 1e9)
        assert excinfo.value.time > 0

    def test_self_convergence(self):
        # halving the internal step moves the POD subspace only slightly
        coarse = pod_basis(fn_solve(TINY_FN, 0.05)[0], 4)
        import dataclasses

        fine = pod_basis(
            fn_solve(dataclasses.replace(TINY_FN, dt=2e-3), 0.05)[0], 4
        )
        assert subspace_distance(coarse, fine) < 0.1


class TestPod:
    def test_rank_deficient(self):
        y = np.outer(np.arange(1.0, 11.0), np.ones(6))
        with pytest.raises(RankDeficient):
            pod_basis(y, 3)

    def test_sign_convention(self):
        rng = np.random.default_rng(0)
        u = pod_basis(rng.standard_normal((20, 30)), 4)
        idx = np.argmax(np.abs(u.u), axis=0)
        assert np.all(u.u[idx, np.arange(4)] > 0)

    def test_spans_dominant_subspace(self):
        rng = np.random.default_rng(1)
        basis = random_point(rng, 20, 3)
        y = basis.u @ rng.standard_normal((3, 40))
        got = pod_basis(y, 3)
        assert subspace_distance(basis, got) < 1e-10

    def test_too_few_columns(self):
        with pytest.raises(ValueError):
            pod_basis(np.ones((5, 2)), 3)


class TestPodDerivative:
    def test_manufactured_solution(self, monkeypatch):
        # snapshots drawn from an exact geodesic s -> U(s): the
        # Log-differenced derivative must match the analytic velocity
        rng = np.random.default_rng(2)
        n, p = 20, 3
        base = random_point(rng, n, p)
        vel = random_horizontal(rng, base, 0.7)
        coeffs = rng.standard_normal((p, 12))

        def fake_solve(spec, s):
            u = grassmann_exp(base, vel, s)
            return u.u @ coeffs, np.zeros((n, 12))

        monkeypatch.setattr(exp, "_fn_solve_cached", fake_solve)
        spec = FnModelSpec(n_x=n, pod_rank=p)
        center, d = pod_basis_derivative(spec, 0.3, h=1e-3)
        # compare at projector level (representative-independent)
        h_fd = 1e-6
        pp = grassmann_exp(base, vel, 0.3 + h_fd)
        pm = grassmann_exp(base, vel, 0.3 - h_fd)
        fd = (pp.u @ pp.u.T - pm.u @ pm.u.T) / (2 * h_fd)
        assert np.linalg.norm(projector_tangent(d) - fd) < 1e-5

    def test_horizontal_at_center(self):
        center, d = pod_basis_derivative(TINY_FN, 0.05, h=1e-3)
        assert d.base is center
        assert np.linalg.norm(center.u.T @ d.delta) < 1e-10


class TestExperiment1:
    def test_small_run(self):
        spec = QrCurveSpec(n=60, p=4, seed=3)
        grid = np.linspace(0.0, 1.0, 9)
        records, reports = run_experiment1(spec, grid=grid)
        assert len(records) == 9 * 6
        assert len(reports) == 2
        # sorted by (t_star, scheme)
        keys = [(r.t_star, r.scheme) for r in records]
        assert keys == sorted(keys)
        ends = [r for r in records if r.t_star in (0.0, 1.0)]
        assert max(r.rel_error for r in ends) < 1e-10
        assert all(rep.inv_norm_after <= rep.inv_norm_before for rep in reports)

    def test_threads_do_not_change_output(self):
        spec = QrCurveSpec(n=40, p=3, seed=4)
        grid = np.linspace(0.0, 1.0, 7)
        seq, _ = run_experiment1(spec, grid=grid, threads=1)
        par, _ = run_experiment1(spec, grid=grid, threads=4)
        assert [(r.t_star, r.scheme, r.rel_error) for r in seq] == [
            (r.t_star, r.scheme, r.rel_error) for r in par
        ]

    def test_grid_validation(self):
        with pytest.raises(ValueError, match="grid"):
            run_experiment1(QrCurveSpec(n=20, p=2), grid=np.array([-0.5, 0.5]))


class TestExperiment2:
    def test_tiny_run(self):
        result = run_experiment2(TINY_FN, grid_per_interval=3)
        # 2 intervals x 3 grid points x 6 labels
        assert len(result.records) == 36
        labels = {r.scheme for r in result.records}
        assert "MVLagrangeTruncated" in labels and "MVHermiteTruncated" in labels
        nodes = [
            r
            for r in result.records
            if any(abs(r.t_star - a) < 1e-12 for a in TINY_FN.i_a_samples)
            and "Truncated" not in r.scheme
        ]
        assert max(r.rel_error for r in nodes) < 1e-9
        assert len(result.reports) == 4
        for _, rep in result.reports:
            assert rep.inv_norm_after <= rep.inv_norm_before

    def test_needs_two_samples(self):
        import dataclasses

        spec = dataclasses.replace(TINY_FN, i_a_samples=(0.05,))
        with pytest.raises(ValueError):
            run_experiment2(spec)


class TestConvergenceStudy:
    def test_geodesic_curve_flags_exact_schemes(self):
        rows = run_convergence_study(
            QrCurveSpec(n=30, p=3, seed=1), curve="geodesic"
        )
        by_name = {r.scheme: r for r in rows}
        assert by_name["NormalLagrange"].flagged
        assert not by_name["LocalLagrange"].flagged
        assert 1.8 <= by_name["LocalLagrange"].slope <= 2.6

    def test_h_list_validation(self):
        spec = QrCurveSpec(n=20, p=2)
        with pytest.raises(ValueError):
            run_convergence_study(spec, h_list=[0.1, 0.2])
        with pytest.raises(ValueError):
            run_convergence_study(spec, h_list=[0.1])

    def test_unknown_curve(self):
        with pytest.raises(ValueError, match="curve"):
            run_convergence_study(QrCurveSpec(n=20, p=2), curve="spline")


class TestErrorRecord:
    def test_validation(self):
        with pytest.raises(ValueError):
            ErrorRecord(0.5, "MVLagrange", -1.0, 0.0)

    def test_csv(self):
        rec = ErrorRecord(0.5, "MVLagrange", 1e-3, 1e-14)
        assert len(rec.csv_row()) == len(ErrorRecord.csv_header()) == 4
