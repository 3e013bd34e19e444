"""Free flow, split stepping, adaptive evolution, and Duhamel machinery."""

import numpy as np
import pytest

from snls.evolve import (
    StepController,
    average_translate,
    duhamel_residual,
    duhamel_tail,
    evolve,
    free_evolve,
    linear_trajectory,
    nonlinear_phase,
    strang_step,
)
from snls.functionals import mass, s_density
from snls.radial import RadialField, RadialGrid, lebesgue_norm, sobolev_norm

from conftest import gaussian_field, random_smooth_field

SC = 7.0 / 6.0


def l2_diff(a: RadialField, b: RadialField) -> float:
    return lebesgue_norm(RadialField(a.grid, a.values - b.values), 2.0)


class TestFreeEvolve:
    def test_identity_at_zero(self, grid_small):
        f = gaussian_field(grid_small)
        assert free_evolve(f, 0.0) is f

    def test_gaussian_closed_form(self, grid_desk):
        # oracle: complex-width gaussian from heat-kernel analytic continuation,
        # e^{itL} e^{-r^2/2} = (1+2it)^(-3/2) exp(-r^2/(2(1+2it)))
        f = gaussian_field(grid_desk)
        out = free_evolve(f, 1.0)
        b = 1.0 + 2.0j
        exact = RadialField(grid_desk, b ** (-1.5) * np.exp(-grid_desk.nodes**2 / (2 * b)))
        assert l2_diff(out, exact) <= 1e-6

    def test_unitarity(self, grid_small):
        rng = np.random.default_rng(1)
        f = random_smooth_field(grid_small, rng)
        out = free_evolve(f, 0.37)
        assert abs(mass(out) - mass(f)) <= 1e-12 * mass(f)
        for s in (0.5, SC, 2.0):
            a, b = sobolev_norm(out, s), sobolev_norm(f, s)
            assert abs(a - b) <= 1e-12 * b

    def test_group_law(self, grid_small):
        rng = np.random.default_rng(2)
        f = random_smooth_field(grid_small, rng)
        a = free_evolve(free_evolve(f, 0.3), 0.45)
        b = free_evolve(f, 0.75)
        assert l2_diff(a, b) <= 1e-12 * lebesgue_norm(f, 2.0)

    def test_dispersive_decay_l15(self):
        # ||e^{itL} u0||_L15 * t^(13/10) stays bounded on t in [1, 8]
        g = RadialGrid(256.0, 8192)
        f = gaussian_field(g)
        vals = [lebesgue_norm(free_evolve(f, t), 15.0) * t ** 1.3 for t in np.linspace(1.0, 8.0, 15)]
        assert max(vals) < 2.0 * min(vals)
        assert max(vals) < 1.0  # logged: ~0.29 for the unit gaussian


class TestNonlinearPhase:
    def test_identity_at_zero(self, grid_small):
        f = gaussian_field(grid_small)
        assert nonlinear_phase(f, 0.0) is f

    def test_modulus_unchanged(self, grid_small):
        rng = np.random.default_rng(3)
        f = random_smooth_field(grid_small, rng)
        out = nonlinear_phase(f, 0.3)
        assert np.abs(np.abs(out.values) - np.abs(f.values)).max() < 1e-14

    def test_constant_modulus_global_phase(self, grid_small):
        a, dt = 1.3, 0.21
        f = RadialField(grid_small, np.full(grid_small.n, a, dtype=complex))
        out = nonlinear_phase(f, dt)
        assert np.abs(out.values - a * np.exp(-1j * a**6 * dt)).max() < 1e-14


class TestStrangStep:
    def test_identity_at_zero(self, grid_small):
        f = gaussian_field(grid_small)
        assert strang_step(f, 0.0) is f

    def test_time_reversibility(self, grid_small):
        f = gaussian_field(grid_small, amplitude=1.2)
        u = f
        dt = 0.01
        for _ in range(100):
            u = strang_step(u, dt)
        for _ in range(100):
            u = strang_step(u, -dt)
        assert l2_diff(u, f) <= 1e-9

    def test_small_amplitude_matches_free(self, grid_small):
        # nonlinear correction is O(amplitude^7): doubling the amplitude
        # multiplies the absolute deviation by ~2^7
        diffs = []
        for amp in (0.01, 0.02):
            f = gaussian_field(grid_small, amplitude=amp)
            diffs.append(l2_diff(strang_step(f, 0.05), free_evolve(f, 0.05)))
        ratio = diffs[1] / diffs[0]
        assert 80.0 < ratio < 200.0
        assert diffs[0] < 1e-14


class TestEvolve:
    def test_zero_data(self, grid_small):
        ctl = StepController(dt_max=0.01, snapshot_stride=0.05)
        traj = evolve(RadialField.zero(grid_small), (0.0, 0.2), ctl)
        assert traj.status == "ok"
        for key in ("mass", "energy", "s_density", "H_sc"):
            assert np.all(traj.densities[key] == 0.0)

    def test_conservation_small_grid(self, grid_small):
        ctl = StepController(dt_max=0.005, snapshot_stride=0.05)
        traj = evolve(gaussian_field(grid_small), (0.0, 0.5), ctl)
        m, e = traj.densities["mass"], traj.densities["energy"]
        assert abs(m[-1] - m[0]) <= 1e-10 * m[0]
        assert abs(e[-1] - e[0]) <= 1e-5 * e[0]

    def test_energy_drift_second_order(self, grid_small):
        f = gaussian_field(grid_small)
        drifts = []
        for dt in (0.004, 0.002):
            traj = evolve(f, (0.0, 0.5), StepController(dt_max=dt, snapshot_stride=0.25))
            e = traj.densities["energy"]
            drifts.append(abs(e[-1] - e[0]) / e[0])
        assert 3.5 <= drifts[0] / drifts[1] <= 4.5

    def test_blowup_guard_aborts(self, grid_small):
        ctl = StepController(dt_max=0.01, snapshot_stride=0.05, blowup_ceiling=0.5)
        traj = evolve(gaussian_field(grid_small), (0.0, 0.3), ctl)
        assert traj.status == "blowup_abort"
        assert traj.times.size >= 1  # partial trajectory preserved

    def test_small_data_scattering(self):
        g = RadialGrid(160.0, 8192)
        f = gaussian_field(g, amplitude=0.1)
        ctl = StepController(dt_max=0.05, snapshot_stride=0.5)
        traj = evolve(f, (0.0, 10.0), ctl)
        assert traj.status == "ok" and not traj.boundary_breach
        s15 = np.trapezoid(traj.densities["s_density"], traj.times) ** (1.0 / 15.0)
        assert np.isfinite(s15) and s15 > 0
        h0, h1 = traj.densities["H_sc"][0], traj.densities["H_sc"][-1]
        assert abs(h1 - h0) < 0.05 * h0


@pytest.fixture(scope="module")
def nonlinear_run(grid_desk):
    ctl = StepController(dt_max=0.002, snapshot_stride=1.0 / 128.0)
    return evolve(gaussian_field(grid_desk), (0.0, 1.0), ctl)


class TestDuhamel:
    def test_linear_run_residual_tiny(self, grid_small):
        traj = linear_trajectory(gaussian_field(grid_small), (0.0, 0.5), StepController(snapshot_stride=0.025))
        r = duhamel_residual(traj, 0.5, include_nonlinearity=False)
        assert r <= 1e-10

    def test_nonlinear_residual_and_convergence(self, grid_desk):
        f = gaussian_field(grid_desk)
        resids = []
        for stride in (1.0 / 128.0, 1.0 / 256.0):
            traj = evolve(f, (0.0, 0.5), StepController(dt_max=0.001, snapshot_stride=stride))
            resids.append(duhamel_residual(traj, 0.5))
        u_norm = lebesgue_norm(gaussian_field(grid_desk), 2.0)
        assert resids[0] <= 1e-3 * u_norm
        assert 2.5 <= resids[0] / resids[1] <= 6.0

    def test_base_point_shift(self, nonlinear_run):
        traj = nonlinear_run
        r0 = duhamel_residual(traj, 1.0)
        r_mid = duhamel_residual(traj, 1.0, t_base=traj.times[32])
        assert r_mid <= 3.0 * r0 + 1e-12

    def test_tail_zero_when_linear(self, grid_small):
        traj = linear_trajectory(RadialField.zero(grid_small), (0.0, 0.5), StepController(snapshot_stride=0.05))
        v = duhamel_tail(traj, (0.2, 0.4), 0.5)
        assert lebesgue_norm(v, 2.0) == 0.0

    def test_tail_window_separation_enforced(self, nonlinear_run):
        with pytest.raises(ValueError):
            duhamel_tail(nonlinear_run, (0.25, 0.75), 0.5)

    def test_tail_solves_free_equation(self, nonlinear_run):
        traj = nonlinear_run
        window = (0.5, 1.0)
        v1 = duhamel_tail(traj, window, 0.25)
        v2 = duhamel_tail(traj, window, 0.125)
        moved = free_evolve(v2, 0.125)
        assert l2_diff(v1, moved) <= 1e-12 * max(lebesgue_norm(v1, 2.0), 1e-300)

    def test_far_endpoint_reconstruction(self, nonlinear_run):
        # u(t) = e^{i(t-t_+)L} u(t_+) - i v(t) - i (local piece), v over [t_j1, t_+]
        traj = nonlinear_run
        t, t_j1, t_plus = 0.25, 0.5, 1.0
        v = duhamel_tail(traj, (t_j1, t_plus), t)
        m_t = traj.frame_index(t)
        far = free_evolve(traj.field(traj.frame_index(t_plus)), t - t_plus)
        # local Duhamel piece over [t, t_j1] evaluated at its own left endpoint;
        # anchoring at the far endpoint flips the Duhamel sign to +i
        local = duhamel_tail(traj, (t, t_j1), t)
        recon = RadialField(traj.grid, far.values + 1j * (v.values + local.values))
        resid = l2_diff(traj.field(m_t), recon)
        assert resid <= 2e-3 * lebesgue_norm(traj.field(m_t), 2.0)

    def test_tail_sobolev_ceiling(self, nonlinear_run):
        traj = nonlinear_run
        E = traj.densities["H_sc"].max()
        v = duhamel_tail(traj, (0.5, 1.0), 0.25)
        assert sobolev_norm(v, SC) <= 5.0 * E  # logged diagnostic ratio, ~O(1)


class TestAverageTranslate:
    def test_approximate_identity(self, grid_desk):
        f = gaussian_field(grid_desk)
        out = average_translate(f, 4 * grid_desk.dr)
        assert l2_diff(out, f) <= 0.01 * lebesgue_norm(f, 2.0)

    def test_constant_on_ball_inner_half(self, grid_small):
        from snls.functionals import cutoff_profile

        r = grid_small.nodes
        f = RadialField(grid_small, cutoff_profile(r / 16.0).astype(complex))  # flat to r = 8
        out = average_translate(f, 1.0)
        inner = r < 4.0
        assert np.abs(out.values[inner] - 1.0).max() < 1e-6

    def test_l9_never_increases(self, grid_small):
        rng = np.random.default_rng(14)
        for _ in range(50):
            f = random_smooth_field(grid_small, rng)
            out = average_translate(f, 0.8)
            assert lebesgue_norm(out, 9.0) <= lebesgue_norm(f, 9.0) * (1 + 1e-10)

    def test_rejects_large_radius(self, grid_small):
        f = gaussian_field(grid_small)
        with pytest.raises(ValueError):
            average_translate(f, grid_small.r_max / 2.0)
