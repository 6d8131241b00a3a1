# SPDX-License-Identifier: GPL-3.0+

import io

import numpy as np

from floq import (
    AmplitudeState,
    LatticeSpec,
    NumericalError,
    TimeGrid,
    ValidationError,
    equilibrium_average,
    evolve,
    loss_rate_residual,
    site_state,
    validate,
)
from floq.propagate import Trajectory, write_trajectory_csv
from tests import TestCase, chain, count_maxima, undriven


class TestSiteState(TestCase):
    def test_one_based(self):
        state = site_state(4, 2)
        self.assertAllClose(state.amplitudes, [0, 1, 0, 0])
        self.assertEqual(state.norm, 1.0)

    def test_out_of_range(self):
        self.assertRaises(ValidationError, site_state, 3, 0)
        self.assertRaises(ValidationError, site_state, 3, 4)


class TestEvolve(TestCase):
    def test_conservative_undriven(self):
        spec = undriven(3)
        traj = evolve(spec, site_state(3), TimeGrid(t_end=50.0))
        self.assertLessEqual(np.max(np.abs(traj.total - 1)), 1e-9)

    def test_norm_conservation_over_100_periods(self):
        spec = chain(3, left_ratio=1.0)
        grid = TimeGrid(t_end=100 * spec.period, sample_stride=10)
        traj = evolve(spec, site_state(3), grid)
        self.assertLessEqual(np.max(np.abs(traj.total - 1)), 1e-9)

    def test_monotone_decay(self):
        for spec in (chain(3, (1.0,), left_ratio=1.0), chain(5, (1.0, 0.5), 2.0)):
            with self.subTest(n_sites=spec.n_sites):
                traj = evolve(spec, site_state(spec.n_sites), TimeGrid(t_end=10.0))
                self.assertTrue(np.all(np.diff(traj.total) <= 1e-10))

    def test_sampling(self):
        spec = chain(3, (1.0,), left_ratio=1.0)
        grid = TimeGrid(t_end=1.0, sample_stride=7)
        traj = evolve(spec, site_state(3), grid)
        self.assertEqual(traj.times[0], 0.0)
        self.assertEqual(traj.times[-1], 1.0)
        self.assertEqual(traj.amplitudes.shape, (len(traj.times), 3))
        self.assertTrue(np.all(np.diff(traj.times) > 0))

    def test_stride_does_not_change_states(self):
        spec = chain(4, (1.0,), right_ratio=2.4)
        fine = evolve(spec, site_state(4), TimeGrid(t_end=2.0))
        coarse = evolve(spec, site_state(4), TimeGrid(t_end=2.0, sample_stride=50))
        self.assertAllClose(coarse.amplitudes[-1], fine.amplitudes[-1], atol=1e-13)
        self.assertAllClose(coarse.amplitudes[1], fine.amplitudes[50], atol=1e-13)

    def test_start_time(self):
        # Only the phase of the drive depends on t_start.
        spec = chain(3, left_ratio=1.0)
        traj = evolve(spec, site_state(3), TimeGrid(t_start=1.0, t_end=2.0))
        self.assertEqual(traj.times[0], 1.0)
        self.assertAlmostEqual(traj.total[-1], 1.0, delta=1e-10)

    def test_fourth_order_convergence(self):
        spec = chain(3, (1.0,), left_ratio=1.0)
        t_end = 5 * spec.period
        finals = [
            evolve(spec, site_state(3), TimeGrid(t_end=t_end, steps_per_period=n))
            .amplitudes[-1]
            for n in (1000, 2000, 4000)
        ]
        factor = np.linalg.norm(finals[0] - finals[1]) / np.linalg.norm(
            finals[1] - finals[2]
        )
        self.assertGreaterEqual(factor, 12)
        self.assertLessEqual(factor, 20)

    def test_invalid_grid(self):
        spec = chain(3, left_ratio=1.0)
        initial = site_state(3)
        for grid, field in (
            (TimeGrid(t_start=1.0, t_end=1.0), "t_end"),
            (TimeGrid(steps_per_period=10), "steps_per_period"),
            (TimeGrid(sample_stride=0), "sample_stride"),
        ):
            with self.subTest(field=field):
                with self.assertRaises(ValidationError) as cm:
                    evolve(spec, initial, grid)
                self.assertEqual(cm.exception.field, field)
        with self.assertRaises(ValidationError):
            evolve(undriven(3), initial, TimeGrid(dt=-1.0))

    def test_unnormalized_initial(self):
        state = AmplitudeState(np.array([1.0, 1.0, 0.0], dtype=complex))
        with self.assertRaises(ValidationError) as cm:
            evolve(chain(3), state, TimeGrid(t_end=1.0))
        self.assertEqual(cm.exception.field, "initial")
        self.assertRaises(
            ValidationError, evolve, chain(3), site_state(4), TimeGrid(t_end=1.0)
        )

    def test_non_finite(self):
        # A huge coupling with a coarse step blows RK4 up.
        spec = validate(LatticeSpec(3, coupling=1e6))
        with self.assertRaises(NumericalError):
            evolve(spec, site_state(3), TimeGrid(t_end=1000.0, dt=1.0))


class TestLossRateResidual(TestCase):
    def test_conservative(self):
        spec = undriven(3)
        traj = evolve(spec, site_state(3), TimeGrid(t_end=5.0))
        self.assertLessEqual(loss_rate_residual(traj, spec), 1e-9)

    def test_undriven_lossy(self):
        spec = undriven(3, (1.0,))
        traj = evolve(spec, site_state(3), TimeGrid(t_end=20.0, dt=1e-3))
        self.assertLessEqual(loss_rate_residual(traj, spec), 1e-5)

    def test_driven_five_sites(self):
        spec = chain(5, (1.0, 1.0), left_ratio=2.0)
        # Whole steps only; a shortened last step skews the centered difference.
        traj = evolve(spec, site_state(5), TimeGrid(t_end=30 * spec.period))
        self.assertLessEqual(loss_rate_residual(traj, spec), 1e-5)

    def test_too_short(self):
        traj = Trajectory(np.array([0.0, 1.0]), np.ones((2, 3), dtype=complex))
        self.assertRaises(ValidationError, loss_rate_residual, traj, chain(3))


class TestEquilibriumAverage(TestCase):
    def test_constant(self):
        times = np.linspace(0, 10, 11)
        amplitudes = np.tile(np.sqrt([0.5, 0.0, 0.25]), (11, 1)).astype(complex)
        average = equilibrium_average(Trajectory(times, amplitudes), 4.0)
        self.assertAllClose(average.sites, [0.5, 0.0, 0.25])
        self.assertAlmostEqual(average.total, 0.75)
        self.assertAllClose(average.ratios, [2 / 3, 0.0, 1 / 3])
        self.assertEqual(average.delta, 4.0)

    def test_window_between_samples(self):
        # P_1 = t/4 on [0, 4]; its mean over [1.5, 4] is 2.75/4.
        times = np.arange(5.0)
        amplitudes = np.column_stack([np.sqrt(times / 4), np.sqrt(1 - times / 4)])
        average = equilibrium_average(Trajectory(times, amplitudes + 0j), 2.5)
        self.assertAlmostEqual(average.sites[0], 2.75 / 4)

    def test_default_window(self):
        times = np.linspace(0, 10, 101)
        amplitudes = np.ones((101, 1), dtype=complex)
        self.assertEqual(equilibrium_average(Trajectory(times, amplitudes)).delta, 5)

    def test_invalid_window(self):
        traj = Trajectory(np.linspace(0, 1, 3), np.ones((3, 2), dtype=complex))
        self.assertRaises(ValidationError, equilibrium_average, traj, 0.0)
        self.assertRaises(ValidationError, equilibrium_average, traj, 2.0)

    def test_undriven_plateau(self):
        spec = undriven(3, (1.0,))
        traj = evolve(spec, site_state(3), TimeGrid(t_end=100.0))
        average = equilibrium_average(traj, 50.0)
        self.assertAlmostEqual(average.total, 0.5, delta=0.005)
        self.assertAlmostEqual(average.sites[0], 0.25, delta=0.005)
        self.assertAlmostEqual(average.sites[2], 0.25, delta=0.005)

    def test_both_ends_driven(self):
        spec = chain(3, (1.0,), left_ratio=2.0, right_ratio=2.0)
        grid = TimeGrid(t_end=100.0, sample_stride=10)
        traj = evolve(spec, site_state(3), grid)
        average = equilibrium_average(traj, 50.0)
        self.assertAlmostEqual(average.sites[0], 0.25, delta=0.01)
        self.assertAlmostEqual(average.sites[2], 0.25, delta=0.01)

    def test_four_site_cdt(self):
        spec = chain(4, (1.0,), right_ratio=2.4)
        traj = evolve(spec, site_state(4), TimeGrid(t_end=100.0, sample_stride=10))
        self.assertAlmostEqual(equilibrium_average(traj).total, 0.5, delta=0.02)


class TestDampingDynamics(TestCase):
    def test_underdamped_oscillates(self):
        traj = evolve(undriven(3, (1.0,)), site_state(3), TimeGrid(t_end=10.0))
        self.assertGreaterEqual(count_maxima(traj.populations[:, 0]), 2)

    def test_overdamped_monotone(self):
        traj = evolve(undriven(3, (4.0,)), site_state(3), TimeGrid(t_end=10.0))
        self.assertEqual(count_maxima(traj.populations[:, 0]), 0)

    def assertSettles(self, traj, t_from, directions):
        late = traj.populations[traj.times >= t_from]
        for n, direction in enumerate(directions, 1):
            with self.subTest(site=n):
                self.assertTrue(np.all(direction * np.diff(late[:, n - 1]) > 0))

    def test_overdamped_settles_monotonically(self):
        # P_2 peaks near t = 0.62, then every site approaches its plateau.
        grid = TimeGrid(t_end=10.0, sample_stride=10)
        traj = evolve(undriven(3, (4.0,)), site_state(3), grid)
        self.assertSettles(traj, 1.0, (-1, -1, 1))

    def test_equal_drives_settle_monotonically(self):
        # A1 = A2 = 40 is overdamped. Sampled once per period, the populations
        # approach (1/4, 0, 1/4) without oscillating.
        spec = chain(3, (1.0,), left_ratio=2.0, right_ratio=2.0)
        grid = TimeGrid(
            t_end=95 * spec.period, steps_per_period=1000, sample_stride=1000
        )
        traj = evolve(spec, site_state(3), grid)
        self.assertEqual(len(traj.times), 96)
        self.assertSettles(traj, 10.0, (-1, -1, 1))


class TestWriteTrajectory(TestCase):
    def test_columns(self):
        traj = evolve(chain(3, (1.0,)), site_state(3), TimeGrid(t_end=0.01))
        f = io.StringIO()
        write_trajectory_csv(traj, f)
        lines = f.getvalue().splitlines()
        self.assertEqual(lines[0], "t,P_1,P_2,P_3,P_total")
        self.assertEqual(len(lines), len(traj.times) + 1)
        self.assertEqual(lines[1].split(",")[1], "1")

    def test_amplitudes(self):
        traj = evolve(chain(2), site_state(2), TimeGrid(t_end=0.01))
        f = io.StringIO()
        write_trajectory_csv(traj, f, emit_amplitudes=True)
        header = f.getvalue().splitlines()[0].split(",")
        self.assertEqual(header[-4:], ["Re_c_1", "Im_c_1", "Re_c_2", "Im_c_2"])
