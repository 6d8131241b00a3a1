# SPDX-License-Identifier: GPL-3.0+

import json
import os
import tempfile

import numpy as np

from floq import (
    DecayRate,
    TimeGrid,
    ValidationError,
    bessel_j0,
    dark_decay_rate,
    equilibrium_average,
    even_site_losses,
    evolve,
    site_state,
    validate,
)
from floq.experiments import (
    PRESETS,
    LifetimeRow,
    Output,
    Scenario,
    SweepAxis,
    Variant,
    check_first_site_law,
    compare_analytic_numeric,
    dark_lifetime_study,
    first_site_spread,
    preset,
    preset_names,
    run_scenario,
    scenario_document,
    sweep_drive,
    validate_scenario,
    with_lattice,
)
from floq.internal.table import dump_json
from floq.model import with_sweep_parameter
from tests import CASE_I, LongRunTestCase, TestCase, chain


class TestPresets(TestCase):
    def test_names(self):
        names = preset_names()
        for name in ("fig2a", "fig2f", "fig3a", "fig3d", "fig5a_cdt", "fig9ab"):
            self.assertIn(name, names)
        self.assertEqual(names[-1], "fig10d")

    def test_all_valid(self):
        for name, scenario in PRESETS.items():
            with self.subTest(name=name):
                self.assertEqual(scenario.name, name)
                validate_scenario(scenario)
                json.loads(dump_json(scenario_document(scenario)))

    def test_unknown(self):
        with self.assertRaises(ValidationError) as cm:
            preset("fig11")
        self.assertEqual(cm.exception.field, "preset")

    def test_fig3a(self):
        scenario = preset("fig3a")
        self.assertEqual(scenario.sweep.parameter, "drive_left_ratio")
        self.assertEqual(scenario.sweep.t_finals, (20.0, 100.0))
        self.assertEqual(scenario.spec, CASE_I)

    def test_variants_labelled_by_losses(self):
        labels = [variant.label for variant in preset("fig10d").variants]
        self.assertEqual(labels, ["loss-0-1-1", "loss-0-1-0", "loss-0-0-1"])


class TestValidateScenario(TestCase):
    def assertInvalid(self, scenario, field):
        with self.assertRaises(ValidationError) as cm:
            validate_scenario(scenario)
        self.assertEqual(cm.exception.field, field)

    def test_sweep_axis(self):
        base = Scenario("s", CASE_I)
        self.assertInvalid(
            base._replace(sweep=SweepAxis("coupling")), "sweep.parameter"
        )
        self.assertInvalid(base._replace(sweep=SweepAxis(start=4, stop=0)), "sweep")
        self.assertInvalid(base._replace(sweep=SweepAxis(count=1)), "sweep.count")
        self.assertInvalid(
            base._replace(sweep=SweepAxis(t_finals=())), "sweep.t_finals"
        )

    def test_initial_site(self):
        self.assertInvalid(Scenario("s", CASE_I, initial_site=4), "initial_site")
        variants = (Variant("a", CASE_I), Variant("b", chain(5)))
        self.assertInvalid(
            Scenario("s", chain(5), initial_site=5, variants=variants),
            "initial_site",
        )

    def test_delta(self):
        self.assertInvalid(
            Scenario("s", CASE_I, grid=TimeGrid(t_end=10.0), delta=20.0), "delta"
        )

    def test_labels_unique(self):
        variants = (Variant("a", CASE_I), Variant("a", CASE_I))
        self.assertInvalid(Scenario("s", CASE_I, variants=variants), "variants")

    def test_normalizes_loss(self):
        scenario = validate_scenario(Scenario("s", CASE_I._replace(loss=())))
        self.assertEqual(scenario.spec.loss, (0.0, 0.0, 0.0))

    def test_cases(self):
        self.assertEqual(Scenario("s", CASE_I).cases(), (Variant("", CASE_I),))


class TestWithLattice(TestCase):
    def test_shared_fields_reach_variants(self):
        scenario = preset("fig5a")
        moved = with_lattice(scenario, scenario.spec._replace(coupling=2.0))
        self.assertEqual(moved.spec.coupling, 2.0)
        self.assertEqual(len(moved.variants), 3)
        for variant, original in zip(moved.variants, scenario.variants):
            with self.subTest(label=variant.label):
                self.assertEqual(variant.label, original.label)
                self.assertEqual(variant.spec.coupling, 2.0)
                self.assertEqual(variant.spec.drive_right, original.spec.drive_right)

    def test_varied_field_cannot_be_overridden(self):
        scenario = preset("fig7a")
        spec = scenario.spec._replace(loss=even_site_losses(5, (1.0, 1.0)))
        with self.assertRaises(ValidationError) as cm:
            with_lattice(scenario, spec)
        self.assertEqual(cm.exception.field, "lattice.loss")


class TestSweepDrive(TestCase):
    AXIS = SweepAxis(start=1.0, stop=2.4, count=2, t_finals=(20.0,))

    def test_enhancement(self):
        result = sweep_drive(CASE_I, self.AXIS)
        self.assertEqual(
            result.header,
            (
                "drive_left_ratio",
                "P_equ_tf20",
                "ratio_1_tf20",
                "ratio_2_tf20",
                "ratio_3_tf20",
                "P_asy",
                "ratio_1_asy",
                "ratio_2_asy",
                "ratio_3_asy",
            ),
        )
        self.assertEqual(result.table.shape, (2, 9))
        # P_asy leaves out the slow leak of the dark state, which costs up to 5%
        # by t = 20 near the first zero of J0.
        self.assertAllClose(result.column("P_equ_tf20"), result.column("P_asy"), 0.06)
        for n in (1, 2, 3):
            self.assertAllClose(
                result.column(f"ratio_{n}_tf20"), result.column(f"ratio_{n}_asy"), 0.03
            )
        at, height = result.peak(20.0)
        self.assertEqual(at, 2.4)
        self.assertGreaterEqual(height, 0.94)

    def test_enhancement_with_dark_state_leak(self):
        result = sweep_drive(CASE_I, self.AXIS)
        expected = []
        for ratio, p_asy in zip(result.values, result.column("P_asy")):
            point = validate(with_sweep_parameter(CASE_I, "drive_left_ratio", ratio))
            gamma = 2 * dark_decay_rate(point).measured
            # mean of exp(-gamma t) over the window [10, 20]
            decay = 1.0
            if gamma > 0:
                decay = np.exp(-10 * gamma) * -np.expm1(-10 * gamma) / (10 * gamma)
            expected.append(p_asy * decay)
        self.assertAllClose(result.column("P_equ_tf20"), expected, 0.02)

    def test_asymptote(self):
        result = sweep_drive(CASE_I, self.AXIS)
        expected = [1 / (1 + bessel_j0(x) ** 2) for x in (1.0, 2.4)]
        self.assertAllClose(result.column("P_asy"), expected)

    def test_unknown_column(self):
        result = sweep_drive(CASE_I, self.AXIS)
        self.assertRaises(ValidationError, result.column, "P_equ_tf30")

    def test_no_asymptotics_for_longer_chains(self):
        axis = SweepAxis("drive_right_ratio", 2.0, 2.4, 2, (20.0,))
        result = sweep_drive(chain(4, (1.0,)), axis)
        self.assertNotIn("P_asy", result.header)
        self.assertEqual(len(result.header), 1 + 1 + 4)

    def test_workers(self):
        serial = sweep_drive(CASE_I, self.AXIS)
        parallel = sweep_drive(CASE_I, self.AXIS, workers=2)
        self.assertAllClose(parallel.table, serial.table)


class TestStudies(TestCase):
    def test_comparison_preconditions(self):
        with self.assertRaises(ValidationError) as cm:
            compare_analytic_numeric(chain(4, (1.0,)))
        self.assertEqual(cm.exception.field, "n_sites")
        with self.assertRaises(ValidationError) as cm:
            compare_analytic_numeric(chain(3, (1.0,), 1.0, frequency=5.0))
        self.assertEqual(cm.exception.field, "frequency")

    def test_comparison_report(self):
        report = compare_analytic_numeric(CASE_I, t_final=5.0)
        self.assertEqual(report.numeric.shape, report.analytic.shape)
        self.assertEqual(report.numeric.shape[1], 4)
        self.assertEqual(report.times[-1], 5.0)
        self.assertAllClose(report.numeric[0], [1, 0, 0, 1], atol=1e-15)
        self.assertEqual(report.worst, report.sup.max())

    def test_lifetime_needs_odd_chain(self):
        with self.assertRaises(ValidationError) as cm:
            dark_lifetime_study(6, [(1.0, 1.0)])
        self.assertEqual(cm.exception.field, "n_sites")

    def test_first_site_law(self):
        def row(site, measured):
            return LifetimeRow((), site, DecayRate(measured, 1e-11, -1j * measured))

        rows = [row(2, 1.0e-3), row(2, 1.1e-3), row(4, 1e-6), row(4, 1e-12)]
        spread = first_site_spread(rows + [row(None, 0.0)])
        self.assertEqual(set(spread), {2, 4})
        self.assertAlmostEqual(spread[2], 0.1 / 1.1)
        self.assertEqual(spread[4], 0.0)
        self.assertTrue(check_first_site_law(rows))
        rows.append(row(2, 1.5e-3))
        with self.assertLogs("floq.experiments.studies", "WARNING") as cm:
            self.assertFalse(check_first_site_law(rows))
        self.assertIn("first lossy site 2 spread by 33%", cm.output[0])

    def test_lifetime_rows(self):
        rows = dark_lifetime_study(5, [(1.0, 1.0), (1.0, 0.0)])
        self.assertEqual([row.losses for row in rows], [(1.0, 1.0), (1.0, 0.0)])
        self.assertEqual([row.first_lossy_site for row in rows], [2, 2])
        for row in rows:
            self.assertFalse(row.rate.below_floor)


class TestRunScenario(TestCase):
    def setUp(self):
        super().setUp()
        self._tmp = tempfile.TemporaryDirectory()
        self.directory = self._tmp.name

    def tearDown(self):
        self._tmp.cleanup()
        super().tearDown()

    def summary(self):
        with open(os.path.join(self.directory, "summary.json")) as f:
            return json.load(f)

    def test_three_site_panel(self):
        scenario = preset("fig2d")._replace(grid=TimeGrid(t_end=5.0))
        summary = run_scenario(scenario, self.directory)
        self.assertEqual(
            [os.path.basename(path) for path in summary.files],
            [
                "config.json",
                "trajectory.csv",
                "analytic.csv",
                "comparison.csv",
                "summary.json",
            ],
        )
        with open(os.path.join(self.directory, "analytic.csv")) as f:
            lines = f.read().splitlines()
        self.assertEqual(lines[0], "t,P_1,P_2,P_3,P_total")
        self.assertEqual(len(lines), 1 + 1001)
        record = self.summary()
        self.assertEqual(record["scenario"], "fig2d")
        self.assertEqual(record["tolerances"]["decay_rate_floor"], 1e-11)
        self.assertIn("P_final", record["results"][""])
        self.assertIn("deviation_sup", record["results"][""])

    def test_variants(self):
        scenario = preset("fig5a")._replace(grid=TimeGrid(t_end=2.0))
        summary = run_scenario(scenario, self.directory)
        names = [os.path.basename(path) for path in summary.files]
        for label in ("ratio-0", "ratio-1", "ratio-2.4"):
            self.assertIn(f"trajectory-{label}.csv", names)
            self.assertIn("P_equ", summary.results[label])

    def test_spectrum_sweep(self):
        scenario = preset("fig3c")._replace(sweep=SweepAxis(count=3))
        run_scenario(scenario, self.directory)
        with open(os.path.join(self.directory, "spectrum.csv")) as f:
            lines = f.read().splitlines()
        self.assertEqual(len(lines), 1 + 3 * 3)

    def test_dark_mode_and_lifetime(self):
        summary = run_scenario(preset("fig9c"), self.directory)
        result = summary.results[""]
        self.assertLess(result["lossy_site_population"], 1e-3)
        self.assertAlmostEqual(
            result["lossy_site_population"], -result["eps_dark"].imag, delta=1e-7
        )
        self.assertLess(abs(result["eps_dark"].real), 1e-4 * 20)
        with open(os.path.join(self.directory, "lifetime.csv")) as f:
            header = f.readline().strip()
        self.assertEqual(
            header, "label,losses,first_lossy_site,measured,reported,below_floor"
        )
        record = self.summary()
        self.assertEqual(record["results"][""]["eps_dark"].keys(), {"re", "im"})
        self.assertEqual(record["checks"]["first_site_spread"], {"4": 0.0})
        self.assertTrue(record["checks"]["first_site_law"])

    def test_lifetime_checks(self):
        variants = tuple(
            Variant(f"v{i}", chain(5, losses, left_ratio=2.0))
            for i, losses in enumerate(((1.0, 1.0), (1.0, 0.0)))
        )
        scenario = Scenario(
            "rates", variants[0].spec, outputs=(Output.LIFETIME,), variants=variants
        )
        run_scenario(scenario, self.directory)
        checks = self.summary()["checks"]
        self.assertEqual(set(checks["first_site_spread"]), {"2"})
        self.assertLessEqual(checks["first_site_spread"]["2"], 0.2)
        self.assertTrue(checks["first_site_law"])

    def test_error_context(self):
        scenario = Scenario("broken", chain(3, (1.0,))._replace(loss=(1.0, 0, 0)))
        with self.assertRaises(ValidationError) as cm:
            run_scenario(scenario, self.directory)
        self.assertTrue(str(cm.exception).startswith("scenario broken: "))
        self.assertEqual(cm.exception.field, "loss")


class TestAcceptance(LongRunTestCase):
    def test_case_i_sweep(self):
        result = sweep_drive(CASE_I, SweepAxis(t_finals=(20.0,)))
        # Worst case 0.053 near A1/omega = 2.2, from the dark-state leak.
        self.assertAllClose(result.column("P_equ_tf20"), result.column("P_asy"), 0.06)
        at, height = result.peak(20.0)
        # The leak moves the peak one grid step, to 2.45.
        self.assertAlmostEqual(at, 2.4, delta=0.1)
        self.assertGreaterEqual(height, 0.95)

    def test_ratios_at_long_times(self):
        result = sweep_drive(CASE_I, SweepAxis(t_finals=(100.0,)))
        for n in (1, 2, 3):
            self.assertAllClose(
                result.column(f"ratio_{n}_tf100"),
                result.column(f"ratio_{n}_asy"),
                0.03,
            )

    def test_four_site_peak(self):
        result = sweep_drive(
            chain(4, (1.0,)), SweepAxis("drive_right_ratio", t_finals=(100.0, 1000.0))
        )
        early = result.column("P_equ_tf100")
        late = result.column("P_equ_tf1000")
        self.assertAlmostEqual(late.max(), early.max(), delta=0.02)
        self.assertLessEqual(
            np.sum(late > late.max() / 2), np.sum(early > early.max() / 2)
        )

    def test_six_site_cdt(self):
        for variant in preset("fig7f").variants:
            with self.subTest(label=variant.label):
                grid = TimeGrid(t_end=100.0, sample_stride=10)
                traj = evolve(variant.spec, site_state(6), grid)
                self.assertAlmostEqual(
                    equilibrium_average(traj).total, 1 / 3, delta=0.02
                )

    def test_lifetime_hierarchy(self):
        five = dark_lifetime_study(5, [(0.0, 1.0)])
        self.assertGreaterEqual(five[0].rate.measured, 1e-9)
        self.assertLessEqual(five[0].rate.measured, 1e-7)
        seven = dark_lifetime_study(7, [(0.0, 0.0, 1.0), (0.0, 1.0, 0.0)])
        self.assertLessEqual(seven[0].rate.measured, seven[1].rate.measured / 10)
