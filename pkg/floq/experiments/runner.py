# SPDX-License-Identifier: GPL-3.0+

"""
Scenario Runner
---------------

:func:`run_scenario` executes every output of a :class:`Scenario` and writes
the results to a directory:

* ``config.json``: the scenario as run.
* ``trajectory[-<label>].csv``: populations over time.
* ``sweep[-<label>].csv``: equilibrium averages along the sweep axis.
* ``spectrum[-<label>].csv``: quasienergies, one row per quasienergy.
* ``dark_mode[-<label>].csv``: dark-mode populations (one row per site, or
  one row per sweep point).
* ``analytic.csv`` and ``comparison.csv``: closed-form populations of the
  three-site chain and their deviation from the integrated ones.
* ``lifetime.csv``: dark-state decay rate per variant.
* ``summary.json``: scalar results, the first-lossy-site check of a
  lifetime table, and the tolerances the results were computed with.

Outputs are fully determined by the scenario.
"""

import logging
import os
from itertools import repeat
from typing import Any, Dict, List, NamedTuple

import numpy as np

from floq.errors import FloqError, with_context
from floq.floquet import (
    DECAY_RATE_FLOOR,
    DECAY_STEPS_PER_PERIOD,
    MIN_MONODROMY_STEPS,
    QuasienergySweep,
    dark_state,
    floquet_modes,
    monodromy,
    spectrum_point,
    write_dark_mode_csv,
    write_spectrum_csv,
)
from floq.hfa import analytic_populations, effective_model
from floq.internal.table import ensure_directory, write_csv, write_json
from floq.model import LatticeSpec, validate, with_sweep_parameter
from floq.propagate import (
    NORM_TOLERANCE,
    equilibrium_average,
    evolve,
    site_state,
    write_trajectory_csv,
)
from floq.experiments.scenario import (
    Output,
    Scenario,
    Variant,
    case_suffix,
    scenario_document,
    validate_scenario,
)
from floq.experiments.studies import (
    CHANNELS,
    check_first_site_law,
    compare_analytic_numeric,
    first_site_spread,
    lifetime_row,
    parallel_map,
    sweep_drive,
)


__all__ = ("ScenarioSummary", "run_scenario")


logger = logging.getLogger(__name__)


ANALYTIC_SAMPLES = 1001


class ScenarioSummary(NamedTuple):
    """
    Result of :func:`run_scenario`.

    :ivar files: Paths written, in order.
    :ivar results: Scalar results keyed by variant label (``""`` without
        variants).
    """

    name: str
    directory: str
    files: List[str]
    results: Dict[str, Dict[str, Any]]


class _Run:
    def __init__(
        self, scenario: Scenario, directory: str, workers: int, emit_amplitudes: bool
    ) -> None:
        self.scenario = scenario
        self.directory = directory
        self.workers = workers
        self.emit_amplitudes = emit_amplitudes
        self.files: List[str] = []
        self.results: Dict[str, Dict[str, Any]] = {}
        self.checks: Dict[str, Any] = {}

    def path(self, stem: str, label: str = "", extension: str = "csv") -> str:
        path = os.path.join(self.directory, f"{stem}{case_suffix(label)}.{extension}")
        self.files.append(path)
        return path

    def record(self, label: str, **values: Any) -> None:
        self.results.setdefault(label, {}).update(values)

    @property
    def monodromy_steps(self) -> int:
        return max(self.scenario.grid.steps_per_period, MIN_MONODROMY_STEPS)

    def trajectory(self, variant: Variant) -> None:
        scenario = self.scenario
        spec = variant.spec
        traj = evolve(
            spec, site_state(spec.n_sites, scenario.initial_site), scenario.grid
        )
        if Output.TRAJECTORY in scenario.outputs:
            path = self.path("trajectory", variant.label)
            with open(path, "w", newline="") as f:
                write_trajectory_csv(traj, f, self.emit_amplitudes)
            logger.info("wrote %s", path)
        self.record(variant.label, P_final=float(traj.total[-1]))
        if Output.EQUILIBRIUM in scenario.outputs:
            average = equilibrium_average(traj, scenario.delta)
            self.record(
                variant.label,
                P_equ=average.total,
                P_n_equ=average.sites,
                ratio_n_equ=average.ratios,
                delta=average.delta,
            )

    def sweep(self, variant: Variant) -> None:
        scenario = self.scenario
        result = sweep_drive(
            variant.spec,
            scenario.sweep,
            initial_site=scenario.initial_site,
            steps_per_period=scenario.grid.steps_per_period,
            workers=self.workers,
        )
        write_csv(self.path("sweep", variant.label), result.header, result.table)
        self.record(
            variant.label,
            **{
                f"peak_tf{t_final:g}": dict(
                    zip(("at", "P_equ"), result.peak(t_final))
                )
                for t_final in result.t_finals
            },
        )

    def _spectrum(self, spec: LatticeSpec) -> QuasienergySweep:
        sweep = self.scenario.sweep
        if sweep is None:
            ratio = spec.drive_left / spec.frequency if spec.frequency else 0.0
            quasienergies, populations = spectrum_point(spec, self.monodromy_steps)
            return QuasienergySweep(
                "drive_left_ratio",
                np.array([ratio]),
                quasienergies[None, :],
                populations[None, :],
            )
        values = sweep.values()
        points = [
            validate(with_sweep_parameter(spec, sweep.parameter, value))
            for value in values
        ]
        results = parallel_map(
            spectrum_point, self.workers, points, repeat(self.monodromy_steps)
        )
        return QuasienergySweep(
            sweep.parameter,
            values,
            np.array([r[0] for r in results]),
            np.array([r[1] for r in results]),
        )

    def spectrum(self, variant: Variant) -> None:
        outputs = self.scenario.outputs
        spectrum = self._spectrum(variant.spec)
        if Output.SPECTRUM in outputs:
            with open(self.path("spectrum", variant.label), "w", newline="") as f:
                write_spectrum_csv(spectrum, f)
        if Output.DARK_MODE in outputs and self.scenario.sweep is not None:
            n = variant.spec.n_sites
            header = [spectrum.parameter] + [f"P_{k}" for k in range(1, n + 1)]
            rows = np.column_stack([spectrum.values, spectrum.dark_populations])
            write_csv(self.path("dark_mode", variant.label), header, rows)

    def dark_mode(self, variant: Variant) -> None:
        spec = variant.spec
        m = monodromy(spec, self.monodromy_steps) if spec.is_driven else None
        dark = dark_state(floquet_modes(spec, m))
        with open(self.path("dark_mode", variant.label), "w", newline="") as f:
            write_dark_mode_csv(dark, f)
        self.record(
            variant.label,
            eps_dark=dark.quasienergy,
            even_site_population=dark.even_site_population,
            lossy_site_population=float(
                dark.populations[np.asarray(spec.loss) > 0].sum()
            ),
        )

    def analytic(self) -> None:
        spec = self.scenario.spec
        grid = self.scenario.grid
        times = np.linspace(grid.t_start, grid.t_end, ANALYTIC_SAMPLES)
        populations = analytic_populations(effective_model(spec), times)
        write_csv(
            self.path("analytic"),
            ("t",) + CHANNELS,
            np.column_stack((times,) + tuple(populations)),
        )

    def comparison(self) -> None:
        grid = self.scenario.grid
        report = compare_analytic_numeric(
            self.scenario.spec, grid.t_end, grid.steps_per_period
        )
        header = ["t"]
        header += [f"{c}_numeric" for c in CHANNELS]
        header += [f"{c}_analytic" for c in CHANNELS]
        write_csv(
            self.path("comparison"),
            header,
            np.column_stack([report.times, report.numeric, report.analytic]),
        )
        self.record(
            "",
            deviation_sup=dict(zip(CHANNELS, report.sup)),
            deviation_rms=dict(zip(CHANNELS, report.rms)),
        )

    def lifetime(self) -> None:
        cases = self.scenario.cases()
        steps = max(self.scenario.grid.steps_per_period, DECAY_STEPS_PER_PERIOD)
        rows = parallel_map(
            lifetime_row, self.workers, [case.spec for case in cases], repeat(steps)
        )
        table = []
        for case, row in zip(cases, rows):
            table.append(
                [
                    case.label,
                    ";".join(f"{alpha:g}" for alpha in row.losses),
                    row.first_lossy_site,
                    row.rate.measured,
                    str(row.rate),
                    int(row.rate.below_floor),
                ]
            )
            self.record(case.label, minus_im_eps_dark=str(row.rate))
        write_csv(
            self.path("lifetime"),
            (
                "label",
                "losses",
                "first_lossy_site",
                "measured",
                "reported",
                "below_floor",
            ),
            table,
        )
        self.checks["first_site_spread"] = {
            str(site): spread for site, spread in first_site_spread(rows).items()
        }
        self.checks["first_site_law"] = check_first_site_law(rows)

    def run(self) -> None:
        scenario = self.scenario
        outputs = scenario.outputs
        write_json(self.path("config", extension="json"), scenario_document(scenario))
        for variant in scenario.cases():
            if Output.TRAJECTORY in outputs or (
                Output.EQUILIBRIUM in outputs and scenario.sweep is None
            ):
                self.trajectory(variant)
            if Output.EQUILIBRIUM in outputs and scenario.sweep is not None:
                self.sweep(variant)
            if Output.SPECTRUM in outputs or (
                Output.DARK_MODE in outputs and scenario.sweep is not None
            ):
                self.spectrum(variant)
            if Output.DARK_MODE in outputs and scenario.sweep is None:
                self.dark_mode(variant)
        if Output.ANALYTIC in outputs:
            self.analytic()
        if Output.COMPARISON in outputs:
            self.comparison()
        if Output.LIFETIME in outputs:
            self.lifetime()
        summary = {
            "scenario": scenario.name,
            "files": [os.path.basename(path) for path in self.files],
            "results": self.results,
            "checks": self.checks,
            "tolerances": {
                "norm": NORM_TOLERANCE,
                "decay_rate_floor": DECAY_RATE_FLOOR,
                "steps_per_period": scenario.grid.steps_per_period,
            },
        }
        write_json(self.path("summary", extension="json"), summary)


def run_scenario(
    scenario: Scenario,
    directory: str,
    *,
    workers: int = 1,
    emit_amplitudes: bool = False,
) -> ScenarioSummary:
    """
    Run ``scenario`` and write its outputs into ``directory``, which is
    created if needed.

    :param workers: Processes for sweeps and lifetime tables.
    :raises FloqError: with the scenario name prefixed to the message.
    """
    logger.info("running scenario %s", scenario.name)
    try:
        scenario = validate_scenario(scenario)
        ensure_directory(directory)
        run = _Run(scenario, directory, workers, emit_amplitudes)
        run.run()
    except FloqError as e:
        raise with_context(e, f"scenario {scenario.name}") from e
    logger.info("scenario %s finished: %d files", scenario.name, len(run.files))
    return ScenarioSummary(scenario.name, directory, run.files, run.results)
