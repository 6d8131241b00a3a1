# SPDX-License-Identifier: GPL-3.0+

"""
Experiments
-----------

The ``floq.experiments`` package regenerates the data behind each study of
the driven, lossy chain: time traces, equilibrium sweeps over a drive ratio,
quasienergy spectra, dark-mode populations, analytic comparisons and
dark-state lifetimes. Named presets describe each figure; see
:func:`preset_names`.
"""

from floq.experiments.presets import PRESETS, preset, preset_names
from floq.experiments.runner import ScenarioSummary, run_scenario
from floq.experiments.scenario import (
    Output,
    Scenario,
    SweepAxis,
    Variant,
    scenario_document,
    validate_scenario,
    with_lattice,
)
from floq.experiments.studies import (
    DeviationReport,
    LifetimeRow,
    SweepResult,
    check_first_site_law,
    compare_analytic_numeric,
    dark_lifetime_study,
    first_site_spread,
    sweep_drive,
)


__all__ = (
    "DeviationReport",
    "LifetimeRow",
    "Output",
    "PRESETS",
    "Scenario",
    "ScenarioSummary",
    "SweepAxis",
    "SweepResult",
    "Variant",
    "check_first_site_law",
    "compare_analytic_numeric",
    "dark_lifetime_study",
    "first_site_spread",
    "preset",
    "preset_names",
    "run_scenario",
    "scenario_document",
    "sweep_drive",
    "validate_scenario",
    "with_lattice",
)
