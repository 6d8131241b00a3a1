# SPDX-License-Identifier: GPL-3.0+

"""
Scenarios
---------

A :class:`Scenario` names one experiment: a chain, an initial site, a time
grid, an optional sweep over a drive ratio, and the outputs to produce. A
scenario may carry several :class:`Variant` chains (different loss sets or
drives) that are run side by side.
"""

import enum
import math
from typing import Any, Dict, NamedTuple, Optional, Tuple

import numpy as np

from floq.errors import ValidationError
from floq.model import SWEEP_PARAMETERS, LatticeSpec, validate
from floq.propagate import TimeGrid


__all__ = (
    "Output",
    "Scenario",
    "SweepAxis",
    "Variant",
    "scenario_document",
    "validate_scenario",
    "with_lattice",
)


class Output(enum.Enum):
    TRAJECTORY = "trajectory"
    EQUILIBRIUM = "equilibrium"
    SPECTRUM = "spectrum"
    DARK_MODE = "dark-mode"
    COMPARISON = "comparison"
    ANALYTIC = "analytic"
    LIFETIME = "lifetime"


class SweepAxis(NamedTuple):
    """
    Drive-ratio axis with evenly spaced points.

    :ivar parameter: ``drive_left_ratio`` (:math:`A_1/\\omega`) or
        ``drive_right_ratio`` (:math:`A_2/\\omega`).
    :ivar t_finals: Integration times at which :math:`\\langle P\\rangle_{equ}`
        is reported.
    """

    parameter: str = "drive_left_ratio"
    start: float = 0.0
    stop: float = 4.0
    count: int = 81
    t_finals: Tuple[float, ...] = (20.0, 100.0)

    def values(self) -> np.ndarray:
        return np.linspace(self.start, self.stop, self.count)


class Variant(NamedTuple):
    label: str
    spec: LatticeSpec


class Scenario(NamedTuple):
    """
    A named experiment.

    :ivar spec: Chain used when there are no variants, and for outputs that
        take a single chain.
    :ivar delta: Averaging window; ``None`` means half of the run.
    :ivar variants: Labelled chains run side by side; empty means just
        ``spec``.
    """

    name: str
    spec: LatticeSpec
    initial_site: int = 1
    grid: TimeGrid = TimeGrid()
    delta: Optional[float] = None
    sweep: Optional[SweepAxis] = None
    outputs: Tuple[Output, ...] = (Output.TRAJECTORY, Output.EQUILIBRIUM)
    variants: Tuple[Variant, ...] = ()
    description: str = ""

    def cases(self) -> Tuple[Variant, ...]:
        return self.variants or (Variant("", self.spec),)


def _validate_axis(axis: SweepAxis) -> SweepAxis:
    if axis.parameter not in SWEEP_PARAMETERS:
        raise ValidationError(
            f"sweep parameter must be one of {', '.join(SWEEP_PARAMETERS)}, "
            f"got {axis.parameter!r}",
            field="sweep.parameter",
        )
    if not (math.isfinite(axis.start) and math.isfinite(axis.stop)):
        raise ValidationError("sweep range must be finite", field="sweep")
    if not axis.start < axis.stop:
        raise ValidationError(
            f"sweep range [{axis.start}, {axis.stop}] is not ordered", field="sweep"
        )
    if axis.count < 2:
        raise ValidationError(
            f"sweep needs at least 2 points, got {axis.count}", field="sweep.count"
        )
    if not axis.t_finals or not all(t > 0 for t in axis.t_finals):
        raise ValidationError(
            "sweep integration times must be positive", field="sweep.t_finals"
        )
    return axis._replace(t_finals=tuple(float(t) for t in axis.t_finals))


def validate_scenario(scenario: Scenario) -> Scenario:
    """
    Validate every chain, the initial site, the averaging window and the
    sweep axis of ``scenario``.

    :return: The scenario with validated (normalized) chains.
    """
    spec = validate(scenario.spec)
    variants = tuple(
        variant._replace(spec=validate(variant.spec)) for variant in scenario.variants
    )
    labels = [variant.label for variant in variants]
    if len(set(labels)) != len(labels):
        raise ValidationError("variant labels must be unique", field="variants")
    for variant in variants or (Variant("", spec),):
        if not 1 <= scenario.initial_site <= variant.spec.n_sites:
            raise ValidationError(
                f"initial site {scenario.initial_site} is outside "
                f"1..{variant.spec.n_sites}",
                field="initial_site",
            )
    grid = scenario.grid
    if not grid.t_end > grid.t_start:
        raise ValidationError(
            f"t_end ({grid.t_end}) must exceed t_start ({grid.t_start})",
            field="grid.t_end",
        )
    if scenario.delta is not None and not (
        0 < scenario.delta <= grid.t_end - grid.t_start
    ):
        raise ValidationError(
            f"averaging window {scenario.delta} must be in "
            f"(0, {grid.t_end - grid.t_start}]",
            field="delta",
        )
    sweep = scenario.sweep
    if sweep is not None:
        sweep = _validate_axis(sweep)
        for variant in variants or (Variant("", spec),):
            if variant.spec.frequency is None:
                raise ValidationError(
                    "drive-ratio sweep needs a drive frequency",
                    field="lattice.frequency",
                )
    return scenario._replace(spec=spec, variants=variants, sweep=sweep)


def _lattice_document(spec: LatticeSpec) -> Dict[str, Any]:
    return {
        "n_sites": spec.n_sites,
        "coupling": spec.coupling,
        "drive_left": spec.drive_left,
        "drive_right": spec.drive_right,
        "frequency": spec.frequency,
        "loss": list(spec.loss),
    }


def scenario_document(scenario: Scenario) -> Dict[str, Any]:
    """Return a JSON-ready description of ``scenario``."""
    document: Dict[str, Any] = {
        "name": scenario.name,
        "description": scenario.description,
        "lattice": _lattice_document(scenario.spec),
        "initial_site": scenario.initial_site,
        "grid": scenario.grid._asdict(),
        "delta": scenario.delta,
        "outputs": [output.value for output in scenario.outputs],
    }
    if scenario.sweep is not None:
        sweep = scenario.sweep._asdict()
        sweep["t_finals"] = list(sweep["t_finals"])
        document["sweep"] = sweep
    if scenario.variants:
        document["variants"] = [
            {"label": variant.label, "lattice": _lattice_document(variant.spec)}
            for variant in scenario.variants
        ]
    return document


def with_lattice(scenario: Scenario, spec: LatticeSpec) -> Scenario:
    """
    Move ``scenario`` onto the chain ``spec``. Each variant keeps only the
    fields in which it differs from the scenario's own chain and takes every
    other field from ``spec``.

    :raises ValidationError: if ``spec`` changes a field that a variant sets
        itself.
    """
    base = validate(scenario.spec)
    spec = validate(spec)
    variants = []
    for variant in scenario.variants:
        own = validate(variant.spec)
        changes = {}
        for field in LatticeSpec._fields:
            value = getattr(own, field)
            if value == getattr(base, field):
                continue
            if getattr(spec, field) != getattr(base, field):
                raise ValidationError(
                    f"variant {variant.label!r} of {scenario.name} sets "
                    f"{field} itself",
                    field=f"lattice.{field}",
                )
            changes[field] = value
        variants.append(variant._replace(spec=validate(spec._replace(**changes))))
    return scenario._replace(spec=spec, variants=tuple(variants))


def case_suffix(label: str) -> str:
    return f"-{label}" if label else ""