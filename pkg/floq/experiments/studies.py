# SPDX-License-Identifier: GPL-3.0+

"""
Studies
-------

Multi-run studies built on the simulator: equilibrium sweeps over a drive
ratio, analytic-versus-numeric comparisons for the three-site chain, and
dark-state lifetime tables.
"""

import logging
from concurrent.futures import ProcessPoolExecutor
from itertools import repeat
from typing import Callable, Dict, List, NamedTuple, Optional, Sequence, Tuple

import numpy as np

from floq.errors import ValidationError
from floq.floquet import (
    DECAY_RATE_FLOOR,
    DECAY_STEPS_PER_PERIOD,
    DecayRate,
    dark_decay_rate,
)
from floq.hfa import analytic_populations, asymptotic_populations, effective_model
from floq.model import (
    LatticeSpec,
    even_site_losses,
    first_lossy_site,
    validate,
    with_sweep_parameter,
)
from floq.propagate import (
    DEFAULT_STEPS_PER_PERIOD,
    TimeGrid,
    Trajectory,
    equilibrium_average,
    evolve,
    site_state,
)
from floq.experiments.scenario import SweepAxis


__all__ = (
    "DeviationReport",
    "LifetimeRow",
    "SweepResult",
    "check_first_site_law",
    "compare_analytic_numeric",
    "dark_lifetime_study",
    "first_site_spread",
    "parallel_map",
    "sweep_drive",
)


logger = logging.getLogger(__name__)


# Samples per drive period kept by sweeps and comparisons.
SAMPLES_PER_PERIOD = 100
MIN_COMPARISON_RATIO = 10.0
# Relative spread allowed between dark-state rates with the same first lossy
# site.
FIRST_SITE_TOLERANCE = 0.2


def parallel_map(function: Callable, workers: int, *iterables) -> List:
    """
    Map ``function`` over ``iterables`` on a process pool of ``workers``
    processes, or serially if ``workers`` is 1. Results are in input order.
    """
    if workers > 1:
        with ProcessPoolExecutor(max_workers=workers) as executor:
            return list(executor.map(function, *iterables))
    return list(map(function, *iterables))


def sample_stride(steps_per_period: int) -> int:
    return max(1, steps_per_period // SAMPLES_PER_PERIOD)


def truncate(traj: Trajectory, t_end: float) -> Trajectory:
    """Return the samples of ``traj`` up to and including ``t_end``."""
    stop = int(np.searchsorted(traj.times, t_end * (1 + 1e-12), side="right"))
    return Trajectory(traj.times[:stop], traj.amplitudes[:stop])


class SweepResult(NamedTuple):
    """
    Table of equilibrium results along a drive-ratio axis, one row per axis
    value.

    Columns are the axis value, then for each integration time
    :math:`t_f` the columns ``P_equ_tf<t_f>`` and ``ratio_<n>_tf<t_f>``
    (:math:`\\langle P_n/P\\rangle_{equ}`). Three-site chains also get the
    analytic ``P_asy`` and ``ratio_<n>_asy`` columns.
    """

    parameter: str
    values: np.ndarray
    t_finals: Tuple[float, ...]
    header: Tuple[str, ...]
    table: np.ndarray

    def column(self, name: str) -> np.ndarray:
        try:
            return self.table[:, self.header.index(name)]
        except ValueError:
            raise ValidationError(f"sweep has no column {name!r}", field="column")

    def peak(self, t_final: float) -> Tuple[float, float]:
        """Return the axis value and height of the largest ``P_equ`` at ``t_final``."""
        column = self.column(f"P_equ_tf{t_final:g}")
        i = int(np.argmax(column))
        return float(self.values[i]), float(column[i])


def _has_asymptotics(spec: LatticeSpec) -> bool:
    return spec.n_sites == 3 and spec.frequency is not None


def _sweep_header(spec: LatticeSpec, axis: SweepAxis) -> Tuple[str, ...]:
    header = [axis.parameter]
    sites = range(1, spec.n_sites + 1)
    for t_final in axis.t_finals:
        header.append(f"P_equ_tf{t_final:g}")
        header.extend(f"ratio_{n}_tf{t_final:g}" for n in sites)
    if _has_asymptotics(spec):
        header.append("P_asy")
        header.extend(f"ratio_{n}_asy" for n in sites)
    return tuple(header)


def _sweep_row(
    spec: LatticeSpec,
    axis: SweepAxis,
    value: float,
    initial_site: int,
    steps_per_period: int,
) -> List[float]:
    point = validate(with_sweep_parameter(spec, axis.parameter, value))
    grid = TimeGrid(
        0.0,
        max(axis.t_finals),
        steps_per_period,
        sample_stride=sample_stride(steps_per_period),
    )
    traj = evolve(point, site_state(point.n_sites, initial_site), grid)
    row = [value]
    for t_final in axis.t_finals:
        average = equilibrium_average(truncate(traj, t_final), t_final / 2)
        row.append(average.total)
        row.extend(average.ratios)
    if _has_asymptotics(point):
        asy = asymptotic_populations(
            point.drive_left, point.drive_right, point.frequency
        )
        row.append(asy.total)
        row.extend(p / asy.total for p in (asy.p1, asy.p2, asy.p3))
    logger.info("sweep %s=%g: P_equ=%s", axis.parameter, value, row[1])
    return row


def sweep_drive(
    spec: LatticeSpec,
    axis: SweepAxis = SweepAxis(),
    *,
    initial_site: int = 1,
    steps_per_period: int = DEFAULT_STEPS_PER_PERIOD,
    workers: int = 1,
) -> SweepResult:
    """
    Compute :math:`\\langle P\\rangle_{equ}` and
    :math:`\\langle P_n/P\\rangle_{equ}` with :math:`\\Delta = t_f/2` at each
    point of a drive-ratio axis. Each point is integrated once, to the
    largest :math:`t_f`.

    :param workers: Number of processes; points are independent.
    """
    values = axis.values()
    logger.info(
        "sweeping %s over [%g, %g] in %d points",
        axis.parameter,
        axis.start,
        axis.stop,
        axis.count,
    )
    rows = parallel_map(
        _sweep_row,
        workers,
        repeat(spec),
        repeat(axis),
        values,
        repeat(initial_site),
        repeat(steps_per_period),
    )
    return SweepResult(
        axis.parameter,
        values,
        axis.t_finals,
        _sweep_header(spec, axis),
        np.array(rows, dtype=float),
    )


CHANNELS = ("P_1", "P_2", "P_3", "P_total")


class DeviationReport(NamedTuple):
    """
    Deviation between the closed-form and the integrated populations of a
    three-site chain.

    :ivar sup: Largest absolute deviation per channel in :data:`CHANNELS`.
    :ivar rms: Root-mean-square deviation per channel.
    :ivar numeric: Integrated populations, shape ``(K, 4)``.
    :ivar analytic: Closed-form populations, shape ``(K, 4)``.
    """

    t_final: float
    times: np.ndarray
    numeric: np.ndarray
    analytic: np.ndarray
    sup: np.ndarray
    rms: np.ndarray

    @property
    def worst(self) -> float:
        return float(self.sup.max())


def compare_analytic_numeric(
    spec: LatticeSpec,
    t_final: float = 20.0,
    steps_per_period: int = DEFAULT_STEPS_PER_PERIOD,
) -> DeviationReport:
    """
    Integrate a three-site chain from site 1 over :math:`[0, t_f]` and
    compare with the high-frequency closed form.

    :raises ValidationError: unless the chain has three sites and
        :math:`\\omega/v \\ge 10`.
    """
    spec = validate(spec)
    if spec.n_sites != 3:
        raise ValidationError(
            f"comparison needs 3 sites, got {spec.n_sites}", field="n_sites"
        )
    if spec.frequency is None or spec.frequency / spec.coupling < MIN_COMPARISON_RATIO:
        raise ValidationError(
            f"comparison needs omega/v >= {MIN_COMPARISON_RATIO:g}",
            field="frequency",
        )
    grid = TimeGrid(
        0.0, t_final, steps_per_period, sample_stride=sample_stride(steps_per_period)
    )
    traj = evolve(spec, site_state(3), grid)
    populations = traj.populations
    numeric = np.column_stack([populations, populations.sum(axis=1)])
    analytic = np.column_stack(analytic_populations(effective_model(spec), traj.times))
    deviation = np.abs(numeric - analytic)
    report = DeviationReport(
        t_final,
        traj.times,
        numeric,
        analytic,
        deviation.max(axis=0),
        np.sqrt(np.mean(deviation ** 2, axis=0)),
    )
    logger.info("analytic vs numeric to t=%g: sup %.3g", t_final, report.worst)
    return report


class LifetimeRow(NamedTuple):
    """
    One loss placement of a lifetime study.

    :ivar losses: Even-site losses :math:`(\\alpha_2, \\alpha_4, \\ldots)`.
    :ivar first_lossy_site: Lowest lossy site.
    :ivar rate: Dark-state :math:`-\\mathrm{Im}\\,\\varepsilon`.
    """

    losses: Tuple[float, ...]
    first_lossy_site: Optional[int]
    rate: DecayRate


def lifetime_row(
    spec: LatticeSpec,
    steps_per_period: int = DECAY_STEPS_PER_PERIOD,
    floor: float = DECAY_RATE_FLOOR,
) -> LifetimeRow:
    losses = tuple(spec.loss[n - 1] for n in range(2, spec.n_sites, 2))
    rate = dark_decay_rate(spec, steps_per_period, floor)
    logger.info("losses %s: -Im(eps_dark) %s", losses, rate)
    return LifetimeRow(losses, first_lossy_site(spec), rate)


def first_site_spread(rows: Sequence[LifetimeRow]) -> Dict[int, float]:
    """
    Group the rates of ``rows`` by first lossy site and return the relative
    spread :math:`(\\max - \\min)/\\max` of each group. Rates below the floor
    are left out.
    """
    groups: Dict[int, List[float]] = {}
    for row in rows:
        if row.first_lossy_site is not None and not row.rate.below_floor:
            groups.setdefault(row.first_lossy_site, []).append(row.rate.measured)
    return {
        site: (max(rates) - min(rates)) / max(rates)
        for site, rates in sorted(groups.items())
    }


def check_first_site_law(
    rows: Sequence[LifetimeRow], tolerance: float = FIRST_SITE_TOLERANCE
) -> bool:
    """
    Check that dark-state rates sharing a first lossy site agree to within
    ``tolerance`` (relative). A violation is logged, not raised.
    """
    holds = True
    for site, spread in first_site_spread(rows).items():
        if spread > tolerance:
            logger.warning(
                "rates with first lossy site %d spread by %.0f%%", site, 100 * spread
            )
            holds = False
    return holds


def dark_lifetime_study(
    n_sites: int,
    placements: Sequence[Sequence[float]],
    *,
    drive_ratio: float = 2.0,
    frequency: float = 20.0,
    coupling: float = 1.0,
    steps_per_period: int = DECAY_STEPS_PER_PERIOD,
    floor: float = DECAY_RATE_FLOOR,
    workers: int = 1,
) -> List[LifetimeRow]:
    """
    Measure the dark-state decay rate of an odd chain driven on the left end
    for each placement of even-site losses.

    :param placements: Loss sets in the form ``(alpha_2, alpha_4, ...)``.
    :raises ValidationError: if ``n_sites`` is even or a placement is
        invalid.
    """
    if n_sites % 2 == 0:
        raise ValidationError(
            f"lifetime study needs an odd chain, got {n_sites} sites",
            field="n_sites",
        )
    base = LatticeSpec(n_sites, coupling, drive_ratio * frequency, 0.0, frequency)
    specs = [
        validate(base._replace(loss=even_site_losses(n_sites, placement)))
        for placement in placements
    ]
    rows = parallel_map(
        lifetime_row, workers, specs, repeat(steps_per_period), repeat(floor)
    )
    check_first_site_law(rows)
    return rows
