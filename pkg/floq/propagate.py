# SPDX-License-Identifier: GPL-3.0+

"""
Time Evolution
--------------

The ``floq.propagate`` module integrates :math:`i\\,dc/dt = H(t)c` with the
classical fourth-order Runge-Kutta method on a fixed step.

Because the equation is linear, one RK4 step is a matrix acting on the state.
The step matrices for one drive period are built in a single batched
operation, multiplied together with compensated summation, and then reused
for every period of the run. This gives exactly the RK4 result at a fraction
of the cost of stepping a state vector in Python.
"""

import csv
import logging
import math
from typing import NamedTuple, Optional, TextIO, Tuple

import numpy as np
from scipy.integrate import trapezoid

from floq.errors import NumericalError, ValidationError
from floq.internal.table import format_number
from floq.model import LatticeSpec, hamiltonian_batch, loss_vector


__all__ = (
    "AmplitudeState",
    "DEFAULT_STEPS_PER_PERIOD",
    "EquilibriumAverage",
    "MIN_STEPS_PER_PERIOD",
    "TimeGrid",
    "Trajectory",
    "cycle_propagators",
    "equilibrium_average",
    "evolve",
    "loss_rate_residual",
    "site_state",
    "step_increments",
    "write_trajectory_csv",
)


logger = logging.getLogger(__name__)


DEFAULT_STEPS_PER_PERIOD = 1000
# Below this the RK4 phase error over a drive period is no longer negligible.
MIN_STEPS_PER_PERIOD = 100
NORM_TOLERANCE = 1e-12


class AmplitudeState(NamedTuple):
    """Complex site amplitudes :math:`c_n` at a time :math:`t`."""

    amplitudes: np.ndarray
    time: float = 0.0

    @property
    def norm(self) -> float:
        return float(np.sum(np.abs(self.amplitudes) ** 2))


def site_state(n_sites: int, site: int = 1, time: float = 0.0) -> AmplitudeState:
    """Return the state with the particle on ``site`` (1-based)."""
    if not 1 <= site <= n_sites:
        raise ValidationError(
            f"initial site {site} is outside 1..{n_sites}", field="initial_site"
        )
    amplitudes = np.zeros(n_sites, dtype=complex)
    amplitudes[site - 1] = 1.0
    return AmplitudeState(amplitudes, time)


class TimeGrid(NamedTuple):
    """
    Integration interval and step size.

    Driven chains take ``steps_per_period`` steps per drive period. Undriven
    chains use ``dt``, defaulting to a thousandth of :math:`2\\pi/(4v)`.
    Only every ``sample_stride``-th step is stored.
    """

    t_start: float = 0.0
    t_end: float = 100.0
    steps_per_period: int = DEFAULT_STEPS_PER_PERIOD
    dt: Optional[float] = None
    sample_stride: int = 1


class Trajectory(NamedTuple):
    """
    Sampled solution of the amplitude equations.

    :ivar times: Sample times, shape ``(K,)``.
    :ivar amplitudes: Amplitudes, shape ``(K, N)``.
    """

    times: np.ndarray
    amplitudes: np.ndarray

    @property
    def populations(self) -> np.ndarray:
        """Per-site populations :math:`P_n(t) = |c_n(t)|^2`, shape ``(K, N)``."""
        return np.abs(self.amplitudes) ** 2

    @property
    def total(self) -> np.ndarray:
        """Total probability :math:`P(t)`, shape ``(K,)``."""
        return self.populations.sum(axis=1)

    def final_state(self) -> AmplitudeState:
        return AmplitudeState(self.amplitudes[-1].copy(), float(self.times[-1]))


def _resolve_grid(spec: LatticeSpec, grid: TimeGrid) -> Tuple[float, int]:
    # Returns the step size and the number of steps in one propagator cycle.
    if not grid.t_end > grid.t_start:
        raise ValidationError(
            f"t_end ({grid.t_end}) must exceed t_start ({grid.t_start})",
            field="t_end",
        )
    if grid.sample_stride < 1:
        raise ValidationError(
            f"sample stride must be positive, got {grid.sample_stride}",
            field="sample_stride",
        )
    if spec.is_driven:
        if grid.steps_per_period < MIN_STEPS_PER_PERIOD:
            raise ValidationError(
                f"{grid.steps_per_period} steps per period is below the "
                f"accuracy floor of {MIN_STEPS_PER_PERIOD}",
                field="steps_per_period",
            )
        return spec.period / grid.steps_per_period, grid.steps_per_period
    if grid.dt is None:
        dt = 2 * math.pi / (4 * spec.coupling) / DEFAULT_STEPS_PER_PERIOD
    elif not grid.dt > 0:
        raise ValidationError(f"dt must be positive, got {grid.dt}", field="dt")
    else:
        dt = grid.dt
    return dt, max(grid.steps_per_period, 1)


def step_increments(spec: LatticeSpec, t0: float, dt: float, steps: int) -> np.ndarray:
    """
    Return the RK4 increment matrices :math:`D_j` for ``steps`` consecutive
    steps starting at ``t0``, so that :math:`c_{j+1} = c_j + D_j c_j`.

    The identity is left out of :math:`D_j` so that it can be accumulated
    with compensated summation.
    """
    n = spec.n_sites
    starts = t0 + dt * np.arange(steps)
    if spec.is_driven:
        a0 = -1j * dt * hamiltonian_batch(spec, starts)
        am = -1j * dt * hamiltonian_batch(spec, starts + dt / 2)
        a1 = -1j * dt * hamiltonian_batch(spec, starts + dt)
    else:
        a0 = -1j * dt * hamiltonian_batch(spec, starts[:1])
        am = a1 = a0
    eye = np.eye(n)
    k1 = a0
    k2 = am @ (eye + k1 / 2)
    k3 = am @ (eye + k2 / 2)
    k4 = a1 @ (eye + k3)
    increments = (k1 + 2 * k2 + 2 * k3 + k4) / 6
    if not spec.is_driven:
        increments = np.broadcast_to(increments[0], (steps, n, n))
    return increments


def cycle_propagators(
    spec: LatticeSpec, t0: float, dt: float, steps: int
) -> np.ndarray:
    """
    Return the cumulative propagators :math:`P_j = M_{j-1} \\cdots M_0` for
    :math:`j = 0, \\ldots, \\text{steps}` as a ``(steps + 1, N, N)`` array.
    ``P[-1]`` is the propagator over the whole cycle.

    Each product is accumulated as :math:`P_{j+1} = P_j + D_j P_j` with Kahan
    compensation so that the norm of slowly decaying modes is resolved to
    near machine precision over thousands of steps.
    """
    increments = step_increments(spec, t0, dt, steps)
    n = spec.n_sites
    out = np.empty((steps + 1, n, n), dtype=complex)
    p = np.eye(n, dtype=complex)
    compensation = np.zeros((n, n), dtype=complex)
    out[0] = p
    for j in range(steps):
        delta = increments[j] @ p - compensation
        updated = p + delta
        compensation = (updated - p) - delta
        p = updated
        out[j + 1] = p
    return out


def _check_initial(spec: LatticeSpec, initial: AmplitudeState) -> np.ndarray:
    c0 = np.asarray(initial.amplitudes, dtype=complex)
    if c0.shape != (spec.n_sites,):
        raise ValidationError(
            f"initial state has shape {c0.shape}, expected ({spec.n_sites},)",
            field="initial",
        )
    norm = float(np.sum(np.abs(c0) ** 2))
    if abs(norm - 1) > NORM_TOLERANCE:
        raise ValidationError(
            f"initial state must be normalized, norm is {norm!r}", field="initial"
        )
    return c0


def evolve(spec: LatticeSpec, initial: AmplitudeState, grid: TimeGrid) -> Trajectory:
    """
    Integrate the amplitude equations from ``grid.t_start`` to
    ``grid.t_end``, starting from ``initial.amplitudes``.

    Every ``grid.sample_stride``-th step is stored, and the final time
    ``grid.t_end`` is always stored. If the interval is not a whole number of
    steps, the last step is shortened to land on ``t_end``.

    :raises ValidationError: if the grid or initial state is invalid.
    :raises NumericalError: if the state becomes non-finite.
    """
    c0 = _check_initial(spec, initial)
    dt, cycle_steps = _resolve_grid(spec, grid)
    span = grid.t_end - grid.t_start
    n_steps = int(math.floor(span / dt + 1e-9))
    remainder = span - n_steps * dt
    logger.debug(
        "evolving %d-site chain: %d steps of %g, cycle of %d steps",
        spec.n_sites,
        n_steps,
        dt,
        cycle_steps,
    )

    cycle = cycle_propagators(spec, grid.t_start, dt, cycle_steps)
    monodromy = cycle[-1]

    indices = np.arange(0, n_steps + 1, grid.sample_stride)
    if indices[-1] != n_steps:
        indices = np.append(indices, n_steps)
    which_cycle = indices // cycle_steps
    offsets = indices % cycle_steps
    states = np.empty((len(indices), spec.n_sites), dtype=complex)

    boundary = c0
    lo = 0
    for k in range(int(which_cycle[-1]) + 1):
        hi = int(np.searchsorted(which_cycle, k, side="right"))
        if hi > lo:
            states[lo:hi] = cycle[offsets[lo:hi]] @ boundary
            lo = hi
        boundary = monodromy @ boundary
    times = grid.t_start + indices * dt

    if remainder > 1e-9 * dt:
        t_last = grid.t_start + n_steps * dt
        last = step_increments(spec, t_last, remainder, 1)[0]
        final = states[-1] + last @ states[-1]
        states = np.vstack([states, final])
        times = np.append(times, grid.t_end)
    else:
        times[-1] = grid.t_end

    finite = np.isfinite(states).all(axis=1)
    if not finite.all():
        bad = int(np.argmin(finite))
        raise NumericalError(f"state became non-finite at t={times[bad]!r}")
    return Trajectory(times, states)


class EquilibriumAverage(NamedTuple):
    """
    Time averages over the final window of a run.

    :ivar sites: :math:`\\langle P_n\\rangle_{equ}` for each site.
    :ivar total: :math:`\\langle P\\rangle_{equ}`.
    :ivar ratios: :math:`\\langle P_n/P\\rangle_{equ}` for each site.
    :ivar delta: Width of the averaging window.
    """

    sites: np.ndarray
    total: float
    ratios: np.ndarray
    delta: float


def _window(times: np.ndarray, values: np.ndarray, start: float):
    # Clip samples to [start, times[-1]], interpolating the first point.
    first = int(np.searchsorted(times, start, side="left"))
    t = times[first:]
    v = values[first:]
    if t[0] > start:
        edge = np.array(
            [np.interp(start, times, column) for column in values.T], dtype=float
        )
        t = np.concatenate([[start], t])
        v = np.vstack([edge, v])
    return t, v


def equilibrium_average(
    traj: Trajectory, delta: Optional[float] = None
) -> EquilibriumAverage:
    """
    Average the populations over the last ``delta`` time units with the
    trapezoidal rule.

    :param delta: Window width; defaults to half of the trajectory span.
    :raises ValidationError: if the window is empty or longer than the
        trajectory.
    """
    times = traj.times
    span = float(times[-1] - times[0])
    if delta is None:
        delta = span / 2
    if not 0 < delta <= span * (1 + 1e-12):
        raise ValidationError(
            f"averaging window {delta!r} must be in (0, {span!r}]", field="delta"
        )
    populations = traj.populations
    total = populations.sum(axis=1)
    with np.errstate(divide="ignore", invalid="ignore"):
        ratios = np.where(total[:, None] > 0, populations / total[:, None], 0.0)
    start = max(float(times[-1]) - delta, float(times[0]))
    t, window = _window(times, np.hstack([populations, ratios]), start)
    width = float(t[-1] - t[0])
    means = trapezoid(window, t, axis=0) / width
    n = populations.shape[1]
    sites = means[:n]
    return EquilibriumAverage(sites, float(sites.sum()), means[n:], delta)


def loss_rate_residual(traj: Trajectory, spec: LatticeSpec) -> float:
    """
    Return the largest deviation from :math:`dP/dt = -2\\sum_n \\alpha_n P_n`
    over the interior samples, with :math:`dP/dt` from centered differences.
    """
    if len(traj.times) < 3:
        raise ValidationError(
            "loss-rate residual needs at least 3 samples", field="trajectory"
        )
    populations = traj.populations
    total = populations.sum(axis=1)
    times = traj.times
    derivative = (total[2:] - total[:-2]) / (times[2:] - times[:-2])
    rate = 2 * populations[1:-1] @ loss_vector(spec)
    return float(np.max(np.abs(derivative + rate)))


def write_trajectory_csv(
    traj: Trajectory, file: TextIO, emit_amplitudes: bool = False
) -> None:
    """
    Write a trajectory as CSV with columns ``t``, ``P_1`` ... ``P_N``,
    ``P_total`` and, optionally, ``Re_c_n``/``Im_c_n`` pairs.
    """
    n = traj.amplitudes.shape[1]
    header = ["t"] + [f"P_{k}" for k in range(1, n + 1)] + ["P_total"]
    if emit_amplitudes:
        for k in range(1, n + 1):
            header += [f"Re_c_{k}", f"Im_c_{k}"]
    writer = csv.writer(file, lineterminator="\n")
    writer.writerow(header)
    populations = traj.populations
    total = populations.sum(axis=1)
    for i, t in enumerate(traj.times):
        row = [t, *populations[i], total[i]]
        if emit_amplitudes:
            for c in traj.amplitudes[i]:
                row += [c.real, c.imag]
        writer.writerow([format_number(x) for x in row])
