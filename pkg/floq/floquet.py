# SPDX-License-Identifier: GPL-3.0+

"""
Floquet Analysis
----------------

The ``floq.floquet`` module analyzes a periodically driven chain through its
one-period propagator :math:`U(T)`, the monodromy matrix. Each eigenvalue
:math:`\\lambda` of :math:`U(T)` gives a complex quasienergy
:math:`\\varepsilon = (i/T)\\ln\\lambda`, and each eigenvector starts a
Floquet state :math:`c(t) = c'(t)e^{-i\\varepsilon t}` with :math:`c'`
periodic. A negative imaginary part of :math:`\\varepsilon` is a decay rate.

The dark state is the Floquet state with quasienergy closest to zero. It
carries almost no population on the lossy sites and is what the dissipative
dynamics converges to.

Undriven chains have no period; their quasienergies are the eigenvalues of
the static Hamiltonian.
"""

import csv
import logging
import math
from typing import List, NamedTuple, Optional, Sequence, TextIO, Union

import numpy as np
import scipy.linalg
from scipy.integrate import trapezoid

from floq.errors import DegeneracyError, EigenError, ValidationError
from floq.internal.table import format_number
from floq.model import (
    SWEEP_PARAMETERS,
    LatticeSpec,
    static_hamiltonian,
    validate,
    with_sweep_parameter,
)
from floq.propagate import cycle_propagators


__all__ = (
    "DECAY_RATE_FLOOR",
    "DecayRate",
    "Eigensystem",
    "FloquetMode",
    "Monodromy",
    "QuasienergySweep",
    "dark_decay_rate",
    "dark_state",
    "eigendecompose",
    "floquet_modes",
    "fold_quasienergy",
    "monodromy",
    "quasienergy_spectrum",
    "quasienergy_sweep",
    "spectrum_point",
    "static_quasienergies",
    "write_dark_mode_csv",
    "write_spectrum_csv",
)


logger = logging.getLogger(__name__)


MIN_MONODROMY_STEPS = 1000
DECAY_STEPS_PER_PERIOD = 4000
DECAY_RATE_FLOOR = 1e-11
MODE_GRID_INTERVALS = 256
MAX_EIGEN_SIZE = 64
RESIDUAL_TOLERANCE = 1e-8
DEFECTIVE_CONDITION = 1e6


class Monodromy(NamedTuple):
    """
    One-period propagator.

    :ivar matrix: :math:`U(T)`; column :math:`k` is the state at :math:`T`
        evolved from site :math:`k + 1`.
    :ivar period: :math:`T`.
    :ivar steps: Integration steps per period.
    """

    matrix: np.ndarray
    period: float
    steps: int

    @property
    def frequency(self) -> float:
        return 2 * math.pi / self.period


def monodromy(
    spec: LatticeSpec,
    steps_per_period: int = MIN_MONODROMY_STEPS,
    *,
    period: Optional[float] = None,
) -> Monodromy:
    """
    Integrate the amplitude equations over one drive period from every basis
    state.

    :param period: Period to use instead of :math:`2\\pi/\\omega`. Required
        for a chain without a drive frequency.
    :raises ValidationError: if no period is available or
        ``steps_per_period`` is below 1000.
    """
    if steps_per_period < MIN_MONODROMY_STEPS:
        raise ValidationError(
            f"monodromy needs at least {MIN_MONODROMY_STEPS} steps per period, "
            f"got {steps_per_period}",
            field="steps_per_period",
        )
    if period is None:
        period = spec.period
        if period is None:
            raise ValidationError(
                "chain without a drive frequency needs an explicit period",
                field="frequency",
            )
    elif not period > 0:
        raise ValidationError(
            f"period must be positive, got {period!r}", field="period"
        )
    cycle = cycle_propagators(spec, 0.0, period / steps_per_period, steps_per_period)
    matrix = cycle[-1]
    if not np.isfinite(matrix).all():
        raise EigenError("monodromy matrix is not finite")
    logger.debug(
        "monodromy of %d-site chain over T=%g in %d steps, norm %.17g",
        spec.n_sites,
        period,
        steps_per_period,
        np.linalg.norm(matrix, 2),
    )
    return Monodromy(matrix, period, steps_per_period)


class Eigensystem(NamedTuple):
    """
    Eigenvalues and unit right eigenvectors (as columns) of a square matrix.
    ``defective`` is set when the eigenvectors are numerically dependent.
    """

    values: np.ndarray
    vectors: np.ndarray
    defective: bool


def eigendecompose(m: Union[Monodromy, np.ndarray]) -> Eigensystem:
    """
    Compute all eigenpairs of a monodromy matrix (or any square complex
    matrix) and check that each satisfies
    :math:`\\|Uv - \\lambda v\\| \\le 10^{-8}\\|U\\|`.

    :raises ValidationError: if the matrix is not square or larger than
        64x64.
    :raises EigenError: if the solver does not converge or a residual check
        fails.
    """
    matrix = np.asarray(getattr(m, "matrix", m), dtype=complex)
    if matrix.ndim != 2 or matrix.shape[0] != matrix.shape[1]:
        raise ValidationError(
            f"expected a square matrix, got shape {matrix.shape}", field="matrix"
        )
    if matrix.shape[0] > MAX_EIGEN_SIZE:
        raise ValidationError(
            f"{matrix.shape[0]}x{matrix.shape[0]} matrix is too large for the "
            f"dense eigensolver (limit {MAX_EIGEN_SIZE})",
            field="matrix",
        )
    if not np.isfinite(matrix).all():
        raise EigenError("matrix has non-finite entries")
    try:
        values, vectors = scipy.linalg.eig(matrix)
    except scipy.linalg.LinAlgError as e:
        # LAPACK reports only which eigenvalues failed, not how many QR
        # sweeps it ran.
        raise EigenError(f"eigensolver did not converge: {e}") from e
    vectors = vectors / np.linalg.norm(vectors, axis=0)
    scale = max(np.linalg.norm(matrix, 2), np.finfo(float).tiny)
    residuals = np.linalg.norm(matrix @ vectors - vectors * values, axis=0)
    worst = float(residuals.max()) / scale
    logger.debug("eigen-residual %.3g relative to norm %.3g", worst, scale)
    if worst > RESIDUAL_TOLERANCE:
        raise EigenError(
            f"eigenpair residual {worst:.3g} exceeds {RESIDUAL_TOLERANCE:g}"
        )
    defective = bool(np.linalg.cond(vectors) > DEFECTIVE_CONDITION)
    return Eigensystem(values, vectors, defective)


def fold_quasienergy(value: complex, frequency: float) -> complex:
    """Fold the real part of ``value`` into :math:`(-\\omega/2, \\omega/2]`."""
    real = (value.real + frequency / 2) % frequency - frequency / 2
    if real <= -frequency / 2:
        real += frequency
    return complex(real, value.imag)


def _quasienergy(eigenvalue: complex, period: float) -> complex:
    if eigenvalue == 0:
        logger.warning(
            "monodromy eigenvalue is zero (total absorption); "
            "reporting Im(eps) = -inf"
        )
        return complex(0.0, -math.inf)
    eps = complex(-np.angle(eigenvalue), math.log(abs(eigenvalue))) / period
    return fold_quasienergy(eps, 2 * math.pi / period)


def _order(quasienergies: Sequence[complex]) -> List[int]:
    # Slowest-decaying first, then by real part.
    return sorted(
        range(len(quasienergies)),
        key=lambda k: (-quasienergies[k].imag, quasienergies[k].real),
    )


def quasienergy_spectrum(m: Monodromy) -> List[complex]:
    """
    Return the quasienergies :math:`\\varepsilon_k = (i/T)\\ln\\lambda_k` of a
    monodromy matrix, ordered by decreasing imaginary part.

    The principal logarithm is used and the real part is folded into
    :math:`(-\\omega/2, \\omega/2]`. A zero eigenvalue is reported with an
    imaginary part of ``-inf``.
    """
    system = eigendecompose(m)
    quasienergies = [_quasienergy(lam, m.period) for lam in system.values]
    return [quasienergies[k] for k in _order(quasienergies)]


def static_quasienergies(spec: LatticeSpec) -> List[complex]:
    """
    Return the eigenvalues of the static Hamiltonian of ``spec``, ordered by
    decreasing imaginary part. These are the quasienergies of an undriven
    chain.
    """
    values = eigendecompose(static_hamiltonian(spec)).values
    values = [complex(v) for v in values]
    return [values[k] for k in _order(values)]


class FloquetMode(NamedTuple):
    """
    A Floquet state.

    :ivar quasienergy: Complex quasienergy :math:`\\varepsilon`.
    :ivar times: One-period sample grid, ``times[0] == 0`` and
        ``times[-1] == T``.
    :ivar periodic: Periodic part :math:`c'_n(t)`, shape ``(K, N)``.
    :ivar populations: Time-averaged populations :math:`\\langle P'_n\\rangle`,
        normalized to sum to 1.
    """

    quasienergy: complex
    times: np.ndarray
    periodic: np.ndarray
    populations: np.ndarray

    @property
    def period(self) -> float:
        return float(self.times[-1])

    @property
    def even_site_population(self) -> float:
        """Sum of :math:`\\langle P'_n\\rangle` over even sites :math:`n`."""
        return float(self.populations[1::2].sum())


def _averaged(times: np.ndarray, periodic: np.ndarray) -> np.ndarray:
    mean = trapezoid(np.abs(periodic) ** 2, times, axis=0) / (times[-1] - times[0])
    return mean / mean.sum()


def _static_modes(spec: LatticeSpec, period: float) -> List[FloquetMode]:
    system = eigendecompose(static_hamiltonian(spec))
    if system.defective:
        raise DegeneracyError(
            "static Hamiltonian is defective (critical damping); "
            "no complete set of modes"
        )
    quasienergies = [complex(v) for v in system.values]
    if spec.frequency is not None:
        quasienergies = [fold_quasienergy(e, spec.frequency) for e in quasienergies]
    times = np.linspace(0.0, period, MODE_GRID_INTERVALS + 1)
    modes = []
    for k in _order(quasienergies):
        vector = system.vectors[:, k]
        periodic = np.broadcast_to(vector, (len(times), spec.n_sites)).copy()
        populations = np.abs(vector) ** 2
        modes.append(
            FloquetMode(
                quasienergies[k], times, periodic, populations / populations.sum()
            )
        )
    return modes


def floquet_modes(
    spec: LatticeSpec, m: Optional[Monodromy] = None
) -> List[FloquetMode]:
    """
    Construct the Floquet modes of ``spec``, ordered by decreasing imaginary
    quasienergy.

    Each eigenvector of ``m`` is propagated over one period and sampled on a
    257-point grid; the periodic part is :math:`c'(t) = e^{i\\varepsilon t}c(t)`
    and its populations are averaged with the trapezoidal rule. Undriven
    chains use the eigenvectors of the static Hamiltonian, which are constant
    in time.

    :param m: Monodromy of ``spec``; computed with default settings if
        omitted.
    :raises DegeneracyError: if the eigenvectors are numerically dependent
        (critical damping).
    """
    if not spec.is_driven:
        if m is not None:
            period = m.period
        elif spec.period is not None:
            period = spec.period
        else:
            period = 2 * math.pi / (4 * spec.coupling)
        return _static_modes(spec, period)
    if m is None:
        m = monodromy(spec)
    system = eigendecompose(m)
    if system.defective:
        raise DegeneracyError(
            "monodromy is defective (critical damping); no complete set of modes"
        )
    dt = m.period / m.steps
    cycle = cycle_propagators(spec, 0.0, dt, m.steps)
    grid = np.linspace(0, m.steps, MODE_GRID_INTERVALS + 1)
    indices = np.unique(np.rint(grid).astype(int))
    times = indices * dt
    propagators = cycle[indices]

    quasienergies = [_quasienergy(lam, m.period) for lam in system.values]
    modes = []
    for k in _order(quasienergies):
        eps = quasienergies[k]
        states = propagators @ system.vectors[:, k]
        if math.isfinite(eps.imag):
            periodic = states * np.exp(1j * eps * times)[:, None]
        else:
            periodic = states
        modes.append(FloquetMode(eps, times, periodic, _averaged(times, periodic)))
    return modes


def dark_state(modes: Sequence[FloquetMode]) -> FloquetMode:
    """
    Return the mode with the smallest :math:`|\\varepsilon|`. Modes within
    :math:`10^{-9}` of the smallest are compared by their even-site
    population instead.

    A warning is logged if even the smallest :math:`|\\varepsilon|` exceeds
    :math:`\\omega/10`, meaning there is no dark state.
    """
    if not modes:
        raise ValidationError("no Floquet modes to choose from", field="modes")
    smallest = min(abs(mode.quasienergy) for mode in modes)
    candidates = [mode for mode in modes if abs(mode.quasienergy) <= smallest + 1e-9]
    best = min(candidates, key=lambda mode: mode.even_site_population)
    frequency = 2 * math.pi / best.period
    if smallest > frequency / 10:
        logger.warning(
            "no dark state: smallest |eps| is %.6g, above omega/10 = %.6g",
            smallest,
            frequency / 10,
        )
    return best


class DecayRate(NamedTuple):
    """
    Decay rate of the dark state.

    :ivar measured: :math:`-\\mathrm{Im}\\,\\varepsilon` as computed, before
        comparison with the floor.
    :ivar floor: Smallest value trusted as a measurement.
    :ivar quasienergy: Quasienergy of the dark state.
    """

    measured: float
    floor: float
    quasienergy: complex

    @property
    def below_floor(self) -> bool:
        return self.measured < self.floor

    @property
    def imag(self) -> Optional[float]:
        """:math:`-\\mathrm{Im}\\,\\varepsilon`, or ``None`` below the floor."""
        return None if self.below_floor else self.measured

    @property
    def rate(self) -> Optional[float]:
        """
        :math:`\\Gamma = -2\\,\\mathrm{Im}\\,\\varepsilon`, or ``None`` below the
        floor.
        """
        return None if self.below_floor else 2 * self.measured

    def __str__(self) -> str:
        if self.below_floor:
            return f"<={self.floor:g}"
        return format_number(self.measured)


def dark_decay_rate(
    spec: LatticeSpec,
    steps_per_period: int = DECAY_STEPS_PER_PERIOD,
    floor: float = DECAY_RATE_FLOOR,
) -> DecayRate:
    """
    Measure :math:`-\\mathrm{Im}\\,\\varepsilon` of the dark state of a
    driven, dissipative chain.

    Rates this small need a finely resolved monodromy, so the default is 4000
    steps per period. Values below ``floor`` are not trusted and are reported
    as below the floor.

    :raises ValidationError: if ``spec`` is undriven or lossless.
    """
    if not spec.is_driven:
        raise ValidationError("decay-rate study needs a driven chain", field="drive")
    if not spec.is_dissipative:
        raise ValidationError("decay-rate study needs a lossy chain", field="loss")
    m = monodromy(spec, steps_per_period)
    dark = dark_state(floquet_modes(spec, m))
    result = DecayRate(-dark.quasienergy.imag, floor, dark.quasienergy)
    if result.below_floor:
        logger.warning(
            "dark-state decay rate %.3g is below the measurement floor %g",
            result.measured,
            floor,
        )
    return result


class QuasienergySweep(NamedTuple):
    """
    Quasienergies and dark-mode populations along a drive-ratio axis.

    :ivar parameter: Swept parameter, one of ``drive_left_ratio`` and
        ``drive_right_ratio``.
    :ivar values: Axis values, shape ``(K,)``.
    :ivar quasienergies: Shape ``(K, N)``, each row ordered by decreasing
        imaginary part.
    :ivar dark_populations: :math:`\\langle P'_n\\rangle` of the dark mode at
        each point, shape ``(K, N)``.
    """

    parameter: str
    values: np.ndarray
    quasienergies: np.ndarray
    dark_populations: np.ndarray


def spectrum_point(spec: LatticeSpec, steps_per_period: int = MIN_MONODROMY_STEPS):
    """
    Return the quasienergies and dark-mode populations of a single chain.
    """
    m = monodromy(spec, steps_per_period) if spec.is_driven else None
    modes = floquet_modes(spec, m)
    quasienergies = np.array([mode.quasienergy for mode in modes])
    return quasienergies, dark_state(modes).populations


def quasienergy_sweep(
    spec: LatticeSpec,
    parameter: str,
    values: Sequence[float],
    steps_per_period: int = MIN_MONODROMY_STEPS,
) -> QuasienergySweep:
    """
    Compute the quasienergy spectrum of ``spec`` at each value of a drive
    ratio.
    """
    if parameter not in SWEEP_PARAMETERS:
        raise ValidationError(
            f"unknown sweep parameter {parameter!r}", field="parameter"
        )
    values = np.asarray(values, dtype=float)
    quasienergies = np.empty((len(values), spec.n_sites), dtype=complex)
    populations = np.empty((len(values), spec.n_sites))
    for i, value in enumerate(values):
        point = validate(with_sweep_parameter(spec, parameter, value))
        quasienergies[i], populations[i] = spectrum_point(point, steps_per_period)
        logger.debug("spectrum at %s=%g: %s", parameter, value, quasienergies[i])
    return QuasienergySweep(parameter, values, quasienergies, populations)


def write_spectrum_csv(sweep: QuasienergySweep, file: TextIO) -> None:
    """
    Write a sweep as CSV in long format: one row per quasienergy, with
    columns ``sweep_parameter``, ``k``, ``re_eps`` and ``im_eps``.
    """
    writer = csv.writer(file, lineterminator="\n")
    writer.writerow(["sweep_parameter", "k", "re_eps", "im_eps"])
    for value, row in zip(sweep.values, sweep.quasienergies):
        for k, eps in enumerate(row, 1):
            writer.writerow(
                [
                    format_number(value),
                    k,
                    format_number(eps.real),
                    format_number(eps.imag),
                ]
            )


def write_dark_mode_csv(mode: FloquetMode, file: TextIO) -> None:
    """Write the time-averaged populations of a mode as ``site,population``."""
    writer = csv.writer(file, lineterminator="\n")
    writer.writerow(["site", "population"])
    for site, population in enumerate(mode.populations, 1):
        writer.writerow([site, format_number(population)])
