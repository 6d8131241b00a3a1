# SPDX-License-Identifier: GPL-3.0+

"""
High-Frequency Analysis
-----------------------

The ``floq.hfa`` module provides closed-form results for the three-site chain
in the high-frequency limit :math:`\\omega \\gg v`. Averaging the drive over a
period replaces each driven coupling :math:`v` by :math:`vJ_0(A/\\omega)`,
which leaves a static, lossy three-level problem with quasienergies
:math:`0` and :math:`(-i\\alpha_2 \\pm \\Theta)/2`, where
:math:`\\Theta = \\sqrt{\\gamma^2 - \\alpha_2^2}` and
:math:`\\gamma^2 = 4v^2[J_0^2(A_1/\\omega) + J_0^2(A_2/\\omega)]`.

All time-domain formulas assume the particle starts on site 1.
"""

import cmath
import decimal
import enum
import math
from typing import NamedTuple, Optional, Sequence, Tuple, Union

import numpy as np

from floq.errors import DegeneracyError, ValidationError
from floq.model import LatticeSpec, loss_vector


__all__ = (
    "Damping",
    "ThreeSiteAnalytic",
    "ThreeSitePopulations",
    "analytic_amplitudes",
    "analytic_populations",
    "asymptotic_populations",
    "bessel_j0",
    "damping_class",
    "effective_model",
    "projection_coefficients",
)


ArrayLike = Union[float, np.ndarray]


_SERIES_LIMIT = 8.0
_EXTENDED_SERIES_LIMIT = 25.0
# Sum of |terms| of the J0 series is I0(x), so a float series loses about
# I0(x) * 1e-16 to rounding; past 8 that exceeds 1e-13 and the series is
# summed in decimal arithmetic instead. The asymptotic expansion is accurate
# to about exp(-2x), so it is only used past 25.
_DECIMAL_PRECISION = 50
# Product of squared Bessel factors below which both are treated as zero.
_DEGENERATE_WEIGHT = 1e-24


def _j0_series(x: float) -> float:
    q = -(x / 2) ** 2
    term = 1.0
    terms = [term]
    k = 0
    while True:
        k += 1
        term *= q / (k * k)
        terms.append(term)
        if k * k > -q and abs(term) < 1e-18:
            break
    return math.fsum(terms)


def _j0_series_extended(x: float) -> float:
    with decimal.localcontext() as ctx:
        ctx.prec = _DECIMAL_PRECISION
        q = -((decimal.Decimal(x) / 2) ** 2)
        term = decimal.Decimal(1)
        total = term
        tiny = decimal.Decimal("1e-30")
        k = 0
        while True:
            k += 1
            term = term * q / (k * k)
            total += term
            if k * k > -q and abs(term) < tiny:
                break
        return float(total)


def _j0_asymptotic(x: float) -> float:
    # Hankel expansion J0 = sqrt(2/(pi x)) (P cos(x - pi/4) - Q sin(x - pi/4)),
    # truncated at its smallest term.
    p = 1.0
    q = 0.0
    term = 1.0
    k = 0
    while True:
        k += 1
        nxt = term * (2 * k - 1) ** 2 / (8 * k * x)
        if nxt >= term or nxt < 1e-18:
            break
        term = nxt
        if k % 2:
            q += term if (k // 2) % 2 else -term
        else:
            p += term if (k // 2) % 2 == 0 else -term
    chi = x - math.pi / 4
    return math.sqrt(2 / (math.pi * x)) * (p * math.cos(chi) - q * math.sin(chi))


def bessel_j0(x: float) -> float:
    """
    Bessel function of the first kind of order zero.

    Accurate to about :math:`10^{-13}` absolute for :math:`|x| \\le 50` and
    beyond.
    """
    x = abs(float(x))
    if not math.isfinite(x):
        raise ValidationError(f"J0 argument must be finite, got {x!r}", field="x")
    if x <= _SERIES_LIMIT:
        return _j0_series(x)
    elif x <= _EXTENDED_SERIES_LIMIT:
        return _j0_series_extended(x)
    else:
        return _j0_asymptotic(x)


class Damping(enum.Enum):
    """Damping regime of the three-site chain."""

    UNDER = "under"
    CRITICAL = "critical"
    OVER = "over"


def damping_class(alpha: float, gamma: float) -> Damping:
    """
    Classify the loss ``alpha`` against the effective coupling ``gamma``.
    Values within :math:`10^{-9}\\max(1, \\gamma)` of each other are
    critical.
    """
    tol = 1e-9 * max(1.0, gamma)
    if alpha < gamma - tol:
        return Damping.UNDER
    elif alpha > gamma + tol:
        return Damping.OVER
    else:
        return Damping.CRITICAL


class ThreeSiteAnalytic(NamedTuple):
    """
    Derived quantities of the averaged three-site model.

    :ivar coupling: Hopping :math:`v`.
    :ivar loss: Loss :math:`\\alpha_2` on the central site.
    :ivar frequency: Drive frequency, or ``None`` when undriven.
    :ivar left_ratio: :math:`A_1/\\omega`.
    :ivar right_ratio: :math:`A_2/\\omega`.
    :ivar j_left: :math:`J_0(A_1/\\omega)`.
    :ivar j_right: :math:`J_0(A_2/\\omega)`.
    :ivar gamma: Effective coupling :math:`\\gamma`.
    :ivar theta: :math:`\\Theta`, real for underdamping and imaginary for
        overdamping.
    :ivar damping: Damping regime.
    :ivar beta: :math:`\\beta` with :math:`\\cos\\beta = \\alpha_2/\\gamma`
        (underdamped) or :math:`\\beta'` with
        :math:`\\cosh\\beta' = \\alpha_2/\\gamma` (overdamped); ``None`` when
        critical.
    :ivar quasienergies: :math:`(\\varepsilon_1, \\varepsilon_2,
        \\varepsilon_3)`.
    :ivar projections: :math:`(F_1, F_2, F_3)` for the particle starting on
        site 1, or ``None`` when critical.
    """

    coupling: float
    loss: float
    frequency: Optional[float]
    left_ratio: float
    right_ratio: float
    j_left: float
    j_right: float
    gamma: float
    theta: complex
    damping: Damping
    beta: Optional[float]
    quasienergies: Tuple[complex, complex, complex]
    projections: Optional[Tuple[complex, complex, complex]]

    @property
    def weight(self) -> float:
        """:math:`J_0^2(A_1/\\omega) + J_0^2(A_2/\\omega)`."""
        return self.j_left ** 2 + self.j_right ** 2


class ThreeSitePopulations(NamedTuple):
    p1: ArrayLike
    p2: ArrayLike
    p3: ArrayLike
    total: ArrayLike


def effective_model(spec: LatticeSpec) -> ThreeSiteAnalytic:
    """
    Evaluate the averaged model for a three-site chain.

    :raises ValidationError: if the chain does not have three sites.
    """
    if spec.n_sites != 3:
        raise ValidationError(
            f"high-frequency analysis needs 3 sites, got {spec.n_sites}",
            field="n_sites",
        )
    if spec.frequency is None:
        left_ratio = right_ratio = 0.0
    else:
        left_ratio = spec.drive_left / spec.frequency
        right_ratio = spec.drive_right / spec.frequency
    j_left = bessel_j0(left_ratio)
    j_right = bessel_j0(right_ratio)
    v = spec.coupling
    alpha = float(loss_vector(spec)[1])
    gamma = 2 * v * math.sqrt(j_left ** 2 + j_right ** 2)
    damping = damping_class(alpha, gamma)
    if damping is Damping.CRITICAL:
        theta = 0j
        beta = None
    else:
        theta = cmath.sqrt(gamma ** 2 - alpha ** 2)
        if gamma == 0:
            beta = None
        elif damping is Damping.UNDER:
            beta = math.acos(alpha / gamma)
        else:
            beta = math.acosh(alpha / gamma)
    quasienergies = (0j, (-1j * alpha + theta) / 2, (-1j * alpha - theta) / 2)
    analytic = ThreeSiteAnalytic(
        coupling=v,
        loss=alpha,
        frequency=spec.frequency,
        left_ratio=left_ratio,
        right_ratio=right_ratio,
        j_left=j_left,
        j_right=j_right,
        gamma=gamma,
        theta=theta,
        damping=damping,
        beta=beta,
        quasienergies=quasienergies,
        projections=None,
    )
    if damping is not Damping.CRITICAL and analytic.weight > _DEGENERATE_WEIGHT:
        analytic = analytic._replace(
            projections=projection_coefficients(analytic, (1, 0, 0))
        )
    return analytic


def mode_matrix(analytic: ThreeSiteAnalytic) -> np.ndarray:
    """
    Return the matrix whose columns are the Floquet modes
    :math:`|u_1(0)\\rangle, |u_2(0)\\rangle, |u_3(0)\\rangle`.
    """
    j1 = analytic.j_left
    j2 = analytic.j_right
    middle = 1j * analytic.loss / (2 * analytic.coupling)
    shift = analytic.theta / (2 * analytic.coupling)
    return np.array(
        [
            [-j2, j1, j1],
            [0, middle - shift, middle + shift],
            [j1, j2, j2],
        ],
        dtype=complex,
    )


def projection_coefficients(
    analytic: ThreeSiteAnalytic, c0: Sequence[complex]
) -> Tuple[complex, complex, complex]:
    """
    Expand the initial amplitudes ``c0`` in the Floquet modes.

    :raises DegeneracyError: if the modes are not linearly independent
        (critical damping or both Bessel factors zero).
    """
    if analytic.damping is Damping.CRITICAL:
        raise DegeneracyError(
            "Floquet modes coalesce at critical damping; no projection exists"
        )
    if analytic.weight <= _DEGENERATE_WEIGHT:
        raise DegeneracyError("both Bessel factors vanish; modes are degenerate")
    f = np.linalg.solve(mode_matrix(analytic), np.asarray(c0, dtype=complex))
    return (complex(f[0]), complex(f[1]), complex(f[2]))


def _check_weight(analytic: ThreeSiteAnalytic) -> float:
    weight = analytic.weight
    if weight <= _DEGENERATE_WEIGHT:
        raise ValidationError(
            "both Bessel factors vanish; the asymptotics are undefined",
            field="drive",
        )
    return weight


def _f_plus(analytic: ThreeSiteAnalytic, t: np.ndarray) -> np.ndarray:
    weight = _check_weight(analytic)
    alpha = analytic.loss
    half = abs(analytic.theta) / 2
    if analytic.damping is Damping.UNDER:
        shape = np.sin(half * t + analytic.beta) / math.sin(analytic.beta)
        return 2 / weight * np.exp(-alpha * t / 2) * shape
    elif analytic.damping is Damping.OVER:
        # exp(-alpha t/2) sinh(half t + beta') without overflowing sinh.
        beta = analytic.beta
        grow = np.exp((half - alpha / 2) * t + beta)
        decay = np.exp((-half - alpha / 2) * t - beta)
        return 2 / weight * (grow - decay) / 2 / math.sinh(beta)
    else:
        return 2 / weight * np.exp(-alpha * t / 2) * (1 + alpha * t / 2)


def _lossy_amplitude(analytic: ThreeSiteAnalytic, t: np.ndarray) -> np.ndarray:
    # c2 without the factor i v J0(A1/omega).
    alpha = analytic.loss
    half = abs(analytic.theta) / 2
    if analytic.damping is Damping.UNDER:
        return np.exp(-alpha * t / 2) * np.sin(half * t) / half
    elif analytic.damping is Damping.OVER:
        grow = np.exp((half - alpha / 2) * t)
        decay = np.exp((-half - alpha / 2) * t)
        return (grow - decay) / 2 / half
    else:
        return t * np.exp(-alpha * t / 2)


def analytic_populations(
    analytic: ThreeSiteAnalytic, t: ArrayLike
) -> ThreeSitePopulations:
    """
    Evaluate the closed-form populations :math:`P_1, P_2, P_3` and their sum
    at time(s) ``t`` for the particle starting on site 1.

    At critical damping the coalesced limit
    :math:`f_+ = 2e^{-\\alpha_2 t/2}(1 + \\alpha_2 t/2)/(J_0^2 + J_0^2)` is
    used.
    """
    scalar = np.isscalar(t)
    t = np.asarray(t, dtype=float)
    weight = _check_weight(analytic)
    j1 = analytic.j_left
    j2 = analytic.j_right
    f = _f_plus(analytic, t)
    p1 = (j2 ** 2 / weight + f * j1 ** 2 / 2) ** 2
    p2 = (analytic.coupling * j1 * _lossy_amplitude(analytic, t)) ** 2
    p3 = (j1 * j2 * (f / 2 - 1 / weight)) ** 2
    total = p1 + p2 + p3
    if scalar:
        return ThreeSitePopulations(float(p1), float(p2), float(p3), float(total))
    return ThreeSitePopulations(p1, p2, p3, total)


def analytic_amplitudes(analytic: ThreeSiteAnalytic, t: ArrayLike) -> np.ndarray:
    """
    Return the closed-form amplitudes :math:`c_1, c_2, c_3` at time(s) ``t``,
    including the fast phases :math:`e^{-i(A/\\omega)\\sin\\omega t}` of the
    driven sites. The result has shape ``t.shape + (3,)``.
    """
    t = np.asarray(t, dtype=float)
    weight = _check_weight(analytic)
    j1 = analytic.j_left
    j2 = analytic.j_right
    f = _f_plus(analytic, t)
    if analytic.frequency is None:
        phase = np.zeros_like(t)
    else:
        phase = np.sin(analytic.frequency * t)
    c1 = np.exp(-1j * analytic.left_ratio * phase) * (
        j2 ** 2 / weight + f * j1 ** 2 / 2
    )
    c2 = 1j * analytic.coupling * j1 * _lossy_amplitude(analytic, t)
    c3 = np.exp(-1j * analytic.right_ratio * phase) * j1 * j2 * (f / 2 - 1 / weight)
    return np.stack([c1, c2 + 0j, c3], axis=-1)


def asymptotic_populations(
    drive_left: float, drive_right: float, frequency: float
) -> ThreeSitePopulations:
    """
    Return the populations of the sink state reached as
    :math:`t \\to \\infty`. They depend only on the drive, not on the loss.

    :raises ValidationError: if ``frequency`` is not positive or both Bessel
        factors vanish.
    """
    if not frequency > 0:
        raise ValidationError(
            f"frequency must be positive, got {frequency!r}", field="frequency"
        )
    j1 = bessel_j0(drive_left / frequency)
    j2 = bessel_j0(drive_right / frequency)
    weight = j1 ** 2 + j2 ** 2
    if weight <= _DEGENERATE_WEIGHT:
        raise ValidationError(
            "both Bessel factors vanish; the asymptotics are undefined",
            field="drive",
        )
    p1 = j2 ** 4 / weight ** 2
    p3 = j1 ** 2 * j2 ** 2 / weight ** 2
    return ThreeSitePopulations(p1, 0.0, p3, j2 ** 2 / weight)
