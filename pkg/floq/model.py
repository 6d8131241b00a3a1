# SPDX-License-Identifier: GPL-3.0+

"""
Lattice Model
-------------

The ``floq.model`` module describes a single particle on an :math:`N`-site
tight-binding chain. The two end sites are driven with amplitudes
:math:`A_1` and :math:`A_2` at a common frequency :math:`\\omega`, and even
sites other than the right end lose probability at rates :math:`\\alpha_n`.

Sites are numbered from 1 in every public interface. Units have
:math:`\\hbar = 1`.
"""

import math
from typing import Iterable, NamedTuple, Optional, Sequence, Tuple

import numpy as np

from floq.errors import ValidationError


__all__ = (
    "LatticeSpec",
    "SWEEP_PARAMETERS",
    "even_site_losses",
    "first_lossy_site",
    "hamiltonian_at",
    "hamiltonian_batch",
    "loss_vector",
    "static_hamiltonian",
    "validate",
    "with_sweep_parameter",
)


class LatticeSpec(NamedTuple):
    """
    Static description of a driven, lossy chain.

    :ivar n_sites: Number of sites :math:`N`.
    :ivar coupling: Hopping amplitude :math:`v`.
    :ivar drive_left: Drive amplitude :math:`A_1` on site 1.
    :ivar drive_right: Drive amplitude :math:`A_2` on site :math:`N`.
    :ivar frequency: Drive frequency :math:`\\omega`, or ``None`` for an
        undriven chain.
    :ivar loss: Per-site loss rates :math:`\\alpha_n`; ``loss[n - 1]`` is the
        rate on site ``n``. An empty tuple means no loss.
    """

    n_sites: int
    coupling: float = 1.0
    drive_left: float = 0.0
    drive_right: float = 0.0
    frequency: Optional[float] = None
    loss: Tuple[float, ...] = ()

    @property
    def is_driven(self) -> bool:
        return self.drive_left != 0.0 or self.drive_right != 0.0

    @property
    def is_dissipative(self) -> bool:
        return any(alpha > 0.0 for alpha in self.loss)

    @property
    def period(self) -> Optional[float]:
        """Drive period :math:`2\\pi/\\omega`, or ``None`` without a frequency."""
        if self.frequency is None:
            return None
        return 2 * math.pi / self.frequency

    def with_drive_ratios(
        self, left: Optional[float] = None, right: Optional[float] = None
    ) -> "LatticeSpec":
        """
        Return a copy with :math:`A_1 = \\text{left}\\cdot\\omega` and/or
        :math:`A_2 = \\text{right}\\cdot\\omega`.
        """
        if self.frequency is None:
            raise ValidationError(
                "drive ratio needs a drive frequency", field="frequency"
            )
        spec = self
        if left is not None:
            spec = spec._replace(drive_left=left * self.frequency)
        if right is not None:
            spec = spec._replace(drive_right=right * self.frequency)
        return spec


SWEEP_PARAMETERS = ("drive_left_ratio", "drive_right_ratio")


def with_sweep_parameter(
    spec: LatticeSpec, parameter: str, value: float
) -> LatticeSpec:
    """
    Return a copy of ``spec`` with the swept drive ratio set to ``value``.
    ``parameter`` is one of :data:`SWEEP_PARAMETERS`.
    """
    if parameter == "drive_left_ratio":
        return spec.with_drive_ratios(left=value)
    elif parameter == "drive_right_ratio":
        return spec.with_drive_ratios(right=value)
    raise ValidationError(
        f"unknown sweep parameter {parameter!r}", field="parameter"
    )


def even_site_losses(n_sites: int, values: Iterable[float]) -> Tuple[float, ...]:
    """
    Build a full loss vector from rates given for the even sites in order,
    e.g. ``(alpha_2, alpha_4)`` for a five-site chain.

    >>> even_site_losses(5, (0, 1))
    (0.0, 0.0, 0.0, 1.0, 0.0)
    """
    loss = [0.0] * n_sites
    values = list(values)
    lossy = [n for n in range(2, n_sites + 1, 2) if n != n_sites]
    if len(values) > len(lossy):
        raise ValidationError(
            f"{len(values)} even-site losses given but a {n_sites}-site chain "
            f"has {len(lossy)} lossy sites",
            field="loss",
        )
    for n, alpha in zip(lossy, values):
        loss[n - 1] = float(alpha)
    return tuple(loss)


def validate(raw: LatticeSpec) -> LatticeSpec:
    """
    Check every invariant of a :class:`LatticeSpec`.

    :return: ``raw`` unchanged (with ``loss`` padded to ``n_sites`` entries if
        it was empty).
    :raises ValidationError: if any rule is violated.
    """
    if not isinstance(raw.n_sites, (int, np.integer)) or raw.n_sites < 2:
        raise ValidationError(
            f"chain needs at least 2 sites, got {raw.n_sites!r}", field="n_sites"
        )
    if not raw.coupling > 0 or not math.isfinite(raw.coupling):
        raise ValidationError(
            f"coupling must be positive, got {raw.coupling!r}", field="coupling"
        )
    for name in ("drive_left", "drive_right"):
        if not math.isfinite(getattr(raw, name)):
            raise ValidationError(f"{name} must be finite", field=name)
    if raw.frequency is None:
        if raw.is_driven:
            raise ValidationError(
                "driven chain needs a drive frequency", field="frequency"
            )
    elif not raw.frequency > 0 or not math.isfinite(raw.frequency):
        raise ValidationError(
            f"frequency must be positive, got {raw.frequency!r}", field="frequency"
        )
    loss = tuple(float(alpha) for alpha in raw.loss) or (0.0,) * raw.n_sites
    if len(loss) != raw.n_sites:
        raise ValidationError(
            f"loss has {len(loss)} entries for {raw.n_sites} sites", field="loss"
        )
    for n, alpha in enumerate(loss, 1):
        if not alpha >= 0 or not math.isfinite(alpha):
            raise ValidationError(
                f"loss on site {n} must be non-negative, got {alpha!r}", field="loss"
            )
        if alpha == 0:
            continue
        if n == raw.n_sites:
            raise ValidationError(
                f"right-end site {n} must be lossless", field="loss"
            )
        if n % 2:
            raise ValidationError(f"odd site {n} must be lossless", field="loss")
    return raw._replace(loss=loss)


def loss_vector(spec: LatticeSpec) -> np.ndarray:
    """Return the per-site loss rates as a length-:math:`N` array."""
    if not spec.loss:
        return np.zeros(spec.n_sites)
    return np.array(spec.loss, dtype=float)


def first_lossy_site(spec: LatticeSpec) -> Optional[int]:
    """Return the lowest-numbered lossy site, or ``None`` for a lossless chain."""
    for n, alpha in enumerate(loss_vector(spec), 1):
        if alpha > 0:
            return n
    return None


def static_hamiltonian(spec: LatticeSpec) -> np.ndarray:
    """
    Return the time-independent part of the Hamiltonian: the hopping terms
    and the :math:`-i\\alpha_n` loss terms.
    """
    n = spec.n_sites
    h = np.zeros((n, n), dtype=complex)
    off = np.arange(n - 1)
    h[off, off + 1] = -spec.coupling
    h[off + 1, off] = -spec.coupling
    h[np.diag_indices(n)] = -1j * loss_vector(spec)
    return h


def _drive(spec: LatticeSpec, times: np.ndarray) -> np.ndarray:
    if spec.frequency is None:
        return np.zeros_like(times)
    return np.cos(spec.frequency * times)


def hamiltonian_batch(spec: LatticeSpec, times: Sequence[float]) -> np.ndarray:
    """
    Return :math:`H(t)` for each time in ``times`` as a ``(len(times), N, N)``
    array.
    """
    times = np.asarray(times, dtype=float)
    h = np.broadcast_to(static_hamiltonian(spec), times.shape + (spec.n_sites,) * 2)
    h = h.copy()
    drive = _drive(spec, times)
    last = spec.n_sites - 1
    h[..., 0, 0] += spec.drive_left * drive
    h[..., last, last] += spec.drive_right * drive
    return h


def hamiltonian_at(spec: LatticeSpec, t: float) -> np.ndarray:
    """Return the :math:`N \\times N` Hamiltonian at time ``t``."""
    return hamiltonian_batch(spec, np.array([t]))[0]
