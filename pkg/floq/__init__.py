# SPDX-License-Identifier: GPL-3.0+

"""
Driven, lossy tight-binding chain simulator

floq simulates a single particle hopping along an N-site chain whose end
sites are shaken by a periodic drive and whose even sites leak probability.
It integrates the amplitude equations, computes complex quasienergies and
Floquet modes from the one-period propagator, finds the dark state that the
lossy dynamics settles into, and evaluates the closed-form high-frequency
results for three sites.

Start with a chain:

>>> spec = floq.validate(floq.LatticeSpec(3, frequency=20.0, drive_left=20.0,
...                                       loss=(0.0, 1.0, 0.0)))
>>> traj = floq.evolve(spec, floq.site_state(3), floq.TimeGrid(t_end=30.0))
>>> floq.equilibrium_average(traj).total

Ready-made studies live in floq.experiments; try

>>> import floq.experiments
>>> help(floq.experiments)

The floq.internal package contains the command line interface and file
writers. Everything in that package should be considered implementation
details and should not be used.
"""

from floq.errors import (
    DegeneracyError,
    EigenError,
    FloqError,
    NumericalError,
    ValidationError,
)
from floq.floquet import (
    DecayRate,
    Eigensystem,
    FloquetMode,
    Monodromy,
    dark_decay_rate,
    dark_state,
    eigendecompose,
    floquet_modes,
    monodromy,
    quasienergy_spectrum,
    static_quasienergies,
)
from floq.hfa import (
    Damping,
    ThreeSiteAnalytic,
    analytic_amplitudes,
    analytic_populations,
    asymptotic_populations,
    bessel_j0,
    damping_class,
    effective_model,
    projection_coefficients,
)
from floq.model import (
    LatticeSpec,
    even_site_losses,
    hamiltonian_at,
    loss_vector,
    validate,
)
from floq.propagate import (
    AmplitudeState,
    EquilibriumAverage,
    TimeGrid,
    Trajectory,
    equilibrium_average,
    evolve,
    loss_rate_residual,
    site_state,
)


__version__ = "0.1.0"

__all__ = (
    "AmplitudeState",
    "Damping",
    "DecayRate",
    "DegeneracyError",
    "EigenError",
    "Eigensystem",
    "EquilibriumAverage",
    "FloqError",
    "FloquetMode",
    "LatticeSpec",
    "Monodromy",
    "NumericalError",
    "ThreeSiteAnalytic",
    "TimeGrid",
    "Trajectory",
    "ValidationError",
    "analytic_amplitudes",
    "analytic_populations",
    "asymptotic_populations",
    "bessel_j0",
    "damping_class",
    "dark_decay_rate",
    "dark_state",
    "effective_model",
    "eigendecompose",
    "equilibrium_average",
    "even_site_losses",
    "evolve",
    "floquet_modes",
    "hamiltonian_at",
    "loss_rate_residual",
    "loss_vector",
    "monodromy",
    "projection_coefficients",
    "quasienergy_spectrum",
    "site_state",
    "static_quasienergies",
    "validate",
)
