# SPDX-License-Identifier: GPL-3.0+

"""
Presets
-------

Registry of ready-made scenarios, keyed by figure name (``fig2a`` through
``fig10d``). Unless noted otherwise every preset uses :math:`\\omega = 20`,
:math:`v = 1`, and starts the particle on site 1.
"""

from typing import Dict, Iterable, List, Sequence, Tuple

from floq.errors import ValidationError
from floq.model import LatticeSpec, even_site_losses
from floq.propagate import TimeGrid
from floq.experiments.scenario import Output, Scenario, SweepAxis, Variant


__all__ = ("PRESETS", "preset", "preset_names")


FREQUENCY = 20.0
COUPLING = 1.0

FIVE_SITE_LOSSES = ((0.0, 1.0), (1.0, 1.0), (1.0, 0.0))
SIX_SITE_LOSSES = FIVE_SITE_LOSSES


def _chain(
    n_sites: int,
    losses: Sequence[float] = (1.0,),
    left_ratio: float = 0.0,
    right_ratio: float = 0.0,
) -> LatticeSpec:
    return LatticeSpec(
        n_sites,
        COUPLING,
        left_ratio * FREQUENCY,
        right_ratio * FREQUENCY,
        FREQUENCY,
        even_site_losses(n_sites, losses),
    )


def _loss_label(losses: Iterable[float]) -> str:
    return "loss-" + "-".join(f"{alpha:g}" for alpha in losses)


def _loss_variants(
    n_sites: int,
    placements: Iterable[Sequence[float]],
    left_ratio: float = 0.0,
    right_ratio: float = 0.0,
) -> Tuple[Variant, ...]:
    return tuple(
        Variant(
            _loss_label(losses), _chain(n_sites, losses, left_ratio, right_ratio)
        )
        for losses in placements
    )


DYNAMICS = (Output.TRAJECTORY, Output.EQUILIBRIUM)
THREE_SITE = (Output.TRAJECTORY, Output.ANALYTIC, Output.COMPARISON)


def _presets() -> List[Scenario]:
    scenarios = []

    for panel, alpha in zip("abc", (1.0, 2.0, 3.0)):
        scenarios.append(
            Scenario(
                f"fig2{panel}",
                _chain(3, (alpha,)),
                grid=TimeGrid(t_end=30.0),
                outputs=THREE_SITE,
                description=f"undriven three-site chain, alpha_2={alpha:g}",
            )
        )
    for panel, alpha in zip("def", (1.0, 2.0, 3.0)):
        scenarios.append(
            Scenario(
                f"fig2{panel}",
                _chain(3, (alpha,), left_ratio=1.0),
                grid=TimeGrid(t_end=30.0),
                outputs=THREE_SITE,
                description=f"three-site chain driven on site 1, alpha_2={alpha:g}",
            )
        )

    three_site = _chain(3, left_ratio=1.0)
    scenarios += [
        Scenario(
            "fig3a",
            three_site,
            sweep=SweepAxis("drive_left_ratio", t_finals=(20.0, 100.0)),
            outputs=(Output.EQUILIBRIUM,),
            description="equilibrium total probability versus A1/omega",
        ),
        Scenario(
            "fig3b",
            three_site,
            sweep=SweepAxis("drive_left_ratio", t_finals=(100.0,)),
            outputs=(Output.EQUILIBRIUM,),
            description="equilibrium population ratios versus A1/omega",
        ),
        Scenario(
            "fig3c",
            three_site,
            sweep=SweepAxis("drive_left_ratio"),
            outputs=(Output.SPECTRUM,),
            description="quasienergies versus A1/omega",
        ),
        Scenario(
            "fig3d",
            three_site,
            sweep=SweepAxis("drive_left_ratio"),
            outputs=(Output.DARK_MODE,),
            description="dark-mode populations versus A1/omega",
        ),
        Scenario(
            "fig4a",
            _chain(3),
            grid=TimeGrid(t_end=30.0),
            outputs=THREE_SITE,
            description="undriven three-site chain, underdamped",
        ),
        Scenario(
            "fig4b",
            _chain(3, left_ratio=2.0, right_ratio=2.0),
            grid=TimeGrid(t_end=30.0),
            outputs=THREE_SITE,
            description="both ends driven with A=40, overdamped",
        ),
    ]

    scenarios += [
        Scenario(
            "fig5a",
            _chain(4),
            grid=TimeGrid(t_end=100.0),
            outputs=DYNAMICS,
            variants=tuple(
                Variant(f"ratio-{ratio:g}", _chain(4, right_ratio=ratio))
                for ratio in (0.0, 1.0, 2.4)
            ),
            description="four-site chain driven on site 4",
        ),
        Scenario(
            "fig5a_cdt",
            _chain(4, right_ratio=2.4),
            grid=TimeGrid(t_end=100.0),
            outputs=DYNAMICS,
            description="four-site chain at the first zero of J0 on site 4",
        ),
        Scenario(
            "fig5b",
            _chain(4),
            sweep=SweepAxis("drive_right_ratio", t_finals=(100.0, 1000.0)),
            outputs=(Output.EQUILIBRIUM,),
            description="four-site equilibrium versus A2/omega",
        ),
        Scenario(
            "fig6a",
            _chain(4, right_ratio=1.0),
            grid=TimeGrid(t_end=100.0),
            outputs=DYNAMICS,
            description="four-site populations, A2/omega=1",
        ),
        Scenario(
            "fig6b",
            _chain(4, right_ratio=2.4),
            grid=TimeGrid(t_end=100.0),
            outputs=DYNAMICS,
            variants=(
                Variant("right-2.4", _chain(4, right_ratio=2.4)),
                Variant("left-2.4", _chain(4, left_ratio=2.4)),
            ),
            description="four-site chain driven at one end or the other",
        ),
    ]

    for panel, ratio in zip("abc", (0.0, 2.0, 2.4)):
        scenarios.append(
            Scenario(
                f"fig7{panel}",
                _chain(5, left_ratio=ratio),
                grid=TimeGrid(t_end=100.0),
                outputs=DYNAMICS,
                variants=_loss_variants(5, FIVE_SITE_LOSSES, left_ratio=ratio),
                description=f"five-site chain, A1/omega={ratio:g}",
            )
        )
    for panel, ratio in zip("def", (0.0, 2.0, 2.4)):
        scenarios.append(
            Scenario(
                f"fig7{panel}",
                _chain(6, right_ratio=ratio),
                grid=TimeGrid(t_end=100.0),
                outputs=DYNAMICS,
                variants=_loss_variants(6, SIX_SITE_LOSSES, right_ratio=ratio),
                description=f"six-site chain, A2/omega={ratio:g}",
            )
        )

    scenarios += [
        Scenario(
            "fig8a",
            _chain(5, left_ratio=2.0),
            sweep=SweepAxis("drive_left_ratio", t_finals=(100.0,)),
            outputs=(Output.EQUILIBRIUM, Output.LIFETIME),
            variants=_loss_variants(5, FIVE_SITE_LOSSES, left_ratio=2.0),
            description="five-site equilibrium versus A1/omega; dark-state rates",
        ),
        Scenario(
            "fig8b",
            _chain(6, right_ratio=2.0),
            sweep=SweepAxis("drive_right_ratio", t_finals=(100.0,)),
            outputs=(Output.EQUILIBRIUM,),
            variants=_loss_variants(6, SIX_SITE_LOSSES, right_ratio=2.0),
            description="six-site equilibrium versus A2/omega",
        ),
    ]

    five_site = _chain(5, (0.0, 1.0), left_ratio=2.0)
    scenarios += [
        Scenario(
            "fig9ab",
            five_site,
            sweep=SweepAxis("drive_left_ratio"),
            outputs=(Output.SPECTRUM,),
            description="five-site quasienergies versus A1/omega",
        ),
        Scenario(
            "fig9c",
            five_site,
            outputs=(Output.DARK_MODE, Output.LIFETIME),
            description="five-site dark mode, losses (0, 1)",
        ),
        Scenario(
            "fig9d",
            five_site,
            grid=TimeGrid(t_end=1000.0, sample_stride=1000),
            outputs=DYNAMICS,
            description="five-site long-time populations, sampled once per period",
        ),
    ]

    scenarios += [
        Scenario(
            "fig10a",
            _chain(7, (1.0, 1.0, 1.0), left_ratio=2.0),
            grid=TimeGrid(t_end=100.0),
            outputs=DYNAMICS,
            variants=_loss_variants(7, ((1.0, 1.0, 1.0), (1.0, 0.0, 0.0)), 2.0),
            description="seven-site chain, first lossy site 2",
        ),
        Scenario(
            "fig10b",
            _chain(7, (1.0, 1.0, 1.0), left_ratio=2.0),
            outputs=(Output.LIFETIME,),
            variants=_loss_variants(
                7, ((1.0, 1.0, 1.0), (1.0, 0.0, 0.0), (0.0, 0.0, 1.0)), 2.0
            ),
            description="seven-site dark-state rates, first lossy site 2 or 6",
        ),
        Scenario(
            "fig10c",
            _chain(7, (0.0, 1.0, 1.0), left_ratio=2.0),
            grid=TimeGrid(t_end=100.0),
            outputs=DYNAMICS,
            variants=_loss_variants(7, ((0.0, 1.0, 1.0), (0.0, 1.0, 0.0)), 2.0),
            description="seven-site chain, first lossy site 4",
        ),
        Scenario(
            "fig10d",
            _chain(7, (0.0, 1.0, 1.0), left_ratio=2.0),
            outputs=(Output.LIFETIME,),
            variants=_loss_variants(
                7, ((0.0, 1.0, 1.0), (0.0, 1.0, 0.0), (0.0, 0.0, 1.0)), 2.0
            ),
            description="seven-site dark-state rates, first lossy site 4 or 6",
        ),
    ]
    return scenarios


PRESETS: Dict[str, Scenario] = {scenario.name: scenario for scenario in _presets()}


def preset_names() -> List[str]:
    return list(PRESETS)


def preset(name: str) -> Scenario:
    """
    Look up a preset by name.

    :raises ValidationError: if there is no such preset.
    """
    try:
        return PRESETS[name]
    except KeyError:
        raise ValidationError(
            f"unknown preset {name!r}; run preset-list to see the choices",
            field="preset",
        ) from None
