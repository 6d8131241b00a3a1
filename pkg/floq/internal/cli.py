# SPDX-License-Identifier: GPL-3.0+

"""floq command line interface"""

import argparse
import copy
import json
import logging
import os
import sys
from typing import Any, Callable, Dict, List, NamedTuple, Optional, Sequence, Tuple

import numpy as np
import pkg_resources

import floq
from floq.errors import FloqError, ValidationError
from floq.experiments import (
    PRESETS,
    Output,
    Scenario,
    ScenarioSummary,
    SweepAxis,
    Variant,
    preset,
    run_scenario,
    with_lattice,
)
from floq.internal.table import dump_json
from floq.model import LatticeSpec, even_site_losses, validate
from floq.propagate import TimeGrid


logger = logging.getLogger(__name__)


COMMANDS = ("evolve", "floquet", "sweep", "analytic", "compare", "run", "preset-list")
DEFAULT_OUT_DIR = "floq-out"

LATTICE_KEYS = (
    "n_sites",
    "coupling",
    "drive_left",
    "drive_right",
    "frequency",
    "loss",
    "even_losses",
)
GRID_KEYS = TimeGrid._fields
SWEEP_KEYS = SweepAxis._fields
OUTPUT_KEYS = ("directory", "verbosity", "emit_amplitudes", "workers")
DOCUMENT_KEYS = (
    "command",
    "lattice",
    "initial_site",
    "grid",
    "delta",
    "preset",
    "sweep",
    "output",
)


class RunConfig(NamedTuple):
    """
    Everything one invocation needs.

    :ivar lattice: Validated chain, or ``None`` for ``preset-list``.
    :ivar preset: Preset the configuration started from, if any.
    :ivar out_dir: Parent directory of the per-run output directory.
    :ivar verbosity: -1 quiet, 0 warnings, 1 info, 2 or more debug.
    """

    command: str
    lattice: Optional[LatticeSpec] = None
    initial_site: int = 1
    grid: TimeGrid = TimeGrid()
    delta: Optional[float] = None
    preset: Optional[str] = None
    sweep: Optional[SweepAxis] = None
    out_dir: str = DEFAULT_OUT_DIR
    verbosity: int = 0
    emit_amplitudes: bool = False
    workers: int = 1


class _ArgumentParser(argparse.ArgumentParser):
    def error(self, message: str) -> None:
        raise ValidationError(message, field="arguments")


def _version() -> str:
    try:
        version = pkg_resources.get_distribution("floq").version
    except pkg_resources.DistributionNotFound:
        version = floq.__version__
    python_version = ".".join(str(v) for v in sys.version_info[:3])
    return f"floq {version} (using Python {python_version})"


def _parser() -> argparse.ArgumentParser:
    parser = _ArgumentParser(
        prog="floq", description="Driven, lossy tight-binding chain simulator"
    )
    parser.add_argument(
        "command",
        nargs="?",
        choices=COMMANDS,
        help="what to run; may also be given as 'command' in the config file",
    )
    parser.add_argument(
        "--config", metavar="PATH", help="read settings from the given JSON file"
    )
    parser.add_argument("--preset", metavar="NAME", help="start from a named preset")
    parser.add_argument(
        "--out",
        metavar="DIR",
        help=f"output directory (default: $FLOQ_OUT_DIR or {DEFAULT_OUT_DIR})",
    )
    parser.add_argument("--tf", metavar="REAL", type=float, help="final time")
    parser.add_argument(
        "--steps-per-period",
        metavar="INT",
        type=int,
        help="integration steps per drive period",
    )
    parser.add_argument(
        "--delta", metavar="REAL", type=float, help="equilibrium averaging window"
    )
    parser.add_argument(
        "--emit-amplitudes",
        action="store_true",
        default=None,
        help="add complex amplitudes to trajectory files",
    )
    parser.add_argument(
        "--workers", metavar="INT", type=int, help="processes to use for sweeps"
    )
    parser.add_argument(
        "-D",
        dest="overrides",
        metavar="KEY=VALUE",
        action="append",
        default=[],
        help="set a config key by dotted path, e.g. -D lattice.frequency=20; "
        "this option may be given more than once",
    )
    verbosity = parser.add_mutually_exclusive_group()
    verbosity.add_argument(
        "-v",
        "--verbose",
        dest="verbosity",
        action="count",
        help="log progress; give twice for debugging output",
    )
    verbosity.add_argument(
        "-q",
        "--quiet",
        dest="verbosity",
        action="store_const",
        const=-1,
        help="only log errors",
    )
    parser.add_argument("--version", action="version", version=_version())
    return parser


def _check_keys(document: Dict[str, Any], allowed: Sequence[str], where: str) -> None:
    if not isinstance(document, dict):
        raise ValidationError(f"{where or 'config'} must be an object", field=where)
    for key in document:
        if key not in allowed:
            path = f"{where}.{key}" if where else key
            raise ValidationError(f"unknown config key {path!r}", field=path)


def _merge(base: Dict[str, Any], override: Dict[str, Any]) -> Dict[str, Any]:
    merged = copy.deepcopy(base)
    for key, value in override.items():
        if isinstance(value, dict) and isinstance(merged.get(key), dict):
            current = merged[key]
            if key == "lattice" and ("loss" in value or "even_losses" in value):
                current.pop("loss", None)
                current.pop("even_losses", None)
            merged[key] = _merge(current, value)
        else:
            merged[key] = copy.deepcopy(value)
    return merged


def _set_dotted(document: Dict[str, Any], assignment: str) -> None:
    key, sep, text = assignment.partition("=")
    if not sep or not key:
        raise ValidationError(
            f"override {assignment!r} is not of the form KEY=VALUE", field="-D"
        )
    try:
        value = json.loads(text)
    except json.JSONDecodeError:
        value = text
    *parents, leaf = key.split(".")
    target = document
    for parent in parents:
        target = target.setdefault(parent, {})
        if not isinstance(target, dict):
            raise ValidationError(f"{key!r} does not name an object key", field=key)
    if parents == ["lattice"] and leaf in ("loss", "even_losses"):
        target.pop("loss", None)
        target.pop("even_losses", None)
    target[leaf] = value


def _load(path: str) -> Dict[str, Any]:
    try:
        with open(path) as f:
            document = json.load(f)
    except OSError as e:
        raise ValidationError(
            f"cannot read config {path}: {e.strerror}", field="config"
        ) from e
    except json.JSONDecodeError as e:
        raise ValidationError(f"config {path} is not valid JSON: {e}", field="config")
    _check_keys(document, DOCUMENT_KEYS, "")
    return document


def _lattice_document(spec: LatticeSpec) -> Dict[str, Any]:
    document = spec._asdict()
    document["loss"] = list(spec.loss)
    return document


def _grid_document(grid: TimeGrid) -> Dict[str, Any]:
    return grid._asdict()


def _sweep_document(sweep: Optional[SweepAxis]) -> Optional[Dict[str, Any]]:
    if sweep is None:
        return None
    document = sweep._asdict()
    document["t_finals"] = list(sweep.t_finals)
    return document


def _preset_document(name: str) -> Dict[str, Any]:
    scenario = preset(name)
    return {
        "lattice": _lattice_document(scenario.spec),
        "initial_site": scenario.initial_site,
        "grid": _grid_document(scenario.grid),
        "delta": scenario.delta,
        "sweep": _sweep_document(scenario.sweep),
    }


def _number(value: Any, field: str, *, optional: bool = False) -> Optional[float]:
    if value is None and optional:
        return None
    if isinstance(value, bool) or not isinstance(value, (int, float)):
        raise ValidationError(f"{field} must be a number, got {value!r}", field=field)
    return float(value)


def _integer(value: Any, field: str) -> int:
    if isinstance(value, bool) or not isinstance(value, int):
        raise ValidationError(
            f"{field} must be an integer, got {value!r}", field=field
        )
    return value


def _numbers(value: Any, field: str) -> tuple:
    if not isinstance(value, list):
        raise ValidationError(f"{field} must be a list, got {value!r}", field=field)
    return tuple(_number(v, field) for v in value)


def _lattice(document: Dict[str, Any]) -> LatticeSpec:
    _check_keys(document, LATTICE_KEYS, "lattice")
    if "loss" in document and "even_losses" in document:
        raise ValidationError(
            "lattice.loss and lattice.even_losses are mutually exclusive",
            field="lattice.loss",
        )
    if "n_sites" not in document:
        raise ValidationError("lattice.n_sites is required", field="lattice.n_sites")
    n_sites = _integer(document["n_sites"], "lattice.n_sites")
    if "even_losses" in document:
        loss = even_site_losses(
            n_sites, _numbers(document["even_losses"], "lattice.even_losses")
        )
    else:
        loss = _numbers(document.get("loss", []), "lattice.loss")
    spec = LatticeSpec(
        n_sites,
        _number(document.get("coupling", 1.0), "lattice.coupling"),
        _number(document.get("drive_left", 0.0), "lattice.drive_left"),
        _number(document.get("drive_right", 0.0), "lattice.drive_right"),
        _number(document.get("frequency"), "lattice.frequency", optional=True),
        loss,
    )
    return validate(spec)


def _grid(document: Dict[str, Any]) -> TimeGrid:
    _check_keys(document, GRID_KEYS, "grid")
    default = TimeGrid()
    return TimeGrid(
        _number(document.get("t_start", default.t_start), "grid.t_start"),
        _number(document.get("t_end", default.t_end), "grid.t_end"),
        _integer(
            document.get("steps_per_period", default.steps_per_period),
            "grid.steps_per_period",
        ),
        _number(document.get("dt"), "grid.dt", optional=True),
        _integer(
            document.get("sample_stride", default.sample_stride), "grid.sample_stride"
        ),
    )


def _sweep(document: Optional[Dict[str, Any]]) -> Optional[SweepAxis]:
    if document is None:
        return None
    _check_keys(document, SWEEP_KEYS, "sweep")
    default = SweepAxis()
    parameter = document.get("parameter", default.parameter)
    if not isinstance(parameter, str):
        raise ValidationError(
            f"sweep.parameter must be a string, got {parameter!r}",
            field="sweep.parameter",
        )
    return SweepAxis(
        parameter,
        _number(document.get("start", default.start), "sweep.start"),
        _number(document.get("stop", default.stop), "sweep.stop"),
        _integer(document.get("count", default.count), "sweep.count"),
        _numbers(document.get("t_finals", list(default.t_finals)), "sweep.t_finals"),
    )


def _from_document(
    document: Dict[str, Any], environ: Dict[str, str]
) -> RunConfig:
    _check_keys(document, DOCUMENT_KEYS, "")
    command = document.get("command")
    if command not in COMMANDS:
        raise ValidationError(
            f"command must be one of {', '.join(COMMANDS)}, got {command!r}",
            field="command",
        )
    name = document.get("preset")
    if name is not None:
        if not isinstance(name, str):
            raise ValidationError("preset must be a string", field="preset")
        preset(name)
    output = document.get("output", {})
    _check_keys(output, OUTPUT_KEYS, "output")
    lattice = document.get("lattice")
    if lattice is None and command != "preset-list":
        raise ValidationError(
            "no lattice given; use --preset, --config or -D lattice.n_sites=N",
            field="lattice",
        )
    delta = _number(document.get("delta"), "delta", optional=True)
    out_dir = output.get("directory", environ.get("FLOQ_OUT_DIR") or DEFAULT_OUT_DIR)
    if not isinstance(out_dir, str):
        raise ValidationError("output.directory must be a string", field="output")
    workers = _integer(output.get("workers", 1), "output.workers")
    if workers < 1:
        raise ValidationError("output.workers must be positive", field="output.workers")
    emit_amplitudes = output.get("emit_amplitudes", False)
    if not isinstance(emit_amplitudes, bool):
        raise ValidationError(
            "output.emit_amplitudes must be true or false",
            field="output.emit_amplitudes",
        )
    return RunConfig(
        command=command,
        lattice=None if lattice is None else _lattice(lattice),
        initial_site=_integer(document.get("initial_site", 1), "initial_site"),
        grid=_grid(document.get("grid", {})),
        delta=delta,
        preset=name,
        sweep=_sweep(document.get("sweep")),
        out_dir=out_dir,
        verbosity=_integer(output.get("verbosity", 0), "output.verbosity"),
        emit_amplitudes=emit_amplitudes,
        workers=workers,
    )


def parse_config(
    argv: Sequence[str], environ: Optional[Dict[str, str]] = None
) -> RunConfig:
    """
    Build a :class:`RunConfig` from command line arguments.

    Settings are layered: a preset supplies defaults, the config file
    overrides the preset, ``-D`` assignments override the file, and the named
    flags override everything.

    :raises ValidationError: on unknown keys, conflicting settings, or
        invalid physics parameters.
    """
    if environ is None:
        environ = dict(os.environ)
    args = _parser().parse_args(argv)
    flags: Dict[str, Any] = {}
    for assignment in args.overrides:
        _set_dotted(flags, assignment)
    if args.command is not None:
        flags["command"] = args.command
    if args.preset is not None:
        flags["preset"] = args.preset
    grid = flags.setdefault("grid", {})
    if args.tf is not None:
        grid["t_end"] = args.tf
    if args.steps_per_period is not None:
        grid["steps_per_period"] = args.steps_per_period
    if args.delta is not None:
        flags["delta"] = args.delta
    output = flags.setdefault("output", {})
    if args.out is not None:
        output["directory"] = args.out
    if args.emit_amplitudes is not None:
        output["emit_amplitudes"] = args.emit_amplitudes
    if args.workers is not None:
        output["workers"] = args.workers
    if args.verbosity is not None:
        output["verbosity"] = args.verbosity

    document = _load(args.config) if args.config is not None else {}
    name = flags.get("preset", document.get("preset"))
    base = _preset_document(name) if isinstance(name, str) else {}
    document = _merge(_merge(base, document), flags)
    return _from_document(document, environ)


def emit_config(config: RunConfig) -> str:
    """
    Serialize ``config`` as a JSON config document that
    :func:`parse_config` reads back to an equal :class:`RunConfig`.
    """
    document: Dict[str, Any] = {"command": config.command}
    if config.lattice is not None:
        document["lattice"] = _lattice_document(config.lattice)
    document.update(
        initial_site=config.initial_site,
        grid=_grid_document(config.grid),
        delta=config.delta,
        preset=config.preset,
        sweep=_sweep_document(config.sweep),
        output={
            "directory": config.out_dir,
            "verbosity": config.verbosity,
            "emit_amplitudes": config.emit_amplitudes,
            "workers": config.workers,
        },
    )
    return dump_json(document)


def _variants(config: RunConfig) -> Tuple[Variant, ...]:
    if config.preset is None:
        return ()
    return with_lattice(preset(config.preset), config.lattice).variants


def _scenario(
    config: RunConfig, outputs: Sequence[Output], sweep: Optional[SweepAxis] = None
) -> Scenario:
    return Scenario(
        config.preset or config.command,
        config.lattice,
        initial_site=config.initial_site,
        grid=config.grid,
        delta=config.delta,
        sweep=sweep,
        outputs=tuple(outputs),
        variants=_variants(config),
    )


def _single_chain(config: RunConfig) -> None:
    if _variants(config):
        raise ValidationError(
            f"preset {config.preset} runs several chains; "
            f"{config.command} takes one, use run or floquet instead",
            field="preset",
        )


def _run(config: RunConfig, scenario: Scenario) -> ScenarioSummary:
    directory = os.path.join(config.out_dir, scenario.name)
    return run_scenario(
        scenario,
        directory,
        workers=config.workers,
        emit_amplitudes=config.emit_amplitudes,
    )


def _evolve(config: RunConfig) -> ScenarioSummary:
    return _run(config, _scenario(config, (Output.TRAJECTORY, Output.EQUILIBRIUM)))


def _floquet(config: RunConfig) -> ScenarioSummary:
    outputs = [Output.SPECTRUM, Output.DARK_MODE]
    if config.lattice.is_driven and config.lattice.is_dissipative:
        outputs.append(Output.LIFETIME)
    return _run(config, _scenario(config, outputs, config.sweep))


def _sweep_command(config: RunConfig) -> ScenarioSummary:
    sweep = config.sweep if config.sweep is not None else SweepAxis()
    return _run(config, _scenario(config, (Output.EQUILIBRIUM,), sweep))


def _analytic(config: RunConfig) -> ScenarioSummary:
    _single_chain(config)
    return _run(config, _scenario(config, (Output.ANALYTIC,)))


def _compare(config: RunConfig) -> ScenarioSummary:
    _single_chain(config)
    return _run(config, _scenario(config, (Output.ANALYTIC, Output.COMPARISON)))


def _run_preset(config: RunConfig) -> ScenarioSummary:
    if config.preset is None:
        raise ValidationError("run needs --preset", field="preset")
    scenario = with_lattice(preset(config.preset), config.lattice)._replace(
        initial_site=config.initial_site,
        grid=config.grid,
        delta=config.delta,
        sweep=config.sweep,
    )
    return _run(config, scenario)


HANDLERS: Dict[str, Callable[[RunConfig], ScenarioSummary]] = {
    "evolve": _evolve,
    "floquet": _floquet,
    "sweep": _sweep_command,
    "analytic": _analytic,
    "compare": _compare,
    "run": _run_preset,
}

SUMMARY_KEYS = ("P_final", "P_equ", "eps_dark", "minus_im_eps_dark", "deviation_sup")


def _short(value: Any) -> str:
    if isinstance(value, dict):
        value = max(value.values())
    if isinstance(value, complex):
        return f"{value.real:.6g}{value.imag:+.6g}j"
    if isinstance(value, float):
        return f"{value:.6g}"
    return str(value)


def summary_line(command: str, summary: ScenarioSummary) -> str:
    parts = [f"{command} {summary.name}:"]
    for label, values in summary.results.items():
        prefix = f"{label}." if label else ""
        for key in SUMMARY_KEYS:
            if key in values:
                parts.append(f"{prefix}{key}={_short(values[key])}")
    files = ",".join(os.path.basename(path) for path in summary.files)
    parts.append(f"-> {summary.directory} ({files})")
    return " ".join(parts)


def _preset_list() -> List[str]:
    lines = [f"{name}: {scenario.description}" for name, scenario in PRESETS.items()]
    lines.append(f"preset-list: {len(PRESETS)} presets")
    return lines


def _configure_logging(verbosity: int) -> None:
    logging.basicConfig(format="%(levelname)s: %(name)s: %(message)s")
    if verbosity < 0:
        level = logging.ERROR
    elif verbosity == 0:
        level = logging.WARNING
    elif verbosity == 1:
        level = logging.INFO
    else:
        level = logging.DEBUG
    logging.getLogger("floq").setLevel(level)


def _fail(command: str, code: int, message: str) -> int:
    print(f"error: {message}", file=sys.stderr)
    print(f"{command}: failed with exit code {code}")
    return code


def main(argv: Optional[Sequence[str]] = None) -> int:
    """
    Run the command line interface.

    :return: 0 on success or after --help and --version, 1 for invalid input,
        2 for numerical failure (including linear-algebra and floating-point
        errors).
    """
    if argv is None:
        argv = sys.argv[1:]
    command = "floq"
    _configure_logging(0)
    try:
        config = parse_config(argv)
        command = config.command
        _configure_logging(config.verbosity)
        logger.debug("configuration:\n%s", emit_config(config))
        if command == "preset-list":
            print("\n".join(_preset_list()))
            return 0
        summary = HANDLERS[command](config)
    except FloqError as e:
        code = 1 if isinstance(e, ValidationError) else 2
        field = getattr(e, "field", None)
        return _fail(command, code, str(e) + (f" [{field}]" if field else ""))
    except OSError as e:
        return _fail(command, 1, f"{e.filename}: {e.strerror}")
    except (ArithmeticError, np.linalg.LinAlgError) as e:
        return _fail(command, 2, f"{type(e).__name__}: {e}")
    except SystemExit as e:
        # --help and --version
        return e.code if isinstance(e.code, int) else 0
    print(summary_line(command, summary))
    return 0
