"""Command-line interface: presets, config handling, and output writing.

Subcommands
-----------
algebra-check   residual table of the deformed-algebra identities
ladder          closed-form doublet scans (deformation or detuning axis)
spectrum        emission spectra for configured (lambda, delta) pairs
g2              zero-delay photon correlation versus pump

Configuration is resolved in order: built-in defaults, --preset,
--config file (``key = value`` lines, JSON-style values), then explicit
flags.  Every run writes ``manifest.json`` echoing the fully resolved
configuration.  Exit codes: 0 success, 2 configuration/validation
error, 3 physics-validity failure, 4 numerical-method failure.
"""

from __future__ import annotations

import argparse
import dataclasses
import json
import sys
import time
from dataclasses import dataclass
from pathlib import Path

import numpy as np

from . import __version__, algebra, dynamics, model, render, scans, spectrum
from .errors import (
    ConfigError,
    NumericalError,
    PhysicsValidityError,
    ValidationError,
)

MANIFEST_SCHEMA_VERSION = 1

ACCEPTED_FORMATS = ("csv", "json", "svg")

ALGEBRA_LAMBDAS = (-0.5, -0.3, 0.0, 0.3, 0.5, 0.9)


@dataclass(frozen=True)
class RunConfig:
    """Fully resolved run configuration (see module docstring)."""

    # physics (rates default to the shared preset rates, units of g)
    omega_c: float = 0.0
    delta: float = 0.0
    g: float = 1.0
    lam: float = 0.0
    kappa: float = 0.083
    gamma: float = 0.017
    pump: float = 0.05
    nbar: float = 0.0
    # cutoff policy
    n_max: int = 15
    n_max_limit: int = 29
    cutoff_step: int = 3
    top_tol: float = 1e-8
    # task layout
    scan: str = "lambda"
    rungs: int = 19
    lambdas: tuple[float, ...] | None = None
    spectra: tuple[tuple[float, float], ...] | None = None
    lambda_grid: tuple[float, float, int] = (-0.5, 1.0, 301)
    delta_grid: tuple[float, float, int] = (-4.0, 4.0, 401)
    pump_grid: tuple[float, float, int] = (1e-3, 10.0, 60)
    omega_grid: tuple[float, float, int] = (-3.0, 3.0, 2001)
    method: str = "eigen"
    normalize: bool = False
    tol: float = 1e-12
    workers: int = 1

    def params(self, **overrides) -> model.SystemParams:
        base = dict(
            omega_c=self.omega_c,
            delta=self.delta,
            g=self.g,
            lam=self.lam,
            kappa=self.kappa,
            gamma=self.gamma,
            pump=self.pump,
            nbar=self.nbar,
        )
        base.update(overrides)
        return model.SystemParams(**base)

    def cutoff_policy(self) -> dynamics.CutoffPolicy:
        return dynamics.CutoffPolicy(
            initial=self.n_max,
            maximum=self.n_max_limit,
            step=self.cutoff_step,
            top_tol=self.top_tol,
        )


# Config-file key -> dataclass field.  "lambda" is the user-facing name.
_KEY_ALIASES = {"lambda": "lam"}
_FIELD_NAMES = {f.name for f in dataclasses.fields(RunConfig)}

PRESETS: dict[str, dict] = {
    # inner-doublet positions versus deformation, 19 rungs
    "fig1": {"scan": "lambda", "rungs": 19, "lambda_grid": (-0.5, 1.0, 301)},
    # doublet branches versus detuning for four deformations, 3 rungs
    "fig2": {
        "scan": "detuning",
        "rungs": 3,
        "delta_grid": (-4.0, 4.0, 401),
        "lambdas": (0.0, 0.5, -0.5, 0.9),
    },
    # emission spectra at resonance (the lower critical point is taken
    # just above -1/2, where the steady state is unique; see scans)
    "fig3a": {"spectra": ((0.0, 0.0), (0.5, 0.0), (scans.NEAR_CRITICAL_LAM, 0.0))},
    # detuned emission spectra
    "fig3b": {"spectra": ((0.0, 0.7), (0.9, 0.7))},
    # photon statistics versus pump
    "fig4": {
        "lambdas": (0.0, 0.5, scans.NEAR_CRITICAL_LAM, 0.9),
        "pump_grid": (1e-3, 10.0, 60),
        "n_max_limit": 192,
    },
}


_FLOAT_KEYS = {"omega_c", "delta", "g", "lam", "kappa", "gamma", "pump", "nbar", "top_tol", "tol"}
_INT_KEYS = {"n_max", "n_max_limit", "cutoff_step", "rungs", "workers"}
_STR_KEYS = {"scan", "method"}
_BOOL_KEYS = {"normalize"}
_GRID_KEYS = {"lambda_grid", "delta_grid", "pump_grid", "omega_grid"}


def _coerce(name: str, value) -> object:
    """Coerce a raw config value to its RunConfig field type."""
    try:
        if name in _FLOAT_KEYS:
            return float(value)
        if name in _INT_KEYS:
            out = int(value)
            if out != float(value):
                raise ValueError
            return out
        if name in _STR_KEYS:
            if not isinstance(value, str):
                raise ValueError
            return value
        if name in _BOOL_KEYS:
            if isinstance(value, bool):
                return value
            if isinstance(value, str) and value.lower() in ("true", "false"):
                return value.lower() == "true"
            raise ValueError
        if name in _GRID_KEYS:
            start, stop, num = value
            return (float(start), float(stop), int(num))
        if name == "lambdas":
            return tuple(float(v) for v in value)
        if name == "spectra":
            return tuple((float(a), float(b)) for a, b in value)
    except (TypeError, ValueError):
        raise ConfigError(f"config key {name!r}: cannot interpret value {value!r}") from None
    raise ConfigError(f"config key {name!r} is not settable")


def _apply(settings: dict, source: dict, origin: str) -> None:
    for raw_key, value in source.items():
        key = _KEY_ALIASES.get(raw_key, raw_key)
        if key not in _FIELD_NAMES:
            raise ConfigError(f"unknown config key {raw_key!r} (from {origin})")
        settings[key] = _coerce(key, value)


def parse_config_file(path: Path) -> dict:
    """Parse ``key = value`` lines; values are JSON where possible.

    A JSON file is accepted as well; if it is a run manifest, its
    ``config`` payload is used, so a previous run can be replayed with
    ``--config <out>/manifest.json``.
    """
    raw = {}
    try:
        text = path.read_text()
    except OSError as exc:
        raise ConfigError(f"cannot read config file {path}: {exc}") from None
    try:
        payload = json.loads(text)
    except json.JSONDecodeError:
        payload = None
    if isinstance(payload, dict):
        if "schema_version" in payload and isinstance(payload.get("config"), dict):
            payload = payload["config"]
        return {k: v for k, v in payload.items() if v is not None}
    for lineno, line in enumerate(text.splitlines(), start=1):
        stripped = line.strip()
        if not stripped or stripped.startswith("#"):
            continue
        if "=" not in stripped:
            raise ConfigError(f"{path}:{lineno}: expected 'key = value'")
        key, _, value = stripped.partition("=")
        key = key.strip()
        value = value.strip()
        try:
            raw[key] = json.loads(value)
        except json.JSONDecodeError:
            raw[key] = value
    return raw


def resolve_config(args: argparse.Namespace) -> RunConfig:
    settings: dict = {}
    if args.preset is not None:
        if args.preset not in PRESETS:
            raise ConfigError(
                f"unknown preset {args.preset!r}; available: {', '.join(sorted(PRESETS))}"
            )
        _apply(settings, PRESETS[args.preset], f"preset {args.preset}")
    if args.config is not None:
        _apply(settings, parse_config_file(Path(args.config)), str(args.config))
    overrides = {}
    if args.cutoff is not None:
        overrides["n_max"] = args.cutoff
    if args.workers is not None:
        overrides["workers"] = args.workers
    _apply(settings, overrides, "command line")
    try:
        return RunConfig(**settings)
    except TypeError as exc:
        raise ConfigError(str(exc)) from None


def _linspace(grid: tuple[float, float, int]) -> np.ndarray:
    start, stop, num = grid
    if num < 1:
        raise ConfigError(f"grid {grid} must have at least one point")
    return np.linspace(start, stop, num)


def _logspace(grid: tuple[float, float, int]) -> np.ndarray:
    start, stop, num = grid
    if num < 1:
        raise ConfigError(f"grid {grid} must have at least one point")
    if start <= 0 or stop <= 0:
        raise ConfigError(f"log grid {grid} needs positive endpoints")
    return np.geomspace(start, stop, num)


def _slug(value: float) -> str:
    return f"{value:+.4f}"


class _Run:
    """Collects outputs and writes the manifest for one CLI invocation."""

    def __init__(self, subcommand: str, config: RunConfig, out_dir: Path, formats: tuple[str, ...]):
        self.subcommand = subcommand
        self.config = config
        self.out_dir = out_dir
        self.formats = formats
        self.outputs: list[str] = []
        self.notes: dict = {}
        self.started = time.time()
        out_dir.mkdir(parents=True, exist_ok=True)

    def path(self, name: str) -> Path:
        self.outputs.append(name)
        return self.out_dir / name

    def finish(self) -> None:
        manifest = {
            "schema_version": MANIFEST_SCHEMA_VERSION,
            "package": {"name": "parityqed", "version": __version__},
            "subcommand": self.subcommand,
            "config": dataclasses.asdict(self.config),
            "formats": list(self.formats),
            "outputs": self.outputs,
            "notes": self.notes,
            "elapsed_seconds": round(time.time() - self.started, 3),
        }
        with open(self.out_dir / "manifest.json", "w") as fh:
            json.dump(manifest, fh, indent=1, sort_keys=True)
            fh.write("\n")


def cmd_algebra_check(config: RunConfig, run: _Run) -> int:
    lambdas = config.lambdas if config.lambdas is not None else ALGEBRA_LAMBDAS
    all_ok = True
    print(f"deformed-algebra identities, n_max = {config.n_max}, tol = {config.tol:g}")
    for lam in lambdas:
        report = algebra.verify_algebra(config.n_max, lam, tol=config.tol)
        for check in report.checks:
            status = "ok " if check.passed else "FAIL"
            print(
                f"  lam={lam:+.3f}  {status}  {check.name:28s} residual={check.residual:.3e}"
                + (f"  (worst level {check.worst_level})" if not check.passed else "")
            )
        all_ok &= report.all_passed
    run.notes["all_passed"] = bool(all_ok)
    run.finish()
    return 0 if all_ok else 3


def cmd_ladder(config: RunConfig, run: _Run) -> int:
    if config.scan == "lambda":
        result = scans.doublets_vs_lambda(
            _linspace(config.lambda_grid), config.params(), n_rungs=config.rungs
        )
        _write_scan(result, "doublets_vs_lambda", run, render.render_ladder)
    elif config.scan == "detuning":
        lambdas = config.lambdas if config.lambdas is not None else (config.lam,)
        for lam in lambdas:
            result = scans.doublets_vs_detuning(
                _linspace(config.delta_grid) * config.g,
                config.params(lam=lam),
                n_rungs=config.rungs,
            )
            _write_scan(result, f"doublets_vs_detuning_lam{_slug(lam)}", run, render.render_ladder)
    else:
        raise ConfigError(f"scan must be 'lambda' or 'detuning', got {config.scan!r}")
    run.finish()
    return 0


def _write_scan(result: scans.ScanResult, stem: str, run: _Run, renderer) -> None:
    if "csv" in run.formats:
        result.write_csv(run.path(f"{stem}.csv"))
    if "svg" in run.formats:
        renderer(result, run.path(f"{stem}.svg"))


def cmd_spectrum(config: RunConfig, run: _Run) -> int:
    if not config.spectra:
        raise ConfigError("spectrum subcommand needs 'spectra' (list of [lambda, delta] pairs)")
    policy = config.cutoff_policy()
    omega = _linspace(config.omega_grid) * config.g
    for lam, delta in config.spectra:
        params = config.params(lam=lam, delta=delta * config.g)
        result = spectrum.emission_spectrum(
            params, policy, omega_grid=omega, method=config.method, normalize=config.normalize
        )
        stem = f"spectrum_lam{_slug(lam)}_delta{_slug(delta)}"
        if "csv" in run.formats:
            result.write_csv(run.path(f"{stem}.csv"))
        if "json" in run.formats:
            result.write_json(run.path(f"{stem}.json"))
        if "svg" in run.formats:
            render.render_spectrum(
                result, run.path(f"{stem}.svg"), label=f"lam={lam:g}, delta={delta:g}g"
            )
        run.notes[stem] = {
            "n_max": result.metadata["n_max"],
            "method": result.metadata["method"],
        }
    run.finish()
    return 0


def cmd_g2(config: RunConfig, run: _Run) -> int:
    lambdas = config.lambdas if config.lambdas is not None else scans.G2_LAMBDAS
    result = scans.g2_vs_pump(
        _logspace(config.pump_grid) * config.g,
        lambdas=lambdas,
        params=config.params(),
        cutoff=config.cutoff_policy(),
        workers=config.workers,
    )
    _write_scan(result, "g2_vs_pump", run, render.render_g2)
    nan_rows = [row for row in result.rows if np.isnan(row[2])]
    if nan_rows:
        print(f"warning: {len(nan_rows)} grid point(s) with undefined statistics (NaN)", file=sys.stderr)
    run.notes["cutoffs_used"] = sorted(set(int(r[4]) for r in result.rows))
    run.finish()
    return 0


def build_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(
        prog="parityqed",
        description="Simulate a pumped-dissipative emitter-cavity system with a parity-deformed cavity mode.",
    )
    parser.add_argument("--version", action="version", version=f"parityqed {__version__}")
    sub = parser.add_subparsers(dest="subcommand", required=True)
    for name, help_text in (
        ("algebra-check", "verify the deformed-operator identities"),
        ("ladder", "closed-form doublet scans (fig1/fig2 presets)"),
        ("spectrum", "emission spectra (fig3a/fig3b presets)"),
        ("g2", "photon statistics versus pump (fig4 preset)"),
    ):
        cmd = sub.add_parser(name, help=help_text)
        cmd.add_argument("--preset", help="named preset (fig1, fig2, fig3a, fig3b, fig4)")
        cmd.add_argument("--config", help="path to a key = value config file")
        cmd.add_argument("--out", default="out", help="output directory (created if missing)")
        cmd.add_argument(
            "--format",
            default="csv,json,svg",
            help="comma-separated outputs: csv,json,svg",
        )
        cmd.add_argument("--workers", type=int, default=None, help="worker threads for sweeps")
        cmd.add_argument("--cutoff", type=int, default=None, help="initial Fock cutoff n_max")
        cmd.add_argument(
            "--seedless",
            action="store_true",
            help="reserved; all computations are deterministic by construction",
        )
    return parser


COMMANDS = {
    "algebra-check": cmd_algebra_check,
    "ladder": cmd_ladder,
    "spectrum": cmd_spectrum,
    "g2": cmd_g2,
}


def main(argv=None) -> int:
    parser = build_parser()
    args = parser.parse_args(argv)
    try:
        formats = tuple(f.strip() for f in args.format.split(",") if f.strip())
        for fmt in formats:
            if fmt not in ACCEPTED_FORMATS:
                raise ConfigError(f"unknown output format {fmt!r}")
        config = resolve_config(args)
        out_dir = Path(args.out)
        run = _Run(args.subcommand, config, out_dir, formats)
        return COMMANDS[args.subcommand](config, run)
    except ConfigError as exc:
        print(f"config error: {exc}", file=sys.stderr)
        return 2
    except ValidationError as exc:
        print(f"invalid input: {exc}", file=sys.stderr)
        return 2
    except PhysicsValidityError as exc:
        print(f"physics validity failure: {exc}", file=sys.stderr)
        return 3
    except NumericalError as exc:
        print(f"numerical failure: {exc}", file=sys.stderr)
        return 4
    except OSError as exc:
        print(f"i/o error: {exc}", file=sys.stderr)
        return 2


def entry_point() -> None:
    sys.exit(main())


if __name__ == "__main__":
    entry_point()
