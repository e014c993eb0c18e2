"""Parameter sweeps behind the shipped figure presets.

The ladder scans (doublet positions versus deformation or detuning) use
the closed-form transition energies and need no truncation; the pump
scan solves one steady state per grid point under a cutoff policy and
embeds the resolved cutoff and top-level population in every record, so
an unconverged point fails the whole scan rather than being emitted.

Every scan is deterministic: identical inputs produce byte-identical
CSV files.
"""

from __future__ import annotations

import csv
import warnings
from concurrent.futures import ThreadPoolExecutor
from dataclasses import dataclass, field

import numpy as np

from . import dynamics, model, spectrum
from .errors import UndefinedStatisticsError, ValidationError

#: Stand-in for the lower critical deformation in dissipative scans.
#: At exactly lam = -1/2 the |X,0> <-> |G,1> coupling and the 1 -> 0
#: photon-loss element both vanish, the state space splits into two
#: disconnected components, and the steady state is degenerate (the
#: solver raises).  The steady state just above the critical point is
#: unique and converges as lam -> -1/2+, so scans probe the critical
#: physics at this value.
NEAR_CRITICAL_LAM = -0.5 + 1e-4

#: Rates shared by all shipped spectral/statistics presets (units of g).
PRESET_RATES = {"kappa": 0.083, "gamma": 0.017, "pump": 0.05}

G2_LAMBDAS = (0.0, 0.5, NEAR_CRITICAL_LAM, 0.9)


def default_lambda_grid() -> np.ndarray:
    return np.linspace(-0.5, 1.0, 301)


def default_delta_grid(g: float = 1.0) -> np.ndarray:
    return np.linspace(-4.0, 4.0, 401) * g


def default_pump_grid(g: float = 1.0) -> np.ndarray:
    return np.logspace(-3.0, 1.0, 60) * g


def default_g2_policy() -> dynamics.CutoffPolicy:
    # The high-pump end of the default grid drives the cavity into a
    # large lasing field (<n> ~ 50); the sector path validates there.
    return dynamics.CutoffPolicy(initial=15, maximum=192, step=3, top_tol=1e-8)


@dataclass(frozen=True)
class ScanResult:
    """Tabular scan output with a documented column schema."""

    name: str
    axis_name: str
    columns: tuple[str, ...]
    rows: tuple[tuple, ...]
    metadata: dict = field(default_factory=dict)

    def column(self, name: str) -> np.ndarray:
        idx = self.columns.index(name)
        return np.array([row[idx] for row in self.rows])

    def write_csv(self, path) -> None:
        with open(path, "w", newline="") as fh:
            writer = csv.writer(fh)
            writer.writerow(self.columns)
            for row in self.rows:
                writer.writerow([_format_cell(cell) for cell in row])


def _format_cell(cell) -> str:
    if isinstance(cell, float):
        return repr(cell)  # shortest round-trip representation
    return str(cell)


def _params_meta(params: model.SystemParams) -> dict:
    return {
        "omega_c": params.omega_c,
        "delta": params.delta,
        "g": params.g,
        "lam": params.lam,
        "kappa": params.kappa,
        "gamma": params.gamma,
        "pump": params.pump,
        "nbar": params.nbar,
    }


def doublets_vs_lambda(
    lambda_grid: np.ndarray | None = None,
    params: model.SystemParams = model.SystemParams(),
    n_rungs: int = 19,
) -> ScanResult:
    """Inner-doublet positions versus the deformation parameter.

    Emits, per (lambda, rung), both branch frequencies relative to the
    cavity frequency in units of g, with the transition parity label.
    Uses the closed-form ladder; no truncation is involved.
    """
    grid = default_lambda_grid() if lambda_grid is None else np.asarray(lambda_grid, float)
    if grid.ndim != 1 or grid.size == 0:
        raise ValidationError("lambda grid must be a non-empty 1-d array")
    if n_rungs < 1:
        raise ValidationError("n_rungs must be >= 1")
    rows = []
    for lam in grid:
        p = params.with_(lam=float(lam))
        for n in range(1, n_rungs + 1):
            low, high = model.inner_doublet(n, p)
            rows.append(
                (
                    float(lam),
                    n,
                    model.transition_parity(n),
                    (low - p.omega_c) / p.g,
                    (high - p.omega_c) / p.g,
                )
            )
    return ScanResult(
        name="doublets_vs_lambda",
        axis_name="lambda",
        columns=("lambda", "rung", "parity", "omega_low", "omega_high"),
        rows=tuple(rows),
        metadata={
            "params": _params_meta(params),
            "grid_points": int(grid.size),
            "n_rungs": int(n_rungs),
            "method": "closed-form",
            "cutoff": None,
        },
    )


def doublets_vs_detuning(
    delta_grid: np.ndarray | None = None,
    params: model.SystemParams = model.SystemParams(),
    n_rungs: int = 3,
) -> ScanResult:
    """Inner-doublet branch positions versus detuning at fixed lam."""
    grid = default_delta_grid(params.g) if delta_grid is None else np.asarray(delta_grid, float)
    if grid.ndim != 1 or grid.size == 0:
        raise ValidationError("delta grid must be a non-empty 1-d array")
    if n_rungs < 1:
        raise ValidationError("n_rungs must be >= 1")
    rows = []
    for delta in grid:
        p = params.with_(delta=float(delta))
        for n in range(1, n_rungs + 1):
            low, high = model.inner_doublet(n, p)
            rows.append(
                (
                    float(delta) / p.g,
                    n,
                    model.transition_parity(n),
                    (low - p.omega_c) / p.g,
                    (high - p.omega_c) / p.g,
                )
            )
    return ScanResult(
        name="doublets_vs_detuning",
        axis_name="delta",
        columns=("delta", "rung", "parity", "omega_low", "omega_high"),
        rows=tuple(rows),
        metadata={
            "params": _params_meta(params),
            "grid_points": int(grid.size),
            "n_rungs": int(n_rungs),
            "method": "closed-form",
            "cutoff": None,
        },
    )


def spectra_suite(
    configs: list[tuple[float, float]],
    params: model.SystemParams | None = None,
    cutoff=None,
    omega_grid: np.ndarray | None = None,
    method: str = "eigen",
    workers: int = 1,
) -> list[spectrum.SpectrumResult]:
    """Emission spectra for a list of (lam, delta) configurations.

    `params` supplies the shared rates (defaults to the preset rates);
    results are returned in the order of `configs`.
    """
    if not configs:
        raise ValidationError("spectra_suite needs at least one (lam, delta) pair")
    base = params if params is not None else model.SystemParams(**PRESET_RATES)
    cutoff = dynamics.CutoffPolicy() if cutoff is None else cutoff

    def compute(pair):
        lam, delta = pair
        p = base.with_(lam=float(lam), delta=float(delta))
        return spectrum.emission_spectrum(p, cutoff, omega_grid=omega_grid, method=method)

    return _ordered_map(compute, list(configs), workers)


def g2_vs_pump(
    pump_grid: np.ndarray | None = None,
    lambdas: tuple[float, ...] = G2_LAMBDAS,
    params: model.SystemParams | None = None,
    cutoff: dynamics.CutoffPolicy | None = None,
    workers: int = 1,
) -> ScanResult:
    """Zero-delay photon correlation versus pump for several deformations.

    Columns: lambda, pump, g2 (deformed-moment definition), g2_number
    (bare photon-number moments, a diagnostic), n_max and top-level
    population of the validated steady state.  An empty-cavity point
    (e.g. pump = 0) is emitted as NaN with a warning rather than
    failing the scan.
    """
    grid = default_pump_grid() if pump_grid is None else np.asarray(pump_grid, float)
    if grid.ndim != 1 or grid.size == 0:
        raise ValidationError("pump grid must be a non-empty 1-d array")
    base = params if params is not None else model.SystemParams(**PRESET_RATES)
    policy = default_g2_policy() if cutoff is None else cutoff

    points = [(lam, pump) for lam in lambdas for pump in grid]

    def compute(point):
        lam, pump = point
        p = base.with_(lam=float(lam), pump=float(pump))
        solution = dynamics.steady_state_with_cutoff(p, policy)
        try:
            g2 = spectrum.g2_from_state(solution.rho, p.lam, solution.n_max)
            g2_number = spectrum.photon_number_g2_from_state(solution.rho, solution.n_max)
        except UndefinedStatisticsError as exc:
            warnings.warn(f"g2 undefined at lam={lam}, pump={pump}: {exc}", stacklevel=2)
            g2 = float("nan")
            g2_number = float("nan")
        return (
            float(lam),
            float(pump),
            g2,
            g2_number,
            solution.n_max,
            solution.top_population,
        )

    rows = _ordered_map(compute, points, workers)
    return ScanResult(
        name="g2_vs_pump",
        axis_name="pump",
        columns=("lambda", "pump", "g2", "g2_number", "n_max", "top_population"),
        rows=tuple(rows),
        metadata={
            "params": _params_meta(base),
            "grid_points": int(grid.size),
            "lambdas": [float(x) for x in lambdas],
            "cutoff_policy": {
                "initial": policy.initial,
                "maximum": policy.maximum,
                "step": policy.step,
                "top_tol": policy.top_tol,
            },
        },
    )


def _ordered_map(fn, items, workers: int):
    """Map preserving input order; optional bounded thread pool."""
    if workers <= 1:
        return [fn(item) for item in items]
    with ThreadPoolExecutor(max_workers=workers) as pool:
        return list(pool.map(fn, items))
