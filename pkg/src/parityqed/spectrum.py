"""Cavity emission spectrum and photon statistics from the steady state.

The two-time correlation <a^dag(tau) a(0)> is obtained by evolving
vec(a rho_ss) under the Liouvillian (quantum regression) and tracing
against a^dag.  The one-sided Fourier transform with the stationarity
identity C(-tau) = C(tau)* gives the emission spectrum

    S(omega) = 2 Re sum_k c_k / (i omega - ell_k)

summed over Liouvillian eigenvalues ell_k with modal residues c_k.  The
stationary mode carries no residue (no coherent drive, <a>_ss = 0) and
is excluded after checking exactly that.  A windowed discrete transform
of the sampled correlation provides an independent cross-check path.

Frequency axes are reported relative to the cavity frequency, in the
units of the input rates (i.e. units of g when g = 1).
"""

from __future__ import annotations

import csv
import json
import math
from dataclasses import dataclass, field
from functools import lru_cache

import numpy as np
import scipy.signal

from . import dynamics, model
from .errors import NumericalError, UndefinedStatisticsError, ValidationError

OMEGA_POINTS = 2001
OMEGA_SPAN = 3.0  # grid half-width in units of g
PEAK_REL_HEIGHT = 0.02

# Residues below this fraction of C(0) are treated as non-contributing
# when choosing the sampling window of the discrete-transform path.
RESIDUE_FLOOR = 1e-12


def default_omega_grid(params: model.SystemParams) -> np.ndarray:
    """2001 frequencies spanning +-3g around the cavity frequency."""
    span = OMEGA_SPAN * params.g
    return np.linspace(-span, span, OMEGA_POINTS)


@dataclass(frozen=True)
class SpectrumResult:
    """Emission spectrum on a frequency grid (relative to omega_c).

    `intensity` is in arbitrary units unless `normalization` says
    "peak" (then the maximum is 1).  `metadata` records the physical
    parameters, cutoff, and method that produced the data.
    """

    omega: np.ndarray
    intensity: np.ndarray
    method: str
    normalization: str
    metadata: dict = field(default_factory=dict)

    def peaks(self, rel_height: float = PEAK_REL_HEIGHT) -> np.ndarray:
        """Frequencies of local maxima above `rel_height` * max intensity."""
        return find_peaks(self.omega, self.intensity, rel_height)

    def write_csv(self, path) -> None:
        with open(path, "w", newline="") as fh:
            writer = csv.writer(fh)
            writer.writerow(["omega", "intensity"])
            for w, s in zip(self.omega, self.intensity):
                writer.writerow([repr(float(w)), repr(float(s))])

    def to_json_dict(self) -> dict:
        return {
            "omega": [float(w) for w in self.omega],
            "intensity": [float(s) for s in self.intensity],
            "method": self.method,
            "normalization": self.normalization,
            "metadata": self.metadata,
        }

    def write_json(self, path) -> None:
        with open(path, "w") as fh:
            json.dump(self.to_json_dict(), fh, indent=1, sort_keys=True)
            fh.write("\n")


def find_peaks(
    omega: np.ndarray, intensity: np.ndarray, rel_height: float = PEAK_REL_HEIGHT
) -> np.ndarray:
    """Local maxima above a fraction of the global maximum (no smoothing)."""
    if intensity.size < 3:
        return np.empty(0)
    floor = rel_height * float(np.max(intensity))
    idx, _ = scipy.signal.find_peaks(intensity, height=floor)
    return omega[idx]


def _resolve_cutoff(params, cutoff) -> dynamics.SteadySolution:
    """Steady state for an explicit cutoff or via a cutoff policy."""
    if isinstance(cutoff, dynamics.CutoffPolicy):
        return dynamics.steady_state_with_cutoff(params, cutoff)
    n_max = int(cutoff)
    if n_max <= dynamics._dense_cutoff_limit():
        gen = dynamics.thermal_liouvillian(params, n_max)
        rho = dynamics.steady_state(gen, n_max=n_max)
    else:
        gen = None
        rho = dynamics.steady_state_sectors(params, n_max)
    return dynamics.SteadySolution(
        rho=rho,
        n_max=n_max,
        top_population=dynamics.top_fock_population(rho, n_max),
        generator=gen,
    )


@lru_cache(maxsize=8)
def _modal_data(params: model.SystemParams, cutoff_key):
    """Steady state plus Liouvillian eigendata, cached per configuration.

    Returns (solution, modes, residues, c0) where residues are the modal
    weights of <a^dag(tau) a(0)> and c0 = <a^dag a>_ss.  `cutoff_key` is
    an int cutoff or a (hashable) CutoffPolicy.
    """
    solution = _resolve_cutoff(params, cutoff_key)
    if solution.generator is None:
        raise NumericalError(
            "spectrum requires the dense Liouvillian; cutoff too large for it"
        )
    a = model.cavity_annihilation(solution.n_max, params.lam)
    modes = dynamics.liouvillian_modes(solution.generator)
    v0 = dynamics.vec(a @ solution.rho)
    coeff = modes.expand(v0)
    # Tr[adag . unvec(V_k)] for every eigenvector column.
    trace_weights = dynamics.vec(a.conj()) @ modes.vectors
    residues = trace_weights * coeff
    c0 = complex(np.trace(a.conj().T @ a @ solution.rho))
    return solution, modes, residues, c0


def correlation(
    params: model.SystemParams,
    cutoff,
    tau_grid: np.ndarray,
) -> np.ndarray:
    """Steady-state two-time correlation <a^dag(tau) a(0)> on a tau grid."""
    solution, modes, _residues, _c0 = _modal_data(params, _cutoff_key(cutoff))
    a = model.cavity_annihilation(solution.n_max, params.lam)
    v0 = dynamics.vec(a @ solution.rho)
    result = dynamics.propagate(solution.generator, v0, tau_grid, modes=modes)
    return result.values @ dynamics.vec(a.conj())


def _contributing(values: np.ndarray, residues: np.ndarray, c0: float):
    keep = np.abs(residues) > RESIDUE_FLOOR * max(c0, 1e-300)
    return values[keep], residues[keep]


MAX_TRANSFORM_SAMPLES = 2_000_000


def _transform_grid(values: np.ndarray, residues: np.ndarray, c0: float, omega_max: float):
    """Sampling grid for the discrete-transform path: resolve every
    contributing mode and integrate until the correlation has decayed."""
    vals, _ = _contributing(values, residues, c0)
    decay = -np.max(vals.real) if vals.size else 0.0
    if decay <= 0:
        raise NumericalError("no decaying correlation modes; cannot transform")
    tau_max = -math.log(1e-9) / decay
    fastest = max(float(np.max(np.abs(vals.imag))), omega_max, 1.0)
    dtau = math.pi / (5.0 * fastest)
    count = int(math.ceil(tau_max / dtau)) + 1
    if count > MAX_TRANSFORM_SAMPLES:
        raise NumericalError(
            f"correlation decays too slowly for the discrete transform "
            f"({count} samples needed); use the eigen method"
        )
    return np.linspace(0.0, tau_max, count)


def _discrete_transform(tau: np.ndarray, corr: np.ndarray, omega: np.ndarray) -> np.ndarray:
    """One-sided windowed Fourier transform, 2*Re closure, trapezoid weights."""
    weights = np.full(tau.size, tau[1] - tau[0])
    weights[0] *= 0.5
    weights[-1] *= 0.5
    # Cosine taper over the final tenth suppresses the truncation edge;
    # the correlation has already decayed to ~1e-9 there.
    taper_len = max(2, tau.size // 10)
    ramp = 0.5 * (1.0 + np.cos(np.linspace(0.0, math.pi, taper_len)))
    window = np.ones(tau.size)
    window[-taper_len:] = ramp
    samples = corr * weights * window

    spectrum = np.empty(omega.size)
    chunk = 128
    for start in range(0, omega.size, chunk):
        w = omega[start : start + chunk]
        phases = np.exp(-1j * np.outer(w, tau))
        spectrum[start : start + chunk] = 2.0 * np.real(phases @ samples)
    return spectrum


def emission_spectrum(
    params: model.SystemParams,
    cutoff,
    omega_grid: np.ndarray | None = None,
    method: str = "eigen",
    normalize: bool = False,
) -> SpectrumResult:
    """Cavity emission spectrum on a frequency grid relative to omega_c.

    `method` selects the closed-form eigenmode sum ("eigen") or the
    windowed discrete transform of the sampled correlation
    ("transform"); the latter exists as a cross-validation path.
    """
    if method not in ("eigen", "transform"):
        raise ValidationError(f"unknown spectrum method {method!r}")
    omega_rel = default_omega_grid(params) if omega_grid is None else np.asarray(omega_grid, float)
    if omega_rel.ndim != 1 or omega_rel.size < 3 or np.any(np.diff(omega_rel) <= 0):
        raise ValidationError("omega grid must be ascending with at least 3 points")

    solution, modes, residues, c0 = _modal_data(params, _cutoff_key(cutoff))
    if abs(c0) < 1e-14:
        raise UndefinedStatisticsError(
            "steady-state photon number is zero; the emission spectrum vanishes"
        )
    omega_abs = omega_rel + params.omega_c

    if method == "eigen":
        stationary = np.abs(modes.values.real) < 1e-10
        bad = np.abs(residues[stationary])
        if bad.size and np.max(bad) > 1e-10 * abs(c0):
            raise NumericalError(
                "stationary mode carries a finite residue; <a>_ss != 0?"
            )
        values = modes.values[~stationary]
        res = residues[~stationary]
        denom = 1j * omega_abs[:, None] - values[None, :]
        intensity = 2.0 * np.real((res[None, :] / denom).sum(axis=1))
    else:
        tau = _transform_grid(modes.values, residues, abs(c0), float(np.max(np.abs(omega_abs))))
        corr = correlation(params, _cutoff_key(cutoff), tau)
        intensity = _discrete_transform(tau, corr, omega_abs)

    floor = -1e-9 * float(np.max(intensity))
    if np.min(intensity) < floor:
        raise NumericalError(
            f"spectrum has negative intensity {np.min(intensity):.3e} beyond ringing tolerance"
        )
    normalization = "arbitrary"
    if normalize:
        intensity = intensity / np.max(intensity)
        normalization = "peak"
    meta = {
        "params": _params_dict(params),
        "n_max": solution.n_max,
        "top_population": solution.top_population,
        "method": method,
    }
    return SpectrumResult(
        omega=omega_rel,
        intensity=intensity,
        method=method,
        normalization=normalization,
        metadata=meta,
    )


def _cutoff_key(cutoff):
    """Normalize the cutoff argument so the modal cache can key on it."""
    if isinstance(cutoff, dynamics.CutoffPolicy):
        return cutoff
    return int(cutoff)


def _params_dict(params: model.SystemParams) -> dict:
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


def g2_zero(params: model.SystemParams, cutoff) -> float:
    """Zero-delay second-order correlation of the deformed cavity mode.

    g2(0) = <adag adag a a>_ss / <adag a>_ss^2, with both moments taken
    in the deformed operators that generate the dynamics.
    """
    solution = _resolve_cutoff(params, cutoff)
    return g2_from_state(solution.rho, params.lam, solution.n_max)


def g2_from_state(rho: np.ndarray, lam: float, n_max: int) -> float:
    """Deformed-moment g2(0) evaluated on a given density matrix."""
    a = model.cavity_annihilation(n_max, lam)
    ad = a.conj().T
    denom = float(np.real(np.trace(ad @ a @ rho)))
    if denom < 1e-14:
        raise UndefinedStatisticsError(
            f"mean deformed photon number {denom:.3e} too small for g2(0)"
        )
    numer = float(np.real(np.trace(ad @ ad @ a @ a @ rho)))
    return numer / denom**2


def photon_number_g2(params: model.SystemParams, cutoff) -> float:
    """Zero-delay correlation of the bare photon number, <N(N-1)>/<N>^2.

    Coincides with :func:`g2_zero` at lam = 0; at finite deformation it
    weighs Fock levels by occupation number rather than by the deformed
    ladder elements, and is reported alongside g2 in the pump scans as a
    diagnostic.
    """
    solution = _resolve_cutoff(params, cutoff)
    return photon_number_g2_from_state(solution.rho, solution.n_max)


def photon_number_g2_from_state(rho: np.ndarray, n_max: int) -> float:
    """Bare-number g2(0) evaluated on a given density matrix."""
    nf = n_max + 1
    n = np.arange(nf, dtype=float)
    pops = np.real(np.diag(rho)[:nf] + np.diag(rho)[nf:])
    mean = float((n * pops).sum())
    if mean < 1e-14:
        raise UndefinedStatisticsError(
            f"mean photon number {mean:.3e} too small for g2(0)"
        )
    second = float((n * (n - 1.0) * pops).sum())
    return second / mean**2
