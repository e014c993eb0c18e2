"""Deformed Jaynes-Cummings model on the composite emitter-cavity space.

Composite basis ordering is emitter-major, Fock-minor: the state
|alpha, n> sits at index ``alpha*(n_max+1) + n`` with alpha = 0 for the
ground state |G> and alpha = 1 for the excited state |X>.  All composite
operators in this package use that bijection.

Total excitation number (photons plus emitter inversion) is conserved,
so the Hamiltonian splits into 2x2 blocks spanned by {|G,n>, |X,n-1>}
("rung n") above the lone ground rung |G,0>.  The analytic functions
below work directly with those blocks and never require truncation.
"""

from __future__ import annotations

import math
from dataclasses import dataclass, replace

import numpy as np

from . import algebra
from .errors import ValidationError

QE_GROUND = 0
QE_EXCITED = 1

EVEN = "even"
ODD = "odd"


@dataclass(frozen=True)
class SystemParams:
    """Physical constants of the pumped-dissipative emitter-cavity system.

    All quantities are rates/frequencies in units of the coupling g when
    g is normalized to 1.  `omega_c` defaults to 0, i.e. the frame
    rotating at the cavity frequency; transition energies are reported
    relative to `omega_c` either way.

    Attributes
    ----------
    omega_c : cavity mode frequency.
    delta : emitter-cavity detuning (emitter frequency minus omega_c).
    g : light-matter coupling constant (g = 0 is admitted for decoupled
        limits; the ladder functions are meaningful for g > 0).
    lam : parity deformation parameter, >= -1/2.
    kappa : cavity photon loss rate.
    gamma : emitter spontaneous emission rate.
    pump : incoherent emitter pump rate.
    nbar : thermal occupation of the cavity bath (0 recovers the
        zero-temperature master equation).
    """

    omega_c: float = 0.0
    delta: float = 0.0
    g: float = 1.0
    lam: float = 0.0
    kappa: float = 0.0
    gamma: float = 0.0
    pump: float = 0.0
    nbar: float = 0.0

    def __post_init__(self):
        if not self.g >= 0:
            raise ValidationError(f"coupling g must be >= 0, got {self.g!r}")
        algebra.check_deformation(self.lam)
        for name in ("kappa", "gamma", "pump", "nbar"):
            value = getattr(self, name)
            if value < 0 or not np.isfinite(value):
                raise ValidationError(f"rate {name} must be >= 0, got {value!r}")
        for name in ("omega_c", "delta"):
            if not np.isfinite(getattr(self, name)):
                raise ValidationError(f"{name} must be finite")

    @property
    def omega_x(self) -> float:
        """Emitter transition frequency omega_c + delta."""
        return self.omega_c + self.delta

    def with_(self, **changes) -> "SystemParams":
        """Copy with some fields replaced (convenience for sweeps)."""
        return replace(self, **changes)


def hilbert_dim(n_max: int) -> int:
    """Dimension of the composite space: 2*(n_max+1)."""
    return 2 * (algebra.check_cutoff(n_max) + 1)


def basis_index(qe: int, photons: int, n_max: int) -> int:
    """Composite index of the bare state |qe, photons>."""
    if qe not in (QE_GROUND, QE_EXCITED):
        raise ValidationError(f"emitter index must be 0 (G) or 1 (X), got {qe}")
    if not 0 <= photons <= n_max:
        raise ValidationError(f"photon number {photons} outside 0..{n_max}")
    return qe * (n_max + 1) + photons


def qe_lowering() -> np.ndarray:
    """Emitter lowering operator |G><X| in the (G, X) basis."""
    sigma = np.zeros((2, 2))
    sigma[QE_GROUND, QE_EXCITED] = 1.0
    return sigma


def qe_sigma_z() -> np.ndarray:
    """Emitter inversion |X><X| - |G><G|."""
    return np.diag([-1.0, 1.0])


def lift_cavity(op: np.ndarray) -> np.ndarray:
    """Embed a Fock-space operator into the composite space."""
    return np.kron(np.eye(2), op)


def lift_qe(op: np.ndarray, n_max: int) -> np.ndarray:
    """Embed a 2x2 emitter operator into the composite space."""
    return np.kron(op, np.eye(algebra.check_cutoff(n_max) + 1))


def cavity_annihilation(n_max: int, lam: float) -> np.ndarray:
    """Deformed cavity lowering operator on the composite space."""
    return lift_cavity(algebra.annihilation(n_max, lam))


def hamiltonian(params: SystemParams, n_max: int) -> np.ndarray:
    """Rotating-wave Hamiltonian with the deformed cavity mode.

    H = (omega_c/2) {a, a^dag} + (omega_x/2) sigma_z
        + g (a^dag sigma + a sigma^dag)

    The anticommutator evaluates to omega_c*(n + lam + 1/2) on every
    photon level below the cutoff; on level n_max it is truncated, which
    is harmless for omega_c = 0 (the default frame) and for validated
    states whose top-level population is negligible.
    """
    a_f = algebra.annihilation(n_max, params.lam)
    adag_f = a_f.conj().T
    a = lift_cavity(a_f)
    adag = lift_cavity(adag_f)
    anticomm = lift_cavity(a_f @ adag_f + adag_f @ a_f)
    sigma = lift_qe(qe_lowering(), n_max)
    sz = lift_qe(qe_sigma_z(), n_max)
    h = (
        0.5 * params.omega_c * anticomm
        + 0.5 * params.omega_x * sz
        + params.g * (adag @ sigma + a @ sigma.conj().T)
    )
    return h


def _check_rung(n: int, minimum: int = 1) -> int:
    if int(n) != n or n < minimum:
        raise ValidationError(f"rung index must be an integer >= {minimum}, got {n!r}")
    return int(n)


def generalized_rabi(n: int, params: SystemParams) -> float:
    """Rung-n level splitting sqrt(4 g^2 (n + 2*lam*xi_n) + delta^2)."""
    n = _check_rung(n)
    radicand = n + 2.0 * params.lam * algebra.xi(n)
    return math.sqrt(4.0 * params.g**2 * radicand + params.delta**2)


def block_hamiltonian(n: int, params: SystemParams) -> np.ndarray:
    """2x2 Hamiltonian block of rung n in the {|G,n>, |X,n-1>} basis."""
    n = _check_rung(n)
    diag = (n + params.lam) * params.omega_c
    coupling = params.g * math.sqrt(n + 2.0 * params.lam * algebra.xi(n))
    return np.array(
        [
            [diag - 0.5 * params.delta, coupling],
            [coupling, diag + 0.5 * params.delta],
        ]
    )


def dressed_energies(n: int, params: SystemParams) -> tuple[float, float]:
    """Energies of the rung-n dressed doublet, returned as (lower, upper)."""
    n = _check_rung(n)
    center = (n + params.lam) * params.omega_c
    half_split = 0.5 * generalized_rabi(n, params)
    return center - half_split, center + half_split


def ground_energy(params: SystemParams) -> float:
    """Energy of the null-excitation state |G,0>: lam*omega_c - delta/2."""
    return params.lam * params.omega_c - 0.5 * params.delta


def inner_doublet(n: int, params: SystemParams) -> tuple[float, float]:
    """Same-branch transition frequencies from rung n to rung n-1.

    For n >= 2 these sit at omega_c -/+ (Rabi_n - Rabi_{n-1})/2; the
    first rung decays to |G,0> at omega_c + delta/2 -/+ Rabi_1/2.
    Returned sorted ascending.
    """
    n = _check_rung(n)
    if n == 1:
        center = params.omega_c + 0.5 * params.delta
        half = 0.5 * generalized_rabi(1, params)
    else:
        center = params.omega_c
        half = 0.5 * (generalized_rabi(n, params) - generalized_rabi(n - 1, params))
    low, high = center - half, center + half
    return (low, high) if low <= high else (high, low)


def outer_doublet(n: int, params: SystemParams) -> tuple[float, float]:
    """Cross-branch transition frequencies from rung n to rung n-1 (n >= 2)."""
    n = _check_rung(n, minimum=2)
    half = 0.5 * (generalized_rabi(n, params) + generalized_rabi(n - 1, params))
    return params.omega_c - half, params.omega_c + half


def transition_parity(n: int) -> str:
    """Parity label of the one-photon transition out of rung n."""
    n = _check_rung(n)
    return EVEN if n % 2 == 0 else ODD
