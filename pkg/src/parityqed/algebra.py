"""Parity-deformed oscillator operators on a truncated Fock space.

The cavity mode is a deformed boson whose ladder operators close the
relation [a, a^dag] = 1 + 2*lam*R, with R the Fock-parity operator and
lam a real deformation parameter bounded below by -1/2 (smaller values
would make ladder matrix elements imaginary).  All operators are dense
real matrices on the levels |0>, ..., |n_max>.

Truncation caveat: the commutator identity cannot close on the highest
retained level (the a^dag matrix element out of |n_max> is dropped), so
it is verified on levels 0..n_max-1 only.  Every other identity holds on
the full truncated space.
"""

from __future__ import annotations

from dataclasses import dataclass

import numpy as np

from .errors import ValidationError

MIN_DEFORMATION = -0.5


def check_cutoff(n_max: int) -> int:
    """Validate a Fock cutoff (matrices span levels 0..n_max)."""
    if int(n_max) != n_max or n_max < 2:
        raise ValidationError(f"n_max must be an integer >= 2, got {n_max!r}")
    return int(n_max)


def check_deformation(lam: float) -> float:
    """Validate a deformation parameter against the lam >= -1/2 bound."""
    lam = float(lam)
    if not np.isfinite(lam) or lam < MIN_DEFORMATION:
        raise ValidationError(
            f"deformation parameter must satisfy lam >= -1/2, got {lam!r}"
        )
    return lam


def xi(n: int) -> int:
    """1 for odd n, 0 for even n (the parity weight in the ladder elements)."""
    if n < 0:
        raise ValidationError(f"Fock index must be non-negative, got {n}")
    return int(n) % 2


def annihilation(n_max: int, lam: float = 0.0) -> np.ndarray:
    """Deformed lowering operator: a|n> = sqrt(n + 2*lam*xi(n)) |n-1>.

    At lam = 0 this is the textbook boson operator; at lam = -1/2 the
    |1> -> |0> element vanishes and the two lowest levels decouple.
    """
    n_max = check_cutoff(n_max)
    lam = check_deformation(lam)
    n = np.arange(1, n_max + 1)
    elements = np.sqrt(n + 2.0 * lam * (n % 2))
    return np.diag(elements, 1)


def creation(n_max: int, lam: float = 0.0) -> np.ndarray:
    """Deformed raising operator, the adjoint of :func:`annihilation`.

    The matrix element lifting |n_max> out of the retained space is
    dropped by the truncation.
    """
    return annihilation(n_max, lam).conj().T


def parity(n_max: int) -> np.ndarray:
    """Fock-parity operator R = diag(+1, -1, +1, ...); R^2 = identity."""
    n_max = check_cutoff(n_max)
    return np.diag((-1.0) ** np.arange(n_max + 1))


def number(n_max: int) -> np.ndarray:
    """Number operator N = diag(0, 1, ..., n_max)."""
    n_max = check_cutoff(n_max)
    return np.diag(np.arange(n_max + 1, dtype=float))


@dataclass(frozen=True)
class IdentityCheck:
    """Residual of one operator identity on its applicable levels."""

    name: str
    residual: float
    tolerance: float
    passed: bool
    worst_level: int
    note: str = ""


@dataclass(frozen=True)
class AlgebraReport:
    """Outcome of :func:`verify_algebra` for one (n_max, lam) pair."""

    n_max: int
    lam: float
    tolerance: float
    checks: tuple[IdentityCheck, ...]

    @property
    def all_passed(self) -> bool:
        return all(c.passed for c in self.checks)

    def failures(self) -> tuple[IdentityCheck, ...]:
        return tuple(c for c in self.checks if not c.passed)


def _max_residual(delta: np.ndarray) -> tuple[float, int]:
    """Max-norm of a residual matrix and the Fock level (row) where it peaks."""
    flat = np.argmax(np.abs(delta))
    row = int(flat // delta.shape[1])
    return float(np.max(np.abs(delta))), row


def verify_algebra(n_max: int, lam: float, tol: float = 1e-12) -> AlgebraReport:
    """Evaluate the five defining identities of the deformed algebra.

    Checked, in max norm:

    * ``{R, a} = 0`` and ``{R, a^dag} = 0`` on the full truncated space,
    * ``[a, a^dag] = 1 + 2*lam*R`` on levels 0..n_max-1 (the identity is
      a truncation artifact on the top level, by construction),
    * ``a^dag a = N + lam*(1 - R)`` on all levels,
    * ``[N, a] = -a`` on all levels.
    """
    n_max = check_cutoff(n_max)
    lam = check_deformation(lam)

    a = annihilation(n_max, lam)
    adag = creation(n_max, lam)
    rpar = parity(n_max)
    num = number(n_max)
    eye = np.eye(n_max + 1)

    checks = []

    def record(name: str, delta: np.ndarray, note: str = "") -> None:
        residual, level = _max_residual(delta)
        checks.append(
            IdentityCheck(name, residual, tol, residual <= tol, level, note)
        )

    record("{R,a} = 0", rpar @ a + a @ rpar)
    record("{R,adag} = 0", rpar @ adag + adag @ rpar)
    commutator = a @ adag - adag @ a - eye - 2.0 * lam * rpar
    record(
        "[a,adag] = 1 + 2*lam*R",
        commutator[:n_max, :n_max],
        note=f"levels 0..{n_max - 1}; closure at level {n_max} is a truncation artifact",
    )
    record("adag a = N + lam*(1 - R)", adag @ a - num - lam * (eye - rpar))
    record("[N,a] = -a", num @ a - a @ num + a)

    return AlgebraReport(n_max=n_max, lam=lam, tolerance=tol, checks=tuple(checks))
