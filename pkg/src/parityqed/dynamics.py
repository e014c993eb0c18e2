"""Lindblad generator, steady states, and time propagation.

Density matrices are vectorized by column stacking: ``vec(rho)[i + d*j]
= rho[i, j]``, so ``vec(A @ rho @ B) = kron(B.T, A) @ vec(rho)``.  Every
superoperator in this package uses that convention; :func:`vec` and
:func:`unvec` are the only places it appears explicitly.

The master equation is

    d rho/dt = -i [H, rho] + (kappa(1+nbar)/2) L_a + (kappa nbar/2) L_adag
               + (gamma/2) L_sigma + (pump/2) L_sigmadag

with L_O(rho) = 2 O rho O^dag - O^dag O rho - rho O^dag O.  At nbar = 0
the cavity-bath terms reduce to plain photon loss at rate kappa.
"""

from __future__ import annotations

import math
import warnings
from dataclasses import dataclass

import numpy as np
import scipy.linalg
import scipy.sparse
from scipy.integrate import solve_ivp

from . import model
from .errors import (
    CutoffError,
    DegenerateSteadyStateError,
    NumericalError,
    PhysicsValidityError,
    ValidationError,
)

# Density-matrix quality requirements (see steady_state).
TRACE_TOL = 1e-12
PSD_TOL = -1e-10
RESIDUAL_REL_TOL = 1e-10


def vec(matrix: np.ndarray) -> np.ndarray:
    """Column-stack a matrix into a vector."""
    return np.asarray(matrix).reshape(-1, order="F")


def unvec(vector: np.ndarray) -> np.ndarray:
    """Inverse of :func:`vec` (square matrices only)."""
    vector = np.asarray(vector)
    d = math.isqrt(vector.size)
    if d * d != vector.size:
        raise ValidationError(f"cannot unvec a length-{vector.size} vector")
    return vector.reshape(d, d, order="F")


def lindblad_term(op: np.ndarray) -> np.ndarray:
    """Superoperator of rho -> 2 O rho O^dag - O^dag O rho - rho O^dag O."""
    op = np.asarray(op)
    if op.ndim != 2 or op.shape[0] != op.shape[1]:
        raise ValidationError(f"Lindblad operator must be square, got {op.shape}")
    d = op.shape[0]
    eye = np.eye(d)
    opdop = op.conj().T @ op
    return (
        2.0 * np.kron(op.conj(), op)
        - np.kron(eye, opdop)
        - np.kron(opdop.T, eye)
    )


def commutator_superoperator(h: np.ndarray) -> np.ndarray:
    """Superoperator of rho -> -i [H, rho]."""
    d = h.shape[0]
    eye = np.eye(d)
    return -1j * (np.kron(eye, h) - np.kron(h.T, eye))


def _generator(params: model.SystemParams, n_max: int) -> np.ndarray:
    h = model.hamiltonian(params, n_max)
    a = model.cavity_annihilation(n_max, params.lam)
    sigma = model.lift_qe(model.qe_lowering(), n_max)

    gen = commutator_superoperator(h)
    down = params.kappa * (1.0 + params.nbar)
    up = params.kappa * params.nbar
    if down > 0:
        gen += 0.5 * down * lindblad_term(a)
    if up > 0:
        gen += 0.5 * up * lindblad_term(a.conj().T)
    if params.gamma > 0:
        gen += 0.5 * params.gamma * lindblad_term(sigma)
    if params.pump > 0:
        gen += 0.5 * params.pump * lindblad_term(sigma.conj().T)
    return gen


def liouvillian(params: model.SystemParams, n_max: int) -> np.ndarray:
    """Zero-temperature Lindblad generator (requires params.nbar == 0)."""
    if params.nbar != 0:
        raise ValidationError(
            "liouvillian() is the nbar = 0 generator; use thermal_liouvillian()"
        )
    return _generator(params, n_max)


def thermal_liouvillian(params: model.SystemParams, n_max: int) -> np.ndarray:
    """Lindblad generator with a thermal cavity bath (any nbar >= 0).

    Photon loss and thermal excitation enter at rates kappa*(1+nbar) and
    kappa*nbar; at nbar = 0 the construction is identical to
    :func:`liouvillian`.
    """
    return _generator(params, n_max)


def bose_occupation(omega: float, temperature: float) -> float:
    """Bose-Einstein occupation 1/(exp(omega/T) - 1) with k_B = 1."""
    if omega <= 0 or temperature <= 0:
        raise ValidationError("bose_occupation needs omega > 0 and temperature > 0")
    return 1.0 / math.expm1(omega / temperature)


def top_fock_population(rho: np.ndarray, n_max: int) -> float:
    """Population of the highest retained photon level (both emitter states)."""
    idx = [
        model.basis_index(model.QE_GROUND, n_max, n_max),
        model.basis_index(model.QE_EXCITED, n_max, n_max),
    ]
    return float(np.real(rho[idx, idx].sum()))


def _count_stationary_modes(gen: np.ndarray) -> int:
    scale = max(1.0, float(np.linalg.norm(gen, np.inf)))
    eigenvalues = np.linalg.eigvals(gen)
    return int(np.sum(np.abs(eigenvalues) < 1e-10 * scale))


def steady_state(gen: np.ndarray, n_max: int | None = None) -> np.ndarray:
    """Stationary density matrix of a Lindblad generator.

    Solves the linear system obtained by replacing one row of the
    generator with the trace functional, then validates the result:
    residual below 1e-10 * ||gen||_inf, unit trace, Hermitian, and
    positive semidefinite to -1e-10.  A generator with more than one
    stationary direction raises :class:`DegenerateSteadyStateError`.
    """
    dim = gen.shape[0]
    d = math.isqrt(dim)
    if d * d != dim or gen.shape != (dim, dim):
        raise ValidationError(f"superoperator shape {gen.shape} is not (d^2, d^2)")

    system = np.array(gen, dtype=complex)
    system[0, :] = vec(np.eye(d))
    rhs = np.zeros(dim, dtype=complex)
    rhs[0] = 1.0

    lu, piv, rcond = _factor_with_condition(system)
    if rcond < 1e-13:
        raise _diagnose_singular(gen)
    x = scipy.linalg.lu_solve((lu, piv), rhs, check_finite=False)

    gen_norm = float(np.linalg.norm(gen, np.inf))
    residual = float(np.linalg.norm(gen @ x, np.inf))
    if residual > RESIDUAL_REL_TOL * gen_norm:
        raise _diagnose_singular(gen, residual=residual)

    rho = unvec(x)
    rho = 0.5 * (rho + rho.conj().T)

    trace_error = abs(rho.trace() - 1.0)
    if trace_error > TRACE_TOL:
        raise NumericalError(f"steady-state trace off by {trace_error:.3e}")
    eigenvalues = np.linalg.eigvalsh(rho)
    if eigenvalues[0] < PSD_TOL:
        details = f"most negative eigenvalue {eigenvalues[0]:.3e}"
        if n_max is not None:
            details += f"; top Fock level population {top_fock_population(rho, n_max):.3e}"
        raise PhysicsValidityError(f"steady state is not positive semidefinite: {details}")
    return rho


def _factor_with_condition(system: np.ndarray):
    """LU factorization plus a reciprocal condition estimate.

    Exactly singular systems are reported via rcond = 0 rather than an
    exception (or scipy's warning): callers decide how to diagnose.
    """
    with warnings.catch_warnings():
        warnings.simplefilter("ignore", scipy.linalg.LinAlgWarning)
        try:
            lu, piv = scipy.linalg.lu_factor(system, check_finite=False)
        except scipy.linalg.LinAlgError:
            return None, None, 0.0
    anorm = np.linalg.norm(system, 1)
    rcond, info = scipy.linalg.lapack.zgecon(lu, anorm, norm="1")
    if info != 0:
        return lu, piv, 0.0
    return lu, piv, float(rcond)


def _diagnose_singular(gen: np.ndarray, residual: float | None = None) -> Exception:
    stationary = _count_stationary_modes(gen)
    if stationary > 1:
        return DegenerateSteadyStateError(
            f"generator has {stationary} stationary directions; steady state is not unique"
        )
    detail = f"residual {residual:.3e}" if residual is not None else "singular system"
    return NumericalError(f"steady-state solve failed ({detail})")


@dataclass(frozen=True)
class LiouvillianModes:
    """Eigendecomposition of a Lindblad generator.

    `values` are the eigenvalues; columns of `vectors` the right
    eigenvectors; `rcond` the reciprocal condition estimate of the
    eigenvector matrix (small rcond means the modal expansion is
    unreliable).
    """

    values: np.ndarray
    vectors: np.ndarray
    _lu: tuple
    rcond: float

    def expand(self, v: np.ndarray) -> np.ndarray:
        """Coefficients of v in the eigenbasis."""
        return scipy.linalg.lu_solve(self._lu, v, check_finite=False)


def liouvillian_modes(gen: np.ndarray) -> LiouvillianModes:
    """Diagonalize a generator for modal propagation and spectra."""
    values, vectors = np.linalg.eig(gen)
    lu, piv, rcond = _factor_with_condition(vectors)
    if lu is None:
        raise NumericalError("eigenvector matrix of the generator is singular")
    return LiouvillianModes(values=values, vectors=vectors, _lu=(lu, piv), rcond=rcond)


@dataclass(frozen=True)
class PropagationResult:
    """Trajectory of e^{gen*tau} v on a tau grid, with method metadata."""

    tau: np.ndarray
    values: np.ndarray  # shape (len(tau), dim)
    method: str  # "eigen" or "integrator"
    rcond: float


def propagate(
    gen: np.ndarray,
    v0: np.ndarray,
    tau_grid: np.ndarray,
    cond_limit: float = 1e12,
    modes: LiouvillianModes | None = None,
) -> PropagationResult:
    """Evolve a vectorized operator under the generator.

    The primary path expands v0 in the eigenbasis of the generator and
    evaluates the trajectory in closed form.  If the eigenvector matrix
    is ill conditioned (1/rcond above `cond_limit`) the trajectory falls
    back to an adaptive stiff integrator, flagged in the result.
    Precomputed `modes` of the same generator may be passed to skip the
    diagonalization.
    """
    tau = np.asarray(tau_grid, dtype=float)
    if tau.ndim != 1 or tau.size == 0:
        raise ValidationError("tau_grid must be a non-empty 1-d array")
    if tau[0] != 0.0 or np.any(np.diff(tau) <= 0):
        raise ValidationError("tau_grid must be ascending and start at 0")
    v0 = np.asarray(v0, dtype=complex)

    if modes is None:
        modes = liouvillian_modes(gen)
    if modes.rcond > 0 and 1.0 / modes.rcond <= cond_limit:
        coeff = modes.expand(v0)
        reconstruction = float(
            np.linalg.norm(modes.vectors @ coeff - v0, np.inf)
        )
        if reconstruction <= 1e-8 * max(1.0, float(np.linalg.norm(v0, np.inf))):
            phases = np.exp(np.outer(tau, modes.values))
            values = (phases * coeff) @ modes.vectors.T
            values[0] = v0
            return PropagationResult(tau=tau, values=values, method="eigen", rcond=modes.rcond)

    warnings.warn(
        "eigenbasis ill-conditioned (rcond %.2e); using stiff integrator" % modes.rcond,
        RuntimeWarning,
        stacklevel=2,
    )
    values = _propagate_integrator(gen, v0, tau)
    return PropagationResult(tau=tau, values=values, method="integrator", rcond=modes.rcond)


def _propagate_integrator(gen: np.ndarray, v0: np.ndarray, tau: np.ndarray) -> np.ndarray:
    """Stiff-integrator path on the real-stacked system."""
    dim = gen.shape[0]
    gr, gi = gen.real, gen.imag
    jac = np.block([[gr, -gi], [gi, gr]])

    def rhs(_t, y):
        return jac @ y

    y0 = np.concatenate([v0.real, v0.imag])
    sol = solve_ivp(
        rhs,
        (tau[0], tau[-1]),
        y0,
        t_eval=tau,
        method="BDF",
        jac=lambda _t, _y: jac,
        rtol=1e-9,
        atol=1e-12,
    )
    if not sol.success:
        raise NumericalError(f"integrator fallback failed: {sol.message}")
    values = (sol.y[:dim, :] + 1j * sol.y[dim:, :]).T
    values[0] = v0
    return values


# Largest superoperator kept fully dense: [2*(n_max+1)]^2 <= 3600,
# i.e. n_max <= 29.  Beyond that, steady states are solved on the
# excitation-conserving subspace instead.
DENSE_SUPEROP_LIMIT = 3600


def _dense_cutoff_limit() -> int:
    return int(math.isqrt(DENSE_SUPEROP_LIMIT) // 2 - 1)


def _excitation_pairs(n_max: int):
    """Index data of the excitation-difference-zero subspace.

    The generator conserves the difference of total excitation number
    between the two sides of a density-matrix element, so the subspace
    of elements rho_ij with equal excitation on both sides (which
    contains every candidate steady state) is invariant.  Its dimension
    grows linearly with n_max instead of quadratically.
    """
    nf = n_max + 1
    d = 2 * nf
    excitation = np.concatenate([np.arange(nf), np.arange(nf) + 1])
    ii, jj = np.meshgrid(np.arange(d), np.arange(d), indexing="ij")
    mask = excitation[ii] == excitation[jj]
    flat = (ii + d * jj)[mask]
    return flat, ii[mask], jj[mask]


def _generator_sparse(params: model.SystemParams, n_max: int) -> scipy.sparse.csc_matrix:
    """Sparse build of the same generator as :func:`thermal_liouvillian`."""
    h = scipy.sparse.csr_matrix(model.hamiltonian(params, n_max))
    a = scipy.sparse.csr_matrix(model.cavity_annihilation(n_max, params.lam))
    sigma = scipy.sparse.csr_matrix(model.lift_qe(model.qe_lowering(), n_max))
    d = h.shape[0]
    eye = scipy.sparse.eye(d)

    def lind(op):
        opdop = (op.conj().T @ op).tocsr()
        return (
            2.0 * scipy.sparse.kron(op.conj(), op)
            - scipy.sparse.kron(eye, opdop)
            - scipy.sparse.kron(opdop.T, eye)
        )

    gen = -1j * (scipy.sparse.kron(eye, h) - scipy.sparse.kron(h.T, eye))
    down = params.kappa * (1.0 + params.nbar)
    up = params.kappa * params.nbar
    if down > 0:
        gen = gen + 0.5 * down * lind(a)
    if up > 0:
        gen = gen + 0.5 * up * lind(a.conj().T)
    if params.gamma > 0:
        gen = gen + 0.5 * params.gamma * lind(sigma)
    if params.pump > 0:
        gen = gen + 0.5 * params.pump * lind(sigma.conj().T)
    return gen.tocsc()


def steady_state_sectors(params: model.SystemParams, n_max: int) -> np.ndarray:
    """Steady state via the excitation-conserving subspace.

    Mathematically identical to :func:`steady_state` on
    :func:`thermal_liouvillian` (the restriction is to an invariant
    subspace containing all stationary states), but scales to cutoffs
    far beyond the dense superoperator limit.  Uniqueness is certified
    within the excitation-preserving sector; stationary coherences
    between different excitation manifolds (possible only at the exact
    lower critical deformation) are not probed by this path.
    """
    n_max = int(n_max)
    gen = _generator_sparse(params, n_max)
    flat, rows, cols = _excitation_pairs(n_max)
    restricted = np.asarray(gen[np.ix_(flat, flat)].todense())

    system = restricted.copy()
    system[0, :] = (rows == cols).astype(float)
    rhs = np.zeros(flat.size, dtype=complex)
    rhs[0] = 1.0

    lu, piv, rcond = _factor_with_condition(system)
    if rcond < 1e-13:
        raise _diagnose_singular(restricted)
    x = scipy.linalg.lu_solve((lu, piv), rhs, check_finite=False)

    scale = float(np.linalg.norm(restricted, np.inf))
    residual = float(np.linalg.norm(restricted @ x, np.inf))
    if residual > RESIDUAL_REL_TOL * scale:
        raise _diagnose_singular(restricted, residual=residual)

    d = 2 * (n_max + 1)
    rho = np.zeros((d, d), dtype=complex)
    rho[rows, cols] = x
    rho = 0.5 * (rho + rho.conj().T)
    # Cheap guard that the assembled state satisfies the full equation.
    full_residual = float(np.linalg.norm(gen @ rho.reshape(-1, order="F"), np.inf))
    if full_residual > RESIDUAL_REL_TOL * scale:
        raise NumericalError(
            f"sector steady state violates the full master equation ({full_residual:.3e})"
        )

    trace_error = abs(rho.trace() - 1.0)
    if trace_error > TRACE_TOL:
        raise NumericalError(f"steady-state trace off by {trace_error:.3e}")
    eigenvalues = np.linalg.eigvalsh(rho)
    if eigenvalues[0] < PSD_TOL:
        raise PhysicsValidityError(
            "steady state is not positive semidefinite: "
            f"most negative eigenvalue {eigenvalues[0]:.3e}; "
            f"top Fock level population {top_fock_population(rho, n_max):.3e}"
        )
    return rho


@dataclass(frozen=True)
class CutoffPolicy:
    """Rule for choosing and validating the Fock truncation.

    Starts at `initial`, accepts a cutoff once the steady-state
    population of the top retained photon level falls below `top_tol`,
    and otherwise retries with `step` more levels up to `maximum`.
    """

    initial: int = 15
    maximum: int = 29
    step: int = 3
    top_tol: float = 1e-8

    def __post_init__(self):
        if self.initial < 2 or self.maximum < self.initial or self.step < 1:
            raise ValidationError(f"inconsistent cutoff policy {self}")


@dataclass(frozen=True)
class SteadySolution:
    """Validated steady state together with the truncation that produced it.

    `generator` holds the dense Liouvillian when the dense path was
    used; it is None for cutoffs beyond the dense superoperator limit
    (steady state solved on the excitation-conserving subspace).
    """

    rho: np.ndarray
    n_max: int
    top_population: float
    generator: np.ndarray | None


def steady_state_with_cutoff(
    params: model.SystemParams,
    policy: CutoffPolicy = CutoffPolicy(),
) -> SteadySolution:
    """Solve for the steady state, growing the cutoff until it validates.

    Retries raise the cutoff by at least `policy.step` (growing
    geometrically once the steps are large) up to `policy.maximum`.
    """
    dense_limit = _dense_cutoff_limit()
    n_max = policy.initial
    while True:
        if n_max <= dense_limit:
            gen = _generator(params, n_max)
            rho = steady_state(gen, n_max=n_max)
        else:
            gen = None
            rho = steady_state_sectors(params, n_max)
        top = top_fock_population(rho, n_max)
        if top < policy.top_tol:
            return SteadySolution(rho=rho, n_max=n_max, top_population=top, generator=gen)
        if n_max >= policy.maximum:
            raise CutoffError(
                f"top-level population {top:.3e} still above {policy.top_tol:.1e} "
                f"at the maximum cutoff n_max = {policy.maximum}"
            )
        n_max = min(max(n_max + policy.step, (3 * n_max) // 2), policy.maximum)
