"""Shared test fixtures and independent oracles.

The oracles here deliberately avoid the package's superoperator and
solver code paths: the master equation is integrated directly from its
operator form, and moments are accumulated by explicit summation, so
they can certify the production paths.
"""

import numpy as np
from scipy.integrate import solve_ivp

from parityqed import model

RATES = {"kappa": 0.083, "gamma": 0.017, "pump": 0.05}


def standard_params(**overrides) -> model.SystemParams:
    values = dict(RATES)
    values.update(overrides)
    return model.SystemParams(**values)


def integrate_master_equation(
    params: model.SystemParams,
    n_max: int,
    t_end: float,
    rho0: np.ndarray | None = None,
    rtol: float = 1e-11,
    atol: float = 1e-13,
) -> np.ndarray:
    """Evolve rho(t) from vacuum by direct integration of the operator form."""
    h = model.hamiltonian(params, n_max)
    a = model.cavity_annihilation(n_max, params.lam)
    sigma = model.lift_qe(model.qe_lowering(), n_max)
    channels = [
        (params.kappa * (1.0 + params.nbar), a),
        (params.kappa * params.nbar, a.conj().T),
        (params.gamma, sigma),
        (params.pump, sigma.conj().T),
    ]
    d = h.shape[0]
    if rho0 is None:
        rho0 = np.zeros((d, d), dtype=complex)
        rho0[0, 0] = 1.0

    def rhs(_t, y):
        rho = (y[: d * d] + 1j * y[d * d :]).reshape(d, d)
        drho = -1j * (h @ rho - rho @ h)
        for rate, op in channels:
            if rate == 0:
                continue
            opd = op.conj().T
            drho += 0.5 * rate * (2 * op @ rho @ opd - opd @ op @ rho - rho @ opd @ op)
        return np.concatenate([drho.real.ravel(), drho.imag.ravel()])

    y0 = np.concatenate([rho0.real.ravel(), rho0.imag.ravel()])
    sol = solve_ivp(rhs, (0.0, t_end), y0, method="LSODA", rtol=rtol, atol=atol)
    assert sol.success, sol.message
    return (sol.y[: d * d, -1] + 1j * sol.y[d * d :, -1]).reshape(d, d)


def g2_by_summation(rho: np.ndarray, lam: float, n_max: int) -> float:
    """Element-wise quadruple/second-moment summation over populations."""
    numerator = 0.0
    denominator = 0.0
    for qe in (0, 1):
        for n in range(n_max + 1):
            idx = qe * (n_max + 1) + n
            pop = rho[idx, idx].real
            w_n = n + 2.0 * lam * (n % 2)
            denominator += w_n * pop
            if n >= 2:
                w_m = (n - 1) + 2.0 * lam * ((n - 1) % 2)
                numerator += w_n * w_m * pop
    return numerator / denominator**2


def common_block(rho_small: np.ndarray, rho_big: np.ndarray, n_small: int, n_big: int):
    """Restrict a larger-cutoff state to the index set of a smaller one."""
    idx = [qe * (n_big + 1) + n for qe in (0, 1) for n in range(n_small + 1)]
    return rho_small, rho_big[np.ix_(idx, idx)]
