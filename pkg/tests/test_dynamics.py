import numpy as np
import pytest

from helpers import common_block, integrate_master_equation, standard_params
from parityqed import algebra, dynamics, model
from parityqed.errors import (
    CutoffError,
    DegenerateSteadyStateError,
    PhysicsValidityError,
    ValidationError,
)

RNG = np.random.default_rng(20260810)


def random_density(d):
    m = RNG.normal(size=(d, d)) + 1j * RNG.normal(size=(d, d))
    rho = m @ m.conj().T
    return rho / np.trace(rho)


def test_vec_round_trip():
    m = RNG.normal(size=(5, 5)) + 1j * RNG.normal(size=(5, 5))
    assert np.array_equal(dynamics.unvec(dynamics.vec(m)), m)
    with pytest.raises(ValidationError):
        dynamics.unvec(np.zeros(5))


def test_vectorization_convention():
    # column stacking: vec(A X B) = kron(B.T, A) vec(X)
    a = RNG.normal(size=(4, 4)) + 1j * RNG.normal(size=(4, 4))
    b = RNG.normal(size=(4, 4)) + 1j * RNG.normal(size=(4, 4))
    x = RNG.normal(size=(4, 4)) + 1j * RNG.normal(size=(4, 4))
    lhs = dynamics.vec(a @ x @ b)
    rhs = np.kron(b.T, a) @ dynamics.vec(x)
    np.testing.assert_allclose(lhs, rhs, atol=1e-12)


def test_lindblad_term_degenerate_cases():
    zero = dynamics.lindblad_term(np.zeros((3, 3)))
    assert np.count_nonzero(zero) == 0
    ident = dynamics.lindblad_term(np.eye(3))
    np.testing.assert_allclose(ident, 0.0, atol=1e-15)
    with pytest.raises(ValidationError):
        dynamics.lindblad_term(np.zeros((2, 3)))


def test_lindblad_term_hand_evaluated():
    # two-level Fock ladder: L_a(|1><1|) = 2|0><0| - 2|1><1|
    lowering = np.array([[0.0, 1.0], [0.0, 0.0]])
    term = dynamics.lindblad_term(lowering)
    rho = np.diag([0.0, 1.0]).astype(complex)
    out = dynamics.unvec(term @ dynamics.vec(rho))
    np.testing.assert_allclose(out, np.diag([2.0, -2.0]), atol=1e-15)


def test_liouvillian_preserves_trace():
    gen = dynamics.liouvillian(standard_params(lam=0.3), 5)
    trace_row = dynamics.vec(np.eye(12)) @ gen
    assert np.max(np.abs(trace_row)) <= 1e-12 * np.linalg.norm(gen, np.inf)


def test_liouvillian_requires_zero_nbar():
    with pytest.raises(ValidationError):
        dynamics.liouvillian(standard_params(nbar=0.5), 4)


def test_liouvillian_rate_linearity():
    # dissipators are linear in each rate
    def gen(kappa, gamma, pump):
        return dynamics.liouvillian(
            model.SystemParams(lam=0.2, kappa=kappa, gamma=gamma, pump=pump), 4
        )

    combined = gen(0.3, 0.05, 0.02)
    split = gen(0.1, 0.05, 0.02) + gen(0.2, 0.0, 0.0) - gen(0.0, 0.0, 0.0)
    np.testing.assert_allclose(combined, split, atol=1e-13)


def test_liouvillian_spectrum_in_left_half_plane():
    gen = dynamics.liouvillian(standard_params(lam=0.5), 4)
    eigs = np.linalg.eigvals(gen)
    assert np.max(eigs.real) <= 1e-10


def test_pure_decay_steady_state():
    gen = dynamics.liouvillian(model.SystemParams(g=0.0, kappa=0.1, gamma=0.05), 4)
    rho = dynamics.steady_state(gen, n_max=4)
    expected = np.zeros((10, 10))
    expected[0, 0] = 1.0
    np.testing.assert_allclose(rho, expected, atol=1e-13)


def test_thermal_liouvillian_matches_at_zero_nbar():
    p = standard_params(lam=0.4)
    assert np.array_equal(dynamics.liouvillian(p, 5), dynamics.thermal_liouvillian(p, 5))


def test_bose_occupation():
    assert dynamics.bose_occupation(np.log(2.0), 1.0) == pytest.approx(1.0, rel=1e-12)
    with pytest.raises(ValidationError):
        dynamics.bose_occupation(-1.0, 1.0)


def test_thermal_fixed_point_pure_cavity():
    # a damped cavity alone thermalizes to <N> = nbar (generic machinery
    # composed on the Fock-only space)
    nbar = 0.2
    kappa = 0.3
    n_max = 20
    a = algebra.annihilation(n_max, 0.0)
    gen = 0.5 * kappa * (1 + nbar) * dynamics.lindblad_term(a)
    gen += 0.5 * kappa * nbar * dynamics.lindblad_term(a.conj().T)
    rho = dynamics.steady_state(gen)
    mean_n = float(np.real(np.trace(algebra.number(n_max) @ rho)))
    assert mean_n == pytest.approx(nbar, rel=0.01)


def test_steady_state_paper_rates():
    p = standard_params()
    gen = dynamics.liouvillian(p, 15)
    rho = dynamics.steady_state(gen, n_max=15)
    assert np.linalg.norm(gen @ dynamics.vec(rho), np.inf) <= 1e-10 * np.linalg.norm(gen, np.inf)
    assert abs(np.trace(rho) - 1.0) <= 1e-12
    assert np.max(np.abs(rho - rho.conj().T)) <= 1e-12
    assert np.linalg.eigvalsh(rho)[0] >= -1e-10
    assert dynamics.top_fock_population(rho, 15) < 1e-8


def test_truncation_convergence():
    p = standard_params(lam=0.3)
    rho15 = dynamics.steady_state(dynamics.liouvillian(p, 15), n_max=15)
    rho20 = dynamics.steady_state(dynamics.liouvillian(p, 20), n_max=20)
    small, restricted = common_block(rho15, rho20, 15, 20)
    assert np.max(np.abs(small - restricted)) <= 1e-6


def test_degenerate_steady_state_detected():
    # no pump, no spontaneous emission, no coupling: the emitter sector
    # is untouched and the stationary state is not unique
    gen = dynamics.liouvillian(model.SystemParams(g=0.0, kappa=0.1), 3)
    with pytest.raises(DegenerateSteadyStateError):
        dynamics.steady_state(gen, n_max=3)


def test_lower_critical_deformation_disconnects():
    # at lam = -1/2 the |X,0> <-> |G,1> coupling and the 1 -> 0 loss
    # element vanish; two dynamically disconnected components remain
    gen = dynamics.liouvillian(standard_params(lam=-0.5), 6)
    with pytest.raises(DegenerateSteadyStateError):
        dynamics.steady_state(gen, n_max=6)


def test_propagate_fixed_point_and_trace():
    p = standard_params(lam=0.2)
    gen = dynamics.liouvillian(p, 4)
    rho = dynamics.steady_state(gen, n_max=4)
    tau = np.linspace(0.0, 50.0, 21)
    result = dynamics.propagate(gen, dynamics.vec(rho), tau)
    assert result.method == "eigen"
    assert np.array_equal(result.values[0], dynamics.vec(rho))
    assert np.max(np.abs(result.values - dynamics.vec(rho))) <= 1e-9

    rho0 = random_density(10)
    traj = dynamics.propagate(gen, dynamics.vec(rho0), tau)
    traces = traj.values @ dynamics.vec(np.eye(10))
    np.testing.assert_allclose(traces, 1.0, atol=1e-9)


def test_propagate_preserves_hermiticity():
    gen = dynamics.liouvillian(standard_params(lam=0.4), 4)
    rho0 = random_density(10)
    tau = np.linspace(0.0, 50.0, 26)
    traj = dynamics.propagate(gen, dynamics.vec(rho0), tau)
    for row in traj.values:
        mat = dynamics.unvec(row)
        assert np.max(np.abs(mat - mat.conj().T)) <= 1e-9


def test_propagate_integrator_fallback_agrees():
    gen = dynamics.liouvillian(standard_params(lam=0.1), 3)
    v0 = dynamics.vec(random_density(8))
    tau = np.linspace(0.0, 20.0, 11)
    eig_path = dynamics.propagate(gen, v0, tau)
    with pytest.warns(RuntimeWarning):
        forced = dynamics.propagate(gen, v0, tau, cond_limit=0.0)
    assert forced.method == "integrator"
    assert np.max(np.abs(forced.values - eig_path.values)) <= 1e-6


def test_propagate_grid_validation():
    gen = dynamics.liouvillian(standard_params(), 3)
    v0 = np.zeros(64)
    with pytest.raises(ValidationError):
        dynamics.propagate(gen, v0, np.array([0.5, 1.0]))
    with pytest.raises(ValidationError):
        dynamics.propagate(gen, v0, np.array([0.0, 0.0]))


def test_steady_state_matches_long_time_integration():
    p = standard_params(lam=0.3)
    gen = dynamics.liouvillian(p, 2)
    rho_solve = dynamics.steady_state(gen, n_max=2)
    rho_integrated = integrate_master_equation(p, 2, 1000.0)
    assert np.max(np.abs(rho_solve - rho_integrated)) <= 1e-7


def test_sector_solver_matches_dense():
    p = standard_params(lam=0.3, pump=0.4)
    dense = dynamics.steady_state(dynamics.liouvillian(p, 10), n_max=10)
    sector = dynamics.steady_state_sectors(p, 10)
    assert np.max(np.abs(dense - sector)) <= 1e-12


def test_steady_state_with_cutoff_paper_rates():
    solution = dynamics.steady_state_with_cutoff(standard_params(), dynamics.CutoffPolicy())
    assert solution.n_max == 15
    assert solution.top_population < 1e-8
    assert solution.generator is not None


def test_steady_state_with_cutoff_routes_to_sectors():
    policy = dynamics.CutoffPolicy(initial=15, maximum=192, step=3, top_tol=1e-8)
    solution = dynamics.steady_state_with_cutoff(standard_params(pump=5.0), policy)
    assert solution.n_max > 29
    assert solution.generator is None
    assert solution.top_population < 1e-8


def test_cutoff_error_when_exhausted():
    policy = dynamics.CutoffPolicy(initial=10, maximum=12, step=2, top_tol=1e-8)
    with pytest.raises(CutoffError):
        dynamics.steady_state_with_cutoff(standard_params(pump=5.0), policy)
    with pytest.raises(ValidationError):
        dynamics.CutoffPolicy(initial=10, maximum=5)


def test_spectral_gap_is_simple():
    gen = dynamics.liouvillian(standard_params(lam=0.2), 6)
    eigs = np.linalg.eigvals(gen)
    assert int(np.sum(np.abs(eigs.real) < 1e-10)) == 1
