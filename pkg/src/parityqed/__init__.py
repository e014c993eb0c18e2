"""Simulator for a pumped-dissipative emitter-cavity system whose cavity
mode obeys a parity-deformed oscillator algebra.

The package covers the deformed operator algebra and its identities
(:mod:`parityqed.algebra`), the deformed Jaynes-Cummings ladder
(:mod:`parityqed.model`), Lindblad dynamics and steady states
(:mod:`parityqed.dynamics`), emission spectra and photon statistics
(:mod:`parityqed.spectrum`), figure-style parameter sweeps
(:mod:`parityqed.scans`), and a CLI (:mod:`parityqed.cli`).
"""

__version__ = "0.1.0"

from .algebra import annihilation, creation, number, parity, verify_algebra, xi
from .dynamics import (
    CutoffPolicy,
    bose_occupation,
    lindblad_term,
    liouvillian,
    propagate,
    steady_state,
    steady_state_sectors,
    steady_state_with_cutoff,
    thermal_liouvillian,
    unvec,
    vec,
)
from .model import (
    SystemParams,
    block_hamiltonian,
    dressed_energies,
    generalized_rabi,
    ground_energy,
    hamiltonian,
    inner_doublet,
    outer_doublet,
    transition_parity,
)
from .scans import (
    NEAR_CRITICAL_LAM,
    doublets_vs_detuning,
    doublets_vs_lambda,
    g2_vs_pump,
    spectra_suite,
)
from .spectrum import (
    SpectrumResult,
    correlation,
    emission_spectrum,
    find_peaks,
    g2_zero,
    photon_number_g2,
)

__all__ = [
    "__version__",
    "annihilation",
    "creation",
    "number",
    "parity",
    "verify_algebra",
    "xi",
    "CutoffPolicy",
    "bose_occupation",
    "lindblad_term",
    "liouvillian",
    "propagate",
    "steady_state",
    "steady_state_sectors",
    "steady_state_with_cutoff",
    "thermal_liouvillian",
    "unvec",
    "vec",
    "SystemParams",
    "block_hamiltonian",
    "dressed_energies",
    "generalized_rabi",
    "ground_energy",
    "hamiltonian",
    "inner_doublet",
    "outer_doublet",
    "transition_parity",
    "NEAR_CRITICAL_LAM",
    "doublets_vs_detuning",
    "doublets_vs_lambda",
    "g2_vs_pump",
    "spectra_suite",
    "SpectrumResult",
    "correlation",
    "emission_spectrum",
    "find_peaks",
    "g2_zero",
    "photon_number_g2",
]
