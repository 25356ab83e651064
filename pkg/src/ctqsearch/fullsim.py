"""Brute-force N-dimensional simulator used to validate the reduced dynamics.

Builds the full Hamiltonian H = E * (P_target + |s><s|) as a dense matrix and
evolves states by eigendecomposition.  Dimension is capped because this path
is a correctness oracle, not the production simulator.
"""

from __future__ import annotations

import numpy as np

from .scenario import SearchScenario
from .stateprep import StatePrep

DEFAULT_DIM_CAP = 4096
HERMITIAN_TOL = 1e-12


def _require_hermitian(hamiltonian: np.ndarray) -> np.ndarray:
    h = np.asarray(hamiltonian)
    if h.ndim != 2 or h.shape[0] != h.shape[1]:
        raise ValueError(f"Hamiltonian must be square, got shape {h.shape}")
    if np.max(np.abs(h - h.conj().T)) > HERMITIAN_TOL:
        raise ValueError("Hamiltonian must be Hermitian")
    return h


def full_hamiltonian(
    scenario: SearchScenario, prep: StatePrep, *, dim_cap: int = DEFAULT_DIM_CAP
) -> np.ndarray:
    """Dense N x N Hamiltonian: target projector plus initial-state projector."""
    n = scenario.n_items
    if n > dim_cap:
        raise ValueError(f"n_items={n} exceeds the full-simulation cap {dim_cap}")
    h = scenario.energy * np.outer(prep.beta, prep.beta)
    targets = np.fromiter(sorted(scenario.targets), dtype=int)
    h[targets, targets] += scenario.energy
    return h


def full_evolve(hamiltonian: np.ndarray, initial: np.ndarray, t: float) -> np.ndarray:
    """exp(-i*H*t) applied to ``initial`` via eigendecomposition."""
    return evolve_on_grid(hamiltonian, initial, [t])[0]


def evolve_on_grid(
    hamiltonian: np.ndarray, initial: np.ndarray, times: np.ndarray
) -> np.ndarray:
    """Evolve one state to every time in ``times``; rows are states.

    A single eigendecomposition serves all grid points, so dense grids cost
    little more than a single evolution.
    """
    h = _require_hermitian(hamiltonian)
    psi0 = np.asarray(initial, dtype=complex)
    if psi0.shape != (h.shape[0],):
        raise ValueError(f"state shape {psi0.shape} does not match Hamiltonian {h.shape}")
    vals, vecs = np.linalg.eigh(h)
    amplitudes = vecs.conj().T @ psi0
    ts = np.asarray(times, dtype=float)
    phases = np.exp(-1j * np.outer(ts, vals))
    return (phases * amplitudes) @ vecs.T


def reduced_basis(prep: StatePrep, n_items: int) -> tuple[np.ndarray, np.ndarray]:
    """Full-space unit vectors |w> and |r> spanning the invariant plane.

    |r> is returned as the zero vector when the prepared state has no
    residual component (y == 1).
    """
    w = np.zeros(n_items)
    w[np.fromiter(prep.target_items, dtype=int)] = prep.target_coeffs
    r = np.zeros(n_items)
    if prep.r_count:
        r[np.fromiter(prep.residual_items, dtype=int)] = prep.residual_coeffs
    return w, r


def project_reduced(
    prep: StatePrep, state: np.ndarray
) -> tuple[complex, complex, float]:
    """Project a full-space state onto the invariant plane.

    Returns (a, b, leak) where a = <w|state>, b = <r|state>, and ``leak`` is
    the norm of the component outside the plane.
    """
    psi = np.asarray(state, dtype=complex)
    w, r = reduced_basis(prep, psi.shape[0])
    a = complex(w @ psi)  # basis vectors are real
    b = complex(r @ psi) if prep.r_count else 0.0 + 0.0j
    residual = psi - a * w - b * r
    return a, b, float(np.linalg.norm(residual))


def invariant_subspace_residual(
    scenario: SearchScenario,
    prep: StatePrep,
    times: np.ndarray,
    *,
    dim_cap: int = DEFAULT_DIM_CAP,
) -> float:
    """Largest leakage out of the invariant plane over a time grid.

    The exact dynamics never leaves the plane, so anything beyond roundoff
    signals a bug in either simulator.
    """
    h = full_hamiltonian(scenario, prep, dim_cap=dim_cap)
    states = evolve_on_grid(h, prep.beta, times)
    worst = 0.0
    for row in states:
        _, _, leak = project_reduced(prep, row)
        worst = max(worst, leak)
    return worst
