"""Initial-state preparation from weighted information sets.

The prepared state assigns each item an amplitude proportional to the total
reliability weight of the information sets containing it.  Items covered by
several sets are boosted; items outside every set get amplitude zero.  The
normalized amplitude vector splits into a component inside the target
subspace (norm ``y``) and a residual component (norm ``sqrt(1 - y**2)``);
the pair of unit vectors spanning those components is what the reduced
dynamics operates on.
"""

from __future__ import annotations

from dataclasses import dataclass

import numpy as np

from .scenario import ScenarioError, SearchScenario


@dataclass(frozen=True)
class StatePrep:
    """Normalized initial amplitudes with their target/residual split.

    Attributes
    ----------
    beta:
        Length-``n_items`` array of real, nonnegative amplitudes, unit norm.
    nu:
        Euclidean norm of the raw (pre-normalization) weight-sum amplitudes.
    y:
        Overlap with the target subspace, ``y**2 = sum(beta[t]**2, t in targets)``.
    r_count:
        Number of non-target items with nonzero amplitude.
    target_items, residual_items:
        Sorted index tuples giving the support of the two components.
    target_coeffs, residual_coeffs:
        Unit coefficient vectors of the state's components inside and outside
        the target subspace, aligned with the index tuples.  ``residual_coeffs``
        is empty when the state lies entirely in the target subspace (y == 1).
    """

    beta: np.ndarray
    nu: float
    y: float
    r_count: int
    target_items: tuple[int, ...]
    residual_items: tuple[int, ...]
    target_coeffs: np.ndarray
    residual_coeffs: np.ndarray

    def __post_init__(self) -> None:
        for name in ("beta", "target_coeffs", "residual_coeffs"):
            arr = np.asarray(getattr(self, name), dtype=float)
            arr.setflags(write=False)
            object.__setattr__(self, name, arr)

    def to_dict(self) -> dict:
        return {
            "beta": self.beta.tolist(),
            "nu": self.nu,
            "y": self.y,
            "r_count": self.r_count,
        }


def _finalize(scenario: SearchScenario, raw: np.ndarray) -> StatePrep:
    # raw amplitudes are sums of positive weights, so support tests are exact
    nu = float(np.linalg.norm(raw))
    if nu == 0.0:
        raise ScenarioError("state preparation invariant violated: zero amplitude vector")
    beta = raw / nu

    target_items = tuple(sorted(scenario.targets))
    t_idx = np.fromiter(target_items, dtype=int)
    mask = np.zeros(scenario.n_items, dtype=bool)
    mask[t_idx] = True
    residual_items = tuple(int(i) for i in np.nonzero(~mask & (beta > 0.0))[0])
    r_count = len(residual_items)

    target_slice = beta[t_idx]
    y = float(np.linalg.norm(target_slice))
    if y == 0.0:
        raise ScenarioError("state preparation invariant violated: no amplitude on targets")
    if r_count == 0:
        y = 1.0  # all mass sits on targets
        residual_coeffs = np.empty(0)
    else:
        res_slice = beta[np.fromiter(residual_items, dtype=int)]
        residual_coeffs = res_slice / np.linalg.norm(res_slice)
    target_coeffs = target_slice / y

    return StatePrep(
        beta=beta,
        nu=nu,
        y=y,
        r_count=r_count,
        target_items=target_items,
        residual_items=residual_items,
        target_coeffs=target_coeffs,
        residual_coeffs=residual_coeffs,
    )


def weighted_superposition(scenario: SearchScenario) -> StatePrep:
    """Prepare the weighted state: amplitude of item i is the sum of the
    weights of the information sets containing i, normalized by ``nu``."""
    raw = np.zeros(scenario.n_items)
    for s in scenario.info_sets:
        raw[np.fromiter(s.members, dtype=int)] += s.weight
    return _finalize(scenario, raw)


def uniform_superposition(scenario: SearchScenario) -> StatePrep:
    """Unstructured baseline: equal amplitude on every item."""
    return _finalize(scenario, np.ones(scenario.n_items))
