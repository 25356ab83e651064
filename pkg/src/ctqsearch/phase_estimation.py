"""Phase-register construction, measurement statistics, and overlap estimation.

The walk operator is the reduced propagator evaluated at one full driving
period.  Its two eigenphases encode the overlap ``y`` as the pair
``(y, 1 - y)`` in units of full turns, so an M-point phase register measures
a value ``k`` whose fraction ``k/M`` clusters around one of those two phases:

* the branch with register phase ``y`` carries weight ``(1 - y)/2``;
* the branch with register phase ``1 - y`` carries weight ``(1 + y)/2``.

Estimation therefore sees a *mirror pair* of clusters ``{k, M - k}`` and must
decide which side is ``y``.  The heavier cluster belongs to the phase
``1 - y``, so the default rule reads ``y_hat = 1 - k_mode/M``; when the two
clusters are too balanced to call, a short verification experiment (evolve to
each candidate's optimal time and check hits through the membership oracle)
breaks the tie.

All register distributions here are exact closed forms; sampling them stands
in for running the hardware.
"""

from __future__ import annotations

import math
from dataclasses import dataclass, replace

import numpy as np

from .dynamics import evolution_matrix, optimal_time, success_distribution
from .rng import make_rng
from .scenario import InformationSet, ScenarioError, SearchScenario, oracle_eval
from .stateprep import StatePrep, weighted_superposition

EIGHT_OVER_PI_SQ = 8.0 / math.pi**2

# clusters are called ambiguous when the relative count gap falls below
# 2/sqrt(pair total), a two-sigma criterion for a fair-coin split
AMBIGUITY_SIGMA = 2.0


def _require_power_of_two(m_size: int, what: str = "m_size") -> int:
    m_size = int(m_size)
    if m_size < 2 or m_size & (m_size - 1):
        raise ValueError(f"{what} must be a power of two >= 2, got {m_size}")
    return m_size


def next_power_of_two(value: int) -> int:
    if value < 1:
        raise ValueError(f"value must be >= 1, got {value}")
    return 1 << max(1, (int(value) - 1).bit_length())


def _overlap_of(prep: StatePrep | float) -> float:
    y = prep.y if isinstance(prep, StatePrep) else float(prep)
    if not 0.0 < y <= 1.0:
        raise ValueError(f"overlap y must lie in (0, 1], got {y}")
    return y


def walk_operator(y: float, energy: float) -> np.ndarray:
    """Reduced propagator over one full driving period, 2*pi/E.

    Its eigenphases are exp(-2j*pi*y) on the top eigenvector and
    exp(-2j*pi*(1-y)) on the bottom one, which is what the register reads out.
    """
    return evolution_matrix(y, energy, 2.0 * math.pi / float(energy))


@dataclass(frozen=True)
class AncillaState:
    """Joint state of the M-point register and the two-dimensional system.

    ``coeffs[m, 0]`` multiplies |m> tensor x1 (eigenvalue branch with register
    phase ``1 - y``); ``coeffs[m, 1]`` multiplies |m> tensor x2 (register
    phase ``y``).  Unit norm overall.
    """

    coeffs: np.ndarray

    def __post_init__(self) -> None:
        arr = np.asarray(self.coeffs, dtype=complex)
        if arr.ndim != 2 or arr.shape[1] != 2:
            raise ValueError(f"coeffs must have shape (M, 2), got {arr.shape}")
        _require_power_of_two(arr.shape[0])
        norm = np.linalg.norm(arr)
        if abs(norm - 1.0) > 1e-12:
            raise ValueError(f"ancilla state must be normalized, got norm {norm}")
        arr.setflags(write=False)
        object.__setattr__(self, "coeffs", arr)

    @property
    def m_size(self) -> int:
        return self.coeffs.shape[0]


def build_psi1(prep: StatePrep | float, m_size: int) -> AncillaState:
    """Register-system state after the controlled walk stage.

    Starting from the uniform register and the prepared system state, applying
    the walk ``m`` times conditioned on register value ``m`` yields

        coeffs[m, 0] = sqrt((1+y)/2) * exp(2j*pi*m*(1-y)) / sqrt(M)
        coeffs[m, 1] = sqrt((1-y)/2) * exp(2j*pi*m*y)     / sqrt(M)
    """
    y = _overlap_of(prep)
    m_size = _require_power_of_two(m_size)
    m = np.arange(m_size)
    coeffs = np.empty((m_size, 2), dtype=complex)
    coeffs[:, 0] = math.sqrt((1.0 + y) / 2.0) * np.exp(2j * math.pi * m * (1.0 - y))
    coeffs[:, 1] = math.sqrt((1.0 - y) / 2.0) * np.exp(2j * math.pi * m * y)
    coeffs /= math.sqrt(m_size)
    return AncillaState(coeffs=coeffs)


def inverse_qft(register: np.ndarray) -> np.ndarray:
    """Unitary map out[k] = (1/sqrt(M)) * sum_x in[x] * exp(-2j*pi*k*x/M)."""
    reg = np.asarray(register, dtype=complex)
    if reg.ndim != 1:
        raise ValueError(f"register must be one-dimensional, got shape {reg.shape}")
    m_size = _require_power_of_two(reg.shape[0], what="register length")
    return np.fft.fft(reg) / math.sqrt(m_size)


def forward_qft(register: np.ndarray) -> np.ndarray:
    """Inverse of :func:`inverse_qft` (positive-exponent convention)."""
    reg = np.asarray(register, dtype=complex)
    if reg.ndim != 1:
        raise ValueError(f"register must be one-dimensional, got shape {reg.shape}")
    m_size = _require_power_of_two(reg.shape[0], what="register length")
    return np.fft.ifft(reg) * math.sqrt(m_size)


def apply_inverse_qft(state: AncillaState) -> AncillaState:
    """Inverse Fourier transform on the register, acting on each branch."""
    out = np.column_stack([inverse_qft(state.coeffs[:, 0]), inverse_qft(state.coeffs[:, 1])])
    return AncillaState(coeffs=out)


def register_probabilities(state: AncillaState) -> np.ndarray:
    """Marginal distribution of a register measurement (branches traced out)."""
    return np.sum(np.abs(state.coeffs) ** 2, axis=1)


def circle_distance(a, b):
    """Distance on the unit circle: min over integers j of |a - b + j|."""
    diff = np.abs(np.asarray(a, dtype=float) - np.asarray(b, dtype=float)) % 1.0
    out = np.minimum(diff, 1.0 - diff)
    if np.ndim(out) == 0:
        return float(out)
    return out


def branch_distribution(phase: float, m_size: int) -> np.ndarray:
    """Register distribution conditioned on one branch.

    P(k) = sin(pi*(M*phase - k))**2 / (M * sin(pi*(phase - k/M)))**2 with the
    removable singularity P(k) = 1 when ``phase - k/M`` is an integer.
    """
    m_size = _require_power_of_two(m_size)
    phase = float(phase)
    k = np.arange(m_size)
    u = phase - k / m_size
    singular = (u % 1.0) == 0.0
    num = np.sin(np.pi * (m_size * phase - k))
    den = m_size * np.sin(np.pi * u)
    ratio = np.where(singular, 1.0, num / np.where(singular, 1.0, den))
    return ratio**2


@dataclass(frozen=True)
class RegisterDistribution:
    """Exact register statistics for overlap ``y``: the two branch
    distributions, their weights, and the observable mixture."""

    y: float
    m_size: int
    branch_phase_y: np.ndarray
    branch_phase_complement: np.ndarray
    weight_phase_y: float
    weight_phase_complement: float
    total: np.ndarray

    def __post_init__(self) -> None:
        for name in ("branch_phase_y", "branch_phase_complement", "total"):
            getattr(self, name).setflags(write=False)


def measurement_distribution(y: float, m_size: int) -> RegisterDistribution:
    """Mixture observed when measuring the register:

    P(k) = (1-y)/2 * P(k | phase y) + (1+y)/2 * P(k | phase 1-y).
    """
    y = _overlap_of(y)
    m_size = _require_power_of_two(m_size)
    b_y = branch_distribution(y, m_size)
    b_c = branch_distribution(1.0 - y, m_size)
    w_y = (1.0 - y) / 2.0
    w_c = (1.0 + y) / 2.0
    return RegisterDistribution(
        y=y,
        m_size=m_size,
        branch_phase_y=b_y,
        branch_phase_complement=b_c,
        weight_phase_y=w_y,
        weight_phase_complement=w_c,
        total=w_y * b_y + w_c * b_c,
    )


def concentration_probability(phase: float, m_size: int, m: int = 1) -> float:
    """Branch-conditional probability that k/M lands within m/M of the phase."""
    if int(m) < 1:
        raise ValueError(f"window multiple m must be >= 1, got {m}")
    probs = branch_distribution(phase, m_size)
    k = np.arange(m_size)
    d = circle_distance(phase, k / m_size)
    return float(np.sum(probs[d <= m / m_size + 1e-12]))


def sample_phase_register(y: float, m_size: int, n_samples: int, seed: int) -> np.ndarray:
    """Draw register outcomes from the exact mixture (inverse-CDF sampling)."""
    if int(n_samples) < 1:
        raise ValueError(f"n_samples must be >= 1, got {n_samples}")
    dist = measurement_distribution(y, m_size)
    cum = np.cumsum(dist.total)
    cum[-1] = 1.0  # guard against roundoff in the last bin
    rng = make_rng(seed, "phase-register")
    u = rng.random(int(n_samples))
    return np.searchsorted(cum, u, side="right").astype(np.int64)


@dataclass(frozen=True)
class PhaseEstimate:
    """Outcome of cluster analysis on register samples.

    ``y_candidates`` is the mirror pair (k*/M, 1 - k*/M) of the modal cluster,
    sorted ascending; ``k_mode`` is the heavier side's register value and
    ``y_hat = 1 - k_mode/M`` (for a clear split this equals the lighter side's
    candidate).  ``ambiguous`` flags splits too balanced to call from counts
    alone; callers should then run :func:`disambiguate`.
    """

    k_mode: int
    y_candidates: tuple[float, float]
    y_hat: float
    resolution: float
    samples_used: int
    cluster_counts: tuple[int, int]
    ambiguous: bool
    candidate_gap: float


def estimate_y(samples, m_size: int) -> PhaseEstimate:
    """Estimate the overlap from register samples.

    Register values are folded into mirror pairs {k, M-k}; the modal pair
    fixes the candidate set and the count split between its two sides picks
    the branch: the heavier side estimates phase 1-y.
    """
    m_size = _require_power_of_two(m_size)
    ks = np.asarray(samples, dtype=np.int64)
    if ks.ndim != 1 or ks.size == 0:
        raise ValueError("samples must be a nonempty one-dimensional sequence")
    if np.any((ks < 0) | (ks >= m_size)):
        raise ValueError(f"register samples must lie in [0, {m_size})")

    pair_keys = np.minimum(ks, (m_size - ks) % m_size)
    counts = np.bincount(pair_keys, minlength=m_size)
    p = int(np.argmax(counts))  # modal pair; ties resolve to the smallest key
    mirror = (m_size - p) % m_size

    n_low = int(np.sum(ks == p))
    n_high = int(np.sum(ks == mirror)) if mirror != p else 0
    c_low, c_high = p / m_size, 1.0 - p / m_size

    if mirror == p and 2 * p == m_size:
        # both candidates coincide at 1/2: nothing to disambiguate
        return PhaseEstimate(
            k_mode=p,
            y_candidates=(0.5, 0.5),
            y_hat=0.5,
            resolution=1.0 / m_size,
            samples_used=int(ks.size),
            cluster_counts=(n_low, 0),
            ambiguous=False,
            candidate_gap=0.0,
        )

    if n_high > n_low:
        heavy_k, heavy_n, light_n = mirror, n_high, n_low
    elif n_low > n_high:
        heavy_k, heavy_n, light_n = p, n_low, n_high
    else:
        # dead-even split: pick the high side so the default reads y_hat = c_low
        heavy_k, heavy_n, light_n = mirror, n_high, n_low

    pair_total = n_low + n_high
    gap = (heavy_n - light_n) / pair_total
    ambiguous = light_n == 0 or gap < AMBIGUITY_SIGMA / math.sqrt(pair_total)

    return PhaseEstimate(
        k_mode=heavy_k,
        y_candidates=(c_low, c_high),
        y_hat=1.0 - heavy_k / m_size,
        resolution=1.0 / m_size,
        samples_used=int(ks.size),
        cluster_counts=(heavy_n, light_n),
        ambiguous=ambiguous,
        candidate_gap=circle_distance(c_low, c_high),
    )


def _verification_harmonic(candidate: float, gap: float) -> int:
    """Smallest odd multiple of the candidate's peak time that separates the
    mirror pair.

    Success probability peaks at every odd multiple of pi/(2*E*c), so any odd
    harmonic is still "the candidate's optimal time"; harmonic k amplifies a
    relative frequency error k-fold.  Choosing k >= c/gap pushes the other
    candidate's prediction roughly a quarter period away, which is what makes
    nearly-mirror-symmetric pairs (y close to 1/2) distinguishable at all.
    """
    harmonic = max(1, math.ceil(candidate / gap))
    return harmonic + 1 if harmonic % 2 == 0 else harmonic


def _verification_hits(
    scenario: SearchScenario,
    prep: StatePrep,
    candidate: float,
    rng: np.random.Generator,
    n_draws: int,
    harmonic: int = 1,
) -> int:
    """Evolve to an odd-harmonic peak of the candidate and count oracle hits.

    Measurement outcomes inside the target support are checked through
    :func:`oracle_eval`; the aggregate non-target outcome never hits.
    """
    t_candidate = harmonic * optimal_time(candidate, scenario.energy)
    dist = success_distribution(prep, scenario.energy, t_candidate)
    items = sorted(dist.target_probs)
    probs = np.array([dist.target_probs[i] for i in items] + [dist.failure])
    cum = np.cumsum(probs)
    cum[-1] = max(cum[-1], 1.0)
    draws = np.searchsorted(cum, rng.random(int(n_draws)), side="right")
    return sum(oracle_eval(scenario, items[d]) for d in draws if d < len(items))


def disambiguate(
    estimate: PhaseEstimate,
    scenario: SearchScenario,
    prep: StatePrep,
    *,
    seed: int,
    n_verify: int = 48,
    min_lead: int = 2,
) -> PhaseEstimate:
    """Resolve an ambiguous mirror pair with verification experiments.

    Each positive candidate is tried: evolve the true system to an
    odd-harmonic peak of that candidate (the harmonic is chosen to separate
    the pair; it is 1 for well-split candidates) and count how many of
    ``n_verify`` sampled measurements the membership oracle confirms.  A
    candidate must lead by at least ``min_lead`` hits to win; otherwise the
    heavier-cluster default stands (at rational phase ratios both candidates
    can score perfectly, and the heavy branch is then the best evidence
    available).
    """
    if not estimate.ambiguous:
        return estimate
    c_low, c_high = estimate.y_candidates
    if c_low == c_high:
        return replace(estimate, ambiguous=False)
    candidates = [c for c in (c_low, c_high) if c > 0.0]
    if len(candidates) == 1:
        return replace(estimate, y_hat=candidates[0], ambiguous=False)

    rng = make_rng(seed, "verify")
    gap = c_high - c_low
    hits = [
        _verification_hits(
            scenario, prep, c, rng, n_verify, _verification_harmonic(c, gap)
        )
        for c in candidates
    ]
    if abs(hits[0] - hits[1]) >= min_lead:
        chosen = candidates[int(np.argmax(hits))]
    else:
        chosen = estimate.y_hat  # tie: keep the heavy-branch default
    return replace(estimate, y_hat=chosen, ambiguous=False)


def run_phase_estimation(
    scenario: SearchScenario,
    *,
    m_size: int = 64,
    n_samples: int = 200,
    seed: int = 0,
    n_verify: int = 48,
) -> tuple[PhaseEstimate, np.ndarray]:
    """Sample the register for a scenario and estimate its overlap.

    Returns the (possibly verification-resolved) estimate together with the
    raw register samples.  The target set is consulted only through the
    membership oracle during verification.
    """
    prep = weighted_superposition(scenario)
    samples = sample_phase_register(prep.y, m_size, n_samples, seed)
    est = estimate_y(samples, m_size)
    if est.ambiguous:
        est = disambiguate(est, scenario, prep, seed=seed, n_verify=n_verify)
    return est, samples


def disjointify(info_sets) -> tuple[InformationSet, ...]:
    """Make information sets pairwise disjoint (first set keeps shared items).

    Sets emptied by the rewrite are dropped and the survivors get equal
    weights, the convention used by the counting pipeline.
    """
    seen: set[int] = set()
    kept_members: list[frozenset[int]] = []
    for s in info_sets:
        fresh = s.members - seen
        if fresh:
            kept_members.append(frozenset(fresh))
            seen |= fresh
    if not kept_members:
        raise ScenarioError("disjointify produced no nonempty sets")
    weight = 1.0 / len(kept_members)
    return tuple(InformationSet(m, weight) for m in kept_members)


def counting_scenario(scenario: SearchScenario) -> SearchScenario:
    """Rewrite a scenario for counting: disjoint sets, uniform weights.

    With equal amplitude on every covered item the overlap obeys
    y**2 = (target count) / (support size), which is what makes the register
    estimate invertible into a count.
    """
    return SearchScenario(
        n_items=scenario.n_items,
        targets=scenario.targets,
        info_sets=disjointify(scenario.info_sets),
        energy=scenario.energy,
    )


def estimate_count(y_hat: float, support_size: int) -> int:
    """Invert y_hat**2 = l / support_size, clamped to [1, support_size]."""
    if int(support_size) < 1:
        raise ValueError(f"support_size must be >= 1, got {support_size}")
    raw = int(math.floor(y_hat * y_hat * int(support_size) + 0.5))
    return min(max(raw, 1), int(support_size))


@dataclass(frozen=True)
class CountResult:
    """Counting pipeline output: the integer estimate plus its provenance."""

    count_estimate: int
    support_size: int
    m_size: int
    estimate: PhaseEstimate
    scenario: SearchScenario
    samples: np.ndarray

    def __post_init__(self) -> None:
        arr = np.asarray(self.samples, dtype=np.int64)
        arr.setflags(write=False)
        object.__setattr__(self, "samples", arr)


def run_counting(
    scenario: SearchScenario,
    *,
    m_size: int | None = None,
    n_samples: int = 200,
    seed: int = 0,
    n_verify: int = 48,
) -> CountResult:
    """Estimate the number of targets inside the covered support.

    The scenario is first rewritten with disjoint, uniformly weighted sets.
    The register must satisfy ``m_size >= 4 * support_size`` so that the two
    candidate phases sit at least two bins apart; by default the smallest
    adequate power of two (at least 64) is chosen.
    """
    counting = counting_scenario(scenario)
    support = counting.support_size
    if m_size is None:
        m_size = next_power_of_two(max(64, 4 * support))
    else:
        m_size = _require_power_of_two(m_size)
        if m_size < 4 * support:
            raise ValueError(
                f"counting requires m_size >= 4 * support_size = {4 * support}, got {m_size}"
            )
    est, samples = run_phase_estimation(
        counting, m_size=m_size, n_samples=n_samples, seed=seed, n_verify=n_verify
    )
    return CountResult(
        count_estimate=estimate_count(est.y_hat, support),
        support_size=support,
        m_size=m_size,
        estimate=est,
        scenario=counting,
        samples=samples,
    )


@dataclass(frozen=True)
class TailBound:
    """One tail-window check: both branches must concentrate within m/M."""

    m: int
    bound: float
    prob_phase_y: float
    prob_phase_complement: float
    satisfied: bool


@dataclass(frozen=True)
class TailBoundReport:
    y: float
    m_size: int
    tails: tuple[TailBound, ...]
    pointwise_ok: bool
    pointwise_margin: float

    @property
    def all_satisfied(self) -> bool:
        return self.pointwise_ok and all(t.satisfied for t in self.tails)


def tail_bound_report(y: float, m_size: int, m_values=(2, 3, 5, 10)) -> TailBoundReport:
    """Check concentration guarantees of the register distribution.

    Tail windows: P(circle distance <= m/M | branch) >= 1 - 1/(2*(m-1)) for
    each m >= 2, on both branches.  Pointwise: every outcome at circle
    distance d > 0 from the branch phase has probability at most 1/(2*M*d)**2.
    """
    y = _overlap_of(y)
    m_size = _require_power_of_two(m_size)
    k = np.arange(m_size)

    pointwise_margin = math.inf
    pointwise_ok = True
    for phase in (y, 1.0 - y):
        if phase == 0.0:
            continue  # y == 1: the complement branch has zero weight
        probs = branch_distribution(phase, m_size)
        d = circle_distance(phase, k / m_size)
        far = d > 0.0
        caps = 1.0 / (2.0 * m_size * d[far]) ** 2
        margin = float(np.min(caps - probs[far])) if np.any(far) else math.inf
        pointwise_margin = min(pointwise_margin, margin)
        pointwise_ok = pointwise_ok and margin >= -1e-12

    tails = []
    for m in m_values:
        m = int(m)
        if m < 2:
            raise ValueError(f"tail window multiples must be >= 2, got {m}")
        bound = 1.0 - 1.0 / (2.0 * (m - 1))
        prob_y = concentration_probability(y, m_size, m)
        prob_c = concentration_probability(1.0 - y, m_size, m) if y < 1.0 else 1.0
        ok = prob_y >= bound - 1e-12 and prob_c >= bound - 1e-12
        tails.append(
            TailBound(
                m=m, bound=bound, prob_phase_y=prob_y, prob_phase_complement=prob_c, satisfied=ok
            )
        )

    return TailBoundReport(
        y=y,
        m_size=m_size,
        tails=tuple(tails),
        pointwise_ok=pointwise_ok,
        pointwise_margin=pointwise_margin,
    )


def qft_gate_count(m_size: int) -> int:
    """Standard circuit size for an M = 2**n point transform: n*(n+1)/2."""
    m_size = _require_power_of_two(m_size)
    n = m_size.bit_length() - 1
    return n * (n + 1) // 2
