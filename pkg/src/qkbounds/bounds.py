"""Closed-form yield bounds and the surpass/reach predicates.

The control yield of a composite plant+controller system under unitary
evolution is extremized by aligning (max) or anti-aligning (min) the sorted
composite state spectrum with the sorted lifted observable spectrum. With a
trivial controller the same alignment over the plant alone gives the
classical bounds. The predicates below decide, from spectra and degeneracy
data only, whether a quantum controller beats the classical bounds and
whether the yield can reach the extreme observable eigenvalues.
"""

from __future__ import annotations

import math
import warnings
from dataclasses import dataclass
from typing import Optional, Sequence

import numpy as np

from .errors import DimensionMismatch, InvalidPermutation
from .spectra import (
    ZERO_TOL,
    CompositeSpectra,
    ObservableSpectrum,
    Spectrum,
    composite,
    hartley_entropy,
    make_spectrum,
)

# A bound is "surpassed" only when beaten by more than this margin; the
# underlying mathematical condition is a strict inequality.
SURPASS_TOL = 1e-12

# |J_max - max eigenvalue| below this counts as reaching the ultimate bound.
REACH_TOL = 1e-12


@dataclass(frozen=True)
class BandStructure:
    """Bandwidth/band-gap data controlling the surpass predicates.

    `bandwidth` is the log-ratio of the controller's extreme eigenvalues
    (+inf when the smallest is zero). `gaps[k]` is the log-ratio of plant
    eigenvalues k+1 and k (sorted nondecreasing), +inf when only the lower
    one is zero and 0 when both are. `mu[i]` is the cumulative observable
    multiplicity up to distinct eigenvalue i; `nu[i]` counts observable
    eigenvalues strictly above distinct eigenvalue i.
    """

    bandwidth: float
    gaps: tuple[float, ...]
    mu: tuple[int, ...]
    nu: tuple[int, ...]


@dataclass(frozen=True)
class SurpassResult:
    """Outcome of the classical-bound surpass test with witnessing bands."""

    upper: bool
    lower: bool
    witness_upper: Optional[int]
    witness_lower: Optional[int]


@dataclass(frozen=True)
class BoundsReport:
    """All bounds and predicate outcomes for one instance.

    The chain qkb_min <= kin_min <= ckb_min <= ckb_max <= kin_max <= qkb_max
    always holds. Witness indices are 1-based band boundaries.
    """

    ckb_max: float
    ckb_min: float
    kin_max: float
    kin_min: float
    qkb_max: float
    qkb_min: float
    surpass_upper: bool
    surpass_lower: bool
    reach_upper: bool
    reach_lower: bool
    witness_upper: Optional[int]
    witness_lower: Optional[int]


def ckb(sys: Spectrum, obs: ObservableSpectrum) -> tuple[float, float]:
    """Classical kinematic bounds: extremal yields with no quantum controller.

    Returns (max, min): the dot product of the nondecreasing plant spectrum
    with the nondecreasing observable eigenvalues, and with the observable
    reversed.
    """
    if obs.dim != sys.dim:
        raise DimensionMismatch(f"observable dim {obs.dim} != system dim {sys.dim}")
    theta = obs.expanded()
    p = sys.values
    j_max = math.fsum(pk * tk for pk, tk in zip(p, theta))
    j_min = math.fsum(pk * tk for pk, tk in zip(reversed(p), theta))
    return j_max, j_min


def kinematic_bounds(c: CompositeSpectra) -> tuple[float, float]:
    """Extremal yields over all unitaries of the composite system.

    Identity alignment of the two sorted spectra gives the maximum,
    reverse alignment the minimum.
    """
    p = c.big_p.values
    theta = c.big_theta
    j_max = math.fsum(pk * tk for pk, tk in zip(p, theta))
    j_min = math.fsum(pk * tk for pk, tk in zip(reversed(p), theta))
    return j_max, j_min


def kinematic_bounds_weighted(
    p_groups: Sequence[tuple[float, int]],
    theta_groups: Sequence[tuple[float, int]],
) -> tuple[float, float]:
    """Kinematic bounds from multiplicity-grouped spectra.

    Both arguments are (value, weight) pairs with integer weights; weights
    must sum to the same total on both sides. Equivalent to expanding every
    group and calling :func:`kinematic_bounds`, but costs O(groups) instead
    of O(total dimension), which keeps exponentially degenerate thermal
    controllers cheap.
    """
    if sum(w for _, w in p_groups) != sum(w for _, w in theta_groups):
        raise DimensionMismatch("grouped spectra carry different total weight")
    p_sorted = sorted(p_groups)
    t_sorted = sorted(theta_groups)

    def _aligned(p_seq):
        terms = []
        ti = 0
        t_left = t_sorted[0][1]
        for value, weight in p_seq:
            while weight > 0:
                take = min(weight, t_left)
                terms.append(take * value * t_sorted[ti][0])
                weight -= take
                t_left -= take
                if t_left == 0 and ti + 1 < len(t_sorted):
                    ti += 1
                    t_left = t_sorted[ti][1]
        return math.fsum(terms)

    return _aligned(p_sorted), _aligned(list(reversed(p_sorted)))


def critical_value(c: CompositeSpectra, perm: Sequence[int]) -> float:
    """Yield at the critical manifold selected by a permutation.

    `perm` must be a bijection on 0..N-1; entry k selects which composite
    state eigenvalue multiplies the k-th (nondecreasing) observable
    eigenvalue.
    """
    n = c.dim
    if len(perm) != n or sorted(perm) != list(range(n)):
        raise InvalidPermutation(f"not a permutation of 0..{n - 1}")
    p = c.big_p.values
    return math.fsum(p[perm[k]] * c.big_theta[k] for k in range(n))


def ckb_permutation(sys: Spectrum, ctrl: Spectrum) -> tuple[int, ...]:
    """Permutation of the sorted composite spectrum realizing the classical bound.

    Orders the composite eigenvalues plant-major (all controller eigenvalues
    of the smallest plant eigenvalue first, and so on), which hands each
    plant eigenvalue exactly one full block of the lifted observable. The
    resulting critical value equals the upper classical bound.
    """
    products = [
        (p * q, j, k) for j, p in enumerate(sys.values) for k, q in enumerate(ctrl.values)
    ]
    order = sorted(range(len(products)), key=lambda i: products[i][0])
    # position of each product in the sorted composite spectrum; ties are
    # broken consistently because both sides enumerate the same tuples
    slot_of = {products[i][1:]: pos for pos, i in enumerate(order)}
    perm = []
    for j in range(sys.dim):
        for k in range(ctrl.dim):
            perm.append(slot_of[(j, k)])
    return tuple(perm)


def _mu_indices(obs: ObservableSpectrum) -> tuple[int, ...]:
    out = []
    acc = 0
    for n in obs.multiplicities:
        acc += n
        out.append(acc)
    return tuple(out)


def band_structure(sys: Spectrum, ctrl: Spectrum, obs: ObservableSpectrum) -> BandStructure:
    """Controller bandwidth, plant band gaps, and the band boundary indices."""
    if obs.dim != sys.dim:
        raise DimensionMismatch(f"observable dim {obs.dim} != system dim {sys.dim}")
    q_min, q_max = ctrl.min_value, ctrl.max_value
    bandwidth = math.inf if q_min <= ZERO_TOL else math.log(q_max / q_min)
    gaps = []
    for a, b in zip(sys.values, sys.values[1:]):
        if a <= ZERO_TOL:
            gaps.append(0.0 if b <= ZERO_TOL else math.inf)
        else:
            gaps.append(math.log(b / a))
    mu = _mu_indices(obs)
    nu = tuple(sys.dim - m for m in mu[:-1])
    return BandStructure(bandwidth, tuple(gaps), mu, nu)


def _overlap_witness(
    p: tuple[float, ...], q_min: float, q_max: float, boundaries: Sequence[int]
) -> Optional[int]:
    """Smallest 1-based band index whose top population spills past the next band."""
    for i, m in enumerate(boundaries, start=1):
        if p[m - 1] * q_max > p[m] * q_min + SURPASS_TOL:
            return i
    return None


def surpass_ckb(sys: Spectrum, ctrl: Spectrum, obs: ObservableSpectrum) -> SurpassResult:
    """Decide whether the quantum controller beats the classical bounds.

    The upper bound is beaten iff, for at least one boundary between
    observable degeneracy bands, the heaviest population of the lower band
    times the controller's largest eigenvalue exceeds the lightest
    population of the upper band times the controller's smallest eigenvalue.
    The lower bound uses the reversed band boundaries. A scalar observable
    (r = 1) has a constant landscape, so both answers are False.
    """
    if obs.dim != sys.dim:
        raise DimensionMismatch(f"observable dim {obs.dim} != system dim {sys.dim}")
    if obs.r < 2:
        return SurpassResult(False, False, None, None)
    q_min, q_max = ctrl.min_value, ctrl.max_value
    mu = _mu_indices(obs)
    nu = tuple(sys.dim - m for m in mu[:-1])
    w_up = _overlap_witness(sys.values, q_min, q_max, mu[:-1])
    w_lo = _overlap_witness(sys.values, q_min, q_max, nu)
    return SurpassResult(w_up is not None, w_lo is not None, w_up, w_lo)


def surpass_ckb_bandwidth_form(
    sys: Spectrum, ctrl: Spectrum, obs: ObservableSpectrum
) -> tuple[bool, bool]:
    """Surpass test restated as bandwidth > minimum band gap.

    Logarithmic restatement of :func:`surpass_ckb`. Whenever a compared
    band involves a zero eigenvalue the log ratio is ill-defined, so those
    bands fall back to the product comparison, which is the authoritative
    form (0 > 0 is False). For strictly positive spectra this is a genuine
    log-domain comparison.
    """
    if obs.dim != sys.dim:
        raise DimensionMismatch(f"observable dim {obs.dim} != system dim {sys.dim}")
    if obs.r < 2:
        return False, False
    bands = band_structure(sys, ctrl, obs)
    q_min, q_max = ctrl.min_value, ctrl.max_value
    p = sys.values

    def _beats(boundary: int) -> bool:
        lo, hi = p[boundary - 1], p[boundary]
        if q_min <= ZERO_TOL or lo <= ZERO_TOL or hi <= ZERO_TOL:
            return lo * q_max > hi * q_min + SURPASS_TOL
        return bands.bandwidth > bands.gaps[boundary - 1]

    upper = any(_beats(m) for m in bands.mu[:-1])
    lower = any(_beats(v) for v in bands.nu)
    return upper, lower


def reach_qkb(sys: Spectrum, ctrl: Spectrum, obs: ObservableSpectrum) -> tuple[bool, bool]:
    """Decide whether the extreme observable eigenvalues are exactly attainable.

    The upper limit is reachable iff the composite state's rank fits inside
    the degeneracy block of the largest observable eigenvalue lifted to the
    composite space; the lower limit uses the smallest eigenvalue's block.
    Depends on the spectra only through their ranks.
    """
    if obs.dim != sys.dim:
        raise DimensionMismatch(f"observable dim {obs.dim} != system dim {sys.dim}")
    support = sys.rank * ctrl.rank
    upper = support <= obs.multiplicities[-1] * ctrl.dim
    lower = support <= obs.multiplicities[0] * ctrl.dim
    return upper, lower


def qubit_reach_condition(
    m_s: int, m_c: int, m_r: int, sys: Spectrum, ctrl: Spectrum
) -> bool:
    """Qubit-count form of the reachability test for the upper limit.

    For a plant of m_s qubits, controller of m_c qubits, and a top
    observable eigenspace of m_r qubits, reachability reads
    m_r + m_c >= S0(plant) + S0(controller) in Hartley entropies.
    Exact only when both ranks are powers of two; otherwise this falls
    back to the rank-product test and warns.
    """
    if sys.dim != 2**m_s:
        raise DimensionMismatch(f"system dim {sys.dim} != 2^{m_s}")
    if ctrl.dim != 2**m_c:
        raise DimensionMismatch(f"controller dim {ctrl.dim} != 2^{m_c}")
    ranks_pow2 = all(r & (r - 1) == 0 for r in (sys.rank, ctrl.rank))
    if not ranks_pow2:
        warnings.warn(
            "state rank is not a power of two; falling back to the rank-product test",
            stacklevel=2,
        )
        return sys.rank * ctrl.rank <= 2**m_r * ctrl.dim
    return m_r + m_c >= hartley_entropy(sys) + hartley_entropy(ctrl)


def min_pure_controller_dim(sys: Spectrum, obs: ObservableSpectrum) -> int:
    """Smallest controller dimension for which a pure controller reaches the top.

    With a rank-1 controller the reach test reduces to rank(plant) <=
    n_top * N_c, so the answer is ceil(rank / n_top), at least 1.
    """
    n_top = obs.multiplicities[-1]
    return max(1, -(-sys.rank // n_top))


def bounds_report(sys: Spectrum, ctrl: Spectrum, obs: ObservableSpectrum) -> BoundsReport:
    """Assemble every bound and predicate for one instance."""
    ckb_max, ckb_min = ckb(sys, obs)
    comp = composite(sys, ctrl, obs)
    kin_max, kin_min = kinematic_bounds(comp)
    surpass = surpass_ckb(sys, ctrl, obs)
    reach_up, reach_lo = reach_qkb(sys, ctrl, obs)
    return BoundsReport(
        ckb_max=ckb_max,
        ckb_min=ckb_min,
        kin_max=kin_max,
        kin_min=kin_min,
        qkb_max=obs.distinct[-1],
        qkb_min=obs.distinct[0],
        surpass_upper=surpass.upper,
        surpass_lower=surpass.lower,
        reach_upper=reach_up,
        reach_lower=reach_lo,
        witness_upper=surpass.witness_upper,
        witness_lower=surpass.witness_lower,
    )


def random_spectrum(rng: np.random.Generator, dim: int, zero_prob: float = 0.25) -> Spectrum:
    """Sample a spectrum uniformly from the probability simplex.

    With probability `zero_prob` a random proper subset of entries is zeroed
    before renormalization, exercising rank-deficient states. Nonzero
    entries are kept above 1e-6 so the rank at the 1e-12 threshold is
    unambiguous.
    """
    while True:
        values = rng.dirichlet(np.ones(dim))
        if dim > 1 and rng.random() < zero_prob:
            n_zero = int(rng.integers(1, dim))
            idx = rng.choice(dim, size=n_zero, replace=False)
            values[idx] = 0.0
            values = values / values.sum()
        if all(v == 0.0 or v > 1e-6 for v in values):
            return make_spectrum([float(v) for v in values])


def random_observable(rng: np.random.Generator, dim: int) -> ObservableSpectrum:
    """Sample an observable spectrum on a dim-dimensional plant.

    Draws the number of distinct eigenvalues uniformly (so degenerate
    spectra occur whenever dim > 1), splits the dimension into positive
    multiplicities, and spaces the eigenvalues by at least 0.1 so degeneracy
    decisions never sit on the tolerance boundary.
    """
    r = int(rng.integers(1, dim + 1))
    cuts = sorted(rng.choice(np.arange(1, dim), size=r - 1, replace=False)) if r > 1 else []
    mults = []
    prev = 0
    for c in [*cuts, dim]:
        mults.append(int(c - prev))
        prev = c
    gaps = 0.1 + rng.random(r - 1)
    values = [float(rng.normal())]
    for g in gaps:
        values.append(values[-1] + float(g))
    return ObservableSpectrum(tuple(values), tuple(mults))
