"""Landscape topology characteristics and an exact counting oracle.

For each combination of plant/controller state classes there is a tabulated
count of critical submanifolds and a codimension of the maximum manifold.
The closed forms assume non-degenerate mixed spectra; anything else, and the
two tabulated cases with no known formula, are served by an exact
enumeration oracle that counts distinct critical yields over all
permutations of the composite spectrum. Counting is done in rational
arithmetic because distinct critical values can differ by amounts far
below any floating-point clustering tolerance.
"""

from __future__ import annotations

import math
from dataclasses import dataclass
from fractions import Fraction
from typing import Optional, Sequence

import numpy as np

from .errors import DimensionMismatch, TooLarge, UnsupportedClass
from .spectra import ObservableSpectrum, Spectrum, StateClass, make_spectrum

# Factorial enumeration guard: composite dimensions above this are refused.
MAX_EXACT_DIM = 10

# Denominator cap when recovering exact rationals from float spectra.
RATIONALIZE_DENOMINATOR = 10**9

PURE = StateClass.PURE
MIXED = StateClass.MIXED_NONDEGENERATE
MM = StateClass.MAXIMALLY_MIXED

DISPUTED_PURE_MM_NOTE = (
    "tabulated count for the pure-plant/maximally-mixed-controller case is "
    "dimensionally suspect (plant factorial dividing a controller-indexed "
    "factorial); value reported as printed, adjudicate with the brute-force oracle"
)


@dataclass(frozen=True)
class TopologyReport:
    """Critical-submanifold count and maximum-manifold codimension.

    `n_critical` is None when no closed form exists for the case.
    """

    n_critical: Optional[int]
    d_max: int
    case_label: tuple[str, str]
    note: Optional[str] = None


def topology_from_table(
    sys_class: StateClass,
    ctrl_class: StateClass,
    n_s: int,
    n_c: int,
    obs: ObservableSpectrum,
) -> TopologyReport:
    """Look up the tabulated landscape characteristics for a state-class pair.

    Degenerate mixed spectra are outside the closed forms and are rejected;
    use the brute-force oracle for those. Counts use exact integer
    arithmetic throughout, so there is no overflow at any size.
    """
    for cls, who in ((sys_class, "system"), (ctrl_class, "controller")):
        if cls not in (PURE, MIXED, MM):
            raise UnsupportedClass(f"{who} state class {cls.value} has no tabulated formula")
    if obs.dim != n_s:
        raise DimensionMismatch(f"observable dim {obs.dim} != system dim {n_s}")
    r = obs.r
    n1 = obs.multiplicities[0]
    n = n_s * n_c
    sum_sq = sum(m * m for m in obs.multiplicities)
    label = (sys_class.value, ctrl_class.value)
    note = None

    if ctrl_class is PURE:
        d_max = 2 * (n_s - n1) * (n_c if sys_class is PURE else n)
        if sys_class is PURE:
            count = r
        elif sys_class is MIXED:
            count = r**n_s
        else:
            count = math.factorial(n_s + r - 1) // (math.factorial(n_s) * math.factorial(r - 1))
    elif ctrl_class is MIXED:
        if sys_class is PURE:
            count = r**n_c
            d_max = 2 * (n_s - n1) * n_c**2
        elif sys_class is MIXED:
            count = math.factorial(n)
            for m in obs.multiplicities:
                count //= math.factorial(n_c * m)
            d_max = (n_s**2 - sum_sq) * n_c**2
        else:
            count = None
            d_max = (n_s**2 - sum_sq) * n_c**2
    else:
        if sys_class is PURE:
            # reproduced exactly as tabulated; see note
            count = math.factorial(n_c + r - 1) // (math.factorial(n_s) * math.factorial(r - 1))
            d_max = 2 * (n_s - n1) * n_c**2
            note = DISPUTED_PURE_MM_NOTE
        elif sys_class is MIXED:
            count = None
            d_max = (n_s**2 - sum_sq) * n_c**2
        else:
            raise UnsupportedClass("maximally mixed system and controller: constant landscape row not tabulated")
    return TopologyReport(count, d_max, label, note)


def _rationalize(values: Sequence[float]) -> list[Fraction]:
    return [Fraction(v).limit_denominator(RATIONALIZE_DENOMINATOR) for v in values]


def _grouped_counts(values: Sequence[Fraction]) -> tuple[tuple[Fraction, ...], tuple[int, ...]]:
    distinct: list[Fraction] = []
    counts: list[int] = []
    for v in sorted(values):
        if distinct and v == distinct[-1]:
            counts[-1] += 1
        else:
            distinct.append(v)
            counts.append(1)
    return tuple(distinct), tuple(counts)


def _block_fill_choices(counts: tuple[int, ...], size: int):
    """All ways to draw `size` elements from value groups with given counts.

    Yields (taken, remaining) pairs, where each is a tuple of per-group
    counts. Distinct draws only, so duplicated values never multiply the
    enumeration.
    """
    out: list[tuple[tuple[int, ...], tuple[int, ...]]] = []

    def rec(i: int, left: int, taken: list[int]):
        if i == len(counts):
            if left == 0:
                t = tuple(taken)
                out.append((t, tuple(c - x for c, x in zip(counts, t))))
            return
        lo = max(0, left - sum(counts[i + 1 :]))
        hi = min(counts[i], left)
        for k in range(lo, hi + 1):
            taken.append(k)
            rec(i + 1, left - k, taken)
            taken.pop()

    rec(0, size, [])
    return out


def _distinct_block_sums(
    values: tuple[Fraction, ...],
    counts: tuple[int, ...],
    sizes: Sequence[int],
    weights: Sequence[Fraction],
) -> set[Fraction]:
    """Set of achievable weighted sums when the value multiset fills fixed blocks.

    Block i receives sizes[i] elements, each multiplied by weights[i]. The
    recursion memoizes on the remaining multiset, since achievable future
    sums are independent of how earlier blocks were filled.
    """
    cache: dict[tuple[int, tuple[int, ...]], frozenset[Fraction]] = {}

    def rec(block: int, remaining: tuple[int, ...]) -> frozenset[Fraction]:
        if block == len(sizes):
            return frozenset([Fraction(0)])
        key = (block, remaining)
        hit = cache.get(key)
        if hit is not None:
            return hit
        sums: set[Fraction] = set()
        for taken, rest in _block_fill_choices(remaining, sizes[block]):
            head = weights[block] * sum(
                k * v for k, v in zip(taken, values) if k
            )
            for tail in rec(block + 1, rest):
                sums.add(head + tail)
        result = frozenset(sums)
        cache[key] = result
        return result

    return set(rec(0, counts))


def count_band_assignments(values: Sequence[Fraction], sizes: Sequence[int]) -> int:
    """Number of distinct ways to split the value multiset into ordered blocks.

    Equals the multinomial coefficient of the block sizes when all values
    are distinct; duplicated values merge assignments.
    """
    _, counts = _grouped_counts(list(values))
    total = 0

    def rec(block: int, remaining: tuple[int, ...]):
        nonlocal total
        if block == len(sizes):
            total += 1
            return
        for _, rest in _block_fill_choices(remaining, sizes[block]):
            rec(block + 1, rest)

    rec(0, counts)
    return total


def _enumeration_inputs(sys: Spectrum, ctrl: Spectrum, obs: ObservableSpectrum):
    if obs.dim != sys.dim:
        raise DimensionMismatch(f"observable dim {obs.dim} != system dim {sys.dim}")
    n = sys.dim * ctrl.dim
    if n > MAX_EXACT_DIM:
        raise TooLarge(f"composite dimension {n} exceeds {MAX_EXACT_DIM}")
    p = _rationalize(sys.values)
    q = _rationalize(ctrl.values)
    values, counts = _grouped_counts([pj * qk for pj in p for qk in q])
    sizes = [m * ctrl.dim for m in obs.multiplicities]
    weights = _rationalize(obs.distinct)
    return values, counts, sizes, weights


def count_critical_values_bruteforce(
    sys: Spectrum, ctrl: Spectrum, obs: ObservableSpectrum
) -> int:
    """Count distinct critical yields by exact enumeration.

    Rationalizes the spectra, forms the composite eigenvalue multiset, and
    counts distinct values of the yield over all assignments of that
    multiset into the observable's degeneracy blocks, which is equivalent
    to enumerating all permutations. Refuses composite dimensions above 10.
    """
    values, counts, sizes, weights = _enumeration_inputs(sys, ctrl, obs)
    return len(_distinct_block_sums(values, counts, sizes, weights))


def enumerate_critical_values(
    sys: Spectrum, ctrl: Spectrum, obs: ObservableSpectrum
) -> list[float]:
    """All distinct critical yields of an instance, as floats, ascending.

    Same enumeration as :func:`count_critical_values_bruteforce`; useful as
    the reference set that converged optimizer runs must land in.
    """
    values, counts, sizes, weights = _enumeration_inputs(sys, ctrl, obs)
    return sorted(float(s) for s in _distinct_block_sums(values, counts, sizes, weights))


def random_rational_spectrum(
    rng: np.random.Generator, dim: int, denominator: int = 997
) -> Spectrum:
    """Spectrum with exact small-rational entries and no duplicated values.

    Draws distinct positive integer numerators over a fixed prime
    denominator, so the float image rationalizes back exactly.
    """
    while True:
        numerators = rng.choice(np.arange(1, denominator), size=dim, replace=False)
        total = int(numerators.sum())
        fracs = [Fraction(int(k), total) for k in numerators]
        if len(set(fracs)) == dim:
            return make_spectrum([float(f) for f in fracs])


def generic_instance(
    rng: np.random.Generator,
    n_s: int,
    n_c: int,
    obs: ObservableSpectrum,
    max_redraws: int = 10,
) -> tuple[Spectrum, Spectrum]:
    """Draw collision-free rational spectra for the given observable.

    Generic means no two distinct block assignments share a yield value, so
    the distinct-value count equals the assignment count. Integer draws can
    collide; redraw up to `max_redraws` times before giving up.
    """
    sizes = [m * n_c for m in obs.multiplicities]
    for _ in range(max_redraws):
        sys = random_rational_spectrum(rng, n_s)
        ctrl = random_rational_spectrum(rng, n_c, denominator=991)
        products = [
            Fraction(a) * Fraction(b)
            for a in _rationalize(sys.values)
            for b in _rationalize(ctrl.values)
        ]
        if len(set(products)) != len(products):
            continue
        n_assign = count_band_assignments(products, sizes)
        if count_critical_values_bruteforce(sys, ctrl, obs) == n_assign:
            return sys, ctrl
    raise TooLarge(f"no collision-free spectra found in {max_redraws} redraws")
