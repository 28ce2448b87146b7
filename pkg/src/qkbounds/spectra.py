"""Validated spectral data for the plant, the controller, and their composite.

Every bound in this package is a function of three ingredients: the sorted
probability spectrum of the plant state, the sorted probability spectrum of
the controller state, and the eigenvalue/degeneracy structure of the target
observable. These types pin the sorting and normalization conventions once,
so the formula modules never have to re-check them.
"""

from __future__ import annotations

import math
from dataclasses import dataclass
from enum import Enum
from typing import Sequence

from .errors import DimensionMismatch, NegativeEigenvalue, NotNormalized, ValidationError

# Absolute threshold below which an eigenvalue counts as zero and two
# eigenvalues count as degenerate. Well above double-precision noise at
# desk-scale dimensions, well below any physically meaningful population.
ZERO_TOL = 1e-12

# Admission gate on |sum - 1| for raw spectra. Inputs inside the gate are
# renormalized so stored spectra meet the tighter 1e-12 internal invariant.
NORMALIZATION_TOL = 1e-9


class StateClass(Enum):
    """Coarse classification of a state by its spectrum."""

    PURE = "Pure"
    MIXED_NONDEGENERATE = "MixedNondegenerate"
    MAXIMALLY_MIXED = "MaximallyMixed"
    MIXED_DEGENERATE = "MixedDegenerate"


@dataclass(frozen=True)
class Spectrum:
    """Probability spectrum of a density matrix, in nondecreasing order.

    Construct through :func:`make_spectrum` unless the values are already
    clamped, sorted, and normalized; the constructor only verifies.
    """

    values: tuple[float, ...]

    def __post_init__(self):
        if not self.values:
            raise ValidationError("spectrum is empty")
        if any(v < 0.0 for v in self.values):
            raise NegativeEigenvalue(f"negative entry in {self.values}")
        if any(b < a for a, b in zip(self.values, self.values[1:])):
            raise ValidationError(f"values not sorted nondecreasing: {self.values}")
        total = math.fsum(self.values)
        if abs(total - 1.0) > ZERO_TOL:
            raise NotNormalized(f"values sum to {total!r}, not 1")

    @property
    def dim(self) -> int:
        return len(self.values)

    @property
    def rank(self) -> int:
        """Number of entries above the zero threshold."""
        return sum(1 for v in self.values if v > ZERO_TOL)

    @property
    def min_value(self) -> float:
        return self.values[0]

    @property
    def max_value(self) -> float:
        return self.values[-1]


@dataclass(frozen=True)
class ObservableSpectrum:
    """Distinct eigenvalues of a target observable with their multiplicities.

    `distinct` is strictly increasing; `multiplicities[i]` counts how many
    times `distinct[i]` occurs in the full spectrum of the observable.
    """

    distinct: tuple[float, ...]
    multiplicities: tuple[int, ...]

    def __post_init__(self):
        if not self.distinct:
            raise DimensionMismatch("observable needs at least one eigenvalue")
        if len(self.distinct) != len(self.multiplicities):
            raise DimensionMismatch(
                f"{len(self.distinct)} eigenvalues, {len(self.multiplicities)} multiplicities"
            )
        if any(b <= a for a, b in zip(self.distinct, self.distinct[1:])):
            raise DimensionMismatch(f"distinct eigenvalues not strictly increasing: {self.distinct}")
        if any(n < 1 or n != int(n) for n in self.multiplicities):
            raise DimensionMismatch(f"multiplicities must be positive integers: {self.multiplicities}")

    @property
    def dim(self) -> int:
        return sum(self.multiplicities)

    @property
    def r(self) -> int:
        """Number of distinct eigenvalues."""
        return len(self.distinct)

    def expanded(self) -> tuple[float, ...]:
        """Full eigenvalue list, each value repeated per its multiplicity, nondecreasing."""
        out: list[float] = []
        for value, n in zip(self.distinct, self.multiplicities):
            out.extend([value] * n)
        return tuple(out)


@dataclass(frozen=True)
class CompositeSpectra:
    """Spectra of the joint plant+controller input to the yield functional.

    `big_p` holds the sorted products of plant and controller eigenvalues.
    `big_theta` is the observable lifted to the composite space: each distinct
    eigenvalue appears with its plant multiplicity times the controller
    dimension, nondecreasing.
    """

    big_p: Spectrum
    big_theta: tuple[float, ...]

    def __post_init__(self):
        if self.big_p.dim != len(self.big_theta):
            raise DimensionMismatch(
                f"composite spectra disagree on dimension: {self.big_p.dim} vs {len(self.big_theta)}"
            )

    @property
    def dim(self) -> int:
        return self.big_p.dim


def make_spectrum(raw: Sequence[float]) -> Spectrum:
    """Build a validated Spectrum from raw probabilities.

    Entries in [-1e-12, 0) are clamped to zero before summation. Rejects
    entries below the negativity tolerance and sums off by more than 1e-9;
    admitted input is renormalized so the stored sum is exactly one.
    """
    if len(raw) == 0:
        raise NotNormalized("empty spectrum")
    cleaned = []
    for v in raw:
        v = float(v)
        if v < -ZERO_TOL:
            raise NegativeEigenvalue(f"eigenvalue {v!r} below -{ZERO_TOL}")
        cleaned.append(0.0 if v < 0.0 else v)
    total = math.fsum(cleaned)
    if abs(total - 1.0) > NORMALIZATION_TOL:
        raise NotNormalized(f"spectrum sums to {total!r}")
    return Spectrum(tuple(sorted(v / total for v in cleaned)))


def classify(s: Spectrum) -> StateClass:
    """Classify a spectrum as pure, maximally mixed, or (non)degenerate mixed.

    All comparisons use the 1e-12 degeneracy tolerance. A lone value of 1
    is pure even when the remaining entries are zeros.
    """
    ones = sum(1 for v in s.values if abs(v - 1.0) <= ZERO_TOL)
    if ones == 1 and s.rank == 1:
        return StateClass.PURE
    uniform = 1.0 / s.dim
    if all(abs(v - uniform) <= ZERO_TOL for v in s.values):
        return StateClass.MAXIMALLY_MIXED
    if all(b - a > ZERO_TOL for a, b in zip(s.values, s.values[1:])):
        return StateClass.MIXED_NONDEGENERATE
    return StateClass.MIXED_DEGENERATE


def composite(sys: Spectrum, ctrl: Spectrum, obs: ObservableSpectrum) -> CompositeSpectra:
    """Tensor the plant and controller spectra and lift the observable.

    The product state's eigenvalues are exactly the pairwise products of
    plant and controller eigenvalues; the lifted observable repeats each
    distinct eigenvalue controller-dimension times per unit of plant
    multiplicity.
    """
    if obs.dim != sys.dim:
        raise DimensionMismatch(f"observable dim {obs.dim} != system dim {sys.dim}")
    products = [p * q for p in sys.values for q in ctrl.values]
    big_p = make_spectrum(products)
    big_theta: list[float] = []
    for value, n in zip(obs.distinct, obs.multiplicities):
        big_theta.extend([value] * (n * ctrl.dim))
    return CompositeSpectra(big_p, tuple(big_theta))


def hartley_entropy(s: Spectrum) -> float:
    """log2 of the spectrum's rank (zero threshold 1e-12)."""
    return math.log2(s.rank)
