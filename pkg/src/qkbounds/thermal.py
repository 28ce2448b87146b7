"""Thermal (Gibbs) spectra and the worked spin-bath scenarios.

All computations run in dimensionless variables: energies are given in
units of a reference frequency and the temperature enters through the
single scale lam = (level spacing)/(temperature), with hbar and the
Boltzmann constant set to one. Raw-unit callers convert at the boundary.

Controllers made of M identical spins have 2^M-dimensional state spaces but
only M+1 distinct populations, so everything here works on level-grouped
(value, multiplicity) spectra and never materializes exponentially long
lists.
"""

from __future__ import annotations

import math
from dataclasses import dataclass
from typing import Sequence

from .bounds import ckb, kinematic_bounds_weighted
from .errors import DimensionMismatch, NonPositiveTemperature
from .spectra import ObservableSpectrum, Spectrum, make_spectrum

# Observables of the two worked scenarios: a single-spin z measurement and
# the two projectors of the four-level, two-spin plant.
SIGMA_Z = ObservableSpectrum((-1.0, 1.0), (1, 1))
PI_0 = ObservableSpectrum((0.0, 1.0), (2, 2))
PI_1 = ObservableSpectrum((0.0, 1.0), (3, 1))

# Plant level data for the worked scenarios, energies in frequency units.
TWO_LEVEL_ENERGIES = (0.5, -0.5)
TWO_SPIN_ENERGIES = (1.0, 0.0, -1.0)
TWO_SPIN_MULTIPLICITIES = (1, 2, 1)


@dataclass(frozen=True)
class LevelSet:
    """Energy levels with degeneracies, in dimensionless units."""

    energies: tuple[float, ...]
    multiplicities: tuple[int, ...]

    def __post_init__(self):
        if len(self.energies) != len(self.multiplicities):
            raise DimensionMismatch(
                f"{len(self.energies)} energies vs {len(self.multiplicities)} multiplicities"
            )
        if any(m < 1 or m != int(m) for m in self.multiplicities):
            raise DimensionMismatch(f"multiplicities must be positive integers: {self.multiplicities}")

    @property
    def dim(self) -> int:
        return sum(self.multiplicities)

    def expanded_nonincreasing(self) -> tuple[float, ...]:
        """Energies repeated per multiplicity, largest first.

        This order pairs index k with the k-th smallest thermal population.
        """
        out: list[float] = []
        for e, m in sorted(zip(self.energies, self.multiplicities), reverse=True):
            out.extend([e] * m)
        return tuple(out)


@dataclass(frozen=True)
class ThermalModel:
    """A level set at inverse-temperature scale lam.

    lam = 0 is the infinite-temperature (maximally mixed) limit; lam =
    math.inf is the zero-temperature limit with all mass on the ground
    level. Populations are proportional to exp(-lam * energy).
    """

    levels: LevelSet
    lam: float

    def __post_init__(self):
        if self.lam < 0 or math.isnan(self.lam):
            raise NonPositiveTemperature(f"inverse-temperature scale {self.lam!r} must be >= 0")


def level_populations(levels: LevelSet, lam: float) -> list[tuple[float, int]]:
    """Grouped Boltzmann populations, one (probability, multiplicity) per level.

    The exponent is shifted by the ground energy before exponentiation so
    large lam never overflows. Returned sorted by probability ascending.
    """
    if lam < 0 or math.isnan(lam):
        raise NonPositiveTemperature(f"inverse-temperature scale {lam!r} must be >= 0")
    if math.isinf(lam):
        e_min = min(levels.energies)
        ground = [(e, m) for e, m in zip(levels.energies, levels.multiplicities) if e == e_min]
        mult = sum(m for _, m in ground)
        out = [(0.0, m) for e, m in zip(levels.energies, levels.multiplicities) if e != e_min]
        out.extend((1.0 / mult, m) for _, m in ground)
        return sorted(out)
    e_min = min(levels.energies)
    boltzmann = [math.exp(-lam * (e - e_min)) for e in levels.energies]
    z = math.fsum(b * m for b, m in zip(boltzmann, levels.multiplicities))
    return sorted((b / z, m) for b, m in zip(boltzmann, levels.multiplicities))


def thermal_spectrum(model: ThermalModel) -> Spectrum:
    """Expand a thermal model into a full validated spectrum."""
    values: list[float] = []
    for prob, mult in level_populations(model.levels, model.lam):
        values.extend([prob] * mult)
    return make_spectrum(values)


def spin_bath_levels(m_spins: int) -> LevelSet:
    """Level structure of M identical spin-1/2 particles with equal frequency.

    M+1 equally spaced levels at k = -M/2, ..., M/2 (unit steps, half-integer
    for odd M) with binomial degeneracies; total dimension 2^M.
    """
    if m_spins < 1:
        raise DimensionMismatch(f"spin count {m_spins} must be >= 1")
    energies = tuple(k - m_spins / 2.0 for k in range(m_spins + 1))
    mults = tuple(math.comb(m_spins, k) for k in range(m_spins + 1))
    return LevelSet(energies, mults)


def thermal_surpass(
    sys_levels: LevelSet,
    t_s: float,
    ctrl_levels: LevelSet,
    t_c: float,
    obs: ObservableSpectrum,
) -> bool:
    """Frequency-domain test for beating the upper classical bound.

    For thermal states the band-overlap condition becomes a comparison of
    energy scales: the controller's spectral width over its temperature must
    exceed some band-boundary gap of the plant spectrum over the plant
    temperature. Evaluated in the divided form so an infinite controller
    temperature cleanly yields False.
    """
    for t, who in ((t_s, "system"), (t_c, "controller")):
        if not t > 0 or math.isnan(t):
            raise NonPositiveTemperature(f"{who} temperature {t!r} must be positive")
    if math.isinf(t_s):
        raise NonPositiveTemperature("infinite system temperature: use the spectral-form predicate")
    if sys_levels.dim != obs.dim:
        raise DimensionMismatch(f"observable dim {obs.dim} != system dim {sys_levels.dim}")
    if obs.r < 2:
        return False
    omega = sys_levels.expanded_nonincreasing()
    width = (max(ctrl_levels.energies) - min(ctrl_levels.energies)) / t_c
    mu = 0
    for n in obs.multiplicities[:-1]:
        mu += n
        if width > (omega[mu - 1] - omega[mu]) / t_s:
            return True
    return False


@dataclass(frozen=True)
class CurvePoint:
    """One sample of a bound-versus-controller-temperature curve."""

    lambda_c: float
    j_max: float
    j_min: float
    ckb_max: float
    gap_to_ckb: float


def _composite_groups(
    sys_probs: Sequence[tuple[float, int]], ctrl_probs: Sequence[tuple[float, int]]
) -> list[tuple[float, int]]:
    return sorted((p * q, mp * mq) for p, mp in sys_probs for q, mq in ctrl_probs)


def _bound_curve(
    sys_spec: Spectrum,
    obs: ObservableSpectrum,
    bath: LevelSet,
    grid: Sequence[float],
) -> list[CurvePoint]:
    ckb_max, _ = ckb(sys_spec, obs)
    n_c = bath.dim
    theta_groups = [(v, m * n_c) for v, m in zip(obs.distinct, obs.multiplicities)]
    sys_groups = [(v, 1) for v in sys_spec.values]
    points = []
    for lam_c in grid:
        ctrl_groups = level_populations(bath, lam_c)
        p_groups = _composite_groups(sys_groups, ctrl_groups)
        j_max, j_min = kinematic_bounds_weighted(p_groups, theta_groups)
        points.append(CurvePoint(float(lam_c), j_max, j_min, ckb_max, j_max - ckb_max))
    return points


def figure3_curve(lambda_s: float, m_spins: int, grid: Sequence[float]) -> list[CurvePoint]:
    """Kinematic bounds of a thermal two-level plant against a spin-bath controller.

    The plant measures a single-spin z observable; the controller is a bath
    of `m_spins` identical spins whose inverse-temperature scale sweeps the
    grid. Below the threshold lambda_s / m_spins the upper bound sits on the
    classical value tanh(lambda_s / 2); above it the bound grows toward the
    observable maximum of 1.
    """
    sys_spec = thermal_spectrum(ThermalModel(LevelSet(TWO_LEVEL_ENERGIES, (1, 1)), lambda_s))
    return _bound_curve(sys_spec, SIGMA_Z, spin_bath_levels(m_spins), grid)


def figure4_curve(
    lambda_s: float, m_spins: int, obs_choice: str, grid: Sequence[float]
) -> list[CurvePoint]:
    """Bound-minus-classical-bound curves for the two-spin plant.

    `obs_choice` selects the projector: "Pi0" (onto the doubly degenerate
    middle energy pair, surpassed at any finite bath temperature) or "Pi1"
    (onto the top state, surpassed only past the threshold
    lambda_s / m_spins).
    """
    try:
        obs = {"Pi0": PI_0, "Pi1": PI_1}[obs_choice]
    except KeyError:
        raise DimensionMismatch(f"unknown observable choice {obs_choice!r}; use Pi0 or Pi1") from None
    levels = LevelSet(TWO_SPIN_ENERGIES, TWO_SPIN_MULTIPLICITIES)
    sys_spec = thermal_spectrum(ThermalModel(levels, lambda_s))
    return _bound_curve(sys_spec, obs, spin_bath_levels(m_spins), grid)
