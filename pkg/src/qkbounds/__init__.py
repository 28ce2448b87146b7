"""Kinematic bounds on quantum control yields for plants with quantum controllers.

Computes the classical and composite kinematic bounds on observable
expectation values, decides when a quantum controller surpasses the
classical bound or reaches the extreme observable eigenvalue, tabulates
control-landscape topology characteristics with an exact counting oracle,
builds thermal spectra for the worked spin-bath scenarios, and certifies
everything numerically by gradient ascent over the unitary group.
"""

__version__ = "0.1.0"

from .bounds import (
    BandStructure,
    BoundsReport,
    SurpassResult,
    band_structure,
    bounds_report,
    ckb,
    ckb_permutation,
    min_pure_controller_dim,
    critical_value,
    kinematic_bounds,
    kinematic_bounds_weighted,
    qubit_reach_condition,
    random_observable,
    random_spectrum,
    reach_qkb,
    surpass_ckb,
    surpass_ckb_bandwidth_form,
)
from .errors import (
    DimensionMismatch,
    InvalidPermutation,
    NegativeEigenvalue,
    NonPositiveTemperature,
    NotHermitian,
    NotNormalized,
    NotUnitary,
    TooLarge,
    UnsupportedClass,
    ValidationError,
)
from .spectra import (
    CompositeSpectra,
    ObservableSpectrum,
    Spectrum,
    StateClass,
    classify,
    composite,
    hartley_entropy,
    make_spectrum,
)
from .thermal import (
    PI_0,
    PI_1,
    SIGMA_Z,
    CurvePoint,
    LevelSet,
    ThermalModel,
    figure3_curve,
    figure4_curve,
    level_populations,
    spin_bath_levels,
    thermal_spectrum,
    thermal_surpass,
)
from .topology import (
    TopologyReport,
    count_band_assignments,
    count_critical_values_bruteforce,
    enumerate_critical_values,
    generic_instance,
    random_rational_spectrum,
    topology_from_table,
)
from .verifier import (
    AscentConfig,
    AscentTrace,
    CertificateReport,
    HermitianPair,
    certify_bounds,
    haar_unitary,
    hermitian_eigenvalues,
    jacobi_eigh,
    riemannian_ascent,
    yield_of,
)
