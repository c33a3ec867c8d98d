"""cvdcnet: continuous-variable dense-coding network analysis.

Gaussian phase-space simulation of multi-sender dense coding over
beam-splitter chain networks, with exact capacity formulas, Monte Carlo
cross-checks, and quantum-advantage region analysis.
"""

from .phase_space import (
    GaussianState,
    PhysicalityCheck,
    Quadrature,
    QuadratureSelection,
    SymplecticTransform,
    apply_symplectic,
    beam_splitter,
    displace,
    homodyne_moments,
    is_physical,
    marginal,
    single_mode_squeezer,
    symplectic_eigenvalues,
    symplectic_form,
    vacuum,
    wigner,
)
from .resource_prep import (
    CONVENTION_FINGERPRINT,
    ResourceSpec,
    alternating_pattern,
    prepare_resource,
    preparation_transform,
    three_mode_reference_cov,
)
from .dc_protocol import (
    CapacityReport,
    EncodingPlan,
    LinearGaussianChannel,
    MCEstimate,
    OptimalParams,
    build_channel,
    capacity,
    decode_transform,
    decoding_symplectic,
    encode,
    encoding_matrix,
    message_density,
    mutual_information,
    mutual_information_mc,
    optimal_params,
    photon_constraint,
)
from .advantage_analysis import (
    MinThresholdResult,
    NoAdvantageError,
    RegionScan,
    TauInterval,
    asymptotic_ratio,
    break_even_squeezing,
    classical_capacity,
    min_threshold_energy,
    quantum_advantage,
    region_scan,
    tau_boundaries,
    threshold_energy,
)
from .cli_scan import RunConfig, main, parse_region, run, serialize_region

__version__ = "0.1.0"

__all__ = [
    "GaussianState",
    "PhysicalityCheck",
    "Quadrature",
    "QuadratureSelection",
    "SymplecticTransform",
    "apply_symplectic",
    "beam_splitter",
    "displace",
    "homodyne_moments",
    "is_physical",
    "marginal",
    "single_mode_squeezer",
    "symplectic_eigenvalues",
    "symplectic_form",
    "vacuum",
    "wigner",
    "CONVENTION_FINGERPRINT",
    "ResourceSpec",
    "alternating_pattern",
    "prepare_resource",
    "preparation_transform",
    "three_mode_reference_cov",
    "CapacityReport",
    "EncodingPlan",
    "LinearGaussianChannel",
    "MCEstimate",
    "OptimalParams",
    "build_channel",
    "capacity",
    "decode_transform",
    "decoding_symplectic",
    "encode",
    "encoding_matrix",
    "message_density",
    "mutual_information",
    "mutual_information_mc",
    "optimal_params",
    "photon_constraint",
    "MinThresholdResult",
    "NoAdvantageError",
    "RegionScan",
    "TauInterval",
    "asymptotic_ratio",
    "break_even_squeezing",
    "classical_capacity",
    "min_threshold_energy",
    "quantum_advantage",
    "region_scan",
    "tau_boundaries",
    "threshold_energy",
    "RunConfig",
    "main",
    "parse_region",
    "run",
    "serialize_region",
    "__version__",
]
