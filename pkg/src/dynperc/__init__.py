"""Monte Carlo toolkit for percolation in mobile random geometric graphs."""

__version__ = "0.1.0"

from .errors import (
    BisectionError,
    InsufficientDataError,
    InvalidParameterError,
    ResourceLimitError,
    SchemaError,
    SupercriticalityError,
)
from .geometry import Ball, Box, PointSet, RngStream, ball_volume, centered_box, sample_homogeneous_poisson
from .mobility import DisplacementDistribution, build_crw_trajectory, build_two_scale_trajectory
from .connectivity import GilbertGraph, build_graph, graph_distance, k_hop_connected, percolates_M
from .estimators import (
    Estimate,
    PercolationParams,
    estimate_conditional_theta,
    estimate_lambda_c,
    estimate_phase_intensity,
    estimate_stretch_factor,
    estimate_theta_M,
    phase_intensity_profile,
)
from .dynamics import (
    TEST_FUNCTIONS,
    InfraConfig,
    MeasureSample,
    TimeGrid,
    TwoScaleConfig,
    estimate_covariance_decay,
    simulate_khop_measure,
    simulate_percolation_measure,
)
from .limits import (
    BirthDeathProcess,
    BrownianPath,
    LimitMeasureSample,
    RenewalMeasureSample,
    dense_limit_constant,
    sample_birth_death,
    sample_brownian_path,
    sample_critical_limit,
    sample_limit_percolation_measure,
    sample_renewal_measure_nu,
    sample_sparse_limit,
    slow_config_at,
)
