"""Goodness-of-fit testing for growing-graph models via non-stationary sampling."""

from .gof import (
    FixedAlpha,
    RadiusEstimate,
    SampledAlpha,
    TestConfig,
    TestReport,
    dn_estimate,
    sampling_radius_estimate,
    statistic_samples,
    test_dynamic_graph,
    test_statistic,
)
from .models import (
    DegreeState,
    ModelSpec,
    ProbVector,
    Trajectory,
    affine_pref_attach,
    pref_attach,
    read_trajectory,
    replay,
    sample_trajectory,
    step_distribution,
    uniform_attach,
    write_trajectory,
)
from .sampling import (
    CountingFunction,
    EmpiricalMeasure,
    ProbePlan,
    counting_function,
    empirical_measure,
    sample_probe_points,
    tv_dense,
    tv_distance,
    tv_via_counting,
)

__version__ = "0.1.0"

__all__ = [
    "DegreeState",
    "ModelSpec",
    "ProbVector",
    "Trajectory",
    "affine_pref_attach",
    "pref_attach",
    "read_trajectory",
    "replay",
    "sample_trajectory",
    "step_distribution",
    "uniform_attach",
    "write_trajectory",
    "CountingFunction",
    "EmpiricalMeasure",
    "ProbePlan",
    "counting_function",
    "empirical_measure",
    "sample_probe_points",
    "tv_dense",
    "tv_distance",
    "tv_via_counting",
    "FixedAlpha",
    "RadiusEstimate",
    "SampledAlpha",
    "TestConfig",
    "TestReport",
    "dn_estimate",
    "sampling_radius_estimate",
    "statistic_samples",
    "test_dynamic_graph",
    "test_statistic",
    "__version__",
]
