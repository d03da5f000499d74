"""Identifiability analysis for unlinked linear regression."""

from .distributions import (
    Affine,
    Distribution,
    Elliptical,
    Empirical,
    Exponential,
    Gamma,
    Gaussian,
    Laplace,
    NoiseSpec,
    PointMass,
    ProblemSpec,
    ScalingRecord,
    Spherical,
    StudentT,
    Uniform,
    convolution_family_tag,
    noise_admissible,
    raw_moment,
    sample,
    standardize,
    standardize_dist,
)
from .iid import (
    LinnikReport,
    MarcinkiewiczVerdict,
    TauAnalysis,
    ghurye_olkin_check,
    linnik_check,
    marcinkiewicz_verdict,
    tau_eval,
    tau_roots,
    tau_table,
)
from .ica import (
    ICAVerdict,
    MixingProblem,
    collapse_counterexample,
    ica_verdict,
    pairwise_dependent_columns,
)
from .moments import MomentTable, moments_match_up_to, projected_moment
from .noniid import (
    FourthMomentReport,
    FourthMomentVerdict,
    PartitionAnalysis,
    Qualifier,
    SignFlipOutcome,
    SolutionSet,
    SolutionSetKind,
    convolution_alternatives,
    elliptical_solution_set,
    fourth_moment_test,
    fourth_moment_weights,
    gamma_gaussian_check,
    recursive_partition_analysis,
    scale_family_orbit,
    sign_flip_refine,
)
from .oracle import OracleConfig, OracleRecord, verify_candidate, verify_joint
from .verdict import IdentifiabilityVerdict, VerdictClass, analyze

__version__ = "0.1.0"
