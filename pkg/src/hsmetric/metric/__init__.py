from .blnorm import LPFailure, W1INF_MODES, bounded_lipschitz
from .brackets import (
    TOL_METRIC,
    Budget,
    DistanceBracket,
    InvalidNuCandidate,
    J_bracket,
    dhat_bracket,
    euler_distance,
    euler_quotient_bracket,
    eulerian_norm,
    quotient_lower_bound,
)
from .distance import (
    CONSTANT_ALPHA_RATE,
    TERM_NAMES,
    GResult,
    MetricReport,
    SegmentClassification,
    classify_segments,
    compute_G,
    lipschitz_constants,
    semi_metric_D,
)
from .quotient import quotient_metric

__all__ = [
    "CONSTANT_ALPHA_RATE",
    "TERM_NAMES",
    "TOL_METRIC",
    "W1INF_MODES",
    "Budget",
    "DistanceBracket",
    "GResult",
    "InvalidNuCandidate",
    "J_bracket",
    "LPFailure",
    "MetricReport",
    "SegmentClassification",
    "bounded_lipschitz",
    "classify_segments",
    "compute_G",
    "dhat_bracket",
    "euler_distance",
    "euler_quotient_bracket",
    "eulerian_norm",
    "lipschitz_constants",
    "quotient_lower_bound",
    "quotient_metric",
    "semi_metric_D",
]
