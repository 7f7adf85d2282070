"""Parameter-free dynamic online learning by sparse coding on temporal dictionaries.

The package turns unconstrained dynamic online convex optimization into a
collection of static parameter-free problems, one per column of a temporal
feature dictionary (Haar wavelets, Fourier harmonics, or the identity), and
ships the transform/statistics machinery used to verify the regret behavior
empirically.
"""

from .analysis import (
    PowerLawFit,
    dft_magnitudes,
    fitted_magnitudes,
    haar_magnitudes,
    log_log_slope,
    power_law_fit,
    write_fit_data,
    write_fit_plot,
)
from .dictionaries import (
    ALLONE,
    ActiveFeature,
    FourierDictionary,
    HaarDictionary,
    HaarIndex,
    IdentityDictionary,
    MatrixDictionary,
    fourier_features,
    haar_active_features,
    haar_column,
    haar_matrix,
    haar_support,
    identity_dictionary,
)
from .errors import (
    InvalidParameterError,
    LipschitzViolationError,
    ResourceLimitError,
)
from .freegrad import FreeGrad, freegrad_regret_bound, log_prediction_magnitude
from .harness import (
    AbsoluteLossEnvironment,
    GameTrace,
    LinearEnvironment,
    RegretResult,
    SignAdversaryEnvironment,
    ZeroEnvironment,
    dynamic_regret,
    example_comparator,
    fine_tune,
    gen_switching_series,
    load_series,
    run_game,
    write_series,
    zeroth_order_hold,
)
from .learners import AnytimeHaarOLR, FeatureLearner, HaarOLR, SparseCoder
from .stats import (
    ComparatorStats,
    comparator_stats,
    power_law_sparsity,
    sizen_bound,
    sparsity_measure,
)
from .transform import (
    HaarCoefficients,
    allone_sequence,
    detail_sequence,
    haar_analyze,
    haar_synthesize,
    local_average,
    scale_regularity,
)

__version__ = "0.1.0"

__all__ = [
    "ALLONE",
    "AbsoluteLossEnvironment",
    "ActiveFeature",
    "AnytimeHaarOLR",
    "ComparatorStats",
    "FeatureLearner",
    "FourierDictionary",
    "FreeGrad",
    "GameTrace",
    "HaarCoefficients",
    "HaarDictionary",
    "HaarIndex",
    "HaarOLR",
    "IdentityDictionary",
    "InvalidParameterError",
    "LinearEnvironment",
    "LipschitzViolationError",
    "MatrixDictionary",
    "PowerLawFit",
    "RegretResult",
    "ResourceLimitError",
    "SignAdversaryEnvironment",
    "SparseCoder",
    "ZeroEnvironment",
    "allone_sequence",
    "comparator_stats",
    "detail_sequence",
    "dft_magnitudes",
    "dynamic_regret",
    "example_comparator",
    "fine_tune",
    "fitted_magnitudes",
    "fourier_features",
    "freegrad_regret_bound",
    "gen_switching_series",
    "haar_active_features",
    "haar_analyze",
    "haar_column",
    "haar_magnitudes",
    "haar_matrix",
    "haar_support",
    "haar_synthesize",
    "identity_dictionary",
    "load_series",
    "local_average",
    "log_log_slope",
    "log_prediction_magnitude",
    "power_law_fit",
    "power_law_sparsity",
    "run_game",
    "scale_regularity",
    "sizen_bound",
    "sparsity_measure",
    "write_fit_data",
    "write_fit_plot",
    "write_series",
    "zeroth_order_hold",
]
