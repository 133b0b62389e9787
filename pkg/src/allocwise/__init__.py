"""allocwise: multi-criteria resource allocation planner.

Derives criterion weights from pairwise judgment matrices (with a
consistency test), screens features for collinearity, splits a
district's resources across three facility tiers with a
crowd-gathering penalty, and forecasts demand with a from-scratch
LSTM on daily increments.
"""

from .ahp import (
    ConsistencyReport,
    JudgmentMatrix,
    ValidationReport,
    WeightVector,
    analyze,
    consistency_index,
    consistency_ratio,
    principal_eigen,
    random_index,
    validate_matrix,
)
from .allocation import (
    AllocationResult,
    FacilityTier,
    TierKind,
    allocate_district,
    apply_gathering_penalty,
    ratio_normalize,
    score_tier,
)
from .diagnostics import (
    CollinearityReport,
    FeatureColumn,
    OlsFit,
    log10_column,
    ols_fit,
    vif_pair,
)
from .errors import AllocwiseError
from .forecasting import (
    IncrementSeries,
    ScalerSpec,
    SeriesModel,
    TimeSeries,
    fit_forecaster,
    forecast,
    from_increments,
    load_checkpoint,
    make_windows,
    save_checkpoint,
    to_increments,
)
from .store import Dataset, FeatureTable, Scenario, Store, bundled_examples, import_csv

__version__ = "1.0.0"

__all__ = [
    "AllocationResult",
    "AllocwiseError",
    "CollinearityReport",
    "ConsistencyReport",
    "Dataset",
    "FacilityTier",
    "FeatureColumn",
    "FeatureTable",
    "IncrementSeries",
    "JudgmentMatrix",
    "OlsFit",
    "ScalerSpec",
    "Scenario",
    "SeriesModel",
    "Store",
    "TierKind",
    "TimeSeries",
    "ValidationReport",
    "WeightVector",
    "__version__",
    "allocate_district",
    "analyze",
    "apply_gathering_penalty",
    "bundled_examples",
    "consistency_index",
    "consistency_ratio",
    "fit_forecaster",
    "forecast",
    "from_increments",
    "import_csv",
    "load_checkpoint",
    "log10_column",
    "make_windows",
    "ols_fit",
    "principal_eigen",
    "random_index",
    "ratio_normalize",
    "save_checkpoint",
    "score_tier",
    "to_increments",
    "validate_matrix",
    "vif_pair",
]
