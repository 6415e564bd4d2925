"""Two-agent envy-free division of indivisible objects via the undercut procedure."""

from .bundles import MinimalBundleFamily, is_acceptable, is_minimal_bundle, minimal_bundles
from .model import (
    ObjectSet,
    ObjectUniverse,
    ParseError,
    PreferenceModel,
    Profile,
    ValidationError,
    ValidationReport,
    all_desirable,
    compare,
    is_responsive,
    is_separable,
    load_profile,
    parse_profile,
    restrict,
    serialize_profile,
    utility,
)
from .oracle import (
    SizeLimit,
    Split,
    SplitClassification,
    classify_split,
    enumerate_ef_splits,
    exists_ef,
    exists_nontrivial_ef,
)
from .undercut import (
    InternalInvariantViolation,
    Outcome,
    ReplayError,
    TieError,
    generation_phase,
    original_undercut,
    propose,
    replay,
    respond,
    run_core,
    simplified_undercut,
)

__version__ = "0.1.0"
