"""Secret-key rates for correlated sources: exact interaction measures,
omniscience rates, budgeted-capacity bounds, one-way two-user curves, and
finite-blocklength linear schemes."""

from .capacity import (
    LowerBoundResult,
    LowerBoundWitness,
    PinCurves,
    alpha_s_lower_bound,
    duality_upper_bound,
    gk_floor,
    lower_bound_curve,
    pin_curves,
    sandwich,
    witness_at,
)
from .curves import CapacityCurve, constant_curve, upper_concave_envelope
from .errors import InternalCheckError, ResourceCapError, SkalcError, ValidationError
from .mmi import MmiResult, mmi, residual_independence_gamma
from .omniscience import RateVector, RcoResult, rco, unconstrained_capacity
from .protocol_sim import (
    BitSourceInstance,
    LinearScheme,
    RandomBinning,
    TreePacking,
    random_binning_omniscience,
    scheme_from_json,
    scheme_to_json,
    tree_packing_scheme,
    verify,
)
from .source_model import (
    EdgeRestriction,
    HypergraphicalSource,
    JointPMF,
    conditional_entropy,
    entropy,
    gacs_korner,
    is_pin,
    load_source,
    parse_source,
    restrict,
)
from .two_user import (
    ChannelWitness,
    DualityReport,
    SweepResult,
    compressed_curve_one_sided,
    constrained_curve_one_way,
    duality_check,
    min_sufficient_statistic,
    mutual_information,
    one_way_complexity,
    run_sweep,
)

__version__ = "0.1.0"

__all__ = [
    "BitSourceInstance",
    "CapacityCurve",
    "ChannelWitness",
    "EdgeRestriction",
    "HypergraphicalSource",
    "InternalCheckError",
    "JointPMF",
    "LinearScheme",
    "LowerBoundResult",
    "LowerBoundWitness",
    "MmiResult",
    "PinCurves",
    "RandomBinning",
    "RateVector",
    "RcoResult",
    "ResourceCapError",
    "SkalcError",
    "SweepResult",
    "TreePacking",
    "ValidationError",
    "DualityReport",
    "alpha_s_lower_bound",
    "compressed_curve_one_sided",
    "conditional_entropy",
    "constant_curve",
    "constrained_curve_one_way",
    "duality_check",
    "duality_upper_bound",
    "entropy",
    "gacs_korner",
    "gk_floor",
    "is_pin",
    "load_source",
    "lower_bound_curve",
    "min_sufficient_statistic",
    "mmi",
    "mutual_information",
    "one_way_complexity",
    "parse_source",
    "pin_curves",
    "random_binning_omniscience",
    "rco",
    "residual_independence_gamma",
    "restrict",
    "run_sweep",
    "sandwich",
    "scheme_from_json",
    "scheme_to_json",
    "tree_packing_scheme",
    "unconstrained_capacity",
    "upper_concave_envelope",
    "verify",
    "witness_at",
]
