"""Space-time counterfactuals over finite models of localized events."""

from stc.geometry import (
    Boost,
    ConeRegion,
    SpacetimePoint,
    apply_boost,
    causally_precedes,
    enumerate_orderings,
    future_closure,
    region_contains_point,
    region_proper_subset,
    region_subset,
)
from stc.propositions import FALSE, TRUE, And, Atom, Const, Not, Or, Proposition
from stc.worlds import (
    EventVariable,
    ProductConstraint,
    Scenario,
    ScenarioError,
    TableConstraint,
    World,
    build_scenario,
    deviation_region,
    diff_points,
    enumerate_worlds,
    validate_free_choice,
)
from stc.semantics import (
    SupportSet,
    Verdict,
    any_frame_eval,
    compute_support,
    dstc_eval,
    dstc_eval_via_clause2,
    evaluate,
    frame_eval,
    free_choice_eval,
    is_closed,
    is_primary,
    lewis_alt_eval,
    phi_worlds,
    supports,
)
from stc.dsl import (
    DslError,
    QueryExpression,
    ScenarioDocument,
    parse_proposition,
    parse_query,
    parse_scenario,
    serialize_scenario,
)
from stc.bundled import EXAMPLES, load_example

__version__ = "0.1.0"
