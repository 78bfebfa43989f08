# Beliefs package

from .compatibility import (
    BeliefConstraint,
    BeliefSearchResult,
    CompatibilityReport,
    belief_constraints,
    check_belief_compatibility,
    conflict_witness,
    find_beliefs,
)
from .inada import corner_deviation_test, deviation_bundle, find_violating_epsilon, inada_limit
