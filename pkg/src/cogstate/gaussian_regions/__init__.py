"""Closed-form Gaussian bounds, frontier sweeps and boundary certification."""

from .params import (CaseTag, GaussianChannelParams, RatePair, SplitParams,
                     classify_case, equality_split)
from .closed_forms import (BoundEval, DpcAux, cap_both_rx_case2, inner1a_rates,
                           inner1b_rates, inner2_rates, outer1a_rates, outer1b_rates,
                           outer2_rates, thm12_rates)
from .frontier import (BOUNDS, MATCHING_OUTER, FrontierPoint, GridSpec, RateFrontier,
                       capacity_region, frontier, pareto_envelope)
from .certify import certify_case1a, certify_case1b, certify_case2
