"""Discrete memoryless channels: bounds on explicit joints, channel
conditions, exact polygons and brute-force region optimization."""

from .channel import (DiscreteChannelSpec, dirty_xor_channel, noiseless_pair_channel,
                      random_channel, xor_erasure_channel)
from .joint import (JointDistribution, check_factorization, factorization_residual,
                    from_factors, markov_residual, random_joint)
from .polygon import HalfPlane, RatePolygon, rational
from .bounds import (EVALUATORS, RegionIneqs, TwoCaseResult, eval_cor1_inner, eval_expr,
                     eval_lemma1, eval_outer_bothstate, eval_thm13_capacity, eval_thm1_inner,
                     eval_thm2_outer, eval_thm3, eval_thm4_capacity, eval_thm5_capacity,
                     two_case_reduction_check)
from .conditions import (Verdict, check_condition, check_semidet, condition_residual,
                         falsify_less_noisy)
from .optimize import BOUND_INFO, OptimizeResult, SearchSpec, compositions, optimize_region
