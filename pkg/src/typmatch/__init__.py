"""Typicality matching for pairs of correlated marked random graphs."""

from .dist import (JointEdgeDistribution, correlated_family, load_distribution, marginals,
                   mutual_information, sample_pairs)
from .graph import (CmperInstance, LabeledGraph, anonymize, generate_cmer, make_instance,
                    read_graph, relabel, write_graph)
from .matcher import (MatchConfig, MatchResult, auto_epsilon, candidate_set_exhaustive, match,
                      match_greedy, typicality_score)
from .perm import (CycleType, Permutation, apply, apply_inverse, compose, cycle_decomposition,
                   fixed_point_count, invert, labeling_mismatch, random_permutation,
                   standard_permutation)
from .typicality import (JointType, Theorem1Bound, TypicalityReport, exact_perm_typicality_prob,
                         is_typical, joint_type, mc_perm_typicality_prob, theorem1_bound)

__version__ = "0.1.0"
