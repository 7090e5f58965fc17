"""Deterministic approximation of the probability that none of a set of
partially dependent events occurs in a finite product space."""

from .errors import (DegenerateProbabilityError, InputError, IntersectProbError, NumericError,
                     PlanConstructionError, PredicateSyntaxError, ResourceError)
from .interpolate import (Estimate, Guarantee, InterpolationPlan, build_phi, compose_series,
                          estimate_log_intersection, load_plan, log_taylor, shipped_plan)
from .jointprob import IntersectionSeries, JointProbability, event_probability, joint_probability, sigma_series
from .model import (CoordinateSpace, DependencyGraph, Event, ProductSpace, build_dependency_graph, check_lll,
                    check_smallness, normalize_support)
from .oracle import (RootReport, exact_intersection_probability, full_p_polynomial, random_instance,
                     root_localize)
from .predparse import compile_predicate, parse_predicate, unparse

__version__ = "0.1.0"
