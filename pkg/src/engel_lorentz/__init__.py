"""Normal extremals of the sub-Lorentzian problem on the Engel group."""

from .elliptic import EllipticDomainError, JacobiBundle, complete_K, eps_incomplete, jacobi, negative_modulus_transform
from .engel import Causal, GroupPoint, HorizontalVector, causal_class, group_inv, group_mul
from .expmap import ExpDomainError, exp, exp_lightlike, exp_point, t_supr
from .maxwell import MaxwellReport, comparison_check, cut_time_bound, maxwell_times
from .symmetry import apply_image, apply_preimage, check_commutation, fixed_image, fixed_preimage
from .vertical import Covector, ExtremalArc, Stratum, StratumError, classify, integrate, rectify, vertical_flow

__all__ = [
    "Causal", "Covector", "EllipticDomainError", "ExpDomainError", "ExtremalArc", "GroupPoint",
    "HorizontalVector", "JacobiBundle", "MaxwellReport", "Stratum", "StratumError",
    "apply_image", "apply_preimage", "causal_class", "check_commutation", "classify",
    "comparison_check", "complete_K", "cut_time_bound", "eps_incomplete", "exp", "exp_lightlike",
    "exp_point", "fixed_image", "fixed_preimage", "group_inv", "group_mul", "integrate", "jacobi",
    "maxwell_times", "negative_modulus_transform", "rectify", "t_supr", "vertical_flow",
]
