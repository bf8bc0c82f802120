"""Finite, checkable evidence that a group quasi-isometric to the line is virtually Z."""

from .cayley import Ball, build_ball, count_ends, growth_report, liminf_sphere_bound, word_distance
from .ends import EndSign, end_action, end_homomorphism_check, kernel_member, no_flip_check
from .errors import QiRigidError
from .flow import FlowNetwork, FlowParams, brute_force_min_cut, detect_virtually_z_via_flow, max_flow
from .groups import GroupSpec, make_model
from .qi import QiMap, builtin_qi, verify_qi
from .quasi_action import build_context, check_four_properties, derived_constants, star
from .rigidity import CertifyParams, certify_virtually_z, recheck_certificate

__all__ = [
    "Ball",
    "CertifyParams",
    "EndSign",
    "FlowNetwork",
    "FlowParams",
    "GroupSpec",
    "QiMap",
    "QiRigidError",
    "brute_force_min_cut",
    "build_ball",
    "build_context",
    "builtin_qi",
    "certify_virtually_z",
    "check_four_properties",
    "count_ends",
    "derived_constants",
    "detect_virtually_z_via_flow",
    "end_action",
    "end_homomorphism_check",
    "growth_report",
    "kernel_member",
    "liminf_sphere_bound",
    "make_model",
    "max_flow",
    "no_flip_check",
    "recheck_certificate",
    "star",
    "verify_qi",
    "word_distance",
]
