"""Gaussian entanglement measures, log-determinant information and key-rate bounds."""

from .entanglement import (
    gie_numeric,
    key_bounds,
    one_way_distillable,
    reof_closed_form,
    reof_numeric,
    reof_squashed,
)
from .errors import GaussentError
from .infomeasures import im_conditional, im_mutual, logdet_entropy, von_neumann_entropy
from .model import QCM, GaussianChannel, Partition, pure_loss_state, purify, tmsv
from .normality import is_normal, non_normal_family, two_mode_standard_form
from .symplectic import symplectic_eigenvalues, williamson

__all__ = [
    "GaussentError",
    "GaussianChannel",
    "Partition",
    "QCM",
    "gie_numeric",
    "im_conditional",
    "im_mutual",
    "is_normal",
    "key_bounds",
    "logdet_entropy",
    "non_normal_family",
    "one_way_distillable",
    "pure_loss_state",
    "purify",
    "reof_closed_form",
    "reof_numeric",
    "reof_squashed",
    "symplectic_eigenvalues",
    "tmsv",
    "two_mode_standard_form",
    "von_neumann_entropy",
    "williamson",
]
