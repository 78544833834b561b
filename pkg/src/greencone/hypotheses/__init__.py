from .checks import (
    RectangleSampler,
    check_corollary24,
    check_H1,
    check_H1_star,
    check_H2,
    check_H2_star,
    check_thm2,
    check_thm3,
    check_thm4,
    check_thm5,
    check_thm6,
    limit_ratios,
)
from .nonlinearity import Branch, Nonlinearity

__all__ = [
    "Branch",
    "Nonlinearity",
    "RectangleSampler",
    "check_corollary24",
    "check_H1",
    "check_H1_star",
    "check_H2",
    "check_H2_star",
    "check_thm2",
    "check_thm3",
    "check_thm4",
    "check_thm5",
    "check_thm6",
    "limit_ratios",
]
