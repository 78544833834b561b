from .admissible import (
    admissible_M,
    admissible_M_fourth_order,
    admissible_M_second_order,
    dirichlet_eigenvalue_shooting,
    lambda1,
    lambda2,
)

__all__ = [
    "admissible_M",
    "admissible_M_fourth_order",
    "admissible_M_second_order",
    "dirichlet_eigenvalue_shooting",
    "lambda1",
    "lambda2",
]
