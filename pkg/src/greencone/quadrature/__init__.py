from .cone_constants import cone_constants, integrate_piecewise, verify_rational

__all__ = ["cone_constants", "integrate_piecewise", "verify_rational"]
