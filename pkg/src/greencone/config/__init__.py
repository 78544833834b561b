from .config import Config
from .problem_config import ProblemConfig

__all__ = ["Config", "ProblemConfig"]
