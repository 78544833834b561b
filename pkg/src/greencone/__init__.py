"""
greencone: positive solutions of (k, n-k) boundary value problems via cone fixed-point theory.
"""
from greencone.utils.constants import TOOL_VERSION

__version__ = TOOL_VERSION
