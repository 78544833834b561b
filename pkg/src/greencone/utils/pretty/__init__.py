"""
Pretty Package
"""

from .color_logger import RichLog
from .progress_bar import ProgressBarFactory

__all__ = ["RichLog", "ProgressBarFactory"]
