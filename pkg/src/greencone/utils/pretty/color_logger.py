"""
Rich-backed logging for greencone. Every message accepts rich markup.
"""

import logging

from rich.logging import RichHandler

logging.basicConfig(
    level="INFO",
    format="%(message)s",
    datefmt="[%X]",
    handlers=[RichHandler(show_path=False, markup=True)],
)


class RichLog:
    """Static front end over the `greencone` logger"""

    log = logging.getLogger("greencone")

    @staticmethod
    def info(msg: str):
        RichLog.log.info(msg)

    @staticmethod
    def warn(msg: str):
        RichLog.log.warning(msg)

    @staticmethod
    def debug(msg: str):
        RichLog.log.debug(msg)

    @staticmethod
    def error(msg: str):
        RichLog.log.error(msg)

    @staticmethod
    def verdict(label: str, passed: bool, detail: str = ""):
        """Logs a pass/fail outcome in green or red, followed by an optional detail."""
        colour, word = ("green", "pass") if passed else ("red", "fail")
        suffix = f" ({detail})" if detail else ""
        RichLog.log.info(f"{label}: [{colour}]{word}[/]{suffix}")

    @staticmethod
    def activate_debug():
        RichLog.log.setLevel(logging.DEBUG)

    @staticmethod
    def quiet():
        """Only warnings and errors get through; corpus workers run this way."""
        RichLog.log.setLevel(logging.WARNING)
