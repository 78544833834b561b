"""
Progress display for solver seed sweeps and corpus runs.
"""
from typing import Iterator, Sequence, TypeVar

from rich.progress import (
    BarColumn,
    MofNCompleteColumn,
    Progress,
    SpinnerColumn,
    TextColumn,
    TimeElapsedColumn,
)

T = TypeVar("T")


# pylint: disable=too-few-public-methods
class ProgressBarFactory:
    """Builds the progress bar shared by the long loops"""

    @classmethod
    def get_progress_bar(cls, unit: str = "items", disable: bool = False) -> Progress:
        """Returns a transient bar counting `unit`; `disable` renders nothing (tests, ray workers)."""
        return Progress(
            SpinnerColumn(),
            TextColumn("{task.description}"),
            BarColumn(bar_width=30),
            MofNCompleteColumn(),
            TextColumn(unit),
            TimeElapsedColumn(),
            transient=True,
            disable=disable,
        )

    @classmethod
    def track(cls, items: Sequence[T], description: str, unit: str, disable: bool = False) -> Iterator[T]:
        with cls.get_progress_bar(unit=unit, disable=disable) as progress:
            yield from progress.track(items, total=len(items), description=description)
