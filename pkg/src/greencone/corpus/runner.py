"""
Runs many corpus entries, in-process or fanned out over ray workers.
"""
from dataclasses import dataclass
from typing import List, Optional, Sequence

import ray
from ray.exceptions import RayError

from greencone.corpus.corpus import CORPUS
from greencone.model.models import RunReport
from greencone.pipeline import EXIT_SOLVER, exit_code_for, run_problem
from greencone.utils.errors import GreenConeError
from greencone.utils.pretty import ProgressBarFactory, RichLog


@dataclass
class EntryOutcome:
    name: str
    exit_code: int
    report: Optional[RunReport] = None
    error: Optional[str] = None


def _run_entry(name: str, command: str, settings: Optional[str]) -> EntryOutcome:
    try:
        report = run_problem(CORPUS[name], command, settings)
        return EntryOutcome(name=name, exit_code=report.exit_code, report=report)
    except GreenConeError as exc:
        return EntryOutcome(name=name, exit_code=exit_code_for(exc), error=str(exc))


@ray.remote
def run_entry_remote(name: str, command: str, settings: Optional[str]) -> EntryOutcome:
    RichLog.quiet()
    return _run_entry(name, command, settings)


def run_corpus(entries: Sequence[str], command: str = "check", workers: int = 1,
               settings: Optional[str] = None, show_progress: bool = True) -> List[EntryOutcome]:
    """Runs `check` or `solve` on every named entry.

    Args:
        entries: Corpus entry names.
        command: "check" or "solve".
        workers: More than one fans the entries out over a local ray cluster of that many CPUs.
        settings: Settings file every worker loads.
        show_progress: Show a progress bar in the serial path.

    Returns:
        List[EntryOutcome]: One outcome per entry, in input order.
    """
    if command not in ("check", "solve"):
        raise ValueError(f"unknown corpus command '{command}', expected check or solve")
    if workers <= 1:
        return [_run_entry(name, command, settings)
                for name in ProgressBarFactory.track(list(entries), f"Corpus {command}", "entries",
                                                     disable=not show_progress)]

    ray.init(num_cpus=workers, ignore_reinit_error=True, log_to_driver=False)
    try:
        tasks = [run_entry_remote.remote(name, command, settings) for name in entries]
        outcomes = []
        for name, task in zip(entries, tasks):
            try:
                outcomes.append(ray.get(task))
            except RayError as exc:
                RichLog.error(f"{name}: worker failed: {exc}")
                outcomes.append(EntryOutcome(name=name, exit_code=EXIT_SOLVER, error=str(exc)))
        return outcomes
    finally:
        ray.shutdown()
