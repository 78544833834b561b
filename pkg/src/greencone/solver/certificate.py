"""
Localization slots of every theorem and the assignment of solutions to them.
"""
from __future__ import annotations

import itertools
from dataclasses import dataclass
from typing import Callable, Dict, List, Optional, Sequence, Tuple

from greencone.model.models import (
    BvpSolution,
    MultiplicityCertificate,
    SlotAssignment,
    TheoremId,
    Verdict,
)
from greencone.utils.errors import SlotUnfilled, ThresholdOrdering
from greencone.utils.pretty import RichLog


@dataclass(frozen=True)
class Slot:
    name: str
    requirement: str
    # signed slack of the requirement; the slot accepts a solution when it is positive
    margin: Callable[[BvpSolution], float]
    scale: float
    inclusive: bool = False

    def accepts(self, solution: BvpSolution) -> bool:
        value = self.margin(solution)
        return value >= 0.0 if self.inclusive else value > 0.0


def slots_for(theorem: TheoremId, thresholds: Dict[str, float]) -> List[Slot]:
    """Slots a theorem asks to be filled by distinct solutions."""
    p, q, r = thresholds.get("p"), thresholds.get("q"), thresholds.get("r")

    def need(*names: str) -> None:
        missing = [name for name in names if thresholds.get(name) is None]
        if missing:
            raise ThresholdOrdering(f"{theorem.value} needs thresholds {', '.join(missing)}")

    if theorem is TheoremId.THM2:
        need("p", "q")
        lo, hi = min(p, q), max(p, q)
        return [Slot("u", f"{lo:g} <= gamma <= {hi:g}", lambda s: min(s.gamma - lo, hi - s.gamma), lo, inclusive=True)]
    if theorem is TheoremId.THM3:
        need("p")
        return [Slot("u1", f"0 < gamma < {p:g}", lambda s: min(s.gamma, p - s.gamma), p),
                Slot("u2", f"gamma > {p:g}", lambda s: s.gamma - p, p)]
    if theorem is TheoremId.THM4:
        need("q")
        return [Slot("u1", f"0 < gamma < {q:g}", lambda s: min(s.gamma, q - s.gamma), q),
                Slot("u2", f"gamma > {q:g}", lambda s: s.gamma - q, q)]
    if theorem is TheoremId.THM5:
        need("p", "q", "r")
        return [Slot("u1", f"{p:g} < gamma and theta < {q:g}", lambda s: min(s.gamma - p, q - s.theta), p),
                Slot("u2", f"{q:g} < theta and alpha < {r:g}", lambda s: min(s.theta - q, r - s.alpha), q)]
    if theorem is TheoremId.THM6:
        need("p", "q")
        return [Slot("u1", f"theta < {p:g}", lambda s: p - s.theta, p),
                Slot("u2", f"{q:g} < alpha", lambda s: s.alpha - q, q),
                Slot("u3", f"{p:g} < theta and alpha < {q:g}", lambda s: min(s.theta - p, q - s.alpha), p)]
    return [Slot("u", "gamma > 0", lambda s: s.gamma, 1.0)]


def _best_assignment(slots: Sequence[Slot], solutions: Sequence[BvpSolution],
                     candidates: List[List[int]]) -> Tuple[Optional[int], ...]:
    """Injective assignment filling the most slots, ties broken by the largest worst relative margin."""
    best: Tuple[Optional[int], ...] = tuple(None for _ in slots)
    best_key = (0, float("-inf"))
    for choice in itertools.product(*[[*c, None] for c in candidates]):
        picked = [i for i in choice if i is not None]
        if len(picked) != len(set(picked)):
            continue
        worst = min((slot.margin(solutions[i]) / slot.scale for slot, i in zip(slots, choice) if i is not None),
                    default=float("-inf"))
        key = (len(picked), worst)
        if key > best_key:
            best, best_key = choice, key
    return best


def certify(solutions: Sequence[BvpSolution], thresholds: Dict[str, float], theorem: TheoremId,
            raise_on_fail: bool = False) -> MultiplicityCertificate:
    """Assigns distinct solutions to the theorem's localization slots.

    Args:
        solutions: Accepted solutions, typically from find_fixed_points.
        thresholds: p, q, r as the theorem needs them.
        theorem: Theorem whose conclusion is certified.
        raise_on_fail: Raise SlotUnfilled instead of returning a failed certificate.

    Returns:
        MultiplicityCertificate: pass iff every slot holds a distinct solution. A slot with several
        admissible solutions marks the certificate ambiguous.
    """
    slots = slots_for(theorem, thresholds)
    candidates = [[i for i, sol in enumerate(solutions) if slot.accepts(sol)] for slot in slots]
    choice = _best_assignment(slots, solutions, candidates)

    assignments = [
        SlotAssignment(slot=slot.name, requirement=slot.requirement, solution_index=index,
                       margin=None if index is None else slot.margin(solutions[index]), candidates=cands)
        for slot, index, cands in zip(slots, choice, candidates)
    ]
    missing = next((a.slot for a in assignments if a.solution_index is None), None)
    ambiguous = any(len(c) > 1 for c in candidates)
    if ambiguous:
        RichLog.warn(f"{theorem.value}: several solutions qualify for one slot; kept the best-separated choice")
    verdict = Verdict.PASS if missing is None else Verdict.FAIL
    if missing is None:
        RichLog.info(f"{theorem.value}: [green]all {len(slots)} slot(s) filled[/]")
    else:
        RichLog.warn(f"{theorem.value}: [red]slot '{missing}' unfilled[/]")
        if raise_on_fail:
            raise SlotUnfilled(missing)
    return MultiplicityCertificate(theorem=theorem, thresholds={k: v for k, v in thresholds.items() if v is not None},
                                   solutions=list(solutions), slots=assignments, verdict=verdict,
                                   ambiguous=ambiguous, missing_slot=missing)
