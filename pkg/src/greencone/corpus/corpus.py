"""
Built-in problem corpus: the two example nonlinearities of the second-order problem under every
catalogued drift, and the two clamped-beam examples.
"""
import copy
from typing import Dict, List

from greencone.config.problem_config import ProblemConfig
from greencone.utils.errors import ConfigError

F1_BRANCHES = [
    {"upto": "1/28", "expr": "(1007/88+225/88*t)*50000000/1190651*u"},
    {"upto": "14", "expr": "(1007/88+225/88*t)*3125000/(58341899*u)"},
    {"expr": "(1007/88+225/88*t)*3125000/(58341899*u) + 10000/43*(u-14)*u"},
]

F2_BRANCHES = [
    {"upto": "16", "expr": "12*(31/28*t+25/28)*u^3"},
    {"expr": "49152*(31/28*t+25/28)"},
]

FOURTH_THM5_BRANCHES = [
    {"upto": "1/36", "expr": "1296*t"},
    {"upto": "33/4", "expr": "t/u^2"},
    {"expr": "64*t/35937*(u-29/4)^5*u"},
]

# jumps by 196 at u = 14
FOURTH_THM6_BRANCHES = [
    {"upto": "1/2", "expr": "(2+3*t)*u^2"},
    {"upto": "14", "expr": "(u-1/2)*u^4+(2+3*t)*u^2"},
    {"expr": "519204+588*t"},
]

DRIFTS = {
    "minus-two-pi": "-2*pi",
    "golden-neg": "log(sqrt(5)-2)",
    "b0": "0",
    "golden-pos": "log(2+sqrt(5))",
}


def _second_order(name: str, B: str, theorem: str, branches: List[dict], thresholds: Dict[str, str],
                  conservative: bool) -> dict:
    return {
        "name": name,
        "theorem": theorem,
        "problem": {"n": 2, "k": 1, "B": B},
        "nonlinearity": {"branches": branches},
        "thresholds": thresholds,
        "check": {"conservative": conservative},
    }


def _build() -> Dict[str, dict]:
    entries: Dict[str, dict] = {}
    for label, B in DRIFTS.items():
        certified = label == "minus-two-pi"
        f1_name = "F1-thm5.7" if certified else f"F1-{label}"
        f2_name = "F2-thm5.8" if certified else f"F2-{label}"
        entries[f1_name] = _second_order(f1_name, B, "thm5", F1_BRANCHES, {"p": "1/28", "q": "7/2", "r": "15"},
                                         certified)
        entries[f2_name] = _second_order(f2_name, B, "thm6", F2_BRANCHES, {"p": "1/2", "q": "4", "r": "16384"},
                                         certified)
    entries["fourth-thm5"] = {
        "name": "fourth-thm5",
        "theorem": "thm5",
        "problem": {"n": 4, "k": 2},
        "nonlinearity": {"branches": FOURTH_THM5_BRANCHES},
        "thresholds": {"p": "1/16", "q": "11/3", "r": "27"},
    }
    entries["fourth-thm6"] = {
        "name": "fourth-thm6",
        "theorem": "thm6",
        "problem": {"n": 4, "k": 2},
        "nonlinearity": {"allow_jumps": True, "branches": FOURTH_THM6_BRANCHES},
        "thresholds": {"p": "1/2", "q": "56/9", "r": "1444"},
    }
    return entries


CORPUS = _build()


def names() -> List[str]:
    return list(CORPUS)


def get_entry(name: str) -> ProblemConfig:
    """Validated copy of a corpus entry.

    Raises:
        ConfigError: If no entry has that name.
    """
    if name not in CORPUS:
        raise ConfigError(f"unknown corpus entry '{name}', expected one of {', '.join(CORPUS)}", field="corpus")
    return ProblemConfig.from_dict(copy.deepcopy(CORPUS[name]))
