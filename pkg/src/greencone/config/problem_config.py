"""
Problem configuration files.

One TOML file describes one problem: the (n, k, B) identity, an optional I1 override, the branches
of the nonlinearity, the thresholds of the selected theorem and the solver parameters. Numeric
fields take either numbers or expression strings such as "-2*pi" or "1/28".
"""
from __future__ import annotations

from pathlib import Path
from typing import Annotated, Dict, List, Literal, Optional, Tuple, Union

import toml
from pydantic import AfterValidator, BaseModel, ConfigDict, Field, ValidationError, model_validator

from greencone.expression import evaluate_number, parse
from greencone.hypotheses.nonlinearity import Nonlinearity
from greencone.model.models import ProblemId, TheoremId
from greencone.utils import constants
from greencone.utils.errors import ConfigError, ExpressionError


def _numeric(value: Union[float, str]) -> Union[float, str]:
    try:
        evaluate_number(value)
    except ExpressionError as exc:
        raise ValueError(str(exc)) from exc
    return value


def _expression(text: str) -> str:
    try:
        parse(text)
    except ExpressionError as exc:
        raise ValueError(str(exc)) from exc
    return text


Numeric = Annotated[Union[float, str], AfterValidator(_numeric)]
Expression = Annotated[str, AfterValidator(_expression)]


def resolve(value: Optional[Union[float, str]]) -> Optional[float]:
    return None if value is None else evaluate_number(value)


class _Section(BaseModel):
    model_config = ConfigDict(extra="forbid")


class ProblemSection(_Section):
    n: int = Field(default=2, ge=2)
    k: int = Field(default=1, ge=1)
    B: Optional[Numeric] = None

    @model_validator(mode="after")
    def _check_orders(self) -> "ProblemSection":
        if self.k > self.n - 1:
            raise ValueError(f"k must satisfy 1 <= k <= n-1, got n={self.n}, k={self.k}")
        return self

    def problem_id(self) -> ProblemId:
        B = resolve(self.B)
        if B is None and self.n == 2:
            B = 0.0
        return ProblemId(n=self.n, k=self.k, B=B)


class IntervalSection(_Section):
    a1: Numeric
    b1: Numeric

    @model_validator(mode="after")
    def _ordered(self) -> "IntervalSection":
        a1, b1 = resolve(self.a1), resolve(self.b1)
        if not 0.0 < a1 < b1 < 1.0:
            raise ValueError(f"I1 must satisfy 0 < a1 < b1 < 1, got [{a1}, {b1}]")
        return self

    def bounds(self) -> Tuple[float, float]:
        return resolve(self.a1), resolve(self.b1)


class BranchSection(_Section):
    upto: Optional[Numeric] = None
    expr: Expression


class NonlinearitySection(_Section):
    allow_jumps: bool = False
    branches: List[BranchSection] = Field(min_length=1)


class ThresholdSection(_Section):
    p: Optional[Numeric] = None
    q: Optional[Numeric] = None
    r: Optional[Numeric] = None

    def values(self) -> Dict[str, float]:
        return {name: resolve(getattr(self, name)) for name in ("p", "q", "r")
                if getattr(self, name) is not None}


class SolverSection(_Section):
    nodes: int = Field(default=constants.SOLVER_NODES, ge=constants.SOLVER_MIN_NODES)
    tol: float = Field(default=constants.SOLVER_TOL, ge=1e-12, le=1e-6)
    seeds: int = Field(default=constants.SOLVER_SEEDS, ge=1)
    scheme: Literal["product", "nystrom"] = "product"
    refine_branches: bool = True
    deflation: bool = True


class CheckSection(_Section):
    conservative: bool = False
    strict_iii: bool = True


# thresholds each theorem reads
_REQUIRED = {
    TheoremId.THM2: ("p", "q"),
    TheoremId.THM3: ("p",),
    TheoremId.THM4: ("q",),
    TheoremId.THM5: ("p", "q", "r"),
    TheoremId.THM6: ("p", "q", "r"),
    TheoremId.COR24: (),
}


class ProblemConfig(_Section):
    """A problem file, validated."""

    name: str = "unnamed"
    theorem: TheoremId
    problem: ProblemSection = Field(default_factory=ProblemSection)
    interval: Optional[IntervalSection] = None
    nonlinearity: NonlinearitySection
    thresholds: ThresholdSection = Field(default_factory=ThresholdSection)
    solver: SolverSection = Field(default_factory=SolverSection)
    check: CheckSection = Field(default_factory=CheckSection)

    @model_validator(mode="after")
    def _check_thresholds(self) -> "ProblemConfig":
        values = self.thresholds.values()
        missing = [name for name in _REQUIRED[self.theorem] if name not in values]
        if missing:
            raise ValueError(f"thresholds: {self.theorem.value} needs {', '.join(missing)}")
        bad = [name for name, value in values.items() if value <= 0]
        if bad:
            raise ValueError(f"thresholds: {', '.join(bad)} must be positive")
        p, q, r = values.get("p"), values.get("q"), values.get("r")
        if self.theorem is TheoremId.THM2 and p == q:
            raise ValueError("thresholds: thm2 needs p != q")
        if self.theorem is TheoremId.THM5 and not p < q < r:
            raise ValueError(f"thresholds: thm5 needs p < q < r, got {p}, {q}, {r}")
        if self.theorem is TheoremId.THM6 and not (p < q and q < r):
            raise ValueError(f"thresholds: thm6 needs p < q < r, got {p}, {q}, {r}")
        return self

    @classmethod
    def from_dict(cls, data: dict) -> "ProblemConfig":
        try:
            return cls.model_validate(data)
        except ValidationError as exc:
            raise _config_error(exc) from exc

    @classmethod
    def from_toml(cls, text: str) -> "ProblemConfig":
        try:
            data = toml.loads(text)
        except toml.TomlDecodeError as exc:
            raise ConfigError(f"line {exc.lineno}, column {exc.colno}: {exc.msg}") from exc
        return cls.from_dict(data)

    @classmethod
    def load(cls, path: Union[str, Path]) -> "ProblemConfig":
        path = Path(path)
        try:
            text = path.read_text(encoding="utf-8")
        except OSError as exc:
            raise ConfigError(f"cannot read problem file '{path}': {exc.strerror}") from exc
        return cls.from_toml(text)

    def to_dict(self) -> dict:
        return self.model_dump(mode="json", exclude_none=True)

    def to_toml(self) -> str:
        return toml.dumps(self.to_dict())

    def problem_id(self) -> ProblemId:
        return self.problem.problem_id()

    def I1(self) -> Optional[Tuple[float, float]]:
        return None if self.interval is None else self.interval.bounds()

    def build_nonlinearity(self, validate: bool = True) -> Nonlinearity:
        problem = self.problem_id()
        return Nonlinearity.from_strings([(br.upto, br.expr) for br in self.nonlinearity.branches],
                                         a=problem.a, b=problem.b,
                                         allow_jumps=self.nonlinearity.allow_jumps, validate=validate)

    def threshold_values(self) -> Dict[str, float]:
        return self.thresholds.values()


def _config_error(exc: ValidationError) -> ConfigError:
    first = exc.errors()[0]
    field = ".".join(str(part) for part in first["loc"]) or None
    message = first["msg"].removeprefix("Value error, ")
    if field is None and message.startswith("thresholds: "):
        field, message = "thresholds", message.removeprefix("thresholds: ")
    return ConfigError(message, field=field)
