from __future__ import annotations

import math
from enum import Enum
from typing import Dict, List, Optional, Tuple

from pydantic import BaseModel, ConfigDict, Field, model_validator


class _Model(BaseModel):
    model_config = ConfigDict(ser_json_inf_nan="constants")


class ProblemId(_Model):
    """(k, n-k) problem on [a, b]; B is the drift of the second-order operator."""

    model_config = ConfigDict(frozen=True, ser_json_inf_nan="constants")

    n: int = Field(ge=2)
    k: int = Field(ge=1)
    B: Optional[float] = None
    a: float = 0.0
    b: float = 1.0

    @model_validator(mode="after")
    def _check_shape(self) -> "ProblemId":
        if self.k > self.n - 1:
            raise ValueError(f"k must satisfy 1 <= k <= n-1, got n={self.n}, k={self.k}")
        if not self.a < self.b:
            raise ValueError(f"domain needs a < b, got [{self.a}, {self.b}]")
        if self.B is not None and not math.isfinite(self.B):
            raise ValueError("drift B must be finite")
        return self

    @property
    def sigma(self) -> int:
        return -1 if (self.n - self.k) % 2 else 1

    @property
    def drift(self) -> float:
        return 0.0 if self.B is None else self.B

    def label(self) -> str:
        if self.n == 2:
            return f"n=2, k=1, B={self.drift:.6g}"
        return f"n={self.n}, k={self.k}"


class AdmissibleInterval(_Model):
    lower: float
    upper: float
    lower_open: bool = True
    upper_open: bool = True

    @model_validator(mode="after")
    def _ordered(self) -> "AdmissibleInterval":
        if not self.lower < self.upper:
            raise ValueError("admissible interval needs lower < upper")
        return self

    def contains(self, M: float) -> bool:
        above = M > self.lower if self.lower_open else M >= self.lower
        below = M < self.upper if self.upper_open else M <= self.upper
        return above and below


class ConeConstants(_Model):
    """Integrals over the weight and the hypothesis coefficients derived from them."""

    int_phi: float
    int_phi_i1: float
    int_k1_phi_i1: float
    K1: float
    K2: float
    m1: float
    a1: float
    b1: float
    c_h1: float
    c_h2: float
    c_thm5i: float
    ratio: float
    conservative: bool = False

    @property
    def c_limit(self) -> float:
        """Threshold of the limit conditions, K2^2 / (K1 m1 int k1 phi)."""
        return self.K2 ** 2 / (self.K1 * self.m1 * self.int_k1_phi_i1)

    @property
    def I1(self) -> Tuple[float, float]:
        return self.a1, self.b1


class HypothesisId(Enum):
    H1 = "H1"
    H2 = "H2"
    H1_STAR = "H1*"
    H2_STAR = "H2*"
    H3 = "H3"
    H4 = "H4"
    THM5_I = "Thm5.i"
    THM5_II = "Thm5.ii"
    THM5_III = "Thm5.iii"
    THM6_A = "Thm6.a"
    THM6_B = "Thm6.b"
    THM6_C = "Thm6.c"
    LIMITS_INFINITE = "f0-=finf-=inf"
    LIMITS_ZERO = "f0+=finf+=0"


class Verdict(Enum):
    PASS = "pass"
    FAIL = "fail"


class HypothesisReport(_Model):
    hypothesis: HypothesisId
    thresholds: Dict[str, float] = {}
    coefficient: Optional[float] = None
    t_range: Optional[Tuple[float, float]] = None
    u_range: Optional[Tuple[float, float]] = None
    verdict: Verdict
    margin: float
    witness_t: Optional[float] = None
    witness_u: Optional[float] = None
    strict: bool = False
    strict_at_u: Optional[float] = None
    strict_margin: Optional[float] = None
    strict_verdict: Optional[Verdict] = None
    note: Optional[str] = None

    @property
    def passed(self) -> bool:
        return self.verdict is Verdict.PASS


class LimitKind(Enum):
    FINITE = "finite"
    DIVERGES = "diverges"
    VANISHES = "vanishes"


class LimitEstimate(_Model):
    """One of f0+, f0-, finf+, finfty- over the t samples."""

    values: List[float]
    kinds: List[LimitKind]
    trend: List[str]

    def effective(self) -> List[float]:
        """Values with the divergence flags applied (inf / 0)."""
        out = []
        for value, kind in zip(self.values, self.kinds):
            if kind is LimitKind.DIVERGES:
                out.append(math.inf)
            elif kind is LimitKind.VANISHES:
                out.append(0.0)
            else:
                out.append(value)
        return out

    def all_kind(self, kind: LimitKind) -> bool:
        return all(k is kind for k in self.kinds)


class LimitRatios(_Model):
    t_samples: List[float]
    f0_plus: LimitEstimate
    f0_minus: LimitEstimate
    finf_plus: LimitEstimate
    finf_minus: LimitEstimate


class TheoremId(Enum):
    THM2 = "thm2"
    THM3 = "thm3"
    THM4 = "thm4"
    THM5 = "thm5"
    THM6 = "thm6"
    COR24 = "cor24"


class BvpSolution(_Model):
    """Accepted discrete fixed point with its localization functionals and residual certificates."""

    nodes: List[float]
    values: List[float]
    panel_edges: List[float]
    gamma: float
    alpha: float
    theta: float
    fixed_point_residual: float
    ode_residual: float
    bc_residual: float
    cone_margin: float
    seed_amplitude: float
    iterations: int
    method: str

    @property
    def is_trivial(self) -> bool:
        return self.gamma <= 0.0


class SlotAssignment(_Model):
    slot: str
    requirement: str
    solution_index: Optional[int] = None
    margin: Optional[float] = None
    candidates: List[int] = []


class MultiplicityCertificate(_Model):
    theorem: TheoremId
    thresholds: Dict[str, float]
    solutions: List[BvpSolution]
    slots: List[SlotAssignment]
    verdict: Verdict
    ambiguous: bool = False
    missing_slot: Optional[str] = None


class RunReport(_Model):
    config: dict
    constants: Optional[ConeConstants] = None
    admissible_M: Optional[AdmissibleInterval] = None
    hypotheses: List[HypothesisReport] = []
    limits: Optional[LimitRatios] = None
    certificate: Optional[MultiplicityCertificate] = None
    seed_failures: int = 0
    timing: Dict[str, float] = {}
    tool_version: str
    exit_code: int = 0
