"""
Whitelisted expression compiler for nonlinearity branches and numeric config fields.

Accepted grammar: numbers, the variables in scope, the constants pi and e, the operators
+ - * / ^ ** and parentheses, and the functions exp, log and sqrt.
"""
from __future__ import annotations

import math
import re
from dataclasses import dataclass
from typing import Callable, Sequence, Tuple, Union

import numpy as np
import sympy
from sympy.parsing.sympy_parser import convert_xor, parse_expr, standard_transformations

from greencone.utils.errors import ExpressionError

FUNCTIONS = {"exp": sympy.exp, "log": sympy.log, "sqrt": sympy.sqrt}
CONSTANTS = {"pi": sympy.pi, "e": sympy.E}

_ALLOWED_CHARS = re.compile(r"^[0-9A-Za-z_ .+\-*/^()]*$")
_NUMBER = re.compile(r"(\d+\.?\d*|\.\d+)([eE][+-]?\d+)?")
_NAME = re.compile(r"[A-Za-z_][A-Za-z_0-9]*")
_TRANSFORMATIONS = standard_transformations + (convert_xor,)


@dataclass(frozen=True)
class CompiledExpression:
    text: str
    expr: sympy.Expr
    variables: Tuple[str, ...]
    func: Callable

    def __call__(self, *args):
        arrays = [np.asarray(a, dtype=float) for a in args]
        with np.errstate(all="ignore"):
            out = self.func(*arrays)
        shape = np.broadcast_shapes(*(a.shape for a in arrays)) if arrays else ()
        out = np.broadcast_to(np.asarray(out, dtype=float), shape).copy()
        return float(out) if out.ndim == 0 else out


def _screen(text: str, variables: Sequence[str]) -> None:
    if not _ALLOWED_CHARS.match(text):
        raise ExpressionError(f"'{text}' contains characters outside the expression grammar")
    allowed = set(variables) | set(FUNCTIONS) | set(CONSTANTS)
    for name in _NAME.findall(_NUMBER.sub(" ", text)):
        if name not in allowed:
            raise ExpressionError(f"unknown name '{name}' in '{text}' (allowed: {', '.join(sorted(allowed))})")


def parse(text: str, variables: Sequence[str] = ("t", "u")) -> sympy.Expr:
    """Parses text into a sympy expression over the given variables.

    Raises:
        ExpressionError: On syntax errors or names outside the whitelist.
    """
    if not isinstance(text, str) or not text.strip():
        raise ExpressionError("expression must be a non-empty string")
    _screen(text, variables)
    namespace = {
        "Integer": sympy.Integer,
        "Float": sympy.Float,
        "Rational": sympy.Rational,
        "Symbol": sympy.Symbol,
        "__builtins__": {},
        **FUNCTIONS,
        **CONSTANTS,
    }
    local = {name: sympy.Symbol(name, real=True) for name in variables}
    try:
        expr = parse_expr(text, local_dict=local, global_dict=namespace, transformations=_TRANSFORMATIONS)
    except (SyntaxError, TypeError, NameError, AttributeError, sympy.SympifyError) as exc:
        raise ExpressionError(f"cannot parse '{text}': {exc}") from exc
    if not isinstance(expr, sympy.Expr):
        raise ExpressionError(f"'{text}' is not an arithmetic expression")
    return expr


def compile_expression(text: str, variables: Sequence[str] = ("t", "u")) -> CompiledExpression:
    """Parses and lambdifies an expression into a vectorized numpy callable."""
    expr = parse(text, variables)
    symbols = [sympy.Symbol(name, real=True) for name in variables]
    func = sympy.lambdify(symbols, expr, modules="numpy")
    return CompiledExpression(text=text, expr=expr, variables=tuple(variables), func=func)


def evaluate_number(value: Union[str, int, float]) -> float:
    """Evaluates a numeric config field, which may be a constant expression such as '-2*pi'.

    Raises:
        ExpressionError: If the value is not a finite real number.
    """
    if isinstance(value, bool):
        raise ExpressionError("booleans are not numbers")
    if isinstance(value, (int, float)):
        number = float(value)
    else:
        expr = parse(str(value), variables=())
        try:
            number = float(expr.evalf())
        except TypeError as exc:
            raise ExpressionError(f"'{value}' does not evaluate to a real number") from exc
    if not math.isfinite(number):
        raise ExpressionError(f"'{value}' is not finite")
    return number
