from .parser import CompiledExpression, compile_expression, evaluate_number, parse

__all__ = ["CompiledExpression", "compile_expression", "evaluate_number", "parse"]
