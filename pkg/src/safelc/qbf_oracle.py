"""Brute-force QBF evaluation by exhaustive prefix expansion.

This is the oracle used to validate the term reduction, so it deliberately
shares no evaluation logic with any other module: plain recursion over the
prefix with short-circuiting, and a self-contained matrix evaluator.
"""

from __future__ import annotations

from .qbf import QBF, And, BoolVar, Formula, Not, Or, Quantifier

MAX_QUANTIFIERS = 20


def _matrix_value(f: Formula, env: dict[str, bool]) -> bool:
    if isinstance(f, BoolVar):
        return env[f.name]
    if isinstance(f, Not):
        return not _matrix_value(f.operand, env)
    if isinstance(f, And):
        return _matrix_value(f.left, env) and _matrix_value(f.right, env)
    if isinstance(f, Or):
        return _matrix_value(f.left, env) or _matrix_value(f.right, env)
    raise TypeError(f"not a formula: {f!r}")


def eval_qbf(f: QBF) -> bool:
    """Truth value of a closed QBF, by trying every assignment."""
    if len(f.prefix) > MAX_QUANTIFIERS:
        raise ValueError(
            f"{len(f.prefix)} quantifiers exceeds the exhaustion bound "
            f"{MAX_QUANTIFIERS}"
        )
    env: dict[str, bool] = {}

    def go(i: int) -> bool:
        if i == len(f.prefix):
            return _matrix_value(f.matrix, env)
        quant, name = f.prefix[i]
        want_all = quant is Quantifier.FORALL
        for value in (True, False):
            env[name] = value
            result = go(i + 1)
            if result != want_all:
                del env[name]
                return result
        del env[name]
        return want_all

    return go(0)
