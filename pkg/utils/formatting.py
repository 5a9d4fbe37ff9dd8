from __future__ import annotations

from fractions import Fraction


def fmt_exact(x) -> str:
    """"p/q (decimal)" for rationals, plain decimal otherwise."""
    if isinstance(x, Fraction):
        if x.denominator == 1:
            return str(x.numerator)
        return f"{x} ({float(x):.10g})"
    if isinstance(x, int):
        return str(x)
    return f"{float(x):.10g}"


def fmt_mean(mean: float, stderr: float) -> str:
    return f"{mean:.6g} +- {stderr:.2g}"


def json_number(x):
    # JSON payload: exact rationals as "p/q", floats as floats
    if isinstance(x, Fraction):
        return str(x)
    return x
