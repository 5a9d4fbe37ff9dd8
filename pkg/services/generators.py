from __future__ import annotations

import inspect
import logging
import math
from fractions import Fraction
from typing import Callable

from errors import InvalidParams, UnknownName
from models.distribution import discrete, exponential, point_mass, to_rational
from models.instance import Instance, iid

logger = logging.getLogger(f"packlab.{__name__}")


def _check_n(n: int) -> int:
    if int(n) != n or n < 1:
        raise InvalidParams(f"n must be a positive integer, got {n}")
    return int(n)


def _check_C(C) -> Fraction:
    c = to_rational(C)
    if c < 1:
        raise InvalidParams(f"C must be >= 1, got {C}")
    return c


def _law(pairs):
    # families are written with C as a parameter; at C = 1 some atoms vanish
    return discrete((v, p) for v, p in pairs if p > 0)


def _meta(name: str, **params) -> dict:
    return {"generator": name, "params": {k: str(v) for k, v in params.items()}}


# --- i.i.d. discrete families ---


def three_point(n: int, C) -> Instance:
    """0 w.p. 1 - 1/C, 0.4 w.p. 1/2C, 0.61 w.p. 1/2C."""
    n, C = _check_n(n), _check_C(C)
    d = _law([(0, 1 - 1 / C), (Fraction(2, 5), 1 / (2 * C)), (Fraction(61, 100), 1 / (2 * C))])
    return iid(d, n, C, meta=_meta("three_point", n=n, C=C))


def bernoulli(n: int, C) -> Instance:
    n, C = _check_n(n), _check_C(C)
    d = _law([(0, 1 - 1 / C), (1, 1 / C)])
    return iid(d, n, C, meta=_meta("bernoulli", n=n, C=C))


def example1(n: int, C) -> Instance:
    # 1 w.p. 1/C, else 1/n
    n, C = _check_n(n), _check_C(C)
    d = _law([(Fraction(1, n), 1 - 1 / C), (1, 1 / C)])
    return iid(d, n, C, meta=_meta("example1", n=n, C=C))


def example3(n: int, C, alpha) -> Instance:
    """Bad case for a fixed threshold alpha: 0, alpha, or 1 - alpha/2."""
    n, C = _check_n(n), _check_C(C)
    a = to_rational(alpha)
    if not 0 < a <= 1:
        raise InvalidParams(f"alpha must be in (0, 1], got {alpha}")
    d = _law([(0, 1 - 1 / C), (a, 1 / (2 * C)), (1 - a / 2, 1 / (2 * C))])
    return iid(d, n, C, meta=_meta("example3", n=n, C=C, alpha=a))


def example4(n: int, C) -> Instance:
    # optimal policies do break bins here
    n, C = _check_n(n), _check_C(C)
    d = _law([(Fraction(1, n), 1 - 1 / (C * C)), (1, 1 / (C * C))])
    return iid(d, n, C, meta=_meta("example4", n=n, C=C))


def concluding_alternating(n: int, C) -> Instance:
    """X_1 = 1/n; even items Bernoulli(1/C); odd items from the third on are
    1/n w.p. 1 - 1/C^2 and 1 w.p. 1/C^2."""
    n, C = _check_n(n), _check_C(C)
    tiny = Fraction(1, n)
    even = _law([(0, 1 - 1 / C), (1, 1 / C)])
    odd = _law([(tiny, 1 - 1 / (C * C)), (1, 1 / (C * C))])
    items = [point_mass(tiny)]
    for i in range(2, n + 1):
        items.append(even if i % 2 == 0 else odd)
    return Instance(items=tuple(items), penalty=C, meta=_meta("concluding_alternating", n=n, C=C))


# --- exponential families ---


def _frac(i: int, n: int) -> float:
    # (i - 1)/(n - 1), 0 for a single item
    return 0.0 if n == 1 else (i - 1) / (n - 1)


def _exp_instance(name: str, n: int, C, rates: list[float]) -> Instance:
    return Instance(items=tuple(exponential(r) for r in rates), penalty=C, meta=_meta(name, n=n, C=C))


def exp_increasing(n: int, C) -> Instance:
    """lambda_i = (1 + 2 (i-1)/(n-1)) ln C, from ln C up to 3 ln C."""
    n, C = _check_n(n), _check_C(C)
    if C <= 1:
        raise InvalidParams("exponential families need C > 1")
    L = math.log(C)
    return _exp_instance("exp_increasing", n, C, [(1 + 2 * _frac(i, n)) * L for i in range(1, n + 1)])


def exp_decreasing(n: int, C) -> Instance:
    n, C = _check_n(n), _check_C(C)
    if C <= 1:
        raise InvalidParams("exponential families need C > 1")
    L = math.log(C)
    return _exp_instance("exp_decreasing", n, C, [(3 - 2 * _frac(i, n)) * L for i in range(1, n + 1)])


def exp_blocks(n: int, C) -> Instance:
    """Three sections: ln C, then 2 ln C, then ln C.

    The middle section is items floor(n/3)+1 .. floor(2n/3) (1-based).
    """
    n, C = _check_n(n), _check_C(C)
    if C <= 1:
        raise InvalidParams("exponential families need C > 1")
    L = math.log(C)
    lo, hi = n // 3, (2 * n) // 3
    rates = [2 * L if lo <= i < hi else L for i in range(n)]
    return _exp_instance("exp_blocks", n, C, rates)


def lower_bound_params(n1: int, eps, C) -> dict:
    """beta = 6 n1 ln C / eps, mu = beta ln C, k = ceil(3 eps mu), lam = (1 + eps) ln C."""
    eps = float(eps)
    L = math.log(float(C))
    beta = 6 * n1 * L / eps
    mu = beta * L
    return {"beta": beta, "mu": mu, "k": math.ceil(3 * eps * mu), "lam": (1 + eps) * L}


def exp_lower_bound(n1: int, eps, C) -> Instance:
    """n1 blocks, each k fast items (rate mu) followed by one slow item (rate lam)."""
    n1 = _check_n(n1)
    C = _check_C(C)
    if float(eps) <= 0:
        raise InvalidParams(f"eps must be > 0, got {eps}")
    if float(eps) * math.log(float(C)) < 4:
        raise InvalidParams(f"lower-bound family needs eps * ln C >= 4, got {float(eps) * math.log(float(C)):.3f}")

    p = lower_bound_params(n1, eps, C)
    fast = exponential(p["mu"])
    slow = exponential(p["lam"])
    items = []
    for _ in range(n1):
        items.extend([fast] * p["k"])
        items.append(slow)
    logger.debug("exp_lower_bound n1=%d: k=%d, %d items", n1, p["k"], len(items))
    meta = _meta("exp_lower_bound", n1=n1, eps=eps, C=C)
    meta["derived"] = {k: repr(v) for k, v in p.items()}
    return Instance(items=tuple(items), penalty=C, meta=meta)


GENERATORS: dict[str, Callable[..., Instance]] = {
    "three_point": three_point,
    "bernoulli": bernoulli,
    "example1": example1,
    "example3": example3,
    "example4": example4,
    "concluding_alternating": concluding_alternating,
    "exp_increasing": exp_increasing,
    "exp_decreasing": exp_decreasing,
    "exp_blocks": exp_blocks,
    "exp_lower_bound": exp_lower_bound,
}


def gen_named(name: str, params: dict | None = None) -> Instance:
    """Instance of a named family. params are the family's keyword arguments."""
    fn = GENERATORS.get(name)
    if fn is None:
        raise UnknownName(f"unknown generator {name!r}; known: {', '.join(sorted(GENERATORS))}")

    params = dict(params or {})
    wanted = inspect.signature(fn).parameters
    missing = [k for k in wanted if k not in params]
    extra = [k for k in params if k not in wanted]
    if missing or extra:
        raise InvalidParams(
            f"{name} takes ({', '.join(wanted)}); missing {missing or 'none'}, unexpected {extra or 'none'}"
        )
    return fn(**params)
