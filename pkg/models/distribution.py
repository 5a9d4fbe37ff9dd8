from __future__ import annotations

import math
from bisect import bisect_right
from dataclasses import dataclass
from fractions import Fraction
from functools import cached_property
from typing import Iterable, Mapping, Union

from errors import (
    InvalidDistribution,
    NegativeValue,
    NonPositiveProbability,
    NonPositiveRate,
    ProbabilitySumNotOne,
    UsedExceedsCapacity,
)

# sizes are exact for discrete laws (Fraction, or int for big-integer
# reduction instances) and binary floats once an exponential item is involved
Size = Union[Fraction, int, float]


def to_rational(x) -> Fraction:
    """Exact rational from int / Fraction / "p/q" / decimal string / float.

    Floats go through their shortest repr, so 0.4 becomes 2/5 and not the
    binary expansion.
    """
    if isinstance(x, Fraction):
        return x
    if isinstance(x, bool):
        raise InvalidDistribution(f"not a number: {x!r}")
    if isinstance(x, int):
        return Fraction(x)
    if isinstance(x, float):
        if not math.isfinite(x):
            raise InvalidDistribution(f"not a finite number: {x!r}")
        return Fraction(repr(x))
    if isinstance(x, str):
        try:
            return Fraction(x.strip())
        except (ValueError, ZeroDivisionError) as e:
            raise InvalidDistribution(f"cannot read {x!r} as a rational") from e
    try:
        # numpy scalars and the like
        return Fraction(repr(float(x)))
    except (TypeError, ValueError) as e:
        raise InvalidDistribution(f"cannot read {x!r} as a rational") from e


def _check_used(used, cap) -> None:
    if used < 0 or used > cap:
        raise UsedExceedsCapacity(f"used={used} outside [0, cap={cap}]")


@dataclass(frozen=True)
class FiniteDiscrete:
    # sorted by value, merged, every prob > 0, probs sum to exactly 1
    atoms: tuple[tuple[Fraction, Fraction], ...]

    kind = "discrete"

    @cached_property
    def values(self) -> tuple[Fraction, ...]:
        return tuple(v for v, _ in self.atoms)

    @cached_property
    def probs(self) -> tuple[Fraction, ...]:
        return tuple(p for _, p in self.atoms)

    @cached_property
    def _tail(self) -> tuple[Fraction, ...]:
        # _tail[k] = P(X >= values[k]); one extra 0 at the end
        out = [Fraction(0)] * (len(self.atoms) + 1)
        for k in range(len(self.atoms) - 1, -1, -1):
            out[k] = out[k + 1] + self.atoms[k][1]
        return tuple(out)

    @cached_property
    def _cum_float(self) -> tuple[float, ...]:
        # float(P(X <= values[k])) rounded from the exact cumulative sum
        acc = Fraction(0)
        out = []
        for _, p in self.atoms:
            acc += p
            out.append(float(acc))
        return tuple(out)

    @property
    def support(self) -> tuple[Fraction, ...]:
        return self.values

    def tail(self, x) -> Fraction:
        """P(X > x), exact."""
        return self._tail[bisect_right(self.values, x)]

    def overflow_prob(self, used, cap) -> Fraction:
        _check_used(used, cap)
        return self.tail(cap - used)

    def truncated_mean(self, cap) -> Fraction:
        return sum((min(v, cap) * p for v, p in self.atoms), Fraction(0))

    def mean(self) -> Fraction:
        return sum((v * p for v, p in self.atoms), Fraction(0))

    def quantile(self, u: float) -> Fraction:
        # inverse CDF: values[k] for P(X <= values[k-1]) <= u < P(X <= values[k])
        k = bisect_right(self._cum_float, u)
        return self.values[min(k, len(self.values) - 1)]

    def to_spec(self) -> dict:
        return {"kind": "discrete", "atoms": [[_fmt(v), _fmt(p)] for v, p in self.atoms]}


@dataclass(frozen=True)
class Exponential:
    rate: float

    kind = "exponential"
    support = None

    def tail(self, x) -> float:
        if x < 0:
            return 1.0
        return math.exp(-self.rate * float(x))

    def overflow_prob(self, used, cap) -> float:
        _check_used(used, cap)
        return math.exp(-self.rate * float(cap - used))

    def truncated_mean(self, cap) -> float:
        return -math.expm1(-self.rate * float(cap)) / self.rate

    def mean(self) -> float:
        return 1.0 / self.rate

    def quantile(self, u: float) -> float:
        return -math.log1p(-u) / self.rate

    def to_spec(self) -> dict:
        return {"kind": "exponential", "rate": repr(self.rate)}


SizeDistribution = Union[FiniteDiscrete, Exponential]


def _fmt(x: Fraction) -> str:
    return str(x)


def discrete(pairs: Iterable[tuple[object, object]]) -> FiniteDiscrete:
    """Validated FiniteDiscrete from (value, prob) pairs; equal values merge."""
    merged: dict[Fraction, Fraction] = {}
    for raw_v, raw_p in pairs:
        v = to_rational(raw_v)
        p = to_rational(raw_p)
        if v < 0:
            raise NegativeValue(f"negative size {v}")
        if p <= 0:
            raise NonPositiveProbability(f"probability {p} for size {v} is not > 0")
        merged[v] = merged.get(v, Fraction(0)) + p

    if not merged:
        raise InvalidDistribution("discrete law needs at least one atom")

    total = sum(merged.values(), Fraction(0))
    if total != 1:
        raise ProbabilitySumNotOne(f"probabilities sum to {total}, not 1")

    return FiniteDiscrete(atoms=tuple(sorted(merged.items())))


def point_mass(value) -> FiniteDiscrete:
    return discrete([(value, 1)])


def exponential(rate) -> Exponential:
    try:
        r = float(rate)
    except (TypeError, ValueError) as e:
        raise InvalidDistribution(f"cannot read rate {rate!r}") from e
    if not (r > 0) or not math.isfinite(r):
        raise NonPositiveRate(f"rate must be a positive finite number, got {rate!r}")
    return Exponential(rate=r)


def _parse_text(spec: str) -> SizeDistribution:
    # "exp:<rate>" | "point:<v>" | "discrete:v@p,v@p,..."
    kind, _, body = spec.partition(":")
    kind = kind.strip().lower()
    body = body.strip()

    if kind in ("exp", "exponential"):
        return exponential(body)
    if kind == "point":
        return point_mass(body)
    if kind == "discrete":
        pairs = []
        for chunk in body.split(","):
            if not chunk.strip():
                continue
            v, sep, p = chunk.partition("@")
            if not sep:
                raise InvalidDistribution(f"atom {chunk!r} is not value@prob")
            pairs.append((v, p))
        return discrete(pairs)

    raise InvalidDistribution(f"unknown distribution kind {kind!r}")


def build_distribution(spec) -> SizeDistribution:
    """Validated SizeDistribution from a dict, a text spec, or a distribution.

    Accepted dicts:
      - {"kind": "discrete", "atoms": [[v, p], ...]}
      - {"kind": "exponential", "rate": r}
      - {"discrete": [[v, p], ...]} / {"exponential": r}  (short forms)
    """
    if isinstance(spec, (FiniteDiscrete, Exponential)):
        return spec
    if isinstance(spec, str):
        return _parse_text(spec)
    if not isinstance(spec, Mapping):
        raise InvalidDistribution(f"unsupported distribution spec {spec!r}")

    if "discrete" in spec:
        return discrete(spec["discrete"])
    if "exponential" in spec:
        return exponential(spec["exponential"])

    kind = str(spec.get("kind", "")).lower()
    if kind == "discrete":
        return discrete(spec.get("atoms") or [])
    if kind in ("exponential", "exp"):
        return exponential(spec.get("rate"))

    raise InvalidDistribution(f"unknown distribution kind {kind!r}")


def overflow_prob(d: SizeDistribution, used, cap):
    """P(X > cap - used). Exact for discrete laws."""
    return d.overflow_prob(used, cap)


def truncated_mean(d: SizeDistribution, cap):
    """E[min(X, cap)]."""
    return d.truncated_mean(cap)


def sample(d: SizeDistribution, rng) -> Size:
    """One draw via the inverse CDF of a single uniform."""
    return d.quantile(float(rng.random()))
