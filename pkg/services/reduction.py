from __future__ import annotations

import itertools
import logging
from bisect import bisect_left
from collections import Counter
from dataclasses import dataclass, field
from fractions import Fraction

import numpy as np

from config import Config
from errors import (
    BoundCheckFailed,
    CountOutOfRange,
    InstanceTooLarge,
    InvalidParams,
    NotSymmetric,
    NotWidth2,
    OccurrenceBound,
    TooManyVariables,
)
from models.cnf import Cnf
from models.distribution import discrete, point_mass
from models.instance import Instance

logger = logging.getLogger(f"packlab.{__name__}")

SEMANTIC_SYMMETRY_MAX_VARS = 20


# --- formulas ---


def symmetrize_2cnf(phi: Cnf) -> Cnf:
    """Symmetric 4CNF over x0, x1..xn with twice the satisfying assignments.

    x0 becomes variable 1 and x_i becomes i + 1. Clauses:
      x0 v x0 v C_j(x)
      ~x0 v ~x0 v C_j(~x)
      C_j(x) v C_k(~x)      for every pair j, k (cross clauses)
    Clauses holding a literal and its negation are dropped, as are repeats.
    """
    if any(len(c) != 2 for c in phi.clauses):
        raise NotWidth2(f"expected a 2CNF, got clause widths {sorted(phi.widths)}")

    def up(lit: int) -> int:
        return lit + 1 if lit > 0 else lit - 1

    x0 = 1
    shifted = [tuple(up(l) for l in c) for c in phi.clauses]

    out: list[tuple[int, ...]] = []
    seen: set[tuple[int, ...]] = set()

    def add(clause: tuple[int, ...]) -> None:
        lits = set(clause)
        if any(-l in lits for l in lits):
            return
        key = tuple(sorted(clause))
        if key not in seen:
            seen.add(key)
            out.append(clause)

    for l1, l2 in shifted:
        add((x0, x0, l1, l2))
    for l1, l2 in shifted:
        add((-x0, -x0, -l1, -l2))
    for (a1, a2), (b1, b2) in itertools.product(shifted, repeat=2):
        add((a1, a2, -b1, -b2))

    return Cnf(n_vars=phi.n_vars + 1, clauses=tuple(out))


def _sat_chunks(phi: Cnf, chunk: int = 1 << 20):
    """Yield (assignment indices, satisfied mask); bit i-1 of the index is x_i."""
    total = 1 << phi.n_vars
    for start in range(0, total, chunk):
        idx = np.arange(start, min(total, start + chunk), dtype=np.int64)
        sat = np.ones(idx.shape, dtype=bool)
        for c in phi.clauses:
            hit = np.zeros(idx.shape, dtype=bool)
            for lit in c:
                bit = (idx >> (abs(lit) - 1)) & 1
                hit |= bit == (1 if lit > 0 else 0)
            sat &= hit
        yield idx, sat


def count_sat_bruteforce(phi: Cnf, *, max_vars: int = 24) -> int:
    if phi.n_vars > max_vars:
        raise TooManyVariables(f"{phi.n_vars} variables; enumeration stops at {max_vars}")
    return int(sum(int(sat.sum()) for _, sat in _sat_chunks(phi)))


def is_symmetric(phi: Cnf) -> bool:
    """phi(x) == phi(~x) for every x.

    Enumerated for small formulas; otherwise the clause multiset must be
    closed under negating every literal (sufficient, not necessary).
    """
    if phi.n_vars <= SEMANTIC_SYMMETRY_MAX_VARS:
        mask = (1 << phi.n_vars) - 1
        table = np.concatenate([sat for _, sat in _sat_chunks(phi)])
        comp = (~np.arange(1 << phi.n_vars, dtype=np.int64)) & mask
        return bool(np.array_equal(table, table[comp]))
    mine = Counter(tuple(sorted(c)) for c in phi.clauses)
    flipped = Counter(tuple(sorted(-l for l in c)) for c in phi.clauses)
    return mine == flipped


# --- the instance ---


@dataclass(frozen=True)
class DigitLayout:
    """Exponents of 10 for every digit of the construction."""

    n: int
    m: int

    def var(self, i: int) -> int:
        return 4 * self.n - i + self.m

    def mirror(self, i: int) -> int:
        return 3 * self.n - i + self.m

    def pos_eq(self, i: int) -> int:
        return 2 * self.n - 2 * i + 1 + self.m

    def neg_eq(self, i: int) -> int:
        return 2 * self.n - 2 * i + self.m

    def clause(self, j: int) -> int:
        return self.m - j

    @property
    def width(self) -> int:
        return 4 * self.n + self.m

    def blocks(self) -> dict[str, list[int]]:
        n, m = self.n, self.m
        return {
            "variable": [self.var(i) for i in range(1, n + 1)],
            "mirror": [self.mirror(i) for i in range(1, n + 1)],
            "equivalence": [p for i in range(1, n + 1) for p in (self.pos_eq(i), self.neg_eq(i))],
            "clause": [self.clause(j) for j in range(1, m + 1)],
        }


@dataclass(frozen=True)
class ReductionArtifacts:
    cnf: Cnf
    instance: Instance
    capacity: int
    layout: DigitLayout
    # one role per item, in instance order: "X1", "X1'", "c1", "d1", "f1", "g1", "h1", ..., "h"
    roles: tuple[str, ...]
    # the numbers a_i, b_i, c_i, d_i, f_j, g_j, h_j, h, B by name
    numbers: dict[str, int] = field(default_factory=dict)

    @property
    def n_vars(self) -> int:
        return self.cnf.n_vars

    def random_count(self) -> int:
        return 2 * self.cnf.n_vars


def digits(x: int, width: int) -> str:
    return str(x).rjust(width, "0")


def digit_load(art: ReductionArtifacts) -> list[int]:
    """Per-digit total over all items, both outcomes of each random item counted.

    All entries <= 9 means no subset of items ever carries.
    """
    width = art.layout.width
    load = [0] * width
    for d in art.instance.items:
        for v in d.values:
            for k, ch in enumerate(digits(int(v), width)):
                load[k] += int(ch)
    return load


def reduction_instance(phi: Cnf, *, penalty=None) -> ReductionArtifacts:
    """Bin packing instance whose optimal cost encodes the number of models of phi."""
    if any(len(c) != 4 for c in phi.clauses):
        raise InvalidParams(f"expected a 4CNF, got clause widths {sorted(phi.widths)}")
    for j, c in enumerate(phi.clauses, start=1):
        worst = max(Counter(c).values())
        if worst > 2:
            raise OccurrenceBound(f"clause {j} repeats a literal {worst} times")
    if not is_symmetric(phi):
        raise NotSymmetric("formula is not invariant under flipping every variable")

    n, m = phi.n_vars, len(phi.clauses)
    lay = DigitLayout(n, m)
    pw = [10**k for k in range(lay.width + 1)]
    penalty = Config.REDUCTION_PENALTY if penalty is None else penalty

    B = sum(pw[lay.var(i)] + pw[lay.mirror(i)] + pw[lay.pos_eq(i)] + pw[lay.neg_eq(i)] for i in range(1, n + 1))
    B += sum(4 * pw[lay.clause(j)] for j in range(1, m + 1))

    numbers: dict[str, int] = {"B": B}
    for i in range(1, n + 1):
        pos = sum(c.count(i) * pw[lay.clause(j)] for j, c in enumerate(phi.clauses, start=1))
        neg = sum(c.count(-i) * pw[lay.clause(j)] for j, c in enumerate(phi.clauses, start=1))
        numbers[f"a{i}"] = pw[lay.var(i)] + pw[lay.neg_eq(i)]
        numbers[f"b{i}"] = pw[lay.var(i)] + pw[lay.pos_eq(i)]
        numbers[f"c{i}"] = pw[lay.mirror(i)] + pw[lay.pos_eq(i)] + pos
        numbers[f"d{i}"] = pw[lay.mirror(i)] + pw[lay.neg_eq(i)] + neg
    for j in range(1, m + 1):
        for s in "fgh":
            numbers[f"{s}{j}"] = pw[lay.clause(j)]
    numbers["h"] = sum(pw[lay.clause(j)] for j in range(1, m + 1))

    items = []
    roles = []
    half = Fraction(1, 2)
    for i in range(1, n + 1):
        x = discrete([(numbers[f"a{i}"], half), (numbers[f"b{i}"], half)])
        items += [x, x]
        roles += [f"X{i}", f"X{i}'"]
    for i in range(1, n + 1):
        items += [point_mass(numbers[f"c{i}"]), point_mass(numbers[f"d{i}"])]
        roles += [f"c{i}", f"d{i}"]
    for j in range(1, m + 1):
        for s in "fgh":
            items.append(point_mass(numbers[f"{s}{j}"]))
            roles.append(f"{s}{j}")
    items.append(point_mass(numbers["h"]))
    roles.append("h")

    instance = Instance(
        items=tuple(items),
        penalty=penalty,
        capacity=B,
        meta={"generator": "reduction", "params": {"n_vars": str(n), "n_clauses": str(m)}},
    )
    art = ReductionArtifacts(cnf=phi, instance=instance, capacity=B, layout=lay, roles=tuple(roles), numbers=numbers)

    load = digit_load(art)
    if max(load) > 9:
        raise BoundCheckFailed(f"digit loads {load} can carry")
    logger.info("reduction instance: %d vars, %d clauses, %d items, B has %d digits", n, m, len(items), len(str(B)))
    return art


def reduction_value(n_vars: int, s_phi: int) -> Fraction:
    """Optimal expected cost of the reduction instance.

    With P(no collision) = 2^-n, collisions on a (cost 2) and on b (cost 3)
    splitting the rest evenly, and cost 3 - s/2^n without a collision:
    5/2 (1 - 2^-n) + (3 - s/2^n) / 2^n = 5/2 + 1/2^(n+1) - s/2^(2n).
    """
    if not 0 <= s_phi <= 2**n_vars:
        raise CountOutOfRange(f"s={s_phi} outside 0..2^{n_vars}")
    return Fraction(5, 2) + Fraction(1, 2 ** (n_vars + 1)) - Fraction(s_phi, 4**n_vars)


# --- oracles on the instance ---


def _split_items(art: ReductionArtifacts):
    r = art.random_count()
    items = art.instance.items
    randoms = items[:r]
    fixed = [int(d.values[0]) for d in items[r:]]
    return randoms, fixed


def _subset_sums(values: list[int]) -> list[int]:
    sums = {0}
    for v in values:
        sums |= {s + v for s in sums}
    return sorted(sums)


def restricted_policy_search(
    art: ReductionArtifacts,
    *,
    max_vars: int = 3,
    max_clauses: int = 8,
) -> Fraction:
    """Exact optimum over policies that put X_i in bin 1 and X_i' in bin 2.

    After the random items everything is known, so finishing in two bins is a
    subset-sum question: some subset S of the rest with
    u1 + sum(S) <= B and u2 + (rest - sum(S)) <= B. Otherwise a third bin
    takes all of the rest. Breaking a bin is never worth it (C > 2).
    """
    n, m = art.n_vars, len(art.cnf.clauses)
    if n > max_vars or m > max_clauses:
        raise InstanceTooLarge(f"{n} vars / {m} clauses above the search limit ({max_vars} / {max_clauses})")

    B = art.capacity
    randoms, fixed = _split_items(art)
    rest = sum(fixed)

    # meet in the middle: slack items (identical per clause) vs. everything else
    r_slack = 2 * n
    first = _subset_sums(fixed[:r_slack] + fixed[-1:])
    slack = _subset_sums(fixed[r_slack:-1])

    def two_bins(u1: int, u2: int) -> bool:
        lo = u2 + rest - B
        hi = B - u1
        if lo > hi:
            return False
        for s1 in first:
            k = bisect_left(slack, lo - s1)
            if k < len(slack) and slack[k] + s1 <= hi:
                return True
        return False

    memo: dict[tuple[int, int, int], Fraction] = {}

    def value(t: int, u1: int, u2: int) -> Fraction:
        if t == len(randoms):
            return Fraction(2) if two_bins(u1, u2) else Fraction(3)
        key = (t, u1, u2)
        if key in memo:
            return memo[key]
        d = randoms[t]
        v = Fraction(0)
        for x, p in d.atoms:
            x = int(x)
            if t % 2 == 0:
                v += p * value(t + 1, u1 + x, u2)
            else:
                v += p * value(t + 1, u1, u2 + x)
        memo[key] = v
        return v

    out = value(0, 0, 0)
    logger.info("restricted search: %d vars, %d clauses -> %s", n, m, out)
    return out


def constructive_policy_value(art: ReductionArtifacts) -> Fraction:
    """Exact expected cost of the explicit two-or-three bin policy.

    X_i -> bin 1, X_i' -> bin 2. If the first collision X_i = X_i' is on b,
    everything else goes to bin 3. Otherwise c_k joins the bin holding a_k
    (bin 1 when X_k = a_k) and d_k the other one; slack items and h go
    first-fit over bins 1, 2, 3.
    """
    n = art.n_vars
    B = art.capacity
    num = art.numbers
    randoms, fixed = _split_items(art)
    tail = fixed[2 * n :]

    total = Fraction(0)
    weight = Fraction(1, 4**n)
    for outcome in itertools.product((0, 1), repeat=2 * n):
        # 0 -> a, 1 -> b
        X = outcome[0::2]
        Xp = outcome[1::2]
        bins = [0, 0]
        for i in range(n):
            bins[0] += num[f"a{i + 1}"] if X[i] == 0 else num[f"b{i + 1}"]
            bins[1] += num[f"a{i + 1}"] if Xp[i] == 0 else num[f"b{i + 1}"]

        first = next((i for i in range(n) if X[i] == Xp[i]), None)
        if first is not None and X[first] == 1:
            total += weight * 3
            continue

        for i in range(n):
            home = 0 if X[i] == 0 else 1
            _place(bins, home, num[f"c{i + 1}"], B)
            _place(bins, 1 - home, num[f"d{i + 1}"], B)

        for x in tail:
            for j in range(len(bins) + 1):
                if j == len(bins):
                    bins.append(x)
                    break
                if bins[j] + x <= B:
                    bins[j] += x
                    break
        total += weight * len(bins)
    return total


def _place(bins: list[int], j: int, x: int, B: int) -> None:
    if bins[j] + x > B:
        raise BoundCheckFailed(f"constructive policy overflows bin {j + 1}")
    bins[j] += x
