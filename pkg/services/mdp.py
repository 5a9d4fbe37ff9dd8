from __future__ import annotations

import logging
from collections import deque
from dataclasses import dataclass, field
from fractions import Fraction

import numpy as np
from pulp import PULP_CBC_CMD, LpMaximize, LpProblem, LpStatus, LpVariable, lpSum

from config import Config
from errors import InvalidParams, NonDiscreteItem, StateSpaceTooLarge
from models.distribution import FiniteDiscrete, to_rational

logger = logging.getLogger(f"packlab.{__name__}")

# the absorbing "already overflowed" state, always last
OVERFLOW = "1+"

CONTINUE = 0
OPEN_NEW = 1


@dataclass(frozen=True)
class MdpStateSpace:
    """Usages of the single active bin: reachable sums <= cap, then OVERFLOW.

    Transitions are stored as index arrays per support atom instead of dense
    matrices: cont_next[a, k] is where state k goes when the item takes
    atom a and we keep the bin, open_next[a] where a fresh bin lands.
    """

    d: FiniteDiscrete
    capacity: Fraction | int
    states: tuple  # sorted usages, then OVERFLOW
    probs: np.ndarray
    cont_next: np.ndarray
    open_next: np.ndarray
    # P(X + s > cap) per state (1 at OVERFLOW)
    cont_overflow: np.ndarray
    # P(X > cap)
    open_overflow: float

    @property
    def size(self) -> int:
        return len(self.states)

    @property
    def overflow_index(self) -> int:
        return len(self.states) - 1


@dataclass
class ValueTable:
    V: np.ndarray
    discount: float
    penalty: float
    residual: float
    iterations: int
    residuals: list[float] = field(default_factory=list)


def build_state_space(
    d: FiniteDiscrete,
    capacity=1,
    *,
    cap_states: int | None = None,
) -> MdpStateSpace:
    """Breadth-first closure of {0} under s -> s + v, everything past cap folded into OVERFLOW."""
    if not isinstance(d, FiniteDiscrete):
        raise NonDiscreteItem("threshold MDP needs a finite-support law")
    cap_states = Config.MDP_STATE_CAP if cap_states is None else cap_states

    zero = Fraction(0)
    seen = {zero}
    queue = deque([zero])
    while queue:
        s = queue.popleft()
        for v in d.values:
            t = s + v
            if t <= capacity and t not in seen:
                seen.add(t)
                queue.append(t)
                if len(seen) + 1 > cap_states:
                    raise StateSpaceTooLarge(f"MDP closure passed {cap_states} states")

    usages = sorted(seen)
    index = {s: k for k, s in enumerate(usages)}
    over = len(usages)

    cont_next = np.full((len(d.values), over + 1), over, dtype=np.int64)
    open_next = np.empty(len(d.values), dtype=np.int64)
    for a, v in enumerate(d.values):
        for k, s in enumerate(usages):
            t = s + v
            if t <= capacity:
                cont_next[a, k] = index[t]
        open_next[a] = index.get(v, over) if v <= capacity else over

    cont_overflow = np.array([float(d.overflow_prob(s, capacity)) for s in usages] + [1.0])
    space = MdpStateSpace(
        d=d,
        capacity=capacity,
        states=tuple(usages) + (OVERFLOW,),
        probs=np.array([float(p) for p in d.probs]),
        cont_next=cont_next,
        open_next=open_next,
        cont_overflow=cont_overflow,
        open_overflow=float(d.tail(capacity)),
    )
    logger.debug("mdp state space: %d states", space.size)
    return space


def q_values(space: MdpStateSpace, V: np.ndarray, C: float, discount: float) -> tuple[np.ndarray, np.ndarray]:
    """Both Bellman branches for every state."""
    q_cont = C * space.cont_overflow + discount * (space.probs @ V[space.cont_next])
    q_open = 1.0 + C * space.open_overflow + discount * float(space.probs @ V[space.open_next])
    return q_cont, np.full_like(q_cont, q_open)


def value_iteration(
    space: MdpStateSpace,
    C,
    discount: float | None = None,
    tol: float | None = None,
    *,
    max_iter: int = 10_000_000,
) -> ValueTable:
    discount = Config.MDP_DISCOUNT if discount is None else float(discount)
    tol = Config.MDP_TOL if tol is None else float(tol)
    if not 0 < discount < 1:
        raise InvalidParams(f"discount must be in (0, 1), got {discount}")
    if not tol > 0:
        raise InvalidParams(f"tol must be > 0, got {tol}")

    Cf = float(C)
    V = np.zeros(space.size)
    residuals: list[float] = []
    residual = float("inf")
    it = 0
    while residual >= tol and it < max_iter:
        q_cont, q_open = q_values(space, V, Cf, discount)
        nxt = np.minimum(q_cont, q_open)
        residual = float(np.max(np.abs(nxt - V)))
        residuals.append(residual)
        V = nxt
        it += 1
        if it % 10_000 == 0:
            logger.debug("value iteration: %d sweeps, residual %.3e", it, residual)

    logger.info("value iteration: %d states, %d sweeps, residual %.3e", space.size, it, residual)
    return ValueTable(V=V, discount=discount, penalty=Cf, residual=residual, iterations=it, residuals=residuals)


def continue_set(table: ValueTable, space: MdpStateSpace) -> list:
    """Sub-capacity states where continuing is at least as good as opening.

    Values within the convergence error count as ties and go to continue.
    """
    q_cont, q_open = q_values(space, table.V, table.penalty, table.discount)
    tie = 10.0 * max(table.residual, 0.0) / (1.0 - table.discount)
    over = space.overflow_index
    return [space.states[k] for k in range(over) if q_cont[k] < q_open[k] + tie]


def extract_threshold(table: ValueTable, space: MdpStateSpace) -> Fraction:
    """alpha = sup of the continue set; the whole range [0, cap] if every state continues."""
    E = continue_set(table, space)
    if len(E) == space.overflow_index:
        return to_rational(space.capacity)
    return max(E) if E else Fraction(0)


@dataclass(frozen=True)
class ThresholdReport:
    alpha: Fraction
    n_states: int
    iterations: int
    residual: float

    def as_dict(self) -> dict:
        return {
            "alpha": str(self.alpha),
            "n_states": self.n_states,
            "iterations": self.iterations,
            "residual": self.residual,
        }


def threshold_for(
    d: FiniteDiscrete,
    C,
    *,
    capacity=1,
    discount: float | None = None,
    tol: float | None = None,
    cap_states: int | None = None,
) -> ThresholdReport:
    space = build_state_space(d, capacity, cap_states=cap_states)
    table = value_iteration(space, C, discount, tol)
    alpha = extract_threshold(table, space)
    return ThresholdReport(alpha=alpha, n_states=space.size, iterations=table.iterations, residual=table.residual)


# --- LP cross-check ---


def build_model(space: MdpStateSpace, C, discount: float):
    """Primal LP of the discounted MDP: max sum V(s) s.t. V(s) <= c(s,a) + discount * E[V(next)]."""
    Cf = float(C)
    model = LpProblem("ThresholdMdp", LpMaximize)

    # decision vars: V[k] per state
    V = {k: LpVariable(f"V_{k}", lowBound=None) for k in range(space.size)}

    # 1) continue, every state
    for k in range(space.size):
        model += (
            V[k]
            <= Cf * float(space.cont_overflow[k])
            + discount * lpSum(float(p) * V[int(space.cont_next[a, k])] for a, p in enumerate(space.probs))
        ), f"cont_{k}"

    # 2) open, every state (same right-hand side everywhere)
    c_open = 1.0 + Cf * space.open_overflow
    for k in range(space.size):
        model += (
            V[k] <= c_open + discount * lpSum(float(p) * V[int(space.open_next[a])] for a, p in enumerate(space.probs))
        ), f"open_{k}"

    # 3) objective
    model += lpSum(V.values()), "max_sum_values"
    return model, V


def solve_lp(space: MdpStateSpace, C, discount: float) -> np.ndarray:
    model, V = build_model(space, C, discount)
    model.solve(PULP_CBC_CMD(msg=False))
    status = LpStatus[model.status]
    if status != "Optimal":
        raise InvalidParams(f"MDP LP finished with status {status}")
    return np.array([V[k].value() for k in range(space.size)])
