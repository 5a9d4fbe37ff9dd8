from __future__ import annotations

import copy
import logging
from dataclasses import dataclass
from fractions import Fraction
from typing import Iterator

from config import Config
from errors import BudgetBoundViolation, InconsistentTree, InvalidParams, TreeTooLarge
from models.distribution import to_rational
from models.instance import Instance
from models.packing import OPEN
from models.policy_tree import PolicyArc, PolicyLeaf, PolicyNode, PolicyTree, TreeNode
from services.engine import new_state, pack_step
from services.exact import require_discrete

logger = logging.getLogger(f"packlab.{__name__}")


def _check_size(instance: Instance, leaf_cap: int) -> int:
    leaves = 1
    for d in instance.items:
        leaves *= len(d.atoms)
        if leaves > leaf_cap:
            raise TreeTooLarge(f"policy tree would have more than {leaf_cap} leaves")
    return leaves


def build_policy_tree(instance: Instance, policy, *, leaf_cap: int | None = None) -> PolicyTree:
    """Explicit decision tree of `policy` on a small discrete instance.

    Each branch replays the policy on its own copy of (state, policy), so
    policies with per-episode caches work unchanged.
    """
    require_discrete(instance)
    leaf_cap = Config.TREE_LEAF_CAP if leaf_cap is None else leaf_cap
    leaves = _check_size(instance, leaf_cap)

    n = instance.n
    C = instance.penalty

    def fork(state, pol):
        # share the (immutable) instance and its laws between branches
        memo = {id(instance): instance, id(instance.items): instance.items}
        for d in instance.items:
            memo[id(d)] = d
        return copy.deepcopy((state, pol), memo)

    def grow(state, pol) -> TreeNode:
        t = state.t
        if t == n:
            return PolicyLeaf(level=n + 1)
        d = instance.items[t]
        choice = pol.decide(state, t, d)
        label = len(state.bins) if choice == OPEN else choice

        arcs = []
        for x, p in d.atoms:
            s, q = fork(state, pol)
            pack_step(s, choice, x, instance)
            cost = C if s.bins[label].broken else Fraction(0)
            arcs.append(PolicyArc(outcome=x, prob=p, cost=cost, child=grow(s, q)))
        return PolicyNode(level=t + 1, bin=label, opens=choice == OPEN, arcs=tuple(arcs))

    policy.reset(instance)
    root = grow(new_state(instance), policy)
    logger.debug("built policy tree for %s: %d leaves", getattr(policy, "name", policy), leaves)
    return PolicyTree(root=root, n=n, penalty=C, capacity=instance.capacity)


# --- evaluation ---


def _check_node(u: PolicyNode, instance: Instance) -> None:
    d = instance.items[u.level - 1]
    got = tuple((a.outcome, a.prob) for a in u.arcs)
    if got != d.atoms:
        raise InconsistentTree(f"node at level {u.level}: arcs do not match the support of item {u.level}")


def eval_policy_tree(tree: PolicyTree, instance: Instance) -> Fraction:
    """cost(u) = open label + sum over arcs of prob * (arc cost + cost(child))."""
    if tree.n != instance.n:
        raise InconsistentTree(f"tree has {tree.n} levels, instance has {instance.n} items")

    def cost(u: TreeNode) -> Fraction:
        if isinstance(u, PolicyLeaf):
            if u.level != tree.n + 1:
                raise InconsistentTree(f"leaf at level {u.level}, expected {tree.n + 1}")
            return Fraction(0)
        _check_node(u, instance)
        return int(u.opens) + sum((a.prob * (a.cost + cost(a.child)) for a in u.arcs), Fraction(0))

    return cost(tree.root)


def iter_paths(tree: PolicyTree) -> Iterator[tuple[Fraction, list[tuple[PolicyNode, PolicyArc]]]]:
    """(path probability, [(node, arc taken), ...]) for every root-leaf path."""
    stack: list[tuple[TreeNode, Fraction, list]] = [(tree.root, Fraction(1), [])]
    while stack:
        u, prob, steps = stack.pop()
        if isinstance(u, PolicyLeaf):
            yield prob, steps
            continue
        for a in u.arcs:
            stack.append((a.child, prob * a.prob, steps + [(u, a)]))


def eval_policy_tree_leaves(tree: PolicyTree) -> Fraction:
    # sum over leaves of path probability * (labels collected on the path)
    total = Fraction(0)
    for prob, steps in iter_paths(tree):
        total += prob * sum((int(u.opens) + a.cost for u, a in steps), Fraction(0))
    return total


def expected_opened(tree: PolicyTree) -> Fraction:
    total = Fraction(0)
    for prob, steps in iter_paths(tree):
        total += prob * sum(1 for u, _ in steps if u.opens)
    return total


def exact_cost(instance: Instance, policy, *, leaf_cap: int | None = None) -> Fraction:
    return eval_policy_tree(build_policy_tree(instance, policy, leaf_cap=leaf_cap), instance)


# --- budget audit ---


@dataclass(frozen=True)
class BinAudit:
    risk: Fraction
    count: int


def path_bin_risks(tree: PolicyTree, instance: Instance) -> Iterator[tuple[Fraction, dict[int, BinAudit]]]:
    """Per root-leaf path: each bin's accumulated risk and item count."""
    cap = instance.capacity
    for prob, steps in iter_paths(tree):
        usage: dict[int, Fraction] = {}
        risk: dict[int, Fraction] = {}
        count: dict[int, int] = {}
        for u, a in steps:
            d = instance.items[u.level - 1]
            j = u.bin
            used = usage.get(j, Fraction(0))
            risk[j] = risk.get(j, Fraction(0)) + d.overflow_prob(used, cap)
            usage[j] = used + a.outcome
            count[j] = count.get(j, 0) + 1
        yield prob, {j: BinAudit(risk=risk[j], count=count[j]) for j in risk}


def is_path_budgeted(tree: PolicyTree, instance: Instance, budget) -> bool:
    """Every bin on every path stays within `budget`, or holds a single item."""
    budget = to_rational(budget)
    for _, bins in path_bin_risks(tree, instance):
        for audit in bins.values():
            if audit.risk > budget and audit.count != 1:
                return False
    return True


# --- budgetization ---


@dataclass
class _Copy:
    label: int
    risk: Fraction


def budgetize_policy_tree(
    tree: PolicyTree,
    gamma,
    instance: Instance,
    *,
    leaf_cap: int | None = None,
) -> PolicyTree:
    """Rewrite a policy tree so no bin's risk exceeds gamma/C on any path.

    Walks each root path keeping, per original bin, a current copy. An item
    joins the copy while the copy's risk stays within budget; the first item
    that would push it over goes to a fresh singleton bin and the copy is
    closed, so the next item of that original bin starts a new copy. Items
    with P(X > cap) > budget end up alone. The new tree costs at most
    (1 + 2/gamma) times the old one; this is checked exactly.
    """
    require_discrete(instance)
    leaf_cap = Config.TREE_LEAF_CAP if leaf_cap is None else leaf_cap
    _check_size(instance, leaf_cap)

    g = to_rational(gamma)
    if g <= 0:
        raise InvalidParams(f"gamma must be > 0, got {gamma}")
    C = instance.penalty
    cap = instance.capacity
    budget = g / C

    def walk(u: TreeNode, usage: list, copies: dict[int, _Copy]) -> TreeNode:
        if isinstance(u, PolicyLeaf):
            return u
        d = instance.items[u.level - 1]
        cur = copies.get(u.bin)

        # 1) pick the receiving bin
        if cur is None or cur.risk > budget:
            label = len(usage)
            p = d.overflow_prob(0, cap)
            nxt = dict(copies)
            nxt[u.bin] = _Copy(label=label, risk=p)
            usage = usage + [Fraction(0)]
            opens = True
        else:
            p = d.overflow_prob(usage[cur.label], cap)
            if cur.risk + p <= budget:
                label = cur.label
                nxt = dict(copies)
                nxt[u.bin] = _Copy(label=label, risk=cur.risk + p)
                opens = False
            else:
                # divert to a singleton, close the copy
                label = len(usage)
                nxt = {j: c for j, c in copies.items() if j != u.bin}
                usage = usage + [Fraction(0)]
                opens = True

        # 2) one arc per outcome, overflow cost from the receiving bin
        arcs = []
        for a in u.arcs:
            filled = list(usage)
            filled[label] = usage[label] + a.outcome
            cost = C if filled[label] > cap else Fraction(0)
            arcs.append(PolicyArc(outcome=a.outcome, prob=a.prob, cost=cost, child=walk(a.child, filled, nxt)))
        return PolicyNode(level=u.level, bin=label, opens=opens, arcs=tuple(arcs))

    out = PolicyTree(root=walk(tree.root, [], {}), n=tree.n, penalty=C, capacity=cap)

    before = eval_policy_tree(tree, instance)
    after = eval_policy_tree(out, instance)
    bound = (1 + 2 / g) * before
    if after > bound:
        raise BudgetBoundViolation(f"budgetized cost {after} exceeds (1 + 2/gamma) * {before} = {bound}")
    logger.info("budgetize gamma=%s: cost %s -> %s", gamma, float(before), float(after))
    return out
