from __future__ import annotations

from dataclasses import dataclass
from fractions import Fraction
from typing import Iterator, Union


@dataclass(frozen=True)
class PolicyLeaf:
    # always n + 1
    level: int


@dataclass(frozen=True)
class PolicyArc:
    outcome: Fraction
    prob: Fraction
    # C when this outcome overflows the chosen bin, else 0
    cost: Fraction
    child: "PolicyNode | PolicyLeaf"


@dataclass(frozen=True)
class PolicyNode:
    """Decision for item `level` (1-based): put it into `bin`.

    `opens` is the open-cost label: True iff `bin` is fresh on this root path.
    Arcs follow the item's support in ascending order.
    """

    level: int
    bin: int
    opens: bool
    arcs: tuple[PolicyArc, ...]


TreeNode = Union[PolicyNode, PolicyLeaf]


@dataclass(frozen=True)
class PolicyTree:
    root: TreeNode
    n: int
    penalty: Fraction
    capacity: Fraction | int

    def nodes(self) -> Iterator[PolicyNode]:
        stack = [self.root]
        while stack:
            u = stack.pop()
            if isinstance(u, PolicyNode):
                yield u
                stack.extend(a.child for a in u.arcs)

    def leaf_count(self) -> int:
        count = 0
        stack = [self.root]
        while stack:
            u = stack.pop()
            if isinstance(u, PolicyLeaf):
                count += 1
            else:
                stack.extend(a.child for a in u.arcs)
        return count
