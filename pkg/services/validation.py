# services/validation.py

from __future__ import annotations

import math
from typing import List

from config import Config
from models.distribution import FiniteDiscrete
from models.instance import Instance

# hints starting with this prefix mean "too big", everything else "wrong input"
TOO_LARGE = "Too large: "

MODES = ("exact", "tree", "single_bin", "budgeted", "ptas", "threshold")


def _support_product(instance: Instance) -> float:
    # log-space so long instances do not overflow
    return math.exp(min(700.0, sum(math.log(len(d.atoms)) for d in instance.items)))


def validate_instance_before_solve(instance: Instance, mode: str) -> List[str]:
    """
    Validate an instance BEFORE starting an exact solver.
    Returns a list of readable hints. Empty list => safe to attempt solve.

    mode is one of:
      - exact:      optimal_cost_dp / policy-tree extraction
      - tree:       explicit policy trees (build / budgetize)
      - single_bin: single-bin optimum for i.i.d. items
      - budgeted:   min_opened_budgeted
      - ptas:       discretization + level DP
      - threshold:  MDP threshold extraction
    """
    hints: List[str] = []

    if mode not in MODES:
        hints.append(f'Unknown solve mode "{mode}". Use one of: {", ".join(MODES)}.')
        return hints

    # Rule 1: exact solvers need finitely supported items
    continuous = [i for i, d in enumerate(instance.items) if not isinstance(d, FiniteDiscrete)]
    if continuous:
        shown = ", ".join(str(i) for i in continuous[:5])
        more = "..." if len(continuous) > 5 else ""
        hints.append(
            f"Items {shown}{more} are exponential; {mode} needs finite discrete items. "
            "Simulate them instead, or replace them with discrete laws."
        )
        return hints

    # Rule 2: one distribution for every item
    if mode in ("single_bin", "budgeted", "threshold") and not instance.is_iid:
        hints.append(f"{mode} is defined for i.i.d. items, but this instance mixes distributions.")

    # Rule 3: unit bins for the approximation scheme
    if mode == "ptas" and instance.capacity != 1:
        hints.append(f"ptas works with bins of size 1, this instance has capacity {instance.capacity}.")

    # Rule 4: brute-force budgeted search only on short sequences
    if mode == "budgeted" and instance.n > Config.BUDGETED_MAX_ITEMS:
        hints.append(
            f"{TOO_LARGE}budgeted search is limited to {Config.BUDGETED_MAX_ITEMS} items, "
            f"instance has {instance.n}. Use a prefix or raise PACKLAB_BUDGETED_MAX_ITEMS."
        )

    # Rule 5: explicit trees have one leaf per outcome sequence
    if mode == "tree":
        leaves = _support_product(instance)
        if leaves > Config.TREE_LEAF_CAP:
            hints.append(
                f"{TOO_LARGE}a policy tree would have about {leaves:.3g} leaves "
                f"(limit {Config.TREE_LEAF_CAP}). Use a shorter prefix."
            )

    return hints


def is_too_large(hints: List[str]) -> bool:
    return any(h.startswith(TOO_LARGE) for h in hints)
