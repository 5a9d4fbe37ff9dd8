from __future__ import annotations

import json
from fractions import Fraction
from pathlib import Path

from errors import InputError, ParamsMismatch
from models.action_table import ActionTable, DiscretizationParams
from models.distribution import build_distribution, to_rational
from models.instance import Instance
from models.packing import OPEN

# Instance files:
#   {"penalty": "50", "capacity": "1", "items": [spec, ...], "meta": {...}}
# Rationals are "p/q" strings. Runs of equal items may be written as
# {"repeat": k, "dist": spec}.


def _read_json(path: str) -> dict:
    p = Path(path)
    if not p.exists():
        raise InputError(f"file not found: {path}")
    try:
        return json.loads(p.read_text(encoding="utf-8"))
    except json.JSONDecodeError as e:
        raise InputError(f"{path} is not valid JSON: {e}") from e


def _write_json(path: str, doc: dict) -> None:
    p = Path(path)
    p.parent.mkdir(parents=True, exist_ok=True)
    p.write_text(json.dumps(doc, indent=2) + "\n", encoding="utf-8")


def instance_to_dict(instance: Instance) -> dict:
    items = []
    prev = None
    for d in instance.items:
        if d == prev:
            items[-1]["repeat"] += 1
        else:
            items.append({"repeat": 1, "dist": d.to_spec()})
        prev = d
    # single items are written bare
    items = [e["dist"] if e["repeat"] == 1 else e for e in items]
    return {
        "penalty": str(instance.penalty),
        "capacity": str(instance.capacity),
        "items": items,
        "meta": instance.meta,
    }


def instance_from_dict(doc: dict) -> Instance:
    for key in ("penalty", "items"):
        if key not in doc:
            raise InputError(f'instance file has no "{key}"')

    items = []
    for entry in doc["items"]:
        if isinstance(entry, dict) and "repeat" in entry:
            d = build_distribution(entry["dist"])
            items.extend([d] * int(entry["repeat"]))
        else:
            items.append(build_distribution(entry))

    capacity = to_rational(doc.get("capacity", "1"))
    if capacity.denominator == 1:
        capacity = int(capacity)
    return Instance(
        items=tuple(items),
        penalty=to_rational(doc["penalty"]),
        capacity=capacity,
        meta=dict(doc.get("meta") or {}),
    )


def save_instance(instance: Instance, path: str) -> None:
    _write_json(path, instance_to_dict(instance))


def load_instance(path: str) -> Instance:
    return instance_from_dict(_read_json(path))


# --- action tables ---


def _action_out(a):
    return "open" if a == OPEN else str(a)


def _action_in(raw, kind: str):
    if raw == "open":
        return OPEN
    return int(raw) if kind == "level" else Fraction(raw)


def save_action_table(table: ActionTable, path: str) -> None:
    rows = []
    for (t, state), a in sorted(table.actions.items(), key=lambda kv: (kv[0][0], kv[0][1])):
        if table.kind == "level":
            st = [[lvl, cnt] for lvl, cnt in state]
        else:
            st = [str(u) for u in state]
        rows.append({"t": t, "state": st, "action": _action_out(a)})
    _write_json(
        path,
        {
            "kind": table.kind,
            "value": None if table.value is None else str(table.value),
            "params": None if table.params is None else table.params.as_dict(),
            "actions": rows,
        },
    )


def _params_from(raw) -> DiscretizationParams | None:
    if raw is None:
        return None
    return DiscretizationParams(
        eps=Fraction(raw["eps"]),
        small_cut=Fraction(raw["small_cut"]),
        grid=Fraction(raw["grid"]),
    )


def load_action_table(path: str, params: DiscretizationParams | None = None) -> ActionTable:
    """Read a table back. With `params`, the stored ones must match exactly."""
    doc = _read_json(path)
    kind = doc.get("kind")
    if kind not in ("usage", "level"):
        raise InputError(f"{path}: unknown action table kind {kind!r}")

    stored = _params_from(doc.get("params"))
    if params is not None and stored != params:
        raise ParamsMismatch(f"{path} was built with {stored}, not {params}")

    actions = {}
    for row in doc.get("actions", []):
        if kind == "level":
            state = tuple((int(lvl), int(cnt)) for lvl, cnt in row["state"])
        else:
            state = tuple(Fraction(u) for u in row["state"])
        actions[(int(row["t"]), state)] = _action_in(row["action"], kind)

    value = doc.get("value")
    return ActionTable(
        kind=kind,
        actions=actions,
        params=stored,
        value=None if value is None else Fraction(value),
    )


# --- reduction sidecar ---


def reduction_sidecar(art) -> dict:
    """Role and block-split digits of every item of a reduction instance."""
    lay = art.layout
    n, m = lay.n, lay.m
    width = lay.width
    cuts = {"variable": (0, n), "mirror": (n, 2 * n), "equivalence": (2 * n, 4 * n), "clause": (4 * n, width)}

    def split(x: int) -> dict:
        s = str(x).rjust(width, "0")
        return {name: s[lo:hi] for name, (lo, hi) in cuts.items()}

    items = []
    for role, d in zip(art.roles, art.instance.items):
        items.append({"role": role, "values": [split(int(v)) for v in d.values]})

    return {
        "n_vars": n,
        "n_clauses": m,
        "capacity": split(art.capacity),
        "blocks": {name: hi - lo for name, (lo, hi) in cuts.items()},
        "penalty": str(art.instance.penalty),
        "items": items,
        "cnf": art.cnf.to_dimacs(),
    }


def save_reduction_sidecar(art, path: str) -> None:
    _write_json(path, reduction_sidecar(art))
