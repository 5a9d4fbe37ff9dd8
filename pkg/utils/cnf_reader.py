from __future__ import annotations

from pathlib import Path

from errors import InputError
from models.cnf import Cnf


def parse_dimacs(text: str) -> Cnf:
    """Cnf from DIMACS text.

    Supported:
      - comments: lines starting with 'c' or '%'
      - header: p cnf <vars> <clauses>
      - clauses: signed ints terminated by 0, may span lines
    """
    n_vars = None
    clauses: list[tuple[int, ...]] = []
    cur: list[int] = []

    for raw_line in text.splitlines():
        line = raw_line.strip()
        if not line or line[0] in "c%":
            continue

        if line.startswith("p"):
            parts = line.split()
            if len(parts) != 4 or parts[1] != "cnf":
                raise InputError(f"bad DIMACS header {line!r}")
            n_vars = int(parts[2])
            continue

        for tok in line.split():
            lit = int(tok)
            if lit == 0:
                clauses.append(tuple(cur))
                cur = []
            else:
                cur.append(lit)

    # a last clause without its terminating 0
    if cur:
        clauses.append(tuple(cur))

    if n_vars is None:
        n_vars = max((abs(l) for c in clauses for l in c), default=0)
    return Cnf(n_vars=n_vars, clauses=tuple(clauses))


def load_cnf(path: str) -> Cnf:
    p = Path(path)
    if not p.exists():
        raise InputError(f"CNF file not found: {path}")
    return parse_dimacs(p.read_text(encoding="utf-8"))
