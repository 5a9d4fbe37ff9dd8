from __future__ import annotations

from dataclasses import dataclass

from errors import InputError

# a literal is a nonzero int: +i for x_i, -i for its negation (DIMACS style)
Clause = tuple[int, ...]


@dataclass(frozen=True)
class Cnf:
    n_vars: int
    clauses: tuple[Clause, ...]

    def __post_init__(self):
        clauses = tuple(tuple(int(l) for l in c) for c in self.clauses)
        for c in clauses:
            if not c:
                raise InputError("empty clause")
            for lit in c:
                if lit == 0 or abs(lit) > self.n_vars:
                    raise InputError(f"literal {lit} outside 1..{self.n_vars}")
        object.__setattr__(self, "clauses", clauses)

    @property
    def widths(self) -> set[int]:
        return {len(c) for c in self.clauses}

    def evaluate(self, assignment) -> bool:
        """assignment[i - 1] is the truth value of x_i."""
        return all(any(assignment[abs(l) - 1] == (l > 0) for l in c) for c in self.clauses)

    def to_dimacs(self) -> str:
        lines = [f"p cnf {self.n_vars} {len(self.clauses)}"]
        lines += [" ".join(str(l) for l in c) + " 0" for c in self.clauses]
        return "\n".join(lines) + "\n"
