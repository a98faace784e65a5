"""Internal MIP instance model and structural validation."""

from __future__ import annotations

from dataclasses import dataclass, field

import numpy as np

# Variable kinds
CONTINUOUS = "C"
INTEGER = "I"
BINARY = "B"
KINDS = (CONTINUOUS, INTEGER, BINARY)

# Row senses
LE = "LE"
GE = "GE"
EQ = "EQ"
SENSES = (LE, GE, EQ)

MAXIMIZE = "max"
MINIMIZE = "min"

INF = float("inf")


@dataclass(eq=False)
class Row:
    """One linear constraint: sparse coefficients, sense, right-hand side."""

    name: str
    coeffs: list[tuple[int, float]]  # (var index, coefficient), sorted by index
    sense: str  # LE | GE | EQ
    rhs: float


@dataclass(eq=False)
class MipProblem:
    """A mixed integer program: objective, rows, bounds, integrality."""

    name: str
    sense: str  # max | min
    objective: np.ndarray  # dense, one coefficient per variable
    rows: list[Row]
    lower: np.ndarray
    upper: np.ndarray
    kinds: list[str]  # C | I | B per variable
    var_names: list[str] = field(default_factory=list)

    def __post_init__(self):
        self.objective = np.asarray(self.objective, dtype=float)
        self.lower = np.asarray(self.lower, dtype=float)
        self.upper = np.asarray(self.upper, dtype=float)
        if not self.var_names:
            self.var_names = [f"x{j}" for j in range(len(self.kinds))]

    @property
    def num_vars(self) -> int:
        return len(self.kinds)

    @property
    def num_rows(self) -> int:
        return len(self.rows)

    def integer_indices(self) -> list[int]:
        return [j for j, k in enumerate(self.kinds) if k != CONTINUOUS]

    def is_maximize(self) -> bool:
        return self.sense == MAXIMIZE


def effective_bounds(problem: MipProblem, overrides=None):
    """Bounds after applying sparse per-variable (lo, up) tightenings.

    An override maps var index -> (lo, up) where either side may be None,
    meaning "keep the root bound".
    """
    lower = problem.lower.copy()
    upper = problem.upper.copy()
    if overrides:
        for j, (lo, up) in overrides.items():
            if lo is not None:
                lower[j] = lo
            if up is not None:
                upper[j] = up
    return lower, upper


def validate(problem: MipProblem) -> list[str]:
    """Check model invariants; returns one message per violation (empty = ok)."""
    issues = []
    n = problem.num_vars
    if len(problem.objective) != n or len(problem.lower) != n or len(problem.upper) != n:
        issues.append(
            f"inconsistent sizes: objective={len(problem.objective)} "
            f"lower={len(problem.lower)} upper={len(problem.upper)} kinds={n}"
        )
        return issues
    if problem.sense not in (MAXIMIZE, MINIMIZE):
        issues.append(f"unknown objective sense {problem.sense!r}")
    for row in problem.rows:
        if row.sense not in SENSES:
            issues.append(f"row {row.name}: unknown sense {row.sense!r}")
        for j, _ in row.coeffs:
            if not 0 <= j < n:
                issues.append(f"row {row.name}: variable index {j} out of range (n={n})")
    for j in range(n):
        name = problem.var_names[j]
        if problem.kinds[j] not in KINDS:
            issues.append(f"variable {name}: unknown kind {problem.kinds[j]!r}")
        if problem.lower[j] > problem.upper[j]:
            issues.append(
                f"variable {name}: lower {problem.lower[j]} exceeds upper {problem.upper[j]}"
            )
        if problem.kinds[j] == BINARY:
            if problem.lower[j] < 0 or problem.upper[j] > 1:
                issues.append(
                    f"variable {name}: binary bounds [{problem.lower[j]}, {problem.upper[j]}] "
                    "outside [0, 1]"
                )
    return issues
