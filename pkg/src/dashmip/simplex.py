"""LP relaxation solver: revised simplex with general variable bounds.

Rows are turned into equalities with one slack each (LE -> slack in
[0, inf), GE -> (-inf, 0], EQ -> fixed at 0); feasibility is found with a
phase of artificial variables, then the true objective is optimized.
The basis is refactorized densely every iteration, which is plenty fast
at the instance sizes this solver targets and keeps the arithmetic
reproducible. Bland's rule engages after a run of degenerate steps so
the method always terminates.
"""

from __future__ import annotations

from dataclasses import dataclass

import numpy as np
from scipy.linalg import LinAlgWarning, lu_factor, lu_solve

from .model import EQ, GE, INF, LE, MipProblem, effective_bounds

import warnings

FEAS_TOL = 1e-7
DUAL_TOL = 1e-9
PIVOT_TOL = 1e-9
DEGENERATE_STREAK = 40

OPTIMAL = "optimal"
INFEASIBLE = "infeasible"
UNBOUNDED = "unbounded"
ITERATION_LIMIT = "iteration_limit"

# column statuses
_BASIC = 0
_AT_LOWER = 1
_AT_UPPER = 2
_FREE = 3


@dataclass(eq=False)
class LpSolution:
    status: str
    values: np.ndarray | None = None
    objective: float | None = None
    iterations: int = 0


def solve_lp(problem: MipProblem, bound_overrides=None, iteration_cap: int = 20000) -> LpSolution:
    """Solve the LP relaxation under the node's tightened bounds.

    Deterministic: identical inputs produce bit-identical solution vectors.
    Crossed bounds (lower > upper) short-circuit to infeasible.
    """
    n = problem.num_vars
    m = problem.num_rows
    lower, upper = effective_bounds(problem, bound_overrides)
    if np.any(lower > upper):
        return LpSolution(INFEASIBLE)

    smult = 1.0 if problem.is_maximize() else -1.0
    c_int = smult * problem.objective  # internal form always maximizes

    if m == 0:
        return _solve_box(problem, c_int, lower, upper, smult)

    # Columns: n structural, m slacks, m artificials.
    ncols = n + 2 * m
    A = np.zeros((m, ncols))
    b = np.zeros(m)
    lo = np.concatenate([lower, np.zeros(m), np.zeros(m)])
    up = np.concatenate([upper, np.zeros(m), np.full(m, INF)])
    for i, row in enumerate(problem.rows):
        for j, coef in row.coeffs:
            A[i, j] = coef
        A[i, n + i] = 1.0
        b[i] = row.rhs
        if row.sense == LE:
            lo[n + i], up[n + i] = 0.0, INF
        elif row.sense == GE:
            lo[n + i], up[n + i] = -INF, 0.0
        else:
            lo[n + i], up[n + i] = 0.0, 0.0

    status = np.full(ncols, _AT_LOWER, dtype=np.int8)
    values = np.zeros(ncols)
    for j in range(n + m):
        if lo[j] > -INF:
            values[j] = lo[j]
            status[j] = _AT_LOWER
        elif up[j] < INF:
            values[j] = up[j]
            status[j] = _AT_UPPER
        else:
            values[j] = 0.0
            status[j] = _FREE

    resid = b - A[:, : n + m] @ values[: n + m]
    art = np.arange(n + m, ncols)
    for i in range(m):
        A[i, n + m + i] = 1.0 if resid[i] >= 0 else -1.0
    basis = art.copy()
    status[art] = _BASIC

    c_phase1 = np.zeros(ncols)
    c_phase1[art] = -1.0

    st, values, iters1 = _iterate(A, b, c_phase1, lo, up, basis, status, values, iteration_cap)
    if st == ITERATION_LIMIT:
        return LpSolution(ITERATION_LIMIT, iterations=iters1)
    art_sum = values[art].sum()
    if art_sum > FEAS_TOL:
        return LpSolution(INFEASIBLE, iterations=iters1)

    up[art] = 0.0  # artificials locked at zero for the real objective
    c_phase2 = np.zeros(ncols)
    c_phase2[:n] = c_int
    st, values, iters2 = _iterate(
        A, b, c_phase2, lo, up, basis, status, values, iteration_cap - iters1
    )
    iters = iters1 + iters2
    if st != OPTIMAL:
        return LpSolution(st, iterations=iters)

    x = values[:n].copy()
    np.clip(x, lower, upper, out=x)
    return LpSolution(OPTIMAL, values=x, objective=float(problem.objective @ x), iterations=iters)


def _solve_box(problem, c_int, lower, upper, smult):
    # No rows: optimum sits at the objective-favoured end of each bound.
    x = np.where(c_int > 0, upper, np.where(c_int < 0, lower, 0.0))
    if not np.all(np.isfinite(x)):
        return LpSolution(UNBOUNDED)
    zero = c_int == 0
    anchor = np.where(np.isfinite(lower), lower, np.where(np.isfinite(upper), upper, 0.0))
    x = np.where(zero, anchor, x)
    return LpSolution(OPTIMAL, values=x, objective=float(problem.objective @ x))


def _iterate(A, b, c, lo, up, basis, status, values, cap):
    """Primal simplex loop on equalities A z = b with bounds lo <= z <= up.

    Mutates basis/status in place; returns (status, full value vector, iters).
    """
    m, ncols = A.shape
    fixed = lo == up
    bland = False
    streak = 0
    iters = 0
    cap = max(int(cap), 1)

    while True:
        B = A[:, basis]
        with warnings.catch_warnings():
            warnings.simplefilter("ignore", LinAlgWarning)
            try:
                lu = lu_factor(B)
            except Exception:
                return ITERATION_LIMIT, values, iters
        nonbasic = status != _BASIC
        rhs = b - A[:, nonbasic] @ values[nonbasic]
        xb = lu_solve(lu, rhs)
        if not np.all(np.isfinite(xb)):
            return ITERATION_LIMIT, values, iters
        values[basis] = xb

        y = lu_solve(lu, c[basis], trans=1)
        d = c - y @ A
        can_enter = (
            ((status == _AT_LOWER) & (d > DUAL_TOL) & ~fixed)
            | ((status == _AT_UPPER) & (d < -DUAL_TOL) & ~fixed)
            | ((status == _FREE) & (np.abs(d) > DUAL_TOL))
        )
        idx = np.flatnonzero(can_enter)
        if idx.size == 0:
            return OPTIMAL, values, iters
        if iters >= cap:
            return ITERATION_LIMIT, values, iters
        iters += 1

        if bland:
            q = int(idx[0])
        else:
            q = int(idx[np.argmax(np.abs(d[idx]))])
        sigma = 1.0 if (status[q] == _AT_LOWER or (status[q] == _FREE and d[q] > 0)) else -1.0

        w = lu_solve(lu, A[:, q])
        t_best = INF
        leave_pos = -1
        leave_col = ncols  # tie-break on smallest column index
        for i in range(m):
            dw = sigma * w[i]
            col = basis[i]
            if dw > PIVOT_TOL:
                lim = (values[col] - lo[col]) / dw if lo[col] > -INF else INF
            elif dw < -PIVOT_TOL:
                lim = (values[col] - up[col]) / dw if up[col] < INF else INF
            else:
                continue
            if lim < 0.0:
                lim = 0.0
            if lim < t_best - 1e-12 or (lim <= t_best + 1e-12 and col < leave_col):
                if lim < t_best:
                    t_best = lim
                leave_pos, leave_col = i, col
        t_flip = up[q] - lo[q] if (lo[q] > -INF and up[q] < INF) else INF

        step = min(t_flip, t_best)
        if step == INF:
            return UNBOUNDED, values, iters

        if t_flip <= t_best:
            # bound flip: no basis change
            values[q] = up[q] if status[q] == _AT_LOWER else lo[q]
            status[q] = _AT_UPPER if status[q] == _AT_LOWER else _AT_LOWER
        else:
            out = basis[leave_pos]
            dw = sigma * w[leave_pos]
            status[out] = _AT_LOWER if dw > 0 else _AT_UPPER
            values[out] = lo[out] if dw > 0 else up[out]
            values[q] = (lo[q] if status[q] == _AT_LOWER else (up[q] if status[q] == _AT_UPPER else 0.0)) + sigma * step
            basis[leave_pos] = q
            status[q] = _BASIC

        if step <= 1e-9:
            streak += 1
            if streak >= DEGENERATE_STREAK:
                bland = True
        else:
            streak = 0
            bland = False
