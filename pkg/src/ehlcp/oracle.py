"""Exhaustive region-enumeration reference solver for desk-scale instances.

Each coordinate of y lives in one of m + 1 intervals delimited by the
breakpoints {0 = s_0, s_1, ..., s_{m-1}}; on a fixed region assignment the
piecewise linear system turns affine with a column representative as its
matrix, so every region is one small linear solve plus a membership test.
This is correctness infrastructure, not a production solver.
"""

from __future__ import annotations

from dataclasses import dataclass

import numpy as np

from .bounds import overalpha_estimate, underalpha_exact
from .errors import BudgetExceeded
from .transform import recover_solution
from .wproperty import assignments

REGION_TOL = 1e-9
DEDUP_TOL = 1e-8


@dataclass
class OracleResult:
    solutions: list  # (y, EhlcpSolution) pairs, deduplicated
    regions_checked: int
    singular_regions: int


def oracle_solve(problem, budget=2 ** 20, region_tol=REGION_TOL,
                 dedup_tol=DEDUP_TOL):
    """All piecewise-linear-system solutions found by region enumeration.

    Region membership uses closed intervals with slack on both sides, so
    breakpoint solutions appear in several regions; duplicates are merged by
    y-proximity. Under the column W-property exactly one solution survives.
    """
    n, m = problem.n, problem.m
    total = (m + 1) ** n
    if total > budget:
        raise BudgetExceeded(f"{total} regions exceed budget {budget}")
    stores = problem.blocks.all()
    cols = [np.column_stack([s.column(j) for j in range(n)]) for s in stores]
    s_breaks = problem.ladder.prefix_sums()
    d = problem.ladder.d
    ys = []
    singular = 0
    checked = 0
    for assign in assignments(n, m):
        checked += 1
        mat = np.empty((n, n))
        g = np.array(problem.q, copy=True)
        for j, c in enumerate(assign):
            if c == 0:
                mat[:, j] = cols[0][:, j]
            else:
                mat[:, j] = cols[c][:, j]
                g -= s_breaks[c - 1][j] * cols[c][:, j]
                for l in range(1, c):
                    g += d[l - 1][j] * cols[l][:, j]
        try:
            y = np.linalg.solve(mat, -g)
        except np.linalg.LinAlgError:
            singular += 1
            continue
        ok = True
        for j, c in enumerate(assign):
            v = y[j]
            if c == 0:
                ok = v <= region_tol
            elif c < m:
                ok = (s_breaks[c - 1][j] - region_tol <= v
                      <= s_breaks[c][j] + region_tol)
            else:
                ok = v >= s_breaks[m - 1][j] - region_tol
            if not ok:
                break
        if not ok:
            continue
        if any(np.max(np.abs(y - prev)) <= dedup_tol for prev in ys):
            continue
        ys.append(y)
    solutions = [(y, recover_solution(y, problem.ladder)) for y in ys]
    return OracleResult(solutions, checked, singular)


def oracle_alpha_constants(blocks, norm_tag="inf", budget=2 ** 20):
    """(max combination norm, max vertex inverse norm) by exact vertex enumeration."""
    total = (blocks.m + 1) ** blocks.n
    if total > budget:
        raise BudgetExceeded(f"{total} vertices exceed budget {budget}")
    under = underalpha_exact(blocks, norm_tag, budget=budget)
    over = overalpha_estimate(blocks, norm_tag, samples=0, vertex_budget=budget)
    return under.value, over.value
