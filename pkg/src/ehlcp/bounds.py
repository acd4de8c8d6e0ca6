"""Global error bounds: the residual sandwich and its computable constants.

For any y, ||r(y)|| / alpha_low <= ||y - y*|| <= alpha_up ||r(y)||, where the
two alphas extremize the norm (resp. inverse norm) of diagonal selection
combinations of the blocks. alpha_low is exact by vertex enumeration (the
norm is convex over the selection simplex); alpha_up has no general algorithm
and is replaced by the computable diagonal-dominance constants plus a
non-certifying sampled lower estimate for tightness diagnostics.
"""

from __future__ import annotations

from dataclasses import dataclass
from typing import Optional

import numpy as np
from scipy.sparse.linalg import LinearOperator, onenormest

from .blockdata import (DenseMatrix, band_matvec, band_nonzero_rows,
                        band_row_scale, band_to_dense, band_transpose, to_band)
from .convergence import (TWO_NORM_MAX_ORDER, simplex_selections,
                          spectral_radius_nonneg, two_norm_estimate)
from .errors import (BudgetExceeded, NonpositiveDiagonal, NormMismatch,
                     SingularM, SingularSelection)
from .solvers import BandedFactor, DenseFactor
from .transform import DiagonalSelection, pls_residual
from .wproperty import assignments, representative, selection_combination

DENSE_LIMIT = 4096


def comparison_matrix(store):
    """|diagonal| on the diagonal, -|off-diagonal| elsewhere, same layout."""
    return store.comparison()


@dataclass
class SddReport:
    row_sdd: bool
    col_sdd: bool
    row_margins: np.ndarray  # (<A> e)_i
    col_margins: np.ndarray  # (<A^T> e)_i


def sdd_classify(store):
    """Strict diagonal dominance by rows and by columns, with margins."""
    d = np.abs(store.diagonal())
    row_margins = 2.0 * d - store.abs_rowsums()
    col_margins = 2.0 * d - store.abs_colsums()
    return SddReport(bool(np.all(row_margins > 0)), bool(np.all(col_margins > 0)),
                     row_margins, col_margins)


@dataclass
class SplitParts:
    """Diagonal/off-diagonal splits A = Lambda - C with diag(C) = 0."""

    Lambda: list  # positive diagonal vectors
    C: list       # matrix stores, -offdiagonal of the source


def split_diagonal(blocks):
    lambdas, cs = [], []
    for store in blocks.all():
        lam = store.diagonal()
        if not np.all(lam > 0):
            raise NonpositiveDiagonal("every block needs a positive diagonal")
        lambdas.append(lam)
        cs.append(store.offdiag_negated())
    return SplitParts(lambdas, cs)


@dataclass
class BoundReport:
    kind: str  # Thm42Eta | Thm43Tau | Thm41Sandwich
    constant: float
    norm_tag: str
    condition_satisfied: bool
    condition_value: float
    error_interval: Optional[tuple] = None


def _scaled_abs_offdiag_band(blocks, lambdas):
    """Band forms of Lambda_i^{-1}|C_i| on a common bandwidth, or None if dense."""
    stores = blocks.all()
    if any(isinstance(s, DenseMatrix) for s in stores):
        return None
    width = max(max(s.bandwidth for s in stores), 1)
    mats = []
    for lam, s in zip(lambdas, stores):
        ab = to_band(s.offdiag_abs(), width, width)
        mats.append(band_row_scale(ab, width, width, 1.0 / lam))
    return np.maximum.reduce(mats), width


def bound42(blocks, norm_tag="inf"):
    """Constant of the positive-diagonal bound, with its spectral condition.

    The entrywise max over blocks of Lambda_i^{-1}|C_i| is taken coordinate by
    coordinate; when rho of that matrix is below one, the constant
    ||(I - max_i Lambda_i^{-1}|C_i|)^{-1} max_i Lambda_i^{-1}|| certifies the
    upper error bound (norms 1 and inf supported).
    """
    if norm_tag not in ("1", "inf"):
        raise ValueError("bound supports norm tags '1' and 'inf'")
    n = blocks.n
    split = split_diagonal(blocks)
    d_max = np.maximum.reduce([1.0 / lam for lam in split.Lambda])
    banded = _scaled_abs_offdiag_band(blocks, split.Lambda)
    if banded is not None:
        x_ab, w = banded
        nz = band_nonzero_rows(x_ab)
        est = spectral_radius_nonneg(
            lambda v: band_matvec(x_ab, w, w, v, rows=nz), n,
            dense=(lambda: band_to_dense(x_ab, w, w)) if n <= 512 else None)
    else:
        if n > DENSE_LIMIT:
            raise ValueError(f"dense layout too large for this bound (n > {DENSE_LIMIT})")
        parts = []
        for lam, s in zip(split.Lambda, blocks.all()):
            a = np.abs(s.to_dense())
            np.fill_diagonal(a, 0.0)
            parts.append(a / lam[:, None])
        x_dense = np.maximum.reduce(parts)
        est = spectral_radius_nonneg(lambda v: x_dense @ v, n, dense=lambda: x_dense)
    satisfied = est.upper < 1.0
    if satisfied:
        # (I - X)^{-1} D is entrywise nonnegative: its 1/inf norms are plain
        # column/row sums, one banded (or dense) solve each.
        if banded is not None:
            ab_i = -x_ab.copy()
            ab_i[w, :] += 1.0
            factor = BandedFactor(ab_i, w, w)
        else:
            factor = DenseFactor(np.eye(n) - x_dense)
        if norm_tag == "inf":
            z = factor.solve(d_max)
            constant = float(np.max(z))
        else:
            u = factor.solve(np.ones(n), transposed=True)
            constant = float(np.max(d_max * u))
    else:
        # Condition violated: report the true norm when feasible, flag it.
        if n <= DENSE_LIMIT:
            x_dense = band_to_dense(x_ab, w, w) if banded is not None else x_dense
            try:
                inv = np.linalg.inv(np.eye(n) - x_dense)
                mat = inv * d_max[None, :]
                constant = float(np.linalg.norm(mat, {"1": 1, "inf": np.inf}[norm_tag]))
            except np.linalg.LinAlgError:
                constant = float("inf")
        else:
            constant = float("nan")
    return BoundReport("Thm42Eta", constant, norm_tag, satisfied, est.value)


def bound43(blocks):
    """Reciprocal minimal column-dominance margin (1-norm bound).

    Hypothesis: every block transposed is row sdd and the blocks' diagonals
    agree in sign coordinatewise; only flagged, the constant is still
    reported whenever the margins are positive.
    """
    margins = []
    for store in blocks.all():
        margins.append(2.0 * np.abs(store.diagonal()) - store.abs_colsums())
    all_col_sdd = all(bool(np.all(m > 0)) for m in margins)
    diags = [store.diagonal() for store in blocks.all()]
    signs = np.sign(diags[0])
    same_sign = bool(np.all(signs != 0)) and all(
        bool(np.all(np.sign(d) == signs)) for d in diags[1:])
    min_margin = float(min(np.min(m) for m in margins))
    constant = 1.0 / min_margin if min_margin > 0 else float("inf")
    return BoundReport("Thm43Tau", constant, "1", all_col_sdd and same_sign,
                       min_margin)


def residual_error_interval(problem, y, alpha_upper, alpha_lower_den,
                            norm_tag="inf"):
    """Two-sided error interval (||r||/alpha_low, alpha_up * ||r||) at y.

    BoundReport / AlphaEstimate arguments must carry the requested norm tag;
    bare floats are trusted as-is.
    """
    up_tag = getattr(alpha_upper, "norm_tag", None)
    lo_tag = getattr(alpha_lower_den, "norm_tag", None)
    if up_tag is not None and up_tag != norm_tag:
        raise NormMismatch(f"upper constant is a {up_tag}-norm bound, wanted {norm_tag}")
    if lo_tag is not None and lo_tag != norm_tag:
        raise NormMismatch(f"lower constant is a {lo_tag}-norm bound, wanted {norm_tag}")
    up = getattr(alpha_upper, "constant", None)
    if up is None:
        up = getattr(alpha_upper, "value", alpha_upper)
    lo = getattr(alpha_lower_den, "value", alpha_lower_den)
    r_norm = pls_residual(problem, y).norms[norm_tag]
    return (r_norm / float(lo), float(up) * r_norm)


@dataclass
class AlphaEstimate:
    value: float
    norm_tag: str
    exact: bool  # vertex enumeration (exact) vs sampled estimate
    count: int


def _combo_norm(combo, norm_tag, n):
    if isinstance(combo, DenseMatrix):
        if norm_tag == "2":
            return float(np.linalg.norm(combo.data, 2))
        return float(np.linalg.norm(combo.data, {"1": 1, "inf": np.inf}[norm_tag]))
    ab, l, u = combo
    if norm_tag == "inf":
        return float(np.max(band_matvec(np.abs(ab), l, u, np.ones(n))))
    if norm_tag == "1":
        return float(np.max(np.sum(np.abs(ab), axis=0)))
    abt = band_transpose(ab, l, u)
    return two_norm_estimate(lambda v: band_matvec(ab, l, u, v),
                             lambda v: band_matvec(abt, l, u, v), n)


def _combo_inverse_norm(combo, norm_tag, n):
    if isinstance(combo, DenseMatrix):
        try:
            inv = np.linalg.inv(combo.data)
        except np.linalg.LinAlgError as exc:
            raise SingularM(str(exc)) from exc
        if not np.isfinite(inv).all():
            raise SingularM("inverse overflowed")
        if norm_tag == "2":
            return float(np.linalg.norm(inv, 2))
        return float(np.linalg.norm(inv, {"1": 1, "inf": np.inf}[norm_tag]))
    ab, l, u = combo
    factor = BandedFactor(ab, l, u)
    if norm_tag == "2":
        return two_norm_estimate(factor.solve,
                                 lambda v: factor.solve(v, transposed=True), n)
    if norm_tag == "1":
        op = LinearOperator((n, n), matvec=factor.solve,
                            rmatvec=lambda v: factor.solve(v, transposed=True))
    else:  # ||S^{-1}||_inf = ||(S^T)^{-1}||_1
        op = LinearOperator((n, n), matvec=lambda v: factor.solve(v, transposed=True),
                            rmatvec=factor.solve)
    return float(onenormest(op)) if n > 2 else _dense_inverse_norm(ab, l, u, norm_tag)


def _dense_inverse_norm(ab, l, u, norm_tag):
    inv = np.linalg.inv(band_to_dense(ab, l, u))
    return float(np.linalg.norm(inv, {"1": 1, "inf": np.inf}[norm_tag]))


def underalpha_exact(blocks, norm_tag="inf", budget=2 ** 20, samples=0, seed=0):
    """Max selection-combination norm over the selection set.

    Exact when all (m+1)^n vertices fit the budget: the norm is convex in the
    selection weights over a product of simplices, so the max sits at a
    vertex, and vertex combinations are exactly the column representatives.
    Otherwise a sampled lower estimate (flagged) when samples > 0.
    """
    n, m = blocks.n, blocks.m
    total = (m + 1) ** n
    if total <= budget:
        worst = 0.0
        for assign in assignments(n, m):
            worst = max(worst, _combo_norm(representative(blocks, assign),
                                           norm_tag, n))
        return AlphaEstimate(worst, norm_tag, True, total)
    if samples > 0:
        worst = 0.0
        for lam in simplex_selections(m, n, samples, seed):
            worst = max(worst, _combo_norm(selection_combination(blocks, lam),
                                           norm_tag, n))
        return AlphaEstimate(worst, norm_tag, False, samples)
    raise BudgetExceeded(f"{total} vertices exceed budget {budget}; "
                         "pass samples > 0 for a sampled estimate")


def overalpha_estimate(blocks, norm_tag="inf", samples=200, seed=0,
                       vertex_budget=4096):
    """Max inverse norm over sampled plus vertex selections.

    Always a lower estimate of the true supremum and never certifying; used
    for tightness diagnostics against the computable upper bounds. A singular
    selection is raised as a witness against the column W-property.
    """
    n, m = blocks.n, blocks.m
    worst = 0.0
    count = 0

    def visit(lam):
        nonlocal worst, count
        combo = selection_combination(blocks, lam)
        try:
            worst = max(worst, _combo_inverse_norm(combo, norm_tag, n))
        except SingularM as exc:
            raise SingularSelection(
                "singular selection combination (column W-property violated)",
                selection=DiagonalSelection(np.asarray(lam, dtype=float)),
            ) from exc
        count += 1

    if (m + 1) ** n <= vertex_budget:
        for assign in assignments(n, m):
            lam = np.zeros((m + 1, n))
            lam[list(assign), np.arange(n)] = 1.0
            visit(lam)
    for lam in simplex_selections(m, n, samples, seed):
        visit(lam)
    return AlphaEstimate(worst, norm_tag, False, count)
