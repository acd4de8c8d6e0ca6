"""Checkable sufficient conditions for convergence and step-size heuristics.

Spectral radii of nonnegative matrices are bracketed by Collatz-Wielandt
ratios on a diagonally shifted power iteration (the shift keeps the iterate
strictly positive, so the bracket is rigorous at every step), with a dense
eigenvalue fallback at small order when the bracket stalls.
"""

from __future__ import annotations

import itertools
from dataclasses import dataclass
from typing import Optional

import numpy as np

from .blockdata import (BlockTridiagonalMatrix, DenseMatrix, TridiagonalMatrix)
from .errors import NoRuleApplies, SingularM
from .solvers import LinearOperatorFactor

TWO_NORM_MAX_ORDER = 2000
DENSE_EIG_MAX_ORDER = 512


@dataclass
class ConvergenceReport:
    condition_tag: str  # Eq35Sampled | Eq38Rho | Eq38NormSum | Eq313Rho | Eq314Norm
    value: float
    threshold: float
    satisfied: bool
    samples_used: int = 0
    certifying: bool = True


def _report(tag, value, samples=0, certifying=True):
    value = float(value)
    return ConvergenceReport(tag, value, 1.0, bool(value < 1.0), samples, certifying)


@dataclass
class SpectralRadiusEstimate:
    value: float
    lower: float
    upper: float
    iterations: int
    converged: bool
    method: str  # power | dense | zero


def spectral_radius_nonneg(matvec, n, tol=1e-10, max_iter=5000, dense=None):
    """Spectral radius of a nonnegative operator given by its matvec.

    Runs shifted power iteration with Collatz-Wielandt brackets; if the
    bracket does not close and ``dense`` (a callable returning the full
    matrix) is available with n <= 512, computes eigenvalues directly.
    """
    v = np.ones(n)
    u0 = matvec(v)
    if np.min(u0) < -1e-30:
        raise ValueError("operator is not entrywise nonnegative")
    scale = float(np.max(u0))
    if scale == 0.0:
        return SpectralRadiusEstimate(0.0, 0.0, 0.0, 1, True, "zero")
    shift = 0.01 * scale
    lo = up = np.nan
    for k in range(1, max_iter + 1):
        u = matvec(v) + shift * v
        ratios = u / v
        lo = float(np.min(ratios))
        up = float(np.max(ratios))
        if up - lo <= tol * max(1.0, up):
            value = 0.5 * (lo + up) - shift
            return SpectralRadiusEstimate(value, max(lo - shift, 0.0), up - shift,
                                          k, True, "power")
        v = u / np.max(u)
    if dense is not None and n <= DENSE_EIG_MAX_ORDER:
        mat = dense()
        value = float(np.max(np.abs(np.linalg.eigvals(mat))))
        return SpectralRadiusEstimate(value, value, value, max_iter, True, "dense")
    value = 0.5 * (lo + up) - shift
    return SpectralRadiusEstimate(value, max(lo - shift, 0.0), up - shift,
                                  max_iter, False, "power")


def two_norm_estimate(matvec, rmatvec, n, tol=1e-12, max_iter=10000, seed=1234,
                      dense=None):
    """Largest singular value via power iteration on A^T A.

    Only offered for n <= 2000; raises ValueError beyond (callers report the
    2-norm as unavailable there). Random seeded start avoids starts orthogonal
    to the dominant singular space.
    """
    if n > TWO_NORM_MAX_ORDER:
        raise ValueError(f"2-norm only computed for n <= {TWO_NORM_MAX_ORDER}")
    rng = np.random.default_rng(seed)
    v = rng.standard_normal(n)
    v /= np.linalg.norm(v)
    lam_prev = None
    for k in range(1, max_iter + 1):
        u = rmatvec(matvec(v))
        lam = float(v @ u)
        norm_u = np.linalg.norm(u)
        if norm_u == 0.0:
            return 0.0
        v = u / norm_u
        if lam_prev is not None and abs(lam - lam_prev) <= tol * max(1.0, abs(lam)):
            return float(np.sqrt(max(lam, 0.0)))
        lam_prev = lam
    if dense is not None and n <= DENSE_EIG_MAX_ORDER:
        return float(np.linalg.norm(dense(), 2))
    return float(np.sqrt(max(lam_prev, 0.0)))


def induced_norm(store, tag):
    """Induced matrix norm of a store; the 2-norm is size-limited."""
    if tag == "1":
        return float(np.max(store.abs_colsums()))
    if tag == "inf":
        return float(np.max(store.abs_rowsums()))
    if tag == "2":
        return two_norm_estimate(store.matvec, store.rmatvec, store.n,
                                 dense=store.to_dense)
    raise ValueError(f"unknown norm tag {tag!r}")


@dataclass
class Cor31Result:
    rho: ConvergenceReport
    norm_sum: ConvergenceReport
    satisfied: bool
    winner: Optional[str]


def check_cor31(blocks, norm_tag="inf", dense_limit=4096):
    """Both computable convergence conditions for the general fixed-point method.

    Checks the spectral radius of sum_i |I - M^{-1} H_i| and the norm sum
    sum_i ||I - M^{-1} H_i||; either below one suffices.
    """
    n = blocks.n
    if n > dense_limit:
        raise ValueError(f"check requires dense work, n <= {dense_limit}")
    factor = LinearOperatorFactor(blocks.M)  # raises SingularM
    eye = np.eye(n)
    abs_sum = np.zeros((n, n))
    norm_sum = 0.0
    for h in blocks.H:
        e = eye - factor.solve(h.to_dense())
        abs_sum += np.abs(e)
        if norm_tag == "2":
            d = DenseMatrix(e)
            norm_sum += two_norm_estimate(d.matvec, d.rmatvec, n, dense=lambda e=e: e)
        else:
            norm_sum += float(np.linalg.norm(e, {"1": 1, "inf": np.inf}[norm_tag]))
    est = spectral_radius_nonneg(lambda x: abs_sum @ x, n, dense=lambda: abs_sum)
    rho_rep = _report("Eq38Rho", est.value)
    norm_rep = _report("Eq38NormSum", norm_sum)
    satisfied = rho_rep.satisfied or norm_rep.satisfied
    winner = ("Eq38Rho" if rho_rep.satisfied else
              "Eq38NormSum" if norm_rep.satisfied else None)
    return Cor31Result(rho_rep, norm_rep, satisfied, winner)


@dataclass
class Thm34Result:
    rho: ConvergenceReport
    norms: dict  # norm tag -> ConvergenceReport (2-norm None when unavailable)

    @property
    def satisfied(self):
        return self.rho.satisfied or any(r is not None and r.satisfied
                                         for r in self.norms.values())


def check_thm34(H1, omega):
    """Spectral-radius and norm conditions for the scaled m=2 iteration.

    Reports rho(|omega^{-1} H1 - I|) and ||omega^{-1} H1 - I|| for norms
    {1, 2, inf}; the two families do not contain each other.
    """
    if omega <= 0:
        raise ValueError("omega must be positive")
    a = H1.scaled(1.0 / omega).shifted_diag(-1.0)
    a_abs = a.absolute()
    est = spectral_radius_nonneg(a_abs.matvec, a.n, dense=a_abs.to_dense)
    norms = {}
    for tag in ("1", "inf"):
        norms[tag] = _report("Eq314Norm", induced_norm(a, tag))
    if a.n <= TWO_NORM_MAX_ORDER:
        norms["2"] = _report("Eq314Norm", induced_norm(a, "2"))
    else:
        norms["2"] = None
    return Thm34Result(_report("Eq313Rho", est.value), norms)


def simplex_selections(m, n, trials, seed):
    """Per-coordinate uniform draws from the (m+1)-simplex (normalized exponentials)."""
    rng = np.random.default_rng(seed)
    for _ in range(trials):
        e = rng.exponential(size=(m + 1, n))
        yield e / e.sum(axis=0)


def vertex_selections(m, n):
    """All assignments of full weight to one block per coordinate."""
    for assign in itertools.product(range(m + 1), repeat=n):
        lam = np.zeros((m + 1, n))
        lam[list(assign), np.arange(n)] = 1.0
        yield lam


def sample_rho_L(blocks, trials=200, seed=0, vertex_budget=4096):
    """Heuristic scan of the iteration-matrix spectral radius over selections.

    The exact condition quantifies over the whole selection set, which has no
    general algorithm; this samples it (plus all vertices when cheap) and is
    explicitly non-certifying.
    """
    n, m = blocks.n, blocks.m
    factor = LinearOperatorFactor(blocks.M)  # raises SingularM
    dense_blocks = [s.to_dense() for s in blocks.all()]
    eye = np.eye(n)

    def rho_of(lam):
        s = np.zeros((n, n))
        for row, mat in zip(lam, dense_blocks):
            s += mat * row[None, :]
        l_mat = eye - factor.solve(s)
        return float(np.max(np.abs(np.linalg.eigvals(l_mat))))

    worst = 0.0
    count = 0
    if (m + 1) ** n <= vertex_budget:
        for lam in vertex_selections(m, n):
            worst = max(worst, rho_of(lam))
            count += 1
    for lam in simplex_selections(m, n, trials, seed):
        worst = max(worst, rho_of(lam))
        count += 1
    return _report("Eq35Sampled", worst, samples=count, certifying=False)


def is_symmetric(store):
    if isinstance(store, DenseMatrix):
        return bool(np.array_equal(store.data, store.data.T))
    if isinstance(store, TridiagonalMatrix):
        return bool(np.array_equal(store.sub, store.sup))
    if isinstance(store, BlockTridiagonalMatrix):
        return store.sub == store.sup and is_symmetric(store.diag_block)
    raise TypeError(f"not a matrix store: {store!r}")


def is_diagonal(store):
    return bool(np.array_equal(store.abs_rowsums(), np.abs(store.diagonal())))


@dataclass
class OmegaSuggestion:
    kind: str  # scalar | diagonal
    value: object  # float or vector
    rule: str


def suggest_omega(H1):
    """Step-size heuristic for the scaled m=2 iteration.

    Rule order: column-sdd with scalar diagonal tau -> tau; exactly diagonal
    positive matrix -> its diagonal; symmetric -> half its inf-norm (padded
    1 percent); positive diagonal -> the diagonal part. Raises NoRuleApplies
    otherwise.
    """
    diag = H1.diagonal()
    col_margins = 2.0 * np.abs(diag) - H1.abs_colsums()
    col_sdd = bool(np.all(col_margins > 0))
    scalar_diag = diag.size > 0 and float(np.ptp(diag)) == 0.0
    if col_sdd and scalar_diag and diag[0] > 0:
        return OmegaSuggestion("scalar", float(diag[0]), "column-sdd-scalar-diagonal")
    if is_diagonal(H1) and np.all(diag > 0):
        return OmegaSuggestion("diagonal", diag.copy(), "positive-diagonal")
    if is_symmetric(H1):
        value = 0.5 * float(np.max(H1.abs_rowsums())) * 1.01
        return OmegaSuggestion("scalar", value, "symmetric")
    if np.all(diag > 0):
        return OmegaSuggestion("diagonal", diag.copy(), "positive-diagonal")
    raise NoRuleApplies("H1 has a nonpositive diagonal entry and is neither "
                        "symmetric nor column-sdd with a scalar diagonal")
