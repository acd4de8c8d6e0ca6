"""Problem data: matrix layouts, block sets, bound ladders, validation, JSON I/O.

Matrices come in three layouts. ``DenseMatrix`` stores a full array.
``TridiagonalMatrix`` stores the three diagonals. ``BlockTridiagonalMatrix``
stores the uniform block pattern blktridiag(sub*I, B, super*I) where B is one
tridiagonal block repeated down the block diagonal and n = g^2 for block
order g. All layouts answer the same duck-typed interface (entry, matvec,
band form, dense form, entrywise transforms), and band layouts return zero
outside their band.

Instances are treated as immutable after construction; nothing in this
package writes into a stored array.
"""

from __future__ import annotations

from dataclasses import dataclass, field

import numpy as np


def _as_vector(a, n=None, name="vector"):
    v = np.asarray(a, dtype=float)
    if v.ndim != 1:
        raise ValueError(f"{name} must be 1-D, got shape {v.shape}")
    if n is not None and v.shape[0] != n:
        raise ValueError(f"{name} must have length {n}, got {v.shape[0]}")
    return v


@dataclass(frozen=True)
class DenseMatrix:
    """Row-major dense square matrix."""

    data: np.ndarray

    def __post_init__(self):
        a = np.asarray(self.data, dtype=float)
        if a.ndim != 2 or a.shape[0] != a.shape[1]:
            raise ValueError(f"dense matrix must be square, got shape {a.shape}")
        object.__setattr__(self, "data", a)

    @property
    def n(self):
        return self.data.shape[0]

    layout = "dense"

    def entry(self, i, j):
        return float(self.data[i, j])

    def matvec(self, x):
        return self.data @ x

    def rmatvec(self, x):
        return self.data.T @ x

    def to_dense(self):
        return self.data.copy()

    def transpose(self):
        return DenseMatrix(self.data.T.copy())

    def diagonal(self):
        return np.diag(self.data).copy()

    def column(self, j):
        return self.data[:, j].copy()

    def scaled(self, c):
        return DenseMatrix(c * self.data)

    def shifted_diag(self, c):
        out = self.data.copy()
        out[np.diag_indices_from(out)] += c
        return DenseMatrix(out)

    def absolute(self):
        return DenseMatrix(np.abs(self.data))

    def comparison(self):
        out = -np.abs(self.data)
        out[np.diag_indices_from(out)] = np.abs(np.diag(self.data))
        return DenseMatrix(out)

    def offdiag_abs(self):
        out = np.abs(self.data)
        np.fill_diagonal(out, 0.0)
        return DenseMatrix(out)

    def offdiag_negated(self):
        out = -self.data.copy()
        np.fill_diagonal(out, 0.0)
        return DenseMatrix(out)

    def row_scaled(self, s):
        return DenseMatrix(self.data * np.asarray(s)[:, None])

    def abs_rowsums(self):
        return np.abs(self.data).sum(axis=1)

    def abs_colsums(self):
        return np.abs(self.data).sum(axis=0)

    def all_finite(self):
        return bool(np.isfinite(self.data).all())

    @property
    def bandwidth(self):
        return self.n - 1


@dataclass(frozen=True)
class TridiagonalMatrix:
    """Tridiagonal matrix stored as (sub, diag, super) bands.

    sub[i] sits at (i+1, i), diag[i] at (i, i), sup[i] at (i, i+1).
    """

    sub: np.ndarray
    diag: np.ndarray
    sup: np.ndarray

    def __post_init__(self):
        d = _as_vector(self.diag, name="diag")
        n = d.shape[0]
        object.__setattr__(self, "diag", d)
        object.__setattr__(self, "sub", _as_vector(self.sub, max(n - 1, 0), "sub"))
        object.__setattr__(self, "sup", _as_vector(self.sup, max(n - 1, 0), "super"))

    @property
    def n(self):
        return self.diag.shape[0]

    layout = "tridiagonal"

    @classmethod
    def constant(cls, n, sub, diag, sup):
        """tridiag(sub, diag, sup) with constant bands."""
        return cls(np.full(max(n - 1, 0), float(sub)),
                   np.full(n, float(diag)),
                   np.full(max(n - 1, 0), float(sup)))

    def entry(self, i, j):
        if i == j:
            return float(self.diag[i])
        if i == j + 1:
            return float(self.sub[j])
        if j == i + 1:
            return float(self.sup[i])
        return 0.0

    def matvec(self, x):
        y = self.diag * x
        if self.n > 1:
            y[1:] += self.sub * x[:-1]
            y[:-1] += self.sup * x[1:]
        return y

    def rmatvec(self, x):
        y = self.diag * x
        if self.n > 1:
            y[:-1] += self.sub * x[1:]
            y[1:] += self.sup * x[:-1]
        return y

    def to_dense(self):
        out = np.diag(self.diag)
        if self.n > 1:
            out[np.arange(1, self.n), np.arange(self.n - 1)] = self.sub
            out[np.arange(self.n - 1), np.arange(1, self.n)] = self.sup
        return out

    def transpose(self):
        return TridiagonalMatrix(self.sup.copy(), self.diag.copy(), self.sub.copy())

    def diagonal(self):
        return self.diag.copy()

    def column(self, j):
        col = np.zeros(self.n)
        col[j] = self.diag[j]
        if j > 0:
            col[j - 1] = self.sup[j - 1]
        if j < self.n - 1:
            col[j + 1] = self.sub[j]
        return col

    def scaled(self, c):
        return TridiagonalMatrix(c * self.sub, c * self.diag, c * self.sup)

    def shifted_diag(self, c):
        return TridiagonalMatrix(self.sub.copy(), self.diag + c, self.sup.copy())

    def absolute(self):
        return TridiagonalMatrix(np.abs(self.sub), np.abs(self.diag), np.abs(self.sup))

    def comparison(self):
        return TridiagonalMatrix(-np.abs(self.sub), np.abs(self.diag), -np.abs(self.sup))

    def offdiag_abs(self):
        return TridiagonalMatrix(np.abs(self.sub), np.zeros(self.n), np.abs(self.sup))

    def offdiag_negated(self):
        return TridiagonalMatrix(-self.sub, np.zeros(self.n), -self.sup)

    def row_scaled(self, s):
        s = np.asarray(s)
        return TridiagonalMatrix(self.sub * s[1:], self.diag * s, self.sup * s[:-1])

    def abs_rowsums(self):
        r = np.abs(self.diag).copy()
        if self.n > 1:
            r[1:] += np.abs(self.sub)
            r[:-1] += np.abs(self.sup)
        return r

    def abs_colsums(self):
        c = np.abs(self.diag).copy()
        if self.n > 1:
            c[:-1] += np.abs(self.sub)
            c[1:] += np.abs(self.sup)
        return c

    def all_finite(self):
        return bool(np.isfinite(self.diag).all()
                    and np.isfinite(self.sub).all()
                    and np.isfinite(self.sup).all())

    @property
    def bandwidth(self):
        return 1 if self.n > 1 else 0


@dataclass(frozen=True)
class BlockTridiagonalMatrix:
    """blktridiag(sub*I, B, super*I) with g diagonal blocks B of order g, n = g^2."""

    block_order: int
    sub: float
    diag_block: TridiagonalMatrix
    sup: float

    def __post_init__(self):
        g = int(self.block_order)
        if g < 1:
            raise ValueError("block order must be >= 1")
        if self.diag_block.n != g:
            raise ValueError("diagonal block order must match block order")
        object.__setattr__(self, "block_order", g)
        object.__setattr__(self, "sub", float(self.sub))
        object.__setattr__(self, "sup", float(self.sup))

    @property
    def n(self):
        return self.block_order * self.block_order

    layout = "block-tridiagonal"

    def entry(self, i, j):
        g = self.block_order
        bi, ii = divmod(i, g)
        bj, jj = divmod(j, g)
        if bi == bj:
            return self.diag_block.entry(ii, jj)
        if bj == bi - 1:
            return self.sub if ii == jj else 0.0
        if bj == bi + 1:
            return self.sup if ii == jj else 0.0
        return 0.0

    def _blocked(self, x):
        return np.asarray(x).reshape(self.block_order, self.block_order)

    def matvec(self, x):
        g = self.block_order
        v = self._blocked(x)
        b = self.diag_block
        y = b.diag * v
        if g > 1:
            y[:, 1:] += b.sub * v[:, :-1]
            y[:, :-1] += b.sup * v[:, 1:]
            y[1:, :] += self.sub * v[:-1, :]
            y[:-1, :] += self.sup * v[1:, :]
        return y.reshape(-1)

    def rmatvec(self, x):
        return self.transpose().matvec(x)

    def to_dense(self):
        g = self.block_order
        out = np.zeros((self.n, self.n))
        bd = self.diag_block.to_dense()
        eye = np.eye(g)
        for k in range(g):
            out[k * g:(k + 1) * g, k * g:(k + 1) * g] = bd
            if k > 0:
                out[k * g:(k + 1) * g, (k - 1) * g:k * g] = self.sub * eye
            if k < g - 1:
                out[k * g:(k + 1) * g, (k + 1) * g:(k + 2) * g] = self.sup * eye
        return out

    def transpose(self):
        return BlockTridiagonalMatrix(self.block_order, self.sup,
                                      self.diag_block.transpose(), self.sub)

    def diagonal(self):
        return np.tile(self.diag_block.diag, self.block_order)

    def column(self, j):
        g = self.block_order
        bj, jj = divmod(j, g)
        col = np.zeros(self.n)
        col[bj * g:(bj + 1) * g] = self.diag_block.column(jj)
        if bj > 0:
            col[(bj - 1) * g + jj] = self.sup
        if bj < g - 1:
            col[(bj + 1) * g + jj] = self.sub
        return col

    def scaled(self, c):
        return BlockTridiagonalMatrix(self.block_order, c * self.sub,
                                      self.diag_block.scaled(c), c * self.sup)

    def shifted_diag(self, c):
        return BlockTridiagonalMatrix(self.block_order, self.sub,
                                      self.diag_block.shifted_diag(c), self.sup)

    def absolute(self):
        return BlockTridiagonalMatrix(self.block_order, abs(self.sub),
                                      self.diag_block.absolute(), abs(self.sup))

    def comparison(self):
        return BlockTridiagonalMatrix(self.block_order, -abs(self.sub),
                                      self.diag_block.comparison(), -abs(self.sup))

    def offdiag_abs(self):
        return BlockTridiagonalMatrix(self.block_order, abs(self.sub),
                                      self.diag_block.offdiag_abs(), abs(self.sup))

    def offdiag_negated(self):
        return BlockTridiagonalMatrix(self.block_order, -self.sub,
                                      self.diag_block.offdiag_negated(), -self.sup)

    def abs_rowsums(self):
        g = self.block_order
        r = np.tile(self.diag_block.abs_rowsums(), g)
        v = r.reshape(g, g)
        if g > 1:
            v[1:, :] += abs(self.sub)
            v[:-1, :] += abs(self.sup)
        return v.reshape(-1)

    def abs_colsums(self):
        g = self.block_order
        c = np.tile(self.diag_block.abs_colsums(), g)
        v = c.reshape(g, g)
        if g > 1:
            v[:-1, :] += abs(self.sub)
            v[1:, :] += abs(self.sup)
        return v.reshape(-1)

    def all_finite(self):
        return (np.isfinite(self.sub) and np.isfinite(self.sup)
                and self.diag_block.all_finite())

    @property
    def bandwidth(self):
        return self.block_order if self.block_order > 1 else 0


def identity_matrix(n):
    """Identity in tridiagonal storage (the cheapest band layout)."""
    return TridiagonalMatrix.constant(n, 0.0, 1.0, 0.0)


def is_identity(store, tol=0.0):
    """True when every entry matches the identity (band layouts checked in band)."""
    if isinstance(store, DenseMatrix):
        return bool(np.all(np.abs(store.data - np.eye(store.n)) <= tol))
    if isinstance(store, TridiagonalMatrix):
        return bool(np.all(np.abs(store.diag - 1.0) <= tol)
                    and np.all(np.abs(store.sub) <= tol)
                    and np.all(np.abs(store.sup) <= tol))
    if isinstance(store, BlockTridiagonalMatrix):
        return (abs(store.sub) <= tol and abs(store.sup) <= tol
                and is_identity(store.diag_block, tol))
    raise TypeError(f"not a matrix store: {store!r}")


def to_band(store, lower, upper):
    """Band form ab[upper + i - j, j] = a[i, j] with the requested bandwidths.

    The requested (lower, upper) must cover the store's own band. Used to put
    mixed band layouts on a common footing before combining or factoring.
    """
    n = store.n
    ab = np.zeros((lower + upper + 1, n))
    if isinstance(store, TridiagonalMatrix):
        if n > 1 and (lower < 1 or upper < 1) and store.bandwidth > 0:
            raise ValueError("requested band too narrow for tridiagonal store")
        ab[upper, :] = store.diag
        if n > 1:
            ab[upper + 1, :-1] = store.sub
            ab[upper - 1, 1:] = store.sup
        return ab
    if isinstance(store, BlockTridiagonalMatrix):
        g = store.block_order
        if g > 1 and (lower < g or upper < g):
            raise ValueError("requested band too narrow for block-tridiagonal store")
        b = store.diag_block
        ab[upper, :] = np.tile(b.diag, g)
        if g > 1:
            sub_line = np.tile(np.append(b.sub, 0.0), g)[:n - 1]
            sup_line = np.tile(np.append(b.sup, 0.0), g)[:n - 1]
            ab[upper + 1, :-1] = sub_line
            ab[upper - 1, 1:] = sup_line
            ab[upper + g, :-g] = store.sub
            ab[upper - g, g:] = store.sup
        return ab
    if isinstance(store, DenseMatrix):
        a = store.data
        for d in range(-(n - 1), n):
            if (d < -lower or d > upper) and np.any(np.diag(a, d)):
                raise ValueError("dense store has entries outside the requested band")
        for i in range(n):
            lo = max(0, i - lower)
            hi = min(n, i + upper + 1)
            ab[upper + i - np.arange(lo, hi), np.arange(lo, hi)] = a[i, lo:hi]
        return ab
    raise TypeError(f"not a matrix store: {store!r}")


def band_to_dense(ab, lower, upper):
    n = ab.shape[1]
    out = np.zeros((n, n))
    for i in range(n):
        lo = max(0, i - lower)
        hi = min(n, i + upper + 1)
        out[i, lo:hi] = ab[upper + i - np.arange(lo, hi), np.arange(lo, hi)]
    return out


def band_nonzero_rows(ab):
    """Indices of band rows holding any nonzero; precompute for hot matvecs."""
    return tuple(r for r in range(ab.shape[0]) if ab[r].any())


def band_matvec(ab, lower, upper, x, rows=None):
    """y = A @ x for A in band form (vectorized over diagonals).

    ``rows`` restricts the sweep to the given band rows (see
    band_nonzero_rows); wide mostly-empty bands are common here.
    """
    n = ab.shape[1]
    y = np.zeros(n)
    if rows is None:
        rows = range(ab.shape[0])
    for r in rows:
        k = r - upper  # diagonal i - j = k
        if k == 0:
            y += ab[upper, :] * x
        elif k > 0:
            y[k:] += ab[r, :n - k] * x[:n - k]
        else:
            y[:n + k] += ab[r, -k:] * x[-k:]
    return y


def band_row_scale(ab, lower, upper, s):
    """Band form of diag(s) @ A for A in band form."""
    n = ab.shape[1]
    out = np.array(ab, copy=True)
    s = np.asarray(s)
    for r in range(ab.shape[0]):
        off = upper - r  # this band row holds the diagonal j - i = off
        js = np.arange(n)
        rows = js - off
        valid = (rows >= 0) & (rows < n)
        out[r, valid] *= s[rows[valid]]
    return out


def band_transpose(ab, lower, upper):
    """Band form of A^T: diagonal k of A becomes diagonal -k of A^T."""
    n = ab.shape[1]
    out = np.zeros((lower + upper + 1, n))
    for k in range(-lower, upper + 1):
        # diagonal k of A holds a[i, i+k]; in A^T it becomes diagonal -k.
        if k >= 0:
            vals = ab[upper - k, k:]
            out[lower + k, :n - k] = vals
        else:
            vals = ab[upper - k, :n + k]
            out[lower + k, -k:] = vals
    return out


#
# Block matrix set, bound ladder, problems.
#

@dataclass(frozen=True)
class BlockMatrixSet:
    """The ordered blocks (M, H_1, ..., H_m), all square of one order."""

    M: object
    H: tuple

    def __post_init__(self):
        object.__setattr__(self, "H", tuple(self.H))
        if len(self.H) < 1:
            raise ValueError("need at least one trailing block")
        n = self.M.n
        for k, h in enumerate(self.H, start=1):
            if h.n != n:
                raise ValueError(f"block {k} has order {h.n}, expected {n}")

    @property
    def n(self):
        return self.M.n

    @property
    def m(self):
        return len(self.H)

    def all(self):
        """Blocks in selection order: index 0 is M, index i is H_i."""
        return (self.M,) + self.H


@dataclass(frozen=True)
class BoundLadder:
    """Positive bound vectors d_1..d_{m-1} plus their prefix sums.

    prefix_sums[i] = d_1 + ... + d_i with prefix_sums[0] = 0 (the d_0 = 0
    convention); these are the breakpoints of the variable transformation.
    """

    d: tuple
    n: int
    prefix: tuple = field(init=False)

    def __post_init__(self):
        ds = tuple(_as_vector(v, self.n, "ladder entry") for v in self.d)
        object.__setattr__(self, "d", ds)
        sums = [np.zeros(self.n)]
        for v in ds:
            sums.append(sums[-1] + v)
        object.__setattr__(self, "prefix", tuple(sums))

    @property
    def m(self):
        return len(self.d) + 1

    def prefix_sums(self):
        """s_0..s_{m-1}; summed in ladder order with no reordering."""
        return self.prefix[:self.m]


def prefix_sums(ladder):
    """Breakpoint vectors s_0 = 0, s_i = s_{i-1} + d_i."""
    return ladder.prefix_sums()


@dataclass(frozen=True)
class EhlcpProblem:
    """Chained complementarity problem data (blocks, q, ladder)."""

    blocks: BlockMatrixSet
    q: np.ndarray
    ladder: BoundLadder

    def __post_init__(self):
        object.__setattr__(self, "q", _as_vector(self.q, name="q"))

    @property
    def n(self):
        return self.blocks.n

    @property
    def m(self):
        return self.blocks.m


@dataclass(frozen=True)
class Ehlcp2Problem:
    """The m = 2, M = H_2 = I special form: w = q + H_1 x_1 + x_2, x_1 in [0, b]."""

    H1: object
    q: np.ndarray
    b: np.ndarray

    def __post_init__(self):
        object.__setattr__(self, "q", _as_vector(self.q, self.H1.n, "q"))
        object.__setattr__(self, "b", _as_vector(self.b, self.H1.n, "b"))
        if not np.all(self.b > 0):
            raise ValueError("b must be strictly positive")

    @property
    def n(self):
        return self.H1.n

    def as_general(self):
        """The same problem as a general block set (I, H1, I) with ladder (b,)."""
        eye = identity_matrix(self.n)
        blocks = BlockMatrixSet(eye, (self.H1, identity_matrix(self.n)))
        return EhlcpProblem(blocks, self.q, BoundLadder((self.b,), self.n))


@dataclass(frozen=True)
class EhlcpSolution:
    """A candidate tuple (w, x_1, ..., x_m)."""

    w: np.ndarray
    x: tuple

    def __post_init__(self):
        object.__setattr__(self, "w", _as_vector(self.w, name="w"))
        object.__setattr__(self, "x", tuple(_as_vector(v, self.w.shape[0], "x")
                                            for v in self.x))

    @property
    def m(self):
        return len(self.x)


@dataclass
class ValidationReport:
    ok: bool
    issues: list

    def __bool__(self):
        return self.ok


def validate(problem):
    """Report-style validation; collects every defect instead of raising."""
    issues = []
    blocks = problem.blocks
    n = blocks.M.n
    if n < 1:
        issues.append("order n must be >= 1")
    for label, store in [("M", blocks.M)] + [(f"H{k}", h) for k, h in
                                             enumerate(blocks.H, start=1)]:
        if store.n != n:
            issues.append(f"dimension mismatch: {label} has order {store.n}, expected {n}")
        if not store.all_finite():
            issues.append(f"non-finite entries in {label}")
        if isinstance(store, BlockTridiagonalMatrix):
            g = store.block_order
            if store.n != g * g:
                issues.append(f"{label}: block-tridiagonal order must be blockOrder^2")
    if problem.q.shape[0] != n:
        issues.append(f"dimension mismatch: q has length {problem.q.shape[0]}, expected {n}")
    if not np.isfinite(problem.q).all():
        issues.append("non-finite entries in q")
    ladder = problem.ladder
    if ladder.m != blocks.m:
        issues.append(f"ladder length {ladder.m - 1} does not match m - 1 = {blocks.m - 1}")
    for i, d in enumerate(ladder.d, start=1):
        if d.shape[0] != n:
            issues.append(f"dimension mismatch: d{i} has length {d.shape[0]}, expected {n}")
        if not np.isfinite(d).all():
            issues.append(f"non-finite entries in d{i}")
        elif not np.all(d > 0):
            issues.append(f"ladder not strictly positive in d{i}")
    return ValidationReport(not issues, issues)


#
# JSON problem files.
#

def matrix_to_json(store):
    if isinstance(store, DenseMatrix):
        return {"dense": store.data.tolist()}
    if isinstance(store, TridiagonalMatrix):
        return {"tridiag": {"sub": store.sub.tolist(),
                            "diag": store.diag.tolist(),
                            "super": store.sup.tolist()}}
    if isinstance(store, BlockTridiagonalMatrix):
        return {"blocktridiag": {"blockOrder": store.block_order,
                                 "sub": store.sub,
                                 "diagBlock": matrix_to_json(store.diag_block)["tridiag"],
                                 "super": store.sup}}
    raise TypeError(f"not a matrix store: {store!r}")


def matrix_from_json(obj):
    if "dense" in obj:
        return DenseMatrix(np.asarray(obj["dense"], dtype=float))
    if "tridiag" in obj:
        t = obj["tridiag"]
        return TridiagonalMatrix(np.asarray(t["sub"], dtype=float),
                                 np.asarray(t["diag"], dtype=float),
                                 np.asarray(t["super"], dtype=float))
    if "blocktridiag" in obj:
        t = obj["blocktridiag"]
        block = TridiagonalMatrix(np.asarray(t["diagBlock"]["sub"], dtype=float),
                                  np.asarray(t["diagBlock"]["diag"], dtype=float),
                                  np.asarray(t["diagBlock"]["super"], dtype=float))
        return BlockTridiagonalMatrix(int(t["blockOrder"]), float(t["sub"]),
                                      block, float(t["super"]))
    raise ValueError(f"unknown matrix layout keys: {sorted(obj)}")


def problem_to_json(problem, prescribed=None):
    obj = {
        "n": problem.n,
        "m": problem.m,
        "M": matrix_to_json(problem.blocks.M),
        "H": [matrix_to_json(h) for h in problem.blocks.H],
        "q": problem.q.tolist(),
        "d": [d.tolist() for d in problem.ladder.d],
    }
    if prescribed is not None:
        obj["prescribed"] = {
            "w": prescribed.solution.w.tolist(),
            "x": [x.tolist() for x in prescribed.solution.x],
            "y": prescribed.y_star.tolist(),
        }
    return obj


def problem_from_json(obj):
    """Returns (problem, prescribed) where prescribed is None or a dict."""
    n = int(obj["n"])
    m = int(obj["m"])
    M = matrix_from_json(obj["M"])
    H = tuple(matrix_from_json(h) for h in obj["H"])
    if len(H) != m:
        raise ValueError(f"H lists {len(H)} blocks but m = {m}")
    q = np.asarray(obj["q"], dtype=float)
    d = tuple(np.asarray(v, dtype=float) for v in obj.get("d", []))
    problem = EhlcpProblem(BlockMatrixSet(M, H), q, BoundLadder(d, n))
    prescribed = obj.get("prescribed")
    if prescribed is not None:
        prescribed = {
            "w": np.asarray(prescribed["w"], dtype=float),
            "x": [np.asarray(x, dtype=float) for x in prescribed["x"]],
            "y": np.asarray(prescribed["y"], dtype=float),
        }
    return problem, prescribed
