"""Exact sparse-aware dense linear algebra over Q(i)(u).

Matrices are logically dense (rows x cols, any entry addressable) but stored
as nested dicts of nonzero entries, since the operators produced by the
diagram evaluator are overwhelmingly sparse.  Elimination is fraction-free
(Bareiss) over the Laurent-polynomial ring with divisions deferred to
back-substitution.
"""

from __future__ import annotations

import json
from dataclasses import dataclass

from . import scalars
from .scalars import Scalar, UPoly, P_ONE, P_ZERO


class SingularError(ValueError):
    pass


class IncompleteSpectrumError(ValueError):
    pass


class AmbiguityError(ValueError):
    pass


class Mat:
    """Exact matrix; data[r][c] holds the nonzero entries of row r."""

    __slots__ = ("rows", "cols", "data")

    def __init__(self, rows: int, cols: int, data=None):
        self.rows = rows
        self.cols = cols
        self.data = data if data is not None else {}

    # -- construction -------------------------------------------------

    @staticmethod
    def zeros(rows: int, cols: int) -> "Mat":
        return Mat(rows, cols)

    @staticmethod
    def identity(n: int, one=None) -> "Mat":
        one = scalars.ONE if one is None else one
        return Mat(n, n, {i: {i: one} for i in range(n)})

    @staticmethod
    def from_rows(rows_list) -> "Mat":
        r = len(rows_list)
        c = len(rows_list[0]) if r else 0
        data = {}
        for i, row in enumerate(rows_list):
            d = {j: v for j, v in enumerate(row) if v}
            if d:
                data[i] = d
        return Mat(r, c, data)

    def set(self, i: int, j: int, v) -> None:
        if v:
            self.data.setdefault(i, {})[j] = v
        else:
            row = self.data.get(i)
            if row and j in row:
                del row[j]
                if not row:
                    del self.data[i]

    def get(self, i: int, j: int):
        row = self.data.get(i)
        if row is None:
            return scalars.ZERO
        return row.get(j, scalars.ZERO)

    def nnz(self) -> int:
        return sum(len(r) for r in self.data.values())

    def copy(self) -> "Mat":
        return Mat(self.rows, self.cols, {i: dict(r) for i, r in self.data.items()})

    @property
    def entries(self):
        """Row-major dense list of all entries (serialization helper)."""
        out = []
        for i in range(self.rows):
            row = self.data.get(i, {})
            for j in range(self.cols):
                out.append(row.get(j, scalars.ZERO))
        return out

    # -- arithmetic ----------------------------------------------------

    def __eq__(self, other):
        if not isinstance(other, Mat):
            return NotImplemented
        if self.rows != other.rows or self.cols != other.cols:
            return False
        keys = set(self.data) | set(other.data)
        for i in keys:
            a = self.data.get(i, {})
            b = other.data.get(i, {})
            if set(a) != set(b):
                return False
            for j, v in a.items():
                if v != b[j]:
                    return False
        return True

    def __add__(self, other):
        if self.rows != other.rows or self.cols != other.cols:
            raise ValueError("shape mismatch in add")
        data = {i: dict(r) for i, r in self.data.items()}
        for i, r in other.data.items():
            row = data.setdefault(i, {})
            for j, v in r.items():
                s = row.get(j)
                s = v if s is None else s + v
                if s:
                    row[j] = s
                else:
                    row.pop(j, None)
            if not row:
                del data[i]
        return Mat(self.rows, self.cols, data)

    def __neg__(self):
        return Mat(self.rows, self.cols,
                   {i: {j: -v for j, v in r.items()} for i, r in self.data.items()})

    def __sub__(self, other):
        return self + (-other)

    def scale(self, c) -> "Mat":
        if not c:
            return Mat.zeros(self.rows, self.cols)
        return Mat(self.rows, self.cols,
                   {i: {j: v * c for j, v in r.items()} for i, r in self.data.items()})

    def __mul__(self, other):
        if not isinstance(other, Mat):
            return NotImplemented
        return matmul(self, other)

    def transpose(self) -> "Mat":
        data: dict = {}
        for i, r in self.data.items():
            for j, v in r.items():
                data.setdefault(j, {})[i] = v
        return Mat(self.cols, self.rows, data)

    def map(self, f) -> "Mat":
        data = {}
        for i, r in self.data.items():
            row = {}
            for j, v in r.items():
                w = f(v)
                if w:
                    row[j] = w
            if row:
                data[i] = row
        return Mat(self.rows, self.cols, data)

    def __repr__(self):
        return f"Mat({self.rows}x{self.cols}, nnz={self.nnz()})"


def matmul(a: Mat, b: Mat) -> Mat:
    if a.cols != b.rows:
        raise ValueError(f"matmul shape mismatch: {a.rows}x{a.cols} times {b.rows}x{b.cols}")
    data: dict = {}
    bd = b.data
    for i, arow in a.data.items():
        acc: dict = {}
        for k, av in arow.items():
            brow = bd.get(k)
            if not brow:
                continue
            for j, bv in brow.items():
                p = av * bv
                s = acc.get(j)
                s = p if s is None else s + p
                if s:
                    acc[j] = s
                else:
                    del acc[j]
        if acc:
            data[i] = acc
    return Mat(a.rows, b.cols, data)


def kron(a: Mat, b: Mat) -> Mat:
    """(A (x) B)[(i,k),(j,l)] = A[i,j] B[k,l]; left factor index is major."""
    data: dict = {}
    br, bc = b.rows, b.cols
    for i, arow in a.data.items():
        for k, brow in b.data.items():
            out = {}
            for j, av in arow.items():
                for l, bv in brow.items():
                    out[j * bc + l] = av * bv
            if out:
                data[i * br + k] = out
    return Mat(a.rows * b.rows, a.cols * b.cols, data)


# ---------------------------------------------------------------------------
# Fraction-free elimination
# ---------------------------------------------------------------------------

def _rows_as_upoly(a: Mat):
    """Clear denominators row by row; returns sparse UPoly rows."""
    rows = []
    for i in range(a.rows):
        row = a.data.get(i, {})
        if not row:
            rows.append({})
            continue
        dens = [v.den for v in row.values() if v.den != P_ONE]
        mult = P_ONE
        for d in dens:
            g = scalars.poly_gcd(mult, d)
            mult = mult * d.exact_div(g) if g.degree() > 0 else mult * d
        out = {}
        for j, v in row.items():
            p = v.num * mult.exact_div(v.den) if v.den != P_ONE else v.num * mult
            if p:
                out[j] = p
        rows.append(out)
    return rows


def _bareiss_echelon(rows, ncols):
    """In-place fraction-free echelon form.

    Pivot rule: columns in order, first row with a nonzero entry (no magnitude
    notion exists over a function field).  Returns list of (row_idx, col)
    pivots; rows below each pivot are cleared exactly.
    """
    pivots = []
    prev = P_ONE
    rank = 0
    nrows = len(rows)
    for col in range(ncols):
        piv = None
        for r in range(rank, nrows):
            if rows[r].get(col):
                piv = r
                break
        if piv is None:
            continue
        rows[rank], rows[piv] = rows[piv], rows[rank]
        prow = rows[rank]
        pval = prow[col]
        for r in range(rank + 1, nrows):
            row = rows[r]
            rv = row.get(col)
            if not rv:
                if prev != P_ONE:
                    for j in list(row):
                        row[j] = (row[j] * pval).exact_div(prev)
                elif pval != P_ONE:
                    for j in list(row):
                        row[j] = row[j] * pval
                continue
            del row[col]
            for j in set(row) | set(prow):
                if j == col:
                    continue
                t = row.get(j, P_ZERO) * pval - prow.get(j, P_ZERO) * rv
                if t:
                    row[j] = t.exact_div(prev) if prev != P_ONE else t
                else:
                    row.pop(j, None)
        pivots.append(col)
        prev = pval
        rank += 1
    return pivots


def rank(a: Mat) -> int:
    rows = [r for r in _rows_as_upoly(a) if r]
    return len(_bareiss_echelon(rows, a.cols))


def nullspace(a: Mat):
    """Basis of ker(a) in reduced echelon form, as a list of column Mats."""
    rows = [r for r in _rows_as_upoly(a) if r]
    pivots = _bareiss_echelon(rows, a.cols)
    rows = rows[: len(pivots)]
    pivset = set(pivots)
    free = [c for c in range(a.cols) if c not in pivset]
    basis = []
    for f in free:
        sol = {f: scalars.ONE}
        for k in range(len(pivots) - 1, -1, -1):
            c = pivots[k]
            row = rows[k]
            acc = scalars.ZERO
            for j, v in row.items():
                if j == c:
                    continue
                x = sol.get(j)
                if x is not None and x:
                    acc = acc + Scalar(v) * x
            pv = Scalar(row[c])
            val = -acc / pv
            if val:
                sol[c] = val
        vec = Mat(a.cols, 1)
        for j, v in sol.items():
            vec.set(j, 0, v)
        basis.append(vec)
    return basis


def inverse(a: Mat) -> Mat:
    if a.rows != a.cols:
        raise SingularError("inverse of a non-square matrix")
    n = a.rows
    rows = _rows_as_upoly(a)
    for i in range(n):
        rows[i][n + i] = P_ONE
    pivots = _bareiss_echelon(rows, n)
    if len(pivots) != n:
        raise SingularError("matrix is singular")
    inv = Mat.zeros(n, n)
    # deferred division: back-substitute each augmented column over the field
    for col in range(n):
        sol: dict = {}
        for k in range(n - 1, -1, -1):
            c = pivots[k]
            row = rows[k]
            acc = Scalar(row.get(n + col, P_ZERO))
            for j, v in row.items():
                if j >= n or j == c:
                    continue
                x = sol.get(j)
                if x is not None and x:
                    acc = acc - Scalar(v) * x
            sol[c] = acc / Scalar(row[c])
        for j, v in sol.items():
            if v:
                inv.set(j, col, v)
    return inv


def eig_split(a: Mat, candidates):
    """Kernel dimensions of (a - lam) over the candidate list.

    Raises IncompleteSpectrumError unless the dimensions exhaust the size,
    i.e. the matrix is diagonalizable with spectrum inside the candidates.
    """
    if a.rows != a.cols:
        raise ValueError("eig_split needs a square matrix")
    out = []
    total = 0
    for lam in candidates:
        shifted = a - Mat.identity(a.rows).scale(lam)
        mult = a.rows - rank(shifted)
        out.append((lam, mult))
        total += mult
    if total != a.rows:
        raise IncompleteSpectrumError(
            f"eigenspaces for the candidate list span {total} of {a.rows} dimensions")
    return out


def rank_of_vectors(vectors) -> int:
    """Rank of a family of column Mats (viewed as vectors)."""
    solver = LinearSolver()
    count = 0
    for v in vectors:
        coeffs = {i: row[0] for i, row in v.data.items() if row.get(0)}
        if solver.add_row(coeffs, scalars.ZERO, homogeneous=True):
            count += 1
    return count


class LinearSolver:
    """Incremental sparse reduced row echelon form over the Scalar field.

    Rows are fed one at a time; the basis is kept fully reduced so that a
    unique solution can be read off directly.
    """

    def __init__(self):
        self.basis: dict = {}  # pivot col -> (rowdict, rhs)
        self.inconsistent = False

    def add_row(self, coeffs: dict, rhs, homogeneous=False) -> bool:
        row = {c: v for c, v in coeffs.items() if v}
        while True:
            hit = None
            for c in row:
                if c in self.basis:
                    hit = c
                    break
            if hit is None:
                break
            brow, brhs = self.basis[hit]
            f = row.pop(hit)
            for j, v in brow.items():
                if j == hit:
                    continue
                s = row.get(j, scalars.ZERO) - f * v
                if s:
                    row[j] = s
                else:
                    row.pop(j, None)
            if not homogeneous:
                rhs = rhs - f * brhs
        if not row:
            if not homogeneous and rhs:
                self.inconsistent = True
            return False
        piv = min(row)
        pinv = row[piv].inverse()
        row = {j: v * pinv for j, v in row.items()}
        if not homogeneous:
            rhs = rhs * pinv
        else:
            rhs = scalars.ZERO
        # keep the basis reduced with respect to the new pivot
        for c, (brow, brhs) in list(self.basis.items()):
            f = brow.get(piv)
            if f:
                for j, v in row.items():
                    if j == piv:
                        continue
                    s = brow.get(j, scalars.ZERO) - f * v
                    if s:
                        brow[j] = s
                    else:
                        brow.pop(j, None)
                brhs = brhs - f * rhs
                del brow[piv]
                self.basis[c] = (brow, brhs)
        self.basis[piv] = (row, rhs)
        return True

    def solution(self, nunknowns: int):
        """The unique solution vector; AmbiguityError if not unique."""
        if self.inconsistent:
            raise AmbiguityError("linear system is inconsistent")
        if len(self.basis) != nunknowns:
            raise AmbiguityError(
                f"solution space has dimension {nunknowns - len(self.basis)}, expected 0")
        out = [scalars.ZERO] * nunknowns
        for c, (row, rhs) in self.basis.items():
            extra = [j for j in row if j != c]
            if extra:
                raise AmbiguityError("basis row still couples unknowns")
            out[c] = rhs
        return out

    def rank(self) -> int:
        return len(self.basis)


# ---------------------------------------------------------------------------
# Serialization
# ---------------------------------------------------------------------------

def mat_to_json(a: Mat) -> str:
    return json.dumps({
        "rows": a.rows,
        "cols": a.cols,
        "entries": [scalars.render_scalar(v) for v in a.entries],
    })


def mat_from_json(text: str) -> Mat:
    obj = json.loads(text)
    r, c = obj["rows"], obj["cols"]
    vals = [scalars.parse_scalar(s) for s in obj["entries"]]
    if len(vals) != r * c:
        raise ValueError("entry count does not match rows*cols")
    m = Mat.zeros(r, c)
    for i in range(r):
        for j in range(c):
            v = vals[i * c + j]
            if v:
                m.set(i, j, v)
    return m


@dataclass
class LabeledOp:
    """A matrix together with tensor-word basis labels for rows and columns."""

    dom: list
    cod: list
    mat: Mat

    def __post_init__(self):
        assert self.mat.rows == len(self.cod) and self.mat.cols == len(self.dom)

    def to_json(self) -> str:
        return json.dumps({
            "dom": self.dom,
            "cod": self.cod,
            "rows": self.mat.rows,
            "cols": self.mat.cols,
            "entries": [scalars.render_scalar(v) for v in self.mat.entries],
        })
