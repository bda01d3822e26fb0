"""Braiding operators for the natural and spin modules.

The vector-vector braiding has a closed-form matrix.  Every other braiding is
computed by solving, exactly, for the unique intertwiner of the form
flip . D . (1 + X) where D scales a weight pair (lam, mu) by q**(lam, mu) and
X is strictly triangular: it moves weight from the second factor to the first
along nonzero sums of positive roots.  Uniqueness of the solution is asserted,
not assumed.
"""

from __future__ import annotations

from dataclasses import dataclass
from functools import lru_cache

from . import clifford, qgroup, scalars
from .linalg import AmbiguityError, LinearSolver, Mat, inverse, kron, matmul
from .qgroup import CartanData, ModuleSpec, module_S, module_V, vset
from .report import Check, Report, mat_witness
from .scalars import Scalar


@dataclass
class BraidOp:
    """An isomorphism source (x) target -> target (x) source."""

    src: str
    dst: str
    dom: list
    cod: list
    mat: Mat


def braid_VV(N: int) -> BraidOp:
    """The explicit vector-vector braiding matrix."""
    if N < 1:
        raise ValueError("braid_VV needs N >= 1")
    idx = vset(N)
    dim = len(idx)
    pos = {v: k for k, v in enumerate(idx)}
    q = scalars.Q
    qm = q - q.inverse()
    t = Mat.zeros(dim * dim, dim * dim)

    def put(ai, aj, bi, bj, val):
        # contribution val * E_{ai,aj} (x) E_{bi,bj}
        r = pos[ai] * dim + pos[bi]
        c = pos[aj] * dim + pos[bj]
        t.set(r, c, t.get(r, c) + val)

    for i in idx:
        if i != 0:
            put(i, i, i, i, q)
    if N % 2 == 1:
        put(0, 0, 0, 0, scalars.ONE)
    for i in idx:
        for j in idx:
            if i != j and i != -j:
                put(j, i, i, j, scalars.ONE)
    for i in idx:
        if i != 0:
            put(-i, i, i, -i, q.inverse())
    ctx = clifford.CliffordCtx(N)

    def shift(i):
        # the lower-triangular correction carries q**(2 rho_i) on negative rows
        return scalars.qpow(2 * ctx.rho(i)) if i < 0 else scalars.ONE

    for i in idx:
        for j in idx:
            if i < j:
                put(i, i, j, j, qm)
                val = -qm * shift(i) * shift(j).inverse()
                d = (1 if i == 0 else 0) - (1 if j == 0 else 0)
                if d == 1:
                    val = val * (q + scalars.ONE)
                elif d == -1:
                    val = val * (q + scalars.ONE).inverse()
                put(-j, i, j, -i, val)
    spec = module_V(N)
    labels = [f"{x}*{y}" for x in spec.labels for y in spec.labels]
    return BraidOp("V", "V", labels, labels, t)


def _is_positive_drop(N: int, dnu: tuple) -> bool:
    """dnu (a doubled weight) is a nonzero natural combination of positive
    roots, equivalently of simple roots.  Solved in closed form from the
    simple-root coordinates."""
    if all(x == 0 for x in dnu):
        return False
    if any(x % 2 for x in dnu):
        return False
    v = [x // 2 for x in dnu]
    n = len(v)
    if N % 2 == 1:
        # c_i = v_i + v_{i+1} + ... + v_n must all be nonnegative
        s = 0
        for x in reversed(v):
            s += x
            if s < 0:
                return False
        return True
    # type D: c_n..c_3 are suffix sums; c_1 +- c_2 resolve against v_1
    s = 0
    for x in reversed(v[2:]):
        s += x
        if s < 0:
            return False
    s2 = s + v[1]
    return s2 >= abs(v[0]) and (s2 - v[0]) % 2 == 0


def flip_perm(da: int, db: int):
    """Index map (a,b) -> (b,a) between A(x)B and B(x)A."""
    def phi(p: int) -> int:
        a, b = divmod(p, db)
        return b * da + a
    return phi


def _flip_d(a: ModuleSpec, b: ModuleSpec) -> Mat:
    """The weight-scaled flip: (a,b) basis vector to q**(wt a, wt b) (b,a)."""
    da, db = a.dim, b.dim
    phi = flip_perm(da, db)
    t = Mat.zeros(da * db, da * db)
    for p in range(da * db):
        ai, bi = divmod(p, db)
        e = sum(x * y for x, y in zip(a.weights[ai], b.weights[bi]))
        t.set(phi(p), p, scalars.upow(e))
    return t


def braid_solve(N: int, a: ModuleSpec, b: ModuleSpec) -> BraidOp:
    """The braiding a (x) b -> b (x) a, as the unique triangular intertwiner."""
    labels_ab = [f"{x}*{y}" for x in a.labels for y in b.labels]
    labels_ba = [f"{x}*{y}" for x in b.labels for y in a.labels]
    if N <= 2:
        return BraidOp(a.kind, b.kind, labels_ab, labels_ba, _flip_d(a, b))
    da, db = a.dim, b.dim
    dim = da * db
    phi = flip_perm(da, db)
    phiinv = flip_perm(db, da)
    dcoef = []
    for p in range(dim):
        ai, bi = divmod(p, db)
        dcoef.append(scalars.upow(sum(x * y for x, y in zip(a.weights[ai], b.weights[bi]))))

    # enumerate the allowed strictly-triangular unknowns X[r, c]
    unknowns: dict = {}
    cols_with: dict = {}
    rows_with: dict = {}
    for c in range(dim):
        ca, cb = divmod(c, db)
        for r in range(dim):
            ra, rb = divmod(r, db)
            dnu = tuple(x - y for x, y in zip(a.weights[ra], a.weights[ca]))
            dmu = tuple(y - x for x, y in zip(b.weights[rb], b.weights[cb]))
            if dnu != dmu:
                continue
            if not _is_positive_drop(N, dnu):
                continue
            k = len(unknowns)
            unknowns[(r, c)] = k
            cols_with.setdefault(c, []).append(r)
            rows_with.setdefault(r, []).append(c)

    solver = LinearSolver()
    gens = [t for t in qgroup.generator_tags(N) if t[0] in ("e", "f")]
    ab = qgroup.tensor_module([a, b])
    ba = qgroup.tensor_module([b, a])
    for g in gens:
        rho = ab.mat(g)
        rho_cols = {}
        for rr, rowd in rho.data.items():
            for cc, v in rowd.items():
                rho_cols.setdefault(cc, []).append((rr, v))
        rhop = ba.mat(g)
        for m in range(dim):
            r = phiinv(m)
            rhop_row = rhop.data.get(m, {})
            for p in range(dim):
                coeffs: dict = {}
                # D_r * X[r, c] * rho[c, p]
                for c, v in ((c, v) for (c, v) in _col_entries(rho, p)):
                    key = unknowns.get((r, c))
                    if key is not None:
                        coeffs[key] = coeffs.get(key, scalars.ZERO) + dcoef[r] * v
                # - rho'[m, phi(k)] D_k X[k, p]
                for s, w in rhop_row.items():
                    k = phiinv(s)
                    key = unknowns.get((k, p))
                    if key is not None:
                        coeffs[key] = coeffs.get(key, scalars.ZERO) - w * dcoef[k]
                const = dcoef[r] * rho.get(r, p) - rhop_row.get(phi(p), scalars.ZERO) * dcoef[p]
                if coeffs or const:
                    solver.add_row(coeffs, -const)
    try:
        sol = solver.solution(len(unknowns))
    except AmbiguityError as exc:
        raise AmbiguityError(f"braiding {a.kind},{b.kind} at N={N}: {exc}") from exc
    t = Mat.zeros(dim, dim)
    for p in range(dim):
        t.set(phi(p), p, dcoef[p])
    for (r, c), k in unknowns.items():
        v = sol[k]
        if v:
            t.set(phi(r), c, t.get(phi(r), c) + dcoef[r] * v)
    return BraidOp(a.kind, b.kind, labels_ab, labels_ba, t)


def _col_entries(m: Mat, col: int):
    for r, rowd in m.data.items():
        v = rowd.get(col)
        if v:
            yield r, v


def block_inverse(t: Mat, row_weights, col_weights) -> Mat:
    """Inverse of a weight-graded operator, block by block."""
    by_w_rows: dict = {}
    by_w_cols: dict = {}
    for i, w in enumerate(row_weights):
        by_w_rows.setdefault(w, []).append(i)
    for j, w in enumerate(col_weights):
        by_w_cols.setdefault(w, []).append(j)
    out = Mat.zeros(t.cols, t.rows)
    for w, cols in by_w_cols.items():
        rows = by_w_rows.get(w, [])
        if len(rows) != len(cols):
            raise ValueError("operator is not weight-graded")
        sub = Mat.zeros(len(rows), len(cols))
        for bi, i in enumerate(rows):
            rowd = t.data.get(i, {})
            for bj, j in enumerate(cols):
                v = rowd.get(j)
                if v:
                    sub.set(bi, bj, v)
        subinv = inverse(sub)
        for bi, rowd in subinv.data.items():
            for bj, v in rowd.items():
                out.set(cols[bi], rows[bj], v)
    return out


class BraidTable:
    """Caches the braidings and their inverses for one (N, eps)."""

    def __init__(self, N: int, eps: int = 1):
        self.N = N
        self.eps = eps
        self.V = module_V(N)
        self.S = module_S(N, eps)
        self._ops: dict = {}
        self._inv: dict = {}

    def spec(self, kind: str) -> ModuleSpec:
        return self.V if kind == "V" else self.S

    def op(self, x: str, y: str) -> BraidOp:
        key = (x, y)
        if key not in self._ops:
            if (x, y) == ("V", "V") and self.N >= 1:
                self._ops[key] = braid_VV(self.N)
            else:
                self._ops[key] = braid_solve(self.N, self.spec(x), self.spec(y))
        return self._ops[key]

    def inv(self, x: str, y: str) -> Mat:
        """Inverse of T_{x,y}, a map y (x) x -> x (x) y."""
        key = (x, y)
        if key not in self._inv:
            t = self.op(x, y)
            a, b = self.spec(x), self.spec(y)
            row_w = [tuple(p + q_ for p, q_ in zip(wb, wa))
                     for wb in b.weights for wa in a.weights]
            col_w = [tuple(p + q_ for p, q_ in zip(wa, wb))
                     for wa in a.weights for wb in b.weights]
            self._inv[key] = block_inverse(t.mat, row_w, col_w)
        return self._inv[key]


def tt_candidates(N: int):
    """Candidate eigenvalues of the double braiding on the two-fold spin space."""
    n = N // 2
    drho = CartanData(N).rho()
    dlam = tuple([1] * n)

    def cas(dw):
        shifted = tuple(x + 2 * r for x, r in zip(dw, drho))
        return sum(x * y for x, y in zip(dw, shifted))

    out = []
    for k in range(1, n + 2):
        dmu = tuple(2 if i >= k else 0 for i in range(1, n + 1))
        out.append(scalars.upow(-2 * cas(dlam) + cas(dmu)))
    seen = []
    for v in out:
        if v not in seen:
            seen.append(v)
    return seen


def verify_braiding(N: int, eps: int = 1) -> Report:
    """Equivariance (including the diagram twist), invertibility, the braid
    equation on all colourings, lowest-against-highest normalization, and the
    loop scalars of both closed curls."""
    from .linalg import eig_split
    rep = Report()
    table = BraidTable(N, eps)
    p = scalars.qparams(N)

    def ck(name, lhs, rhs, rows=None, cols=None):
        ok = lhs == rhs
        w = None if ok else mat_witness(name, lhs, rhs, rows, cols)
        rep.add(Check("braiding", name, N, eps, ok, witness=w))

    if N >= 1:
        solved = braid_solve(N, table.V, table.V)
        ck("explicit_matches_solver", solved.mat, braid_VV(N).mat,
           solved.cod, solved.dom)

    kinds = ["V", "S"]
    for x in kinds:
        for y in kinds:
            t = table.op(x, y)
            ab = qgroup.tensor_module([table.spec(x), table.spec(y)])
            ba = qgroup.tensor_module([table.spec(y), table.spec(x)])
            for g in qgroup.generator_tags(N):
                ck(f"equivariance[{x}{y},{g}]", matmul(t.mat, ab.mat(g)),
                   matmul(ba.mat(g), t.mat), t.cod, t.dom)
            ck(f"invertible[{x}{y}]", matmul(table.inv(x, y), t.mat),
               Mat.identity(t.mat.cols), t.dom, t.dom)
            # lowest-weight column of the highest-weight vector; both module
            # bases are ordered from highest weight down to lowest
            a, b = table.spec(x), table.spec(y)
            if a.dim == 0 or b.dim == 0:
                continue
            hi = 0
            lo = b.dim - 1
            col = hi * b.dim + lo
            e = sum(u * v for u, v in zip(a.weights[hi], b.weights[lo]))
            want = Mat.zeros(t.mat.rows, 1)
            want.set(lo * a.dim + hi, 0, scalars.upow(e))
            got = Mat.zeros(t.mat.rows, 1)
            for r, rowd in t.mat.data.items():
                v = rowd.get(col)
                if v:
                    got.set(r, 0, v)
            ck(f"highest_lowest[{x}{y}]", got, want, t.cod, ["*"])

    for x in kinds:
        for y in kinds:
            for z in kinds:
                sx, sy, sz = (table.spec(k).dim for k in (x, y, z))
                lhs = matmul(kron(table.op(y, z).mat, Mat.identity(sx)),
                             matmul(kron(Mat.identity(sy), table.op(x, z).mat),
                                    kron(table.op(x, y).mat, Mat.identity(sz))))
                rhs = matmul(kron(Mat.identity(sz), table.op(x, y).mat),
                             matmul(kron(table.op(x, z).mat, Mat.identity(sy)),
                                    kron(Mat.identity(sx), table.op(y, z).mat)))
                ck(f"braid_eq[{x}{y}{z}]", lhs, rhs)

    if N >= 1:
        fv = qgroup.form_V(N)
        ck("vector_curl", matmul(fv.mat, table.op("V", "V").mat),
           fv.mat.scale(p.kappa * p.kappa), ["1"], fv.dom)
    fs = qgroup.form_S(N)
    ck("spin_curl", matmul(fs.mat, table.op("S", "S").mat.scale(p.sigmaN)),
       fs.mat.scale(p.t), ["1"], fs.dom)

    tss = table.op("S", "S").mat
    double = matmul(tss, tss)
    try:
        split = eig_split_blocked(double, table.S, tt_candidates(N))
        total = sum(m for _, m in split)
        rep.add(Check("braiding", "double_braiding_spectrum", N, eps, total == double.rows))
    except Exception as exc:
        rep.add(Check("braiding", "double_braiding_spectrum", N, eps, False, witness=str(exc)))
    return rep


def eig_split_blocked(mat: Mat, spec_s: ModuleSpec, candidates):
    """eig_split of a weight-graded operator on S (x) S, done per weight block."""
    from .linalg import IncompleteSpectrumError, Mat as _M, rank as _rank
    weights = [tuple(p + q_ for p, q_ in zip(wa, wb))
               for wa in spec_s.weights for wb in spec_s.weights]
    blocks: dict = {}
    for i, w in enumerate(weights):
        blocks.setdefault(w, []).append(i)
    mults = [0] * len(candidates)
    for w, idxs in blocks.items():
        sub = _M.zeros(len(idxs), len(idxs))
        lookup = {g: k for k, g in enumerate(idxs)}
        for bi, i in enumerate(idxs):
            rowd = mat.data.get(i, {})
            for j, v in rowd.items():
                if j in lookup:
                    sub.set(bi, lookup[j], v)
                elif v:
                    raise ValueError("operator is not weight-graded")
        total = 0
        for ci, lam in enumerate(candidates):
            shifted = sub - _M.identity(sub.rows).scale(lam)
            m = sub.rows - _rank(shifted)
            mults[ci] += m
            total += m
        if total != sub.rows:
            raise IncompleteSpectrumError(
                f"block of weight {w}: candidates span {total} of {sub.rows}")
    return list(zip(candidates, mults))
