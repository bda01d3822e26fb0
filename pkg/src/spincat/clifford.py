"""Classical and quantum Clifford algebras acting on the 2**n spin space.

The spin space has basis x_I indexed by subsets I of {1..n} (bitmask order,
bit i-1 encoding membership of i), each x_I a wedge of creation operators in
descending index order.  The quantum generators are omega-twisted rescalings
of the classical wedge/contraction operators; the barbell operator on the
two-fold spin space is built from the same twists.
"""

from __future__ import annotations

from dataclasses import dataclass
from fractions import Fraction

from . import scalars
from .linalg import Mat, kron, matmul
from .report import Check, Report
from .scalars import Scalar


@dataclass(frozen=True)
class SpinBasis:
    """Subsets of {1..n} as bitmasks in increasing binary order."""

    n: int

    @property
    def size(self) -> int:
        return 1 << self.n

    def label(self, mask: int) -> str:
        elems = [str(i) for i in range(self.n, 0, -1) if mask >> (i - 1) & 1]
        return "x{" + ",".join(elems) + "}"

    def labels(self) -> list:
        return [self.label(m) for m in range(self.size)]


@dataclass(frozen=True)
class CliffordCtx:
    N: int
    eps: int = 1

    def __post_init__(self):
        if self.N < 0:
            raise ValueError("N must be a natural number")
        if self.eps not in (1, -1):
            raise ValueError("eps must be +1 or -1")

    @property
    def n(self) -> int:
        return self.N // 2

    @property
    def odd(self) -> bool:
        return self.N % 2 == 1

    @property
    def basis(self) -> SpinBasis:
        return SpinBasis(self.n)

    def rho(self, i: int) -> Fraction:
        """rho_i for signed i (rho_{-i} = -rho_i, rho_0 = 0)."""
        if i == 0:
            return Fraction(0)
        a = abs(i)
        val = Fraction(a - 1) if self.N % 2 == 0 else a - Fraction(1, 2)
        return val if i > 0 else -val

    def vset(self) -> list:
        n = self.n
        if self.odd:
            return list(range(n, 0, -1)) + [0] + list(range(-1, -n - 1, -1))
        return list(range(n, 0, -1)) + list(range(-1, -n - 1, -1))


def _above(mask: int, i: int) -> int:
    """Number of elements of the subset greater than i."""
    return bin(mask >> i).count("1")


def classical_psi(ctx: CliffordCtx, j: int) -> Mat:
    """Classical generator: creation for j < 0, annihilation for j > 0,
    and the odd-rank involution for j = 0 (sign eps * (-1)**|I|)."""
    n = ctx.n
    if j == 0:
        if not ctx.odd:
            raise ValueError("index 0 only exists for odd N")
        m = Mat.zeros(1 << n, 1 << n)
        for mask in range(1 << n):
            sign = ctx.eps * (-1) ** bin(mask).count("1")
            m.set(mask, mask, scalars.from_int(sign))
        return m
    i = abs(j)
    if not 1 <= i <= n:
        raise ValueError(f"index {j} outside the module index set")
    m = Mat.zeros(1 << n, 1 << n)
    bit = 1 << (i - 1)
    for mask in range(1 << n):
        if j < 0 and not mask & bit:
            m.set(mask | bit, mask, scalars.from_int((-1) ** _above(mask, i)))
        elif j > 0 and mask & bit:
            m.set(mask & ~bit, mask, scalars.from_int((-1) ** _above(mask, i)))
    return m


def omega_power(ctx: CliffordCtx, i: int, k: int) -> Mat:
    """omega_i**k: diagonal, q**-k on subsets containing i."""
    if not 1 <= i <= ctx.n:
        raise ValueError(f"omega index {i} out of range")
    m = Mat.zeros(1 << ctx.n, 1 << ctx.n)
    bit = 1 << (i - 1)
    low = scalars.qpow(-k)
    for mask in range(1 << ctx.n):
        m.set(mask, mask, low if mask & bit else scalars.ONE)
    return m


def omega_above_power(ctx: CliffordCtx, i: int, k: int) -> Mat:
    """(prod_{j>i} omega_j)**k as one diagonal matrix."""
    m = Mat.zeros(1 << ctx.n, 1 << ctx.n)
    for mask in range(1 << ctx.n):
        m.set(mask, mask, scalars.qpow(-k * _above(mask, abs(i))))
    return m


def quantum_psi(ctx: CliffordCtx, j: int) -> Mat:
    """psi_j = q**rho_j (prod_{k>|j|} omega_k)**-1 Psi_j."""
    scale = scalars.qpow(ctx.rho(j))
    return matmul(omega_above_power(ctx, j, -1), classical_psi(ctx, j)).scale(scale)


def clifford_element(ctx: CliffordCtx, coeffs: dict) -> Mat:
    """Matrix of sum_j coeffs[j] * psi_j for signed indices j."""
    m = Mat.zeros(1 << ctx.n, 1 << ctx.n)
    for j, c in coeffs.items():
        m = m + quantum_psi(ctx, j).scale(c)
    return m


def _check(rep: Report, relation: str, ctx: CliffordCtx, lhs: Mat, rhs: Mat, labels):
    from .report import mat_witness
    ok = lhs == rhs
    w = None if ok else mat_witness(relation, lhs, rhs, labels, labels)
    rep.add(Check("clifford", relation, ctx.N, ctx.eps, ok, witness=w))


def verify_clifford(ctx: CliffordCtx) -> Report:
    """Checks the defining relations of the quantum Clifford generators and
    the omega-twist identities, as exact matrix identities on the spin space
    (both eps when N is odd)."""
    rep = Report()
    contexts = [ctx]
    if ctx.odd:
        contexts.append(CliffordCtx(ctx.N, -ctx.eps))
    for c in contexts:
        _verify_one(rep, c)
    return rep


def _verify_one(rep: Report, ctx: CliffordCtx) -> None:
    n = ctx.n
    labels = ctx.basis.labels()
    dim = 1 << n
    q = scalars.Q
    lo = 0 if ctx.odd else 1
    psi = {j: quantum_psi(ctx, j) for j in range(-n, n + 1) if j != 0 or ctx.odd}
    Psi = {j: classical_psi(ctx, j) for j in range(-n, n + 1) if j != 0 or ctx.odd}
    om = {i: omega_power(ctx, i, 1) for i in range(1, n + 1)}
    omi = {i: omega_power(ctx, i, -1) for i in range(1, n + 1)}

    def ck(name, lhs, rhs):
        _check(rep, name, ctx, lhs, rhs, labels)

    for i in range(lo, n + 1):
        for j in range(lo, i):
            ck(f"anticommute_ann[{i},{j}]", psi[i] * psi[j], (psi[j] * psi[i]).scale(-q))
            ck(f"anticommute_cre[{i},{j}]", psi[-i] * psi[-j],
               (psi[-j] * psi[-i]).scale(-q.inverse()))
    for i in range(1, n + 1):
        z = Mat.zeros(dim, dim)
        ck(f"square_zero[{i}]", psi[i] * psi[i], z)
        ck(f"square_zero_dagger[{i}]", psi[-i] * psi[-i], z)
    for i in range(lo, n + 1):
        for j in range(lo, n + 1):
            if i == j:
                continue
            ck(f"mixed_anticommute[{i},{j}]", psi[i] * psi[-j], (psi[-j] * psi[i]).scale(-q))
    qq1 = q * q - scalars.ONE
    for i in range(1, n + 1):
        tail = Mat.identity(dim)
        for j in range(i + 1, n + 1):
            tail = tail + (psi[-j] * psi[j]).scale(qq1)
        ck(f"number_operator[{i}]", psi[i] * psi[-i] + psi[-i] * psi[i], tail)
    if ctx.odd:
        tail = Mat.identity(dim)
        for j in range(1, n + 1):
            tail = tail + (psi[-j] * psi[j]).scale(qq1)
        ck("zero_mode_square", psi[0] * psi[0], tail)

    # omega-twist identities for the classical generators
    for i in range(1, n + 1):
        ck(f"omega_fixes_ann[{i}]", om[i] * Psi[i], Psi[i])
        ck(f"ann_scales_omega[{i}]", Psi[i] * om[i], Psi[i].scale(q.inverse()))
        ck(f"cre_fixes_omega[{i}]", Psi[-i] * om[i], Psi[-i])
        ck(f"omega_scales_cre[{i}]", om[i] * Psi[-i], Psi[-i].scale(q.inverse()))
        for j in range(1, n + 1):
            ck(f"omega_commute[{i},{j}]", om[i] * om[j], om[j] * om[i])
            s = q if i == j else scalars.ONE
            ck(f"omega_conj_ann[{j},{i}]", om[j] * Psi[i] * omi[j], Psi[i].scale(s))
            ck(f"omega_conj_cre[{j},{i}]", om[j] * Psi[-i] * omi[j], Psi[-i].scale(s.inverse()))
        for k in range(-2, 3):
            pw = omega_power(ctx, i, k)
            rhs = Mat.identity(dim) + (Psi[-i] * Psi[i]).scale(scalars.qpow(-k) - scalars.ONE)
            ck(f"omega_power[{i},{k}]", pw, rhs)


def demon_checks(ctx: CliffordCtx) -> Report:
    """Mixed classical/quantum exchange identities used by the module map."""
    rep = Report()
    n = ctx.n
    labels = ctx.basis.labels()
    q = scalars.Q
    for i in range(2, n + 1):
        Psi_i = classical_psi(ctx, i)
        Cre_im1 = classical_psi(ctx, -(i - 1))
        Psi_im1 = classical_psi(ctx, i - 1)
        Cre_i = classical_psi(ctx, -i)
        psi_i = quantum_psi(ctx, i)
        psi_im1 = quantum_psi(ctx, i - 1)
        lhs1 = Psi_i * Cre_im1 * psi_im1
        rhs1 = psi_i * omega_power(ctx, i, 1) * omega_power(ctx, i - 1, -1) \
            + psi_im1 * Psi_i * Cre_im1
        _check(rep, f"exchange_down[{i}]", ctx, lhs1, rhs1, labels)
        lhs2 = Psi_im1 * Cre_i * psi_i
        rhs2 = psi_im1 + (psi_i * Psi_im1 * Cre_i).scale(q.inverse())
        _check(rep, f"exchange_up[{i}]", ctx, lhs2, rhs2, labels)
    return rep


def barbell_op(ctx: CliffordCtx) -> Mat:
    """The barbell operator on the two-fold spin space: the sum over signed
    indices of (omega twist) Psi_j (x) (inverse twist) Psi_{-j}, with the
    zero-mode term weighted by 1/(q**(1/2) + q**(-1/2)).

    That weight makes the operator an intertwiner and a scalar multiple of
    the closed-bar diagram's image; the naive weight 1/(q+1) fails both.
    """
    from fractions import Fraction
    dim = 1 << ctx.n
    total = Mat.zeros(dim * dim, dim * dim)
    inv_zero = (scalars.qpow(Fraction(1, 2)) + scalars.qpow(Fraction(-1, 2))).inverse()
    for j in ctx.vset():
        left = matmul(omega_above_power(ctx, j, 1), classical_psi(ctx, j))
        right = matmul(omega_above_power(ctx, j, -1), classical_psi(ctx, -j))
        term = kron(left, right)
        if j == 0:
            term = term.scale(inv_zero)
        total = total + term
    return total


def pair_labels(ctx: CliffordCtx) -> list:
    base = ctx.basis.labels()
    return [f"{a}*{b}" for a in base for b in base]


def restrict_check(N: int, eps: int = 1) -> Report:
    """The barbell on the top-bit subspace agrees with the barbell two ranks
    down, under dropping that bit."""
    if N < 2:
        raise ValueError("restrict_check needs N >= 2")
    rep = Report()
    ctx = CliffordCtx(N, eps)
    small = CliffordCtx(N - 2, eps)
    n = ctx.n
    top = 1 << (n - 1)
    big = barbell_op(ctx)
    tiny = barbell_op(small)
    dim = 1 << n
    sdim = 1 << (n - 1)
    sub = [m | top for m in range(sdim)]  # subsets containing n, reindexed
    labels = pair_labels(ctx)
    ok = True
    witness = None
    for a in range(sdim):
        for b in range(sdim):
            col = sub[a] * dim + sub[b]
            got = {}
            for i, row in big.data.items():
                v = row.get(col)
                if v:
                    got[i] = v
            want = {}
            for i, row in tiny.data.items():
                v = row.get(a * sdim + b)
                if v:
                    want[sub[i // sdim] * dim + sub[i % sdim]] = v
            if got != want:
                ok = False
                bad = sorted(set(got) | set(want))[0]
                witness = (f"restriction: column {labels[col]} row {labels[bad]} "
                           f"big={scalars.render_scalar(got.get(bad, scalars.ZERO))} "
                           f"small={scalars.render_scalar(want.get(bad, scalars.ZERO))}")
                break
        if not ok:
            break
    rep.add(Check("clifford", "barbell_restriction", N, eps, ok, witness=witness))
    return rep
