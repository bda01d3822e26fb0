"""The relation catalog: every defining and derived identity of the diagram
calculus, instantiated as concrete diagram pairs and scalar checks.

Suites:
  defining  - the presentation of the category (crossing moves in all strand
              colourings, duality zigzags, the vector skein relation, curls,
              merge naturality and rotation, the symmetrized double merge,
              and the two loop values);
  derived   - consequences used downstream (rotation consistency of the five
              derived vertices, merge/crossing exchange scalars, crossing
              expansions, the two-colour skein, the coideal exchange relation,
              horizontal-bar well-definedness, ribbon twists);
  asym      - the quantum antisymmetrizer: absorption, idempotency, bends,
              closures, circle vanishing and partial-closure reductions;
  symmetry  - vertical flip and bar conjugation on a fixed list of closed
              diagrams.
"""

from __future__ import annotations

from dataclasses import dataclass
from fractions import Fraction

from . import scalars
from .diagrams import (Asym, Comp, Evaluator, Gen, Id, Tens, bar, comp, dom,
                       cod, expand_asym, flip_v, g, idw, tens)
from .linalg import Mat, matmul
from .report import Check, Report
from .scalars import Scalar


@dataclass
class Pair:
    suite: str
    name: str
    lhs: object
    rhs: list            # [(coefficient function of params, diagram)]
    r: int | None = None
    cond: object = None  # side condition on N; None means unconditional

    def coeffs(self, p):
        return [(fn(p), d) for fn, d in self.rhs]


@dataclass
class ScalarCheck:
    suite: str
    name: str
    diagram: object      # closed endomorphism diagram to q-trace
    value: object        # function of params -> Scalar
    r: int | None = None
    cond: object = None


@dataclass
class CustomCheck:
    suite: str
    name: str
    run: object          # function Evaluator -> (ok, witness or None)
    r: int | None = None
    cond: object = None


COLORS = ("S", "V")


def _one(_p):
    return scalars.ONE


def _const(c):
    return lambda _p: c


def defining_suite():
    out = []
    q = scalars.Q
    for a in COLORS:
        for b in COLORS:
            out.append(Pair("defining", f"crossing_inverse_left[{a}{b}]",
                            comp(g(f"x{a}{b}"), g(f"x{b}{a}i")), [(_one, idw(a + b))]))
            out.append(Pair("defining", f"crossing_inverse_right[{a}{b}]",
                            comp(g(f"x{a}{b}i"), g(f"x{b}{a}")), [(_one, idw(a + b))]))
    for a in COLORS:
        for b in COLORS:
            for c in COLORS:
                lhs = comp(tens(g(f"x{a}{b}"), idw(c)),
                           tens(idw(b), g(f"x{a}{c}")),
                           tens(g(f"x{b}{c}"), idw(a)))
                rhs = comp(tens(idw(a), g(f"x{b}{c}")),
                           tens(g(f"x{a}{c}"), idw(b)),
                           tens(idw(c), g(f"x{a}{b}")))
                out.append(Pair("defining", f"braid_move[{a}{b}{c}]", lhs, [(_one, rhs)]))
    for a in COLORS:
        for b in COLORS:
            out.append(Pair(
                "defining", f"cap_slide_over[{a},{b}]",
                comp(tens(g(f"x{a}{b}i"), idw(a)), tens(idw(b), g(f"cap{a}"))),
                [(_one, comp(tens(idw(a), g(f"x{b}{a}")), tens(g(f"cap{a}"), idw(b))))]))
            out.append(Pair(
                "defining", f"cap_slide_under[{a},{b}]",
                comp(tens(g(f"x{a}{b}"), idw(a)), tens(idw(b), g(f"cap{a}"))),
                [(_one, comp(tens(idw(a), g(f"x{b}{a}i")), tens(g(f"cap{a}"), idw(b))))]))
    for a in COLORS:
        out.append(Pair("defining", f"zigzag[{a}]",
                        comp(tens(g(f"cup{a}"), idw(a)), tens(idw(a), g(f"cap{a}"))),
                        [(_one, idw(a))]))
        out.append(Pair("defining", f"zigzag_mirror[{a}]",
                        comp(tens(idw(a), g(f"cup{a}")), tens(g(f"cap{a}"), idw(a))),
                        [(_one, idw(a))]))
    qm = q - q.inverse()
    out.append(Pair("defining", "vector_skein", g("xVV"),
                    [(_const(scalars.ONE), g("xVVi")),
                     (_const(qm), idw("VV")),
                     (_const(-qm), comp(g("capV"), g("cupV")))]))
    out.append(Pair("defining", "positive_curl[S]", comp(g("xSS"), g("capS")),
                    [(lambda p: p.t, g("capS"))]))
    out.append(Pair("defining", "positive_curl[V]", comp(g("xVV"), g("capV")),
                    [(lambda p: p.kappa * p.kappa, g("capV"))]))
    # naturality of the merge vertex past crossings, both signs, both colours
    out.append(Pair("defining", "merge_slide_pos[S]",
                    comp(tens(g("mergeVS"), idw("S")), g("xSS")),
                    [(_one, comp(tens(idw("V"), g("xSS")),
                                 tens(g("xVS"), idw("S")),
                                 tens(idw("S"), g("mergeVS"))))]))
    out.append(Pair("defining", "merge_slide_pos[V]",
                    comp(tens(g("mergeVS"), idw("V")), g("xSV")),
                    [(_one, comp(tens(idw("V"), g("xSV")),
                                 tens(g("xVV"), idw("S")),
                                 tens(idw("V"), g("mergeVS"))))]))
    out.append(Pair("defining", "merge_slide_neg[S]",
                    comp(tens(g("mergeVS"), idw("S")), g("xSSi")),
                    [(_one, comp(tens(idw("V"), g("xSSi")),
                                 tens(g("xVSi"), idw("S")),
                                 tens(idw("S"), g("mergeVS"))))]))
    out.append(Pair("defining", "merge_slide_neg[V]",
                    comp(tens(g("mergeVS"), idw("V")), g("xSVi")),
                    [(_one, comp(tens(idw("V"), g("xSVi")),
                                 tens(g("xVVi"), idw("S")),
                                 tens(idw("V"), g("mergeVS"))))]))
    # the merge rotated once from either side agrees
    lhs = comp(tens(idw("S"), g("cupV")),
               tens(idw("S"), idw("V"), g("cupS"), idw("V")),
               tens(idw("S"), g("mergeVS"), idw("S"), idw("V")),
               tens(g("capS"), idw("S"), idw("V")))
    rhs = comp(tens(g("cupS"), idw("S")),
               tens(idw("S"), g("cupV"), idw("S"), idw("S")),
               tens(idw("S"), idw("V"), g("mergeVS"), idw("S")),
               tens(idw("S"), idw("V"), g("capS")))
    out.append(Pair("defining", "merge_rotation_symmetric", lhs, [(_one, rhs)]))
    out.append(Pair("defining", "merge_past_crossing",
                    comp(g("xSV"), g("mergeVS")),
                    [(lambda p: p.kappa,
                      comp(tens(idw("SV"), g("cupS")),
                           tens(idw("S"), g("mergeVS"), idw("S")),
                           tens(g("capS"), idw("S"))))]))
    m2 = comp(tens(idw("V"), g("mergeVS")), g("mergeVS"))
    out.append(Pair("defining", "symmetrized_double_merge", m2,
                    [(_const(-q), comp(tens(g("xVV"), idw("S")),
                                       tens(idw("V"), g("mergeVS")), g("mergeVS"))),
                     (lambda p: q * p.kappa * p.kappa + scalars.ONE,
                      tens(g("capV"), idw("S")))]))
    out.append(Pair("defining", "loop_value[S]", comp(g("cupS"), g("capS")),
                    [(lambda p: p.dS, idw(""))]))
    out.append(Pair("defining", "loop_value[V]", comp(g("cupV"), g("capV")),
                    [(lambda p: p.dV, idw(""))]))
    return out


def derived_suite():
    out = []
    q = scalars.Q
    out.append(Pair("derived", "negative_curl[S]", comp(g("xSSi"), g("capS")),
                    [(lambda p: p.t.inverse(), g("capS"))]))
    out.append(Pair("derived", "negative_curl[V]", comp(g("xVVi"), g("capV")),
                    [(lambda p: (p.kappa * p.kappa).inverse(), g("capV"))]))
    # counterclockwise rotations agree with the clockwise derived vertices
    out.append(Pair("derived", "rotation_consistency[VSS]",
                    comp(tens(idw("V"), g("cupS")), tens(g("mergeVS"), idw("S"))),
                    [(_one, g("splitVSS"))]))
    out.append(Pair("derived", "rotation_consistency[SV.S]",
                    comp(tens(idw("S"), g("splitVSS")), tens(g("capS"), idw("S"))),
                    [(_one, g("mergeSV"))]))
    out.append(Pair("derived", "rotation_consistency[S.SV]",
                    comp(tens(idw("S"), g("cupV")), tens(g("mergeSV"), idw("V"))),
                    [(_one, g("splitSV"))]))
    out.append(Pair("derived", "rotation_consistency[SSV]",
                    comp(tens(idw("S"), g("splitSV")), tens(g("capS"), idw("V"))),
                    [(_one, g("mergeSSV"))]))
    out.append(Pair("derived", "rotation_consistency[VS.S]",
                    comp(tens(idw("V"), g("splitVS")), tens(g("capV"), idw("S"))),
                    [(_one, g("mergeVS"))]))
    out.append(Pair("derived", "merge_crossing_scalar[pos_SV]",
                    comp(g("xSV"), g("mergeVS")), [(lambda p: p.kappa, g("mergeSV"))]))
    out.append(Pair("derived", "merge_crossing_scalar[neg_VS]",
                    comp(g("xVSi"), g("mergeSV")),
                    [(lambda p: p.kappa.inverse(), g("mergeVS"))]))
    out.append(Pair("derived", "merge_crossing_scalar[pos_VS]",
                    comp(g("xVS"), g("mergeSV")), [(lambda p: p.kappa, g("mergeVS"))]))
    out.append(Pair("derived", "merge_crossing_scalar[neg_SV]",
                    comp(g("xSVi"), g("mergeVS")),
                    [(lambda p: p.kappa.inverse(), g("mergeSV"))]))
    out.append(Pair("derived", "merge_top_crossing[pos]",
                    comp(g("xSS"), g("mergeSSV")),
                    [(lambda p: p.t * p.kappa.inverse(), g("mergeSSV"))]))
    out.append(Pair("derived", "merge_top_crossing[neg]",
                    comp(g("xSSi"), g("mergeSSV")),
                    [(lambda p: p.t.inverse() * p.kappa, g("mergeSSV"))]))
    m2 = comp(tens(idw("V"), g("mergeVS")), g("mergeVS"))
    out.append(Pair("derived", "symmetrized_double_merge_inverse", m2,
                    [(_const(-q.inverse()),
                      comp(tens(g("xVVi"), idw("S")),
                           tens(idw("V"), g("mergeVS")), g("mergeVS"))),
                     (lambda p: q.inverse() * (p.kappa * p.kappa).inverse() + scalars.ONE,
                      tens(g("capV"), idw("S")))]))
    out.append(Pair("derived", "strand_pair_expansion",
                    comp(g("mergeVS"), g("splitVS")),
                    [(lambda p: q * p.kappa * p.kappa + scalars.ONE, idw("VS")),
                     (_const(-q),
                      comp(tens(idw("V"), g("splitVS")),
                           tens(g("xVVi"), idw("S")),
                           tens(idw("V"), g("mergeVS"))))]))
    out.append(Pair("derived", "loop_on_strand",
                    comp(g("splitVS"), g("mergeVS")), [(lambda p: p.dV, idw("S"))]))

    def zfac(p):
        return p.kappa / (q * p.kappa * p.kappa + scalars.ONE)

    a_sv = comp(g("mergeSV"), g("splitVS"))
    b_sv = comp(tens(g("splitVS"), idw("V")), tens(idw("V"), g("mergeSV")))
    out.append(Pair("derived", "crossing_expansion[SV]", g("xSV"),
                    [(zfac, a_sv), (lambda p: q * zfac(p), b_sv)]))
    a_vs = comp(g("mergeVS"), g("splitSV"))
    b_vs = comp(tens(idw("V"), g("splitSV")), tens(g("mergeVS"), idw("V")))
    out.append(Pair("derived", "crossing_expansion[VS]", g("xVS"),
                    [(zfac, a_vs), (lambda p: q * zfac(p), b_vs)]))

    def ashfac(p):
        return p.kappa * (q - scalars.ONE) / (q * p.kappa * p.kappa + scalars.ONE)

    out.append(Pair("derived", "two_colour_skein", g("xSV"),
                    [(_one, g("xSVi")),
                     (ashfac, b_sv), (lambda p: -ashfac(p), a_sv)]))
    bar12 = tens(BAR, idw("S"))
    bar23 = tens(idw("S"), BAR)
    out.append(Pair("derived", "coideal_exchange",
                    comp(bar23, bar12, bar12),
                    [(lambda p: -(q + q.inverse()), comp(bar12, bar23, bar12)),
                     (_const(scalars.MINUS_ONE), comp(bar12, bar12, bar23)),
                     (lambda p: (q * p.kappa ** 2 + scalars.ONE)
                      * (q.inverse() * p.kappa ** -2 + scalars.ONE), bar23)]))
    v2 = comp(tens(idw("S"), g("splitVS")), tens(g("mergeSV"), idw("S")))
    v3 = comp(tens(g("splitSV"), g("splitVS")), tens(idw("S"), g("capV"), idw("S")))
    v4 = comp(tens(idw("S"), g("cupV"), idw("S")), tens(g("mergeSV"), g("mergeVS")))
    out.append(Pair("derived", "bar_resolution[slant]", v2, [(_one, BAR)]))
    out.append(Pair("derived", "bar_resolution[cap]", v3, [(_one, BAR)]))
    out.append(Pair("derived", "bar_resolution[cup]", v4, [(_one, BAR)]))
    # full positive twist of each trivalent vertex equals a ribbon scalar
    for name, x, y, scl in (
            ("mergeVS", "V", "S", lambda p: p.kappa * p.kappa),
            ("mergeSV", "S", "V", lambda p: p.kappa * p.kappa),
            ("mergeSSV", "S", "S",
             lambda p: (p.kappa * p.kappa).inverse() * p.t * p.t)):
        out.append(Pair("derived", f"double_braid_twist[{name}]",
                        comp(g(f"x{x}{y}"), g(f"x{y}{x}"), g(name)),
                        [(scl, g(name))]))
    m2x = comp(tens(g("xVV"), idw("S")), tens(idw("V"), g("mergeVS")), g("mergeVS"))
    capx = comp(tens(g("xVV"), idw("S")), tens(g("capV"), idw("S")))
    out.append(Pair("derived", "symmetrizer_factorization", m2,
                    [(_const(-q), m2x),
                     (_one, tens(g("capV"), idw("S"))),
                     (_const(q), capx)]))
    return out


BAR = comp(tens(g("splitSV"), idw("S")), tens(idw("S"), g("mergeVS")))


def _cup_chain(r: int):
    """Nested cups creating V**r (x) V**r from nothing."""
    d = g("cupV")
    for _ in range(r - 1):
        d = comp(g("cupV"), tens(idw("V"), d, idw("V")))
    return d if r >= 1 else idw("")


def wrapped_closure(r: int, s: int | None = None):
    """A projector on r strands closed through a spin circle: the projector
    top feeds the bottom edge of the circle, its bottom wraps around to the
    top edge.  With s set, a second projector on s strands is spliced in
    with one extra loop strand."""
    vr = "V" * r
    levels = [_cup_chain(r), tens(Asym(r), idw(vr))]
    if r == 0:
        levels = [idw("")]
    if s is None:
        levels.append(tens(idw(vr), g("cupS"), idw(vr)))
        for k in range(r, 0, -1):
            levels.append(tens(idw("V" * (k - 1)), g("mergeVS"), idw("S" + vr)))
    else:
        if not 1 <= s <= r:
            raise ValueError("need 1 <= s <= r")
        levels.append(tens(idw(vr), g("cupS"), idw(vr)))
        for k in range(r, s - 1, -1):
            levels.append(tens(idw("V" * (k - 1)), g("mergeVS"), idw("S" + vr)))
        levels.append(tens(idw("V" * (s - 1)), g("splitVS"), idw("S" + vr)))
        levels.append(tens(Asym(s), idw("SS" + vr)))
        for k in range(s, 0, -1):
            levels.append(tens(idw("V" * (k - 1)), g("mergeVS"), idw("S" + vr)))
    for j in range(r, 0, -1):
        levels.append(tens(idw("S"), g("mergeSV"), idw("V" * (j - 1))))
    levels.append(g("capS"))
    return comp(*levels)


def circle_gadget(r: int):
    """r vector strands meeting a closed spin circle."""
    levels = [tens(idw("V" * r), g("cupS"))]
    for k in range(r, 0, -1):
        levels.append(tens(idw("V" * (k - 1)), g("mergeVS"), idw("S")))
    levels.append(g("capS"))
    return comp(*levels)


def closure_scalar(p, r: int) -> Scalar:
    """Value of the trace closure of the antisymmetrizer on r strands."""
    q = scalars.Q
    kap2 = p.kappa * p.kappa
    out = (kap2 * scalars.qpow(r) + scalars.qpow(1 - r)) / (kap2 + q)
    for s in range(1, r + 1):
        out = out * (kap2.inverse() * scalars.qpow(2 - s) - kap2 * scalars.qpow(s - 2)) \
            / (scalars.qpow(s) - scalars.qpow(-s))
    return out if r >= 1 else scalars.ONE


def closure_scalar_binomial(p, r: int) -> Scalar:
    return scalars._qbinom_ext(p.N - 1, r) + scalars._qbinom_ext(p.N - 1, r - 1)


def partial_closure_ratio(p, r: int) -> Scalar:
    q = scalars.Q
    kap2 = p.kappa * p.kappa
    num = (q * kap2 + scalars.ONE) * (kap2.inverse() - scalars.qpow(2 * r - 2) * kap2)
    den = (q - q.inverse()) * (scalars.qpow(2 * r - 1) * kap2 + scalars.ONE)
    return num / den


def splice_coeff_full(p, s: int) -> Scalar:
    q = scalars.Q
    kap2 = p.kappa * p.kappa
    num = (q.inverse() * kap2.inverse() + scalars.ONE) \
        * (scalars.qpow(2 - s) - kap2) * (scalars.qpow(2 - s) + kap2)
    den = (q - q.inverse()) * (scalars.qpow(3 - 2 * s) + kap2)
    return num / den


def splice_coeff_step(p, s: int):
    q = scalars.Q
    kap2 = p.kappa * p.kappa
    c1 = (q * kap2 + scalars.ONE) \
        * (scalars.qpow(1 - s) * kap2.inverse() - scalars.qpow(s - 2)) \
        / (scalars.qpow(s) - scalars.qpow(-s))
    c2 = (scalars.qint(s - 1) / scalars.qint(s)) \
        * (scalars.qpow(2 * s - 4) * kap2 + q) \
        / (scalars.qpow(2 * s - 3) * kap2 + scalars.ONE)
    return c1, c2


def asym_suite(rmax: int = 3):
    out = []
    q = scalars.Q
    for r in range(2, rmax + 1):
        vr = "V" * r
        for s in range(0, r - 1):
            mid_pos = tens(idw("V" * s), g("xVV"), idw("V" * (r - s - 2)))
            mid_neg = tens(idw("V" * s), g("xVVi"), idw("V" * (r - s - 2)))
            mid_cup = tens(idw("V" * s), g("cupV"), idw("V" * (r - s - 2)))
            mid_cap = tens(idw("V" * s), g("capV"), idw("V" * (r - s - 2)))
            out.append(Pair("asym", f"absorbs_pos_below[s={s}]",
                            comp(mid_pos, Asym(r)),
                            [(_const(-q.inverse()), Asym(r))], r=r))
            out.append(Pair("asym", f"absorbs_pos_above[s={s}]",
                            comp(Asym(r), mid_pos),
                            [(_const(-q.inverse()), Asym(r))], r=r))
            out.append(Pair("asym", f"absorbs_neg_below[s={s}]",
                            comp(mid_neg, Asym(r)), [(_const(-q), Asym(r))], r=r))
            out.append(Pair("asym", f"absorbs_neg_above[s={s}]",
                            comp(Asym(r), mid_neg), [(_const(-q), Asym(r))], r=r))
            out.append(Pair("asym", f"kills_cup_below[s={s}]",
                            comp(mid_cup, Asym(r)), [], r=r))
            out.append(Pair("asym", f"kills_cap_above[s={s}]",
                            comp(Asym(r), mid_cap), [], r=r))
        for s in range(2, r + 1):
            for u in range(0, r - s + 1):
                sub = tens(idw("V" * u), Asym(s), idw("V" * (r - s - u)))
                out.append(Pair("asym", f"idempotent_below[s={s},u={u}]",
                                comp(sub, Asym(r)), [(_one, Asym(r))], r=r))
                out.append(Pair("asym", f"idempotent_above[s={s},u={u}]",
                                comp(Asym(r), sub), [(_one, Asym(r))], r=r))
    for r in range(0, rmax + 1):
        out.append(CustomCheck("asym", "bend_invariance", _bend_check(r), r=r))
        out.append(CustomCheck("asym", "flip_invariance", _flip_asym_check(r), r=r))
        out.append(ScalarCheck("asym", "closure_value", Asym(r),
                               lambda p, r=r: closure_scalar(p, r), r=r))
        out.append(ScalarCheck("asym", "closure_value_binomial", Asym(r),
                               lambda p, r=r: closure_scalar_binomial(p, r), r=r))
    for r in range(1, rmax + 1):
        out.append(Pair("asym", "circle_vanishing",
                        comp(Asym(r), circle_gadget(r)), [], r=r,
                        cond=lambda n, r=r: not (n == r and n % 2 == 1)))
    for r in range(0, rmax):
        out.append(Pair("asym", "partial_closure_ratio",
                        wrapped_closure(r + 1),
                        [(lambda p, r=r: partial_closure_ratio(p, r),
                          wrapped_closure(r))], r=r + 1))
    for r in range(1, rmax + 1):
        for s in range(1, r + 1):
            out.append(Pair("asym", f"splice_reduction_full[s={s}]",
                            wrapped_closure(r, s),
                            [(lambda p, s=s: splice_coeff_full(p, s),
                              wrapped_closure(r))], r=r))
            rhs = [(lambda p, s=s: splice_coeff_step(p, s)[0], wrapped_closure(r))]
            if s >= 2:
                rhs.append((lambda p, s=s: splice_coeff_step(p, s)[1],
                            wrapped_closure(r, s - 1)))
            out.append(Pair("asym", f"splice_reduction_step[s={s}]",
                            wrapped_closure(r, s), rhs, r=r))
    out.append(ScalarCheck("asym", "bar_trace_zero", BAR, lambda p: scalars.ZERO,
                           cond=lambda n: n != 1))
    out.append(ScalarCheck("asym", "double_bar_trace", comp(BAR, BAR),
                           lambda p: p.dV * p.dS * p.dS))
    return out


def _bend_check(r: int):
    def run(ev: Evaluator):
        a = ev.evaluate(Asym(r))
        d = ev.dim_of("V")
        cap2 = Mat.zeros(d, d)
        for col, v in ev.gen_mat("capV").data.get(0, {}).items():
            cap2.set(col // d, col % d, v)
        cup2 = Mat.zeros(d, d)
        for row, rowd in ev.gen_mat("cupV").data.items():
            cup2.set(row // d, row % d, rowd[0])
        uk = Mat.identity(1)
        ck = Mat.identity(1)
        for _ in range(r):
            from .linalg import kron
            uk = kron(uk, cup2)
            ck = kron(ck, cap2)
        dim = a.rows
        perm = Mat.zeros(dim, dim)
        dims = [d] * r
        for idx in range(dim):
            rem, parts = idx, []
            for dd in reversed(dims):
                rem, k = divmod(rem, dd)
                parts.append(k)
            rev = 0
            for k in parts:
                rev = rev * d + k
            perm.set(rev, idx, scalars.ONE)
        at = a.transpose()
        left = matmul(uk, matmul(perm, matmul(at, matmul(ck, perm))))
        right = matmul(matmul(matmul(ck, perm), matmul(a, uk)), perm).transpose()
        okl = left == a
        okr = right == a
        if okl and okr:
            return True, None
        return False, "bent projector differs from the projector"
    return run


def _flip_asym_check(r: int):
    def run(ev: Evaluator):
        target = ev.evaluate(Asym(r))
        total = Mat.zeros(target.rows, target.cols)
        for coeff, d in expand_asym(r, ev.params.kappa):
            total = total + ev.evaluate(flip_v(d)).scale(coeff)
        if total == target:
            return True, None
        return False, "flipped projector expansion differs from the projector"
    return run


CLOSED_DIAGRAMS = [
    ("spin_circle", comp(g("cupS"), g("capS"))),
    ("vector_circle", comp(g("cupV"), g("capV"))),
    ("spin_kink", comp(g("cupS"), g("xSS"), g("capS"))),
    ("vector_kink", comp(g("cupV"), g("xVVi"), g("capV"))),
    ("spin_double_kink", comp(g("cupS"), g("xSS"), g("xSS"), g("capS"))),
    ("mixed_link", comp(tens(g("cupS"), g("cupV")),
                        tens(idw("S"), comp(g("xSV"), g("xVS")), idw("V")),
                        tens(g("capS"), g("capV")))),
]


def symmetry_suite():
    out = []
    closed = list(CLOSED_DIAGRAMS)
    closed.append(("bar_trace", _right_closure_ast(BAR)))
    closed.append(("double_bar_trace", _right_closure_ast(comp(BAR, BAR))))
    for name, d in closed:
        out.append(CustomCheck("symmetry", f"bar_conjugation[{name}]", _bar_check(d)))
        out.append(CustomCheck("symmetry", f"flip_invariance[{name}]", _flip_check(d)))
    out.append(CustomCheck("symmetry", "bar_involutive", _involution_check(bar)))
    out.append(CustomCheck("symmetry", "flip_involutive", _involution_check(flip_v)))
    return out


def _right_closure_ast(d):
    """Close an endomorphism diagram off to the right with nested arcs."""
    w = dom(d)
    assert w == cod(d)
    rev = w[::-1]

    def cup_word(word):
        if not word:
            return idw("")
        c = word[0]
        return comp(g(f"cup{c}"), tens(idw(c), cup_word(word[1:]), idw(c)))

    def cap_word(word):
        if not word:
            return idw("")
        c = word[0]
        return comp(tens(idw(c), cap_word(word[1:]), idw(c)), g(f"cap{c}"))

    return comp(cup_word(w), tens(d, idw(rev)), cap_word(w))


def _bar_check(d):
    def run(ev: Evaluator):
        lhs = ev.evaluate(bar(d)).get(0, 0)
        rhs = scalars.bar_map(ev.evaluate(d).get(0, 0))
        if lhs == rhs:
            return True, None
        return False, (f"bar image {scalars.render_scalar(lhs)} != "
                       f"conjugated value {scalars.render_scalar(rhs)}")
    return run


def _flip_check(d):
    def run(ev: Evaluator):
        lhs = ev.evaluate(flip_v(d)).get(0, 0)
        rhs = ev.evaluate(d).get(0, 0)
        if lhs == rhs:
            return True, None
        return False, (f"flipped image {scalars.render_scalar(lhs)} != "
                       f"original value {scalars.render_scalar(rhs)}")
    return run


def _involution_check(f):
    def run(ev: Evaluator):
        samples = [d for _, d in CLOSED_DIAGRAMS[:6]]
        for d in samples:
            if f(f(d)) != d:
                return False, "transform is not involutive on the sample list"
        return True, None
    return run


SUITES = ("defining", "derived", "asym", "symmetry", "all")


def relation_suite(name: str, rmax: int = 3):
    """The concrete relation catalog for one suite."""
    if name == "defining":
        return defining_suite()
    if name == "derived":
        return derived_suite()
    if name == "asym":
        return asym_suite(rmax)
    if name == "symmetry":
        return symmetry_suite()
    if name == "all":
        return (defining_suite() + derived_suite() + asym_suite(rmax)
                + symmetry_suite())
    raise ValueError(f"unknown suite {name!r}; choose from {SUITES}")


# ---------------------------------------------------------------------------
# The driver
# ---------------------------------------------------------------------------

def verify(N: int, eps: int = 1, suite: str = "all", rmax: int = 3,
           probe: bool = False, ev: Evaluator | None = None) -> Report:
    """Evaluate every catalog entry at rank N and compare exactly.

    With probe=True every diagram pair is first compared at the rational
    probe point; a probe mismatch fails immediately, a match still triggers
    the exact comparison.
    """
    rep = Report()
    ev = ev or Evaluator(N, eps)
    items = relation_suite(suite, rmax)
    for item in items:
        if item.cond is not None and not item.cond(N):
            continue
        if isinstance(item, Pair):
            rep.add(_run_pair(ev, item, probe))
        elif isinstance(item, ScalarCheck):
            rep.add(_run_scalar(ev, item))
        else:
            ok, witness = item.run(ev)
            rep.add(Check(item.suite, item.name, N, ev.eps, ok, r=item.r,
                          witness=witness))
    return rep


def _run_pair(ev: Evaluator, pair: Pair, probe: bool) -> Check:
    lhs_d = pair.lhs
    terms = pair.coeffs(ev.params)
    if probe:
        try:
            lhs = ev.evaluate_probe(lhs_d)
            rhs = Mat.zeros(lhs.rows, lhs.cols)
            for c, d in terms:
                rhs = rhs + ev.evaluate_probe(d).map(
                    lambda v, c=c: v * ev.probe_scalar(c))
            if lhs != rhs:
                return Check(pair.suite, pair.name, ev.N, ev.eps, False, r=pair.r,
                             witness="numeric probe mismatch")
        except ZeroDivisionError:
            pass  # probe point hit a pole; fall through to the exact check
    lhs = ev.evaluate(lhs_d)
    rhs = Mat.zeros(lhs.rows, lhs.cols)
    for c, d in terms:
        rhs = rhs + ev.evaluate(d).scale(c)
    ok = lhs == rhs
    witness = None
    if not ok:
        from .report import mat_witness
        witness = mat_witness(pair.name, lhs, rhs,
                              ev.labels_of(cod(lhs_d)), ev.labels_of(dom(lhs_d)))
    return Check(pair.suite, pair.name, ev.N, ev.eps, ok, r=pair.r, witness=witness)


def _run_scalar(ev: Evaluator, item: ScalarCheck) -> Check:
    got = ev.qtrace(item.diagram)
    want = item.value(ev.params)
    ok = got == want
    witness = None
    if not ok:
        witness = (f"{item.name}: trace {scalars.render_scalar(got)} != "
                   f"{scalars.render_scalar(want)}")
    return Check(item.suite, item.name, ev.N, ev.eps, ok, r=item.r, witness=witness)
