"""Invariant polynomials on sp(2n) Cartans, basis-change fits, J recovery.

E_{2k} sends sum T^i H_i to the k-th elementary symmetric polynomial of the
squared coordinates; Q_{2k}^V(T) = tr_V(T^{2k}) evaluates through the weight
multiset of V.  Products of adjoint traces give an alternative basis of each
graded piece; the change-of-basis coefficients are fitted exactly on
deterministic rational sample points and validated on held-out points.

The sp(10) pipeline turns the fitted tables plus the spectrum shape of J into
the adjoint trace table of J, then into elementary symmetric values, finally
factoring the characteristic polynomial of the squared coordinates by the
rational-root theorem.
"""

from __future__ import annotations

import itertools
import random
from fractions import Fraction

from .liealg import LieAlgebra, build_algebra
from .linalg import solve_linear
from .scalars import rational_square_root

ZERO = Fraction(0)
ONE = Fraction(1)


def elementary_symmetric(values, k):
    out = [ONE] + [ZERO] * k
    for v in values:
        for i in range(min(k, len(out) - 1), 0, -1):
            out[i] = out[i] + out[i - 1] * v
    return out[k]


def eval_E(h, k) -> Fraction:
    """E_{2k}(h) = e_k of the squared Cartan coordinates."""
    return elementary_symmetric([Fraction(x) ** 2 for x in h], k)


def eval_Q(weights, h, k) -> Fraction:
    """Q_{2k}^V(h) = sum over the weight multiset of mu(h)^{2k}."""
    s = ZERO
    for mu in weights:
        v = sum((Fraction(c) * Fraction(x) for c, x in zip(mu, h)), start=ZERO)
        s += v ** (2 * k)
    return s


def adjoint_weights(g: LieAlgebra):
    return [r for r in g.root_of if r is not None] + [tuple([0] * g.rank)] * g.rank


def partitions(k, max_part=None):
    if max_part is None:
        max_part = k
    if k == 0:
        return [()]
    out = []
    for p in range(min(k, max_part), 0, -1):
        for rest in partitions(k - p, p):
            out.append((p,) + rest)
    return out


class FitResult:
    def __init__(self, target, degree, coeffs, monomials, residuals):
        self.target = target
        self.degree = degree
        self.coeffs = coeffs  # dict monomial-name -> Fraction
        self.monomials = monomials
        self.residuals = residuals

    def json(self):
        return {
            "schema": 1,
            "target": self.target,
            "degree": 2 * self.degree,
            "coefficients": {m: str(c) for m, c in self.coeffs.items()},
            "validation_residuals": [str(r) for r in self.residuals],
        }


def _sample_points(rank, count, seed=20240517, bound=7):
    rnd = random.Random(seed)
    pts = set()
    while len(pts) < count:
        pts.add(tuple(rnd.randint(-bound, bound) for _ in range(rank)))
    return sorted(pts)


def fit_basis_change(rank, source_eval, k, basis_evals, seed=20240517, retries=3):
    """Fit source = sum_lambda c_lambda * prod(basis) over degree-2k monomials.

    ``basis_evals`` maps a basis symbol (e.g. "Q2") to an evaluator h -> value
    of the degree tagged in the symbol.  Monomials are indexed by partitions
    of k.  Sampling is deterministic; validation uses 5 extra points and must
    leave zero residual.
    """
    parts = partitions(k)
    names = ["*".join(f"Q{2*p}" for p in part) for part in parts]
    for attempt in range(retries):
        pts = _sample_points(rank, len(parts) + 5, seed=seed + attempt)
        rows, rhs = [], []
        for h in pts:
            row = []
            for part in parts:
                v = ONE
                for p in part:
                    v *= basis_evals(h, p)
                row.append(v)
            rows.append(row)
            rhs.append(source_eval(h))
        fit_rows, fit_rhs = rows[: len(parts)], rhs[: len(parts)]
        res = solve_linear(fit_rows, fit_rhs)
        if res.kind != "unique":
            continue
        coeffs = res.particular
        residuals = []
        for row, want in zip(rows[len(parts):], rhs[len(parts):]):
            got = sum((c * v for c, v in zip(coeffs, row)), start=ZERO)
            residuals.append(got - want)
        if any(residuals):
            continue
        return FitResult(None, k, dict(zip(names, coeffs)), names, residuals)
    raise ArithmeticError("singular sample system after retries")


def sp10_tables():
    """E_{2k} and Q_{2k}^W in the adjoint-trace basis for sp(10).

    Returns (e_table, w_table): lists over k = 1..5 of FitResults.
    """
    g = build_algebra("sp10")
    from .modules import build_module

    W = build_module(g, "Ext0_3(F)")
    adj = adjoint_weights(g)
    wts = W.weights

    def q_adj(h, k):
        return eval_Q(adj, h, k)

    e_table, w_table = [], []
    for k in range(1, 6):
        fe = fit_basis_change(5, lambda h, kk=k: eval_E(h, kk), k, q_adj)
        fe.target = f"E{2*k}"
        e_table.append(fe)
        fw = fit_basis_change(5, lambda h, kk=k: eval_Q(wts, h, kk), k, q_adj)
        fw.target = f"Q{2*k}^W"
        w_table.append(fw)
    return e_table, w_table


def recover_sp10_J():
    """Derive J for sp(10) from trace identities alone.

    (i) Expand tr_W(J^{2k}) = 2 sum (1 + lambda_i)^{2k} binomially into
    adjoint traces (odd traces vanish by spectrum symmetry) and equate against
    the fitted expression of Q_{2k}^W; each k determines tr(ad_J^{2k})
    linearly given the lower ones.  (ii) Convert to E_{2k}(J).  (iii) Factor
    chi(t) = prod(t - (J^i)^2) by rational roots and take square roots.
    """
    e_table, w_table = sp10_tables()
    n = 55
    from math import comb

    traces = {0: Fraction(n)}  # tr(ad_J^0) = dim g
    for k in range(1, 6):
        # lhs = 2 * sum_m C(2k, m) tr(ad^m), odd m vanish
        known = 2 * sum(comb(2 * k, m) * traces[m] for m in range(0, 2 * k, 2) if m in traces)
        # rhs = fitted polynomial in the traces; the pure Q_{2k} monomial is
        # linear in the unknown, everything else uses lower traces
        coeffs = w_table[k - 1].coeffs
        rhs_known = ZERO
        top_coeff = ZERO
        for name, c in coeffs.items():
            degs = [int(x[1:]) for x in name.split("*")]
            if degs == [2 * k]:
                top_coeff = c
                continue
            v = ONE
            for dg in degs:
                v *= traces[dg]
            rhs_known += c * v
        # known + 2*t_{2k} = rhs_known + top_coeff * t_{2k}
        t2k = (known - rhs_known) / (top_coeff - 2)
        traces[2 * k] = t2k
    e_values = []
    for k in range(1, 6):
        v = ZERO
        for name, c in e_table[k - 1].coeffs.items():
            degs = [int(x[1:]) for x in name.split("*")]
            m = ONE
            for dg in degs:
                m *= traces[dg]
            v += c * m
        e_values.append(v)
    roots = _rational_roots_of_char_poly(e_values)
    if roots is None:
        raise ArithmeticError("characteristic polynomial has a non-rational root")
    coords = []
    for r in roots:
        if r < 0:
            raise ArithmeticError("negative squared coordinate")
        s = rational_square_root(r)
        if s is None:
            raise ArithmeticError("squared coordinate is not a rational square")
        coords.append(s)
    coords.sort(reverse=True)
    return {
        "traces": {2 * k: traces[2 * k] for k in range(1, 6)},
        "E": {2 * k: e_values[k - 1] for k in range(1, 6)},
        "squared_roots": roots,
        "j": coords,
        "e_table": e_table,
        "w_table": w_table,
    }


def _rational_roots_of_char_poly(e_values):
    """Roots of t^5 - E2 t^4 + E4 t^3 - ... via the rational-root theorem."""
    coeffs = [ONE]
    for i, e in enumerate(e_values, start=1):
        coeffs.append(e if i % 2 == 0 else -e)
    # coeffs: monic degree-5 polynomial, highest first
    den = 1
    for c in coeffs:
        den = den * c.denominator // __import__("math").gcd(den, c.denominator)
    ints = [int(c * den) for c in coeffs]

    def divisors(m):
        m = abs(m)
        out = set()
        d = 1
        while d * d <= m:
            if m % d == 0:
                out.add(d)
                out.add(m // d)
            d += 1
        return out

    roots = []
    poly = list(coeffs)

    def eval_poly(p, x):
        s = ZERO
        for c in p:
            s = s * x + c
        return s

    def deflate(p, r):
        out = [p[0]]
        for c in p[1:-1]:
            out.append(c + out[-1] * r)
        return out

    for _ in range(5):
        if len(poly) == 1:
            break
        a0 = poly[-1]
        if a0 == 0:
            roots.append(ZERO)
            poly = poly[:-1]
            continue
        lead_int = int(poly[0] * den) if poly[0].denominator == 1 else poly[0]
        found = None
        d0 = 1
        for c in poly:
            d0 = d0 * c.denominator // __import__("math").gcd(d0, c.denominator)
        ipoly = [int(c * d0) for c in poly]
        for p in sorted(divisors(ipoly[-1])):
            for q in sorted(divisors(ipoly[0])):
                for sign in (1, -1):
                    cand = Fraction(sign * p, q)
                    if eval_poly(poly, cand) == 0:
                        found = cand
                        break
                if found is not None:
                    break
            if found is not None:
                break
        if found is None:
            return None
        roots.append(found)
        poly = deflate(poly, found)
    return roots


# --- sl3 x sl2 obstructions ---------------------------------------------------

# sl3 data on the Cartan in terms of the power sums p2 = tr_F(T^2) and
# s = p3^2 (p3 = tr_F(T^3)); derived by the same fitting machinery and pinned
# by tests: tr(ad^2) = 6 p2, tr(ad^4) = 9 p2^2 = 1/4 tr(ad^2)^2,
# tr(ad^6) = 33/2 p2^3 - 18 s, tr_F(T^4) = p2^2 / 2, tr_F(T^6) = p2^3/4 + s/3.

SL2_CONTENT_WEIGHTS = {
    "F": [1, -1],
    "adj": [2, 0, -2],
    "sym3F": [3, 1, -1, -3],
    "triv": [0],
}


def _sl3_content_trace(content, m, p2, s):
    """tr over the sl3 content of (J')^m for even m, as a function of (p2, s)."""
    if m == 0:
        return {"FplusFstar": Fraction(6), "adj": Fraction(8), "triv": Fraction(1)}[content]
    if content == "triv":
        return ZERO
    if content == "FplusFstar":
        if m == 2:
            return 2 * p2
        if m == 4:
            return p2 * p2  # 2 * p2^2/2
        if m == 6:
            return p2 ** 3 / 2 + 2 * s / 3
    if content == "adj":
        if m == 2:
            return 6 * p2
        if m == 4:
            return 9 * p2 * p2
        if m == 6:
            return Fraction(33, 2) * p2 ** 3 - 18 * s
    raise ValueError((content, m))


def mixed_trace_obstruction(summands, lam, n_total=11):
    """Trace consistency for g = sl3 x sl2 with the ansatz J = J' + lam*H~.

    ``summands`` is a list of (sl3 content, sl2 content, multiplicity).
    Returns a verdict dict with the degree-2 value tr(ad_{J'}^2), the
    degree-4 consistency check, and the degree-6 analysis of p3^2 (which must
    be a square of a rational).
    """
    from math import comb

    lam = Fraction(lam)

    def module_side(k, p2, s):
        total = ZERO
        for c3, c2, mult in summands:
            ws = SL2_CONTENT_WEIGHTS[c2]
            for m in range(0, 2 * k + 1, 2):
                sl2part = sum((lam * w) ** (2 * k - m) for w in ws)
                total += mult * comb(2 * k, m) * _sl3_content_trace(c3, m, p2, s) * sl2part
        return total

    def spectral_side(k, p2, s):
        # 2 sum (1+mu_i)^{2k} over ad_J eigenvalues: sl3 part + sl2 part {0, +-2 lam}
        total = 2 * Fraction(comb(2 * k, 0)) * n_total
        for m in range(2, 2 * k + 1, 2):
            ad_m = _sl3_content_trace("adj", m, p2, s) + 2 * (2 * lam) ** m
            total += 2 * comb(2 * k, m) * ad_m
        return total

    out = {"lambda": str(lam)}
    # degree 2: linear in p2, s-free
    # module = a2 * p2 + b2 ; spectral = c2 * p2 + d2
    a2 = module_side(1, ONE, ZERO) - module_side(1, ZERO, ZERO)
    b2 = module_side(1, ZERO, ZERO)
    c2 = spectral_side(1, ONE, ZERO) - spectral_side(1, ZERO, ZERO)
    d2 = spectral_side(1, ZERO, ZERO)
    if a2 == c2:
        out["verdict"] = "degenerate"
        return out
    p2 = (d2 - b2) / (a2 - c2)
    t2 = 6 * p2
    out["tr_ad2"] = t2
    if t2 < 0:
        out["verdict"] = "excluded"
        out["reason"] = "negative squared trace"
        return out
    # degree 4 consistency (s-free on both sides)
    m4 = module_side(2, p2, ZERO)
    s4 = spectral_side(2, p2, ZERO)
    out["degree4_consistent"] = m4 == s4
    # degree 6: solve for s = p3^2
    m6_0, s6_0 = module_side(3, p2, ZERO), spectral_side(3, p2, ZERO)
    m6_1, s6_1 = module_side(3, p2, ONE), spectral_side(3, p2, ONE)
    slope = (m6_1 - m6_0) - (s6_1 - s6_0)
    if slope == 0:
        out["verdict"] = "inconclusive"
        return out
    s_val = (s6_0 - m6_0) / slope
    out["p3_squared"] = s_val
    out["tr_ad6"] = Fraction(33, 2) * p2 ** 3 - 18 * s_val
    square_ok = s_val >= 0 and rational_square_root(s_val) is not None
    out["p3_rational"] = square_ok
    if not out["degree4_consistent"]:
        out["verdict"] = "excluded"
        out["reason"] = "degree-4 trace identity fails"
    elif not square_ok:
        out["verdict"] = "excluded"
        out["reason"] = "tr_F(J'^3) is not rational"
    else:
        out["verdict"] = "no obstruction"
    return out


def sl3_sl2_obstructions():
    """Per-candidate verdict table for the four sl3 x sl2 module shapes.

    W1 = ((F+F*) (x) F~) + adj(sl3) + F~
    W2 = ((F+F*) (x) F~) + (F+F*) + R~,     R~ in {F~^2, Sym3 F~}
    W3 = ((F+F*) (x) adj(sl2)) + R~
    W4 = (adj(sl3) (x) F~) + (F+F*)
    """
    table = []
    w1 = [("FplusFstar", "F", 1), ("adj", "triv", 1), ("triv", "F", 1)]
    table.append({"case": "W1", "rtilde": None, **mixed_trace_obstruction(w1, 1)})
    for rt, content, mult in (("F~^2", "F", 2), ("Sym3F~", "sym3F", 1)):
        w2 = [("FplusFstar", "F", 1), ("FplusFstar", "triv", 1), ("triv", content, mult)]
        lams = [Fraction(1)] if rt == "F~^2" else [Fraction(1), Fraction(1, 3)]
        for lam in lams:
            table.append({"case": "W2", "rtilde": rt, **mixed_trace_obstruction(w2, lam)})
    for rt, content, mult in (("F~^2", "F", 2), ("Sym3F~", "sym3F", 1)):
        w3 = [("FplusFstar", "adj", 1), ("triv", content, mult)]
        lams = [Fraction(1)] if rt == "F~^2" else [Fraction(1), Fraction(1, 3)]
        for lam in lams:
            table.append({"case": "W3", "rtilde": rt, **mixed_trace_obstruction(w3, lam)})
    # W4: lambda is a free rational; the degree-2 identity is lambda-free and
    # the degree-4 identity is a quadratic in lambda^2 with no rational root.
    w4 = [("adj", "F", 1), ("FplusFstar", "triv", 1)]
    base = mixed_trace_obstruction(w4, 1)
    entry = {"case": "W4", "rtilde": None, "tr_ad2": base["tr_ad2"]}
    lam_analysis = _w4_lambda_analysis(w4, base["tr_ad2"] / 6)
    entry.update(lam_analysis)
    table.append(entry)
    return table


def _w4_lambda_analysis(summands, p2):
    """Degree-4 identity for W4 as a polynomial in L = lambda^2."""
    from math import comb

    # module and spectral sides at degree 4 as polynomials in L
    def sides(L):
        lam2 = L

        def module4():
            total = ZERO
            for c3, c2, mult in summands:
                ws = SL2_CONTENT_WEIGHTS[c2]
                for m in (0, 2, 4):
                    sl2part = sum((Fraction(w) ** (4 - m)) * lam2 ** ((4 - m) // 2) for w in ws)
                    total += mult * comb(4, m) * _sl3_content_trace(c3, m, p2, ZERO) * sl2part
            return total

        def spectral4():
            total = 2 * Fraction(11)
            for m in (2, 4):
                ad_m = _sl3_content_trace("adj", m, p2, ZERO) + 2 * Fraction(2) ** m * lam2 ** (m // 2)
                total += 2 * comb(4, m) * ad_m
            return total

        return module4() - spectral4()

    # interpolate the quadratic in L
    v0, v1, v2 = sides(ZERO), sides(ONE), sides(Fraction(2))
    c0 = v0
    c2 = (v2 - 2 * v1 + v0) / 2
    c1 = v1 - v0 - c2
    # rational roots of c2 L^2 + c1 L + c0 = 0
    has_rational = False
    if c2 != 0:
        disc = c1 * c1 - 4 * c2 * c0
        has_rational = disc >= 0 and rational_square_root(disc) is not None
    elif c1 != 0:
        has_rational = True
    out = {
        "degree4_poly_in_lambda2": [str(c2), str(c1), str(c0)],
        "rational_lambda_exists": has_rational,
    }
    out["verdict"] = "no obstruction" if has_rational else "excluded"
    if not has_rational:
        out["reason"] = "degree-4/6 identities admit no rational lambda"
    return out
