"""Weyl-algebra operators with a formal hbar and exact commutators.

Operators are normal-ordered (every x to the left of every d/dx) sums of
monomials  hbar^c * x^a * d^b  with Scalar coefficients.  The canonical
relation is [d_i, x^j] = delta_i^j -- the contraction itself carries no
hbar; powers of hbar enter only through the operators' explicit factors.

Only the degree <= 2 subspace closed under hbar^{-1}[.,.] is supported;
that keeps verification exact and bounded.  Commutators of quadratic
operators are also available through a structured fast path (symmetrized
quadratics, sparse matrix algebra) which the tests cross-validate against
the term-by-term product.
"""

from __future__ import annotations

import math
from fractions import Fraction

from .linalg import kernel_basis
from .scalars import DEFAULT_TOL, Scalar, is_zero

ZERO = Fraction(0)
ONE = Fraction(1)


def _multideg(d: dict) -> int:
    return sum(d.values())


class WeylOp:
    """Normal-ordered operator: dict[(hbar, x-exps, d-exps)] -> Scalar.

    Exponent maps are stored as sorted tuples of (variable, exponent).
    """

    __slots__ = ("n", "terms")

    def __init__(self, n: int, terms=None):
        self.n = n
        self.terms: dict[tuple, Scalar] = {}
        if terms:
            for key, c in terms.items():
                if not is_zero(c):
                    self.terms[key] = c

    @staticmethod
    def key(h: int, xs: dict, ds: dict) -> tuple:
        return (h, tuple(sorted((v, e) for v, e in xs.items() if e)), tuple(sorted((v, e) for v, e in ds.items() if e)))

    @classmethod
    def monomial(cls, n, coeff, h=0, xs=None, ds=None) -> "WeylOp":
        return cls(n, {cls.key(h, xs or {}, ds or {}): coeff})

    def __add__(self, other):
        out = dict(self.terms)
        for k, c in other.terms.items():
            s = out.get(k, ZERO) + c
            if is_zero(s):
                out.pop(k, None)
            else:
                out[k] = s
        return WeylOp(self.n, out)

    def __sub__(self, other):
        return self + (other * -ONE)

    def __mul__(self, c):
        if isinstance(c, WeylOp):
            return self.product(c)
        return WeylOp(self.n, {k: v * c for k, v in self.terms.items()})

    __rmul__ = lambda self, c: self.__mul__(c)

    def shift_hbar(self, dh: int) -> "WeylOp":
        return WeylOp(self.n, {(h + dh, xs, ds): c for (h, xs, ds), c in self.terms.items()})

    def product(self, other: "WeylOp") -> "WeylOp":
        """Normal-ordered product via [d_i, x^j] = delta contractions."""
        out: dict[tuple, Scalar] = {}
        for (h1, xs1, ds1), c1 in self.terms.items():
            d1 = dict(ds1)
            for (h2, xs2, ds2), c2 in other.terms.items():
                x2 = dict(xs2)
                # contract subsets of d1 against x2, variable by variable
                choices = [(dict(d1), dict(x2), c1 * c2)]
                for v in set(d1) & set(x2):
                    new_choices = []
                    for dd, xx, coeff in choices:
                        b, a = dd.get(v, 0), xx.get(v, 0)
                        for k in range(0, min(a, b) + 1):
                            factor = (
                                Fraction(math.comb(b, k) * math.comb(a, k) * math.factorial(k))
                            )
                            dd2, xx2 = dict(dd), dict(xx)
                            if b - k:
                                dd2[v] = b - k
                            else:
                                dd2.pop(v, None)
                            if a - k:
                                xx2[v] = a - k
                            else:
                                xx2.pop(v, None)
                            new_choices.append((dd2, xx2, coeff * factor))
                    choices = new_choices
                for dd, xx, coeff in choices:
                    xs = dict(xs1)
                    for v, e in xx.items():
                        xs[v] = xs.get(v, 0) + e
                    ds = dict(ds2)
                    for v, e in dd.items():
                        ds[v] = ds.get(v, 0) + e
                    key = self.key(h1 + h2, xs, ds)
                    s = out.get(key, ZERO) + coeff
                    if is_zero(s):
                        out.pop(key, None)
                    else:
                        out[key] = s
        return WeylOp(self.n, out)

    def commutator(self, other: "WeylOp") -> "WeylOp":
        return self.product(other) - other.product(self)

    def is_zero(self, tol=DEFAULT_TOL) -> bool:
        return all(is_zero(c, tol) for c in self.terms.values())

    def __str__(self):
        if not self.terms:
            return "0"
        parts = []
        for (h, xs, ds) in sorted(self.terms, key=lambda k: (k[0], k[1], k[2])):
            c = self.terms[(h, xs, ds)]
            bits = []
            if h == 1:
                bits.append("hb")
            elif h:
                bits.append(f"hb^{h}")
            for v, e in xs:
                bits.append(f"x{v+1}" + (f"^{e}" if e > 1 else ""))
            for v, e in ds:
                bits.append(f"d{v+1}" + (f"^{e}" if e > 1 else ""))
            mono = "*".join(bits) if bits else "1"
            parts.append(f"({c})*{mono}" if mono != "1" else f"({c})")
        return " + ".join(parts)


def build_operators(tensors, delta=None, g=None) -> list[WeylOp]:
    """Quantum Airy operators L_i from classical tensors.

    D_i = 1/2 B_ij^j + delta_i with f_ij^k delta_k = 0; delta defaults to 0
    (Weyl quantization).  When g is given the coadjoint condition on delta is
    checked exactly.
    """
    n = tensors.n
    if delta is None:
        delta = [ZERO] * n
    if g is not None:
        for i in range(n):
            for j in range(n):
                s = sum((c * delta[k] for k, c in g.bracket_coeffs(i, j).items()), start=ZERO)
                if not is_zero(s):
                    raise ValueError("delta is not annihilated by the coadjoint action")
    ops = []
    for i in range(n):
        op = WeylOp.monomial(n, ONE, h=1, ds={i: 1})
        for (j, k), v in tensors.A[i].items():
            xs = {j: 2} if j == k else {j: 1, k: 1}
            op = op + WeylOp.monomial(n, -v / 2, xs=xs)
        for (j, k), v in tensors.B[i].items():
            op = op + WeylOp.monomial(n, -v, h=1, xs={j: 1}, ds={k: 1})
        for (j, k), v in tensors.C[i].items():
            ds = {j: 2} if j == k else {j: 1, k: 1}
            op = op + WeylOp.monomial(n, -v / 2, h=2, ds=ds)
        d_i = sum((tensors.B[i].get((j, j), ZERO) for j in range(n)), start=ZERO) / 2 + delta[i]
        op = op + WeylOp.monomial(n, -d_i, h=1)
        ops.append(op)
    return ops


def delta_space(g) -> list[list]:
    """Basis of {delta | f_ij^k delta_k = 0} (= H^0(g, g^*))."""
    rows = []
    for i in range(g.n):
        for j in range(i + 1, g.n):
            br = g.bracket_coeffs(i, j)
            if br:
                rows.append([br.get(k, ZERO) for k in range(g.n)])
    if not rows:
        return [[ONE if i == k else ZERO for k in range(g.n)] for i in range(g.n)]
    return kernel_basis(rows)


# --- structured fast path ----------------------------------------------------


class HPoly:
    """Tiny Laurent polynomial in hbar: dict[int power] -> Scalar."""

    __slots__ = ("c",)

    def __init__(self, c=None):
        self.c = {k: v for k, v in (c or {}).items() if not is_zero(v)}

    @classmethod
    def of(cls, v, h=0):
        return cls({h: v})

    def __add__(self, o):
        out = dict(self.c)
        for k, v in o.c.items():
            s = out.get(k, ZERO) + v
            if is_zero(s):
                out.pop(k, None)
            else:
                out[k] = s
        return HPoly(out)

    def __sub__(self, o):
        return self + (o * -ONE)

    def __mul__(self, o):
        if isinstance(o, HPoly):
            out: dict[int, Scalar] = {}
            for k1, v1 in self.c.items():
                for k2, v2 in o.c.items():
                    s = out.get(k1 + k2, ZERO) + v1 * v2
                    if is_zero(s):
                        out.pop(k1 + k2, None)
                    else:
                        out[k1 + k2] = s
            return HPoly(out)
        return HPoly({k: v * o for k, v in self.c.items()})

    __rmul__ = __mul__

    def shift(self, dh):
        return HPoly({k + dh: v for k, v in self.c.items()})

    def is_zero(self, tol=DEFAULT_TOL):
        return all(is_zero(v, tol) for v in self.c.values())

    def __eq__(self, o):
        return (self - o).is_zero(0.0) if isinstance(o, HPoly) else NotImplemented


class QuadOperator:
    """Symmetrized quadratic Weyl operator: gamma + u.z + 1/2 z^T S z.

    z = (x_1..x_n, d_1..d_n) with [z_A, z_B] = Omega_AB, Omega[x_i, d_i] = -1.
    Coefficients are HPoly in hbar.  Commutators close with the same sparse
    matrix formulas as the classical Poisson bracket.
    """

    __slots__ = ("n", "gamma", "u", "s")

    def __init__(self, n, gamma=None, u=None, s=None):
        self.n = n
        self.gamma = gamma or HPoly()
        self.u = {k: v for k, v in (u or {}).items() if not v.is_zero(0.0)}
        self.s = {k: v for k, v in (s or {}).items() if not v.is_zero(0.0)}

    @classmethod
    def from_tensors(cls, tensors, i, delta_i=ZERO):
        """L_i in symmetrized form: hbar d_i + 1/2 z S_i z - hbar delta_i."""
        n = tensors.n
        u = {n + i: HPoly.of(ONE, 1)}
        s: dict[tuple, HPoly] = {}

        def put(a, b, val):
            key = (a, b)
            s[key] = s.get(key, HPoly()) + val
            if a != b:
                s[(b, a)] = s.get((b, a), HPoly()) + val

        for (j, k), v in tensors.A[i].items():
            if j <= k:
                put(j, k, HPoly.of(-v if j != k else -v, 0))
        for (j, k), v in tensors.B[i].items():
            put(j, n + k, HPoly.of(-v, 1)) if j != n + k else None
        for (j, k), v in tensors.C[i].items():
            if j <= k:
                put(n + j, n + k, HPoly.of(-v, 2))
        gamma = HPoly.of(-delta_i, 1) if not is_zero(delta_i) else HPoly()
        return cls(n, gamma, u, s)

    def _mul_omega_vec(self, u):
        out = {}
        n = self.n
        for a, v in u.items():
            if a < n:
                out[n + a] = out.get(n + a, HPoly()) + v * -ONE
            else:
                out[a - n] = out.get(a - n, HPoly()) + v
        return out

    @staticmethod
    def _vec_mat(u, s):
        out: dict[int, HPoly] = {}
        for (a, b), v in s.items():
            if a in u:
                out[b] = out.get(b, HPoly()) + u[a] * v
        return {k: v for k, v in out.items() if not v.is_zero(0.0)}

    def _mat_omega(self, s):
        out = {}
        n = self.n
        for (a, c), v in s.items():
            if c < n:
                out[(a, n + c)] = out.get((a, n + c), HPoly()) + v * -ONE
            else:
                out[(a, c - n)] = out.get((a, c - n), HPoly()) + v
        return out

    @staticmethod
    def _mat_mul(a, b):
        rows: dict[int, dict] = {}
        for (i, k), v in b.items():
            rows.setdefault(i, {})[k] = v
        out: dict[tuple, HPoly] = {}
        for (i, k), v in a.items():
            br = rows.get(k)
            if not br:
                continue
            for j, w in br.items():
                out[(i, j)] = out.get((i, j), HPoly()) + v * w
        return {k: v for k, v in out.items() if not v.is_zero(0.0)}

    def commutator(self, other: "QuadOperator") -> "QuadOperator":
        uf_o = self._mul_omega_vec(self.u)
        ug_o = self._mul_omega_vec(other.u)
        gamma = HPoly()
        for a, v in uf_o.items():
            if a in other.u:
                gamma = gamma + v * other.u[a]
        u = self._vec_mat(uf_o, other.s)
        for a, v in self._vec_mat(ug_o, self.s).items():
            u[a] = u.get(a, HPoly()) - v
        sf_o = self._mat_omega(self.s)
        sg_o = self._mat_omega(other.s)
        s = self._mat_mul(sf_o, other.s)
        for k, v in self._mat_mul(sg_o, self.s).items():
            s[k] = s.get(k, HPoly()) - v
        return QuadOperator(self.n, gamma, u, s)

    def shift_hbar(self, dh) -> "QuadOperator":
        return QuadOperator(
            self.n,
            self.gamma.shift(dh),
            {k: v.shift(dh) for k, v in self.u.items()},
            {k: v.shift(dh) for k, v in self.s.items()},
        )

    def sub(self, other, coeff=ONE) -> "QuadOperator":
        g2 = self.gamma - other.gamma * coeff
        u2 = dict(self.u)
        for k, v in other.u.items():
            u2[k] = u2.get(k, HPoly()) - v * coeff
        s2 = dict(self.s)
        for k, v in other.s.items():
            s2[k] = s2.get(k, HPoly()) - v * coeff
        return QuadOperator(self.n, g2, u2, s2)

    def is_zero(self, tol=DEFAULT_TOL) -> bool:
        return (
            self.gamma.is_zero(tol)
            and all(v.is_zero(tol) for v in self.u.values())
            and all(v.is_zero(tol) for v in self.s.values())
        )

    def to_weyl(self) -> WeylOp:
        """Convert to a normal-ordered WeylOp (for printing and cross-checks)."""
        n = self.n
        out = WeylOp(n)
        for h, c in self.gamma.c.items():
            out = out + WeylOp.monomial(n, c, h=h)
        for a, hp in self.u.items():
            for h, c in hp.c.items():
                if a < n:
                    out = out + WeylOp.monomial(n, c, h=h, xs={a: 1})
                else:
                    out = out + WeylOp.monomial(n, c, h=h, ds={a - n: 1})
        # 1/2 z^T S z symmetrized = normal ordered + 1/2 tr(Q) where Q is the
        # x-d block (x^j d_k ordering picks up the contraction constant)
        seen = set()
        for (a, b), hp in self.s.items():
            if (b, a) in seen:
                continue
            seen.add((a, b))
            coeff_pair = hp if a == b else hp
            for h, c in coeff_pair.c.items():
                val = c if a != b else c / 2
                if a < n and b < n:
                    xs = {a: 1, b: 1} if a != b else {a: 2}
                    out = out + WeylOp.monomial(n, val, h=h, xs=xs)
                elif a >= n and b >= n:
                    ds = {a - n: 1, b - n: 1} if a != b else {a - n: 2}
                    out = out + WeylOp.monomial(n, val, h=h, ds=ds)
                else:
                    xi, dj = (a, b - n) if a < n else (b, a - n)
                    out = out + WeylOp.monomial(n, val, h=h, xs={xi: 1}, ds={dj: 1})
                    if xi == dj:
                        out = out + WeylOp.monomial(n, val / 2, h=h)
        return out


def verify_quantum_bracket(tensors, g, delta=None, tol=DEFAULT_TOL):
    """Check hbar^{-1}[L_i, L_j] = f_ij^k L_k exactly; returns (ok, witness)."""
    n = tensors.n
    if delta is None:
        delta = [ZERO] * n
    ops = [QuadOperator.from_tensors(tensors, i, delta[i]) for i in range(n)]
    for i in range(n):
        for j in range(i + 1, n):
            lhs = ops[i].commutator(ops[j]).shift_hbar(-1)
            for k, c in g.bracket_coeffs(i, j).items():
                lhs = lhs.sub(ops[k], c)
            if not lhs.is_zero(tol):
                return False, (i, j)
    return True, None
