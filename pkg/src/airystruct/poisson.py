"""Degree-two Poisson algebra, Airy tensor extraction and gauge moves.

Hamiltonians live on C^{2n} with canonical coordinates (x^1..x^n, y_1..y_n)
and bracket {f, g} = df/dy_i dg/dx^i - df/dx^i dg/dy_i.  A quadratic
polynomial is stored as

    f = c + u.z + 1/2 z^T S z,     z = (x, y),  S symmetric,

which makes the bracket of two quadratics a couple of sparse matrix products.
"""

from __future__ import annotations

from fractions import Fraction

from .linalg import rank, rref, solve_linear
from .scalars import DEFAULT_TOL, Scalar, is_zero

ZERO = Fraction(0)
ONE = Fraction(1)


def _sdict_add(a: dict, b: dict, factor=ONE) -> dict:
    out = dict(a)
    for k, v in b.items():
        s = out.get(k, ZERO) + factor * v
        if is_zero(s):
            out.pop(k, None)
        else:
            out[k] = s
    return out


def _smat_mul_omega(s: dict, n: int) -> dict:
    """S * Omega where Omega maps x-slot i -> -(y-slot i), y-slot i -> x-slot i.

    Columns transform: (S Omega)[a][b] = sum_c S[a][c] Omega[c][b];
    Omega[c][b] nonzero for c = y_b -> +1 at x-slot b?  Concretely with slots
    0..n-1 = x and n..2n-1 = y:  Omega[x_i, y_i] = -1, Omega[y_i, x_i] = +1.
    """
    out = {}
    for (a, c), v in s.items():
        if c < n:  # c = x_i: Omega[x_i, y_i] = -1 contributes to column y_i
            out[(a, n + c)] = out.get((a, n + c), ZERO) - v
        else:  # c = y_i: Omega[y_i, x_i] = +1
            out[(a, c - n)] = out.get((a, c - n), ZERO) + v
    return {k: v for k, v in out.items() if not is_zero(v)}


def _smat_mul(a: dict, b: dict) -> dict:
    rows: dict[int, dict] = {}
    for (i, k), v in b.items():
        rows.setdefault(i, {})[k] = v
    out: dict[tuple, Scalar] = {}
    for (i, k), v in a.items():
        brow = rows.get(k)
        if not brow:
            continue
        for j, w in brow.items():
            s = out.get((i, j), ZERO) + v * w
            if not is_zero(s):
                out[(i, j)] = s
            elif (i, j) in out:
                del out[(i, j)]
    return out


def _vec_mul_omega(u: dict, n: int) -> dict:
    """u^T Omega as a vector (covector transported by Omega)."""
    out = {}
    for a, v in u.items():
        if a < n:
            out[n + a] = out.get(n + a, ZERO) - v
        else:
            out[a - n] = out.get(a - n, ZERO) + v
    return out


def _vec_mat(u: dict, s: dict) -> dict:
    out: dict[int, Scalar] = {}
    for (a, b), v in s.items():
        if a in u:
            t = out.get(b, ZERO) + u[a] * v
            if is_zero(t):
                out.pop(b, None)
            else:
                out[b] = t
    return out


class QuadPoly:
    """Polynomial of degree <= 2 on (x, y) with Scalar coefficients."""

    __slots__ = ("n", "const", "lin", "quad")

    def __init__(self, n: int, const=ZERO, lin=None, quad=None):
        self.n = n
        self.const = const
        self.lin = dict(lin or {})  # slot -> coeff, slots 0..n-1 x, n..2n-1 y
        self.quad = dict(quad or {})  # (slot, slot) -> coeff, symmetric, both keys

    @classmethod
    def coord_x(cls, n, i):
        return cls(n, lin={i: ONE})

    @classmethod
    def coord_y(cls, n, i):
        return cls(n, lin={n + i: ONE})

    def set_quad_sym(self, a, b, v):
        if is_zero(v):
            return
        if a == b:
            self.quad[(a, a)] = self.quad.get((a, a), ZERO) + 2 * v
        else:
            self.quad[(a, b)] = self.quad.get((a, b), ZERO) + v
            self.quad[(b, a)] = self.quad.get((b, a), ZERO) + v

    def coeff_of_pair(self, a, b) -> Scalar:
        """Coefficient of the monomial z_a z_b in the polynomial."""
        v = self.quad.get((a, b), ZERO)
        return v if a != b else v / 2

    def __add__(self, other):
        if not isinstance(other, QuadPoly):
            return QuadPoly(self.n, self.const + other, self.lin, self.quad)
        return QuadPoly(
            self.n,
            self.const + other.const,
            _sdict_add(self.lin, other.lin),
            _sdict_add(self.quad, other.quad),
        )

    def __neg__(self):
        return self * (-ONE)

    def __sub__(self, other):
        return self + (other * (-ONE) if isinstance(other, QuadPoly) else -other)

    def __mul__(self, c):
        if isinstance(c, QuadPoly):
            raise TypeError("use poisson() for products of hamiltonians")
        return QuadPoly(
            self.n,
            self.const * c,
            {k: v * c for k, v in self.lin.items()},
            {k: v * c for k, v in self.quad.items()},
        )

    __rmul__ = __mul__

    def is_zero(self, tol: float = DEFAULT_TOL) -> bool:
        return (
            is_zero(self.const, tol)
            and all(is_zero(v, tol) for v in self.lin.values())
            and all(is_zero(v, tol) for v in self.quad.values())
        )

    def max_abs(self) -> float:
        vals = [self.const, *self.lin.values(), *self.quad.values()]
        return max((abs(complex(v)) for v in vals), default=0.0)

    def degree(self) -> int:
        if any(not is_zero(v) for v in self.quad.values()):
            return 2
        if any(not is_zero(v) for v in self.lin.values()):
            return 1
        return 0 if not is_zero(self.const) else 0

    def eval(self, xs, ys) -> Scalar:
        z = list(xs) + list(ys)
        s = self.const
        for a, v in self.lin.items():
            s = s + v * z[a]
        for (a, b), v in self.quad.items():
            s = s + v * z[a] * z[b] / 2
        return s

    def _slot_name(self, a):
        return f"x{a+1}" if a < self.n else f"y{a-self.n+1}"

    def __str__(self):
        parts = []
        if not is_zero(self.const):
            parts.append(f"({self.const})")
        for a in sorted(self.lin):
            parts.append(f"({self.lin[a]})*{self._slot_name(a)}")
        seen = set()
        for (a, b) in sorted(self.quad):
            if (b, a) in seen:
                continue
            seen.add((a, b))
            v = self.coeff_of_pair(a, b)
            parts.append(f"({v})*{self._slot_name(a)}*{self._slot_name(b)}")
        return " + ".join(parts) if parts else "0"


def poisson(f: QuadPoly, g: QuadPoly) -> QuadPoly:
    """{f, g} for polynomials of degree <= 2 (exact, closed on this space)."""
    if f.n != g.n:
        raise ValueError("mixed numbers of canonical pairs")
    n = f.n
    # {f,g} = u_f^T O u_g + (u_f^T O S_g - u_g^T O S_f) z + 1/2 z^T (S_f O S_g - S_g O S_f) z
    uf_o = _vec_mul_omega(f.lin, n)
    ug_o = _vec_mul_omega(g.lin, n)
    const = ZERO
    for a, v in uf_o.items():
        if a in g.lin:
            const = const + v * g.lin[a]
    lin = _sdict_add(_vec_mat(uf_o, g.quad), _vec_mat(ug_o, f.quad), -ONE)
    so_g = _smat_mul_omega(f.quad, n)
    so_f = _smat_mul_omega(g.quad, n)
    quad = _sdict_add(_smat_mul(so_g, g.quad), _smat_mul(so_f, f.quad), -ONE)
    return QuadPoly(n, const, lin, quad)


# --- Airy tensors ------------------------------------------------------------


class AiryTensors:
    """Coordinate data (A, B, C, D) of a classical Airy structure.

    A[i][(j,k)] is symmetric in (j,k) (both key orders stored), likewise
    C[i][(j,k)]; B[i][(j,k)] is the mixed x^j y_k block.  The hamiltonians are
    l_i = y_i - 1/2 A_i x x - B_i x y - 1/2 C_i y y.
    """

    __slots__ = ("n", "A", "B", "C", "D", "field", "gauge")

    def __init__(self, n, A, B, C, D, field="q", gauge="canonical"):
        self.n = n
        self.A = A
        self.B = B
        self.C = C
        self.D = D
        self.field = field
        self.gauge = gauge

    def hamiltonian(self, i: int) -> QuadPoly:
        p = QuadPoly.coord_y(self.n, i)
        for (j, k), v in self.A[i].items():
            p.quad[(j, k)] = p.quad.get((j, k), ZERO) - v
        for (j, k), v in self.B[i].items():
            a, b = j, self.n + k
            p.quad[(a, b)] = p.quad.get((a, b), ZERO) - v
            p.quad[(b, a)] = p.quad.get((b, a), ZERO) - v
        for (j, k), v in self.C[i].items():
            p.quad[(self.n + j, self.n + k)] = p.quad.get((self.n + j, self.n + k), ZERO) - v
        p.quad = {k: v for k, v in p.quad.items() if not is_zero(v)}
        return p

    def hamiltonians(self) -> list[QuadPoly]:
        return [self.hamiltonian(i) for i in range(self.n)]

    def json(self):
        from .scalars import scalar_to_json

        def sparse3(t):
            out = []
            for i, block in enumerate(t):
                for (j, k), v in sorted(block.items()):
                    out.append([i, j, k, scalar_to_json(v)])
            return out

        return {
            "schema": 1,
            "n": self.n,
            "A": sparse3(self.A),
            "B": sparse3(self.B),
            "C": sparse3(self.C),
            "D": [scalar_to_json(v) for v in self.D],
            "field": self.field,
            "gauge": self.gauge,
        }


def extract_tensors(module, omega_vec: dict, v_basis: list[dict], field="q", gauge="canonical", tol=DEFAULT_TOL) -> AiryTensors:
    """Airy tensors of (W, Omega) in the chart defined by the complement V.

    The frame is e_i = T_i Omega; v_basis spans a Lagrangian complement and is
    renormalized to the dual frame f^j with omega(e_i, f^j) = delta_i^j.  The
    linear part of every hamiltonian is then exactly +y_i.
    """
    g = module.g
    n = g.n
    frame = [module.apply_gen(i, omega_vec) for i in range(n)]
    if len(v_basis) != n:
        raise ValueError("complement must have dimension dim g")
    for a in range(n):
        for b in range(a, n):
            if not is_zero(module.pair(v_basis[a], v_basis[b]), tol):
                raise ValueError("V is not Lagrangian")
    p = [[module.pair(frame[i], v_basis[j]) for j in range(n)] for i in range(n)]
    if rank(p, tol) != n:
        raise ValueError("V is not transverse to the frame")
    # dual frame f^j = sum_k inv(P)[k][j] v_k
    aug = [row + [ONE if i == j else ZERO for j in range(n)] for i, row in enumerate(p)]
    red, piv = rref(aug, tol)
    pinv = [row[n:] for row in red]
    dual = []
    for j in range(n):
        f: dict[int, Scalar] = {}
        for k in range(n):
            c = pinv[k][j]
            if is_zero(c, tol):
                continue
            for idx, v in v_basis[k].items():
                s = f.get(idx, ZERO) + c * v
                if is_zero(s, tol):
                    f.pop(idx, None)
                else:
                    f[idx] = s
        dual.append(f)

    # Chart q = Omega - x^j e_j + y_j f^j: the sign on x makes the chart
    # symplectic for the bracket df/dy dg/dx - df/dx dg/dy while keeping the
    # linear part of l_i equal to +y_i, so closure holds with +f_ij^k.
    tif = [[module.apply_gen(i, fj) for fj in dual] for i in range(n)]
    tie = [[module.apply_gen(i, frame[j]) for j in range(n)] for i in range(n)]
    A, B, C = [], [], []
    for i in range(n):
        Ai, Bi, Ci = {}, {}, {}
        for j in range(n):
            for k in range(n):
                a = module.pair(tie[i][j], frame[k])
                if not is_zero(a, tol):
                    Ai[(j, k)] = -a
                b = module.pair(tie[i][j], dual[k])
                if not is_zero(b, tol):
                    Bi[(j, k)] = b
                c = module.pair(tif[i][j], dual[k])
                if not is_zero(c, tol):
                    Ci[(j, k)] = -c
        A.append(Ai)
        B.append(Bi)
        C.append(Ci)
    D = [sum((B[i].get((j, j), ZERO) for j in range(n)), start=ZERO) / 2 for i in range(n)]
    return AiryTensors(n, A, B, C, D, field=field, gauge=gauge)


def canonical_complement(module, omega_vec: dict, j_coeffs, tol=DEFAULT_TOL) -> list[dict]:
    """The graded Lagrangian complement of span{T_i Omega}.

    Vectors are grouped by their J-eigenvalue; the complement pairs the
    eigenvalue c frame block against eigenvalue -c vectors, so the extracted
    tensors are J-homogeneous.
    """
    g = module.g
    n = g.n
    frame = [module.apply_gen(i, omega_vec) for i in range(n)]
    jvals = []
    for b in range(module.dim):
        w = module.weights[b]
        jvals.append(sum((Fraction(c) * j for c, j in zip(w, j_coeffs)), start=ZERO))
    by_val: dict[Scalar, list[int]] = {}
    for b, v in enumerate(jvals):
        by_val.setdefault(v, []).append(b)

    exact = all(not isinstance(x, complex) for x in jvals)

    def frame_val(i):
        r = g.root_of[i]
        lam = sum((Fraction(c) * j for c, j in zip(r, j_coeffs)), start=ZERO) if r else ZERO
        return 1 + lam

    frames_by_val: dict[Scalar, list[dict]] = {}
    for i in range(n):
        frames_by_val.setdefault(frame_val(i), []).append(frame[i])

    def coords(vec, idxs):
        return [vec.get(b, ZERO) for b in idxs]

    def complement_of(rows, idxs):
        """Coordinate unit vectors completing the span of rows inside idxs."""
        if not rows:
            return [{idxs[c]: ONE} for c in range(len(idxs))]
        red, piv = rref(rows, tol)
        return [{idxs[c]: ONE} for c in range(len(idxs)) if c not in piv]

    out: list[dict] = []
    done = set()
    for c, idxs in sorted(by_val.items(), key=lambda kv: str(kv[0])):
        if c in done:
            continue
        neg = -c
        if neg not in by_val:
            raise ValueError("module eigenvalues are not symmetric")
        if c == neg:
            out.extend(_lagrangian_complement_zero(module, frames_by_val.get(c, []), idxs, tol))
            done.add(c)
            continue
        done.add(c)
        done.add(neg)
        idxs_n = by_val[neg]
        ec = frames_by_val.get(c, [])
        en = frames_by_val.get(neg, [])
        cc = complement_of([coords(v, idxs) for v in ec], idxs)
        cn = complement_of([coords(v, idxs_n) for v in en], idxs_n)
        # correct cc against cn using E_c, then keep cn as-is
        corrected = _pair_correct(module, cc, cn, ec, tol)
        out.extend(corrected)
        out.extend(_pair_correct(module, cn, corrected, en, tol))
    return out


def _pair_correct(module, vecs, against, e_basis, tol):
    """Shift each vec by the span of e_basis so it pairs to zero with against."""
    if not against or not e_basis:
        return list(vecs)
    out = []
    for v in vecs:
        rhs = [module.pair(v, w) for w in against]
        if all(is_zero(x, tol) for x in rhs):
            out.append(v)
            continue
        m = [[module.pair(e, w) for e in e_basis] for w in against]
        res = solve_linear(m, rhs, tol)
        if res.kind == "none":
            raise ArithmeticError("graded complement correction failed")
        v2 = dict(v)
        for cidx, cval in enumerate(res.particular):
            if is_zero(cval, tol):
                continue
            for b, x in e_basis[cidx].items():
                s = v2.get(b, ZERO) - cval * x
                if is_zero(s, tol):
                    v2.pop(b, None)
                else:
                    v2[b] = s
        out.append(v2)
    return out


def _lagrangian_complement_zero(module, e_basis, idxs, tol):
    """Lagrangian complement of E_0 inside the symplectic eigenvalue-0 block."""
    def coords(vec):
        return [vec.get(b, ZERO) for b in idxs]

    rows = [coords(v) for v in e_basis]
    if rows:
        red, piv = rref(rows, tol)
        cand = [{idxs[c]: ONE} for c in range(len(idxs)) if c not in piv]
    else:
        cand = [{idxs[c]: ONE} for c in range(len(idxs))]
    out: list[dict] = []
    for v in cand:
        v2 = _pair_correct(module, [v], out, e_basis, tol)[0]
        out.append(v2)
    return out


def gauge_transform(t: AiryTensors, s: dict, tol=DEFAULT_TOL) -> AiryTensors:
    """Apply x^i -> x^i + s^{ij} y_j (s symmetric, keys both orders)."""
    n = t.n
    for (i, j), v in s.items():
        if s.get((j, i), None) != v:
            raise ValueError("gauge matrix must be symmetric")
    A2, B2, C2, D2 = [], [], [], []
    for i in range(n):
        P = {k: -v for k, v in t.A[i].items()}
        Q = {k: -v for k, v in t.B[i].items()}
        R = {k: -v for k, v in t.C[i].items()}
        Ps = _smat_mul(P, s)
        Qp = _sdict_add(Q, Ps)
        sQ = _smat_mul(s, Q)
        QTs = {(b, a): v for (a, b), v in sQ.items()}
        sPs = _smat_mul(s, Ps)
        Rp = _sdict_add(_sdict_add(R, _sdict_add(sQ, QTs)), sPs)
        A2.append({k: -v for k, v in P.items() if not is_zero(v, tol)})
        B2.append({k: -v for k, v in Qp.items() if not is_zero(v, tol)})
        C2.append({k: -v for k, v in Rp.items() if not is_zero(v, tol)})
    D2 = [sum((B2[i].get((j, j), ZERO) for j in range(n)), start=ZERO) / 2 for i in range(n)]
    return AiryTensors(n, A2, B2, C2, D2, field=t.field, gauge="custom")


def verify_bracket(t: AiryTensors, g, tol=DEFAULT_TOL):
    """Exhaustive check of {l_i, l_j} = f_ij^k l_k; returns (ok, witness)."""
    ls = t.hamiltonians()
    for i in range(t.n):
        for j in range(i + 1, t.n):
            got = poisson(ls[i], ls[j])
            for k, c in g.bracket_coeffs(i, j).items():
                got = got - ls[k] * c
            if not got.is_zero(tol):
                return False, (i, j)
    return True, None
