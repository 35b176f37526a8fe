"""Semisimple Lie algebras: matrix realizations, structure constants, roots.

Algebras are built from their tautological matrix representations (sl(n),
sp(2n) and finite products of those); structure constants are derived from
matrix commutators rather than transcribed.  Abstract root data for the
remaining families (so(2k+1), g2, f4) back the Dynkin-index computations that
never need matrices.
"""

from __future__ import annotations

import itertools
import re
from fractions import Fraction

from .linalg import Matrix, rref
from .scalars import Scalar

ZERO = Fraction(0)
ONE = Fraction(1)


def _e(d, i, j):
    m = [[ZERO] * d for _ in range(d)]
    m[i][j] = ONE
    return m


def _madd(a, b):
    return [[x + y for x, y in zip(ra, rb)] for ra, rb in zip(a, b)]


def _msub(a, b):
    return [[x - y for x, y in zip(ra, rb)] for ra, rb in zip(a, b)]


def _mmul(a, b):
    n = len(a)
    out = [[ZERO] * n for _ in range(n)]
    for i in range(n):
        for k in range(n):
            if a[i][k]:
                aik = a[i][k]
                for j in range(n):
                    if b[k][j]:
                        out[i][j] += aik * b[k][j]
    return out


def _commutator(a, b):
    return _msub(_mmul(a, b), _mmul(b, a))


def _sl2_generators():
    h = [[ONE, ZERO], [ZERO, -ONE]]
    x = [[ZERO, ONE], [ZERO, ZERO]]
    y = [[ZERO, ZERO], [ONE, ZERO]]
    return ["H", "X", "Y"], [h, x, y], [0], [None, (2,), (-2,)]


def _sp_generators(n):
    """Standard basis of sp(2n) on e_1..e_n, e_{n+1}..e_{2n}.

    The symplectic form pairs e_i with e_{n+i}.  Labels follow the usual
    H_i, U_i, V_i, X_ij, Y_ij, Z_ij scheme; each generator is a root vector.
    """
    d = 2 * n
    labels, mats, roots = [], [], []
    for i in range(n):
        labels.append(f"H{i+1}")
        mats.append(_msub(_e(d, i, i), _e(d, n + i, n + i)))
        roots.append(None)
    cartan = list(range(n))

    def root(*pairs):
        v = [0] * n
        for idx, c in pairs:
            v[idx] += c
        return tuple(v)

    for i in range(n):
        labels.append(f"U{i+1}")
        mats.append(_e(d, i, n + i))
        roots.append(root((i, 2)))
    for i in range(n):
        labels.append(f"V{i+1}")
        mats.append(_e(d, n + i, i))
        roots.append(root((i, -2)))
    for i in range(n):
        for j in range(n):
            if i != j:
                labels.append(f"X{i+1}{j+1}")
                mats.append(_msub(_e(d, i, j), _e(d, n + j, n + i)))
                roots.append(root((i, 1), (j, -1)))
    for i in range(n):
        for j in range(i + 1, n):
            labels.append(f"Y{i+1}{j+1}")
            mats.append(_madd(_e(d, i, n + j), _e(d, j, n + i)))
            roots.append(root((i, 1), (j, 1)))
    for i in range(n):
        for j in range(i + 1, n):
            labels.append(f"Z{i+1}{j+1}")
            mats.append(_madd(_e(d, n + j, i), _e(d, n + i, j)))
            roots.append(root((i, -1), (j, -1)))
    return labels, mats, cartan, roots


def _sl_generators(n):
    """Basis of sl(n): E_ii - E_{i+1,i+1} plus all off-diagonal E_ij."""
    if n == 2:
        return _sl2_generators()
    labels, mats = [], []
    for i in range(n - 1):
        labels.append(f"H{i+1}")
        mats.append(_msub(_e(n, i, i), _e(n, i + 1, i + 1)))
    for i in range(n):
        for j in range(n):
            if i != j:
                labels.append(f"E{i+1}{j+1}")
                mats.append(_e(n, i, j))
    cartan = list(range(n - 1))
    return labels, mats, cartan, None


class LieAlgebra:
    """A semisimple Lie algebra with a fixed generator basis.

    Attributes mirror what the rest of the engine needs: structure constants
    as sparse triples, the Cartan subalgebra as generator indices, one root
    vector (integer coordinates on the weight lattice) per non-Cartan
    generator, and the block-diagonal tautological realization.
    """

    def __init__(self, spec: str):
        self.name = spec.replace(" ", "")
        self.factors = parse_algebra_spec(spec)
        labels, mats, cartan, roots, factor_of = [], [], [], [], []
        self.factor_ranks = []
        self.taut_dims = []
        blocks = []
        for fam, size in self.factors:
            if fam == "sl":
                if size != 2:
                    raise ValueError(
                        "matrix realizations cover sl(2), sp(2n) and their products; "
                        f"sl({size}) is supported only through abstract root data"
                    )
                blocks.append(_sl2_generators())
                self.factor_ranks.append(1)
                self.taut_dims.append(2)
            elif fam == "sp":
                nn = size // 2
                blocks.append(_sp_generators(nn))
                self.factor_ranks.append(nn)
                self.taut_dims.append(size)
            else:
                raise ValueError(f"unsupported family {fam}")
        self.rank = sum(self.factor_ranks)
        multi = len(blocks) > 1
        # concatenate per-factor data; Cartans first within each factor
        rank_offset = 0
        for k, (ls, ms, cs, rs) in enumerate(blocks):
            base = len(labels)
            for li, lab in enumerate(ls):
                labels.append(f"{lab}({k+1})" if multi else lab)
                factor_of.append(k)
                r = rs[li]
                if r is None:
                    roots.append(None)
                else:
                    full = [0] * self.rank
                    full[rank_offset : rank_offset + len(r)] = list(r)
                    roots.append(tuple(full))
            cartan.extend(base + c for c in cs)
            mats.extend(self._embed(ms, k))
            rank_offset += self.factor_ranks[k]
        self.labels = labels
        self.mats = mats
        self.cartan = cartan
        self.root_of = roots
        self.factor_of_gen = factor_of
        self.n = len(labels)
        self.taut_dim = sum(self.taut_dims)
        self._coords_cache = None
        self.f = self._structure_constants()

    def _embed(self, ms, k):
        """Embed factor matrices block-diagonally in the product realization."""
        total = sum(self.taut_dims)
        off = sum(self.taut_dims[:k])
        out = []
        for m in ms:
            big = [[ZERO] * total for _ in range(total)]
            for i, row in enumerate(m):
                for j, x in enumerate(row):
                    if x:
                        big[off + i][off + j] = x
            out.append(big)
        return out

    # --- structure constants -------------------------------------------

    def _coordinatizer(self):
        """Express a taut-realization matrix on the generator basis."""
        if self._coords_cache is not None:
            return self._coords_cache
        d = self.taut_dim
        cols = [[m[i][j] for m in self.mats] for i in range(d) for j in range(d)]
        # cols is (d*d) x n; find n pivot rows and invert that square block
        red, pivots = rref([list(c) for c in cols])
        del red
        if len(pivots) != self.n:
            raise RuntimeError("generators are not linearly independent")
        # pivot row indices into the flattened matrix
        piv_rows = []
        red2, piv2 = rref([[cols[r][c] for r in range(len(cols))] for c in range(self.n)])
        piv_rows = piv2
        block = [[cols[r][c] for c in range(self.n)] for r in piv_rows]
        aug = [row + [ONE if i == j else ZERO for j in range(self.n)] for i, row in enumerate(block)]
        red3, piv3 = rref(aug)
        if piv3 != list(range(self.n)):
            raise RuntimeError("singular coordinate block")
        inv = [row[self.n :] for row in red3]
        self._coords_cache = (piv_rows, inv)
        return self._coords_cache

    def coords_of_matrix(self, m) -> list[Fraction]:
        """Exact coefficients of m on the generator basis (errors if outside)."""
        d = self.taut_dim
        piv_rows, inv = self._coordinatizer()
        flat = [m[r // d][r % d] for r in piv_rows]
        coeffs = [sum(inv[i][j] * flat[j] for j in range(self.n)) for i in range(self.n)]
        # verify the expansion is exact
        for i in range(d):
            for j in range(d):
                s = sum(c * g[i][j] for c, g in zip(coeffs, self.mats) if c)
                if s != m[i][j]:
                    raise ArithmeticError("matrix lies outside the algebra span")
        return coeffs

    def _structure_constants(self):
        f = {}
        for i in range(self.n):
            for j in range(i + 1, self.n):
                if self.factor_of_gen[i] != self.factor_of_gen[j]:
                    continue
                c = _commutator(self.mats[i], self.mats[j])
                if all(x == 0 for row in c for x in row):
                    continue
                coeffs = self.coords_of_matrix(c)
                entry = {k: v for k, v in enumerate(coeffs) if v}
                if entry:
                    f[(i, j)] = entry
        return f

    def bracket_coeffs(self, i: int, j: int) -> dict[int, Fraction]:
        """Sparse coefficients of [T_i, T_j] on the generator basis."""
        if i == j:
            return {}
        if i < j:
            return self.f.get((i, j), {})
        return {k: -v for k, v in self.f.get((j, i), {}).items()}

    # --- derived data ----------------------------------------------------

    def roots(self) -> list[tuple]:
        return [r for r in self.root_of if r is not None]

    def cartan_labels(self) -> list[str]:
        return [self.labels[i] for i in self.cartan]

    def ad(self, t: list) -> Matrix:
        """Adjoint action of sum_i t[i] T_i:  (ad_T)_k^l = sum_i t^i f_ik^l."""
        n = self.n
        out = [[ZERO] * n for _ in range(n)]
        for i, ti in enumerate(t):
            if not ti:
                continue
            for k in range(n):
                for l, c in self.bracket_coeffs(i, k).items():
                    out[l][k] += ti * c
        return Matrix(out)

    def cartan_coeff_vector(self, coeffs_on_h: list) -> list:
        """Lift coefficients on H_1..H_rank to the full generator basis."""
        v = [ZERO] * self.n
        for c, idx in zip(coeffs_on_h, self.cartan):
            v[idx] = Fraction(c) if isinstance(c, int) else c
        return v

    def ad_eigenvalues_on_cartan(self, h: list) -> list:
        """Multiset of ad_J eigenvalues for J = sum h_i H_i (roots + zeros)."""
        vals = [root_value(r, h) for r in self.roots()]
        vals.extend([ZERO] * self.rank)
        return vals

    def regularity_check(self, h: list):
        """True iff alpha(J) != 0 for every root; else lists vanishing roots."""
        bad = sorted({r for r in self.roots() if root_value(r, h) == 0})
        return (len(bad) == 0), bad

    def jacobi_defect(self):
        """First (i,j,k,l) violating the Jacobi identity, or None.

        Sparse triple loop; fine up to sp(10) size.
        """
        n = self.n
        br = [[self.bracket_coeffs(i, j) for j in range(n)] for i in range(n)]
        for i in range(n):
            for j in range(i + 1, n):
                for k in range(j + 1, n):
                    acc: dict[int, Fraction] = {}
                    for a, b, c in ((i, j, k), (j, k, i), (k, i, j)):
                        for m, f1 in br[a][b].items():
                            for l, f2 in br[m][c].items():
                                acc[l] = acc.get(l, ZERO) + f1 * f2
                    for l, v in acc.items():
                        if v:
                            return (i, j, k, l)
        return None

    def struct_json(self):
        triples = []
        for (i, j), entry in sorted(self.f.items()):
            for k, v in sorted(entry.items()):
                triples.append([self.labels[i], self.labels[j], self.labels[k], str(v)])
        return {"schema": 1, "algebra": self.name, "dim": self.n, "rank": self.rank, "f": triples}


def root_value(root: tuple, h: list) -> Scalar:
    return sum((c * x for c, x in zip(root, h) if c), start=ZERO)


def parse_algebra_spec(spec: str):
    """Parse "sl2", "sp4", "sl2*sp4", "sl2^5" into a factor list."""
    spec = spec.replace(" ", "")
    factors = []
    for part in spec.split("*"):
        m = re.fullmatch(r"(sl|sp)(\d+)(?:\^(\d+))?", part)
        if not m:
            raise ValueError(f"cannot parse algebra spec {part!r}")
        fam, size, power = m.group(1), int(m.group(2)), int(m.group(3) or 1)
        if fam == "sl" and size < 2:
            raise ValueError("sl(n) needs n >= 2")
        if fam == "sp" and (size < 2 or size % 2):
            raise ValueError("sp(2n) needs even size >= 2")
        factors.extend([(fam, size)] * power)
    return factors


def build_algebra(spec: str) -> LieAlgebra:
    return LieAlgebra(spec)


# --- abstract root data (for index computations only) -----------------------


class RootDatum:
    """Positive roots plus ambient inner product; enough for Weyl formulas."""

    def __init__(self, name, rank, positive_roots, highest_root, dim):
        self.name = name
        self.rank = rank
        self.positive = [tuple(Fraction(c) for c in r) for r in positive_roots]
        self.theta = tuple(Fraction(c) for c in highest_root)
        self.dim = dim
        s = [ZERO] * len(self.theta)
        for r in self.positive:
            s = [a + b for a, b in zip(s, r)]
        self.rho = tuple(x / 2 for x in s)

    @staticmethod
    def _dot(u, v):
        return sum(a * b for a, b in zip(u, v))

    def weyl_dim(self, lam) -> Fraction:
        lam = tuple(Fraction(c) for c in lam)
        num, den = ONE, ONE
        lr = [a + b for a, b in zip(lam, self.rho)]
        for alpha in self.positive:
            num *= self._dot(lr, alpha)
            den *= self._dot(self.rho, alpha)
        return num / den

    def is_dominant(self, lam) -> bool:
        lam = tuple(Fraction(c) for c in lam)
        return all(self._dot(lam, a) >= 0 for a in self.positive)

    def index(self, lam) -> Fraction:
        """Dynkin index normalized so the adjoint representation has index 1."""
        if not self.is_dominant(lam):
            raise ValueError(f"{lam} is not dominant for {self.name}")
        lam = tuple(Fraction(c) for c in lam)
        lr2 = [a + 2 * b for a, b in zip(lam, self.rho)]
        tr2 = [a + 2 * b for a, b in zip(self.theta, self.rho)]
        return (
            self.weyl_dim(lam)
            * self._dot(lam, lr2)
            / (Fraction(self.dim) * self._dot(self.theta, tr2))
        )


def root_datum(family: str, n: int = 0) -> RootDatum:
    """Root data for A, B, C families and the exceptional g2, f4."""
    if family == "sl":  # A_{n-1} in ambient R^n
        pos = []
        for i in range(n):
            for j in range(i + 1, n):
                r = [0] * n
                r[i], r[j] = 1, -1
                pos.append(r)
        theta = [0] * n
        theta[0], theta[-1] = 1, -1
        return RootDatum(f"sl{n}", n - 1, pos, theta, n * n - 1)
    if family == "sp":  # C_m, n = 2m
        m = n // 2
        pos = []
        for i in range(m):
            r = [0] * m
            r[i] = 2
            pos.append(list(r))
        for i in range(m):
            for j in range(i + 1, m):
                for s in (1, -1):
                    r = [0] * m
                    r[i], r[j] = 1, s
                    pos.append(r)
        theta = [0] * m
        theta[0] = 2
        return RootDatum(f"sp{n}", m, pos, theta, m * (2 * m + 1))
    if family == "so":  # B_m, n = 2m+1 odd
        m = (n - 1) // 2
        pos = []
        for i in range(m):
            r = [0] * m
            r[i] = 1
            pos.append(list(r))
        for i in range(m):
            for j in range(i + 1, m):
                for s in (1, -1):
                    r = [0] * m
                    r[i], r[j] = 1, s
                    pos.append(r)
        theta = [0] * m
        if m >= 2:
            theta[0], theta[1] = 1, 1
        else:
            theta[0] = 1
        return RootDatum(f"so{n}", m, pos, theta, m * (2 * m + 1))
    if family == "g2":
        pos = [
            (1, -1, 0), (0, 1, -1), (1, 0, -1),
            (2, -1, -1), (1, -2, 1), (1, 1, -2),
        ]
        return RootDatum("g2", 2, pos, (2, -1, -1), 14)
    if family == "f4":
        # coordinates doubled so the half-integer roots stay integral
        pos = []
        for i in range(4):
            r = [0] * 4
            r[i] = 2
            pos.append(list(r))
        for i in range(4):
            for j in range(i + 1, 4):
                for s in (2, -2):
                    r = [0] * 4
                    r[i], r[j] = 2, s
                    pos.append(r)
        for signs in itertools.product((1, -1), repeat=3):
            pos.append([1, signs[0], signs[1], signs[2]])
        return RootDatum("f4", 4, pos, (2, 2, 0, 0), 52)
    raise ValueError(f"no root datum for {family}")


# fundamental-module weights for families without matrix realizations
def fundamental_weights_table(family: str, n: int = 0):
    """Weight multisets of the tautological/fundamental module F."""
    if family == "so":
        m = (n - 1) // 2
        ws = [tuple(0 for _ in range(m))]
        for i in range(m):
            for s in (1, -1):
                w = [0] * m
                w[i] = s
                ws.append(tuple(w))
        return ws
    if family == "g2":
        short = [(1, -1, 0), (0, 1, -1), (1, 0, -1)]
        ws = [(0, 0, 0)]
        for r in short:
            ws.append(r)
            ws.append(tuple(-c for c in r))
        return ws
    if family == "f4":
        ws = [(0, 0, 0, 0), (0, 0, 0, 0)]
        for i in range(4):
            for s in (2, -2):
                w = [0] * 4
                w[i] = s
                ws.append(tuple(w))
        for signs in itertools.product((1, -1), repeat=4):
            ws.append(signs)
        return ws
    raise ValueError(f"no weight table for {family}")


def index_from_quadratic_forms(weights, roots, rank: int) -> Fraction:
    """tr_W(TS) / tr_g(ad_T ad_S) via exact proportionality of Gram forms.

    Both sides are symmetric forms on the Cartan; for a simple algebra they
    are proportional and the ratio is the index.
    """

    def gram(vs):
        g = [[ZERO] * rank for _ in range(rank)]
        for v in vs:
            for i in range(rank):
                if v[i]:
                    for j in range(rank):
                        if v[j]:
                            g[i][j] += Fraction(v[i]) * Fraction(v[j])
        return g

    gw, ga = gram(weights), gram(roots)
    ratio = None
    for i in range(rank):
        for j in range(rank):
            if ga[i][j]:
                r = gw[i][j] / ga[i][j]
                if ratio is None:
                    ratio = r
                elif ratio != r:
                    raise ArithmeticError("weight form is not proportional to the Killing form")
            elif gw[i][j]:
                raise ArithmeticError("weight form is not proportional to the Killing form")
    if ratio is None:
        raise ArithmeticError("zero root form")
    return ratio
