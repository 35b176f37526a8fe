"""Exact dense linear algebra over the scalar tower.

Rank uses fraction-free (Bareiss) elimination for exact fields, so all
intermediate values stay in the base ring when the input is integral.
Complex-float matrices fall back to tolerance-thresholded pivoting and the
result is flagged approximate by callers that care.
"""

from __future__ import annotations

from fractions import Fraction
from typing import Sequence

from .scalars import DEFAULT_TOL, Quad, Scalar, field_of, is_zero, join_fields, to_field


class Matrix:
    """Immutable dense matrix with a homogeneous field tag."""

    __slots__ = ("rows", "cols", "entries", "field")

    def __init__(self, entries: Sequence[Sequence[Scalar]], field: str | None = None):
        entries = [list(row) for row in entries]
        if entries:
            w = len(entries[0])
            if any(len(r) != w for r in entries):
                raise ValueError("ragged matrix")
        self.rows = len(entries)
        self.cols = len(entries[0]) if entries else 0
        if field is None:
            field = join_fields(field_of(x) for row in entries for x in row) if entries else "q"
        self.entries = [[to_field(x, field) for x in row] for row in entries]
        self.field = field

    @classmethod
    def identity(cls, n: int, field: str = "q") -> "Matrix":
        return cls([[Fraction(i == j) for j in range(n)] for i in range(n)], field)

    @classmethod
    def zero(cls, rows: int, cols: int, field: str = "q") -> "Matrix":
        return cls([[Fraction(0)] * cols for _ in range(rows)], field)

    def row(self, i: int) -> list[Scalar]:
        return list(self.entries[i])

    def transpose(self) -> "Matrix":
        return Matrix([[self.entries[i][j] for i in range(self.rows)] for j in range(self.cols)], self.field)

    def __eq__(self, other):
        return (
            isinstance(other, Matrix)
            and self.rows == other.rows
            and self.cols == other.cols
            and all(
                self.entries[i][j] == other.entries[i][j]
                for i in range(self.rows)
                for j in range(self.cols)
            )
        )

    def __repr__(self):
        return f"Matrix({self.rows}x{self.cols}, {self.field})"

    def mul(self, other: "Matrix") -> "Matrix":
        if self.cols != other.rows:
            raise ValueError("shape mismatch")
        field = join_fields([self.field, other.field])
        a = [[to_field(x, field) for x in row] for row in self.entries]
        b = [[to_field(x, field) for x in row] for row in other.entries]
        out = []
        for i in range(self.rows):
            row = []
            for j in range(other.cols):
                s = to_field(Fraction(0), field)
                for k in range(self.cols):
                    if a[i][k] and b[k][j]:
                        s = s + a[i][k] * b[k][j]
                row.append(s)
            out.append(row)
        return Matrix(out, field)


def _integralize_rows(entries):
    """Scale each row by a positive integer so entries live in Z or Z[sqrt d].

    Row scaling preserves rank, and it lets Bareiss run fraction-free.
    """
    out = []
    for row in entries:
        dens = []
        for x in row:
            if isinstance(x, Quad):
                dens += [x.a.denominator, x.b.denominator]
            else:
                dens.append(Fraction(x).denominator)
        m = 1
        for d in dens:
            m = m * d // __import__("math").gcd(m, d)
        out.append([x * m for x in row])
    return out


def bareiss_rank(entries, _check_integral: bool = False) -> int:
    """Fraction-free elimination rank over an exact integral domain.

    With integral input every intermediate entry is integral (the classic
    Bareiss divisibility property); ``_check_integral`` asserts this, which
    the property tests enable.
    """
    m = [list(row) for row in entries]
    if not m or not m[0]:
        return 0
    nrows, ncols = len(m), len(m[0])
    rank = 0
    prev = 1  # previous pivot, divides all new entries exactly
    pr = 0
    for pc in range(ncols):
        piv = None
        for i in range(pr, nrows):
            if m[i][pc]:
                piv = i
                break
        if piv is None:
            continue
        m[pr], m[piv] = m[piv], m[pr]
        p = m[pr][pc]
        for i in range(pr + 1, nrows):
            for j in range(pc + 1, ncols):
                num = p * m[i][j] - m[i][pc] * m[pr][j]
                m[i][j] = num / prev if prev != 1 else num
                if _check_integral:
                    _assert_integral(m[i][j])
            m[i][pc] = 0 * m[i][pc]
        prev = p
        pr += 1
        rank += 1
        if pr == nrows:
            break
    return rank


def _assert_integral(x):
    if isinstance(x, Quad):
        assert x.a.denominator == 1 and x.b.denominator == 1, "Bareiss produced a denominator"
    elif isinstance(x, Fraction):
        assert x.denominator == 1, "Bareiss produced a denominator"


def _float_rank(entries, tol: float) -> int:
    m = [[complex(x) for x in row] for row in entries]
    if not m or not m[0]:
        return 0
    nrows, ncols = len(m), len(m[0])
    rank = 0
    pr = 0
    for pc in range(ncols):
        piv, best = None, tol
        for i in range(pr, nrows):
            if abs(m[i][pc]) > best:
                piv, best = i, abs(m[i][pc])
        if piv is None:
            continue
        m[pr], m[piv] = m[piv], m[pr]
        p = m[pr][pc]
        for i in range(pr + 1, nrows):
            f = m[i][pc] / p
            for j in range(pc, ncols):
                m[i][j] -= f * m[pr][j]
        pr += 1
        rank += 1
        if pr == nrows:
            break
    return rank


def _connected_blocks(entries):
    """Partition rows/columns by the nonzero pattern's connected components.

    Rank is additive over such blocks, and graded matrices (the usual case
    here) split into many small pieces.
    """
    nrows, ncols = len(entries), len(entries[0])
    parent = list(range(nrows + ncols))

    def find(a):
        while parent[a] != a:
            parent[a] = parent[parent[a]]
            a = parent[a]
        return a

    def union(a, b):
        ra, rb = find(a), find(b)
        if ra != rb:
            parent[ra] = rb

    for i, row in enumerate(entries):
        for j, x in enumerate(row):
            if x:
                union(i, nrows + j)
    comp: dict[int, tuple[list, list]] = {}
    for i in range(nrows):
        comp.setdefault(find(i), ([], []))[0].append(i)
    for j in range(ncols):
        comp.setdefault(find(nrows + j), ([], []))[1].append(j)
    return [(rs, cs) for rs, cs in comp.values() if rs and cs]


def rank(m: Matrix | Sequence[Sequence[Scalar]], tol: float = DEFAULT_TOL) -> int:
    entries = m.entries if isinstance(m, Matrix) else [list(r) for r in m]
    if not entries or not entries[0]:
        return 0
    field = m.field if isinstance(m, Matrix) else join_fields(field_of(x) for r in entries for x in r)
    if field == "c64":
        return _float_rank(entries, tol)
    total = 0
    for rs, cs in _connected_blocks(entries):
        sub = [[entries[i][j] for j in cs] for i in rs]
        total += bareiss_rank(_integralize_rows(sub))
    return total


def rref(entries, tol: float = DEFAULT_TOL):
    """Reduced row echelon form over the entries' field.

    Returns (matrix rows, pivot column list).  Works for any field in the
    tower; float matrices use threshold pivoting.
    """
    m = [list(row) for row in entries]
    if not m:
        return m, []
    nrows, ncols = len(m), len(m[0])
    approx = any(isinstance(x, (float, complex)) for row in m for x in row)
    pivots = []
    pr = 0
    for pc in range(ncols):
        piv = None
        if approx:
            best = tol
            for i in range(pr, nrows):
                if abs(complex(m[i][pc])) > best:
                    piv, best = i, abs(complex(m[i][pc]))
        else:
            for i in range(pr, nrows):
                if m[i][pc]:
                    piv = i
                    break
        if piv is None:
            continue
        m[pr], m[piv] = m[piv], m[pr]
        p = m[pr][pc]
        m[pr] = [x / p for x in m[pr]]
        for i in range(nrows):
            if i != pr and m[i][pc]:
                f = m[i][pc]
                m[i] = [a - f * b for a, b in zip(m[i], m[pr])]
        pivots.append(pc)
        pr += 1
        if pr == nrows:
            break
    return m, pivots


def kernel_basis(entries, tol: float = DEFAULT_TOL):
    """Basis of the right kernel, canonicalized.

    Each basis vector is scaled so its first nonzero entry is +1 (exact
    fields), giving a deterministic, reproducible choice.
    """
    m = [list(row) for row in entries]
    if not m or not m[0]:
        return []
    ncols = len(m[0])
    red, pivots = rref(m, tol)
    free = [c for c in range(ncols) if c not in pivots]
    basis = []
    for fc in free:
        v = [0 * red[0][0] if red else Fraction(0) for _ in range(ncols)]
        v[fc] = _one_like(red[0][0]) if red else Fraction(1)
        for r, pc in enumerate(pivots):
            v[pc] = -red[r][fc]
        lead = next((x for x in v if not is_zero(x, tol)), None)
        if lead is not None:
            v = [x / lead for x in v]
        basis.append(v)
    return basis


def _one_like(x):
    return to_field(Fraction(1), field_of(x))


class SolveResult:
    """Outcome of a linear solve: unique / parameterized / none."""

    __slots__ = ("kind", "particular", "kernel")

    def __init__(self, kind, particular=None, kernel=None):
        self.kind = kind  # "unique" | "parameterized" | "none"
        self.particular = particular
        self.kernel = kernel or []


def solve_linear(m: Matrix | Sequence[Sequence[Scalar]], rhs, tol: float = DEFAULT_TOL) -> SolveResult:
    """Solve m x = rhs, returning a particular solution plus kernel basis.

    ``rhs`` may be a flat vector or a single-column matrix.
    """
    a = m.entries if isinstance(m, Matrix) else [list(r) for r in m]
    if isinstance(rhs, Matrix):
        b = [row[0] for row in rhs.entries]
    else:
        b = list(rhs)
    if len(b) != len(a):
        raise ValueError("shape mismatch between matrix and right-hand side")
    if not a:
        return SolveResult("unique", [], [])
    ncols = len(a[0])
    aug = [row + [bb] for row, bb in zip(a, b)]
    red, pivots = rref(aug, tol)
    if ncols in pivots:
        return SolveResult("none")
    x = [0 * red[0][0] for _ in range(ncols)] if red else [Fraction(0)] * ncols
    for r, pc in enumerate(pivots):
        x[pc] = red[r][ncols]
    ker = kernel_basis(a, tol)
    if ker:
        return SolveResult("parameterized", x, ker)
    return SolveResult("unique", x, [])


# --- Smith normal form ------------------------------------------------------

def smith_normal_form(a):
    """Smith normal form of an integer matrix.

    Returns (d, u, v) with u*a*v = d, u and v unimodular and d diagonal with
    d[i] | d[i+1].  Used for torus character lattices, so sizes are tiny.
    """
    a = [[int(x) for x in row] for row in a]
    nrows = len(a)
    ncols = len(a[0]) if nrows else 0
    u = [[int(i == j) for j in range(nrows)] for i in range(nrows)]
    v = [[int(i == j) for j in range(ncols)] for i in range(ncols)]

    def swap_rows(i, j):
        a[i], a[j] = a[j], a[i]
        u[i], u[j] = u[j], u[i]

    def swap_cols(i, j):
        for row in a:
            row[i], row[j] = row[j], row[i]
        for row in v:
            row[i], row[j] = row[j], row[i]

    def addmul_row(dst, src, c):
        a[dst] = [x + c * y for x, y in zip(a[dst], a[src])]
        u[dst] = [x + c * y for x, y in zip(u[dst], u[src])]

    def addmul_col(dst, src, c):
        for row in a:
            row[dst] += c * row[src]
        for row in v:
            row[dst] += c * row[src]

    t = 0
    while t < min(nrows, ncols):
        # find a nonzero pivot in the remaining block
        piv = None
        for i in range(t, nrows):
            for j in range(t, ncols):
                if a[i][j] != 0:
                    piv = (i, j)
                    break
            if piv:
                break
        if piv is None:
            break
        swap_rows(t, piv[0])
        swap_cols(t, piv[1])
        while True:
            # clear column t
            done = True
            for i in range(t + 1, nrows):
                if a[i][t] != 0:
                    q = a[i][t] // a[t][t]
                    addmul_row(i, t, -q)
                    if a[i][t] != 0:
                        swap_rows(t, i)
                        done = False
            for j in range(t + 1, ncols):
                if a[t][j] != 0:
                    q = a[t][j] // a[t][t]
                    addmul_col(j, t, -q)
                    if a[t][j] != 0:
                        swap_cols(t, j)
                        done = False
            if done:
                break
        if a[t][t] < 0:
            a[t] = [-x for x in a[t]]
            u[t] = [-x for x in u[t]]
        t += 1

    # enforce divisibility d[i] | d[i+1]
    t = min(nrows, ncols)
    changed = True
    while changed:
        changed = False
        for i in range(t - 1):
            x, y = a[i][i], a[i + 1][i + 1]
            if x and y % x != 0:
                addmul_col(i, i + 1, 1)
                # re-clear the 2x2 block
                while a[i + 1][i] != 0:
                    q = a[i + 1][i] // a[i][i] if a[i][i] else 0
                    if a[i][i]:
                        addmul_row(i + 1, i, -q)
                    if a[i + 1][i] != 0:
                        swap_rows(i, i + 1)
                while a[i][i + 1] != 0:
                    q = a[i][i + 1] // a[i][i]
                    addmul_col(i + 1, i, -q)
                    if a[i][i + 1] != 0:
                        swap_cols(i, i + 1)
                if a[i][i] < 0:
                    a[i] = [-z for z in a[i]]
                    u[i] = [-z for z in u[i]]
                if a[i + 1][i + 1] < 0:
                    a[i + 1] = [-z for z in a[i + 1]]
                    u[i + 1] = [-z for z in u[i + 1]]
                changed = True
    return a, u, v
