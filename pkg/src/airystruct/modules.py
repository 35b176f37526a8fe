"""Symplectic modules built compositionally from tautological representations.

A module expression is a tree over Taut / Dual / Sym(k) / Ext(k) / Ext0(k) /
Tensor / Sum / Adjoint.  Module expressions parse from strings such as
"Sym5(F)", "F(x)Ext0_2(F)" or "Sym2(F1)(x)F2 (+) F1(x)Sym2(F2)" where the
factor tag Fk names the tautological module of the k-th simple factor.

Conventions that the golden tests pin down:

* Sym^k carries the symmetrization-sum form
  omega(e_I, e_J) = sum_{sigma in S_k} prod_l omega(e_{i_l}, e_{j_sigma(l)});
* Lambda^2 of a symplectic space carries the scalar product
  (e_ij, e_kl) = 2 w(e_i,e_k) w(e_j,e_l) - 2 w(e_i,e_l) w(e_j,e_k);
* Lambda^3 carries the determinant form det[w(e_{i_a}, e_{j_b})];
* tensor products multiply forms, sums concatenate them.

Espressions must assemble to an antisymmetric nondegenerate form; otherwise
the expression is rejected as non-symplectic.
"""

from __future__ import annotations

import itertools
import re
from fractions import Fraction

from .linalg import kernel_basis, rank, rref
from .scalars import Scalar

ZERO = Fraction(0)
ONE = Fraction(1)


# --- expression trees --------------------------------------------------------


class ModuleExpr:
    """Constructor tree; op in {taut, adj, dual, sym, ext, ext0, tensor, sum}."""

    def __init__(self, op, children=(), k=None, factor=None):
        self.op = op
        self.children = list(children)
        self.k = k
        self.factor = factor

    def __repr__(self):
        if self.op == "taut":
            return f"F{self.factor + 1}"
        if self.op == "adj":
            return "Adj"
        if self.op in ("sym", "ext"):
            return f"{self.op.capitalize()}{self.k}({self.children[0]!r})"
        if self.op == "ext0":
            return f"Ext0_{self.k}({self.children[0]!r})"
        if self.op == "dual":
            return f"Dual({self.children[0]!r})"
        sep = "(x)" if self.op == "tensor" else " (+) "
        return sep.join(repr(c) for c in self.children)


def parse_module_expr(text: str) -> ModuleExpr:
    src = text.replace("(x)", " @ ").replace("(+)", " | ")
    tokens = re.findall(r"[A-Za-z][A-Za-z0-9_]*|\(|\)|@|\|", src)
    pos = 0

    def peek():
        return tokens[pos] if pos < len(tokens) else None

    def take(expected=None):
        nonlocal pos
        t = peek()
        if t is None or (expected and t != expected):
            raise ValueError(f"parse error in module expression {text!r} near token {t!r}")
        pos += 1
        return t

    def parse_sum():
        terms = [parse_prod()]
        while peek() == "|":
            take()
            terms.append(parse_prod())
        return terms[0] if len(terms) == 1 else ModuleExpr("sum", terms)

    def parse_prod():
        factors = [parse_atom()]
        while peek() == "@":
            take()
            factors.append(parse_atom())
        return factors[0] if len(factors) == 1 else ModuleExpr("tensor", factors)

    def parse_atom():
        t = take()
        if t == "(":
            inner = parse_sum()
            take(")")
            return inner
        m = re.fullmatch(r"F(\d*)", t)
        if m:
            return ModuleExpr("taut", factor=int(m.group(1) or 1) - 1)
        if t == "Adj":
            return ModuleExpr("adj")
        m = re.fullmatch(r"Sym(\d+)", t)
        if m:
            take("(")
            inner = parse_sum()
            take(")")
            return ModuleExpr("sym", [inner], k=int(m.group(1)))
        m = re.fullmatch(r"Ext0_(\d+)", t)
        if m:
            take("(")
            inner = parse_sum()
            take(")")
            return ModuleExpr("ext0", [inner], k=int(m.group(1)))
        m = re.fullmatch(r"Ext(\d+)", t)
        if m:
            take("(")
            inner = parse_sum()
            take(")")
            return ModuleExpr("ext", [inner], k=int(m.group(1)))
        if t == "Dual":
            take("(")
            inner = parse_sum()
            take(")")
            return ModuleExpr("dual", [inner])
        raise ValueError(f"unknown token {t!r} in module expression {text!r}")

    out = parse_sum()
    if pos != len(tokens):
        raise ValueError(f"trailing tokens in module expression {text!r}")
    return out


# --- building blocks ---------------------------------------------------------


class Block:
    """Intermediate representation space with an optional invariant form.

    ``acts`` is one sparse column map per algebra generator:
    acts[g][j] = {i: coeff} gives the j-th column of rho(T_g).
    ``parity`` is -1 for antisymmetric forms, +1 for symmetric, None if the
    block carries no invariant form.
    """

    __slots__ = ("dim", "labels", "acts", "weights", "form", "parity")

    def __init__(self, dim, labels, acts, weights, form, parity):
        self.dim = dim
        self.labels = labels
        self.acts = acts
        self.weights = weights
        self.form = form  # dict[(i, j)] -> Scalar
        self.parity = parity


def _apply_col(acts_g, v: dict) -> dict:
    out: dict[int, Scalar] = {}
    for j, c in v.items():
        col = acts_g.get(j)
        if not col:
            continue
        for i, a in col.items():
            s = out.get(i, ZERO) + a * c
            if s:
                out[i] = s
            elif i in out:
                del out[i]
    return out


def _block_taut(g, factor: int) -> Block:
    off = sum(g.taut_dims[:factor])
    d = g.taut_dims[factor]
    fam, size = g.factors[factor]
    labels = [f"e{i+1}" if len(g.factors) == 1 else f"e{i+1}@{factor+1}" for i in range(d)]
    acts = []
    for gi in range(g.n):
        col: dict[int, dict] = {}
        if g.factor_of_gen[gi] == factor:
            m = g.mats[gi]
            for j in range(d):
                entries = {i: m[off + i][off + j] for i in range(d) if m[off + i][off + j]}
                if entries:
                    col[j] = entries
        acts.append(col)
    # weights: coordinates on the factor's Cartan, zero elsewhere
    rank_off = sum(g.factor_ranks[:factor])
    weights = []
    for i in range(d):
        w = [0] * g.rank
        if fam == "sl" and size == 2:
            w[rank_off] = 1 if i == 0 else -1
        else:  # sp(2n)
            nn = size // 2
            if i < nn:
                w[rank_off + i] = 1
            else:
                w[rank_off + i - nn] = -1
        weights.append(tuple(w))
    form = {}
    if fam == "sl" and size == 2:
        form[(0, 1)] = ONE
        form[(1, 0)] = -ONE
    else:
        nn = size // 2
        for i in range(nn):
            form[(i, nn + i)] = ONE
            form[(nn + i, i)] = -ONE
    return Block(d, labels, acts, weights, form, -1)


def _block_adj(g) -> Block:
    labels = [f"ad:{l}" for l in g.labels]
    acts = []
    for gi in range(g.n):
        col = {}
        for j in range(g.n):
            entries = dict(g.bracket_coeffs(gi, j))
            if entries:
                col[j] = entries
        acts.append(col)
    weights = [r if r is not None else tuple([0] * g.rank) for r in g.root_of]
    # Killing-type form tr(ad_a ad_b), symmetric and invariant
    form = {}
    for a in range(g.n):
        for b in range(a, g.n):
            s = ZERO
            for k in range(g.n):
                br_bk = g.bracket_coeffs(b, k)
                for m, c1 in br_bk.items():
                    c2 = g.bracket_coeffs(a, m).get(k)
                    if c2:
                        s += c1 * c2
            if s:
                form[(a, b)] = s
                if a != b:
                    form[(b, a)] = s
    return Block(g.n, labels, acts, weights, form, 1)


def _block_dual(b: Block) -> Block:
    acts = []
    for col in b.acts:
        # rho*(T) = -rho(T)^t
        newcol: dict[int, dict] = {}
        for j, entries in col.items():
            for i, v in entries.items():
                newcol.setdefault(i, {})[j] = -v
        acts.append(newcol)
    labels = [f"{l}*" for l in b.labels]
    weights = [tuple(-c for c in w) for w in b.weights]
    form = None
    parity = None
    if b.form is not None:
        form = {(i, j): v for (i, j), v in b.form.items()}
        parity = b.parity
    return Block(b.dim, labels, acts, weights, form, parity)


def _block_sym(b: Block, k: int) -> Block:
    basis = list(itertools.combinations_with_replacement(range(b.dim), k))
    index = {t: n for n, t in enumerate(basis)}
    labels = ["e_" + "".join(str(i + 1) for i in t) for t in basis]
    weights = [tuple(sum(b.weights[i][c] for i in t) for c in range(len(b.weights[0]))) for t in basis]
    acts = []
    for col in b.acts:
        newcol: dict[int, dict] = {}
        for n, t in enumerate(basis):
            acc: dict[int, Scalar] = {}
            for pos in range(k):
                images = col.get(t[pos])
                if not images:
                    continue
                for i2, v in images.items():
                    t2 = tuple(sorted(t[:pos] + (i2,) + t[pos + 1 :]))
                    acc[index[t2]] = acc.get(index[t2], ZERO) + v
            acc = {i: v for i, v in acc.items() if v}
            if acc:
                newcol[n] = acc
        acts.append(newcol)
    form = None
    parity = None
    if b.form is not None:
        parity = b.parity**k
        form = {}
        for n1, t1 in enumerate(basis):
            for n2, t2 in enumerate(basis):
                if any(w1 + w2 for w1, w2 in zip(weights[n1], weights[n2])):
                    continue
                s = ZERO
                for sigma in itertools.permutations(range(k)):
                    p = ONE
                    for l in range(k):
                        x = b.form.get((t1[l], t2[sigma[l]]))
                        if not x:
                            p = ZERO
                            break
                        p *= x
                    s += p
                if s:
                    form[(n1, n2)] = s
    return Block(len(basis), labels, acts, weights, form, parity)


# Lambda^2 of a symplectic space uses the doubled determinant convention; the
# higher exterior powers use the plain determinant.
EXT_FORM_FACTOR = {2: Fraction(2)}


def _block_ext(b: Block, k: int) -> Block:
    basis = list(itertools.combinations(range(b.dim), k))
    index = {t: n for n, t in enumerate(basis)}
    labels = ["e_(" + ",".join(str(i + 1) for i in t) + ")" for t in basis]
    weights = [tuple(sum(b.weights[i][c] for i in t) for c in range(len(b.weights[0]))) for t in basis]
    acts = []
    for col in b.acts:
        newcol: dict[int, dict] = {}
        for n, t in enumerate(basis):
            acc: dict[int, Scalar] = {}
            for pos in range(k):
                images = col.get(t[pos])
                if not images:
                    continue
                for i2, v in images.items():
                    rest = t[:pos] + (i2,) + t[pos + 1 :]
                    if len(set(rest)) < k:
                        continue
                    st = tuple(sorted(rest))
                    sign = _sort_sign(rest)
                    m = index[st]
                    acc[m] = acc.get(m, ZERO) + sign * v
            acc = {i: v for i, v in acc.items() if v}
            if acc:
                newcol[n] = acc
        acts.append(newcol)
    form = None
    parity = None
    if b.form is not None:
        parity = b.parity**k
        cfact = EXT_FORM_FACTOR.get(k, ONE)
        form = {}
        for n1, t1 in enumerate(basis):
            for n2, t2 in enumerate(basis):
                if any(w1 + w2 for w1, w2 in zip(weights[n1], weights[n2])):
                    continue
                s = ZERO
                for sigma in itertools.permutations(range(k)):
                    p = _perm_sign(sigma)
                    for l in range(k):
                        x = b.form.get((t1[l], t2[sigma[l]]))
                        if not x:
                            p = ZERO
                            break
                        p = p * x
                    s += p
                s *= cfact
                if s:
                    form[(n1, n2)] = s
    return Block(len(basis), labels, acts, weights, form, parity)


def _sort_sign(seq) -> int:
    s = 1
    seq = list(seq)
    for i in range(len(seq)):
        for j in range(i + 1, len(seq)):
            if seq[i] > seq[j]:
                s = -s
    return s


def _perm_sign(sigma) -> Fraction:
    return Fraction(_sort_sign(sigma))


def _block_ext0(b: Block, k: int) -> Block:
    """Kernel of the symplectic contraction inside Lambda^k.

    The kernel is computed weight space by weight space and each kernel
    vector is scaled to leading coefficient +1, which reproduces the usual
    explicit bases (eta = e_13 - e_24 for sp4).
    """
    if b.parity != -1:
        raise ValueError("Ext0 requires a symplectic building block")
    big = _block_ext(b, k)
    basis = list(itertools.combinations(range(b.dim), k))
    if k == 2:
        tgt_basis = [()]
        tgt_index = {(): 0}
    else:
        tgt_basis = list(itertools.combinations(range(b.dim), k - 2))
        tgt_index = {t: n for n, t in enumerate(tgt_basis)}

    def contraction(t):
        out: dict[int, Scalar] = {}
        for a in range(k):
            for c in range(a + 1, k):
                w = b.form.get((t[a], t[c]))
                if not w:
                    continue
                rest = tuple(x for p, x in enumerate(t) if p not in (a, c))
                sign = (-1) ** (a + c - 1)
                m = tgt_index[rest]
                out[m] = out.get(m, ZERO) + sign * w
        return out

    by_weight: dict[tuple, list[int]] = {}
    for n, w in enumerate(big.weights):
        by_weight.setdefault(w, []).append(n)
    kernel_vectors = []  # (leading big-index, dict big-index -> coeff)
    for w in sorted(by_weight):
        idxs = by_weight[w]
        cols = [contraction(basis[n]) for n in idxs]
        tgt_rows = sorted({m for c in cols for m in c})
        mat = [[cols[ci].get(m, ZERO) for ci in range(len(idxs))] for m in tgt_rows]
        if not mat:
            for ci, n in enumerate(idxs):
                kernel_vectors.append((n, {n: ONE}))
            continue
        for v in kernel_basis(mat):
            vec = {idxs[ci]: c for ci, c in enumerate(v) if c}
            lead = min(vec)
            kernel_vectors.append((lead, vec))
    kernel_vectors.sort(key=lambda lv: lv[0])
    vecs = [v for _, v in kernel_vectors]
    dim0 = len(vecs)

    labels = []
    seen: dict[str, int] = {}
    for lead, v in kernel_vectors:
        lab = big.labels[lead]
        if len(v) > 1:
            lab += "*"
        n = seen.get(lab, 0)
        seen[lab] = n + 1
        labels.append(lab if n == 0 else f"{lab}{n+1}")
    weights = [big.weights[next(iter(v))] for v in vecs]

    # per-weight solver for re-expressing vectors in the kernel basis
    solver = _SubspaceSolver(vecs, weights)

    acts = []
    for gcol in big.acts:
        newcol: dict[int, dict] = {}
        for n, v in enumerate(vecs):
            img = _apply_col(gcol, v)
            if not img:
                continue
            coords = solver.express(img)
            if coords:
                newcol[n] = coords
        acts.append(newcol)
    form = {}
    for n1, v1 in enumerate(vecs):
        for n2, v2 in enumerate(vecs):
            if any(a + c for a, c in zip(weights[n1], weights[n2])):
                continue
            s = ZERO
            for i1, c1 in v1.items():
                for i2, c2 in v2.items():
                    x = big.form.get((i1, i2))
                    if x:
                        s += c1 * c2 * x
            if s:
                form[(n1, n2)] = s
    return Block(dim0, labels, acts, weights, form, big.parity)


class _SubspaceSolver:
    """Express sparse vectors in a fixed basis of an invariant subspace."""

    def __init__(self, vecs, weights):
        self.by_weight: dict[tuple, list[int]] = {}
        for n, w in enumerate(weights):
            self.by_weight.setdefault(w, []).append(n)
        self.vecs = vecs
        self.weights = weights
        self._solvers = {}
        for w, idxs in self.by_weight.items():
            rows = sorted({i for n in idxs for i in self.vecs[n]})
            mat = [[self.vecs[n].get(r, ZERO) for n in idxs] for r in rows]
            red, piv = rref([row + [ONE if ri == rj else ZERO for rj in range(len(rows))] for ri, row in enumerate(mat)])
            # red rows now encode an inverse on the pivot rows
            piv_rows = []
            redt, pivt = rref([[mat[r][c] for r in range(len(rows))] for c in range(len(idxs))])
            piv_rows = pivt
            block = [[mat[r][c] for c in range(len(idxs))] for r in piv_rows]
            aug = [row + [ONE if i == j else ZERO for j in range(len(idxs))] for i, row in enumerate(block)]
            red2, piv2 = rref(aug)
            inv = [row[len(idxs):] for row in red2]
            self._solvers[w] = (rows, piv_rows, inv, idxs)

    def express(self, v: dict) -> dict:
        if not v:
            return {}
        w = self.weights[0]
        # identify weight from any index present
        first = next(iter(v))
        for ww, idxs in self.by_weight.items():
            if any(first in self.vecs[n] for n in idxs):
                w = ww
                break
        rows, piv_rows, inv, idxs = self._solvers[w]
        rhs = [v.get(rows[r], ZERO) for r in piv_rows]
        coords = {}
        for ci in range(len(idxs)):
            s = sum(inv[ci][j] * rhs[j] for j in range(len(rhs)))
            if s:
                coords[idxs[ci]] = s
        # exactness check
        recon: dict[int, Scalar] = {}
        for n, c in coords.items():
            for i, x in self.vecs[n].items():
                recon[i] = recon.get(i, ZERO) + c * x
        for i in set(recon) | set(v):
            if recon.get(i, ZERO) != v.get(i, ZERO):
                raise ArithmeticError("vector does not lie in the invariant subspace")
        return coords


def _block_tensor(b1: Block, b2: Block) -> Block:
    basis = [(i, j) for i in range(b1.dim) for j in range(b2.dim)]
    index = {t: n for n, t in enumerate(basis)}
    labels = [f"{b1.labels[i]}(x){b2.labels[j]}" for i, j in basis]
    weights = [tuple(a + c for a, c in zip(b1.weights[i], b2.weights[j])) for i, j in basis]
    acts = []
    for g in range(len(b1.acts)):
        c1, c2 = b1.acts[g], b2.acts[g]
        newcol: dict[int, dict] = {}
        for n, (i, j) in enumerate(basis):
            acc: dict[int, Scalar] = {}
            for i2, v in c1.get(i, {}).items():
                m = index[(i2, j)]
                acc[m] = acc.get(m, ZERO) + v
            for j2, v in c2.get(j, {}).items():
                m = index[(i, j2)]
                acc[m] = acc.get(m, ZERO) + v
            acc = {m: v for m, v in acc.items() if v}
            if acc:
                newcol[n] = acc
        acts.append(newcol)
    form = None
    parity = None
    if b1.form is not None and b2.form is not None:
        parity = b1.parity * b2.parity
        form = {}
        for (i1, j1), v1 in b1.form.items():
            for (i2, j2), v2 in b2.form.items():
                form[(index[(i1, i2)], index[(j1, j2)])] = v1 * v2
    return Block(len(basis), labels, acts, weights, form, parity)


def _block_sum(blocks: list[Block]) -> Block:
    """Assemble a direct sum into a symplectic block.

    Antisymmetric summands stand alone; symmetric summands must appear as
    identical consecutive twins and are paired off-diagonally; a summand with
    no invariant form must be followed by its dual.
    """
    offs = []
    total = 0
    for b in blocks:
        offs.append(total)
        total += b.dim
    labels = []
    for si, b in enumerate(blocks):
        tag = f"s{si+1}:" if len(blocks) > 1 else ""
        labels.extend(tag + l for l in b.labels)
    weights = [w for b in blocks for w in b.weights]
    acts = []
    for g in range(len(blocks[0].acts)):
        col: dict[int, dict] = {}
        for b, off in zip(blocks, offs):
            for j, entries in b.acts[g].items():
                col[off + j] = {off + i: v for i, v in entries.items()}
        acts.append(col)
    form: dict[tuple, Scalar] = {}
    i = 0
    while i < len(blocks):
        b = blocks[i]
        if b.parity == -1:
            for (a, c), v in b.form.items():
                form[(offs[i] + a, offs[i] + c)] = v
            i += 1
            continue
        if i + 1 >= len(blocks):
            raise ValueError("expression is not symplectic: unpaired summand")
        b2 = blocks[i + 1]
        if b.parity == 1 and b2.parity == 1 and _same_block(b, b2):
            for (a, c), v in b.form.items():
                form[(offs[i] + a, offs[i + 1] + c)] = v
                form[(offs[i + 1] + c, offs[i] + a)] = -v
            i += 2
            continue
        if b.parity is None and _is_dual_pair(b, b2):
            for a in range(b.dim):
                form[(offs[i] + a, offs[i + 1] + a)] = ONE
                form[(offs[i + 1] + a, offs[i] + a)] = -ONE
            i += 2
            continue
        raise ValueError("expression is not symplectic: cannot pair summands")
    return Block(total, labels, acts, weights, form, -1)


def _same_block(b1: Block, b2: Block) -> bool:
    return b1.dim == b2.dim and b1.weights == b2.weights and b1.acts == b2.acts


def _is_dual_pair(b1: Block, b2: Block) -> bool:
    if b1.dim != b2.dim:
        return False
    return all(
        tuple(-c for c in w1) == w2 for w1, w2 in zip(b1.weights, b2.weights)
    )


# --- public module object ----------------------------------------------------


class SympModule:
    """A symplectic module of a Lie algebra with explicit basis data."""

    def __init__(self, g, expr: ModuleExpr, block: Block, summand_of, summand_factors):
        self.g = g
        self.expr = expr
        self.dim = block.dim
        self.labels = block.labels
        self.acts = block.acts
        self.weights = block.weights
        self.omega = block.form
        self.summand_of = summand_of
        self.summand_factors = summand_factors

    # vectors are sparse dicts index -> Scalar
    def apply_gen(self, gi: int, v: dict) -> dict:
        return _apply_col(self.acts[gi], v)

    def apply(self, coeffs, v: dict) -> dict:
        out: dict[int, Scalar] = {}
        for gi, c in enumerate(coeffs):
            if not c:
                continue
            for i, x in _apply_col(self.acts[gi], v).items():
                s = out.get(i, ZERO) + c * x
                if s:
                    out[i] = s
                elif i in out:
                    del out[i]
        return out

    def pair(self, u: dict, v: dict) -> Scalar:
        s = ZERO
        for i, a in u.items():
            for j, c in v.items():
                x = self.omega.get((i, j))
                if x:
                    s = s + a * c * x
        return s

    def moment_value(self, q: dict, t_coeffs) -> Scalar:
        return self.pair(self.apply(t_coeffs, q), q) / 2

    def weight_support(self) -> dict:
        out: dict[tuple, list[int]] = {}
        for n, w in enumerate(self.weights):
            out.setdefault(w, []).append(n)
        return out

    def invariant_subspace_dim(self) -> int:
        rows = []
        for gi in range(self.g.n):
            col = self.acts[gi]
            imgs = sorted({i for entries in col.values() for i in entries})
            for i in imgs:
                rows.append([col.get(j, {}).get(i, ZERO) for j in range(self.dim)])
        if not rows:
            return self.dim
        return self.dim - rank(rows)

    def dense_action(self, gi: int):
        m = [[ZERO] * self.dim for _ in range(self.dim)]
        for j, entries in self.acts[gi].items():
            for i, v in entries.items():
                m[i][j] = v
        return m

    def omega_dense(self):
        m = [[ZERO] * self.dim for _ in range(self.dim)]
        for (i, j), v in self.omega.items():
            m[i][j] = v
        return m

    def check_invariance(self):
        """rho(T)^t omega + omega rho(T) = 0 for every generator, exactly."""
        for gi in range(self.g.n):
            col = self.acts[gi]
            # D[j][l] = omega(T e_j, e_l) + omega(e_j, T e_l) must vanish
            for j in range(self.dim):
                tj = col.get(j, {})
                for l in range(self.dim):
                    s = ZERO
                    for i, v in tj.items():
                        x = self.omega.get((i, l))
                        if x:
                            s += v * x
                    for i, v in col.get(l, {}).items():
                        x = self.omega.get((j, i))
                        if x:
                            s += x * v
                    if s:
                        return False, (gi, j, l)
        return True, None

    def check_representation(self):
        """[rho(T_i), rho(T_j)] = f_ij^k rho(T_k) on every basis vector."""
        for i in range(self.g.n):
            for j in range(i + 1, self.g.n):
                fr = self.g.bracket_coeffs(i, j)
                for b in range(self.dim):
                    v = {b: ONE}
                    lhs1 = self.apply_gen(i, self.apply_gen(j, v))
                    lhs2 = self.apply_gen(j, self.apply_gen(i, v))
                    rhs: dict[int, Scalar] = {}
                    for k, c in fr.items():
                        for idx, x in self.apply_gen(k, v).items():
                            rhs[idx] = rhs.get(idx, ZERO) + c * x
                    keys = set(lhs1) | set(lhs2) | set(rhs)
                    for idx in keys:
                        if lhs1.get(idx, ZERO) - lhs2.get(idx, ZERO) != rhs.get(idx, ZERO):
                            return False, (i, j, b)
        return True, None

    def json(self):
        from .scalars import scalar_to_json

        return {
            "schema": 1,
            "algebra": self.g.name,
            "expr": repr(self.expr),
            "dim": self.dim,
            "weights": [list(w) for w in self.weights],
            "omega": [[i, j, scalar_to_json(v)] for (i, j), v in sorted(self.omega.items())],
        }


def _build_block(g, expr: ModuleExpr) -> Block:
    if expr.op == "taut":
        if expr.factor >= len(g.factors):
            raise ValueError(f"factor F{expr.factor + 1} out of range for {g.name}")
        return _block_taut(g, expr.factor)
    if expr.op == "adj":
        return _block_adj(g)
    if expr.op == "dual":
        return _block_dual(_build_block(g, expr.children[0]))
    if expr.op == "sym":
        return _block_sym(_build_block(g, expr.children[0]), expr.k)
    if expr.op == "ext":
        return _block_ext(_build_block(g, expr.children[0]), expr.k)
    if expr.op == "ext0":
        return _block_ext0(_build_block(g, expr.children[0]), expr.k)
    if expr.op == "tensor":
        blocks = [_build_block(g, c) for c in expr.children]
        out = blocks[0]
        for b in blocks[1:]:
            out = _block_tensor(out, b)
        return out
    raise ValueError(f"unexpected op {expr.op}")


def build_module(g, expr) -> SympModule:
    """Build the symplectic module of g described by expr (tree or string)."""
    if isinstance(expr, str):
        expr = parse_module_expr(expr)
    summands = expr.children if expr.op == "sum" else [expr]
    blocks = [_build_block(g, s) for s in summands]
    top = _block_sum(blocks)
    if top.parity != -1:
        raise ValueError("expression is not symplectic")
    # nondegeneracy: the weight-graded form pairs every basis vector
    paired = {i for (i, j) in top.form}
    if len(paired) != top.dim:
        raise ValueError("expression is not symplectic: degenerate form")
    summand_of = []
    for si, b in enumerate(blocks):
        summand_of.extend([si] * b.dim)
    summand_factors = []
    for si, b in enumerate(blocks):
        factors = set()
        for gi, col in enumerate(b.acts):
            if col:
                factors.add(g.factor_of_gen[gi])
        summand_factors.append(factors)
    return SympModule(g, expr, top, summand_of, summand_factors)
