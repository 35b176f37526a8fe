"""Classification engine: membership checks, J solving, filters, stabilizers.

The pipeline mirrors the way the admissible modules are hunted down:
structural filters, candidate J enumeration from the weight set, index/trace
and spectral filters, then isotropy constraint systems over the eigenspace
family, solved in the run's field tower.
"""

from __future__ import annotations

import itertools
import random
from fractions import Fraction

from .liealg import LieAlgebra, index_from_quadratic_forms, root_value
from .linalg import kernel_basis, rank, smith_normal_form, solve_linear
from .modules import SympModule
from .polysolve import BeyondSolverClass, Poly, dedupe_up_to_scalar, solve_system
from .scalars import DEFAULT_TOL, Scalar, conj, field_of, is_zero, scalars_equal

ZERO = Fraction(0)
ONE = Fraction(1)


class AiryDatum:
    """(algebra, module, Omega) with derived J and the verification record."""

    def __init__(self, g: LieAlgebra, module: SympModule, omega: dict, j_coeffs=None, field="q", case_id=None):
        self.g = g
        self.module = module
        self.omega = dict(omega)
        self.j = list(j_coeffs) if j_coeffs is not None else None
        self.field = field
        self.case_id = case_id
        self._frame = None
        self.record: dict = {}

    def frame(self) -> list[dict]:
        if self._frame is None:
            self._frame = [self.module.apply_gen(i, self.omega) for i in range(self.g.n)]
        return self._frame

    def frame_matrix(self):
        zero = ZERO
        return [[f.get(b, zero) for b in range(self.module.dim)] for f in self.frame()]


# --- J ------------------------------------------------------------------


def solve_J(datum: AiryDatum, tol=DEFAULT_TOL):
    """The unique J with J Omega = Omega, solved over all of g.

    Returns (status, j_full, annihilator_dim): status is "unique", "none" or
    "non-unique"; for "unique" with J in the Cartan, datum.j is filled.
    """
    g, W, om = datum.g, datum.module, datum.omega
    if not om:
        raise ValueError("Omega must be nonzero")
    frame = datum.frame()
    cols = [[frame[k].get(b, ZERO) for k in range(g.n)] for b in range(W.dim)]
    rhs = [om.get(b, ZERO) for b in range(W.dim)]
    res = solve_linear(cols, rhs, tol)
    if res.kind == "none":
        return "none", None, 0
    if res.kind == "parameterized":
        return "non-unique", res.particular, len(res.kernel)
    j_full = res.particular
    on_h = [j_full[i] for i in g.cartan]
    off = [j_full[i] for i in range(g.n) if i not in g.cartan]
    if all(is_zero(x, tol) for x in off):
        datum.j = on_h
    return "unique", j_full, 0


def sigma_s_check(datum: AiryDatum, tol=DEFAULT_TOL):
    """Omega lies in the regular zero locus: frame Lagrangian of rank dim g."""
    g, W = datum.g, datum.module
    frame = datum.frame()
    r = rank(datum.frame_matrix(), tol)
    if r != g.n:
        return False, {"rank": r, "expected": g.n}
    for a in range(g.n):
        for b in range(a + 1, g.n):
            v = W.pair(frame[a], frame[b])
            if not is_zero(v, tol):
                return False, {"nonisotropic_pair": (g.labels[a], g.labels[b]), "value": str(v)}
    return True, {"rank": r}


# --- spectral / index filters -------------------------------------------


def module_spectrum(W: SympModule, j_coeffs) -> list:
    return sorted(
        (sum((Fraction(c) * j for c, j in zip(w, j_coeffs)), start=ZERO) for w in W.weights),
        key=str,
    )


def predicted_spectrum(g: LieAlgebra, j_coeffs) -> list:
    lams = g.ad_eigenvalues_on_cartan(j_coeffs)
    out = [1 + l for l in lams] + [-1 - l for l in lams]
    return sorted(out, key=str)


def spectral_test(g: LieAlgebra, W: SympModule, j_coeffs):
    got = module_spectrum(W, j_coeffs)
    want = predicted_spectrum(g, j_coeffs)
    return got == want, {"module": [str(x) for x in got], "predicted": [str(x) for x in want]}


def module_index(g: LieAlgebra, W: SympModule) -> Fraction:
    """tr_W(TS)/tr_g(ad_T ad_S) for simple g, from exact Gram forms."""
    if len(g.factors) != 1:
        raise ValueError("the index is defined for simple algebras")
    return index_from_quadratic_forms(W.weights, g.roots(), g.rank)


def index_and_trace_filter(g: LieAlgebra, W: SympModule):
    """(ind - 2) tr(ad_J^2) = 2 dim g: excluded when ind <= 2, else the target."""
    ind = module_index(g, W)
    if ind <= 2:
        return {"verdict": "excluded", "index": ind, "reason": "index <= 2"}
    target = 2 * Fraction(g.n) / (ind - 2)
    return {"verdict": "candidates", "index": ind, "required_trace": target}


def trace_of_candidate(g: LieAlgebra, j_coeffs) -> Scalar:
    return sum((x * x for x in g.ad_eigenvalues_on_cartan(j_coeffs)), start=ZERO)


# --- candidate enumeration ------------------------------------------------


def positive_roots(g: LieAlgebra) -> list[tuple]:
    out = []
    for r in set(g.roots()):
        for c in r:
            if c > 0:
                out.append(r)
                break
            if c < 0:
                break
    return sorted(out)


def dominant_representative(g: LieAlgebra, j_coeffs) -> tuple:
    """Map J into the fundamental chamber with the Weyl group, factorwise."""
    out = []
    off = 0
    for (fam, size), rk in zip(g.factors, g.factor_ranks):
        block = [Fraction(x) for x in j_coeffs[off : off + rk]]
        if fam == "sl":
            block = [abs(block[0])]
        else:  # sp: signed permutations
            block = sorted((abs(x) for x in block), reverse=True)
        out.extend(block)
        off += rk
    return tuple(out)


def candidate_js(g: LieAlgebra, W: SympModule, cap: int = 10**6) -> list[tuple]:
    """Dominant rational J's allowed by the weight-set constraints.

    Enumerates rank-size subsets of the distinct weights, solves the affine
    system mu(J) = 1, then filters: the full hyperplane section must span the
    dual Cartan, J must be dominant, and every root must move some section
    weight to another weight of W.
    """
    rankg = g.rank
    distinct = sorted(set(W.weights))
    weight_set = set(W.weights)
    from math import comb

    if comb(len(distinct), rankg) > cap:
        raise OverflowError("weight-subset enumeration exceeds the configured cap")
    found: dict[tuple, tuple] = {}
    roots = sorted(set(g.roots()))
    for subset in itertools.combinations(distinct, rankg):
        mat = [[Fraction(c) for c in mu] for mu in subset]
        res = solve_linear(mat, [ONE] * rankg)
        if res.kind != "unique":
            continue
        j = tuple(res.particular)
        if j != dominant_representative(g, j):
            continue  # the dominant Weyl image arises from another subset
        if j in found:
            continue
        xi = [mu for mu in distinct if sum((Fraction(c) * x for c, x in zip(mu, j)), start=ZERO) == 1]
        if rank([[Fraction(c) for c in mu] for mu in xi]) != rankg:
            continue
        ok = True
        for alpha in roots:
            if not any(tuple(m + a for m, a in zip(mu, alpha)) in weight_set for mu in xi):
                ok = False
                break
        if ok:
            found[j] = j
    return sorted(found.values())


# --- isotropy constraint systems ------------------------------------------


class ConstraintSystem:
    """Polynomial equations cutting out the isotropic locus of a family."""

    def __init__(self, params: tuple, eqs: list[Poly], provenance: list):
        self.params = params
        self.eqs = eqs
        self.provenance = provenance

    def solve(self, field="q"):
        return solve_system(self.eqs, field)

    def json(self):
        return {
            "schema": 1,
            "params": list(self.params),
            "equations": [str(e) for e in self.eqs],
            "provenance": [list(p) for p in self.provenance],
        }


def eigenspace_family(W: SympModule, j_coeffs):
    """Basis indices of the mu(J) = 1 eigenspace, with one parameter each."""
    idxs = [
        b
        for b, w in enumerate(W.weights)
        if sum((Fraction(c) * j for c, j in zip(w, j_coeffs)), start=ZERO) == 1
    ]
    params = tuple(f"c{k+1}" for k in range(len(idxs)))
    return idxs, params


def isotropy_constraints(g: LieAlgebra, W: SympModule, j_coeffs, family=None, normalization=None):
    """All omega(T_a Omega, T_b Omega) = 0 over the parameterized family.

    ``family`` is a list of (basis index, parameter name); by default the full
    mu(J) = 1 eigenspace with one parameter per basis vector.  Equations are
    deduplicated up to scalar multiples; provenance records the generator pair
    each one came from.  ``normalization`` maps parameter names to Poly-able
    substitutions applied before returning.
    """
    if family is None:
        idxs, params = eigenspace_family(W, j_coeffs)
        family = list(zip(idxs, params))
    else:
        params = tuple(p for _, p in family)
    om = {}
    for b, p in family:
        om[b] = om.get(b, Poly(params, {})) + Poly.var(params, p)

    def apply_poly(gi, vec):
        out = {}
        for j, p in vec.items():
            for i, a in W.acts[gi].get(j, {}).items():
                out[i] = out.get(i, Poly(params, {})) + p * a
        return {i: p for i, p in out.items() if not p.is_zero()}

    frame = [apply_poly(k, om) for k in range(g.n)]
    eqs, prov = [], []
    annihilators = [g.labels[k] for k in range(g.n) if not frame[k]]
    for a in range(g.n):
        for b in range(a + 1, g.n):
            s = Poly(params, {})
            for i, pa in frame[a].items():
                for j, pb in frame[b].items():
                    x = W.omega.get((i, j))
                    if x:
                        s = s + pa * pb * x
            if not s.is_zero():
                eqs.append(s)
                prov.append((g.labels[a], g.labels[b]))
    keep = dedupe_up_to_scalar(eqs)
    keep_keys = {id(e) for e in keep}
    prov = [p for e, p in zip(eqs, prov) if id(e) in keep_keys]
    cs = ConstraintSystem(params, keep, prov)
    cs.annihilators = annihilators
    if normalization:
        cs = apply_normalization(cs, normalization)
    return cs


def apply_normalization(cs: ConstraintSystem, normalization: dict) -> ConstraintSystem:
    """Substitute recorded normalizations (param -> Poly over the others)."""
    eqs = [e.copy() for e in cs.eqs]
    extra = []
    for name, value in normalization.items():
        i = list(cs.params).index(name)
        vp = value if isinstance(value, Poly) else Poly.constant(cs.params, Fraction(value))
        eqs = [e.substitute(i, vp) for e in eqs]
        extra.append(Poly.var(cs.params, name) - vp)
    out = ConstraintSystem(cs.params, [e for e in eqs if not e.is_zero()] + extra, cs.provenance)
    out.annihilators = getattr(cs, "annihilators", [])
    return out


# --- stabilizers -----------------------------------------------------------


class StabilizerResult:
    def __init__(self, order, generators, divisors, torus_only=False):
        self.order = order
        self.generators = generators  # list of (order, exponent vector of Fractions)
        self.divisors = divisors
        self.torus_only = torus_only

    def json(self):
        return {
            "order": self.order,
            "generators": [
                {"order": o, "exponents": [str(x) for x in v]} for o, v in self.generators
            ],
            "elementary_divisors": self.divisors,
            "torus_part_only": self.torus_only,
        }


def torus_stabilizer(datum: AiryDatum) -> StabilizerResult:
    """Diagonal-torus stabilizer of Omega via Smith normal form.

    Each support weight mu imposes the character equation z^mu = 1; the
    solution group is the torsion of the cokernel of the weight lattice.  When
    J is regular the whole stabilizer is contained in the torus; otherwise the
    result is flagged as the torus part only.
    """
    g, W = datum.g, datum.module
    support = sorted({W.weights[b] for b in datum.omega})
    a = [[int(c) for c in mu] for mu in support]
    if rank([[Fraction(c) for c in row] for row in a]) != g.rank:
        raise ValueError("support weights do not span: stabilizer is infinite")
    # Z^r / (columns of A^T): Smith of the transpose
    at = [list(col) for col in zip(*a)]
    d, u, v = smith_normal_form(at)
    divisors = [d[i][i] for i in range(min(len(d), len(d[0]) if d else 0))]
    divisors = [x for x in divisors if x != 0]
    # u * at * v = d; generators come from rows of u and the divisors
    gens = []
    order = 1
    for i, di in enumerate(divisors):
        order *= di
        if di > 1:
            y = [Fraction(u[i][k], di) for k in range(g.rank)]
            # order of exp(2 pi i y . H): lcm of denominators after mod 1
            from math import lcm

            o = 1
            for x in y:
                o = lcm(o, (x % 1).denominator)
            gens.append((o, y))
    # exactness: every support weight must pair integrally with each generator
    for o, y in gens:
        for mu in support:
            val = sum(Fraction(c) * x for c, x in zip(mu, y))
            if val.denominator != 1:
                raise ArithmeticError("stabilizer generator does not fix Omega")
    torus_only = True
    if datum.j is not None:
        regular, _ = datum.g.regularity_check(datum.j)
        torus_only = not regular
    return StabilizerResult(order, gens, divisors, torus_only)


# --- structural filters ------------------------------------------------------


def associated_graph(g: LieAlgebra, W: SympModule):
    """Factor graph: edge when a summand carries both factors' actions."""
    k = len(g.factors)
    edges = set()
    for factors in W.summand_factors:
        fs = sorted(factors)
        for a in range(len(fs)):
            for b in range(a + 1, len(fs)):
                edges.add((fs[a], fs[b]))
    seen = {0}
    frontier = [0]
    while frontier:
        x = frontier.pop()
        for (a, b) in edges:
            for y in ((b,) if a == x else (a,) if b == x else ()):
                if y not in seen:
                    seen.add(y)
                    frontier.append(y)
    connected = len(seen) == k
    return {"vertices": k, "edges": sorted(edges), "connected": connected}


def adjoint_weight_multiset(g: LieAlgebra) -> list:
    ws = [r for r in g.root_of if r is not None]
    ws += [tuple([0] * g.rank)] * g.rank
    return sorted(ws)


class _IncrementalSpan:
    """Row space maintained in echelon form over an exact field."""

    def __init__(self, dim):
        self.dim = dim
        self.rows: dict[int, dict] = {}  # pivot column -> reduced sparse row

    def add(self, vec: dict) -> bool:
        v = dict(vec)
        while v:
            p = min(v)
            if p not in self.rows:
                lead = v[p]
                self.rows[p] = {k: x / lead for k, x in v.items()}
                return True
            row = self.rows[p]
            c = v[p]
            for k, x in row.items():
                s = v.get(k, ZERO) - c * x
                if is_zero(s):
                    v.pop(k, None)
                else:
                    v[k] = s
        return False

    def dim_span(self) -> int:
        return len(self.rows)


def cyclic_span_dim(datum: AiryDatum) -> int:
    """Dimension of the submodule generated by Omega."""
    W, g = datum.module, datum.g
    span = _IncrementalSpan(W.dim)
    span.add(datum.omega)
    frontier = [datum.omega]
    while frontier and span.dim_span() < W.dim:
        new_frontier = []
        for v in frontier:
            for gi in range(g.n):
                img = W.apply_gen(gi, v)
                if img and span.add(img):
                    new_frontier.append(img)
        frontier = new_frontier
    return span.dim_span()


def admissible_weight_catalog(fam, size):
    """Weight multisets of the admissible modules for each simple algebra."""
    from .liealg import build_algebra
    from .modules import build_module

    out = []
    if (fam, size) == ("sl", 2):
        exprs = ["F(+)Sym3(F)", "Sym5(F)"]
    elif (fam, size) == ("sp", 4):
        exprs = ["F(x)Ext0_2(F)"]
    elif (fam, size) == ("sp", 10):
        exprs = ["Ext0_3(F)"]
    else:
        return []
    g = build_algebra(f"{fam}{size}")
    for e in exprs:
        out.append(sorted(build_module(g, e).weights))
    return out


def structural_filters(g: LieAlgebra, W: SympModule, omega=None):
    """H^0 test, g (+) g test, cyclic-span test, per-factor restriction test."""
    verdicts = []
    h0 = W.invariant_subspace_dim()
    verdicts.append({"check": "trivial_invariants", "pass": h0 == 0, "h0_dim": h0})
    gg = sorted(W.weights) == sorted(adjoint_weight_multiset(g) * 2)
    verdicts.append({"check": "not_adjoint_square", "pass": not gg})
    if omega is not None:
        datum = AiryDatum(g, W, omega)
        cd = cyclic_span_dim(datum)
        verdicts.append({"check": "cyclic_span_exceeds_dim", "pass": cd > g.n, "span_dim": cd})
    if len(g.factors) > 1:
        for k, (fam, size) in enumerate(g.factors):
            gens = [gi for gi in range(g.n) if g.factor_of_gen[gi] == k]
            rows = []
            for gi in gens:
                col = W.acts[gi]
                imgs = sorted({i for entries in col.values() for i in entries})
                for i in imgs:
                    rows.append([col.get(j, {}).get(i, ZERO) for j in range(W.dim)])
            h0_dim = W.dim - (rank(rows) if rows else 0)
            wdim = W.dim - h0_dim
            factor_dim = {"sl": size * size - 1, "sp": size * (size + 1) // 2}[fam]
            if wdim == 2 * factor_dim:
                # restriction saturates: (g', W') must itself be admissible
                rank_off = sum(g.factor_ranks[:k])
                rk = g.factor_ranks[k]
                # W' = orthocomplement of the invariants: weight multiset of the
                # factor-nontrivial part
                wts = []
                for b, w in enumerate(W.weights):
                    sub = tuple(w[rank_off : rank_off + rk])
                    wts.append(sub)
                nontriv = sorted(w for w in wts if any(w))
                # pad: W' also includes zero-weight vectors outside H^0; compare
                # only against catalog multisets restricted the same way
                catalog = admissible_weight_catalog(fam, size)
                match = any(sorted(m) == sorted(nontriv + [tuple([0] * rk)] * (wdim - len(nontriv))) for m in catalog)
                verdicts.append(
                    {
                        "check": f"factor_{k+1}_restriction",
                        "pass": match,
                        "factor": f"{fam}{size}",
                        "w_prime_dim": wdim,
                    }
                )
    return verdicts


# --- nonadmissibility witness -------------------------------------------------


def nonadmissibility_witness(g: LieAlgebra, W: SympModule, j_coeffs, seed: int = 20240601, samples: int = 20):
    """Random-sampling rank witness on the mu(J) = 1 eigenspace.

    Reports the maximal frame rank over the samples plus an independent
    confirmation draw; a witness means rank < dim g everywhere, backed by the
    exact list of generators annihilating the whole eigenspace.
    """
    idxs, _ = eigenspace_family(W, j_coeffs)
    rnd = random.Random(seed)
    best = 0
    for _ in range(samples):
        om = {b: Fraction(rnd.randint(-10, 10)) for b in idxs}
        if not any(om.values()):
            continue
        frame = [W.apply_gen(k, om) for k in range(g.n)]
        rows = [[f.get(b, ZERO) for b in range(W.dim)] for f in frame]
        best = max(best, rank(rows))
        if best == g.n:
            break
    rnd2 = random.Random(seed + 1)
    om2 = {b: Fraction(rnd2.randint(-10, 10)) for b in idxs}
    frame2 = [W.apply_gen(k, om2) for k in range(g.n)]
    confirm = rank([[f.get(b, ZERO) for b in range(W.dim)] for f in frame2])
    annihilators = []
    for k in range(g.n):
        if all(not W.apply_gen(k, {b: ONE}) for b in idxs):
            annihilators.append(g.labels[k])
    if best < g.n:
        return {
            "witness": True,
            "max_rank": max(best, confirm),
            "needed": g.n,
            "seed": seed,
            "samples": samples,
            "annihilating_generators": annihilators,
        }
    return None


# --- real structure -------------------------------------------------------


def real_structure_check(datum: AiryDatum, others: list[AiryDatum] | None = None, tol=DEFAULT_TOL):
    """Conjugate Omega coefficientwise and compare against the catalog."""
    conj_om = {b: conj(v) for b, v in datum.omega.items()}

    def same(a, b):
        keys = set(a) | set(b)
        return all(scalars_equal(a.get(k, ZERO), b.get(k, ZERO), tol) for k in keys)

    if same(conj_om, datum.omega):
        return {"verdict": "fixed"}
    for other in others or []:
        if other is datum:
            continue
        if same(conj_om, other.omega):
            return {"verdict": "maps-to", "case": other.case_id}
    return {"verdict": "neither"}


# --- classify pipeline ---------------------------------------------------


def classify(g: LieAlgebra, W: SympModule, field: str = "q", normalizations: dict | None = None, seed: int = 20240601):
    """Full pipeline: structural -> candidates -> trace -> spectral -> solve.

    Returns a staged report dict.  ``normalizations`` optionally maps a J
    tuple (stringified) to a recorded normalization for the solver.
    """
    report: dict = {"algebra": g.name, "module": repr(W.expr), "stages": []}
    if W.dim != 2 * g.n:
        raise ValueError(f"module dimension {W.dim} != 2 dim g = {2 * g.n}")
    sf = structural_filters(g, W)
    report["stages"].append({"stage": "structural", "verdicts": sf})
    if not all(v["pass"] for v in sf):
        report["result"] = {"verdict": "excluded", "stage": "structural"}
        return report

    cands = candidate_js(g, W)
    report["stages"].append({"stage": "candidates", "js": [[str(x) for x in j] for j in cands]})
    if not cands:
        report["result"] = {"verdict": "excluded", "stage": "candidates"}
        return report

    survivors = list(cands)
    if len(g.factors) == 1:
        itf = index_and_trace_filter(g, W)
        stage = {"stage": "trace", "index": str(itf["index"])}
        if itf["verdict"] == "excluded":
            stage["excluded_by_index"] = True
            report["stages"].append(stage)
            report["result"] = {"verdict": "excluded", "stage": "trace", "index": str(itf["index"])}
            return report
        required = itf["required_trace"]
        stage["required_trace"] = str(required)
        kept = []
        traced = []
        for j in survivors:
            tr = trace_of_candidate(g, j)
            traced.append({"j": [str(x) for x in j], "trace": str(tr), "pass": tr == required})
            if tr == required:
                kept.append(j)
        stage["candidates"] = traced
        report["stages"].append(stage)
        survivors = kept
        if not survivors:
            report["result"] = {
                "verdict": "excluded",
                "stage": "trace",
                "required_trace": str(required),
            }
            return report

    kept = []
    spect = []
    for j in survivors:
        ok, detail = spectral_test(g, W, j)
        spect.append({"j": [str(x) for x in j], "pass": ok})
        if ok:
            kept.append(j)
    report["stages"].append({"stage": "spectral", "candidates": spect})
    survivors = kept
    if not survivors:
        report["result"] = {"verdict": "excluded", "stage": "spectral"}
        return report

    solutions = []
    constraint_stage = []
    for j in survivors:
        jkey = ",".join(str(x) for x in j)
        wit = nonadmissibility_witness(g, W, j, seed=seed)
        entry = {"j": [str(x) for x in j]}
        if wit:
            entry["witness"] = wit
            constraint_stage.append(entry)
            continue
        idxs, params = eigenspace_family(W, j)
        norm = (normalizations or {}).get(jkey)
        sols, info = solve_family(g, W, j, norm, field)
        entry.update(info)
        good = []
        for assign in sols:
            om = build_family_point(W, j, assign)
            datum = AiryDatum(g, W, om, j_coeffs=list(j), field=field)
            ok, det = sigma_s_check(datum)
            if ok:
                good.append({"assignment": {k: str(v) for k, v in assign.items()}, "omega": omega_json(datum)})
                solutions.append(datum)
        entry["admissible_points"] = good
        constraint_stage.append(entry)
    report["stages"].append({"stage": "constraints", "candidates": constraint_stage})
    if solutions:
        report["result"] = {"verdict": "admissible", "count": len(solutions)}
    else:
        report["result"] = {"verdict": "excluded", "stage": "constraints"}
    return report


def solve_family(g, W, j, normalization, field):
    """Solve the isotropy system over the eigenspace family.

    With a recorded normalization the system is solved once; otherwise simple
    branch normalizations (one parameter pinned to 1 per weight-space scale)
    are attempted.  Returns (solutions, info dict).
    """
    idxs, params = eigenspace_family(W, j)
    family = list(zip(idxs, params))
    cs = isotropy_constraints(g, W, j, family)
    info = {"constraints": [str(e) for e in cs.eqs], "params": list(params)}
    if normalization is not None:
        csn = apply_normalization(cs, normalization(params) if callable(normalization) else normalization)
        info["normalized_constraints"] = [str(e) for e in csn.eqs]
        try:
            sols = csn.solve(field)
            info["normalization"] = "recorded"
            return sols, info
        except BeyondSolverClass as e:
            info["solver"] = f"beyond solver class: {e}"
            return [], info
    # branch normalizations: pin each parameter to 1 in turn, zero preceding
    sols = []
    seen = set()
    for k in range(len(params)):
        norm = {params[i]: Fraction(0) for i in range(k)}
        norm[params[k]] = Fraction(1)
        csn = apply_normalization(cs, norm)
        try:
            for s in csn.solve(field):
                key = tuple(sorted((p, str(v)) for p, v in s.items()))
                if key not in seen:
                    seen.add(key)
                    sols.append(s)
        except BeyondSolverClass as e:
            info.setdefault("solver_branches", []).append(f"{params[k]}=1: beyond solver class: {e}")
    info["normalization"] = "branch"
    return sols, info


def build_family_point(W, j, assignment: dict) -> dict:
    idxs, params = eigenspace_family(W, j)
    om = {}
    for b, p in zip(idxs, params):
        v = assignment.get(p, ZERO)
        if not is_zero(v):
            om[b] = v
    return om


def omega_json(datum: AiryDatum):
    from .scalars import scalar_to_json

    return [[datum.module.labels[b], scalar_to_json(v)] for b, v in sorted(datum.omega.items())]


# --- full verification suite ----------------------------------------------


def verify_datum(datum: AiryDatum, expected: dict | None = None, others=None, tol=DEFAULT_TOL):
    """Run every check on a datum and assemble the verification record."""
    g, W = datum.g, datum.module
    expected = expected or {}
    rec: dict = {"schema": 1, "case": datum.case_id, "algebra": g.name, "checks": []}

    def check(name, ok, **payload):
        rec["checks"].append({"check": name, "pass": bool(ok), **payload})
        return ok

    status, j_full, ann = solve_J(datum, tol)
    jexp = expected.get("j")
    ok_j = status == "unique" and datum.j is not None
    if ok_j and jexp is not None:
        ok_j = all(scalars_equal(a, Fraction(b), tol) for a, b in zip(datum.j, jexp))
    check("solve_J", ok_j, status=status, j=[str(x) for x in (datum.j or [])])

    ok_s, det = sigma_s_check(datum, tol)
    check("lagrangian_frame", ok_s, **det)

    if datum.j is not None:
        ok_sp, _ = spectral_test(g, W, datum.j)
        check("spectral", ok_sp)
        regular, bad = g.regularity_check(datum.j)
        check("regularity", regular if expected.get("regular", True) else not regular, regular=regular,
              vanishing_roots=[list(r) for r in bad])
        if len(g.factors) == 1:
            ind = module_index(g, W)
            tr = trace_of_candidate(g, datum.j)
            ok_tr = (ind - 2) * tr == 2 * Fraction(g.n)
            check("trace_formula", ok_tr, index=str(ind), trace=str(tr))
        stab = torus_stabilizer(datum)
        ok_st = True
        if "stabilizer_order" in expected:
            ok_st = stab.order == expected["stabilizer_order"]
        check("stabilizer", ok_st, **stab.json())
        rec["stabilizer"] = stab.json()
    cd = cyclic_span_dim(datum)
    check("cyclic_span_exceeds_dim", cd > g.n, span_dim=cd)
    rs = real_structure_check(datum, others, tol)
    ok_rs = True
    if "real_structure" in expected:
        ok_rs = rs["verdict"] == expected["real_structure"]
    check("real_structure", ok_rs, **rs)
    if len(g.factors) > 1:
        gr = associated_graph(g, W)
        check("associated_graph_connected", gr["connected"] == expected.get("connected", True), **gr)
    rec["pass"] = all(c["pass"] for c in rec["checks"])
    datum.record = rec
    return rec
