"""Sparse multivariate polynomials and a restricted elimination solver.

The solver class is deliberately small: it repeatedly eliminates variables
that appear linearly with a constant coefficient, then finishes on a single
univariate polynomial of degree at most two, taking square roots inside the
run's field tower.  Anything outside that class raises BeyondSolverClass --
the solver never returns a wrong answer.
"""

from __future__ import annotations

import itertools
from fractions import Fraction

from .scalars import Scalar, field_of, is_zero, join_fields, sqrt_in_field, to_field

ZERO = Fraction(0)
ONE = Fraction(1)


class BeyondSolverClass(Exception):
    """Constraint system outside the supported elimination class."""


class Poly:
    """Sparse polynomial: dict[exponent tuple] -> Scalar, fixed variable list."""

    __slots__ = ("vars", "terms")

    def __init__(self, variables, terms=None):
        self.vars = tuple(variables)
        self.terms: dict[tuple, Scalar] = {}
        if terms:
            for e, c in terms.items():
                if not is_zero(c):
                    self.terms[tuple(e)] = c

    @classmethod
    def constant(cls, variables, c) -> "Poly":
        return cls(variables, {tuple([0] * len(variables)): c})

    @classmethod
    def var(cls, variables, name) -> "Poly":
        e = [0] * len(variables)
        e[list(variables).index(name)] = 1
        return cls(variables, {tuple(e): ONE})

    def is_zero(self) -> bool:
        return not self.terms

    def degree(self) -> int:
        return max((sum(e) for e in self.terms), default=0)

    def degree_in(self, i: int) -> int:
        return max((e[i] for e in self.terms), default=0)

    def copy(self) -> "Poly":
        return Poly(self.vars, dict(self.terms))

    def __add__(self, other):
        if not isinstance(other, Poly):
            other = Poly.constant(self.vars, other if not isinstance(other, int) else Fraction(other))
        out = dict(self.terms)
        for e, c in other.terms.items():
            s = out.get(e, ZERO) + c
            if is_zero(s):
                out.pop(e, None)
            else:
                out[e] = s
        return Poly(self.vars, out)

    def __neg__(self):
        return Poly(self.vars, {e: -c for e, c in self.terms.items()})

    def __sub__(self, other):
        if not isinstance(other, Poly):
            other = Poly.constant(self.vars, other if not isinstance(other, int) else Fraction(other))
        return self + (-other)

    def __mul__(self, other):
        if not isinstance(other, Poly):
            out = {e: c * (Fraction(other) if isinstance(other, int) else other) for e, c in self.terms.items()}
            return Poly(self.vars, out)
        out: dict[tuple, Scalar] = {}
        for e1, c1 in self.terms.items():
            for e2, c2 in other.terms.items():
                e = tuple(a + b for a, b in zip(e1, e2))
                s = out.get(e, ZERO) + c1 * c2
                if is_zero(s):
                    out.pop(e, None)
                else:
                    out[e] = s
        return Poly(self.vars, out)

    __rmul__ = __mul__

    def substitute(self, i: int, value: "Poly") -> "Poly":
        """Replace variable i by a polynomial (in the same variable list)."""
        out = Poly(self.vars, {})
        for e, c in self.terms.items():
            term = Poly.constant(self.vars, c)
            for j, k in enumerate(e):
                if j == i:
                    for _ in range(k):
                        term = term * value
                elif k:
                    e2 = [0] * len(self.vars)
                    e2[j] = k
                    term = term * Poly(self.vars, {tuple(e2): ONE})
            out = out + term
        return out

    def eval(self, assignment: dict) -> Scalar:
        vals = [assignment[v] for v in self.vars]
        s = ZERO
        for e, c in self.terms.items():
            p = c
            for v, k in zip(vals, e):
                for _ in range(k):
                    p = p * v
            s = s + p
        return s

    def content_normalized(self) -> "Poly":
        """Scale so the lexicographically leading term has coefficient 1."""
        if not self.terms:
            return self
        lead = max(self.terms)
        c = self.terms[lead]
        return Poly(self.vars, {e: v / c for e, v in self.terms.items()})

    def linear_in(self, i: int):
        """(coeff, rest) when the polynomial is a*x_i + rest with constant a
        and rest free of x_i; None otherwise."""
        coeff = None
        rest = {}
        for e, c in self.terms.items():
            if e[i] == 0:
                rest[e] = c
            elif e[i] == 1 and all(k == 0 for j, k in enumerate(e) if j != i):
                coeff = c
            else:
                return None
        if coeff is None or is_zero(coeff):
            return None
        return coeff, Poly(self.vars, rest)

    def univariate(self):
        """(var index, coefficient list low->high) when only one variable occurs."""
        used = {j for e in self.terms for j, k in enumerate(e) if k}
        if len(used) > 1:
            return None
        i = used.pop() if used else 0
        deg = self.degree_in(i)
        coeffs = [ZERO] * (deg + 1)
        for e, c in self.terms.items():
            coeffs[e[i]] = c
        return i, coeffs

    def __str__(self):
        if not self.terms:
            return "0"
        parts = []
        for e in sorted(self.terms, reverse=True):
            c = self.terms[e]
            mono = "*".join(
                f"{v}^{k}" if k > 1 else v for v, k in zip(self.vars, e) if k
            )
            parts.append(f"({c})" + (f"*{mono}" if mono else ""))
        return " + ".join(parts)

    def __repr__(self):
        return f"Poly({self})"


def dedupe_up_to_scalar(polys: list[Poly]) -> list[Poly]:
    seen = {}
    out = []
    for p in polys:
        if p.is_zero():
            continue
        key = tuple(sorted(p.content_normalized().terms.items(), key=lambda kv: kv[0]))
        key = tuple((e, str(c)) for e, c in key)
        if key not in seen:
            seen[key] = True
            out.append(p)
    return out


def _solve_univariate(coeffs, field: str):
    """All roots of a degree <= 2 polynomial inside the given field."""
    while coeffs and is_zero(coeffs[-1]):
        coeffs = coeffs[:-1]
    if not coeffs:
        raise BeyondSolverClass("identically zero equation reached the univariate stage")
    deg = len(coeffs) - 1
    if deg == 0:
        return []  # nonzero constant: no solutions
    if deg == 1:
        return [-coeffs[0] / coeffs[1]]
    if deg == 2:
        c, b, a = coeffs
        disc = b * b - 4 * a * c
        r = sqrt_in_field(disc, field)
        if r is None:
            return []
        roots = [(-b + r) / (2 * a), (-b - r) / (2 * a)]
        if is_zero(r):
            roots = roots[:1]
        return roots
    raise BeyondSolverClass(f"univariate degree {deg} > 2")


def solve_system(polys: list[Poly], field: str = "q"):
    """Solve by linear elimination plus one final quadratic.

    Returns a list of full assignments (dict variable name -> Scalar).  Free
    variables surviving with no constraints are not allowed here: the caller
    must have normalized them away.  Raises BeyondSolverClass when elimination
    gets stuck.
    """
    if not polys:
        return [{}]
    variables = polys[0].vars
    eqs = [p.copy() for p in polys if not p.is_zero()]
    subs: dict[int, Poly] = {}
    order: list[int] = []

    progress = True
    while progress:
        progress = False
        for ei, p in enumerate(eqs):
            for i in range(len(variables)):
                if i in subs:
                    continue
                lin = p.linear_in(i)
                if lin is None:
                    continue
                coeff, rest = lin
                value = rest * (-1 / (ONE * coeff) if not isinstance(coeff, Fraction) else Fraction(-1) / coeff)
                subs[i] = value
                order.append(i)
                eqs = [q.substitute(i, value) for qi, q in enumerate(eqs) if qi != ei]
                eqs = [q for q in eqs if not q.is_zero()]
                progress = True
                break
            if progress:
                break

    solved_vars = set(subs)
    remaining_vars = {
        j for q in eqs for e in q.terms for j, k in enumerate(e) if k
    }
    if not eqs:
        if len(solved_vars) != len(variables):
            raise BeyondSolverClass("underdetermined system: free parameters remain")
        roots_assignments = [{}]
    elif not remaining_vars:
        # remaining equations are nonzero constants: inconsistent system
        return []
    else:
        if len(remaining_vars) != 1:
            raise BeyondSolverClass(
                f"elimination stalled with {len(eqs)} equations in {len(remaining_vars)} variables"
            )
        i = remaining_vars.pop()
        if len(solved_vars) + 1 != len(variables):
            raise BeyondSolverClass("underdetermined system: free parameters remain")
        uni = eqs[0].univariate()
        roots = _solve_univariate(uni[1], field)
        # every other remaining equation must agree
        sols = []
        for r in roots:
            if all(is_zero(_eval_univariate(q, i, r)) for q in eqs[1:]):
                sols.append(r)
        roots_assignments = [{variables[i]: r} for r in sols]

    out = []
    for base in roots_assignments:
        assign = {v: None for v in variables}
        assign.update(base)
        for i in reversed(order):
            val = subs[i].eval({v: (assign[v] if assign[v] is not None else ZERO) for v in variables})
            assign[variables[i]] = val
        if any(v is None for v in assign.values()):
            raise BeyondSolverClass("internal: unresolved variable")
        assign = {k: to_field(v, field) if field != "c64" and field_of(v) == "q" else v for k, v in assign.items()}
        # verify on the original system
        for p in polys:
            if not is_zero(p.eval(assign)):
                raise ArithmeticError("candidate solution fails the original system")
        out.append(assign)
    return out


def _eval_univariate(q: Poly, i: int, r) -> Scalar:
    assign = {v: (r if j == i else ZERO) for j, v in enumerate(q.vars)}
    return q.eval(assign)
