"""Finite graded commutative DG algebras with operators.

Elements are sparse vectors ``{basis index: Fraction}``; operators are
column-major sparse matrices with a declared degree.  Every check walks
basis tuples with exact arithmetic and returns a :class:`CheckReport`.
"""
from __future__ import annotations

import itertools
import math
import re
from dataclasses import dataclass, field
from fractions import Fraction

from .kernel import as_rational, koszul_sign, shuffles
from .linalg import mat_add, mat_apply, mat_identity, mat_mul, mat_scale, vec_add, vec_scale
from .report import CheckReport

MAX_Z_ORDER = 12


class AlgebraError(ValueError):
    """Malformed algebra data or a violated precondition."""


class FiniteGcda:
    def __init__(self, labels, degrees, product: dict, d: dict | None = None):
        if len(labels) != len(degrees) or len(set(labels)) != len(labels):
            raise AlgebraError("labels must be distinct and match the degrees")
        self.labels = list(labels)
        self.degrees = [int(x) for x in degrees]
        self.product = {k: {i: as_rational(c) for i, c in v.items() if c} for k, v in product.items()}
        self.product = {k: v for k, v in self.product.items() if v}
        self.d = Operator({j: {i: as_rational(c) for i, c in col.items() if c} for j, col in (d or {}).items()}, 1, "d")
        self._index = {lab: k for k, lab in enumerate(self.labels)}
        self._many: dict = {}

    @property
    def dim(self) -> int:
        return len(self.labels)

    def index(self, label: str) -> int:
        try:
            return self._index[label]
        except KeyError:
            raise AlgebraError(f"unknown basis element {label!r}") from None

    def basis_vector(self, k: int) -> dict:
        return {k: Fraction(1)}

    def mul_basis(self, a: int, b: int) -> dict:
        return self.product.get((a, b), {})

    def mul(self, u: dict, v: dict) -> dict:
        out: dict = {}
        for a, x in u.items():
            for b, y in v.items():
                prod = self.product.get((a, b))
                if prod:
                    out = vec_add(out, prod, x * y)
        return out

    def mul_many(self, idx: tuple) -> dict:
        """Product of basis elements, left to right."""
        cached = self._many.get(idx)
        if cached is None:
            cached = self.basis_vector(idx[0])
            for k in idx[1:]:
                cached = self.mul(cached, self.basis_vector(k))
            self._many[idx] = cached
        return cached

    def degree_of(self, v: dict) -> int | None:
        degs = {self.degrees[k] for k in v}
        return degs.pop() if len(degs) == 1 else None

    def format(self, v: dict) -> str:
        if not v:
            return "0"
        parts = []
        for k in sorted(v):
            c = v[k]
            coef = "" if c == 1 else "-" if c == -1 else f"{c}*"
            parts.append(f"{coef}{self.labels[k]}")
        return " + ".join(parts).replace("+ -", "- ")

    def problems(self) -> list[str]:
        """Graded commutativity, associativity, degrees, d^2 = 0 and Leibniz."""
        out = []
        n, deg = self.dim, self.degrees
        for (a, b), v in self.product.items():
            for c in v:
                if deg[c] != deg[a] + deg[b]:
                    out.append(f"product {self.labels[a]}*{self.labels[b]} is not homogeneous")
        for a in range(n):
            for b in range(a, n):
                sign = -1 if deg[a] * deg[b] % 2 else 1
                if vec_add(self.mul_basis(a, b), self.mul_basis(b, a), -sign):
                    out.append(f"{self.labels[a]}*{self.labels[b]} != (-1)^(|a||b|) {self.labels[b]}*{self.labels[a]}")
        for a, b, c in itertools.product(range(n), repeat=3):
            left = self.mul(self.mul_basis(a, b), self.basis_vector(c))
            right = self.mul(self.basis_vector(a), self.mul_basis(b, c))
            if vec_add(left, right, -1):
                out.append(f"product not associative on ({self.labels[a]}, {self.labels[b]}, {self.labels[c]})")
        out += [f"d: {p}" for p in self.d.problems(self)]
        if not self.d.compose(self.d).is_zero():
            out.append("d^2 != 0")
        leibniz = check_diff_operator_order(self, self.d, 1, exhaustive=True)
        if not leibniz.passed:
            out.append("d is not a derivation")
        return out


@dataclass(frozen=True)
class Operator:
    matrix: dict
    degree: int
    name: str = ""

    def apply(self, v: dict) -> dict:
        return mat_apply(self.matrix, v)

    def compose(self, other: "Operator") -> "Operator":
        """``self o other``."""
        return Operator(mat_mul(self.matrix, other.matrix), self.degree + other.degree)

    def __add__(self, other: "Operator") -> "Operator":
        return Operator(mat_add(self.matrix, other.matrix), self._sum_degree(other))

    def __sub__(self, other: "Operator") -> "Operator":
        return Operator(mat_add(self.matrix, other.matrix, -1), self._sum_degree(other))

    def __neg__(self) -> "Operator":
        return Operator(mat_scale(self.matrix, -1), self.degree)

    def __rmul__(self, s) -> "Operator":
        return Operator(mat_scale(self.matrix, as_rational(s)), self.degree)

    def _sum_degree(self, other: "Operator") -> int:
        if self.is_zero():
            return other.degree
        if other.is_zero() or other.degree == self.degree:
            return self.degree
        raise AlgebraError(f"adding operators of degrees {self.degree} and {other.degree}")

    def is_zero(self) -> bool:
        return not any(self.matrix.values())

    def equals(self, other: "Operator") -> bool:
        return not mat_add(self.matrix, other.matrix, -1)

    def named(self, name: str) -> "Operator":
        return Operator(self.matrix, self.degree, name)

    def problems(self, A: FiniteGcda) -> list[str]:
        out = []
        for j, col in self.matrix.items():
            if not 0 <= j < A.dim or any(not 0 <= i < A.dim for i in col):
                out.append("matrix index out of range")
                continue
            for i in col:
                if A.degrees[i] != A.degrees[j] + self.degree:
                    out.append(f"maps {A.labels[j]} to {A.labels[i]}, not of degree {self.degree}")
        return out


def zero_operator(A: FiniteGcda, degree: int) -> Operator:
    return Operator({}, degree)


def identity_operator(A: FiniteGcda) -> Operator:
    return Operator(mat_identity(A.dim), 0, "1")


def commutator(a: Operator, b: Operator) -> Operator:
    """Graded commutator ``ab - (-1)^{|a||b|} ba`` in End(A)."""
    sign = -1 if a.degree * b.degree % 2 else 1
    return Operator(mat_add(a.compose(b).matrix, b.compose(a).matrix, -sign), a.degree + b.degree)


def multiplication(A: FiniteGcda, v: dict) -> Operator:
    """Left multiplication by a homogeneous element."""
    deg = A.degree_of(v)
    if deg is None:
        raise AlgebraError("multiplication operators need a homogeneous element")
    m = {}
    for j in range(A.dim):
        image = A.mul(v, A.basis_vector(j))
        if image:
            m[j] = image
    return Operator(m, deg)


# -- differential operators ------------------------------------------------------


def order_defect(A: FiniteGcda, D: Operator, xs: tuple) -> dict:
    """The shuffle alternation of ``D`` evaluated on basis elements ``xs``."""
    n1 = len(xs)
    degs = [A.degrees[k] for k in xs]
    total: dict = {}
    for p in range(1, n1 + 1):
        for sigma in shuffles(p, n1 - p):
            order = [xs[sigma(k) - 1] for k in range(1, n1 + 1)]
            coef = (-1) ** p * koszul_sign(sigma, degs)
            v = D.apply(A.mul_many(tuple(order[:p])))
            for y in order[p:]:
                if not v:
                    break
                v = A.mul(v, A.basis_vector(y))
            if v:
                total = vec_add(total, v, coef)
    return total


def check_diff_operator_order(A: FiniteGcda, D: Operator, n: int, exhaustive: bool = False) -> CheckReport:
    """Order <= n on every (n+1)-tuple of basis elements.

    The alternation is graded symmetric in its arguments, so by default
    only non-decreasing tuples are visited; ``exhaustive`` visits all.
    """
    if n < 1:
        raise AlgebraError("order must be at least 1")
    report = CheckReport(f"order({D.name or 'D'}) <= {n}")
    tuples = itertools.product(range(A.dim), repeat=n + 1) if exhaustive else \
        itertools.combinations_with_replacement(range(A.dim), n + 1)
    bad = []
    for xs in tuples:
        defect = order_defect(A, D, xs)
        if defect:
            bad.append(xs)
            if len(bad) >= 3:
                break
    detail = ""
    if bad:
        shown = "; ".join("(" + ", ".join(A.labels[k] for k in xs) + ")" for xs in bad)
        detail = f"nonzero on {shown}"
    report.add(f"{D.name or 'D'} has order <= {n}", not bad, detail)
    return report


def minimal_order(A: FiniteGcda, D: Operator, limit: int = 6) -> int | None:
    for n in range(1, limit + 1):
        if check_diff_operator_order(A, D, n).passed:
            return n
    return None


# -- brackets --------------------------------------------------------------------


def koszul_bracket(A: FiniteGcda, delta: Operator) -> dict:
    """``[a,b] = D(ab) - D(a)b - (-1)^{|a|} a D(b)`` on basis pairs."""
    table = {}
    for a in range(A.dim):
        ea = A.basis_vector(a)
        da = delta.apply(ea)
        for b in range(A.dim):
            eb = A.basis_vector(b)
            v = delta.apply(A.mul_basis(a, b))
            v = vec_add(v, A.mul(da, eb), -1)
            v = vec_add(v, A.mul(ea, delta.apply(eb)), -((-1) ** (A.degrees[a] % 2)))
            if v:
                table[(a, b)] = v
    return table


def _bracket(table: dict, u: dict, v: dict) -> dict:
    out: dict = {}
    for a, x in u.items():
        for b, y in v.items():
            val = table.get((a, b))
            if val:
                out = vec_add(out, val, x * y)
    return out


def check_gerstenhaber(A: FiniteGcda, table: dict, degree: int = -1) -> CheckReport:
    """``[x,yz] = [x,y]z + (-1)^{(|x|+degree)|y|} y[x,z]`` on basis triples."""
    report = CheckReport("Gerstenhaber relation")
    bad = None
    for x, y, z in itertools.product(range(A.dim), repeat=3):
        ex, ey, ez = A.basis_vector(x), A.basis_vector(y), A.basis_vector(z)
        lhs = _bracket(table, ex, A.mul_basis(y, z))
        rhs = A.mul(_bracket(table, ex, ey), ez)
        sign = -1 if (A.degrees[x] + degree) * A.degrees[y] % 2 else 1
        rhs = vec_add(rhs, A.mul(ey, _bracket(table, ex, ez)), sign)
        if vec_add(lhs, rhs, -1):
            bad = (x, y, z)
            break
    detail = "" if bad is None else "fails on (" + ", ".join(A.labels[k] for k in bad) + ")"
    report.add("[x,yz] = [x,y]z + (-1)^((|x|-1)|y|) y[x,z]", bad is None, detail)
    return report


def check_shifted_lie(A: FiniteGcda, table: dict, twist: bool = True) -> CheckReport:
    """Antisymmetry and Jacobi for a degree -1 bracket (a Lie bracket on A[1]).

    The Koszul bracket is graded symmetric, ``[x,y] = (-1)^{|x||y|}[y,x]``;
    with ``twist`` it is first replaced by ``(-1)^{|x|}[x,y]``, the form
    that is a Lie bracket on A[1] when Delta^2 = 0.
    """
    if twist:
        table = {(a, b): (vec_scale(v, -1) if A.degrees[a] % 2 else v) for (a, b), v in table.items()}
    report = CheckReport("degree -1 Lie bracket")
    s = [d - 1 for d in A.degrees]
    anti = None
    for x, y in itertools.product(range(A.dim), repeat=2):
        sign = -1 if s[x] * s[y] % 2 else 1
        if vec_add(table.get((x, y), {}), table.get((y, x), {}), sign):
            anti = (x, y)
            break
    report.add("[x,y] = -(-1)^((|x|-1)(|y|-1)) [y,x]", anti is None,
               "" if anti is None else f"fails on ({A.labels[anti[0]]}, {A.labels[anti[1]]})")
    jac = None
    for x, y, z in itertools.product(range(A.dim), repeat=3):
        ex, ey, ez = A.basis_vector(x), A.basis_vector(y), A.basis_vector(z)
        lhs = _bracket(table, ex, _bracket(table, ey, ez))
        rhs = _bracket(table, _bracket(table, ex, ey), ez)
        sign = -1 if s[x] * s[y] % 2 else 1
        rhs = vec_add(rhs, _bracket(table, ey, _bracket(table, ex, ez)), sign)
        if vec_add(lhs, rhs, -1):
            jac = (x, y, z)
            break
    report.add("[x,[y,z]] = [[x,y],z] + (-1)^((|x|-1)(|y|-1)) [y,[x,z]]", jac is None,
               "" if jac is None else "fails on (" + ", ".join(A.labels[k] for k in jac) + ")")
    return report


# -- structures --------------------------------------------------------------------


def _require_degree(op: Operator, degree: int, what: str) -> None:
    if not op.is_zero() and op.degree != degree:
        raise AlgebraError(f"{what} must have degree {degree}, got {op.degree}")


def _vanishes(report: CheckReport, label: str, op: Operator) -> bool:
    return report.add(label, op.is_zero(), "" if op.is_zero() else f"{len(op.matrix)} nonzero columns")


def _order(report: CheckReport, A: FiniteGcda, op: Operator, n: int, name: str) -> None:
    sub = check_diff_operator_order(A, op.named(name), n)
    report.extend(sub)


def check_bv(A: FiniteGcda, delta: Operator) -> CheckReport:
    _require_degree(delta, -1, "Delta")
    report = CheckReport("BV algebra")
    _order(report, A, delta, 2, "Delta")
    _vanishes(report, "Delta^2 = 0", delta.compose(delta))
    _vanishes(report, "[d,Delta] = 0", commutator(A.d, delta))
    return report


def check_ebv(A: FiniteGcda, i: Operator) -> CheckReport:
    _require_degree(i, -2, "i")
    report = CheckReport("exact BV algebra")
    _order(report, A, i, 2, "i")
    _vanishes(report, "[i,[i,d]] = 0", commutator(i, commutator(i, A.d)))
    return report


def check_jacobi_algebra(A: FiniteGcda, i: Operator, j: Operator) -> CheckReport:
    _require_degree(i, -2, "i")
    _require_degree(j, -1, "j")
    report = CheckReport("Jacobi algebra")
    _order(report, A, i, 2, "i")
    _order(report, A, j, 1, "j")
    D = commutator(i, A.d)
    _vanishes(report, "[i,[i,d]] + 2ji = 0", commutator(i, D) + 2 * j.compose(i))
    _vanishes(report, "[i,j] = 0", commutator(i, j))
    _vanishes(report, "[j,[i,d]] = 0", commutator(j, D))
    _vanishes(report, "j^2 = 0", j.compose(j))
    return report


def check_cbv_infty(A: FiniteGcda, deltas: list[Operator]) -> CheckReport:
    """``Delta_n`` for n beyond the list are zero, so the identity is checked up to twice its length."""
    for n, D in enumerate(deltas, start=1):
        _require_degree(D, 1 - 2 * n, f"Delta_{n}")
    report = CheckReport("commutative BV-infinity algebra")
    L = len(deltas)

    def delta(n):
        return deltas[n - 1] if n <= L else zero_operator(A, 1 - 2 * n)

    for n in range(1, L + 1):
        _order(report, A, delta(n), n + 1, f"Delta_{n}")
    for n in range(1, 2 * L + 1):
        total = commutator(A.d, delta(n))
        for k in range(1, n):
            total = total + delta(k).compose(delta(n - k))
        _vanishes(report, f"n={n}: [d,Delta_n] + sum_k Delta_k Delta_(n-k) = 0", total)
    return report


def check_ecbv_algebra(A: FiniteGcda, ins: list[Operator]) -> CheckReport:
    """Commuting family with vanishing nested sums; the n = m commutators are listed separately."""
    for n, op in enumerate(ins, start=1):
        _require_degree(op, -2 * n, f"i_{n}")
    report = CheckReport("exact commutative BV-infinity algebra")
    L = len(ins)

    def i(n):
        return ins[n - 1] if n <= L else zero_operator(A, -2 * n)

    for n in range(1, L + 1):
        _order(report, A, i(n), n + 1, f"i_{n}")
    for n in range(1, L + 1):
        for m in range(n, L + 1):
            label = f"[i_{n},i_{m}] = 0" + (" (n = m)" if n == m else "")
            _vanishes(report, label, commutator(i(n), i(m)))
    for n in range(2, 2 * L + 1):
        total = zero_operator(A, 1 - 2 * n)
        for k in range(1, n):
            total = total + commutator(i(k), commutator(i(n - k), A.d))
        _vanishes(report, f"n={n}: sum_k [i_k,[i_(n-k),d]] = 0", total)
    return report


# -- trivializations -----------------------------------------------------------------


def _series_mul(a: list, b: list, N: int) -> list:
    out = [{} for _ in range(N + 1)]
    for p, x in enumerate(a):
        if not x:
            continue
        for q, y in enumerate(b[: N + 1 - p]):
            if y:
                out[p + q] = mat_add(out[p + q], mat_mul(x, y))
    return out


def _series_exp(phi: list, N: int, sign: int, dim: int) -> list:
    """``exp(sign * phi(z))`` truncated at z^N (phi has no constant term)."""
    result = [mat_identity(dim)] + [{} for _ in range(N)]
    power = [mat_identity(dim)] + [{} for _ in range(N)]
    base = [{}] + [mat_scale(phi[n], sign) if n < len(phi) else {} for n in range(1, N + 1)]
    for k in range(1, N + 1):
        power = _series_mul(power, base, N)
        for n in range(N + 1):
            if power[n]:
                result[n] = mat_add(result[n], mat_scale(power[n], Fraction(1, math.factorial(k))))
    return result


def conjugation_series(A: FiniteGcda, phis: list[Operator], N: int) -> list[dict]:
    """Coefficients of ``exp(phi(z)) d exp(-phi(z))`` up to z^N."""
    phi = [{}] + [p.matrix for p in phis]
    left = _series_exp(phi, N, 1, A.dim)
    right = _series_exp(phi, N, -1, A.dim)
    return _series_mul(_series_mul(left, [A.d.matrix], N), right, N)


def nested_bracket_coefficient(A: FiniteGcda, phis: list[Operator], n: int) -> Operator:
    """``sum_p 1/p! sum_{q1+..+qp=n} [phi_q1, ...[phi_qp, d]...]``."""
    L = len(phis)
    total = zero_operator(A, 1 - 2 * n)
    for p in range(1, n + 1):
        for cuts in itertools.combinations(range(1, n), p - 1):
            bounds = (0,) + cuts + (n,)
            qs = [bounds[k + 1] - bounds[k] for k in range(p)]
            if any(q > L for q in qs):
                continue
            inner = A.d
            for q in reversed(qs):
                inner = commutator(phis[q - 1], inner)
            total = total + Fraction(1, math.factorial(p)) * inner
    return total


def check_trivialization(A: FiniteGcda, deltas: list[Operator], phis: list[Operator], N: int = 4) -> CheckReport:
    if not 1 <= N <= MAX_Z_ORDER:
        raise AlgebraError(f"z-order must be between 1 and {MAX_Z_ORDER}")
    for n, op in enumerate(phis, start=1):
        _require_degree(op, -2 * n, f"phi_{n}")
    for n, op in enumerate(deltas, start=1):
        _require_degree(op, 1 - 2 * n, f"Delta_{n}")
    report = CheckReport(f"trivialization to z^{N}")
    series = conjugation_series(A, phis, N)
    report.add("z^0 coefficient is d", not mat_add(series[0], A.d.matrix, -1))
    for n in range(1, N + 1):
        coeff = Operator(series[n], 1 - 2 * n)
        nested = nested_bracket_coefficient(A, phis, n)
        report.add(f"z^{n}: series equals nested brackets", coeff.equals(nested))
        target = deltas[n - 1] if n <= len(deltas) else zero_operator(A, 1 - 2 * n)
        diff = coeff - target
        report.add(f"z^{n}: coefficient equals Delta_{n}", diff.is_zero(),
                   "" if diff.is_zero() else f"{len(diff.matrix)} nonzero columns")
    return report


# -- exterior algebras --------------------------------------------------------------


def exterior_algebra(names: list[str], degrees: list[int] | None = None, d: dict | None = None) -> FiniteGcda:
    """Free graded commutative algebra on odd generators.

    ``d`` maps a generator name to a dict ``{tuple of generator names: coefficient}``
    describing its differential; it is extended as a derivation.
    """
    degrees = degrees or [1] * len(names)
    if any(g % 2 == 0 for g in degrees):
        raise AlgebraError("exterior generators must have odd degree")
    n = len(names)
    subsets = [s for r in range(n + 1) for s in itertools.combinations(range(n), r)]
    labels = ["1" if not s else "".join(names[k] for k in s) for s in subsets]
    degs = [sum(degrees[k] for k in s) for s in subsets]
    index = {s: k for k, s in enumerate(subsets)}
    product = {}
    for a, s in enumerate(subsets):
        for b, t in enumerate(subsets):
            if set(s) & set(t):
                continue
            seq = list(s) + list(t)
            sign = _sort_sign(seq)
            product[(a, b)] = {index[tuple(sorted(seq))]: Fraction(sign)}
    A = FiniteGcda(labels, degs, product)
    A.generators = [index[(k,)] for k in range(n)]
    if d:
        images = {}
        for gname, image in d.items():
            vec: dict = {}
            for word, c in image.items():
                idx = tuple(names.index(w) for w in word)
                if len(set(idx)) == len(idx):
                    vec = vec_add(vec, {index[tuple(sorted(idx))]: Fraction(_sort_sign(list(idx)))}, as_rational(c))
            images[index[(names.index(gname),)]] = vec
        A.d = Operator(_derivation_from_generators(A, A.generators, images, 1), 1, "d")
    return A


def _sort_sign(seq: list[int]) -> int:
    sign = 1
    for x, y in itertools.combinations(range(len(seq)), 2):
        if seq[x] > seq[y]:
            sign = -sign
    return sign


def contraction(A: FiniteGcda, gen_label: str) -> Operator:
    """Derivation dual to a generator of an exterior algebra (an order 1 operator)."""
    g = A.index(gen_label)
    gens = getattr(A, "generators", None) or [k for k in range(A.dim) if _is_generator(A, k)]
    if g not in gens:
        raise AlgebraError(f"{gen_label} is not a generator")
    deg = -A.degrees[g]
    images = {g: {A.index("1"): Fraction(1)}}
    return Operator(_derivation_from_generators(A, gens, images, deg), deg, f"iota_{gen_label}")


def _is_generator(A: FiniteGcda, k: int) -> bool:
    return A.labels[k] != "1" and not any(
        A.mul_basis(a, b).get(k) for a in range(A.dim) for b in range(A.dim)
        if A.labels[a] != "1" and A.labels[b] != "1"
    )


def _derivation_from_generators(A: FiniteGcda, gens: list[int], images: dict, degree: int) -> dict:
    """Derivation on an algebra generated by ``gens``, via a word for each basis element."""
    words = _basis_words(A, gens)
    m = {}
    for j, (word, coef) in words.items():
        total: dict = {}
        before = 0
        for pos, g in enumerate(word):
            img = images.get(g)
            if img:
                v = img
                if pos:
                    v = A.mul(A.mul_many(tuple(word[:pos])), v)
                if pos + 1 < len(word):
                    v = A.mul(v, A.mul_many(tuple(word[pos + 1:])))
                sign = -1 if degree * before % 2 else 1
                total = vec_add(total, v, sign)
            before += A.degrees[g]
        if total:
            m[j] = vec_scale(total, 1 / coef)
    return m


def _basis_words(A: FiniteGcda, gens: list[int]) -> dict:
    """For each basis index, a word in generators whose product is ``coef * e_j``."""
    one = A.labels.index("1") if "1" in A.labels else None
    words = {}
    if one is not None:
        words[one] = ((), Fraction(1))
    frontier = [((g,), A.basis_vector(g)) for g in gens]
    while frontier:
        nxt = []
        for word, vec in frontier:
            if len(vec) != 1:
                continue
            (k, c), = vec.items()
            if k in words:
                continue
            words[k] = (word, c)
            for g in gens:
                nxt.append((word + (g,), A.mul(vec, A.basis_vector(g))))
        frontier = nxt
    if one is not None:
        words.pop(one)
    return words


# -- models and file format -------------------------------------------------------------


@dataclass
class AlgebraModel:
    name: str
    algebra: FiniteGcda
    operators: dict = field(default_factory=dict)

    def get(self, name: str, degree: int) -> Operator:
        op = self.operators.get(name)
        return op if op is not None else zero_operator(self.algebra, degree)


BUILTIN_ALGEBRAS = ("torus4", "heisenberg", "solvable3")


def builtin_algebra(name: str) -> AlgebraModel:
    """``torus4``: d = 0 with a constant bivector contraction.

    ``heisenberg``: d e3 = e1e2 with i dual to e1, e2 and j = -iota_e3,
    a Jacobi pair for which ji is nonzero but commutes with d.
    ``solvable3``: d e3 = e2e3, a Jacobi pair with [d, ji] nonzero.
    """
    if name == "torus4":
        A = exterior_algebra(["e1", "e2", "e3", "e4"])
        io = {g: contraction(A, g) for g in ("e1", "e2", "e3", "e4")}
        i = io["e1"].compose(io["e2"]) + io["e3"].compose(io["e4"])
        return AlgebraModel(name, A, {"i": i.named("i")})
    if name == "heisenberg":
        A = exterior_algebra(["e1", "e2", "e3"], d={"e3": {("e1", "e2"): 1}})
        io = {g: contraction(A, g) for g in ("e1", "e2", "e3")}
        return AlgebraModel(name, A, {"i": io["e1"].compose(io["e2"]).named("i"), "j": (-io["e3"]).named("j")})
    if name == "solvable3":
        A = exterior_algebra(["e1", "e2", "e3"], d={"e3": {("e2", "e3"): 1}})
        io = {g: contraction(A, g) for g in ("e1", "e2", "e3")}
        i = io["e1"].compose(io["e2"]) + io["e2"].compose(io["e3"])
        return AlgebraModel(name, A, {"i": i.named("i"), "j": (-io["e1"]).named("j")})
    raise KeyError(f"unknown algebra {name!r}; choose from {', '.join(BUILTIN_ALGEBRAS)}")


_TERM = re.compile(r"\s*([+-])?\s*(?:(\d+(?:/\d+)?)\s*\*\s*)?([^\s+-][^+-]*?)\s*(?=[+-]|$)")


def _parse_sum(text: str, resolve) -> list:
    """``2*a - 1/2*b c + d`` into [(coef, [atoms])]."""
    text = text.strip()
    if text == "0":
        return []
    out = []
    pos = 0
    while pos < len(text):
        m = _TERM.match(text, pos)
        if not m or m.end() == pos:
            raise AlgebraError(f"cannot parse {text!r}")
        sign = -1 if m.group(1) == "-" else 1
        coef = Fraction(m.group(2)) if m.group(2) else Fraction(1)
        atoms = [resolve(a) for a in m.group(3).split()]
        out.append((sign * coef, atoms))
        pos = m.end()
    return out


def parse_algebra(text: str, name: str = "file") -> AlgebraModel:
    """Read an algebra file.

    Either ``exterior e1:1 e2:1 f:3`` (generators with odd degrees; ``d``
    lines then give differentials of generators, extended as a derivation)
    or explicit ``basis <label> <degree>`` lines with ``a * b = <sum>``
    product lines (the reversed product follows by graded commutativity)
    and ``d a = <sum>`` lines.  Operators are either
    ``operator <name> = <sum of products of iota_X, mul_X, d, or earlier operators>``
    or a block ``operator <name> <degree>`` / ``<basis> -> <sum>`` / ``end``.
    """
    lines = []
    for lineno, raw in enumerate(text.splitlines(), start=1):
        line = raw.split("#", 1)[0].strip()
        if line:
            lines.append((lineno, line))
    exterior = None
    labels, degrees, products, diffs = [], [], [], []
    body = []
    for lineno, line in lines:
        head = line.split()[0]
        if head == "exterior":
            exterior = []
            for item in line.split()[1:]:
                g, _, deg = item.partition(":")
                exterior.append((g, int(deg or 1)))
        elif head == "basis":
            parts = line.split()
            if len(parts) != 3:
                raise AlgebraError(f"line {lineno}: expected 'basis <label> <degree>'")
            labels.append(parts[1])
            try:
                degrees.append(int(parts[2]))
            except ValueError:
                raise AlgebraError(f"line {lineno}: bad degree {parts[2]!r}") from None
        elif head == "d":
            diffs.append((lineno, line[1:].strip()))
        elif "*" in line.split("=")[0] and "=" in line and head not in ("operator",):
            products.append((lineno, line))
        else:
            body.append((lineno, line))
    try:
        if exterior is not None:
            if labels or products:
                raise AlgebraError("use either 'exterior' or explicit basis and product lines")
            gnames = [g for g, _ in exterior]
            A = exterior_algebra(gnames, [deg for _, deg in exterior])
            images = {}
            for lineno, item in diffs:
                gname, _, rhs = item.partition("=")
                g = A.index(gname.strip())
                images[g] = _vector(A, rhs, lineno)
            if images:
                A.d = Operator(_derivation_from_generators(A, A.generators, images, 1), 1, "d")
        else:
            if not labels:
                raise AlgebraError("no basis declared")
            index = {lab: k for k, lab in enumerate(labels)}
            probe = FiniteGcda(labels, degrees, {})
            product = {}
            for lineno, line in products:
                lhs, _, rhs = line.partition("=")
                a, _, b = lhs.partition("*")
                ka, kb = index.get(a.strip()), index.get(b.strip())
                if ka is None or kb is None:
                    raise AlgebraError(f"line {lineno}: unknown basis element in {lhs.strip()!r}")
                product[(ka, kb)] = _vector(probe, rhs, lineno)
            for (ka, kb), v in list(product.items()):
                if (kb, ka) not in product:
                    sign = -1 if degrees[ka] * degrees[kb] % 2 else 1
                    product[(kb, ka)] = vec_scale(v, sign)
            dmat = {}
            for lineno, item in diffs:
                lab, _, rhs = item.partition("=")
                if lab.strip() not in index:
                    raise AlgebraError(f"line {lineno}: unknown basis element {lab.strip()!r}")
                dmat[index[lab.strip()]] = _vector(probe, rhs, lineno)
            A = FiniteGcda(labels, degrees, product, dmat)
    except (ValueError, KeyError) as exc:
        if isinstance(exc, AlgebraError):
            raise
        raise AlgebraError(str(exc)) from None
    problems = A.problems()
    if problems:
        raise AlgebraError(f"not a graded commutative DG algebra: {problems[0]}")
    model = AlgebraModel(name, A)
    k = 0
    while k < len(body):
        lineno, line = body[k]
        parts = line.split()
        if parts[0] != "operator" or len(parts) < 3:
            raise AlgebraError(f"line {lineno}: unknown directive {parts[0]!r}")
        opname = parts[1]
        if parts[2] == "=":
            op = _operator_expression(model, line.split("=", 1)[1], lineno)
            k += 1
        else:
            try:
                degree = int(parts[2])
            except ValueError:
                raise AlgebraError(f"line {lineno}: bad operator degree {parts[2]!r}") from None
            matrix = {}
            k += 1
            while k < len(body) and body[k][1] != "end":
                ln, entry = body[k]
                src, arrow, rhs = entry.partition("->")
                if not arrow:
                    raise AlgebraError(f"line {ln}: expected '<basis> -> <sum>'")
                vec = _vector(A, rhs, ln)
                if vec:
                    matrix[A.index(src.strip())] = vec
                k += 1
            if k == len(body):
                raise AlgebraError(f"line {lineno}: operator block without 'end'")
            k += 1
            op = Operator(matrix, degree)
        problems = op.problems(A)
        if problems:
            raise AlgebraError(f"line {lineno}: operator {opname}: {problems[0]}")
        model.operators[opname] = op.named(opname)
    return model


def _vector(A: FiniteGcda, text: str, lineno: int) -> dict:
    try:
        terms = _parse_sum(text, A.index)
    except AlgebraError as exc:
        raise AlgebraError(f"line {lineno}: {exc}") from None
    out: dict = {}
    for coef, atoms in terms:
        if len(atoms) != 1 and not A.product:
            raise AlgebraError(f"line {lineno}: expected a linear combination of basis elements")
        out = vec_add(out, A.mul_many(tuple(atoms)), coef)
    return out


def _operator_expression(model: AlgebraModel, text: str, lineno: int) -> Operator:
    A = model.algebra

    def resolve(atom: str) -> Operator:
        if atom == "d":
            return A.d
        if atom in model.operators:
            return model.operators[atom]
        if atom.startswith("iota_"):
            return contraction(A, atom[5:])
        if atom.startswith("mul_"):
            return multiplication(A, {A.index(atom[4:]): Fraction(1)})
        raise AlgebraError(f"unknown operator {atom!r}")

    try:
        terms = _parse_sum(text, resolve)
    except AlgebraError as exc:
        raise AlgebraError(f"line {lineno}: {exc}") from None
    total = None
    for coef, atoms in terms:
        op = atoms[0]
        for nxt in atoms[1:]:
            op = op.compose(nxt)
        op = coef * op
        total = op if total is None else total + op
    if total is None:
        raise AlgebraError(f"line {lineno}: an operator needs a degree; write a block for the zero operator")
    return total
