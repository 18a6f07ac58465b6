"""Exact sparse linear algebra over the rationals.

Vectors are ``dict[int, Fraction]`` (column -> nonzero value).  Matrices
are ``dict[int, dict[int, Fraction]]`` keyed by column, each column a
sparse vector of row entries, i.e. the image of a basis vector.
"""
from __future__ import annotations

import heapq
from fractions import Fraction
from math import gcd, lcm
from typing import Iterable, Mapping

Vector = dict


def vec_add(u: Mapping, v: Mapping, scale=1) -> dict:
    out = dict(u)
    for k, x in v.items():
        y = out.get(k, 0) + scale * x
        if y:
            out[k] = y
        else:
            out.pop(k, None)
    return out


def vec_scale(u: Mapping, s) -> dict:
    if not s:
        return {}
    return {k: x * s for k, x in u.items()}


def _primitive(v: dict) -> dict:
    """Scale a rational vector to a primitive integer vector with positive lead."""
    denom = 1
    for x in v.values():
        if isinstance(x, Fraction):
            denom = lcm(denom, x.denominator)
    ints = {k: int(x * denom) for k, x in v.items()}
    g = 0
    for x in ints.values():
        g = gcd(g, x)
    lead = ints[min(ints)]
    if lead < 0:
        g = -g
    return {k: x // g for k, x in ints.items()}


class Echelon:
    """Incrementally built row-echelon basis of a subspace.

    Rows are primitive integer vectors whose pivot is their smallest column.
    ``insert`` reduces a candidate by the existing rows and keeps the
    remainder when it is nonzero.
    """

    def __init__(self):
        self.rows: dict[int, dict[int, int]] = {}

    def __len__(self) -> int:
        return len(self.rows)

    def copy(self) -> "Echelon":
        other = Echelon()
        other.rows = dict(self.rows)
        return other

    def reduce(self, vec: Mapping) -> dict[int, int]:
        """Integer multiple of ``vec`` minus a combination of rows, with no pivot columns left."""
        if not vec:
            return {}
        v = _primitive(dict(vec))
        rows = self.rows
        heap = [k for k in v if k in rows]
        heapq.heapify(heap)
        while heap:
            p = heapq.heappop(heap)
            a = v.get(p)
            if not a:
                continue
            row = rows[p]
            b = row[p]
            # v <- b*v - a*row
            if b != 1:
                for k in v:
                    v[k] *= b
            for k, x in row.items():
                y = v.get(k, 0) - a * x
                if y:
                    if k not in v and k in rows and k != p:
                        heapq.heappush(heap, k)
                    v[k] = y
                else:
                    v.pop(k, None)
            if v:
                g = 0
                for x in v.values():
                    g = gcd(g, x)
                    if g == 1:
                        break
                if g > 1:
                    for k in v:
                        v[k] //= g
            else:
                return {}
        return v

    def insert(self, vec: Mapping) -> bool:
        """Add ``vec`` to the span; returns True when the rank grew."""
        r = self.reduce(vec)
        if not r:
            return False
        r = _primitive(r)
        self.rows[min(r)] = r
        return True

    def extend(self, vecs: Iterable[Mapping]) -> int:
        return sum(1 for v in vecs if self.insert(v))

    def contains(self, vec: Mapping) -> bool:
        return not self.reduce(vec)

    def solve(self, vec: Mapping) -> dict[int, Fraction] | None:
        """Coefficients ``c`` with ``vec == sum c[p] * rows[p]``, or None."""
        v = {k: Fraction(x) for k, x in vec.items() if x}
        coeffs: dict[int, Fraction] = {}
        rows = self.rows
        while v:
            p = min(v)
            row = rows.get(p)
            if row is None:
                return None
            c = v[p] / row[p]
            coeffs[p] = c
            for k, x in row.items():
                y = v.get(k, 0) - c * x
                if y:
                    v[k] = y
                else:
                    v.pop(k, None)
        return coeffs

    def basis(self) -> list[dict[int, int]]:
        return [self.rows[p] for p in sorted(self.rows)]

    def rref(self) -> list[dict[int, Fraction]]:
        """Fully reduced rows (pivot 1, zero above and below), sorted by pivot."""
        pivots = sorted(self.rows)
        reduced: dict[int, dict[int, Fraction]] = {}
        for p in reversed(pivots):
            row = {k: Fraction(x, self.rows[p][p]) for k, x in self.rows[p].items()}
            for q in [k for k in row if k != p and k in reduced]:
                row = vec_add(row, reduced[q], -row[q])
            reduced[p] = row
        return [reduced[p] for p in pivots]


def rank(vectors: Iterable[Mapping]) -> int:
    e = Echelon()
    return e.extend(vectors)


# -- sparse matrices (column major) -------------------------------------------


def mat_apply(m: Mapping[int, Mapping], v: Mapping) -> dict:
    out: dict = {}
    for j, x in v.items():
        col = m.get(j)
        if not col:
            continue
        for i, y in col.items():
            z = out.get(i, 0) + x * y
            if z:
                out[i] = z
            else:
                out.pop(i, None)
    return out


def mat_mul(a: Mapping[int, Mapping], b: Mapping[int, Mapping]) -> dict:
    """``a @ b`` (apply b first)."""
    out = {}
    for j, col in b.items():
        image = mat_apply(a, col)
        if image:
            out[j] = image
    return out


def mat_add(a: Mapping[int, Mapping], b: Mapping[int, Mapping], scale=1) -> dict:
    out = {j: dict(col) for j, col in a.items()}
    for j, col in b.items():
        merged = vec_add(out.get(j, {}), col, scale)
        if merged:
            out[j] = merged
        else:
            out.pop(j, None)
    return out


def mat_scale(a: Mapping[int, Mapping], s) -> dict:
    if not s:
        return {}
    return {j: {i: x * s for i, x in col.items()} for j, col in a.items()}


def mat_identity(n: int) -> dict:
    return {j: {j: Fraction(1)} for j in range(n)}


def mat_equal(a: Mapping[int, Mapping], b: Mapping[int, Mapping]) -> bool:
    return not mat_add(a, b, -1)


def mat_rank(m: Mapping[int, Mapping]) -> int:
    return rank(m.values())
