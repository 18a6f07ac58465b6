"""Finite cochain complexes, strong deformation retractions and their tensor products.

Maps are sparse column-major matrices (see :mod:`operad_forge.linalg`):
``m[j]`` is the image of source basis vector ``j``.  Tensor products of
complexes use the mixed-radix basis order, last factor fastest, and the
Koszul rule ``(f (x) g)(a (x) b) = (-1)^{|g||a|} f(a) (x) g(b)``.
"""
from __future__ import annotations

import itertools
import math
from dataclasses import dataclass, field
from fractions import Fraction
from typing import Sequence

from .kernel import Permutation, as_rational, koszul_sign
from .linalg import mat_add, mat_equal, mat_identity, mat_mul, mat_scale


class ShapeError(ValueError):
    """Matrix indices do not fit the bases they are supposed to act on."""


class FormatError(ValueError):
    """Malformed complex or SDR text."""


@dataclass(frozen=True)
class FiniteComplex:
    labels: tuple[str, ...]
    degrees: tuple[int, ...]
    d: dict = field(default_factory=dict, compare=False)

    def __post_init__(self):
        if len(self.labels) != len(self.degrees):
            raise ShapeError("labels and degrees differ in length")
        _check_shape(self.d, len(self), len(self), "d")

    def __len__(self) -> int:
        return len(self.degrees)

    @classmethod
    def build(cls, basis: Sequence[tuple[str, int]], entries: Sequence[tuple[str, str, object]] = ()) -> "FiniteComplex":
        labels = tuple(str(lab) for lab, _ in basis)
        if len(set(labels)) != len(labels):
            raise FormatError("duplicate basis label")
        index = {lab: k for k, lab in enumerate(labels)}
        d: dict = {}
        for src, dst, value in entries:
            if src not in index or dst not in index:
                raise FormatError(f"unknown basis label in d entry {src} -> {dst}")
            q = as_rational(value)
            if q:
                d.setdefault(index[src], {})[index[dst]] = q
        return cls(labels, tuple(int(deg) for _, deg in basis), d)

    def problems(self) -> list[str]:
        out = []
        for j, col in self.d.items():
            for i in col:
                if self.degrees[i] != self.degrees[j] + 1:
                    out.append(f"d({self.labels[j]}) has a component on {self.labels[i]} of the wrong degree")
        if mat_mul(self.d, self.d):
            out.append("d o d != 0")
        return out

    def identity(self) -> dict:
        return mat_identity(len(self))


def _check_shape(m: dict, n_src: int, n_dst: int, name: str) -> None:
    for j, col in m.items():
        if not 0 <= j < n_src:
            raise ShapeError(f"{name}: source index {j} out of range {n_src}")
        for i in col:
            if not 0 <= i < n_dst:
                raise ShapeError(f"{name}: target index {i} out of range {n_dst}")


def _map_degree_problems(m: dict, src: FiniteComplex, dst: FiniteComplex, shift: int, name: str) -> list[str]:
    out = []
    for j, col in m.items():
        for i in col:
            if dst.degrees[i] != src.degrees[j] + shift:
                out.append(f"{name} does not have degree {shift} on {src.labels[j]}")
                break
    return out


@dataclass(frozen=True)
class SdrData:
    """``A`` retract of ``B``: ``i: A -> B``, ``p: B -> A``, ``h: B -> B`` of degree -1."""

    source: FiniteComplex
    target: FiniteComplex
    i: dict
    p: dict
    h: dict

    def __post_init__(self):
        a, b = len(self.source), len(self.target)
        _check_shape(self.i, a, b, "i")
        _check_shape(self.p, b, a, "p")
        _check_shape(self.h, b, b, "h")


def validate_sdr(s: SdrData) -> list[str]:
    """All violated identities; an empty list means ``s`` is an SDR."""
    A, B = s.source, s.target
    out = [f"source: {x}" for x in A.problems()] + [f"target: {x}" for x in B.problems()]
    out += _map_degree_problems(s.i, A, B, 0, "i")
    out += _map_degree_problems(s.p, B, A, 0, "p")
    out += _map_degree_problems(s.h, B, B, -1, "h")
    if not mat_equal(mat_mul(B.d, s.i), mat_mul(s.i, A.d)):
        out.append("i is not a chain map")
    if not mat_equal(mat_mul(A.d, s.p), mat_mul(s.p, B.d)):
        out.append("p is not a chain map")
    if not mat_equal(mat_mul(s.p, s.i), A.identity()):
        out.append("p i != 1")
    lhs = mat_add(mat_mul(B.d, s.h), mat_mul(s.h, B.d))
    rhs = mat_add(B.identity(), mat_mul(s.i, s.p), -1)
    if not mat_equal(lhs, rhs):
        out.append("d h + h d != 1 - i p")
    return out


def trivial_sdr(c: FiniteComplex) -> SdrData:
    return SdrData(c, c, c.identity(), c.identity(), {})


# -- tensor products ------------------------------------------------------------


def _tuples(complexes: Sequence[FiniteComplex]):
    return list(itertools.product(*(range(len(c)) for c in complexes)))


def _flat(idx: Sequence[int], sizes: Sequence[int]) -> int:
    out = 0
    for k, n in zip(idx, sizes):
        out = out * n + k
    return out


def tensor_complex(complexes: Sequence[FiniteComplex]) -> FiniteComplex:
    if not complexes:
        raise ValueError("empty tensor product")
    labels, degrees = [], []
    for idx in _tuples(complexes):
        labels.append("(x)".join(c.labels[k] for c, k in zip(complexes, idx)))
        degrees.append(sum(c.degrees[k] for c, k in zip(complexes, idx)))
    d: dict = {}
    for slot, c in enumerate(complexes):
        factors = [(m.identity(), 0) for m in complexes]
        factors[slot] = (c.d, 1)
        d = mat_add(d, tensor_maps(complexes, complexes, factors))
    return FiniteComplex(tuple(labels), tuple(degrees), d)


def tensor_maps(srcs: Sequence[FiniteComplex], dsts: Sequence[FiniteComplex], factors: Sequence[tuple[dict, int]]) -> dict:
    """``f_1 (x) ... (x) f_n`` for maps ``f_k`` of degree ``deg_k`` with Koszul signs."""
    src_sizes = [len(c) for c in srcs]
    dst_sizes = [len(c) for c in dsts]
    out: dict = {}
    for idx in _tuples(srcs):
        images = [(1, [])]
        passed = 0
        sign_exp = 0
        for k, (m, deg) in enumerate(factors):
            sign_exp += deg * passed
            passed += srcs[k].degrees[idx[k]]
            col = m.get(idx[k])
            if not col:
                images = []
                break
            images = [(c * v, acc + [i]) for c, acc in images for i, v in col.items()]
        if not images:
            continue
        sign = -1 if sign_exp % 2 else 1
        col_out: dict = {}
        for c, acc in images:
            key = _flat(acc, dst_sizes)
            col_out[key] = col_out.get(key, 0) + sign * c
        col_out = {k: v for k, v in col_out.items() if v}
        if col_out:
            out[_flat(idx, src_sizes)] = col_out
    return out


def nfold_tensor_sdr(ss: Sequence[SdrData]) -> SdrData:
    """``h = sum_j (ip)^{(x)(j-1)} (x) h_j (x) 1^{(x)(n-j)}``."""
    if not ss:
        raise ValueError("nfold_tensor_sdr needs at least one SDR")
    if len(ss) == 1:
        return ss[0]
    As = [s.source for s in ss]
    Bs = [s.target for s in ss]
    A, B = tensor_complex(As), tensor_complex(Bs)
    i = tensor_maps(As, Bs, [(s.i, 0) for s in ss])
    p = tensor_maps(Bs, As, [(s.p, 0) for s in ss])
    h: dict = {}
    for j, s in enumerate(ss):
        factors = []
        for k, t in enumerate(ss):
            if k < j:
                factors.append((mat_mul(t.i, t.p), 0))
            elif k == j:
                factors.append((t.h, -1))
            else:
                factors.append((t.target.identity(), 0))
        h = mat_add(h, tensor_maps(Bs, Bs, factors))
    return SdrData(A, B, i, p, h)


def tensor_sdr(s1: SdrData, s2: SdrData) -> SdrData:
    """``h = h_1 (x) 1 + i_1 p_1 (x) h_2``."""
    return nfold_tensor_sdr([s1, s2])


def permutation_map(complexes: Sequence[FiniteComplex], perm: Permutation) -> dict:
    """Koszul-signed ``x_1 (x) ... (x) x_n -> x_perm(1) (x) ... (x) x_perm(n)``.

    Source is the tensor product in the given order, target the product of
    ``complexes[perm(k)-1]`` in order.
    """
    n = len(complexes)
    sizes = [len(c) for c in complexes]
    tgt_sizes = [sizes[perm(k) - 1] for k in range(1, n + 1)]
    out = {}
    for idx in _tuples(complexes):
        degs = [complexes[k].degrees[idx[k]] for k in range(n)]
        new = [idx[perm(k) - 1] for k in range(1, n + 1)]
        out[_flat(idx, sizes)] = {_flat(new, tgt_sizes): Fraction(koszul_sign(perm, degs))}
    return out


def symmetric_tensor_sdr(ss: Sequence[SdrData]) -> SdrData:
    """Average of the n-fold homotopies over all orderings of the factors.

    ``h_s = (1/n!) sum_sigma sigma^-1 . h_{sigma(1)..sigma(n)} . sigma``, each
    term transported back to the original factor order.
    """
    n = len(ss)
    if n < 2:
        raise ValueError("symmetric tensor product needs at least two factors")
    base = nfold_tensor_sdr(ss)
    Bs = [s.target for s in ss]
    h: dict = {}
    for perm in Permutation.all(n):
        reordered = [ss[perm(k) - 1] for k in range(1, n + 1)]
        forward = permutation_map(Bs, perm)
        back = permutation_map([s.target for s in reordered], perm.inverse())
        term = mat_mul(back, mat_mul(nfold_tensor_sdr(reordered).h, forward))
        h = mat_add(h, term)
    h = mat_scale(h, Fraction(1, math.factorial(n)))
    return SdrData(base.source, base.target, base.i, base.p, h)


# -- text format ------------------------------------------------------------------


def _tokens(text: str):
    for lineno, raw in enumerate(text.splitlines(), start=1):
        line = raw.split("#", 1)[0].strip()
        if line:
            yield lineno, line.split()


def parse_complex(text: str) -> FiniteComplex:
    """``basis <label> <degree>`` and ``d <src> <dst> <rational>`` lines."""
    basis, entries = [], []
    for lineno, parts in _tokens(text):
        try:
            if parts[0] == "basis" and len(parts) == 3:
                basis.append((parts[1], int(parts[2])))
            elif parts[0] == "d" and len(parts) == 4:
                entries.append((parts[1], parts[2], Fraction(parts[3])))
            else:
                raise FormatError(f"line {lineno}: cannot parse {' '.join(parts)!r}")
        except ValueError as exc:
            raise FormatError(f"line {lineno}: {exc}") from None
    return FiniteComplex.build(basis, entries)


def parse_sdr(text: str) -> SdrData:
    """Sections ``[source]`` and ``[target]`` in complex format, then
    ``i|p|h <src> <dst> <rational>`` lines between them."""
    sections: dict[str, list[str]] = {"source": [], "target": [], "maps": []}
    current = None
    for raw in text.splitlines():
        line = raw.split("#", 1)[0].strip()
        if not line:
            continue
        if line in ("[source]", "[target]", "[maps]"):
            current = line[1:-1]
            continue
        if current is None:
            raise FormatError("content before the first section header")
        sections[current].append(line)
    A = parse_complex("\n".join(sections["source"]))
    B = parse_complex("\n".join(sections["target"]))
    ia = {lab: k for k, lab in enumerate(A.labels)}
    ib = {lab: k for k, lab in enumerate(B.labels)}
    maps: dict[str, dict] = {"i": {}, "p": {}, "h": {}}
    spaces = {"i": (ia, ib), "p": (ib, ia), "h": (ib, ib)}
    for line in sections["maps"]:
        parts = line.split()
        if len(parts) != 4 or parts[0] not in maps:
            raise FormatError(f"cannot parse map line {line!r}")
        src_idx, dst_idx = spaces[parts[0]]
        if parts[1] not in src_idx or parts[2] not in dst_idx:
            raise FormatError(f"unknown label in {line!r}")
        try:
            q = Fraction(parts[3])
        except ValueError:
            raise FormatError(f"bad coefficient in {line!r}") from None
        if q:
            maps[parts[0]].setdefault(src_idx[parts[1]], {})[dst_idx[parts[2]]] = q
    return SdrData(A, B, maps["i"], maps["p"], maps["h"])


def format_complex(c: FiniteComplex) -> str:
    lines = [f"basis {lab} {deg}" for lab, deg in zip(c.labels, c.degrees)]
    for j in sorted(c.d):
        for i in sorted(c.d[j]):
            lines.append(f"d {c.labels[j]} {c.labels[i]} {c.d[j][i]}")
    return "\n".join(lines) + "\n"
