"""Operadic ideals in bounded truncations, membership, and block homology of P/I.

Blocks are keyed by ``(arity, weight, degree, grading)`` where ``grading``
collects any extra additive gradings the presentation declares (the index
grading of indexed families).  An ideal block is built from smaller blocks:
``I`` is spanned by ``S + d(S)`` and closed under composing with ``mu`` and
with each generator on either side, then under the symmetric group.
"""
from __future__ import annotations

from dataclasses import dataclass, field

from .freeop import OperadElement, leaves_of, weight_of
from .homotopy import OperadSdr
from .kernel import Permutation
from .linalg import Echelon
from .presentations import OperadPresentation


class NotWeightHomogeneous(ValueError):
    """The construction needs weight-homogeneous data."""


class OutsideCaps(ValueError):
    """An element lies outside the truncation an ideal span was built for."""


@dataclass
class Membership:
    member: bool
    # (block key, basis row index within the block, coefficient)
    certificate: list = field(default_factory=list)
    residual_blocks: list = field(default_factory=list)


class IdealSpan:
    def __init__(self, pres: OperadPresentation, max_arity: int, max_weight: int):
        self.pres = pres
        self.ctx = pres.ctx
        self.max_arity = max_arity
        self.max_weight = max_weight
        self._bases: dict = {}
        self._blocks: dict = {}
        self._seeds: dict = {}
        for rel in pres.ideal_relations:
            for part in (rel.element, self.ctx.differential(rel.element)):
                if not part:
                    continue
                ws = part.weights()
                if len(ws) != 1 or 0 in ws:
                    raise NotWeightHomogeneous(
                        f"relation {rel.name} (or its differential) is not weight-homogeneous of positive weight; "
                        "the ideal it generates is not graded by weight"
                    )
                for key, comp in self.split(part).items():
                    self._seeds.setdefault(key, []).append(comp)
        self._check_extra_gradings()
        self._builders = [(self.ctx.mu(2), 2, 0, 0, self._zero_grading())]
        for name, gen in self.ctx.generators.items():
            g = self.ctx.gen(name)
            self._builders.append((g, gen.arity, 1, gen.degree, self.pres.grading_of(next(iter(g.terms)))))

    def _zero_grading(self):
        return tuple(0 for _ in self.pres.gradings)

    def _check_extra_gradings(self) -> None:
        for rel in self.pres.ideal_relations:
            for part in (rel.element, self.ctx.differential(rel.element)):
                if part and len({self.pres.grading_of(m) for m in part.terms}) > 1:
                    raise NotWeightHomogeneous(f"relation {rel.name} is not homogeneous for the declared gradings")

    # -- bases --------------------------------------------------------------

    def key_of(self, node) -> tuple:
        return (len(leaves_of(node)), weight_of(node), self.ctx.degree_of(node), self.pres.grading_of(node))

    def split(self, x: OperadElement) -> dict:
        out: dict = {}
        for m, c in x.terms.items():
            out.setdefault(self.key_of(m), {})[m] = c
        return {k: self.ctx.element(v) for k, v in out.items()}

    def basis(self, key) -> tuple[list, dict]:
        n, w = key[0], key[1]
        if (n, w) not in self._bases:
            groups: dict = {}
            for m in self.ctx.enumerate_basis(n, w):
                groups.setdefault(self.key_of(m), []).append(m)
            self._bases[(n, w)] = {k: (ms, {m: c for c, m in enumerate(ms)}) for k, ms in groups.items()}
        return self._bases[(n, w)].get(key, ([], {}))

    def block_keys(self, n: int, w: int) -> list:
        self.basis((n, w, 0, ()))
        return sorted(self._bases[(n, w)])

    def to_vector(self, x: OperadElement, key) -> dict:
        _, index = self.basis(key)
        return {index[m]: c for m, c in x.terms.items()}

    def to_element(self, vec: dict, key) -> OperadElement:
        ms, _ = self.basis(key)
        return self.ctx.element({ms[c]: v for c, v in vec.items()})

    # -- ideal blocks ---------------------------------------------------------

    def in_caps(self, key) -> bool:
        return key[0] <= self.max_arity and key[1] <= self.max_weight

    def block(self, key) -> Echelon:
        cached = self._blocks.get(key)
        if cached is not None:
            return cached
        if not self.in_caps(key):
            raise OutsideCaps(f"block {key} exceeds caps arity<={self.max_arity}, weight<={self.max_weight}")
        ech = Echelon()
        ms, index = self.basis(key)
        if ms:
            n, w, deg, grading = key
            for seed in self._seeds.get(key, []):
                ech.insert(self.to_vector(seed, key))
            ctx = self.ctx
            for G, ar, wt, gdeg, ggrad in self._builders:
                sub_n = n - ar + 1
                if sub_n < 1 or w - wt < 0:
                    continue
                sub_key = (sub_n, w - wt, deg - gdeg, tuple(a - b for a, b in zip(grading, ggrad)))
                sub = self.block(sub_key)
                if not len(sub):
                    continue
                for row in sub.basis():
                    u = self.to_element(row, sub_key)
                    for a in range(1, ar + 1):
                        ech.insert(self.to_vector(ctx.compose(G, a, u), key))
                    for b in range(1, sub_n + 1):
                        ech.insert(self.to_vector(ctx.compose(u, b, G), key))
            self._close_symmetric(ech, key)
        self._blocks[key] = ech
        return ech

    def _close_symmetric(self, ech: Echelon, key) -> None:
        n = key[0]
        if n < 2 or not len(ech):
            return
        ctx = self.ctx
        transpositions = [Permutation.from_cycles(n, [(k, k + 1)]) for k in range(1, n)]
        queue = list(ech.basis())
        while queue:
            row = queue.pop()
            u = self.to_element(row, key)
            for t in transpositions:
                v = self.to_vector(ctx.act(t, u), key)
                if ech.insert(v):
                    queue.append(v)

    def elements(self, key) -> list[OperadElement]:
        return [self.to_element(row, key) for row in self.block(key).basis()]

    def dim(self, key) -> int:
        return len(self.block(key))

    # -- membership ------------------------------------------------------------

    def member(self, x: OperadElement) -> Membership:
        """Exact decision; the certificate expresses ``x`` in the block bases."""
        result = Membership(True)
        for key, comp in sorted(self.split(x).items(), key=lambda kv: repr(kv[0])):
            if not self.in_caps(key):
                raise OutsideCaps(f"component in block {key} lies outside the caps")
            ech = self.block(key)
            coeffs = ech.solve(self.to_vector(comp, key))
            if coeffs is None:
                result.member = False
                result.residual_blocks.append(key)
                continue
            pivots = sorted(ech.rows)
            pos = {p: k for k, p in enumerate(pivots)}
            for p, c in sorted(coeffs.items()):
                result.certificate.append((key, pos[p], c))
        return result

    def reconstruct(self, certificate) -> OperadElement:
        out = self.ctx.zero()
        for key, idx, c in certificate:
            out = out + c * self.elements(key)[idx]
        return out


def ideal_span(pres: OperadPresentation, max_arity: int = 3, max_weight: int = 3) -> IdealSpan:
    return IdealSpan(pres, max_arity, max_weight)


def member(x: OperadElement, span: IdealSpan) -> Membership:
    return span.member(x)


# -- ideal criterion ----------------------------------------------------


@dataclass
class RelationCheck:
    name: str
    h_image: OperadElement
    member: bool
    certificate: list


def check_h_preserves_ideal(pres: OperadPresentation, span: IdealSpan, sdr: OperadSdr | None = None) -> list[RelationCheck]:
    """``h_C(r)`` lies in the ideal for every generating relation ``r``."""
    if pres.h_gen is None:
        raise NotWeightHomogeneous(f"{pres.name} has no contracting homotopy on its generators")
    sdr = sdr or OperadSdr(pres.ctx, pres.h_gen)
    out = []
    for rel in pres.ideal_relations:
        image = sdr.h_vertexwise(rel.element)
        res = span.member(image)
        out.append(RelationCheck(rel.name, image, res.member, res.certificate))
    return out


# -- homology --------------------------------------------------------------------------


@dataclass
class BlockHomology:
    arity: int
    weight: int
    basis: dict = field(default_factory=dict)
    ideal: dict = field(default_factory=dict)
    homology: dict = field(default_factory=dict)
    closed: bool = True

    def euler_ok(self) -> bool:
        lhs = sum((-1) ** (k % 2) * (self.basis.get(k, 0) - self.ideal.get(k, 0)) for k in self.basis)
        rhs = sum((-1) ** (k % 2) * v for k, v in self.homology.items())
        return lhs == rhs

    def total_homology(self) -> int:
        return sum(self.homology.values())


def homology_block(span: IdealSpan, n: int, w: int) -> BlockHomology:
    """Homology of ``(P/I)(n)`` in weight ``w``, summed over extra gradings."""
    ctx = span.ctx
    out = BlockHomology(n, w)
    keys = span.block_keys(n, w)
    by_grading: dict = {}
    for key in keys:
        by_grading.setdefault(key[3], []).append(key)
    for grading, gkeys in sorted(by_grading.items()):
        degs = sorted(k[2] for k in gkeys)
        quot: dict = {}
        rank_d: dict = {}
        for deg in degs:
            key = (n, w, deg, grading)
            ms, _ = span.basis(key)
            dim_i = span.dim(key)
            out.basis[deg] = out.basis.get(deg, 0) + len(ms)
            out.ideal[deg] = out.ideal.get(deg, 0) + dim_i
            quot[deg] = len(ms) - dim_i
            up = (n, w, deg + 1, grading)
            target_ms, _ = span.basis(up)
            if not target_ms:
                rank_d[deg] = 0
                continue
            ech = span.block(up).copy()
            base = len(ech)
            for row in span.block(key).basis():
                image = ctx.differential(span.to_element(row, key))
                if image and not ech.contains(span.to_vector(image, up)):
                    out.closed = False
            for m in ms:
                image = ctx.differential(ctx.monomial(m))
                if image:
                    ech.insert(span.to_vector(image, up))
            rank_d[deg] = len(ech) - base
        for deg in degs:
            h = quot[deg] - rank_d.get(deg, 0) - rank_d.get(deg - 1, 0)
            out.homology[deg] = out.homology.get(deg, 0) + h
    out.basis = dict(sorted(out.basis.items()))
    out.ideal = dict(sorted(out.ideal.items()))
    out.homology = {k: v for k, v in sorted(out.homology.items()) if v}
    return out


@dataclass
class HomologyReport:
    name: str
    max_arity: int
    max_weight: int
    blocks: list[BlockHomology]

    def passed(self) -> bool:
        for b in self.blocks:
            if not b.closed or not b.euler_ok():
                return False
            if b.weight == 0 and b.homology != {0: 1}:
                return False
            if b.weight > 0 and b.homology:
                return False
        return True


class Unsupported(ValueError):
    pass


def truncated_homology(pres: OperadPresentation, max_arity: int, max_weight: int, span: IdealSpan | None = None) -> HomologyReport:
    if not pres.differential_is_weight_homogeneous():
        raise Unsupported(
            f"the differential of {pres.name} does not preserve weight, so (arity, weight) blocks are not subcomplexes"
        )
    span = span or IdealSpan(pres, max_arity, max_weight)
    blocks = [homology_block(span, n, w) for n in range(1, max_arity + 1) for w in range(0, max_weight + 1)]
    return HomologyReport(pres.name, max_arity, max_weight, blocks)
