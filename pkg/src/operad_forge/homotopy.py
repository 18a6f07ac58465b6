"""Contracting homotopy of a relatively free operad onto its base operad.

Given a contraction ``h`` of the generator Sigma-module, ``OperadSdr``
realizes the operad-level homotopy two ways: vertex averaging (primary)
and the composition recursion with weights ``v/(v+w)``, ``w/(v+w)`` (oracle).
"""
from __future__ import annotations

from dataclasses import dataclass, field
from fractions import Fraction
from typing import Mapping

from .freeop import FreeOperad, OperadElement, boxes_preorder, is_leaf, leaves_of, weight_of
from .kernel import Permutation


class DecompositionError(RuntimeError):
    pass


class OperadSdr:
    """``i``: base operad into P, ``p``: kill positive weight, ``h``: the homotopy."""

    def __init__(self, ctx: FreeOperad, h_gen: Mapping[str, OperadElement]):
        self.ctx = ctx
        self.h_gen = {}
        for name, image in h_gen.items():
            gen = ctx.generators[name]
            if image and (image.arity() != gen.arity or image.degree() != gen.degree - 1):
                raise ValueError(f"h({name}) must have arity {gen.arity} and degree {gen.degree - 1}")
            if image:
                self.h_gen[name] = image
        self._vert: dict = {}
        self._rec: dict = {}

    # -- i and p ------------------------------------------------------------

    def ip(self, x: OperadElement) -> OperadElement:
        return self.ctx.element({m: c for m, c in x.terms.items() if weight_of(m) == 0})

    # -- vertex averaging ------------------------------------------------------

    def h_vertexwise(self, x: OperadElement) -> OperadElement:
        out = self.ctx.zero()
        for m, c in x.terms.items():
            out = out + c * self._h_vert_monomial(m)
        return out

    def _h_vert_monomial(self, m) -> OperadElement:
        cached = self._vert.get(m)
        if cached is not None:
            return cached
        ctx = self.ctx
        names = boxes_preorder(m)
        total = ctx.zero()
        before = 0
        for k, name in enumerate(names):
            image = self.h_gen.get(name)
            if image is not None:
                piece = ctx.substitute(m, lambda idx, nm, k=k, image=image: image if idx == k else None)
                total = total + (-piece if before % 2 else piece)
            before += ctx.generators[name].degree
        if names:
            total = total * Fraction(1, len(names))
        self._vert[m] = total
        return total

    # -- composition recursion -------------------------------------------------

    def h_recursive(self, x: OperadElement) -> OperadElement:
        out = self.ctx.zero()
        for m, c in x.terms.items():
            out = out + c * self._h_rec_monomial(m)
        return out

    def h_of_composite(self, x: OperadElement, i: int, y: OperadElement) -> OperadElement:
        """``h(x o_i y)`` from ``h(x)`` and ``h(y)`` for homogeneous x, y."""
        ctx = self.ctx
        if not x or not y:
            return ctx.zero()
        v, w = x.weight(), y.weight()
        if v + w == 0:
            return ctx.zero()
        out = ctx.zero()
        if v:
            out = out + Fraction(v, v + w) * ctx.compose(self.h_recursive(x), i, y)
        if w:
            sign = -1 if x.degree() % 2 else 1
            out = out + sign * Fraction(w, v + w) * ctx.compose(x, i, self.h_recursive(y))
        return out

    def _h_rec_monomial(self, m) -> OperadElement:
        cached = self._rec.get(m)
        if cached is not None:
            return cached
        ctx = self.ctx
        if weight_of(m) == 0:
            result = ctx.zero()
        else:
            plan = self._split(m)
            if plan is None:
                # generator corolla with permuted leaves
                name = m[2][0][1]
                perm, eps = self._align(ctx.gen(name), list(leaves_of(m)), m)
                image = self.h_gen.get(name)
                result = eps * ctx.act(perm, image) if image is not None else ctx.zero()
            else:
                x, k, y, orig = plan
                perm, eps = self._align(ctx.compose(x, k, y), orig, m)
                result = eps * ctx.act(perm, self.h_of_composite(x, k, y))
        self._rec[m] = result
        return result

    def _align(self, element: OperadElement, orig: list[int], m) -> tuple[Permutation, int]:
        """Permutation sending leaf c of ``element`` to ``orig[c-1]``, and the sign matching ``m``."""
        perm = Permutation(orig).inverse()
        moved = self.ctx.act(perm, element)
        eps = moved.coefficient(m)
        if len(moved) != 1 or eps not in (1, -1):
            raise DecompositionError(f"decomposition does not reproduce {self.ctx.to_str(m)}")
        return perm, int(eps)

    def _split(self, m):
        """Write ``m`` as ``x o_k y`` up to relabeling; None for generator corollas.

        Returns (x, k, y, orig) where ``orig[c-1]`` is the label in ``m`` of
        leaf ``c`` of ``x o_k y``.
        """
        ctx = self.ctx
        _, dec, kids = m
        box_pos = next((p for p, c in enumerate(kids) if not is_leaf(c)), None)
        if len(kids) > 1:
            # cut the first box child off the root
            sub = kids[box_pos]
            marker = min(leaves_of(sub))
            raw_x = ("o", dec, kids[:box_pos] + (marker,) + kids[box_pos + 1:])
            raw_y = ("o", ctx.base.unit(), (sub,))
            return self._assemble(raw_x, marker, raw_y)
        box = kids[0]
        _, name, bkids = box
        for p, c in enumerate(bkids):
            if not (len(c[2]) == 1 and is_leaf(c[2][0]) and ctx.base.is_unit(1, c[1])):
                marker = min(leaves_of(c))
                trivial = ("o", ctx.base.unit(), (marker,))
                raw_x = ("o", dec, (("b", name, bkids[:p] + (trivial,) + bkids[p + 1:]),))
                return self._assemble(raw_x, marker, c)
        return None

    def _assemble(self, raw_x, marker: int, raw_y):
        ctx = self.ctx
        x_labels = sorted(leaves_of(raw_x))
        y_labels = sorted(leaves_of(raw_y))
        xmap = {lab: pos for pos, lab in enumerate(x_labels, start=1)}
        ymap = {lab: pos for pos, lab in enumerate(y_labels, start=1)}
        x = ctx.monomial(_relabel(raw_x, xmap))
        y = ctx.monomial(_relabel(raw_y, ymap))
        k = xmap[marker]
        orig = x_labels[: k - 1] + y_labels + x_labels[k:]
        return x, k, y, orig

    # -- shared -------------------------------------------------------------------

    def h(self, x: OperadElement) -> OperadElement:
        return self.h_vertexwise(x)


def _relabel(node, mapping):
    if isinstance(node, int):
        return mapping[node]
    return (node[0], node[1], tuple(_relabel(c, mapping) for c in node[2]))


@dataclass
class SdrBlockResult:
    arity: int
    weight: int
    monomials: int
    failures: list[str] = field(default_factory=list)


def verify_block(sdr: OperadSdr, n: int, w: int, check_recursive: bool = True) -> SdrBlockResult:
    """Homotopy equation, equivariance and oracle agreement on one (arity, weight) block."""
    ctx = sdr.ctx
    basis = ctx.enumerate_basis(n, w)
    result = SdrBlockResult(n, w, len(basis))
    transpositions = [Permutation.from_cycles(n, [(k, k + 1)]) for k in range(1, n)]
    for m in basis:
        x = ctx.monomial(m)
        text = ctx.to_str(m)
        hx = sdr.h_vertexwise(x)
        if hx and (hx.degree() != x.degree() - 1 or hx.weights() != {w}):
            result.failures.append(f"h({text}) is not of degree -1 and weight {w}")
        lhs = ctx.differential(hx) + sdr.h_vertexwise(ctx.differential(x))
        if lhs != x - sdr.ip(x):
            result.failures.append(f"dh + hd != 1 - ip on {text}")
        for t in transpositions:
            if sdr.h_vertexwise(ctx.act(t, x)) != ctx.act(t, hx):
                result.failures.append(f"h not equivariant under {t!r} on {text}")
        if check_recursive:
            try:
                if sdr.h_recursive(x) != hx:
                    result.failures.append(f"recursive and vertexwise homotopies differ on {text}")
            except DecompositionError as exc:
                result.failures.append(str(exc))
    return result


class NoHomotopy(ValueError):
    """The presentation declares no contraction of its generators."""


@dataclass
class SdrReport:
    name: str
    max_arity: int
    max_weight: int
    blocks: list[SdrBlockResult]

    def passed(self) -> bool:
        return all(not b.failures for b in self.blocks)


def verify_operad_sdr(pres, max_arity: int, max_weight: int, check_recursive: bool = True,
                      block_map=map) -> SdrReport:
    """Run :func:`verify_block` on every (arity, weight) block within the caps.

    ``block_map`` may be replaced by an order-preserving parallel map; it is
    called with a function of ``(n, w)`` and the list of blocks.
    """
    if pres.h_gen is None:
        raise NoHomotopy(f"{pres.name} declares no contracting homotopy on its generators")
    sdr = OperadSdr(pres.ctx, pres.h_gen)
    keys = [(n, w) for n in range(1, max_arity + 1) for w in range(0, max_weight + 1)]
    blocks = list(block_map(lambda key: verify_block(sdr, key[0], key[1], check_recursive), keys))
    return SdrReport(pres.name, max_arity, max_weight, blocks)
