"""Generators-and-relations presentations of DG operads over the commutative operad.

Built-in families: ``Com``, ``BV``, ``EBV``, ``BVmodDelta``, ``CBV``, ``J``,
``CBVmodDelta``, ``ECBV``.  Indexed generators (``Delta_n``, ``phi_n``,
``i_n``) are truncated at an index cap.
"""
from __future__ import annotations

import itertools
import math
import re
from dataclasses import dataclass, field
from fractions import Fraction

from .expressions import ParseError, commutator, parse_element
from .freeop import FreeOperad, Generator, OperadElement, boxes_preorder, leaves_of, weight_of
from .kernel import Permutation, shuffles
from .report import CheckReport

BUILTIN_NAMES = ("Com", "BV", "EBV", "BVmodDelta", "CBV", "J", "CBVmodDelta", "ECBV")


@dataclass
class Relation:
    """``kind`` is ``base`` (holds in the base operad), ``ideal`` (generates
    the ideal) or ``differential`` (records a generator differential)."""

    name: str
    element: OperadElement
    weight: int | None
    kind: str = "ideal"
    family: str = ""

    def computed_weights(self) -> set[int]:
        return self.element.weights()


@dataclass
class OperadPresentation:
    name: str
    ctx: FreeOperad
    relations: list[Relation] = field(default_factory=list)
    # contracting homotopy on the generators, or None when the generator
    # complex is not contractible
    h_gen: dict | None = None
    gradings: dict[str, dict[str, int]] = field(default_factory=dict)
    # generator whose differential is the named derived generator
    derived: dict[str, str] = field(default_factory=dict)
    index_cap: int | None = None

    @property
    def ideal_relations(self) -> list[Relation]:
        return [r for r in self.relations if r.kind == "ideal"]

    def primary_generators(self) -> list[str]:
        return [g for g in self.ctx.generators if g not in self.derived]

    def grading_of(self, node) -> tuple[int, ...]:
        if not self.gradings:
            return ()
        names = boxes_preorder(node)
        return tuple(sum(table.get(n, 0) for n in names) for _, table in sorted(self.gradings.items()))

    def differential_is_weight_homogeneous(self) -> bool:
        for name, image in self.ctx.d_images.items():
            if image and image.weights() != {1}:
                return False
        return True


# -- relation builders ---------------------------------------------------------


def order_relation(ctx: FreeOperad, D: OperadElement, order: int) -> OperadElement:
    """Operadic form of "D has order <= order": arity ``order + 1``.

    ``sum_{p+q=order+1, p>=1} (-1)^p sum_{sigma in Sh(p,q)} (mu_{q+1} o_1 (D o_1 mu_p)) . sigma^-1``
    with ``mu_1`` the unit.
    """
    n = order + 1
    out = ctx.zero()
    for p in range(1, n + 1):
        q = n - p
        inner = ctx.compose(D, 1, ctx.mu(p) if p > 1 else ctx.unit())
        outer = ctx.compose(ctx.mu(q + 1), 1, inner) if q > 0 else inner
        sign = -1 if p % 2 else 1
        for sigma in shuffles(p, q):
            out = out + sign * ctx.act(sigma.inverse(), outer)
    return out


def seven_term_relation(ctx: FreeOperad, D: OperadElement) -> OperadElement:
    """``(mu3 o_1 D).[()+(1 2)+(1 2 3)] + D.mu3 - (mu o_1 (D.mu)).[()+(2 3)+(1 3 2)]``."""
    left = ctx.compose(ctx.mu(3), 1, D)
    first = sum((ctx.act(Permutation.from_cycles(3, c), left) for c in ([], [(1, 2)], [(1, 2, 3)])), ctx.zero())
    right = ctx.compose(ctx.mu(2), 1, ctx.compose(D, 1, ctx.mu(2)))
    third = sum((ctx.act(Permutation.from_cycles(3, c), right) for c in ([], [(2, 3)], [(1, 3, 2)])), ctx.zero())
    return first + ctx.compose(D, 1, ctx.mu(3)) - third


def _base_relations(ctx: FreeOperad) -> list[Relation]:
    mu = ctx.mu()
    return [
        Relation("d(mu)", ctx.differential(mu), 0, "base", "base"),
        Relation("assoc", ctx.compose(mu, 1, mu) - ctx.compose(mu, 2, mu), 0, "base", "base"),
    ]


def _compositions(n: int, parts: int):
    for cuts in itertools.combinations(range(1, n), parts - 1):
        bounds = (0,) + cuts + (n,)
        yield tuple(bounds[k + 1] - bounds[k] for k in range(parts))


def _phi_differentials(ctx: FreeOperad, cap: int, delta_for) -> None:
    """``d(phi_n) = -Delta_n - sum_{p>=2} 1/p! sum [phi_q1, ... [phi_q(p-1), d(phi_qp)]...]``."""
    for n in range(1, cap + 1):
        image = -delta_for(n)
        for p in range(2, n + 1):
            for qs in _compositions(n, p):
                inner = ctx.d_images.get(f"phi_{qs[-1]}", ctx.zero())
                for q in reversed(qs[:-1]):
                    inner = commutator(ctx, ctx.gen(f"phi_{q}"), inner)
                image = image - Fraction(1, math.factorial(p)) * inner
        ctx.set_differential(f"phi_{n}", image)


def _differential_records(ctx: FreeOperad, names) -> list[Relation]:
    out = []
    for name in names:
        image = ctx.d_images.get(name, ctx.zero())
        out.append(Relation(f"d({name})", image, None, "differential", "differential"))
    return out


# -- built-ins --------------------------------------------------------------------


def builtin(name: str, index_cap: int = 3) -> OperadPresentation:
    if name not in BUILTIN_NAMES:
        raise KeyError(f"unknown presentation {name!r}; choose from {', '.join(BUILTIN_NAMES)}")
    if index_cap < 1:
        raise ValueError("index cap must be positive")
    return _BUILDERS[name](index_cap)


def _com(cap):
    ctx = FreeOperad()
    return OperadPresentation("Com", ctx, _base_relations(ctx), h_gen={})


def _ebv(cap):
    ctx = FreeOperad([Generator("i", 1, -2), Generator("d_i", 1, -1)])
    ctx.set_differential("i", ctx.gen("d_i"))
    i, di = ctx.gen("i"), ctx.gen("d_i")
    rels = _base_relations(ctx) + [
        Relation("comm", ctx.compose(i, 1, di) - ctx.compose(di, 1, i), 2, family="comm"),
        Relation("order2(i)", seven_term_relation(ctx, i), 1, family="order"),
    ]
    return OperadPresentation("EBV", ctx, rels, h_gen={"d_i": i}, derived={"d_i": "i"})


def _jacobi(cap):
    ctx = FreeOperad([Generator("i", 1, -2), Generator("d_i", 1, -1), Generator("j", 1, -1), Generator("d_j", 1, 0)])
    ctx.set_differential("i", ctx.gen("d_i"))
    ctx.set_differential("j", ctx.gen("d_j"))
    i, j = ctx.gen("i"), ctx.gen("j")
    w = ctx.word
    mu = ctx.mu()
    leibniz = ctx.compose(mu, 1, j)
    leibniz = leibniz + ctx.act(Permutation.from_cycles(2, [(1, 2)]), leibniz) - ctx.compose(j, 1, mu)
    rels = _base_relations(ctx) + [
        Relation("comm", w("i", "d_i") - w("d_i", "i") - 2 * w("j", "i"), 2, family="comm"),
        Relation("[i,j]", w("i", "j") - w("j", "i"), 2, family="comm"),
        Relation("[d_i,j]", w("d_i", "j") + w("j", "d_i"), 2, family="comm"),
        Relation("j^2", w("j", "j"), 2, family="square"),
        Relation("order1(j)", leibniz, 1, family="order"),
        Relation("order2(i)", seven_term_relation(ctx, i), 1, family="order"),
    ]
    return OperadPresentation("J", ctx, rels, h_gen={"d_i": i, "d_j": j}, derived={"d_i": "i", "d_j": "j"})


def _ecbv(cap):
    gens = []
    for n in range(1, cap + 1):
        gens += [Generator(f"i_{n}", 1, -2 * n), Generator(f"d_i_{n}", 1, 1 - 2 * n)]
    ctx = FreeOperad(gens)
    for n in range(1, cap + 1):
        ctx.set_differential(f"i_{n}", ctx.gen(f"d_i_{n}"))
    g = ctx.gen
    rels = _base_relations(ctx)
    for n in range(1, cap + 1):
        for m in range(n, cap + 1):
            rels.append(Relation(f"[i_{n},i_{m}]", commutator(ctx, g(f"i_{n}"), g(f"i_{m}")), 2, family="comm"))
    for n in range(2, cap + 2):
        total = ctx.zero()
        for j in range(1, n):
            total = total + commutator(ctx, g(f"i_{j}"), g(f"d_i_{n - j}"))
        rels.append(Relation(f"sum{n}", total, 2, family="sum"))
    for n in range(1, cap + 1):
        rels.append(Relation(f"order{n + 1}(i_{n})", order_relation(ctx, g(f"i_{n}"), n + 1), 1, family="order"))
    index = {}
    for n in range(1, cap + 1):
        index[f"i_{n}"] = index[f"d_i_{n}"] = n
    return OperadPresentation(
        "ECBV", ctx, rels,
        h_gen={f"d_i_{n}": g(f"i_{n}") for n in range(1, cap + 1)},
        gradings={"index": index},
        derived={f"d_i_{n}": f"i_{n}" for n in range(1, cap + 1)},
        index_cap=cap,
    )


def _bv(cap):
    ctx = FreeOperad([Generator("Delta", 1, -1)])
    D = ctx.gen("Delta")
    rels = _base_relations(ctx) + [
        Relation("Delta^2", ctx.compose(D, 1, D), 2, family="square"),
        Relation("order2(Delta)", seven_term_relation(ctx, D), 1, family="order"),
    ]
    return OperadPresentation("BV", ctx, rels)


def _cbv_generators(ctx: FreeOperad, cap: int) -> None:
    for n in range(1, cap + 1):
        ctx.add_generator(Generator(f"Delta_{n}", 1, 1 - 2 * n))
    for n in range(1, cap + 1):
        image = ctx.zero()
        for k in range(1, n):
            image = image - ctx.word(f"Delta_{k}", f"Delta_{n - k}")
        ctx.set_differential(f"Delta_{n}", image)


def _cbv_order_relations(ctx: FreeOperad, cap: int) -> list[Relation]:
    return [
        Relation(f"order{n + 1}(Delta_{n})", order_relation(ctx, ctx.gen(f"Delta_{n}"), n + 1), 1, family="order")
        for n in range(1, cap + 1)
    ]


def _cbv(cap):
    ctx = FreeOperad()
    _cbv_generators(ctx, cap)
    rels = _base_relations(ctx) + _cbv_order_relations(ctx, cap)
    rels += _differential_records(ctx, [f"Delta_{n}" for n in range(1, cap + 1)])
    index = {f"Delta_{n}": n for n in range(1, cap + 1)}
    return OperadPresentation("CBV", ctx, rels, gradings={"index": index}, index_cap=cap)


def _bv_mod_delta(cap):
    ctx = FreeOperad([Generator("Delta", 1, -1)])
    for n in range(1, cap + 1):
        ctx.add_generator(Generator(f"phi_{n}", 1, -2 * n))
    _phi_differentials(ctx, cap, lambda n: ctx.gen("Delta") if n == 1 else ctx.zero())
    D = ctx.gen("Delta")
    rels = _base_relations(ctx) + [
        Relation("Delta^2", ctx.compose(D, 1, D), 2, family="square"),
        Relation("order2(Delta)", seven_term_relation(ctx, D), 1, family="order"),
    ]
    rels += _differential_records(ctx, [f"phi_{n}" for n in range(1, cap + 1)])
    index = {"Delta": 1, **{f"phi_{n}": n for n in range(1, cap + 1)}}
    return OperadPresentation("BVmodDelta", ctx, rels, gradings={"index": index}, index_cap=cap)


def _cbv_mod_delta(cap):
    ctx = FreeOperad()
    _cbv_generators(ctx, cap)
    for n in range(1, cap + 1):
        ctx.add_generator(Generator(f"phi_{n}", 1, -2 * n))
    _phi_differentials(ctx, cap, lambda n: ctx.gen(f"Delta_{n}"))
    rels = _base_relations(ctx) + _cbv_order_relations(ctx, cap)
    rels += _differential_records(ctx, [f"Delta_{n}" for n in range(1, cap + 1)] + [f"phi_{n}" for n in range(1, cap + 1)])
    index = {**{f"Delta_{n}": n for n in range(1, cap + 1)}, **{f"phi_{n}": n for n in range(1, cap + 1)}}
    return OperadPresentation("CBVmodDelta", ctx, rels, gradings={"index": index}, index_cap=cap)


_BUILDERS = {
    "Com": _com,
    "BV": _bv,
    "EBV": _ebv,
    "BVmodDelta": _bv_mod_delta,
    "CBV": _cbv,
    "J": _jacobi,
    "CBVmodDelta": _cbv_mod_delta,
    "ECBV": _ecbv,
}


# -- text format -------------------------------------------------------------------

_GEN_LINE = re.compile(
    r"gen\s+(?P<name>[A-Za-z_][A-Za-z0-9_]*)\s+arity=(?P<arity>\d+)\s+degree=(?P<degree>-?\d+)"
    r"(?:\s+symmetry=(?P<sym>\w+))?\s+d->(?P<d>.*)$"
)
_REL_LINE = re.compile(r"rel\s+(?P<name>\S+)\s*:\s*(?P<lhs>.*?)\s*=\s*(?P<rhs>.*)$")
_H_LINE = re.compile(r"h\s+(?P<name>[A-Za-z_][A-Za-z0-9_]*)\s*->\s*(?P<image>.*)$")
_GRADING_LINE = re.compile(r"grading\s+(?P<name>\w+)\s+(?P<rest>.*)$")


def parse_presentation(text: str, name: str = "file") -> OperadPresentation:
    """Read ``gen``/``rel``/``h``/``grading`` lines (``#`` starts a comment).

    A generator whose differential is exactly another generator ``g'``
    records ``g'`` as derived, so morphisms need only name the images of
    the others.  Any ``h`` line declares the generator complex contractible.
    """
    lines = []
    for lineno, raw in enumerate(text.splitlines(), start=1):
        line = raw.split("#", 1)[0].strip()
        if line:
            lines.append((lineno, line))
    ctx = FreeOperad()
    pending_d = []
    for lineno, line in lines:
        if line.startswith("gen"):
            m = _GEN_LINE.match(line)
            if not m:
                raise ParseError(f"line {lineno}: malformed generator line")
            try:
                ctx.add_generator(Generator(m["name"], int(m["arity"]), int(m["degree"]), m["sym"] or "none"))
            except ValueError as exc:
                raise ParseError(f"line {lineno}: {exc}") from None
            pending_d.append((lineno, m["name"], m["d"].strip()))
    pres = OperadPresentation(name, ctx, _base_relations(ctx))
    for lineno, gname, expr in pending_d:
        if expr == "0":
            continue
        image = _parse_at(ctx, expr, lineno)
        try:
            ctx.set_differential(gname, image)
        except ValueError as exc:
            raise ParseError(f"line {lineno}: {exc}") from None
    for gname, image in ctx.d_images.items():
        if len(image) == 1:
            (mono, coef), = image.terms.items()
            if coef == 1 and image == ctx.gen(boxes_preorder(mono)[0]) and weight_of(mono) == 1:
                pres.derived[boxes_preorder(mono)[0]] = gname
    for lineno, line in lines:
        head = line.split()[0]
        if head == "gen":
            continue
        if head == "rel":
            m = _REL_LINE.match(line)
            if not m:
                raise ParseError(f"line {lineno}: malformed relation line")
            lhs = _parse_at(ctx, m["lhs"], lineno)
            rhs = _parse_at(ctx, m["rhs"], lineno)
            if lhs and rhs and lhs.arity() != rhs.arity():
                raise ParseError(f"line {lineno}: sides of {m['name']} have different arity")
            element = lhs - rhs
            ws = element.weights()
            weight = ws.pop() if len(ws) == 1 else None
            pres.relations.append(Relation(m["name"], element, weight, family="user"))
        elif head == "h":
            m = _H_LINE.match(line)
            if not m or m["name"] not in ctx.generators:
                raise ParseError(f"line {lineno}: malformed homotopy line")
            if pres.h_gen is None:
                pres.h_gen = {}
            pres.h_gen[m["name"]] = _parse_at(ctx, m["image"], lineno)
        elif head == "grading":
            m = _GRADING_LINE.match(line)
            if not m:
                raise ParseError(f"line {lineno}: malformed grading line")
            table = {}
            for item in m["rest"].split():
                key, _, value = item.partition("=")
                if key not in ctx.generators:
                    raise ParseError(f"line {lineno}: unknown generator {key!r}")
                try:
                    table[key] = int(value)
                except ValueError:
                    raise ParseError(f"line {lineno}: bad grading value {value!r}") from None
            pres.gradings[m["name"]] = table
        else:
            raise ParseError(f"line {lineno}: unknown directive {head!r}")
    for gname in ctx.generators:
        if pres.h_gen is not None and gname in pres.h_gen and pres.h_gen[gname]:
            gen = ctx.generators[gname]
            img = pres.h_gen[gname]
            if img.arity() != gen.arity or img.degree() != gen.degree - 1:
                raise ParseError(f"h({gname}) must have arity {gen.arity} and degree {gen.degree - 1}")
    return pres


def _parse_at(ctx, expr, lineno):
    try:
        return parse_element(ctx, expr)
    except ParseError as exc:
        raise ParseError(f"line {lineno}: {exc}") from None


def format_presentation(p: OperadPresentation) -> str:
    """Text form readable by :func:`parse_presentation` (built-ins round-trip)."""
    ctx = p.ctx
    lines = []
    for g in ctx.generators.values():
        image = ctx.d_images.get(g.name)
        sym = f" symmetry={g.symmetry}" if g.symmetry != "none" else ""
        lines.append(f"gen {g.name} arity={g.arity} degree={g.degree}{sym} d->{image if image else 0}")
    for r in p.ideal_relations:
        lines.append(f"rel {r.name} : {r.element} = 0")
    if p.h_gen is not None:
        for gname in ctx.generators:
            if gname in p.h_gen:
                lines.append(f"h {gname} -> {p.h_gen[gname]}")
    for gname, table in sorted(p.gradings.items()):
        lines.append(f"grading {gname} " + " ".join(f"{k}={v}" for k, v in table.items()))
    return "\n".join(lines) + "\n"


# -- sanity checks -------------------------------------------------------------------


def check_presentation(p: OperadPresentation, max_arity: int = 3, max_weight: int = 3) -> CheckReport:
    """d^2 on generators, relation bookkeeping, symmetry closure and the generator SDR.

    ``d^2`` is accepted when it vanishes exactly or lies in the ideal.
    Differential records that do not preserve weight are flagged, not failed.
    """
    from .homotopy import OperadSdr
    from .quotient import IdealSpan, NotWeightHomogeneous

    ctx = p.ctx
    report = CheckReport(f"presentation {p.name}")
    span = None
    for name, gen in ctx.generators.items():
        image = ctx.d_images.get(name, ctx.zero())
        if image and (image.arity() != gen.arity or image.degree() != gen.degree + 1):
            report.add(f"d({name}) has arity {gen.arity} and degree {gen.degree + 1}", False, str(image))
            continue
        dd = ctx.differential(image)
        if not dd:
            report.add(f"d(d({name})) = 0", True)
            continue
        try:
            if span is None:
                span = IdealSpan(p, max_arity, max_weight)
            member = span.member(dd).member
        except (NotWeightHomogeneous, ValueError) as exc:
            report.add(f"d(d({name})) = 0 modulo the ideal", False, str(exc))
            continue
        report.add(f"d(d({name})) = 0 modulo the ideal", member, "" if member else str(dd))
    for rel in p.relations:
        x = rel.element
        if not x:
            report.add(f"{rel.name}: holds identically", True)
            continue
        arities = {len(leaves_of(m)) for m in x.terms}
        degrees = {ctx.degree_of(m) for m in x.terms}
        weights = x.weights()
        report.add(f"{rel.name}: single arity", len(arities) == 1, "" if len(arities) == 1 else str(sorted(arities)))
        report.add(f"{rel.name}: single degree", len(degrees) == 1, "" if len(degrees) == 1 else str(sorted(degrees)))
        if rel.kind == "differential":
            flag = "" if len(weights) == 1 else f"weights {sorted(weights)}: not weight-homogeneous (allowed)"
            report.add(f"{rel.name}: recorded generator differential", True, flag)
        elif rel.weight is not None:
            ok = weights == {rel.weight}
            report.add(f"{rel.name}: weight {rel.weight}", ok, "" if ok else f"weights {sorted(weights)}")
        else:
            ok = len(weights) == 1
            report.add(f"{rel.name}: weight-homogeneous", ok, "" if ok else f"weights {sorted(weights)}")
    _check_symmetry_closure(p, report)
    if p.h_gen is None:
        report.add("generator complex: no contracting homotopy declared", True, "not applicable")
    else:
        try:
            sdr = OperadSdr(ctx, p.h_gen)
        except ValueError as exc:
            report.add("generator homotopy has degree -1", False, str(exc))
        else:
            for name in ctx.generators:
                g = ctx.gen(name)
                lhs = ctx.differential(sdr.h_vertexwise(g)) + sdr.h_vertexwise(ctx.differential(g))
                ok = lhs == g
                detail = ""
                if not ok and not ctx.d_images.get(name) and name not in p.h_gen:
                    detail = f"d({name}) is not defined and h({name}) = 0"
                report.add(f"dh + hd = 1 on {name}", ok, detail or ("" if ok else f"got {lhs}"))
    return report


def _check_symmetry_closure(p: OperadPresentation, report: CheckReport) -> None:
    """Adjacent transpositions send each relation into the span of relations of its arity."""
    from .linalg import Echelon

    ctx = p.ctx
    by_arity: dict = {}
    for rel in p.ideal_relations:
        if rel.element:
            by_arity.setdefault(rel.element.arity(), []).append(rel)
    for n, rels in sorted(by_arity.items()):
        if n < 2:
            continue
        index: dict = {}

        def vec(x):
            return {index.setdefault(m, len(index)): c for m, c in x.terms.items()}

        ech = Echelon()
        for rel in rels:
            ech.insert(vec(rel.element))
        closed = True
        for rel in rels:
            for k in range(1, n):
                moved = ctx.act(Permutation.from_cycles(n, [(k, k + 1)]), rel.element)
                if not ech.contains(vec(moved)):
                    closed = False
                    report.add(f"{rel.name}: closed under (k k+1)", False, f"k = {k}")
        if closed:
            report.add(f"arity {n} relations closed under the symmetric group", True)
