"""DG operad morphisms given on generators, checked modulo the target ideal."""
from __future__ import annotations

import os
from dataclasses import dataclass, field

from .expressions import ParseError, parse_element
from .freeop import OperadElement, leaves_of, weight_of
from .presentations import OperadPresentation, builtin, parse_presentation
from .quotient import IdealSpan, NotWeightHomogeneous


class IllTyped(ValueError):
    pass


@dataclass
class MorphismSpec:
    """``images`` covers the primary generators of the source; a derived
    generator ``d_g`` is sent to ``d(image of g)`` unless given explicitly."""

    name: str
    source: OperadPresentation
    target: OperadPresentation
    images: dict[str, OperadElement]

    def __post_init__(self):
        src, tgt = self.source.ctx, self.target.ctx
        for gname in self.images:
            if gname not in src.generators:
                raise IllTyped(f"{gname} is not a generator of {self.source.name}")
        for derived, parent in self.source.derived.items():
            if derived not in self.images and parent in self.images:
                self.images[derived] = tgt.differential(self.images[parent])
        for gname, gen in src.generators.items():
            if gname not in self.images:
                raise IllTyped(f"no image given for generator {gname}")
            image = self.images[gname]
            if image.ctx is not tgt:
                raise IllTyped(f"image of {gname} does not live in {self.target.name}")
            if image and (image.arity() != gen.arity or image.degree() != gen.degree):
                raise IllTyped(
                    f"image of {gname} must have arity {gen.arity} and degree {gen.degree}, got {image}"
                )

    def apply(self, x: OperadElement) -> OperadElement:
        out = self.target.ctx.zero()
        src = self.source.ctx
        for m, c in x.terms.items():
            out = out + c * src.substitute(m, lambda k, name: self.images[name], target=self.target.ctx)
        return out


def compose_morphisms(f: MorphismSpec, g: MorphismSpec) -> MorphismSpec:
    """``g o f``."""
    images = {name: g.apply(img) for name, img in f.images.items()}
    return MorphismSpec(f"{f.name} ; {g.name}", f.source, g.target, images)


@dataclass
class Obligation:
    label: str
    element: OperadElement
    status: str = "pending"  # ok | fail | skipped
    detail: str = ""


@dataclass
class MorphismReport:
    name: str
    obligations: list[Obligation] = field(default_factory=list)
    max_arity: int = 0
    max_weight: int = 0
    note: str = ""

    @property
    def verdict(self) -> str:
        statuses = {o.status for o in self.obligations}
        if "fail" in statuses:
            return "fail"
        if "skipped" in statuses or self.note:
            return "incomplete"
        return "pass"


def _extent(x: OperadElement) -> tuple[int, int]:
    if not x:
        return 0, 0
    return max(len(leaves_of(m)) for m in x.terms), max(weight_of(m) for m in x.terms)


def _discharge(obligations: list[Obligation], target: OperadPresentation, report: MorphismReport,
               max_arity: int | None, max_weight: int | None) -> None:
    needed_a = max((_extent(o.element)[0] for o in obligations), default=1)
    needed_w = max((_extent(o.element)[1] for o in obligations), default=0)
    cap_a = needed_a if max_arity is None else max_arity
    cap_w = needed_w if max_weight is None else max_weight
    report.max_arity, report.max_weight = cap_a, cap_w
    try:
        span = IdealSpan(target, max(cap_a, 1), cap_w)
    except NotWeightHomogeneous as exc:
        report.note = f"target ideal is not weight-graded: {exc}"
        for o in obligations:
            o.status = "ok" if not o.element else "skipped"
        return
    for o in obligations:
        if not o.element:
            o.status = "ok"
            continue
        a, w = _extent(o.element)
        if a > cap_a or w > cap_w:
            o.status = "skipped"
            o.detail = f"needs arity {a}, weight {w} beyond caps"
            continue
        res = span.member(o.element)
        if res.member:
            o.status = "ok"
            o.detail = f"certificate of {len(res.certificate)} terms"
        else:
            o.status = "fail"
            o.detail = f"not in the ideal: {o.element}"


def check_morphism(m: MorphismSpec, max_arity: int | None = None, max_weight: int | None = None) -> MorphismReport:
    """Differential compatibility and relation preservation modulo the target ideal.

    Caps default to the extent of the obligations themselves.
    """
    src, tgt = m.source.ctx, m.target.ctx
    report = MorphismReport(m.name)
    obligations = []
    for gname in src.generators:
        lhs = m.apply(src.differential(src.gen(gname)))
        rhs = tgt.differential(m.images[gname])
        obligations.append(Obligation(f"d({gname})", lhs - rhs))
    for rel in m.source.ideal_relations:
        obligations.append(Obligation(f"rel {rel.name}", m.apply(rel.element)))
    _discharge(obligations, m.target, report, max_arity, max_weight)
    report.obligations = obligations
    return report


def check_same_on_generators(f: MorphismSpec, g: MorphismSpec, max_arity: int | None = None,
                             max_weight: int | None = None) -> MorphismReport:
    """``f`` and ``g`` agree on every source generator modulo the target ideal."""
    report = MorphismReport(f"{f.name} == {g.name}")
    obligations = [Obligation(f"{name}", f.images[name] - g.images[name]) for name in f.source.ctx.generators]
    _discharge(obligations, f.target, report, max_arity, max_weight)
    report.obligations = obligations
    return report


# -- built-ins -------------------------------------------------------------------

BUILTIN_MORPHISMS = (
    "BV->EBV",
    "CBV->BV",
    "J->EBV",
    "CBV->J",
    "CBVmodDelta->J",
    "CBVmodDelta->BVmodDelta",
    "CBVmodDelta->ECBV",
    "ECBV->EBV",
)


def builtin_morphism(name: str, index_cap: int = 3, presentations: dict | None = None) -> MorphismSpec:
    if name not in BUILTIN_MORPHISMS:
        raise KeyError(f"unknown morphism {name!r}; choose from {', '.join(BUILTIN_MORPHISMS)}")
    cache = presentations if presentations is not None else {}

    def pres(nm):
        if nm not in cache:
            cache[nm] = builtin(nm, index_cap)
        return cache[nm]

    src_name, tgt_name = name.split("->")
    src, tgt = pres(src_name), pres(tgt_name)
    T = tgt.ctx
    N = index_cap
    images: dict = {}
    if name == "BV->EBV":
        images["Delta"] = -T.gen("d_i")
    elif name == "CBV->BV":
        images["Delta_1"] = T.gen("Delta")
        images.update({f"Delta_{n}": T.zero() for n in range(2, N + 1)})
    elif name == "J->EBV":
        images.update(i=T.gen("i"), j=T.zero())
    elif name in ("CBV->J", "CBVmodDelta->J"):
        images["Delta_1"] = -T.gen("d_i")
        if N >= 2:
            images["Delta_2"] = -T.word("j", "i")
        images.update({f"Delta_{n}": T.zero() for n in range(3, N + 1)})
        if name == "CBVmodDelta->J":
            images["phi_1"] = T.gen("i")
            images.update({f"phi_{n}": T.zero() for n in range(2, N + 1)})
    elif name == "CBVmodDelta->BVmodDelta":
        images["Delta_1"] = T.gen("Delta")
        images.update({f"Delta_{n}": T.zero() for n in range(2, N + 1)})
        images.update({f"phi_{n}": T.gen(f"phi_{n}") for n in range(1, N + 1)})
    elif name == "CBVmodDelta->ECBV":
        # Delta_n = [i_n, d] at the algebra level, which is -d(i_n) operadically
        images.update({f"Delta_{n}": -T.gen(f"d_i_{n}") for n in range(1, N + 1)})
        images.update({f"phi_{n}": T.gen(f"i_{n}") for n in range(1, N + 1)})
    elif name == "ECBV->EBV":
        images["i_1"] = T.gen("i")
        images.update({f"i_{n}": T.zero() for n in range(2, N + 1)})
    return MorphismSpec(name, src, tgt, images)


def composite_consistency(index_cap: int = 3) -> MorphismReport:
    """(CBV -> J -> EBV) agrees with (CBV -> BV -> EBV) modulo the EBV ideal."""
    cache: dict = {}
    left = compose_morphisms(builtin_morphism("CBV->J", index_cap, cache), builtin_morphism("J->EBV", index_cap, cache))
    right = compose_morphisms(builtin_morphism("CBV->BV", index_cap, cache), builtin_morphism("BV->EBV", index_cap, cache))
    return check_same_on_generators(left, right)


# -- file format --------------------------------------------------------------------


def _load_presentation(ref: str, base_dir: str, index_cap: int) -> OperadPresentation:
    if ref.startswith("builtin:"):
        return builtin(ref[len("builtin:"):], index_cap)
    path = ref if os.path.isabs(ref) else os.path.join(base_dir, ref)
    with open(path, encoding="utf-8") as fh:
        return parse_presentation(fh.read(), name=os.path.basename(path))


def parse_morphism(text: str, base_dir: str = ".", index_cap: int = 3, name: str = "file") -> MorphismSpec:
    """Lines ``source <ref>``, ``target <ref>``, ``map <gen> -> <expr>``.

    ``<ref>`` is ``builtin:NAME`` or a presentation file path (relative to
    the morphism file).
    """
    source = target = None
    maps = []
    for lineno, raw in enumerate(text.splitlines(), start=1):
        line = raw.split("#", 1)[0].strip()
        if not line:
            continue
        head, _, rest = line.partition(" ")
        rest = rest.strip()
        try:
            if head == "source":
                source = _load_presentation(rest, base_dir, index_cap)
            elif head == "target":
                target = _load_presentation(rest, base_dir, index_cap)
            elif head == "map":
                gname, arrow, expr = rest.partition("->")
                if not arrow:
                    raise ParseError("map lines need '->'")
                maps.append((lineno, gname.strip(), expr.strip()))
            else:
                raise ParseError(f"unknown directive {head!r}")
        except (OSError, KeyError) as exc:
            raise ParseError(f"line {lineno}: {exc}") from None
        except ParseError as exc:
            raise ParseError(f"line {lineno}: {exc}") from None
    if source is None or target is None:
        raise ParseError("a morphism file needs both source and target lines")
    images = {}
    for lineno, gname, expr in maps:
        try:
            images[gname] = parse_element(target.ctx, expr)
        except ParseError as exc:
            raise ParseError(f"line {lineno}: {exc}") from None
    return MorphismSpec(name, source, target, images)
