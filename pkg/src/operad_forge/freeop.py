"""Relatively free operads ``O + F(C)`` realised on signed tree monomials.

Trees are plain nested tuples so they hash fast:

* a leaf is a positive ``int`` (its label),
* a circle vertex is ``("o", decoration, children)``; children are leaves or
  boxes and ``decoration`` indexes a basis element of the base operad,
* a box vertex is ``("b", generator_name, children)``; children are circles.

A monomial is always rooted at a circle.  The unit of the operad is the
circle with one leaf child.  Box vertices are never adjacent to the root or
to a leaf, and same-shape vertices are never adjacent; consecutive unary
generators are separated by unary unit circles, so the word ``i.d_i`` is
``("o",0,(("b","i",(("o",0,(("b","d_i",(("o",0,(1,)),)),)),)),))``.

Tensor order of vertex decorations is preorder (vertex, then children left
to right).  Base operads are concentrated in degree 0, so Koszul signs only
come from generators.  The canonical form sorts the children of every
circle (and of every symmetric or antisymmetric box) by ``(shape, leaves)``
and absorbs the Koszul sign of that sort into the coefficient.
"""
from __future__ import annotations

import itertools
from dataclasses import dataclass
from fractions import Fraction
from typing import Callable, Iterable, Iterator, Mapping, Sequence

from .kernel import Permutation, koszul_sign, sort_sign

LEAF_SHAPE = (0,)


class MalformedTree(ValueError):
    pass


# ---------------------------------------------------------------------------
# base operads


class BasisOperad:
    """A graded operad in degree 0 given by finite tables up to ``cap``.

    Subclasses provide ``dim``, ``compose`` and ``act``.  The action must be
    monomial: a basis element goes to a signed basis element.
    """

    name = "O"
    cap = 6

    def dim(self, n: int) -> int:
        raise NotImplementedError

    def label(self, n: int, b: int) -> str:
        raise NotImplementedError

    def compose(self, p: int, b: int, i: int, q: int, c: int) -> list[tuple[int, Fraction]]:
        """``b o_i c`` for ``b`` in O(p), ``c`` in O(q); returns a combination."""
        raise NotImplementedError

    def act(self, n: int, b: int, perm: Permutation) -> tuple[int, int]:
        """Right action ``b . perm`` as ``(basis index, sign)``."""
        raise NotImplementedError

    def unit(self) -> int:
        return 0

    def is_unit(self, n: int, b: int) -> bool:
        return n == 1 and b == self.unit()

    def lookup(self, label: str, n: int) -> int:
        for b in range(self.dim(n)):
            if self.label(n, b) == label:
                return b
        raise KeyError(label)


class CommutativeOperad(BasisOperad):
    """``C(n)`` is spanned by the n-ary product for every n >= 1."""

    name = "Com"

    def __init__(self, cap: int = 6):
        self.cap = cap

    def dim(self, n: int) -> int:
        return 1 if n >= 1 else 0

    def label(self, n: int, b: int) -> str:
        return "mu"

    def compose(self, p, b, i, q, c):
        return [(0, Fraction(1))]

    def act(self, n, b, perm):
        return 0, 1


def check_operad_axioms(base: BasisOperad, cap: int | None = None) -> list[str]:
    """Unit, associativity and equivariance on the tables, up to ``cap``.

    Returns a list of violations (empty when the tables define an operad).
    """
    cap = base.cap if cap is None else cap
    problems = []

    def comb_compose(comb, p, i, q, c):
        out: dict[int, Fraction] = {}
        for b, x in comb.items():
            for b2, y in base.compose(p, b, i, q, c):
                out[b2] = out.get(b2, 0) + x * y
        return {k: v for k, v in out.items() if v}

    u = base.unit()
    for n in range(1, cap + 1):
        for b in range(base.dim(n)):
            if dict(base.compose(1, u, 1, n, b)) != {b: 1}:
                problems.append(f"left unit fails on O({n})[{b}]")
            for i in range(1, n + 1):
                if dict(base.compose(n, b, i, 1, u)) != {b: 1}:
                    problems.append(f"right unit fails on O({n})[{b}] slot {i}")
    for p in range(1, cap + 1):
        for q in range(1, cap + 2 - p):
            for r in range(1, cap + 3 - p - q):
                if p + q + r - 2 > cap:
                    continue
                for a, b, c in itertools.product(range(base.dim(p)), range(base.dim(q)), range(base.dim(r))):
                    for i in range(1, p + 1):
                        for j in range(1, q + 1):
                            lhs = comb_compose(dict(base.compose(p, a, i, q, b)), p + q - 1, i + j - 1, r, c)
                            rhs: dict[int, Fraction] = {}
                            for bc, x in base.compose(q, b, j, r, c):
                                for k, y in base.compose(p, a, i, q + r - 1, bc):
                                    rhs[k] = rhs.get(k, 0) + x * y
                            rhs = {k: v for k, v in rhs.items() if v}
                            if lhs != rhs:
                                problems.append(f"sequential associativity fails ({p},{q},{r},{i},{j})")
    for n in range(1, cap + 1):
        for b in range(base.dim(n)):
            for s in Permutation.all(n):
                for t in Permutation.all(n):
                    b1, e1 = base.act(n, b, s)
                    b2, e2 = base.act(n, b1, t)
                    b3, e3 = base.act(n, b, s * t)
                    if (b2, e1 * e2) != (b3, e3):
                        problems.append(f"action law fails on O({n})[{b}]")
    return problems


# ---------------------------------------------------------------------------
# generators


SYMMETRIES = ("none", "symmetric", "antisymmetric")


@dataclass(frozen=True)
class Generator:
    """A box generator.  ``weight`` is always 1; the base operad has weight 0."""

    name: str
    arity: int
    degree: int
    symmetry: str = "none"

    def __post_init__(self):
        if self.arity < 1:
            raise ValueError(f"generator {self.name} must have arity >= 1")
        if self.symmetry not in SYMMETRIES:
            raise ValueError(f"unknown symmetry {self.symmetry!r}")


# ---------------------------------------------------------------------------
# tree helpers that do not depend on a context


def is_leaf(node) -> bool:
    return isinstance(node, int)


def leaves_of(node) -> tuple[int, ...]:
    if isinstance(node, int):
        return (node,)
    out: list[int] = []
    for child in node[2]:
        out.extend(leaves_of(child))
    return tuple(out)


def weight_of(node) -> int:
    if isinstance(node, int):
        return 0
    own = 1 if node[0] == "b" else 0
    return own + sum(weight_of(c) for c in node[2])


def boxes_preorder(node) -> list[str]:
    out: list[str] = []

    def walk(n):
        if isinstance(n, int):
            return
        if n[0] == "b":
            out.append(n[1])
        for c in n[2]:
            walk(c)

    walk(node)
    return out


def relabel(node, mapping: Callable[[int], int]):
    if isinstance(node, int):
        return mapping(node)
    return (node[0], node[1], tuple(relabel(c, mapping) for c in node[2]))


# ---------------------------------------------------------------------------
# the operad context


class FreeOperad:
    """``P = O + F(C)``: a base operad plus box generators and their differential.

    Differential images are elements of this same operad, set with
    :meth:`set_differential`.  Unset images mean ``d(g) = 0``.
    """

    def __init__(self, generators: Iterable[Generator] = (), base: BasisOperad | None = None):
        self.base = base or CommutativeOperad()
        self.generators: dict[str, Generator] = {}
        self.d_images: dict[str, OperadElement] = {}
        self._canon_cache: dict = {}
        self._key_cache: dict = {}
        self._deg_cache: dict = {}
        self._block_cache: dict = {}
        self._circle_cache: dict = {}
        for g in generators:
            self.add_generator(g)

    # -- setup ---------------------------------------------------------------

    def add_generator(self, gen: Generator) -> None:
        if gen.name in self.generators:
            raise ValueError(f"duplicate generator {gen.name}")
        if gen.name in ("mu", "d", "o"):
            raise ValueError(f"reserved generator name {gen.name}")
        self.generators[gen.name] = gen
        self._block_cache.clear()
        self._circle_cache.clear()

    def set_differential(self, name: str, image: "OperadElement | int") -> None:
        gen = self.generators[name]
        if isinstance(image, int) and image == 0:
            self.d_images.pop(name, None)
            return
        if image.ctx is not self:
            raise ValueError("differential image lives in another operad")
        if not image.is_zero():
            if image.arity() != gen.arity:
                raise ValueError(f"d({name}) has the wrong arity")
            if image.degree() != gen.degree + 1:
                raise ValueError(f"d({name}) must have degree {gen.degree + 1}")
        self.d_images[name] = image

    # -- elementary elements --------------------------------------------------

    def element(self, terms: Mapping | None = None) -> "OperadElement":
        return OperadElement(self, terms or {})

    def zero(self) -> "OperadElement":
        return OperadElement(self, {})

    def unit(self) -> "OperadElement":
        return self.monomial(("o", self.base.unit(), (1,)))

    def mu(self, n: int = 2) -> "OperadElement":
        """The n-ary base product (basis element 0 of O(n))."""
        return self.monomial(("o", 0, tuple(range(1, n + 1))))

    def gen(self, name: str) -> "OperadElement":
        g = self.generators[name]
        kids = tuple(("o", self.base.unit(), (k,)) for k in range(1, g.arity + 1))
        return self.monomial(("o", self.base.unit(), (("b", name, kids),)))

    def word(self, *names: str) -> "OperadElement":
        """Composite of unary generators, outermost first; ``word()`` is the unit."""
        out = self.unit()
        for name in reversed(names):
            out = self.compose(self.gen(name), 1, out)
        return out

    def monomial(self, raw, coef=1) -> "OperadElement":
        node, sign = self.canonicalize(raw)
        return OperadElement(self, {node: Fraction(coef) * sign})

    # -- gradings -------------------------------------------------------------

    def degree_of(self, node) -> int:
        if isinstance(node, int):
            return 0
        cached = self._deg_cache.get(node)
        if cached is not None:
            return cached
        own = self.generators[node[1]].degree if node[0] == "b" else 0
        value = own + sum(self.degree_of(c) for c in node[2])
        self._deg_cache[node] = value
        return value

    # -- validation and canonical form ---------------------------------------

    def validate(self, raw) -> None:
        """Raise :class:`MalformedTree` unless ``raw`` is a well-formed tree."""
        if isinstance(raw, int) or not isinstance(raw, tuple) or raw[0] != "o":
            raise MalformedTree("the root of a monomial must be a circle vertex")

        def walk(node, parent_shape):
            if isinstance(node, int):
                if parent_shape != "o":
                    raise MalformedTree("leaves must hang from circle vertices")
                return
            if not isinstance(node, tuple) or len(node) != 3 or node[0] not in ("o", "b"):
                raise MalformedTree(f"unrecognised vertex {node!r}")
            shape, dec, kids = node
            if shape == parent_shape:
                raise MalformedTree("two vertices of the same shape are adjacent")
            if not kids:
                raise MalformedTree("vertices need at least one input")
            if shape == "o":
                if not 0 <= dec < self.base.dim(len(kids)):
                    raise MalformedTree(f"no decoration {dec} in O({len(kids)})")
            else:
                gen = self.generators.get(dec)
                if gen is None:
                    raise MalformedTree(f"unknown generator {dec!r}")
                if gen.arity != len(kids):
                    raise MalformedTree(f"generator {dec} has arity {gen.arity}, got {len(kids)} inputs")
                if any(isinstance(k, int) for k in kids):
                    raise MalformedTree("box vertices cannot be adjacent to a leaf")
            for k in kids:
                walk(k, shape)

        walk(raw, None)
        labels = sorted(leaves_of(raw))
        if labels != list(range(1, len(labels) + 1)):
            raise MalformedTree(f"leaf labels {labels} are not a bijection with 1..{len(labels)}")

    def sort_key(self, node):
        """Total order on canonical subtrees: shape first, then leaf labels."""
        if isinstance(node, int):
            return (LEAF_SHAPE, (node,))
        cached = self._key_cache.get(node)
        if cached is not None:
            return cached
        keys = [self.sort_key(c) for c in node[2]]
        shape = (1 if node[0] == "b" else 2, node[1], tuple(k[0] for k in keys))
        leaves = tuple(x for k in keys for x in k[1])
        key = (shape, leaves)
        self._key_cache[node] = key
        return key

    def canonicalize(self, raw) -> tuple[object, int]:
        """Canonical representative and the sign relating it to ``raw``.

        ``raw`` must satisfy the shape constraints (call :meth:`validate` on
        untrusted input).  Idempotent: a canonical tree maps to itself with
        sign +1.
        """
        if isinstance(raw, int):
            return raw, 1
        cached = self._canon_cache.get(raw)
        if cached is not None:
            return cached
        shape, dec, kids = raw
        sign = 1
        new_kids = []
        for k in kids:
            ck, s = self.canonicalize(k)
            sign *= s
            new_kids.append(ck)
        if shape == "o" or self.generators[dec].symmetry != "none":
            keys = [self.sort_key(k) for k in new_kids]
            degs = [self.degree_of(k) for k in new_kids]
            order, ksign = sort_sign(keys, degs)
            if order != sorted(order) or any(order[a] != a for a in range(len(order))):
                perm = Permutation(o + 1 for o in order)
                sign *= ksign
                if shape == "o":
                    dec, s = self.base.act(len(new_kids), dec, perm)
                    sign *= s
                elif self.generators[dec].symmetry == "antisymmetric":
                    sign *= perm.sign()
                new_kids = [new_kids[o] for o in order]
        node = (shape, dec, tuple(new_kids))
        result = (node, sign)
        self._canon_cache[raw] = result
        if node != raw:
            self._canon_cache.setdefault(node, (node, 1))
        return result

    # -- composition ----------------------------------------------------------

    def _compose_monomials(self, x, i: int, y) -> list[tuple[object, Fraction]]:
        n_x = len(leaves_of(x))
        n_y = len(leaves_of(y))
        if not 1 <= i <= n_x:
            raise IndexError(f"slot {i} out of range for arity {n_x}")
        deg_y = self.degree_of(y)
        # box degree preceding leaf i in preorder
        before = 0
        found = False

        def scan(node):
            nonlocal before, found
            if found:
                return
            if isinstance(node, int):
                if node == i:
                    found = True
                return
            if node[0] == "b":
                before += self.generators[node[1]].degree
            for c in node[2]:
                scan(c)

        scan(x)
        after = self.degree_of(x) - before
        sign = -1 if (deg_y * after) % 2 else 1

        def shift_x(label):
            return label if label < i else label + n_y - 1

        y_root = relabel(y, lambda label: label + i - 1)
        q = len(y_root[2])

        def graft(node):
            # returns list of (node, coef); only the path to leaf i branches
            if isinstance(node, int):
                return [(shift_x(node), Fraction(1))]
            shape, dec, kids = node
            if shape == "o" and i in kids:
                j = kids.index(i)
                new_kids = []
                for k in kids[:j]:
                    new_kids.append(relabel(k, shift_x))
                new_kids.extend(y_root[2])
                for k in kids[j + 1:]:
                    new_kids.append(relabel(k, shift_x))
                out = []
                for dec2, c in self.base.compose(len(kids), dec, j + 1, q, y_root[1]):
                    out.append((("o", dec2, tuple(new_kids)), Fraction(c)))
                return out
            options = []
            for k in kids:
                if i in leaves_of(k):
                    options.append(graft(k))
                else:
                    options.append([(relabel(k, shift_x), Fraction(1))])
            out = []
            for combo in itertools.product(*options):
                coef = Fraction(1)
                for _, c in combo:
                    coef *= c
                out.append(((shape, dec, tuple(n for n, _ in combo)), coef))
            return out

        return [(node, c * sign) for node, c in graft(x)]

    def compose(self, x: "OperadElement", i: int, y: "OperadElement") -> "OperadElement":
        """Partial composition ``x o_i y`` (bilinear)."""
        self._same(x, y)
        out: dict = {}
        for mx, cx in x.terms.items():
            for my, cy in y.terms.items():
                for raw, c in self._compose_monomials(mx, i, my):
                    node, s = self.canonicalize(raw)
                    out[node] = out.get(node, 0) + cx * cy * c * s
        return OperadElement(self, out)

    def full_compose(self, x: "OperadElement", ys: Sequence["OperadElement"]) -> "OperadElement":
        """``gamma(x; y_1..y_k)`` with the Koszul sign of ``x (x) y_1 (x) ... (x) y_k``."""
        out = x
        for slot in range(len(ys), 0, -1):
            out = self.compose(out, slot, ys[slot - 1])
        # composing right to left produced x (x) y_k (x) ... (x) y_1
        degs = [y.degree() if not y.is_zero() else 0 for y in ys]
        flips = sum(degs[a] * degs[b] for a in range(len(degs)) for b in range(a + 1, len(degs)))
        return out if flips % 2 == 0 else -out

    # -- symmetric group action ----------------------------------------------

    def act(self, perm: Permutation, x: "OperadElement") -> "OperadElement":
        """Right action ``x . perm``: input k of the result receives argument perm^-1(k).

        On trees this relabels leaf l as perm^-1(l).
        """
        out: dict = {}
        inv = perm.inverse()
        for node, c in x.terms.items():
            if len(leaves_of(node)) != len(perm):
                raise ValueError("permutation size does not match the arity")
            raw = relabel(node, inv)
            new, s = self.canonicalize(raw)
            out[new] = out.get(new, 0) + c * s
        return OperadElement(self, out)

    # -- substitution of box vertices ----------------------------------------

    def substitute(self, node, image_for: Callable[[int, str], "OperadElement | None"], target: "FreeOperad | None" = None) -> "OperadElement":
        """Replace box vertices by elements of ``target`` (default: this operad).

        ``image_for(k, name)`` gives the replacement for the k-th box in
        preorder, or ``None`` to keep the generator (only allowed when the
        target has a generator of that name).  Replacements are inserted as
        a degree-0 map of tensor products, i.e. with the Koszul signs of
        moving subtrees into place and no sign for the replacement itself.
        """
        target = target or self
        counter = [0]
        memo_keep: dict[str, OperadElement] = {}

        def keep(name):
            if name not in memo_keep:
                memo_keep[name] = target.gen(name)
            return memo_keep[name]

        def ev_circle(node) -> list[tuple[object, Fraction]]:
            _, dec, kids = node
            options = []
            for k in kids:
                if isinstance(k, int):
                    options.append([(k, Fraction(1))])
                else:
                    options.append(ev_box(k))
            out = []
            for combo in itertools.product(*options):
                coef = Fraction(1)
                decs = [(dec, Fraction(1))]
                new_kids: list = []
                arity = len(kids)
                slot = 0
                for piece, c in combo:
                    coef *= c
                    if isinstance(piece, int):
                        new_kids.append(piece)
                        slot += 1
                        continue
                    # splice a circle into this one
                    _, pdec, pkids = piece
                    nxt = []
                    for d0, c0 in decs:
                        for d1, c1 in target.base.compose(arity, d0, slot + 1, len(pkids), pdec):
                            nxt.append((d1, c0 * c1))
                    decs = nxt
                    arity += len(pkids) - 1
                    slot += len(pkids)
                    new_kids.extend(pkids)
                for d1, c1 in decs:
                    if c1 and coef:
                        out.append((("o", d1, tuple(new_kids)), coef * c1))
            return out

        def ev_box(node) -> list[tuple[object, Fraction]]:
            k = counter[0]
            counter[0] += 1
            _, name, kids = node
            image = image_for(k, name)
            if image is None:
                image = keep(name)
            values = [ev_circle(c) for c in kids]
            out = []
            for tmono, tcoef in image.terms.items():
                for combo in itertools.product(*values):
                    coef = tcoef
                    for _, c in combo:
                        coef *= c
                    if not coef:
                        continue
                    circles = [piece for piece, _ in combo]
                    tree, sign = _plug_leaves(target, tmono, circles)
                    out.append((tree, coef * sign))
            return out

        result: dict = {}
        for raw, c in ev_circle(node):
            new, s = target.canonicalize(raw)
            result[new] = result.get(new, 0) + c * s
        return OperadElement(target, result)

    # -- differential ----------------------------------------------------------

    def differential(self, x: "OperadElement") -> "OperadElement":
        """Derivation extending the generator differentials; base has d = 0."""
        out = self.zero()
        for node, c in x.terms.items():
            out = out + c * self._d_monomial(node)
        return out

    def _d_monomial(self, node) -> "OperadElement":
        names = boxes_preorder(node)
        total = self.zero()
        before = 0
        for k, name in enumerate(names):
            image = self.d_images.get(name)
            if image is not None and not image.is_zero():
                piece = self.substitute(node, lambda idx, nm, k=k, image=image: image if idx == k else None)
                total = total + (-piece if before % 2 else piece)
            before += self.generators[name].degree
        return total

    # -- basis enumeration -----------------------------------------------------

    def enumerate_basis(self, n: int, w: int) -> list:
        """Canonical monomials of arity ``n`` and weight ``w``, sorted."""
        key = (n, w)
        if key not in self._block_cache:
            roots = self._circles(tuple(range(1, n + 1)), w)
            self._block_cache[key] = sorted(roots, key=self.sort_key)
        return list(self._block_cache[key])

    def _circles(self, labels: tuple[int, ...], w: int) -> list:
        key = (labels, w)
        cached = self._circle_cache.get(key)
        if cached is not None:
            return cached
        out = []
        for blocks in _set_partitions(labels):
            # each block is either a single leaf or a box subtree of weight >= 1
            choices_per_block = []
            for block in blocks:
                opts = []
                if len(block) == 1:
                    opts.append((block[0], 0))
                for wb in range(1, w + 1):
                    for box in self._boxes(block, wb):
                        opts.append((box, wb))
                choices_per_block.append(opts)
            for combo in _weighted_products(choices_per_block, w):
                kids = [c for c, _ in combo]
                for dec in range(self.base.dim(len(kids))):
                    node, sign = self.canonicalize(("o", dec, tuple(kids)))
                    out.append(node)
        out = sorted(set(out), key=self.sort_key)
        self._circle_cache[key] = out
        return out

    def _boxes(self, labels: tuple[int, ...], w: int) -> list:
        out = []
        for gen in self.generators.values():
            a = gen.arity
            if a > len(labels):
                continue
            if gen.symmetry == "none":
                partitions = _ordered_set_partitions(labels, a)
            else:
                partitions = [p for p in _set_partitions(labels) if len(p) == a]
            for parts in partitions:
                options = [[(c, wc) for wc in range(0, w) for c in self._circles(part, wc)] for part in parts]
                for combo in _weighted_products(options, w - 1):
                    raw = ("b", gen.name, tuple(c for c, _ in combo))
                    node, _ = self.canonicalize(raw)
                    out.append(node)
        return out

    # -- misc -------------------------------------------------------------------

    def _same(self, *elements: "OperadElement") -> None:
        for e in elements:
            if e.ctx is not self:
                raise ValueError("elements belong to a different operad")

    def to_str(self, node) -> str:
        return _node_str(self, node, top=True)


def _plug_leaves(ctx: FreeOperad, tmono, circles: Sequence):
    """Insert circle ``circles[l-1]`` at leaf ``l`` of ``tmono``; returns (raw tree, sign).

    Source tensor order is (boxes of tmono) then the circles in label order;
    the target order is the preorder of the grafted tree.
    """
    segments: list[int] = [0]  # box degree of tmono between consecutive leaves
    leaf_order: list[int] = []

    def scan(node):
        if isinstance(node, int):
            leaf_order.append(node)
            segments.append(0)
            return
        if node[0] == "b":
            segments[-1] += ctx.generators[node[1]].degree
        for c in node[2]:
            scan(c)

    scan(tmono)
    circle_degs = [ctx.degree_of(c) for c in circles]
    # blocks: S_0 S_1 .. S_a C_1 .. C_a  ->  S_0 C_l1 S_1 C_l2 .. S_a
    a = len(leaf_order)
    block_degs = list(segments) + circle_degs
    target_order = [0]
    for pos, label in enumerate(leaf_order):
        target_order.append(a + label)  # index of C_label (0-based: a+1+label-1)
        target_order.append(pos + 1)
    perm = Permutation(t + 1 for t in target_order)
    sign = koszul_sign(perm, block_degs)

    def build(node):
        if isinstance(node, int):
            return node
        shape, dec, kids = node
        if shape == "b":
            return (shape, dec, tuple(build(k) for k in kids))
        new_kids = []
        decs = [(dec, Fraction(1))]
        arity = len(kids)
        slot = 0
        for k in kids:
            if isinstance(k, int):
                circ = circles[k - 1]
                _, cdec, ckids = circ
                nxt = []
                for d0, c0 in decs:
                    for d1, c1 in ctx.base.compose(arity, d0, slot + 1, len(ckids), cdec):
                        nxt.append((d1, c0 * c1))
                decs = nxt
                arity += len(ckids) - 1
                slot += len(ckids)
                new_kids.extend(ckids)
            else:
                new_kids.append(build(k))
                slot += 1
        if len(decs) != 1 or decs[0][1] != 1:
            raise NotImplementedError("substitution into non-monomial base compositions")
        return ("o", decs[0][0], tuple(new_kids))

    return build(tmono), sign


def _set_partitions(items: tuple) -> Iterator[list[tuple]]:
    if not items:
        yield []
        return
    first, rest = items[0], items[1:]
    for part in _set_partitions(rest):
        yield [(first,)] + part
        for k in range(len(part)):
            yield part[:k] + [(first,) + part[k]] + part[k + 1:]


def _ordered_set_partitions(items: tuple, k: int) -> list[list[tuple]]:
    out = []
    for part in _set_partitions(items):
        if len(part) == k:
            for perm in itertools.permutations(part):
                out.append([tuple(sorted(p)) for p in perm])
    return out


def _weighted_products(options: list[list[tuple[object, int]]], total: int):
    """Choices from each list whose weights add to ``total``."""
    def rec(idx, remaining):
        if idx == len(options):
            if remaining == 0:
                yield []
            return
        for item in options[idx]:
            if item[1] <= remaining:
                for rest in rec(idx + 1, remaining - item[1]):
                    yield [item] + rest
    yield from rec(0, total)


def _node_str(ctx: FreeOperad, node, top: bool = False) -> str:
    if isinstance(node, int):
        return str(node)
    shape, dec, kids = node
    if shape == "o":
        if len(kids) == 1 and ctx.base.is_unit(1, dec):
            return _node_str(ctx, kids[0])
        label = ctx.base.label(len(kids), dec)
        return f"{label}(" + ", ".join(_node_str(ctx, k) for k in kids) + ")"
    return f"{dec}(" + ", ".join(_node_str(ctx, k) for k in kids) + ")"


# ---------------------------------------------------------------------------
# elements


class OperadElement:
    """A finite rational combination of canonical tree monomials."""

    __slots__ = ("ctx", "terms")

    def __init__(self, ctx: FreeOperad, terms: Mapping):
        self.ctx = ctx
        self.terms = {k: Fraction(v) for k, v in terms.items() if v}

    def is_zero(self) -> bool:
        return not self.terms

    def __bool__(self) -> bool:
        return bool(self.terms)

    def __add__(self, other: "OperadElement") -> "OperadElement":
        if isinstance(other, int) and other == 0:
            return self
        self.ctx._same(other)
        out = dict(self.terms)
        for k, v in other.terms.items():
            out[k] = out.get(k, 0) + v
        return OperadElement(self.ctx, out)

    __radd__ = __add__

    def __neg__(self) -> "OperadElement":
        return OperadElement(self.ctx, {k: -v for k, v in self.terms.items()})

    def __sub__(self, other: "OperadElement") -> "OperadElement":
        return self + (-other)

    def __mul__(self, scalar) -> "OperadElement":
        if isinstance(scalar, OperadElement):
            return NotImplemented
        if isinstance(scalar, float):
            raise TypeError("floating point coefficients are not accepted")
        s = Fraction(scalar)
        return OperadElement(self.ctx, {k: v * s for k, v in self.terms.items()})

    __rmul__ = __mul__

    def __eq__(self, other) -> bool:
        if isinstance(other, int) and other == 0:
            return self.is_zero()
        return isinstance(other, OperadElement) and other.ctx is self.ctx and other.terms == self.terms

    def __hash__(self):
        return hash(frozenset(self.terms.items()))

    def __iter__(self):
        return iter(self.sorted_terms())

    def __len__(self) -> int:
        return len(self.terms)

    def sorted_terms(self) -> list[tuple[object, Fraction]]:
        return sorted(self.terms.items(), key=lambda kv: self.ctx.sort_key(kv[0]))

    def _uniform(self, fn, what: str):
        values = {fn(m) for m in self.terms}
        if len(values) != 1:
            raise ValueError(f"element is not homogeneous in {what}: {sorted(values)}")
        return values.pop()

    def arity(self) -> int:
        return self._uniform(lambda m: len(leaves_of(m)), "arity")

    def degree(self) -> int:
        return self._uniform(self.ctx.degree_of, "degree")

    def weight(self) -> int:
        return self._uniform(weight_of, "weight")

    def weights(self) -> set[int]:
        return {weight_of(m) for m in self.terms}

    def coefficient(self, node) -> Fraction:
        return self.terms.get(node, Fraction(0))

    def __repr__(self) -> str:
        return f"OperadElement({self})"

    def __str__(self) -> str:
        if not self.terms:
            return "0"
        parts = []
        for node, c in self.sorted_terms():
            text = self.ctx.to_str(node)
            if c == 1:
                parts.append(("+", text))
            elif c == -1:
                parts.append(("-", text))
            elif c < 0:
                parts.append(("-", f"{-c}*{text}"))
            else:
                parts.append(("+", f"{c}*{text}"))
        head_sign, head = parts[0]
        out = ("-" if head_sign == "-" else "") + head
        for sign, text in parts[1:]:
            out += f" {sign} {text}"
        return out
