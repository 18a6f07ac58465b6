"""Parser for operad element expressions.

Grammar (whitespace insensitive)::

    expr    := ['-'] term (('+' | '-') term)*
    term    := [rational '*'] factor
    factor  := chain ['@' perms]
    chain   := atom (('o_' INT | '.') atom)*        left associative
    perms   := perm | '[' ['-'] perm (('+'|'-') perm)* ']'
    perm    := '()' | ('(' INT+ ')')+
    atom    := '(' expr ')' | 'd(' expr ')' | '[' expr ',' expr ']'
             | NAME '(' node (',' node)* ')' | NAME | '0'

``NAME`` is a generator, ``mu`` (binary product), ``muK`` (K-ary product)
or ``id``; inside tree literals a bare ``mu`` takes any number of inputs.  ``a.b`` is ``a o_1 b``; ``[a, b]`` is the graded commutator of
unary elements; a parenthesised ``NAME(...)`` with integer leaves is a tree
literal such as ``mu(i(1), d_i(2))``.
"""
from __future__ import annotations

import re
from fractions import Fraction

from .freeop import CommutativeOperad, FreeOperad, MalformedTree, OperadElement
from .kernel import Permutation


class ParseError(ValueError):
    pass


_TOKEN = re.compile(r"\s*(?:(o_\d+)|([A-Za-z_][A-Za-z0-9_]*)|(\d+)|(\S))")
_MU = re.compile(r"mu(\d*)$")


def _tokenize(text: str) -> list[tuple[str, str]]:
    out = []
    pos = 0
    text = text.rstrip()
    while pos < len(text):
        m = _TOKEN.match(text, pos)
        if not m:
            raise ParseError(f"unexpected character at {pos} in {text!r}")
        pos = m.end()
        if m.group(1):
            out.append(("comp", m.group(1)[2:]))
        elif m.group(2):
            out.append(("name", m.group(2)))
        elif m.group(3):
            out.append(("int", m.group(3)))
        else:
            out.append(("sym", m.group(4)))
    out.append(("end", ""))
    return out


def commutator(ctx: FreeOperad, a: OperadElement, b: OperadElement) -> OperadElement:
    """``a o b - (-1)^{|a||b|} b o a`` for unary elements."""
    if not a or not b:
        return ctx.zero()
    ab = ctx.compose(a, 1, b)
    ba = ctx.compose(b, 1, a)
    return ab - ba if (a.degree() * b.degree()) % 2 == 0 else ab + ba


class _Parser:
    def __init__(self, ctx: FreeOperad, text: str):
        self.ctx = ctx
        self.text = text
        self.toks = _tokenize(text)
        self.pos = 0

    def peek(self, offset: int = 0):
        return self.toks[self.pos + offset]

    def take(self, kind=None, value=None):
        tok = self.toks[self.pos]
        if kind and tok[0] != kind or value is not None and tok[1] != value:
            raise ParseError(f"expected {value or kind} but found {tok[1] or 'end of input'!r} in {self.text!r}")
        self.pos += 1
        return tok

    def at(self, value) -> bool:
        return self.peek()[0] == "sym" and self.peek()[1] == value

    # -- grammar ------------------------------------------------------------

    def parse(self) -> OperadElement:
        out = self.expr()
        self.take("end")
        return out

    def expr(self) -> OperadElement:
        sign = 1
        if self.at("-"):
            self.take()
            sign = -1
        out = sign * self.term()
        while self.at("+") or self.at("-"):
            op = self.take()[1]
            t = self.term()
            out = self._add(out, t if op == "+" else -t)
        return out

    def _add(self, a, b):
        if a and b and a.arity() != b.arity():
            raise ParseError(f"adding elements of different arity in {self.text!r}")
        return a + b

    def term(self) -> OperadElement:
        if self.peek()[0] == "int" and (self.peek(1) in (("sym", "*"), ("sym", "/"))):
            coef = Fraction(int(self.take()[1]))
            if self.at("/"):
                self.take()
                coef /= int(self.take("int")[1])
            self.take("sym", "*")
            return coef * self.factor()
        return self.factor()

    def factor(self) -> OperadElement:
        x = self.chain()
        if not self.at("@"):
            return x
        self.take()
        out = self.ctx.zero()
        for sign, cycles in self.perms():
            if not x:
                continue
            n = x.arity()
            try:
                perm = Permutation.from_cycles(n, cycles)
            except ValueError:
                raise ParseError(f"permutation {cycles} does not act on arity {n}") from None
            out = out + sign * self.ctx.act(perm, x)
        return out

    def chain(self) -> OperadElement:
        x = self.atom()
        while True:
            if self.at("."):
                self.take()
                slot = 1
            elif self.peek()[0] == "comp":
                slot = int(self.take()[1])
            else:
                return x
            y = self.atom()
            if x and y:
                if not 1 <= slot <= x.arity():
                    raise ParseError(f"slot {slot} out of range in {self.text!r}")
                x = self.ctx.compose(x, slot, y)
            else:
                x = self.ctx.zero()

    def perms(self) -> list[tuple[int, list]]:
        if not self.at("["):
            return [(1, self.perm())]
        self.take()
        out = []
        sign = 1
        if self.at("-"):
            self.take()
            sign = -1
        out.append((sign, self.perm()))
        while self.at("+") or self.at("-"):
            sign = 1 if self.take()[1] == "+" else -1
            out.append((sign, self.perm()))
        self.take("sym", "]")
        return out

    def perm(self) -> list:
        cycles = []
        self.take("sym", "(")
        if self.at(")"):
            self.take()
        else:
            cycles.append(self._cycle())
        while self.at("(") and self.peek(1)[0] == "int":
            self.take()
            cycles.append(self._cycle())
        return cycles

    def _cycle(self):
        cyc = []
        while self.peek()[0] == "int":
            cyc.append(int(self.take()[1]))
        self.take("sym", ")")
        return cyc

    def atom(self) -> OperadElement:
        kind, value = self.peek()
        if kind == "sym" and value == "(":
            self.take()
            out = self.expr()
            self.take("sym", ")")
            return out
        if kind == "sym" and value == "[":
            self.take()
            a = self.expr()
            self.take("sym", ",")
            b = self.expr()
            self.take("sym", "]")
            for e in (a, b):
                if e and e.arity() != 1:
                    raise ParseError("commutators are only defined for unary elements")
            return commutator(self.ctx, a, b)
        if kind == "int" and value == "0":
            self.take()
            return self.ctx.zero()
        if kind == "name":
            self.take()
            if value == "d" and self.at("("):
                self.take()
                out = self.expr()
                self.take("sym", ")")
                return self.ctx.differential(out)
            if self.at("(") and self.peek(1)[0] in ("int", "name"):
                return self._tree(value)
            return self._named(value)
        raise ParseError(f"unexpected {value or 'end of input'!r} in {self.text!r}")

    def _named(self, name: str) -> OperadElement:
        if name == "id":
            return self.ctx.unit()
        m = _MU.match(name)
        if m:
            n = int(m.group(1) or 2)
            if n < 1:
                raise ParseError("mu needs arity >= 1")
            return self.ctx.mu(n)
        if name not in self.ctx.generators:
            raise ParseError(f"unknown generator {name!r}")
        return self.ctx.gen(name)

    # -- tree literals ------------------------------------------------------------

    def _tree(self, head: str) -> OperadElement:
        raw = self._node(head)
        try:
            raw_root = raw if raw[0] == "o" else ("o", self.ctx.base.unit(), (raw,))
            self.ctx.validate(raw_root)
        except MalformedTree as exc:
            raise ParseError(f"{exc} in {self.text!r}") from None
        return self.ctx.monomial(raw_root)

    def _node(self, head: str):
        self.take("sym", "(")
        kids = [self._child()]
        while self.at(","):
            self.take()
            kids.append(self._child())
        self.take("sym", ")")
        ctx = self.ctx
        unit = ctx.base.unit()
        m = _MU.match(head)
        if m or head == "id":
            n = 1 if head == "id" else int(m.group(1) or len(kids))
            if n != len(kids):
                raise ParseError(f"{head} expects {n} inputs")
            flat = []
            for k in kids:
                if isinstance(k, tuple) and k[0] == "o":
                    if not isinstance(ctx.base, CommutativeOperad):
                        raise ParseError("nested base operations need the commutative base operad")
                    flat.extend(k[2])
                else:
                    flat.append(k)
            return ("o", 0 if len(flat) > 1 else unit, tuple(flat))
        if head not in ctx.generators:
            raise ParseError(f"unknown generator {head!r}")
        if ctx.generators[head].arity != len(kids):
            raise ParseError(f"{head} expects {ctx.generators[head].arity} inputs")
        wrapped = tuple(k if isinstance(k, tuple) and k[0] == "o" else ("o", unit, (k,)) for k in kids)
        return ("b", head, wrapped)

    def _child(self):
        kind, value = self.peek()
        if kind == "int":
            self.take()
            return int(value)
        if kind == "name":
            self.take()
            return self._node(value)
        raise ParseError(f"unexpected {value!r} inside a tree literal")


def parse_element(ctx: FreeOperad, text: str) -> OperadElement:
    """Parse ``text`` into an element of ``ctx``; raises :class:`ParseError`."""
    try:
        return _Parser(ctx, text).parse()
    except (KeyError, IndexError, ValueError) as exc:
        if isinstance(exc, ParseError):
            raise
        raise ParseError(f"{exc} in {text!r}") from None
