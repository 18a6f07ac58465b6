from fractions import Fraction

import pytest
from hypothesis import given, settings, strategies as st

from operad_forge.expressions import ParseError, parse_element
from operad_forge.freeop import (
    CommutativeOperad,
    FreeOperad,
    Generator,
    MalformedTree,
    check_operad_axioms,
    leaves_of,
    weight_of,
)
from operad_forge.kernel import Permutation
from operad_forge.presentations import builtin


def _binary_ctx():
    ctx = FreeOperad([Generator("b", 2, -1), Generator("s", 2, 0, "symmetric"), Generator("a", 2, 1, "antisymmetric")])
    ctx.set_differential("b", ctx.gen("s"))
    ctx.set_differential("s", ctx.zero())
    return ctx


CTXS = {"EBV": builtin("EBV").ctx, "J": builtin("J").ctx, "binary": _binary_ctx()}


@st.composite
def elements(draw, ctx_name, max_arity=3, max_weight=2):
    ctx = CTXS[ctx_name]
    n = draw(st.integers(1, max_arity))
    w = draw(st.integers(0, max_weight))
    basis = ctx.enumerate_basis(n, w)
    if not basis:
        return ctx.zero()
    picks = draw(st.lists(st.sampled_from(basis), min_size=1, max_size=3))
    coefs = draw(st.lists(st.integers(-3, 3), min_size=len(picks), max_size=len(picks)))
    out = ctx.zero()
    for m, c in zip(picks, coefs):
        out = out + Fraction(c) * ctx.monomial(m)
    return out


def homogeneous(x):
    return x and len({x.ctx.degree_of(m) for m in x.terms}) == 1


names = st.sampled_from(sorted(CTXS))


def test_commutative_operad_tables():
    assert check_operad_axioms(CommutativeOperad(), cap=4) == []


@pytest.mark.parametrize("name", sorted(CTXS))
@settings(max_examples=30)
@given(data=st.data())
def test_differential_squares_to_zero(name, data):
    ctx = CTXS[name]
    x = data.draw(elements(name))
    assert ctx.differential(ctx.differential(x)).is_zero()


@pytest.mark.parametrize("name", sorted(CTXS))
@settings(max_examples=30)
@given(data=st.data())
def test_composition_is_associative(name, data):
    ctx = CTXS[name]
    x = data.draw(elements(name, 2, 1))
    y = data.draw(elements(name, 2, 1))
    z = data.draw(elements(name, 2, 1))
    if not (x and y and z):
        return
    i = data.draw(st.integers(1, x.arity()))
    j = data.draw(st.integers(1, y.arity()))
    lhs = ctx.compose(ctx.compose(x, i, y), i + j - 1, z)
    rhs = ctx.compose(x, i, ctx.compose(y, j, z))
    assert lhs == rhs


@pytest.mark.parametrize("name", sorted(CTXS))
@settings(max_examples=30)
@given(data=st.data())
def test_differential_is_a_derivation(name, data):
    ctx = CTXS[name]
    x = data.draw(elements(name, 2, 1))
    y = data.draw(elements(name, 2, 1))
    if not (homogeneous(x) and y):
        return
    i = data.draw(st.integers(1, x.arity()))
    sign = -1 if x.degree() % 2 else 1
    lhs = ctx.differential(ctx.compose(x, i, y))
    rhs = ctx.compose(ctx.differential(x), i, y) + sign * ctx.compose(x, i, ctx.differential(y))
    assert lhs == rhs


@pytest.mark.parametrize("name", sorted(CTXS))
@settings(max_examples=30)
@given(data=st.data())
def test_right_action(name, data):
    ctx = CTXS[name]
    x = data.draw(elements(name))
    if not x:
        return
    n = x.arity()
    s = Permutation(data.draw(st.permutations(range(1, n + 1))))
    t = Permutation(data.draw(st.permutations(range(1, n + 1))))
    assert ctx.act(t, ctx.act(s, x)) == ctx.act(s * t, x)
    assert ctx.act(Permutation.identity(n), x) == x
    assert ctx.differential(ctx.act(s, x)) == ctx.act(s, ctx.differential(x))


@pytest.mark.parametrize("name", sorted(CTXS))
@settings(max_examples=30)
@given(data=st.data())
def test_unit_laws(name, data):
    ctx = CTXS[name]
    x = data.draw(elements(name))
    if not x:
        return
    assert ctx.compose(ctx.unit(), 1, x) == x
    for i in range(1, x.arity() + 1):
        assert ctx.compose(x, i, ctx.unit()) == x


def test_basis_counts():
    ctx = CTXS["EBV"]
    assert len(ctx.enumerate_basis(1, 0)) == 1
    assert len(ctx.enumerate_basis(3, 0)) == 1
    assert len(ctx.enumerate_basis(1, 1)) == 2
    assert len(ctx.enumerate_basis(1, 2)) == 4
    for m in ctx.enumerate_basis(2, 2):
        assert sorted(leaves_of(m)) == [1, 2]
        assert weight_of(m) == 2


def test_commutative_product_is_symmetric():
    ctx = CTXS["EBV"]
    assert parse_element(ctx, "mu(1, 2)") == parse_element(ctx, "mu(2, 1)")
    assert ctx.act(Permutation([2, 1]), ctx.mu(2)) == ctx.mu(2)


def test_generator_symmetries():
    ctx = CTXS["binary"]
    assert parse_element(ctx, "a(2, 1)") == -parse_element(ctx, "a(1, 2)")
    assert parse_element(ctx, "s(2, 1)") == parse_element(ctx, "s(1, 2)")
    assert parse_element(ctx, "b(2, 1)") != parse_element(ctx, "b(1, 2)")


def test_koszul_signs_of_odd_generators():
    ctx = CTXS["EBV"]
    # two odd generators side by side anticommute
    x = parse_element(ctx, "mu(d_i(1), d_i(2))")
    assert ctx.act(Permutation([2, 1]), x) == -x
    y = parse_element(ctx, "mu(i(1), i(2))")
    assert ctx.act(Permutation([2, 1]), y) == y


def test_differential_of_generators():
    ctx = CTXS["EBV"]
    assert ctx.differential(ctx.gen("i")) == ctx.gen("d_i")
    assert ctx.differential(ctx.gen("d_i")).is_zero()
    # d(i.i) = d_i.i + i.d_i since |i| is even
    assert ctx.differential(ctx.word("i", "i")) == ctx.word("d_i", "i") + ctx.word("i", "d_i")
    # d(d_i... ) picks up the sign of the odd generator in front
    assert ctx.differential(ctx.word("d_i", "i")) == -ctx.word("d_i", "d_i")


def test_set_differential_checks_degree():
    ctx = FreeOperad([Generator("x", 1, 0), Generator("y", 1, 0)])
    with pytest.raises(ValueError):
        ctx.set_differential("x", ctx.gen("y"))
    with pytest.raises(ValueError):
        ctx.add_generator(Generator("x", 1, 0))
    with pytest.raises(ValueError):
        Generator("z", 0, 0)


@pytest.mark.parametrize("text", ["i(", "mu(1, 1)", "nope", "i(1) +", "[i, mu]", "2 * * i"])
def test_parse_errors(text):
    with pytest.raises((ParseError, MalformedTree)):
        parse_element(CTXS["EBV"], text)


def test_expression_forms_agree():
    ctx = CTXS["EBV"]
    assert parse_element(ctx, "i.d_i") == parse_element(ctx, "i o_1 d_i") == ctx.word("i", "d_i")
    assert parse_element(ctx, "[i, d_i]") == ctx.word("i", "d_i") - ctx.word("d_i", "i")
    assert parse_element(ctx, "d(i)") == ctx.gen("d_i")
    assert parse_element(ctx, "1/2*i - 1/2*i").is_zero()
