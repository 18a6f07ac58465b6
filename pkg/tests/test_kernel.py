import itertools
from fractions import Fraction
from math import comb

import pytest
from hypothesis import given, strategies as st

from operad_forge.kernel import Permutation, as_rational, koszul_sign, shuffles, sort_sign


@st.composite
def perms(draw, max_n=6):
    n = draw(st.integers(1, max_n))
    return Permutation(draw(st.permutations(range(1, n + 1))))


def test_as_rational_refuses_floats():
    assert as_rational("-3/4") == Fraction(-3, 4)
    with pytest.raises(TypeError):
        as_rational(0.5)


def test_bad_permutations():
    with pytest.raises(ValueError):
        Permutation([1, 1])
    with pytest.raises(ValueError):
        Permutation.from_cycles(3, [(1, 4)])


def test_composition_applies_right_factor_first():
    p = Permutation.from_cycles(3, [(1, 2)])
    q = Permutation.from_cycles(3, [(2, 3)])
    assert (p * q)(2) == p(q(2)) == 3
    assert (q * p)(2) == 1


def test_cycles_round_trip():
    p = Permutation([3, 1, 2, 5, 4])
    assert Permutation.from_cycles(5, p.cycles()) == p
    assert repr(Permutation.identity(2)) == "Permutation.identity(2)"


@given(perms())
def test_inverse(p):
    assert (p * p.inverse()).is_identity()
    assert (p.inverse() * p).is_identity()


@given(perms(), st.data())
def test_koszul_sign_composition_law(t, data):
    n = len(t)
    s = Permutation(data.draw(st.permutations(range(1, n + 1))))
    degs = data.draw(st.lists(st.integers(-3, 3), min_size=n, max_size=n))
    moved = [degs[t(k) - 1] for k in range(1, n + 1)]
    assert koszul_sign(t * s, degs) == koszul_sign(s, moved) * koszul_sign(t, degs)


@given(perms())
def test_even_degrees_have_no_sign(p):
    assert koszul_sign(p, [2] * len(p)) == 1
    assert koszul_sign(p, [1] * len(p)) == p.sign()


def test_sign_is_a_homomorphism():
    for p, q in itertools.product(Permutation.all(4), repeat=2):
        assert (p * q).sign() == p.sign() * q.sign()


@given(st.lists(st.integers(0, 5), max_size=6), st.data())
def test_sort_sign_matches_koszul_sign(keys, data):
    degs = data.draw(st.lists(st.integers(-2, 2), min_size=len(keys), max_size=len(keys)))
    order, sign = sort_sign(keys, degs)
    assert [keys[k] for k in order] == sorted(keys)
    if keys:
        assert sign == koszul_sign(Permutation([k + 1 for k in order]), degs)


@pytest.mark.parametrize("p,q", [(0, 3), (1, 1), (2, 2), (2, 3), (3, 1)])
def test_shuffles(p, q):
    out = shuffles(p, q)
    assert len(out) == len(set(out)) == comb(p + q, p)
    for s in out:
        assert list(s.images[:p]) == sorted(s.images[:p])
        assert list(s.images[p:]) == sorted(s.images[p:])
