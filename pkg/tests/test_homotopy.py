from fractions import Fraction

import pytest
from hypothesis import given, settings, strategies as st

from operad_forge.expressions import parse_element
from operad_forge.homotopy import NoHomotopy, OperadSdr, verify_block, verify_operad_sdr
from operad_forge.kernel import Permutation
from operad_forge.presentations import builtin

PRES = {name: builtin(name) for name in ("Com", "EBV", "J", "ECBV")}
SDRS = {name: OperadSdr(p.ctx, p.h_gen) for name, p in PRES.items()}


def h_of(name, text):
    ctx = PRES[name].ctx
    x = parse_element(ctx, text)
    sdr = SDRS[name]
    vert, rec = sdr.h_vertexwise(x), sdr.h_recursive(x)
    assert vert == rec
    return vert


def el(name, text):
    return parse_element(PRES[name].ctx, text)


def test_h_vanishes_in_weight_zero():
    assert h_of("EBV", "mu(1, mu(2, 3))").is_zero()
    assert h_of("EBV", "id").is_zero()


def test_h_restricts_to_generator_homotopy():
    assert h_of("EBV", "d_i") == el("EBV", "i")
    assert h_of("EBV", "i").is_zero()
    assert h_of("J", "d_j") == el("J", "j")


def test_two_vertex_averaging():
    assert h_of("EBV", "d_i.d_i") == Fraction(1, 2) * el("EBV", "i.d_i - d_i.i")
    assert h_of("EBV", "i.i").is_zero()
    assert h_of("J", "d_i.j") == Fraction(1, 2) * el("J", "i.j")


def test_ebv_commutator_relation():
    assert h_of("EBV", "i.d_i - d_i.i").is_zero()


def test_jacobi_relations():
    assert h_of("J", "d_i.j + j.d_i") == Fraction(1, 2) * el("J", "i.j - j.i")
    assert h_of("J", "j.j").is_zero()
    assert h_of("J", "i.j - j.i").is_zero()


@pytest.mark.parametrize("a,b", [(1, 1), (1, 2), (2, 1)])
def test_ecbv_brackets(a, b):
    assert h_of("ECBV", f"[i_{a}, d_i_{b}]") == Fraction(1, 2) * el("ECBV", f"[i_{a}, i_{b}]")


def test_h_on_a_binary_composite():
    # three boxes: averaging over them with the Koszul sign of crossing d_i
    x = h_of("EBV", "mu(d_i(1), d_i(d_i(2)))")
    assert x.degree() == -4 and x.weights() == {3}


@pytest.mark.parametrize("name", ["Com", "EBV", "J", "ECBV"])
@pytest.mark.parametrize("n,w", [(1, 0), (1, 1), (1, 2), (2, 1), (2, 2), (3, 1)])
def test_blocks(name, n, w):
    result = verify_block(SDRS[name], n, w)
    assert result.failures == []


def test_verify_operad_sdr_small_caps():
    report = verify_operad_sdr(PRES["J"], 2, 2)
    assert report.passed()
    assert [(b.arity, b.weight) for b in report.blocks] == [(1, 0), (1, 1), (1, 2), (2, 0), (2, 1), (2, 2)]


def test_no_homotopy():
    with pytest.raises(NoHomotopy):
        verify_operad_sdr(builtin("BV"), 2, 2)


def test_generator_homotopy_must_lower_degree():
    ctx = PRES["EBV"].ctx
    with pytest.raises(ValueError):
        OperadSdr(ctx, {"d_i": ctx.gen("d_i")})


def test_broken_homotopy_is_caught():
    ctx = PRES["EBV"].ctx
    bad = OperadSdr(ctx, {"d_i": 2 * ctx.gen("i")})
    assert verify_block(bad, 1, 1).failures


@settings(max_examples=40)
@given(st.sampled_from(["EBV", "J", "ECBV"]), st.integers(1, 3), st.integers(1, 2), st.data())
def test_equivariance_and_degree(name, n, w, data):
    ctx = PRES[name].ctx
    basis = ctx.enumerate_basis(n, w)
    if not basis:
        return
    x = ctx.monomial(data.draw(st.sampled_from(basis)))
    sdr = SDRS[name]
    hx = sdr.h(x)
    sigma = Permutation(data.draw(st.permutations(range(1, n + 1))))
    assert sdr.h(ctx.act(sigma, x)) == ctx.act(sigma, hx)
    if hx:
        assert hx.degree() == x.degree() - 1 and hx.weights() == {w}
    # h is a homotopy with h^2 = 0 and h i = 0, p h = 0 (side conditions)
    assert sdr.h(hx).is_zero()
    assert sdr.ip(hx).is_zero()
