import random
from fractions import Fraction

import pytest

from operad_forge.expressions import parse_element
from operad_forge.presentations import builtin
from operad_forge.quotient import (
    IdealSpan,
    NotWeightHomogeneous,
    OutsideCaps,
    Unsupported,
    check_h_preserves_ideal,
    homology_block,
    ideal_span,
    member,
    truncated_homology,
)

PRES = {name: builtin(name) for name in ("Com", "EBV", "J", "ECBV")}


@pytest.fixture(scope="module")
def spans():
    return {name: ideal_span(p, 3, 3) for name, p in PRES.items()}


def el(name, text):
    return parse_element(PRES[name].ctx, text)


def test_ebv_weight_one_block(spans):
    b = homology_block(spans["EBV"], 1, 1)
    assert sum(b.basis.values()) == 2
    assert sum(b.ideal.values()) == 0
    assert b.homology == {}


def test_ebv_weight_two_block(spans):
    b = homology_block(spans["EBV"], 1, 2)
    assert sum(b.basis.values()) == 4
    assert sum(b.ideal.values()) == 2
    assert b.homology == {}
    assert b.closed and b.euler_ok()


def test_ebv_weight_two_ideal_is_spanned_by_the_relation_and_its_differential(spans):
    span = spans["EBV"]
    assert member(el("EBV", "i.d_i - d_i.i"), span).member
    assert member(el("EBV", "d_i.d_i"), span).member
    assert not member(el("EBV", "i.i"), span).member
    assert not member(el("EBV", "i.d_i"), span).member


def test_membership_basics(spans):
    res = member(PRES["EBV"].ctx.zero(), spans["EBV"])
    assert res.member and res.certificate == []
    assert not member(el("EBV", "i"), spans["EBV"]).member
    assert member(Fraction(1, 2) * el("J", "i.j - j.i"), spans["J"]).member


def test_certificates_reconstruct(spans):
    span = spans["J"]
    x = 3 * el("J", "i.d_i - d_i.i - 2*j.i") + el("J", "mu(j(1), 2) + mu(1, j(2)) - j(mu(1, 2))")
    res = member(x, span)
    assert res.member
    assert span.reconstruct(res.certificate) == x


def test_ecbv_small_index_cap():
    span = ideal_span(builtin("ECBV", index_cap=2), 1, 2)
    assert member(el("ECBV", "[i_1, d_i_1]"), span).member


def test_outside_caps(spans):
    small = IdealSpan(PRES["EBV"], 1, 1)
    with pytest.raises(OutsideCaps):
        small.member(el("EBV", "i.i"))


def test_com_has_no_ideal(spans):
    for n in (1, 2, 3):
        b = homology_block(spans["Com"], n, 0)
        assert b.ideal == {0: 0} and b.homology == {0: 1}


@pytest.mark.parametrize("name", ["EBV", "J", "ECBV"])
def test_h_preserves_ideal(name, spans):
    checks = check_h_preserves_ideal(PRES[name], spans[name])
    assert checks and all(c.member for c in checks)


def test_jacobi_hypothesis_uses_a_nonzero_image(spans):
    checks = {c.name: c for c in check_h_preserves_ideal(PRES["J"], spans["J"])}
    assert checks["[d_i,j]"].h_image == Fraction(1, 2) * el("J", "i.j - j.i")


@pytest.mark.parametrize("name", ["EBV", "J"])
def test_small_truncated_homology(name):
    report = truncated_homology(PRES[name], 2, 2)
    assert report.passed()
    for b in report.blocks:
        assert b.homology == ({0: 1} if b.weight == 0 else {})


def test_span_is_independent_of_closure_order():
    pres = PRES["J"]
    reference = IdealSpan(pres, 3, 2)
    shuffled = IdealSpan(pres, 3, 2)
    rng = random.Random(5)
    rng.shuffle(shuffled._builders)
    for seeds in shuffled._seeds.values():
        rng.shuffle(seeds)
    for n in (1, 2, 3):
        for w in (1, 2):
            for key in reference.block_keys(n, w):
                assert reference.block(key).rref() == shuffled.block(key).rref()


def test_ideal_is_closed_under_d(spans):
    span = spans["ECBV"]
    ctx = PRES["ECBV"].ctx
    for n in (1, 2):
        for w in (1, 2, 3):
            for key in span.block_keys(n, w):
                for x in span.elements(key):
                    dx = ctx.differential(x)
                    if dx:
                        assert span.member(dx).member


@pytest.mark.parametrize("name", ["BVmodDelta", "CBVmodDelta", "CBV"])
def test_weight_mixing_differentials_are_refused(name):
    with pytest.raises(Unsupported):
        truncated_homology(builtin(name), 2, 2)


def test_non_homogeneous_relation_refused():
    from operad_forge.presentations import parse_presentation

    pres = parse_presentation("gen x arity=1 degree=0 d->0\nrel r : x.x - x = 0\n")
    with pytest.raises(NotWeightHomogeneous):
        IdealSpan(pres, 1, 2)
