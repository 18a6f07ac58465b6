import pytest

from operad_forge.expressions import ParseError, parse_element
from operad_forge.presentations import (
    BUILTIN_NAMES,
    builtin,
    check_presentation,
    format_presentation,
    order_relation,
    parse_presentation,
    seven_term_relation,
)


def relation(p, name):
    (rel,) = [r for r in p.relations if r.name == name]
    return rel


@pytest.mark.parametrize("name", BUILTIN_NAMES)
def test_builtins_pass_their_own_checks(name):
    report = check_presentation(builtin(name))
    assert report.passed, report.failures()


def test_unknown_builtin():
    with pytest.raises(KeyError):
        builtin("Lie")


def test_ebv_shape():
    p = builtin("EBV")
    assert p.primary_generators() == ["i"]
    assert p.ctx.generators["i"].degree == -2
    assert p.ctx.generators["d_i"].degree == -1
    comm = relation(p, "comm").element
    assert (comm.arity(), comm.weight(), comm.degree()) == (1, 2, -3)
    assert comm == parse_element(p.ctx, "i.d_i - d_i.i")


def test_com_has_no_generators():
    p = builtin("Com")
    assert p.ctx.generators == {}
    assert p.ideal_relations == []


def test_jacobi_relations():
    p = builtin("J")
    ctx = p.ctx
    sq = relation(p, "j^2")
    assert (sq.weight, sq.element.degree()) == (2, -2)
    leibniz = relation(p, "order1(j)")
    assert leibniz.weight == 1
    assert leibniz.element == parse_element(ctx, "mu(j(1), 2) + mu(1, j(2)) - j(mu(1, 2))")
    # i d(i) = d(i) i + 2 j i
    assert relation(p, "comm").element == parse_element(ctx, "i.d_i - d_i.i - 2*j.i")


def test_indexed_families_respect_the_cap():
    p = builtin("ECBV", index_cap=2)
    assert sorted(p.primary_generators()) == ["i_1", "i_2"]
    assert relation(p, "order3(i_2)").element.arity() == 4
    assert "[i_1,i_3]" not in {r.name for r in p.relations}


def test_vacuous_self_commutator_is_recorded():
    p = builtin("ECBV")
    assert relation(p, "[i_2,i_2]").element.is_zero()


def test_order_relation_cross_check():
    ctx = builtin("EBV").ctx
    i = ctx.gen("i")
    seven = seven_term_relation(ctx, i)
    shuffle = order_relation(ctx, i, 2)
    assert seven == shuffle or seven == -shuffle
    assert order_relation(ctx, ctx.gen("d_i"), 2)


def test_cbv_mod_delta_flags_weight_mixing():
    report = check_presentation(builtin("CBVmodDelta"))
    assert report.passed
    flagged = [cond for cond, ok, detail in report.items if "not weight-homogeneous" in detail]
    assert any(c.startswith("d(phi_2)") for c in flagged)


@pytest.mark.parametrize("name", BUILTIN_NAMES)
def test_text_round_trip(name):
    p = builtin(name)
    q = parse_presentation(format_presentation(p), name=name)
    assert format_presentation(q) == format_presentation(p)
    assert check_presentation(q).passed


def test_corrupted_ebv_fails():
    text = format_presentation(builtin("EBV")).replace("d->d_i(1)", "d->0")
    report = check_presentation(parse_presentation(text))
    assert not report.passed
    assert any("not defined" in detail for _, ok, detail in report.items if not ok)


def test_relation_of_mixed_arity_is_reported():
    text = "gen x arity=1 degree=0 d->0\ngen y arity=2 degree=0 d->0\nrel bad : x + y = 0\n"
    with pytest.raises(ParseError):
        parse_presentation(text)


def test_inhomogeneous_relation_fails_check():
    text = "gen x arity=1 degree=0 d->0\ngen y arity=1 degree=1 d->0\nrel bad : x + y = 0\n"
    report = check_presentation(parse_presentation(text))
    assert "bad: single degree" in report.failures()


def test_symmetry_closure_detects_missing_images():
    # an asymmetric relation on a binary generator is not closed under S_2
    text = "gen b arity=2 degree=0 d->0\nrel r : mu(b(1, 2), 3) = 0\n"
    report = check_presentation(parse_presentation(text))
    assert not report.passed
    orbit = [(1, 2, 3), (2, 1, 3), (1, 3, 2), (3, 1, 2), (2, 3, 1), (3, 2, 1)]
    closed = "gen b arity=2 degree=0 d->0\n" + "".join(
        f"rel r{a}{b}{c} : mu(b({a}, {b}), {c}) = 0\n" for a, b, c in orbit
    )
    report = check_presentation(parse_presentation(closed))
    assert report.passed, report.failures()


@pytest.mark.parametrize(
    "text",
    [
        "gen x arity=one degree=0 d->0\n",
        "gen x arity=1 degree=0 d->y\n",
        "gen x arity=1 degree=0 d->0\nwhat x\n",
        "gen x arity=1 degree=0 d->0\nh y -> x\n",
        "gen x arity=1 degree=0 d->0\ngen x arity=1 degree=0 d->0\n",
    ],
)
def test_parse_errors(text):
    with pytest.raises(ParseError):
        parse_presentation(text)
