import pytest

from operad_forge.expressions import ParseError
from operad_forge.morphisms import (
    BUILTIN_MORPHISMS,
    IllTyped,
    MorphismSpec,
    builtin_morphism,
    check_morphism,
    compose_morphisms,
    composite_consistency,
    parse_morphism,
)
from operad_forge.presentations import builtin


@pytest.mark.parametrize("name", BUILTIN_MORPHISMS)
def test_builtin_morphisms_pass(name):
    report = check_morphism(builtin_morphism(name))
    assert report.verdict == "pass", [(o.label, o.detail) for o in report.obligations if o.status != "ok"]


def test_composite_consistency():
    assert composite_consistency().verdict == "pass"


def test_derived_images_are_filled_in():
    m = builtin_morphism("ECBV->EBV")
    T = m.target.ctx
    assert m.images["d_i_1"] == T.gen("d_i")
    assert m.images["d_i_2"].is_zero()


def test_bv_to_ebv_sends_delta_squared_into_the_ideal():
    m = builtin_morphism("BV->EBV")
    S = m.source.ctx
    image = m.apply(S.word("Delta", "Delta"))
    assert image == m.target.ctx.word("d_i", "d_i")


def test_j_to_ebv_kills_the_extra_term():
    m = builtin_morphism("J->EBV")
    (rel,) = [r for r in m.source.relations if r.name == "comm"]
    assert m.apply(rel.element) == m.target.ctx.word("i", "d_i") - m.target.ctx.word("d_i", "i")


def test_plus_sign_for_delta_n_fails():
    good = builtin_morphism("CBVmodDelta->ECBV")
    T = good.target.ctx
    images = {k: v for k, v in good.images.items() if not k.startswith("d_")}
    for n in (1, 2, 3):
        images[f"Delta_{n}"] = T.gen(f"d_i_{n}")
    report = check_morphism(MorphismSpec("wrong sign", good.source, good.target, images))
    assert report.verdict == "fail"
    failed = {o.label for o in report.obligations if o.status == "fail"}
    assert "d(phi_1)" in failed


def test_plus_ji_for_delta_two_fails():
    good = builtin_morphism("CBV->J")
    T = good.target.ctx
    images = dict(good.images)
    images["Delta_2"] = T.word("j", "i")
    report = check_morphism(MorphismSpec("plus ji", good.source, good.target, images))
    assert report.verdict == "fail"
    assert "d(Delta_2)" in {o.label for o in report.obligations if o.status == "fail"}


def test_composition():
    f = builtin_morphism("CBV->J")
    g = builtin_morphism("J->EBV")
    gf = compose_morphisms(f, g)
    assert gf.source is f.source and gf.target is g.target
    assert check_morphism(gf).verdict == "pass"


def test_ill_typed_image():
    src, tgt = builtin("BV"), builtin("EBV")
    with pytest.raises(IllTyped):
        MorphismSpec("bad", src, tgt, {"Delta": tgt.ctx.gen("i")})
    with pytest.raises(IllTyped):
        MorphismSpec("bad", src, tgt, {})
    with pytest.raises(IllTyped):
        MorphismSpec("bad", src, tgt, {"Delta": -tgt.ctx.gen("d_i"), "nope": tgt.ctx.zero()})


def test_small_caps_skip_obligations():
    report = check_morphism(builtin_morphism("BV->EBV"), max_arity=1, max_weight=1)
    assert report.verdict == "incomplete"
    assert any(o.status == "skipped" for o in report.obligations)


def test_morphism_file(tmp_path):
    (tmp_path / "ebv.pres").write_text(
        "gen i arity=1 degree=-2 d->d_i(1)\n"
        "gen d_i arity=1 degree=-1 d->0\n"
        "rel comm : i.d_i = d_i.i\n"
        "rel order2(i) : mu(1, 2, i(3)) + mu(1, 3, i(2)) + mu(2, 3, i(1)) - mu(1, i(mu(2, 3)))"
        " - mu(2, i(mu(1, 3))) - mu(3, i(mu(1, 2))) + i(mu(1, 2, 3)) = 0\n"
        "h d_i -> i\n"
    )
    path = tmp_path / "bv.morph"
    path.write_text("# BV into a user copy of EBV\nsource builtin:BV\ntarget ebv.pres\nmap Delta -> -d(i)\n")
    m = parse_morphism(path.read_text(), str(tmp_path))
    assert check_morphism(m).verdict == "pass"


@pytest.mark.parametrize(
    "text",
    [
        "source builtin:BV\nmap Delta -> -d(i)\n",
        "source builtin:BV\ntarget builtin:EBV\nmap Delta = -d(i)\n",
        "source builtin:BV\ntarget builtin:EBV\nmap Delta -> -d(\n",
        "source builtin:Nope\ntarget builtin:EBV\n",
        "frobnicate\n",
    ],
)
def test_morphism_file_errors(text):
    with pytest.raises(ParseError):
        parse_morphism(text)
