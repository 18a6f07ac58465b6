import os
from fractions import Fraction

import pytest
from hypothesis import given, settings, strategies as st

from operad_forge.algebra import (
    BUILTIN_ALGEBRAS,
    MAX_Z_ORDER,
    AlgebraError,
    Operator,
    builtin_algebra,
    check_bv,
    check_cbv_infty,
    check_diff_operator_order,
    check_ebv,
    check_ecbv_algebra,
    check_gerstenhaber,
    check_jacobi_algebra,
    check_shifted_lie,
    check_trivialization,
    commutator,
    contraction,
    exterior_algebra,
    identity_operator,
    koszul_bracket,
    minimal_order,
    multiplication,
    parse_algebra,
    zero_operator,
)

DATA = os.path.join(os.path.dirname(__file__), "data")

EXACT_SOLVABLE = """
# d e3 = e2 e3 with the contraction dual to e2 e3
exterior e1:1 e2:1 e3:1
d e3 = e2e3
operator i = iota_e2 iota_e3
"""

SQUARING_J = """
exterior e1:1 e2:1 f:3
operator j = iota_e1 + mul_e1 mul_e2 iota_f
"""


def model(name):
    return builtin_algebra(name)


def failures(report):
    return set(report.failures())


@pytest.mark.parametrize("name", BUILTIN_ALGEBRAS)
def test_builtin_algebras_are_sound(name):
    m = model(name)
    assert m.algebra.problems() == []
    for op in m.operators.values():
        assert op.problems(m.algebra) == []


@pytest.mark.parametrize("name", BUILTIN_ALGEBRAS)
def test_differential_has_order_one(name):
    A = model(name).algebra
    assert check_diff_operator_order(A, A.d, 1).passed
    assert check_diff_operator_order(A, A.d, 1, exhaustive=True).passed


def test_bivector_contraction_has_order_two():
    m = model("torus4")
    A, i = m.algebra, m.operators["i"]
    assert check_diff_operator_order(A, i, 2).passed
    assert not check_diff_operator_order(A, i, 1).passed
    assert minimal_order(A, i) == 2


def test_zero_operator_has_every_order():
    A = model("heisenberg").algebra
    for n in (1, 2, 3):
        assert check_diff_operator_order(A, zero_operator(A, -1), n).passed


def test_operators_moving_the_unit_have_no_finite_order():
    # the alternation starts at p = 1, so D(1) != 0 is never cancelled
    A = model("heisenberg").algebra
    m = multiplication(A, A.basis_vector(A.index("e1")))
    assert minimal_order(A, m, limit=3) is None
    assert minimal_order(A, identity_operator(A), limit=3) is None


def test_order_argument_is_checked():
    A = model("torus4").algebra
    with pytest.raises(AlgebraError):
        check_diff_operator_order(A, A.d, 0)


SMALL = exterior_algebra(["e1", "e2", "e3"], d={"e3": {("e1", "e2"): 1}})
IOTA = {g: contraction(SMALL, g) for g in ("e1", "e2", "e3")}
MUL = {g: multiplication(SMALL, SMALL.basis_vector(SMALL.index(g))) for g in ("e1", "e2", "e3")}


@st.composite
def operators(draw):
    """Random sums of words in contractions and multiplications, one degree."""
    degree = draw(st.integers(-2, 1))
    total = zero_operator(SMALL, degree)
    for _ in range(draw(st.integers(1, 3))):
        n_iota = draw(st.integers(0, 3))
        n_mul = n_iota + degree
        if n_mul < 0 or n_mul > 3:
            continue
        word = [IOTA[g] for g in draw(st.lists(st.sampled_from(sorted(IOTA)), min_size=n_iota, max_size=n_iota))]
        word += [MUL[g] for g in draw(st.lists(st.sampled_from(sorted(MUL)), min_size=n_mul, max_size=n_mul))]
        draw(st.randoms()).shuffle(word)
        op = word[0] if word else identity_operator(SMALL)
        for w in word[1:]:
            op = op.compose(w)
        coef = Fraction(draw(st.integers(-2, 2)))
        if op.degree == degree and coef:
            total = total + coef * op
    return total


@settings(max_examples=60)
@given(operators())
def test_order_is_monotone(op):
    for n in (1, 2, 3):
        if check_diff_operator_order(SMALL, op, n).passed:
            assert check_diff_operator_order(SMALL, op, n + 1).passed


@settings(max_examples=30)
@given(operators())
def test_symmetric_tuples_suffice(op):
    for n in (1, 2):
        fast = check_diff_operator_order(SMALL, op, n).passed
        assert fast == check_diff_operator_order(SMALL, op, n, exhaustive=True).passed


def test_koszul_bracket_of_zero_is_zero():
    A = model("torus4").algebra
    assert koszul_bracket(A, zero_operator(A, -1)) == {}
    i = model("torus4").operators["i"]
    assert commutator(i, A.d).is_zero()


def test_heisenberg_bracket():
    m = model("heisenberg")
    A = m.algebra
    delta = commutator(m.operators["i"], A.d)
    assert not delta.is_zero()
    table = koszul_bracket(A, delta)
    assert table
    assert check_gerstenhaber(A, table).passed
    assert check_shifted_lie(A, table).passed
    # the untwisted bracket is graded symmetric, not antisymmetric
    assert not check_shifted_lie(A, table, twist=False).passed


def test_random_bracket_breaks_gerstenhaber():
    A = model("heisenberg").algebra
    table = {(A.index("e1"), A.index("e2")): {A.index("1"): Fraction(1)}}
    assert not check_gerstenhaber(A, table).passed


def test_bv_basics():
    A = model("heisenberg").algebra
    assert check_bv(A, zero_operator(A, -1)).passed
    with pytest.raises(AlgebraError):
        check_bv(A, A.d)


def test_ebv_verdicts():
    assert check_ebv(model("torus4").algebra, model("torus4").operators["i"]).passed
    m = model("heisenberg")
    assert failures(check_ebv(m.algebra, m.operators["i"])) == {"[i,[i,d]] = 0"}
    A = model("torus4").algebra
    assert check_ebv(A, zero_operator(A, -2)).passed


def test_exact_bv_implies_bv_and_gerstenhaber():
    m = parse_algebra(EXACT_SOLVABLE)
    A, i = m.algebra, m.operators["i"]
    assert check_ebv(A, i).passed
    delta = commutator(i, A.d)
    assert not delta.is_zero()
    assert check_bv(A, delta).passed
    table = koszul_bracket(A, delta)
    assert check_gerstenhaber(A, table).passed
    assert check_shifted_lie(A, table).passed


@pytest.mark.parametrize("name", ["heisenberg", "solvable3"])
def test_jacobi_chain(name):
    m = model(name)
    A, i, j = m.algebra, m.operators["i"], m.operators["j"]
    assert check_jacobi_algebra(A, i, j).passed
    ji = j.compose(i)
    assert not ji.is_zero()
    deltas = [commutator(i, A.d), -1 * ji]
    assert check_cbv_infty(A, deltas).passed
    assert check_trivialization(A, deltas, [i], 4).passed


def test_exact_bv_is_jacobi_with_j_zero():
    m = model("torus4")
    A = m.algebra
    assert check_jacobi_algebra(A, m.operators["i"], zero_operator(A, -1)).passed
    assert check_jacobi_algebra(A, zero_operator(A, -2), zero_operator(A, -1)).passed


def test_j_squared_nonzero_fails():
    m = parse_algebra(SQUARING_J)
    A, j = m.algebra, m.operators["j"]
    assert check_diff_operator_order(A, j, 1).passed
    assert not j.compose(j).is_zero()
    assert failures(check_jacobi_algebra(A, zero_operator(A, -2), j)) == {"j^2 = 0"}


def test_wrong_sign_delta_two():
    m = model("solvable3")
    A, i, j = m.algebra, m.operators["i"], m.operators["j"]
    wrong = [commutator(i, A.d), j.compose(i)]
    assert "n=2: [d,Delta_n] + sum_k Delta_k Delta_(n-k) = 0" in failures(check_cbv_infty(A, wrong))
    assert not check_trivialization(A, wrong, [i], 4).passed


def test_wrong_sign_is_invisible_to_cbv_when_ji_commutes_with_d():
    m = model("heisenberg")
    A, i, j = m.algebra, m.operators["i"], m.operators["j"]
    assert commutator(A.d, j.compose(i)).is_zero()
    wrong = [commutator(i, A.d), j.compose(i)]
    assert check_cbv_infty(A, wrong).passed
    assert "z^2: coefficient equals Delta_2" in failures(check_trivialization(A, wrong, [i], 4))


def test_cbv_degrees_are_checked():
    A = model("torus4").algebra
    with pytest.raises(AlgebraError):
        check_cbv_infty(A, [model("torus4").operators["i"]])


def test_ecbv_positive():
    m = model("torus4")
    A, i = m.algebra, m.operators["i"]
    report = check_ecbv_algebra(A, [i])
    assert report.passed
    assert any("(n = m)" in cond for cond, _, _ in report.items)
    assert check_ecbv_algebra(A, [zero_operator(A, -2), zero_operator(A, -4)]).passed
    assert check_trivialization(A, [commutator(i, A.d)], [i], 4).passed


def test_ecbv_noncommuting_control():
    with open(os.path.join(DATA, "noncommuting.alg"), encoding="utf-8") as fh:
        m = parse_algebra(fh.read())
    A = m.algebra
    report = check_ecbv_algebra(A, [m.operators["i_1"], m.operators["i_2"]])
    assert failures(report) == {"[i_1,i_2] = 0"}


@settings(max_examples=20)
@given(st.lists(st.booleans(), min_size=1, max_size=3), st.data())
def test_trivial_phi_needs_trivial_deltas(nonzero, data):
    A = SMALL
    deltas = []
    for n, flag in enumerate(nonzero, start=1):
        if flag and n == 1:
            deltas.append(commutator(IOTA["e1"].compose(IOTA["e2"]), A.d))
        elif flag:
            # any nonzero operator of degree 1 - 2n
            col = data.draw(st.sampled_from([k for k in range(A.dim) if A.degrees[k] >= 2 * n - 1]
                                            or [None]))
            if col is None:
                deltas.append(zero_operator(A, 1 - 2 * n))
                continue
            target = [k for k in range(A.dim) if A.degrees[k] == A.degrees[col] + 1 - 2 * n]
            deltas.append(Operator({col: {target[0]: Fraction(1)}}, 1 - 2 * n) if target else zero_operator(A, 1 - 2 * n))
        else:
            deltas.append(zero_operator(A, 1 - 2 * n))
    report = check_trivialization(A, deltas, [], 4)
    assert report.passed == all(D.is_zero() for D in deltas)


def test_trivialization_cap():
    A = model("torus4").algebra
    with pytest.raises(AlgebraError):
        check_trivialization(A, [], [], MAX_Z_ORDER + 1)


def test_explicit_basis_format():
    text = """
basis 1 0
basis x 1
basis y 1
basis xy 2
1 * 1 = 1
1 * x = x
1 * y = y
1 * xy = xy
x * y = xy
d x = xy
operator D -1
x -> 1
xy -> y
end
"""
    m = parse_algebra(text)
    A = m.algebra
    assert A.problems() == []
    assert A.mul_basis(A.index("y"), A.index("x")) == {A.index("xy"): -1}
    assert check_diff_operator_order(A, m.operators["D"], 1).passed


@pytest.mark.parametrize(
    "text",
    [
        "exterior e1:2\n",
        "exterior e1:1\noperator i = iota_e9\n",
        "basis x\n",
        "basis x 1\nbasis y 1\nx * y = z\n",
        "exterior e1:1 e2:1\nd e1 = e2\n",
        "basis 1 0\nbasis x 1\n1 * 1 = 1\n1 * x = x\nd x = x\n",
        "exterior e1:1\nfrobnicate\n",
        "exterior e1:1\noperator D -1\ne1 -> 1\n",
    ],
)
def test_parse_errors(text):
    with pytest.raises(AlgebraError):
        parse_algebra(text)
