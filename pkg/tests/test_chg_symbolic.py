import random
from fractions import Fraction as Q

import pytest
from hypothesis import given, settings, strategies as st

from rdperiods import chg_symbolic as cs
from rdperiods.polynomial import Poly, RatFunc2

P0 = cs.CHGParams(Q(-1, 2), Q(-1, 2), -2, 1, allow_integral=True)
P1 = cs.CHGParams(Q(1, 3), Q(1, 3), Q(-11, 3), 2)
P2 = cs.CHGParams(Q(1, 5), Q(2, 5), Q(-18, 5), 3)
S = Poly.linear(1, 1, 1)


def printed_first(p, x, y):
    a, b, c, al = p.as_tuple()
    return Poly({(2, 0): al * x, (1, 1): al * x, (1, 0): al * x - (1 + b), (0, 1): 1 + a, (0, 0): 1 + a})


def printed_second(p, x, y):
    a, b, c, al = p.as_tuple()
    return -Poly({(0, 2): al * y, (1, 1): al * y, (1, 0): 1 + b, (0, 1): al * y - (1 + a), (0, 0): 1 + b})


def nab(p, x, y, f, g):
    return cs.nabla_one_form(p, x, y, cs.OneForm.from_polys(f, g)).poly()


def test_nabla_of_zero():
    assert cs.nabla_one_form(P0, -1, -2, cs.OneForm.from_polys(Poly(), Poly())).is_zero()


@pytest.mark.parametrize("p,x,y", [(P0, -1, -2), (P1, 1, 3), (P2, 3, 7)])
def test_basic_expansions_pair_with_swapped_forms(p, x, y):
    # the expansion carrying alpha*x belongs to u1 s du2, the one carrying alpha*y to u2 s du1
    u1, u2 = Poly.monomial(1, 0), Poly.monomial(0, 1)
    assert nab(p, x, y, Poly(), u1 * S) == printed_first(p, x, y)
    assert nab(p, x, y, u2 * S, Poly()) == printed_second(p, x, y)
    assert nab(p, x, y, u2 * S, Poly()) != printed_first(p, x, y)


@pytest.mark.parametrize("p,x,y", [(P0, -1, -2), (P1, 1, 3)])
def test_relations_pass(p, x, y):
    recs = cs.check_gm_relations(p, x, y)
    assert len(recs) == 3 and all(r.passed for r in recs)
    assert all(r.residual == "0" for r in recs)


def test_three_term_scale():
    rec = cs.check_gm_relations(P1, 1, 3)[-1]
    a, b, c, al = P1.as_tuple()
    assert Q(rec.detail["scale"]) == (1 + c) * (3 - 1)
    assert rec.detail["GM_x"] == rec.detail["GM_y"] == "0"


def test_perturbed_relation_fails():
    name = cs.relations(P0, -1, -2)[0].name
    with pytest.raises(cs.IdentityFailed):
        cs.check_gm_relations(P0, -1, -2, perturb=(name, (0, 1), Q(1)))
    with pytest.raises(cs.IdentityFailed):
        cs.check_gm_relations(P0, -1, -2, perturb=("GM_3", (1, 0), Q(1)))
    recs = cs.check_gm_relations(P0, -1, -2, perturb=(name, (0, 1), Q(1)), strict=False)
    assert [r.passed for r in recs] == [False, True, True]


rats = st.builds(
    RatFunc2,
    st.dictionaries(st.tuples(st.integers(0, 2), st.integers(0, 2)),
                    st.fractions(min_value=-3, max_value=3, max_denominator=4), max_size=4).map(Poly),
    st.tuples(st.integers(0, 2), st.integers(0, 2), st.integers(0, 2)),
)


@settings(max_examples=20)
@given(rats)
def test_nabla_squared_vanishes(h):
    form = cs.nabla_function(P1, 1, 3, h)
    assert cs.nabla_one_form(P1, 1, 3, form).is_zero()


@pytest.mark.parametrize("p,x,y", [(P0, -1, -2), (P1, 1, 3)])
def test_closed_form_generators_match_generic(p, x, y):
    for i in range(1, 4):
        for j in range(0, 3):
            assert cs.exact_du2(p, x, y, i, j) == cs.exact_du2_generic(p, x, y, i, j)
            assert cs.exact_du1(p, x, y, j, i) == cs.exact_du1_generic(p, x, y, j, i)


def test_reduce_basis_elements():
    assert cs.reduce_to_basis(P0, -1, -2, (0, 0)) == (1, 0, 0)
    assert cs.reduce_to_basis(P0, -1, -2, (1, 0)) == (0, 1, 0)
    assert cs.reduce_to_basis(P0, -1, -2, (0, 1)) == (0, 0, 1)


@pytest.mark.parametrize("p,x,y", [(P0, -1, -2), (P1, 1, 3), (P2, 3, 7)])
def test_reduce_u1u2(p, x, y):
    a, b, c, al = p.as_tuple()
    d = al * (y - x)
    assert cs.reduce_to_basis(p, x, y, (1, 1)) == (0, -(1 + b) / d, (1 + a) / d)


@pytest.mark.parametrize("p,x,y", [(P0, -1, -2), (P1, 1, 3), (P2, 3, 7)])
def test_reduce_u1_squared_by_hand(p, x, y):
    # the alpha*x relation solved for u1^2, with u1 u2 from the three-term relation
    a, b, c, al = p.as_tuple()
    x, y = Q(x), Q(y)
    d = al * (y - x)
    u1u2 = (Q(0), -(1 + b) / d, (1 + a) / d)
    rest = [al * x * u1u2[i] for i in range(3)]
    rest[0] += 1 + a
    rest[1] += al * x - (1 + b)
    rest[2] += 1 + a
    want = tuple(-v / (al * x) for v in rest)
    assert cs.reduce_to_basis(p, x, y, (2, 0)) == want


def test_reduce_frozen_values():
    assert cs.reduce_to_basis(P0, -1, -2, (1, 1)) == (0, Q(1, 2), Q(-1, 2))
    assert cs.reduce_to_basis(P0, -1, -2, (2, 0)) == (Q(1, 2), -2, 1)
    assert cs.reduce_to_basis(P0, -1, -2, (0, 2)) == (Q(1, 4), Q(-1, 4), Q(-3, 4))


@pytest.mark.parametrize("k,l", [(k, n - k) for n in range(5) for k in range(n + 1)])
def test_exactness_invariance(k, l):
    x, y = Q(1), Q(3)
    base = cs.reduce_to_basis(P1, x, y, (k, l))
    rng = random.Random(k * 10 + l)
    for name, gen in cs.exact_generators(P1, x, y, 3):
        coef = Q(rng.randint(-5, 5), rng.randint(1, 4))
        poly = Poly.monomial(k, l) + gen * coef
        assert cs.reduce_polynomial(P1, x, y, poly) == base, name


def test_reduce_rejects_negative():
    with pytest.raises(ValueError):
        cs.reduce_to_basis(P0, -1, -2, (-1, 0))


def test_gm_entries():
    m = cs.gm_matrix(P1)
    x, y = Q(2), Q(5)
    a, b, c, al = P1.as_tuple()
    Ax, Ay = m.at(x, y)
    assert Ax[0][1] == -(1 + a) / x
    assert Ay[2][0] == al
    assert [Ax[i][0] for i in range(3)] == [0, al, 0]
    assert [al * v for v in cs.reduce_to_basis(P1, x, y, (1, 0))] == [0, al, 0]


def _random_params(rng):
    while True:
        a = Q(rng.randint(-20, 20), rng.choice([3, 5, 7]))
        b = Q(rng.randint(-20, 20), rng.choice([2, 5, 7]))
        al = Q(rng.choice([-3, -2, -1, 1, 2, 3]), rng.randint(1, 3))
        try:
            return cs.CHGParams.from_abalpha(a, b, al)
        except cs.InvalidParams:
            continue


@pytest.mark.parametrize("seed", range(5))
def test_gm_matrix_random_instantiations(seed):
    p = _random_params(random.Random(seed))
    recs = cs.verify_gm_matrix(cs.gm_matrix_literal(p), cs.DEFAULT_POINTS[:3])
    assert len(recs) == 3 * 18 and all(r["pass"] for r in recs)


def test_mismatch_detected():
    bad = cs.gm_matrix_literal(P1).perturbed("y", 0, 2, 1)
    with pytest.raises(cs.MatrixMismatch):
        cs.verify_gm_matrix(bad, cs.DEFAULT_POINTS[:1])


@pytest.mark.parametrize("p,pt", [(P0, (2, 5)), (P2, (3, 7))])
def test_integrability(p, pt):
    recs = cs.check_integrability(p, [pt])
    assert all(r["pass"] for r in recs)


def test_integrability_many_points():
    pts = [(Q(i + 1, 3), Q(-2 * i - 1, 5)) for i in range(10)]
    assert all(r["pass"] for r in cs.check_integrability(P1, pts))


def test_integrability_negative_control():
    bad = cs.gm_matrix_literal(P0).perturbed("x", 1, 1, 1)
    # a constant shift of a diagonal entry survives in the commutator
    with pytest.raises(cs.IntegrabilityFailed):
        cs.check_integrability(P0, [(2, 5)], matrix=bad)


def test_params_validation():
    with pytest.raises(cs.InvalidParams):
        cs.CHGParams(Q(1, 2), Q(1, 2), -3, 1)
    with pytest.raises(cs.InvalidParams):
        cs.CHGParams(Q(-1, 2), Q(-1, 2), -2, 1)
    with pytest.raises(cs.InvalidParams):
        cs.CHGParams.from_abalpha(Q(1, 3), Q(1, 3), 0)
    with pytest.raises(cs.InvalidParams):
        cs.CHGParams.from_abalpha(0.5, Q(1, 3), 1)
    with pytest.raises(cs.InvalidParams):
        cs.gm3_poly(P1, 2, 2)


def test_record_json():
    rec = cs.check_gm_relations(P0, -1, -2)[0].to_json()
    assert rec["pass"] is True and rec["instantiation"]["x"] == "-1"
