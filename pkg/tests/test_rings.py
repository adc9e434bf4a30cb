import itertools

import numpy as np
import pytest
from hypothesis import given, settings
from hypothesis import strategies as st

from fdcalc import rings
from fdcalc.arith import NEG_INF
from fdcalc.calculus import FunctionTable, fdeg
from fdcalc.errors import CapacityError, InputError
from fdcalc.rings import (
    FiniteRngSpec,
    SparsePoly,
    make_fq,
    p_weight_degree,
    poly_degree,
    poly_eval,
    poly_to_table,
    reduce_over_fq,
    tensor_table,
    validate_rng,
)
from fdcalc.verifier import random_poly, random_rng_spec

F2, F3, F4, F8, F9 = make_fq(2, 1), make_fq(3, 1), make_fq(2, 2), make_fq(2, 3), make_fq(3, 2)


def poly(ring, n, *terms):
    return SparsePoly(ring, n, tuple(terms))


def upper_triangular():
    m = np.zeros((3, 3, 3), dtype=np.int64)
    m[0, 0, 0] = m[0, 1, 1] = m[1, 2, 1] = m[2, 2, 2] = 1  # E11, E12, E22
    return FiniteRngSpec(2, 3, m)


def test_validate_examples():
    rep = validate_rng(F2)
    assert rep.valid and rep.commutative and rep.unit == (1,)
    null = FiniteRngSpec(2, 2, np.zeros((2, 2, 2), dtype=np.int64))
    rep = validate_rng(null)
    assert rep.valid and rep.commutative and not rep.unital
    m = np.zeros((2, 2, 2), dtype=np.int64)
    m[0, 0, 1] = 1  # e1 e1 = e2
    m[0, 1, 0] = 1  # e1 e2 = e1
    rep = validate_rng(FiniteRngSpec(2, 2, m))
    assert not rep.valid and rep.witness is not None
    i, j, k = rep.witness
    e = np.eye(2, dtype=np.int64)
    spec = FiniteRngSpec(2, 2, m)
    assert spec.mul(spec.mul(e[i], e[j]), e[k]) != spec.mul(e[i], spec.mul(e[j], e[k]))


def test_noncommutative_triangular():
    U = upper_triangular()
    rep = U.report
    assert rep.valid and not rep.commutative and rep.unit == (1, 0, 1)
    assert not U.is_field


def test_unit_search_linear_algebra_agrees(monkeypatch):
    rng = np.random.default_rng(5)
    specs = [F4, F9, upper_triangular()] + [random_rng_spec(3, 3, rng) for _ in range(10)]
    exhaustive = [validate_rng(s).unit for s in specs]
    monkeypatch.setattr(rings, "UNIT_SEARCH_CAP", 1)
    assert [validate_rng(s).unit for s in specs] == exhaustive


def test_large_field_unit_by_linear_algebra():
    big = make_fq(2, 17)
    assert big.report.unit == (1,) + (0,) * 16


def roots_free_quadratics(p):
    """Monic quadratics without roots in Z/p, in constant-first lexicographic order."""
    out = []
    for c0, c1 in itertools.product(range(p), repeat=2):
        if all((x * x + c1 * x + c0) % p for x in range(p)):
            out.append((c0, c1, 1))
    return out


def test_fq_moduli():
    assert F4.modulus == roots_free_quadratics(2)[0] == (1, 1, 1)
    assert F9.modulus == roots_free_quadratics(3)[0] == (1, 0, 1)
    assert F2.dim == 1 and F2.mult.tolist() == [[[1]]]
    assert make_fq(5, 2).modulus == roots_free_quadratics(5)[0]


@pytest.mark.parametrize("p,n", [(2, 1), (2, 2), (2, 3), (3, 1), (3, 2), (2, 4), (2, 5), (2, 6), (5, 2), (7, 2)])
def test_fq_every_nonzero_invertible(p, n):
    F = make_fq(p, n)
    els = [tuple(int(v) for v in x) for x in F.elements()]
    one = F.report.unit
    assert F.report.commutative
    for x in els[1:]:
        assert any(F.mul(x, y) == one for y in els)


def test_is_field_rejects_non_fields():
    # Z/2[t]/(t^2) is commutative and unital but has a nilpotent
    m = np.zeros((2, 2, 2), dtype=np.int64)
    m[0, 0, 0] = m[0, 1, 1] = m[1, 0, 1] = 1
    assert not FiniteRngSpec(2, 2, m).is_field


def test_eval_examples():
    f = poly(F2, 2, ((1,), (1, 1)))
    assert poly_eval(f, [(1,), (1,)]) == (1,)
    g = poly(F3, 2, ((1,), (1, 0)), ((1,), (0, 1)))
    assert poly_eval(g, [(1,), (2,)]) == (0,)
    null = FiniteRngSpec(2, 2, np.zeros((2, 2, 2), dtype=np.int64))
    c = poly(null, 1, ((1, 1), (0,)))
    assert poly_eval(c, [(0, 1)]) == (1, 1)
    with pytest.raises(InputError):
        poly_eval(g, [(1,)])


def test_noncommutative_eval_order():
    U = upper_triangular()
    E11, E12 = (1, 0, 0), (0, 1, 0)
    t1t2 = poly(U, 2, ((1, 0, 1), (1, 1)))
    assert poly_eval(t1t2, [E12, E11]) == (0, 0, 0)      # E12 E11 = 0
    assert poly_eval(t1t2, [E11, E12]) == (0, 1, 0)      # E11 E12 = E12
    left = poly(U, 1, (E11, (1,)))
    assert poly_eval(left, [E12]) == (0, 1, 0)           # coefficient acts from the left
    right = poly(U, 1, (E12, (1,)))
    assert poly_eval(right, [E11]) == (0, 0, 0)


def test_degrees():
    f = poly(F2, 1, ((1,), (5,)))
    assert (poly_degree(f), p_weight_degree(f)) == (5, 2)
    g = poly(F2, 2, ((1,), (2, 1)))
    assert (poly_degree(g), p_weight_degree(g)) == (3, 2)
    z = SparsePoly.zero(F2, 2)
    assert (poly_degree(z), p_weight_degree(z)) == (NEG_INF, NEG_INF)


def test_reduce_examples():
    assert reduce_over_fq(poly(F2, 1, ((1,), (4,)))) == poly(F2, 1, ((1,), (1,)))
    t3 = poly(F4, 1, ((1, 0), (3,)))
    assert reduce_over_fq(t3) == t3
    h = poly(F4, 1, ((1, 0), (5,)), ((1, 0), (2,)))
    assert reduce_over_fq(h).is_zero()
    assert poly_to_table(h).is_zero()
    with pytest.raises(InputError):
        reduce_over_fq(poly(upper_triangular(), 1, ((1, 0, 0), (2,))))


def test_poly_table_examples(backend):
    ident = poly_to_table(poly(F2, 1, ((1,), (1,))))
    assert ident.values.ravel().tolist() == [0, 1]
    prod = poly_to_table(poly(F2, 2, ((1,), (1, 1))))
    assert prod.values.ravel().tolist() == [0, 0, 0, 1]
    frob = poly_to_table(poly(F4, 1, ((1, 0), (2,))))
    assert fdeg(frob) == 1


def test_table_matches_pointwise_eval(backend, rng):
    for ring in [F4, F9, upper_triangular(), random_rng_spec(3, 2, rng)]:
        f = random_poly(ring, 2, rng, 4, 4)
        T = poly_to_table(f)
        for i, x in enumerate(T.domain.residue_array):
            assert tuple(T.values[i]) == poly_eval(f, x.reshape(2, ring.dim))


def test_poly_table_capacity():
    from fdcalc.groups import get_enumeration_cap, set_enumeration_cap

    old = get_enumeration_cap()
    set_enumeration_cap(64)
    try:
        with pytest.raises(CapacityError):
            poly_to_table(poly(F9, 3, ((1, 0), (1, 1, 1))))
    finally:
        set_enumeration_cap(old)


def test_degree_chain(backend, rng):
    commutative = [random_rng_spec(p, d, rng) for p, d in [(2, 2), (2, 3), (3, 2), (3, 1)]]
    for ring in [F2, F4, F9] + commutative:
        for _ in range(15):
            n = 2 if ring.order > 8 else 3
            f = random_poly(ring, n, rng, 6, 4)
            assert fdeg(poly_to_table(f)) <= p_weight_degree(f) <= poly_degree(f)


def test_reduction_soundness_and_equality(backend, rng):
    for ring, n in [(F2, 3), (F4, 2), (F8, 2)]:
        for _ in range(25):
            f = random_poly(ring, n, rng, 3 * ring.order, 4)
            fr = reduce_over_fq(f)
            assert poly_to_table(f) == poly_to_table(fr)
            assert fdeg(poly_to_table(f)) == p_weight_degree(fr)


def test_tensor_product_degree(backend, rng):
    for ring in [F2, F4, F3]:
        for _ in range(10):
            f = poly_to_table(random_poly(ring, 1, rng, 5, 3))
            g = poly_to_table(random_poly(ring, 2 if ring.order < 4 else 1, rng, 5, 3))
            if f.is_zero() or g.is_zero():
                continue
            assert fdeg(tensor_table(f, g, ring)) == fdeg(f) + fdeg(g)
    null_ish = random_rng_spec(2, 2, rng)
    for _ in range(10):
        f = poly_to_table(random_poly(null_ish, 1, rng, 3, 3))
        g = poly_to_table(random_poly(null_ish, 1, rng, 3, 3))
        assert fdeg(tensor_table(f, g, null_ish)) <= max(fdeg(f) + fdeg(g), NEG_INF)


def test_poly_normalisation_and_json():
    f = poly(F4, 2, ((1, 0), (1, 0)), ((1, 0), (1, 0)), ((0, 1), (0, 2)), ((3, 2), (0, 0)))
    assert f.terms == (((1, 0), (0, 0)), ((0, 1), (0, 2)))
    assert SparsePoly.from_json(f.to_json()) == f
    assert FiniteRngSpec.from_json(F9.to_json()) == F9
    U = upper_triangular()
    assert FiniteRngSpec.from_json(U.to_json()) == U
    with pytest.raises(InputError, match=r"terms\[0\]\.exps"):
        SparsePoly.from_json({"ring": {"field": {"p": 2, "n": 1}}, "vars": 2, "terms": [{"coeff": [1], "exps": [1]}]})
    with pytest.raises(InputError, match=r"\$\.mult"):
        FiniteRngSpec.from_json({"p": 2, "dim": 2, "mult": [[[0, 0]]]})
    with pytest.raises(InputError, match="field"):
        FiniteRngSpec.from_json({"field": {"p": 4, "n": 1}})


def test_rng_generation_is_validated(rng):
    for p, d in [(2, 1), (2, 2), (2, 3), (3, 2), (3, 3)]:
        for _ in range(5):
            s = random_rng_spec(p, d, rng)
            assert s.report.valid and s.report.commutative
    assert random_rng_spec(2, 2, np.random.default_rng(0)).report.valid


@settings(max_examples=60, deadline=None)
@given(st.sampled_from([(2, 1), (2, 2), (3, 1), (3, 2)]), st.integers(1, 2), st.integers(0, 2**31))
def test_reduction_preserves_function_property(field, n, seed):
    F = make_fq(*field)
    f = random_poly(F, n, np.random.default_rng(seed), 12, 4)
    r = reduce_over_fq(f)
    assert poly_to_table(r) == poly_to_table(f)
    assert all(e < F.order for _, exps in r.terms for e in exps)
