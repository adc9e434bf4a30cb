import itertools
import json

import numpy as np
import pytest

from fdcalc.arith import INF, NEG_INF
from fdcalc.calculus import FunctionTable, fdeg
from fdcalc.errors import CapacityError, GenerationError, InputError
from fdcalc.groups import PGroupShape
from fdcalc.rings import SparsePoly, make_fq
from fdcalc.verifier import (
    SystemInstance,
    bound_axkatz_wilson,
    bound_chevalley_warning,
    bound_classical_axkatz_ordp,
    bound_gtcw,
    bound_gtpakt,
    bound_moreno,
    bound_multi_target,
    bound_ring_axkatz,
    count_zeros,
    generate_instance,
    linear_form_instance,
    random_rng_spec,
    run_campaign,
    sigma_invariant,
    verify_instance,
)

F2, F3, F4 = make_fq(2, 1), make_fq(3, 1), make_fq(2, 2)


def ring_inst(ring, n, *polys):
    return SystemInstance.ring_system(ring, n, [SparsePoly(ring, n, tuple(t)) for t in polys])


def test_count_examples(backend):
    inst = ring_inst(F3, 2, [((1,), (1, 0)), ((1,), (0, 1))])
    assert count_zeros(inst) == (3, 1)
    inst = ring_inst(F2, 2, [((1,), (1, 1))])
    assert count_zeros(inst) == (3, 0)
    empty = SystemInstance.group(PGroupShape(3, (1, 2)), [])
    assert count_zeros(empty) == (27, 3)
    const = SystemInstance.group(PGroupShape.elementary(2, 2), [FunctionTable.from_function(
        PGroupShape.elementary(2, 2), PGroupShape.cyclic(2, 1), lambda x: 1)])
    assert count_zeros(const) == (0, INF)


def test_bound_examples():
    assert bound_axkatz_wilson(4, 2, [(1, 1)]) == 3
    assert bound_axkatz_wilson(4, 2, [(2, 1)]) == 1
    assert bound_axkatz_wilson(3, 3, [(1, 1), (1, 1)]) == 1
    assert bound_multi_target(6, 2, [((1, 1), 1)]) == 4
    assert bound_multi_target(6, 2, [((2, 1), 1)]) == 1
    assert bound_gtpakt(1, 3, 2, [1, 1]) == 1
    assert bound_gtpakt(2, 3, 2, [1]) == 4
    assert bound_gtpakt(2, 3, 2, [2, 2]) == 0
    assert bound_gtcw(2, (1,), 1, (1,), [0]) == 1
    assert bound_gtcw(2, (1,), 1, (1,), [1]) == 0
    assert bound_gtcw(2, (1, 1), 1, (1,), [1]) == 1
    assert bound_gtcw(2, (1, 1), 1, (1,), [2]) == 0
    assert bound_ring_axkatz(1, 3, [1, 1]) == 1
    assert bound_classical_axkatz_ordp(2, 3, [1]) == 4
    assert bound_moreno(2, 3, [1]) == 4
    assert bound_chevalley_warning(3, [1, 1]) == 1 and bound_chevalley_warning(2, [1, 1]) == 0
    with pytest.raises(InputError):
        bound_axkatz_wilson(3, 2, [])
    with pytest.raises(InputError):
        bound_gtpakt(1, 3, 2, [0, 0])


def test_gtcw_indicator_sound_on_product():
    """x1 x2 on (Z/2)^2 has 3 zeros, so the indicator must be 0 there."""
    A = PGroupShape.elementary(2, 2)
    f = FunctionTable.from_function(A, PGroupShape.cyclic(2, 1), lambda x: x[0] * x[1])
    assert count_zeros(SystemInstance.group(A, [f]))[1] == 0
    assert bound_gtcw(2, A.alphas, 1, (1,), [fdeg(f)]) == 0


def test_multi_target_reduces_to_cyclic():
    rng = np.random.default_rng(3)
    for _ in range(200):
        p = int(rng.choice([2, 3]))
        N = int(rng.integers(1, 11))
        pairs = [(int(rng.integers(1, 4)), int(rng.integers(1, 5))) for _ in range(int(rng.integers(1, 4)))]
        assert bound_multi_target(N, p, [((b,), d) for b, d in pairs]) == bound_axkatz_wilson(N, p, pairs)


def test_monotonicity_grid():
    for p in (2, 3):
        for N in range(1, 11):
            for d, b in itertools.product(range(1, 5), range(1, 4)):
                v = bound_axkatz_wilson(N, p, [(b, d)])
                if d < 4:
                    assert bound_axkatz_wilson(N, p, [(b, d + 1)]) <= v
                if b < 3:
                    assert bound_axkatz_wilson(N, p, [(b + 1, d)]) <= v
                assert bound_axkatz_wilson(N + 1, p, [(b, d)]) >= v


def test_classical_placement_dominates():
    for N in range(2, 6):
        for n in range(1, 10):
            for degs in itertools.product(range(1, 4), repeat=2):
                assert bound_classical_axkatz_ordp(N, n, degs) >= bound_ring_axkatz(N, n, degs)


def test_verify_examples(backend):
    rep = verify_instance(linear_form_instance(2, 4))
    by = {b.name: b for b in rep.bounds}
    assert (rep.zero_count, rep.valuation, by["axkatz_wilson"].value) == (8, 3, 3)
    assert rep.passed and rep.gap() == 0
    rep = verify_instance(ring_inst(F3, 2, [((1,), (1, 0)), ((1,), (0, 1))]))
    assert rep.valuation == 1 and rep.passed
    assert all(b.value <= 1 for b in rep.bounds)
    assert {b.name: b.value for b in rep.bounds}["chevalley_warning_rng"] == 1
    rep = verify_instance(ring_inst(F2, 2, [((1,), (1, 1))]))
    assert rep.zero_count == 3 and rep.valuation == 0 and rep.passed
    assert all(b.value == 0 for b in rep.bounds if b.applicable)


def test_moreno_gated_on_commutativity():
    m = np.zeros((3, 3, 3), dtype=np.int64)
    m[0, 0, 0] = m[0, 1, 1] = m[1, 2, 1] = m[2, 2, 2] = 1
    from fdcalc.rings import FiniteRngSpec

    U = FiniteRngSpec(2, 3, m)
    rep = verify_instance(ring_inst(U, 1, [((1, 0, 0), (1,))]))
    by = {b.name: b for b in rep.bounds}
    assert not by["moreno"].applicable and not by["classical_axkatz"].applicable
    assert by["ring_axkatz"].applicable


def test_zero_function_polys_are_dropped():
    inst = ring_inst(F2, 2, [((1,), (2, 0)), ((1,), (1, 0))], [((1,), (1, 0))])
    rep = verify_instance(inst)
    assert rep.degrees["fdeg"][0] == "-inf"
    by = {b.name: b for b in rep.bounds}
    assert by["ring_axkatz"].inputs["degrees"] == [1]
    assert rep.zero_count == 2 and rep.passed


def test_instance_validation():
    A = PGroupShape.elementary(2, 2)
    with pytest.raises(InputError):
        SystemInstance.group(A, [FunctionTable.zero(A, PGroupShape.cyclic(2, 1))])
    with pytest.raises(InputError):
        SystemInstance.ring_system(F2, 1, [SparsePoly.zero(F2, 1)])


def test_exhaustive_micro_sweep(backend):
    B = PGroupShape.cyclic(2, 1)
    for N in (1, 2, 3):
        A = PGroupShape.elementary(2, N)
        for bits in range(1, 2**A.order):
            vals = np.array([(bits >> i) & 1 for i in range(A.order)], dtype=np.int64)[:, None]
            rep = verify_instance(SystemInstance.group(A, [FunctionTable(A, B, vals)]))
            assert rep.passed


def test_tightness_linear_forms():
    rep = verify_instance(linear_form_instance(2, 4))
    assert rep.valuation == 3 == max(b.value for b in rep.bounds if b.name == "axkatz_wilson")


def brute_sigma(A, B):
    best = INF
    for vals in itertools.product(range(B.order), repeat=A.order):
        rows = np.array([B.decode(v).residues for v in vals], dtype=np.int64)
        if (rows.sum(axis=0) % B.moduli_array).any():
            best = min(best, fdeg(FunctionTable(A, B, rows)))
    return INF if best == INF else (NEG_INF if best == 0 else best - 1)


@pytest.mark.parametrize("A,B", [("2:1,1", "2:1"), ("3:1", "3:1"), ("2:2", "2:1"), ("2:1", "2:2"), ("2:1,1", "2:2"), ("2:1,1,1", "2:1"), ("2:1", "2:1,1")])
def test_sigma_matches_brute_force(backend, A, B):
    A, B = PGroupShape.parse(A), PGroupShape.parse(B)
    assert sigma_invariant(A, B) == brute_sigma(A, B)


def test_sigma_examples(backend):
    assert sigma_invariant(PGroupShape.elementary(2, 2), PGroupShape.cyclic(2, 1)) == 1
    assert sigma_invariant(PGroupShape.elementary(2, 3), PGroupShape.cyclic(2, 2)) == 2
    assert sigma_invariant(PGroupShape.cyclic(3, 1), PGroupShape.cyclic(3, 1)) == 1
    with pytest.raises(CapacityError):
        sigma_invariant(PGroupShape.elementary(2, 3), PGroupShape.cyclic(2, 3))


def test_generation_deterministic():
    a = generate_instance("group", 2, {"N": 3, "r": 2, "beta_max": 2}, 1)
    b = generate_instance("group", 2, {"N": 3, "r": 2, "beta_max": 2}, 1)
    assert json.dumps(a.to_json()) == json.dumps(b.to_json())
    c = generate_instance("ring", 2, {"ring": "F4", "n": 2, "r": 1, "max_deg": 3}, 7)
    d = generate_instance("ring", 2, {"ring": "F4", "n": 2, "r": 1, "max_deg": 3}, 7)
    assert c.to_json() == d.to_json()
    assert all(max(sum(e) for _, e in f.terms) <= 3 for f in c.polys)
    spec = random_rng_spec(2, 2, np.random.default_rng(0))
    assert spec.report.valid


def test_generation_errors(monkeypatch):
    with pytest.raises(InputError):
        generate_instance("bogus", 2, {}, 0)
    with pytest.raises(InputError):
        generate_instance("ring", 3, {"ring": "F4"}, 0)
    from fdcalc import verifier

    monkeypatch.setattr(verifier, "GENERATION_RETRIES", 0)
    with pytest.raises(GenerationError):
        random_rng_spec(2, 2, np.random.default_rng(0))


def test_instance_json_roundtrip():
    for inst in [
        generate_instance("group", 3, {"N": 2, "r": 2, "beta_max": 2, "target_arity": 2}, 4),
        generate_instance("ring", 3, {"ring": {"random": 2}, "n": 2, "r": 2}, 9),
        ring_inst(F4, 1, [((1, 0), (3,))]),
    ]:
        again = SystemInstance.from_json(json.loads(json.dumps(inst.to_json())))
        assert again.to_json() == inst.to_json()


def test_campaign_worker_independence():
    cfg = {"seed": 3, "instances": [
        {"kind": "group", "primes": [2, 3], "count": 6, "params": {"N": 3, "r": 2, "beta_max": 2}},
        {"kind": "ring", "p": 2, "count": 6, "params": {"ring": {"random": 2}, "n": 2, "r": 2, "max_deg": 3}},
    ]}
    one = json.dumps(run_campaign(cfg, workers=1), sort_keys=True)
    three = json.dumps(run_campaign(cfg, workers=3), sort_keys=True)
    assert one == three
    assert json.loads(one)["summary"]["failed"] == 0


def test_failure_report_embeds_instance():
    rep = verify_instance(linear_form_instance(2, 3))
    assert "instance" not in rep.to_json()
    assert "instance" in rep.to_json(include_instance=True)
