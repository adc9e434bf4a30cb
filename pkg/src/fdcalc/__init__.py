"""Finite-difference calculus on finite abelian p-groups.

Difference operators, functional degree, binomial-series representations and
their lifts, finite rngs with sparse polynomials, and a harness that counts
zero sets exhaustively and checks p-adic lower bounds on their sizes.
"""
from .arith import INF, NEG_INF, digit_sum, ord_p
from .binomial import (
    BinomialSeries,
    LiftAudit,
    audit_lift_divisibility,
    binom_int,
    evaluate_series,
    fdeg_at_zero,
    fundamental_coefficients,
    proper_lift,
    reduce_series,
    series_to_table,
    wilson_hypothesis,
    wilson_sum,
)
from .calculus import (
    FunctionTable,
    delta,
    delta_generator,
    delta_multi,
    delta_p_bound,
    fdeg,
    fdeg_oracle,
    partial_fdeg,
    partial_fdegs,
)
from .errors import CapacityError, FdcalcError, GenerationError, InputError
from .groups import (
    GroupElement,
    PGroupShape,
    element_add,
    element_decode,
    element_index,
    enumerate_elements,
    get_enumeration_cap,
    set_enumeration_cap,
)
from .rings import (
    FiniteRngSpec,
    SparsePoly,
    make_fq,
    p_weight_degree,
    poly_degree,
    poly_eval,
    poly_to_table,
    reduce_over_fq,
    validate_rng,
)
from .verifier import (
    BoundReport,
    SystemInstance,
    bound_axkatz_wilson,
    bound_classical_axkatz_ordp,
    bound_gtcw,
    bound_gtpakt,
    bound_moreno,
    bound_multi_target,
    bound_ring_axkatz,
    count_zeros,
    generate_instance,
    run_campaign,
    sigma_invariant,
    verify_instance,
)

__version__ = "0.1.0"
