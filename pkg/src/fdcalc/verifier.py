"""Zero counting, p-adic lower bounds for #Z, and instance verification.

Every bound function returns an integer lower bound for ``ord_p(#Z)``;
ceilings that come out nonpositive are reported as 0. Valuations of an
empty zero set are ``inf``.
"""
from __future__ import annotations

from collections import Counter
from concurrent.futures import ProcessPoolExecutor
from dataclasses import dataclass, field

import numpy as np

from . import kernels
from .arith import INF, NEG_INF, ceil_div, degree_to_json, ord_p
from .calculus import FunctionTable, degree_caps, fdeg
from .errors import CapacityError, GenerationError, InputError
from .groups import PGroupShape, check_capacity
from .rings import (
    FiniteRngSpec,
    SparsePoly,
    _solve_mod_p,
    make_fq,
    p_weight_degree,
    poly_degree,
    poly_to_table,
    ring_domain_shape,
)

SIGMA_CAP = 2**20
GENERATION_RETRIES = 200


# ---------------------------------------------------------------------------
# instances

@dataclass(frozen=True, eq=False)
class SystemInstance:
    """A system of functions (``kind == "group"``) or polynomials (``kind == "ring"``)."""

    kind: str
    domain: PGroupShape
    functions: tuple = ()
    ring: FiniteRngSpec | None = None
    nvars: int = 0
    polys: tuple = ()
    meta: dict = field(default_factory=dict)

    @classmethod
    def group(cls, domain: PGroupShape, functions, meta=None) -> "SystemInstance":
        functions = tuple(functions)
        for j, f in enumerate(functions):
            if f.domain != domain:
                raise InputError(f"function {j} has domain {f.domain}, expected {domain}")
            if f.codomain.p != domain.p:
                raise InputError(f"function {j} maps into a {f.codomain.p}-group, domain is a {domain.p}-group")
            if f.is_zero():
                raise InputError(f"function {j} is the zero function")
        return cls("group", domain, functions, meta=dict(meta or {}))

    @classmethod
    def ring_system(cls, ring: FiniteRngSpec, nvars: int, polys, meta=None) -> "SystemInstance":
        polys = tuple(polys)
        for j, f in enumerate(polys):
            if f.ring != ring or f.nvars != nvars:
                raise InputError(f"polynomial {j} is over a different ring or variable count")
            if f.is_zero():
                raise InputError(f"polynomial {j} is the zero polynomial")
        return cls("ring", ring_domain_shape(ring, nvars), ring=ring, nvars=nvars, polys=polys, meta=dict(meta or {}))

    @property
    def p(self) -> int:
        return self.domain.p

    def tables(self) -> tuple[FunctionTable, ...]:
        if self.kind == "group":
            return self.functions
        return tuple(poly_to_table(f) for f in self.polys)

    def to_json(self) -> dict:
        if self.kind == "group":
            out = {
                "kind": "group",
                "domain": self.domain.to_json(),
                "functions": [{"codomain": f.codomain.to_json(), "values": f.values.tolist()} for f in self.functions],
            }
        else:
            out = {
                "kind": "ring",
                "ring": self.ring.to_json(),
                "vars": self.nvars,
                "polys": [f.to_json(with_ring=False) for f in self.polys],
            }
        if self.meta:
            out["meta"] = self.meta
        return out

    @classmethod
    def from_json(cls, obj, path: str = "$") -> "SystemInstance":
        if not isinstance(obj, dict):
            raise InputError("instance must be an object", path)
        kind = obj.get("kind")
        meta = obj.get("meta", {})
        if not isinstance(meta, dict):
            raise InputError("meta must be an object", f"{path}.meta")
        if kind == "group":
            if "domain" not in obj or not isinstance(obj.get("functions"), list):
                raise InputError("group instance needs 'domain' and a 'functions' list", path)
            dom = PGroupShape.from_json(obj["domain"], f"{path}.domain")
            fns = []
            for j, fj in enumerate(obj["functions"]):
                fp = f"{path}.functions[{j}]"
                if not isinstance(fj, dict):
                    raise InputError("function must be an object", fp)
                fns.append(FunctionTable.from_json({"domain": obj["domain"], **fj}, fp))
            try:
                return cls.group(dom, fns, meta)
            except InputError as exc:
                raise InputError(str(exc), f"{path}.functions") from None
        if kind == "ring":
            for key in ("ring", "vars", "polys"):
                if key not in obj:
                    raise InputError(f"missing key {key!r}", path)
            ring = FiniteRngSpec.from_json(obj["ring"], f"{path}.ring")
            if not isinstance(obj["polys"], list):
                raise InputError("polys must be a list", f"{path}.polys")
            polys = []
            for j, pj in enumerate(obj["polys"]):
                pp = f"{path}.polys[{j}]"
                if isinstance(pj, dict) and "vars" not in pj:
                    pj = {**pj, "vars": obj["vars"]}
                polys.append(SparsePoly.from_json(pj, pp, ring=ring))
            nvars = obj["vars"]
            if not isinstance(nvars, int) or nvars < 1:
                raise InputError("vars must be a positive integer", f"{path}.vars")
            try:
                return cls.ring_system(ring, nvars, polys, meta)
            except InputError as exc:
                raise InputError(str(exc), f"{path}.polys") from None
        raise InputError("kind must be 'group' or 'ring'", f"{path}.kind")


def count_zeros(inst: SystemInstance):
    """Exact number of common zeros and its p-adic valuation."""
    check_capacity(inst.domain.order, f"zero count on {inst.domain}")
    tables = inst.tables()
    if not tables:
        count = inst.domain.order
    else:
        # pad to a common codomain width so the tables stack
        k = max(t.codomain.arity for t in tables)
        stack = np.zeros((len(tables), inst.domain.order, k), dtype=np.int64)
        for j, t in enumerate(tables):
            stack[j, :, : t.codomain.arity] = t.values
        count = kernels.count_common_zeros(stack)
    return count, ord_p(count, inst.p)


# ---------------------------------------------------------------------------
# bound formulas

def _check_degrees(ds, what="degree"):
    ds = [int(d) for d in ds]
    if not ds:
        raise InputError("bound needs at least one function")
    if any(d < 0 for d in ds):
        raise InputError(f"every {what} must be >= 0 (zero functions are excluded)")
    if max(ds) == 0:
        raise InputError(f"bound undefined when every {what} is 0 (all functions are nonzero constants)")
    return ds


def bound_axkatz_wilson(N: int, p: int, pairs) -> int:
    """ceil((N - sum (p^b - 1)/(p - 1) d) / max p^(b-1) d) over pairs (b, d), floored at 0."""
    pairs = [(int(b), int(d)) for b, d in pairs]
    if any(b < 1 for b, _ in pairs):
        raise InputError("target exponents must be >= 1")
    _check_degrees([d for _, d in pairs])
    num = N - sum((p**b - 1) // (p - 1) * d for b, d in pairs)
    den = max(p ** (b - 1) * d for b, d in pairs)
    return max(0, ceil_div(num, den))


def bound_multi_target(N: int, p: int, systems) -> int:
    """Same shape for maps into non-cyclic targets; ``systems`` holds (betas, d) per function."""
    systems = [(tuple(int(b) for b in betas), int(d)) for betas, d in systems]
    if any(not betas or min(betas) < 1 for betas, _ in systems):
        raise InputError("every function needs target exponents >= 1")
    _check_degrees([d for _, d in systems])
    num = N - sum(d * sum((p**b - 1) // (p - 1) for b in betas) for betas, d in systems)
    den = max(p ** (max(betas) - 1) * d for betas, d in systems)
    return max(0, ceil_div(num, den))


def bound_gtpakt(N: int, n: int, p: int, degrees) -> int:
    """ceil(N (n - sum d) / max d) for maps ((Z/p)^N)^n -> (Z/p)^N, floored at 0."""
    ds = _check_degrees(degrees)
    return max(0, ceil_div(N * (n - sum(ds)), max(ds)))


def gtcw_condition(p: int, domain_alphas, N: int, target_betas, degrees) -> bool:
    """(sum fdeg)(sum (p^b - 1)) < (sum (p^a - 1)) N."""
    ds = [int(d) for d in degrees]
    if not ds or any(d < 0 for d in ds):
        raise InputError("need at least one function degree >= 0")
    lhs = sum(ds) * sum(p**b - 1 for b in target_betas)
    rhs = sum(p**a - 1 for a in domain_alphas) * N
    return lhs < rhs


def bound_gtcw(p: int, domain_alphas, N: int, target_betas, degrees) -> int:
    """1 when the Chevalley-Warning type inequality holds (then p divides #Z), else 0."""
    return int(gtcw_condition(p, domain_alphas, N, target_betas, degrees))


def bound_ring_axkatz(N: int, n: int, degrees) -> int:
    ds = _check_degrees(degrees)
    return max(0, ceil_div(N * (n - sum(ds)), max(ds)))


def bound_moreno(N: int, n: int, weights) -> int:
    ds = _check_degrees(weights, "p-weight degree")
    return max(0, ceil_div(N * (n - sum(ds)), max(ds)))


def bound_classical_axkatz_ordp(N: int, n: int, degrees) -> int:
    """N * ceil((n - sum deg) / max deg): the classical bound over F_{p^N}, read p-adically."""
    ds = _check_degrees(degrees)
    return max(0, N * ceil_div(n - sum(ds), max(ds)))


def bound_chevalley_warning(n: int, degrees) -> int:
    ds = [int(d) for d in degrees]
    if not ds:
        raise InputError("bound needs at least one polynomial")
    return int(sum(ds) < n)


# ---------------------------------------------------------------------------
# reports

@dataclass(frozen=True)
class BoundEntry:
    name: str
    value: int
    applicable: bool
    inputs: dict
    note: str = ""

    def to_json(self) -> dict:
        out = {"name": self.name, "value": self.value, "applicable": self.applicable, "inputs": self.inputs}
        if self.note:
            out["note"] = self.note
        return out


@dataclass(frozen=True)
class BoundReport:
    zero_count: int
    domain_order: int
    p: int
    valuation: object
    bounds: tuple
    degrees: dict
    instance: SystemInstance | None = None

    @property
    def passed(self) -> bool:
        return all(self.valuation >= b.value for b in self.bounds if b.applicable)

    def best_bound(self) -> int:
        return max((b.value for b in self.bounds if b.applicable), default=0)

    def gap(self):
        """valuation minus the best applicable bound; ``inf`` for an empty zero set."""
        return self.valuation - self.best_bound()

    def violations(self) -> list[BoundEntry]:
        return [b for b in self.bounds if b.applicable and self.valuation < b.value]

    def to_json(self, include_instance: bool | None = None) -> dict:
        out = {
            "zero_count": self.zero_count,
            "domain_order": self.domain_order,
            "p": self.p,
            "valuation": degree_to_json(self.valuation),
            "degrees": self.degrees,
            "bounds": [b.to_json() for b in self.bounds],
            "best_bound": self.best_bound(),
            "gap": degree_to_json(self.gap()),
            "pass": self.passed,
        }
        if self.instance is not None:
            if self.instance.meta:
                out["meta"] = self.instance.meta
            if include_instance or (include_instance is None and not self.passed):
                out["instance"] = self.instance.to_json()
        return out


def _inapplicable(name, inputs, note):
    return BoundEntry(name, 0, False, inputs, note)


def _group_bounds(domain: PGroupShape, tables, degs) -> list[BoundEntry]:
    p = domain.p
    out = []
    elementary = domain.is_elementary
    N = domain.arity
    nonconst = any(d > 0 for d in degs)

    # main bound, applied to every nonzero coordinate projection
    pairs = []
    for t in tables:
        for c in range(t.codomain.arity):
            proj = t.project(c)
            if not proj.is_zero():
                pairs.append((t.codomain.alphas[c], fdeg(proj)))
    inputs = {"N": N, "p": p, "pairs": [[b, d] for b, d in pairs]}
    if not elementary:
        out.append(_inapplicable("axkatz_wilson", inputs, "domain is not elementary abelian"))
    elif not any(d > 0 for _, d in pairs):
        out.append(_inapplicable("axkatz_wilson", inputs, "every function is a nonzero constant"))
    else:
        out.append(BoundEntry("axkatz_wilson", bound_axkatz_wilson(N, p, pairs), True, inputs))

    systems = [(sorted(t.codomain.alphas, reverse=True), d) for t, d in zip(tables, degs)]
    inputs = {"N": N, "p": p, "systems": [[list(b), d] for b, d in systems]}
    if not elementary:
        out.append(_inapplicable("multi_target", inputs, "domain is not elementary abelian"))
    elif not nonconst:
        out.append(_inapplicable("multi_target", inputs, "every function is a nonzero constant"))
    else:
        out.append(BoundEntry("multi_target", bound_multi_target(N, p, systems), True, inputs))

    # ((Z/p)^M)^n -> (Z/p)^M
    targets = {t.codomain for t in tables}
    tgt = next(iter(targets))
    M = tgt.arity
    inputs = {"N": M, "n": N // M if elementary else None, "degrees": list(degs)}
    if not (elementary and len(targets) == 1 and tgt.is_elementary and N % M == 0):
        out.append(_inapplicable("gtpakt", inputs, "needs maps ((Z/p)^M)^n -> (Z/p)^M"))
    elif not nonconst:
        out.append(_inapplicable("gtpakt", inputs, "every function is a nonzero constant"))
    else:
        out.append(BoundEntry("gtpakt", bound_gtpakt(M, N // M, p, degs), True, inputs))

    # whole domain as A, exponent 1: the strongest instance of the inequality
    inputs = {"p": p, "domain_alphas": list(domain.alphas), "N": 1,
              "target_betas": list(tgt.alphas), "degrees": list(degs)}
    if len(targets) != 1:
        out.append(_inapplicable("gtcw", inputs, "functions have different codomains"))
    else:
        out.append(BoundEntry("gtcw", bound_gtcw(p, domain.alphas, 1, tgt.alphas, degs), True, inputs))
    return out


def _ring_bounds(inst: SystemInstance, live) -> list[BoundEntry]:
    ring, n = inst.ring, inst.nvars
    N = ring.dim
    degs = [poly_degree(f) for f in live]
    weights = [p_weight_degree(f) for f in live]
    out = []
    nonconst = any(d > 0 for d in degs)
    const_note = "every remaining polynomial is constant"

    inputs = {"N": N, "n": n, "degrees": degs}
    out.append(BoundEntry("chevalley_warning_rng", bound_chevalley_warning(n, degs), True, {"n": n, "degrees": degs}))
    if nonconst:
        out.append(BoundEntry("ring_axkatz", bound_ring_axkatz(N, n, degs), True, inputs))
    else:
        out.append(_inapplicable("ring_axkatz", inputs, const_note))

    inputs = {"N": N, "n": n, "p_weights": weights}
    if not ring.commutative:
        out.append(_inapplicable("moreno", inputs, "rng is not commutative"))
    elif not any(w > 0 for w in weights):
        out.append(_inapplicable("moreno", inputs, const_note))
    else:
        out.append(BoundEntry("moreno", bound_moreno(N, n, weights), True, inputs))

    inputs = {"N": N, "n": n, "degrees": degs}
    if not ring.is_field:
        out.append(_inapplicable("classical_axkatz", inputs, "rng is not a field"))
    elif not nonconst:
        out.append(_inapplicable("classical_axkatz", inputs, const_note))
    else:
        out.append(BoundEntry("classical_axkatz", bound_classical_axkatz_ordp(N, n, degs), True, inputs))
    return out


def verify_instance(inst: SystemInstance) -> BoundReport:
    """Count zeros exhaustively and compare ord_p(#Z) with every applicable bound.

    Functions whose table is zero impose no condition and are dropped before
    any bound is formed; this only strengthens the bounds.
    """
    count, val = count_zeros(inst)
    tables = inst.tables()
    live = [j for j, t in enumerate(tables) if not t.is_zero()]
    ltables = [tables[j] for j in live]
    degs = [fdeg(t) for t in ltables]
    degrees = {"fdeg": [degree_to_json(fdeg(t)) for t in tables]}
    bounds = []
    if ltables:
        bounds += _group_bounds(inst.domain, ltables, degs)
    if inst.kind == "ring":
        degrees["deg"] = [degree_to_json(poly_degree(f)) for f in inst.polys]
        degrees["p_weight"] = [degree_to_json(p_weight_degree(f)) for f in inst.polys]
        if live:
            bounds += _ring_bounds(inst, [inst.polys[j] for j in live])
    return BoundReport(count, inst.domain.order, inst.p, val, tuple(bounds), degrees, inst)


# ---------------------------------------------------------------------------
# summation invariant

def sigma_invariant(A: PGroupShape, B: PGroupShape, cap: int = SIGMA_CAP):
    """Largest d such that every f: A -> B with fdeg(f) <= d sums to zero over A.

    Exhaustive over all |B|^|A| functions. Returns ``-inf`` when some nonzero
    constant already has nonzero sum, ``inf`` when no function does.
    """
    if A.p != B.p:
        raise InputError("A and B must be p-groups for the same p")
    total = B.order**A.order
    if total > cap:
        raise CapacityError(f"sigma on {A} -> {B}: {total} functions exceeds cap {cap}")
    hist_all, hist_nz = sigma_histograms(A, B)
    hits = np.flatnonzero(hist_nz)
    if not len(hits):
        return INF
    d = int(hits[0]) - 1
    return NEG_INF if d <= 0 else d - 1


def sigma_histograms(A: PGroupShape, B: PGroupShape):
    """Counts of functions A -> B by degree (index d + 1; index 0 is the zero function)."""
    probe = FunctionTable.zero(A, B)
    caps = degree_caps(probe)
    e = B.exponent
    mats = [kernels.axis_transform(m, c, e) for m, c in zip(A.moduli, caps)]
    # coefficient row n (mixed radix over caps + 1) from table column x (mixed radix over A)
    T = np.ones((1, 1), dtype=np.int64)
    for t in mats:
        T = np.kron(t, T) % e
    box_deg = np.zeros(1, dtype=np.int64)
    for c in caps:
        box_deg = (box_deg[None, :] + np.arange(c + 1)[:, None]).ravel()
    return kernels.sigma_scan(T, box_deg, B.moduli_array, A.order, int(sum(caps)))


def expected_sigma(p: int, N: int) -> int:
    """N(p - 1) - 1, the value for A = (Z/p)^N and cyclic B of exponent at most p^N."""
    return N * (p - 1) - 1


# ---------------------------------------------------------------------------
# random instances

def _rng(seed) -> np.random.Generator:
    return np.random.default_rng(seed)


def _linear_table(domain, codomain, rng, m):
    """h(L x) for a random linear L: (Z/p)^N -> (Z/p)^m and a random h."""
    p = domain.p
    L = rng.integers(0, p, size=(domain.arity, m))
    img = (domain.residue_array @ L) % p
    small = PGroupShape.elementary(p, m)
    h = rng.integers(0, codomain.moduli_array, size=(small.order, codomain.arity))
    return h[small.indices_of(img)]


def _lowdeg_table(domain, codomain, rng, dmax):
    """sum over levels k of p^k g_k(x) with g_k a random integer polynomial of small degree."""
    p = domain.p
    xs = domain.residue_array
    vals = np.zeros((domain.order, codomain.arity), dtype=np.int64)
    for c, beta in enumerate(codomain.alphas):
        mod = p**beta
        for k in range(beta):
            nterms = int(rng.integers(1, 4))
            for _ in range(nterms):
                exps = rng.integers(0, 2, size=domain.arity) * rng.integers(0, dmax + 1, size=domain.arity)
                if exps.sum() > dmax:
                    exps = np.zeros_like(exps)
                    exps[int(rng.integers(domain.arity))] = int(rng.integers(0, dmax + 1))
                coef = int(rng.integers(1, p))
                mono = np.ones(domain.order, dtype=np.int64)
                for i, e in enumerate(exps):
                    for _ in range(int(e)):
                        mono = (mono * xs[:, i]) % mod
                vals[:, c] = (vals[:, c] + coef * p**k * mono) % mod
    return vals


def random_group_function(domain, codomain, rng, family: str) -> FunctionTable:
    for _ in range(GENERATION_RETRIES):
        if family == "mixed":
            pool = ["uniform", "linear", "composed", "lowdeg"] if domain.is_elementary else ["uniform", "lowdeg"]
            fam = str(rng.choice(pool))
        else:
            fam = family
        if fam == "uniform":
            vals = rng.integers(0, codomain.moduli_array, size=(domain.order, codomain.arity))
        elif fam == "linear":
            if not domain.is_elementary:
                raise InputError("linear family needs an elementary domain")
            L = rng.integers(0, domain.p, size=domain.arity)
            scale = codomain.moduli_array // domain.p
            vals = ((domain.residue_array @ L) % domain.p)[:, None] * scale[None, :]
        elif fam == "composed":
            if not domain.is_elementary:
                raise InputError("composed family needs an elementary domain")
            vals = _linear_table(domain, codomain, rng, int(rng.integers(1, min(3, domain.arity) + 1)))
        elif fam == "lowdeg":
            vals = _lowdeg_table(domain, codomain, rng, int(rng.integers(1, 3)))
        else:
            raise InputError(f"unknown function family {family!r}")
        if np.any(vals):
            return FunctionTable._raw(domain, codomain, vals)
    raise GenerationError("could not draw a nonzero function")


def _inv_mod_p(M, p):
    d = M.shape[0]
    cols = [_solve_mod_p(M, np.eye(d, dtype=np.int64)[:, i], p) for i in range(d)]
    if any(c is None for c in cols):
        return None
    return np.stack(cols, axis=1) % p


def change_basis(spec: FiniteRngSpec, M: np.ndarray) -> FiniteRngSpec | None:
    """Structure constants in the basis b_i = sum_a M[i, a] e_a (None if M is singular)."""
    p = spec.p
    Minv = _inv_mod_p(M, p)
    if Minv is None:
        return None
    prod = np.einsum("ia,jb,abk->ijk", M, M, spec.mult) % p
    return FiniteRngSpec(p, spec.dim, np.einsum("ijk,kl->ijl", prod, Minv) % p)


def _quotient_ring(p, g):
    """Z/p[t]/(g) for a monic g (coefficients constant first), basis 1..t^(d-1)."""
    from .rings import _poly_mod

    d = len(g) - 1
    mult = np.zeros((d, d, d), dtype=np.int64)
    for i in range(d):
        for j in range(d):
            mono = [0] * (i + j) + [1]
            mult[i, j] = _poly_mod(mono, list(g), p) if i + j >= d else mono + [0] * (d - len(mono))
    return mult


def _nilpotent_ring(p, d):
    """t Z/p[t] / (t^(d+1)), basis t..t^d."""
    mult = np.zeros((d, d, d), dtype=np.int64)
    for i in range(d):
        for j in range(d):
            if i + j + 1 < d:
                mult[i, j, i + j + 1] = 1
    return mult


def _upper_triangular(p):
    """2x2 upper triangular matrices over Z/p, basis E11, E12, E22 (non-commutative)."""
    mult = np.zeros((3, 3, 3), dtype=np.int64)
    mult[0, 0, 0] = 1
    mult[0, 1, 1] = 1
    mult[1, 2, 1] = 1
    mult[2, 2, 2] = 1
    return mult


def random_rng_spec(p: int, dim: int, rng: np.random.Generator, commutative: bool = True) -> FiniteRngSpec:
    """A validated random rng of dimension ``dim`` by proposal and rejection."""
    families = ["quotient", "nilpotent", "null", "sparse", "product"]
    if not commutative and dim == 3:
        families.append("triangular")
    for _ in range(GENERATION_RETRIES):
        fam = str(rng.choice(families))
        if fam == "quotient":
            g = list(rng.integers(0, p, size=dim)) + [1]
            mult = _quotient_ring(p, g)
        elif fam == "nilpotent":
            mult = _nilpotent_ring(p, dim)
        elif fam == "null":
            mult = np.zeros((dim, dim, dim), dtype=np.int64)
        elif fam == "product":
            # a product of a quotient ring with a nilpotent one
            if dim < 2:
                continue
            k = int(rng.integers(1, dim))
            a = _quotient_ring(p, list(rng.integers(0, p, size=k)) + [1])
            b = _nilpotent_ring(p, dim - k)
            mult = np.zeros((dim, dim, dim), dtype=np.int64)
            mult[:k, :k, :k] = a
            mult[k:, k:, k:] = b
        elif fam == "sparse":
            mult = np.zeros((dim, dim, dim), dtype=np.int64)
            for _ in range(int(rng.integers(1, dim + 2))):
                i, j, k = (int(v) for v in rng.integers(0, dim, size=3))
                mult[i, j, k] = mult[j, i, k] = int(rng.integers(1, p))
        else:
            mult = _upper_triangular(p)
        spec = FiniteRngSpec(p, dim, mult)
        spec = change_basis(spec, rng.integers(0, p, size=(dim, dim)))
        if spec is None:
            continue
        rep = spec.report
        if rep.valid and (rep.commutative or not commutative):
            return spec
    raise GenerationError(f"no valid rng of dimension {dim} over Z/{p} after {GENERATION_RETRIES} proposals")


def random_poly(ring: FiniteRngSpec, nvars: int, rng, max_deg: int, max_terms: int) -> SparsePoly:
    for _ in range(GENERATION_RETRIES):
        terms = []
        for _ in range(int(rng.integers(1, max_terms + 1))):
            deg = int(rng.integers(0, max_deg + 1))
            exps = [0] * nvars
            for _ in range(deg):
                exps[int(rng.integers(nvars))] += 1
            coeff = tuple(int(v) for v in rng.integers(0, ring.p, size=ring.dim))
            terms.append((coeff, tuple(exps)))
        f = SparsePoly(ring, nvars, tuple(terms))
        if not f.is_zero():
            return f
    raise GenerationError("could not draw a nonzero polynomial")


_FIELDS = {"F2": (2, 1), "F3": (3, 1), "F4": (2, 2), "F8": (2, 3), "F9": (3, 2)}


def resolve_ring(spec, p: int, rng) -> FiniteRngSpec:
    """``"F4"``-style names, ``{"field": ...}``, ``{"random": dim}`` or a full rng object."""
    if isinstance(spec, str):
        if spec not in _FIELDS:
            raise InputError(f"unknown ring name {spec!r}")
        return make_fq(*_FIELDS[spec])
    if isinstance(spec, dict) and "random" in spec:
        return random_rng_spec(p, int(spec["random"]), rng, bool(spec.get("commutative", True)))
    return FiniteRngSpec.from_json(spec)


def generate_instance(kind: str, p: int, params: dict, seed: int) -> SystemInstance:
    """Deterministic random instance from ``seed``.

    group params: ``N`` (domain (Z/p)^N) or ``alphas``; ``r``; ``beta_max``;
    ``target_arity`` (default 1); ``family`` (uniform, linear, composed,
    lowdeg or mixed).
    ring params: ``ring`` (see :func:`resolve_ring`); ``n``; ``r``;
    ``max_deg``; ``max_terms``.
    """
    rng = _rng([int(seed), p, 0 if kind == "group" else 1])
    meta = {"seed": int(seed), "generator": kind, "params": dict(params)}
    if kind == "group":
        if "alphas" in params:
            domain = PGroupShape(p, tuple(params["alphas"]))
        else:
            domain = PGroupShape.elementary(p, int(params.get("N", 3)))
        r = int(params.get("r", 1))
        bmax = int(params.get("beta_max", 1))
        k = int(params.get("target_arity", 1))
        family = params.get("family", "mixed")
        fns = []
        for _ in range(r):
            cod = PGroupShape(p, tuple(int(b) for b in rng.integers(1, bmax + 1, size=k)))
            fns.append(random_group_function(domain, cod, rng, family))
        return SystemInstance.group(domain, fns, meta)
    if kind == "ring":
        ring = resolve_ring(params.get("ring", "F2"), p, rng)
        if ring.p != p:
            raise InputError(f"ring has characteristic {ring.p}, requested p = {p}")
        n = int(params.get("n", 2))
        r = int(params.get("r", 1))
        polys = [random_poly(ring, n, rng, int(params.get("max_deg", 2)), int(params.get("max_terms", 3)))
                 for _ in range(r)]
        if isinstance(params.get("ring"), dict) and "random" in params["ring"]:
            meta["ring"] = ring.to_json()
        return SystemInstance.ring_system(ring, n, polys, meta)
    raise InputError(f"unknown instance kind {kind!r}")


def linear_form_instance(p: int, N: int) -> SystemInstance:
    """x_1 + ... + x_N on (Z/p)^N: the zero set is a hyperplane, so #Z = p^(N-1)."""
    domain = PGroupShape.elementary(p, N)
    cod = PGroupShape.cyclic(p, 1)
    vals = (domain.residue_array.sum(axis=1) % p)[:, None]
    return SystemInstance.group(domain, [FunctionTable._raw(domain, cod, vals)], {"generator": "linear_form"})


# ---------------------------------------------------------------------------
# campaigns

def _campaign_jobs(config: dict):
    base = int(config.get("seed", 0))
    jobs = []
    for b, block in enumerate(config.get("instances", [])):
        kind = block.get("kind")
        primes = block.get("primes", [block.get("p", 2)])
        for p in primes:
            for _ in range(int(block.get("count", 1))):
                jobs.append((kind, int(p), dict(block.get("params", {})), base + len(jobs)))
    return jobs


def _run_job(job):
    kind, p, params, seed = job
    inst = generate_instance(kind, p, params, seed)
    return verify_instance(inst).to_json()


def run_campaign(config: dict, workers: int = 1) -> dict:
    """Generate and verify every instance in ``config``; output is independent of ``workers``."""
    if not isinstance(config.get("instances"), list):
        raise InputError("campaign config needs an 'instances' list", "$.instances")
    jobs = _campaign_jobs(config)
    if workers > 1 and len(jobs) > 1:
        with ProcessPoolExecutor(max_workers=workers) as ex:
            reports = list(ex.map(_run_job, jobs, chunksize=max(1, len(jobs) // (4 * workers))))
    else:
        reports = [_run_job(j) for j in jobs]
    reports.sort(key=lambda r: r["meta"]["seed"])
    return {"config": config, "reports": reports, "summary": summarize(reports)}


def summarize(reports) -> dict:
    gaps = Counter(str(r["gap"]) for r in reports)
    failed = [r["meta"]["seed"] for r in reports if not r["pass"]]
    tight = Counter()
    for r in reports:
        for b in r["bounds"]:
            if b["applicable"] and r["valuation"] == b["value"] and b["value"] > 0:
                tight[b["name"]] += 1
    return {
        "instances": len(reports),
        "passed": len(reports) - len(failed),
        "failed": len(failed),
        "failed_seeds": failed,
        "gap_histogram": dict(sorted(gaps.items(), key=lambda kv: (kv[0] == "inf", int(kv[0]) if kv[0] != "inf" else 0))),
        "tight_bounds": dict(sorted(tight.items())),
    }
