"""Finite rngs of exponent p given by structure constants, and sparse polynomials over them.

A rng of dimension N has additive group (Z/p)^N with basis e_1, ..., e_N and
multiplication ``e_i * e_j = sum_k mult[i, j, k] e_k``. Elements are residue
tuples of length N.

Polynomial convention, valid for non-commutative and non-unital rngs alike:
a term ``c t_1^d_1 ... t_n^d_n`` evaluates to ``c * (x_1^d_1 * ... * x_n^d_n)``,
the monomial multiplied left to right in variable order and the coefficient
applied from the left. Factors with exponent 0 are omitted, so the constant
term evaluates to ``c`` itself.
"""
from __future__ import annotations

from dataclasses import dataclass
from functools import cached_property
from itertools import product

import numpy as np

from . import kernels
from .arith import NEG_INF, digit_sum
from .calculus import FunctionTable
from .errors import InputError
from .groups import PGroupShape, check_capacity

UNIT_SEARCH_CAP = 2**16
FIELD_CHECK_CAP = 2**12


@dataclass(frozen=True)
class ValidationReport:
    associative: bool
    witness: tuple[int, int, int] | None
    commutative: bool
    unit: tuple[int, ...] | None

    @property
    def valid(self) -> bool:
        return self.associative

    @property
    def unital(self) -> bool:
        return self.unit is not None

    def to_json(self) -> dict:
        return {
            "valid": self.valid,
            "associative": self.associative,
            "witness": None if self.witness is None else list(self.witness),
            "commutative": self.commutative,
            "unital": self.unital,
            "unit": None if self.unit is None else list(self.unit),
        }


@dataclass(frozen=True, eq=False)
class FiniteRngSpec:
    p: int
    dim: int
    mult: np.ndarray
    modulus: tuple[int, ...] | None = None  # set by make_fq: monic minimal polynomial, constant first

    def __post_init__(self):
        m = np.array(self.mult, dtype=np.int64, copy=True)
        if m.shape != (self.dim, self.dim, self.dim):
            raise InputError(f"structure constants must have shape ({self.dim},)*3, got {m.shape}")
        self.additive_shape  # validates p and dim
        m %= self.p
        m.setflags(write=False)
        object.__setattr__(self, "mult", m)

    @cached_property
    def additive_shape(self) -> PGroupShape:
        if self.dim < 1:
            raise InputError("rng dimension must be >= 1")
        return PGroupShape.elementary(self.p, self.dim)

    @property
    def order(self) -> int:
        return self.p**self.dim

    def __eq__(self, other):
        if not isinstance(other, FiniteRngSpec):
            return NotImplemented
        return (self.p, self.dim, self.modulus) == (other.p, other.dim, other.modulus) and np.array_equal(
            self.mult, other.mult
        )

    __hash__ = None

    def element(self, x) -> tuple[int, ...]:
        x = tuple(int(v) for v in x)
        if len(x) != self.dim:
            raise InputError(f"ring element {x} must have {self.dim} coordinates")
        return tuple(v % self.p for v in x)

    def zero(self) -> tuple[int, ...]:
        return (0,) * self.dim

    def basis(self) -> list[tuple[int, ...]]:
        return [tuple(int(i == j) for j in range(self.dim)) for i in range(self.dim)]

    def add(self, x, y) -> tuple[int, ...]:
        return tuple((a + b) % self.p for a, b in zip(x, y))

    def mul(self, x, y) -> tuple[int, ...]:
        v = np.einsum("i,j,ijk->k", np.asarray(x, dtype=np.int64), np.asarray(y, dtype=np.int64), self.mult)
        return tuple(int(a) for a in v % self.p)

    def mul_array(self, x: np.ndarray, y: np.ndarray) -> np.ndarray:
        """Row-wise products of two ``(M, dim)`` arrays."""
        return kernels._rng_mul_np(np.asarray(x, dtype=np.int64), np.asarray(y, dtype=np.int64), self.mult, self.p)

    def power(self, x, e: int) -> tuple[int, ...]:
        if e < 1:
            raise InputError("powers in a rng need exponent >= 1")
        result = None
        base = tuple(x)
        while True:
            if e & 1:
                result = base if result is None else self.mul(result, base)
            e >>= 1
            if not e:
                return result
            base = self.mul(base, base)

    def elements(self) -> np.ndarray:
        return self.additive_shape.residue_array

    @cached_property
    def report(self) -> ValidationReport:
        return validate_rng(self)

    @property
    def commutative(self) -> bool:
        return self.report.commutative

    @property
    def unital(self) -> bool:
        return self.report.unital

    @cached_property
    def is_field(self) -> bool:
        """Commutative, unital and every nonzero element invertible (checked exhaustively)."""
        rep = self.report
        if self.modulus is not None and self.order > FIELD_CHECK_CAP:
            return True  # built from an irreducible modulus; too large to recheck
        if not (rep.valid and rep.commutative and rep.unital):
            return False
        return _all_nonzero_invertible(self, rep.unit)

    def to_json(self) -> dict:
        if self.modulus is not None:
            return {"field": {"p": self.p, "n": self.dim}}
        return {"p": self.p, "dim": self.dim, "mult": self.mult.tolist()}

    @classmethod
    def from_json(cls, obj, path: str = "$") -> "FiniteRngSpec":
        if not isinstance(obj, dict):
            raise InputError("ring must be an object", path)
        if "field" in obj:
            fld = obj["field"]
            if not isinstance(fld, dict) or not isinstance(fld.get("p"), int) or not isinstance(fld.get("n"), int):
                raise InputError("field shorthand needs integer p and n", f"{path}.field")
            try:
                return make_fq(fld["p"], fld["n"])
            except InputError as exc:
                raise InputError(str(exc), f"{path}.field") from None
        for key in ("p", "dim", "mult"):
            if key not in obj:
                raise InputError(f"missing key {key!r}", path)
        p, dim, mult = obj["p"], obj["dim"], obj["mult"]
        if not isinstance(p, int) or not isinstance(dim, int) or dim < 1:
            raise InputError("p and dim must be integers, dim >= 1", path)
        if not isinstance(mult, list) or len(mult) != dim:
            raise InputError(f"mult must be a {dim}x{dim}x{dim} array", f"{path}.mult")
        for i, row in enumerate(mult):
            if not isinstance(row, list) or len(row) != dim:
                raise InputError(f"expected {dim} products", f"{path}.mult[{i}]")
            for j, vec in enumerate(row):
                if not isinstance(vec, list) or len(vec) != dim or not all(isinstance(v, int) for v in vec):
                    raise InputError(f"expected {dim} integers", f"{path}.mult[{i}][{j}]")
        try:
            return cls(p, dim, np.array(mult, dtype=np.int64))
        except InputError as exc:
            raise InputError(str(exc), path) from None


def _left_mult_tensor(spec: FiniteRngSpec, xs: np.ndarray) -> np.ndarray:
    # result[m, j] = xs[m] * e_j
    return np.einsum("mi,ijk->mjk", xs, spec.mult) % spec.p


def _right_mult_tensor(spec: FiniteRngSpec, xs: np.ndarray) -> np.ndarray:
    # result[m, j] = e_j * xs[m]
    return np.einsum("mi,jik->mjk", xs, spec.mult) % spec.p


def _solve_mod_p(a: np.ndarray, b: np.ndarray, p: int):
    """One solution of a x = b over Z/p, or None."""
    a = np.array(a, dtype=np.int64) % p
    b = np.array(b, dtype=np.int64) % p
    rows, cols = a.shape
    aug = np.concatenate([a, b[:, None]], axis=1)
    pivots = []
    r = 0
    for c in range(cols):
        nz = [i for i in range(r, rows) if aug[i, c]]
        if not nz:
            continue
        aug[[r, nz[0]]] = aug[[nz[0], r]]
        aug[r] = (aug[r] * pow(int(aug[r, c]), -1, p)) % p
        for i in range(rows):
            if i != r and aug[i, c]:
                aug[i] = (aug[i] - aug[i, c] * aug[r]) % p
        pivots.append(c)
        r += 1
        if r == rows:
            break
    if any(aug[i, cols] for i in range(r, rows)):
        return None
    x = np.zeros(cols, dtype=np.int64)
    for i, c in enumerate(pivots):
        x[c] = aug[i, cols]
    return x


def _find_unit(spec: FiniteRngSpec):
    d, p = spec.dim, spec.p
    eye = np.eye(d, dtype=np.int64)
    if spec.order <= UNIT_SEARCH_CAP:
        xs = spec.elements()
        ok = (_left_mult_tensor(spec, xs) == eye).all(axis=(1, 2)) & (
            _right_mult_tensor(spec, xs) == eye
        ).all(axis=(1, 2))
        hits = np.flatnonzero(ok)
        return tuple(int(v) for v in xs[hits[0]]) if len(hits) else None
    # u e_j = e_j and e_j u = e_j are linear in u
    a_left = np.transpose(spec.mult, (1, 2, 0)).reshape(d * d, d)
    a_right = np.transpose(spec.mult, (0, 2, 1)).reshape(d * d, d)
    sol = _solve_mod_p(np.vstack([a_left, a_right]), np.concatenate([eye.ravel(), eye.ravel()]), p)
    return None if sol is None else tuple(int(v) for v in sol)


def validate_rng(spec: FiniteRngSpec) -> ValidationReport:
    """Check associativity on basis triples (enough by bilinearity), commutativity, and find a unit."""
    m = spec.mult
    left = np.einsum("ijl,lkm->ijkm", m, m) % spec.p   # (e_i e_j) e_k
    right = np.einsum("jkl,ilm->ijkm", m, m) % spec.p  # e_i (e_j e_k)
    bad = np.argwhere((left != right).any(axis=3))
    witness = tuple(int(v) for v in bad[0]) if len(bad) else None
    commutative = bool((m == np.transpose(m, (1, 0, 2))).all())
    unit = _find_unit(spec) if witness is None else None
    return ValidationReport(witness is None, witness, commutative, unit)


def _all_nonzero_invertible(spec: FiniteRngSpec, unit) -> bool:
    check_capacity(spec.order, "field check", FIELD_CHECK_CAP)
    xs = spec.elements()[1:]
    q = spec.order
    # x^(q-1) == 1 for every nonzero x  iff  every nonzero x is a unit
    result, base, e = None, xs, q - 1
    while True:
        if e & 1:
            result = base if result is None else spec.mul_array(result, base)
        e >>= 1
        if not e:
            break
        base = spec.mul_array(base, base)
    return bool((result == np.array(unit, dtype=np.int64)).all())


# ---------------------------------------------------------------------------
# polynomials over Z/p, used to build F_q

def _poly_mod(a: list[int], m: list[int], p: int) -> list[int]:
    """Remainder of a by the monic m; coefficient lists constant first."""
    a = list(a)
    dm = len(m) - 1
    for i in range(len(a) - 1, dm - 1, -1):
        c = a[i] % p
        if c:
            for j in range(dm + 1):
                a[i - dm + j] = (a[i - dm + j] - c * m[j]) % p
    return [v % p for v in a[:dm]] + [0] * max(0, dm - len(a))


def is_irreducible(coeffs, p: int) -> bool:
    """Irreducibility of a monic polynomial over Z/p by exhaustive trial division."""
    coeffs = list(coeffs)
    n = len(coeffs) - 1
    for k in range(1, n // 2 + 1):
        for low in product(range(p), repeat=k):
            if not any(_poly_mod(coeffs, list(low) + [1], p)):
                return False
    return True


def least_irreducible(p: int, n: int) -> tuple[int, ...]:
    """Lexicographically least monic irreducible of degree n, constant coefficient first."""
    for low in product(range(p), repeat=n):
        if is_irreducible(list(low) + [1], p):
            return tuple(low) + (1,)
    raise AssertionError("an irreducible polynomial of every degree exists")


def make_fq(p: int, n: int) -> FiniteRngSpec:
    """F_{p^n} as Z/p[t]/(m) in the basis 1, t, ..., t^(n-1)."""
    if n < 1:
        raise InputError("field degree must be >= 1")
    check_capacity(p**n, f"F_{p}^{n}")
    PGroupShape(p, (1,))  # primality check
    m = list(least_irreducible(p, n))
    mult = np.zeros((n, n, n), dtype=np.int64)
    for i in range(n):
        for j in range(n):
            mono = [0] * (i + j) + [1]
            mult[i, j] = _poly_mod(mono, m, p) if i + j >= n else mono + [0] * (n - len(mono))
    return FiniteRngSpec(p, n, mult, tuple(m))


# ---------------------------------------------------------------------------
# sparse polynomials

def _graded_lex(exps):
    return (sum(exps), exps)


@dataclass(frozen=True, eq=False)
class SparsePoly:
    """Polynomial over a structure-constant rng; terms are ``(coefficient, exponents)``."""

    ring: FiniteRngSpec
    nvars: int
    terms: tuple

    def __post_init__(self):
        if self.nvars < 1:
            raise InputError("a polynomial needs at least one variable")
        acc: dict[tuple[int, ...], tuple[int, ...]] = {}
        for coeff, exps in self.terms:
            c = self.ring.element(coeff)
            e = tuple(int(d) for d in exps)
            if len(e) != self.nvars or any(d < 0 for d in e):
                raise InputError(f"exponent vector {e} must have {self.nvars} nonnegative entries")
            acc[e] = self.ring.add(acc.get(e, self.ring.zero()), c)
        terms = tuple((c, e) for e, c in sorted(acc.items(), key=lambda kv: _graded_lex(kv[0])) if any(c))
        object.__setattr__(self, "terms", terms)

    @classmethod
    def zero(cls, ring, nvars) -> "SparsePoly":
        return cls(ring, nvars, ())

    def is_zero(self) -> bool:
        return not self.terms

    def __eq__(self, other):
        if not isinstance(other, SparsePoly):
            return NotImplemented
        return self.ring == other.ring and self.nvars == other.nvars and self.terms == other.terms

    __hash__ = None

    def __call__(self, x) -> tuple[int, ...]:
        return poly_eval(self, x)

    def to_json(self, with_ring: bool = True) -> dict:
        out = {"vars": self.nvars, "terms": [{"coeff": list(c), "exps": list(e)} for c, e in self.terms]}
        if with_ring:
            out = {"ring": self.ring.to_json(), **out}
        return out

    @classmethod
    def from_json(cls, obj, path: str = "$", ring: FiniteRngSpec | None = None) -> "SparsePoly":
        if not isinstance(obj, dict):
            raise InputError("polynomial must be an object", path)
        if ring is None:
            if "ring" not in obj:
                raise InputError("missing key 'ring'", path)
            ring = FiniteRngSpec.from_json(obj["ring"], f"{path}.ring")
        nvars = obj.get("vars")
        if not isinstance(nvars, int) or nvars < 1:
            raise InputError("vars must be a positive integer", f"{path}.vars")
        terms_in = obj.get("terms")
        if not isinstance(terms_in, list):
            raise InputError("terms must be a list", f"{path}.terms")
        terms = []
        for i, t in enumerate(terms_in):
            tp = f"{path}.terms[{i}]"
            if not isinstance(t, dict) or "coeff" not in t or "exps" not in t:
                raise InputError("term must be an object {coeff, exps}", tp)
            c, e = t["coeff"], t["exps"]
            if isinstance(c, int):
                c = [c]
            if not isinstance(c, list) or len(c) != ring.dim or not all(isinstance(v, int) for v in c):
                raise InputError(f"coeff must be {ring.dim} integers", f"{tp}.coeff")
            if not isinstance(e, list) or len(e) != nvars or not all(isinstance(v, int) and v >= 0 for v in e):
                raise InputError(f"exps must be {nvars} nonnegative integers", f"{tp}.exps")
            terms.append((tuple(c), tuple(e)))
        return cls(ring, nvars, tuple(terms))


def poly_eval(f: SparsePoly, x) -> tuple[int, ...]:
    x = [f.ring.element(v) for v in x]
    if len(x) != f.nvars:
        raise InputError(f"point has {len(x)} coordinates, polynomial has {f.nvars} variables")
    total = f.ring.zero()
    for c, exps in f.terms:
        mono = None
        for xi, d in zip(x, exps):
            if d:
                pw = f.ring.power(xi, d)
                mono = pw if mono is None else f.ring.mul(mono, pw)
        total = f.ring.add(total, c if mono is None else f.ring.mul(c, mono))
    return total


def poly_degree(f: SparsePoly):
    return max((sum(e) for _, e in f.terms), default=NEG_INF)


def p_weight(d: int, p: int) -> int:
    return digit_sum(d, p)


def p_weight_degree(f: SparsePoly):
    p = f.ring.p
    return max((sum(digit_sum(d, p) for d in e) for _, e in f.terms), default=NEG_INF)


def reduce_over_fq(f: SparsePoly) -> SparsePoly:
    """The reduced polynomial (all exponents <= q - 1) inducing the same function on F_q."""
    if not f.ring.is_field:
        raise InputError("reduction via x^q = x needs the ring to be a finite field")
    q = f.ring.order
    terms = [(c, tuple(0 if d == 0 else (d - 1) % (q - 1) + 1 for d in e)) for c, e in f.terms]
    return SparsePoly(f.ring, f.nvars, tuple(terms))


def ring_domain_shape(ring: FiniteRngSpec, nvars: int) -> PGroupShape:
    """Additive group of R^n: (Z/p)^(dim * n), variable-major coordinates."""
    return PGroupShape.elementary(ring.p, ring.dim * nvars)


def poly_to_table(f: SparsePoly) -> FunctionTable:
    """Dense table of E(f) on R^n."""
    dom = ring_domain_shape(f.ring, f.nvars)
    check_capacity(dom.order, f"table of a polynomial on {dom}")
    points = dom.residue_array.reshape(dom.order, f.nvars, f.ring.dim)
    if f.terms:
        coeffs = np.array([c for c, _ in f.terms], dtype=np.int64)
        exps = np.array([e for _, e in f.terms], dtype=np.int64)
        vals = kernels.poly_table(points, coeffs, exps, f.ring.mult, f.ring.p)
    else:
        vals = np.zeros((dom.order, f.ring.dim), dtype=np.int64)
    return FunctionTable._raw(dom, f.ring.additive_shape, vals)


def tensor_table(f: FunctionTable, g: FunctionTable, ring: FiniteRngSpec) -> FunctionTable:
    """``(x, y) -> f(x) * g(y)`` on the direct sum of the two domains (f's coordinates first)."""
    if f.codomain != ring.additive_shape or g.codomain != ring.additive_shape:
        raise InputError("both tables must take values in the rng")
    dom = PGroupShape(f.p, f.domain.alphas + g.domain.alphas)
    check_capacity(dom.order, f"tensor product on {dom}")
    n1, n2 = f.domain.order, g.domain.order
    left = np.repeat(f.values[None, :, :], n2, axis=0).reshape(-1, ring.dim)
    right = np.repeat(g.values[:, None, :], n1, axis=1).reshape(-1, ring.dim)
    return FunctionTable._raw(dom, ring.additive_shape, ring.mul_array(left, right))
