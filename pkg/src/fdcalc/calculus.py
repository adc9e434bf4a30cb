"""Difference operators and functional degree for maps between finite p-groups.

``fdeg`` returns an ``int`` or ``-inf`` (the zero function). Functions on a
finite p-group into a p-group of the same prime always have finite degree,
so ``+inf`` never appears here.
"""
from __future__ import annotations

import math
from dataclasses import dataclass
from itertools import product

import numpy as np

from . import kernels
from .arith import NEG_INF
from .errors import CapacityError, InputError
from .groups import GroupElement, PGroupShape, check_capacity

FDEG_ORACLE_CAP = 2**12


@dataclass(frozen=True, eq=False)
class FunctionTable:
    """A function ``domain -> codomain`` stored densely.

    ``values[i]`` is the residue vector of f at the element with index ``i``.
    """

    domain: PGroupShape
    codomain: PGroupShape
    values: np.ndarray

    def __post_init__(self):
        vals = np.array(self.values, dtype=np.int64, copy=True)
        if vals.ndim == 1 and self.codomain.arity == 1:
            vals = vals[:, None]
        if vals.shape != (self.domain.order, self.codomain.arity):
            raise InputError(
                f"table shape {vals.shape} does not match "
                f"({self.domain.order}, {self.codomain.arity})"
            )
        if ((vals < 0) | (vals >= self.codomain.moduli_array)).any():
            raise InputError("table value out of codomain range")
        vals.setflags(write=False)
        object.__setattr__(self, "values", vals)

    @classmethod
    def _raw(cls, domain, codomain, values) -> "FunctionTable":
        # trusted constructor for values already reduced and shaped
        obj = object.__new__(cls)
        values = np.ascontiguousarray(values, dtype=np.int64)
        values.setflags(write=False)
        object.__setattr__(obj, "domain", domain)
        object.__setattr__(obj, "codomain", codomain)
        object.__setattr__(obj, "values", values)
        return obj

    @classmethod
    def from_function(cls, domain: PGroupShape, codomain: PGroupShape, fn) -> "FunctionTable":
        """Tabulate ``fn`` called on residue tuples; results are reduced mod the codomain."""
        rows = []
        for x in domain.residue_array:
            v = fn(tuple(int(r) for r in x))
            if isinstance(v, GroupElement):
                v = v.residues
            if np.ndim(v) == 0:
                v = (v,)
            rows.append([int(a) % m for a, m in zip(v, codomain.moduli)])
        return cls._raw(domain, codomain, np.array(rows, dtype=np.int64).reshape(domain.order, codomain.arity))

    @classmethod
    def zero(cls, domain, codomain) -> "FunctionTable":
        return cls._raw(domain, codomain, np.zeros((domain.order, codomain.arity), dtype=np.int64))

    @classmethod
    def random(cls, domain, codomain, rng: np.random.Generator) -> "FunctionTable":
        vals = rng.integers(0, codomain.moduli_array, size=(domain.order, codomain.arity))
        return cls._raw(domain, codomain, vals)

    @property
    def p(self) -> int:
        return self.domain.p

    def __call__(self, x) -> GroupElement:
        i = self.domain.index(x)
        return GroupElement(self.codomain, tuple(int(v) for v in self.values[i]))

    def periodic(self, xs) -> tuple[int, ...]:
        """Value of the pullback to Z^N at an arbitrary integer vector."""
        i = 0
        for x, m, s in zip(xs, self.domain.moduli, self.domain.strides):
            i += (int(x) % m) * s
        return tuple(int(v) for v in self.values[i])

    def is_zero(self) -> bool:
        return not self.values.any()

    def _check_same(self, other):
        if self.domain != other.domain or self.codomain != other.codomain:
            raise InputError("tables have different shapes")

    def __eq__(self, other):
        if not isinstance(other, FunctionTable):
            return NotImplemented
        return (
            self.domain == other.domain
            and self.codomain == other.codomain
            and np.array_equal(self.values, other.values)
        )

    __hash__ = None

    def __add__(self, other: "FunctionTable") -> "FunctionTable":
        self._check_same(other)
        return FunctionTable._raw(self.domain, self.codomain, (self.values + other.values) % self.codomain.moduli_array)

    def __neg__(self) -> "FunctionTable":
        return FunctionTable._raw(self.domain, self.codomain, (-self.values) % self.codomain.moduli_array)

    def __sub__(self, other: "FunctionTable") -> "FunctionTable":
        return self + (-other)

    def reduce(self, betas) -> "FunctionTable":
        """Compose with the quotient  Z/p^b_j -> Z/p^betas[j]  on every coordinate."""
        betas = tuple(betas)
        if len(betas) != self.codomain.arity or any(
            not 1 <= b <= a for b, a in zip(betas, self.codomain.alphas)
        ):
            raise InputError(f"cannot reduce codomain {self.codomain} to exponents {betas}")
        target = PGroupShape(self.p, betas)
        return FunctionTable._raw(self.domain, target, self.values % target.moduli_array)

    def project(self, coord: int) -> "FunctionTable":
        """Compose with the projection onto codomain coordinate ``coord`` (0-based)."""
        target = PGroupShape(self.p, (self.codomain.alphas[coord],))
        return FunctionTable._raw(self.domain, target, self.values[:, coord : coord + 1])

    def to_json(self) -> dict:
        return {
            "domain": self.domain.to_json(),
            "codomain": self.codomain.to_json(),
            "values": self.values.tolist(),
        }

    @classmethod
    def from_json(cls, obj, path: str = "$") -> "FunctionTable":
        if not isinstance(obj, dict):
            raise InputError("function table must be an object", path)
        for key in ("domain", "codomain", "values"):
            if key not in obj:
                raise InputError(f"missing key {key!r}", path)
        dom = PGroupShape.from_json(obj["domain"], f"{path}.domain")
        cod = PGroupShape.from_json(obj["codomain"], f"{path}.codomain")
        check_capacity(dom.order, f"table on {dom}")
        vals = obj["values"]
        if not isinstance(vals, list) or len(vals) != dom.order:
            raise InputError(f"values must be a list of {dom.order} residue arrays", f"{path}.values")
        for i, row in enumerate(vals):
            if isinstance(row, int):
                row = [row]
            if not isinstance(row, list) or len(row) != cod.arity:
                raise InputError(f"expected {cod.arity} residues", f"{path}.values[{i}]")
            for c, (v, m) in enumerate(zip(row, cod.moduli)):
                if not isinstance(v, int) or not 0 <= v < m:
                    raise InputError(f"residue {v!r} not in [0, {m})", f"{path}.values[{i}][{c}]")
        arr = np.array([r if isinstance(r, list) else [r] for r in vals], dtype=np.int64)
        return cls._raw(dom, cod, arr.reshape(dom.order, cod.arity))


def _same_prime(f: FunctionTable) -> None:
    if f.domain.p != f.codomain.p:
        raise InputError(
            f"domain prime {f.domain.p} and codomain prime {f.codomain.p} differ; "
            "the functional degree is only bounded when both are p-groups for one p"
        )


def delta(f: FunctionTable, a) -> FunctionTable:
    """``x -> f(x + a) - f(x)``."""
    if isinstance(a, GroupElement):
        if a.shape != f.domain:
            raise InputError(f"shift {a.residues} lives in {a.shape}, not {f.domain}")
        a = a.residues
    a = f.domain.element(a).residues
    shifted = f.domain.indices_of(f.domain.residue_array + np.array(a, dtype=np.int64))
    return FunctionTable._raw(f.domain, f.codomain, (f.values[shifted] - f.values) % f.codomain.moduli_array)


def delta_generator(f: FunctionTable, i: int) -> FunctionTable:
    """Delta along the standard generator e_i (0-based ``i``)."""
    return FunctionTable._raw(
        f.domain, f.codomain,
        kernels.delta_axis(f.values, f.domain.moduli_array, i, f.codomain.moduli_array),
    )


def delta_multi(f: FunctionTable, n) -> FunctionTable:
    """Delta_1^n_1 ... Delta_N^n_N f."""
    n = tuple(int(k) for k in n)
    if len(n) != f.domain.arity or any(k < 0 for k in n):
        raise InputError(f"multi-index {n} does not fit domain arity {f.domain.arity}")
    g = f
    for i, k in enumerate(n):
        for _ in range(k):
            g = delta_generator(g, i)
    return g


def delta_power_at(f: FunctionTable, a, n: int, x) -> GroupElement:
    """``Delta_a^n f(x) = sum_j (-1)^(n-j) C(n, j) f(x + j a)``, evaluated directly."""
    if n < 0:
        raise InputError("n must be >= 0")
    a = a.residues if isinstance(a, GroupElement) else tuple(a)
    x = x.residues if isinstance(x, GroupElement) else tuple(x)
    acc = [0] * f.codomain.arity
    for j in range(n + 1):
        sign = -1 if (n - j) % 2 else 1
        v = f.periodic([xi + j * ai for xi, ai in zip(x, a)])
        c = sign * math.comb(n, j)
        acc = [s + c * vi for s, vi in zip(acc, v)]
    return f.codomain.element([s % m for s, m in zip(acc, f.codomain.moduli)])


def delta_p_bound(p: int, alphas, beta: int) -> int:
    """Largest functional degree of a map  +_i Z/p^alphas[i] -> Z/p^beta."""
    alphas = tuple(alphas)
    if not alphas or any(a < 1 for a in alphas) or beta < 1:
        raise InputError("delta_p needs alphas >= 1 and beta >= 1")
    return sum(p**a - 1 for a in alphas) + (beta - 1) * (p - 1) * p ** (max(alphas) - 1)


def degree_caps(f: FunctionTable) -> tuple[int, ...]:
    """Per-coordinate bounds on the partial degrees of ``f``."""
    beta = max(f.codomain.alphas)
    return tuple(delta_p_bound(f.p, (a,), beta) for a in f.domain.alphas)


def fdeg(f: FunctionTable):
    """Functional degree: max |n| with Delta^n f nonzero on the whole table."""
    _same_prime(f)
    d = kernels.fdeg_search(f.values, f.domain.moduli_array, f.codomain.moduli_array, degree_caps(f))
    return NEG_INF if d < 0 else d


def fdeg_oracle(f: FunctionTable, cap: int = FDEG_ORACLE_CAP):
    """Functional degree straight from the definition.

    Finds the least d such that every (d+1)-fold chain of difference
    operators along standard generators kills f. No degree caps are used;
    only small tables are admitted.
    """
    _same_prime(f)
    size = f.domain.order * f.codomain.arity
    if size > cap:
        raise CapacityError(f"fdeg_oracle admits at most {cap} table entries, got {size}")
    if f.is_zero():
        return NEG_INF
    gens = f.domain.generators()
    # chains are nondecreasing generator sequences; the operators commute
    frontier = [(0, f)]
    d = 0
    while True:
        nxt = []
        for last, g in frontier:
            for i in range(last, len(gens)):
                h = delta(g, gens[i])
                if not h.is_zero():
                    nxt.append((i, h))
        if not nxt:
            return d
        frontier = nxt
        d += 1


def partial_fdeg(f: FunctionTable, j: int):
    """``sup{n : Delta_j^n f != 0}`` for the 1-based coordinate ``j``."""
    _same_prime(f)
    if not 1 <= j <= f.domain.arity:
        raise InputError(f"coordinate {j} out of range 1..{f.domain.arity}")
    if f.is_zero():
        return NEG_INF
    cap = degree_caps(f)[j - 1]
    vals = f.values
    n = 0
    while n < cap:
        vals = kernels.delta_axis(vals, f.domain.moduli_array, j - 1, f.codomain.moduli_array)
        if not vals.any():
            break
        n += 1
    return n


def partial_fdegs(f: FunctionTable) -> list:
    return [partial_fdeg(f, j) for j in range(1, f.domain.arity + 1)]


def box_indices(caps):
    """All multi-indices with ``n_i <= caps[i]``, coordinate 1 varying fastest."""
    for rev in product(*(range(c + 1) for c in reversed(caps))):
        yield tuple(reversed(rev))
