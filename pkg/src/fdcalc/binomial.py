"""Binomial-series representation of periodic functions.

A series is a finite map ``n -> a_n`` over multi-indices ``n in N^N`` and
stands for the function

    x  ->  sum_n  C(x_1, n_1) ... C(x_N, n_N) * a_n        (x in Z^N).

Coefficients live either in a p-group shape (residue vectors) or in Z^w
(integer vectors of width w, the codomain of a proper lift).
"""
from __future__ import annotations

import math
from dataclasses import dataclass, field

import numpy as np

from . import kernels
from .arith import NEG_INF, ord_p
from .calculus import FunctionTable, _same_prime, box_indices, degree_caps, delta_p_bound
from .errors import InputError
from .groups import PGroupShape


def binom_int(x: int, n: int) -> int:
    """x(x-1)...(x-n+1)/n! for any integer x; 1 for n = 0 and 0 for n < 0."""
    if n < 0:
        return 0
    if x >= 0:
        return math.comb(x, n)
    # C(x, n) = (-1)^n C(n - x - 1, n)
    c = math.comb(n - x - 1, n)
    return -c if n % 2 else c


def _graded_lex(n):
    return (sum(n), n)


@dataclass(frozen=True)
class BinomialSeries:
    """Finitely supported coefficients of a binomial series.

    ``codomain`` is a :class:`PGroupShape` or ``None`` for integer
    coefficients; ``width`` is the length of every coefficient vector.
    Zero coefficients are never stored.
    """

    arity: int
    codomain: PGroupShape | None
    width: int
    terms: dict = field(default_factory=dict)

    def __post_init__(self):
        if self.arity < 1:
            raise InputError("series arity must be >= 1")
        if self.codomain is not None and self.codomain.arity != self.width:
            raise InputError("width must equal the codomain arity")
        clean = {}
        for n, a in self.terms.items():
            n = tuple(int(k) for k in n)
            a = tuple(int(v) for v in a)
            if len(n) != self.arity or any(k < 0 for k in n):
                raise InputError(f"multi-index {n} does not have {self.arity} nonnegative entries")
            if len(a) != self.width:
                raise InputError(f"coefficient {a} does not have width {self.width}")
            if self.codomain is not None:
                a = tuple(v % m for v, m in zip(a, self.codomain.moduli))
            if any(a):
                clean[n] = a
        object.__setattr__(self, "terms", dict(sorted(clean.items(), key=lambda kv: _graded_lex(kv[0]))))

    @property
    def is_integral(self) -> bool:
        return self.codomain is None

    def coefficient(self, n) -> tuple[int, ...]:
        return self.terms.get(tuple(n), (0,) * self.width)

    def support_degree(self):
        """max |n| over the support; -inf for the empty series."""
        return max((sum(n) for n in self.terms), default=NEG_INF)

    def evaluate(self, x) -> tuple[int, ...]:
        return evaluate_series(self, x)

    def to_json(self) -> dict:
        return {
            "arity": self.arity,
            "codomain": "Z" if self.codomain is None else self.codomain.to_json(),
            "width": self.width,
            "terms": [{"n": list(n), "a": list(a)} for n, a in self.terms.items()],
        }

    @classmethod
    def from_json(cls, obj, path: str = "$") -> "BinomialSeries":
        if not isinstance(obj, dict):
            raise InputError("series must be an object", path)
        for key in ("arity", "codomain", "terms"):
            if key not in obj:
                raise InputError(f"missing key {key!r}", path)
        arity = obj["arity"]
        if not isinstance(arity, int) or arity < 1:
            raise InputError("arity must be a positive integer", f"{path}.arity")
        cod = None if obj["codomain"] == "Z" else PGroupShape.from_json(obj["codomain"], f"{path}.codomain")
        terms_in = obj["terms"]
        if not isinstance(terms_in, list):
            raise InputError("terms must be a list", f"{path}.terms")
        width = obj.get("width")
        if width is None:
            width = cod.arity if cod is not None else (len(terms_in[0]["a"]) if terms_in else 1)
        terms = {}
        for i, t in enumerate(terms_in):
            tp = f"{path}.terms[{i}]"
            if not isinstance(t, dict) or "n" not in t or "a" not in t:
                raise InputError("term must be an object {n, a}", tp)
            n, a = t["n"], t["a"]
            if not isinstance(n, list) or len(n) != arity or not all(isinstance(k, int) and k >= 0 for k in n):
                raise InputError(f"n must be {arity} nonnegative integers", f"{tp}.n")
            if isinstance(a, int):
                a = [a]
            if not isinstance(a, list) or len(a) != width or not all(isinstance(v, int) for v in a):
                raise InputError(f"a must be {width} integers", f"{tp}.a")
            if tuple(n) in terms:
                raise InputError(f"duplicate multi-index {n}", f"{tp}.n")
            terms[tuple(n)] = tuple(a)
        try:
            return cls(arity, cod, width, terms)
        except InputError as exc:
            raise InputError(str(exc), path) from None


def fundamental_coefficients(f: FunctionTable) -> BinomialSeries:
    """Coefficients ``a_n = Delta^n F(0)`` of the pullback F of ``f`` to Z^N.

    Every n with ``n_i <= cap_i`` is computed; beyond the caps all
    coefficients vanish.
    """
    _same_prime(f)
    caps = degree_caps(f)
    coeffs = kernels.coefficients_at_zero(f.values, f.domain.moduli_array, f.codomain.moduli_array, caps)
    terms = {}
    nz = np.flatnonzero(coeffs.any(axis=1))
    if len(nz):
        radices = np.array([c + 1 for c in caps], dtype=np.int64)
        strides = np.cumprod(np.concatenate(([1], radices[:-1])))
        digits = (nz[:, None] // strides) % radices
        for row, n in zip(nz, digits):
            terms[tuple(int(k) for k in n)] = tuple(int(v) for v in coeffs[row])
    return BinomialSeries(f.domain.arity, f.codomain, f.codomain.arity, terms)


def fdeg_at_zero(f: FunctionTable):
    """Functional degree read off the coefficients at 0 (the localized shortcut)."""
    return fundamental_coefficients(f).support_degree()


def evaluate_series(s: BinomialSeries, x) -> tuple[int, ...]:
    x = tuple(int(v) for v in x)
    if len(x) != s.arity:
        raise InputError(f"point has {len(x)} coordinates, series arity is {s.arity}")
    acc = [0] * s.width
    if not s.terms:
        return tuple(acc)
    # rows[i][k] = C(x_i, k), built by C(x, k + 1) = C(x, k) (x - k) / (k + 1)
    tops = [max(n[i] for n in s.terms) for i in range(s.arity)]
    rows = []
    for xi, top in zip(x, tops):
        row = [1]
        for k in range(top):
            row.append(row[-1] * (xi - k) // (k + 1))
        rows.append(row)
    for n, a in s.terms.items():
        w = 1
        for row, ni in zip(rows, n):
            w *= row[ni]
            if not w:
                break
        if w:
            acc = [c + w * v for c, v in zip(acc, a)]
    if s.codomain is not None:
        acc = [c % m for c, m in zip(acc, s.codomain.moduli)]
    return tuple(acc)


def series_to_table(s: BinomialSeries, domain: PGroupShape) -> FunctionTable:
    """Tabulate a p-group series on the representatives ``0 <= x_i < p^alpha_i``.

    The result is the series' function only when the series is periodic.
    """
    if s.codomain is None:
        raise InputError("only p-group valued series can be tabulated")
    if domain.arity != s.arity:
        raise InputError("domain arity differs from series arity")
    return FunctionTable.from_function(domain, s.codomain, lambda x: evaluate_series(s, x))


def proper_lift(s: BinomialSeries) -> BinomialSeries:
    """Lift every coordinate to its least nonnegative representative in Z.

    Nonzero residues land in [1, p^beta - 1], zero ones stay 0, so the lift is
    proper in each coordinate.
    """
    if s.codomain is None:
        raise InputError("series is already integral")
    return BinomialSeries(s.arity, None, s.width, dict(s.terms))


def reduce_series(s: BinomialSeries, codomain: PGroupShape) -> BinomialSeries:
    """Push integer coefficients down to ``codomain`` residues."""
    if codomain.arity != s.width:
        raise InputError("codomain arity differs from series width")
    return BinomialSeries(s.arity, codomain, s.width, dict(s.terms))


@dataclass(frozen=True)
class LiftRecord:
    h: int
    n: tuple[int, ...]
    coefficient: tuple[int, ...]
    modulus: int
    passed: bool


@dataclass(frozen=True)
class LiftAudit:
    p: int
    alphas: tuple[int, ...]
    h_max: int
    records: tuple[LiftRecord, ...]

    @property
    def passed(self) -> bool:
        return all(r.passed for r in self.records)

    def failures(self) -> list[LiftRecord]:
        return [r for r in self.records if not r.passed]

    def consistent(self) -> bool:
        return all(r.passed == all(c % r.modulus == 0 for c in r.coefficient) for r in self.records)

    def to_json(self) -> dict:
        return {
            "p": self.p,
            "alphas": list(self.alphas),
            "h_max": self.h_max,
            "passed": self.passed,
            "thresholds": {str(h): delta_p_bound(self.p, self.alphas, h) for h in range(1, self.h_max + 1)},
            "records": [
                {"h": r.h, "n": list(r.n), "a": list(r.coefficient), "modulus": r.modulus, "passed": r.passed}
                for r in self.records
            ],
        }


def audit_lift_divisibility(lift: BinomialSeries, p: int, alphas, h_max: int) -> LiftAudit:
    """Check that p^h divides every coordinate of a_n whenever |n| > delta_p(alphas, h)."""
    if not lift.is_integral:
        raise InputError("audit expects an integer (lifted) series")
    alphas = tuple(alphas)
    records = []
    for h in range(1, h_max + 1):
        threshold = delta_p_bound(p, alphas, h)
        mod = p**h
        for n, a in lift.terms.items():
            if sum(n) > threshold:
                records.append(LiftRecord(h, n, a, mod, all(c % mod == 0 for c in a)))
    return LiftAudit(p, alphas, h_max, tuple(records))


def wilson_sum(s: BinomialSeries, p: int):
    """Sum of an integer series over the cube {0, ..., p-1}^N and its p-adic valuation.

    Each term factorises: sum_{x<p} C(x, n) = C(p, n + 1).
    """
    if not s.is_integral or s.width != 1:
        raise InputError("wilson_sum expects a scalar integer series")
    total = 0
    for n, (a,) in s.terms.items():
        w = 1
        for k in n:
            w *= math.comb(p, k + 1)
        total += w * a
    return total, ord_p(total, p)


def wilson_sum_direct(s: BinomialSeries, p: int):
    """Same as :func:`wilson_sum` by evaluating the series at all p^N points."""
    from itertools import product

    total = sum(evaluate_series(s, x)[0] for x in product(range(p), repeat=s.arity))
    return total, ord_p(total, p)


def wilson_hypothesis(s: BinomialSeries, p: int, beta: int) -> bool:
    """Whether the degree of ``s`` is below (p - 1)(N - beta + 1)."""
    return s.support_degree() < (p - 1) * (s.arity - beta + 1)


def series_box(f: FunctionTable):
    """Multi-indices over which :func:`fundamental_coefficients` computes coefficients."""
    return box_indices(degree_caps(f))
