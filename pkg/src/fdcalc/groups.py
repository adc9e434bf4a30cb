"""Finite abelian p-groups  Z/p^a1 + ... + Z/p^aN  and their elements.

Elements are residue vectors ``(x_1, ..., x_N)`` with ``0 <= x_i < p**a_i``.
Indexing is mixed radix with coordinate 1 as the least significant digit::

    index(x) = x_1 + p^a1 * (x_2 + p^a2 * (x_3 + ...))

Every table, file format and kernel in the package relies on this order.
"""
from __future__ import annotations

import re
from dataclasses import dataclass
from functools import cached_property

import numpy as np

from .arith import is_prime
from .errors import CapacityError, InputError

DEFAULT_ENUMERATION_CAP = 2**26
_enumeration_cap = DEFAULT_ENUMERATION_CAP


def get_enumeration_cap() -> int:
    return _enumeration_cap


def set_enumeration_cap(cap: int) -> None:
    """Set the largest number of items any single exhaustive enumeration may visit."""
    global _enumeration_cap
    if int(cap) < 1:
        raise InputError("enumeration cap must be >= 1")
    _enumeration_cap = int(cap)


def check_capacity(count: int, what: str, cap: int | None = None) -> None:
    cap = _enumeration_cap if cap is None else cap
    if count > cap:
        raise CapacityError(f"{what}: {count} items exceeds enumeration cap {cap}")


@dataclass(frozen=True)
class PGroupShape:
    """The group  Z/p^alphas[0] + ... + Z/p^alphas[-1]."""

    p: int
    alphas: tuple[int, ...]

    def __post_init__(self):
        object.__setattr__(self, "alphas", tuple(int(a) for a in self.alphas))
        if not isinstance(self.p, (int, np.integer)) or not is_prime(int(self.p)):
            raise InputError(f"p={self.p!r} is not prime")
        object.__setattr__(self, "p", int(self.p))
        if not self.alphas:
            raise InputError("a p-group shape needs at least one cyclic factor")
        if any(a < 1 for a in self.alphas):
            raise InputError(f"exponents must be >= 1, got {self.alphas}")

    @classmethod
    def elementary(cls, p: int, n: int) -> "PGroupShape":
        """(Z/p)^n."""
        return cls(p, (1,) * n)

    @classmethod
    def cyclic(cls, p: int, beta: int) -> "PGroupShape":
        return cls(p, (beta,))

    @property
    def arity(self) -> int:
        return len(self.alphas)

    @cached_property
    def moduli(self) -> tuple[int, ...]:
        return tuple(self.p**a for a in self.alphas)

    @cached_property
    def strides(self) -> tuple[int, ...]:
        out, s = [], 1
        for m in self.moduli:
            out.append(s)
            s *= m
        return tuple(out)

    @cached_property
    def order(self) -> int:
        o = 1
        for m in self.moduli:
            o *= m
        return o

    @property
    def exponent(self) -> int:
        return self.p ** max(self.alphas)

    @property
    def is_elementary(self) -> bool:
        return all(a == 1 for a in self.alphas)

    @cached_property
    def moduli_array(self) -> np.ndarray:
        a = np.array(self.moduli, dtype=np.int64)
        a.setflags(write=False)
        return a

    @cached_property
    def residue_array(self) -> np.ndarray:
        """All elements as rows of an ``(order, arity)`` array, in index order."""
        check_capacity(self.order, f"enumerate {self}")
        idx = np.arange(self.order, dtype=np.int64)[:, None]
        arr = (idx // np.array(self.strides, dtype=np.int64)) % self.moduli_array
        arr.setflags(write=False)
        return arr

    def element(self, residues) -> "GroupElement":
        return GroupElement(self, tuple(residues))

    def zero(self) -> "GroupElement":
        return GroupElement(self, (0,) * self.arity)

    def generators(self) -> list["GroupElement"]:
        """The standard generators e_1, ..., e_N."""
        return [
            GroupElement(self, tuple(int(i == j) for j in range(self.arity)))
            for i in range(self.arity)
        ]

    def index(self, x) -> int:
        return element_index(self, x)

    def decode(self, i: int) -> "GroupElement":
        return element_decode(self, i)

    def indices_of(self, residues: np.ndarray) -> np.ndarray:
        """Vectorised index of an ``(..., arity)`` residue array (reduced first)."""
        r = np.asarray(residues, dtype=np.int64) % self.moduli_array
        return r @ np.array(self.strides, dtype=np.int64)

    def to_json(self) -> dict:
        return {"p": self.p, "alphas": list(self.alphas)}

    @classmethod
    def from_json(cls, obj, path: str = "$") -> "PGroupShape":
        if isinstance(obj, str):
            return cls.parse(obj)
        if not isinstance(obj, dict):
            raise InputError("shape must be an object {p, alphas}", path)
        for key in ("p", "alphas"):
            if key not in obj:
                raise InputError(f"missing key {key!r}", path)
        if not isinstance(obj["alphas"], list) or not all(isinstance(a, int) for a in obj["alphas"]):
            raise InputError("alphas must be a list of integers", f"{path}.alphas")
        if not isinstance(obj["p"], int):
            raise InputError("p must be an integer", f"{path}.p")
        try:
            return cls(obj["p"], tuple(obj["alphas"]))
        except InputError as exc:
            raise InputError(str(exc), path) from None

    @classmethod
    def parse(cls, text: str) -> "PGroupShape":
        """Parse the shorthand ``"p:a1,a2,..."``, e.g. ``"2:1,1"`` for (Z/2)^2."""
        m = re.fullmatch(r"\s*(\d+)\s*:\s*(\d+(?:\s*,\s*\d+)*)\s*", text)
        if not m:
            raise InputError(f"cannot parse shape {text!r}; expected 'p:a1,a2,...'")
        return cls(int(m.group(1)), tuple(int(a) for a in m.group(2).split(",")))

    def __str__(self) -> str:
        return " + ".join(f"Z/{m}" for m in self.moduli)


@dataclass(frozen=True)
class GroupElement:
    shape: PGroupShape
    residues: tuple[int, ...]

    def __post_init__(self):
        object.__setattr__(self, "residues", tuple(int(r) for r in self.residues))
        if len(self.residues) != self.shape.arity:
            raise InputError(
                f"element {self.residues} has {len(self.residues)} coordinates, "
                f"shape {self.shape} has {self.shape.arity}"
            )
        for r, m in zip(self.residues, self.shape.moduli):
            if not 0 <= r < m:
                raise InputError(f"residue {r} out of range [0, {m}) in {self.residues}")

    def __add__(self, other: "GroupElement") -> "GroupElement":
        return element_add(self, other)

    def __neg__(self) -> "GroupElement":
        return GroupElement(self.shape, tuple((-r) % m for r, m in zip(self.residues, self.shape.moduli)))

    def __sub__(self, other: "GroupElement") -> "GroupElement":
        return self + (-other)

    def __rmul__(self, k: int) -> "GroupElement":
        return GroupElement(self.shape, tuple((k * r) % m for r, m in zip(self.residues, self.shape.moduli)))

    def is_zero(self) -> bool:
        return not any(self.residues)

    def __iter__(self):
        return iter(self.residues)


def element_index(shape: PGroupShape, x) -> int:
    residues = x.residues if isinstance(x, GroupElement) else tuple(x)
    if isinstance(x, GroupElement) and x.shape != shape:
        raise InputError(f"element of {x.shape} used with {shape}")
    if len(residues) != shape.arity:
        raise InputError(f"expected {shape.arity} residues, got {len(residues)}")
    i = 0
    for r, m, s in zip(residues, shape.moduli, shape.strides):
        if not 0 <= r < m:
            raise InputError(f"residue {r} out of range [0, {m})")
        i += r * s
    return i


def element_decode(shape: PGroupShape, i: int) -> GroupElement:
    if not 0 <= i < shape.order:
        raise InputError(f"index {i} out of range [0, {shape.order})")
    res = []
    for m in shape.moduli:
        i, r = divmod(i, m)
        res.append(r)
    return GroupElement(shape, tuple(res))


def element_add(x: GroupElement, y: GroupElement) -> GroupElement:
    if x.shape != y.shape:
        raise InputError(f"cannot add elements of {x.shape} and {y.shape}")
    return GroupElement(
        x.shape, tuple((a + b) % m for a, b, m in zip(x.residues, y.residues, x.shape.moduli))
    )


def enumerate_elements(shape: PGroupShape) -> list[GroupElement]:
    check_capacity(shape.order, f"enumerate {shape}")
    return [element_decode(shape, i) for i in range(shape.order)]
