"""Trapdoor operators ``T[a,b;c] : x -> (x + a)^c + b`` and their inverses.

A chain ``[T1, T2, ..., Tn]`` is stored outermost first, the way it is
written: ``T1(T2(...Tn(g)...))``.  The forward fold therefore starts from the
last element and the inverse fold from the first.
"""

from __future__ import annotations

import random
import re
from dataclasses import dataclass
from math import gcd
from typing import Iterable, Sequence

from .arith import totient
from .errors import NoInverseExponent, NotAPerfectPower
from .polyring import Polynomial, RingSpec
from .quotient import Relation, normal_form, pow_mod, randomize_representation


@dataclass(frozen=True)
class TOperator:
    a: int
    b: int
    c: int

    def __post_init__(self):
        if self.c <= 0 or self.c % 2 == 0:
            raise ValueError(f"exponent must be odd and positive, got c={self.c}")

    @property
    def linear(self) -> bool:
        return self.c == 1

    def __str__(self) -> str:
        return f"T[{self.a},{self.b};{self.c}]"

    @classmethod
    def parse(cls, text: str) -> "TOperator":
        mt = _OP_RE.fullmatch(text.strip())
        if mt is None:
            raise ValueError(f"not an operator: {text!r}")
        return cls(int(mt["a"]), int(mt["b"]), int(mt["c"]))


_OP_RE = re.compile(r"T\[\s*(?P<a>[-+]?\d+)\s*,\s*(?P<b>[-+]?\d+)\s*;\s*(?P<c>\d+)\s*\]")


@dataclass(frozen=True)
class OperatorChain:
    ops: tuple[TOperator, ...]

    def __init__(self, ops: Iterable[TOperator]):
        object.__setattr__(self, "ops", tuple(ops))

    def __len__(self) -> int:
        return len(self.ops)

    def __iter__(self):
        return iter(self.ops)

    def __str__(self) -> str:
        return ",".join(str(op) for op in self.ops)

    @property
    def degree(self) -> int:
        """Product of the exponents: the degree growth of one forward pass."""
        d = 1
        for op in self.ops:
            d *= op.c
        return d

    @classmethod
    def parse(cls, text: str) -> "OperatorChain":
        found = _OP_RE.findall(text)
        rebuilt = ",".join(f"T[{a},{b};{c}]" for a, b, c in found)
        if not found or rebuilt != re.sub(r"\s+", "", text):
            raise ValueError(f"not an operator chain: {text!r}")
        return cls(TOperator(int(a), int(b), int(c)) for a, b, c in found)

    def check_ring(self, spec: RingSpec) -> None:
        """Finite mode: every exponent must be invertible modulo phi(w)."""
        if spec.finite:
            for op in self.ops:
                inverse_exponent(op.c, spec.modulus)


# number theory

def integer_root(v: int, c: int) -> int | None:
    """Exact ``c``-th root of ``v`` for odd ``c``, or None.

    Binary search on the strictly increasing map ``r -> r**c``; negative
    inputs are handled through ``(-r)**c == -(r**c)``.
    """
    if c <= 0 or c % 2 == 0:
        raise ValueError(f"root index must be odd and positive, got {c}")
    if c == 1:
        return v
    neg = v < 0
    target = -v if neg else v
    lo, hi = 0, 1 << (target.bit_length() // c + 1)
    while lo < hi:
        mid = (lo + hi) // 2
        if mid**c < target:
            lo = mid + 1
        else:
            hi = mid
    if lo**c != target:
        return None
    return -lo if neg else lo


def inverse_exponent(c: int, w: int) -> int:
    """Least positive ``c'`` with ``c*c' = 1 (mod phi(w))``."""
    phi = totient(w)
    if gcd(c, phi) != 1:
        raise NoInverseExponent(f"gcd({c}, phi({w})={phi}) != 1")
    if phi == 1:
        return 1
    return pow(c, -1, phi)


# numeric application

def apply_numeric(op: TOperator, v: int, spec: RingSpec) -> int:
    w = spec.modulus
    if w is None:
        return (v + op.a) ** op.c + op.b
    return (pow(v + op.a, op.c, w) + op.b) % w


def invert_numeric(op: TOperator, v: int, spec: RingSpec) -> int:
    w = spec.modulus
    if w is None:
        root = integer_root(v - op.b, op.c)
        if root is None:
            raise NotAPerfectPower(f"{v} - {op.b} is not a perfect {op.c}-th power")
        return root - op.a
    d = inverse_exponent(op.c, w)
    return (pow(v - op.b, d, w) - op.a) % w


def chain_apply_numeric(chain: OperatorChain, s: int, spec: RingSpec) -> int:
    """Forward fold, innermost (last) operator first."""
    v = spec.reduce(s)
    for op in reversed(chain.ops):
        v = apply_numeric(op, v, spec)
    return v


def chain_invert_numeric(chain: OperatorChain, p: int, spec: RingSpec) -> int:
    """Undo the chain: peel the outermost operator first."""
    v = spec.reduce(p)
    for op in chain.ops:
        v = invert_numeric(op, v, spec)
    return v


# symbolic application

def apply_symbolic(op: TOperator, p: Polynomial) -> Polynomial:
    """``(p + a)**c + b`` in the free polynomial ring (no reduction)."""
    return (p + op.a) ** op.c + op.b


def expand_chain(chain: OperatorChain, g: Polynomial) -> Polynomial:
    """Full chain image of ``g`` before any quotient reduction."""
    h = g
    for op in reversed(chain.ops):
        h = apply_symbolic(op, h)
    return h


def chain_image(chain: OperatorChain, g: Polynomial, rel: Relation) -> Polynomial:
    """Normal form of the chain image, reducing after every product."""
    h = normal_form(g, rel)
    for op in reversed(chain.ops):
        h = normal_form(pow_mod(h + op.a, op.c, rel) + op.b, rel)
    return h


def chain_apply_symbolic(
    chain: OperatorChain,
    g: Polynomial,
    rel: Relation,
    budget: int = 0,
    rng: random.Random | None = None,
) -> Polynomial:
    """Public ``h``: reduced chain image, then re-randomised with ``budget`` terms."""
    if not chain.ops:
        raise ValueError("operator chain is empty")
    h = chain_image(chain, g, rel)
    if budget:
        if rng is None:
            raise ValueError("a random source is required when budget > 0")
        h = randomize_representation(h, rel, rng, budget)
    return h


def random_chain(
    n: int,
    rng: random.Random,
    *,
    c_choices: Sequence[int] = (1, 3, 5),
    ab_bound: int = 9,
) -> OperatorChain:
    return OperatorChain(
        TOperator(rng.randint(-ab_bound, ab_bound), rng.randint(-ab_bound, ab_bound), rng.choice(c_choices))
        for _ in range(n)
    )
