"""Arithmetic in ``R[x1..xm] / (f)`` for a single relation ``f``.

Reduction rewrites any monomial divisible by the pivot (the monic leading
monomial of ``f``) using ``pivot = -sign * (f - sign * pivot)``.  Every rewrite
replaces a monomial by strictly smaller ones, and because ``{f}`` alone
generates the ideal the fully reduced form is unique per residue class.
"""

from __future__ import annotations

import heapq
import operator
import random
from dataclasses import dataclass, field

from .errors import RelationRejected
from .polyring import Monomial, Polynomial, RingSpec, _check_compatible, grlex_key, poly_parse


@dataclass(frozen=True)
class Relation:
    """A pivot-ready relation ``f = 0``."""

    f: Polynomial
    pivot: Monomial = field(init=False)
    pivot_sign: int = field(init=False)
    _rewrite: tuple = field(init=False, repr=False, compare=False)

    def __post_init__(self):
        f = self.f
        if f.is_constant():
            raise RelationRejected(f"relation must not be constant: {f}")
        pivot = f.leading_monomial()
        c = f.coefficient(pivot)
        w = f.spec.modulus
        if c == 1:
            sign = 1
        elif c == -1 or (w is not None and c == w - 1):
            sign = -1
        else:
            raise RelationRejected(f"leading coefficient of {f} is {c}, not +1 or -1")
        # pivot ≡ -sign * (rest of f)
        rewrite = tuple((mono, -sign * coef) for mono, coef in f.terms.items() if mono != pivot)
        object.__setattr__(self, "pivot", pivot)
        object.__setattr__(self, "pivot_sign", sign)
        object.__setattr__(self, "_rewrite", rewrite)

    @property
    def spec(self) -> RingSpec:
        return self.f.spec

    @classmethod
    def parse(cls, text: str, spec: RingSpec) -> "Relation":
        return cls(poly_parse(text, spec))

    def __str__(self) -> str:
        return str(self.f)


def _heap_key(mono: Monomial) -> tuple:
    deg, rev = grlex_key(mono)
    return (-deg, tuple(-e for e in rev))


def normal_form(p: Polynomial, rel: Relation) -> Polynomial:
    """Unique representative of ``p`` modulo ``rel.f`` with no pivot-divisible monomial."""
    _check_compatible(p, rel.f)
    pivot = rel.pivot
    rewrite = rel._rewrite
    w = p.spec.modulus
    sub = operator.sub
    add = operator.add

    work = dict(p.terms)
    heap = [(_heap_key(mono), mono) for mono in work]
    heapq.heapify(heap)
    done: dict[Monomial, int] = {}
    # Largest monomial first: rewrites only create smaller monomials, so a
    # popped monomial never reappears.
    while heap:
        _, mono = heapq.heappop(heap)
        c = work.pop(mono, 0)
        if w is not None:
            c %= w
        if not c:
            continue
        if all(e >= d for e, d in zip(mono, pivot)):
            rest = tuple(map(sub, mono, pivot))
            for tmono, tcoef in rewrite:
                nm = tuple(map(add, tmono, rest))
                if nm in work:
                    work[nm] += c * tcoef
                else:
                    work[nm] = c * tcoef
                    heapq.heappush(heap, (_heap_key(nm), nm))
        else:
            done[mono] = c
    return Polynomial._trusted(done, p.spec)


def is_reduced(p: Polynomial, rel: Relation) -> bool:
    pivot = rel.pivot
    return not any(all(e >= d for e, d in zip(mono, pivot)) for mono in p.terms)


def mul_mod(a: Polynomial, b: Polynomial, rel: Relation) -> Polynomial:
    return normal_form(a * b, rel)


def pow_mod(a: Polynomial, e: int, rel: Relation) -> Polynomial:
    """``normal_form(a**e)`` computed by reducing after every product."""
    if e < 0:
        raise ValueError("negative exponent")
    result = Polynomial.constant(1, a.spec)
    base = normal_form(a, rel)
    for _ in range(e):
        result = mul_mod(result, base, rel)
    return result


def ideal_equivalent(a: Polynomial, b: Polynomial, rel: Relation) -> bool:
    return normal_form(a - b, rel).is_zero()


def random_monomial(m: int, max_degree: int, rng: random.Random) -> Monomial:
    exps = [0] * m
    for _ in range(rng.randint(0, max(max_degree, 0))):
        exps[rng.randrange(m)] += 1
    return tuple(exps)


def draw_multiplier(rel: Relation, rng: random.Random, budget: int, max_degree: int) -> Polynomial:
    """Random ``q`` with at most ``budget`` terms, coefficients in [-9, 9]."""
    spec = rel.spec
    terms = {}
    for _ in range(budget):
        mono = random_monomial(spec.varcount, max_degree, rng)
        terms[mono] = terms.get(mono, 0) + rng.choice([c for c in range(-9, 10) if c])
    return Polynomial(terms, spec)


def shift_by_multiple(p: Polynomial, q: Polynomial, rel: Relation) -> Polynomial:
    """``p + q*f``: another representative of the same residue class."""
    return p + q * rel.f


def randomize_representation(p: Polynomial, rel: Relation, rng: random.Random, budget: int) -> Polynomial:
    """Return ``p + q*f`` for a random ``q`` of at most ``budget`` terms.

    Monomials of ``q`` have total degree at most ``deg(p)``.  A budget of 0
    returns ``p`` untouched.
    """
    if budget < 0:
        raise ValueError("budget must be non-negative")
    if budget == 0:
        return p
    q = draw_multiplier(rel, rng, budget, max(p.degree, 0))
    return shift_by_multiple(p, q, rel)
