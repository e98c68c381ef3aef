"""Sparse multivariate polynomials over Z and Z_w.

A polynomial is a map from exponent tuples to nonzero integer coefficients.
Terms are kept in canonical sparse form (no zero coefficients; residues in
``[0, w)`` when a modulus is present) and iterate in descending graded
lexicographic order.  Ties in total degree are broken by comparing the
exponent of the highest-indexed variable first, so ``x2`` ranks above ``x1``.

Example:
    >>> spec = RingSpec(2)
    >>> p = poly_parse("x1*x2^2 + 4", spec)
    >>> poly_format(p ** 3)
    'x1^3*x2^6 + 12*x1^2*x2^4 + 48*x1*x2^2 + 64'
"""

from __future__ import annotations

import operator
import re
from dataclasses import dataclass
from types import MappingProxyType
from typing import Iterable, Iterator, Mapping, Sequence, Tuple, Union

from .errors import DimensionError, PolySyntaxError, RingMismatch, UnknownVariable

Monomial = Tuple[int, ...]


def grlex_key(mono: Monomial) -> tuple:
    """Sort key realising the monomial order (larger key = larger monomial)."""
    return (sum(mono), mono[::-1])


def divides(a: Monomial, b: Monomial) -> bool:
    return all(x <= y for x, y in zip(a, b))


@dataclass(frozen=True)
class RingSpec:
    """Ambient ring: ``Z[x1..xm]`` or, with a modulus, ``Z_w[x1..xm]``.

    Finite mode needs a squarefree modulus so that exponent inversion works
    on every residue; this is enforced here.
    """

    varcount: int
    modulus: int | None = None

    def __post_init__(self):
        if self.varcount < 1:
            raise DimensionError(f"variable count must be positive, got {self.varcount}")
        if self.modulus is not None:
            from .arith import is_squarefree

            if self.modulus < 2:
                raise ValueError(f"modulus must be >= 2, got {self.modulus}")
            if not is_squarefree(self.modulus):
                raise ValueError(f"modulus {self.modulus} is not squarefree")

    @property
    def finite(self) -> bool:
        return self.modulus is not None

    def reduce(self, c: int) -> int:
        return c % self.modulus if self.modulus is not None else c


Coefficient = int
PolyLike = Union["Polynomial", int]


class Polynomial:
    """Immutable sparse polynomial bound to a :class:`RingSpec`."""

    __slots__ = ("_terms", "spec", "_hash")

    def __init__(self, terms: Mapping[Monomial, int] | Iterable[tuple[Monomial, int]], spec: RingSpec):
        items = terms.items() if isinstance(terms, Mapping) else terms
        m = spec.varcount
        acc: dict[Monomial, int] = {}
        for mono, c in items:
            mono = tuple(int(e) for e in mono)
            if len(mono) != m:
                raise DimensionError(f"monomial {mono} has length {len(mono)}, expected {m}")
            if any(e < 0 for e in mono):
                raise ValueError(f"negative exponent in {mono}")
            acc[mono] = acc.get(mono, 0) + int(c)
        self._terms = _clean(acc, spec)
        self.spec = spec
        self._hash = None

    @classmethod
    def _trusted(cls, terms: dict[Monomial, int], spec: RingSpec) -> "Polynomial":
        # terms must already be canonical
        p = cls.__new__(cls)
        p._terms = terms
        p.spec = spec
        p._hash = None
        return p

    # constructors
    @classmethod
    def zero(cls, spec: RingSpec) -> "Polynomial":
        return cls._trusted({}, spec)

    @classmethod
    def constant(cls, c: int, spec: RingSpec) -> "Polynomial":
        return cls({(0,) * spec.varcount: c}, spec)

    @classmethod
    def variable(cls, index: int, spec: RingSpec) -> "Polynomial":
        """The variable ``x<index>`` (1-based)."""
        if not 1 <= index <= spec.varcount:
            raise DimensionError(f"variable x{index} outside x1..x{spec.varcount}")
        mono = tuple(1 if i == index - 1 else 0 for i in range(spec.varcount))
        return cls._trusted({mono: 1}, spec)

    @classmethod
    def monomial(cls, mono: Sequence[int], spec: RingSpec, coeff: int = 1) -> "Polynomial":
        return cls({tuple(mono): coeff}, spec)

    # inspection
    @property
    def terms(self) -> Mapping[Monomial, int]:
        return MappingProxyType(self._terms)

    @property
    def varcount(self) -> int:
        return self.spec.varcount

    def items(self) -> list[tuple[Monomial, int]]:
        """Terms in descending monomial order."""
        return sorted(self._terms.items(), key=lambda t: grlex_key(t[0]), reverse=True)

    def __iter__(self) -> Iterator[tuple[Monomial, int]]:
        return iter(self.items())

    def __len__(self) -> int:
        return len(self._terms)

    def __bool__(self) -> bool:
        return bool(self._terms)

    def is_zero(self) -> bool:
        return not self._terms

    def is_constant(self) -> bool:
        return all(sum(mono) == 0 for mono in self._terms)

    @property
    def degree(self) -> int:
        """Total degree; ``-1`` for the zero polynomial."""
        return max((sum(mono) for mono in self._terms), default=-1)

    def leading_monomial(self) -> Monomial:
        if not self._terms:
            raise ValueError("zero polynomial has no leading monomial")
        return max(self._terms, key=grlex_key)

    def coefficient(self, mono: Sequence[int]) -> int:
        return self._terms.get(tuple(mono), 0)

    def variables(self) -> set[int]:
        """1-based indices of the variables that occur."""
        return {i + 1 for mono in self._terms for i, e in enumerate(mono) if e}

    # arithmetic
    def _coerce(self, other: PolyLike) -> "Polynomial":
        if isinstance(other, Polynomial):
            _check_compatible(self, other)
            return other
        if isinstance(other, int):
            return Polynomial.constant(other, self.spec)
        return NotImplemented

    def __add__(self, other: PolyLike) -> "Polynomial":
        other = self._coerce(other)
        if other is NotImplemented:
            return other
        return poly_add(self, other)

    __radd__ = __add__

    def __neg__(self) -> "Polynomial":
        return Polynomial._trusted(_clean({k: -c for k, c in self._terms.items()}, self.spec), self.spec)

    def __sub__(self, other: PolyLike) -> "Polynomial":
        other = self._coerce(other)
        if other is NotImplemented:
            return other
        return poly_add(self, -other)

    def __rsub__(self, other: PolyLike) -> "Polynomial":
        return (-self) + other

    def __mul__(self, other: PolyLike) -> "Polynomial":
        other = self._coerce(other)
        if other is NotImplemented:
            return other
        return poly_mul(self, other)

    __rmul__ = __mul__

    def __pow__(self, e: int) -> "Polynomial":
        return poly_pow(self, e)

    def __call__(self, *point: int) -> int:
        if len(point) == 1 and isinstance(point[0], (list, tuple)):
            point = tuple(point[0])
        return poly_eval(self, point)

    def __eq__(self, other: object) -> bool:
        if isinstance(other, int):
            return self._terms == _clean({(0,) * self.varcount: other}, self.spec)
        if not isinstance(other, Polynomial):
            return NotImplemented
        return self.spec == other.spec and self._terms == other._terms

    def __hash__(self) -> int:
        if self._hash is None:
            self._hash = hash((self.spec, frozenset(self._terms.items())))
        return self._hash

    def __str__(self) -> str:
        return poly_format(self)

    def __repr__(self) -> str:
        mod = f" mod {self.spec.modulus}" if self.spec.finite else ""
        return f"Polynomial({poly_format(self)!r}, m={self.varcount}{mod})"


def _clean(terms: dict[Monomial, int], spec: RingSpec) -> dict[Monomial, int]:
    w = spec.modulus
    if w is None:
        return {k: c for k, c in terms.items() if c}
    out = {}
    for k, c in terms.items():
        c %= w
        if c:
            out[k] = c
    return out


def _check_compatible(a: Polynomial, b: Polynomial) -> None:
    if a.spec.varcount != b.spec.varcount:
        raise DimensionError(f"variable counts differ: {a.spec.varcount} vs {b.spec.varcount}")
    if a.spec.modulus != b.spec.modulus:
        raise RingMismatch(f"moduli differ: {a.spec.modulus} vs {b.spec.modulus}")


def poly_add(a: Polynomial, b: Polynomial) -> Polynomial:
    _check_compatible(a, b)
    out = dict(a._terms)
    for mono, c in b._terms.items():
        out[mono] = out.get(mono, 0) + c
    return Polynomial._trusted(_clean(out, a.spec), a.spec)


def poly_mul(a: Polynomial, b: Polynomial) -> Polynomial:
    _check_compatible(a, b)
    if len(a._terms) > len(b._terms):
        a, b = b, a
    add = operator.add
    out: dict[Monomial, int] = {}
    b_items = list(b._terms.items())
    for ma, ca in a._terms.items():
        for mb, cb in b_items:
            mono = tuple(map(add, ma, mb))
            out[mono] = out.get(mono, 0) + ca * cb
    return Polynomial._trusted(_clean(out, a.spec), a.spec)


def poly_pow(a: Polynomial, e: int) -> Polynomial:
    """``a`` multiplied by itself ``e`` times; ``a**0 == 1``."""
    if e < 0:
        raise ValueError("negative exponent")
    result = Polynomial.constant(1, a.spec)
    base = a
    while e:
        if e & 1:
            result = poly_mul(result, base)
        e >>= 1
        if e:
            base = poly_mul(base, base)
    return result


def poly_eval(a: Polynomial, point: Sequence[int]) -> int:
    """Exact value at an integer point (a residue in finite mode)."""
    if len(point) != a.varcount:
        raise DimensionError(f"point has {len(point)} coordinates, expected {a.varcount}")
    w = a.spec.modulus
    total = 0
    if w is None:
        for mono, c in a._terms.items():
            t = c
            for v, e in zip(point, mono):
                if e:
                    t *= v**e
            total += t
        return total
    point = [v % w for v in point]
    for mono, c in a._terms.items():
        t = c
        for v, e in zip(point, mono):
            if e:
                t = t * pow(v, e, w) % w
        total += t
    return total % w


# text form

_TOKEN = re.compile(r"\s*(?:(?P<num>\d+)|x(?P<var>\d+)|(?P<op>[-+*^])|(?P<bad>\S))")


def _tokenize(text: str) -> list[tuple[str, str, int]]:
    toks = []
    pos = 0
    n = len(text.rstrip())
    while pos < n:
        mt = _TOKEN.match(text, pos)
        kind = mt.lastgroup
        lexeme = mt.group(0).lstrip()
        start = mt.end() - len(lexeme)
        if kind == "bad":
            raise PolySyntaxError(f"unexpected character {lexeme!r}", text, start)
        toks.append((kind, mt.group(kind), start))
        pos = mt.end()
    toks.append(("end", "", len(text)))
    return toks


def poly_parse(text: str, spec: RingSpec) -> Polynomial:
    """Parse ``text`` in the ``x1..xm`` grammar (a leading ``-`` is accepted)."""
    toks = _tokenize(text)
    i = 0
    m = spec.varcount

    def peek():
        return toks[i]

    def expect(kind: str, value: str | None = None):
        nonlocal i
        k, v, p = toks[i]
        if k != kind or (value is not None and v != value):
            want = value or kind
            raise PolySyntaxError(f"expected {want}, found {v or 'end of input'!r}", text, p)
        i += 1
        return v, p

    def varpow(mono: list[int]):
        nonlocal i
        idx, p = expect("var")
        index = int(idx)
        if not 1 <= index <= m:
            raise UnknownVariable(f"unknown variable x{idx} (ring has x1..x{m})", text, p)
        exp = 1
        if peek()[:2] == ("op", "^"):
            i += 1
            exp = int(expect("num")[0])
        mono[index - 1] += exp

    def term(sign: int) -> tuple[Monomial, int]:
        nonlocal i
        mono = [0] * m
        k, v, p = peek()
        if k == "num":
            coeff = int(v)
            i += 1
        elif k == "var":
            coeff = 1
            varpow(mono)
        else:
            raise PolySyntaxError(f"expected term, found {v or 'end of input'!r}", text, p)
        while peek()[:2] == ("op", "*"):
            i += 1
            varpow(mono)
        return tuple(mono), sign * coeff

    terms = []
    sign = 1
    if peek()[:2] == ("op", "-"):
        sign = -1
        i += 1
    terms.append(term(sign))
    while True:
        k, v, p = peek()
        if k == "end":
            break
        if k == "op" and v in "+-":
            i += 1
            terms.append(term(1 if v == "+" else -1))
        else:
            raise PolySyntaxError(f"unexpected {v!r}", text, p)
    return Polynomial(terms, spec)


def _format_monomial(mono: Monomial) -> str:
    parts = []
    for i, e in enumerate(mono, start=1):
        if e == 1:
            parts.append(f"x{i}")
        elif e:
            parts.append(f"x{i}^{e}")
    return "*".join(parts)


def poly_format(p: Polynomial) -> str:
    """Canonical text: descending order, coefficient 1 elided on non-constants."""
    items = p.items()
    if not items:
        return "0"
    out = []
    for n, (mono, c) in enumerate(items):
        body = _format_monomial(mono)
        mag = abs(c)
        if not body:
            text = str(mag)
        elif mag == 1:
            text = body
        else:
            text = f"{mag}*{body}"
        if n == 0:
            out.append(f"-{text}" if c < 0 else text)
        else:
            out.append(f" - {text}" if c < 0 else f" + {text}")
    return "".join(out)
