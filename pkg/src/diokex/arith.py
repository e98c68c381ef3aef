"""Small integer helpers: factorisation, totient, CRT."""

from __future__ import annotations

from functools import reduce
from math import gcd


def factorize(n: int) -> dict[int, int]:
    """Prime factorisation by trial division; fine for the moduli used here."""
    if n < 1:
        raise ValueError("factorize expects a positive integer")
    out: dict[int, int] = {}
    d = 2
    while d * d <= n:
        while n % d == 0:
            out[d] = out.get(d, 0) + 1
            n //= d
        d += 1 if d == 2 else 2
    if n > 1:
        out[n] = out.get(n, 0) + 1
    return out


def is_squarefree(n: int) -> bool:
    return n >= 1 and all(e == 1 for e in factorize(n).values())


def totient(n: int) -> int:
    result = n
    for p in factorize(n):
        result -= result // p
    return result


def crt(residues: list[int], moduli: list[int]) -> int:
    """Combine residues modulo pairwise coprime moduli."""
    x, mod = 0, 1
    for r, m in zip(residues, moduli):
        if gcd(mod, m) != 1:
            raise ValueError("moduli are not pairwise coprime")
        # x + mod*t = r (mod m)
        t = (r - x) * pow(mod, -1, m) % m
        x += mod * t
        mod *= m
    return x % mod


def lcm(*nums: int) -> int:
    return reduce(lambda a, b: a * b // gcd(a, b), nums, 1)
