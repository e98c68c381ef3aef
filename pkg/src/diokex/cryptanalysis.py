"""Exhaustive attacker for the published system ``f = 0, h = p``.

Everything here is plain enumeration over a bounded integer box or over the
full residue space ``Z_w^m``.  The scan substitutes one variable at a time so
the innermost loop evaluates a univariate polynomial; it is exact and
deterministic, and the outermost variable range can be split across worker
processes.
"""

from __future__ import annotations

import csv
import itertools
import random
import time
from concurrent.futures import ProcessPoolExecutor
from dataclasses import dataclass
from enum import Enum
from typing import IO, Iterable, Sequence

from .arith import crt, factorize
from .errors import BudgetExceeded, DimensionError
from .polyring import Polynomial, RingSpec, poly_eval

DEFAULT_RADIUS = 20
DEFAULT_CEILING = 10**8


@dataclass(frozen=True)
class SearchRegion:
    """Inclusive per-variable bounds, optionally interpreted modulo ``w``."""

    bounds: tuple[tuple[int, int], ...]
    modulus: int | None = None

    @classmethod
    def box(cls, radius: int, m: int) -> "SearchRegion":
        return cls(((-radius, radius),) * m)

    @classmethod
    def residues(cls, w: int, m: int) -> "SearchRegion":
        return cls(((0, w - 1),) * m, w)

    @classmethod
    def for_spec(cls, spec: RingSpec, radius: int = DEFAULT_RADIUS) -> "SearchRegion":
        if spec.finite:
            return cls.residues(spec.modulus, spec.varcount)
        return cls.box(radius, spec.varcount)

    @property
    def varcount(self) -> int:
        return len(self.bounds)

    @property
    def volume(self) -> int:
        v = 1
        for lo, hi in self.bounds:
            v *= max(hi - lo + 1, 0)
        return v

    def contains(self, point: Sequence[int]) -> bool:
        return all(lo <= v <= hi for v, (lo, hi) in zip(point, self.bounds))

    def describe(self) -> str:
        if self.modulus is not None:
            return f"w:{self.modulus}"
        if len(set(self.bounds)) == 1 and self.bounds[0][0] == -self.bounds[0][1]:
            return f"box:{self.bounds[0][1]}"
        return "box:" + "x".join(f"[{lo},{hi}]" for lo, hi in self.bounds)

    def split(self, parts: int) -> list["SearchRegion"]:
        """Partition along the first variable."""
        lo, hi = self.bounds[0]
        size = hi - lo + 1
        if size <= 0 or parts <= 1:
            return [self]
        step = -(-size // parts)
        return [
            SearchRegion(((a, min(a + step - 1, hi)),) + self.bounds[1:], self.modulus)
            for a in range(lo, hi + 1, step)
        ]


class Verdict(Enum):
    DETERMINED = "Determined"
    AMBIGUOUS = "Ambiguous"
    NO_SOLUTION = "NoSolutionInBox"


@dataclass(frozen=True)
class AttackResult:
    solutions: tuple[tuple[int, ...], ...]
    secret_candidates: frozenset[int]
    evals: int = 0

    @property
    def verdict(self) -> Verdict:
        if not self.secret_candidates:
            return Verdict.NO_SOLUTION
        if len(self.secret_candidates) == 1:
            return Verdict.DETERMINED
        return Verdict.AMBIGUOUS

    @property
    def secret(self) -> int | None:
        if self.verdict is Verdict.DETERMINED:
            return next(iter(self.secret_candidates))
        return None

    def label(self) -> str:
        v = self.verdict
        if v is Verdict.DETERMINED:
            return f"Determined({self.secret})"
        if v is Verdict.AMBIGUOUS:
            return "Ambiguous({" + ", ".join(map(str, sorted(self.secret_candidates))) + "})"
        return v.value


# scanning

def _univariate(terms: dict[tuple, int]) -> list[int]:
    deg = max(mono[0] for mono in terms)
    coeffs = [0] * (deg + 1)
    for mono, c in terms.items():
        coeffs[mono[0]] += c
    return coeffs


def _substitute_first(terms: dict[tuple, int], v: int, w: int | None) -> dict[tuple, int]:
    out: dict[tuple, int] = {}
    for mono, c in terms.items():
        rest = mono[1:]
        val = c * v ** mono[0] if w is None else c * pow(v, mono[0], w)
        out[rest] = out.get(rest, 0) + val
    if w is not None:
        return {k: c % w for k, c in out.items() if c % w}
    return {k: c for k, c in out.items() if c}


def _scan(terms: dict[tuple, int], bounds, w, prefix, out, stop_at, counter) -> bool:
    """Append roots to ``out``; return True once ``stop_at`` roots are found."""
    lo, hi = bounds[0]
    if len(bounds) == 1:
        if not terms:
            # identically zero on this fibre
            for v in range(lo, hi + 1):
                counter[0] += 1
                out.append(prefix + (v,))
                if stop_at is not None and len(out) >= stop_at:
                    return True
            return False
        coeffs = _univariate(terms)[::-1]
        for v in range(lo, hi + 1):
            counter[0] += 1
            acc = 0
            for c in coeffs:
                acc = acc * v + c
            if (acc if w is None else acc % w) == 0:
                out.append(prefix + (v,))
                if stop_at is not None and len(out) >= stop_at:
                    return True
        return False
    for v in range(lo, hi + 1):
        sub = _substitute_first(terms, v, w)
        if not sub:
            # f vanishes for every completion of this prefix
            if _scan({}, bounds[1:], w, prefix + (v,), out, stop_at, counter):
                return True
            continue
        if all(sum(mono) == 0 for mono in sub):
            counter[0] += _volume(bounds[1:])
            continue
        if _scan(sub, bounds[1:], w, prefix + (v,), out, stop_at, counter):
            return True
    return False


def _volume(bounds) -> int:
    v = 1
    for lo, hi in bounds:
        v *= max(hi - lo + 1, 0)
    return v


def _roots_worker(args):
    terms, bounds, w, stop_at = args
    out: list[tuple[int, ...]] = []
    counter = [0]
    if _volume(bounds):
        _scan(terms, bounds, w, (), out, stop_at, counter)
    return out, counter[0]


def find_roots(
    f: Polynomial,
    region: SearchRegion,
    *,
    ceiling: int = DEFAULT_CEILING,
    stop_at: int | None = None,
    workers: int = 1,
) -> tuple[list[tuple[int, ...]], int]:
    """All points of ``region`` where ``f`` vanishes (mod ``w`` for residue regions).

    Returns the sorted roots and the number of point evaluations performed.
    """
    if region.varcount != f.varcount:
        raise DimensionError(f"region has {region.varcount} variables, polynomial has {f.varcount}")
    if region.volume > ceiling:
        raise BudgetExceeded(region.volume, ceiling)
    w = region.modulus if region.modulus is not None else f.spec.modulus
    terms = dict(f.terms)
    parts = region.split(workers) if workers > 1 and stop_at is None else [region]
    jobs = [(terms, p.bounds, w, stop_at) for p in parts]
    if len(jobs) > 1:
        with ProcessPoolExecutor(max_workers=workers) as pool:
            results = list(pool.map(_roots_worker, jobs))
    else:
        results = [_roots_worker(jobs[0])]
    roots = sorted(itertools.chain.from_iterable(r for r, _ in results))
    evals = sum(n for _, n in results)
    return roots, evals


def brute_force_system(
    f: Polynomial,
    h: Polynomial,
    p: int,
    g: Polynomial,
    region: SearchRegion,
    *,
    ceiling: int = DEFAULT_CEILING,
    workers: int = 1,
) -> AttackResult:
    """Solve ``f = 0, h = p`` over ``region`` and collect the values of ``g``."""
    roots, evals = find_roots(f, region, ceiling=ceiling, workers=workers)
    w = f.spec.modulus
    target = p % w if w is not None else p
    solutions = []
    for pt in roots:
        evals += 1
        if poly_eval(h, pt) == target:
            solutions.append(pt)
    secrets = frozenset(poly_eval(g, pt) for pt in solutions)
    return AttackResult(tuple(solutions), secrets, evals)


def count_roots_mod(f: Polynomial, w: int, *, ceiling: int = DEFAULT_CEILING) -> int:
    """Exact number of roots of ``f`` in ``Z_w^m`` for squarefree ``w``.

    Counts per prime factor and multiplies (Chinese remaindering), which costs
    ``sum(p**m)`` instead of ``w**m`` evaluations.
    """
    m = f.varcount
    primes = sorted(factorize(w))
    cost = sum(q**m for q in primes)
    if cost > ceiling:
        raise BudgetExceeded(cost, ceiling)
    total = 1
    for q in primes:
        fq = Polynomial(f.terms, RingSpec(m, q))
        roots, _ = find_roots(fq, SearchRegion.residues(q, m), ceiling=ceiling)
        total *= len(roots)
        if not total:
            break
    return total


def non_uniqueness_check(
    f: Polynomial,
    region: SearchRegion,
    *,
    ceiling: int = DEFAULT_CEILING,
    stop_at: int | None = None,
) -> tuple[int, bool]:
    """Count roots of ``f`` in ``region``; pass iff there are at least two.

    With ``stop_at`` the scan ends early and ``count`` is a lower bound.
    """
    w = region.modulus
    full_residues = w is not None and region == SearchRegion.residues(w, f.varcount)
    if full_residues and stop_at is None and len(factorize(w)) > 1:
        count = count_roots_mod(f, w, ceiling=ceiling)
    else:
        roots, _ = find_roots(f, region, ceiling=ceiling, stop_at=stop_at)
        count = len(roots)
    return count, count >= 2


def find_second_root(
    f: Polynomial,
    point: Sequence[int],
    region: SearchRegion,
    *,
    line_limit: int = 5000,
) -> tuple[int, ...] | None:
    """Cheap search for a root of ``f`` other than ``point`` inside ``region``.

    Tries coordinate sign flips, then every axis-parallel line through
    ``point``.  For residue regions the lines are scanned modulo each prime
    factor ``q <= line_limit`` of ``w`` and lifted back with CRT.  A returned
    point is always a verified root; None proves nothing.
    """
    point = tuple(point)
    m = len(point)
    w = region.modulus
    if w is not None:
        point = tuple(v % w for v in point)

    def is_new_root(pt):
        return pt != point and region.contains(pt) and poly_eval(f, pt) == 0

    for i in range(m):
        cand = point[:i] + ((-point[i]) % w if w is not None else -point[i],) + point[i + 1 :]
        if is_new_root(cand):
            return cand
    if w is None:
        for i, (lo, hi) in enumerate(region.bounds):
            if hi - lo + 1 > line_limit:
                continue
            for v in range(lo, hi + 1):
                cand = point[:i] + (v,) + point[i + 1 :]
                if is_new_root(cand):
                    return cand
        return None
    primes = sorted(factorize(w))
    for q in primes:
        if q > line_limit:
            continue
        fq = Polynomial(f.terms, RingSpec(m, q))
        base = tuple(v % q for v in point)
        for i in range(m):
            for v in range(q):
                if v == base[i]:
                    continue
                cand_q = base[:i] + (v,) + base[i + 1 :]
                if poly_eval(fq, cand_q) == 0:
                    # keep the original point modulo every other prime
                    others = [r for r in primes if r != q]
                    lifted = tuple(
                        crt([cand_q[j]] + [point[j] % r for r in others], [q] + others) for j in range(m)
                    )
                    if is_new_root(lifted):
                        return lifted
    return None


# experiments

REPORT_COLUMNS = (
    "trial_id",
    "mode",
    "m",
    "degree_f",
    "chain_len",
    "box_or_w",
    "n_solutions",
    "verdict",
    "true_s",
    "attack_s_or_set",
    "evals",
    "wall_ms",
)


def attack_transcript(transcript, region: SearchRegion, *, ceiling: int = DEFAULT_CEILING, workers: int = 1) -> AttackResult:
    """Run :func:`brute_force_system` on exactly what an eavesdropper sees."""
    return brute_force_system(
        transcript.f.f, transcript.h, transcript.p, transcript.g, region, ceiling=ceiling, workers=workers
    )


def _row(trial_id, exchange, region, result, error, elapsed_ms, timing) -> dict:
    t = exchange.transcript
    spec = t.f.spec
    row = {
        "trial_id": trial_id,
        "mode": "finite" if spec.finite else "integer",
        "m": spec.varcount,
        "degree_f": t.f.f.degree,
        "chain_len": len(exchange.sender_key.chain),
        "box_or_w": region.describe(),
        "n_solutions": "",
        "verdict": "",
        "true_s": exchange.recipient_secret,
        "attack_s_or_set": "",
        "evals": "",
        "wall_ms": f"{elapsed_ms:.1f}" if timing else "",
    }
    if error is not None:
        row["verdict"] = type(error).__name__
        return row
    row["n_solutions"] = len(result.solutions)
    row["verdict"] = result.label()
    row["attack_s_or_set"] = ";".join(map(str, sorted(result.secret_candidates)))
    row["evals"] = result.evals
    return row


def attack_experiment(
    sweep: Iterable,
    rng: random.Random,
    trials: int,
    *,
    radius: int = DEFAULT_RADIUS,
    ceiling: int = DEFAULT_CEILING,
    workers: int = 1,
    timing: bool = False,
    golden: bool = False,
) -> list[dict]:
    """Run exchanges and attack each transcript; one report row per trial.

    ``wall_ms`` is only filled when ``timing`` is set so that seeded runs stay
    byte-identical.  Budget overruns are recorded in the row, not raised.
    """
    from .protocol import golden_exchange, run_exchange

    rows = []
    trial_id = 0
    for params in sweep:
        for _ in range(trials):
            exchange = golden_exchange() if golden else run_exchange(params, rng)
            spec = exchange.transcript.f.spec
            region = SearchRegion.for_spec(spec, radius)
            start = time.perf_counter()
            result, error = None, None
            try:
                result = attack_transcript(exchange.transcript, region, ceiling=ceiling, workers=workers)
            except BudgetExceeded as exc:
                error = exc
            elapsed = (time.perf_counter() - start) * 1000
            rows.append(_row(trial_id, exchange, region, result, error, elapsed, timing))
            trial_id += 1
    return rows


def write_report(rows: Iterable[dict], stream: IO[str]) -> None:
    writer = csv.DictWriter(stream, fieldnames=REPORT_COLUMNS, lineterminator="\n")
    writer.writeheader()
    for row in rows:
        writer.writerow(row)

