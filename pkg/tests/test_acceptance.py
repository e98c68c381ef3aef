"""Exit criteria.  Each test prints one PASS/FAIL line (visible with ``-s``
or in the terminal summary)."""

import io
import random
import time
from math import gcd

import pytest

from diokex.arith import is_squarefree, totient
from diokex.cryptanalysis import SearchRegion, attack_experiment, brute_force_system, non_uniqueness_check, write_report
from diokex.errors import KeygenFailed
from diokex.polyring import Polynomial, RingSpec, poly_eval, poly_parse
from diokex.protocol import ExchangeParams, Policy, golden_exchange, recipient_keygen, run_exchange
from diokex.quotient import Relation, normal_form, random_monomial
from diokex.toperator import OperatorChain, TOperator, apply_numeric, expand_chain, integer_root, invert_numeric

pytestmark = pytest.mark.acceptance

TOY = RingSpec(2)
RESULTS: dict[int, str] = {}


@pytest.fixture
def report(request, capsys):
    def emit(n, ok, detail):
        line = f"[{'PASS' if ok else 'FAIL'}] criterion {n}: {detail}"
        RESULTS[n] = line
        with capsys.disabled():
            print("\n" + line)
        return ok

    return emit


def P(text, spec=TOY):
    return poly_parse(text, spec)


def test_1_golden_replay(report):
    start = time.perf_counter()
    ex = golden_exchange()
    elapsed = time.perf_counter() - start
    t = ex.transcript
    ok = (
        t.f.f == P("x1^3 - x2^2 + 1")
        and t.h == P("x2^8 - x2^6 + 12*x1^2*x2^4 + 48*x1*x2^2 + 66")
        and t.p == 10650
        and ex.recipient_secret == ex.sender_secret == 18
        and elapsed < 1.0
    )
    report(1, ok, f"golden replay h/p/s exact, p={t.p}, s={ex.recipient_secret}/{ex.sender_secret}, {elapsed:.3f}s < 1s")
    assert ok


def test_2_chain_expansion(report):
    chain = OperatorChain.parse("T[1,2;3],T[0,3;1]")
    expanded = expand_chain(chain, P("x1*x2^2"))
    ok = expanded == P("x1^3*x2^6 + 12*x1^2*x2^4 + 48*x1*x2^2 + 66")
    report(2, ok, f"unreduced chain image = {expanded}")
    assert ok


def test_3_integer_round_trip(report):
    rng = random.Random(2024)
    policy = Policy(min_chain_len=1)
    runs = agree = 0
    start = time.perf_counter()
    for i in range(510):
        params = ExchangeParams(
            m=(2, 3, 4)[i % 3],
            deg_f=rng.randint(2, 5),
            n=rng.randint(1, 4),
            c_choices=(1, 3, 5),
            ab_bound=9,
            max_chain_degree=27,
            budget=rng.randint(0, 2),
            policy=policy,
        )
        ex = run_exchange(params, rng)
        chain = ex.sender_key.chain
        assert ex.transcript.f.f.degree <= 5 and len(chain) <= 4
        assert all(op.c in (1, 3, 5) and abs(op.a) <= 9 and abs(op.b) <= 9 for op in chain)
        runs += 1
        agree += ex.agreed
    elapsed = time.perf_counter() - start
    ok = agree == runs and runs >= 500 and elapsed < 60
    report(3, ok, f"{agree}/{runs} integer-mode exchanges agree in {elapsed:.1f}s < 60s")
    assert ok


def test_4_finite_round_trip(report):
    rng = random.Random(4048)
    runs = agree = 0
    for i in range(510):
        params = ExchangeParams(m=(2, 3, 4)[i % 3], finite=True, w_range=(15, 10**6), deg_f=rng.randint(2, 5),
                                n=rng.randint(2, 4), budget=rng.randint(0, 2))
        ex = run_exchange(params, rng)
        w = ex.transcript.modulus
        phi = totient(w)
        assert 15 <= w <= 10**6 and is_squarefree(w)
        assert all(gcd(op.c, phi) == 1 for op in ex.sender_key.chain)
        runs += 1
        agree += ex.agreed
    ok = agree == runs >= 500
    report(4, ok, f"{agree}/{runs} finite-mode exchanges agree (squarefree w in [15, 1e6])")
    assert ok


def _random_poly(spec, rng, terms, degree):
    d = {}
    for _ in range(terms):
        mono = random_monomial(spec.varcount, degree, rng)
        d[mono] = rng.randint(-9, 9)
    return Polynomial(d, spec)


def _random_pivot_relation(spec, rng, k):
    m = spec.varcount
    deg = rng.randint(1, 4)
    pivot = [0] * m
    for _ in range(deg):
        pivot[rng.randrange(m)] += 1
    terms = {tuple(pivot): rng.choice((1, -1))}
    for _ in range(rng.randint(0, 4)):
        mono = random_monomial(m, deg - 1, rng)
        terms[mono] = terms.get(mono, 0) + rng.randint(-9, 9)
    r = Polynomial(terms, spec)
    return Relation(r - poly_eval(r, k))


def test_5_quotient_correctness(report):
    rng = random.Random(5)
    cases = good = 0
    for i in range(1000):
        spec = RingSpec(rng.randint(1, 4), None if i % 4 else 77)
        k = tuple(rng.randint(-5, 5) for _ in range(spec.varcount))
        rel = _random_pivot_relation(spec, rng, k)
        p = _random_poly(spec, rng, rng.randint(0, 6), 6)
        q = _random_poly(spec, rng, rng.randint(0, 4), 4)
        nf = normal_form(p, rel)
        ok = normal_form(p + q * rel.f, rel) == nf and poly_eval(nf, k) == poly_eval(p, k)
        cases += 1
        good += ok
    passed = good == cases >= 1000
    report(5, passed, f"{good}/{cases} shifted normal forms equal and agree at the planted root")
    assert passed


def test_6_inversion_exactness(report):
    rng = random.Random(6)
    cases = good = 0
    z = RingSpec(1)
    for _ in range(10_000):
        op = TOperator(rng.randint(-50, 50), rng.randint(-50, 50), rng.choice((1, 3, 5, 7, 9)))
        x = rng.randint(-(10**12), 10**12)
        y = apply_numeric(op, x, z)
        root = integer_root(y - op.b, op.c)
        ok = root is not None and root**op.c == y - op.b and invert_numeric(op, y, z) == x
        cases += 1
        good += ok
    for _ in range(10_000):
        w = rng.randint(15, 10**6)
        while not is_squarefree(w):
            w = rng.randint(15, 10**6)
        phi = totient(w)
        c = rng.choice([c for c in (1, 3, 5, 7, 9, 11, 13) if gcd(c, phi) == 1])
        op = TOperator(rng.randint(-50, 50), rng.randint(-50, 50), c)
        spec = RingSpec(1, w)
        x = rng.randrange(w)
        ok = invert_numeric(op, apply_numeric(op, x, spec), spec) == x
        cases += 1
        good += ok
    passed = good == cases
    report(6, passed, f"{good}/{cases} operator inversions exact, integer roots re-multiplied")
    assert passed


def test_7_attack_oracle(report):
    start = time.perf_counter()
    res = brute_force_system(P("x1^3 - x2^2 + 1"), P("x2^8 - x2^6 + 12*x1^2*x2^4 + 48*x1*x2^2 + 66"),
                             10650, P("x1*x2^2"), SearchRegion.box(20, 2))
    elapsed = time.perf_counter() - start
    ok = set(res.solutions) == {(2, 3), (2, -3)} and res.label() == "Determined(18)" and elapsed < 5
    report(7, ok, f"solutions {sorted(res.solutions)} verdict {res.label()} in {elapsed:.3f}s < 5s")
    assert ok


def test_8_keygen_gate(report):
    rng = random.Random(8)
    emitted = passed = 0
    for i in range(120):
        params = ExchangeParams(m=(2, 3, 4)[i % 3], deg_f=rng.randint(2, 5))
        key, rel = recipient_keygen(params, rng)
        count, ok = non_uniqueness_check(rel.f, params.gate_region(rel.spec))
        emitted += 1
        passed += ok
    for i in range(60):
        m, hi = ((2, 400), (3, 60))[i % 2]
        params = ExchangeParams(m=m, finite=True, w_range=(15, hi), deg_f=rng.randint(2, 5))
        key, rel = recipient_keygen(params, rng)
        count, ok = non_uniqueness_check(rel.f, params.gate_region(rel.spec))
        emitted += 1
        passed += ok
    rejected = False
    try:
        recipient_keygen(ExchangeParams(), rng, template=P("x1^2 + x2^2"), point=(0, 0))
    except KeygenFailed:
        rejected = True
    ok = passed == emitted and rejected
    report(8, ok, f"{passed}/{emitted} emitted relations pass the full non-uniqueness check; sum of squares rejected={rejected}")
    assert ok


def _transcripts_and_csv(seed):
    rng = random.Random(seed)
    texts = [run_exchange(ExchangeParams(m=m, finite=fin, budget=1), rng).transcript.to_text()
             for m in (2, 3) for fin in (False, True)]
    buf = io.StringIO()
    rows = attack_experiment([ExchangeParams(m=2), ExchangeParams(m=3, finite=True, w_range=(15, 40))],
                             random.Random(seed), 3, radius=8)
    write_report(rows, buf)
    return "".join(texts).encode(), buf.getvalue().encode()


def test_9_determinism(report):
    a = _transcripts_and_csv(99)
    b = _transcripts_and_csv(99)
    c = _transcripts_and_csv(100)
    ok = a == b and a != c
    report(9, ok, f"seeded transcripts ({len(a[0])} bytes) and CSV ({len(a[1])} bytes) byte-identical across runs")
    assert ok


def teardown_module(module):
    if RESULTS:
        print("\nacceptance summary:")
        for n in sorted(RESULTS):
            print("  " + RESULTS[n])
