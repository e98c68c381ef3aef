"""Key generation, the three-message exchange, and secret derivation.

Message flow::

    recipient                         sender
    keygen -> F(f)      ------------>
                        <------------  GH(g, h)   h = chain image of g mod f
    P(p = h(k))         ------------>
    s = g(k)                           s = chain^-1(p)

Both roles are available as plain functions and as small state machines
(:class:`Recipient`, :class:`Sender`) that speak the line protocol from
:mod:`diokex.messages`.
"""

from __future__ import annotations

import enum
import random
from dataclasses import dataclass, field
from math import gcd
from typing import Sequence

from . import messages
from .arith import is_squarefree, totient
from .cryptanalysis import SearchRegion, count_roots_mod, find_roots, find_second_root
from .errors import (
    BudgetExceeded,
    DimensionError,
    KeygenFailed,
    NotAPerfectPower,
    PolicyViolation,
    ProtocolStateError,
    RelationRejected,
    TranscriptCorrupted,
)
from .polyring import Monomial, Polynomial, RingSpec, poly_eval
from .quotient import Relation, normal_form, random_monomial, randomize_representation
from .toperator import OperatorChain, chain_image, chain_invert_numeric, random_chain


@dataclass(frozen=True)
class Policy:
    """Safety floors applied to generated and received key material."""

    min_vars: int = 2
    min_chain_len: int = 2
    require_nonlinear: bool = True
    min_relation_degree: int = 2
    require_degree_growth: bool = True

    def check_relation(self, rel: Relation) -> None:
        if rel.spec.varcount < self.min_vars:
            raise RelationRejected(f"relation has {rel.spec.varcount} variables, need {self.min_vars}")
        if rel.f.degree < self.min_relation_degree:
            raise RelationRejected(f"relation degree {rel.f.degree} below {self.min_relation_degree}")

    def check_chain(self, chain: OperatorChain) -> None:
        if len(chain) < max(self.min_chain_len, 1):
            raise PolicyViolation(f"chain length {len(chain)} below {max(self.min_chain_len, 1)}")
        if self.require_nonlinear and all(op.linear for op in chain):
            raise PolicyViolation("every operator has c = 1; the chain is affine")


PERMISSIVE = Policy(min_vars=1, min_chain_len=1, require_nonlinear=False, min_relation_degree=1,
                    require_degree_growth=False)


@dataclass(frozen=True)
class ExchangeParams:
    """Generator knobs for one exchange.  Defaults are desk-scale, not secure."""

    m: int = 2
    modulus: int | None = None
    finite: bool = False
    w_range: tuple[int, int] = (15, 10**6)
    deg_f: int = 3
    coef_bound: int = 9
    point_bound: int = 5
    deg_g: int = 3
    g_terms: int = 2
    n: int = 2
    c_choices: tuple[int, ...] = (1, 3, 5)
    ab_bound: int = 9
    max_chain_degree: int = 15
    budget: int = 0
    check_radius: int | None = None
    check_ceiling: int = 200_000
    retries: int = 200
    policy: Policy = field(default_factory=Policy)

    def __post_init__(self):
        if self.m < 1 or self.deg_f < 1 or self.coef_bound < 1 or self.n < 1 or self.deg_g < 1:
            raise ValueError("m, deg_f, coef_bound, n and deg_g must be positive")
        if self.point_bound < 0 or self.budget < 0:
            raise ValueError("point_bound and budget must be non-negative")
        if self.modulus is not None and not is_squarefree(self.modulus):
            raise ValueError(f"modulus {self.modulus} is not squarefree")

    @property
    def is_finite(self) -> bool:
        return self.finite or self.modulus is not None

    def gate_region(self, spec: RingSpec) -> SearchRegion:
        """Region in which keygen certifies non-uniqueness."""
        if spec.finite:
            return SearchRegion.residues(spec.modulus, spec.varcount)
        return SearchRegion.box(self.gate_radius(), spec.varcount)

    def gate_radius(self) -> int:
        if self.check_radius is not None:
            return self.check_radius
        r = 10
        while r > self.point_bound and (2 * r + 1) ** self.m > self.check_ceiling:
            r -= 1
        return max(r, self.point_bound)


# key material

@dataclass(frozen=True)
class RecipientPrivateKey:
    point: tuple[int, ...]
    spec: RingSpec


@dataclass(frozen=True)
class SenderPrivateKey:
    chain: OperatorChain
    g: Polynomial
    spec: RingSpec


@dataclass(frozen=True)
class SharedSecret:
    s: int

    def __int__(self) -> int:
        return self.s


@dataclass(frozen=True)
class Transcript:
    """Everything that crosses the wire, and nothing else."""

    f: Relation
    g: Polynomial
    h: Polynomial
    p: int

    @property
    def modulus(self) -> int | None:
        return self.f.spec.modulus

    @property
    def mode(self) -> str:
        return "finite" if self.f.spec.finite else "integer"

    def lines(self) -> list[str]:
        return [messages.encode_f(self.f), messages.encode_gh(self.g, self.h), messages.encode_p(self.p)]

    def to_text(self) -> str:
        return "".join(line + "\n" for line in self.lines())


@dataclass(frozen=True)
class Exchange:
    transcript: Transcript
    recipient_secret: int
    sender_secret: int
    recipient_key: RecipientPrivateKey
    sender_key: SenderPrivateKey

    @property
    def agreed(self) -> bool:
        return self.recipient_secret == self.sender_secret


# generators

def draw_squarefree(rng: random.Random, lo: int, hi: int) -> int:
    while True:
        w = rng.randint(lo, hi)
        if is_squarefree(w):
            return w


def _monomial_of_degree(m: int, d: int, rng: random.Random, even_var: int | None) -> Monomial:
    exps = [0] * m
    if even_var is not None:
        # even part on the mirrored variable, remainder elsewhere
        k = rng.randint(0, d // 2) if m > 1 else d // 2
        exps[even_var] = 2 * k
        left = d - 2 * k
        others = [i for i in range(m) if i != even_var]
        if left and not others:
            return None
        for _ in range(left):
            exps[rng.choice(others)] += 1
        return tuple(exps)
    for _ in range(d):
        exps[rng.randrange(m)] += 1
    return tuple(exps)


def random_template(spec: RingSpec, degree: int, coef_bound: int, rng: random.Random,
                    mirror: int | None = None) -> Polynomial:
    """Random polynomial whose leading monomial is monic and strictly largest.

    The pivot has total degree ``degree``; every other term is of lower degree,
    so the pivot dominates in the graded order.  With ``mirror = i`` every
    exponent of ``x(i+1)`` is even, which makes ``f`` invariant under the sign
    flip of that variable.  Every variable is made to occur.
    """
    m = spec.varcount
    pivot = _monomial_of_degree(m, degree, rng, mirror)
    if pivot is None:
        pivot = _monomial_of_degree(m, degree, rng, None)
        mirror = None
    terms: dict[Monomial, int] = {pivot: rng.choice((1, -1))}
    coeffs = [c for c in range(-coef_bound, coef_bound + 1) if c]

    def add_term(mono):
        if mono != pivot and sum(mono) < degree:
            terms[mono] = terms.get(mono, 0) + rng.choice(coeffs)

    for _ in range(rng.randint(1, m + 1)):
        mono = list(random_monomial(m, degree - 1, rng))
        if mirror is not None:
            mono[mirror] -= mono[mirror] % 2
        add_term(tuple(mono))
    present = {i for mono in terms for i, e in enumerate(mono) if e}
    for i in range(m):
        if i in present:
            continue
        e = 2 if i == mirror else 1
        if e >= degree:
            e = 1
            mirror = None
        add_term(tuple(e if j == i else 0 for j in range(m)))
    return Polynomial(terms, spec)


def certify_non_unique(f: Polynomial, point: Sequence[int], region: SearchRegion, ceiling: int) -> bool:
    """True once ``f`` is shown to have at least two roots in ``region``."""
    if find_second_root(f, point, region) is not None:
        return True
    try:
        if region.modulus is not None:
            return count_roots_mod(f, region.modulus, ceiling=ceiling) >= 2
        roots, _ = find_roots(f, region, ceiling=ceiling, stop_at=2)
        return len(roots) >= 2
    except BudgetExceeded:
        return False


def _ring_for(params: ExchangeParams, rng: random.Random) -> RingSpec:
    if not params.is_finite:
        return RingSpec(params.m)
    w = params.modulus if params.modulus is not None else draw_squarefree(rng, *params.w_range)
    return RingSpec(params.m, w)


def recipient_keygen(
    params: ExchangeParams,
    rng: random.Random,
    *,
    spec: RingSpec | None = None,
    template: Polynomial | None = None,
    point: Sequence[int] | None = None,
) -> tuple[RecipientPrivateKey, Relation]:
    """Plant a secret point ``k`` and publish ``f = r - r(k)``.

    ``template`` and ``point`` pin ``r`` and ``k``; otherwise both are drawn.
    Raises KeygenFailed when no candidate passes the relation floors and the
    non-uniqueness gate within ``params.retries`` attempts.
    """
    if params.m < params.policy.min_vars:
        raise KeygenFailed(f"m = {params.m} below the policy floor {params.policy.min_vars}")
    if spec is None:
        spec = template.spec if template is not None else _ring_for(params, rng)
    m = spec.varcount
    w = spec.modulus
    region = params.gate_region(spec)
    fixed = template is not None and point is not None
    last_reason = "no attempt made"
    for _ in range(1 if fixed else params.retries):
        if point is not None:
            k = tuple(spec.reduce(v) for v in point)
        elif w is None:
            k = tuple(rng.randint(-params.point_bound, params.point_bound) for _ in range(m))
        else:
            k = tuple(rng.randrange(w) for _ in range(m))
        if len(k) != m:
            raise DimensionError(f"point has {len(k)} coordinates, expected {m}")
        if template is not None:
            r = template
        else:
            mirror = rng.randrange(m) if rng.random() < 0.5 else None
            r = random_template(spec, rng.randint(2, max(params.deg_f, 2)), params.coef_bound, rng, mirror)
        f = r - poly_eval(r, k)
        try:
            rel = Relation(f)
            params.policy.check_relation(rel)
        except RelationRejected as exc:
            last_reason = str(exc)
            continue
        if len(f.variables()) != m:
            last_reason = "relation does not mention every variable"
            continue
        if not certify_non_unique(f, k, region, params.check_ceiling):
            last_reason = f"could not certify a second root of {f} in {region.describe()}"
            continue
        return RecipientPrivateKey(k, spec), rel
    raise KeygenFailed(last_reason)


def usable_exponents(choices: Sequence[int], spec: RingSpec) -> tuple[int, ...]:
    """Odd exponents from ``choices`` that are invertible for this ring.

    In finite mode, if no nonlinear choice survives, the smallest odd ``c >= 3``
    coprime to phi(w) is added.
    """
    odd = [c for c in choices if c > 0 and c % 2]
    if not spec.finite:
        return tuple(odd)
    phi = totient(spec.modulus)
    ok = [c for c in odd if gcd(c, phi) == 1]
    if not any(c > 1 for c in ok):
        c = 3
        while gcd(c, phi) != 1:
            c += 2
        ok.append(c)
    return tuple(ok)


def random_element(spec: RingSpec, degree: int, nterms: int, coef_bound: int, rng: random.Random) -> Polynomial:
    """Non-constant polynomial with up to ``nterms`` terms."""
    coeffs = [c for c in range(-coef_bound, coef_bound + 1) if c]
    while True:
        terms = {}
        for _ in range(rng.randint(1, nterms)):
            d = rng.randint(1, degree)
            mono = [0] * spec.varcount
            for _ in range(d):
                mono[rng.randrange(spec.varcount)] += 1
            terms[tuple(mono)] = rng.choice(coeffs)
        g = Polynomial(terms, spec)
        if not g.is_constant():
            return g


def _draw_chain(params: ExchangeParams, spec: RingSpec, rng: random.Random) -> OperatorChain:
    exps = usable_exponents(params.c_choices, spec)
    for _ in range(1000):
        chain = random_chain(params.n, rng, c_choices=exps, ab_bound=params.ab_bound)
        if chain.degree > params.max_chain_degree:
            continue
        if params.policy.require_nonlinear and all(op.linear for op in chain):
            continue
        return chain
    raise PolicyViolation("no chain satisfies the degree cap and the nonlinearity floor")


def sender_respond(
    rel: Relation | Polynomial,
    rng: random.Random,
    params: ExchangeParams,
    *,
    g: Polynomial | None = None,
    chain: OperatorChain | None = None,
) -> tuple[SenderPrivateKey, tuple[Polynomial, Polynomial]]:
    """Pick ``g`` and a secret chain, publish ``(g, h)``.

    ``g`` and ``chain`` may be pinned; anything not pinned is drawn and
    redrawn until the chain image of ``g`` grows in degree.
    """
    if not isinstance(rel, Relation):
        rel = Relation(rel)
    params.policy.check_relation(rel)
    spec = rel.spec
    if chain is not None:
        params.policy.check_chain(chain)
        chain.check_ring(spec)
    elif params.n < params.policy.min_chain_len:
        raise PolicyViolation(f"chain length {params.n} below {params.policy.min_chain_len}")
    if g is not None and g.spec != spec:
        raise DimensionError("g does not live in the ring of the relation")
    attempts = 1 if (g is not None and chain is not None) else params.retries
    for _ in range(attempts):
        gg = g if g is not None else random_element(spec, params.deg_g, params.g_terms, params.coef_bound, rng)
        ch = chain if chain is not None else _draw_chain(params, spec, rng)
        g_nf = normal_form(gg, rel)
        if g_nf.is_constant():
            continue
        image = chain_image(ch, gg, rel)
        if params.policy.require_degree_growth and image.degree <= g_nf.degree:
            continue
        h = randomize_representation(image, rel, rng, params.budget)
        return SenderPrivateKey(ch, gg, spec), (gg, h)
    raise PolicyViolation("could not produce an h whose degree exceeds that of g")


def recipient_reply(priv: RecipientPrivateKey, gh: tuple[Polynomial, Polynomial]) -> tuple[int, SharedSecret]:
    g, h = gh
    for poly in (g, h):
        if poly.varcount != len(priv.point):
            raise DimensionError(f"message uses {poly.varcount} variables, key has {len(priv.point)}")
        if poly.spec.modulus != priv.spec.modulus:
            raise DimensionError("message ring does not match the key")
    return poly_eval(h, priv.point), SharedSecret(poly_eval(g, priv.point))


def sender_finish(priv: SenderPrivateKey, p: int) -> SharedSecret:
    try:
        return SharedSecret(chain_invert_numeric(priv.chain, p, priv.spec))
    except NotAPerfectPower as exc:
        raise TranscriptCorrupted(f"p = {p} is not in the image of the chain: {exc}") from exc


# state machines

class RecipientState(enum.Enum):
    IDLE = "idle"
    SENT_F = "sent F"
    DONE = "done"


class SenderState(enum.Enum):
    IDLE = "idle"
    SENT_GH = "sent GH"
    DONE = "done"


class Recipient:
    def __init__(self, params: ExchangeParams, rng: random.Random, *,
                 key: RecipientPrivateKey | None = None, relation: Relation | None = None):
        if (key is None) != (relation is None):
            raise ValueError("pass both key and relation, or neither")
        self.params = params
        self.rng = rng
        self.key = key
        self.relation = relation
        self.secret: SharedSecret | None = None
        self.state = RecipientState.IDLE

    def start(self) -> str:
        if self.state is not RecipientState.IDLE:
            raise ProtocolStateError(f"cannot send F in state {self.state.value}")
        if self.key is None:
            self.key, self.relation = recipient_keygen(self.params, self.rng)
        self.state = RecipientState.SENT_F
        return messages.encode_f(self.relation)

    def on_gh(self, line: str) -> str:
        if self.state is not RecipientState.SENT_F:
            raise ProtocolStateError(f"unexpected GH in state {self.state.value}")
        g, h = messages.decode_gh(line, self.relation.spec)
        p, self.secret = recipient_reply(self.key, (g, h))
        self.state = RecipientState.DONE
        return messages.encode_p(p)


class Sender:
    def __init__(self, params: ExchangeParams, rng: random.Random, *,
                 g: Polynomial | None = None, chain: OperatorChain | None = None):
        self.params = params
        self.rng = rng
        self._g = g
        self._chain = chain
        self.key: SenderPrivateKey | None = None
        self.secret: SharedSecret | None = None
        self.state = SenderState.IDLE

    def on_f(self, line: str) -> str:
        if self.state is not SenderState.IDLE:
            raise ProtocolStateError(f"unexpected F in state {self.state.value}")
        rel = messages.decode_f(line)
        g = self._g
        if g is not None and g.spec != rel.spec:
            g = Polynomial(g.terms, rel.spec)
        self.key, (g, h) = sender_respond(rel, self.rng, self.params, g=g, chain=self._chain)
        self.state = SenderState.SENT_GH
        return messages.encode_gh(g, h)

    def on_p(self, line: str) -> SharedSecret:
        if self.state is not SenderState.SENT_GH:
            raise ProtocolStateError(f"unexpected P in state {self.state.value}")
        self.secret = sender_finish(self.key, messages.decode_p(line))
        self.state = SenderState.DONE
        return self.secret


def _drive(recipient: Recipient, sender: Sender) -> Exchange:
    f_line = recipient.start()
    gh_line = sender.on_f(f_line)
    p_line = recipient.on_gh(gh_line)
    sender.on_p(p_line)
    rel = messages.decode_f(f_line)
    g, h = messages.decode_gh(gh_line, rel.spec)
    transcript = Transcript(rel, g, h, messages.decode_p(p_line))
    return Exchange(transcript, recipient.secret.s, sender.secret.s, recipient.key, sender.key)


def run_exchange(params: ExchangeParams, rng: random.Random) -> Exchange:
    """Steps 1 to 7 end to end over the encoded line protocol."""
    return _drive(Recipient(params, rng), Sender(params, rng))


# the worked example: f = x1^3 - x2^2 + 1, k = (2, 3), g = x1*x2^2, chain T[1,2;3],T[0,3;1]

GOLDEN_SPEC = RingSpec(2)
GOLDEN_POINT = (2, 3)
GOLDEN_TEMPLATE = "x1^3 - x2^2"
GOLDEN_G = "x1*x2^2"
GOLDEN_CHAIN = "T[1,2;3],T[0,3;1]"


def golden_keys() -> tuple[RecipientPrivateKey, Relation, Polynomial, OperatorChain]:
    from .polyring import poly_parse

    template = poly_parse(GOLDEN_TEMPLATE, GOLDEN_SPEC)
    key, rel = recipient_keygen(ExchangeParams(), random.Random(0), template=template, point=GOLDEN_POINT)
    return key, rel, poly_parse(GOLDEN_G, GOLDEN_SPEC), OperatorChain.parse(GOLDEN_CHAIN)


def golden_exchange(budget: int = 0, rng: random.Random | None = None) -> Exchange:
    key, rel, g, chain = golden_keys()
    params = ExchangeParams(budget=budget)
    rng = rng or random.Random(0)
    return _drive(Recipient(params, rng, key=key, relation=rel), Sender(params, rng, g=g, chain=chain))
