"""Line-oriented wire format.

Each message is a single line::

    DIOKEX/1 F <f>[ mod <w>]
    DIOKEX/1 GH <g> ; <h>
    DIOKEX/1 P <p>

Polynomials use the text grammar of :mod:`diokex.polyring`.  The variable
count is the highest index that occurs in ``f``.
"""

from __future__ import annotations

import re

from .errors import MessageFormatError, PolySyntaxError, RelationRejected
from .polyring import Polynomial, RingSpec, poly_format, poly_parse
from .quotient import Relation

MAGIC = "DIOKEX/1"

_VAR = re.compile(r"x(\d+)")


def _split(line: str, kind: str) -> str:
    line = line.strip()
    prefix = f"{MAGIC} {kind} "
    if not line.startswith(prefix):
        head = " ".join(line.split()[:2])
        raise MessageFormatError(f"expected a {kind} message, got {head!r}")
    return line[len(prefix):]


def encode_f(rel: Relation) -> str:
    line = f"{MAGIC} F {poly_format(rel.f)}"
    if rel.spec.finite:
        line += f" mod {rel.spec.modulus}"
    return line


def decode_f(line: str) -> Relation:
    payload = _split(line, "F")
    modulus = None
    if " mod " in payload:
        payload, _, w = payload.rpartition(" mod ")
        try:
            modulus = int(w.strip())
        except ValueError:
            raise MessageFormatError(f"bad modulus {w.strip()!r}") from None
    indices = [int(i) for i in _VAR.findall(payload)]
    if not indices:
        raise RelationRejected("relation has no variables")
    if min(indices) < 1:
        raise MessageFormatError("variable indices start at 1")
    try:
        spec = RingSpec(max(indices), modulus)
    except ValueError as exc:
        raise MessageFormatError(str(exc)) from exc
    return Relation(poly_parse(payload, spec))


def encode_gh(g: Polynomial, h: Polynomial) -> str:
    return f"{MAGIC} GH {poly_format(g)} ; {poly_format(h)}"


def decode_gh(line: str, spec: RingSpec) -> tuple[Polynomial, Polynomial]:
    payload = _split(line, "GH")
    parts = payload.split(";")
    if len(parts) != 2:
        raise MessageFormatError("GH payload must be '<g> ; <h>'")
    return poly_parse(parts[0], spec), poly_parse(parts[1], spec)


def encode_p(p: int) -> str:
    return f"{MAGIC} P {p}"


def decode_p(line: str) -> int:
    payload = _split(line, "P").strip()
    try:
        return int(payload)
    except ValueError:
        raise MessageFormatError(f"bad P payload {payload!r}") from None


PARSE_ERRORS = (MessageFormatError, PolySyntaxError)
