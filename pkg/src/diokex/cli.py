"""Command-line entry point.

    diokex keygen  --out recipient            -> recipient.key, recipient.F
    diokex respond recipient.F --out sender   -> sender.key, sender.GH
    diokex reply   sender.GH --key recipient.key --out recipient
                                              -> recipient.P, recipient.secret
    diokex recover recipient.P --key sender.key
    diokex demo    [--golden] [--listen H:P | --connect H:P]
    diokex attack  [--golden] --box 20 --trials 10 [--csv report.csv]

Exit codes: 0 ok, 2 keygen failed, 3 relation or policy rejected,
4 corrupted transcript, 64 usage error, 65 unparseable input.
"""

from __future__ import annotations

import argparse
import json
import random
import socket
import sys
from contextlib import closing
from pathlib import Path
from typing import Sequence

from . import messages
from .cryptanalysis import DEFAULT_CEILING, attack_experiment, write_report
from .errors import (
    DimensionError,
    DiokexError,
    KeygenFailed,
    MessageFormatError,
    PolicyViolation,
    PolySyntaxError,
    RelationRejected,
    TranscriptCorrupted,
)
from .polyring import RingSpec, poly_format, poly_parse
from .protocol import (
    GOLDEN_G,
    ExchangeParams,
    Recipient,
    RecipientPrivateKey,
    Sender,
    SenderPrivateKey,
    golden_exchange,
    golden_keys,
    recipient_keygen,
    recipient_reply,
    run_exchange,
    sender_finish,
    sender_respond,
)
from .toperator import OperatorChain

EXIT_OK = 0
EXIT_KEYGEN = 2
EXIT_REJECT = 3
EXIT_CORRUPT = 4
EXIT_USAGE = 64
EXIT_PARSE = 65


class UsageError(Exception):
    pass


class _Parser(argparse.ArgumentParser):
    def error(self, message):
        self.print_usage(sys.stderr)
        self.exit(EXIT_USAGE, f"{self.prog}: error: {message}\n")


def _int_list(text: str) -> list[int]:
    try:
        return [int(v) for v in text.split(",")]
    except ValueError:
        raise argparse.ArgumentTypeError(f"expected integers, got {text!r}") from None


def _common(p: argparse.ArgumentParser) -> None:
    p.add_argument("--mode", choices=("integer", "finite"), default=None)
    p.add_argument("--w", type=int, default=None, help="squarefree modulus (finite mode)")
    p.add_argument("--m", type=_int_list, default=[2], help="variable count (comma list for attack sweeps)")
    p.add_argument("--deg", type=int, default=3, help="degree bound for f")
    p.add_argument("--n", type=int, default=2, help="operator chain length")
    p.add_argument("--budget", type=int, default=0, help="extra terms when re-randomising h")
    p.add_argument("--seed", type=int, default=None)
    p.add_argument("--golden", action="store_true", help="use the fixed worked-example instance")


def build_parser() -> argparse.ArgumentParser:
    parser = _Parser(prog="diokex", description="Diophantine key exchange toolkit")
    sub = parser.add_subparsers(dest="command", required=True, parser_class=_Parser)

    p = sub.add_parser("keygen", help="recipient: create key pair and F message")
    _common(p)
    p.add_argument("--out", default="recipient", help="output prefix")

    p = sub.add_parser("respond", help="sender: answer an F message with GH")
    _common(p)
    p.add_argument("message", help="file holding the F line ('-' for stdin)")
    p.add_argument("--out", default="sender", help="output prefix")

    p = sub.add_parser("reply", help="recipient: answer GH with P and keep the secret")
    p.add_argument("message", help="file holding the GH line ('-' for stdin)")
    p.add_argument("--key", required=True, help="recipient private key file")
    p.add_argument("--out", default="recipient", help="output prefix")

    p = sub.add_parser("recover", help="sender: derive the secret from P")
    p.add_argument("message", help="file holding the P line ('-' for stdin)")
    p.add_argument("--key", required=True, help="sender private key file")

    p = sub.add_parser("demo", help="run a whole exchange locally or over a socket")
    _common(p)
    group = p.add_mutually_exclusive_group()
    group.add_argument("--listen", metavar="HOST:PORT", help="act as recipient, wait for a sender")
    group.add_argument("--connect", metavar="HOST:PORT", help="act as sender, connect to a recipient")

    p = sub.add_parser("attack", help="brute-force transcripts and write a CSV report")
    _common(p)
    p.add_argument("--box", type=int, default=20, help="search radius per variable (integer mode)")
    p.add_argument("--trials", type=int, default=1)
    p.add_argument("--ceiling", type=int, default=DEFAULT_CEILING)
    p.add_argument("--workers", type=int, default=1)
    p.add_argument("--timing", action="store_true", help="fill wall_ms (breaks byte-identical reruns)")
    p.add_argument("--csv", default="-", help="report path ('-' for stdout)")
    return parser


# helpers

def _rng(seed: int | None) -> random.Random:
    return random.SystemRandom() if seed is None else random.Random(seed)


def _params(args, m: int | None = None) -> ExchangeParams:
    ms = args.m
    if m is None:
        if len(ms) != 1:
            raise UsageError("--m takes a single value for this command")
        m = ms[0]
    if args.mode == "integer" and args.w is not None:
        raise UsageError("--w only applies to finite mode")
    finite = args.mode == "finite" or args.w is not None
    if m < 2:
        raise UsageError("--m must be at least 2")
    for name in ("deg", "n"):
        if getattr(args, name) < 1:
            raise UsageError(f"--{name} must be positive")
    if args.budget < 0:
        raise UsageError("--budget must be non-negative")
    try:
        return ExchangeParams(m=m, finite=finite, modulus=args.w, deg_f=args.deg, n=args.n, budget=args.budget)
    except ValueError as exc:
        raise UsageError(str(exc)) from exc


def _read_line(path: str) -> str:
    text = sys.stdin.read() if path == "-" else Path(path).read_text()
    lines = [ln for ln in text.splitlines() if ln.strip()]
    if len(lines) != 1:
        raise MessageFormatError(f"expected exactly one message line in {path}")
    return lines[0]


def _write(path: str, text: str) -> None:
    Path(path).write_text(text)


def _dump_key(path: str, data: dict) -> None:
    _write(path, json.dumps(data, sort_keys=True, indent=2) + "\n")


def _load_key(path: str, kind: str) -> dict:
    try:
        data = json.loads(Path(path).read_text())
    except json.JSONDecodeError as exc:
        raise MessageFormatError(f"{path}: not a key file ({exc})") from exc
    if data.get("kind") != kind:
        raise MessageFormatError(f"{path}: expected a {kind} file")
    return data


def recipient_key_json(key: RecipientPrivateKey, rel) -> dict:
    return {
        "kind": "diokex-recipient-key",
        "version": 1,
        "varcount": key.spec.varcount,
        "modulus": key.spec.modulus,
        "point": list(key.point),
        "f": poly_format(rel.f),
    }


def sender_key_json(key: SenderPrivateKey) -> dict:
    return {
        "kind": "diokex-sender-key",
        "version": 1,
        "varcount": key.spec.varcount,
        "modulus": key.spec.modulus,
        "chain": str(key.chain),
        "g": poly_format(key.g),
    }


def _recipient_from_json(data: dict) -> RecipientPrivateKey:
    try:
        spec = RingSpec(int(data["varcount"]), data["modulus"])
        return RecipientPrivateKey(tuple(int(v) for v in data["point"]), spec)
    except (KeyError, TypeError, ValueError) as exc:
        raise MessageFormatError(f"malformed recipient key: {exc}") from exc


def _sender_from_json(data: dict) -> SenderPrivateKey:
    try:
        spec = RingSpec(int(data["varcount"]), data["modulus"])
        return SenderPrivateKey(OperatorChain.parse(data["chain"]), poly_parse(data["g"], spec), spec)
    except (KeyError, TypeError, ValueError) as exc:
        if isinstance(exc, PolySyntaxError):
            raise
        raise MessageFormatError(f"malformed sender key: {exc}") from exc


def _address(text: str) -> tuple[str, int]:
    host, _, port = text.rpartition(":")
    if not port.isdigit():
        raise UsageError(f"expected HOST:PORT, got {text!r}")
    return host or "127.0.0.1", int(port)


# commands

def cmd_keygen(args) -> int:
    params = _params(args)
    if args.golden:
        key, rel, _, _ = golden_keys()
    else:
        key, rel = recipient_keygen(params, _rng(args.seed))
    line = messages.encode_f(rel)
    _dump_key(f"{args.out}.key", recipient_key_json(key, rel))
    _write(f"{args.out}.F", line + "\n")
    print(line)
    return EXIT_OK


def cmd_respond(args) -> int:
    params = _params(args)
    rel = messages.decode_f(_read_line(args.message))
    g = chain = None
    if args.golden:
        g = poly_parse(GOLDEN_G, rel.spec)
        _, _, _, chain = golden_keys()
    key, (g, h) = sender_respond(rel, _rng(args.seed), params, g=g, chain=chain)
    line = messages.encode_gh(g, h)
    _dump_key(f"{args.out}.key", sender_key_json(key))
    _write(f"{args.out}.GH", line + "\n")
    print(line)
    return EXIT_OK


def cmd_reply(args) -> int:
    key = _recipient_from_json(_load_key(args.key, "diokex-recipient-key"))
    g, h = messages.decode_gh(_read_line(args.message), key.spec)
    p, secret = recipient_reply(key, (g, h))
    line = messages.encode_p(p)
    _write(f"{args.out}.P", line + "\n")
    _write(f"{args.out}.secret", f"{secret.s}\n")
    print(line)
    return EXIT_OK


def cmd_recover(args) -> int:
    key = _sender_from_json(_load_key(args.key, "diokex-sender-key"))
    p = messages.decode_p(_read_line(args.message))
    print(sender_finish(key, p).s)
    return EXIT_OK


def _line_io(sock: socket.socket):
    return sock.makefile("r", encoding="ascii", newline="\n"), sock.makefile("w", encoding="ascii", newline="\n")


def _send(stream, line: str) -> None:
    stream.write(line + "\n")
    stream.flush()


def _recv(stream) -> str:
    line = stream.readline()
    if not line:
        raise MessageFormatError("connection closed before a message arrived")
    return line.rstrip("\n")


def _golden_sender_parts():
    _, _, g, chain = golden_keys()
    return g, chain


def cmd_demo(args) -> int:
    params = _params(args)
    rng = _rng(args.seed)
    if args.listen:
        if args.golden:
            key, rel, _, _ = golden_keys()
            recipient = Recipient(params, rng, key=key, relation=rel)
        else:
            recipient = Recipient(params, rng)
        host, port = _address(args.listen)
        with closing(socket.create_server((host, port))) as server:
            conn, _ = server.accept()
            with conn:
                rfile, wfile = _line_io(conn)
                _send(wfile, recipient.start())
                _send(wfile, recipient.on_gh(_recv(rfile)))
        print(f"recipient secret: {recipient.secret.s}")
        return EXIT_OK
    if args.connect:
        g, chain = _golden_sender_parts() if args.golden else (None, None)
        sender = Sender(params, rng, g=g, chain=chain)
        with socket.create_connection(_address(args.connect)) as conn:
            rfile, wfile = _line_io(conn)
            _send(wfile, sender.on_f(_recv(rfile)))
            sender.on_p(_recv(rfile))
        print(f"sender secret: {sender.secret.s}")
        return EXIT_OK
    exchange = golden_exchange(args.budget, rng) if args.golden else run_exchange(params, rng)
    for line in exchange.transcript.lines():
        print(line)
    print(f"shared secret: {exchange.recipient_secret} == {exchange.sender_secret}")
    return EXIT_OK if exchange.agreed else 1


def cmd_attack(args) -> int:
    if args.box < 0 or args.trials < 1:
        raise UsageError("--box must be >= 0 and --trials >= 1")
    sweep = [_params(args, m) for m in args.m]
    if args.golden:
        sweep = sweep[:1]
    rows = attack_experiment(
        sweep,
        _rng(args.seed),
        args.trials,
        radius=args.box,
        ceiling=args.ceiling,
        workers=args.workers,
        timing=args.timing,
        golden=args.golden,
    )
    if args.csv == "-":
        write_report(rows, sys.stdout)
    else:
        with open(args.csv, "w", newline="") as fh:
            write_report(rows, fh)
    return EXIT_OK


COMMANDS = {
    "keygen": cmd_keygen,
    "respond": cmd_respond,
    "reply": cmd_reply,
    "recover": cmd_recover,
    "demo": cmd_demo,
    "attack": cmd_attack,
}


def main(argv: Sequence[str] | None = None) -> int:
    args = build_parser().parse_args(argv)
    try:
        return COMMANDS[args.command](args)
    except UsageError as exc:
        print(f"diokex: usage error: {exc}", file=sys.stderr)
        return EXIT_USAGE
    except KeygenFailed as exc:
        print(f"diokex: key generation failed: {exc}", file=sys.stderr)
        return EXIT_KEYGEN
    except (RelationRejected, PolicyViolation) as exc:
        print(f"diokex: rejected: {exc}", file=sys.stderr)
        return EXIT_REJECT
    except TranscriptCorrupted as exc:
        print(f"diokex: corrupted transcript: {exc}", file=sys.stderr)
        return EXIT_CORRUPT
    except (MessageFormatError, PolySyntaxError, DimensionError, OSError) as exc:
        print(f"diokex: bad input: {exc}", file=sys.stderr)
        return EXIT_PARSE
    except DiokexError as exc:
        print(f"diokex: {exc}", file=sys.stderr)
        return 1


if __name__ == "__main__":
    sys.exit(main())
