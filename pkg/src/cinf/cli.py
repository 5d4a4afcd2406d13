"""Command-line front end.

One line is one command.  The first word selects the verb; what follows
is positional term syntax plus keyword clauses and flags:

    let <name> = <term>
    ideal <name> = ( <term>, <term>, ... ) | 0
    order <f> <g> [mod <ideal>] [witness <unit>] [on <box>]
    equal <f> <g> [mod <ideal>] [on <box>]
    invertible <f> [mod <ideal>] [on <box>]
    radical-member <a> mod <ideal> [on <box>]
    localize <presentation-file | ideal-name | 0> --invert <s> [--invert ...]
    filter <b> contains <g> [on <box>]
    spec at <point> --term <t>
    sper at <point> --term <t>
    root <t> --on [a,b] [--tol <q>]
    save <path>
    load <path>

An ideal clause is a defined name, ``0`` for the zero ideal, or an
inline tuple ``(g1, g2)``.  A box is ``[-2,2]`` (uniform) or
``[x:-2,2; y:0,1]``; a point is ``x=0, y=1/2`` or positional.  The words
``mod``, ``witness``, ``on``, ``contains``, and ``at`` are reserved.

Exit codes encode the three-valued verdict logic: 0 proved/success,
1 refuted (a witness is printed), 2 undecided, 3 error.  ``--out <path>``
writes the JSON artifact of the last command; all artifacts carry
``"v": 1``.  Without arguments an interactive loop starts (or, when
stdin is a pipe, commands are read line by line; ``#`` starts a comment).
"""

from __future__ import annotations

import json
import re
import sys
from fractions import Fraction
from pathlib import Path

from .certificates import (
    cert_equal, cert_invertible, cert_order, cert_order_witnessed,
)
from .errors import (
    CinfError, FilterNotPrime, NotASquare, NotEqual, NotInvertibleOnZeroset,
    NotNowhereZero, OrderRefuted, ParseError, UnknownName, UnknownVerdict,
)
from .galois_spectra import ZerosetFilter, filter_member, ivt_root, point_spectra
from .localization import detect_trivial, localize, radical_member
from .parser import parse, parse_box, parse_point, parse_prefix, print_infix
from .normalize import normalize
from .session import Config, Session, load_config
from .smooth_ring import Ideal, SmoothRing
from .terms import ObligationRegistry, PENDING, REGISTRY, substitute, support
from .verifier import PROVED, REFUTED, canonical_json

_CLAUSE_WORDS = ("mod", "witness", "on", "contains", "at")
_CLAUSE_RE = re.compile(r"\b(%s)\b" % "|".join(_CLAUSE_WORDS))
# term/box-valued flags may span several words; everything else is one word
_MULTI_FLAGS = {"--term", "--invert", "--on", "--region"}
_SINGLE_FLAGS = {"--tol", "--out", "--name", "--depth", "--budget",
                 "--precision", "--workers", "--batch", "--config"}
_BOOL_FLAGS = {"--assume-global"}
_EXIT = {PROVED: 0, REFUTED: 1}


def _extract_flags(words):
    """Pull ``--flag value`` pairs out of a word list; ``--invert``
    accumulates.  A multi-word value (a term or a box) runs until the
    next flag, command verb, or clause keyword."""
    rest, flags = [], {}
    i = 0
    while i < len(words):
        w = words[i]
        if w in _BOOL_FLAGS:
            flags[w[2:]] = True
            i += 1
        elif w in _SINGLE_FLAGS or w in _MULTI_FLAGS:
            j = i + 1
            vals = []
            while j < len(words) and not _ends_value(words[j]):
                vals.append(words[j])
                j += 1
                if w in _SINGLE_FLAGS:
                    break
            if not vals:
                raise ParseError(f"flag {w} needs a value")
            value = " ".join(vals)
            if w == "--invert":
                flags.setdefault("invert", []).append(value)
            else:
                flags[w[2:]] = value
            i = j
        elif w.startswith("--"):
            raise ParseError(f"unknown flag {w}")
        else:
            rest.append(w)
            i += 1
    return rest, flags


def _ends_value(word: str) -> bool:
    return (word in _SINGLE_FLAGS or word in _MULTI_FLAGS
            or word in _BOOL_FLAGS or word in _VERBS
            or word in _CLAUSE_WORDS)


def _split_clauses(text):
    """Split ``<positional> mod ... on ...`` into the leading part and a
    keyword-to-segment mapping."""
    matches = list(_CLAUSE_RE.finditer(text))
    head = text[:matches[0].start()] if matches else text
    clauses = {}
    for k, m in enumerate(matches):
        end = matches[k + 1].start() if k + 1 < len(matches) else len(text)
        key = m.group(1)
        if key in clauses:
            raise ParseError(f"duplicate clause {key!r}")
        clauses[key] = text[m.end():end].strip()
    return head.strip(), clauses


def _split_top_level(text, sep=","):
    """Split on a separator at bracket depth zero."""
    parts, depth, start = [], 0, 0
    for i, ch in enumerate(text):
        if ch in "([":
            depth += 1
        elif ch in ")]":
            depth -= 1
        elif ch == sep and depth == 0:
            parts.append(text[start:i])
            start = i + 1
    parts.append(text[start:])
    return parts


class Frontend:
    """Executes command lines against one session."""

    def __init__(self, config: Config | None = None, *,
                 registry: ObligationRegistry = REGISTRY,
                 stream=None, out: str | None = None,
                 assume_global: bool = False, workers: int = 1):
        self.registry = registry
        self.session = Session(config=config or Config())
        self.stream = stream if stream is not None else sys.stdout
        self.default_out = out
        self.assume_global = assume_global
        self.workers = workers

    # -- plumbing -----------------------------------------------------------

    def _say(self, text: str) -> None:
        print(text, file=self.stream)

    def _emit(self, record: dict, flags: dict) -> None:
        path = flags.get("out") or self.default_out
        if path:
            Path(path).write_text(canonical_json(record) + "\n")

    def _resolve_term(self, text: str):
        if not text.strip():
            raise ParseError("expected a term")
        t = parse(text, self.registry)
        mapping = {n: self.session.terms[n]
                   for n in support(t) & set(self.session.terms)}
        return substitute(t, mapping) if mapping else t

    def _prefix_term(self, text: str):
        t, rest = parse_prefix(text, self.registry)
        mapping = {n: self.session.terms[n]
                   for n in support(t) & set(self.session.terms)}
        return (substitute(t, mapping) if mapping else t), rest

    def _resolve_ideal(self, text: str | None) -> Ideal:
        if text is None:
            return Ideal(())
        text = text.strip()
        if text == "0":
            return Ideal(())
        if text.startswith("("):
            if not text.endswith(")"):
                raise ParseError("unclosed ideal tuple")
            body = text[1:-1].strip()
            if not body:
                return Ideal(())
            gens = tuple(self._resolve_term(p) for p in _split_top_level(body))
            return Ideal(gens)
        if _CLAUSE_RE.fullmatch(text) or not re.fullmatch(r"[A-Za-z_]\w*", text):
            raise ParseError(f"malformed ideal {text!r}")
        return self.session.ideal(text)

    def _region(self, clauses: dict, names) -> "Box":
        names = sorted(names)
        if "on" in clauses:
            return parse_box(clauses["on"], names=names)
        return self.session.config.region_for(names)

    def _maybe_assume(self, cert) -> None:
        if not self.assume_global:
            return
        for oid in cert.obligations:
            if self.registry.status(oid) == PENDING:
                self.registry.assume(oid, "assumed by --assume-global")

    def _store(self, cert, flags: dict) -> str:
        record = cert.to_json(self.registry)
        name = self.session.add_certificate(record, flags.get("name"))
        self._emit(record, flags)
        return name

    # -- command handlers ---------------------------------------------------

    def execute(self, line: str) -> int:
        words = line.split()
        if not words:
            return 0
        try:
            rest, flags = _extract_flags(words)
            if not rest:
                raise ParseError("empty command")
            verb, tail = rest[0], " ".join(rest[1:])
            handler = _VERBS.get(verb)
            if handler is None:
                # not a command: echo the normal form of the term
                t = self._resolve_term(" ".join(rest))
                self._say(print_infix(normalize(t)))
                return 0
            return handler(self, tail, flags)
        except (OrderRefuted, NotEqual, NotInvertibleOnZeroset, NotASquare,
                NotNowhereZero) as e:
            self._say(f"refuted: {e}")
            if getattr(e, "witness", None):
                self._emit({"v": 1, "outcome": REFUTED,
                            "witness": {n: str(v) for n, v
                                        in sorted(e.witness.items())}}, {})
            return 1
        except FilterNotPrime as e:
            self._say(f"refuted: {e}")
            return 1
        except UnknownVerdict as e:
            self._say(f"unknown: {e}")
            return 2
        except CinfError as e:
            self._say(f"error: {e}")
            return 3
        except (ValueError, OSError, json.JSONDecodeError) as e:
            self._say(f"error: {e}")
            return 3

    def cmd_let(self, tail: str, flags: dict) -> int:
        m = re.fullmatch(r"\s*([A-Za-z_]\w*)\s*=\s*(.+)", tail, re.S)
        if not m:
            raise ParseError("usage: let <name> = <term>")
        t = self._resolve_term(m.group(2))
        self.session.define_term(m.group(1), t)
        self._say(f"{m.group(1)} = {print_infix(t)}")
        return 0

    def cmd_ideal(self, tail: str, flags: dict) -> int:
        m = re.fullmatch(r"\s*([A-Za-z_]\w*)\s*=\s*(.+)", tail, re.S)
        if not m:
            raise ParseError("usage: ideal <name> = (<term>, ...)")
        ideal = self._resolve_ideal(m.group(2))
        self.session.define_ideal(m.group(1), ideal)
        gens = ", ".join(print_infix(g) for g in ideal.generators) or "0"
        self._say(f"{m.group(1)} = <{gens}>")
        return 0

    def cmd_order(self, tail: str, flags: dict) -> int:
        head, clauses = _split_clauses(tail)
        f, rest = self._prefix_term(head)
        g = self._resolve_term(rest)
        ideal = self._resolve_ideal(clauses.get("mod"))
        names = support(f) | support(g) | ideal.support()
        region = self._region(clauses, names)
        kwargs = dict(budget=self.session.config.budget(),
                      workers=self.workers, registry=self.registry)
        if "witness" in clauses:
            u = self._resolve_term(clauses["witness"])
            cert = cert_order_witnessed(f, g, u, ideal, region, **kwargs)
        else:
            cert = cert_order(f, g, ideal, region, **kwargs)
        self._maybe_assume(cert)
        name = self._store(cert, flags)
        self._say(f"proved: {print_infix(f)} < {print_infix(g)}  [{name}]")
        return 0

    def cmd_equal(self, tail: str, flags: dict) -> int:
        head, clauses = _split_clauses(tail)
        f, rest = self._prefix_term(head)
        g = self._resolve_term(rest)
        ideal = self._resolve_ideal(clauses.get("mod"))
        names = support(f) | support(g) | ideal.support()
        region = self._region(clauses, names)
        cert = cert_equal(f, g, ideal, region,
                          budget=self.session.config.budget(),
                          workers=self.workers, registry=self.registry)
        name = self._store(cert, flags)
        self._say(f"proved: {print_infix(f)} = {print_infix(g)}  [{name}]")
        return 0

    def cmd_invertible(self, tail: str, flags: dict) -> int:
        head, clauses = _split_clauses(tail)
        f = self._resolve_term(head)
        ideal = self._resolve_ideal(clauses.get("mod"))
        region = self._region(clauses, support(f) | ideal.support())
        cert = cert_invertible(f, ideal, region,
                               budget=self.session.config.budget(),
                               workers=self.workers, registry=self.registry)
        self._maybe_assume(cert)
        name = self._store(cert, flags)
        self._say(f"proved: {print_infix(f)} is invertible  [{name}]")
        return 0

    def cmd_radical_member(self, tail: str, flags: dict) -> int:
        head, clauses = _split_clauses(tail)
        a = self._resolve_term(head)
        if "mod" not in clauses:
            raise ParseError("radical-member needs a mod clause")
        ideal = self._resolve_ideal(clauses["mod"])
        region = self._region(clauses, support(a) | ideal.support())
        verdict = radical_member(a, ideal, region,
                                 budget=self.session.config.budget(),
                                 workers=self.workers, registry=self.registry)
        self._emit({"v": 1, "command": "radical-member",
                    "verdict": verdict.to_json()}, flags)
        return self._render_verdict(
            verdict, f"{print_infix(a)} is in the radical")

    def cmd_localize(self, tail: str, flags: dict) -> int:
        inverts = [self._resolve_term(s) for s in flags.get("invert", [])]
        if not inverts:
            raise ParseError("localize needs at least one --invert <term>")
        ring = self._resolve_presentation(tail.strip(), inverts)
        loc = localize(ring, inverts)
        report = detect_trivial(
            loc, region=self.session.config.region_for(ring.variables),
            budget=self.session.config.budget(), workers=self.workers,
            registry=self.registry)
        record = {"v": 1, "presentation": loc.ring.to_json(),
                  "triviality": report.to_json()}
        self._emit(record, flags)
        inv = ", ".join(print_infix(s) for s in inverts)
        if report.trivial is True:
            self._say(f"trivial: inverting {inv} collapses the ring "
                      f"({report.route})")
            return 0
        if report.trivial is False:
            w = report.witness_point()
            at = f" at {_fmt_point(w)}" if w else ""
            self._say(f"nontrivial: localization survives{at}")
            return 1
        self._say(f"unknown: {report.detail}")
        return 2

    def _resolve_presentation(self, text: str, inverts) -> SmoothRing:
        if not text:
            names = set()
            for s in inverts:
                names |= support(s)
            return SmoothRing(tuple(sorted(names)) or ("x",), Ideal(()))
        p = Path(text)
        if p.suffix == ".json" or p.is_file():
            return SmoothRing.from_json(json.loads(p.read_text()))
        ideal = self._resolve_ideal(text)
        names = set(ideal.support())
        for s in inverts:
            names |= support(s)
        return SmoothRing(tuple(sorted(names)) or ("x",), ideal)

    def cmd_filter(self, tail: str, flags: dict) -> int:
        head, clauses = _split_clauses(tail)
        if "contains" not in clauses:
            raise ParseError("usage: filter <b> contains <g>")
        b = self._resolve_term(head)
        g = self._resolve_term(clauses["contains"])
        region = self._region(clauses, support(b) | support(g))
        verdict = filter_member(g, ZerosetFilter(b), region,
                                budget=self.session.config.budget(),
                                workers=self.workers, registry=self.registry)
        self._emit({"v": 1, "command": "filter",
                    "verdict": verdict.to_json()}, flags)
        return self._render_verdict(
            verdict, f"Z({print_infix(g)}) is in the filter of "
                     f"Z({print_infix(b)})")

    def cmd_spec(self, tail: str, flags: dict) -> int:
        return self._point_command(tail, flags, "in_D_inf",
                                   "is a unit at the point")

    def cmd_sper(self, tail: str, flags: dict) -> int:
        return self._point_command(tail, flags, "in_H_inf_plus",
                                   "is in the strict positive cone")

    def _point_command(self, tail: str, flags: dict, key: str,
                       claim: str) -> int:
        head, clauses = _split_clauses(tail)
        if head or "at" not in clauses:
            raise ParseError("usage: spec|sper at <point> --term <t>")
        if "term" not in flags:
            raise ParseError("spec|sper needs --term <t>")
        t = self._resolve_term(flags["term"])
        point = parse_point(clauses["at"], names=sorted(support(t)))
        record = point_spectra(point, t, registry=self.registry)
        self._emit(record, flags)
        outcome = record[key]
        tag = {PROVED: "proved", REFUTED: "refuted"}.get(outcome, "unknown")
        self._say(f"{tag}: {print_infix(t)} {claim} (sign {record['sign']})")
        return _EXIT.get(outcome, 2)

    def cmd_root(self, tail: str, flags: dict) -> int:
        head, clauses = _split_clauses(tail)
        t = self._resolve_term(head)
        bounds_text = flags.get("on") or clauses.get("on")
        if not bounds_text:
            raise ParseError("root needs --on [a,b]")
        body = bounds_text.strip().lstrip("[").rstrip("]")
        pieces = body.split(",")
        if len(pieces) != 2:
            raise ParseError(f"malformed interval {bounds_text!r}")
        lo, hi = Fraction(pieces[0].strip()), Fraction(pieces[1].strip())
        tol = Fraction(flags["tol"]) if "tol" in flags else Fraction(1, 10 ** 10)
        enc = ivt_root(t, lo, hi, tol=tol,
                       budget=self.session.config.budget(),
                       workers=self.workers, registry=self.registry)
        self._emit(enc.to_json(), flags)
        self._say(f"root of {print_infix(t)} in "
                  f"[{enc.lo}, {enc.hi}] (width {float(enc.width):.3e}, "
                  f"{enc.iterations} bisections)")
        return 0

    def cmd_save(self, tail: str, flags: dict) -> int:
        path = tail.strip()
        if not path:
            raise ParseError("usage: save <path>")
        self.session.save(path)
        self._say(f"session saved to {path}")
        return 0

    def cmd_load(self, tail: str, flags: dict) -> int:
        path = tail.strip()
        if not path:
            raise ParseError("usage: load <path>")
        self.session = Session.load(path, self.registry)
        self._say(f"session loaded from {path} "
                  f"({len(self.session.terms)} terms, "
                  f"{len(self.session.ideals)} ideals, "
                  f"{len(self.session.certificates)} certificates)")
        return 0

    def _render_verdict(self, verdict, claim: str) -> int:
        if verdict.outcome == PROVED:
            self._say(f"proved: {claim}")
            return 0
        if verdict.outcome == REFUTED:
            self._say(f"refuted: {claim} — witness "
                      f"{_fmt_point(verdict.witness_point())}")
            return 1
        self._say(f"unknown: {verdict.reason}")
        return 2


def _fmt_point(point) -> str:
    if not point:
        return "(origin)"
    return ", ".join(f"{n}={v}" for n, v in sorted(point.items()))


_VERBS = {
    "let": Frontend.cmd_let,
    "ideal": Frontend.cmd_ideal,
    "order": Frontend.cmd_order,
    "equal": Frontend.cmd_equal,
    "invertible": Frontend.cmd_invertible,
    "radical-member": Frontend.cmd_radical_member,
    "localize": Frontend.cmd_localize,
    "filter": Frontend.cmd_filter,
    "spec": Frontend.cmd_spec,
    "sper": Frontend.cmd_sper,
    "root": Frontend.cmd_root,
    "save": Frontend.cmd_save,
    "load": Frontend.cmd_load,
}


def parse_command(text: str, registry: ObligationRegistry = REGISTRY):
    """Classify an input line: a known verb yields ``(verb, tail, flags)``,
    anything else parses as a term."""
    rest, flags = _extract_flags(text.split())
    if rest and rest[0] in _VERBS:
        return rest[0], " ".join(rest[1:]), flags
    return parse(text, registry)


def run_batch(front: Frontend, lines) -> int:
    worst = 0
    for line in lines:
        line = line.split("#", 1)[0].strip()
        if not line:
            continue
        worst = max(worst, front.execute(line))
    return worst


def repl(front: Frontend) -> int:
    front._say("cinf interactive session; quit to leave")
    while True:
        try:
            line = input("cinf> ")
        except EOFError:
            front._say("")
            return 0
        if line.strip() in {"quit", "exit"}:
            return 0
        code = front.execute(line)
        if code:
            front._say(f"[exit {code}]")


def main(argv=None) -> int:
    words = list(sys.argv[1:] if argv is None else argv)
    try:
        rest, flags = _extract_flags(words)
        config = load_config({
            "default-region": flags.get("region"),
            "depth": flags.get("depth"),
            "cell-budget": flags.get("budget"),
            "precision-schedule": flags.get("precision"),
            "config": flags.get("config"),
        })
    except CinfError as e:
        print(f"error: {e}", file=sys.stderr)
        return 3
    front = Frontend(config, out=flags.get("out"),
                     assume_global=bool(flags.get("assume-global")),
                     workers=int(flags.get("workers", 1)))
    if "batch" in flags:
        try:
            lines = Path(flags["batch"]).read_text().splitlines()
        except OSError as e:
            print(f"error: {e}", file=sys.stderr)
            return 3
        return run_batch(front, lines)
    if rest:
        # one-shot: the words form a single command line (flags included;
        # execute re-extracts them, so values survive verbatim)
        return front.execute(" ".join(words))
    if not sys.stdin.isatty():
        return run_batch(front, sys.stdin.read().splitlines())
    return repl(front)


if __name__ == "__main__":
    sys.exit(main())
