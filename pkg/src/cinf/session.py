"""Configuration and named session state for the command front end.

Configuration values resolve with the precedence flags > environment >
config file > built-in defaults.  The environment variables are
``CINF_DEFAULT_REGION``, ``CINF_DEPTH``, ``CINF_CELL_BUDGET``,
``CINF_PRECISION_SCHEDULE``, and ``CINF_CONFIG`` (path of the config
file; ``./cinf.json`` is picked up when present).  The config file is
JSON with the keys ``default-region``, ``depth``, ``cell-budget``, and
``precision-schedule``.

A session holds named terms, named ideals, and emitted certificate
records; it saves to a versioned JSON document and reloads to identical
state (the canonical serialization round-trips byte-for-byte).
"""

from __future__ import annotations

import json
import os
import re
from dataclasses import dataclass, field
from fractions import Fraction
from pathlib import Path

from .errors import ParseError, UnknownName
from .intervals import PRECISION_LADDER
from .parser import parse_sexpr, print_sexpr
from .regions import Box
from .smooth_ring import Ideal
from .terms import ObligationRegistry, REGISTRY, Term
from .verifier import Budget, canonical_json

DEFAULT_BOUNDS = (Fraction(-2), Fraction(2))


def _frac(text: str) -> Fraction:
    try:
        return Fraction(str(text).strip())
    except (ValueError, ZeroDivisionError) as e:
        raise ParseError(f"malformed rational {text!r}") from e


def _parse_bounds(text: str) -> tuple:
    """``[-2,2]`` (brackets optional) into an exact bounds pair."""
    body = text.strip().lstrip("[").rstrip("]")
    pieces = body.split(",")
    if len(pieces) != 2:
        raise ParseError(f"malformed region bounds {text!r}")
    lo, hi = _frac(pieces[0]), _frac(pieces[1])
    if not lo < hi:
        raise ParseError(f"empty region bounds {text!r}")
    return lo, hi


def _parse_schedule(value) -> tuple:
    try:
        if isinstance(value, (list, tuple)):
            out = tuple(int(v) for v in value)
        else:
            out = tuple(int(p) for p in str(value).split(",") if p.strip())
    except (TypeError, ValueError) as e:
        raise ParseError(f"malformed precision schedule {value!r}") from e
    if not out or any(p < 2 for p in out):
        raise ParseError(f"malformed precision schedule {value!r}")
    return out


@dataclass(frozen=True)
class Config:
    bounds: tuple = DEFAULT_BOUNDS          # default per-variable region
    depth: int = 40
    cell_budget: int = 10 ** 6
    schedule: tuple = PRECISION_LADDER

    def budget(self) -> Budget:
        return Budget(max_depth=self.depth, max_cells=self.cell_budget,
                      schedule=self.schedule)

    def region_for(self, names) -> Box:
        return Box.make({n: self.bounds for n in sorted(names)})

    def to_json(self) -> dict:
        lo, hi = self.bounds
        return {"default-region": f"[{_str_frac(lo)},{_str_frac(hi)}]",
                "depth": self.depth,
                "cell-budget": self.cell_budget,
                "precision-schedule": ",".join(str(p) for p in self.schedule)}


def _str_frac(q: Fraction) -> str:
    return str(q.numerator) if q.denominator == 1 else f"{q.numerator}/{q.denominator}"


_ENV_KEYS = {
    "CINF_DEFAULT_REGION": "default-region",
    "CINF_DEPTH": "depth",
    "CINF_CELL_BUDGET": "cell-budget",
    "CINF_PRECISION_SCHEDULE": "precision-schedule",
}


def load_config(flags: dict | None = None, *, env=None, cwd: str = ".") -> Config:
    """Resolve configuration: flags > environment > file > defaults.

    ``flags`` uses the config-file key names; unknown keys are ignored so
    callers can pass their whole flag dictionary.
    """
    env = os.environ if env is None else env
    merged: dict = {}

    path = env.get("CINF_CONFIG") or (flags or {}).get("config")
    candidate = Path(path) if path else Path(cwd) / "cinf.json"
    if candidate.is_file():
        try:
            data = json.loads(candidate.read_text())
        except json.JSONDecodeError as e:
            raise ParseError(f"config file {candidate}: {e}") from e
        if not isinstance(data, dict):
            raise ParseError(f"config file {candidate} must hold an object")
        merged.update(data)

    for var, key in _ENV_KEYS.items():
        if var in env:
            merged[key] = env[var]
    for key in ("default-region", "depth", "cell-budget", "precision-schedule"):
        if flags and flags.get(key) is not None:
            merged[key] = flags[key]

    return Config(
        bounds=_parse_bounds(merged["default-region"])
        if "default-region" in merged else DEFAULT_BOUNDS,
        depth=int(merged.get("depth", 40)),
        cell_budget=int(merged.get("cell-budget", 10 ** 6)),
        schedule=_parse_schedule(merged["precision-schedule"])
        if "precision-schedule" in merged else PRECISION_LADDER,
    )


_NAME_OK = re.compile(r"^[A-Za-z_][A-Za-z0-9_]*$")


@dataclass
class Session:
    """Named terms, ideals, and certificate records plus the active
    configuration.  Definitions overwrite; lookups of missing names
    raise :class:`UnknownName`."""

    config: Config = field(default_factory=Config)
    terms: dict = field(default_factory=dict)
    ideals: dict = field(default_factory=dict)
    certificates: dict = field(default_factory=dict)
    counter: int = 0

    def define_term(self, name: str, term: Term) -> None:
        self._check_name(name)
        self.terms[name] = term

    def define_ideal(self, name: str, ideal: Ideal) -> None:
        self._check_name(name)
        self.ideals[name] = ideal

    def add_certificate(self, record: dict, name: str | None = None) -> str:
        if name is None:
            self.counter += 1
            name = f"cert{self.counter}"
        else:
            self._check_name(name)
        self.certificates[name] = record
        return name

    def term(self, name: str) -> Term:
        if name not in self.terms:
            raise UnknownName(f"term {name!r} is not defined")
        return self.terms[name]

    def ideal(self, name: str) -> Ideal:
        if name not in self.ideals:
            raise UnknownName(f"ideal {name!r} is not defined")
        return self.ideals[name]

    @staticmethod
    def _check_name(name: str) -> None:
        if not _NAME_OK.match(name):
            raise ParseError(f"invalid name {name!r}")

    # -- persistence --------------------------------------------------------

    def to_json(self) -> dict:
        return {
            "v": 1,
            "config": self.config.to_json(),
            "terms": {n: print_sexpr(t) for n, t in sorted(self.terms.items())},
            "ideals": {n: [print_sexpr(g) for g in i.generators]
                       for n, i in sorted(self.ideals.items())},
            "certificates": dict(sorted(self.certificates.items())),
            "counter": self.counter,
        }

    def canonical(self) -> str:
        return canonical_json(self.to_json())

    def save(self, path) -> None:
        Path(path).write_text(self.canonical() + "\n")

    @classmethod
    def from_json(cls, rec: dict,
                  registry: ObligationRegistry = REGISTRY) -> "Session":
        if rec.get("v") != 1:
            raise ParseError(f"unsupported session version {rec.get('v')!r}")
        cfg = rec.get("config", {})
        config = Config(
            bounds=_parse_bounds(cfg["default-region"])
            if "default-region" in cfg else DEFAULT_BOUNDS,
            depth=int(cfg.get("depth", 40)),
            cell_budget=int(cfg.get("cell-budget", 10 ** 6)),
            schedule=_parse_schedule(cfg["precision-schedule"])
            if "precision-schedule" in cfg else PRECISION_LADDER,
        )
        s = cls(config=config, counter=int(rec.get("counter", 0)))
        for n, text in rec.get("terms", {}).items():
            s.terms[n] = parse_sexpr(text, registry)
        for n, gens in rec.get("ideals", {}).items():
            s.ideals[n] = Ideal(tuple(parse_sexpr(g, registry) for g in gens))
        s.certificates.update(rec.get("certificates", {}))
        return s

    @classmethod
    def load(cls, path, registry: ObligationRegistry = REGISTRY) -> "Session":
        rec = json.loads(Path(path).read_text())
        return cls.from_json(rec, registry)
