"""Certificate-producing symbolic-numeric calculus for finitely presented
smooth rings.

The layers, bottom up:

* :mod:`cinf.terms` / :mod:`cinf.parser` — expression trees over smooth
  primitives with guarded partial operations, s-expression and infix
  syntax;
* :mod:`cinf.verifier` — the three-valued branch-and-prune decision
  procedure for predicates restricted to zerosets;
* :mod:`cinf.smooth_ring` / :mod:`cinf.certificates` — quotient rings,
  certified equality / invertibility / strict order, and independently
  re-checkable certificates;
* :mod:`cinf.localization` / :mod:`cinf.galois_spectra` — inverting
  denominators, radical membership, the ideal–filter adjunction, pointwise
  spectra, and certified root enclosures;
* :mod:`cinf.cli` / :mod:`cinf.session` — the ``cinf`` command-line front
  end with sessions and layered configuration.

The most common entry points are re-exported here.
"""

from __future__ import annotations

__version__ = "0.1.0"

from .errors import (
    CinfError, FilterNotPrime, NoSignChange, NotASquare, NotEqual,
    NotInvertibleOnZeroset, NotNowhereZero, OrderRefuted, ParseError,
    PatternMismatch, RegularityUnknown, UnknownName, UnknownVerdict,
)
from .terms import (
    Const, ONE, Term, Var, ZERO, bump, exp, pinv, psqrt, sin, var,
)
from .parser import parse_infix, parse_sexpr, print_infix, print_sexpr
from .normalize import normalize
from .regions import Box
from .verifier import (
    Budget, PROVED, REFUTED, UNKNOWN, Verdict, ZerosetQuery, equals_zero,
    greater_zero, non_zero, prove_on_zeroset, zeroset_included,
)
from .smooth_ring import Coset, Ideal, SmoothRing, ZERO_IDEAL
from .certificates import (
    EqualityCertificate, InverseCertificate, OrderCertificate, cert_equal,
    cert_invertible, cert_order, cert_order_witnessed, cert_square,
    order_scale, order_shift, order_transitive_compose, sos_unit,
    verify_certificate,
)
from .localization import (
    Localization, TrivialityReport, detect_trivial, localize, nowhere_zero,
    radical_member, saturation_contains,
)
from .galois_spectra import (
    AdjunctionResult, RootEnclosure, ZerosetFilter, adjunction_check,
    certified_sign, check_ideal, closure_check, filter_meet, filter_member,
    hat, ivt_root, point_spectra, prime_filter_split, product_ideal,
    radical_product_vs_intersection, splitting_identity_holds,
    unique_ordering_at_support,
)
from .session import Config, Session, load_config

__all__ = [name for name in dir() if not name.startswith("_")]
