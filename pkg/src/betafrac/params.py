"""Parameter-domain classification and linear transforms for
beta-hypergeometric laws.

A law BH(a,b,p,q,r) has density proportional to
x^(a-1) (1-x)^(b-1) 2F1(p,q;r;x) on (0,1).  This module decides when
that recipe yields a probability law (positivity of the 2F1 factor,
integrability), converts between the classic (a,b,p,q,r) vector and
the theta parameterization in which the p<->q and Euler symmetries
are pair swaps, and applies the exact integer matrices M, Pi, T, S
driving the Moebius-map identity.

Strict inequalities are evaluated with zero tolerance on the raw
floats: silently widening strict sets would corrupt the
iff-characterizations.  Membership in -N uses the shared absolute
tolerance specfun.INT_TOL.
"""

from __future__ import annotations

import json
import math
from dataclasses import dataclass, field
from enum import Enum

import numpy as np

from .errors import DomainError
from .specfun import is_nonpos_int, recip_gamma_sign

__all__ = [
    "ClassicParams",
    "ThetaParams",
    "ExistenceReport",
    "Transform",
    "TRANSFORMS",
    "klein_index",
    "in_set_S",
    "positivity_membership",
    "positivity_case",
    "existence_report",
    "theta_from_classic",
    "classic_from_theta",
    "theta_exists",
    "apply_transform",
    "canonicalize",
    "degenerate_form",
    "DegenerateForm",
]


@dataclass(frozen=True)
class ClassicParams:
    """Shape vector (a,b,p,q,r); validity is a query, not a constructor
    constraint."""

    a: float
    b: float
    p: float
    q: float
    r: float

    def as_array(self) -> np.ndarray:
        return np.array([self.a, self.b, self.p, self.q, self.r], dtype=float)

    @staticmethod
    def from_array(v) -> "ClassicParams":
        a, b, p, q, r = (float(t) for t in v)
        return ClassicParams(a, b, p, q, r)


@dataclass(frozen=True)
class ThetaParams:
    """The 5-vector theta; the law depends only on theta1 and the two
    unordered pairs {theta2,theta3}, {theta4,theta5}."""

    theta1: float
    theta2: float
    theta3: float
    theta4: float
    theta5: float

    def as_array(self) -> np.ndarray:
        return np.array(
            [self.theta1, self.theta2, self.theta3, self.theta4, self.theta5],
            dtype=float,
        )

    @staticmethod
    def from_array(v) -> "ThetaParams":
        t1, t2, t3, t4, t5 = (float(t) for t in v)
        return ThetaParams(t1, t2, t3, t4, t5)

    def sorted_pairs(self) -> "ThetaParams":
        """Representative with theta2<=theta3 and theta4<=theta5."""
        t2, t3 = sorted((self.theta2, self.theta3))
        t4, t5 = sorted((self.theta4, self.theta5))
        return ThetaParams(self.theta1, t2, t3, t4, t5)


# Linear maps between the two parameterizations:
#   theta1 = (a+2b-p-q)/2     theta2 = (2r-a-p-q)/2   theta3 = (-a+p+q)/2
#   theta4 = (a-p+q)/2        theta5 = (a+p-q)/2
# inverted by
#   a = theta4+theta5, b = theta1+theta3, p = theta3+theta5,
#   q = theta3+theta4, r = theta2+theta3+theta4+theta5.
_THETA_FROM_CLASSIC = 0.5 * np.array(
    [
        [1, 2, -1, -1, 0],
        [-1, 0, -1, -1, 2],
        [-1, 0, 1, 1, 0],
        [1, 0, -1, 1, 0],
        [1, 0, 1, -1, 0],
    ],
    dtype=float,
)
_CLASSIC_FROM_THETA = np.array(
    [
        [0, 0, 0, 1, 1],
        [1, 0, 1, 0, 0],
        [0, 0, 1, 0, 1],
        [0, 0, 1, 1, 0],
        [0, 1, 1, 1, 1],
    ],
    dtype=float,
)


def theta_from_classic(v: ClassicParams) -> ThetaParams:
    return ThetaParams.from_array(_THETA_FROM_CLASSIC @ v.as_array())


def classic_from_theta(t: ThetaParams) -> ClassicParams:
    return ClassicParams.from_array(_CLASSIC_FROM_THETA @ t.as_array())


class TransformKind(Enum):
    IDENTITY = "identity"
    T = "T"
    S = "S"
    TS = "TS"
    M = "M"
    PI = "Pi"


@dataclass(frozen=True)
class Transform:
    """One of the exact integer parameter maps.

    T swaps p and q; S is the Euler-transform action
    (a,b,p,q,r) -> (a, r+b-p-q, r-p, r-q, r); {I,T,S,TS} form the
    Klein four-group of representations of one law.  M is the map of
    the Moebius-composition identity and Pi extracts the second-kind
    beta parameters (a+b-p, r-a).
    """

    kind: TransformKind
    matrix: np.ndarray

    def __call__(self, v: ClassicParams):
        return apply_transform(v, self)


def _tmat(rows) -> np.ndarray:
    m = np.array(rows, dtype=int)
    m.setflags(write=False)
    return m


_I5 = _tmat([[1, 0, 0, 0, 0], [0, 1, 0, 0, 0], [0, 0, 1, 0, 0], [0, 0, 0, 1, 0], [0, 0, 0, 0, 1]])
_T = _tmat([[1, 0, 0, 0, 0], [0, 1, 0, 0, 0], [0, 0, 0, 1, 0], [0, 0, 1, 0, 0], [0, 0, 0, 0, 1]])
_S = _tmat([[1, 0, 0, 0, 0], [0, 1, -1, -1, 1], [0, 0, -1, 0, 1], [0, 0, 0, -1, 1], [0, 0, 0, 0, 1]])
_M = _tmat([[-1, 0, 0, 0, 1], [1, 1, -1, 0, 0], [0, 1, -1, -1, 1], [0, 1, 0, 0, 0], [0, 1, 0, -1, 1]])
_PI = _tmat([[1, 1, -1, 0, 0], [-1, 0, 0, 0, 1]])

TRANSFORMS: dict[TransformKind, Transform] = {
    TransformKind.IDENTITY: Transform(TransformKind.IDENTITY, _I5),
    TransformKind.T: Transform(TransformKind.T, _T),
    TransformKind.S: Transform(TransformKind.S, _S),
    TransformKind.TS: Transform(TransformKind.TS, _tmat(_T @ _S)),
    TransformKind.M: Transform(TransformKind.M, _M),
    TransformKind.PI: Transform(TransformKind.PI, _PI),
}


def apply_transform(v: ClassicParams, t: Transform | TransformKind | str):
    """Matrix-vector action; Pi yields the pair (a+b-p, r-a)."""
    if isinstance(t, str):
        t = TRANSFORMS[TransformKind(t)]
    elif isinstance(t, TransformKind):
        t = TRANSFORMS[t]
    out = t.matrix @ v.as_array()
    if t.kind is TransformKind.PI:
        return float(out[0]), float(out[1])
    return ClassicParams.from_array(out)


def klein_index(p: float, q: float, r: float) -> int:
    """X(p,q,r) = E((|p-q| - |r-1| - |r-p-q| + 1)/2).

    E(x) is 0 for x<=1 and the integer N with N < x <= N+1 otherwise.
    The zero count of 2F1(p,q;r;.) on (0,1) is X or X+1.
    """
    x = 0.5 * (abs(p - q) - abs(r - 1.0) - abs(r - p - q) + 1.0)
    if x <= 1.0:
        return 0
    return int(math.ceil(x)) - 1


def in_set_S(x: float, y: float, z: float) -> bool:
    """Sign condition s(x) s(y) s(z) >= 0 on reciprocal-gamma signs."""
    return recip_gamma_sign(x) * recip_gamma_sign(y) * recip_gamma_sign(z) >= 0


def positivity_case(p: float, q: float, r: float) -> int:
    """Number (1-4) of the first positivity clause satisfied, or 0.

    1: r>=1, r-p-q<=0, p,q>=0
    2: r>=1, r-p-q>=0, r-p>=0, r-q>=0
    3: r<1, r-p-q<=0, r-p<=1, r-q<=1, (p,q,r) in S
    4: r<1, r-p-q>=0, p<=1, q<=1, (r-p,r-q,r) in S
    """
    if is_nonpos_int(r):
        raise DomainError("positivity undefined for r in -N")
    s = r - p - q
    if r >= 1.0:
        if s <= 0.0 and p >= 0.0 and q >= 0.0:
            return 1
        if s >= 0.0 and r - p >= 0.0 and r - q >= 0.0:
            return 2
    else:
        if s <= 0.0 and r - p <= 1.0 and r - q <= 1.0 and in_set_S(p, q, r):
            return 3
        if s >= 0.0 and p <= 1.0 and q <= 1.0 and in_set_S(r - p, r - q, r):
            return 4
    return 0


def positivity_membership(p: float, q: float, r: float) -> bool:
    """True iff 2F1(p,q;r;.) is nonnegative throughout (0,1)."""
    return positivity_case(p, q, r) != 0


@dataclass(frozen=True)
class ExistenceReport:
    """Outcome of the parameter-domain tests for one classic vector.

    in_P is the headline existence set (positivity plus a,b,r+b-p-q>0);
    integrable additionally admits the exceptional cases in which a
    terminating 2F1 factor rescues integrability with b<=0 or
    r+b-p-q<=0.  reasons lists machine-checkable rule identifiers: the
    clause that admitted the vector, or every violated condition.
    """

    in_positivity: bool
    klein_index: int
    in_P: bool
    in_Theta: bool
    integrable: bool
    reasons: tuple[str, ...] = field(default_factory=tuple)

    def to_json(self) -> str:
        return json.dumps(
            {
                "schema": 1,
                "in_positivity": self.in_positivity,
                "klein_index": self.klein_index,
                "in_P": self.in_P,
                "in_Theta": self.in_Theta,
                "integrable": self.integrable,
                "reasons": list(self.reasons),
            }
        )


def existence_report(v: ClassicParams) -> ExistenceReport:
    a, b, p, q, r = v.a, v.b, v.p, v.q, v.r
    reasons: list[str] = []
    if is_nonpos_int(r):
        return ExistenceReport(
            False, 0, False, False, False, ("r in -N",)
        )
    case = positivity_case(p, q, r)
    positive = case != 0
    X = klein_index(p, q, r)
    if positive:
        reasons.append(f"positivity-case-{case}")
    else:
        reasons.append("positivity (Thm 2.2) failed")

    cond_a = a > 0.0
    cond_b = b > 0.0
    cond_rb = r + b - p - q > 0.0
    if not cond_a:
        reasons.append("a>0 violated")
    if not cond_b:
        reasons.append("b>0 violated")
    if not cond_rb:
        reasons.append("r+b-p-q>0 violated")
    in_p = positive and cond_a and cond_b and cond_rb

    # Integrability: the generic rule is a,b,r+b-p-q>0; when the
    # effective 2F1 factor terminates, one of b / r+b-p-q may go
    # nonpositive (exceptional integrability).
    s = r - p - q
    integrable = in_p
    if positive and not in_p:
        if s >= 0.0 and (is_nonpos_int(r - p) or is_nonpos_int(r - q)):
            if cond_a and cond_rb:
                integrable = True
                reasons.append("exceptional-integrable (r-p or r-q in -N)")
        elif s <= 0.0 and (is_nonpos_int(p) or is_nonpos_int(q)):
            if cond_a and cond_b:
                integrable = True
                reasons.append("exceptional-integrable (p or q in -N)")

    in_theta = theta_exists(theta_from_classic(v))
    return ExistenceReport(positive, X, in_p, in_theta, integrable, tuple(reasons))


def theta_exists(t: ThetaParams) -> bool:
    """Existence of the law in theta coordinates.

    After sorting theta2<=theta3 and theta4<=theta5:
    theta1+theta2>0 and theta4+theta5>0, plus either r>=1 with
    theta3+theta4>0, or r<1 with theta2+theta5<=1 and
    (theta3+theta4, theta3+theta5, r) in S; r itself outside -N.
    """
    ts = t.sorted_pairs()
    t1, t2, t3, t4, t5 = (
        ts.theta1, ts.theta2, ts.theta3, ts.theta4, ts.theta5,
    )
    r = t2 + t3 + t4 + t5
    if is_nonpos_int(r):
        return False
    if not (t1 + t2 > 0.0 and t4 + t5 > 0.0):
        return False
    if r >= 1.0:
        return t3 + t4 > 0.0
    return t2 + t5 <= 1.0 and in_set_S(t3 + t4, t3 + t5, r)


def canonicalize(v: ClassicParams) -> ClassicParams:
    """Lexicographically smallest of {v, Tv, Sv, TSv}.

    Two vectors with equal canonical form and no degenerate_form
    represent the same law; any total order would do, lexicographic is
    reproducible.
    """
    orbit = [
        apply_transform(v, kind)
        for kind in (
            TransformKind.IDENTITY,
            TransformKind.T,
            TransformKind.S,
            TransformKind.TS,
        )
    ]
    return min(orbit, key=lambda u: tuple(u.as_array()))


class DegenerateKind(Enum):
    NONE = "none"
    BETA = "beta"
    QUASIBETA = "quasibeta"


@dataclass(frozen=True)
class DegenerateForm:
    kind: DegenerateKind
    a: float | None = None
    u: float | None = None
    vslope: float | None = None


def degenerate_form(v: ClassicParams, tol: float = 1e-9) -> DegenerateForm:
    """Detect densities of the shape x^(a-1) (1-x)^(u-1} (1-vx).

    p or q in {0, r} collapses the 2F1 factor to a power of (1-x)
    (beta law); p or q in {-1, r+1} leaves a linear factor 1-vx
    (quasibeta).  Detection tolerance matches the -N membership rule.
    """
    a, b, p, q, r = v.a, v.b, v.p, v.q, v.r

    def near(x: float, y: float) -> bool:
        return abs(x - y) <= tol

    if near(p, 0.0) or near(q, 0.0):
        return DegenerateForm(DegenerateKind.BETA, a=a, u=b)
    if near(p, r):
        return DegenerateForm(DegenerateKind.BETA, a=a, u=b - q)
    if near(q, r):
        return DegenerateForm(DegenerateKind.BETA, a=a, u=b - p)
    if near(p, -1.0):
        return DegenerateForm(DegenerateKind.QUASIBETA, a=a, u=b, vslope=q / r)
    if near(q, -1.0):
        return DegenerateForm(DegenerateKind.QUASIBETA, a=a, u=b, vslope=p / r)
    if near(p, r + 1.0):
        return DegenerateForm(
            DegenerateKind.QUASIBETA, a=a, u=b - q - 1.0, vslope=(r - q) / r
        )
    if near(q, r + 1.0):
        return DegenerateForm(
            DegenerateKind.QUASIBETA, a=a, u=b - p - 1.0, vslope=(r - p) / r
        )
    return DegenerateForm(DegenerateKind.NONE)
