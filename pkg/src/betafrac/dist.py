"""Beta-hypergeometric distributions on (0,1).

Density, normalization constant, CDF/quantile, Mellin-type moments,
inverse-CDF sampling, and the closed-form fixtures used to pin the
numerics against classical identities.

The density is h(x)/I with h = x^(a-1) (1-x)^(b-1) 2F1(p,q;r;x).  All
evaluation goes through a "stable representation": among the defining
series and its Euler twin, prefer a terminating factor and the larger
exponent on (1-x), so the series factor stays bounded and the
endpoint behavior is explicit.  The normalization is the series value
I = B(a,b) 3F2(p,q,a; r,a+b; 1); quadrature of h provides the
independent cross-check.
"""

from __future__ import annotations

import math
from dataclasses import dataclass, field
from typing import Callable

import numpy as np
from numpy.polynomial import chebyshev as _cheb
from scipy.interpolate import PchipInterpolator

from ._tanhsinh import tanh_sinh
from .errors import DomainError
from .params import (
    ClassicParams,
    TransformKind,
    apply_transform,
    existence_report,
    positivity_case,
)
from .specfun import (
    DEFAULT_TOL,
    hyp3f2_at_1,
    is_nonpos_int,
    series_2f1,
    series_2f1_grid,
)

__all__ = [
    "BhDistribution",
    "ClosedFormFixture",
    "unnormalized_density",
    "norm_const",
    "norm_const_quadrature",
    "mellin_moment",
    "closed_form_fixtures",
    "arcsin_sqrt_pushforward",
]


# --- stable density representation -----------------------------------


@dataclass(frozen=True)
class _DensityRep:
    """Series factor and endpoint exponents of one h-representation.

    h(x) = x^(a_eff-1) (1-x)^(b_eff-1) * F(P,Q;R;x)-series value.
    """

    a_eff: float
    b_eff: float
    P: float
    Q: float
    R: float
    terminating: bool


def _density_rep(v: ClassicParams) -> _DensityRep:
    """Pick the representation with bounded series factor.

    Terminating candidates win (polynomial factor, exact); among the
    rest, the sign of r-p-q selects the side whose series converges at
    x=1.  When both candidates terminate, the larger (1-x) exponent
    wins: the other side would cancel catastrophically against its
    singular prefactor.
    """
    a, b, p, q, r = v.a, v.b, v.p, v.q, v.r
    s = r - p - q
    direct = _DensityRep(
        a, b, p, q, r,
        is_nonpos_int(p) or is_nonpos_int(q),
    )
    twin = _DensityRep(
        a, b + s, r - p, r - q, r,
        is_nonpos_int(r - p) or is_nonpos_int(r - q),
    )
    if direct.terminating and twin.terminating:
        return direct if direct.b_eff >= twin.b_eff else twin
    if direct.terminating:
        return direct
    if twin.terminating:
        return twin
    return direct if s >= 0 else twin


def _series_factor_grid(
    rep: _DensityRep, xs: np.ndarray, omxs: np.ndarray, tol: float = DEFAULT_TOL
) -> np.ndarray:
    return series_2f1_grid(rep.P, rep.Q, rep.R, xs, omxs=omxs, tol=tol)


def unnormalized_density(v: ClassicParams, x):
    """h(a,b,p,q,r;x) = x^(a-1) (1-x)^(b-1) 2F1(p,q;r;x), x in (0,1).

    Requires (p,q,r) in the positivity set; a negative series factor
    beyond rounding noise raises, naming the positivity clause that
    had admitted the parameters.
    """
    case = positivity_case(v.p, v.q, v.r)
    if case == 0:
        raise DomainError(
            "2F1 factor is not nonnegative on (0,1): "
            "no positivity clause (cases 1-4) holds for "
            f"(p,q,r)=({v.p},{v.q},{v.r})"
        )
    xs = np.asarray(x, dtype=float)
    scalar = xs.ndim == 0
    xs = np.atleast_1d(xs)
    if np.any((xs <= 0.0) | (xs >= 1.0)):
        raise DomainError("density evaluation requires 0 < x < 1")
    omxs = 1.0 - xs
    rep = _density_rep(v)
    f = _series_factor_grid(rep, xs, omxs)
    if np.any(f < -1e-12 * np.maximum(1.0, np.abs(f).max())):
        raise DomainError(
            f"positivity violated numerically although case {case} admits "
            f"(p,q,r)=({v.p},{v.q},{v.r})"
        )
    h = xs ** (rep.a_eff - 1.0) * omxs ** (rep.b_eff - 1.0) * np.maximum(f, 0.0)
    return float(h[0]) if scalar else h


def _log_density_factor(rep: _DensityRep, x: float, omx: float) -> float:
    """log of x^(a_eff-1)(1-x)^(b_eff-1)*F at one point, -inf if 0."""
    fv = series_2f1(rep.P, rep.Q, rep.R, x, one_minus_x=omx).value
    if fv <= 0.0:
        return -math.inf
    return (
        (rep.a_eff - 1.0) * math.log(x)
        + (rep.b_eff - 1.0) * math.log(omx)
        + math.log(fv)
    )


# --- normalization ----------------------------------------------------


def _beta_fn(a: float, b: float) -> float:
    return math.exp(math.lgamma(a) + math.lgamma(b) - math.lgamma(a + b))


def _norm_series(v: ClassicParams) -> float:
    """I = integral of h via B(a,b) 3F2(p,q,a;r,a+b;1).

    For the exceptional integrable vectors with b<=0 (terminating
    Euler twin), the identical function h is integrated through the
    twin representation, whose own b is positive.
    """
    rep = existence_report(v)
    if not rep.integrable:
        raise DomainError(
            f"BH{tuple(v.as_array())} is not integrable: {', '.join(rep.reasons)}"
        )
    a, b, p, q, r = v.a, v.b, v.p, v.q, v.r
    if not (b > 0.0 and r + b - p - q > 0.0 and not is_nonpos_int(a + b)):
        sv = apply_transform(v, TransformKind.S)
        if sv.b > 0.0 and not is_nonpos_int(sv.a + sv.b):
            a, b, p, q, r = sv.a, sv.b, sv.p, sv.q, sv.r
    res = hyp3f2_at_1(p, q, a, r, a + b)
    return _beta_fn(a, b) * res.value


def norm_const(v: ClassicParams) -> float:
    """The integral I of h over (0,1); the density of BH(v) is h/I."""
    return _norm_series(v)


def norm_const_quadrature(v: ClassicParams, tol: float = 1e-10) -> float:
    """Independent tanh-sinh quadrature of h over (0,1)."""
    rep = _density_rep(v)

    def log_h(x: float, omx: float) -> float:
        return _log_density_factor(rep, x, omx)

    val, _ = tanh_sinh(log_h, tol=tol, max_level=11, log_integrand=True)
    return val


def mellin_moment(v: ClassicParams, s: float, t: float) -> float:
    """E[X^s (1-X)^t] under BH(v) as a ratio of two normalizations.

    The shifted vector (a+s, b+t, p, q, r) must itself be integrable.
    """
    shifted = ClassicParams(v.a + s, v.b + t, v.p, v.q, v.r)
    try:
        upper = _norm_series(shifted)
    except DomainError as exc:
        raise DomainError(
            f"moment shift (s={s}, t={t}) leaves the integrable domain: {exc}"
        ) from exc
    return upper / _norm_series(v)


# --- distribution object ---------------------------------------------


def _gauss_legendre(n: int = 16) -> tuple[np.ndarray, np.ndarray]:
    nodes, weights = np.polynomial.legendre.leggauss(n)
    return 0.5 * (nodes + 1.0), 0.5 * weights


_GL_X, _GL_W = _gauss_legendre(16)


class BhDistribution:
    """A beta-hypergeometric law with cached CDF/quantile machinery.

    Immutable after construction; sampling takes an explicit seed and
    is reentrant, so instances may be shared across threads.
    """

    def __init__(self, params: ClassicParams, u_tail: float = 1e-9):
        self.params = params
        self.report = existence_report(params)
        if not self.report.integrable:
            raise DomainError(
                f"BH{tuple(params.as_array())} does not exist: "
                + ", ".join(self.report.reasons)
            )
        self.rep = _density_rep(params)
        self.norm_const = _norm_series(params)
        self._build_boundary_interp()
        self._build_table(u_tail)

    # series factor F(x), vectorized over both zones
    def _series_factor(self, xs: np.ndarray, omxs: np.ndarray) -> np.ndarray:
        rep = self.rep
        xs = np.asarray(xs, dtype=float)
        omxs = np.asarray(omxs, dtype=float)
        out = np.empty_like(xs)
        if rep.terminating or self._cheb_coef is None:
            return _series_factor_grid(rep, xs, omxs)
        near = omxs < 1e-3
        if np.any(near):
            lv = np.log(np.clip(omxs[near], self._cheb_lo, None))
            u = (lv - self._cheb_mid) / self._cheb_half
            out[near] = _cheb.chebval(np.clip(u, -1.0, 1.0), self._cheb_coef)
        if np.any(~near):
            out[~near] = _series_factor_grid(rep, xs[~near], omxs[~near])
        return out

    def _build_boundary_interp(self, n_nodes: int = 96) -> None:
        """Chebyshev model of the series factor on log(1-x) in
        [log floor, log 1e-3]; the factor is analytic in that variable
        so a short expansion reaches ~1e-12."""
        rep = self.rep
        if rep.terminating:
            self._cheb_coef = None
            self._cheb_lo = 0.0
            return
        lo = math.log(1e-60)
        hi = math.log(1e-3)
        k = np.arange(n_nodes)
        u = np.cos(math.pi * (k + 0.5) / n_nodes)
        lv = 0.5 * (lo + hi) + 0.5 * (hi - lo) * u
        vals = np.array(
            [
                series_2f1(
                    rep.P, rep.Q, rep.R, 1.0 - math.exp(g), one_minus_x=math.exp(g)
                ).value
                for g in lv
            ]
        )
        self._cheb_coef = _cheb.chebfit(u, vals, n_nodes - 1)
        self._cheb_lo = math.exp(lo)
        self._cheb_mid = 0.5 * (lo + hi)
        self._cheb_half = 0.5 * (hi - lo)

    def _h_grid(self, xs: np.ndarray, omxs: np.ndarray) -> np.ndarray:
        rep = self.rep
        f = np.maximum(self._series_factor(xs, omxs), 0.0)
        with np.errstate(divide="ignore", over="ignore"):
            lg = (
                (rep.a_eff - 1.0) * np.log(xs)
                + (rep.b_eff - 1.0) * np.log(omxs)
                + np.log(np.where(f > 0.0, f, np.nan))
            )
        out = np.where(np.isnan(lg), 0.0, np.exp(np.clip(lg, -745.0, 709.0)))
        return out

    def _build_table(self, u_tail: float) -> None:
        """Cumulative integrals of h on geometric panels of (0,1).

        Panel edges are geometric in x on the left half and in 1-x on
        the right half, dense enough that 16-point Gauss-Legendre is
        exact to rounding on each panel; the two extreme panels use
        the power substitutions x = x_min w^(1/a) (resp. in 1-x) that
        absorb the endpoint singularity exactly.
        """
        rep = self.rep
        I = self.norm_const
        a, b = rep.a_eff, rep.b_eff
        # endpoint reach for total tail mass ~ u_tail each side
        f_right = self._series_factor(
            np.array([1.0 - 1e-6]), np.array([1e-6])
        )[0]
        x_min = min(0.01, max(1e-250, (u_tail * a * I) ** (1.0 / a)))
        omx_min = min(
            0.01, max(1e-250, (u_tail * b * I / max(f_right, 1e-300)) ** (1.0 / b))
        )
        left_decades = math.log10(0.5 / x_min)
        right_decades = math.log10(0.5 / omx_min)
        n_left = max(8, int(6 * min(left_decades, 12) + 2 * max(0.0, left_decades - 12)))
        n_right = max(8, int(6 * min(right_decades, 12) + 2 * max(0.0, right_decades - 12)))
        left_edges = np.geomspace(x_min, 0.5, n_left + 1)
        right_edges = 1.0 - np.geomspace(omx_min, 0.5, n_right + 1)[::-1]
        edges = np.concatenate([left_edges, right_edges[1:]])
        omx_edges = np.concatenate(
            [1.0 - left_edges, np.geomspace(omx_min, 0.5, n_right + 1)[::-1][1:]]
        )
        # panel integrals by GL-16
        lo = edges[:-1][:, None]
        hi = edges[1:][:, None]
        xs = lo + (hi - lo) * _GL_X[None, :]
        omx_lo = omx_edges[:-1][:, None]
        omx_hi = omx_edges[1:][:, None]
        omxs = omx_lo + (omx_hi - omx_lo) * _GL_X[None, :]
        hv = self._h_grid(xs.ravel(), omxs.ravel()).reshape(xs.shape)
        panel = np.sum(hv * _GL_W[None, :], axis=1) * (hi - lo).ravel()

        # endpoint masses by power substitution
        m_left = self._tail_mass_left(x_min)
        m_right = self._tail_mass_right(omx_min)
        cum = np.concatenate([[m_left], m_left + np.cumsum(panel)])
        total = cum[-1] + m_right
        self._edges = edges
        self._omx_edges = omx_edges
        self._cum = cum
        self._total_mass = total
        us = cum / total
        xs_tab = edges
        keep = np.concatenate([[True], np.diff(us) > 1e-15])
        self._tab_u = us[keep]
        self._tab_x = xs_tab[keep]
        self._inv_pchip = PchipInterpolator(self._tab_u, self._tab_x)
        self._fwd_pchip = PchipInterpolator(self._tab_x, self._tab_u)

    def _tail_mass_left(self, x0: float) -> float:
        """integral of h over (0, x0] via x = x0 w^(1/a)."""
        a = self.rep.a_eff
        w = _GL_X
        xs = x0 * w ** (1.0 / a)
        xs = np.clip(xs, 1e-300, None)
        g = np.maximum(self._series_factor(xs, 1.0 - xs), 0.0) * (1.0 - xs) ** (
            self.rep.b_eff - 1.0
        )
        return float(x0**a / a * np.sum(_GL_W * g))

    def _tail_mass_right(self, omx0: float) -> float:
        """integral of h over [1-omx0, 1) via 1-x = omx0 w^(1/b)."""
        b = self.rep.b_eff
        w = _GL_X
        omxs = omx0 * w ** (1.0 / b)
        omxs = np.clip(omxs, 1e-300, None)
        xs = 1.0 - omxs
        g = np.maximum(self._series_factor(xs, omxs), 0.0) * xs ** (
            self.rep.a_eff - 1.0
        )
        return float(omx0**b / b * np.sum(_GL_W * g))

    # --- public surface ------------------------------------------------

    def pdf(self, x):
        xs = np.asarray(x, dtype=float)
        scalar = xs.ndim == 0
        xs = np.atleast_1d(xs).copy()
        out = np.zeros_like(xs)
        inside = (xs > 0.0) & (xs < 1.0)
        out[inside] = self._h_grid(xs[inside], 1.0 - xs[inside]) / self._total_mass
        return float(out[0]) if scalar else out

    def cdf(self, x):
        """Exact panel-accumulated CDF (monotone, cdf(0)=0, cdf(1)=1)."""
        xs = np.asarray(x, dtype=float)
        scalar = xs.ndim == 0
        xs = np.atleast_1d(xs)
        out = np.empty_like(xs)
        below = xs <= self._edges[0]
        above = xs >= self._edges[-1]
        mid = ~(below | above)
        a, b = self.rep.a_eff, self.rep.b_eff
        with np.errstate(divide="ignore"):
            out[below] = np.where(
                xs[below] <= 0.0,
                0.0,
                self._cum[0]
                / self._total_mass
                * np.exp(a * (np.log(np.clip(xs[below], 1e-300, None)) - math.log(self._edges[0]))),
            )
            om = 1.0 - xs[above]
            out[above] = np.where(
                xs[above] >= 1.0,
                1.0,
                1.0
                - (self._total_mass - self._cum[-1])
                / self._total_mass
                * np.exp(b * (np.log(np.clip(om, 1e-300, None)) - math.log(self._omx_edges[-1]))),
            )
        if np.any(mid):
            xm = xs[mid]
            idx = np.searchsorted(self._edges, xm, side="right") - 1
            idx = np.clip(idx, 0, len(self._edges) - 2)
            lo = self._edges[idx]
            nodes = lo[:, None] + (xm - lo)[:, None] * _GL_X[None, :]
            omn = 1.0 - nodes
            hv = self._h_grid(nodes.ravel(), omn.ravel()).reshape(nodes.shape)
            part = np.sum(hv * _GL_W[None, :], axis=1) * (xm - lo)
            out[mid] = (self._cum[idx] + part) / self._total_mass
        out = np.clip(out, 0.0, 1.0)
        return float(out[0]) if scalar else out

    def quantile(self, u: float, tol: float = 1e-10) -> float:
        """Inverse CDF to absolute tolerance tol in x (safeguarded
        Newton on the exact CDF)."""
        if not 0.0 < u < 1.0:
            raise DomainError("quantile defined for 0 < u < 1")
        if u <= self._tab_u[0]:
            return float(self._edges[0] * (u / self._tab_u[0]) ** (1.0 / self.rep.a_eff))
        if u >= self._tab_u[-1]:
            rem = (1.0 - u) / (1.0 - self._tab_u[-1])
            return float(1.0 - self._omx_edges[-1] * rem ** (1.0 / self.rep.b_eff))
        x = float(self._inv_pchip(u))
        lo, hi = self._edges[0], self._edges[-1]
        for _ in range(60):
            err = self.cdf(x) - u
            if err > 0:
                hi = min(hi, x)
            else:
                lo = max(lo, x)
            d = self.pdf(x)
            step = err / d if d > 0 else 0.0
            x_new = x - step
            if not lo < x_new < hi:
                x_new = 0.5 * (lo + hi)
            if abs(x_new - x) <= tol:
                return float(x_new)
            x = x_new
        return float(x)

    def sample(self, n: int, seed: int) -> np.ndarray:
        """n i.i.d. draws by inverse CDF on the cached monotone table
        with monotone-cubic local refinement; deterministic per seed."""
        if n < 1:
            raise DomainError("sample size must be >= 1")
        rng = np.random.Generator(np.random.Philox(key=np.uint64(seed)))
        u = rng.random(n)
        return self.quantile_grid_inverse(u)

    def quantile_grid_inverse(self, u: np.ndarray) -> np.ndarray:
        """Vectorized inverse CDF through the cached table."""
        u = np.asarray(u, dtype=float)
        x = np.empty_like(u)
        lo_u, hi_u = self._tab_u[0], self._tab_u[-1]
        low = u <= lo_u
        high = u >= hi_u
        mid = ~(low | high)
        a, b = self.rep.a_eff, self.rep.b_eff
        x[low] = self._edges[0] * (u[low] / lo_u) ** (1.0 / a)
        x[high] = 1.0 - self._omx_edges[-1] * ((1.0 - u[high]) / (1.0 - hi_u)) ** (
            1.0 / b
        )
        x[mid] = self._inv_pchip(u[mid])
        np.clip(x, 1e-300, 1.0 - 1e-16, out=x)
        return x

    @property
    def quantile_grid(self) -> np.ndarray:
        """Cached monotone (u, x) table, strictly increasing in both
        coordinates."""
        return np.column_stack([self._tab_u, self._tab_x])

    def mean(self) -> float:
        return mellin_moment(self.params, 1.0, 0.0)


# --- closed-form fixtures ---------------------------------------------


@dataclass(frozen=True)
class ClosedFormFixture:
    """A classical identity 2F1(p,q;r;x) = closed(x), with a parameter
    vector embedding it into an existing BH law where meaningful."""

    id: str
    f2f1: tuple[float, float, float]
    closed: Callable[[np.ndarray], np.ndarray]
    params: ClassicParams | None = None
    pdf_closed: Callable[[np.ndarray], np.ndarray] | None = None


def closed_form_fixtures(p: float = 0.3) -> list[ClosedFormFixture]:
    """The classical 2F1 identities (trigonometric and algebraic) plus
    the two fully explicit BH densities.

    The trigonometric ones read 2F1(., .; .; sin^2 theta); here they
    are expressed in x = sin^2 theta.  Two of the half-angle-power
    identities and the two-power difference identity circulate in a
    misprinted form; the versions here are the verified ones (each is
    pinned against independent evaluation in the test suite).
    """
    sq = np.sqrt

    def th(x):
        return np.arcsin(sq(x))

    fx: list[ClosedFormFixture] = [
        ClosedFormFixture(
            "cos",
            (p, -p, 0.5),
            lambda x: np.cos(2 * p * th(x)),
            params=ClassicParams(2 * 0.1, 1.0, p, -p, 0.5),
        ),
        ClosedFormFixture(
            "cos-ratio",
            (p, 1 - p, 0.5),
            lambda x: np.cos((2 * p - 1) * th(x)) / np.cos(th(x)),
        ),
        ClosedFormFixture(
            "sin-ratio",
            (p, 1 - p, 1.5),
            lambda x: np.sin((2 * p - 1) * th(x)) / ((2 * p - 1) * np.sin(th(x))),
        ),
        ClosedFormFixture(
            "sin2p",
            (1 + p, 1 - p, 1.5),
            lambda x: np.sin(2 * p * th(x)) / (p * np.sin(2 * th(x))),
        ),
        ClosedFormFixture(
            "half-power-1",
            (p, 0.5 + p, 1 + 2 * p),
            lambda x: np.cos(th(x) / 2.0) ** (-4 * p),
        ),
        ClosedFormFixture(
            "half-power-2",
            (p, 0.5 + p, 2 * p),
            lambda x: np.cos(th(x) / 2.0) ** (2 - 4 * p) / np.cos(th(x)),
        ),
        ClosedFormFixture(
            "theta-sin",
            (0.5, 0.5, 1.5),
            lambda x: th(x) / np.sin(th(x)),
        ),
        ClosedFormFixture(
            "2theta-sin2theta",
            (1.0, 1.0, 1.5),
            lambda x: 2 * th(x) / np.sin(2 * th(x)),
        ),
        ClosedFormFixture(
            "sqrt-sum-pow",
            (p, 0.5 + p, 0.5),
            lambda x: 0.5 / (1 + sq(x)) ** (2 * p) + 0.5 / (1 - sq(x)) ** (2 * p),
        ),
        ClosedFormFixture(
            "sqrt-diff-pow",
            (p, 0.5 + p, 1.5),
            lambda x: ((1 + sq(x)) ** (1 - 2 * p) - (1 - sq(x)) ** (1 - 2 * p))
            / (2 * sq(x) * (1 - 2 * p)),
        ),
        ClosedFormFixture(
            "sqrt-log",
            (1.0, 0.5, 1.5),
            lambda x: np.log((1 + sq(x)) / (1 - sq(x))) / (2 * sq(x)),
        ),
        ClosedFormFixture(
            "log",
            (1.0, 1.0, 2.0),
            lambda x: -np.log1p(-x) / x,
            params=ClassicParams(1, 1, 1, 1, 2),
            pdf_closed=lambda x: (6.0 / math.pi**2) * (-np.log1p(-x)) / x,
        ),
        ClosedFormFixture(
            "bh-two",
            (2.0, 2.0, 4.0),
            lambda x: 6.0 * ((2.0 - x) * (-np.log1p(-x)) - 2.0 * x) / x**3,
            params=ClassicParams(2, 2, 2, 2, 4),
            pdf_closed=lambda x: (2.0 / (10.0 - math.pi**2))
            * (1.0 - x)
            * ((2.0 - x) * (-np.log1p(-x)) - 2.0 * x)
            / x**2,
        ),
    ]
    return fx


def arcsin_sqrt_pushforward(pdf: Callable[[np.ndarray], np.ndarray]):
    """Density on (0, pi/2) of theta = arcsin(sqrt(X)) when X has the
    given density on (0,1): g(theta) = pdf(sin^2 theta) sin(2 theta)."""

    def g(theta):
        theta = np.asarray(theta, dtype=float)
        return pdf(np.sin(theta) ** 2) * np.sin(2.0 * theta)

    return g
