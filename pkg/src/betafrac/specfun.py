"""Hypergeometric building blocks.

Pochhammer symbols, the sign of 1/Gamma, signed log-gamma arithmetic,
2F1 on (0,1) with automatic Euler-transform selection, 3F2 summed at
unity (with nonlinear acceleration for slowly convergent cases), and
the Thomae-invariant T of a 3F2(1).

All gamma arithmetic is carried in (sign, log|.|) pairs so parameter
ranges beyond the overflow point of Gamma (about 170) stay usable.
Every function here is pure; concurrent use is unrestricted.
"""

from __future__ import annotations

import math
from dataclasses import dataclass

import numpy as np
from scipy.special import polygamma

from ._tanhsinh import tanh_sinh, tanh_sinh_log_vec
from .errors import DivergenceError, DomainError

# Absolute tolerance for recognizing membership in -N = {0,-1,-2,...}.
# Inputs are human-entered decimals; exact integers must be recognized.
INT_TOL = 1e-9

DEFAULT_TOL = 1e-13
MAX_TERMS = 10**6

__all__ = [
    "INT_TOL",
    "DEFAULT_TOL",
    "MAX_TERMS",
    "SeriesResult",
    "SignedLogGamma",
    "is_nonpos_int",
    "pochhammer",
    "pochhammer_signed_log",
    "recip_gamma_sign",
    "signed_log_gamma",
    "hyp2f1",
    "hyp2f1_grid",
    "series_2f1",
    "series_2f1_grid",
    "hyp2f1_limit_at_1",
    "hyp3f2_at_1",
    "thomae_T",
    "thomae_map",
]


def is_nonpos_int(x: float, tol: float = INT_TOL) -> bool:
    """True when x lies within tol of an element of {0,-1,-2,...}."""
    return x < 0.5 and abs(x - round(x)) <= tol


@dataclass(frozen=True)
class SignedLogGamma:
    """Gamma(x) stored as sign and log of the absolute value.

    sign is 0 exactly when x is a pole (x in -N); log_abs is then
    meaningless and set to +inf.
    """

    sign: int
    log_abs: float

    def value(self) -> float:
        if self.sign == 0:
            return math.inf
        return self.sign * math.exp(self.log_abs)


@dataclass(frozen=True)
class SeriesResult:
    """Outcome of a truncated series evaluation."""

    value: float
    terms_used: int
    converged: bool
    est_rel_error: float


def pochhammer(t: float, n: int) -> float:
    """Rising factorial (t)_n = t (t+1) ... (t+n-1), exact product.

    No gamma-ratio shortcut: near-integer t must yield the genuinely
    tiny (or zero) product, not a rounded ratio.
    """
    if n < 0:
        raise DomainError("pochhammer order must be a non-negative integer")
    acc = 1.0
    for k in range(n):
        acc *= t + k
        if math.isinf(acc):
            raise OverflowError(
                f"pochhammer({t}, {n}) exceeds double range; "
                "use pochhammer_signed_log"
            )
    return acc + 0.0  # normalizes -0.0


def pochhammer_signed_log(t: float, n: int) -> tuple[int, float]:
    """(sign, log|value|) of the rising factorial; sign 0 means value 0."""
    if n < 0:
        raise DomainError("pochhammer order must be a non-negative integer")
    sign = 1
    log_abs = 0.0
    for k in range(n):
        f = t + k
        if f == 0.0:
            return 0, -math.inf
        if f < 0:
            sign = -sign
        log_abs += math.log(abs(f))
    return sign, log_abs


def recip_gamma_sign(x: float) -> int:
    """s(x) = sign of 1/Gamma(x), with sign(0) = 0.

    +1 for x>0 and on (-2k-2, -2k-1); -1 on (-2k-1, -2k); 0 on -N.
    Integrality is detected within absolute INT_TOL.
    """
    if is_nonpos_int(x):
        return 0
    if x > 0:
        return 1
    m = math.floor(-x)  # x in (-m-1, -m)
    return 1 if m % 2 == 1 else -1


def signed_log_gamma(x: float) -> SignedLogGamma:
    s = recip_gamma_sign(x)
    if s == 0:
        return SignedLogGamma(0, math.inf)
    return SignedLogGamma(s, math.lgamma(x))


def _terminating_order(*params: float) -> int | None:
    """Smallest truncation order if any parameter sits in -N, else None.

    A parameter -m kills every term of index > m, so the series is the
    polynomial of degree m.
    """
    orders = [int(-round(p)) for p in params if is_nonpos_int(p)]
    if not orders:
        return None
    return min(orders)


def _sum_2f1_terminating(p: float, q: float, r: float, x: float, n_cut: int) -> float:
    total = 1.0
    term = 1.0
    for n in range(n_cut):
        term *= (p + n) * (q + n) / ((n + 1.0) * (r + n)) * x
        total += term
    return total


def _sum_2f1(
    p: float, q: float, r: float, x: float, tol: float, max_terms: int
) -> tuple[float, int, bool, float]:
    """Direct power-series sum of 2F1(p,q;r;x) for 0<x<1.

    Stops once the geometric tail bound |term|*x/(1-x) (consecutive
    term ratios tend to x) drops below tol*|sum| for 3 consecutive
    terms.
    """
    total = 1.0
    term = 1.0
    consec = 0
    n = 0
    geo = x / (1.0 - x)
    while n < max_terms:
        term *= (p + n) * (q + n) / ((n + 1.0) * (r + n)) * x
        total += term
        n += 1
        if abs(term) * geo <= tol * abs(total):
            consec += 1
            if consec >= 3:
                break
        else:
            consec = 0
    est = abs(term) * geo / max(abs(total), 1e-300)
    converged = consec >= 3
    return total, n, converged, min(est, tol) if converged else est


# --- Euler-Maclaurin tail summation ---------------------------------
#
# For a hypergeometric term ratio with all shifted parameters positive
# beyond some index M, the term extends to a smooth function of a real
# index,
#     t(m) = t_M * exp(lam(m) - lam(M) + (m - M) log x),
#     lam(m) = sum lgamma(u+m) - sum lgamma(l+m),
# and the tail sum_{n>=M} t(n) follows from Euler-Maclaurin with the
# integral computed by tanh-sinh after the substitution m = M/v.  The
# correction terms use exp-function derivatives (complete Bell
# polynomials in the polygamma values).  This reaches near machine
# precision where partial-sum extrapolation (Aitken/Levin) stalls at
# 1e-8..1e-9 for slowly convergent series.


def _bern_poly_diffs(u: float, l: float) -> tuple[float, float, float, float]:
    """B_{n+1}(u) - B_{n+1}(l) for n=1..4 (Bernoulli polynomials)."""
    b2 = (u * u - u) - (l * l - l)
    b3 = (u**3 - 1.5 * u**2 + 0.5 * u) - (l**3 - 1.5 * l**2 + 0.5 * l)
    b4 = (u**4 - 2.0 * u**3 + u**2) - (l**4 - 2.0 * l**3 + l**2)
    b5 = (u**5 - 2.5 * u**4 + (5.0 / 3.0) * u**3 - u / 6.0) - (
        l**5 - 2.5 * l**4 + (5.0 / 3.0) * l**3 - l / 6.0
    )
    return b2, b3, b4, b5


def _lam(uppers: tuple[float, ...], lowers: tuple[float, ...], m):
    """sum lgamma(u+m) - sum lgamma(l+m), stable for large m.

    Raw lgamma values grow like m log m, so their cancellation noise
    grows with m; beyond m=4096 each (upper, lower) pair is evaluated
    by the asymptotic difference
        lgamma(m+u) - lgamma(m+l) = (u-l) log m
            + sum_n (-1)^(n+1) [B_{n+1}(u)-B_{n+1}(l)] / (n(n+1) m^n)
    through n=4 (uppers and lowers always come in equal numbers).
    Accepts a scalar or an ndarray m.
    """
    if isinstance(m, np.ndarray):
        from scipy.special import gammaln

        out = np.empty_like(m)
        small = m <= 4096.0
        if np.any(small):
            ms = m[small]
            acc = np.zeros_like(ms)
            for u in uppers:
                acc += gammaln(u + ms)
            for l in lowers:
                acc -= gammaln(l + ms)
            out[small] = acc
        if np.any(~small):
            mb = m[~small]
            logm = np.log(mb)
            inv = 1.0 / mb
            acc = np.zeros_like(mb)
            for u, l in zip(sorted(uppers), sorted(lowers)):
                b2, b3, b4, b5 = _bern_poly_diffs(u, l)
                acc += (u - l) * logm + inv * (
                    b2 / 2.0 - inv * (b3 / 6.0 - inv * (b4 / 12.0 - inv * b5 / 20.0))
                )
            out[~small] = acc
        return out
    if m <= 4096.0:
        s = 0.0
        for u in uppers:
            s += math.lgamma(u + m)
        for l in lowers:
            s -= math.lgamma(l + m)
        return s
    logm = math.log(m)
    inv = 1.0 / m
    s = 0.0
    for u, l in zip(sorted(uppers), sorted(lowers)):
        b2, b3, b4, b5 = _bern_poly_diffs(u, l)
        s += (u - l) * logm + inv * (
            b2 / 2.0 - inv * (b3 / 6.0 - inv * (b4 / 12.0 - inv * b5 / 20.0))
        )
    return s


def _em_tail(
    uppers: tuple[float, ...],
    lowers: tuple[float, ...],
    t_start: float,
    m_start: int,
    log_x: float,
) -> tuple[float, float]:
    """sum_{n >= m_start} t_n x^n given t_{m_start} x^{m_start} = t_start.

    Requires u+m_start > 0 and l+m_start > 0 for all parameters and
    log_x <= 0.  Returns (tail, est_abs_error).
    """
    if t_start == 0.0:
        return 0.0, 0.0
    M = float(m_start)
    lam_M = _lam(uppers, lowers, M)
    log_t_abs = math.log(abs(t_start))
    sign = 1.0 if t_start > 0.0 else -1.0
    log_M = math.log(M)

    def log_integrand(v: np.ndarray, omv: np.ndarray) -> np.ndarray:
        # m = M/v, dm = M/v^2 dv
        m = M / v
        with np.errstate(over="ignore", invalid="ignore"):
            return (
                log_t_abs
                + _lam(uppers, lowers, m)
                - lam_M
                + (m - M) * log_x
                + log_M
                - 2.0 * np.log(v)
            )

    integral, int_est = tanh_sinh_log_vec(log_integrand, tol=1e-14, max_level=10)

    # Bell-polynomial derivatives of t = exp(lam + m log x) at M.
    l1 = float(sum(polygamma(0, u + M) for u in uppers)
               - sum(polygamma(0, l + M) for l in lowers)) + log_x
    l2 = float(sum(polygamma(1, u + M) for u in uppers)
               - sum(polygamma(1, l + M) for l in lowers))
    l3 = float(sum(polygamma(2, u + M) for u in uppers)
               - sum(polygamma(2, l + M) for l in lowers))
    l4 = float(sum(polygamma(3, u + M) for u in uppers)
               - sum(polygamma(3, l + M) for l in lowers))
    l5 = float(sum(polygamma(4, u + M) for u in uppers)
               - sum(polygamma(4, l + M) for l in lowers))
    t0 = abs(t_start)
    d1 = t0 * l1
    d3 = t0 * (l1**3 + 3.0 * l1 * l2 + l3)
    d5 = t0 * (
        l1**5 + 10.0 * l1**3 * l2 + 10.0 * l1**2 * l3
        + 15.0 * l1 * l2**2 + 5.0 * l1 * l4 + 10.0 * l2 * l3 + l5
    )
    tail = integral + t0 / 2.0 - d1 / 12.0 + d3 / 720.0 - d5 / 30240.0
    est = abs(d5) / 30240.0 + int_est * abs(integral) + 1e-16 * abs(tail)
    return sign * tail, est


def _em_start_index(uppers: tuple[float, ...], lowers: tuple[float, ...],
                    log_x: float, base: int = 64) -> int:
    """Head length after which the term function is positive, smooth
    and decreasing, so Euler-Maclaurin applies to the tail."""
    m = base
    lo = min(min(uppers), min(lowers))
    if lo < 1.0 - m:
        m = int(math.ceil(1.0 - lo)) + 8
    # ensure decreasing terms at m (ratio < 1)
    while m < 10**7:
        ratio = math.exp(log_x)
        for u in uppers:
            ratio *= u + m
        for l in lowers:
            ratio /= l + m
        if ratio < 0.999999:
            return m
        m *= 2
    return m


def _choose_euler_rep(p: float, q: float, r: float) -> tuple[bool, float, float, float]:
    """Pick the series whose terms decay faster.

    Returns (use_twin, P, Q, R) where the twin carries the prefactor
    (1-x)^(r-p-q).  A terminating side always wins.
    """
    s = r - p - q
    direct_term = _terminating_order(p, q) is not None
    twin_term = _terminating_order(r - p, r - q) is not None
    if direct_term:
        return False, p, q, r
    if twin_term:
        return True, r - p, r - q, r
    if s >= 0:
        return False, p, q, r
    return True, r - p, r - q, r


def series_2f1(
    P: float,
    Q: float,
    R: float,
    x: float,
    tol: float = DEFAULT_TOL,
    max_terms: int = MAX_TERMS,
    one_minus_x: float | None = None,
) -> SeriesResult:
    """The raw series sum_n (P)_n (Q)_n / (n! (R)_n) x^n, no Euler
    selection.

    Terminating series are summed exactly; within 1e-3 of x=1 the
    tail is summed by Euler-Maclaurin, which stays accurate however
    slowly the series converges there.  one_minus_x may be supplied
    when the caller knows 1-x to better than the subtraction gives.
    """
    if is_nonpos_int(R):
        raise DomainError("2F1 undefined: lower parameter in -N")
    omx = one_minus_x if one_minus_x is not None else 1.0 - x
    # either coordinate may round to exactly 1.0 at the far end when
    # the caller supplies the tiny complementary distance
    if not (0.0 < x <= 1.0 and 0.0 < omx <= 1.0):
        raise DomainError("2F1 series evaluation requires 0 < x < 1")
    cut = _terminating_order(P, Q)
    if cut is not None:
        return SeriesResult(_sum_2f1_terminating(P, Q, R, x, cut), cut + 1, True, 0.0)
    if omx >= 1e-3:
        total, n, converged, est = _sum_2f1(P, Q, R, x, tol, max_terms)
        return SeriesResult(total, n, converged, est)

    # Boundary layer: head sum plus Euler-Maclaurin tail of
    # sum t_n x^n with t_n the series coefficients.
    log_x = math.log1p(-omx)
    uppers = (P, Q)
    lowers = (R, 1.0)
    M = _em_start_index(uppers, lowers, log_x)
    while True:
        total = 1.0  # t_0 x^0
        term = 1.0
        for n in range(M - 1):
            term *= (P + n) * (Q + n) / ((n + 1.0) * (R + n)) * x
            total += term
        term *= (P + M - 1) * (Q + M - 1) / (M * (R + M - 1.0)) * x  # t_M x^M
        tail, est_abs = _em_tail(uppers, lowers, term, M, log_x)
        value = total + tail
        est = est_abs / max(abs(value), 1e-300) + 1e-15
        if est <= tol or M * 4 > 16384:
            return SeriesResult(value, M, est <= tol, est)
        M *= 4


def hyp2f1(
    p: float,
    q: float,
    r: float,
    x: float,
    tol: float = DEFAULT_TOL,
    max_terms: int = MAX_TERMS,
    one_minus_x: float | None = None,
) -> SeriesResult:
    """Gauss hypergeometric 2F1(p,q;r;x) on 0<x<1.

    Evaluates whichever of the defining series and its Euler twin
    (r-p, r-q; r) has the larger effective decay exponent r-p-q,
    multiplying back the (1-x)^(r-p-q) prefactor for the twin.
    """
    if is_nonpos_int(r):
        raise DomainError("2F1 undefined: r is a non-positive integer")
    omx = one_minus_x if one_minus_x is not None else 1.0 - x
    use_twin, P, Q, R = _choose_euler_rep(p, q, r)
    res = series_2f1(P, Q, R, x, tol, max_terms, one_minus_x=omx)
    if not use_twin:
        return res
    prefac = omx ** (r - p - q)
    return SeriesResult(prefac * res.value, res.terms_used, res.converged,
                        res.est_rel_error)


def hyp2f1_grid(
    p: float,
    q: float,
    r: float,
    xs: np.ndarray,
    tol: float = DEFAULT_TOL,
    max_terms: int = MAX_TERMS,
) -> np.ndarray:
    """Vectorized 2F1 over an array of abscissas in (0,1).

    Same Euler-twin selection as hyp2f1; intended for dense grids
    (density tables, fixtures, sign scans).  Points that fail to
    converge within max_terms keep their truncated value.
    """
    xs = np.asarray(xs, dtype=float)
    if is_nonpos_int(r):
        raise DomainError("2F1 undefined: r is a non-positive integer")
    use_twin, P, Q, R = _choose_euler_rep(p, q, r)
    out = series_2f1_grid(P, Q, R, xs, tol=tol, max_terms=max_terms)
    if use_twin:
        out = out * (1.0 - xs) ** (r - p - q)
    return out


def series_2f1_grid(
    P: float,
    Q: float,
    R: float,
    xs: np.ndarray,
    omxs: np.ndarray | None = None,
    tol: float = DEFAULT_TOL,
    max_terms: int = MAX_TERMS,
) -> np.ndarray:
    """Vectorized raw series sum_n (P)_n(Q)_n/(n!(R)_n) x^n.

    Points within 1e-3 of x=1 are dispatched to the scalar
    Euler-Maclaurin evaluator; omxs supplies exact 1-x values there.
    """
    xs = np.asarray(xs, dtype=float)
    if omxs is None:
        omxs = 1.0 - xs
    omxs = np.asarray(omxs, dtype=float)
    if np.any((xs <= 0.0) | (omxs <= 0.0)):
        raise DomainError("grid points must lie strictly inside (0,1)")
    if is_nonpos_int(R):
        raise DomainError("2F1 undefined: lower parameter in -N")
    cut = _terminating_order(P, Q)
    out = np.empty_like(xs)
    near = (omxs < 1e-3) if cut is None else np.zeros_like(xs, dtype=bool)
    for i in np.nonzero(near)[0]:
        out[i] = series_2f1(
            P, Q, R, float(xs[i]), tol, max_terms, one_minus_x=float(omxs[i])
        ).value
    sel = ~near
    xv = xs[sel]
    total = np.ones_like(xv)
    term = np.ones_like(xv)
    if cut is not None:
        for n in range(cut):
            term *= (P + n) * (Q + n) / ((n + 1.0) * (R + n)) * xv
            total += term
    elif xv.size:
        geo = xv / omxs[sel]
        n = 0
        consec = 0
        while n < max_terms:
            term *= (P + n) * (Q + n) / ((n + 1.0) * (R + n)) * xv
            total += term
            n += 1
            if n % 16 == 0:
                if np.max(np.abs(term) * geo / np.maximum(np.abs(total), 1e-300)) <= tol:
                    consec += 1
                    if consec >= 2:
                        break
                else:
                    consec = 0
    out[sel] = total
    return out


def hyp2f1_limit_at_1(p: float, q: float, r: float) -> float:
    """Limit of 2F1(p,q;r;x) as x -> 1, valid when r-p-q > 0.

    Gamma(r) Gamma(r-p-q) / (Gamma(r-p) Gamma(r-q)), computed in
    signed-log form; exactly 0 when r-p or r-q is a non-positive
    integer (the reciprocal gamma vanishes there).
    """
    if is_nonpos_int(r):
        raise DomainError("limit undefined: r is a non-positive integer")
    if not r - p - q > 0:
        raise DomainError("2F1 has no finite limit at 1 unless r-p-q > 0")
    grp = signed_log_gamma(r - p)
    grq = signed_log_gamma(r - q)
    if grp.sign == 0 or grq.sign == 0:
        return 0.0
    gr = signed_log_gamma(r)
    gs = signed_log_gamma(r - p - q)
    sign = gr.sign * gs.sign * grp.sign * grq.sign
    return sign * math.exp(gr.log_abs + gs.log_abs - grp.log_abs - grq.log_abs)


def hyp3f2_at_1(
    A: float,
    B: float,
    C: float,
    D: float,
    E: float,
    tol: float = DEFAULT_TOL,
    max_terms: int = MAX_TERMS,
) -> SeriesResult:
    """Generalized hypergeometric 3F2(A,B,C;D,E;x) summed at x=1.

    Terminating series (an upper parameter in -N) are summed exactly
    regardless of the convergence exponent; otherwise the series
    converges iff s = D+E-A-B-C > 0, with terms decaying like
    n^(-1-s).  Fast cases are summed directly; slow ones use a head
    sum plus an Euler-Maclaurin tail, which stays accurate where
    partial-sum extrapolation loses digits.
    """
    cut = _terminating_order(A, B, C)
    pole = _terminating_order(D, E)
    if pole is not None and (cut is None or pole < cut):
        raise DomainError("3F2 undefined: a lower parameter is a non-positive integer")
    if cut is not None:
        total = 1.0
        term = 1.0
        for n in range(cut):
            term *= (A + n) * (B + n) * (C + n) / ((n + 1.0) * (D + n) * (E + n))
            total += term
        return SeriesResult(total, cut + 1, True, 0.0)
    s = D + E - A - B - C
    if s <= 0:
        raise DivergenceError(
            f"3F2 at unity diverges: D+E-A-B-C = {s:.6g} is not positive"
        )

    # Direct pass for comfortably convergent series.  The tail after n
    # terms is asymptotically |term|*n/s (integral comparison).
    total = 1.0
    term = 1.0
    n = 0
    consec = 0
    direct_budget = min(max_terms, 4000)
    while n < direct_budget:
        term *= (A + n) * (B + n) * (C + n) / ((n + 1.0) * (D + n) * (E + n))
        total += term
        n += 1
        if abs(term) * n / s <= tol * abs(total):
            consec += 1
            if consec >= 3:
                return SeriesResult(
                    total, n, True, min(abs(term) * n / s / abs(total), tol)
                )
        else:
            consec = 0

    uppers = (A, B, C)
    lowers = (D, E, 1.0)
    M = _em_start_index(uppers, lowers, 0.0)
    result = None
    while True:
        total = 1.0
        term = 1.0
        for n in range(M - 1):
            term *= (A + n) * (B + n) * (C + n) / ((n + 1.0) * (D + n) * (E + n))
            total += term
        n = M - 1
        term *= (A + n) * (B + n) * (C + n) / ((n + 1.0) * (D + n) * (E + n))
        tail, est_abs = _em_tail(uppers, lowers, term, M, 0.0)
        value = total + tail
        est = est_abs / max(abs(value), 1e-300) + 1e-15
        result = SeriesResult(value, M, est <= tol, est)
        if result.converged or M * 4 > min(max_terms, 16384):
            return result
        M *= 4


def thomae_map(
    A: float, B: float, C: float, D: float, E: float
) -> tuple[float, float, float, float, float]:
    """Argument substitution under which T(A,B,C,D,E) is invariant."""
    return (D - C, E - C, D + E - A - B - C, D + E - A - C, D + E - B - C)


def thomae_T(
    A: float, B: float, C: float, D: float, E: float, tol: float = DEFAULT_TOL
) -> float:
    """T = Gamma(C) * 3F2(A,B,C;D,E;1) / (Gamma(D) Gamma(E)).

    Invariant under thomae_map (and under permutations of upper and of
    lower parameters), computed in signed-log arithmetic.
    """
    gC = signed_log_gamma(C)
    gD = signed_log_gamma(D)
    gE = signed_log_gamma(E)
    if gC.sign == 0:
        raise DomainError("thomae_T: Gamma(C) is not finite")
    if gD.sign == 0 or gE.sign == 0:
        raise DomainError("thomae_T: Gamma(D) or Gamma(E) is not finite")
    F = hyp3f2_at_1(A, B, C, D, E, tol)
    sign = gC.sign * gD.sign * gE.sign
    scale = sign * math.exp(gC.log_abs - gD.log_abs - gE.log_abs)
    return scale * F.value
