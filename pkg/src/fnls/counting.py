"""Brute-force lattice counting for the bilinear and trilinear level sets

    |tau + w(k1) + w(k - k1)|            <= Theta = C 2^{m+n}
    |tau + w(k1) + w(k2) + w(k-k1-k2)|   <= Theta = C 2^{m+n+l}

that control convolutions of dyadic shell projectors, plus the quartic
resonance count in exact integer arithmetic.

Search boxes are derived from proved lower bounds on the level functions,
so every count is exhaustive rather than heuristic:

  * bilinear quartic: after centering at k/2 the level function is
    2 eps^2 (y^2 + c)^2 - D, an increasing function of |y|;
  * bilinear even monomial: centered level minus its minimum dominates y^delta;
  * bilinear odd monomial, |k| >= 1: centered level is 2k * (even polynomial
    with coefficients of one sign), dominating delta |k| y^{delta-1};
  * trilinear quartic: (v(r) - v(0)) / r^2 >= c eps^2 r^2 with the uniform
    constant c = 1/4 (discriminant bound on the radial quadratic), where v is
    the level function in polar coordinates about the minimiser (k/3, k/3).

Suprema over tau use the fact that the count is piecewise constant with
breakpoints at -Theta - level and Theta - level: sorting the level values in
an enumeration window and sliding a width-2*Theta window gives the exact
supremum over that window; a top-band occupancy check grows the window until
the maximiser provably sits inside it.
"""

from __future__ import annotations

import math
from dataclasses import dataclass
from fractions import Fraction
from functools import lru_cache

import numpy as np
from scipy.optimize import minimize_scalar

from .errors import ExactnessError, InconclusiveError, RegimeError
from .spectral import DispersionParams

__all__ = [
    "CountQuery",
    "count_bilinear",
    "sup_tau_bilinear",
    "verify_bilinear_bound",
    "verify_minimizer",
    "count_trilinear",
    "sup_tau_trilinear",
    "verify_trilinear_bound",
    "radial_polynomial_v",
    "radial_v_second_derivative",
    "verify_v_properties",
    "measured_radial_gap_constant",
    "RADIAL_GAP_SAFE_CONSTANT",
    "count_odd_delta",
    "verify_odd_delta_bound",
    "resonance_count",
    "resonance_count_slow",
    "resonance_histogram",
    "resonance_max_count",
    "resonance_growth",
]

# Uniform constant in (v(r) - v(0))/r^2 >= c eps^2 r^2; c = 1/4 follows from
# the discriminant of the radial quadratic and is safe for all theta, k.
RADIAL_GAP_SAFE_CONSTANT = 0.25

DEFAULT_BILINEAR_CONSTANT = 4.0
DEFAULT_TRILINEAR_CONSTANT = 6.0


def _require_real_dispersion(params: DispersionParams, positive: bool = True):
    if params.beta != 0.0:
        raise RegimeError("counting requires real eps")
    if not params.monomial and positive and params.alpha <= 0.0:
        raise RegimeError("quartic counting requires eps > 0")


def w_scalar(x, params: DispersionParams):
    """Dispersion w as a function on the reals (vectorised)."""
    x = np.asarray(x, dtype=float)
    if params.monomial:
        return x**params.delta
    return params.alpha * x**4 + x**2


@dataclass(frozen=True)
class CountQuery:
    """Shell indices, O-constant and optional explicit search box."""

    m: int
    n: int
    params: DispersionParams
    l: int | None = None
    threshold_constant: float | None = None
    box: tuple[int, int] | None = None

    def __post_init__(self):
        if self.m < 0 or self.n < 0 or (self.l is not None and self.l < 0):
            raise ValueError("shell indices must be nonnegative")
        if self.threshold_constant is not None and self.threshold_constant <= 0:
            raise ValueError("threshold constant must be positive")

    @property
    def theta(self) -> float:
        if self.l is None:
            c = self.threshold_constant or DEFAULT_BILINEAR_CONSTANT
            return c * 2.0 ** (self.m + self.n)
        c = self.threshold_constant or DEFAULT_TRILINEAR_CONSTANT
        return c * 2.0 ** (self.m + self.n + self.l)


def _bilinear_halfwidth(tau: float, k: int, theta: float, params: DispersionParams) -> float:
    """Halfwidth around k/2 provably containing {k1: |tau + w(k1)+w(k-k1)| <= theta}."""
    reach = theta + abs(tau)
    if params.monomial:
        d, kk = params.delta, abs(k)
        if d % 2 == 0:
            return (reach + 2.0 * (kk / 2.0) ** d) ** (1.0 / d) + 1.0
        if kk == 0:
            raise InconclusiveError(
                "odd monomial level set with k = 0 is degenerate (identically zero)"
            )
        return (reach / (d * kk)) ** (1.0 / (d - 1)) + 1.0
    a = params.alpha
    dd = a * k**4 + k**2 + 1.0 / (2.0 * a)
    c = 0.5 * (1.0 / a + 1.5 * k**2)
    bound = (reach + dd) / (2.0 * a)
    if bound < 0:
        return 0.0
    y2 = math.sqrt(bound) - c
    return math.sqrt(y2) + 1.0 if y2 > 0 else 0.0


def _bilinear_candidates(tau: float, k: int, theta: float, params: DispersionParams, box=None):
    hw = _bilinear_halfwidth(tau, k, theta, params)
    lo = math.ceil(k / 2.0 - hw)
    hi = math.floor(k / 2.0 + hw)
    if box is not None:
        blo, bhi = box
        if blo > lo or bhi < hi:
            raise InconclusiveError(
                f"search box [{blo}, {bhi}] may miss solutions; require [{lo}, {hi}]",
                required=(lo, hi),
            )
        lo, hi = blo, bhi
    return np.arange(lo, hi + 1, dtype=np.int64)


def count_bilinear(query: CountQuery, tau: float, k: int) -> int:
    """|{k1 in Z : |tau + w(k1) + w(k - k1)| <= Theta}| by exhaustive scan of
    a provably sufficient box."""
    _require_real_dispersion(query.params)
    theta = query.theta
    k1 = _bilinear_candidates(tau, k, theta, query.params, query.box)
    if k1.size == 0:
        return 0
    levels = w_scalar(k1, query.params) + w_scalar(k - k1, query.params)
    return int(np.count_nonzero(np.abs(tau + levels) <= theta))


def _sliding_window_max(values: np.ndarray, width: float):
    """Max number of sorted values inside a closed window of given width,
    and the left edge of a maximising window."""
    right = np.searchsorted(values, values + width, side="right")
    counts = right - np.arange(values.size)
    i = int(np.argmax(counts))
    return int(counts[i]), float(values[i])


def _sup_tau_from_levels(level_fn, v_min: float, theta: float, cap0: float = 8.0):
    """Exact sup_tau count given an enumerator of level values below a cap.

    level_fn(cap) must return all lattice level values v <= v_min + cap*theta.
    The cap doubles until the best window no longer touches the top band,
    so the returned supremum is attained inside the enumerated range.
    """
    cap = cap0
    for _ in range(8):
        vals = np.sort(level_fn(cap))
        if vals.size == 0:
            return 0, 0.0
        best, left = _sliding_window_max(vals, 2.0 * theta)
        top = v_min + (cap - 2.0) * theta
        in_top_band = int(np.count_nonzero(vals >= top))
        if in_top_band < best and left + 2.0 * theta < top:
            return best, -(left + theta)
        cap *= 2.0
    raise InconclusiveError("sup_tau enumeration cap did not stabilise")


def sup_tau_bilinear(query: CountQuery, k: int):
    """(sup over tau of count_bilinear, a maximising tau), computed from the
    exact breakpoints of the piecewise-constant count."""
    _require_real_dispersion(query.params)
    theta = query.theta
    p = query.params
    if p.monomial:
        v_min = 2.0 * (abs(k) / 2.0) ** p.delta if p.delta % 2 == 0 else w_scalar(0, p) + w_scalar(k, p)
    else:
        v_min = p.alpha * k**4 / 8.0 + k**2 / 2.0

    def level_fn(cap):
        k1 = _bilinear_candidates(-v_min, k, cap * theta, p)
        levels = w_scalar(k1, p) + w_scalar(k - k1, p)
        return levels[levels <= v_min + cap * theta]

    return _sup_tau_from_levels(level_fn, v_min, theta)


@dataclass
class BoundReport:
    rows: list
    empirical_constant: float
    by_total: dict
    stable: bool


def verify_bilinear_bound(
    params: DispersionParams,
    min_total: int = 6,
    max_total: int = 12,
    k_values=(0, 1, 2, 3, 5, 8, 16),
    threshold_constant: float = DEFAULT_BILINEAR_CONSTANT,
) -> BoundReport:
    """sup_{tau,k} count / (eps^{-1/2} 2^{(m+n)/4}) over shells, with a
    stability verdict (each per-total maximum within +-20% of the median).

    In pure-power mode the normaliser is 2^{(m+n)/delta}.
    """
    _require_real_dispersion(params)
    rows = []
    by_total: dict[int, float] = {}
    for total in range(min_total, max_total + 1):
        best_ratio = 0.0
        for m in range(total + 1):
            n = total - m
            q = CountQuery(m=m, n=n, params=params, threshold_constant=threshold_constant)
            for k in k_values:
                sup, tau_star = sup_tau_bilinear(q, k)
                if params.monomial:
                    norm = 2.0 ** (total / params.delta)
                else:
                    norm = params.alpha**-0.25 * 2.0 ** (total / 4.0)
                ratio = sup / norm
                rows.append((m, n, k, sup, tau_star, ratio))
                best_ratio = max(best_ratio, ratio)
        by_total[total] = best_ratio
    med = float(np.median(list(by_total.values())))
    stable = all(0.8 * med <= v <= 1.2 * med for v in by_total.values())
    return BoundReport(rows, max(by_total.values()), by_total, stable)


@dataclass
class MinimizerVerdict:
    k: int
    argmin: float
    passed: bool
    scan_argmin: float
    derivative_sign_change: bool
    pointwise_inequality: bool | None


def _level_derivative(x, k, params: DispersionParams):
    """d/dx [w(x) + w(k - x)], analytic."""
    if params.monomial:
        d = params.delta
        return d * x ** (d - 1) - d * (k - x) ** (d - 1)
    a = params.alpha
    return (4.0 * a * x**3 + 2.0 * x) - (4.0 * a * (k - x) ** 3 + 2.0 * (k - x))


def verify_minimizer(k: int, params: DispersionParams, scan_halfwidth: int = 50) -> MinimizerVerdict:
    """Check that x -> w(x) + w(k - x) attains its global minimum at x = k/2,
    by golden-section search polished by bisection of the analytic derivative
    (value-only search bottoms out at sqrt(machine eps) positional accuracy),
    and by a derivative sign change; for even monomials additionally check the
    centered pointwise domination
    w(y + k/2) + w(k/2 - y) - 2 (k/2)^delta >= y^delta on |y| <= 1000."""
    _require_real_dispersion(params)
    if params.monomial and params.delta % 2 == 1:
        raise RegimeError("minimiser check applies to even dispersion only")

    def f(x):
        return float(w_scalar(x, params) + w_scalar(k - x, params))

    res = minimize_scalar(
        f, bracket=(k / 2.0 - 2.0, k / 2.0 + 0.37, k / 2.0 + 2.0), method="golden",
        options={"xtol": 1e-12},
    )
    coarse = float(res.x)
    lo, hi = coarse - 1e-3, coarse + 1e-3
    if _level_derivative(lo, k, params) < 0 < _level_derivative(hi, k, params):
        for _ in range(60):
            mid = 0.5 * (lo + hi)
            if _level_derivative(mid, k, params) < 0:
                lo = mid
            else:
                hi = mid
        argmin = 0.5 * (lo + hi)
    else:
        argmin = coarse

    xs = k / 2.0 + np.linspace(-scan_halfwidth, scan_halfwidth, 4 * scan_halfwidth + 1)
    vals = w_scalar(xs, params) + w_scalar(k - xs, params)
    scan_argmin = float(xs[np.argmin(vals)])

    sign_change = (
        _level_derivative(k / 2.0 - 0.1, k, params) < 0
        < _level_derivative(k / 2.0 + 0.1, k, params)
    )

    pointwise = None
    if params.monomial:
        y = np.arange(-1000, 1001, dtype=float)
        lhs = w_scalar(y + k / 2.0, params) + w_scalar(k / 2.0 - y, params) - 2.0 * (k / 2.0) ** params.delta
        pointwise = bool(np.all(lhs >= np.abs(y) ** params.delta - 1e-9))

    passed = (
        abs(argmin - k / 2.0) <= 1e-10 * max(1.0, abs(k))
        and abs(scan_argmin - k / 2.0) <= 0.5
        and sign_change
        and (pointwise is not False)
    )
    return MinimizerVerdict(k, argmin, passed, scan_argmin, sign_change, pointwise)


# ---------------------------------------------------------------------------
# trilinear level sets
# ---------------------------------------------------------------------------


def trilinear_minimum(k: int, params: DispersionParams) -> float:
    """Global minimum k^2 (eps^2 k^2 + 9)/27 of w(k1)+w(k2)+w(k-k1-k2), at (k/3, k/3)."""
    return k**2 * (params.alpha * k**2 + 9.0) / 27.0


def _trilinear_pairs(k: int, radius: float):
    c = k / 3.0
    lo, hi = math.ceil(c - radius), math.floor(c + radius)
    r = np.arange(lo, hi + 1, dtype=np.int64)
    k1, k2 = np.meshgrid(r, r, indexing="ij")
    mask = (k1 - c) ** 2 + (k2 - c) ** 2 <= radius**2
    return k1[mask], k2[mask]


def _verified_gap_constant(params: DispersionParams, c_lower: float | None) -> float:
    if c_lower is None:
        return RADIAL_GAP_SAFE_CONSTANT
    measured = measured_radial_gap_constant(params.alpha)
    if c_lower > measured:
        raise InconclusiveError(
            f"lower-bound constant {c_lower} exceeds the verified value {measured:.6g}",
            required=measured,
        )
    return c_lower


def count_trilinear(
    tau: float,
    k: int,
    query: CountQuery,
    c_lower: float | None = None,
) -> int:
    """|{(k1,k2) in Z^2 : |tau + w(k1)+w(k2)+w(k-k1-k2)| <= Theta}| over a disk
    of radius ((Theta + |tau + v_min|)/(c eps^2))^{1/4} about (k/3, k/3)."""
    _require_real_dispersion(params=query.params)
    if query.params.monomial:
        raise RegimeError("trilinear counting implemented for the quartic law")
    if query.l is None:
        raise ValueError("trilinear query needs all three shell indices")
    theta = query.theta
    c = _verified_gap_constant(query.params, c_lower)
    v_min = trilinear_minimum(k, query.params)
    radius = ((theta + abs(tau + v_min)) / (c * query.params.alpha)) ** 0.25 + 1.5
    k1, k2 = _trilinear_pairs(k, radius)
    levels = (
        w_scalar(k1, query.params)
        + w_scalar(k2, query.params)
        + w_scalar(k - k1 - k2, query.params)
    )
    return int(np.count_nonzero(np.abs(tau + levels) <= theta))


def sup_tau_trilinear(query: CountQuery, k: int, c_lower: float | None = None):
    """(sup over tau of count_trilinear, a maximising tau)."""
    _require_real_dispersion(query.params)
    if query.l is None:
        raise ValueError("trilinear query needs all three shell indices")
    theta = query.theta
    c = _verified_gap_constant(query.params, c_lower)
    v_min = trilinear_minimum(k, query.params)
    a = query.params.alpha

    def level_fn(cap):
        radius = (cap * theta / (c * a)) ** 0.25 + 1.5
        k1, k2 = _trilinear_pairs(k, radius)
        levels = (
            w_scalar(k1, query.params)
            + w_scalar(k2, query.params)
            + w_scalar(k - k1 - k2, query.params)
        )
        return levels[levels <= v_min + cap * theta]

    return _sup_tau_from_levels(level_fn, v_min, theta)


def verify_trilinear_bound(
    params: DispersionParams,
    min_total: int = 6,
    max_total: int = 12,
    k_values=(0, 1, 3),
    threshold_constant: float = DEFAULT_TRILINEAR_CONSTANT,
) -> BoundReport:
    """sup count / (eps^{-1} 2^{(m+n+l)/2}) over shell triples with the same
    +-20% stability verdict as the bilinear report."""
    _require_real_dispersion(params)
    rows = []
    by_total: dict[int, float] = {}
    eps = math.sqrt(params.alpha)
    for total in range(min_total, max_total + 1):
        best = 0.0
        for m in range(total + 1):
            for n in range(total - m + 1):
                l = total - m - n
                q = CountQuery(
                    m=m, n=n, l=l, params=params, threshold_constant=threshold_constant
                )
                for k in k_values:
                    sup, tau_star = sup_tau_trilinear(q, k)
                    ratio = sup / (eps**-1 * 2.0 ** (total / 2.0))
                    rows.append((m, n, l, k, sup, tau_star, ratio))
                    best = max(best, ratio)
        by_total[total] = best
    med = float(np.median(list(by_total.values())))
    stable = all(0.8 * med <= v <= 1.2 * med for v in by_total.values())
    return BoundReport(rows, max(by_total.values()), by_total, stable)


def radial_polynomial_v(r, theta, k, params: DispersionParams):
    """The trilinear level function in polar coordinates about (k/3, k/3):

    v(r) = (r^2/12) [ 3 eps^2 (9 - cos 4t + 8 sin 2t) r^2
                      - 12 eps^2 k (cos t - cos 3t + sin t + sin 3t) r
                      + (8 eps^2 k^2 + 12)(sin 2t + 2) ]
           + (k^2/27)(eps^2 k^2 + 9).
    """
    _require_real_dispersion(params)
    r = np.asarray(r, dtype=float)
    t = np.asarray(theta, dtype=float)
    a = params.alpha
    big_p = 9.0 - np.cos(4 * t) + 8.0 * np.sin(2 * t)
    big_q = np.cos(t) - np.cos(3 * t) + np.sin(t) + np.sin(3 * t)
    big_s = np.sin(2 * t) + 2.0
    return (r**2 / 12.0) * (
        3.0 * a * big_p * r**2 - 12.0 * a * k * big_q * r + (8.0 * a * k**2 + 12.0) * big_s
    ) + k**2 * (a * k**2 + 9.0) / 27.0


def radial_v_second_derivative(r, theta, k, params: DispersionParams):
    """d^2 v / dr^2 = 6 eps^2 (sin 2t + 2)^2 r^2
    + 6 eps^2 k (cos 3t - sin t - sin 3t - cos t) r + (4/3 eps^2 k^2 + 2)(sin 2t + 2)."""
    _require_real_dispersion(params)
    r = np.asarray(r, dtype=float)
    t = np.asarray(theta, dtype=float)
    a = params.alpha
    return (
        6.0 * a * (np.sin(2 * t) + 2.0) ** 2 * r**2
        + 6.0 * a * k * (np.cos(3 * t) - (np.sin(t) + np.sin(3 * t) + np.cos(t))) * r
        + ((4.0 / 3.0) * a * k**2 + 2.0) * (np.sin(2 * t) + 2.0)
    )


@dataclass
class RadialReport:
    min_second_derivative: float
    measured_gap_constant: float
    passed: bool


@lru_cache(maxsize=16)
def measured_radial_gap_constant(alpha: float, k_max: int = 20, r_max: float = 50.0) -> float:
    """min over a sample grid of (v(r) - v(0)) / (eps^2 r^4); the analytic
    floor 1/4 is always available independently of the sample."""
    params = DispersionParams(alpha)
    thetas = np.linspace(0.0, 2.0 * np.pi, 721)
    rs = np.linspace(0.05, r_max, 400)
    best = math.inf
    for k in range(-k_max, k_max + 1):
        v = radial_polynomial_v(rs[None, :], thetas[:, None], k, params)
        gap = (v - trilinear_minimum(k, params)) / (alpha * rs[None, :] ** 4)
        best = min(best, float(gap.min()))
    return best


def verify_v_properties(
    params: DispersionParams,
    k_max: int = 20,
    r_max: float = 50.0,
    theta_points: int = 721,
    r_points: int = 400,
) -> RadialReport:
    """Sampled convexity (v'' >= -1e-9) and the largest uniform constant in
    (v - v(0))/r^2 >= c eps^2 r^2 over the grid."""
    _require_real_dispersion(params)
    thetas = np.linspace(0.0, 2.0 * np.pi, theta_points)
    rs = np.linspace(0.0, r_max, r_points)
    min_vpp = math.inf
    best_c = math.inf
    for k in range(-k_max, k_max + 1):
        vpp = radial_v_second_derivative(rs[None, :], thetas[:, None], k, params)
        min_vpp = min(min_vpp, float(vpp.min()))
        rpos = rs[rs > 0]
        v = radial_polynomial_v(rpos[None, :], thetas[:, None], k, params)
        gap = (v - trilinear_minimum(k, params)) / (params.alpha * rpos[None, :] ** 4)
        best_c = min(best_c, float(gap.min()))
    return RadialReport(min_vpp, best_c, passed=(min_vpp >= -1e-9 and best_c > 0))


# ---------------------------------------------------------------------------
# odd monomial split
# ---------------------------------------------------------------------------


@dataclass
class OddDeltaCount:
    a: float
    high_branch: bool
    low_count_bound: int
    high_count: int | None


def count_odd_delta(
    tau: float,
    k: int,
    m: int,
    n: int,
    delta: int,
    a: float | None = None,
    threshold_constant: float = DEFAULT_BILINEAR_CONSTANT,
) -> OddDeltaCount:
    """Low/high frequency split for odd monomial dispersion: |k| <= 2^a is
    accounted by the trivial cardinality bound, |k| > 2^a is counted through
    the even-part expansion of w(k1) + w(k-k1).  Default split a = (m+n)/delta
    equates the two contributions."""
    if delta < 3 or delta % 2 == 0:
        raise ValueError("odd delta >= 3 required")
    if a is None:
        a = (m + n) / delta
    theta = threshold_constant * 2.0 ** (m + n)
    low_bound = 2 * int(math.floor(2.0**a)) + 1
    if abs(k) <= 2.0**a:
        return OddDeltaCount(a, False, low_bound, None)
    params = DispersionParams.pure_power(delta)
    k1 = _bilinear_candidates(tau, k, theta, params)
    levels = w_scalar(k1, params) + w_scalar(k - k1, params)
    high = int(np.count_nonzero(np.abs(tau + levels) <= theta))
    return OddDeltaCount(a, True, low_bound, high)


@dataclass
class OddDeltaReport:
    delta: int
    slope_m: float
    slope_n: float
    expected_m: float
    expected_n: float
    rows: list


def verify_odd_delta_bound(
    delta: int = 3,
    m_values=(2, 4, 6, 8, 10),
    n_values=(2, 4, 6, 8, 10),
    threshold_constant: float = DEFAULT_BILINEAR_CONSTANT,
) -> OddDeltaReport:
    """Regress the combined low/high bound proxy

        B(m,n) = max( 2^{(a+m)/2}, (2^m * sup_tau high count)^{1/2} ),  a = (m+n)/delta,

    against m and n; the exponents should reproduce ((delta+1)/(2 delta), 1/(2 delta))."""
    params = DispersionParams.pure_power(delta)

    def bound_proxy(m, n):
        a = (m + n) / delta
        theta = threshold_constant * 2.0 ** (m + n)
        k = int(math.floor(2.0**a)) + 1
        v0 = float(w_scalar(0, params) + w_scalar(k, params))

        def level_fn(cap):
            k1 = _bilinear_candidates(-v0, k, cap * theta, params)
            levels = w_scalar(k1, params) + w_scalar(k - k1, params)
            return levels[levels <= v0 + cap * theta]

        sup, _ = _sup_tau_from_levels(level_fn, v0, theta)
        low = 2.0 ** ((a + m) / 2.0)
        high = math.sqrt(2.0**m * max(sup, 1))
        return max(low, high)

    rows = []
    n_fix = n_values[len(n_values) // 2]
    bm = [bound_proxy(m, n_fix) for m in m_values]
    slope_m = float(np.polyfit(m_values, np.log2(bm), 1)[0])
    m_fix = m_values[len(m_values) // 2]
    bn = [bound_proxy(m_fix, n) for n in n_values]
    slope_n = float(np.polyfit(n_values, np.log2(bn), 1)[0])
    for m, v in zip(m_values, bm):
        rows.append(("m-sweep", m, n_fix, v))
    for n, v in zip(n_values, bn):
        rows.append(("n-sweep", m_fix, n, v))
    return OddDeltaReport(
        delta,
        slope_m,
        slope_n,
        expected_m=(delta + 1) / (2.0 * delta),
        expected_n=1.0 / (2.0 * delta),
        rows=rows,
    )


# ---------------------------------------------------------------------------
# quartic resonance counts (exact integer arithmetic)
# ---------------------------------------------------------------------------


def _rational_eps_squared(params: DispersionParams | None, eps_squared) -> Fraction:
    if eps_squared is not None:
        return Fraction(eps_squared)
    if params is None:
        raise ValueError("provide params or eps_squared")
    if params.beta != 0.0 or params.monomial:
        raise ExactnessError("resonance counting needs a rational real eps^2")
    return Fraction(params.alpha)  # floats are exact dyadic rationals


def _resonance_values(N: int, n: int, p: int, q: int) -> np.ndarray:
    """Values p*(k1^4+k2^4+k3^4) + q*(k1^2+k2^2+k3^2), k3 = n-k1-k2, int64."""
    kmax = abs(n) + 2 * N
    worst = 3 * abs(p) * kmax**4 + 3 * q * kmax**2
    r = np.arange(-N, N + 1, dtype=np.int64)
    k1, k2 = np.meshgrid(r, r, indexing="ij")
    k3 = n - k1 - k2
    if worst < 2**62:
        s4 = k1**4 + k2**4 + k3**4
        s2 = k1**2 + k2**2 + k3**2
        return (p * s4 + q * s2).ravel()
    # exact object-integer fallback for huge N
    k1o = k1.astype(object)
    k2o = k2.astype(object)
    k3o = k3.astype(object)
    return (p * (k1o**4 + k2o**4 + k3o**4) + q * (k1o**2 + k2o**2 + k3o**2)).ravel()


def resonance_count(
    N: int,
    n: int,
    j: int,
    params: DispersionParams | None = None,
    eps_squared=None,
) -> int:
    """r_{N,n,j} = |{(k1,k2): |k_i| <= N, eps^2 sum k_i^4 + sum k_i^2 = j}|
    with k3 = n - k1 - k2, in exact integer arithmetic after clearing the
    denominator of eps^2 = p/q."""
    e2 = _rational_eps_squared(params, eps_squared)
    vals = _resonance_values(N, n, e2.numerator, e2.denominator)
    return int(np.count_nonzero(vals == e2.denominator * j))


def resonance_count_slow(N: int, n: int, j: int, eps_squared) -> int:
    """Independent enumeration order (row-major Python loop) for cross-checks."""
    e2 = Fraction(eps_squared)
    p, q = e2.numerator, e2.denominator
    target = q * j
    count = 0
    for k2 in range(-N, N + 1):
        for k1 in range(-N, N + 1):
            k3 = n - k1 - k2
            if p * (k1**4 + k2**4 + k3**4) + q * (k1**2 + k2**2 + k3**2) == target:
                count += 1
    return count


def resonance_histogram(
    N: int, n: int, params: DispersionParams | None = None, eps_squared=None
):
    """(levels j, counts r_{N,n,j}) for all attained integer levels."""
    e2 = _rational_eps_squared(params, eps_squared)
    q = e2.denominator
    vals = _resonance_values(N, n, e2.numerator, q)
    uniq, counts = np.unique(vals, return_counts=True)
    mask = uniq % q == 0
    return (uniq[mask] // q), counts[mask]


def resonance_max_count(N: int, n: int, params=None, eps_squared=None) -> int:
    _, counts = resonance_histogram(N, n, params, eps_squared)
    return int(counts.max())


def resonance_growth(N_values, n: int, params=None, eps_squared=None):
    """max_j r_{N,n,j} along a sweep of box sizes."""
    return [(int(N), resonance_max_count(int(N), n, params, eps_squared)) for N in N_values]
