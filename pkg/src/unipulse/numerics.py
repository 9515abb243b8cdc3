"""Low-level numerical kernels shared by every other module.

Provides the upper-half-plane complex square root, the Bessel function
J0, adaptive Gauss-Kronrod quadrature for complex-valued integrands on
finite and semi-infinite intervals, and polynomial limit extrapolation
for sequences v(h) -> v0 as h -> 0.
"""

from __future__ import annotations

import cmath
import heapq
import math
from dataclasses import dataclass
from typing import Callable, Sequence

_EPS = 2.220446049250313e-16


class ToleranceNotReached(Exception):
    """Quadrature ran out of budget before meeting its tolerance.

    ``result`` holds the best estimate obtained so far (may be None for
    composite operations that cannot produce a partial value).
    """

    def __init__(self, message: str, result: "QuadratureResult | None" = None):
        super().__init__(message)
        self.result = result


class ExtrapolationUnstable(Exception):
    """Successive limit extrapolants diverge instead of settling."""


@dataclass(frozen=True)
class QuadratureResult:
    value: complex
    error_estimate: float
    evaluations: int


@dataclass(frozen=True)
class ExtrapolationResult:
    value: complex
    stability: float


def complex_sqrt_upper(w: complex) -> complex:
    """Square root of ``w`` on the branch with nonnegative imaginary part.

    Real w >= 0 maps to the nonnegative real root; real w < 0 maps to
    +i*sqrt(|w|).  Signed-zero imaginary parts are treated as zero so
    that values on the negative real axis never fall on the lower side
    of the cut.
    """
    w = complex(w)
    if not (math.isfinite(w.real) and math.isfinite(w.imag)):
        raise ValueError(f"complex_sqrt_upper requires finite input, got {w!r}")
    if w.imag == 0.0:
        if w.real >= 0.0:
            return complex(math.sqrt(w.real), 0.0)
        return complex(0.0, math.sqrt(-w.real))
    r = cmath.sqrt(w)
    return -r if r.imag < 0.0 else r


# --- Bessel J0 ---------------------------------------------------------
#
# Two regimes: a Maclaurin series below 8 and the Hankel large-argument
# form sqrt(2/(pi x)) [P(x) cos(x - pi/4) - Q(x) sin(x - pi/4)] beyond,
# with P and Q evaluated from rational fits in 25/x^2 (coefficients from
# the public-domain Cephes library).  Absolute error stays below 1e-12
# for |x| <= 1e4.

_PP = (
    7.96936729297347051624e-4,
    8.28352392107440799803e-2,
    1.23953371646414299388e0,
    5.44725003058768775090e0,
    8.74716500199817011941e0,
    5.30324038235394892183e0,
    9.99999999999999997821e-1,
)
_PQ = (
    9.24408810558863637013e-4,
    8.56288474354474431428e-2,
    1.25352743901058953537e0,
    5.47097740330417105182e0,
    8.76190883237069594232e0,
    5.30605288235394617618e0,
    1.00000000000000000218e0,
)
_QP = (
    -1.13663838898469149931e-2,
    -1.28252718670509318512e0,
    -1.95539544257735972385e1,
    -9.32060152123768231369e1,
    -1.77681167980488050595e2,
    -1.47077505154951170175e2,
    -5.14105326766599330220e1,
    -6.05014350600728481186e0,
)
_QQ = (
    # leading coefficient 1.0 implicit
    6.43178256118178023184e1,
    8.56430025976980587198e2,
    3.88240183605401609683e3,
    7.24046774195652478189e3,
    5.93072701187316984827e3,
    2.06209331660327847417e3,
    2.42005740240291393179e2,
)
_SQ2OPI = 7.9788456080286535587989e-1


def _polevl(x: float, coef) -> float:
    ans = coef[0]
    for c in coef[1:]:
        ans = ans * x + c
    return ans


def _p1evl(x: float, coef) -> float:
    ans = x + coef[0]
    for c in coef[1:]:
        ans = ans * x + c
    return ans


def bessel_j0(x: float) -> float:
    """Bessel function of the first kind, order zero.  Even in x."""
    x = float(x)
    if not math.isfinite(x):
        raise ValueError(f"bessel_j0 requires finite input, got {x!r}")
    x = abs(x)
    if x < 8.0:
        q = 0.25 * x * x
        term = 1.0
        total = 1.0
        for k in range(1, 40):
            term *= -q / (k * k)
            total += term
            if abs(term) < 1e-19:
                break
        return total
    w = 5.0 / x
    q = 25.0 / (x * x)
    p = _polevl(q, _PP) / _polevl(q, _PQ)
    qq = _polevl(q, _QP) / _p1evl(q, _QQ)
    xn = x - 0.25 * math.pi
    return _SQ2OPI * (p * math.cos(xn) - w * qq * math.sin(xn)) / math.sqrt(x)


# --- adaptive Gauss-Kronrod quadrature ---------------------------------

# 15-point Kronrod nodes (nonnegative half) and weights, with the
# embedded 7-point Gauss rule on nodes 1, 3, 5 and the centre.
_XGK = (
    0.991455371120812639206854697526329,
    0.949107912342758524526189684047851,
    0.864864423359769072789712788640926,
    0.741531185599394439863864773280788,
    0.586087235467691130294144838258730,
    0.405845151377397166906606412076961,
    0.207784955007898467600689403773245,
)
_WGK = (
    0.022935322010529224963732008058970,
    0.063092092629978553290700663189204,
    0.104790010322250183839876322541518,
    0.140653259715525918745189590510238,
    0.169004726639267902826583426598550,
    0.190350578064785409913256402421014,
    0.204432940075298892414161999234649,
)
_WGK_CENTER = 0.209482141084727828012999174891714
_WG = (
    0.129484966168869693270611432679082,
    0.279705391489276667901467771423780,
    0.381830050505118944950369775488975,
)
_WG_CENTER = 0.417959183673469387755102040816327

DEFAULT_QUAD_BUDGET = 1_000_000


def _gk15(f, a: float, b: float):
    """One Gauss-Kronrod panel.  Returns (value, error, resabs)."""
    hl = 0.5 * (b - a)
    mid = 0.5 * (a + b)
    fc = complex(f(mid))
    sk = _WGK_CENTER * fc
    sg = _WG_CENTER * fc
    sabs = _WGK_CENTER * abs(fc)
    pairs = []
    for j, xj in enumerate(_XGK):
        dx = hl * xj
        f1 = complex(f(mid - dx))
        f2 = complex(f(mid + dx))
        pairs.append((f1, f2))
        sk += _WGK[j] * (f1 + f2)
        sabs += _WGK[j] * (abs(f1) + abs(f2))
        if j % 2 == 1:
            sg += _WG[(j - 1) // 2] * (f1 + f2)
    value = sk * hl
    if not (math.isfinite(value.real) and math.isfinite(value.imag)):
        raise ValueError(f"integrand produced a non-finite value on [{a}, {b}]")
    mean = sk * 0.5
    sasc = _WGK_CENTER * abs(fc - mean)
    for j, (f1, f2) in enumerate(pairs):
        sasc += _WGK[j] * (abs(f1 - mean) + abs(f2 - mean))
    resabs = sabs * abs(hl)
    resasc = sasc * abs(hl)
    err = abs(sk - sg) * abs(hl)
    if resasc != 0.0 and err != 0.0:
        err = resasc * min(1.0, (200.0 * err / resasc) ** 1.5)
    err = max(err, 50.0 * _EPS * resabs)
    return value, err, resabs


def integrate_adaptive(
    f: Callable[[float], complex],
    a: float,
    b: float,
    tol: float,
    max_evals: int = DEFAULT_QUAD_BUDGET,
    breakpoints: Sequence[float] = (),
) -> QuadratureResult:
    """Adaptive bisection with a nested 7/15 Gauss-Kronrod rule.

    Complex values are integrated natively; the target is
    |error| <= max(tol * |value|, tol).  ``breakpoints`` seed the initial
    panel edges (useful for known kinks).  Raises ToleranceNotReached,
    carrying the best estimate, once ``max_evals`` integrand evaluations
    are spent.
    """
    if not (math.isfinite(a) and math.isfinite(b)) or not a < b:
        raise ValueError(f"integration interval must satisfy a < b, got [{a}, {b}]")
    if not tol > 0.0:
        raise ValueError(f"tolerance must be positive, got {tol}")

    edges = [a] + sorted({float(p) for p in breakpoints if a < p < b}) + [b]
    heap = []
    frozen = []  # panels too narrow to split further
    total = 0 + 0j
    total_err = 0.0
    evals = 0
    seq = 0
    for lo, hi in zip(edges, edges[1:]):
        val, err, _ = _gk15(f, lo, hi)
        evals += 15
        total += val
        total_err += err
        heapq.heappush(heap, (-err, seq, lo, hi, val, err))
        seq += 1

    span = b - a
    while total_err > max(tol * abs(total), tol):
        if not heap:
            raise ToleranceNotReached(
                "no panel can be refined further",
                QuadratureResult(total, total_err, evals),
            )
        if evals + 30 > max_evals:
            raise ToleranceNotReached(
                f"evaluation budget {max_evals} exhausted "
                f"(error estimate {total_err:.3e})",
                QuadratureResult(total, total_err, evals),
            )
        _, _, lo, hi, val, err = heapq.heappop(heap)
        mid = 0.5 * (lo + hi)
        if not (lo < mid < hi) or (hi - lo) < 1e-15 * span:
            frozen.append((lo, hi, val, err))
            continue
        v1, e1, _ = _gk15(f, lo, mid)
        v2, e2, _ = _gk15(f, mid, hi)
        evals += 30
        total += (v1 + v2) - val
        total_err += (e1 + e2) - err
        heapq.heappush(heap, (-e1, seq, lo, mid, v1, e1))
        seq += 1
        heapq.heappush(heap, (-e2, seq, mid, hi, v2, e2))
        seq += 1

    return QuadratureResult(total, total_err, evals)


def integrate_semi_infinite(
    f: Callable[[float], complex],
    tol: float,
    decay_hint: float,
    max_evals: int = DEFAULT_QUAD_BUDGET,
    breakpoints: Sequence[float] = (),
) -> QuadratureResult:
    """Integrate f over [0, inf) assuming |f(x)| <= C exp(-decay_hint*x).

    Uses the substitution u = 1 - exp(-decay_hint*x), which maps the
    half-line onto [0, 1) and turns the exponential tail into a bounded
    integrand, then delegates to :func:`integrate_adaptive`.
    """
    if not decay_hint > 0.0:
        raise ValueError(f"decay_hint must be positive, got {decay_hint}")
    lam = float(decay_hint)

    def transformed(u: float) -> complex:
        x = -math.log1p(-u) / lam
        return f(x) / (lam * (1.0 - u))

    mapped = tuple(-math.expm1(-lam * p) for p in breakpoints if p > 0.0)
    return integrate_adaptive(transformed, 0.0, 1.0, tol, max_evals, mapped)


def limit_extrapolate(
    samples: Sequence[tuple[float, complex]],
    diverge_factor: float = 5.0,
) -> ExtrapolationResult:
    """Extrapolate v(h) -> v0 as h -> 0 from samples (h, v), h decreasing.

    Assumes v(h) = v0 + c1*h + c2*h^2 + ... and evaluates the Neville
    interpolation tableau at h = 0 (classical Richardson acceleration
    for geometric ladders, but any strictly decreasing h works).  The
    stability estimate is the spread of the last two diagonal
    extrapolants.  Raises ExtrapolationUnstable when that spread grows
    instead of shrinking.
    """
    pts = [(float(h), complex(v)) for h, v in samples]
    if len(pts) < 3:
        raise ValueError(f"need at least 3 samples, got {len(pts)}")
    hs = [h for h, _ in pts]
    if any(h <= 0.0 for h in hs) or any(h2 >= h1 for h1, h2 in zip(hs, hs[1:])):
        raise ValueError("sample steps must be positive and strictly decreasing")

    tab = [v for _, v in pts]
    n = len(tab)
    diag = [tab[0]]
    for m in range(1, n):
        for i in range(n - m):
            tab[i] = (hs[i + m] * tab[i] - hs[i] * tab[i + 1]) / (hs[i + m] - hs[i])
        diag.append(tab[0])

    scale = max(abs(v) for _, v in pts) + 1e-300
    diffs = [abs(d2 - d1) for d1, d2 in zip(diag, diag[1:])]
    stability = diffs[-1]
    if len(diffs) >= 2:
        prev = diffs[-2]
        if stability > diverge_factor * prev and stability > 1e-12 * scale:
            raise ExtrapolationUnstable(
                f"extrapolant spread grew from {prev:.3e} to {stability:.3e}"
            )
    return ExtrapolationResult(diag[-1], stability)
