"""Exact, error-bounded evaluation of peaked series and their limit integrals.

The central object is the series

    I(n, a) = n^(1-a) * sum_{k>=0} exp(-n f(k/n^a)) g(k/n^a),

a Riemann sum of  n * integral_0^inf exp(-n f(x)) g(x) dx  on the grid of
spacing 1/n^a.  This module provides the direct (oracle) evaluation of both,
an admissibility heuristic for (f, g), and an Euler-Maclaurin comparison of
series against integral with Bernoulli endpoint corrections.
"""

from __future__ import annotations

import math
from dataclasses import dataclass
from fractions import Fraction

import numpy as np
from scipy import integrate

from .errors import (
    DomainError,
    EmptyDomain,
    InputError,
    NonIntegrable,
    NonSummable,
)
from .piecewise import PiecewiseFunction

__all__ = [
    "SeriesProblem",
    "SumResult",
    "eval_series_direct",
    "eval_integral",
    "check_admissibility",
    "euler_maclaurin_compare",
    "fornberg_weights",
]

_MAX_TERMS_DEFAULT = 2_000_000
_DECAY_RUN = 8  # consecutive decreasing ratios required before truncating


@dataclass(frozen=True)
class SeriesProblem:
    """A peaked-series instance: exponent profile f, weight g, grid exponent."""

    f: PiecewiseFunction
    g: PiecewiseFunction
    alpha_scale: float | Fraction

    def __post_init__(self):
        if not float(self.alpha_scale) > 0:
            raise InputError("alpha_scale must be > 0")

    @property
    def alpha(self) -> float:
        return float(self.alpha_scale)


@dataclass(frozen=True)
class SumResult:
    value: float
    terms_used: int
    truncation_bound: float

    def __post_init__(self):
        if self.terms_used < 1:
            raise InputError("terms_used must be >= 1")
        if not self.truncation_bound >= 0:
            raise InputError("truncation_bound must be >= 0")


def _grid_anchor(problem: SeriesProblem, n: int) -> tuple[int, float]:
    """Grid index near the minimizer of f with finite f, and the f-shift there.

    Falls back to scanning the support when rounding lands outside the
    domain; raises EmptyDomain when no grid point has finite f.
    """
    f, step = problem.f, float(n) ** problem.alpha
    cands = f.minimum_candidates()
    ks: list[int] = []
    if cands:
        k0 = round(cands[0][0] * step)
        ks.extend(k0 + d for d in (-2, -1, 0, 1, 2))
    best = None
    for k in ks:
        if k < 0:
            continue
        v = f(k / step)
        if math.isfinite(v) and (best is None or v < best[1]):
            best = (k, v)
    if best is not None:
        return best
    end = f.support_end
    k_hi = int(math.ceil(min(end, 1e7) * step)) + 2 if math.isfinite(end) else int(step * 10) + 10
    for k in range(0, k_hi + 1):
        v = f(k / step)
        if math.isfinite(v):
            return k, v
    raise EmptyDomain("every grid point maps to an infinite exponent")


def eval_series_direct(problem: SeriesProblem, n: int, rel_tol: float,
                       max_terms: int = _MAX_TERMS_DEFAULT) -> SumResult:
    """Sum the peaked series term by term until the tail is provably small.

    Terms are accumulated outward from the grid point nearest the minimizer
    of f.  Each direction stops once the current term has dropped below
    rel_tol times the peak term *and* the last 8 term ratios show monotone
    decay; the omitted tail is then bounded by geometric extrapolation of
    the last ratio.  Exponents are shifted by the peak value of f so the
    working sums stay in range; the reported value carries the factor back.

    Raises NonSummable when terms fail to decay within ``max_terms``
    evaluations, EmptyDomain when no grid point has finite f.
    """
    if n < 1:
        raise InputError("n must be >= 1")
    if not 0 < rel_tol < 1:
        raise InputError("rel_tol must be in (0, 1)")
    f, g = problem.f, problem.g
    step = float(n) ** problem.alpha
    k_center, fshift = _grid_anchor(problem, n)
    compact = not f.has_infinite_piece and math.isinf(f.outside)
    support_end = f.support_end

    def run_direction(k_start: int, direction: int):
        """Accumulate scaled terms from k_start moving by ``direction``."""
        total = 0.0
        peak = 0.0
        count = 0
        prev = None
        ratios: list[float] = []
        tail = 0.0
        k = k_start
        block = 256
        while True:
            if direction > 0:
                ks = np.arange(k, k + block)
            else:
                ks = np.arange(k, max(k - block, -1), -1)
                if ks.size == 0:
                    break
            xs = ks / step
            fv = f.eval_array(xs)
            gv = g.eval_array(xs)
            terms = np.where(np.isfinite(fv), np.exp(-(n * (fv - fshift)).clip(-745, 745)) * gv, 0.0)
            stop = False
            for idx in range(ks.size):
                t = float(terms[idx])
                count += 1
                total += t
                mag = abs(t)
                peak = max(peak, mag)
                if prev is not None:
                    r = 0.0 if prev == 0.0 else mag / prev
                    ratios.append(r)
                    if len(ratios) > _DECAY_RUN:
                        ratios.pop(0)
                prev = mag
                past_support = compact and (ks[idx] / step) > support_end
                decaying = len(ratios) == _DECAY_RUN and all(r < 1.0 for r in ratios)
                if past_support:
                    tail = 0.0
                    stop = True
                    break
                if mag <= rel_tol * peak and decaying:
                    r = max(ratios)
                    tail = mag * r / (1.0 - r) if r < 1.0 else math.inf
                    stop = True
                    break
            if stop or (direction < 0 and ks[-1] == 0):
                break
            k = int(ks[-1]) + direction
            if count > max_terms:
                raise NonSummable(
                    f"series terms failed to decay within {max_terms} evaluations")
        return total, peak, count, tail

    tot_r, peak_r, cnt_r, tail_r = run_direction(k_center, +1)
    if k_center > 0:
        tot_l, peak_l, cnt_l, tail_l = run_direction(k_center - 1, -1)
    else:
        tot_l = tail_l = 0.0
        cnt_l = 0
    scale = float(n) ** (1.0 - problem.alpha) * math.exp(-n * fshift)
    return SumResult(
        value=(tot_r + tot_l) * scale,
        terms_used=cnt_r + cnt_l,
        truncation_bound=(tail_r + tail_l) * scale,
    )


def _poly_tail_bound(g: PiecewiseFunction, f: PiecewiseFunction, n: int,
                     x_star: float, fshift: float) -> float:
    """Bound int_{x*}^inf e^{-n(f-fshift)} |g| via a linear minorant of f.

    Requires f' > 0 and monotone beyond x_star (caller guarantees).  The
    weight is bounded by the absolute-coefficient polynomial of g's last
    piece (or |outside| when g has run out of pieces).
    """
    m = f.derivative()(x_star)
    if not (math.isfinite(m) and m > 0):
        raise NonIntegrable("no positive lower bound on f' in the tail")
    gp = g.piece_at(x_star)
    gcoef = [abs(c) for c in (gp.coeffs if gp is not None else (g.outside,))]
    if not all(math.isfinite(c) for c in gcoef):
        raise NonIntegrable("weight function unbounded in the tail")
    f_star = f(x_star)
    total = 0.0
    # int_{x*}^inf (x*)^{j-i} u^i e^{-n m u} du  summed over binomial expansion
    for j, cj in enumerate(gcoef):
        for i in range(j + 1):
            total += (cj * math.comb(j, i) * abs(x_star) ** (j - i)
                      * math.factorial(i) / (n * m) ** (i + 1))
    return math.exp(-min(n * (f_star - fshift), 745.0)) * total


def eval_integral(problem: SeriesProblem, n: int, rel_tol: float) -> SumResult:
    """Adaptive quadrature of n * int_0^inf exp(-n f) g dx with a bounded tail.

    Finite pieces are integrated with adaptive quadrature split at the
    breakpoints of f and g (with the minimizer flagged as a difficult
    point).  An unbounded final piece is cut at a point beyond which f is
    provably increasing; the remainder is bounded analytically and reported
    in truncation_bound, extended outward until it is below rel_tol times
    the accumulated value.
    """
    if n < 1:
        raise InputError("n must be >= 1")
    f, g = problem.f, problem.g
    cands = f.minimum_candidates()
    if not cands:
        raise NonIntegrable("f has no finite minimum candidate")
    x0, fshift = cands[0]

    pts = sorted({0.0} | {b for b in f.breakpoints + g.breakpoints if b > 0})
    finite_end = max(pts)

    def integrand(x):
        fv = f(x)
        if not math.isfinite(fv):
            return 0.0
        return math.exp(-min(max(n * (fv - fshift), -745.0), 745.0)) * g(x)

    value = 0.0
    err = 0.0
    pieces_done = 0
    for a, b in zip(pts, pts[1:]):
        inner = [x0] if a < x0 < b else []
        v, e = integrate.quad(integrand, a, b, points=inner, limit=200,
                              epsabs=0.0, epsrel=max(rel_tol / 4, 1e-13))
        value += v
        err += e
        pieces_done += 1

    tail_bound = 0.0
    if f.has_infinite_piece:
        last = f.pieces[-1]
        coeffs = np.trim_zeros(np.asarray(last.coeffs, dtype=float), "b")
        if coeffs.size <= 1 or coeffs[-1] <= 0:
            if not _weight_vanishes_beyond(g, finite_end):
                raise NonIntegrable("exponent does not grow in the unbounded piece")
        else:
            dd = f.derivative()
            x_star = max(finite_end, x0 + 1.0, last.a + 1.0)
            crit = [r for p in dd.pieces for r in dd.piece_roots(p)]
            crit += [r for p in dd.derivative().pieces for r in dd.derivative().piece_roots(p)]
            if crit:
                x_star = max(x_star, max(crit) + 1.0)
            for _ in range(60):
                bound = _poly_tail_bound(g, f, n, x_star, fshift)
                if bound <= rel_tol * max(abs(value), 1e-300):
                    break
                v, e = integrate.quad(integrand, finite_end, x_star, limit=200,
                                      epsabs=0.0, epsrel=max(rel_tol / 4, 1e-13))
                # replace the previous [finite_end, x_star] contribution
                value, err, finite_end = value + v, err + e, x_star
                pieces_done += 1
                x_star *= 2.0
            else:
                raise NonIntegrable("tail bound failed to converge")
            v, e = integrate.quad(integrand, finite_end, x_star, limit=200,
                                  epsabs=0.0, epsrel=max(rel_tol / 4, 1e-13))
            value += v
            err += e
            pieces_done += 1
            tail_bound = _poly_tail_bound(g, f, n, x_star, fshift)
    elif math.isfinite(f.outside) and not _weight_vanishes_beyond(g, finite_end):
        raise NonIntegrable("constant exponent outside the support, weight non-zero")

    scale = float(n) * math.exp(-n * fshift)
    return SumResult(value=value * scale,
                     terms_used=max(pieces_done, 1),
                     truncation_bound=(err + tail_bound) * scale)


def _weight_vanishes_beyond(g: PiecewiseFunction, x_end: float) -> bool:
    if math.isfinite(g.support_end) and g.support_end <= x_end + 1e-12:
        return g.outside == 0.0
    # g still has polynomial support out there; treat zero polynomial as vanishing
    p = g.piece_at(x_end + 1.0)
    if p is None:
        return g.outside == 0.0
    return not np.any(np.asarray(p.coeffs))


def check_admissibility(problem: SeriesProblem, x_max: float,
                        samples: int = 64) -> str:
    """Sampled heuristic for summability of the pair (f, g).

    Verdicts: "Admissible" when f is bounded below on a log-spaced sample
    and grows at least logarithmically at the sampled tail (slope of f
    against log x fitted over the outer half); "SuspectGrowth" when the
    growth test fails; "Unbounded" when the samples show f decreasing
    without floor at the tail.  A compactly supported summand (infinite f
    outside finite pieces) is Admissible outright.

    This is a finite-sample heuristic, not a proof: logarithmic-growth
    constants are asymptotic and cannot be certified from finitely many
    evaluations.
    """
    if samples < 16:
        raise InputError("samples must be >= 16")
    finite_bps = [b for b in problem.f.breakpoints if math.isfinite(b)]
    if finite_bps and x_max <= max(finite_bps):
        raise InputError("x_max must exceed the largest finite piece endpoint")
    f = problem.f
    if not f.has_infinite_piece and math.isinf(f.outside):
        return "Admissible"

    xs = np.geomspace(1e-3, x_max, samples)
    fv = f.eval_array(xs)
    finite = np.isfinite(fv)
    if not finite.any():
        return "Admissible"  # summand vanishes everywhere sampled
    xs, fv = xs[finite], fv[finite]

    quarter = max(4, len(xs) // 4)
    tail_f = fv[-quarter:]
    scale = max(1.0, float(np.max(np.abs(fv))))
    decreasing = np.all(np.diff(tail_f) < 0)
    if decreasing and tail_f[-1] <= np.min(fv) and tail_f[0] - tail_f[-1] > 1e-9 * scale:
        return "Unbounded"

    tail = xs > max(1.0, xs[len(xs) // 2])
    if tail.sum() < 4:
        tail = xs >= xs[max(0, len(xs) - quarter)]
    lx, ly = np.log(xs[tail]), fv[tail]
    slope = float(np.polyfit(lx, ly, 1)[0]) if len(lx) >= 2 else 0.0
    if slope > 1e-9:
        return "Admissible"
    return "SuspectGrowth"


def fornberg_weights(z: float, x: np.ndarray, m: int) -> np.ndarray:
    """Finite-difference weights for the m-th derivative at z on nodes x.

    Classic recursive algorithm; returns w with sum_j w[j] f(x[j]) ~ f^(m)(z).
    """
    x = np.asarray(x, dtype=float)
    nn = len(x)
    if m >= nn:
        raise InputError("need more nodes than derivative order")
    c = np.zeros((nn, m + 1))
    c1 = 1.0
    c4 = x[0] - z
    c[0, 0] = 1.0
    for i in range(1, nn):
        mn = min(i, m)
        c2 = 1.0
        c5 = c4
        c4 = x[i] - z
        for j in range(i):
            c3 = x[i] - x[j]
            c2 *= c3
            if j == i - 1:
                for k in range(mn, 0, -1):
                    c[i, k] = c1 * (k * c[i - 1, k - 1] - c5 * c[i - 1, k]) / c2
                c[i, 0] = -c1 * c5 * c[i - 1, 0] / c2
            for k in range(mn, 0, -1):
                c[j, k] = (c4 * c[j, k] - k * c[j, k - 1]) / c3
            c[j, 0] = c4 * c[j, 0] / c3
        c1 = c2
    return c[:, m]


_BERNOULLI = {1: 1.0 / 6.0, 2: -1.0 / 30.0}  # B_2, B_4


def euler_maclaurin_compare(h_problem: SeriesProblem, n: int, N: int,
                            p: int = 1) -> tuple[float, float, float]:
    """Compare sum_{k=0}^{N} h(k) against int_0^N h with endpoint corrections.

    Here h(y) = exp(-n f(y/n)) g(y/n).  Returns (series, integral,
    em_corrected) where

        em_corrected = integral + (h(0) + h(N))/2
                       + sum_{k=1}^{p} B_{2k}/(2k)! (h^(2k-1)(N) - h^(2k-1)(0))

    with B_2 = 1/6, B_4 = -1/30.  The half-sum convention is fixed by the
    constant-function case: for h = c the corrected value (N+1)c matches the
    sum exactly.  Odd derivatives are one-sided finite differences with
    O(step^4) stencils, step = max(1e-4, cbrt(eps)) * local scale.

    Raises DomainError when f or g is not finite everywhere on [0, N/n].
    """
    if p not in (1, 2):
        raise InputError("p must be 1 or 2")
    if N < 1:
        raise InputError("N must be >= 1")
    f, g = h_problem.f, h_problem.g

    def h(y):
        x = y / n
        fv = f(x)
        if not math.isfinite(fv):
            return math.nan
        return math.exp(-min(max(n * fv, -745.0), 745.0)) * g(x)

    probe = np.linspace(0.0, N, 257)
    fv = f.eval_array(probe / n)
    gv = g.eval_array(probe / n)
    if not (np.isfinite(fv).all() and np.isfinite(gv).all()):
        raise DomainError("h is not finite on [0, N]")

    ks = np.arange(0, N + 1, dtype=float)
    series = float(np.sum(np.exp(-(n * f.eval_array(ks / n)).clip(-745, 745))
                          * g.eval_array(ks / n)))

    pts = sorted({0.0, float(N)} | {b * n for b in f.breakpoints + g.breakpoints
                                    if 0 < b * n < N})
    cands = f.minimum_candidates()
    y_peak = cands[0][0] * n if cands else None
    integral = 0.0
    for a, b in zip(pts, pts[1:]):
        inner = [y_peak] if (y_peak is not None and a < y_peak < b) else []
        v, _ = integrate.quad(h, a, b, points=inner, limit=200, epsrel=1e-12, epsabs=1e-14)
        integral += v

    step = max(1e-4, float(np.finfo(float).eps) ** (1.0 / 3.0))
    em = integral + 0.5 * (h(0.0) + h(float(N)))
    for k in range(1, p + 1):
        order = 2 * k - 1
        nodes0 = np.arange(0, order + 5) * step * max(1.0, 1.0)
        nodesN = N - nodes0[::-1]
        w0 = fornberg_weights(0.0, nodes0, order)
        wN = fornberg_weights(float(N), nodesN, order)
        d0 = float(np.dot(w0, [h(y) for y in nodes0]))
        dN = float(np.dot(wN, [h(y) for y in nodesN]))
        em += _BERNOULLI[k] / math.factorial(2 * k) * (dN - d0)
    return series, integral, em
