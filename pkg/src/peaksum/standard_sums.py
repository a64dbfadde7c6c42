"""Model series for peaked-sum asymptotics.

These are the standard series against which a general peaked sum is
compared: the exponential sum (linear exponent, boundary peak), the Gaussian
sum over the integers (quadratic exponent, interior peak), its Jacobi
theta-function closed form, and the triangular-wave oscillatory factor that
governs the coarse-grid regime.
"""

from __future__ import annotations

import math
from dataclasses import dataclass

import numpy as np

from .errors import InputError, NomeOutOfRange

__all__ = [
    "GaussianSumParams",
    "triangular_wave",
    "theta3",
    "exponential_sum",
    "gaussian_sum_direct",
    "gaussian_sum_theta",
    "oscillatory_factor",
]

# e^{-x} underflows to an exact double 0 past ~745; beyond 700 the theta
# correction is below machine epsilon of the leading 1.
_NOME_UNDERFLOW = 700.0


@dataclass(frozen=True)
class GaussianSumParams:
    """Parameters of the integer Gaussian sum.

    n        -- large parameter, >= 1
    alpha    -- grid exponent (spacing 1/n^alpha)
    gamma    -- quadratic coefficient, > 0
    x0       -- peak location, > 0
    """

    n: int
    alpha: float
    gamma: float
    x0: float

    def __post_init__(self):
        if self.n < 1:
            raise InputError("n must be >= 1")
        if not self.gamma > 0:
            raise InputError("gamma must be > 0")
        if not self.x0 > 0:
            raise InputError("x0 must be > 0")


def triangular_wave(x: float) -> float:
    """Distance from x to the nearest integer: min(x - floor x, ceil x - x).

    Periodic with period 1, even, peaks at 1/2 on half-integers.
    """
    fx = x - math.floor(x)
    return min(fx, 1.0 - fx)


def theta3(z: float, q: float) -> float:
    """Jacobi theta_3(z, q) = 1 + 2 sum_{k>=1} q^(k^2) cos(2kz) for |q| < 1.

    Terms decay super-geometrically; the sum is truncated once
    |q|^(k^2) < 1e-16, which saturates double precision.
    """
    if not abs(q) < 1.0:
        raise NomeOutOfRange(f"theta3 nome |q| must be < 1, got {q}")
    if q == 0.0:
        return 1.0
    total = 1.0
    k = 1
    while True:
        term = abs(q) ** (k * k)
        if term < 1e-16:
            break
        total += 2.0 * (q ** (k * k)) * math.cos(2.0 * k * z)
        k += 1
        if k > 100_000:  # unreachable for |q| <= 1 - 1e-10, guards pathological q
            break
    return total


def exponential_sum(n: int, alpha: float, gamma: float) -> float:
    """Closed form of n^(1-a) * sum_{k>=0} exp(-gamma n^(1-a) k).

    Geometric series: n^(1-a) / (1 - exp(-gamma n^(1-a))).
    """
    if n < 1 or not gamma > 0:
        raise InputError("need n >= 1 and gamma > 0")
    a = float(alpha)
    s = float(n) ** (1.0 - a)
    return s / (-math.expm1(-gamma * s))


def gaussian_sum_direct(p: GaussianSumParams) -> float:
    """n^(1-a) * sum_{k in Z} exp(-n^(1-2a) gamma (k - n^a x0)^2), term by term.

    The window expands symmetrically around the nearest integer to n^a*x0
    until the omitted tail is below 1e-16 of the running sum (geometric tail
    bound).  Exact across all three alpha regimes, where the peak width in
    grid units ranges from sub-unit to thousands.
    """
    n, a, g, x0 = p.n, float(p.alpha), p.gamma, p.x0
    center = float(n) ** a * x0
    rate = float(n) ** (1.0 - 2.0 * a) * g
    m = round(center)
    # width (in k units) where the exponent reaches ~40: e^-40 ~ 4e-18
    half = int(math.sqrt(40.0 / rate)) + 2
    block = np.arange(m - half, m + half + 1, dtype=float)
    total = float(np.exp(-rate * (block - center) ** 2).sum())
    # extend outward until tail negligible (handles the slowly-decaying side)
    for direction in (-1, 1):
        k = m + direction * (half + 1)
        while True:
            term = math.exp(-rate * (k - center) ** 2)
            if term < 1e-16 * total:
                break
            total += term
            k += direction
    return float(n) ** (1.0 - a) * total


def gaussian_sum_theta(p: GaussianSumParams) -> float:
    """Theta-function closed form of the integer Gaussian sum.

    Poisson summation gives

        Q(n, a, gamma, x0) = sqrt(pi n / gamma)
                             * theta3(pi n^a x0, exp(-n^(2a-1) pi^2 / gamma)).

    When the nome exponent exceeds ~700 the theta factor is 1 to machine
    precision and is short-circuited (the exponential underflows).
    """
    n, a, g, x0 = p.n, float(p.alpha), p.gamma, p.x0
    expo = float(n) ** (2.0 * a - 1.0) * math.pi ** 2 / g
    theta = 1.0 if expo > _NOME_UNDERFLOW else theta3(math.pi * float(n) ** a * x0,
                                                      math.exp(-expo))
    return math.sqrt(math.pi * n / g) * theta


def oscillatory_factor(p: GaussianSumParams) -> float:
    """Two-term envelope of the Gaussian sum in the coarse-grid regime a < 1/2.

    With t the triangular wave distance of n^a*x0 from the integers:

        P = exp(-gamma n^(1-2a) t^2) + exp(-gamma n^(1-2a) (1-t)^2).

    Evaluable for any alpha; meaningful as an asymptotic factor for a < 1/2.
    """
    n, a, g, x0 = p.n, float(p.alpha), p.gamma, p.x0
    t = triangular_wave(float(n) ** a * x0)
    rate = g * float(n) ** (1.0 - 2.0 * a)
    return math.exp(-rate * t * t) + math.exp(-rate * (1.0 - t) ** 2)
