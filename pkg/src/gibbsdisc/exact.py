"""Exact rational arithmetic used as a test oracle.

Nothing here is on a production path.  Stirling numbers are obtained by
expanding ``(x + gamma)_n`` as a polynomial in ``x`` and dividing it down the
basis ``(x)_{xi, alpha}``, which shares no code with the recurrence used by
:func:`gibbsdisc.special.build_stirling_triangle`.  Negative ``gamma`` is
allowed here.
"""

from fractions import Fraction
from math import comb

MAX_EXACT_N = 30


def _frac(x) -> Fraction:
    return x if isinstance(x, Fraction) else Fraction(x)


def rising_factorial(x, n: int) -> Fraction:
    x = _frac(x)
    out = Fraction(1)
    for i in range(n):
        out *= x + i
    return out


def gen_rising_factorial(x, n: int, step) -> Fraction:
    x, step = _frac(x), _frac(step)
    out = Fraction(1)
    for i in range(n):
        out *= x + i * step
    return out


def binomial(m: int, k: int) -> Fraction:
    return Fraction(comb(m, k)) if 0 <= k <= m else Fraction(0)


def beta_binomial_pmf(m: int, k: int, a, b) -> Fraction:
    if k < 0 or k > m:
        return Fraction(0)
    a, b = _frac(a), _frac(b)
    return binomial(m, k) * rising_factorial(a, k) * rising_factorial(b, m - k) / rising_factorial(a + b, m)


def _poly_mul_linear(p, c):
    """Multiply polynomial ``p`` (ascending coefficients) by ``(x + c)``."""
    out = [Fraction(0)] * (len(p) + 1)
    for d, a in enumerate(p):
        out[d] += a * c
        out[d + 1] += a
    return out


def _rising_poly(shift, n, step):
    """Coefficients of ``prod_{i<n} (x + shift + i step)``."""
    p = [Fraction(1)]
    for i in range(n):
        p = _poly_mul_linear(p, shift + i * step)
    return p


def stirling_row(alpha, gamma, n: int) -> list:
    """Exact ``T(n, 0..n)`` with ``(x + gamma)_n = sum_xi T(n, xi) (x)_{xi, alpha}``."""
    if n > MAX_EXACT_N:
        raise ValueError(f"exact backend limited to n <= {MAX_EXACT_N}")
    alpha, gamma = _frac(alpha), _frac(gamma)
    target = _rising_poly(gamma, n, Fraction(1))
    basis = [_rising_poly(Fraction(0), xi, alpha) for xi in range(n + 1)]
    coeffs = [Fraction(0)] * (n + 1)
    rem = list(target)
    for xi in range(n, -1, -1):
        # every basis polynomial is monic of degree xi
        c = rem[xi]
        coeffs[xi] = c
        for d, b in enumerate(basis[xi]):
            rem[d] -= c * b
    assert all(r == 0 for r in rem)
    return coeffs


def stirling_triangle(alpha, gamma, max_n: int) -> list:
    return [stirling_row(alpha, gamma, n) for n in range(max_n + 1)]


def pd_weight(alpha, theta, n: int, j: int) -> Fraction:
    alpha, theta = _frac(alpha), _frac(theta)
    return gen_rising_factorial(theta + alpha, j - 1, alpha) / rising_factorial(theta + 1, n - 1)
