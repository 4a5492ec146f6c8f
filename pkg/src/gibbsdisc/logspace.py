"""Signed log-magnitude scalars.

A :class:`LogNumber` stores ``sign * exp(log_magnitude + tail)``.
``sign == 0`` encodes exact zero and the magnitude is then ``-inf``.

``tail`` is a small correction carried next to ``log_magnitude`` (an
unevaluated double-double sum).  A bare double log of a number near
``1e300`` only pins the number down to ~5e-14 relative; with the tail,
conversions, products, quotients and sums stay within a few ulp.
"""

from __future__ import annotations

import math
from dataclasses import dataclass
from typing import Iterable

import numpy as np

__all__ = ["LogNumber", "log_sum_exp", "signed_log_sum_exp"]


def _two_sum(a: float, b: float) -> tuple[float, float]:
    s = a + b
    bb = s - a
    return s, (a - (s - bb)) + (b - bb)


@dataclass(frozen=True)
class LogNumber:
    sign: int
    log_magnitude: float
    tail: float = 0.0

    def __post_init__(self):
        if self.sign not in (-1, 0, 1):
            raise ValueError(f"sign must be -1, 0 or +1, got {self.sign!r}")
        if math.isnan(self.log_magnitude) or math.isnan(self.tail):
            raise ValueError("log_magnitude is NaN")
        if self.sign != 0 and self.log_magnitude == -math.inf:
            object.__setattr__(self, "sign", 0)
        if self.sign == 0 or math.isinf(self.log_magnitude):
            object.__setattr__(self, "tail", 0.0)
        if self.sign == 0:
            object.__setattr__(self, "log_magnitude", -math.inf)
        elif self.tail:
            hi, lo = _two_sum(self.log_magnitude, self.tail)
            object.__setattr__(self, "log_magnitude", hi)
            object.__setattr__(self, "tail", lo)

    # construction -------------------------------------------------------

    @classmethod
    def zero(cls) -> "LogNumber":
        return cls(0, -math.inf)

    @classmethod
    def one(cls) -> "LogNumber":
        return cls(1, 0.0)

    @classmethod
    def from_float(cls, value: float) -> "LogNumber":
        if value == 0:
            return cls.zero()
        if math.isnan(value):
            raise ValueError("cannot represent NaN")
        mag = abs(value)
        hi = math.log(mag)
        approx = math.exp(hi)
        lo = math.log1p((mag - approx) / approx) if math.isfinite(approx) and approx > 0 else 0.0
        return cls(1 if value > 0 else -1, hi, lo)

    @classmethod
    def from_log(cls, log_value: float) -> "LogNumber":
        """Positive number whose natural log is ``log_value``."""
        return cls(1, log_value)

    # conversion ---------------------------------------------------------

    @property
    def log(self) -> float:
        """``log_magnitude`` with the tail folded in (plain double)."""
        return self.log_magnitude + self.tail

    def __float__(self) -> float:
        if self.sign == 0:
            return 0.0
        return self.sign * (math.exp(self.log_magnitude) * math.exp(self.tail))

    @property
    def is_zero(self) -> bool:
        return self.sign == 0

    def __bool__(self) -> bool:
        return self.sign != 0

    def __repr__(self) -> str:
        if self.sign == 0:
            return "LogNumber(0)"
        return f"LogNumber({'+' if self.sign > 0 else '-'}exp({self.log!r}))"

    # arithmetic ---------------------------------------------------------

    @staticmethod
    def _coerce(other) -> "LogNumber":
        if isinstance(other, LogNumber):
            return other
        if isinstance(other, (int, float, np.floating, np.integer)):
            return LogNumber.from_float(float(other))
        return NotImplemented

    def __neg__(self) -> "LogNumber":
        return LogNumber(-self.sign, self.log_magnitude, self.tail)

    def __abs__(self) -> "LogNumber":
        return LogNumber(abs(self.sign), self.log_magnitude, self.tail)

    def __mul__(self, other) -> "LogNumber":
        other = self._coerce(other)
        if other is NotImplemented:
            return other
        if self.sign == 0 or other.sign == 0:
            return LogNumber.zero()
        hi, err = _two_sum(self.log_magnitude, other.log_magnitude)
        return LogNumber(self.sign * other.sign, hi, err + self.tail + other.tail)

    __rmul__ = __mul__

    def __truediv__(self, other) -> "LogNumber":
        other = self._coerce(other)
        if other is NotImplemented:
            return other
        if other.sign == 0:
            raise ZeroDivisionError("division by LogNumber zero")
        if self.sign == 0:
            return LogNumber.zero()
        hi, err = _two_sum(self.log_magnitude, -other.log_magnitude)
        return LogNumber(self.sign * other.sign, hi, err + self.tail - other.tail)

    def __rtruediv__(self, other) -> "LogNumber":
        other = self._coerce(other)
        if other is NotImplemented:
            return other
        return other / self

    def __add__(self, other) -> "LogNumber":
        other = self._coerce(other)
        if other is NotImplemented:
            return other
        return signed_log_sum_exp((self, other))

    __radd__ = __add__

    def __sub__(self, other) -> "LogNumber":
        other = self._coerce(other)
        if other is NotImplemented:
            return other
        return self + (-other)

    def __rsub__(self, other) -> "LogNumber":
        other = self._coerce(other)
        if other is NotImplemented:
            return other
        return other - self

    def __pow__(self, power: int) -> "LogNumber":
        if not isinstance(power, int):
            raise TypeError("only integer powers are supported")
        if power == 0:
            return LogNumber.one()
        if self.sign == 0:
            if power < 0:
                raise ZeroDivisionError("zero to a negative power")
            return LogNumber.zero()
        sign = self.sign if power % 2 else 1
        hi = power * self.log_magnitude
        err = math.fma(power, self.log_magnitude, -hi) if hasattr(math, "fma") else 0.0
        return LogNumber(sign, hi, err + power * self.tail)

    def isclose(self, other, rel_tol: float = 1e-12) -> bool:
        """Relative comparison carried out on the log scale."""
        other = self._coerce(other)
        if self.sign != other.sign:
            return False
        if self.sign == 0:
            return True
        d = (self.log_magnitude - other.log_magnitude) + (self.tail - other.tail)
        return abs(math.expm1(d)) <= rel_tol


def log_sum_exp(logs) -> float:
    """``log(sum(exp(logs)))`` for an iterable or array of logs; ``-inf`` if empty."""
    a = np.asarray(logs, dtype=float)
    if a.size == 0:
        return -math.inf
    top = a.max()
    if top == -math.inf:
        return -math.inf
    if a.size == 1:
        return float(top)
    if top == math.inf:
        return math.inf
    return float(top + math.log(np.exp(a - top).sum()))


def _log_sum_same_sign(terms: list[LogNumber]) -> tuple[float, float]:
    """``(hi, lo)`` with ``hi + lo = log sum |t|``; the anchor term keeps its full precision."""
    if not terms:
        return -math.inf, 0.0
    top = max(terms, key=lambda t: t.log_magnitude)
    if len(terms) == 1:
        return top.log_magnitude, top.tail
    rest = math.fsum(
        math.exp((t.log_magnitude - top.log_magnitude) + (t.tail - top.tail)) for t in terms if t is not top
    )
    return top.log_magnitude, top.tail + math.log1p(rest)


def signed_log_sum_exp(terms: Iterable[LogNumber]) -> LogNumber:
    """Sum of signed log numbers without leaving log space.

    Positive and negative parts are accumulated separately and combined
    once, so cancellation only happens in the final subtraction.
    """
    pos, neg = [], []
    for t in terms:
        if t.sign > 0:
            pos.append(t)
        elif t.sign < 0:
            neg.append(t)
    ph, pl = _log_sum_same_sign(pos)
    nh, nl = _log_sum_same_sign(neg)
    if nh == -math.inf:
        return LogNumber(1, ph, pl) if ph > -math.inf else LogNumber.zero()
    if ph == -math.inf:
        return LogNumber(-1, nh, nl)
    d = (ph - nh) + (pl - nl)
    if d == 0:
        return LogNumber.zero()
    if d > 0:
        return LogNumber(1, ph, pl + math.log1p(-math.exp(-d)))
    return LogNumber(-1, nh, nl + math.log1p(-math.exp(d)))
