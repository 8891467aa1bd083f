"""Exact evaluation of the state-complexity bound, the derived lower bound on states, and the constant ladder.

Most values here are far too large to write out, so they are kept as
``coeff * base ** exp`` and compared exactly: a common root base when the
bases agree, certified interval logarithms otherwise.
"""
from __future__ import annotations

import math
import sys
from contextlib import contextmanager
from dataclasses import dataclass
from fractions import Fraction

import mpmath

# values up to this many bits are materialized
MATERIALIZE_BITS = 1 << 24


@contextmanager
def _ivprec(prec: int):
    old = mpmath.iv.prec
    mpmath.iv.prec = prec
    try:
        yield
    finally:
        mpmath.iv.prec = old


def _int_root(n: int, k: int) -> int | None:
    r = round(math.exp(math.log(n) / k))
    for c in (r - 1, r, r + 1):
        if c > 1 and c**k == n:
            return c
    return None


def _primitive_root(base: int) -> tuple[int, int]:
    """(r, j) with r ** j == base and r not a perfect power."""
    for j in range(base.bit_length(), 1, -1):
        r = _int_root(base, j)
        if r is not None:
            return r, j
    return base, 1


def _str_int(n: int) -> str:
    setter = getattr(sys, "set_int_max_str_digits", None)
    if setter is None:
        return str(n)
    old = sys.get_int_max_str_digits()
    setter(0)
    try:
        return str(n)
    finally:
        setter(old)


class BigNat:
    """The natural number coeff * base ** exp, kept symbolic and compared exactly."""

    __slots__ = ("coeff", "base", "exp")

    def __init__(self, coeff: int = 1, base: int = 1, exp: int = 0):
        if min(coeff, base, exp) < 0:
            raise ValueError("BigNat parts must be natural")
        if coeff == 0 or base == 0 and exp > 0:
            coeff, base, exp = 0, 1, 0
        elif base <= 1 or exp == 0:
            base, exp = 1, 0
        else:
            root, j = _primitive_root(base)
            base, exp = root, exp * j
        self.coeff, self.base, self.exp = coeff, base, exp

    @classmethod
    def of(cls, value: "int | BigNat") -> "BigNat":
        return value if isinstance(value, BigNat) else cls(value)

    @classmethod
    def power(cls, base: int, exp: int) -> "BigNat":
        return cls(1, base, exp)

    # -- size ---------------------------------------------------------

    def bits_estimate(self) -> float:
        if self.coeff == 0:
            return 0.0
        return self.coeff.bit_length() + self.exp * math.log2(self.base)

    def materializable(self) -> bool:
        return self.bits_estimate() <= MATERIALIZE_BITS

    def __int__(self) -> int:
        if not self.materializable():
            raise OverflowError(f"{self!r} is too large to materialize")
        return self.coeff * self.base**self.exp

    __index__ = __int__

    def log2_interval(self, prec: int):
        """Certified interval around log2(self); self must be positive."""
        with _ivprec(prec):
            iv = mpmath.iv
            value = iv.log(iv.mpf(self.coeff)) / iv.log(2)
            if self.exp:
                value += iv.mpf(self.exp) * iv.log(iv.mpf(self.base)) / iv.log(2)
            return value

    def digits(self) -> int:
        """Number of decimal digits (1 for zero)."""
        if self.coeff == 0:
            return 1
        if self.materializable():
            v = int(self)
            k = max(1, int(v.bit_length() * math.log10(2)))
            while 10**k <= v:
                k += 1
            while k > 1 and 10 ** (k - 1) > v:
                k -= 1
            return k
        prec = 64 + self.exp.bit_length() + self.coeff.bit_length().bit_length()
        for _ in range(6):
            lg = self.log2_interval(prec)
            with _ivprec(prec):
                lo = lg * mpmath.iv.log(2) / mpmath.iv.log(10)
            with mpmath.workprec(prec):
                a, b = int(mpmath.floor(lo.a)), int(mpmath.floor(lo.b))
            if a == b:
                return a + 1
            if b == a + 1:
                # log10 may sit exactly on an integer; settle it exactly
                return b + 1 if self.compare(BigNat.power(10, b)) >= 0 else b
            prec *= 2
        raise ArithmeticError("digit count undecided at the highest precision tried")

    # -- arithmetic ---------------------------------------------------

    def __mul__(self, other: "int | BigNat") -> "BigNat":
        other = BigNat.of(other)
        if self.coeff == 0 or other.coeff == 0:
            return BigNat(0)
        if other.exp == 0:
            return BigNat(self.coeff * other.coeff, self.base, self.exp)
        if self.exp == 0:
            return BigNat(self.coeff * other.coeff, other.base, other.exp)
        if self.base == other.base:
            return BigNat(self.coeff * other.coeff, self.base, self.exp + other.exp)
        if other.materializable():
            return BigNat(self.coeff * int(other), self.base, self.exp)
        if self.materializable():
            return BigNat(other.coeff * int(self), other.base, other.exp)
        raise OverflowError("product of two unrelated huge powers is not representable")

    __rmul__ = __mul__

    def __pow__(self, k: int) -> "BigNat":
        if k < 0:
            raise ValueError("negative exponent")
        return BigNat(self.coeff**k, self.base, self.exp * k)

    # -- comparison ---------------------------------------------------

    def compare(self, other: "int | BigNat") -> int:
        other = BigNat.of(other)
        if self.coeff == 0 or other.coeff == 0:
            return (self.coeff > 0) - (other.coeff > 0)
        x, y = self, other
        if x.base == y.base:
            # cancel the common power
            e = min(x.exp, y.exp)
            x = BigNat(x.coeff, x.base, x.exp - e)
            y = BigNat(y.coeff, y.base, y.exp - e)
        if x.materializable() and y.materializable():
            a, b = int(x), int(y)
            return (a > b) - (a < b)
        prec = 64 + max(x.exp.bit_length(), y.exp.bit_length()) + max(
            x.coeff.bit_length(), y.coeff.bit_length()
        ).bit_length()
        for _ in range(8):
            lx, ly = x.log2_interval(prec), y.log2_interval(prec)
            if lx.b < ly.a:
                return -1
            if lx.a > ly.b:
                return 1
            prec *= 2
        raise ArithmeticError("comparison undecided at the highest precision tried")

    def __eq__(self, other) -> bool:
        if not isinstance(other, (int, BigNat)):
            return NotImplemented
        return self.compare(other) == 0

    def __lt__(self, other) -> bool:
        return self.compare(other) < 0

    def __le__(self, other) -> bool:
        return self.compare(other) <= 0

    def __gt__(self, other) -> bool:
        return self.compare(other) > 0

    def __ge__(self, other) -> bool:
        return self.compare(other) >= 0

    __hash__ = None  # type: ignore[assignment]

    # -- display ------------------------------------------------------

    def expression(self) -> str:
        if self.exp == 0:
            return str(self.coeff)
        power = f"{self.base}^{self.exp}"
        return power if self.coeff == 1 else f"{self.coeff}*{power}"

    def __str__(self) -> str:
        if self.materializable():
            return _str_int(int(self))
        return self.expression()

    def __repr__(self) -> str:
        return f"BigNat({self.coeff}, {self.base}, {self.exp})"


@dataclass(frozen=True)
class BoundInputs:
    """|P| (or d), the width or ||T||_inf, and |rho_L| or ||rho_L||_inf."""

    num_states: int
    width: int
    leaders: int

    def __post_init__(self):
        if self.num_states < 1:
            raise ValueError("num_states must be at least 1")
        if self.width < 0 or self.leaders < 0:
            raise ValueError("width and leaders must be natural")

    @property
    def base(self) -> int:
        return 4 + 4 * self.width + 2 * self.leaders


def main_theorem_bound(inputs: BoundInputs) -> BigNat:
    """(4 + 4 width + 2 |rho_L|) ** (|P| ** ((|P| + 2) ** 2))."""
    d = inputs.num_states
    return BigNat.power(inputs.base, d ** ((d + 2) ** 2))


def theorem61_bound(d: int, t_norm: int, r_norm: int) -> BigNat:
    """(4 + 4 ||T|| + 2 ||rho||) ** (d^d (1 + (2 + d^d) ** (d + 1)))."""
    if d < 1:
        raise ValueError("d must be at least 1")
    if min(t_norm, r_norm) < 0:
        raise ValueError("norms must be natural")
    dd = d**d
    return BigNat.power(4 + 4 * t_norm + 2 * r_norm, dd * (1 + (2 + dd) ** (d + 1)))


@dataclass(frozen=True)
class Section8Constants:
    b: BigNat
    h: BigNat
    k: BigNat
    a: BigNat
    l: BigNat  # noqa: E741
    r: BigNat

    def as_dict(self) -> dict[str, BigNat]:
        return {"b": self.b, "h": self.h, "k": self.k, "a": self.a, "l": self.l, "r": self.r}


def _ladder_exponent(d: int) -> int:
    e = (d - 1) ** (d - 1)
    return e * (1 + (2 + e) ** d)


def section8_constants(d: int, t_norm: int, l_norm: int) -> Section8Constants:
    """b, h, k, a, l and r of the lower-bound argument, with |P| = d."""
    if d < 2:
        raise ValueError("d must be at least 2")
    if min(t_norm, l_norm) < 0:
        raise ValueError("norms must be natural")
    e = _ladder_exponent(d)
    b = BigNat.power(4 + 4 * t_norm + 2 * l_norm, e)
    h = b * (d * (1 + t_norm))
    return Section8Constants(
        b=b,
        h=h,
        k=(h ** (d * d + d + 1)) * d,
        a=h ** (2 * d + 3),
        l=h ** (5 * d * d),
        r=BigNat(2 * e * (5 * d * d + 2 * d + 4)),
    )


@dataclass(frozen=True)
class ConsistencyReport:
    inputs: BoundInputs
    checks: tuple[tuple[str, bool], ...]

    @property
    def ok(self) -> bool:
        return all(v for _, v in self.checks)


def consistency_check(inputs: BoundInputs) -> ConsistencyReport:
    """h <= b^2, h^(5d^2+2d+4) <= base^r, r <= d^((d+2)^2), and base^r <= the main bound."""
    d, t, l = inputs.num_states, inputs.width, inputs.leaders
    if d < 2:
        raise ValueError("d must be at least 2")
    c = section8_constants(d, t, l)
    r = int(c.r)
    base_r = BigNat.power(inputs.base, r)
    checks = (
        ("h <= b^2", c.h <= c.b**2),
        ("h^(5d^2+2d+4) <= (4+4t+2l)^r", c.h ** (5 * d * d + 2 * d + 4) <= base_r),
        ("r <= d^((d+2)^2)", r <= d ** ((d + 2) ** 2)),
        ("(4+4t+2l)^r <= main bound", base_r <= main_theorem_bound(inputs)),
    )
    return ConsistencyReport(inputs, checks)


def _loglog(n: BigNat, prec: int):
    with _ivprec(prec):
        return mpmath.iv.log(n.log2_interval(prec) * mpmath.iv.log(2))


def _corollary_floor(n: BigNat, m: int, h: Fraction, prec: int) -> int | None:
    with _ivprec(prec):
        iv = mpmath.iv
        diff = _loglog(n, prec) - iv.log(iv.log(iv.mpf(10 * m)))
        if diff.b <= 0:
            return 0
        if diff.a <= 0:
            return None
        value = iv.exp(iv.log(diff / iv.log(2)) * iv.mpf(h.numerator) / h.denominator) - 2
        with mpmath.workprec(prec):
            lo, hi = int(mpmath.floor(value.a)), int(mpmath.floor(value.b))
        if lo != hi:
            return None
        return max(0, lo)


def corollary_state_lower_bound(n: "int | BigNat", m: int, h: "Fraction | float | str") -> int:
    """floor(((log log n - log log 10m) / log 2) ** h) - 2, clamped at 0.

    Evaluated with interval logarithms at two precisions which must agree.
    """
    n = BigNat.of(n)
    h = Fraction(h)
    if m < 1:
        raise ValueError("m must be at least 1")
    if not 0 < h < Fraction(1, 2):
        raise ValueError("h must lie strictly between 0 and 1/2")
    if n.compare(10 * m) <= 0:
        return 0
    prec = 96 + n.exp.bit_length() + n.coeff.bit_length().bit_length()
    results = []
    while len(results) < 2 and prec < 1 << 16:
        value = _corollary_floor(n, m, h, prec)
        if value is not None:
            results.append(value)
        prec *= 2
    if len(results) < 2:
        raise ArithmeticError("floor undecided at the highest precision tried")
    assert results[0] == results[1]
    return results[0]
