"""Exact arithmetic on p-adic integers truncated to a fixed precision.

A value is the canonical residue in [0, p**K) together with its K base-p
digits (little-endian, ``digits[0]`` is the units digit).  Every operation
is exact modulo p**K; nothing is floating or adaptive.  Besides the ring
operations the module provides the carry-free digit-wise operations
(addition and multiplication of digits mod p), Teichmueller lifts,
the decomposition of a nonzero value into p-power, torsion and principal
unit parts, and truncated-series exponential / logarithm / power maps on
principal units.
"""

from __future__ import annotations

import math
from dataclasses import dataclass


class ContextMismatch(ValueError):
    """Operands belong to different (p, precision) contexts."""


def is_prime(n: int) -> bool:
    """Deterministic primality test by trial division (n < 2**16 in practice)."""
    if n < 2:
        return False
    if n % 2 == 0:
        return n == 2
    d = 3
    while d * d <= n:
        if n % d == 0:
            return False
        d += 2
    return True


class PrimeContext:
    """Shared setting (p, K): base prime and number of stored digits.

    Values from different contexts never mix; two contexts compare equal
    iff they agree on both p and K.
    """

    __slots__ = ("p", "precision", "modulus")

    def __init__(self, p: int, precision: int, *, max_precision: int = 32):
        if not (2 <= p < 2**16):
            raise ValueError(f"p must satisfy 2 <= p < 2**16, got {p}")
        if not is_prime(p):
            raise ValueError(f"p must be prime, got {p}")
        if not (1 <= precision <= max_precision):
            raise ValueError(
                f"precision must be in [1, {max_precision}], got {precision}"
            )
        self.p = p
        self.precision = precision
        self.modulus = p**precision

    def __eq__(self, other: object) -> bool:
        if isinstance(other, PrimeContext):
            return self.p == other.p and self.precision == other.precision
        return NotImplemented

    def __hash__(self) -> int:
        return hash((self.p, self.precision))

    def __repr__(self) -> str:
        return f"PrimeContext(p={self.p}, precision={self.precision})"

    # -- raw residue helpers (used in table-building hot loops) ----------

    def digits_of(self, value: int) -> tuple[int, ...]:
        """Little-endian base-p digits of a residue, length K."""
        p = self.p
        out = []
        v = value % self.modulus
        for _ in range(self.precision):
            v, r = divmod(v, p)
            out.append(r)
        return tuple(out)

    def value_of(self, digits) -> int:
        """Residue encoded by little-endian digits (length <= K)."""
        if len(digits) > self.precision:
            raise ValueError(f"got {len(digits)} digits, precision is {self.precision}")
        value = 0
        for i, d in enumerate(digits):
            if not (0 <= d < self.p):
                raise ValueError(f"digit {d} at position {i} not in [0, {self.p})")
            value += d * self.p**i
        return value

    def xor_values(self, x: int, y: int) -> int:
        """Digit-wise addition mod p of two residues (no carries)."""
        p = self.p
        out = 0
        scale = 1
        for _ in range(self.precision):
            out += ((x + y) % p) * scale
            x //= p
            y //= p
            scale *= p
        return out

    def and_values(self, x: int, y: int) -> int:
        """Digit-wise multiplication mod p of two residues (no carries)."""
        p = self.p
        out = 0
        scale = 1
        for _ in range(self.precision):
            out += ((x % p) * (y % p)) % p * scale
            x //= p
            y //= p
            scale *= p
        return out

    def valuation_of(self, value: int) -> int | float:
        """Index of the lowest nonzero digit; math.inf for 0 (zero to precision)."""
        v = value % self.modulus
        if v == 0:
            return math.inf
        k = 0
        while v % self.p == 0:
            v //= self.p
            k += 1
        return k

    def units(self):
        """Iterate the residues coprime to p, ascending."""
        for v in range(1, self.modulus):
            if v % self.p != 0:
                yield v

    # -- constructors -----------------------------------------------------

    def integer(self, n: int) -> "PadicInt":
        return PadicInt(self, n)

    def from_digits(self, digits) -> "PadicInt":
        return PadicInt(self, self.value_of(digits))

    def zero(self) -> "PadicInt":
        return PadicInt(self, 0)

    def one(self) -> "PadicInt":
        return PadicInt(self, 1)


class PadicInt:
    """Immutable p-adic integer known exactly modulo p**K."""

    __slots__ = ("ctx", "value", "digits")

    def __init__(self, ctx: PrimeContext, value: int):
        self.ctx = ctx
        self.value = value % ctx.modulus
        self.digits = ctx.digits_of(self.value)

    def _coerce(self, other) -> "PadicInt":
        if isinstance(other, PadicInt):
            if other.ctx != self.ctx:
                raise ContextMismatch(f"{self.ctx} vs {other.ctx}")
            return other
        if isinstance(other, int):
            return PadicInt(self.ctx, other)
        return NotImplemented

    # -- ring operations ---------------------------------------------------

    def __add__(self, other):
        other = self._coerce(other)
        if other is NotImplemented:
            return NotImplemented
        return PadicInt(self.ctx, self.value + other.value)

    __radd__ = __add__

    def __sub__(self, other):
        other = self._coerce(other)
        if other is NotImplemented:
            return NotImplemented
        return PadicInt(self.ctx, self.value - other.value)

    def __rsub__(self, other):
        other = self._coerce(other)
        if other is NotImplemented:
            return NotImplemented
        return other - self

    def __mul__(self, other):
        other = self._coerce(other)
        if other is NotImplemented:
            return NotImplemented
        return PadicInt(self.ctx, self.value * other.value)

    __rmul__ = __mul__

    def __neg__(self):
        return PadicInt(self.ctx, -self.value)

    def __pow__(self, n: int):
        # integer exponents only; negative allowed for units
        return PadicInt(self.ctx, pow(self.value, n, self.ctx.modulus))

    # -- carry-free digit-wise operations -----------------------------------

    def __xor__(self, other):
        other = self._coerce(other)
        if other is NotImplemented:
            return NotImplemented
        return PadicInt(self.ctx, self.ctx.xor_values(self.value, other.value))

    def __and__(self, other):
        other = self._coerce(other)
        if other is NotImplemented:
            return NotImplemented
        return PadicInt(self.ctx, self.ctx.and_values(self.value, other.value))

    # -- structure ----------------------------------------------------------

    def valuation(self) -> int | float:
        """Lowest index with a nonzero digit; math.inf when all K digits vanish."""
        return self.ctx.valuation_of(self.value)

    def is_unit(self) -> bool:
        return self.value % self.ctx.p != 0

    def digit(self, i: int) -> int:
        return self.digits[i]

    def __eq__(self, other: object) -> bool:
        if isinstance(other, PadicInt):
            return self.ctx == other.ctx and self.value == other.value
        if isinstance(other, int):
            return self.value == other % self.ctx.modulus
        return NotImplemented

    def __hash__(self) -> int:
        return hash((self.ctx.p, self.ctx.precision, self.value))

    def __int__(self) -> int:
        return self.value

    def __bool__(self) -> bool:
        return self.value != 0

    def __repr__(self) -> str:
        return f"PadicInt({self.value} = {list(self.digits)} base {self.ctx.p})"

    def to_json(self) -> dict:
        return {"p": self.ctx.p, "K": self.ctx.precision, "digits": list(self.digits)}


def padic_from_json(ctx: PrimeContext, data) -> PadicInt:
    """Decode a value from JSON: digit dict, decimal string, or plain int."""
    if isinstance(data, dict):
        if data.get("p", ctx.p) != ctx.p or data.get("K", ctx.precision) != ctx.precision:
            raise ContextMismatch(f"encoded (p,K) does not match {ctx}")
        return ctx.from_digits(data["digits"])
    if isinstance(data, str):
        value = int(data, 10)
        if not (0 <= value < ctx.modulus):
            raise ValueError(f"residue {value} outside [0, {ctx.modulus})")
        return ctx.integer(value)
    if isinstance(data, int):
        return ctx.integer(data)
    raise ValueError(f"cannot decode p-adic value from {data!r}")


# ---------------------------------------------------------------------------
# units: inverse, Teichmueller lift, unit decomposition
# ---------------------------------------------------------------------------


def inverse_unit(x: PadicInt) -> PadicInt:
    """Multiplicative inverse modulo p**K; requires a unit."""
    if not x.is_unit():
        raise ValueError(f"{x!r} is not a unit (divisible by {x.ctx.p})")
    return PadicInt(x.ctx, pow(x.value, -1, x.ctx.modulus))


def teichmuller(u: PadicInt) -> PadicInt:
    """The (p-1)-th root of unity congruent to u mod p.

    Iterates z -> z**p exactly K times: each step gains at least one digit
    of agreement with the root, so K steps pin it down modulo p**K.
    """
    if not u.is_unit():
        raise ValueError(f"{u!r} is not a unit")
    ctx = u.ctx
    z = u.value
    for _ in range(ctx.precision):
        z = pow(z, ctx.p, ctx.modulus)
    return PadicInt(ctx, z)


@dataclass(frozen=True)
class UnitDecomposition:
    """x = p**valuation * theta * one_plus_pt with theta torsion, 1+pt principal."""

    valuation: int
    theta: PadicInt
    one_plus_pt: PadicInt
    t: PadicInt

    def recompose(self) -> PadicInt:
        ctx = self.theta.ctx
        return PadicInt(
            ctx, ctx.p**self.valuation * self.theta.value * self.one_plus_pt.value
        )


def unit_decompose(x: PadicInt) -> UnitDecomposition:
    """Split a nonzero value into p-power, Teichmueller and principal-unit parts.

    The unit factors are only observable modulo p**(K - valuation); they are
    stored at full context precision with the unobservable digits following
    from the canonical residue.
    """
    if x.value == 0:
        raise ValueError("cannot decompose zero (zero to precision)")
    ctx = x.ctx
    k = x.valuation()
    unit = ctx.integer(x.value // ctx.p**k)
    theta = teichmuller(unit)
    one_plus_pt = unit * inverse_unit(theta)
    t = ctx.integer((one_plus_pt.value - 1) // ctx.p)
    return UnitDecomposition(valuation=k, theta=theta, one_plus_pt=one_plus_pt, t=t)


# ---------------------------------------------------------------------------
# truncated-series kernel: exp / ln / powers of principal units
# ---------------------------------------------------------------------------


def _fraction_mod(num: int, den: int, p: int, modulus: int) -> int:
    """num/den modulo p**K, valid when v_p(den) <= v_p(num)."""
    while den % p == 0:
        if num % p != 0:
            raise ValueError("fraction is not a p-adic integer")
        num //= p
        den //= p
    return num * pow(den, -1, modulus) % modulus


def _min_exp_valuation(ctx: PrimeContext) -> int:
    # convergence domain of the exponential series: v >= 1 (p odd), v >= 2 (p = 2)
    return 2 if ctx.p == 2 else 1


def exp_p(t: PadicInt) -> PadicInt:
    """Exponential series sum t**n / n!, exact modulo p**K on its domain.

    Requires valuation(t) >= 1 for odd p and >= 2 for p = 2.  The series is
    cut at the first N where n*v_min - (n-1)/(p-1) >= K; that lower bound on
    the term valuation (via Legendre's count of p in n!) is increasing in n,
    so every omitted term vanishes modulo p**K.
    """
    ctx = t.ctx
    vmin = _min_exp_valuation(ctx)
    v = t.valuation()
    if v < vmin:
        raise ValueError(f"exp needs valuation >= {vmin} for p={ctx.p}, got {v}")
    acc = 1  # n = 0 term
    z_pow = 1
    factorial = 1
    n = 1
    # include term n while n*vmin - (n-1)/(p-1) < K, scaled by p-1 to stay in Z
    while n * vmin * (ctx.p - 1) - (n - 1) < ctx.precision * (ctx.p - 1):
        z_pow *= t.value
        factorial *= n
        acc = (acc + _fraction_mod(z_pow, factorial, ctx.p, ctx.modulus)) % ctx.modulus
        n += 1
    return PadicInt(ctx, acc)


def ln_p(x: PadicInt) -> PadicInt:
    """Logarithm series of 1+z, exact modulo p**K on its domain.

    Requires x = 1 mod p for odd p and x = 1 mod 4 for p = 2.  Terms are
    (-1)**(n+1) z**n / n; the cut point is the first n >= 2 with
    n*v(z) - log_p(n) >= K, past which every term valuation stays >= K.
    """
    ctx = x.ctx
    z = x.value - 1
    if ctx.p == 2:
        if x.value % 4 != 1:
            raise ValueError(f"ln at p=2 needs x = 1 mod 4, got {x.value}")
    elif z % ctx.p != 0:
        raise ValueError(f"ln needs x = 1 mod {ctx.p}, got {x.value}")
    if z == 0:
        return ctx.zero()
    v = ctx.valuation_of(z)
    acc = 0
    z_pow = 1
    n = 1
    while True:
        # stop once n*v - log_p(n) >= K and the bound is monotone (n >= 2)
        if n >= 2 and n * v >= ctx.precision and ctx.p ** (n * v - ctx.precision) >= n:
            break
        z_pow *= z
        term = _fraction_mod(z_pow, n, ctx.p, ctx.modulus)
        acc = (acc - term if n % 2 == 0 else acc + term) % ctx.modulus
        n += 1
    return PadicInt(ctx, acc)


def _pow_unit_binomial(x: PadicInt, exponent_value: int) -> int:
    # sum C(a, n) z**n with z = x - 1; C(a, n) is a p-adic integer, so the
    # n-th term has valuation >= n*v(z) and the tail past K/v(z) vanishes.
    ctx = x.ctx
    z = x.value - 1
    if z == 0:
        return 1
    v = ctx.valuation_of(z)
    acc = 1
    numerator = 1  # a(a-1)...(a-n+1) mod p**K
    z_pow = 1
    factorial = 1
    n = 1
    while (n - 1) * v < ctx.precision:
        numerator = numerator * (exponent_value - (n - 1)) % ctx.modulus
        z_pow *= z
        factorial *= n
        acc = (acc + _fraction_mod(numerator * z_pow, factorial, ctx.p, ctx.modulus)) % ctx.modulus
        n += 1
    return acc


def pow_unit(x: PadicInt, exponent: "PadicInt | int") -> PadicInt:
    """(1 + pt)**a for a p-adic (or plain integer) exponent a.

    Requires x = 1 mod p.  Computed by the binomial series, which converges
    on all principal units including 1+2t with t odd at p = 2.  Where the
    exp/ln route is also defined (odd p, or x = 1 mod 4 at p = 2) the two
    routes are compared and must agree; plain nonnegative integer exponents
    are additionally checked against square-and-multiply.
    """
    ctx = x.ctx
    if (x.value - 1) % ctx.p != 0:
        raise ValueError(f"pow_unit needs x = 1 mod {ctx.p}, got {x.value}")
    if isinstance(exponent, PadicInt):
        if exponent.ctx != ctx:
            raise ContextMismatch(f"{ctx} vs {exponent.ctx}")
        exponent_value = exponent.value
        plain_integer = False
    else:
        exponent_value = exponent
        plain_integer = True
    result = _pow_unit_binomial(x, exponent_value)
    if ctx.p != 2 or x.value % 4 == 1:
        via_exp = exp_p(ctx.integer(exponent_value) * ln_p(x)).value
        if via_exp != result:
            raise AssertionError(
                f"binomial and exp/ln powers disagree: {result} vs {via_exp} "
                f"for base {x.value}, exponent {exponent_value}, {ctx}"
            )
    if plain_integer and exponent >= 0:
        direct = pow(x.value, exponent, ctx.modulus)
        if direct != result:
            raise AssertionError(
                f"binomial power disagrees with square-and-multiply: "
                f"{result} vs {direct} for base {x.value}, exponent {exponent}"
            )
    return PadicInt(ctx, result)
