"""Invertible structure-preserving maps of Z/p**K for each base operation.

Four parametric families are constructed: scalings x -> Ax for addition,
the multiplicative maps acting separately on the p-power, torsion and
principal-unit factors, triangular digit-linear maps for carry-free
addition, and digit-power maps for carry-free multiplication.  The family
parameters carry exactly the constraints that make the realized tables
invertible, so every realized spec is an automorphism for its operation.

Also here: homomorphism checking against any binary operation (including
custom operations given by a truncated double power series), the parameter
composition law of the multiplicative family, and the analyzer that finds
which scalings x -> Ax respect a custom series operation.
"""

from __future__ import annotations

import math
import random
from dataclasses import dataclass

from .core import (
    ContextMismatch,
    PadicInt,
    PrimeContext,
    inverse_unit,
    padic_from_json,
    pow_unit,
    teichmuller,
    unit_decompose,
)
from .lipschitz import LipschitzFn, is_bijective_mod

# above this table size homomorphism checks switch to seeded random pairs
EXHAUSTIVE_PAIR_LIMIT = 2**10


class Operation:
    """Binary operation on residues mod p**K, applied at a context's precision."""

    __slots__ = ("name", "_fn")

    def __init__(self, name: str, fn):
        self.name = name
        self._fn = fn

    def apply(self, ctx: PrimeContext, x: int, y: int) -> int:
        return self._fn(ctx, x, y)

    def __repr__(self) -> str:
        return f"Operation({self.name!r})"


PLUS = Operation("plus", lambda ctx, x, y: (x + y) % ctx.modulus)
TIMES = Operation("times", lambda ctx, x, y: (x * y) % ctx.modulus)
XOR = Operation("xor", lambda ctx, x, y: ctx.xor_values(x, y))
AND = Operation("and", lambda ctx, x, y: ctx.and_values(x, y))

OPERATIONS = {op.name: op for op in (PLUS, TIMES, XOR, AND)}


def operation_by_name(name: str) -> Operation:
    try:
        return OPERATIONS[name]
    except KeyError:
        raise ValueError(f"unknown operation {name!r}; choose from {sorted(OPERATIONS)}")


class CustomOp:
    """Binary operation c + a*x + b*y + sum c_ij x**i y**j with i+j >= 2.

    The term list is finite: coefficients that vanish mod p**K are dropped
    at construction since they are unobservable at this precision.
    """

    __slots__ = ("ctx", "constant", "linear_x", "linear_y", "terms")

    def __init__(self, ctx: PrimeContext, constant, linear_x, linear_y, terms=()):
        self.ctx = ctx
        self.constant = self._coerce(constant)
        self.linear_x = self._coerce(linear_x)
        self.linear_y = self._coerce(linear_y)
        cleaned = []
        for i, j, coeff in terms:
            if i < 0 or j < 0 or i + j < 2:
                raise ValueError(f"term exponents ({i},{j}) must be >= 0 with i+j >= 2")
            coeff = self._coerce(coeff)
            if coeff.value != 0:
                cleaned.append((i, j, coeff))
        self.terms = tuple(cleaned)

    def _coerce(self, v) -> PadicInt:
        if isinstance(v, PadicInt):
            if v.ctx != self.ctx:
                raise ContextMismatch(f"{self.ctx} vs {v.ctx}")
            return v
        return self.ctx.integer(v)

    def degrees(self) -> tuple[int, ...]:
        """Total degrees i+j that actually occur, ascending."""
        return tuple(sorted({i + j for i, j, _ in self.terms}))

    def evaluate(self, x: int, y: int, modulus: int | None = None) -> int:
        m = modulus if modulus is not None else self.ctx.modulus
        total = self.constant.value + self.linear_x.value * x + self.linear_y.value * y
        for i, j, coeff in self.terms:
            total += coeff.value * pow(x, i, m) * pow(y, j, m)
        return total % m

    def as_operation(self) -> Operation:
        return Operation("custom", lambda ctx, x, y: self.evaluate(x, y, ctx.modulus))

    def to_json(self) -> dict:
        return {
            "c": str(self.constant.value),
            "a": str(self.linear_x.value),
            "b": str(self.linear_y.value),
            "terms": [[i, j, str(c.value)] for i, j, c in self.terms],
        }

    @classmethod
    def from_json(cls, ctx: PrimeContext, data: dict) -> "CustomOp":
        return cls(
            ctx,
            padic_from_json(ctx, data.get("c", 0)),
            padic_from_json(ctx, data.get("a", 0)),
            padic_from_json(ctx, data.get("b", 0)),
            [(i, j, padic_from_json(ctx, c)) for i, j, c in data.get("terms", [])],
        )


# ---------------------------------------------------------------------------
# family parameter records
# ---------------------------------------------------------------------------


def _require_unit(v: PadicInt, name: str) -> None:
    if not v.is_unit():
        raise ValueError(f"{name} must be a unit, got {v.value} (p={v.ctx.p})")


@dataclass(frozen=True)
class AddSpec:
    """x -> A*x with A a unit: the additive automorphisms."""

    A: PadicInt

    def __post_init__(self):
        _require_unit(self.A, "A")

    @property
    def ctx(self) -> PrimeContext:
        return self.A.ctx


@dataclass(frozen=True)
class MulSpec:
    """Multiplicative automorphism acting as (p-power, torsion, principal unit).

    The p-power part picks up A**k, the torsion part is raised to s with
    gcd(s, p-1) = 1, and the principal-unit part is raised to the p-adic
    exponent a (a unit).  For p = 2 the torsion is trivial and s is fixed at 1.
    """

    s: int
    a: PadicInt
    A: PadicInt

    def __post_init__(self):
        ctx = self.a.ctx
        if self.A.ctx != ctx:
            raise ContextMismatch(f"{ctx} vs {self.A.ctx}")
        if not (1 <= self.s <= ctx.p - 1):
            raise ValueError(f"s must lie in [1, {ctx.p - 1}], got {self.s}")
        if math.gcd(self.s, ctx.p - 1) != 1:
            raise ValueError(f"s={self.s} must be coprime to p-1={ctx.p - 1}")
        _require_unit(self.a, "a")
        _require_unit(self.A, "A")

    @property
    def ctx(self) -> PrimeContext:
        return self.a.ctx


@dataclass(frozen=True)
class XorSpec:
    """Triangular digit-linear map: output digit k is a mod-p combination
    of input digits 0..k with a nonzero coefficient on digit k."""

    context: PrimeContext
    alpha: tuple[tuple[int, ...], ...]

    def __post_init__(self):
        ctx = self.context
        object.__setattr__(self, "alpha", tuple(tuple(row) for row in self.alpha))
        if len(self.alpha) != ctx.precision:
            raise ValueError(f"need {ctx.precision} rows, got {len(self.alpha)}")
        for k, row in enumerate(self.alpha):
            if len(row) != k + 1:
                raise ValueError(f"row {k} must have {k + 1} entries, got {len(row)}")
            for c in row:
                if not (0 <= c < ctx.p):
                    raise ValueError(f"coefficient {c} outside [0, {ctx.p})")
            if row[k] % ctx.p == 0:
                raise ValueError(f"diagonal coefficient of row {k} must be nonzero")

    @property
    def ctx(self) -> PrimeContext:
        return self.context


@dataclass(frozen=True)
class AndSpec:
    """Digit-power map: output digit k is (input digit k) ** s_list[k] mod p,
    with every exponent coprime to p-1."""

    context: PrimeContext
    exponents: tuple[int, ...]

    def __post_init__(self):
        ctx = self.context
        object.__setattr__(self, "exponents", tuple(self.exponents))
        if len(self.exponents) != ctx.precision:
            raise ValueError(
                f"need {ctx.precision} exponents, got {len(self.exponents)}"
            )
        for e in self.exponents:
            if not (1 <= e <= ctx.p - 1):
                raise ValueError(f"exponent {e} outside [1, {ctx.p - 1}]")
            if math.gcd(e, ctx.p - 1) != 1:
                raise ValueError(f"exponent {e} not coprime to p-1={ctx.p - 1}")

    @property
    def ctx(self) -> PrimeContext:
        return self.context


AutSpec = AddSpec | MulSpec | XorSpec | AndSpec


def aut_spec_to_json(spec: AutSpec) -> dict:
    if isinstance(spec, AddSpec):
        return {"family": "add", "A": str(spec.A.value)}
    if isinstance(spec, MulSpec):
        return {"family": "mul", "s": spec.s, "a": str(spec.a.value), "A": str(spec.A.value)}
    if isinstance(spec, XorSpec):
        return {"family": "xor", "alpha": [list(row) for row in spec.alpha]}
    if isinstance(spec, AndSpec):
        return {"family": "and", "s_list": list(spec.exponents)}
    raise TypeError(f"not an automorphism spec: {spec!r}")


def aut_spec_from_json(ctx: PrimeContext, data: dict) -> AutSpec:
    family = data.get("family")
    if family == "add":
        return AddSpec(padic_from_json(ctx, data["A"]))
    if family == "mul":
        return MulSpec(
            int(data["s"]),
            padic_from_json(ctx, data["a"]),
            padic_from_json(ctx, data["A"]),
        )
    if family == "xor":
        return XorSpec(ctx, data["alpha"])
    if family == "and":
        return AndSpec(ctx, data["s_list"])
    raise ValueError(f"unknown family {family!r}")


# ---------------------------------------------------------------------------
# realization as value tables
# ---------------------------------------------------------------------------


def _realize_mul(spec: MulSpec) -> LipschitzFn:
    ctx = spec.ctx
    p, modulus = ctx.p, ctx.modulus
    torsion = {d: teichmuller(ctx.integer(d)) for d in range(1, p)}
    torsion_pow_s = {d: pow(t.value, spec.s, modulus) for d, t in torsion.items()}
    torsion_inv = {d: inverse_unit(t).value for d, t in torsion.items()}
    unit_power_cache: dict[int, int] = {}
    table = [0] * modulus
    for x in range(1, modulus):
        k = 0
        u = x
        while u % p == 0:
            u //= p
            k += 1
        d = u % p
        principal = u * torsion_inv[d] % modulus
        powered = unit_power_cache.get(principal)
        if powered is None:
            powered = pow_unit(ctx.integer(principal), spec.a).value
            unit_power_cache[principal] = powered
        table[x] = (
            pow(p, k, modulus)
            * pow(spec.A.value, k, modulus)
            * torsion_pow_s[d]
            * powered
            % modulus
        )
    return LipschitzFn.from_table(
        ctx, table, provenance=f"mul(s={spec.s},a={spec.a.value},A={spec.A.value})"
    )


def realize(spec: AutSpec) -> LipschitzFn:
    """Build the value table of a family member (validated tower-compatible)."""
    ctx = spec.ctx
    if isinstance(spec, AddSpec):
        table = [spec.A.value * x % ctx.modulus for x in range(ctx.modulus)]
        return LipschitzFn.from_table(ctx, table, provenance=f"add(A={spec.A.value})")
    if isinstance(spec, MulSpec):
        return _realize_mul(spec)
    if isinstance(spec, XorSpec):
        p = ctx.p
        table = []
        for x in range(ctx.modulus):
            xd = ctx.digits_of(x)
            value = 0
            scale = 1
            for row in spec.alpha:
                digit = sum(c * xd[i] for i, c in enumerate(row)) % p
                value += digit * scale
                scale *= p
            table.append(value)
        return LipschitzFn.from_table(ctx, table, provenance="xor")
    if isinstance(spec, AndSpec):
        p = ctx.p
        table = []
        for x in range(ctx.modulus):
            xd = ctx.digits_of(x)
            value = 0
            scale = 1
            for k, e in enumerate(spec.exponents):
                value += pow(xd[k], e, p) * scale
                scale *= p
            table.append(value)
        return LipschitzFn.from_table(ctx, table, provenance="and")
    raise TypeError(f"not an automorphism spec: {spec!r}")


# ---------------------------------------------------------------------------
# homomorphism / automorphism checks
# ---------------------------------------------------------------------------


@dataclass(frozen=True)
class HomReport:
    """Outcome of f(x op y) = f(x) op f(y) checking over argument pairs."""

    ok: bool
    counterexample: tuple[int, int] | None
    mode: str  # "exhaustive" or "random"
    checked: int

    def __bool__(self) -> bool:
        return self.ok


def is_homomorphism(
    f: LipschitzFn, op: Operation, *, seed: int = 0, samples: int = 100_000
) -> HomReport:
    """Check the homomorphism law; exhaustive when p**K <= 2**10.

    Exhaustive mode scans pairs in lexicographic order and reports the first
    counterexample; otherwise ``samples`` seeded random pairs are drawn.
    """
    ctx = f.ctx
    n = ctx.modulus
    table = f.table
    if n <= EXHAUSTIVE_PAIR_LIMIT:
        for x in range(n):
            fx = table[x]
            for y in range(n):
                if table[op.apply(ctx, x, y)] != op.apply(ctx, fx, table[y]):
                    return HomReport(False, (x, y), "exhaustive", x * n + y + 1)
        return HomReport(True, None, "exhaustive", n * n)
    rng = random.Random(seed)
    for i in range(samples):
        x = rng.randrange(n)
        y = rng.randrange(n)
        if table[op.apply(ctx, x, y)] != op.apply(ctx, table[x], table[y]):
            return HomReport(False, (x, y), "random", i + 1)
    return HomReport(True, None, "random", samples)


def is_automorphism(f: LipschitzFn, ops, *, seed: int = 0) -> bool:
    """Tower-compatible (by construction) + bijective at every level + a
    homomorphism for every listed operation."""
    for k in range(1, f.ctx.precision + 1):
        if not is_bijective_mod(f, k):
            return False
    return all(is_homomorphism(f, op, seed=seed).ok for op in ops)


# ---------------------------------------------------------------------------
# multiplicative family: composition law on parameters
# ---------------------------------------------------------------------------


def compose_mul(lhs: MulSpec, rhs: MulSpec) -> MulSpec:
    """Parameters of x -> lhs(rhs(x)).

    With rhs scaling factor B split as theta_B * (1 + p*B1), the composite is
    (s*d normalized into [1, p-1] mod p-1, a*b, A * theta_B**s * (1+p*B1)**a).
    """
    ctx = lhs.ctx
    if rhs.ctx != ctx:
        raise ContextMismatch(f"{ctx} vs {rhs.ctx}")
    parts = unit_decompose(rhs.A)
    s = (lhs.s * rhs.s - 1) % (ctx.p - 1) + 1
    a = lhs.a * rhs.a
    A = lhs.A * parts.theta**lhs.s * pow_unit(parts.one_plus_pt, lhs.a)
    return MulSpec(s, a, A)


# ---------------------------------------------------------------------------
# which scalings respect a custom series operation
# ---------------------------------------------------------------------------


@dataclass(frozen=True)
class GReport:
    """Scalings x -> Ax commuting with a custom operation, at this precision.

    ``witnesses`` are the residues A mod p**K that solve A**d = 1 (d the gcd
    of the shifted total degrees; every unit when the operation is linear)
    and pass an explicit homomorphism check.  ``predicted_nontrivial`` is the
    full-ring expectation from the degree pattern: finite quotients can admit
    extra solutions of A**d = 1 that vanish at higher precision.
    """

    trivial: bool
    group_order: int
    witnesses: tuple[int, ...]
    exponent_gcd: int | None
    predicted_nontrivial: bool

    def to_json(self) -> dict:
        return {
            "trivial": self.trivial,
            "group_order": self.group_order,
            "witnesses": list(self.witnesses),
            "exponent_gcd": self.exponent_gcd,
            "predicted_nontrivial": self.predicted_nontrivial,
        }


def analyze_custom_op(op: CustomOp, *, max_modulus: int = EXHAUSTIVE_PAIR_LIMIT) -> GReport:
    """Find all scalings x -> Ax that are homomorphisms for a custom operation.

    Nonlinear degrees n force A**(n-1) = 1, collapsing to A**d = 1 with
    d = gcd(n - 1); candidates are found by exhaustive search over the units
    and each one is confirmed by an exhaustive homomorphism check (which also
    rules candidates out when the constant term does not scale).
    """
    ctx = op.ctx
    if ctx.modulus > max_modulus:
        raise ValueError(
            f"modulus {ctx.modulus} over the analyzer cap {max_modulus}"
        )
    degrees = op.degrees()
    if degrees:
        d: int | None = math.gcd(*(n - 1 for n in degrees))
        candidates = [A for A in ctx.units() if pow(A, d, ctx.modulus) == 1]
    else:
        d = None
        candidates = list(ctx.units())
    operation = op.as_operation()
    witnesses = tuple(
        A
        for A in candidates
        if is_homomorphism(realize(AddSpec(ctx.integer(A))), operation).ok
    )
    # full-ring expectation from the degree pattern and the constant term
    if d is None:
        predicted = op.constant.value == 0 and bool(op.linear_x) and bool(op.linear_y)
    else:
        p_part = 0
        n_part = d
        while n_part % ctx.p == 0:
            n_part //= ctx.p
            p_part += 1
        if ctx.p == 2:
            predicted = op.constant.value == 0 and p_part == 1
        else:
            predicted = op.constant.value == 0 and math.gcd(n_part, ctx.p - 1) != 1
    if predicted and len(witnesses) <= 1:
        raise AssertionError(
            "degree pattern predicts a nontrivial scaling group but only the "
            f"identity was found (degrees {degrees}, d={d})"
        )
    return GReport(
        trivial=len(witnesses) == 1,
        group_order=len(witnesses),
        witnesses=witnesses,
        exponent_gcd=d,
        predicted_nontrivial=predicted,
    )
