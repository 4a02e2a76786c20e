"""Tower-compatible (1-Lipschitz) functions at fixed precision.

A function is materialized as its full value table on [0, p**K).  Tower
compatibility -- x = y mod p**k implies f(x) = f(y) mod p**k for every
k <= K -- is exactly the 1-Lipschitz property visible at this precision,
and makes the reductions mod p**k well defined.

Three equivalent invertibility criteria are implemented: bijectivity of
every reduction, the interpolation-series criterion on the normalized
ball coefficients, and the digit-level criterion that every coordinate
sub-function is a permutation of the digit alphabet.
"""

from __future__ import annotations

import itertools
from dataclasses import dataclass

from .core import PrimeContext

# value tables are materialized in full; anything larger is out of scope
MAX_TABLE_SIZE = 2**24


class CompatibilityViolation(ValueError):
    """A table pair x = y mod p**level with f(x) != f(y) mod p**level."""

    def __init__(self, x: int, y: int, level: int):
        super().__init__(
            f"not tower compatible: arguments {x} and {y} agree mod p^{level} "
            f"but the values differ at that level"
        )
        self.x = x
        self.y = y
        self.level = level


def _check_table_size(ctx: PrimeContext) -> None:
    if ctx.modulus > MAX_TABLE_SIZE:
        raise ValueError(
            f"table of size {ctx.modulus} exceeds the desk-scale cap {MAX_TABLE_SIZE}"
        )


class LipschitzFn:
    """A tower-compatible self-map of Z/p**K, stored as a value table."""

    __slots__ = ("ctx", "table", "provenance")

    def __init__(self, ctx: PrimeContext, table, provenance: str | None = None):
        self.ctx = ctx
        self.table = tuple(table)
        self.provenance = provenance

    @classmethod
    def from_table(
        cls, ctx: PrimeContext, table, provenance: str | None = None
    ) -> "LipschitzFn":
        """Validate digit ranges and tower compatibility, then wrap the table.

        The first violation in (level, canonical representative, argument)
        order is raised as CompatibilityViolation.
        """
        _check_table_size(ctx)
        table = tuple(table)
        if len(table) != ctx.modulus:
            raise ValueError(f"table length {len(table)}, expected {ctx.modulus}")
        for x, v in enumerate(table):
            if not (0 <= v < ctx.modulus):
                raise ValueError(f"table[{x}] = {v} outside [0, {ctx.modulus})")
        for level in range(1, ctx.precision):
            block = ctx.p**level
            for x in range(block, ctx.modulus):
                rep = x % block
                if table[x] % block != table[rep] % block:
                    raise CompatibilityViolation(rep, x, level)
        return cls(ctx, table, provenance)

    @classmethod
    def from_subfunctions(
        cls, ctx: PrimeContext, subfunctions, provenance: str | None = None
    ) -> "LipschitzFn":
        """Assemble a table from digit maps.

        ``subfunctions[k][a]`` gives the k-th output digit as a function of
        the k-th input digit once the k low digits equal the prefix a; any
        such family yields a tower-compatible function.
        """
        _check_table_size(ctx)
        p = ctx.p
        table = []
        for x in range(ctx.modulus):
            value = 0
            scale = 1
            rest = x
            for k in range(ctx.precision):
                prefix = x % scale if k else 0
                digit = rest % p
                value += subfunctions[k][prefix][digit] * scale
                rest //= p
                scale *= p
            table.append(value)
        return cls.from_table(ctx, table, provenance)

    def __call__(self, x: int) -> int:
        return self.table[x % self.ctx.modulus]

    def __eq__(self, other: object) -> bool:
        if isinstance(other, LipschitzFn):
            return self.ctx == other.ctx and self.table == other.table
        return NotImplemented

    def __hash__(self) -> int:
        return hash((self.ctx.p, self.ctx.precision, self.table))

    def __repr__(self) -> str:
        tag = f", provenance={self.provenance!r}" if self.provenance else ""
        return f"LipschitzFn(p={self.ctx.p}, K={self.ctx.precision}{tag})"

    def table_mod(self, k: int) -> tuple[int, ...]:
        """Value table of the reduction mod p**k on [0, p**k)."""
        block = self.ctx.p**k
        return tuple(v % block for v in self.table[:block])


def compose(f: LipschitzFn, g: LipschitzFn) -> LipschitzFn:
    """x -> f(g(x)); compositions of tower-compatible maps stay compatible."""
    if f.ctx != g.ctx:
        raise ValueError(f"context mismatch: {f.ctx} vs {g.ctx}")
    table = tuple(f.table[v] for v in g.table)
    if __debug__:
        LipschitzFn.from_table(f.ctx, table)
    return LipschitzFn(f.ctx, table, provenance="compose")


# ---------------------------------------------------------------------------
# interpolation series over p-adic balls
# ---------------------------------------------------------------------------


def _digit_length(p: int, m: int) -> int:
    """Number of base-p digits of m >= 1."""
    n = 0
    while m:
        m //= p
        n += 1
    return n


@dataclass(frozen=True)
class VdpSeries:
    """Ball-indicator expansion coefficients of a function mod p**K.

    ``coefficients[m]`` is B_m: B_m = f(m) for m < p, and the increment of f
    between the ball of m and the ball with the leading digit of m removed
    otherwise.  For a tower-compatible source p**(digits(m)-1) divides B_m,
    so the normalized coefficient b_m = B_m / p**(digits(m)-1) is integral.
    """

    ctx: PrimeContext
    coefficients: tuple[int, ...]

    def normalized(self, m: int) -> int:
        """b_m as a residue (exact division by the guaranteed p-power)."""
        if m < self.ctx.p:
            return self.coefficients[m]
        shift = self.ctx.p ** (_digit_length(self.ctx.p, m) - 1)
        b, rem = divmod(self.coefficients[m], shift)
        if rem:
            raise ValueError(f"coefficient {m} not divisible by {shift}")
        return b

    def to_json(self) -> dict:
        return {
            "p": self.ctx.p,
            "K": self.ctx.precision,
            "B": list(self.coefficients),
        }


def vdp_transform(f: LipschitzFn) -> VdpSeries:
    """Coefficients B_m of f over the ball basis, exact mod p**K."""
    ctx = f.ctx
    p = ctx.p
    coeffs = list(f.table[:p])
    for m in range(p, ctx.modulus):
        n = _digit_length(p, m)
        leading = (m // p ** (n - 1)) * p ** (n - 1)
        coeffs.append((f.table[m] - f.table[m - leading]) % ctx.modulus)
    series = VdpSeries(ctx, tuple(coeffs))
    for m in range(p, ctx.modulus):
        series.normalized(m)  # divisibility must hold for a compatible source
    return series


def vdp_inverse(series: VdpSeries) -> LipschitzFn:
    """Evaluate the ball expansion back into a value table.

    f(x) sums B_m over the balls containing x: for each digit length n the
    truncation m of x to n digits contributes when m has exactly n digits
    (every one-digit truncation counts, zero included -- the m = 0 indicator
    is the ball of 0 mod p, not the constant one, which is what makes
    B_m = f(m) for m < p).  Compatibility of the result revalidates the
    coefficient divisibility through from_table.
    """
    ctx = series.ctx
    if len(series.coefficients) != ctx.modulus:
        raise ValueError(
            f"need {ctx.modulus} coefficients, got {len(series.coefficients)}"
        )
    p = ctx.p
    table = []
    for x in range(ctx.modulus):
        total = 0
        block = 1
        for n in range(1, ctx.precision + 1):
            block *= p
            m = x % block
            if n == 1 or m >= block // p:
                total += series.coefficients[m]
        table.append(total % ctx.modulus)
    return LipschitzFn.from_table(ctx, table, provenance="vdp_inverse")


# ---------------------------------------------------------------------------
# invertibility criteria
# ---------------------------------------------------------------------------


@dataclass(frozen=True)
class CriterionReport:
    """Outcome of a measure-preservation check with the first failure site."""

    ok: bool
    failure: tuple[int, int] | None = None  # lexicographically first (level, index)
    detail: str = ""

    def __bool__(self) -> bool:
        return self.ok


def preserves_measure_vdp(f: LipschitzFn) -> CriterionReport:
    """Ball-coefficient criterion for invertibility.

    The base coefficients b_0..b_{p-1} must form a complete residue system
    mod p, and for each level k >= 1 and base point m < p**k the normalized
    coefficients over the sibling balls {m + i*p**k : i = 1..p-1} must hit
    every nonzero residue mod p.
    """
    ctx = f.ctx
    p = ctx.p
    series = vdp_transform(f)
    base = {series.normalized(m) % p for m in range(p)}
    if base != set(range(p)):
        return CriterionReport(
            ok=False, failure=(0, 0), detail="base coefficients not a complete residue system"
        )
    for k in range(1, ctx.precision):
        block = p**k
        for m in range(block):
            siblings = {series.normalized(m + i * block) % p for i in range(1, p)}
            if siblings != set(range(1, p)):
                return CriterionReport(
                    ok=False,
                    failure=(k, m),
                    detail=f"sibling coefficients of {m} at level {k} miss a nonzero residue",
                )
    return CriterionReport(ok=True)


@dataclass(frozen=True)
class SubfunctionTable:
    """Digit-k action of a function once the k low input digits are fixed."""

    level: int
    prefix: int
    phi: tuple[int, ...]

    def is_permutation(self) -> bool:
        return sorted(self.phi) == list(range(len(self.phi)))


def coordinate_subfunctions(f: LipschitzFn, k: int) -> list[SubfunctionTable]:
    """All digit-k sub-functions, indexed by the prefix a in [0, p**k)."""
    ctx = f.ctx
    if not (0 <= k < ctx.precision):
        raise ValueError(f"level {k} outside [0, {ctx.precision})")
    p = ctx.p
    block = p**k
    out = []
    for a in range(block):
        phi = tuple((f.table[a + d * block] // block) % p for d in range(p))
        out.append(SubfunctionTable(level=k, prefix=a, phi=phi))
    return out


def preserves_measure_coord(f: LipschitzFn) -> CriterionReport:
    """Digit-level criterion: every sub-function permutes the digit alphabet."""
    for k in range(f.ctx.precision):
        for sub in coordinate_subfunctions(f, k):
            if not sub.is_permutation():
                return CriterionReport(
                    ok=False,
                    failure=(k, sub.prefix),
                    detail=f"sub-function at level {k}, prefix {sub.prefix} is not a permutation",
                )
    return CriterionReport(ok=True)


def is_bijective_mod(f: LipschitzFn, k: int) -> bool:
    """Whether the reduction of f mod p**k permutes [0, p**k)."""
    if not (1 <= k <= f.ctx.precision):
        raise ValueError(f"level {k} outside [1, {f.ctx.precision}]")
    block = f.ctx.p**k
    return sorted(v % block for v in f.table[:block]) == list(range(block))


# ---------------------------------------------------------------------------
# generators
# ---------------------------------------------------------------------------


def _subfunction_slots(ctx: PrimeContext):
    return [(k, a) for k in range(ctx.precision) for a in range(ctx.p**k)]


def _assemble(ctx: PrimeContext, choice: dict, provenance: str) -> LipschitzFn:
    subs = [
        [choice[(k, a)] for a in range(ctx.p**k)] for k in range(ctx.precision)
    ]
    return LipschitzFn.from_subfunctions(ctx, subs, provenance)


def random_lipschitz(ctx: PrimeContext, rng) -> LipschitzFn:
    """Uniform tower-compatible function: independent random digit maps."""
    choice = {
        slot: tuple(rng.randrange(ctx.p) for _ in range(ctx.p))
        for slot in _subfunction_slots(ctx)
    }
    return _assemble(ctx, choice, "random_lipschitz")


def random_measure_preserving(ctx: PrimeContext, rng) -> LipschitzFn:
    """Uniform invertible tower-compatible function: independent random digit permutations."""
    choice = {}
    for slot in _subfunction_slots(ctx):
        perm = list(range(ctx.p))
        rng.shuffle(perm)
        choice[slot] = tuple(perm)
    return _assemble(ctx, choice, "random_measure_preserving")


def iter_all_lipschitz(ctx: PrimeContext, *, limit: int = 10**6):
    """Yield every tower-compatible function at this precision.

    There are (p**p) ** ((p**K - 1)/(p - 1)) of them; refuse to iterate past
    ``limit``.
    """
    slots = _subfunction_slots(ctx)
    digit_maps = list(itertools.product(range(ctx.p), repeat=ctx.p))
    total = len(digit_maps) ** len(slots)
    if total > limit:
        raise ValueError(f"would enumerate {total} functions, over the cap {limit}")
    for combo in itertools.product(digit_maps, repeat=len(slots)):
        choice = dict(zip(slots, combo))
        yield _assemble(ctx, choice, "exhaustive")


# ---------------------------------------------------------------------------
# JSON encodings
# ---------------------------------------------------------------------------


def fn_to_json(f: LipschitzFn) -> dict:
    data = {"p": f.ctx.p, "K": f.ctx.precision, "table": list(f.table)}
    if f.provenance:
        data["provenance"] = f.provenance
    return data


def fn_from_json(data: dict) -> LipschitzFn:
    ctx = PrimeContext(data["p"], data["K"])
    return LipschitzFn.from_table(ctx, data["table"], data.get("provenance"))


def series_from_json(data: dict) -> VdpSeries:
    ctx = PrimeContext(data["p"], data["K"])
    coeffs = [c % ctx.modulus for c in data["B"]]
    if len(coeffs) != ctx.modulus:
        raise ValueError(f"need {ctx.modulus} coefficients, got {len(coeffs)}")
    return VdpSeries(ctx, tuple(coeffs))
