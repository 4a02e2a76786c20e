"""Independent ground truth by exhaustive search.

Automorphisms of the finite quotient ``Z/p**k`` (tower-compatible bijections
that are homomorphisms for every requested operation) are enumerated by
backtracking over digit permutations: first the units-digit permutation,
then one permutation per (level, prefix) slot.  A partial assignment
determines the map modulo p**(level+1) on the residues whose low digits are
already fixed, so every pair constraint whose three participants are
determined can be tested immediately; violated branches are cut without
expanding the remaining slots.

The enumerated sets are compared against the realized parametric families.
Any disagreement is reported with witnesses -- at finite precision the
quotient can have automorphisms that no family member reduces to, since
effects that would betray them live above the precision window.
"""

from __future__ import annotations

import itertools
import math
from dataclasses import dataclass

from .core import PrimeContext
from .automorph import (
    AddSpec,
    AndSpec,
    MulSpec,
    Operation,
    XorSpec,
    operation_by_name,
    realize,
)

DEFAULT_NODE_BUDGET = 5_000_000

OP_TO_FAMILY = {"plus": "add", "times": "mul", "xor": "xor", "and": "and"}


class BudgetExceeded(RuntimeError):
    """The backtracking search hit its node limit before finishing."""

    def __init__(self, nodes: int, budget: int):
        super().__init__(f"search expanded {nodes} nodes, budget {budget}")
        self.nodes = nodes
        self.budget = budget


@dataclass(frozen=True)
class EnumerationResult:
    """All automorphism tables of Z/p**k for a set of operations."""

    p: int
    k: int
    ops: tuple[str, ...]
    automorphisms: tuple[tuple[int, ...], ...]  # lexicographically sorted
    nodes: int

    @property
    def count(self) -> int:
        return len(self.automorphisms)

    def to_json(self) -> dict:
        return {
            "p": self.p,
            "k": self.k,
            "ops": list(self.ops),
            "count": self.count,
            "nodes": self.nodes,
            "automorphisms": [list(t) for t in self.automorphisms],
        }


def _resolve_ops(ops) -> list[Operation]:
    out = []
    for op in ops:
        out.append(op if isinstance(op, Operation) else operation_by_name(op))
    return out


def enumerate_automorphisms(
    ctx: PrimeContext, ops, *, node_budget: int = DEFAULT_NODE_BUDGET
) -> EnumerationResult:
    """Exhaustively enumerate the automorphisms of Z/p**k for the given ops.

    Exact and complete within the node budget; raises BudgetExceeded rather
    than returning a truncated answer.
    """
    operations = _resolve_ops(ops)
    p, k = ctx.p, ctx.precision
    perms = list(itertools.permutations(range(p)))
    levels = [PrimeContext(p, j + 1) for j in range(k)]

    # flat operation tables per level: value of x op y mod p**(j+1)
    op_tables: list[list[list[int]]] = []
    # per (level, prefix, op): constraint triples (x, y, z) that first become
    # fully determined when the slot (level, prefix) is assigned
    triples: list[list[list[list[tuple[int, int, int]]]]] = []
    for j, level_ctx in enumerate(levels):
        size = level_ctx.modulus
        block = p**j
        level_ops = []
        level_triples = [[[] for _ in operations] for _ in range(block)]
        for oi, op in enumerate(operations):
            flat = [0] * (size * size)
            for x in range(size):
                base = x * size
                for y in range(size):
                    z = op.apply(level_ctx, x, y)
                    flat[base + y] = z
                    slot = max(x % block, y % block, z % block)
                    level_triples[slot][oi].append((x, y, z))
            level_ops.append(flat)
        op_tables.append(level_ops)
        triples.append(level_triples)

    slots = [(j, a) for j in range(k) for a in range(p**j)]
    values = [[0] * (p ** (j + 1)) for j in range(k)]
    found: list[tuple[int, ...]] = []
    nodes = 0

    def descend(slot_index: int) -> None:
        nonlocal nodes
        if slot_index == len(slots):
            found.append(tuple(values[k - 1]))
            return
        j, a = slots[slot_index]
        block = p**j
        size = p ** (j + 1)
        level_values = values[j]
        base = values[j - 1][a] if j else 0
        slot_triples = triples[j][a]
        level_ops = op_tables[j]
        for perm in perms:
            nodes += 1
            if nodes > node_budget:
                raise BudgetExceeded(nodes, node_budget)
            for d in range(p):
                level_values[a + d * block] = base + perm[d] * block
            ok = True
            for oi, op_flat in enumerate(level_ops):
                for x, y, z in slot_triples[oi]:
                    if level_values[z] != op_flat[level_values[x] * size + level_values[y]]:
                        ok = False
                        break
                if not ok:
                    break
            if ok:
                descend(slot_index + 1)

    descend(0)
    names = tuple(op.name for op in operations)
    return EnumerationResult(p, k, names, tuple(sorted(found)), nodes)


# ---------------------------------------------------------------------------
# realized families reduced mod p**k
# ---------------------------------------------------------------------------


def family_specs(ctx: PrimeContext, family: str):
    """Yield every family member with parameters ranging over residues mod p**k."""
    p = ctx.p
    if family == "add":
        yield from (AddSpec(ctx.integer(A)) for A in ctx.units())
    elif family == "mul":
        s_values = [s for s in range(1, p) if math.gcd(s, p - 1) == 1]
        units = list(ctx.units())
        yield from (
            MulSpec(s, ctx.integer(a), ctx.integer(A))
            for s in s_values
            for a in units
            for A in units
        )
    elif family == "xor":
        row_choices = []
        for k in range(ctx.precision):
            rows = [
                prefix + (diag,)
                for prefix in itertools.product(range(p), repeat=k)
                for diag in range(1, p)
            ]
            row_choices.append(rows)
        yield from (XorSpec(ctx, rows) for rows in itertools.product(*row_choices))
    elif family == "and":
        valid = [e for e in range(1, p) if math.gcd(e, p - 1) == 1]
        yield from (
            AndSpec(ctx, exps)
            for exps in itertools.product(valid, repeat=ctx.precision)
        )
    else:
        raise ValueError(f"unknown family {family!r}")


def family_size(ctx: PrimeContext, family: str) -> int:
    """Number of parameter choices mod p**k (not necessarily distinct tables)."""
    p, k = ctx.p, ctx.precision
    phi_units = p**k - p ** (k - 1)
    if family == "add":
        return phi_units
    if family == "mul":
        s_count = sum(1 for s in range(1, p) if math.gcd(s, p - 1) == 1)
        return s_count * phi_units * phi_units
    if family == "xor":
        return (p - 1) ** k * p ** (k * (k - 1) // 2)
    if family == "and":
        valid = sum(1 for e in range(1, p) if math.gcd(e, p - 1) == 1)
        return valid**k
    raise ValueError(f"unknown family {family!r}")


def family_tables(ctx: PrimeContext, family: str) -> set[tuple[int, ...]]:
    """Value tables of every family member with parameters ranging mod p**k."""
    return {realize(spec).table for spec in family_specs(ctx, family)}


@dataclass(frozen=True)
class SetComparison:
    """Enumerated automorphisms vs the realized family, with witnesses."""

    family: str
    equal: bool
    missing: tuple[tuple[int, ...], ...]  # family tables the search did not find
    extra: tuple[tuple[int, ...], ...]  # found tables outside the family
    family_count: int
    enumerated_count: int

    def to_json(self) -> dict:
        return {
            "family": self.family,
            "equal": self.equal,
            "family_count": self.family_count,
            "enumerated_count": self.enumerated_count,
            "missing": [list(t) for t in self.missing],
            "extra": [list(t) for t in self.extra],
        }


def compare_with_family(result: EnumerationResult, family: str | None = None) -> SetComparison:
    """Set-compare an enumeration against the matching parametric family."""
    if family is None:
        if len(result.ops) != 1:
            raise ValueError("family can only be inferred for single-operation results")
        family = OP_TO_FAMILY[result.ops[0]]
    ctx = PrimeContext(result.p, result.k)
    realized = family_tables(ctx, family)
    enumerated = set(result.automorphisms)
    missing = tuple(sorted(realized - enumerated))
    extra = tuple(sorted(enumerated - realized))
    return SetComparison(
        family=family,
        equal=not missing and not extra,
        missing=missing,
        extra=extra,
        family_count=len(realized),
        enumerated_count=len(enumerated),
    )


# ---------------------------------------------------------------------------
# the six two-operation systems
# ---------------------------------------------------------------------------

OPERATION_PAIRS = (
    ("plus", "times"),
    ("plus", "xor"),
    ("plus", "and"),
    ("times", "xor"),
    ("times", "and"),
    ("xor", "and"),
)


@dataclass(frozen=True)
class PairReport:
    """Enumeration outcome for one two-operation system."""

    ops: tuple[str, str]
    count: int
    identity_only: bool
    witness: tuple[int, ...] | None  # first non-identity automorphism, if any

    def to_json(self) -> dict:
        return {
            "ops": list(self.ops),
            "count": self.count,
            "identity_only": self.identity_only,
            "witness": list(self.witness) if self.witness else None,
        }


@dataclass(frozen=True)
class TrivialPairsReport:
    p: int
    k: int
    pairs: tuple[PairReport, ...]
    all_trivial: bool
    nodes: int

    def to_json(self) -> dict:
        return {
            "p": self.p,
            "k": self.k,
            "all_trivial": self.all_trivial,
            "nodes": self.nodes,
            "pairs": [r.to_json() for r in self.pairs],
        }


def verify_trivial_pairs(
    p: int, k: int, *, node_budget: int = DEFAULT_NODE_BUDGET
) -> TrivialPairsReport:
    """Enumerate all six two-operation systems and report the witnesses.

    At full precision every such automorphism group collapses to the
    identity; the quotient at precision k can keep extra members whose
    distinguishing carries happen above the window, so the report carries
    the actual counts and the first non-identity witness for each pair.
    """
    ctx = PrimeContext(p, k)
    identity = tuple(range(ctx.modulus))
    reports = []
    total_nodes = 0
    for pair in OPERATION_PAIRS:
        result = enumerate_automorphisms(ctx, pair, node_budget=node_budget)
        total_nodes += result.nodes
        non_identity = [t for t in result.automorphisms if t != identity]
        reports.append(
            PairReport(
                ops=pair,
                count=result.count,
                identity_only=result.automorphisms == (identity,),
                witness=non_identity[0] if non_identity else None,
            )
        )
    return TrivialPairsReport(
        p=p,
        k=k,
        pairs=tuple(reports),
        all_trivial=all(r.identity_only for r in reports),
        nodes=total_nodes,
    )
