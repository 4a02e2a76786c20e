"""Finite words over {0..p-1}, position-wise ciphers, and homomorphic demos.

Words of length k encode as residues mod p**k (symbol 0 is the units
digit), which transports the ring and digit-wise operations to words.  The
three cipher kinds act symbol by symbol -- a fixed alphabet permutation, an
independent permutation per position, or a shift by a running key symbol --
so encrypting a prefix always equals the prefix of the encryption, and each
cipher induces an invertible tower-compatible model map at any precision
its key covers.

``homomorphic_eval`` runs a formula over encrypted inputs and compares with
encrypting the plain result: the sides agree exactly when the model map is
a homomorphism for every operation the formula uses, and the demo record
keeps both sides as evidence either way.
"""

from __future__ import annotations

from dataclasses import dataclass

from .core import PrimeContext, is_prime
from .lipschitz import LipschitzFn
from .automorph import Operation, operation_by_name


@dataclass(frozen=True)
class Word:
    """Finite word over the alphabet {0, ..., p-1}; symbol 0 is the units digit."""

    p: int
    symbols: tuple[int, ...]

    def __post_init__(self):
        object.__setattr__(self, "symbols", tuple(self.symbols))
        if not is_prime(self.p):
            raise ValueError(f"alphabet size must be prime, got {self.p}")
        if len(self.symbols) < 1:
            raise ValueError("words have length >= 1")
        for s in self.symbols:
            if not (0 <= s < self.p):
                raise ValueError(f"symbol {s} outside [0, {self.p})")

    def __len__(self) -> int:
        return len(self.symbols)

    def prefix(self, length: int) -> "Word":
        if not (1 <= length <= len(self.symbols)):
            raise ValueError(f"prefix length {length} outside [1, {len(self.symbols)}]")
        return Word(self.p, self.symbols[:length])

    def to_json(self) -> dict:
        return {"p": self.p, "symbols": list(self.symbols)}


def word_from_json(data: dict) -> Word:
    return Word(data["p"], tuple(data["symbols"]))


def tau(word: Word) -> int:
    """Positional encoding: sum of symbol_i * p**i."""
    value = 0
    for i, s in enumerate(word.symbols):
        value += s * word.p**i
    return value


def tau_inverse(value: int, length: int, p: int) -> Word:
    """Decode a residue in [0, p**length) into a word of that length."""
    if not (0 <= value < p**length):
        raise ValueError(f"value {value} outside [0, {p**length})")
    symbols = []
    for _ in range(length):
        value, r = divmod(value, p)
        symbols.append(r)
    return Word(p, tuple(symbols))


def word_op(x: Word, y: Word, op: "Operation | str") -> Word:
    """Transport an operation mod p**k to equal-length words through tau."""
    if x.p != y.p:
        raise ValueError(f"alphabet mismatch: {x.p} vs {y.p}")
    if len(x) != len(y):
        raise ValueError(f"length mismatch: {len(x)} vs {len(y)}")
    if isinstance(op, str):
        op = operation_by_name(op)
    ctx = PrimeContext(x.p, len(x))
    return tau_inverse(op.apply(ctx, tau(x), tau(y)), len(x), x.p)


# ---------------------------------------------------------------------------
# keys
# ---------------------------------------------------------------------------


def _check_permutation(p: int, table) -> tuple[int, ...]:
    table = tuple(table)
    if sorted(table) != list(range(p)):
        raise ValueError(f"{table} is not a permutation of [0, {p})")
    return table


@dataclass(frozen=True)
class SubstitutionKey:
    """One alphabet permutation applied at every position."""

    p: int
    table: tuple[int, ...]

    def __post_init__(self):
        object.__setattr__(self, "table", _check_permutation(self.p, self.table))

    kind = "subst"

    def covers(self, length: int) -> bool:
        return True

    def symbol(self, position: int, s: int) -> int:
        return self.table[s]

    def inverse_symbol(self, position: int, s: int) -> int:
        return self.table.index(s)

    def to_json(self) -> dict:
        return {"kind": self.kind, "p": self.p, "g": list(self.table)}


@dataclass(frozen=True)
class SubstitutionStreamKey:
    """An independent alphabet permutation for each position."""

    p: int
    tables: tuple[tuple[int, ...], ...]

    def __post_init__(self):
        object.__setattr__(
            self, "tables", tuple(_check_permutation(self.p, t) for t in self.tables)
        )
        if not self.tables:
            raise ValueError("need at least one permutation")

    kind = "subst_stream"

    def covers(self, length: int) -> bool:
        return length <= len(self.tables)

    def symbol(self, position: int, s: int) -> int:
        return self.tables[position][s]

    def inverse_symbol(self, position: int, s: int) -> int:
        return self.tables[position].index(s)

    def to_json(self) -> dict:
        return {"kind": self.kind, "p": self.p, "gs": [list(t) for t in self.tables]}


@dataclass(frozen=True)
class KeystreamKey:
    """Shift each symbol by a key symbol, mod p."""

    p: int
    gamma: tuple[int, ...]

    def __post_init__(self):
        object.__setattr__(self, "gamma", tuple(self.gamma))
        if not self.gamma:
            raise ValueError("need at least one key symbol")
        for g in self.gamma:
            if not (0 <= g < self.p):
                raise ValueError(f"key symbol {g} outside [0, {self.p})")

    kind = "keystream"

    def covers(self, length: int) -> bool:
        return length <= len(self.gamma)

    def symbol(self, position: int, s: int) -> int:
        return (s + self.gamma[position]) % self.p

    def inverse_symbol(self, position: int, s: int) -> int:
        return (s - self.gamma[position]) % self.p

    def to_json(self) -> dict:
        return {"kind": self.kind, "p": self.p, "gamma": list(self.gamma)}


CipherKey = SubstitutionKey | SubstitutionStreamKey | KeystreamKey


def key_from_json(data: dict) -> CipherKey:
    kind = data.get("kind")
    if kind == "subst":
        return SubstitutionKey(data["p"], tuple(data["g"]))
    if kind == "subst_stream":
        return SubstitutionStreamKey(data["p"], tuple(tuple(t) for t in data["gs"]))
    if kind == "keystream":
        return KeystreamKey(data["p"], tuple(data["gamma"]))
    raise ValueError(f"unknown key kind {kind!r}")


def encrypt(word: Word, key: CipherKey) -> Word:
    if word.p != key.p:
        raise ValueError(f"alphabet mismatch: word {word.p}, key {key.p}")
    if not key.covers(len(word)):
        raise ValueError(f"key covers {key} positions short of word length {len(word)}")
    return Word(word.p, tuple(key.symbol(i, s) for i, s in enumerate(word.symbols)))


def decrypt(word: Word, key: CipherKey) -> Word:
    if word.p != key.p:
        raise ValueError(f"alphabet mismatch: word {word.p}, key {key.p}")
    if not key.covers(len(word)):
        raise ValueError(f"key covers {key} positions short of word length {len(word)}")
    return Word(
        word.p, tuple(key.inverse_symbol(i, s) for i, s in enumerate(word.symbols))
    )


def model_fn(key: CipherKey, ctx: PrimeContext) -> LipschitzFn:
    """The map on Z/p**K induced by encrypting K-symbol words.

    Position-wise action makes it tower compatible, and permutations per
    symbol make it invertible; both are revalidated by construction.
    """
    if key.p != ctx.p:
        raise ValueError(f"alphabet mismatch: key {key.p}, context {ctx.p}")
    if not key.covers(ctx.precision):
        raise ValueError(f"key does not cover {ctx.precision} positions")
    table = []
    for x in range(ctx.modulus):
        word = tau_inverse(x, ctx.precision, ctx.p)
        table.append(tau(encrypt(word, key)))
    return LipschitzFn.from_table(ctx, table, provenance=f"cipher:{key.kind}")


# ---------------------------------------------------------------------------
# formulas over words and the homomorphic-evaluation demo
# ---------------------------------------------------------------------------


@dataclass(frozen=True)
class Leaf:
    index: int


@dataclass(frozen=True)
class Node:
    op: str
    left: "Leaf | Node"
    right: "Leaf | Node"


FormulaTree = Leaf | Node


def parse_formula(nested) -> FormulaTree:
    """Parse ["xor", ["leaf", 0], ["leaf", 1]]-style nested arrays."""
    if not isinstance(nested, (list, tuple)) or not nested:
        raise ValueError(f"malformed formula node: {nested!r}")
    head = nested[0]
    if head == "leaf":
        if len(nested) != 2:
            raise ValueError(f"leaf takes one index: {nested!r}")
        return Leaf(int(nested[1]))
    if len(nested) != 3:
        raise ValueError(f"operation node takes two children: {nested!r}")
    operation_by_name(head)  # validates the name
    return Node(head, parse_formula(nested[1]), parse_formula(nested[2]))


def formula_to_json(tree: FormulaTree):
    if isinstance(tree, Leaf):
        return ["leaf", tree.index]
    return [tree.op, formula_to_json(tree.left), formula_to_json(tree.right)]


def formula_ops(tree: FormulaTree) -> set[str]:
    if isinstance(tree, Leaf):
        return set()
    return {tree.op} | formula_ops(tree.left) | formula_ops(tree.right)


def eval_formula(tree: FormulaTree, data: list[Word]) -> Word:
    if isinstance(tree, Leaf):
        if not (0 <= tree.index < len(data)):
            raise ValueError(f"leaf index {tree.index} outside the data list")
        return data[tree.index]
    return word_op(eval_formula(tree.left, data), eval_formula(tree.right, data), tree.op)


@dataclass(frozen=True)
class HomomorphicDemo:
    """Both evaluation routes and the verdict, never a bare boolean.

    ``encrypted_plain_result`` is the formula evaluated on plaintext and then
    encrypted; ``cipher_result`` is the formula evaluated on the encrypted
    inputs.  ``mismatch_positions`` lists the symbol positions where the two
    sides differ.
    """

    formula: FormulaTree
    plain_result: Word
    encrypted_plain_result: Word
    encrypted_inputs: tuple[Word, ...]
    cipher_result: Word
    equal: bool
    mismatch_positions: tuple[int, ...]

    def to_json(self) -> dict:
        return {
            "formula": formula_to_json(self.formula),
            "plain_result": self.plain_result.to_json(),
            "encrypted_plain_result": self.encrypted_plain_result.to_json(),
            "encrypted_inputs": [w.to_json() for w in self.encrypted_inputs],
            "cipher_result": self.cipher_result.to_json(),
            "equal": self.equal,
            "mismatch_positions": list(self.mismatch_positions),
        }


def homomorphic_eval(
    formula: FormulaTree, data: list[Word], key: CipherKey
) -> HomomorphicDemo:
    """Compare computing-then-encrypting against computing on ciphertexts."""
    if not data:
        raise ValueError("need at least one data word")
    length = len(data[0])
    for w in data:
        if len(w) != length:
            raise ValueError("all data words must have the same length")
    plain = eval_formula(formula, data)
    encrypted_plain = encrypt(plain, key)
    encrypted_inputs = tuple(encrypt(w, key) for w in data)
    cipher_side = eval_formula(formula, list(encrypted_inputs))
    mismatches = tuple(
        i
        for i, (a, b) in enumerate(zip(encrypted_plain.symbols, cipher_side.symbols))
        if a != b
    )
    return HomomorphicDemo(
        formula=formula,
        plain_result=plain,
        encrypted_plain_result=encrypted_plain,
        encrypted_inputs=encrypted_inputs,
        cipher_result=cipher_side,
        equal=not mismatches,
        mismatch_positions=mismatches,
    )
