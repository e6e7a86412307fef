"""What a classical machine can learn from the same oracle device.

A classical query returns f(x) and nothing else, so two oracles with equal
membership tables are indistinguishable to any classical strategy however
their phases differ.  This module also certifies the deterministic query
complexity of the constant-vs-balanced promise by exhaustive decision-tree
search, and provides a bounded-step machine interpreter used to build
computable "halts within budget" tables for phase encoding.
"""

from __future__ import annotations

import itertools
import json
import math
from collections import defaultdict
from dataclasses import dataclass, field
from functools import lru_cache

import numpy as np

from .errors import ConfigurationError, DomainError, UnsupportedError
from .oracle import MembershipTable, OracleSpec, bit_string

LOWER_BOUND_MAX_N = 3
DEFAULT_BUDGET = 1000
HALT = -1


# -- classical query model -----------------------------------------------


def classical_query(oracle: OracleSpec | MembershipTable, x: int) -> int:
    """f(x).  Only the membership table is consulted."""
    membership = oracle.membership if isinstance(oracle, OracleSpec) else oracle
    if not 0 <= x < (1 << membership.n):
        raise DomainError(f"query {x} out of range for n={membership.n}")
    return int(membership.f[x])


@dataclass(frozen=True)
class ClassicalTranscript:
    entries: tuple[tuple[int, int], ...] = ()

    @property
    def answers(self) -> tuple[int, ...]:
        return tuple(a for _, a in self.entries)


def classical_transcript(oracle: OracleSpec, queries) -> ClassicalTranscript:
    return ClassicalTranscript(tuple((int(q), classical_query(oracle, q)) for q in queries))


def transcripts_indistinguishable(o1: OracleSpec, o2: OracleSpec, queries) -> bool:
    if o1.n != o2.n:
        raise DomainError(f"width mismatch: {o1.n} vs {o2.n}")
    return all(classical_query(o1, q) == classical_query(o2, q) for q in queries)


# -- decision trees for the constant-vs-balanced promise --------------------


@dataclass(frozen=True)
class DecisionTree:
    """Either a leaf (``verdict`` set) or a query node with children keyed by answer bit."""

    verdict: str | None = None
    query: int | None = None
    children: dict = field(default_factory=dict)

    @property
    def is_leaf(self) -> bool:
        return self.query is None

    def depth(self) -> int:
        if self.is_leaf:
            return 0
        return 1 + max(child.depth() for child in self.children.values())

    def decide(self, f) -> str:
        node = self
        while not node.is_leaf:
            node = node.children[int(f[node.query])]
        return node.verdict

    def to_json(self):
        if self.is_leaf:
            return {"verdict": self.verdict}
        return {
            "query": self.query,
            "children": {str(b): self.children[b].to_json() for b in (0, 1)},
        }

    @classmethod
    def from_json(cls, doc) -> DecisionTree:
        if "verdict" in doc:
            return cls(verdict=doc["verdict"])
        return cls(
            query=int(doc["query"]),
            children={b: cls.from_json(doc["children"][str(b)]) for b in (0, 1)},
        )


def promise_tables(n: int) -> list[tuple[str, np.ndarray]]:
    """All membership tables meeting the promise: the full set (A) then every balanced set (B)."""
    size = 1 << n
    tables = [("A", np.ones(size, dtype=np.uint8))]
    for members in itertools.combinations(range(size), size // 2):
        f = np.zeros(size, dtype=np.uint8)
        f[list(members)] = 1
        tables.append(("B", f))
    return tables


def check_tree(tree: DecisionTree, n: int) -> bool:
    """Independent re-check: correct on every promise table, and no path repeats a query."""

    def distinct(node, seen):
        if node.is_leaf:
            return True
        if node.query in seen or not 0 <= node.query < (1 << n):
            return False
        return all(distinct(c, seen | {node.query}) for c in node.children.values())

    if not distinct(tree, frozenset()):
        return False
    return all(tree.decide(f) == case for case, f in promise_tables(n))


def _search(n: int):
    """Memoized game search over bitmasks of consistent tables.

    A node's state is the set of promise tables consistent with the answers so
    far (bit i = table i).  A set is decided once it no longer mixes case A
    (table 0) with case B; at the depth limit a mixed set is an adversary win.
    """
    tables = promise_tables(n)
    size = 1 << n
    full = (1 << len(tables)) - 1
    ones_at = []
    for x in range(size):
        mask = 0
        for i, (_, f) in enumerate(tables):
            if f[x]:
                mask |= 1 << i
        ones_at.append(mask)

    def leaf(mask: int) -> str | None:
        if mask & 1 == 0:
            return "B"
        if mask == 1:
            return "A"
        return None

    @lru_cache(maxsize=None)
    def solvable(mask: int, depth: int) -> bool:
        if leaf(mask) is not None:
            return True
        if depth == 0:
            return False
        for x in range(size):
            one, zero = mask & ones_at[x], mask & ~ones_at[x]
            if not one or not zero:
                continue  # answer already forced; the query is wasted
            if solvable(one, depth - 1) and solvable(zero, depth - 1):
                return True
        return False

    def build(mask: int, depth: int) -> DecisionTree:
        verdict = leaf(mask)
        if verdict is not None:
            return DecisionTree(verdict=verdict)
        for x in range(size):
            one, zero = mask & ones_at[x], mask & ~ones_at[x]
            if one and zero and solvable(one, depth - 1) and solvable(zero, depth - 1):
                return DecisionTree(
                    query=x, children={0: build(zero, depth - 1), 1: build(one, depth - 1)}
                )
        raise AssertionError("build called on an unsolvable node")

    return full, solvable, build


def optimal_decision_tree(n: int) -> DecisionTree:
    """A minimum-depth tree deciding all-accepted vs half-accepted, found by exhaustive search."""
    if not 1 <= n <= LOWER_BOUND_MAX_N:
        raise UnsupportedError(
            f"exhaustive decision-tree search supports 1 <= n <= {LOWER_BOUND_MAX_N}, got n={n}"
        )
    full, solvable, build = _search(n)
    for depth in range(1, (1 << n) + 1):
        if solvable(full, depth):
            return build(full, depth)
    raise AssertionError("querying every string always decides")


def min_classical_queries(n: int) -> int:
    return optimal_decision_tree(n).depth()


# -- bounded-step machines ---------------------------------------------------


@dataclass(frozen=True)
class ToyMachine:
    """Deterministic binary single-tape machine.

    ``table[(state, symbol)] = (write, move, next)`` with ``move`` in {"L", "R"}
    and ``next`` a state index or :data:`HALT`.
    """

    states: int
    table: dict
    start: int = 0

    def __post_init__(self):
        if self.states < 1:
            raise ConfigurationError("a machine needs at least one state")
        if not 0 <= self.start < self.states:
            raise ConfigurationError(f"start state {self.start} not in [0, {self.states})")
        for key in itertools.product(range(self.states), (0, 1)):
            if key not in self.table:
                raise ConfigurationError(f"transition table missing entry {key}")
            write, move, nxt = self.table[key]
            if write not in (0, 1) or move not in ("L", "R"):
                raise ConfigurationError(f"bad transition {key} -> {self.table[key]}")
            if nxt != HALT and not 0 <= nxt < self.states:
                raise ConfigurationError(f"transition {key} targets unknown state {nxt}")
        if len(self.table) != 2 * self.states:
            raise ConfigurationError("transition table has entries for unknown states")


@dataclass(frozen=True)
class RunResult:
    halted: bool
    steps: int


def run_machine(m: ToyMachine, budget: int = DEFAULT_BUDGET) -> RunResult:
    """Run from the start state on a blank tape; a HALT transition counts as a step."""
    if budget < 0:
        raise DomainError(f"budget must be non-negative, got {budget}")
    tape = defaultdict(int)
    head, state = 0, m.start
    for step in range(1, budget + 1):
        write, move, nxt = m.table[(state, tape[head])]
        tape[head] = write
        head += 1 if move == "R" else -1
        if nxt == HALT:
            return RunResult(True, step)
        state = nxt
    return RunResult(False, budget)


def encoding_states(n: int) -> int:
    """Smallest state count whose v1 transition table has room for all n bits."""
    states = 1
    while _table_bits(states) < n:
        states += 1
    return states


def _next_field_bits(states: int) -> int:
    return max(1, math.ceil(math.log2(states + 1)))


def _table_bits(states: int) -> int:
    return 2 * states * (2 + _next_field_bits(states))


def decode_machine(x: int, n: int) -> ToyMachine:
    """Encoding v1.

    The bits of x are read least significant first.  Entries are laid out in
    (state, symbol) order, each as write bit, move bit (0 = L, 1 = R), then a
    next-state code: 0 halts, k in [1, states] goes to state k - 1, larger
    codes halt.  Table bits beyond n read as 0, so uncovered entries are halting
    entries and x = 0 is the machine that halts on its first step.
    """
    if not 0 <= x < (1 << n):
        raise DomainError(f"machine index {x} out of range for n={n}")
    states = encoding_states(n)
    width = _next_field_bits(states)
    pos = 0

    def take(k: int) -> int:
        nonlocal pos
        value = (x >> pos) & ((1 << k) - 1)
        pos += k
        return value

    table = {}
    for state, symbol in itertools.product(range(states), (0, 1)):
        write = take(1)
        move = "R" if take(1) else "L"
        code = take(width)
        table[(state, symbol)] = (write, move, code - 1 if 1 <= code <= states else HALT)
    return ToyMachine(states, table)


def build_halting_table(n: int, budget: int = DEFAULT_BUDGET, encoding: str = "v1") -> np.ndarray:
    """h[x] = 1 iff machine x halts within ``budget`` steps."""
    if encoding != "v1":
        raise ConfigurationError(f"unknown machine encoding {encoding!r}")
    h = np.zeros(1 << n, dtype=np.uint8)
    for x in range(1 << n):
        h[x] = run_machine(decode_machine(x, n), budget).halted
    return h


def halting_table_to_json(h: np.ndarray, n: int, budget: int, encoding: str = "v1") -> dict:
    return {"n": n, "budget": budget, "encoding": encoding, "h": bit_string(h)}


def dumps_halting_table(h: np.ndarray, n: int, budget: int, encoding: str = "v1") -> str:
    return json.dumps(halting_table_to_json(h, n, budget, encoding))
