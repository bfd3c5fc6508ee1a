"""Reward graph colouring as a ranked search problem.

An assignment ``A`` gives vertex ``i`` the colour ``A[i]`` (0-based).  The
assignment space is indexed base-``colors`` little-endian over vertices:
``index(A) = sum_i A[i] * colors**i``.

Instance files are plain text::

    vertices 3
    colors 2
    edge 0 1
    reward 0 1 2.0

Vertex and colour indices are 0-based; omitted rewards are 0.
"""

from __future__ import annotations

import itertools
import math
from dataclasses import dataclass
from pathlib import Path
from typing import Iterator

import numpy as np

from .errors import NotExactlyRepresentable, TooLarge, UsageError, ZeroMax
from .simulator import PriorityOracle, apply_diffusion, uniform_initial

MAX_SPACE = 2 ** 20
Assignment = tuple[int, ...]


@dataclass(frozen=True, eq=False)
class RewardGraph:
    vertices: int
    edges: frozenset[tuple[int, int]]
    colors: int
    rewards: np.ndarray

    def __post_init__(self):
        if self.vertices < 1 or self.colors < 1:
            raise UsageError("need at least one vertex and one colour")
        norm = set()
        for i, j in self.edges:
            if i == j:
                raise UsageError(f"self-loop on vertex {i}")
            if not (0 <= i < self.vertices and 0 <= j < self.vertices):
                raise UsageError(f"edge ({i}, {j}) outside the vertex set")
            norm.add((min(i, j), max(i, j)))
        object.__setattr__(self, "edges", frozenset(norm))
        r = np.asarray(self.rewards, dtype=float)
        if r.shape != (self.vertices, self.colors):
            raise UsageError(f"reward matrix must be {self.vertices}x{self.colors}, got {r.shape}")
        if not np.isfinite(r).all() or (r < 0).any():
            raise UsageError("rewards must be finite and non-negative")
        object.__setattr__(self, "rewards", r)

    def __eq__(self, other: object) -> bool:
        if not isinstance(other, RewardGraph):
            return NotImplemented
        return (self.vertices, self.colors, self.edges) == (other.vertices, other.colors, other.edges) \
            and np.array_equal(self.rewards, other.rewards)

    __hash__ = None

    @property
    def space_size(self) -> int:
        return self.colors ** self.vertices

    def index(self, assignment: Assignment) -> int:
        return sum(c * self.colors ** i for i, c in enumerate(assignment))

    def assignment(self, index: int) -> Assignment:
        out = []
        for _ in range(self.vertices):
            index, c = divmod(index, self.colors)
            out.append(c)
        return tuple(out)

    def assignments(self) -> Iterator[Assignment]:
        for idx in range(self.space_size):
            yield self.assignment(idx)


def reward(graph: RewardGraph, assignment: Assignment) -> float:
    """Summed vertex rewards, or 0 if any edge is monochromatic."""
    if len(assignment) != graph.vertices:
        raise UsageError(f"assignment has {len(assignment)} entries, graph has {graph.vertices} vertices")
    if any(not 0 <= c < graph.colors for c in assignment):
        raise UsageError(f"colour out of range in {assignment}")
    if any(assignment[i] == assignment[j] for i, j in graph.edges):
        return 0.0
    return float(sum(graph.rewards[i, c] for i, c in enumerate(assignment)))


def reward_table(graph: RewardGraph) -> np.ndarray:
    if graph.space_size > MAX_SPACE:
        raise TooLarge(f"assignment space {graph.space_size} exceeds {MAX_SPACE}")
    return np.array([reward(graph, a) for a in graph.assignments()])


def max_reward(graph: RewardGraph) -> float:
    return float(reward_table(graph).max())


def priority_params(graph: RewardGraph, j_max: float) -> dict[Assignment, float]:
    """``eps_A = -(1 - J(A)/j_max)`` for every assignment."""
    if j_max <= 0:
        raise ZeroMax("j_max must be positive; the graph has no rewarded colouring")
    table = reward_table(graph)
    return {graph.assignment(k): -(1.0 - table[k] / j_max) for k in range(table.size)}


def gcp_oracle_direct(graph: RewardGraph, j_max: float) -> np.ndarray:
    """Diagonal of the oracle: ``exp(i*pi*J(A)/j_max)`` at ``index(A)``."""
    if j_max <= 0:
        raise ZeroMax("j_max must be positive; the graph has no rewarded colouring")
    return np.exp(1j * np.pi * reward_table(graph) / j_max)


def _integer_rewards(table: np.ndarray, ell: int) -> np.ndarray:
    ints = np.rint(table)
    if np.abs(table - ints).max(initial=0.0) > 1e-9:
        raise NotExactlyRepresentable("rewards are not integers; rescale them first")
    if ints.max(initial=0.0) >= 2 ** ell:
        raise NotExactlyRepresentable(f"reward {ints.max():g} needs more than {ell} bits")
    return ints.astype(np.int64)


@dataclass(frozen=True)
class AncillaResult:
    diagonal: np.ndarray
    ancilla_leak: float

    @property
    def clean(self) -> bool:
        return self.ancilla_leak < 1e-10


def gcp_oracle_ancilla(graph: RewardGraph, j_max: float, ell: int) -> AncillaResult:
    """Oracle built by phase kickback through two ell-bit reward registers.

    The data register holds every basis assignment at once (one column
    per assignment).  Both registers receive ``J(A)`` by XOR, each bit
    pair gets the controlled phase ``pi * 2**(k-1) / j_max``, and the
    registers are uncomputed.  Returns the resulting diagonal together
    with the largest amplitude left off the clean (all-zero ancilla) block.
    """
    if j_max <= 0:
        raise ZeroMax("j_max must be positive; the graph has no rewarded colouring")
    J = _integer_rewards(reward_table(graph), ell)
    size, reg = J.size, 2 ** ell

    # psi[col, A, b1, b2]: column col starts in |A=col>|0>|0>
    psi = np.zeros((size, size, reg, reg), dtype=complex)
    psi[np.arange(size), np.arange(size), 0, 0] = 1.0

    bits = np.arange(reg)
    xor_table = bits[None, :] ^ J[:, None]            # (A, b) -> b xor J(A)

    def compute(p: np.ndarray, axis: int) -> np.ndarray:
        # |b> -> |b xor J(A)> is an involution, so gather with the same table
        out = np.empty_like(p)
        for a in range(size):
            if axis == 2:
                out[:, a] = p[:, a][:, xor_table[a], :]
            else:
                out[:, a] = p[:, a][:, :, xor_table[a]]
        return out

    psi = compute(psi, 2)   # U_{B0 B1}
    psi = compute(psi, 3)   # U_{B0 B2}
    both = bits[:, None] & bits[None, :]
    angle = np.zeros((reg, reg))
    for k in range(ell):
        angle += ((both >> k) & 1) * (math.pi * 2 ** k / j_max)
    psi = psi * np.exp(1j * angle)[None, None, :, :]
    psi = compute(psi, 3)   # XOR is self-inverse
    psi = compute(psi, 2)

    diag = np.array([psi[a, a, 0, 0] for a in range(size)])
    clean_block = np.zeros_like(psi)
    clean_block[np.arange(size), np.arange(size), 0, 0] = diag
    leak = float(np.abs(psi - clean_block).max())
    return AncillaResult(diag, leak)


def as_priority_oracle(graph: RewardGraph, j_max: float) -> PriorityOracle:
    eps = priority_params(graph, j_max)
    marked = {graph.index(a): e for a, e in eps.items() if e > -1.0}
    return PriorityOracle(graph.space_size, marked)


def gcp_search(graph: RewardGraph, j_max: float, t: int) -> np.ndarray:
    """Exact distribution over assignment indices after ``t`` queries."""
    if t < 0:
        raise UsageError(f"step count must be non-negative, got {t}")
    phases = gcp_oracle_direct(graph, j_max)
    v = uniform_initial(graph.space_size)
    for _ in range(t):
        v = apply_diffusion(phases * v)
    return np.abs(v) ** 2


def gcp_search_series(graph: RewardGraph, j_max: float, steps: int) -> np.ndarray:
    """Distributions for t = 0..steps, shape ``(steps + 1, space_size)``."""
    phases = gcp_oracle_direct(graph, j_max)
    v = uniform_initial(graph.space_size)
    out = np.empty((steps + 1, graph.space_size))
    for t in range(steps + 1):
        out[t] = np.abs(v) ** 2
        v = apply_diffusion(phases * v)
    return out


def bits_needed(graph: RewardGraph) -> int:
    top = int(np.rint(reward_table(graph).max()))
    return max(1, top.bit_length())


def parse_instance(text: str) -> RewardGraph:
    vertices = colors = None
    edges = set()
    rewards: dict[tuple[int, int], float] = {}
    for lineno, raw in enumerate(text.splitlines(), 1):
        line = raw.split("#", 1)[0].strip()
        if not line:
            continue
        head, *rest = line.split()
        try:
            if head == "vertices":
                vertices = int(rest[0])
            elif head == "colors":
                colors = int(rest[0])
            elif head == "edge":
                edges.add((int(rest[0]), int(rest[1])))
            elif head == "reward":
                rewards[int(rest[0]), int(rest[1])] = float(rest[2])
            else:
                raise UsageError(f"unknown directive {head!r}")
        except (IndexError, ValueError) as exc:
            raise UsageError(f"line {lineno}: {exc}") from exc
    if vertices is None or colors is None:
        raise UsageError("instance needs 'vertices N' and 'colors K' lines")
    R = np.zeros((vertices, colors))
    for (i, j), val in rewards.items():
        if not (0 <= i < vertices and 0 <= j < colors):
            raise UsageError(f"reward entry ({i}, {j}) outside the instance")
        R[i, j] = val
    return RewardGraph(vertices, frozenset(edges), colors, R)


def load_instance(path: str | Path) -> RewardGraph:
    return parse_instance(Path(path).read_text())


def dump_instance(graph: RewardGraph) -> str:
    lines = [f"vertices {graph.vertices}", f"colors {graph.colors}"]
    lines += [f"edge {i} {j}" for i, j in sorted(graph.edges)]
    for i, j in itertools.product(range(graph.vertices), range(graph.colors)):
        if graph.rewards[i, j] != 0:
            lines.append(f"reward {i} {j} {float(graph.rewards[i, j])!r}")
    return "\n".join(lines) + "\n"
