"""Gate-level circuits, their dense matrices, and CNOT accounting.

Conventions
-----------
* Qubit 0 is the most significant bit of a basis index, so item ``0b011``
  on three qubits is ``|0>|1>|1>``.
* ``RZ(a)`` is the phase gate ``diag(1, exp(i*a))`` and ``RY(a)`` is
  ``[[cos(a/2), -sin(a/2)], [sin(a/2), cos(a/2)]]``.
* ``CRZ`` is ``RZ`` with one control.  CNOT counts charge a Toffoli 6 and
  a ``CRZ`` 2.

Text format::

    # comment
    width 3
    phase -1 0
    H 0
    CNOT 2 0
    TOFFOLI 2 0 1
    CRZ 2 1 0.78539816339744828

one gate per line as ``KIND target [controls...] [angle]``.  The
``phase`` line (real and imaginary part of the global phase) is optional
and defaults to 1.
"""

from __future__ import annotations

import cmath
import math
from dataclasses import dataclass, field, replace
from typing import Iterable, Mapping

import numpy as np

from .errors import TooWide, UsageError

MAX_WIDTH = 12

# kind -> (number of controls, takes an angle)
GATE_KINDS = {
    "X": (0, False),
    "H": (0, False),
    "Z": (0, False),
    "RY": (0, True),
    "RZ": (0, True),
    "CNOT": (1, False),
    "TOFFOLI": (2, False),
    "CRZ": (1, True),
}

CNOT_COST = {"CNOT": 1, "TOFFOLI": 6, "CRZ": 2}

# reference counts quoted alongside hand-built constructions
REFERENCE_CNOT_COUNTS = {"diffusion": 6, "toffoli": 6, "priority_oracle": 20, "ps_oracle": 42}

_SQ2 = 1 / math.sqrt(2)
_X = np.array([[0, 1], [1, 0]], dtype=complex)
_H = np.array([[_SQ2, _SQ2], [_SQ2, -_SQ2]], dtype=complex)
_Z = np.diag([1, -1]).astype(complex)


def ry(angle: float) -> np.ndarray:
    c, s = math.cos(angle / 2), math.sin(angle / 2)
    return np.array([[c, -s], [s, c]], dtype=complex)


def rz(angle: float) -> np.ndarray:
    return np.diag([1, cmath.exp(1j * angle)])


@dataclass(frozen=True)
class Gate:
    kind: str
    target: int
    controls: tuple[int, ...] = ()
    angle: float | None = None

    def __post_init__(self):
        if self.kind not in GATE_KINDS:
            raise UsageError(f"unknown gate kind {self.kind!r}")
        ncontrols, has_angle = GATE_KINDS[self.kind]
        if len(self.controls) != ncontrols:
            raise UsageError(f"{self.kind} takes {ncontrols} controls, got {len(self.controls)}")
        if has_angle != (self.angle is not None):
            raise UsageError(f"{self.kind} angle mismatch: {self.angle}")
        if has_angle and not math.isfinite(self.angle):
            raise UsageError(f"non-finite angle on {self.kind}")
        qubits = (self.target, *self.controls)
        if len(set(qubits)) != len(qubits):
            raise UsageError(f"repeated qubit in {self}")

    @property
    def qubits(self) -> tuple[int, ...]:
        return (self.target, *self.controls)

    def base_matrix(self) -> np.ndarray:
        """The single-qubit operator applied to the target when controls fire."""
        if self.kind in ("X", "CNOT", "TOFFOLI"):
            return _X
        if self.kind == "H":
            return _H
        if self.kind == "Z":
            return _Z
        if self.kind == "RY":
            return ry(self.angle)
        return rz(self.angle)

    def to_line(self) -> str:
        parts = [self.kind, str(self.target), *map(str, self.controls)]
        if self.angle is not None:
            parts.append(repr(float(self.angle)))
        return " ".join(parts)


@dataclass
class Circuit:
    width: int
    gates: list[Gate] = field(default_factory=list)
    global_phase: complex = 1.0 + 0.0j

    def __post_init__(self):
        if self.width < 1:
            raise UsageError("circuit width must be positive")
        for g in self.gates:
            self._check(g)
        if abs(abs(self.global_phase) - 1) > 1e-12:
            raise UsageError("global phase must have unit modulus")

    def _check(self, g: Gate) -> None:
        if any(not 0 <= q < self.width for q in g.qubits):
            raise UsageError(f"{g} addresses a qubit outside width {self.width}")

    def append(self, g: Gate) -> "Circuit":
        self._check(g)
        self.gates.append(g)
        return self

    def extend(self, gates: Iterable[Gate]) -> "Circuit":
        for g in gates:
            self.append(g)
        return self

    def __add__(self, other: "Circuit") -> "Circuit":
        if other.width != self.width:
            raise UsageError("cannot concatenate circuits of different width")
        return Circuit(self.width, self.gates + other.gates, self.global_phase * other.global_phase)

    def to_text(self) -> str:
        lines = [f"width {self.width}"]
        gp = complex(self.global_phase)
        if gp != 1:
            lines.append(f"phase {gp.real!r} {gp.imag!r}")
        lines += [g.to_line() for g in self.gates]
        return "\n".join(lines) + "\n"

    @classmethod
    def from_text(cls, text: str) -> "Circuit":
        width = None
        phase = 1.0 + 0.0j
        gates = []
        for lineno, raw in enumerate(text.splitlines(), 1):
            line = raw.split("#", 1)[0].strip()
            if not line:
                continue
            head, *rest = line.split()
            try:
                if head == "width":
                    width = int(rest[0])
                elif head == "phase":
                    phase = complex(float(rest[0]), float(rest[1]))
                else:
                    kind = head.upper()
                    if kind not in GATE_KINDS:
                        raise UsageError(f"unknown gate kind {head!r}")
                    ncontrols, has_angle = GATE_KINDS[kind]
                    expected = 1 + ncontrols + int(has_angle)
                    if len(rest) != expected:
                        raise UsageError(f"{kind} expects {expected} fields, got {len(rest)}")
                    target = int(rest[0])
                    controls = tuple(int(c) for c in rest[1:1 + ncontrols])
                    angle = float(rest[-1]) if has_angle else None
                    gates.append(Gate(kind, target, controls, angle))
            except (IndexError, ValueError) as exc:
                raise UsageError(f"line {lineno}: {exc}") from exc
        if width is None:
            raise UsageError("missing 'width N' header")
        return cls(width, gates, phase)


def _apply(block: np.ndarray, gate: Gate, width: int) -> np.ndarray:
    """Apply ``gate`` to every column of ``block`` (shape ``(2**width, k)``)."""
    k = block.shape[1]
    psi = block.reshape((2,) * width + (k,))
    index = [slice(None)] * width
    for c in gate.controls:
        index[c] = 1
    sub = psi[tuple(index)]
    # axis of the target inside the sliced view
    axis = gate.target - sum(1 for c in gate.controls if c < gate.target)
    moved = np.moveaxis(sub, axis, 0)
    moved = np.tensordot(gate.base_matrix(), moved, axes=([1], [0]))
    psi = psi.copy()
    psi[tuple(index)] = np.moveaxis(moved, 0, axis)
    return psi.reshape(2 ** width, k)


def to_matrix(circuit: Circuit) -> np.ndarray:
    """Dense unitary of the circuit (first gate acts first)."""
    if circuit.width > MAX_WIDTH:
        raise TooWide(f"width {circuit.width} exceeds {MAX_WIDTH}")
    U = np.eye(2 ** circuit.width, dtype=complex)
    for g in circuit.gates:
        U = _apply(U, g, circuit.width)
    return circuit.global_phase * U


def run(circuit: Circuit, state: np.ndarray) -> np.ndarray:
    out = np.asarray(state, dtype=complex).reshape(-1, 1)
    if out.shape[0] != 2 ** circuit.width:
        raise UsageError("state dimension does not match circuit width")
    for g in circuit.gates:
        out = _apply(out, g, circuit.width)
    return circuit.global_phase * out[:, 0]


def cnot_count(circuit: Circuit) -> int:
    return sum(CNOT_COST.get(g.kind, 0) for g in circuit.gates)


def toffoli_network(c1: int, c2: int, target: int) -> list[Gate]:
    """Six-CNOT Toffoli built from H, T, T-dagger and CNOT."""
    T, Td = math.pi / 4, -math.pi / 4
    return [
        Gate("H", target),
        Gate("CNOT", target, (c2,)),
        Gate("RZ", target, angle=Td),
        Gate("CNOT", target, (c1,)),
        Gate("RZ", target, angle=T),
        Gate("CNOT", target, (c2,)),
        Gate("RZ", target, angle=Td),
        Gate("CNOT", target, (c1,)),
        Gate("RZ", c2, angle=T),
        Gate("RZ", target, angle=T),
        Gate("H", target),
        Gate("CNOT", c2, (c1,)),
        Gate("RZ", c1, angle=T),
        Gate("RZ", c2, angle=Td),
        Gate("CNOT", c2, (c1,)),
    ]


def lower_toffoli(circuit: Circuit) -> Circuit:
    gates: list[Gate] = []
    for g in circuit.gates:
        if g.kind == "TOFFOLI":
            gates.extend(toffoli_network(g.controls[0], g.controls[1], g.target))
        else:
            gates.append(g)
    return replace(circuit, gates=gates)


def diffusion_circuit_3q() -> Circuit:
    """``-(HX (x) HX (x) Z) CCX (XH (x) XH (x) Z)`` on three qubits."""
    gates = [Gate("H", 0), Gate("X", 0), Gate("H", 1), Gate("X", 1), Gate("Z", 2),
             Gate("TOFFOLI", 2, (0, 1)),
             Gate("X", 0), Gate("H", 0), Gate("X", 1), Gate("H", 1), Gate("Z", 2)]
    return Circuit(3, gates, global_phase=-1.0 + 0.0j)


def diffusion_matrix(n: int) -> np.ndarray:
    psi = np.full(n, 1 / math.sqrt(n), dtype=complex)
    return 2 * np.outer(psi, psi.conj()) - np.eye(n)


def multi_controlled_phase(controls: tuple[int, ...], target: int, angle: float) -> list[Gate]:
    """Phase ``exp(i*angle)`` on the state where controls and target are all 1."""
    if not controls:
        return [Gate("RZ", target, angle=angle)]
    if len(controls) == 1:
        return [Gate("CRZ", target, controls, angle)]
    *rest, last = controls
    flip = multi_controlled_x(tuple(rest), last)
    return ([Gate("CRZ", target, (last,), angle / 2)] + flip
            + [Gate("CRZ", target, (last,), -angle / 2)] + flip
            + multi_controlled_phase(tuple(rest), target, angle / 2))


def multi_controlled_x(controls: tuple[int, ...], target: int) -> list[Gate]:
    if len(controls) == 1:
        return [Gate("CNOT", target, controls)]
    if len(controls) == 2:
        return [Gate("TOFFOLI", target, controls)]
    return ([Gate("H", target)] + multi_controlled_phase(controls, target, math.pi)
            + [Gate("H", target)])


def synthesize_priority_oracle(width: int, marked: Mapping[int, complex]) -> Circuit:
    """Diagonal oracle with ``marked[x]`` on basis state ``x`` and 1 elsewhere.

    Each item is mapped to all-ones by X gates, hit with one multi-controlled
    phase, and mapped back.
    """
    if width > MAX_WIDTH:
        raise TooWide(f"width {width} exceeds {MAX_WIDTH}")
    circ = Circuit(width)
    qubits = tuple(range(width))
    for x, phase in sorted(marked.items()):
        if not 0 <= x < 2 ** width:
            raise UsageError(f"item {x} does not fit in {width} qubits")
        if abs(abs(phase) - 1) > 1e-12:
            raise UsageError(f"phase for item {x} is not unimodular")
        zeros = [q for q in qubits if not (x >> (width - 1 - q)) & 1]
        flips = [Gate("X", q) for q in zeros]
        circ.extend(flips)
        circ.extend(multi_controlled_phase(qubits[:-1], qubits[-1], cmath.phase(phase)))
        circ.extend(flips)
    return circ


def priority_oracle_n8(eps_tilde: float) -> Circuit:
    """Phase-encoded oracle for targets 000 (priority 0) and 111 (``eps_tilde``)."""
    return synthesize_priority_oracle(3, {0: -1.0, 7: -cmath.exp(1j * math.pi * eps_tilde)})


def ps_oracle_circuit(eps: float) -> Circuit:
    """Amplitude-encoded oracle for targets 000 and 111.

    Two CNOTs fold ``|111>`` onto ``|100>``; inside the block where qubits 1
    and 2 are zero the oracle is ``Z RY(xi)`` on qubit 0, with
    ``cos(xi/2) = -(1+2 eps)`` and ``sin(xi/2) = 2 sqrt(-eps(1+eps))``.
    The doubly controlled RY uses two Toffolis, the doubly controlled Z one.
    """
    if not -1.0 <= eps <= 0.0:
        raise UsageError(f"priority {eps} outside [-1, 0]")
    xi = 2 * math.atan2(2 * math.sqrt(-eps * (1 + eps)), -(1 + 2 * eps))
    fold = [Gate("CNOT", 1, (0,)), Gate("CNOT", 2, (0,))]
    open_ctrl = [Gate("X", 1), Gate("X", 2)]
    cc_ry = [Gate("RY", 0, angle=xi / 2), Gate("TOFFOLI", 0, (1, 2)),
             Gate("RY", 0, angle=-xi / 2), Gate("TOFFOLI", 0, (1, 2))]
    cc_z = [Gate("H", 0), Gate("TOFFOLI", 0, (1, 2)), Gate("H", 0)]
    gates = fold + open_ctrl + cc_ry + cc_z + open_ctrl + fold[::-1]
    return Circuit(3, gates)


def uniform_prep(width: int) -> Circuit:
    return Circuit(width, [Gate("H", q) for q in range(width)])


def phase_equivalent(A: np.ndarray, B: np.ndarray, tol: float = 1e-10) -> tuple[bool, complex]:
    """Whether ``A = g * B`` for a unimodular ``g``; returns ``(ok, g)``."""
    A, B = np.asarray(A), np.asarray(B)
    k = np.unravel_index(np.argmax(np.abs(B)), B.shape)
    if abs(B[k]) < tol:
        return bool(np.abs(A).max() < tol), 1.0 + 0.0j
    g = A[k] / B[k]
    g = g / abs(g) if abs(g) > 0 else 1.0 + 0.0j
    return bool(np.abs(A - g * B).max() < tol), complex(g)
