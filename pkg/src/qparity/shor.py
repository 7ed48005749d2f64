"""Nine-qubit Shor code and generalized (n, m) quantum parity code.

Physical qubits are 0-indexed; the conventional 1-based photon numbering
maps to index = number - 1.  The Shor code is the (n=3, m=3) instance
with blocks {0,1,2}, {3,4,5}, {6,7,8}; block leaders sit at indices
0, m, 2m, ...

Readout measures the surviving qubits of blocks 2 and 3 in Z and the
non-leader survivors of block 1 in X, then applies a fixed Hadamard and
one of {I, Z, X, ZX} to the leader.  The outcome-to-correction table is
derived programmatically from the lossless encoding circuit the first
time it is needed, never hand-written.
"""

from __future__ import annotations

import cmath
import math
from dataclasses import dataclass, field
from functools import lru_cache
from typing import Iterable, Sequence

import numpy as np

from .config import TOL
from .errors import PreconditionError
from .sim import (
    CNOT,
    H,
    DensityMatrix,
    MeasurementRecord,
    PauliString,
    PureState,
    State,
    apply_pauli_channel,
    apply_unitary,
    expectation,
    fidelity,
    measure,
    measure_pauli,
    partial_trace,
    state_from_qubit,
)


@dataclass(frozen=True)
class LogicalInput:
    """Single-qubit input alpha|0> + beta|1> to be encoded."""

    alpha: complex
    beta: complex

    def __post_init__(self):
        norm = abs(self.alpha) ** 2 + abs(self.beta) ** 2
        if abs(norm - 1.0) > TOL.atol:
            raise ValueError(f"input not normalized: |a|^2+|b|^2 = {norm!r}")

    @classmethod
    def from_angles(cls, theta: float, phi: float) -> "LogicalInput":
        """Bloch angles: alpha = cos(theta/2), beta = e^{i phi} sin(theta/2)."""
        return cls(math.cos(theta / 2),
                   cmath.exp(1j * phi) * math.sin(theta / 2))

    def to_state(self) -> PureState:
        return state_from_qubit(self.alpha, self.beta)


@dataclass(frozen=True)
class CodeLayout:
    """Mapping of n blocks x m qubits onto physical indices 0..n*m-1."""

    n_blocks: int
    block_size: int

    def __post_init__(self):
        if self.n_blocks < 1 or self.block_size < 1:
            raise ValueError("layout needs n_blocks >= 1 and block_size >= 1")

    @property
    def num_qubits(self) -> int:
        return self.n_blocks * self.block_size

    def qubit_of(self, block: int, position: int) -> int:
        if not (0 <= block < self.n_blocks):
            raise ValueError(f"block {block} out of range")
        if not (0 <= position < self.block_size):
            raise ValueError(f"position {position} out of range")
        return block * self.block_size + position

    def block_of(self, qubit: int) -> int:
        if not (0 <= qubit < self.num_qubits):
            raise ValueError(f"qubit {qubit} out of range")
        return qubit // self.block_size

    def block_qubits(self, block: int) -> tuple:
        return tuple(self.qubit_of(block, i) for i in range(self.block_size))

    def leaders(self) -> tuple:
        return tuple(self.qubit_of(b, 0) for b in range(self.n_blocks))


SHOR_LAYOUT = CodeLayout(3, 3)

_PAULI_X = np.array([[0, 1], [1, 0]], dtype=complex)
_PAULI_Z = np.diag([1.0, -1.0]).astype(complex)


@dataclass(frozen=True)
class LossPattern:
    """Set of lost physical qubits."""

    lost: frozenset

    @classmethod
    def of(cls, qubits: Iterable[int]) -> "LossPattern":
        return cls(frozenset(int(q) for q in qubits))

    def validate(self, layout: CodeLayout) -> None:
        for q in self.lost:
            if not (0 <= q < layout.num_qubits):
                raise ValueError(f"lost qubit {q} outside layout")


@dataclass(frozen=True)
class SyndromeRecord:
    """Values of the eight stabilizers, in the order returned by
    :func:`stabilizers` (six ZZ pairs then two X strings)."""

    values: tuple

    def __post_init__(self):
        if len(self.values) != 8:
            raise ValueError("syndrome record needs exactly 8 values")
        for v in self.values:
            if not (-1.0 - TOL.atol <= v <= 1.0 + TOL.atol):
                raise ValueError(f"syndrome value {v} outside [-1, 1]")

    @property
    def sz(self) -> tuple:
        return self.values[:6]

    @property
    def sx(self) -> tuple:
        return self.values[6:]

    def to_json_dict(self) -> dict:
        return {"SZ": list(self.sz), "SX": list(self.sx)}


@dataclass(frozen=True)
class ErrorHypothesis:
    """diagnose() output: the minimal single-qubit error consistent with
    a sampled syndrome, or none/unidentifiable."""

    kind: str                 # "none" | "x" | "z" | "y" | "unidentifiable"
    qubit: int | None = None  # for x / y
    block: int | None = None  # for z (degeneracy: identified per block)

    def label(self) -> str:
        if self.kind == "x":
            return f"X on qubit {self.qubit}"
        if self.kind == "y":
            return f"Y on qubit {self.qubit}"
        if self.kind == "z":
            return f"Z on block {self.block}"
        return self.kind


@dataclass
class DecodeResult:
    """One readout branch: recovered qubit, correction, transcript."""

    output: DensityMatrix
    correction: str                      # element of {"I", "Z", "X", "ZX"}
    transcript: list = field(default_factory=list)
    probability: float = 1.0
    degraded: bool = False               # block-1 loss: no guarantee

    def fidelity_to(self, inp: LogicalInput) -> float:
        return fidelity(self.output, inp.to_state())

    def to_json_dict(self, inp: LogicalInput | None = None) -> dict:
        out = {
            "correction": self.correction,
            "probability": self.probability,
            "degraded": self.degraded,
            "transcript": [
                {"qubit": r.qubit, "basis": r.basis, "outcome": r.outcome,
                 "probability": r.probability}
                for r in self.transcript
            ],
        }
        if inp is not None:
            out["fidelity"] = self.fidelity_to(inp)
        return out


# ---------------------------------------------------------------------------
# encoding
# ---------------------------------------------------------------------------

def encode_block(inp: LogicalInput, m: int = 3) -> PureState:
    """Quantum encoder: alpha|0..0> + beta|1..1> over m qubits, built by
    m-1 CNOTs from the input qubit onto fresh |0> targets."""
    state = state_from_qubit(inp.alpha, inp.beta, m)
    for t in range(1, m):
        state = apply_unitary(state, CNOT, [0, t])
    return state


def encode_qpc(inp: LogicalInput, n: int, m: int) -> PureState:
    """Quantum parity code over n blocks of m qubits.

    Circuit: copy the input qubit onto the block leaders, Hadamard each
    leader, then expand every leader into its block.  The result is
    alpha |0>_L^n + beta |1>_L^n with |0/1>_L = (|0..0> +- |1..1>)/sqrt2.
    """
    if n < 1 or m < 1:
        raise ValueError("need n >= 1 and m >= 1")
    if n * m > 12:
        raise ValueError(f"{n}x{m} = {n * m} qubits exceeds the 12-qubit cap")
    layout = CodeLayout(n, m)
    state = state_from_qubit(inp.alpha, inp.beta, n * m)
    for b in range(1, n):
        state = apply_unitary(state, CNOT, [0, layout.qubit_of(b, 0)])
    for leader in layout.leaders():
        state = apply_unitary(state, H, [leader])
    for b in range(n):
        leader = layout.qubit_of(b, 0)
        for pos in range(1, m):
            state = apply_unitary(state, CNOT,
                                  [leader, layout.qubit_of(b, pos)])
    return state


def encode_shor(inp: LogicalInput) -> PureState:
    """Nine-qubit Shor code word for the given input."""
    return encode_qpc(inp, 3, 3)


# ---------------------------------------------------------------------------
# stabilizers and syndromes
# ---------------------------------------------------------------------------

def stabilizers(layout: CodeLayout = SHOR_LAYOUT) -> list:
    """The code's stabilizer generators.

    For the Shor layout: Z0Z1, Z1Z2, Z3Z4, Z4Z5, Z6Z7, Z7Z8, then
    X0..X5 and X3..X8 (adjacent-block X strings), in this order.
    """
    gens = []
    for b in range(layout.n_blocks):
        qs = layout.block_qubits(b)
        for i in range(layout.block_size - 1):
            gens.append(PauliString({qs[i]: "Z", qs[i + 1]: "Z"}))
    for b in range(layout.n_blocks - 1):
        qs = layout.block_qubits(b) + layout.block_qubits(b + 1)
        gens.append(PauliString({q: "X" for q in qs}))
    return gens


def measure_syndromes(state: State, mode: str = "expectation",
                      rng: np.random.Generator | None = None,
                      layout: CodeLayout = SHOR_LAYOUT):
    """Evaluate the eight syndrome operators.

    mode="expectation" leaves the state untouched and records <S_i>;
    mode="sample" measures the (commuting) operators sequentially in the
    listed order, collapsing as it goes.  Returns (SyndromeRecord,
    post_measurement_state).
    """
    if state.num_qubits != layout.num_qubits:
        raise ValueError(f"state has {state.num_qubits} qubits, layout needs "
                         f"{layout.num_qubits}")
    gens = stabilizers(layout)
    if mode == "expectation":
        return SyndromeRecord(tuple(expectation(state, g) for g in gens)), state
    if mode == "sample":
        values = []
        for g in gens:
            (outcome, _), state = measure_pauli(state, g, mode="sample",
                                                rng=rng)
            values.append(outcome)
        return SyndromeRecord(tuple(values)), state
    raise ValueError(f"unknown mode {mode!r}")


def apply_flip_channel(state: State, qubit: int, kind: str,
                       p: float) -> DensityMatrix:
    """Probabilistic bit-flip (X) or phase-flip (Z) channel on one qubit."""
    ops = {"bit-flip": "X", "phase-flip": "Z"}
    if kind not in ops:
        raise ValueError(f"kind must be 'bit-flip' or 'phase-flip', "
                         f"got {kind!r}")
    return apply_pauli_channel(state, PauliString({qubit: ops[kind]}), p)


# ---------------------------------------------------------------------------
# diagnosis and correction
# ---------------------------------------------------------------------------

def _x_position(pair: tuple) -> int | None:
    """Map the two ZZ outcomes of one block to the in-block X position."""
    return {(1, 1): None, (-1, 1): 0, (-1, -1): 1, (1, -1): 2}[pair]


def diagnose(record: SyndromeRecord,
             layout: CodeLayout = SHOR_LAYOUT) -> ErrorHypothesis:
    """Minimal single-qubit hypothesis for a sampled (+-1) syndrome.

    Z errors are degenerate within a block and reported per block.
    Syndromes outside the single-error table come back unidentifiable.
    """
    vals = tuple(int(v) for v in record.values)
    if any(v not in (-1, 1) for v in vals):
        raise ValueError("diagnose needs a sampled record with +-1 entries")
    sz, sx = vals[:6], vals[6:]

    x_hits = []
    for b in range(3):
        pos = _x_position((sz[2 * b], sz[2 * b + 1]))
        if pos is not None:
            x_hits.append((b, pos))
    if len(x_hits) > 1:
        return ErrorHypothesis("unidentifiable")

    z_block = {(1, 1): None, (-1, 1): 0, (-1, -1): 1, (1, -1): 2}[sx]

    if not x_hits and z_block is None:
        return ErrorHypothesis("none")
    if x_hits and z_block is None:
        b, pos = x_hits[0]
        return ErrorHypothesis("x", qubit=layout.qubit_of(b, pos))
    if not x_hits:
        return ErrorHypothesis("z", block=z_block)
    b, pos = x_hits[0]
    if b != z_block:
        return ErrorHypothesis("unidentifiable")
    return ErrorHypothesis("y", qubit=layout.qubit_of(b, pos))


def correct(state: State, hypothesis: ErrorHypothesis,
            layout: CodeLayout = SHOR_LAYOUT) -> State:
    """Apply the conjugate Pauli for the hypothesis.

    Z corrections target the lowest-indexed qubit of the implicated
    block; a Y correction is applied as Z then X (global phase dropped).
    """
    if hypothesis.kind == "none":
        return state
    if hypothesis.kind == "unidentifiable":
        raise PreconditionError("cannot correct an unidentifiable syndrome")
    if hypothesis.kind == "x":
        return apply_unitary(state, _PAULI_X, [hypothesis.qubit])
    if hypothesis.kind == "z":
        return apply_unitary(state, _PAULI_Z,
                             [layout.qubit_of(hypothesis.block, 0)])
    if hypothesis.kind == "y":
        q = hypothesis.qubit
        return apply_unitary(apply_unitary(state, _PAULI_Z, [q]),
                             _PAULI_X, [q])
    raise ValueError(f"unknown hypothesis kind {hypothesis.kind!r}")


# ---------------------------------------------------------------------------
# readout with loss
# ---------------------------------------------------------------------------

_CORRECTION_OPS = {
    "I": np.eye(2, dtype=complex),
    "Z": _PAULI_Z,
    "X": _PAULI_X,
    "ZX": _PAULI_Z @ _PAULI_X,
}


def _readout_branches(state: State, alive: Sequence[int], mode: str,
                      rng: np.random.Generator | None,
                      layout: CodeLayout):
    """Walk the readout measurement sequence.

    Yields (s, t, probability, transcript, collapsed_state) where s is
    the product of block signs for blocks >= 1 (each block's sign is the
    Z outcome of its first surviving qubit) and t is the product of X
    outcomes on block 0's surviving non-leader qubits.
    """
    pos = {q: i for i, q in enumerate(alive)}
    z_targets = [[q for q in layout.block_qubits(b) if q in pos]
                 for b in range(1, layout.n_blocks)]
    x_targets = [q for q in layout.block_qubits(0)[1:] if q in pos]

    def walk(st, step_list, acc_prob, transcript, signs, t_acc):
        if not step_list:
            s = 1
            for first_outcome in signs:
                s *= first_outcome
            yield s, t_acc, acc_prob, transcript, st
            return
        (basis, qubit, block_first) = step_list[0]
        if mode == "sample":
            rec, nxt = measure(st, pos[qubit], basis, mode="sample", rng=rng)
            branches = [(rec, nxt)]
        else:
            branches = measure(st, pos[qubit], basis, mode="distribution")
        for rec, nxt in branches:
            rec_orig = MeasurementRecord(qubit, basis, rec.outcome,
                                         rec.probability)
            new_signs = signs + [rec.outcome] if block_first else signs
            new_t = t_acc * rec.outcome if basis == "X" else t_acc
            yield from walk(nxt, step_list[1:], acc_prob * rec.probability,
                            transcript + [rec_orig], new_signs, new_t)

    steps = []
    for block in z_targets:
        for i, q in enumerate(block):
            steps.append(("Z", q, i == 0))
    for q in x_targets:
        steps.append(("X", q, False))
    yield from walk(state, steps, 1.0, [], [], 1)


def _generic_reference_input() -> LogicalInput:
    # Asymmetric amplitudes so that every wrong correction is detectable.
    return LogicalInput(math.cos(0.35), cmath.exp(0.9j) * math.sin(0.35))


@lru_cache(maxsize=None)
def readout_correction_table() -> dict:
    """(block-sign product, X parity) -> correction in {I, Z, X, ZX}.

    Derived by enumerating every lossless readout branch of a generic
    codeword and picking the unique correction that restores the input
    with fidelity 1.
    """
    inp = _generic_reference_input()
    target = inp.to_state()
    state = encode_shor(inp)
    table = {}
    for s, t, _prob, _tr, st in _readout_branches(
            state, list(range(9)), "enumerate", None, SHOR_LAYOUT):
        reduced = partial_trace(st, [q for q in range(9) if q != 0])
        reduced = apply_unitary(reduced, H, [0])
        for name, op in _CORRECTION_OPS.items():
            candidate = apply_unitary(reduced, op, [0])
            if fidelity(candidate, target) > 1.0 - TOL.atol:
                prev = table.setdefault((s, t), name)
                if prev != name:
                    raise RuntimeError("correction table is inconsistent")
                break
        else:
            raise RuntimeError(f"no correction restores branch (s={s}, t={t})")
    if len(table) != 4:
        raise RuntimeError(f"expected 4 table entries, derived {len(table)}")
    return table


def decode_readout(state: State, losses: Iterable[int] = (),
                   mode: str = "enumerate",
                   rng: np.random.Generator | None = None):
    """Read the encoded qubit back out of a (possibly lossy) code word.

    ``state`` may be the full 9-qubit word (losses are traced out here)
    or one already reduced to the surviving qubits.  Loss inside block 1
    beyond the leader is tolerated but flags the result as degraded.
    mode="enumerate" returns every measurement branch as a list of
    DecodeResult; mode="sample" follows a single random path.
    """
    layout = SHOR_LAYOUT
    lost = frozenset(int(q) for q in losses)
    LossPattern(lost).validate(layout)
    if 0 in lost:
        raise PreconditionError("output qubit lost: qubit 0 carries the "
                                "decoded state and cannot be recovered")
    for b in range(layout.n_blocks):
        if set(layout.block_qubits(b)) <= lost:
            raise PreconditionError(f"block {b} fully lost: no photon left "
                                    "to measure")
    alive = [q for q in range(layout.num_qubits) if q not in lost]
    if state.num_qubits == layout.num_qubits and lost:
        work: State = partial_trace(state, lost)
    elif state.num_qubits == len(alive):
        work = state
    else:
        raise ValueError(f"state has {state.num_qubits} qubits; expected "
                         f"{layout.num_qubits} or {len(alive)}")
    degraded = bool(lost & set(layout.block_qubits(0)))

    table = readout_correction_table()
    pos = {q: i for i, q in enumerate(alive)}
    results = []
    for s, t, prob, transcript, st in _readout_branches(
            work, alive, mode, rng, layout):
        keep = pos[0]
        others = [i for i in range(len(alive)) if i != keep]
        reduced = partial_trace(st, others)
        reduced = apply_unitary(reduced, H, [0])
        name = table[(s, t)]
        reduced = apply_unitary(reduced, _CORRECTION_OPS[name], [0])
        results.append(DecodeResult(output=reduced, correction=name,
                                    transcript=transcript, probability=prob,
                                    degraded=degraded))
    if mode == "sample":
        return results[0]
    return results
