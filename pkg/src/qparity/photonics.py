"""Linear-optical realism layer.

Covers the post-selected polarization CNOT, coincidence-rate prediction
for a chain of down-conversion pair sources, and a visibility-based
dephasing model of imperfect two-photon interference.

Each quantum encoder is realized by one interference on a polarizing
beam splitter.  Reduced visibility V means the coherence between the
two interfering polarization components decays by V, i.e. the state
passes a phase-kick channel that applies the site's distinguishing
Pauli with probability (1-V)/2.  A site is therefore described by the
Pauli operator the kick has become once propagated to the end of the
encoding circuit: kicks that happen before a leader's basis rotation
turn into X strings over the leader's block, kicks after the block is
assembled stay Z on a block photon.  This is what lets interference
noise leak population out of the ideal polarization distribution.
"""

from __future__ import annotations

import math
from dataclasses import dataclass
from typing import Sequence

import numpy as np

from .shor import LogicalInput, SHOR_LAYOUT, encode_shor
from .sim import (
    CNOT,
    DensityMatrix,
    PauliString,
    PureState,
    State,
    apply_pauli_channel,
    apply_unitary,
    fidelity,
)


@dataclass(frozen=True)
class SourceParams:
    """Photon-pair source figures: per-pulse pair probability, pair
    collection efficiency, pulse repetition rate (Hz)."""

    pair_prob: float
    eta_pair: float
    rep_rate: float = 80e6

    def __post_init__(self):
        if not (0.0 <= self.pair_prob <= 1.0):
            raise ValueError(f"pair_prob {self.pair_prob} out of [0, 1]")
        if not (0.0 <= self.eta_pair <= 1.0):
            raise ValueError(f"eta_pair {self.eta_pair} out of [0, 1]")
        if self.rep_rate <= 0:
            raise ValueError("rep_rate must be positive")


@dataclass(frozen=True)
class NoiseParams:
    """Interference visibility of the encoder beam splitters."""

    visibility: float

    def __post_init__(self):
        if not (0.0 <= self.visibility <= 1.0):
            raise ValueError(f"visibility {self.visibility} out of [0, 1]")


# ---------------------------------------------------------------------------
# post-selected gates
# ---------------------------------------------------------------------------

POSTSELECT_SUCCESS = 0.5


def postselected_cnot(state: State, control: int, target: int,
                      mode: str = "postselect",
                      rng: np.random.Generator | None = None):
    """Polarization CNOT via beam splitter + half-wave plate.

    The gate succeeds with probability 1/2 after post-selecting one
    photon per output port; the success branch acts as an ideal CNOT.
    mode="postselect" returns (success_state, 0.5); mode="sample" draws
    the post-selection and returns (None, 0.5) on failure.
    """
    success = apply_unitary(state, CNOT, [control, target])
    if mode == "postselect":
        return success, POSTSELECT_SUCCESS
    if mode == "sample":
        if rng is None:
            raise ValueError("sample mode needs an rng")
        if rng.random() < POSTSELECT_SUCCESS:
            return success, POSTSELECT_SUCCESS
        return None, POSTSELECT_SUCCESS
    raise ValueError(f"unknown mode {mode!r}")


def chained_postselect_factor(n_stages: int) -> float:
    """Overall acceptance of n_stages independent post-selected stages."""
    if n_stages < 0:
        raise ValueError("need n_stages >= 0")
    return POSTSELECT_SUCCESS ** n_stages


# ---------------------------------------------------------------------------
# coincidence rates
# ---------------------------------------------------------------------------

def coincidence_rate(params: SourceParams, n_sources: int = 5,
                     postselect_factor: float = 1.0) -> float:
    """Predicted accepted-event rate (events/second).

    rep_rate * (pair_prob * eta_pair)^n_sources * postselect_factor:
    every source must emit and deliver its pair in the same pulse, and
    the event must survive the optical post-selection.
    """
    if n_sources < 1:
        raise ValueError("need n_sources >= 1")
    if not (0.0 <= postselect_factor <= 1.0):
        raise ValueError(f"postselect_factor {postselect_factor} "
                         "out of [0, 1]")
    per_pulse = (params.pair_prob * params.eta_pair) ** n_sources
    return params.rep_rate * per_pulse * postselect_factor


def monte_carlo_coincidence(params: SourceParams, n_sources: int,
                            postselect_factor: float, pulses: int,
                            seed) -> tuple:
    """Pulse-level Monte Carlo of the coincidence rate.

    Per pulse each source emits with pair_prob and delivers with
    eta_pair; the event passes post-selection with postselect_factor.
    Returns (rate estimate, standard error of the rate), both in
    events/second.
    """
    if pulses < 1:
        raise ValueError("need pulses >= 1")
    rng = np.random.default_rng(seed)
    hits = 0
    chunk = 1_000_000
    done = 0
    while done < pulses:
        k = min(chunk, pulses - done)
        emitted = rng.random((k, n_sources)) < params.pair_prob
        delivered = emitted & (rng.random((k, n_sources)) < params.eta_pair)
        events = delivered.all(axis=1)
        passed = events & (rng.random(k) < postselect_factor)
        hits += int(passed.sum())
        done += k
    p_hat = hits / pulses
    se_p = math.sqrt(p_hat * (1.0 - p_hat) / pulses)
    return params.rep_rate * p_hat, params.rep_rate * se_p


# ---------------------------------------------------------------------------
# visibility noise
# ---------------------------------------------------------------------------

def apply_visibility_noise(state: State, sites: Sequence[PauliString],
                           visibility: float) -> DensityMatrix:
    """Dephase each interference site: rho -> V rho + (1-V) dephased.

    Per site this equals a phase-kick channel applying the site's Pauli
    with probability (1-V)/2; sites compose left to right.
    """
    if not (0.0 <= visibility <= 1.0):
        raise ValueError(f"visibility {visibility} out of [0, 1]")
    p_kick = (1.0 - visibility) / 2.0
    rho = state.to_density() if isinstance(state, PureState) else state
    for site in sites:
        rho = apply_pauli_channel(rho, site, p_kick)
    return rho


def shor_encoder_sites() -> list:
    """Effective site Paulis for the four encoders of the nine-qubit code.

    The leader-stage interference happens before the basis rotations,
    so its kick propagates to an X string over the second block; the
    three block-stage interferences happen last and stay Z kicks on one
    photon of each block.
    """
    block2 = SHOR_LAYOUT.block_qubits(1)
    sites = [PauliString({q: "X" for q in block2})]
    for b in range(3):
        sites.append(PauliString({SHOR_LAYOUT.qubit_of(b, 1): "Z"}))
    return sites


def block_encoder_site(m: int = 3) -> PauliString:
    """Site Pauli for a standalone m-photon code block (one encoder)."""
    return PauliString({1: "Z"}) if m > 1 else PauliString({0: "Z"})


def encode_shor_noisy(inp: LogicalInput, visibility: float) -> DensityMatrix:
    """Nine-qubit code word with encoder interference noise applied."""
    return apply_visibility_noise(encode_shor(inp), shor_encoder_sites(),
                                  visibility)


def noisy_block_fidelity(visibility: float, m: int = 3) -> float:
    """Fidelity of one noisy code block with the ideal (|0..0>+|1..1>)/sqrt2."""
    from .shor import encode_block

    s = 1 / math.sqrt(2)
    ideal = encode_block(LogicalInput(s, s), m)
    noisy = apply_visibility_noise(ideal, [block_encoder_site(m)], visibility)
    return fidelity(noisy, ideal)


def ideal_support(ideal: PureState) -> list:
    """Indices of computational strings carrying the ideal state."""
    return [int(i) for i in
            np.flatnonzero(np.abs(ideal.amplitudes) ** 2 > 1e-12)]


def snr_hv(rho: State, ideal: PureState | None = None) -> float:
    """Signal-to-noise ratio of the computational-basis distribution.

    Summed probability on the ideal state's support strings divided by
    the probability everywhere else.  A clean state has no leakage and
    returns inf.
    """
    if ideal is None:
        ideal = encode_shor(LogicalInput.from_angles(math.pi / 2, 0.0))
    if rho.num_qubits != ideal.num_qubits:
        raise ValueError(f"state has {rho.num_qubits} qubits, ideal has "
                         f"{ideal.num_qubits}")
    if isinstance(rho, PureState):
        probs = np.abs(rho.amplitudes) ** 2
    else:
        probs = np.diag(rho.matrix).real
    support = ideal_support(ideal)
    signal = float(probs[support].sum())
    noise = float(probs.sum() - signal)
    if noise <= 1e-15:
        return math.inf
    return signal / noise
