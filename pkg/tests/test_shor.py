"""Shor / quantum parity code tests.

Syndrome values for injected errors are frozen from the dense-matrix
oracle (Pauli conjugation on the full 512-dim space), and the readout
is checked branch by branch against the inverse-encoding-circuit
decoder.
"""

import itertools
import math

import numpy as np
import pytest

import reference as ref
from qparity.errors import PreconditionError
from qparity.shor import (
    CodeLayout,
    DecodeResult,
    LogicalInput,
    SHOR_LAYOUT,
    SyndromeRecord,
    apply_flip_channel,
    correct,
    decode_readout,
    diagnose,
    encode_block,
    encode_qpc,
    encode_shor,
    measure_syndromes,
    readout_correction_table,
    stabilizers,
)
from qparity.sim import (
    PureState,
    apply_unitary,
    expectation,
    fidelity,
    partial_trace,
)

S2 = 1 / math.sqrt(2)
D_INPUT = LogicalInput(S2, S2)
A_INPUT = LogicalInput(S2, -S2)

# |D>_l support: both code-block signs multiply to +, so an even number
# of blocks sit in the |111| branch.
D_SUPPORT = {
    int("000000000", 2): 0.5,
    int("000111111", 2): 0.5,
    int("111000111", 2): 0.5,
    int("111111000", 2): 0.5,
}


def random_inputs(count, seed=0):
    rng = np.random.default_rng(seed)
    out = []
    for _ in range(count):
        theta = rng.uniform(0, math.pi)
        phi = rng.uniform(0, 2 * math.pi)
        out.append(LogicalInput.from_angles(theta, phi))
    return out


def apply_pauli_error(state, qubit, letter):
    return apply_unitary(state, ref.PAULI[letter], [qubit])


class TestEncodeBlock:
    def test_zero_input(self):
        s = encode_block(LogicalInput(1, 0))
        assert np.allclose(s.amplitudes[0], 1)

    def test_plus_input_gives_ghz(self):
        s = encode_block(LogicalInput(S2, S2))
        np.testing.assert_allclose(s.amplitudes[[0, 7]], [S2, S2],
                                   atol=1e-12)

    def test_complex_input_matches_circuit_oracle(self):
        inp = LogicalInput(S2, 1j * S2)
        s = encode_block(inp)
        # oracle: two explicit CNOT matrices acting on (a|0>+b|1>)|00>
        vec = np.zeros(8, dtype=complex)
        vec[0], vec[4] = inp.alpha, inp.beta
        vec = ref.cnot_matrix(0, 2, 3) @ ref.cnot_matrix(0, 1, 3) @ vec
        np.testing.assert_allclose(s.amplitudes, vec, atol=1e-12)
        np.testing.assert_allclose(s.amplitudes[[0, 7]], [S2, 1j * S2],
                                   atol=1e-12)


class TestEncodeShor:
    def test_zero_input_block_structure(self):
        s = encode_shor(LogicalInput(1, 0))
        block = np.zeros(8)
        block[[0, 7]] = S2
        want = np.kron(np.kron(block, block), block)
        np.testing.assert_allclose(s.amplitudes, want, atol=1e-12)

    def test_one_input_block_structure(self):
        s = encode_shor(LogicalInput(0, 1))
        block = np.zeros(8)
        block[0], block[7] = S2, -S2
        want = np.kron(np.kron(block, block), block)
        np.testing.assert_allclose(s.amplitudes, want, atol=1e-12)

    def test_d_state_support(self):
        s = encode_shor(D_INPUT)
        nz = {i: a for i, a in enumerate(s.amplitudes) if abs(a) > 1e-12}
        assert set(nz) == set(D_SUPPORT)
        for i, want in D_SUPPORT.items():
            assert abs(nz[i] - want) < 1e-10

    def test_matches_full_circuit_oracle(self):
        inp = random_inputs(1, seed=5)[0]
        vec = np.zeros(512, dtype=complex)
        vec[0], vec[256] = inp.alpha, inp.beta
        for op in ref.shor_encoding_circuit():
            vec = op @ vec
        np.testing.assert_allclose(encode_shor(inp).amplitudes, vec,
                                   atol=1e-12)

    def test_codeword_stabilized(self):
        for inp in random_inputs(20, seed=1):
            word = encode_shor(inp)
            for gen in stabilizers():
                assert abs(expectation(word, gen) - 1) < 1e-10


class TestEncodeQpc:
    def test_3x3_equals_shor(self):
        inp = random_inputs(1, seed=2)[0]
        np.testing.assert_allclose(encode_qpc(inp, 3, 3).amplitudes,
                                   encode_shor(inp).amplitudes, atol=1e-12)

    def test_1x1_is_hadamard(self):
        inp = random_inputs(1, seed=3)[0]
        got = encode_qpc(inp, 1, 1)
        want = [(inp.alpha + inp.beta) * S2, (inp.alpha - inp.beta) * S2]
        np.testing.assert_allclose(got.amplitudes, want, atol=1e-12)

    def test_2x2_zero_input(self):
        got = encode_qpc(LogicalInput(1, 0), 2, 2)
        want = np.zeros(16)
        want[[0b0000, 0b0011, 0b1100, 0b1111]] = 0.5
        np.testing.assert_allclose(got.amplitudes, want, atol=1e-12)

    def test_size_cap(self):
        with pytest.raises(ValueError):
            encode_qpc(LogicalInput(1, 0), 4, 4)


class TestStabilizers:
    def test_exact_generators(self):
        want = [
            {0: "Z", 1: "Z"}, {1: "Z", 2: "Z"},
            {3: "Z", 4: "Z"}, {4: "Z", 5: "Z"},
            {6: "Z", 7: "Z"}, {7: "Z", 8: "Z"},
            {q: "X" for q in range(6)},
            {q: "X" for q in range(3, 9)},
        ]
        gens = stabilizers()
        assert [g.factors for g in gens] == want
        assert all(g.sign == 1 for g in gens)

    def test_pairwise_commutation(self):
        gens = stabilizers()
        for a, b in itertools.combinations(gens, 2):
            assert a.commutes_with(b)

    def test_squares_are_identity(self):
        for g in stabilizers():
            sq = g * g
            assert sq.factors == {} and sq.sign == 1


# Syndrome signatures frozen from the dense oracle: conjugating each
# stabilizer by the error and reading the sign flip.
SINGLE_ERROR_SYNDROMES = {
    ("X", 3): (1, 1, -1, 1, 1, 1, 1, 1),
    ("Z", 1): (1, 1, 1, 1, 1, 1, -1, 1),
    ("Y", 4): (1, 1, -1, -1, 1, 1, -1, -1),
}


class TestSyndromes:
    @pytest.mark.parametrize("error,want", SINGLE_ERROR_SYNDROMES.items())
    def test_injected_error_signature(self, error, want):
        letter, qubit = error
        state = apply_pauli_error(encode_shor(D_INPUT), qubit, letter)
        record, _ = measure_syndromes(state)
        np.testing.assert_allclose(record.values, want, atol=1e-10)

    @pytest.mark.parametrize("error", SINGLE_ERROR_SYNDROMES)
    def test_signature_matches_conjugation_oracle(self, error):
        """<S> after error E equals the sign of E S E relative to S."""
        letter, qubit = error
        state = apply_pauli_error(encode_shor(D_INPUT), qubit, letter)
        record, _ = measure_syndromes(state)
        for gen, got in zip(stabilizers(), record.values):
            full = ref.pauli_matrix(gen.factors, 9)
            err = ref.pauli_matrix({qubit: letter}, 9)
            sign = 1 if np.allclose(err @ full @ err, full) else -1
            assert abs(got - sign) < 1e-10

    def test_sample_mode_on_codeword(self):
        rng = np.random.default_rng(0)
        record, post = measure_syndromes(encode_shor(D_INPUT), mode="sample",
                                         rng=rng)
        assert record.values == (1,) * 8
        assert abs(fidelity(post, encode_shor(D_INPUT)) - 1) < 1e-10

    def test_sample_mode_pins_error(self):
        state = apply_pauli_error(encode_shor(D_INPUT), 3, "X")
        rng = np.random.default_rng(0)
        record, _ = measure_syndromes(state, mode="sample", rng=rng)
        assert record.values == SINGLE_ERROR_SYNDROMES[("X", 3)]

    def test_json_shape(self):
        record, _ = measure_syndromes(encode_shor(D_INPUT))
        d = record.to_json_dict()
        assert len(d["SZ"]) == 6 and len(d["SX"]) == 2


class TestFlipChannel:
    def test_zero_probability_unchanged(self):
        word = encode_shor(D_INPUT)
        rho = apply_flip_channel(word, 3, "bit-flip", 0.0)
        np.testing.assert_allclose(rho.matrix, word.to_density().matrix,
                                   atol=1e-12)

    @pytest.mark.parametrize("p", [0.0, 0.25, 0.5, 0.75, 1.0])
    def test_linear_response_bit_flip(self, p):
        rho = apply_flip_channel(encode_shor(D_INPUT), 3, "bit-flip", p)
        record, _ = measure_syndromes(rho)
        assert abs(record.values[2] - (1 - 2 * p)) < 1e-10
        for i in (0, 1, 3, 4, 5, 6, 7):
            assert abs(record.values[i] - 1) < 1e-10

    def test_phase_flip_endpoint(self):
        rho = apply_flip_channel(encode_shor(D_INPUT), 1, "phase-flip", 1.0)
        record, _ = measure_syndromes(rho)
        assert abs(record.values[6] + 1) < 1e-10

    def test_bad_probability(self):
        with pytest.raises(ValueError):
            apply_flip_channel(encode_shor(D_INPUT), 0, "bit-flip", 1.5)


class TestDiagnoseCorrect:
    def test_clean_syndrome(self):
        assert diagnose(SyndromeRecord((1,) * 8)).kind == "none"

    def test_x4_identified(self):
        rec = SyndromeRecord((1, 1, -1, 1, 1, 1, 1, 1))
        hyp = diagnose(rec)
        assert hyp.kind == "x" and hyp.qubit == 3

    def test_z_block_identified(self):
        rec = SyndromeRecord((1, 1, 1, 1, 1, 1, -1, 1))
        hyp = diagnose(rec)
        assert hyp.kind == "z" and hyp.block == 0

    def test_cross_block_unidentifiable(self):
        # X signature in block 2, Z signature in block 1
        rec = SyndromeRecord((1, 1, -1, 1, 1, 1, -1, 1))
        assert diagnose(rec).kind == "unidentifiable"

    def test_two_block_x_unidentifiable(self):
        rec = SyndromeRecord((-1, 1, -1, 1, 1, 1, 1, 1))
        assert diagnose(rec).kind == "unidentifiable"

    def test_correct_refuses_unidentifiable(self):
        with pytest.raises(PreconditionError):
            correct(encode_shor(D_INPUT), diagnose(
                SyndromeRecord((-1, 1, -1, 1, 1, 1, 1, 1))))

    def test_all_27_single_errors_recover(self):
        """Complete single-error table: diagnose then correct restores
        the code word (Z corrections may differ by a stabilizer)."""
        word = encode_shor(D_INPUT)
        for qubit in range(9):
            for letter in "XYZ":
                damaged = apply_pauli_error(word, qubit, letter)
                record, _ = measure_syndromes(damaged)
                sampled = SyndromeRecord(
                    tuple(int(round(v)) for v in record.values))
                hyp = diagnose(sampled)
                assert hyp.kind != "unidentifiable", (qubit, letter)
                fixed = correct(damaged, hyp)
                assert abs(fidelity(fixed.to_density(), word) - 1) < 1e-10, \
                    (qubit, letter)

    def test_degenerate_z_correction(self):
        """Z on any qubit of a block is corrected by Z on its first."""
        word = encode_shor(D_INPUT)
        damaged = apply_pauli_error(word, 2, "Z")
        hyp = diagnose(SyndromeRecord((1, 1, 1, 1, 1, 1, -1, 1)))
        fixed = correct(damaged, hyp)  # applies Z on qubit 0
        assert abs(fidelity(fixed.to_density(), word) - 1) < 1e-10

    def test_no_error_correct_is_identity(self):
        word = encode_shor(D_INPUT)
        fixed = correct(word, diagnose(SyndromeRecord((1,) * 8)))
        assert abs(fidelity(fixed.to_density(), word) - 1) < 1e-12


def branch_signature(result: DecodeResult):
    return tuple((r.qubit, r.basis, r.outcome) for r in result.transcript)


class TestDecodeReadout:
    def test_correction_table_contents(self):
        table = readout_correction_table()
        assert set(table) == {(1, 1), (1, -1), (-1, 1), (-1, -1)}
        assert set(table.values()) == {"I", "X", "Z", "ZX"}

    def test_lossless_every_branch_perfect(self):
        for inp in random_inputs(4, seed=11):
            branches = decode_readout(encode_shor(inp))
            assert len(branches) == 16
            assert abs(sum(b.probability for b in branches) - 1) < 1e-10
            for b in branches:
                assert abs(b.fidelity_to(inp) - 1) < 1e-10
                assert not b.degraded

    def test_matches_inverse_circuit_oracle(self):
        """Branch outputs equal the inverse-circuit decoding."""
        inp = random_inputs(1, seed=21)[0]
        word = encode_shor(inp)
        oracle_vec = ref.inverse_circuit_decode(word.amplitudes)
        oracle = PureState(oracle_vec)
        for b in decode_readout(word):
            assert abs(fidelity(b.output, oracle) - 1) < 1e-10

    def test_six_cardinal_states_read_back(self):
        """Round trip for the complete orthogonal basis set: the poles
        and the four equatorial states of the Bloch sphere."""
        cardinals = [
            LogicalInput(1, 0),            # |0>
            LogicalInput(0, 1),            # |1>
            LogicalInput(S2, S2),          # (|0> + |1>)/sqrt2
            LogicalInput(S2, -S2),         # (|0> - |1>)/sqrt2
            LogicalInput(S2, 1j * S2),     # (|0> + i|1>)/sqrt2
            LogicalInput(S2, -1j * S2),    # (|0> - i|1>)/sqrt2
        ]
        for inp in cardinals:
            for b in decode_readout(encode_shor(inp)):
                assert abs(b.fidelity_to(inp) - 1) < 1e-10
            for b in decode_readout(encode_shor(inp), losses=[5]):
                assert abs(b.fidelity_to(inp) - 1) < 1e-10

    @pytest.mark.parametrize("losses", [(5,), (3, 5), (4,), (6, 8)])
    def test_loss_tolerant_branches(self, losses):
        for inp in (D_INPUT, A_INPUT):
            branches = decode_readout(encode_shor(inp), losses=losses)
            assert abs(sum(b.probability for b in branches) - 1) < 1e-10
            for b in branches:
                assert abs(b.fidelity_to(inp) - 1) < 1e-10
                b.output.validate()

    def test_prereduced_state_accepted(self):
        word = encode_shor(D_INPUT)
        reduced = partial_trace(word, [5])
        branches = decode_readout(reduced, losses=[5])
        for b in branches:
            assert abs(b.fidelity_to(D_INPUT) - 1) < 1e-10

    def test_block1_loss_degraded(self):
        branches = decode_readout(encode_shor(D_INPUT), losses=[1])
        assert all(b.degraded for b in branches)
        assert abs(sum(b.probability for b in branches) - 1) < 1e-10

    def test_output_qubit_loss_rejected(self):
        with pytest.raises(PreconditionError):
            decode_readout(encode_shor(D_INPUT), losses=[0])

    def test_full_block_loss_rejected(self):
        with pytest.raises(PreconditionError):
            decode_readout(encode_shor(D_INPUT), losses=[3, 4, 5])

    def test_sample_mode_reproducible(self):
        word = encode_shor(D_INPUT)
        a = decode_readout(word, mode="sample",
                           rng=np.random.default_rng(9))
        b = decode_readout(word, mode="sample",
                           rng=np.random.default_rng(9))
        assert branch_signature(a) == branch_signature(b)
        assert abs(a.fidelity_to(D_INPUT) - 1) < 1e-10

    def test_json_round(self):
        b = decode_readout(encode_shor(D_INPUT))[0]
        d = b.to_json_dict(D_INPUT)
        assert d["correction"] in ("I", "X", "Z", "ZX")
        assert abs(d["fidelity"] - 1) < 1e-10
        assert len(d["transcript"]) == 8


class TestLayout:
    def test_shor_layout_blocks(self):
        assert SHOR_LAYOUT.block_qubits(0) == (0, 1, 2)
        assert SHOR_LAYOUT.block_qubits(2) == (6, 7, 8)
        assert SHOR_LAYOUT.leaders() == (0, 3, 6)

    def test_bijection(self):
        layout = CodeLayout(4, 3)
        seen = {layout.qubit_of(b, p)
                for b in range(4) for p in range(3)}
        assert seen == set(range(12))
