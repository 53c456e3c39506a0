import numpy as np
import pytest

from conftest import dense, random_hamiltonian_terms, random_state
from tfqubit.circuit import ControlledPauliString, lower_parity_controls, validate_toffoli_free
from tfqubit.compile import (CompileError, CompiledBlock, Hamiltonian, compile_G, compile_S,
                             compile_V, compile_walk, normalize_hamiltonian)
from tfqubit.encoding import make_encoding
from tfqubit.pauli import PauliString
from tfqubit.simulate import StateVector, apply_circuit, circuit_unitary

KINDS = ["sym", "anti"]
ENCODINGS = ["unary", "tree"]


def random_H(rng, lam, n_sim):
    return normalize_hamiltonian(random_hamiltonian_terms(rng, lam, n_sim))


def dense_H(H):
    return sum(a * dense(p) for a, p in H.terms)


def corrected(block):
    return circuit_unitary(block.circuit) / block.global_phase


def blocks(enc, H, kind):
    """Phase-corrected G, S, V as dense matrices on qubitization x sim."""
    d_sim = 2 ** H.n_sim
    G = np.kron(corrected(compile_G(enc, H, kind)), np.eye(d_sim))
    S = np.kron(corrected(compile_S(enc, H, kind)), np.eye(d_sim))
    V = corrected(compile_V(enc, H))
    return G, S, V


def g_state(enc, H):
    v = np.zeros(2 ** enc.n_qubits, dtype=complex)
    for a, mu in zip(H.alphas, enc.mu):
        v[int(mu, 2)] = np.sqrt(a)
    return v


def zero_qub(n_qub):
    v = np.zeros(2 ** n_qub)
    v[0] = 1
    return v


def test_normalize_examples():
    H = normalize_hamiltonian([(-0.5, PauliString("Z")), (0.5, PauliString("X"))])
    assert H.alphas == (0.5, 0.5)
    assert H.strings == (PauliString("Z", 2), PauliString("X"))
    assert H.scale == 1.0
    H = normalize_hamiltonian([(2, PauliString("Z"))])
    assert H.alphas == (1.0,) and H.scale == 2
    H = normalize_hamiltonian([(1, PauliString("Z")), (1, PauliString("Z"))])
    assert H.lam == 1 and H.scale == 2
    H = normalize_hamiltonian([(1, PauliString("Z", 2)), (0.5, PauliString("X"))])
    assert H.strings[0] == PauliString("Z", 2)
    with pytest.raises(CompileError, match="zero"):
        normalize_hamiltonian([(1, PauliString("Z")), (-1, PauliString("Z"))])
    with pytest.raises(CompileError):
        normalize_hamiltonian([(1, PauliString("Z", 1))])


def test_normalize_preserves_operator(rng):
    raw = random_hamiltonian_terms(rng, 5, 3)
    H = normalize_hamiltonian(raw)
    want = sum(c * dense(p) for c, p in raw)
    assert np.allclose(H.scale * dense_H(H), want)
    assert np.allclose(H.matrix(), dense_H(H))


def test_hamiltonian_invariants():
    with pytest.raises(CompileError):
        Hamiltonian(((0.5, PauliString("Z")), (0.4, PauliString("X"))))
    with pytest.raises(CompileError):
        Hamiltonian(((0.5, PauliString("Z")), (0.5, PauliString("Z", 2))))
    with pytest.raises(CompileError):
        Hamiltonian(())


def test_compile_G_single_term():
    H = normalize_hamiltonian([(1.0, PauliString("Z"))])
    b = compile_G(make_encoding("unary", 1), H, "sym")
    assert b.phase == 1
    assert np.allclose(circuit_unitary(b.circuit), 1j * dense(PauliString("X")))


def test_compile_G_two_terms():
    H = normalize_hamiltonian([(0.5, PauliString("X")), (0.5, PauliString("Z"))])
    for kind in KINDS:
        b = compile_G(make_encoding("unary", 2), H, kind)
        out = apply_circuit(StateVector.zero(2), b.circuit).amplitudes
        assert np.allclose(out, 1j * np.array([0, 1, 1, 0]) / np.sqrt(2))


@pytest.mark.parametrize("enc_kind", ENCODINGS)
@pytest.mark.parametrize("kind", KINDS)
def test_prepare_weights_and_involution(rng, enc_kind, kind):
    for lam in (1, 2, 3, 5, 7):
        H = random_H(rng, lam, 3)
        enc = make_encoding(enc_kind, lam)
        b = compile_G(enc, H, kind)
        out = apply_circuit(StateVector.zero(enc.n_qubits), b.circuit).amplitudes
        out = out / b.global_phase
        for a, mu in zip(H.alphas, enc.mu):
            assert abs(out[int(mu, 2)]) ** 2 == pytest.approx(a, abs=1e-10)
        assert np.allclose(out, g_state(enc, H), atol=1e-10)
        g = corrected(b)
        assert np.max(np.abs(g @ g - np.eye(len(g)))) <= 1e-10


def test_compile_S_single_term():
    H = normalize_hamiltonian([(1.0, PauliString("Z"))])
    b = compile_S(make_encoding("unary", 1), H, "sym")
    raw = circuit_unitary(b.circuit)
    y, x = dense(PauliString("Y")), dense(PauliString("X"))
    assert np.allclose(raw, -y @ x)
    assert b.phase == 3
    s = raw / b.global_phase
    assert np.allclose(s @ np.array([0, 1]), [0, 1])  # S|G> = |G> with |G> = |1>


@pytest.mark.parametrize("enc_kind", ENCODINGS)
@pytest.mark.parametrize("kind", KINDS)
def test_reflection_spectrum(rng, enc_kind, kind):
    H = random_H(rng, 3, 2)
    enc = make_encoding(enc_kind, 3)
    s = corrected(compile_S(enc, H, kind))
    g = g_state(enc, H)
    assert np.allclose(s @ g, g, atol=1e-10)
    assert np.allclose(s @ s, np.eye(len(s)), atol=1e-10)
    # within span{|mu_k>} the reflection is 2|G><G| - 1
    idx = [int(m, 2) for m in enc.mu]
    sub = s[np.ix_(idx, idx)]
    gs = g[idx]
    assert np.allclose(sub, 2 * np.outer(gs, gs.conj()) - np.eye(3), atol=1e-10)
    assert np.allclose(np.sort(np.linalg.eigvalsh((sub + sub.conj().T) / 2)), [-1, -1, 1])


def test_compile_V_unary_gates():
    H = normalize_hamiltonian([(0.5, PauliString("X")), (0.5, PauliString("Z"))])
    b = compile_V(make_encoding("unary", 2), H)
    assert b.circuit.gates == (ControlledPauliString((1,), PauliString("IIX")),
                               ControlledPauliString((2,), PauliString("IIZ")))
    assert b.phase == 0


@pytest.mark.parametrize("enc_kind", ENCODINGS)
def test_select_blocks(rng, enc_kind):
    for lam in (1, 2, 3, 4):
        H = random_H(rng, lam, 2)
        enc = make_encoding(enc_kind, lam)
        v = corrected(compile_V(enc, H))
        d = 2 ** H.n_sim
        for k, (mu, p) in enumerate(zip(enc.mu, H.strings)):
            i = int(mu, 2)
            assert np.allclose(v[i * d:(i + 1) * d, i * d:(i + 1) * d], dense(p), atol=1e-12)
        assert np.allclose(v[:d, :d], np.eye(d))
        # V squares to one on span{|0>, |mu_k>} x sim
        idx = [0] + [int(m, 2) for m in enc.mu]
        rows = np.concatenate([np.arange(i * d, (i + 1) * d) for i in idx])
        v2 = v @ v
        assert np.allclose(v2[np.ix_(rows, rows)], np.eye(len(rows)), atol=1e-12)
        # on the full register only when the terms commute
        mats = [dense(p) for p in H.strings]
        if enc_kind == "unary" and all(np.allclose(a @ b, b @ a) for a in mats for b in mats):
            assert np.allclose(v2, np.eye(len(v)), atol=1e-12)


@pytest.mark.parametrize("enc_kind", ENCODINGS)
def test_block_encoding_identity(rng, enc_kind):
    for _ in range(10):
        lam = int(rng.integers(1, 5))
        H = random_H(rng, lam, 2 if lam > 3 else int(rng.integers(1, 3)))
        enc = make_encoding(enc_kind, lam)
        _, _, v = blocks(enc, H, "anti")
        gk = np.kron(g_state(enc, H)[:, None], np.eye(2 ** H.n_sim))
        assert np.max(np.abs(gk.conj().T @ v @ gk - dense_H(H))) <= 1e-10


def walk_blocks(block):
    u = circuit_unitary(block.circuit)
    d = len(u) // 2
    return u[:d, :d], u[d:, d:] / block.global_phase, u[:d, d:], u[d:, :d]


@pytest.mark.parametrize("enc_kind", ENCODINGS)
@pytest.mark.parametrize("kind", KINDS)
@pytest.mark.parametrize("power", [1, 2, 3])
def test_walk_blocks(rng, enc_kind, kind, power):
    H = random_H(rng, 3, 1)
    enc = make_encoding(enc_kind, 3)
    b = compile_walk(enc, H, kind, power)
    zero_blk, one_blk, off1, off2 = walk_blocks(b)
    assert np.max(np.abs(off1)) <= 1e-12 and np.max(np.abs(off2)) <= 1e-12
    G, S, V = blocks(enc, H, kind)
    want = G @ np.linalg.matrix_power(S @ V, power) @ G
    assert np.max(np.abs(one_blk - want)) <= 1e-9
    # identity on qubitization |0..0> inputs
    d = 2 ** H.n_sim
    assert np.allclose(zero_blk[:, :d], np.eye(len(zero_blk))[:, :d], atol=1e-10)


def test_walk_phase_ledger():
    H = normalize_hamiltonian([(0.5, PauliString("X")), (0.5, PauliString("Z"))])
    enc = make_encoding("unary", 2)
    assert [compile_walk(enc, H, "sym", m).phase for m in (1, 2, 3, 4)] == [1, 0, 3, 2]
    with pytest.raises(CompileError):
        compile_walk(enc, H, "sym", 0)


def test_structural_counts():
    H = normalize_hamiltonian([(0.5, PauliString("X")), (0.5, PauliString("Z"))])
    c = compile_walk(make_encoding("unary", 2), H, "anti").circuit
    rots = [g for g in c.gates if not isinstance(g, ControlledPauliString)]
    strings = [g for g in c.gates if isinstance(g, ControlledPauliString)]
    assert len(rots) == 6 and len(strings) == 2
    assert c.gates[3:5] == tuple(strings)


def proof_vectors(enc, H, G, S, V):
    """Yield (E, |E~>, |E~perp>) for every eigenpair with |E| < 1."""
    evals, evecs = np.linalg.eigh(dense_H(H))
    g = g_state(enc, H)
    for E, vec in zip(evals, evecs.T):
        if abs(E) > 1 - 1e-9:
            continue
        et = np.kron(g, vec)
        perp = (V @ et - E * et) / np.sqrt(1 - E ** 2)
        yield E, et, perp


@pytest.mark.parametrize("enc_kind", ENCODINGS)
@pytest.mark.parametrize("kind", KINDS)
def test_proof_identities(rng, enc_kind, kind):
    for _ in range(3):
        H = random_H(rng, 4, 2)
        enc = make_encoding(enc_kind, 4)
        G, S, V = blocks(enc, H, kind)
        for E, et, perp in proof_vectors(enc, H, G, S, V):
            assert np.allclose(S @ V @ et, 2 * E * et - V @ et, atol=1e-9)
            assert np.allclose(S @ et, et, atol=1e-9)
            assert np.allclose(S @ perp, -perp, atol=1e-9)
            basis = np.stack([et, perp], axis=1)
            m = basis.conj().T @ S @ V @ basis
            r = np.sqrt(1 - E ** 2)
            assert np.allclose(m, [[E, r], [-r, E]], atol=1e-9)


def test_every_block_is_toffoli_free(rng):
    H = random_H(rng, 5, 2)
    for enc_kind in ENCODINGS:
        enc = make_encoding(enc_kind, 5)
        for kind in KINDS:
            for b in (compile_G(enc, H, kind), compile_G(enc, H, kind, control=True),
                      compile_S(enc, H, kind), compile_V(enc, H), compile_walk(enc, H, kind, 2)):
                low = lower_parity_controls(b.circuit)
                assert validate_toffoli_free(low)[0]
                if b.layout.n_qubits <= 10:
                    assert np.max(np.abs(circuit_unitary(low) - circuit_unitary(b.circuit))) <= 1e-12


def test_block_json_round_trip(rng):
    H = random_H(rng, 3, 2)
    b = compile_walk(make_encoding("tree", 3), H, "anti")
    back = CompiledBlock.loads(b.dumps())
    assert back.phase == b.phase and back.layout == b.layout
    assert np.max(np.abs(circuit_unitary(back.circuit) - circuit_unitary(b.circuit))) <= 1e-10


def test_lambda_mismatch(rng):
    H = random_H(rng, 3, 2)
    with pytest.raises(CompileError):
        compile_G(make_encoding("unary", 2), H, "sym")
    with pytest.raises(CompileError):
        compile_walk(make_encoding("unary", 3), H, "bogus")


def test_walk_eigenphases(rng):
    H = random_H(rng, 2, 1)
    enc = make_encoding("unary", 2)
    b = compile_walk(enc, H, "sym")
    _, one_blk, _, _ = walk_blocks(b)
    G, S, V = blocks(enc, H, "sym")
    for E, et, perp in proof_vectors(enc, H, G, S, V):
        # span{|E~>, G|E~perp>} is invariant under the G S V G block
        basis = np.stack([G @ et, G @ perp], axis=1)
        m = basis.conj().T @ one_blk @ basis
        vals = sorted(np.linalg.eigvals(m), key=lambda z: z.imag)
        want = [E - 1j * np.sqrt(1 - E ** 2), E + 1j * np.sqrt(1 - E ** 2)]
        assert np.allclose(vals, want, atol=1e-9)
