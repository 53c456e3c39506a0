import dataclasses

import numpy as np
import pytest
from hypothesis import given, settings
from hypothesis import strategies as st

from conftest import dense
from tfqubit.encoding import (BINARY_TREE, UNARY, Encoding, EncodingError,
                              binary_tree_encoding, gf2_rank, make_encoding,
                              perfect_tree_parents, pruned_tree_parents, unary_encoding,
                              validate_encoding)
from tfqubit.pauli import PauliString, multiply


def zero_ket(n):
    v = np.zeros(2 ** n, dtype=complex)
    v[0] = 1
    return v


def ket(bits):
    v = np.zeros(2 ** len(bits), dtype=complex)
    v[int(bits, 2)] = 1
    return v


def test_unary_small_cases():
    e1 = unary_encoding(1)
    assert e1.gamma_x == (PauliString("X"),)
    assert e1.gamma_y == (PauliString("Y"),)
    assert e1.mu == ("1",)
    assert unary_encoding(3).gamma_x[2] == PauliString("ZZX")
    assert unary_encoding(2).mu[1] == "01"


def test_unary_rejects_zero():
    with pytest.raises(EncodingError):
        unary_encoding(0)
    with pytest.raises(EncodingError):
        binary_tree_encoding(0)


def test_tree_sets_lambda_15():
    enc = binary_tree_encoding(15)
    assert enc.flip_sets[13] == {10, 13, 14}
    assert enc.update_sets[5] == {6, 7, 15}
    assert enc.root == 15


def test_tree_lambda_3_strings():
    enc = binary_tree_encoding(3)
    assert enc.root == 3 and enc.children(3) == [1, 2]
    assert enc.gamma_x == (PauliString("XIX"), PauliString("ZXX"), PauliString("ZZX"))
    assert enc.mu[0] == "101"


def test_perfect_tree_doubling():
    parent = perfect_tree_parents(3)
    # root 7 with subtree roots 3 and 6; leaves 1,2 under 3 and 4,5 under 6
    assert parent[1:] == [3, 3, 7, 6, 6, 7, 0]
    for k in range(1, 8):
        assert parent[k] == 0 or parent[k] > k


@pytest.mark.parametrize("lam", [1, 2, 4, 5, 6, 10, 12, 20, 33])
def test_pruned_tree_is_post_ordered(lam):
    parent = pruned_tree_parents(lam)
    assert sum(p == 0 for p in parent[1:]) == 1
    for k in range(1, lam + 1):
        assert parent[k] == 0 or parent[k] > k
        assert sum(parent[j] == k for j in range(1, lam + 1)) <= 2


def test_validate_examples():
    rep = validate_encoding(unary_encoding(4))
    assert rep.ok
    assert "PASS" in str(rep)


def test_validate_detects_copied_string():
    enc = unary_encoding(3)
    bad = dataclasses.replace(enc, gamma_y=(enc.gamma_x[0],) + enc.gamma_y[1:])
    rep = validate_encoding(bad)
    assert not rep["pairwise anticommutation"].passed
    assert "gx_1" in rep["pairwise anticommutation"].counterexample
    assert "gy_1" in rep["pairwise anticommutation"].counterexample


def test_validate_detects_zero_mu():
    enc = unary_encoding(3)
    bad = dataclasses.replace(enc, mu=("000",) + enc.mu[1:])
    rep = validate_encoding(bad)
    assert not rep["mu nonzero and independent"].passed
    assert not rep.ok


def test_gf2_rank():
    assert gf2_rank([0b101, 0b011, 0b110]) == 2
    assert gf2_rank([0b1, 0b10, 0b100]) == 3


@pytest.mark.parametrize("kind", ["unary", "tree"])
@pytest.mark.parametrize("lam", [1, 2, 3, 5, 7])
def test_majoranas_against_dense_oracle(kind, lam):
    enc = make_encoding(kind, lam)
    mats = [dense(g) for g in enc.gamma_x + enc.gamma_y]
    eye = np.eye(2 ** lam)
    for a in range(len(mats)):
        assert np.allclose(mats[a] @ mats[a], eye)
        for b in range(a + 1, len(mats)):
            assert np.allclose(mats[a] @ mats[b] + mats[b] @ mats[a], 0)
    z = zero_ket(lam)
    for k in range(lam):
        assert np.allclose(dense(enc.gamma_x[k]) @ z, ket(enc.mu[k]))
        assert np.allclose(-1j * dense(enc.gamma_y[k]) @ z, ket(enc.mu[k]))


@settings(max_examples=40, deadline=None)
@given(st.integers(1, 127))
def test_tree_flip_update_and_weight(lam):
    enc = binary_tree_encoding(lam)
    n = enc.n_qubits
    for k in range(1, lam + 1):
        xs = PauliString.from_sparse(n, {q: "X" for q in enc.update_sets[k - 1]})
        for j in range(1, lam + 1):
            zs = PauliString.from_sparse(n, {q: "Z" for q in enc.flip_sets[j - 1]})
            assert (len(xs.support() & zs.support()) % 2 == 1) == (j == k)
    for j in range(1, lam + 1):
        for k in enc.children(j):
            for fam in (enc.gamma_x, enc.gamma_y):
                prod = multiply(fam[j - 1], fam[k - 1])
                assert prod.support() <= enc.flip_sets[j - 1] | enc.flip_sets[k - 1]
                assert prod.weight <= 5


def test_json_round_trip():
    for enc in (unary_encoding(4), binary_tree_encoding(6)):
        back = Encoding.loads(enc.dumps())
        assert back == enc
    assert binary_tree_encoding(6).kind == BINARY_TREE
    assert unary_encoding(2).kind == UNARY


def test_unknown_kind():
    with pytest.raises(EncodingError):
        make_encoding("fenwick", 3)
