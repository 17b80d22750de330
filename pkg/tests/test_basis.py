import json

import numpy as np
import pytest

from qpdite import basis, channels
from qpdite.basis import ebl_product, ebl_single_qubit, get_basis, takagi_two_qubit, vectorized_rank

P0 = np.diag([1, 0]).astype(complex)


def test_ebl_counts_and_rank():
    s = ebl_single_qubit()
    assert len(s) == 16
    assert sum(e.trace_preserving for e in s) == 10
    assert vectorized_rank(s) == 16
    assert all(channels.classify(e.operation)[0] for e in s)


def test_ebl_pi_z_is_p0_projection():
    pz = next(e for e in ebl_single_qubit() if e.label == "[pi_Z]")
    assert np.allclose(channels.choi_of(pz.operation), channels.choi_of(channels.from_matrix(P0)))
    assert pz.operation.kind == "projective"


def test_ebl_projective_effects_are_projectors():
    for e in ebl_single_qubit():
        if not e.trace_preserving:
            eff = e.operation.effect
            assert np.allclose(eff @ eff, eff)
            assert np.trace(eff).real == pytest.approx(1)


def test_ebl_product_counts_and_rank():
    s = ebl_product(2)
    assert len(s) == 256
    assert sum(e.trace_preserving for e in s) == 100
    assert vectorized_rank(s) == 256


def test_takagi_structure():
    s = takagi_two_qubit()
    assert len(s) == 241
    assert s.labels[0] == "B_1" and s.labels[-1] == "B_241"
    assert all(channels.classify(e.operation)[0] for e in s)
    # 13x13 local products carry 10x10 TP pairs; the 72 entangling unitaries are TP
    assert sum(e.trace_preserving for e in s) == 100 + 72
    assert all(e.operation.kind == "unitary" for e in s.elements[169:])
    assert vectorized_rank(s) == 193


def test_takagi_contains_cnot():
    cx = takagi_two_qubit()[169].operation.matrix()
    assert np.allclose(cx, basis.CX)


def test_takagi_conjugates_are_unitary():
    for e in takagi_two_qubit().elements[169:]:
        u = e.operation.matrix()
        assert np.allclose(u.conj().T @ u, np.eye(4), atol=1e-12)


def test_json_round_trip():
    s = ebl_single_qubit()
    back = basis.basis_from_dict(json.loads(s.to_json()))
    assert back.labels == s.labels
    assert [e.trace_preserving for e in back] == [e.trace_preserving for e in s]
    assert np.allclose(back.choi_stack, s.choi_stack)


def test_noise_identity_leaves_set_unchanged():
    s = ebl_single_qubit()
    same = basis.apply_noise(s, channels.identity(1))
    assert np.allclose(same.choi_stack, s.choi_stack)


def test_depolarized_choi_matches_oracle():
    s = ebl_single_qubit()
    p = 0.1
    noisy = basis.noisy_basis(s, p)
    for e, ne in zip(s, noisy):
        c = channels.choi_of(e.operation)
        # output marginal = partial trace over the output factor, placed on the input side
        marg = channels.partial_trace_output(c)
        oracle = (1 - p) * c + p * np.kron(np.eye(2) / 2, marg)
        assert np.allclose(channels.choi_of(ne.operation), oracle, atol=1e-12)
        assert ne.trace_preserving == e.trace_preserving


def test_apply_noise_rejects_non_cptp():
    with pytest.raises(ValueError):
        basis.apply_noise(ebl_single_qubit(), channels.from_matrix(P0))


def test_get_basis_names():
    assert get_basis("ebl").name == "ebl"
    assert len(get_basis("ebl-product")) == 256
    assert len(get_basis("takagi")) == 241
    assert len(get_basis("noisy:0.01")) == 256
    with pytest.raises(ValueError):
        get_basis("nope")
    with pytest.raises(ValueError):
        get_basis("noisy:2")


def test_basis_validation():
    e = ebl_single_qubit()[0]
    with pytest.raises(ValueError):
        basis.BasisSet("dup", (e, basis.BasisElement(1, e.label, e.operation)), 1)
