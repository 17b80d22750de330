import json

import numpy as np
import pytest
from hypothesis import given, strategies as st
from scipy.linalg import expm

from qpdite import channels, ite
from qpdite.ite import HEISENBERG_TERM
from qpdite.linalg import I2, Z, kron

SHIFTED = HEISENBERG_TERM + np.eye(4)


def _dense_trotter(H, beta, r):
    """Independent oracle: scipy expm of each embedded term, step 0 acting first."""
    ops = [expm(-beta / r * channels.expand_operator(t.h, t.support, H.n)) for t in H.terms]
    out = np.eye(2**H.n)
    for _ in range(r):
        for o in ops:
            out = o @ out
    return out


def test_ite_map_examples():
    assert np.allclose(ite.ite_map(SHIFTED, 0).matrix(), np.eye(4))
    assert ite.ite_map(SHIFTED, 0).trace_preserving
    k = ite.ite_map(2.5 * np.eye(2), 0.3).matrix()
    assert np.allclose(k, np.exp(-0.75) * np.eye(2))
    op = ite.ite_map(SHIFTED, 0.05)
    assert not op.trace_preserving
    rho = channels.density(channels.basis_state("01"))
    tr = np.trace(channels.apply(op, rho)).real
    assert tr == pytest.approx(expm(-0.1 * SHIFTED)[1, 1].real, rel=1e-12)
    with pytest.raises(ValueError):
        ite.ite_map(Z, -0.1)


def test_single_term_plan_is_exact():
    H = ite.heisenberg_2q(True)
    for r in (1, 3):
        assert np.allclose(ite.trotter_plan(H, 0.4, r).product(), expm(-0.4 * H.dense()), atol=1e-12)


@pytest.mark.parametrize("periodic", [False, True])
def test_plan_product_matches_oracle(periodic):
    H = ite.heisenberg_chain_1d(3, periodic=periodic)
    for r in (1, 2, 4):
        plan = ite.trotter_plan(H, 0.2, r)
        assert len(plan) == r * H.L
        assert np.allclose(plan.product(), _dense_trotter(H, 0.2, r), atol=1e-12)
        assert [s.term_index for s in plan.steps] == list(range(H.L)) * r


def test_trotter_error_decreases():
    H = ite.heisenberg_chain_1d(3)
    errs = [ite.trotter_error(H, 0.1, r) for r in (1, 2, 4, 8)]
    assert all(a > b for a, b in zip(errs, errs[1:]))
    for a, b in zip(errs, errs[1:]):
        assert 1.6 <= a / b <= 2.4


def test_shift_to_psd():
    H = ite.shift_to_psd(ite.heisenberg_2q())
    assert np.allclose(np.linalg.eigvalsh(H.dense()), [0, 0, 0, 4], atol=1e-12)
    again = ite.shift_to_psd(H)
    assert np.allclose(again.dense(), H.dense())
    chain = ite.shift_to_psd(ite.heisenberg_chain_1d(4))
    # the ferromagnetic chain is frustration free: all-up is a zero-energy state
    assert chain.ground_energy() == pytest.approx(0, abs=1e-10)


def test_choose_r():
    assert ite.choose_r(0, 3, 0.1) == 1
    assert ite.choose_r(1, 3, 0.1) == 90
    assert ite.choose_r(1, 3, 0.2) == 45
    with pytest.raises(ValueError):
        ite.choose_r(1, 3, 0)


def test_from_spec_round_trip(tmp_path):
    doc = {
        "n": 2,
        "terms": [{"qubits": [0, 1], "pauli_sum": [{"coeff": -1, "pauli_string": s} for s in ("XX", "YY", "ZZ")]}],
        "shift": "auto",
    }
    H = ite.from_spec(doc)
    assert np.allclose(H.dense(), SHIFTED)
    p = tmp_path / "h.json"
    p.write_text(json.dumps(doc))
    assert np.allclose(ite.named_hamiltonian(str(p)).dense(), SHIFTED)
    doc["shift"] = 2.0
    assert np.allclose(ite.from_spec(json.dumps(doc)).dense(), HEISENBERG_TERM + 2 * np.eye(4))


def test_validation():
    with pytest.raises(ValueError):
        ite.LocalHamiltonian(2, ())
    with pytest.raises(ValueError):
        ite.LocalHamiltonian(2, (ite.LocalTerm((0, 2), SHIFTED),))
    with pytest.raises(ValueError):
        ite.LocalHamiltonian(2, (ite.LocalTerm((0,), SHIFTED),))
    with pytest.raises(ValueError):
        ite.trotter_plan(ite.heisenberg_2q(), 0.1, 0)
    with pytest.raises(ValueError):
        ite.named_hamiltonian("chain")


def test_translation_invariance():
    assert ite.heisenberg_chain_1d(5, periodic=True).is_translation_invariant()
    H = ite.LocalHamiltonian(2, (ite.LocalTerm((0,), Z), ite.LocalTerm((1,), 2 * Z)))
    assert not H.is_translation_invariant()
    assert np.allclose(H.dense(), kron(Z, I2) + 2 * kron(I2, Z))


@given(st.floats(0, 1), st.integers(1, 6))
def test_plan_steps_are_cp_contractions(beta, r):
    plan = ite.trotter_plan(ite.shift_to_psd(ite.heisenberg_chain_1d(3)), beta, r)
    for s in plan.steps:
        assert channels.classify(s.operation)[0]
        assert np.linalg.norm(s.operation.matrix(), 2) <= 1 + 1e-12
