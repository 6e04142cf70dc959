"""Depolarizing evolution, readout error, calibration, mitigation."""
import numpy as np
import pytest

from qfridge import qcore
from qfridge.circuits import (
    Circuit,
    LINE3,
    build_vstar_circuit,
    cx,
    rz,
    sx,
    unitary_of_circuit,
    x,
)
from qfridge.noise import (
    ConfusionMatrix,
    NoiseModel,
    apply_readout_error,
    calibrate,
    evolve_noisy,
    exact_confusion,
    mitigate,
    readout_matrix,
)

from helpers import random_density


def _random_circuit(rng, n_wires=3, depth=8):
    gates = []
    wires = list(range(n_wires))
    for _ in range(depth):
        kind = rng.integers(0, 4)
        w = int(rng.integers(0, n_wires))
        if kind == 0:
            gates.append(rz(w, float(rng.uniform(-np.pi, np.pi))))
        elif kind == 1:
            gates.append(x(w))
        elif kind == 2:
            gates.append(sx(w))
        else:
            a, b = rng.choice(wires, size=2, replace=False)
            gates.append(cx(int(a), int(b)))
    return Circuit(n_wires, gates)


def test_noise_model_validation():
    with pytest.raises(ValueError):
        NoiseModel(p1=1.5)
    with pytest.raises(ValueError):
        NoiseModel(eps01=(0.1,), eps10=(0.1, 0.1))
    nm = NoiseModel.uniform(0.01, 0.02, 0.03, 0.04)
    assert nm.eps01 == (0.03, 0.03, 0.03)
    assert not nm.is_gate_noiseless()
    assert NoiseModel().is_gate_noiseless()


def test_flip_matrix():
    nm = NoiseModel(eps01=(0.1, 0.0, 0.0), eps10=(0.2, 0.0, 0.0))
    f = nm.flip_matrix(0)
    assert np.allclose(f, [[0.9, 0.2], [0.1, 0.8]])
    assert np.allclose(f.sum(axis=0), 1.0)


def test_noiseless_evolution_matches_unitary():
    rng = np.random.default_rng(21)
    for c in (build_vstar_circuit(), _random_circuit(rng)):
        rho = random_density(8, rng)
        got = evolve_noisy(c, rho, NoiseModel())
        want = qcore.apply_unitary(unitary_of_circuit(c), rho)
        assert np.max(np.abs(got - want)) < 1e-12


def test_noisy_evolution_preserves_density_structure():
    rng = np.random.default_rng(22)
    nm = NoiseModel.uniform(p1=0.02, p2=0.05)
    for _ in range(100):
        c = _random_circuit(rng, depth=6)
        rho = random_density(8, rng)
        out = evolve_noisy(c, rho, nm)
        assert abs(np.trace(out).real - 1.0) < 1e-10
        assert np.max(np.abs(out - out.conj().T)) < 1e-10
        assert np.min(np.linalg.eigvalsh(out)) > -1e-10


def test_depolarizing_is_unital():
    rng = np.random.default_rng(23)
    nm = NoiseModel.uniform(p1=0.1, p2=0.3)
    mixed = np.eye(8, dtype=complex) / 8
    out = evolve_noisy(_random_circuit(rng), mixed, nm)
    assert np.max(np.abs(out - mixed)) < 1e-12


def test_full_depolarization_of_one_wire():
    # x on the cold wire followed by p1 = 1 wipes the cold bit entirely
    rho = qcore.pure_density(qcore.basis_state(0))
    out = evolve_noisy(Circuit(3, [x(1)]), rho, NoiseModel(p1=1.0))
    p = qcore.born_probabilities(out)
    assert np.allclose(p, [0.5, 0.5, 0, 0, 0, 0, 0, 0])


def test_evolve_noisy_dimension_check():
    with pytest.raises(ValueError):
        evolve_noisy(build_vstar_circuit(), np.eye(4, dtype=complex) / 4, NoiseModel())


# ---------------------------------------------------------------------------
# readout

def test_readout_zero_noise_is_identity():
    p = np.full(8, 0.125)
    assert np.array_equal(apply_readout_error(p, NoiseModel()), p)


@pytest.mark.parametrize(
    "qubit,flipped_index",
    [(0, 4), (1, 1), (2, 2)],  # q0 flips bit i, q1 flips bit k, q2 flips bit j
)
def test_readout_qubit_to_logical_bit_mapping(qubit, flipped_index):
    eps = [0.0, 0.0, 0.0]
    eps[qubit] = 0.25
    nm = NoiseModel(eps01=tuple(eps), eps10=(0.0, 0.0, 0.0))
    out = apply_readout_error(np.eye(8)[0], nm)
    assert abs(out[0] - 0.75) < 1e-15
    assert abs(out[flipped_index] - 0.25) < 1e-15
    assert abs(out.sum() - 1.0) < 1e-12


def test_readout_matrix_is_stochastic():
    nm = NoiseModel.uniform(eps01=0.03, eps10=0.07)
    m = readout_matrix(nm)
    assert m.shape == (8, 8)
    assert np.allclose(m.sum(axis=0), 1.0)
    assert np.min(m) >= 0.0


# ---------------------------------------------------------------------------
# calibration and mitigation

def test_confusion_matrix_validation():
    ConfusionMatrix(np.eye(8))
    with pytest.raises(ValueError):
        ConfusionMatrix(np.ones((8, 8)))
    with pytest.raises(ValueError):
        ConfusionMatrix(-np.eye(4))


def test_calibrate_zero_noise_is_identity():
    conf = calibrate(NoiseModel(), 2048, 0)
    assert np.array_equal(conf.entries, np.eye(8))


def test_calibrate_is_deterministic_and_close_to_exact():
    nm = NoiseModel.uniform(eps01=0.1, eps10=0.1)
    a = calibrate(nm, 8192, 5)
    b = calibrate(nm, 8192, 5)
    assert np.array_equal(a.entries, b.entries)
    exact = exact_confusion(nm).entries
    # 5 sigma per-entry bound at 8192 shots
    assert np.max(np.abs(a.entries - exact)) < 5 * 0.5 / np.sqrt(8192)


def test_calibrate_rejects_zero_shots():
    with pytest.raises(ValueError):
        calibrate(NoiseModel(), 0, 0)


def test_mitigate_exact_roundtrip():
    nm = NoiseModel.uniform(eps01=0.05, eps10=0.02)
    rng = np.random.default_rng(30)
    p = rng.dirichlet(np.ones(8))
    raw = apply_readout_error(p, nm)
    rec = mitigate(raw, exact_confusion(nm))
    assert np.max(np.abs(rec - p)) < 1e-10


def test_mitigate_identity_is_noop():
    p = np.array([0.5, 0.25, 0.25, 0.0])
    out = mitigate(p, ConfusionMatrix(np.eye(4)))
    assert np.max(np.abs(out - p)) < 1e-12


def test_mitigate_clips_to_simplex():
    # a raw distribution outside the image of the confusion matrix
    conf = exact_confusion(NoiseModel.uniform(eps01=0.2, eps10=0.2))
    out = mitigate(np.eye(8)[0], conf)
    assert np.min(out) >= 0.0
    assert abs(out.sum() - 1.0) < 1e-12


def test_mitigate_rejects_singular_matrix():
    conf = exact_confusion(NoiseModel.uniform(eps01=0.5, eps10=0.5))
    with pytest.raises(ValueError, match="singular"):
        mitigate(np.full(8, 0.125), conf)


def test_mitigate_dimension_mismatch():
    with pytest.raises(ValueError, match="mismatch"):
        mitigate(np.array([0.5, 0.5]), ConfusionMatrix(np.eye(8)))
