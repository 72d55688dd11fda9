"""Channel representation tests: constructors, Choi round trips, EB detection."""

import numpy as np
import pytest

from entcost.channels import (
    KrausChannel,
    SchemaError,
    amplitude_damping,
    apply,
    channel_distance_heuristic,
    channel_from_json,
    choi,
    choi_distance,
    dephasing,
    depolarizing,
    identity,
    is_entanglement_breaking_qubit,
    kraus_from_choi,
    random_channel,
)
from entcost.linalg import (
    DensityMatrix,
    ValidationError,
    partial_trace,
    random_density_matrix,
    trace_distance,
)

BELL_PLUS = np.array([1, 0, 0, 1], dtype=complex) / np.sqrt(2)
BELL_MINUS = np.array([1, 0, 0, -1], dtype=complex) / np.sqrt(2)
BELL_BASIS = np.array([
    [1, 0, 0, 1],
    [1, 0, 0, -1],
    [0, 1, 1, 0],
    [0, 1, -1, 0],
], dtype=complex).T / np.sqrt(2)


def plus_state():
    v = np.array([1, 1], dtype=complex) / np.sqrt(2)
    return DensityMatrix((2,), np.outer(v, v.conj()))


def test_apply_identity():
    rng = np.random.default_rng(0)
    rho = random_density_matrix((2,), 2, rng)
    out = apply(identity(2), rho)
    np.testing.assert_allclose(out.mat, rho.mat, atol=1e-12)


def test_apply_full_dephasing_kills_coherence():
    out = apply(dephasing(0.5), plus_state())
    np.testing.assert_allclose(out.mat, np.eye(2) / 2, atol=1e-12)


def test_apply_damping_resets_excited_state():
    one = DensityMatrix((2,), np.diag([0.0, 1.0]))
    out = apply(amplitude_damping(0.0), one)
    np.testing.assert_allclose(out.mat, np.diag([1.0, 0.0]), atol=1e-12)


def test_apply_preserves_trace_and_positivity():
    rng = np.random.default_rng(1)
    for _ in range(10):
        ch = random_channel(2, 2, int(rng.integers(1, 5)), rng)
        rho = random_density_matrix((2, 3), int(rng.integers(1, 7)), rng)
        out = apply(ch, rho)  # constructor revalidates PSD and trace
        assert abs(out.trace() - 1.0) < 1e-9
        assert np.linalg.eigvalsh(out.mat)[0] > -1e-9


def test_apply_dimension_mismatch():
    rng = np.random.default_rng(2)
    with pytest.raises(ValueError):
        apply(identity(2), random_density_matrix((3,), 2, rng))


def test_choi_identity_is_max_entangled():
    c = choi(identity(2))
    np.testing.assert_allclose(c.state.mat, np.outer(BELL_PLUS, BELL_PLUS),
                               atol=1e-12)


def test_choi_dephasing_is_bell_mixture():
    p = 0.3
    expected = (1 - p) * np.outer(BELL_PLUS, BELL_PLUS) \
        + p * np.outer(BELL_MINUS, BELL_MINUS)
    np.testing.assert_allclose(choi(dephasing(p)).state.mat, expected, atol=1e-12)


def test_choi_depolarizing_is_isotropic():
    r = 0.4
    expected = (1 - r) * np.outer(BELL_PLUS, BELL_PLUS) + r * np.eye(4) / 4
    np.testing.assert_allclose(choi(depolarizing(r)).state.mat, expected, atol=1e-12)


def test_choi_input_marginal_is_maximally_mixed():
    rng = np.random.default_rng(3)
    chans = [identity(2), dephasing(0.2), depolarizing(0.7), amplitude_damping(0.3),
             random_channel(3, 2, 3, rng)]
    for ch in chans:
        marg = partial_trace(choi(ch).state, keep=1)
        np.testing.assert_allclose(marg.mat, np.eye(ch.dim_in) / ch.dim_in,
                                   atol=1e-9)


def test_pauli_family_chois_are_bell_diagonal():
    for ch in (dephasing(0.3), depolarizing(0.6)):
        mat = choi(ch).state.mat
        in_bell = BELL_BASIS.conj().T @ mat @ BELL_BASIS
        off = in_bell - np.diag(np.diag(in_bell))
        assert np.max(np.abs(off)) < 1e-9


def test_kraus_from_choi_identity():
    ch = kraus_from_choi(choi(identity(2)))
    assert len(ch.kraus) == 1
    k = ch.kraus[0]
    np.testing.assert_allclose(np.abs(k), np.eye(2), atol=1e-9)


def test_kraus_from_choi_dephasing():
    ch = kraus_from_choi(choi(dephasing(0.3)))
    assert len(ch.kraus) == 2
    mags = sorted(np.max(np.abs(k)) for k in ch.kraus)
    np.testing.assert_allclose(mags, [np.sqrt(0.3), np.sqrt(0.7)], atol=1e-9)
    for k in ch.kraus:
        np.testing.assert_allclose(np.abs(k) / np.max(np.abs(k)), np.eye(2),
                                   atol=1e-9)


def test_kraus_choi_round_trip_random():
    rng = np.random.default_rng(5)
    for _ in range(8):
        ch = random_channel(int(rng.integers(2, 4)), int(rng.integers(2, 4)),
                            int(rng.integers(1, 5)), rng)
        c = choi(ch)
        back = choi(kraus_from_choi(c))
        assert choi_distance(c, back) < 1e-8
        assert len(kraus_from_choi(c).kraus) <= ch.dim_in * ch.dim_out


def test_dephasing_limits():
    assert choi_distance(choi(dephasing(0.0)), choi(identity(2))) < 1e-12
    c1 = choi(dephasing(1.0))
    np.testing.assert_allclose(c1.state.mat, np.outer(BELL_MINUS, BELL_MINUS),
                               atol=1e-12)


def test_depolarizing_limits():
    assert choi_distance(choi(depolarizing(0.0)), choi(identity(2))) < 1e-12
    np.testing.assert_allclose(choi(depolarizing(1.0)).state.mat, np.eye(4) / 4,
                               atol=1e-12)


def test_amplitude_damping_limits():
    assert choi_distance(choi(amplitude_damping(1.0)), choi(identity(2))) < 1e-12
    # full damping: Choi is an even mixture of |00> and |01>, manifestly separable
    expected = np.zeros((4, 4))
    expected[0, 0] = expected[1, 1] = 0.5
    np.testing.assert_allclose(choi(amplitude_damping(0.0)).state.mat, expected,
                               atol=1e-12)


def test_constructor_rejects_out_of_range():
    for ctor in (dephasing, depolarizing, amplitude_damping):
        with pytest.raises(ValueError):
            ctor(-0.1)
        with pytest.raises(ValueError):
            ctor(1.1)


def test_completeness_enforced():
    with pytest.raises(ValidationError):
        KrausChannel(2, 2, (np.eye(2) * 0.5,))


def test_entanglement_breaking_examples():
    assert is_entanglement_breaking_qubit(depolarizing(0.7)) is True
    assert is_entanglement_breaking_qubit(dephasing(0.3)) is False
    assert is_entanglement_breaking_qubit(identity(2)) is False
    assert is_entanglement_breaking_qubit(dephasing(0.5)) is True
    assert is_entanglement_breaking_qubit(amplitude_damping(0.0)) is True


def test_entanglement_breaking_needs_qubits():
    rng = np.random.default_rng(8)
    with pytest.raises(ValueError):
        is_entanglement_breaking_qubit(random_channel(3, 3, 2, rng))


def test_distance_heuristic_zero_on_equal():
    ch = dephasing(0.3)
    assert channel_distance_heuristic(ch, ch, restarts=2, seed=0) < 1e-9


def test_distance_heuristic_orthogonal_outputs():
    val = channel_distance_heuristic(identity(2), dephasing(1.0), restarts=4, seed=0)
    assert val == pytest.approx(2.0, abs=1e-7)
    assert val <= 2.0 + 1e-9


def test_distance_heuristic_monotone_in_restarts():
    a = random_channel(2, 2, 2, np.random.default_rng(11))
    b = random_channel(2, 2, 3, np.random.default_rng(12))
    vals = [channel_distance_heuristic(a, b, restarts=r, seed=4)
            for r in (1, 2, 4, 8)]
    assert all(v2 >= v1 - 1e-12 for v1, v2 in zip(vals, vals[1:]))


def test_channel_json_constructors():
    assert channel_from_json({"type": "identity", "d": 2}).dim_in == 2
    ch = channel_from_json({"type": "dephasing", "p": 0.3})
    assert choi_distance(choi(ch), choi(dephasing(0.3))) < 1e-12
    ch = channel_from_json({"type": "amplitude_damping", "r": 0.5})
    np.testing.assert_allclose(ch.kraus[0], np.diag([1.0, np.sqrt(0.5)]), atol=1e-12)
    np.testing.assert_allclose(ch.kraus[1], [[0, np.sqrt(0.5)], [0, 0]], atol=1e-12)


def test_channel_json_kraus_form():
    ch = channel_from_json({
        "type": "kraus", "dim_in": 2, "dim_out": 2,
        "ops": [[[1.0, 0.0], [0.0, 0.0], [0.0, 0.0], [1.0, 0.0]]],
    })
    assert trace_distance(choi(ch).state.mat, choi(identity(2)).state.mat) < 1e-12


def test_channel_json_schema_errors():
    for bad in (
        {"type": "mystery"},
        {"type": "dephasing"},
        {"type": "dephasing", "p": 1.5},
        {"type": "kraus", "dim_in": 2, "dim_out": 2, "ops": []},
        {"type": "kraus", "dim_in": 2, "dim_out": 2, "ops": [[[1, 0]]]},
        ["not", "a", "dict"],
    ):
        with pytest.raises(SchemaError):
            channel_from_json(bad)


def test_channel_json_completeness_error():
    half = [[0.5, 0.0], [0.0, 0.0], [0.0, 0.0], [0.0, 0.5]]
    with pytest.raises(ValidationError):
        channel_from_json({"type": "kraus", "dim_in": 2, "dim_out": 2, "ops": [half]})
