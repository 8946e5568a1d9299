import math

import numpy as np
import pytest
from hypothesis import given, settings
from hypothesis import strategies as st

from chcause import scenarios as sc
from chcause.causes import event, event_probability, joint_probability
from chcause.histories import check_consistency
from chcause.numerics import is_unitary

from helpers import spinor

angles = st.tuples(st.floats(0, math.pi), st.floats(0, 2 * math.pi))


@settings(max_examples=60, deadline=None)
@given(angles)
def test_spin_projectors_match_half_angle_kets(ang):
    w = sc.SpinDirection(*ang)
    for sign in (1, -1):
        k = spinor(*ang, sign)
        assert np.allclose(w.projector(sign).matrix, np.outer(k, k.conj()), atol=1e-12)
    assert np.allclose(w.sigma @ w.ket(+1), w.ket(+1))


@settings(max_examples=60, deadline=None)
@given(angles)
def test_rotation_to_z_carries_axis_onto_z(ang):
    w = sc.SpinDirection(*ang)
    r = sc.rotation_to_z(w)
    assert is_unitary(r)
    out = r @ w.ket(+1)
    assert abs(abs(out[0]) - 1) <= 1e-12


def test_axes_and_angles():
    assert sc.X_AXIS.angle_to(sc.Z_AXIS) == pytest.approx(math.pi / 2)
    assert sc.Z_AXIS.angle_to(sc.Z_AXIS) == pytest.approx(0)
    assert np.allclose(sc.Y_AXIS.vector, [0, 1, 0], atol=1e-15)
    assert sc.X_AXIS.pdi().labels == ("x+", "x-")
    assert sc.SpinDirection(1.0, 0.5).tag == "(1,0.5)"


def test_rotation_unitary_about_z_is_diagonal():
    u = sc.rotation_unitary(sc.Z_AXIS, math.pi / 2)
    assert np.allclose(u, np.diag([np.exp(-1j * math.pi / 4), np.exp(1j * math.pi / 4)]))


def test_pointer_model():
    pm = sc.PointerModel(2)
    assert pm.dim == 3
    assert np.array_equal(pm.ready(), [1, 0, 0])
    assert np.allclose(pm.shift(1) @ pm.ready(), [0, 0, 1])
    assert is_unitary(pm.coupling([sc.Z_AXIS.projector(1), sc.Z_AXIS.projector(-1)]))
    assert pm.pdi(["+", "-"], 2).labels == ("ready", "+", "-")


def test_build_measurement_reproduces_born_rule():
    pdi = sc.X_AXIS.pdi()
    fam = sc.build_measurement(pdi, sc.Z_AXIS.ket(+1))
    probs = [event_probability(fam, event(fam, fam.n_times, lbl)) for lbl in fam.pdi_at(fam.n_times).labels]
    assert sorted(round(p, 12) for p in probs) == [0.0, 0.5, 0.5]


def test_beamsplitter_parameter_validation():
    with pytest.raises(ValueError):
        sc.BeamsplitterParams(1.0, 1.0)
    with pytest.raises(ValueError):
        sc.build_beamsplitter(sc.BeamsplitterParams(0.6, 0.8), block_a=True, mirror_to_Dstar=True)


def test_mach_zehnder_superposition_framework_is_consistent_with_bs2():
    fam = sc.build_mach_zehnder(sc.MachZehnderParams(), "superposition")
    rep = check_consistency(fam)
    assert rep.consistent
    assert event_probability(fam, event(fam, "t1", "a+b")) == pytest.approx(1)
    with pytest.raises(ValueError):
        sc.build_mach_zehnder(sc.MachZehnderParams(), "both")


def test_mach_zehnder_blocked_arm_removes_interference():
    fam = sc.build_mach_zehnder(sc.MachZehnderParams(block_b=True))
    assert event_probability(fam, event(fam, "t2", "Dc")) == pytest.approx(0.25)
    assert event_probability(fam, event(fam, "t2", "Dd")) == pytest.approx(0.25)
    assert event_probability(fam, event(fam, "t2", "absorbed")) == pytest.approx(0.5)


def test_spin_half_rejects_unknown_framework():
    with pytest.raises(ValueError):
        sc.build_spin_half(sc.X_AXIS, sc.Z_AXIS, "sideways")


@settings(max_examples=25, deadline=None)
@given(angles, angles)
def test_spin_half_outcome_follows_cosine_law(prep, meas):
    p, m = sc.SpinDirection(*prep), sc.SpinDirection(*meas)
    fam = sc.build_spin_half(p, m)
    expect = (1 + math.cos(p.angle_to(m))) / 2
    assert abs(event_probability(fam, event(fam, "t2", "+")) - expect) <= 1e-9


@settings(max_examples=15, deadline=None)
@given(angles, angles, angles, st.floats(0, 2 * math.pi))
def test_eprb_bob_rotation_equals_measuring_rotated_axis(a, b, axis, angle):
    alice, bob, ax = sc.SpinDirection(*a), sc.SpinDirection(*b), sc.SpinDirection(*axis)
    fam = sc.build_eprb(alice, bob, (ax, angle))
    r = sc.rotation_unitary(ax, angle)
    pulled = r.conj().T @ bob.sigma @ r
    paulis = [sc.PAULI_X, sc.PAULI_Y, sc.PAULI_Z]
    bvec = np.array([0.5 * np.trace(s @ pulled).real for s in paulis])
    assert abs(sc.eprb_correlation(fam) + float(alice.vector @ bvec)) <= 1e-9


def test_eprb_spin_events_and_labels():
    fam = sc.build_eprb(sc.Z_AXIS, sc.X_AXIS)
    assert fam.dim == 36
    assert fam.pdi_at("t3").labels[4] == "A=+,B=+"
    up = sc.eprb_spin_event(fam, "t1", alice_sign="+")
    assert event_probability(fam, up) == pytest.approx(0.5)
    assert str(sc.eprb_pointer_event(fam)) == "t3:I"


def test_charlie_models():
    base = sc.build_charlie_model()
    flipped = sc.build_charlie_model(flip_bob=True)
    same = event(base, "t2", "Alice=1"), event(base, "t3", "Bob=1")
    assert joint_probability(base, *same) == pytest.approx(0.5)
    assert joint_probability(flipped, *same) == pytest.approx(0.0)
    assert check_consistency(flipped).consistent
