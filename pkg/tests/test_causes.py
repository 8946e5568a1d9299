import numpy as np
import pytest
from hypothesis import given, settings
from hypothesis import strategies as st

from chcause import scenarios as sc
from chcause.causes import (
    Classification,
    Event,
    classify_cause,
    compare_intervention,
    conditional_probability,
    event,
    event_probability,
    find_causes,
    find_common_causes,
    joint_probability,
)
from chcause.errors import FrameworkMismatch, InconsistentFamily, NotInFramework, UndefinedConditional
from chcause.histories import HistoryFamily, check_consistency
from chcause.projectors import Projector, validate_pdi

from helpers import classical_oracle, random_classical_family


def test_event_labels_and_projectors():
    fam = sc.build_charlie_model()
    e = event(fam, "t2", "Alice=0", "Alice=1")
    assert str(e) == "t2:Alice=0|Alice=1"
    assert np.allclose(e.projector.matrix, np.eye(8))
    assert str(Event(1, e.projector)) == "t1:<projector>"


def test_probabilities_and_conditionals():
    fam = sc.build_beamsplitter(sc.BeamsplitterParams(0.6, 0.8j))
    a, da = event(fam, "t1", "a"), event(fam, "t2", "Da")
    assert abs(joint_probability(fam, a, da) - 0.36) <= 1e-12
    assert abs(conditional_probability(fam, da, a) - 1) <= 1e-12
    dstar = event(fam, "t2", "D*a")
    with pytest.raises(UndefinedConditional):
        conditional_probability(fam, da, dstar)


def test_reverse_order_and_undefined_classifications():
    fam = sc.build_beamsplitter(sc.BeamsplitterParams(0.6, 0.8j))
    a, da, dstar = event(fam, "t1", "a"), event(fam, "t2", "Da"), event(fam, "t2", "D*a")
    assert classify_cause(fam, da, a).classification is Classification.REVERSE_ORDER
    v = classify_cause(fam, dstar, da)
    assert v.classification is Classification.UNDEFINED_CONDITIONAL
    assert v.p_g_given_f is None
    assert classify_cause(fam, event(fam, "t1", "b"), da).classification is Classification.UNSUPPORTED


def test_events_must_belong_to_the_family_framework():
    fam = sc.build_mach_zehnder(sc.MachZehnderParams(bs2_present=False), "which_path")
    both = Projector(fam.pdi_at("t1").member("a").matrix + fam.pdi_at("t1").member("b").matrix)
    assert abs(event_probability(fam, Event(1, both, "a or b")) - 1) <= 1e-12
    only_dc = fam.pdi_at("t2").member("Dc").matrix
    coarse = fam.coarsened("t1")
    with pytest.raises(NotInFramework):
        event_probability(coarse, Event(1, Projector(fam.pdi_at("t1").member("a").matrix), "a"))
    assert event_probability(coarse, Event(2, Projector(only_dc), "Dc")) == pytest.approx(0.5)


def test_probabilities_refused_on_inconsistent_family():
    fam = sc.build_mach_zehnder(sc.MachZehnderParams(), "which_path")
    with pytest.raises(InconsistentFamily):
        event_probability(fam, event(fam, "t2", "Dc"))


def test_find_causes_is_minimal_and_skips_identity():
    fam = sc.build_mach_zehnder(sc.MachZehnderParams(bs2_present=False), "which_path")
    causes = find_causes(fam, event(fam, "t2", "Dc"))
    assert [str(v.f) for v in causes] == ["t1:a"]
    everything = event(fam, "t2", "Dc", "Dd", "absorbed", "in_flight")
    assert find_causes(fam, everything) == []


def test_find_causes_returns_union_when_no_single_member_suffices():
    # three basis states; states 0 and 1 both lead to 2
    d = 3
    psi = np.array([0.6, 0.8, 0])
    u = np.array([[0, 0, 1], [0, 1, 0], [1, 0, 0]], dtype=complex)
    fine = validate_pdi([np.diag(np.eye(d)[j]) for j in range(d)], labels=["0", "1", "2"])
    fam = HistoryFamily(psi, ("t0", "t1", "t2"), (np.eye(d), u), (fine, fine))
    g = event(fam, "t2", "2", "1")
    got = [str(v.f) for v in find_causes(fam, g)]
    assert got == ["t1:0|1"]


def test_common_cause_requires_earlier_time():
    fam = sc.build_charlie_model()
    same_time = find_common_causes(fam, event(fam, "t1", "Charlie=1"), event(fam, "t3", "Bob=1"))
    assert same_time.candidates == ()


def test_compare_intervention_checks_frameworks():
    base = sc.build_mach_zehnder(sc.MachZehnderParams(bs2_present=False), "which_path")
    other = sc.build_mach_zehnder(sc.MachZehnderParams(bs2_present=False), "superposition")
    with pytest.raises(FrameworkMismatch):
        compare_intervention(base, other, event(base, "t1", "a"), event(base, "t2", "Dc"))
    blocked = sc.build_mach_zehnder(sc.MachZehnderParams(bs2_present=False, block_a=True), "which_path")
    cmp = compare_intervention(base, blocked, event(base, "t1", "a"), event(base, "t2", "Dc"))
    assert cmp.changed and cmp.base_conditional == pytest.approx(1) and cmp.intervened_conditional == pytest.approx(0)
    cmp = compare_intervention(base, blocked, event(base, "t1", "b"), event(base, "t2", "Dd"))
    assert not cmp.changed


def test_threshold_and_eps_flow_through():
    fam = sc.build_spin_half(sc.SpinDirection(0.02, 0.0), sc.Z_AXIS, "along_prep")
    f, g = event(fam, "t1", fam.pdi_at("t1").labels[0]), event(fam, "t2", "+")
    v = classify_cause(fam, f, g)
    assert v.classification is Classification.UNSUPPORTED
    assert classify_cause(fam, f, g, threshold=0.99).classification is Classification.CAUSE


@settings(max_examples=40, deadline=None)
@given(st.integers(0, 2**32 - 1))
def test_event_probabilities_are_oracle_marginals(seed):
    fam, weights, perms, owners = random_classical_family(np.random.default_rng(seed))
    oracle = classical_oracle(weights, perms, owners)
    for k in range(1, fam.n_times + 1):
        for j, label in enumerate(fam.pdi_at(k).labels):
            expect = sum(p for y, p in oracle.items() if y[k - 1] == j)
            assert abs(event_probability(fam, event(fam, k, label)) - expect) <= 1e-9


@settings(max_examples=30, deadline=None)
@given(st.integers(0, 2**32 - 1))
def test_every_reported_cause_meets_the_criterion(seed):
    fam, *_ = random_classical_family(np.random.default_rng(seed))
    rep = check_consistency(fam)
    last = fam.n_times
    for label in fam.pdi_at(last).labels:
        g = event(fam, last, label)
        if event_probability(fam, g) <= 1e-9:
            continue
        for v in find_causes(fam, g, threshold=0.999):
            assert v.f.time_index < last
            assert v.p_g_given_f >= 0.999 and v.p_f_given_g >= 0.999
    assert rep.consistent
