import numpy as np
import pytest
from hypothesis import given, settings
from hypothesis import strategies as st

from chcause.errors import (
    CombinatorialLimit,
    DimensionError,
    IncompletePDI,
    MeaninglessConjunction,
    NonOrthogonal,
    NotAProjector,
    NotInFramework,
    NotNormalized,
)
from chcause.projectors import (
    Framework,
    Projector,
    commutes,
    conjunction,
    framework_contains,
    generate_framework,
    identity_projector,
    incompatible,
    is_projector,
    member_subset,
    projector_from_ket,
    require_member_subset,
    validate_pdi,
)

from helpers import random_pdi, random_unitary

Z_UP = np.diag([1.0, 0.0])
Z_DOWN = np.diag([0.0, 1.0])
X_UP = np.full((2, 2), 0.5)


def test_projector_is_read_only_and_validated():
    p = Projector(Z_UP)
    with pytest.raises(ValueError):
        p.matrix[0, 0] = 0
    with pytest.raises(NotAProjector):
        Projector(np.array([[1, 1], [0, 0]]))
    with pytest.raises(DimensionError):
        Projector(np.ones((2, 3)))


def test_projector_rank_complement_and_repr():
    p = Projector(Z_UP)
    assert p.rank == 1
    assert np.allclose(p.complement().matrix, Z_DOWN)
    assert repr(p) == "Projector(dim=2, rank=1)"
    assert identity_projector(3).rank == 3


def test_projector_from_ket_requires_normalization():
    with pytest.raises(NotNormalized):
        projector_from_ket([1, 1])
    p = projector_from_ket(np.array([1, 1j]) / np.sqrt(2))
    assert is_projector(p.matrix)


def test_conjunction_of_commuting_and_noncommuting():
    assert conjunction(Projector(Z_UP), Projector(np.eye(2))).rank == 1
    with pytest.raises(MeaninglessConjunction):
        conjunction(Projector(Z_UP), Projector(X_UP))


def test_validate_pdi_order_of_checks():
    with pytest.raises(NotAProjector):
        validate_pdi([np.array([[1, 1], [0, 0]]), Z_DOWN])
    with pytest.raises(NonOrthogonal):
        validate_pdi([Z_UP, X_UP, Z_DOWN])
    with pytest.raises(IncompletePDI):
        validate_pdi([Z_UP])
    with pytest.raises(IncompletePDI):
        validate_pdi([])
    with pytest.raises(DimensionError):
        validate_pdi([Z_UP, np.eye(3)])
    with pytest.raises(ValueError):
        validate_pdi([Z_UP, Z_DOWN], labels=["a", "a"])


def test_pdi_labels_and_sums():
    pdi = validate_pdi([Z_UP, Z_DOWN], labels=["up", "down"])
    assert pdi.index("down") == 1
    assert pdi.member("up").rank == 1
    assert np.allclose(pdi.sum_of([0, 1]).matrix, np.eye(2))
    with pytest.raises(KeyError):
        pdi.index("sideways")


def test_generate_framework_from_commuting_projectors():
    a = Projector(np.diag([1.0, 1.0, 0.0, 0.0]))
    b = Projector(np.diag([1.0, 0.0, 1.0, 0.0]))
    f = generate_framework([a, b], names=["A", "B"])
    assert f.pdi.labels == ("A&B", "A&~B", "~A&B", "~A&~B")
    # a generator implied by the others produces empty products, which are dropped
    f2 = generate_framework([a, a.complement()], names=["A", "notA"])
    assert len(f2.pdi) == 2


def test_generate_framework_refuses_noncommuting():
    with pytest.raises(MeaninglessConjunction):
        generate_framework([Projector(Z_UP), Projector(X_UP)])
    with pytest.raises(CombinatorialLimit):
        generate_framework([identity_projector(2)] * 17)


def test_member_subset_and_errors():
    f = Framework(validate_pdi([np.diag([1.0, 0, 0]), np.diag([0, 1.0, 0]), np.diag([0, 0, 1.0])]))
    assert member_subset(f, Projector(np.diag([1.0, 0, 1.0]))) == (0, 2)
    assert member_subset(f, Projector(np.zeros((3, 3)))) == ()
    half = np.zeros((3, 3))
    half[:2, :2] = 0.5
    assert not framework_contains(f, Projector(half))
    with pytest.raises(MeaninglessConjunction):
        require_member_subset(f, Projector(half))
    coarse = Framework(validate_pdi([np.diag([1.0, 1.0, 0]), np.diag([0, 0, 1.0])]))
    with pytest.raises(NotInFramework):
        require_member_subset(coarse, Projector(np.diag([1.0, 0, 0])))


def test_incompatible_frameworks():
    z = Framework(validate_pdi([Z_UP, Z_DOWN]))
    x = Framework(validate_pdi([X_UP, np.eye(2) - X_UP]))
    assert incompatible(z, x)
    assert not incompatible(z, z)


@settings(max_examples=60, deadline=None)
@given(st.integers(1, 6), st.integers(0, 2**32 - 1))
def test_random_pdis_satisfy_axioms(d, seed):
    pdi = random_pdi(d, np.random.default_rng(seed))
    total = sum(p.matrix for p in pdi.members)
    assert np.max(np.abs(total - np.eye(d))) <= 1e-9
    for j, p in enumerate(pdi.members):
        assert is_projector(p.matrix)
        for q in pdi.members[j + 1 :]:
            assert np.max(np.abs(p.matrix @ q.matrix)) <= 1e-9


@settings(max_examples=60, deadline=None)
@given(st.integers(2, 6), st.integers(0, 2**32 - 1))
def test_every_member_sum_is_in_the_framework(d, seed):
    rng = np.random.default_rng(seed)
    pdi = random_pdi(d, rng)
    f = Framework(pdi)
    subset = tuple(j for j in range(len(pdi)) if rng.random() < 0.5)
    assert member_subset(f, pdi.sum_of(subset)) == subset
    for p in pdi.members:
        assert commutes(pdi.sum_of(subset), p)


@settings(max_examples=40, deadline=None)
@given(st.integers(2, 5), st.integers(0, 2**32 - 1))
def test_rotated_projector_is_rejected_from_framework(d, seed):
    rng = np.random.default_rng(seed)
    f = Framework(validate_pdi([np.diag(np.eye(d)[j]) for j in range(d)]))
    v = random_unitary(d, rng)[:, 0]
    with pytest.raises(MeaninglessConjunction):
        require_member_subset(f, projector_from_ket(v))
