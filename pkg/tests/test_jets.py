import pytest

from spquad import TimeJet
from spquad.errors import MixedCenters, OrderBudget


def test_evaluation_at_center_returns_constant_term():
    jet = TimeJet([3.0, 2.0, -1.0], center=1.5)
    assert jet(1.5) == 3.0
    assert jet(2.5) == 3.0 + 2.0 - 1.0


def test_exactness_propagates_through_arithmetic():
    a = TimeJet([1.0, 2.0])
    b = TimeJet([0.5, 0.0, 3.0])
    assert (a + b).exact and (a * b).exact and a.derivative().exact
    assert (a * b).order == a.order + b.order
    assert TimeJet([1, 2, 3]).derivative().order == 1


def test_zero_jet_identity_and_annihilation():
    z = TimeJet.zero()
    a = TimeJet([1.0, -2.0], exact=False, valid_order=1)
    assert (a + z).coeffs.tolist() == a.coeffs.tolist()
    prod = a * z
    assert prod.is_zero() and prod.exact


def test_truncated_budget_counts_down_and_raises():
    a = TimeJet([1.0, 1.0, 0.5], exact=False, valid_order=2)
    d1 = a.derivative()
    assert not d1.exact and d1.valid_order == 1
    d2 = d1.derivative()
    assert d2.valid_order == 0
    with pytest.raises(OrderBudget):
        d2.derivative()


def test_budget_is_min_over_operands():
    a = TimeJet([1.0, 1.0], exact=False, valid_order=3)
    b = TimeJet([2.0])
    assert (a * b).valid_order == 3
    c = TimeJet([1.0], exact=False, valid_order=1)
    assert (a + c).valid_order == 1


def test_center_mismatch_rejected():
    with pytest.raises(MixedCenters):
        TimeJet([1.0], center=0.0) + TimeJet([1.0], center=1.0)


def test_trailing_zeros_trimmed_and_negative_zero_folded():
    jet = TimeJet([1.0, 0.0, 0.0])
    assert jet.order == 0
    assert repr(TimeJet([0.0, 1.0]).scale(-1.0)) == "TimeJet([0.0,-1.0])"


def test_scale_and_neg():
    a = TimeJet([1.0, -2.0])
    assert (-a).coeffs.tolist() == [-1.0, 2.0]
    assert a.scale(0.0).is_zero()
    assert (2 * a).coeffs.tolist() == [2.0, -4.0]


def test_immutability():
    a = TimeJet([1.0])
    with pytest.raises(AttributeError):
        a.center = 3.0
    with pytest.raises(ValueError):
        a.coeffs[0] = 5.0
