import pytest

from czeta.carlitz import CarlitzCtx
from czeta.errors import DomainError, EmbeddingError
from czeta.ffq import field
from czeta.motives import (PhiEntry, build_block, carlitz_motive, corrupt_psi, derived_block,
                           derived_forward_phi, direct_sum, verify_sigma_equation)
from czeta.poly import ThetaRational


def test_carlitz_motive():
    C = CarlitzCtx(3, 1, P=300, T=20)
    block = carlitz_motive(C)
    rep = verify_sigma_equation(block)
    assert rep.passed and rep.T == 20 and rep.P == 300
    det = block.det_phi()
    assert det[0] == -ThetaRational.theta_power(C.ctx, 1)
    assert block.labels["n"] == 1 and block.labels["alphas"] == []


@pytest.mark.parametrize("p,r", [(2, 1), (3, 1), (2, 2), (3, 2)])
def test_polylog_blocks(p, r):
    C = CarlitzCtx(p, r, P=120, T=12)
    for n in (1, 2, 3):
        block = build_block(C, n, [1, ThetaRational.theta_power(C.ctx, 1)])
        assert verify_sigma_equation(block).passed


def test_block_shapes():
    C = CarlitzCtx(3, 1, P=80, T=8)
    empty = build_block(C, 2, [])
    assert empty.size == 1 and verify_sigma_equation(empty).passed
    two = build_block(C, 1, [1, 1])
    assert two.size == 3
    assert two.psi[0][1] is None and two.psi[1][2] is None
    assert two.phi[0][1].is_zero()
    # alpha^{(-r)} is stored with shift -r so that twisting by r restores alpha
    entry = two.phi[1][0]
    assert [s for _, s in entry.terms[0]] == [-1, 0]
    deg = CarlitzCtx(2, 1, P=80, T=8)
    b = build_block(deg, 3, [1])
    assert b.size == 1 and b.labels["kind"] == "carlitz-degenerate"


def test_derived_forward_phi():
    C = CarlitzCtx(3, 1, P=60, T=6)
    F = C.ctx
    base = carlitz_motive(C)
    one = derived_forward_phi(base, 1)[0][0]
    assert one == (-ThetaRational.theta_power(F, 3), ThetaRational.from_int(F, 1))
    two = derived_forward_phi(base, 2)[0][0]
    # (t - theta^3)(t - theta^9)
    assert two == (ThetaRational.theta_power(F, 12),
                   -(ThetaRational.theta_power(F, 3) + ThetaRational.theta_power(F, 9)),
                   ThetaRational.from_int(F, 1))
    with pytest.raises(DomainError):
        derived_forward_phi(carlitz_motive(CarlitzCtx(3, 2, P=20, T=4)), 3)


@pytest.mark.parametrize("ratio", [2, 3])
def test_derived_blocks_verify(ratio):
    C = CarlitzCtx(3, 1, P=150, T=12)
    block = build_block(C, 2, [1])
    assert verify_sigma_equation(block).passed
    assert verify_sigma_equation(derived_block(block, ratio)).passed


def test_direct_sum():
    b1 = carlitz_motive(CarlitzCtx(3, 1, P=200, T=16))
    b2 = carlitz_motive(CarlitzCtx(3, 2, P=200, T=16))
    s = direct_sum([b1, b2])
    assert s.step == 2 and s.ctx is field(3, 2) and s.size == 2
    assert verify_sigma_equation(s).passed
    single = direct_sum([b1])
    assert single.step == 1 and verify_sigma_equation(single).passed
    det = s.det_phi(forward=True)
    assert not det[0].is_zero()
    with pytest.raises(DomainError):
        s.det_phi()
    with pytest.raises(EmbeddingError):
        direct_sum([b1, carlitz_motive(CarlitzCtx(2, 1, P=20, T=4))])


def test_corrupted_psi_fails_at_perturbed_order():
    C = CarlitzCtx(3, 1, P=200, T=16)
    block = build_block(C, 2, [1])
    bad = corrupt_psi(block, 1, 0, 3, 77)
    rep = verify_sigma_equation(bad)
    assert not rep.passed
    assert rep.residual == 77
    assert rep.to_json()["pass"] is False


def test_phi_entry_algebra():
    F = field(3, 1)
    a = PhiEntry.factor(ThetaRational.theta_power(F, 1), -1)
    assert a.twist(1).materialize(F) == (ThetaRational.theta_power(F, 1),)
    with pytest.raises(DomainError):
        a.materialize(F)
    assert PhiEntry().is_zero() and PhiEntry().materialize(F) == ()
