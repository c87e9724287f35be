import pytest

from czeta.errors import ConvergenceError, DomainError
from czeta.ffq import field
from czeta.poly import ThetaRational
from czeta.series import GradedSeries, LaurentSeries
from czeta.tate import TateSeries, ts_arith, ts_eval_at_theta, ts_twist_forward


def _lin(F, c, T=4):
    """t + c as a TateSeries."""
    return TateSeries.from_tpoly(F, [c, ThetaRational.from_int(F, 1)], T)


def test_product_of_linear_factors():
    F = field(3, 1)
    th = ThetaRational.theta_power(F, 1)
    prod = _lin(F, -th) * _lin(F, th)
    # (t - theta)(t + theta) = t^2 - theta^2
    assert prod.coeff(0).mantissa == -LaurentSeries.monomial(F, -2)
    assert prod.coeff(1).mantissa.is_zero()
    assert prod.coeff(2).mantissa == LaurentSeries.one(F)


def test_twist_keeps_t_fixed():
    F = field(3, 1)
    th = ThetaRational.theta_power(F, 1)
    tw = ts_twist_forward(_lin(F, -th), 1)
    assert tw.coeff(0).mantissa == -LaurentSeries.monomial(F, -3)
    assert tw.coeff(1).mantissa == LaurentSeries.one(F)


def test_evaluation_of_polynomial_and_constant():
    F = field(3, 1)
    th = ThetaRational.theta_power(F, 1)
    val, cert = ts_eval_at_theta(_lin(F, -th))
    assert val.mantissa.is_zero() and cert is None
    c = TateSeries.constant(LaurentSeries.one(F, 50), 3)
    val, cert = c.eval_at_theta()
    assert cert == 50 and val.mantissa.agrees(LaurentSeries.one(F))


def test_evaluation_refuses_divergent_input():
    F = field(2, 1)
    # coefficients theta^i: val - i = -2i, the sum at t = theta diverges
    coeffs = [LaurentSeries.monomial(F, -i, 1, 30) for i in range(5)]
    with pytest.raises(ConvergenceError, match="t\\^1"):
        TateSeries(F, 0, coeffs, tail=None).eval_at_theta()


def test_gradings_fold_and_must_match():
    F = field(3, 1)
    one = LaurentSeries.one(F, 20)
    a = TateSeries(F, 3, [one, one])
    assert a.g == 0
    assert a.coeff(0).mantissa.agrees(-LaurentSeries.monomial(F, -3, 1, 17))
    half = TateSeries(F, GradedSeries(0.5, one).g, [one, one])
    with pytest.raises(DomainError):
        a + half
    assert (half + TateSeries.zero(F, 2)).g == half.g
    assert (half * half).g == 0


def test_json_and_dispatch():
    F = field(2, 2)
    a = TateSeries(F, 0, [LaurentSeries.from_coeffs(F, 0, [F.gen, F.one], 10), LaurentSeries.one(F, 10)])
    b = TateSeries.from_json(a.to_json())
    assert b.agrees(a)
    assert ts_arith("add", a, a).is_zero()  # characteristic 2
    assert ts_arith("mul", a, TateSeries.constant(LaurentSeries.one(F, 10), 2)).agrees(a)
    with pytest.raises(DomainError):
        ts_arith("pow", a, a)


def test_tail_of_product_is_a_lower_bound():
    F = field(2, 1)
    # 1/(1 - t u) truncated at t^4 has val(coeff_i) - i = 0 and tail 0
    coeffs = [LaurentSeries.monomial(F, i, 1, 40) for i in range(4)]
    a = TateSeries(F, 0, coeffs, tail=0)
    sq = a * a
    full = [LaurentSeries.monomial(F, i, i + 1, 40) for i in range(8)]
    assert sq.tail <= min(full[i].val - i for i in range(4, 8))
    for i in range(4):
        assert sq.coeffs[i].agrees(full[i])
