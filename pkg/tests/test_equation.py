import numpy as np
import pytest

from delaystab import (
    DelaySpec,
    InitialData,
    Term,
    merge_same_delay,
    parse,
    prefix_modify,
    simulate,
    subset_equation,
    validate,
)
from delaystab.seqexpr import evaluate


def test_validate_sin_cos_bounds(eq_sin_cos):
    assert eq_sin_cos.T == 20
    assert 0.24 < eq_sin_cos.K <= 0.25  # dominated by the first coefficient


def test_validate_trivial_and_unbounded(eq_unbounded):
    zero = validate([Term(parse("0"), DelaySpec.constant(0))])
    assert zero.K == 0.0 and zero.T == 0
    assert eq_unbounded.T == 1 and eq_unbounded.K == pytest.approx(2.2)


def test_validate_rejects_empty_and_short_window():
    with pytest.raises(ValueError):
        validate([])
    with pytest.raises(ValueError):
        validate([Term(parse("1"), DelaySpec.constant(30))], window_len=100)


def test_subset_equation(eq_unbounded):
    one = subset_equation(eq_unbounded, [0])
    assert one.m == 1 and one.T == 1
    assert evaluate(one.terms[0].coeff, 5) == pytest.approx(2.2)
    same = subset_equation(eq_unbounded, [0, 1])
    assert [str(t.coeff) for t in same.terms] == [str(t.coeff) for t in eq_unbounded.terms]
    with pytest.raises(ValueError):
        subset_equation(eq_unbounded, [])


def test_subset_drops_forcing():
    eq = validate([Term(parse("0.1"), DelaySpec.constant(0))], forcing=parse("1"))
    assert subset_equation(eq, [0]).forcing is None


def test_prefix_modify_identity(eq_sin_cos):
    assert prefix_modify(eq_sin_cos, 0, list(eq_sin_cos.terms)) is eq_sin_cos


def test_prefix_modify_splices_coefficients():
    eq = validate([Term(parse("0.3"), DelaySpec.constant(1))])
    replacement = [Term(parse("0"), DelaySpec.constant(1))]
    spliced = prefix_modify(eq, 5, replacement)
    values = [evaluate(spliced.terms[0].coeff, n) for n in range(8)]
    assert values[:5] == [0.0] * 5
    assert values[5:] == [0.3] * 3


def test_merge_same_delay():
    eq = validate([
        Term(parse("per(-0.12, -0.05)"), DelaySpec.periodic([3, 5])),
        Term(parse("per(0.17, 0.08)"), DelaySpec.periodic([3, 5])),
    ])
    merged = merge_same_delay(eq)
    assert merged.m == 1
    assert evaluate(merged.terms[0].coeff, 0) == pytest.approx(0.05)
    assert evaluate(merged.terms[0].coeff, 1) == pytest.approx(0.03)


def test_initial_data_coverage_enforced(eq_unbounded):
    with pytest.raises(ValueError, match="missing"):
        simulate(eq_unbounded, InitialData(0, {0: 1.0}), 5)
    traj = simulate(eq_unbounded, InitialData.from_values(0, [0.0, 1.0]), 2)
    assert traj.values[2] == pytest.approx(6.8)


def test_delay_accesses_stay_in_range(eq_periodic_mixed):
    # simulating from a fully specified history must never need indices
    # below n0 - T; from_values supplies exactly that range
    T = eq_periodic_mixed.T
    init = InitialData.from_values(0, list(np.linspace(-1, 1, T + 1)))
    traj = simulate(eq_periodic_mixed, init, 50)
    assert np.isfinite(traj.values).all()
