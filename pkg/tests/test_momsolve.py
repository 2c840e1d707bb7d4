import random

import pytest

from loopeq import (
    CRational,
    LoopReducer,
    MomentFunctional,
    Partition,
    Potential,
    hn_dimension,
    loop_tuples,
    partitions_in_box,
    residuals,
    solve_moments,
)
from conftest import rand_crational


def test_hn_dimension_examples():
    assert hn_dimension(2, 3) == 6
    for d in range(1, 8):
        assert hn_dimension(1, d) == d
    for N in range(1, 8):
        assert hn_dimension(N, 1) == 1


def test_basis_key_validation():
    with pytest.raises(ValueError):
        MomentFunctional(N=2, d=2, basis_values={Partition(()): 1.0})


def test_gaussian_solve_examples(gauss):
    Z = CRational(1)
    F = MomentFunctional(N=2, d=1, basis_values={Partition(()): Z})
    vals, _ = solve_moments(F, gauss, [(2,), (1,), (4,)])
    assert vals[Partition((2,))] == CRational(4)  # N^2 Z
    assert vals[Partition((1,))] == CRational(0)
    assert vals[Partition((4,))] == CRational(18)  # (2N^3+N) Z at N=2


def test_gaussian_solve_matches_wick_at_other_N(gauss):
    from loopeq import gaussian_trace_moment

    for N in (1, 3):
        F = MomentFunctional(N=N, d=1, basis_values={Partition(()): CRational(1)})
        vals, _ = solve_moments(F, gauss, [(2,), (4,), (2, 2)])
        for mu in vals:
            wick = gaussian_trace_moment(tuple(mu)).eval({"N": N})
            assert vals[mu] == wick


def test_solve_requires_consistent_d(gauss):
    F = MomentFunctional(N=2, d=2, basis_values={
        mu: CRational(1) for mu in partitions_in_box(2, 1)
    })
    with pytest.raises(ValueError):
        solve_moments(F, gauss, [(2,)])


def test_solve_rejects_non_reducing_rational(haar2):
    F = MomentFunctional(N=2, d=1, basis_values={Partition(()): CRational(1)})
    with pytest.raises(ValueError):
        solve_moments(F, haar2, [(1,)])


@pytest.mark.parametrize("N,d", [(2, 2), (2, 3), (3, 2)])
def test_substitution_order_independence(N, d):
    rng = random.Random(100 * N + d)
    t = [rand_crational(rng) for _ in range(d)] + [CRational(2)]
    V = Potential.polynomial(t)
    a = LoopReducer(V, N, strategy="largest")
    b = LoopReducer(V, N, strategy="smallest")
    mus = [(4, 3, 1), (5, 2), (8,), (3, 3, 2), (6, 1, 1), (2, 2, 2, 2)]
    for mu in mus:
        assert a.reduce(mu) == b.reduce(mu)


def test_reduction_linear_form_weights(cubic):
    # d=2: the box is {(), (1,), (1,1)} at N=2; every coefficient is exact
    red = LoopReducer(cubic, 2)
    form = red.reduce((3, 1))
    assert set(form) <= set(partitions_in_box(2, 1))
    assert all(isinstance(c, CRational) for c in form.values())


def test_residuals_zero_functional(gauss):
    oracle = {Partition(tuple(mu)): 0j for mu in _all_partitions(8)}
    rep = residuals(oracle, gauss, 2, 4)
    assert rep.max_relative == 0.0


def test_residuals_detect_perturbation(gauss):
    # Gaussian functional with E(p_2) off by one trips mu=(1)
    from loopeq import gaussian_trace_moment

    oracle = {
        Partition(tuple(mu)): complex(gaussian_trace_moment(tuple(mu)).eval({"N": 2}))
        for mu in _all_partitions(8)
    }
    rep0 = residuals(oracle, gauss, 2, 4)
    assert rep0.max_relative < 1e-14
    oracle[Partition((2,))] += 1.0
    rep1 = residuals(oracle, gauss, 2, 4)
    bad = {mu: rel for (mu, _, _, rel) in rep1.entries if rel > 1e-12}
    assert (1,) in bad


def test_residuals_missing_values_error(gauss):
    with pytest.raises(KeyError) as exc:
        residuals({Partition(()): 1.0}, gauss, 2, 2)
    assert "missing" in str(exc.value)


def test_loop_tuples_cover():
    ts = loop_tuples(3)
    assert (0,) in ts and (3,) in ts and (0, 1, 1, 1) in ts and (1, 2) in ts
    assert all(sum(t) <= 3 for t in ts)


def _all_partitions(wmax):
    from loopeq import partitions_of_weight

    out = []
    for w in range(wmax + 1):
        out.extend(partitions_of_weight(w))
    return out


def test_coefficient_growth_diagnostic(cubic):
    red = LoopReducer(cubic, 2)
    red.reduce((6, 2))
    assert red.max_abs_coeff >= 1.0


def test_free_basis_dimension_witness(cubic):
    # the reducer leaves every box partition free, so the solution space has
    # exactly binom(N+d-1, N) dimensions
    for N, d in [(2, 2), (3, 2)]:
        red = LoopReducer(cubic, N)
        box = partitions_in_box(N, d - 1)
        assert len(box) == hn_dimension(N, d)
        for nu in box:
            assert red.reduce(nu) == {nu: CRational(1)}
