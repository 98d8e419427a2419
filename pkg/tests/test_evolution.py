import warnings
from fractions import Fraction

import numpy as np
import pytest
from hypothesis import given, settings, strategies as st

from qreframe.evolution import (
    MoranConfig,
    WeakSelectionWarning,
    abundance_order,
    moran_simulate,
    phi_assessment,
    phi_gradient,
    phi_vs_moran_report,
    selection_favors,
)
from qreframe.games import Game, Side, gen_coordination

from .strategies import games

IDENTICAL_ROWS = Game([[3.0, 1.0, 7.0], [3.0, 1.0, 7.0]], [[0.0, 2.0, 1.0], [4.0, 0.0, 1.0]])


def phi_oracle(a):
    """phi by hand from the definition, in exact fractions."""
    m, n = len(a), len(a[0])
    grand = sum(Fraction(x) for row in a for x in row) / (m * n)
    return [sum(Fraction(x) for x in row) / n - grand for row in a]


# --- phi --------------------------------------------------------------------

def test_phi_one_outside_option():
    assert phi_assessment(gen_coordination(60, 1), Side.ROW).tolist() == [-5.0, 5.0]


def test_phi_two_outside_options():
    assert phi_assessment(gen_coordination(60, 2), Side.ROW).tolist() == [3.75, -3.75]


def test_phi_identical_rows():
    assert np.array_equal(phi_assessment(IDENTICAL_ROWS), np.zeros(2))


def test_phi_column_side_uses_transpose():
    g = gen_coordination(160, 1)
    # column means over rows: L 45, H 90, S 40; grand mean 175/3
    np.testing.assert_allclose(phi_assessment(g, Side.COL), [45 - 175 / 3, 90 - 175 / 3, 40 - 175 / 3], rtol=1e-14)


@given(games(1, 5))
def test_phi_matches_oracle_and_sums_to_zero(g):
    phi = phi_assessment(g)
    assert abs(phi.sum()) <= 1e-12 * max(1.0, np.abs(g.a).max())
    assert phi.tolist() == [float(x) for x in phi_oracle(g.a.tolist())]


@given(games(1, 4), st.floats(-5, 5), st.floats(-50, 50))
def test_phi_affine_in_own_payoffs(g, alpha, c):
    phi = phi_assessment(g)
    scaled = phi_assessment(g.with_row_payoffs(alpha * g.a + c))
    np.testing.assert_allclose(scaled, alpha * phi, rtol=0, atol=1e-9 * max(1.0, np.abs(g.a).max()))


def test_phi_gradient_closed_form_2x3():
    grad = phi_gradient(gen_coordination(60, 1))
    assert grad[0, 0, 0] == pytest.approx(1 / 6, rel=1e-15)
    assert grad[1, 0, 0] == pytest.approx(-1 / 6, rel=1e-15)


@settings(max_examples=30)
@given(games(1, 4, elements=st.floats(-10, 10)))
def test_phi_gradient_matches_finite_differences(g):
    h = 1e-6
    grad = phi_gradient(g)
    for i in range(g.m):
        for j in range(g.n):
            a_up, a_dn = g.a.copy(), g.a.copy()
            a_up[i, j] += h
            a_dn[i, j] -= h
            fd = (phi_assessment(g.with_row_payoffs(a_up)) - phi_assessment(g.with_row_payoffs(a_dn))) / (2 * h)
            np.testing.assert_allclose(fd, grad[:, i, j], rtol=1e-6, atol=1e-9)


def test_duplicating_outside_option_reverses_order():
    o1 = abundance_order(phi_assessment(gen_coordination(60, 1))).order
    o2 = abundance_order(phi_assessment(gen_coordination(60, 2))).order
    assert o1 == [1, 0] and o2 == [0, 1]


# --- favors / order ----------------------------------------------------------

@pytest.mark.parametrize(
    "phi, favored",
    [([-5, 5], [False, True]), ([3.75, -3.75], [True, False]), ([0, 0], [False, False])],
)
def test_selection_favors(phi, favored):
    assert selection_favors(phi).tolist() == favored


def test_abundance_order():
    assert abundance_order([-5, 5]).order == [1, 0]
    assert abundance_order([3.75, -3.75]).order == [0, 1]
    r = abundance_order([1, 1])
    assert r.order == [0, 1] and r.ties == [(0, 1)]
    assert abundance_order([2, 5, 2, 0]) == ([1, 0, 2, 3], [(0, 2)])


# --- Moran process -----------------------------------------------------------

def within(est, side, target, k=3.0):
    ab, se = est.abundance(side), est.std_error(side)
    return np.all(np.abs(ab - target) <= k * se)


def test_config_validation():
    for bad in (
        MoranConfig(n_row=1),
        MoranConfig(mutation=1.5),
        MoranConfig(delta=-1),
        MoranConfig(steps=10, burn_in=10),
        MoranConfig(steps=100, burn_in=0, batches=200),
        MoranConfig(seed=-1),
    ):
        with pytest.raises(ValueError):
            bad.validate()


def test_abundances_are_distributions():
    est = moran_simulate(gen_coordination(60, 1), MoranConfig(steps=200_000, burn_in=1000))
    assert abs(est.abundance_row.sum() - 1) < 1e-9 and abs(est.abundance_col.sum() - 1) < 1e-9
    assert est.batch_means.shape == (100, 5)


def test_neutral_selection_is_uniform():
    est = moran_simulate(gen_coordination(60, 1), MoranConfig(delta=0.0, seed=1))
    assert within(est, Side.ROW, 1 / 2)
    assert within(est, Side.COL, 1 / 3)


def test_determinism():
    cfg = MoranConfig(steps=300_000, burn_in=1000, seed=42)
    e1 = moran_simulate(gen_coordination(60, 2), cfg, thin=100)
    e2 = moran_simulate(gen_coordination(60, 2), cfg, thin=100)
    assert e1.abundance_row.tobytes() == e2.abundance_row.tobytes()
    assert e1.se_col.tobytes() == e2.se_col.tobytes()
    assert e1.to_json() == e2.to_json()
    assert e1.trajectory_csv() == e2.trajectory_csv()
    e3 = moran_simulate(gen_coordination(60, 2), MoranConfig(steps=300_000, burn_in=1000, seed=43))
    assert e3.abundance_row.tobytes() != e1.abundance_row.tobytes()


def test_chain_visits_every_count():
    n = 5
    cfg = MoranConfig(n_row=n, n_col=n, delta=0.01, mutation=0.2, steps=200_000, burn_in=0, seed=3)
    est = moran_simulate(gen_coordination(60, 1), cfg, thin=1)
    traj = est.trajectory
    for col in range(1, traj.shape[1]):
        assert set(traj[:, col].tolist()) == set(range(n + 1))
    assert np.all(traj[:, 1:3].sum(axis=1) == n) and np.all(traj[:, 3:].sum(axis=1) == n)


def test_trajectory_csv_layout():
    est = moran_simulate(gen_coordination(60, 1), MoranConfig(steps=1000, burn_in=0, batches=10), thin=500)
    lines = est.trajectory_csv().splitlines()
    assert lines[0] == "step,strategy,population,count"
    assert lines[1:6] == ["0,1,row,20", "0,2,row,20", "0,1,col,14", "0,2,col,13", "0,3,col,13"]
    assert len(lines) == 1 + 2 * 5


def test_summary_json():
    est = moran_simulate(gen_coordination(60, 1), MoranConfig(steps=10_000, burn_in=0, batches=10))
    s = est.summary()
    assert [r["strategy"] for r in s["row"]] == ["L", "H"]
    assert s["col"][2]["abundance"] == est.abundance_col[2]
    assert s["config"]["seed"] == 0


@pytest.mark.slow
def test_one_outside_option_favors_high():
    est = moran_simulate(gen_coordination(60, 1), MoranConfig())
    ab, se = est.abundance_row, est.se_row
    assert ab[1] - ab[0] > 3 * np.hypot(se[0], se[1])


@pytest.mark.slow
def test_two_outside_options_favors_low():
    # phi predicts L ahead of H here; checked at the default settings
    est = moran_simulate(gen_coordination(60, 2), MoranConfig())
    ab, se = est.abundance_row, est.se_row
    assert ab[0] - ab[1] > 3 * np.hypot(se[0], se[1])


@pytest.mark.slow
@pytest.mark.parametrize("k, share", [(1, 1 / 3), (2, 1 / 2)])
def test_outside_option_share_under_weak_selection(k, share):
    # delta * payoff range = 0.0018; at 1e-4 the first-order pull away from the
    # flat outside payoff is already about 3 standard errors at 1e7 steps
    g = gen_coordination(60, k)
    est = moran_simulate(g, MoranConfig(delta=1e-5, seed=5))
    mass, se = est.combined(Side.COL, range(2, 2 + k))
    assert abs(mass - share) <= 3 * se


# --- phi vs simulation ---------------------------------------------------------

@pytest.mark.slow
def test_report_one_outside_option_agrees():
    with pytest.warns(WeakSelectionWarning):
        rep = phi_vs_moran_report(gen_coordination(60, 1), MoranConfig())
    assert rep.status == ["agree", "agree"] and rep.ordering_agree


@pytest.mark.slow
def test_report_two_outside_options_ordering():
    with warnings.catch_warnings():
        warnings.simplefilter("ignore", WeakSelectionWarning)
        rep = phi_vs_moran_report(gen_coordination(60, 2), MoranConfig())
    assert rep.ordering_agree


def test_report_identical_rows_neutral():
    cfg = MoranConfig(steps=2_000_000, burn_in=10_000, delta=0.01, seed=7)
    with warnings.catch_warnings():
        warnings.simplefilter("error")
        rep = phi_vs_moran_report(IDENTICAL_ROWS, cfg)
    assert np.array_equal(rep.phi, [0.0, 0.0])
    assert rep.status == ["neutral", "neutral"]


def test_report_warns_on_unequal_populations():
    cfg = MoranConfig(n_row=10, n_col=20, delta=0.0, steps=20_000, burn_in=0, batches=10)
    with pytest.warns(WeakSelectionWarning, match="equal population"):
        phi_vs_moran_report(IDENTICAL_ROWS, cfg)
