from fractions import Fraction as F
import json
import math

import numpy as np
import pytest
from hypothesis import given, settings, strategies as st

from invset import attractor as A
from invset.attractor import FlowState, LorenzParams


# ---------------------------------------------------------------- logistic flow


def test_logistic_fixed_point():
    for t in (0.0, 1.0, 7.5):
        exact, num = A.logistic_flow(1.0, t)
        assert exact == 1.0 and num == pytest.approx(1.0, abs=1e-15)


def test_logistic_from_above():
    exact, num = A.logistic_flow(2.0, 1.0)
    assert exact == pytest.approx(2 * math.e / (1 + 2 * (math.e - 1)), abs=1e-14)
    assert exact == pytest.approx(1.2254, abs=1e-4)
    assert abs(num - exact) < 1e-12


def test_logistic_monotone_approach():
    vals = [A.logistic_exact(0.5, t) for t in range(0, 40, 4)]
    assert all(a < b for a, b in zip(vals, vals[1:])) and vals[-1] == pytest.approx(1, abs=1e-14)


@settings(max_examples=30, deadline=None)
@given(st.floats(0.05, 20), st.floats(0, 10))
def test_logistic_rk4_matches_analytic(r0, t):
    exact, num = A.logistic_flow(r0, t)
    assert abs(exact - num) < 1e-8


def test_logistic_validation():
    with pytest.raises(ValueError):
        A.logistic_flow(0, 1)
    with pytest.raises(ValueError):
        A.logistic_flow(1, -1)


def test_limit_cycle():
    s = A.limit_cycle_flow(FlowState(1.0, 0.0), 2 * math.pi)
    assert s.r == 1.0 and min(s.phi, 2 * math.pi - s.phi) < 1e-12
    assert A.limit_cycle_flow(FlowState(0.5), 30.0).r == pytest.approx(1, abs=1e-12)
    with pytest.raises(ValueError):
        FlowState(0.0)


# ---------------------------------------------------------------- Lorenz basics


def test_origin_is_fixed():
    traj = A.integrate((0, 0, 0), n=100)
    assert np.all(traj.states == 0)


def test_equilibria_are_zeros_of_field():
    for e in A.equilibria():
        assert np.abs(A.lorenz_field(e)).max() < 1e-12
    assert len(A.equilibria(LorenzParams(rho_L=0.5))) == 1


def test_field_matches_jacobian_numerically():
    u = np.array([1.3, -2.1, 17.0])
    J = A.lorenz_jacobian(u)
    h = 1e-6
    for k in range(3):
        e = np.zeros(3)
        e[k] = h
        col = (A.lorenz_field(u + e) - A.lorenz_field(u - e)) / (2 * h)
        assert np.allclose(col, J[:, k], atol=1e-7)


def test_divergence_exact():
    assert A.divergence(LorenzParams(10, 28, F(8, 3))) == F(-41, 3)
    assert abs(A.divergence() + 41 / 3) < 1e-10


def test_divergence_is_jacobian_trace_everywhere():
    rng = np.random.default_rng(0)
    for u in rng.normal(0, 20, (20, 3)):
        assert np.trace(A.lorenz_jacobian(u)) == pytest.approx(A.divergence(), abs=1e-12)


def test_trajectory_bounded():
    traj = A.integrate((1, 1, 1), dt=1e-2, n=10000)
    assert np.linalg.norm(traj.states, axis=1).max() < 100


def test_step_matches_integrate():
    traj = A.integrate((1, 2, 3), n=5)
    u = (1.0, 2.0, 3.0)
    for _ in range(5):
        u = A.step_lorenz(u)
    assert tuple(traj.states[-1]) == u


def test_batch_matches_scalar():
    starts = np.array([[1.0, 1.0, 1.0], [-3.0, 2.0, 20.0]])
    end = A.integrate_batch(starts, n=500)
    for s, e in zip(starts, end):
        assert np.array_equal(A.integrate(s, n=500).states[-1], e)


def test_mirror_symmetry_per_step():
    start = np.array([1.0, 1.0, 1.0])
    a = A.integrate(start, n=20000).mirrored()
    b = A.integrate(start * [-1, -1, 1], n=20000)
    assert np.abs(a.states - b.states).max() <= 1e-9


def test_nonpositive_dt_rejected():
    with pytest.raises(ValueError):
        A.integrate((1, 1, 1), dt=0)


def test_trajectory_csv_header():
    text = A.integrate((1, 1, 1), n=3).to_csv()
    header, cols, *rows = text.strip().split("\n")
    assert json.loads(header[2:])["n"] == 3
    assert cols == "t,X,Y,Z" and len(rows) == 4


# ---------------------------------------------------------------- contraction


def _simplex(base, eps=1e-6):
    base = np.asarray(base, dtype=float)
    return np.vstack([base, base + np.eye(3) * eps])


@pytest.mark.parametrize("t", [0.1, 0.25, 0.5])
def test_tangent_contraction_rate(t):
    rate = A.volume_contraction(_simplex([1.0, 1.0, 20.0]), t=t)
    assert abs(rate + 41 / 3) < 1e-6


def test_contraction_rate_independent_of_base():
    rng = np.random.default_rng(1)
    bases = A.integrate_batch(rng.normal(0, 5, (10, 3)) + [0, 0, 25], n=5000)
    rates = [A.volume_contraction(_simplex(b)) for b in bases]
    assert max(rates) - min(rates) < 1e-6


def test_simplex_method_within_five_percent():
    rate = A.volume_contraction(_simplex([1.0, 1.0, 20.0], 1e-7), t=0.5, method="simplex")
    assert abs(rate + 41 / 3) < 0.05 * 41 / 3


def test_degenerate_simplex():
    with pytest.raises(ValueError):
        A.volume_contraction(np.zeros((4, 3)))
    with pytest.raises(ValueError):
        A.volume_contraction(_simplex([1, 1, 1]), method="hull")


# ---------------------------------------------------------------- symbols


def test_symbols_deterministic():
    a = A.symbolize(A.integrate((1, 1, 1), n=30000))
    b = A.symbolize(A.integrate((1, 1, 1), n=30000))
    assert a == b and set(a.symbols) <= {"L", "R"} and len(a.symbols) > 20


def test_symbols_stable_under_dt_halving_in_reproducible_window():
    # tangent errors grow like exp(0.9 t); up to t = 30 both step sizes agree
    a = A.integrate((1, 1, 1), dt=1e-3, n=30000)
    b = A.integrate((1, 1, 1), dt=5e-4, n=60000)
    assert A.symbolize(a, 0, 30).symbols == A.symbolize(b, 0, 30).symbols


def test_symbols_swap_under_mirror():
    start = np.array([1.0, 1.0, 1.0])
    a = A.symbolize(A.integrate(start, n=60000), 20, 60)
    b = A.symbolize(A.integrate(start * [-1, -1, 1], n=60000), 20, 60)
    assert b.symbols == a.swapped()


def test_symbolize_window_and_short():
    s = A.symbolize(A.integrate((1, 1, 1), n=30000), 10, 20)
    assert all(10 <= t <= 20 for t in s.times)
    with pytest.raises(ValueError):
        A.symbolize(A.integrate((1, 1, 1), n=1))


# ---------------------------------------------------------------- dimension


def test_line_dimension():
    rng = np.random.default_rng(0)
    pts = rng.random(20000)[:, None] * np.array([1.0, 2.0, 3.0])
    assert abs(A.correlation_dimension(pts).slope - 1) < 0.05


def test_square_dimension():
    rng = np.random.default_rng(0)
    pts = np.column_stack([rng.random((20000, 2)), np.zeros(20000)])
    assert abs(A.correlation_dimension(pts).slope - 2) < 0.05


def test_correlation_sums_brute_force():
    rng = np.random.default_rng(2)
    pts = rng.random((300, 3))
    radii = np.array([0.1, 0.3])
    d = np.linalg.norm(pts[:, None] - pts[None], axis=-1)
    expected = [((d <= r).sum() - 300) / (300 * 299) for r in radii]
    assert np.allclose(A.correlation_sums(pts, radii), expected)


def test_dimension_validation():
    with pytest.raises(ValueError):
        A.correlation_dimension(np.zeros((10, 3)))
    rng = np.random.default_rng(0)
    with pytest.raises(ValueError):
        A.correlation_dimension(rng.random((20000, 3)), radii=[0.1])


def test_fit_outputs():
    rng = np.random.default_rng(0)
    fit = A.correlation_dimension(rng.random(10000), min_points=1000)
    assert fit.to_csv().startswith("radius,C\n")
    assert set(fit.to_dict()) >= {"slope", "r_value", "stderr", "n_points"}
