import math

import numpy as np
import pytest
from scipy.optimize import fsolve

from oracles import (
    COND10,
    COND11,
    CRITICAL_POINT,
    EIGENVALUES,
    JACOBIAN,
    TABLE1_EXACT,
    TRACE,
    exact_critical_point,
    exact_det3,
    tk_field,
)
from sweepdyn.analysis import (
    Classification,
    char_poly,
    classify,
    critical_point,
    cubic_roots,
    eigenvalues3,
    equilibrium_residual,
    jacobian_tk,
    limit_cycle_report,
    stability_report,
    validity_conditions,
)
from sweepdyn.errors import InsufficientOscillations, NoInteriorEquilibrium, SingularCarryingCapacity
from sweepdyn.integrator import Trajectory
from sweepdyn.model import TABLE1, TK


def test_frozen_oracle_is_self_consistent():
    # The frozen rationals are what the derivation gives and zero the field exactly.
    assert exact_critical_point(TABLE1_EXACT) == CRITICAL_POINT
    n, s, w = CRITICAL_POINT
    p = TABLE1_EXACT
    k = p["kmax"] - p["c"] * w
    g = n * (1 - n / k)
    assert p["r0"] * g - p["delta"] * n * w == 0
    assert p["rho0"] * g - p["beta"] * n == 0
    assert p["a"] * n * n - p["b"] * w - p["alpha"] * s == 0


def test_critical_point_table1():
    cp = critical_point(TABLE1)
    for got, want in zip(cp, CRITICAL_POINT):
        assert abs(got - float(want)) < 1e-12
    assert equilibrium_residual(TABLE1, cp) < 1e-15


def test_critical_point_agrees_with_fsolve():
    cp = critical_point(TABLE1)
    p = {k: float(v) for k, v in TABLE1_EXACT.items()}
    root = fsolve(lambda x: tk_field(x, p), np.array(cp) * 1.02, xtol=1e-13)
    np.testing.assert_allclose(cp, root, rtol=1e-9)


@pytest.mark.parametrize(
    "change, match",
    [(dict(rho0=0.25), "rho0"), (dict(rho0=0.2), "rho0"), (dict(kmax=0.07), "kmax"), (dict(b=5.0), "S")],
)
def test_no_interior_equilibrium(change, match):
    with pytest.raises(NoInteriorEquilibrium, match=match):
        critical_point(TABLE1.replace(**change))


def test_jacobian_table1():
    jac = jacobian_tk(TABLE1, critical_point(TABLE1))
    for i in range(3):
        for j in range(3):
            assert abs(jac[i, j] - float(JACOBIAN[i][j])) < 1e-12
    with pytest.raises(SingularCarryingCapacity):
        jacobian_tk(TABLE1, (1.0, 0.0, 1.5))


def test_char_poly_table1():
    c3, c2, c1, c0 = char_poly(np.array(JACOBIAN, dtype=float))
    assert c3 == -1.0
    assert c2 == pytest.approx(float(TRACE), abs=1e-15)
    assert c0 == pytest.approx(float(exact_det3(JACOBIAN)), abs=1e-15)


def test_eigenvalues_table1():
    eigs = eigenvalues3(jacobian_tk(TABLE1, critical_point(TABLE1)))
    assert eigs[0].real > 0 and eigs[0] == eigs[1].conjugate()
    for got in eigs:
        assert min(abs(got - want) for want in EIGENVALUES) < 1e-3
    ref = np.linalg.eigvals(np.array(JACOBIAN, dtype=float))
    np.testing.assert_allclose(sorted(eigs, key=lambda z: (z.real, z.imag)),
                               sorted(ref, key=lambda z: (z.real, z.imag)), atol=1e-12)


def test_validity_conditions_frozen():
    assert COND10[0] < COND10[1] and COND11[0] < COND11[1]
    assert validity_conditions(TABLE1) == (True, True)


def test_validity_conditions_can_fail():
    # Condition (10) is linear in kmax on both sides; a tiny kmax flips it.
    cond10, _ = validity_conditions(TABLE1.replace(kmax=1e-6, beta=0.99))
    assert cond10 is False


def test_report_json_schema():
    doc = stability_report(TABLE1).to_json()
    assert list(doc) == ["critical_point", "jacobian", "eigenvalues", "classification",
                         "validity", "char_poly", "solver_stats"]
    assert doc["classification"] == "UnstableSaddleFocus"
    assert doc["validity"] == {"condition10": True, "condition11": True}
    assert len(doc["char_poly"]) == 4 and doc["char_poly"][0] == -1.0
    assert set(doc["eigenvalues"][0]) == {"re", "im"}


@pytest.mark.parametrize(
    "coeffs, roots",
    [
        ((1, -6, 11, -6), [1, 2, 3]),
        ((1, 0, 0, -8), [2, complex(-1, math.sqrt(3)), complex(-1, -math.sqrt(3))]),
        ((1, -3, 3, -1), [1, 1, 1]),
        ((2, -4, 2, 0), [0, 1, 1]),
        ((-1, 0, -1, 0), [0, 1j, -1j]),
    ],
)
def test_cubic_roots_known(coeffs, roots):
    got = sorted(cubic_roots(coeffs), key=lambda z: (z.real, z.imag))
    want = sorted((complex(r) for r in roots), key=lambda z: (z.real, z.imag))
    np.testing.assert_allclose(got, want, atol=1e-7)


@pytest.mark.parametrize(
    "eigs, expected",
    [
        ([-1, -2, -3], Classification.STABLE_NODE),
        ([-1, complex(-0.5, 1), complex(-0.5, -1)], Classification.STABLE_FOCUS),
        ([1, -2, -3], Classification.UNSTABLE_NODE),
        ([-1, complex(0.5, 1), complex(0.5, -1)], Classification.UNSTABLE_SADDLE_FOCUS),
        ([-1, 1j, -1j], Classification.MARGINAL),
        ([0, 0, 0], Classification.DEGENERATE),
        ([1e-12, -1e-12, 0], Classification.DEGENERATE),
    ],
)
def test_classify(eigs, expected):
    assert classify(eigs) is expected
    assert expected.is_unstable == expected.value.startswith("Unstable")


def test_limit_cycle_on_sine():
    t = np.linspace(0, 100, 10001)
    y = 2 + np.sin(2 * np.pi * t / 7)
    traj = Trajectory(t, np.column_stack([y, y, y]), TK)
    rep = limit_cycle_report(traj, "N")
    assert rep.converged
    assert rep.period == pytest.approx(7.0, abs=0.01)
    assert rep.amplitude == pytest.approx(2.0, abs=1e-3)


def test_limit_cycle_growing_not_converged():
    t = np.linspace(0, 100, 10001)
    y = 2 + np.exp(t / 30) * np.sin(2 * np.pi * t / 7)
    rep = limit_cycle_report(Trajectory(t, np.column_stack([y, y, y]), TK), 0)
    assert not rep.converged


def test_limit_cycle_needs_peaks():
    t = np.linspace(0, 10, 101)
    with pytest.raises(InsufficientOscillations):
        limit_cycle_report(Trajectory(t, np.column_stack([t, t, t]), TK), 0)
    with pytest.raises(ValueError):
        limit_cycle_report(Trajectory(t, np.column_stack([t, t, t]), TK), 0, tail_fraction=0.0)


def test_baseline_limit_cycle(baseline):
    rep = limit_cycle_report(baseline, "N", tail_fraction=0.5)
    assert rep.converged
    assert 100 < rep.period < 400


def _poly(c, z):
    return ((c[0] * z + c[1]) * z + c[2]) * z + c[3]


def test_char_poly_at_eigenvalues():
    c = char_poly(jacobian_tk(TABLE1, critical_point(TABLE1)))
    for z in eigenvalues3(np.array(JACOBIAN, dtype=float)):
        assert abs(_poly(c, z)) < 1e-12
    # Reference values carry four decimals, so the residual there is bounded by
    # |p'(z)| times the rounding half-width in each of re and im.
    for z in EIGENVALUES:
        dp = 3 * c[0] * z * z + 2 * c[1] * z + c[2]
        assert abs(_poly(c, z)) <= abs(dp) * 5e-5 * math.sqrt(2)
