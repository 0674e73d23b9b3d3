import numpy as np
from hypothesis import assume, given, settings
from hypothesis import strategies as st
from hypothesis.extra.numpy import arrays

from oracles import brute_maxima, exact_det3, fd_jacobian
from sweepdyn.analysis import char_poly, critical_point, eigenvalues3, equilibrium_residual, jacobian_tk
from sweepdyn.errors import NoInteriorEquilibrium
from sweepdyn.integrator import Trajectory
from sweepdyn.model import TABLE1, TK, ParamSchedule, TkParams, params_at, tk_rhs
from sweepdyn.peaks import local_maxima_indices
from sweepdyn.sweep import envelope_maxima

entries = st.floats(-10, 10, allow_nan=False, allow_infinity=False)
small_ints = st.integers(-3, 3).map(float)


@settings(max_examples=1000, derandomize=True, deadline=None)
@given(arrays(np.float64, (3, 3), elements=st.one_of(entries, small_ints)))
def test_trace_and_determinant_identities(m):
    eigs = eigenvalues3(m)
    scale = max(1.0, float(np.abs(m).max()))
    assert abs(sum(eigs) - np.trace(m)) <= 1e-8 * scale
    assert abs(np.prod(eigs) - exact_det3(m)) <= 1e-8 * scale**3
    _, c2, c1, c0 = char_poly(m)
    for z in eigs:
        assert abs(-(z**3) + c2 * z**2 + c1 * z + c0) <= 1e-6 * scale**3


factor = st.floats(0.5, 2.0)
param_factors = st.fixed_dictionaries({name: factor for name in TABLE1.as_dict()})


@settings(max_examples=200, derandomize=True, deadline=None)
@given(param_factors, st.tuples(st.floats(0.01, 5), st.floats(0, 5), st.floats(0, 0.9)))
def test_jacobian_matches_finite_differences(factors, frac):
    p = TABLE1.scaled(factors)
    n, s, wfrac = frac
    x = np.array([n, s, wfrac * p.kmax / p.c])  # keeps K >= 0.1 kmax
    fd = fd_jacobian(lambda v: tk_rhs(v, p), x)
    exact = jacobian_tk(p, x)
    assert np.allclose(exact, fd, rtol=1e-6, atol=1e-6)


@settings(max_examples=100, derandomize=True, deadline=None)
@given(param_factors)
def test_critical_point_residual(factors):
    p = TABLE1.scaled(factors)
    try:
        cp = critical_point(p)
    except NoInteriorEquilibrium:
        assume(False)
    assert cp.N > 0 and cp.W > 0 and cp.S >= 0
    assert equilibrium_residual(p, cp) < 1e-10


@settings(max_examples=300, derandomize=True, deadline=None)
@given(st.lists(st.integers(0, 4), min_size=3, max_size=60))
def test_envelope_maxima_brute_force(values):
    y = np.array(values, dtype=float)
    assert local_maxima_indices(y) == brute_maxima(values)
    t = np.arange(len(y), dtype=float) * 0.5
    traj = Trajectory(t, np.column_stack([y, y, y]), TK)
    assert envelope_maxima(traj) == [(t[i], y[i]) for i in brute_maxima(values)]


@settings(max_examples=200, derandomize=True, deadline=None)
@given(st.lists(st.floats(0.1, 100), min_size=1, max_size=5, unique=True), st.floats(0, 1))
def test_params_at_breakpoint_boundaries(gaps, u):
    starts = np.cumsum([0.0] + gaps).tolist()
    segs = tuple((t, TABLE1.replace(kmax=3.0 + i)) for i, t in enumerate(starts))
    sched = ParamSchedule(segs, starts[-1] + 10.0)
    for i, t in enumerate(starts):
        assert params_at(sched, t).kmax == 3.0 + i
        if i:
            assert params_at(sched, np.nextafter(t, -np.inf)).kmax == 3.0 + i - 1
    t = starts[0] + u * (sched.horizon_end - starts[0])
    expected = max(i for i, s in enumerate(starts) if s <= t)
    assert params_at(sched, t).kmax == 3.0 + expected


@settings(max_examples=100, derandomize=True, deadline=None)
@given(st.floats(0.1, 10))
def test_time_rescaling_invariance(lam):
    # Scaling every rate by lam scales the field by lam; the equilibrium is unchanged.
    p = TABLE1
    q = TkParams(r0=p.r0 * lam, rho0=p.rho0 * lam, c=p.c, a=p.a * lam, kmax=p.kmax,
                 b=p.b * lam, beta=p.beta * lam, delta=p.delta * lam, alpha=p.alpha * lam)
    x = (1.3, 0.4, 0.2)
    np.testing.assert_allclose(tk_rhs(x, q), lam * tk_rhs(x, p), rtol=1e-12)
    np.testing.assert_allclose(critical_point(q), critical_point(p), rtol=1e-12)
