"""Conformal geodesic flow and its monotone-quantity audits.

Flat-ambient oracle: starting from the radius-1 slice, every node
moves as r(t) = 1 - t, so Q(t) = 4 pi (1-t)^3 and the swept weighted
volume equals Q(0) - Q(t) exactly.  On any slice start the trajectory
solves dr/dt = -h'(r), which an independent stiff integrator pins to
high accuracy.  The rescaled-metric speed is conserved bit-for-bit by
construction and audited here.
"""

import math

import numpy as np
import pytest
from scipy.integrate import solve_ivp

from warpcmc import (
    FlowExhausted,
    HypothesisError,
    NotApplicableError,
    ParameterError,
    area_floor_check,
    axisym_grid,
    euclidean_warping,
    full_sphere_grid,
    init_flow,
    monotonicity_audit,
    perturb_slice,
    radial_alignment,
    run_flow,
    slice_surface,
    step,
)


@pytest.fixture(scope="module")
def euclid_slice_flow():
    w = euclidean_warping(3, r_bar=3.0)
    surface = slice_surface(w, axisym_grid(3, 32), 1.0)
    return run_flow(surface, 0.5)


def test_flat_slice_q_oracle(euclid_slice_flow):
    trace, _ = euclid_slice_flow
    oracle = 4.0 * math.pi * (1.0 - trace.times) ** 3
    assert np.max(np.abs(trace.q_values - oracle)) < 1e-6 * 4.0 * math.pi
    # the recorded grid must include both endpoints
    assert trace.times[0] == 0.0
    assert trace.times[-1] == 0.5


def test_flat_slice_swept_equality(euclid_slice_flow):
    trace, _ = euclid_slice_flow
    drop = trace.q_values[0] - trace.q_values
    assert np.max(np.abs(drop - trace.swept_weighted_volume)) < 1e-9 * trace.q_values[0]


def test_flat_slice_audit_passes(euclid_slice_flow):
    trace, _ = euclid_slice_flow
    audit = monotonicity_audit(trace, trace.swept_weighted_volume)
    assert audit.q_ok and audit.swept_ok and audit.riccati_ok and audit.area_ok
    assert audit.passed


def test_flat_slice_area_oracle(euclid_slice_flow):
    trace, _ = euclid_slice_flow
    oracle = 4.0 * math.pi * (1.0 - trace.times) ** 2
    assert np.max(np.abs(trace.areas - oracle)) < 1e-8 * 4.0 * math.pi


def test_slice_flow_follows_radial_ode(schw3):
    surface = slice_surface(schw3, axisym_grid(3, 24), 2.0)
    t_end = 0.8
    trace, final = run_flow(surface, t_end)
    sol = solve_ivp(
        lambda t, r: [-schw3.jet(float(r[0]))[1]],
        (0.0, t_end),
        [2.0],
        rtol=1e-12,
        atol=1e-14,
        dense_output=True,
    )
    oracle = sol.sol(trace.times)[0]
    spread = np.nanmax(final.points[..., 0]) - np.nanmin(final.points[..., 0])
    assert spread < 1e-10
    sampled = np.nanmean(
        np.where(np.isfinite(trace.per_node_f), 1.0, np.nan), axis=1
    )
    assert np.all(np.isfinite(sampled))
    r_hist = []
    for k in range(trace.times.size):
        f_row = trace.per_node_f[k]
        r_hist.append(float(np.nanmean(f_row)))
    # f = h'(r) on a slice, so compare the potential histories
    f_oracle = np.array([schw3.jet(float(r))[1] for r in oracle])
    assert np.max(np.abs(np.array(r_hist) - f_oracle)) < 1e-8


def test_speed_is_conserved(schw3):
    surface = perturb_slice(schw3, axisym_grid(3, 32), 2.0, [(2, 0, 0.1)])
    state = init_flow(surface)
    s0 = _speed(state)
    assert np.max(np.abs(s0 - 1.0)) < 1e-13
    for _ in range(20):
        state = step(state, 0.01)
    s1 = _speed(state)
    assert np.max(np.abs(s1[state.active] - 1.0)) < 5e-10


def _speed(state):
    # speed in the rescaled metric f^{-2} g: exactly 1 along the flow
    w = state.warping
    r = state.points[..., 0]
    h, hp = w.jet(np.clip(r, 0.0, w.r_bar))[:2]
    vr = state.velocities[..., 0]
    if state.points.shape[-1] == 2:
        vy = state.velocities[..., 1]
        return np.sqrt(vr * vr + h * h * vy * vy) / hp
    vy = state.velocities[..., 1:]
    yy = np.sum(vy * vy, axis=-1)
    return np.sqrt(vr * vr + h * h * yy) / hp


def test_perturbed_flow_audit_axisym(schw3):
    surface = perturb_slice(schw3, axisym_grid(3, 48), 2.0, [(2, 0, 0.15)])
    trace, final = run_flow(surface, 1.0)
    audit = monotonicity_audit(trace, trace.swept_weighted_volume)
    assert audit.passed
    assert np.all(np.diff(trace.q_values) < 0.0)


def test_perturbed_flow_audit_full(schw3):
    surface = perturb_slice(
        schw3, full_sphere_grid(24), 2.0, [(2, 1, 0.1), (3, -1, 0.06)]
    )
    trace, final = run_flow(surface, 0.6, dt_max=2e-3 * schw3.r_bar)
    audit = monotonicity_audit(trace, trace.swept_weighted_volume)
    assert audit.passed
    assert int(np.sum(final.active)) == final.active.size


def test_swept_dominates_on_perturbed_flow(schw3):
    surface = perturb_slice(schw3, axisym_grid(3, 48), 2.0, [(3, 0, 0.12)])
    trace, _ = run_flow(surface, 0.8)
    drop = trace.q_values[0] - trace.q_values
    gap = drop - trace.swept_weighted_volume
    assert np.min(gap) > -1e-6 * trace.q_values[0]
    # strictly positive once the surface has tilted
    assert gap[-1] > 1e-4


def test_alignment_on_slices_is_exact(schw3):
    surface = slice_surface(schw3, axisym_grid(3, 24), 1.5)
    trace, final = run_flow(surface, 0.5)
    assert np.max(np.abs(trace.min_alignment - 1.0)) < 1e-12
    assert radial_alignment(final) == pytest.approx(1.0, abs=1e-12)


def test_alignment_needs_boundary():
    w = euclidean_warping(3, r_bar=3.0)
    state = init_flow(slice_surface(w, axisym_grid(3, 16), 1.0))
    with pytest.raises(NotApplicableError):
        radial_alignment(state)
    with pytest.raises(NotApplicableError):
        area_floor_check(state)


def test_area_floor_on_boundary_flow(schw3):
    surface = perturb_slice(schw3, axisym_grid(3, 32), 1.2, [(2, 0, 0.08)])
    _, final = run_flow(surface, 1.0)
    floor = area_floor_check(final)
    assert floor.passed
    h0 = schw3.jet(0.0)[0]
    assert floor.area_floor == pytest.approx(h0**2 * 4.0 * math.pi, rel=1e-12)
    assert floor.area >= floor.area_floor - 1e-6


def test_flow_exhaustion_is_clean():
    # flowing the unit flat slice past t = 1 collapses every node
    w = euclidean_warping(3, r_bar=3.0)
    surface = slice_surface(w, axisym_grid(3, 16), 1.0)
    trace, final = run_flow(surface, 1.5)
    assert not bool(np.any(final.active))
    assert trace.times[-1] < 1.5
    assert trace.active_counts[-1] == 0
    with pytest.raises(FlowExhausted):
        step(final, 1e-3)


def test_trace_masks_inactive_nodes():
    w = euclidean_warping(3, r_bar=3.0)
    surface = slice_surface(w, axisym_grid(3, 16), 1.0)
    trace, _ = run_flow(surface, 1.5)
    assert np.all(np.isfinite(trace.per_node_fH[0]))
    assert np.all(~np.isfinite(trace.per_node_fH[-1]))


def test_step_guards(schw3):
    state = init_flow(slice_surface(schw3, axisym_grid(3, 16), 1.5))
    with pytest.raises(ParameterError):
        step(state, 0.0)
    with pytest.raises(ParameterError):
        step(state, 1e-3, jacobian_cut=0.0)
    with pytest.raises(ParameterError):
        run_flow(state, state.t)
    with pytest.raises(ParameterError):
        run_flow(state, 1.0, record_every=0)
    with pytest.raises(ParameterError):
        run_flow(state, 1.0, dt_max=-1e-3)


def test_init_flow_needs_mean_convexity():
    w = euclidean_warping(3)
    surface = perturb_slice(w, axisym_grid(3, 64), 1.0, [(5, 0, 0.25)])
    with pytest.raises(HypothesisError):
        init_flow(surface)


def test_monotonicity_audit_shape_guard(euclid_slice_flow):
    trace, _ = euclid_slice_flow
    with pytest.raises(ParameterError):
        monotonicity_audit(trace, trace.swept_weighted_volume[:-1])
