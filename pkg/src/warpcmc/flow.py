"""Unit-speed conformal flow of hypersurfaces toward the inner boundary.

Rescaling the ambient metric g by the inverse square of the potential
f = h' turns the inward normal flow with speed f into a flow by
unit-speed geodesics of the rescaled metric.  Each surface node
therefore obeys a fixed second-order ODE in the ambient coordinates;
no normal vector has to be rebuilt between steps, and the surface
geometry is recovered from spectral derivatives of the transported
parametrization whenever a report is needed.

The payoff is a family of audited monotone quantities: the weighted
curvature integral Q = (n-1) int f/H, the swept weighted volume it
dominates, the per-node Riccati bound on f/H, and the plain area.
"""

from __future__ import annotations

import math
from dataclasses import dataclass, replace

import numpy as np

from .errors import (
    HypothesisError,
    NotApplicableError,
    ParameterError,
    WarpcmcError,
)
from .surface import GeometryReport, GraphSurface
from .warping import WarpingFunction

__all__ = [
    "FLOW_JACOBIAN_CUT",
    "FlowExhausted",
    "FlowState",
    "FlowTrace",
    "MonotonicityAudit",
    "FloorReport",
    "init_flow",
    "step",
    "run_flow",
    "monotonicity_audit",
    "radial_alignment",
    "area_floor_check",
]

# nodes whose area element has collapsed below this fraction of its
# initial value are past the reach of the smooth flow (cut locus)
FLOW_JACOBIAN_CUT = 1e-4

# per-step budget for the growth of | |v|_g/f - 1 |; a step that adds
# more than this is retried with half the substep until it complies
SPEED_DRIFT_STEP = 1e-11


class FlowExhausted(WarpcmcError):
    """Every node has left the smooth regime; the flow ended normally."""


@dataclass(frozen=True)
class FlowState:
    """Snapshot of the flow at one parameter time.

    ``points`` and ``velocities`` hold the node coordinates and their
    time derivatives, components stacked along the last axis: (r, y)
    with y the unit sphere position in full mode, (r, beta) with beta
    the polar angle in axisymmetric mode.  ``report`` is the geometry
    of the current surface, ``jacobian_factor`` the per-node ratio of
    the current to the initial area element, and ``active`` the mask
    of nodes still inside the smooth regime.  Deactivation is
    permanent; integral quantities only ever sum over active nodes.
    """

    warping: WarpingFunction
    engine: object
    t: float
    points: np.ndarray
    velocities: np.ndarray
    report: GeometryReport
    q_value: float
    jacobian_factor: np.ndarray
    active: np.ndarray
    frozen: np.ndarray
    initial_density: np.ndarray

    @property
    def dim(self) -> int:
        return self.warping.dim


@dataclass(frozen=True)
class FlowTrace:
    """Sampled history of one flow run.

    ``per_node_fH`` and ``per_node_f`` carry one row per record with
    inactive nodes masked as NaN; they feed the node-wise Riccati
    audit.  ``swept_weighted_volume`` accumulates n int f^2 dmu by the
    trapezoid rule over every internal step, not just the records.
    """

    dim: int
    variant: str
    times: np.ndarray
    q_values: np.ndarray
    areas: np.ndarray
    min_alignment: np.ndarray
    active_counts: np.ndarray
    swept_weighted_volume: np.ndarray
    per_node_fH: np.ndarray
    per_node_f: np.ndarray


# ---------------------------------------------------------------------------
# transported-parametrization geometry


def _full_geometry(warping, engine, points, orient=None):
    """Geometry of a parametrized surface (r, y): S^2 -> ambient.

    ``orient`` optionally supplies the flow velocity; the normal sign
    is then chosen so the surface moves against it, which keeps the
    orientation consistent once the surface is no longer a graph.
    Returns the report plus the normal components needed by callers.
    """
    r_nodes = points[..., 0]
    y_nodes = points[..., 1:4]

    rr, r1, r2, dr11, dr12, dr22 = engine.on_frame_jet(r_nodes)
    comp = [engine.on_frame_jet(y_nodes[..., c]) for c in range(3)]
    y = np.stack([c[0] for c in comp], axis=-1)
    y1 = np.stack([c[1] for c in comp], axis=-1)
    y2 = np.stack([c[2] for c in comp], axis=-1)
    d11 = np.stack([c[3] for c in comp], axis=-1)
    d12 = np.stack([c[4] for c in comp], axis=-1)
    d22 = np.stack([c[5] for c in comp], axis=-1)

    h, hp, _, _ = warping.jet(rr)

    g_y11 = np.einsum("...c,...c->...", y1, y1)
    g_y12 = np.einsum("...c,...c->...", y1, y2)
    g_y22 = np.einsum("...c,...c->...", y2, y2)
    gam11 = r1 * r1 + h * h * g_y11
    gam12 = r1 * r2 + h * h * g_y12
    gam22 = r2 * r2 + h * h * g_y22
    det = gam11 * gam22 - gam12 * gam12
    if np.min(det) <= 0.0:
        raise WarpcmcError("degenerate parametrization: induced metric not positive")

    # orthonormal frame of the tangent plane of S^2 at y; the seed axis is
    # the coordinate direction least aligned with y at each node
    seed = np.argmin(np.abs(y), axis=-1)
    axis = np.zeros_like(y)
    np.put_along_axis(axis, seed[..., None], 1.0, axis=-1)
    u = axis - np.einsum("...c,...c->...", axis, y)[..., None] * y
    u = u / np.linalg.norm(u, axis=-1, keepdims=True)
    v = np.cross(y, u)

    # ambient orthonormal components of the two tangent vectors
    t1 = (r1, h * np.einsum("...c,...c->...", u, y1), h * np.einsum("...c,...c->...", v, y1))
    t2 = (r2, h * np.einsum("...c,...c->...", u, y2), h * np.einsum("...c,...c->...", v, y2))
    n_r = t1[1] * t2[2] - t1[2] * t2[1]
    n_u = t1[2] * t2[0] - t1[0] * t2[2]
    n_v = t1[0] * t2[1] - t1[1] * t2[0]
    norm = np.sqrt(n_r * n_r + n_u * n_u + n_v * n_v)
    n_r, n_u, n_v = n_r / norm, n_u / norm, n_v / norm

    if orient is None:
        flip = n_r < 0.0
    else:
        vr = orient[..., 0]
        vy = orient[..., 1:4]
        v_u = np.einsum("...c,...c->...", u, vy)
        v_v = np.einsum("...c,...c->...", v, vy)
        # the flow moves along -f nu, so g(nu, v) must come out negative
        flip = n_r * vr + h * (n_u * v_u + n_v * v_v) > 0.0
    sign = np.where(flip, -1.0, 1.0)
    n_r, n_u, n_v = sign * n_r, sign * n_u, sign * n_v
    nu_y = (n_u[..., None] * u + n_v[..., None] * v) / h[..., None]

    def second(dab, ga, rda, rdb, ya, yb):
        tang = np.einsum("...c,...c->...", nu_y, dab)
        mix = rda * np.einsum("...c,...c->...", yb, nu_y) + rdb * np.einsum(
            "...c,...c->...", ya, nu_y
        )
        return -(n_r * (ga) + h * h * tang + h * hp * mix)

    ii11 = second(d11, dr11 - h * hp * g_y11, r1, r1, y1, y1)
    ii12 = second(d12, dr12 - h * hp * g_y12, r1, r2, y1, y2)
    ii22 = second(d22, dr22 - h * hp * g_y22, r2, r2, y2, y2)

    mean = (gam22 * ii11 - 2.0 * gam12 * ii12 + gam11 * ii22) / det

    # shape operator in an orthonormal surface frame via the Cholesky
    # congruence of the induced metric, as in the graph pipeline
    l11 = np.sqrt(gam11)
    l21 = gam12 / l11
    l22 = np.sqrt(gam22 - l21 * l21)
    ratio = l21 / l11
    a11 = ii11 / l11
    a12 = ii12 / l11
    b11 = (ii12 - l21 * a11) / l22
    b12 = (ii22 - l21 * a12) / l22
    s11 = a11 / l11
    s12 = (a12 - a11 * ratio) / l22
    s21 = b11 / l11
    s22 = (b12 - b11 * ratio) / l22
    s12 = 0.5 * (s12 + s21)
    deficit = np.sqrt(2.0 * (0.25 * (s11 - s22) ** 2 + s12 * s12))

    density = np.sqrt(det)
    report = GeometryReport(
        mode="full",
        area=float(np.sum(engine.area_weights * density)),
        radii=rr,
        warp=h,
        potential=hp,
        mean_curvature=mean,
        shape_deficit=deficit,
        nu_radial=n_r,
        support=h * n_r,
        area_density=density,
        metric=(gam11, gam12, gam22),
        second_form=(ii11, ii12, ii22),
    )
    return report, nu_y


def _axisym_geometry(warping, engine, points, orient=None):
    """Geometry of a meridian-parametrized axisymmetric surface (r, beta)."""
    n = warping.dim
    r_nodes = points[..., 0]
    beta = points[..., 1]

    rr, r1, r11, _ = engine.on_frame_jet(r_nodes)
    # beta itself is not smooth across the poles in the polynomial basis,
    # but cos(beta) is, and the angle derivatives recover from it exactly
    cc, c1, c11, _ = engine.on_frame_jet(np.cos(beta))
    cc = np.clip(cc, -1.0, 1.0)
    sin_b = np.sqrt(np.maximum(1.0 - cc * cc, 1e-300))
    b1 = -c1 / sin_b
    b11 = -(c11 + cc * b1 * b1) / sin_b

    h, hp, _, _ = warping.jet(rr)
    gam11 = r1 * r1 + h * h * b1 * b1
    if np.min(gam11) <= 0.0:
        raise WarpcmcError("degenerate parametrization: induced metric not positive")
    sq = np.sqrt(gam11)
    n_r = h * b1 / sq
    n_b = -r1 / sq
    if orient is None:
        flip = n_r < 0.0
    else:
        flip = n_r * orient[..., 0] + n_b * h * orient[..., 1] > 0.0
    sign = np.where(flip, -1.0, 1.0)
    n_r, n_b = sign * n_r, sign * n_b

    ii_m = -(n_r * (r11 - h * hp * b1 * b1) + h * n_b * b11 + 2.0 * hp * r1 * b1 * n_b)
    s_m = ii_m / gam11
    s_t = (hp / h) * n_r + (cc / sin_b) * (n_b / h)
    mean = s_m + (n - 2) * s_t
    deficit = math.sqrt((n - 2) / (n - 1)) * np.abs(s_m - s_t)

    trans = (h * sin_b / engine.sin_theta) ** (n - 2)
    density = sq * trans
    gam_t = h * h * sin_b * sin_b / engine.sin_theta**2
    report = GeometryReport(
        mode="axisym",
        area=float(np.sum(engine.area_weights * density)),
        radii=rr,
        warp=h,
        potential=hp,
        mean_curvature=mean,
        shape_deficit=deficit,
        nu_radial=n_r,
        support=h * n_r,
        area_density=density,
        metric=(gam11, gam_t),
        second_form=(ii_m, s_t * gam_t),
    )
    return report, n_b / h


def _geometry(warping, engine, points, orient=None):
    if engine.kind == "full":
        return _full_geometry(warping, engine, points, orient)
    return _axisym_geometry(warping, engine, points, orient)


def _masked_sum(engine, values, mask) -> float:
    w = engine.area_weights
    return float(np.sum(np.where(mask, values, 0.0) * w))


# ---------------------------------------------------------------------------
# flow construction and stepping


def init_flow(surface: GraphSurface) -> FlowState:
    """Start the conformal flow from a graph surface.

    The initial velocity is -f nu, the inward normal scaled by the
    potential; in the rescaled metric this is a unit vector, and the
    flow preserves that normalization exactly.
    """
    warping = surface.warping
    engine = surface.engine
    rep0 = surface.geometry()
    if float(np.min(rep0.mean_curvature)) <= 0.0:
        raise HypothesisError(
            "conformal flow needs strictly positive mean curvature at the start"
        )
    if engine.kind == "full":
        sin_t = engine.sin_theta[:, None]
        cos_t = engine.x[:, None]
        phi = engine.phi[None, :]
        y = np.stack(
            [
                sin_t * np.cos(phi),
                sin_t * np.sin(phi),
                np.broadcast_to(cos_t, (engine.nlat, engine.nlon)).copy(),
            ],
            axis=-1,
        )
        points = np.concatenate([surface.radii[..., None], y], axis=-1)
    else:
        points = np.stack([surface.radii, engine.theta], axis=-1)

    report, nu_extra = _geometry(warping, engine, points)
    f = report.potential
    if engine.kind == "full":
        vel = np.concatenate(
            [(-f * report.nu_radial)[..., None], -f[..., None] * nu_extra], axis=-1
        )
    else:
        vel = np.stack([-f * report.nu_radial, -f * nu_extra], axis=-1)

    active = np.ones(report.radii.shape, dtype=bool)
    frozen = np.zeros_like(active)
    fh = report.potential / report.mean_curvature
    q0 = (warping.dim - 1) * _masked_sum(engine, fh * report.area_density, active)
    return FlowState(
        warping=warping,
        engine=engine,
        t=0.0,
        points=points,
        velocities=vel,
        report=report,
        q_value=q0,
        jacobian_factor=np.ones(report.radii.shape),
        active=active,
        frozen=frozen,
        initial_density=report.area_density,
    )


def _rhs(warping, points, velocities, full: bool, low_clip: float):
    """Geodesic right-hand side of the rescaled metric in g coordinates.

    Radii are clipped into the open chart before jet evaluation so that
    intermediate integrator stages of runaway nodes stay finite; runaway
    nodes themselves are frozen by the caller right after the step.
    """
    r = np.clip(points[..., 0], low_clip, warping.r_bar * (1.0 - 1e-15))
    h, hp, hpp, _ = warping.jet(r)
    hp_safe = np.where(np.abs(hp) > 1e-300, hp, 1e-300)
    psi = -hpp / hp_safe
    vr = velocities[..., 0]
    if full:
        y = points[..., 1:4]
        vy = velocities[..., 1:4]
        yy = np.einsum("...c,...c->...", vy, vy)
        ar = h * hp * yy + psi * (h * h * yy - vr * vr)
        ay = -yy[..., None] * y - (2.0 * (hp / h + psi) * vr)[..., None] * vy
        dp = np.concatenate([vr[..., None], vy], axis=-1)
        dv = np.concatenate([ar[..., None], ay], axis=-1)
    else:
        vb = velocities[..., 1]
        yy = vb * vb
        ar = h * hp * yy + psi * (h * h * yy - vr * vr)
        ab = -2.0 * (hp / h + psi) * vr * vb
        dp = np.stack([vr, vb], axis=-1)
        dv = np.stack([ar, ab], axis=-1)
    return dp, dv


def _integrate(warping, points, velocities, dt, nsub, full, low_clip):
    p, v = points, velocities
    for _ in range(nsub):
        hdt = dt / nsub
        k1p, k1v = _rhs(warping, p, v, full, low_clip)
        k2p, k2v = _rhs(warping, p + 0.5 * hdt * k1p, v + 0.5 * hdt * k1v, full, low_clip)
        k3p, k3v = _rhs(warping, p + 0.5 * hdt * k2p, v + 0.5 * hdt * k2v, full, low_clip)
        k4p, k4v = _rhs(warping, p + hdt * k3p, v + hdt * k3v, full, low_clip)
        p = p + (hdt / 6.0) * (k1p + 2.0 * k2p + 2.0 * k3p + k4p)
        v = v + (hdt / 6.0) * (k1v + 2.0 * k2v + 2.0 * k3v + k4v)
        if full:
            y = p[..., 1:4]
            y = y / np.linalg.norm(y, axis=-1, keepdims=True)
            vy = v[..., 1:4]
            vy = vy - np.einsum("...c,...c->...", vy, y)[..., None] * y
            p = np.concatenate([p[..., :1], y], axis=-1)
            v = np.concatenate([v[..., :1], vy], axis=-1)
    return p, v


def _speed_ratio(warping, points, velocities, full, low_clip):
    r = np.clip(points[..., 0], low_clip, warping.r_bar * (1.0 - 1e-15))
    h, hp, _, _ = warping.jet(r)
    vr = velocities[..., 0]
    if full:
        yy = np.einsum("...c,...c->...", velocities[..., 1:4], velocities[..., 1:4])
    else:
        yy = velocities[..., 1] ** 2
    return np.sqrt(vr * vr + h * h * yy) / np.where(hp > 1e-300, hp, 1e-300)


def step(state: FlowState, dt: float, jacobian_cut: float = FLOW_JACOBIAN_CUT) -> FlowState:
    """Advance the flow by dt with a classical RK4 geodesic step.

    The substep is halved until the rescaled-metric speed of every
    active node stays within its per-step drift budget.  After the
    move the surface geometry is recomputed, nodes whose area element
    fell below the jacobian cut or whose mean curvature left the
    positive cone are deactivated for good, and nodes that escaped
    the coordinate chart are frozen in place.
    """
    if not (dt > 0.0):
        raise ParameterError(f"flow step must be positive, got {dt}")
    if not (jacobian_cut > 0.0):
        raise ParameterError("jacobian_cut must be positive")
    if not bool(np.any(state.active)):
        raise FlowExhausted("every node is inactive; the flow has ended")

    warping, engine = state.warping, state.engine
    full = engine.kind == "full"
    low_clip = 1e-4 * warping.r_bar
    move = ~state.frozen

    ratio0 = _speed_ratio(warping, state.points, state.velocities, full, low_clip)
    nsub = 1
    while True:
        p_new, v_new = _integrate(
            warping, state.points, state.velocities, dt, nsub, full, low_clip
        )
        ratio1 = _speed_ratio(warping, p_new, v_new, full, low_clip)
        drift = np.abs(ratio1 - ratio0)[state.active & move]
        if drift.size == 0 or float(np.max(drift)) <= SPEED_DRIFT_STEP:
            break
        nsub *= 2
        if nsub > 4096:
            raise WarpcmcError("speed drift not controllable by substepping")

    bad = ~np.isfinite(p_new).all(axis=-1) | ~np.isfinite(v_new).all(axis=-1)
    r_new = p_new[..., 0]
    escaped = (r_new < 5e-4 * warping.r_bar) | (r_new > warping.r_bar * (1.0 - 1e-9))
    freeze_now = move & (escaped | bad)
    points = np.where((state.frozen | freeze_now)[..., None], state.points, p_new)
    velocities = np.where((state.frozen | freeze_now)[..., None], state.velocities, v_new)
    frozen = state.frozen | freeze_now

    report, _ = _geometry(warping, engine, points, orient=velocities)
    jac = report.area_density / state.initial_density
    active = (
        state.active
        & ~frozen
        & (report.mean_curvature > 0.0)
        & (jac > jacobian_cut)
    )
    fh = np.where(active, report.potential / np.where(active, report.mean_curvature, 1.0), 0.0)
    q = (warping.dim - 1) * _masked_sum(engine, fh * report.area_density, active)
    area = _masked_sum(engine, report.area_density, active)
    report = replace(report, area=area)
    return FlowState(
        warping=warping,
        engine=engine,
        t=state.t + dt,
        points=points,
        velocities=velocities,
        report=report,
        q_value=q,
        jacobian_factor=jac,
        active=active,
        frozen=frozen,
        initial_density=state.initial_density,
    )


# ---------------------------------------------------------------------------
# driver, trace, audits


def _swept_integrand(state: FlowState) -> float:
    rep = state.report
    return state.dim * _masked_sum(
        state.engine, rep.potential**2 * rep.area_density, state.active
    )


def _cumulative_swept(samples: np.ndarray, dt: float, record_steps) -> np.ndarray:
    """Cumulative time integral of the swept-volume rate at the records.

    Composite trapezoid over every step, sharpened by the endpoint
    derivative correction -dt^2/12 (I'(t_k) - I'(0)); with second-order
    difference estimates of I' this is exact for quadratic rates and
    fourth-order accurate in general, so the audit tolerance is not
    eaten by the accumulation itself.
    """
    cum = np.concatenate([[0.0], np.cumsum(0.5 * (samples[1:] + samples[:-1]) * dt)])
    if samples.size < 3:
        return cum[np.asarray(record_steps)]
    deriv = np.empty_like(samples)
    deriv[1:-1] = (samples[2:] - samples[:-2]) / (2.0 * dt)
    deriv[0] = (-3.0 * samples[0] + 4.0 * samples[1] - samples[2]) / (2.0 * dt)
    deriv[-1] = (3.0 * samples[-1] - 4.0 * samples[-2] + samples[-3]) / (2.0 * dt)
    idx = np.asarray(record_steps)
    out = cum[idx] - dt * dt / 12.0 * (deriv[idx] - deriv[0])
    out[idx == 0] = 0.0
    return out


def _record(state: FlowState):
    rep = state.report
    active = state.active
    fh = np.where(active, rep.potential / np.where(active, rep.mean_curvature, 1.0), np.nan)
    f = np.where(active, rep.potential, np.nan)
    if np.any(active):
        align = float(np.min(rep.nu_radial[active]))
    else:
        align = np.nan
    return fh.ravel(), f.ravel(), align, int(np.count_nonzero(active))


def run_flow(
    start,
    t_end: float,
    dt_max: float | None = None,
    record_every: int = 1,
    jacobian_cut: float = FLOW_JACOBIAN_CUT,
):
    """Run the conformal flow to t_end and sample its history.

    ``start`` is a graph surface or an existing flow state.  The step
    is uniform, chosen as the largest value not exceeding ``dt_max``
    (default 1e-3 r_bar) that lands on t_end exactly; records are
    taken every ``record_every`` steps plus the endpoints.  The run
    ends early, normally, if every node deactivates.

    Returns (trace, final_state).
    """
    state = init_flow(start) if isinstance(start, GraphSurface) else start
    if not (t_end > state.t):
        raise ParameterError("t_end must exceed the current flow time")
    if record_every < 1:
        raise ParameterError("record_every must be at least 1")
    if dt_max is None:
        dt_max = 1e-3 * state.warping.r_bar
    if not (dt_max > 0.0):
        raise ParameterError("dt_max must be positive")

    span = t_end - state.t
    nsteps = max(1, int(math.ceil(span / dt_max - 1e-12)))
    dt = span / nsteps
    t0 = state.t

    times = [state.t]
    qs = [state.q_value]
    areas = [state.report.area]
    fh0, f0, align0, count0 = _record(state)
    fh_rows = [fh0]
    f_rows = [f0]
    aligns = [align0]
    counts = [count0]
    record_steps = [0]

    samples = [_swept_integrand(state)]
    for k in range(nsteps):
        try:
            state = step(state, dt, jacobian_cut=jacobian_cut)
        except FlowExhausted:
            break
        # rebase the clock on the exact uniform grid; accumulating dt
        # drifts by an ulp per step and the endpoint must land exactly
        state = replace(state, t=t0 + span * ((k + 1) / nsteps))
        samples.append(_swept_integrand(state))
        if (k + 1) % record_every == 0 or k == nsteps - 1 or not np.any(state.active):
            fh, f, align, count = _record(state)
            times.append(state.t)
            qs.append(state.q_value)
            areas.append(state.report.area)
            fh_rows.append(fh)
            f_rows.append(f)
            aligns.append(align)
            counts.append(count)
            record_steps.append(k + 1)
        if not np.any(state.active):
            break

    swept = _cumulative_swept(np.asarray(samples), dt, record_steps)
    trace = FlowTrace(
        dim=state.dim,
        variant=state.warping.variant,
        times=np.asarray(times),
        q_values=np.asarray(qs),
        areas=np.asarray(areas),
        min_alignment=np.asarray(aligns),
        active_counts=np.asarray(counts),
        swept_weighted_volume=np.asarray(swept),
        per_node_fH=np.asarray(fh_rows),
        per_node_f=np.asarray(f_rows),
    )
    return trace, state


@dataclass(frozen=True)
class MonotonicityAudit:
    """Worst slacks of the four monotone quantities along a flow.

    Slacks are signed so that compliance means q_slack <= q_tol,
    swept_slack >= -swept_tol, riccati_slack <= riccati_tol and
    area_slack <= area_tol.
    """

    q_slack: float
    q_tol: float
    q_ok: bool
    swept_slack: float
    swept_tol: float
    swept_ok: bool
    riccati_slack: float
    riccati_tol: float
    riccati_ok: bool
    area_slack: float
    area_tol: float
    area_ok: bool
    passed: bool


def monotonicity_audit(
    trace: FlowTrace,
    weighted_volumes,
    tol_riccati: float = 1e-5,
) -> MonotonicityAudit:
    """Audit the monotone quantities sampled by a flow trace.

    Checks, in order: the weighted curvature integral Q never rises;
    the drop of Q dominates the swept weighted volume; every node
    satisfies the finite-difference Riccati bound
    d/dt (f/H) <= -f^2/(n-1) + tol; the area never rises.
    """
    wv = np.asarray(weighted_volumes, dtype=float)
    if wv.shape != trace.times.shape:
        raise ParameterError("weighted_volumes must align with the trace times")
    q0 = float(trace.q_values[0])
    scale = max(abs(q0), 1e-300)

    dq = np.diff(trace.q_values)
    q_slack = float(np.max(dq)) if dq.size else 0.0
    q_tol = 1e-7 * scale

    swept_slack = float(np.min(q0 - trace.q_values - wv))
    swept_tol = 1e-6 * scale

    n = trace.dim
    worst = -np.inf
    for k in range(len(trace.times) - 1):
        dt = trace.times[k + 1] - trace.times[k]
        a, b = trace.per_node_fH[k], trace.per_node_fH[k + 1]
        fa, fb = trace.per_node_f[k], trace.per_node_f[k + 1]
        both = np.isfinite(a) & np.isfinite(b)
        if not np.any(both):
            continue
        rate = (b[both] - a[both]) / dt
        fbar = 0.5 * (fa[both] + fb[both])
        worst = max(worst, float(np.max(rate + fbar * fbar / (n - 1))))
    riccati_slack = worst if np.isfinite(worst) else 0.0

    da = np.diff(trace.areas)
    area_slack = float(np.max(da)) if da.size else 0.0
    area_tol = 1e-7 * max(float(trace.areas[0]), 1e-300)

    q_ok = q_slack <= q_tol
    swept_ok = swept_slack >= -swept_tol
    riccati_ok = riccati_slack <= tol_riccati
    area_ok = area_slack <= area_tol
    return MonotonicityAudit(
        q_slack=q_slack,
        q_tol=q_tol,
        q_ok=q_ok,
        swept_slack=swept_slack,
        swept_tol=swept_tol,
        swept_ok=swept_ok,
        riccati_slack=riccati_slack,
        riccati_tol=tol_riccati,
        riccati_ok=riccati_ok,
        area_slack=area_slack,
        area_tol=area_tol,
        area_ok=area_ok,
        passed=q_ok and swept_ok and riccati_ok and area_ok,
    )


def radial_alignment(state: FlowState) -> float:
    """Minimum of <d/dr, nu> over active nodes.

    Only meaningful when the chart has an inner boundary slice for the
    flow to align with; ball-type ambients have no such boundary.
    """
    if state.warping.variant != "boundary":
        raise NotApplicableError("radial alignment needs a boundary-type ambient")
    if not bool(np.any(state.active)):
        raise FlowExhausted("every node is inactive; the flow has ended")
    return float(np.min(state.report.nu_radial[state.active]))


@dataclass(frozen=True)
class FloorReport:
    """Boundary-asymptotics checks on one flow state."""

    area: float
    area_floor: float
    area_ok: bool
    minkowski_lhs: float
    minkowski_bound: float
    minkowski_ok: bool
    q_value: float
    q_floor: float
    q_ok: bool
    alignment: float
    passed: bool


def area_floor_check(state: FlowState, tol: float = 1e-6) -> FloorReport:
    """Check the boundary area floor and its companion bounds.

    The active surface must keep at least the inner boundary area
    h(0)^{n-1} vol(N); the weighted Minkowski bound must hold on it;
    and Q must dominate the boundary volume term scaled by the current
    worst radial alignment.
    """
    if state.warping.variant != "boundary":
        raise NotApplicableError("the area floor concerns boundary-type ambients")
    if not bool(np.any(state.active)):
        raise FlowExhausted("every node is inactive; the flow has ended")
    w = state.warping
    n = w.dim
    rep = state.report
    active = state.active
    h0 = w.jet(0.0)[0]
    base = w.base_volume

    area = rep.area
    floor = h0 ** (n - 1) * base
    area_ok = area >= floor - tol

    ratio = np.where(active, rep.mean_curvature / np.where(active, rep.potential, 1.0), 0.0)
    lhs = _masked_sum(state.engine, ratio * rep.support * rep.area_density, active)
    bound = (n - 1) * area
    mink_ok = lhs <= bound + tol * max(area, 1.0)

    align = float(np.min(rep.nu_radial[active]))
    q_floor = align * h0**n * base
    q_ok = state.q_value >= q_floor - tol

    return FloorReport(
        area=area,
        area_floor=floor,
        area_ok=area_ok,
        minkowski_lhs=lhs,
        minkowski_bound=bound,
        minkowski_ok=mink_ok,
        q_value=state.q_value,
        q_floor=q_floor,
        q_ok=q_ok,
        alignment=align,
        passed=area_ok and mink_ok and q_ok,
    )
