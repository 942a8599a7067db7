"""Admissibility-preserving limiters for the single-stage scheme.

The cell-average update of the scheme decomposes into fictitious finite
volume updates at the solution points (weighted by the quadrature weights).
Keeping every fictitious update inside the admissibility set makes the
scheme admissibility preserving in means; the nodal scaling limiter then
restores pointwise admissibility. Three mechanisms live here:

* interface flux limiting: the high-order time-averaged face flux is blended
  with a first-order Rusanov flux, one theta per constraint per face, until
  both face-adjacent fictitious updates satisfy every constraint;
* source limiting: one theta per element blending the time-averaged source
  with the instantaneous one so the source half of the split cell-average
  update stays admissible;
* nodal scaling: squeeze nodal values toward the (admissible) cell average.

Concave constraints use a closed-form theta; non-concave ones (the Ten
Moment determinant) use a safeguarded scan-plus-bisection root solve.
"""

from dataclasses import dataclass

import numpy as np

from .errors import AdmissibilityError

_DIV_EPS = 1e-13


@dataclass
class AdmissibilityConfig:
    """Tunables of the limiter chain.

    tolerance_fraction: constraint tolerance as a fraction of the low-order
        constraint value.
    eps_div: guard added to denominators of the closed-form theta.
    strict_cfl: halve the time step so the split cell-average update is
        provably admissible (twice the standard CFL worth of headroom).
    det_solver: 'root' for the bisection solve on non-concave constraints,
        'concave' to reuse the closed-form formula (sub-optimal but cheap,
        kept for A/B comparison).
    """

    tolerance_fraction: float = 0.1
    eps_div: float = _DIV_EPS
    strict_cfl: bool = False
    det_solver: str = "root"
    scaling_floor_cap: float = 1e-10
    scaling_floor_fraction: float = 0.1


@dataclass
class FaceLimiterResult:
    flux: np.ndarray
    theta: np.ndarray
    n_limited: int
    min_theta: float


def low_order_face_flux(law, u_left, u_right, axis=0, validate=True):
    """First-order Rusanov flux between two nodal trace states."""
    if validate and law.n_constraints:
        law.check_admissible(u_left, context="low-order flux left state")
        law.check_admissible(u_right, context="low-order flux right state")
    if hasattr(law, "rusanov"):
        return law.rusanov(u_left, u_right, axis)
    lam = np.maximum(law.max_wave_speed(u_left, axis),
                     law.max_wave_speed(u_right, axis))
    return (0.5 * (law.flux(u_left, axis) + law.flux(u_right, axis))
            - 0.5 * lam * (u_right - u_left))


def fictitious_updates(u, f_interior, f_left, f_right, dt_eff, dx, weights):
    """Per-node finite volume updates whose weighted sum is the average update.

    Args:
        u: nodal states, shape (v, ne, nn).
        f_interior: first-order fluxes between adjacent nodes, (v, ne, nn-1).
        f_left, f_right: face fluxes of each element, (v, ne).
        dt_eff: effective time step of the decomposition.
        dx: element size.
        weights: quadrature weights, (nn,).
    """
    fluxes = np.concatenate(
        [f_left[:, :, None], f_interior, f_right[:, :, None]], axis=2)
    return u - (dt_eff / (weights * dx)) * (fluxes[:, :, 1:] - fluxes[:, :, :-1])


def blend_theta_concave(constraint, u_high, u_low, eps_tol, eps_div=_DIV_EPS):
    """Closed-form blend parameter for a concave constraint.

    Returns 1 where u_high already satisfies constraint >= eps_tol, else
    |eps - P(u_low)| / (|P(u_high) - P(u_low)| + eps_div) clamped to [0, 1].
    """
    p_high = np.asarray(constraint(u_high), dtype=float)
    p_low = np.asarray(constraint(u_low), dtype=float)
    return theta_from_values(p_high, p_low, eps_tol, eps_div)


def theta_from_values(p_high, p_low, eps_tol, eps_div=_DIV_EPS):
    violated = ~(p_high >= eps_tol)
    with np.errstate(invalid="ignore"):
        ratio = np.abs(eps_tol - p_low) / (np.abs(p_high - p_low) + eps_div)
        ratio = np.minimum(ratio, 1.0)
    ratio = np.where(np.isfinite(ratio), ratio, 0.0)
    return np.where(violated, ratio, 1.0)


def blend_theta_root(constraint, u_high, u_low, eps_tol, scan_steps=64,
                     bisect_iters=45):
    """Largest theta in [0, 1] with constraint(theta u_high + (1-theta) u_low) >= eps.

    Safeguarded: a downward scan brackets the admissible/inadmissible
    crossing, bisection refines it to ~1e-13; the returned value is on the
    admissible side. Returns 0 when no admissible theta exists. Works on
    batches (states shaped (v, m), eps broadcastable to (m,)).
    """
    u_high = np.asarray(u_high, dtype=float)
    u_low = np.asarray(u_low, dtype=float)
    scalar = u_high.ndim == 1
    if scalar:
        u_high = u_high[:, None]
        u_low = u_low[:, None]
    m = u_high.shape[1]
    eps_tol = np.broadcast_to(np.asarray(eps_tol, dtype=float), (m,))

    def ok(theta):
        with np.errstate(invalid="ignore", divide="ignore"):
            vals = np.asarray(constraint(theta * u_high + (1.0 - theta) * u_low))
        return vals >= eps_tol

    theta = np.ones(m)
    bad = ~ok(1.0)
    if np.any(bad):
        lo = np.zeros(m)
        hi = np.full(m, 1.0 / scan_steps)
        found = np.zeros(m, dtype=bool)
        for k in range(1, scan_steps + 1):
            if np.all(found | ~bad):
                break
            th = 1.0 - k / scan_steps
            newly = bad & ~found & ok(th)
            lo[newly] = th
            hi[newly] = th + 1.0 / scan_steps
            found |= newly
        for _ in range(bisect_iters):
            mid = 0.5 * (lo + hi)
            good = ok(mid)
            lo = np.where(good, mid, lo)
            hi = np.where(good, hi, mid)
        lo[bad & ~found] = 0.0
        theta[bad] = lo[bad]
    return float(theta[0]) if scalar else theta


def _theta_for_constraint(law, k, low_a, high_a, eps_a, act_a,
                          low_b, high_b, eps_b, act_b, cfg):
    """One theta per face/element handling both adjacent updates jointly."""
    concave = law.constraint_concave[k] or cfg.det_solver == "concave"
    if concave:
        pa_hi = law.constraint_values(high_a)[k]
        pa_lo = law.constraint_values(low_a)[k]
        pb_hi = law.constraint_values(high_b)[k]
        pb_lo = law.constraint_values(low_b)[k]
        th_a = np.where(act_a,
                        theta_from_values(pa_hi, pa_lo, eps_a, cfg.eps_div), 1.0)
        th_b = np.where(act_b,
                        theta_from_values(pb_hi, pb_lo, eps_b, cfg.eps_div), 1.0)
        return np.minimum(th_a, th_b)
    if hasattr(law, "theta_segment_pair"):
        viol_a = act_a & ~(law.constraint_values(high_a)[k] >= eps_a)
        viol_b = act_b & ~(law.constraint_values(high_b)[k] >= eps_b)
        return law.theta_segment_pair(k, low_a, high_a, eps_a, viol_a,
                                      low_b, high_b, eps_b, viol_b)

    def joint(u):
        # stacked segments: first half side a, second half side b
        return law.constraint_values(u)[k]

    m = low_a.shape[1]
    stacked_low = np.concatenate([low_a, low_b], axis=1)
    stacked_high = np.concatenate([high_a, high_b], axis=1)
    stacked_eps = np.concatenate([
        np.where(act_a, eps_a, -np.inf), np.where(act_b, eps_b, -np.inf)])
    th = blend_theta_root(joint, stacked_high, stacked_low, stacked_eps)
    return np.minimum(th[:m], th[m:])


def limit_interface_flux(flux_high, flux_low, u_node_left, u_node_right,
                         f_in_left, f_in_right, active_left, active_right,
                         w_first, w_last, dx_left, dx_right, dt_eff, law,
                         cfg: AdmissibilityConfig) -> FaceLimiterResult:
    """Blend high-order face fluxes until adjacent fictitious updates pass.

    Batched over faces: all arrays are (v, m) or (m,). `u_node_left` is the
    last solution node of the element left of each face, `u_node_right` the
    first node of the right element; `f_in_left`/`f_in_right` are the
    first-order fluxes immediately inside those elements. Inactive sides
    (domain boundaries) are skipped. Constraints are applied sequentially,
    recomputing the candidate updates after each blend.
    """
    c_left = dt_eff / (w_last * dx_left)
    c_right = dt_eff / (w_first * dx_right)
    low_left = u_node_left - c_left * (flux_low - f_in_left)
    low_right = u_node_right - c_right * (f_in_right - flux_low)

    flux = flux_high.copy()
    theta_all = np.ones(flux.shape[1])
    for k in range(law.n_constraints):
        high_left = u_node_left - c_left * (flux - f_in_left)
        high_right = u_node_right - c_right * (f_in_right - flux)
        frac = cfg.tolerance_fraction
        eps_left = frac * law.constraint_values(low_left)[k]
        eps_right = frac * law.constraint_values(low_right)[k]
        theta = _theta_for_constraint(
            law, k, low_left, high_left, eps_left, active_left,
            low_right, high_right, eps_right, active_right, cfg)
        needs = theta < 1.0
        if np.any(needs):
            with np.errstate(invalid="ignore"):
                blended = np.where(theta > 0.0,
                                   theta * flux + (1.0 - theta) * flux_low,
                                   flux_low)
            flux = np.where(needs, blended, flux)
            theta_all = np.minimum(theta_all, theta)
    limited = theta_all < 1.0
    return FaceLimiterResult(
        flux=flux, theta=theta_all, n_limited=int(np.count_nonzero(limited)),
        min_theta=float(theta_all.min()) if theta_all.size else 1.0)


def limit_source(u, source_avg_now, source_avg_lw, ubar, dt, law,
                 cfg: AdmissibilityConfig):
    """One blend parameter per element keeping the source half-update admissible.

    The split cell-average update writes u^{n+1} as the mean of a flux part
    and a source part (ubar + 2 dt Sbar)/2; this routine blends the
    time-averaged source average toward the instantaneous one until the
    source part satisfies every constraint. Arguments are cell averages:
    `source_avg_now` of s(u^n), `source_avg_lw` of the time-averaged source.

    Returns (theta, n_limited); callers apply S <- theta S + (1-theta) s.
    Raises AdmissibilityError when even the first-order source update is
    inadmissible (the time step is too large for the source term).
    """
    low = ubar + 2.0 * dt * source_avg_now
    p_low = law.constraint_values(low)
    for k, name in enumerate(law.constraint_names):
        if not np.all(p_low[k] > 0.0):
            raise AdmissibilityError(
                f"first-order source update violates {name} "
                f"(min {np.min(p_low[k]):.6g}); time step too large for source",
                constraint=name)

    end_low = 0.5 * low
    inactive = np.zeros(ubar.shape[1], dtype=bool)
    active = ~inactive
    theta_all = np.ones(ubar.shape[1])
    s_avg = source_avg_lw.copy()
    for k in range(law.n_constraints):
        end_high = 0.5 * (ubar + 2.0 * dt * s_avg)
        eps = cfg.tolerance_fraction * law.constraint_values(end_low)[k]
        theta = _theta_for_constraint(
            law, k, end_low, end_high, eps, active,
            end_low, end_high, eps, inactive, cfg)
        needs = theta < 1.0
        if np.any(needs):
            blended = theta * s_avg + (1.0 - theta) * source_avg_now
            s_avg = np.where(needs, blended, s_avg)
            theta_all = np.minimum(theta_all, theta)

    # safety net: the closed-form theta is only guaranteed for exactly
    # concave constraints, so verify and shrink toward the first-order
    # source if anything slipped through.
    for _ in range(60):
        end = 0.5 * (ubar + 2.0 * dt * s_avg)
        bad = np.any(law.constraint_values(end) <= 0.0, axis=0)
        if not np.any(bad):
            break
        theta_all = np.where(bad, 0.5 * theta_all, theta_all)
        s_avg = np.where(bad, theta_all * source_avg_lw
                         + (1.0 - theta_all) * source_avg_now, s_avg)

    return theta_all, int(np.count_nonzero(theta_all < 1.0))


def scaling_limiter(u, law, weights, cfg: AdmissibilityConfig | None = None):
    """Squeeze nodal values toward the cell average until constraints hold.

    Works on (v, ne, nn) nodal arrays (2-D callers flatten their element and
    node axes). The cell average must be admissible; each constraint is
    enforced sequentially with floor min(cap, fraction * P_k(avg)). Returns
    (limited array, number of modified nodes).
    """
    cfg = cfg or AdmissibilityConfig()
    ubar = np.einsum("ven,n->ve", u, weights)
    p_bar = law.constraint_values(ubar)
    for k, name in enumerate(law.constraint_names):
        if not np.all(p_bar[k] > 0.0):
            e_bad = int(np.argmin(p_bar[k]))
            raise AdmissibilityError(
                f"inadmissible cell average ({name} = {np.min(p_bar[k]):.6g}); "
                "upstream limiting failed", constraint=name, element=e_bad)

    out = u
    changed = np.zeros(u.shape[1], dtype=bool)
    for k in range(law.n_constraints):
        floor = np.minimum(cfg.scaling_floor_cap,
                           cfg.scaling_floor_fraction * p_bar[k])
        p_nodes = law.constraint_values(out)[k]
        if law.constraint_concave[k]:
            th_nodes = theta_from_values(p_nodes, p_bar[k][:, None],
                                         floor[:, None], cfg.eps_div)
            theta = th_nodes.min(axis=1)
        else:
            nv, ne, nn = out.shape
            viol = ~(p_nodes >= floor[:, None])
            theta = np.ones(ne)
            if np.any(viol):
                base = np.broadcast_to(ubar[:, :, None], out.shape)
                flat_low = base.reshape(nv, -1)
                flat_high = out.reshape(nv, -1)
                flat_eps = np.broadcast_to(floor[:, None], (ne, nn)).ravel()
                th = _segment_theta(law, k, flat_low, flat_high, flat_eps,
                                    viol.ravel())
                theta = th.reshape(ne, nn).min(axis=1)
            # non-concave: validate all nodes at the common theta, shrink if
            # the admissible set along some segment is not an interval
            for _ in range(60):
                cand = ubar[:, :, None] + theta[None, :, None] * (out - ubar[:, :, None])
                ok = law.constraint_values(cand)[k] >= floor[:, None]
                bad = ~np.all(ok, axis=1) & (theta > 0.0)
                if not np.any(bad):
                    break
                theta = np.where(bad, 0.75 * theta, theta)
        mask = theta < 1.0
        if np.any(mask):
            scaled = ubar[:, :, None] + theta[None, :, None] * (out - ubar[:, :, None])
            out = np.where(mask[None, :, None], scaled, out)
            changed |= mask
    n_nodes = int(np.count_nonzero(changed)) * u.shape[2]
    return out, n_nodes


def _segment_theta(law, k, flat_low, flat_high, flat_eps, viol):
    if hasattr(law, "theta_segment_pair"):
        inactive = np.zeros_like(viol)
        return law.theta_segment_pair(k, flat_low, flat_high, flat_eps, viol,
                                      flat_low, flat_high, flat_eps, inactive)

    def constraint(v):
        return law.constraint_values(v)[k]

    eps = np.where(viol, flat_eps, -np.inf)
    return blend_theta_root(constraint, flat_high, flat_low, eps)
