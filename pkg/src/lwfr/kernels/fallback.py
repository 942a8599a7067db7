"""Pure-numpy reference implementation of the hot pointwise kernels.

All kernels operate on batches of conserved Ten Moment states stored
component-first as C-contiguous float64 arrays of shape (6, n) with rows
(rho, rho*v1, rho*v2, E11, E12, E22). The compiled core in `_core.pyx`
implements the same signatures; either backend must produce results that
agree to roundoff.
"""

import numpy as np

SCAN_STEPS = 64
BISECT_ITERS = 45


def tm_primitives(u):
    """Velocities and pressure tensor entries: (v1, v2, p11, p12, p22)."""
    out = np.empty((5, u.shape[1]))
    rho = u[0]
    v1 = u[1] / rho
    v2 = u[2] / rho
    out[0] = v1
    out[1] = v2
    out[2] = 2.0 * u[3] - u[1] * v1
    out[3] = 2.0 * u[4] - u[1] * v2
    out[4] = 2.0 * u[5] - u[2] * v2
    return out


def tm_flux(u, axis):
    """Flux vector along coordinate axis 0 (x1) or 1 (x2)."""
    v1, v2, p11, p12, p22 = tm_primitives(u)
    f = np.empty_like(u)
    if axis == 0:
        f[0] = u[1]
        f[1] = p11 + u[1] * v1
        f[2] = p12 + u[1] * v2
        f[3] = (u[3] + p11) * v1
        f[4] = u[4] * v1 + 0.5 * (p11 * v2 + p12 * v1)
        f[5] = u[5] * v1 + p12 * v2
    else:
        f[0] = u[2]
        f[1] = p12 + u[1] * v2
        f[2] = p22 + u[2] * v2
        f[3] = u[3] * v2 + p12 * v1
        f[4] = u[4] * v2 + 0.5 * (p12 * v2 + p22 * v1)
        f[5] = (u[5] + p22) * v2
    return f


def tm_wave_speed(u, axis):
    """Largest characteristic speed bound |v_n| + sqrt(3 p_nn / rho)."""
    rho = u[0]
    if axis == 0:
        vn = u[1] / rho
        pnn = 2.0 * u[3] - u[1] * vn
    else:
        vn = u[2] / rho
        pnn = 2.0 * u[5] - u[2] * vn
    return np.abs(vn) + np.sqrt(3.0 * pnn / rho)


def tm_constraints(u):
    """Admissibility constraint values (rho, trace(p), det(p))."""
    out = np.empty((3, u.shape[1]))
    _, _, p11, p12, p22 = tm_primitives(u)
    out[0] = u[0]
    out[1] = p11 + p22
    out[2] = p11 * p22 - p12 * p12
    return out


def tm_rusanov(ul, ur, axis):
    """First-order Rusanov flux between two state batches."""
    lam = np.maximum(tm_wave_speed(ul, axis), tm_wave_speed(ur, axis))
    return 0.5 * (tm_flux(ul, axis) + tm_flux(ur, axis)) - 0.5 * lam * (ur - ul)


def _det_on_segment(ulow, uhigh, theta):
    u = theta * uhigh + (1.0 - theta) * ulow
    with np.errstate(divide="ignore", invalid="ignore"):
        rho = u[0]
        p11 = 2.0 * u[3] - u[1] * u[1] / rho
        p12 = 2.0 * u[4] - u[1] * u[2] / rho
        p22 = 2.0 * u[5] - u[2] * u[2] / rho
        return p11 * p22 - p12 * p12


def tm_theta_det_pair(ulow_a, uhigh_a, eps_a, act_a, ulow_b, uhigh_b, eps_b, act_b):
    """Largest theta in [0, 1] keeping det(p) >= eps on up to two segments.

    Each segment is theta*uhigh + (1-theta)*ulow; a deactivated side is
    ignored. A coarse downward scan brackets the admissible/inadmissible
    crossing, bisection then refines it; the returned theta is always on the
    admissible side of the bracket. Returns 0 where not even theta=0 is
    admissible (callers fall back to the pure low-order flux).
    """
    n = ulow_a.shape[1]

    def ok(la, ha, ea, aa, lb, hb, eb, ab, theta):
        with np.errstate(invalid="ignore"):
            good = np.where(aa, _det_on_segment(la, ha, theta) >= ea, True)
            good &= np.where(ab, _det_on_segment(lb, hb, theta) >= eb, True)
        return good

    theta = np.ones(n)
    bad = ~ok(ulow_a, uhigh_a, eps_a, act_a, ulow_b, uhigh_b, eps_b, act_b, 1.0)
    if not np.any(bad):
        return theta

    idx = np.where(bad)[0]
    args = (ulow_a[:, idx], uhigh_a[:, idx], eps_a[idx], act_a[idx],
            ulow_b[:, idx], uhigh_b[:, idx], eps_b[idx], act_b[idx])
    m = len(idx)
    lo = np.zeros(m)
    hi = np.full(m, 1.0 / SCAN_STEPS)
    found = np.zeros(m, dtype=bool)
    for k in range(1, SCAN_STEPS + 1):
        if np.all(found):
            break
        th = 1.0 - k / SCAN_STEPS
        newly = ~found & ok(*args, th)
        lo[newly] = th
        hi[newly] = th + 1.0 / SCAN_STEPS
        found |= newly
    for _ in range(BISECT_ITERS):
        mid = 0.5 * (lo + hi)
        good = ok(*args, mid)
        lo = np.where(good, mid, lo)
        hi = np.where(good, hi, mid)
    # not even theta=0 admissible -> pure low-order
    lo[~found] = 0.0
    theta[idx] = lo
    return theta
