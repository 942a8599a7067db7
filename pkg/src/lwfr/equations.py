"""Conservation law descriptors.

Two systems are provided: scalar linear advection (used as a test equation,
since its exact Lax-Wendroff flux is available in closed form) and the Ten
Moment Gaussian-closure equations with electron-quiver source terms.

State arrays are component-first: shape (n_vars, ...) with arbitrary trailing
batch axes. The Ten Moment conserved ordering is
(rho, rho*v1, rho*v2, E11, E12, E22) with the energy tensor
E = p/2 + rho*(v (x) v)/2.
"""

from dataclasses import dataclass
from typing import Callable, Optional

import numpy as np

from . import kernels
from .errors import AdmissibilityError


class ConservationLaw:
    """Minimal interface the solver relies on; subclasses fill it in."""

    n_vars: int = 0
    var_names: tuple = ()
    constraint_names: tuple = ()
    constraint_concave: tuple = ()
    has_source: bool = False

    def flux(self, u, axis=0):
        raise NotImplementedError

    def max_wave_speed(self, u, axis=0):
        raise NotImplementedError

    def source(self, u, x, y, t):
        raise NotImplementedError

    def constraint_values(self, u):
        """Constraint functions P_k stacked on a leading axis, shape (K, ...)."""
        u = np.asarray(u, dtype=float)
        return np.zeros((0,) + u.shape[1:])

    @property
    def n_constraints(self):
        return len(self.constraint_names)


class LinearAdvection(ConservationLaw):
    """u_t + a u_x = s(u, x, t) with an empty admissibility set.

    The optional source closure lets tests manufacture nonlinear source
    terms with analytically known time derivatives.
    """

    n_vars = 1
    var_names = ("u",)

    def __init__(self, speed: float = 1.0,
                 source_fn: Optional[Callable] = None):
        self.speed = float(speed)
        self.source_fn = source_fn
        self.has_source = source_fn is not None

    def flux(self, u, axis=0):
        return self.speed * np.asarray(u, dtype=float)

    def max_wave_speed(self, u, axis=0):
        u = np.asarray(u)
        return np.full(u.shape[1:], abs(self.speed))

    def source(self, u, x, y, t):
        if self.source_fn is None:
            return np.zeros_like(np.asarray(u, dtype=float))
        return self.source_fn(u, x, t)


@dataclass(frozen=True)
class QuiverPotential:
    """Prescribed electron-quiver potential W driving the Ten Moment sources.

    `w`, `dw_dx` and `dw_dy` are vectorized callables of (x, y, t); y may be
    None for 1-D runs. `nu_t` is the absorption coefficient of the energy
    source (0, 0, 0, nu_t*rho*W, 0, 0). `time_dependent` is metadata telling
    drivers whether W varies in t.
    """

    w: Callable
    dw_dx: Callable
    dw_dy: Optional[Callable] = None
    nu_t: float = 1.0
    time_dependent: bool = True

    def __post_init__(self):
        if self.nu_t < 0:
            raise ValueError("absorption coefficient nu_t must be >= 0")


def _flat6(u):
    u = np.asarray(u, dtype=float)
    trail = u.shape[1:]
    return np.ascontiguousarray(u.reshape(6, -1)), trail


class TenMoment(ConservationLaw):
    """Ten Moment equations in one or two space dimensions.

    Admissible states have positive density and positive definite pressure
    tensor; the equivalent ordered constraints are rho > 0, trace(p) > 0 and
    det(p) > 0 (the first two are concave in the conserved variables, the
    determinant is not).

    Args:
        potential: quiver potential for the source terms, or None.
        include_y_source: keep the y-gradient part of the source. Disabled
            for configurations where only the x component acts even though
            W depends on both coordinates.
    """

    n_vars = 6
    var_names = ("rho", "rho_v1", "rho_v2", "E11", "E12", "E22")
    constraint_names = ("rho", "trace", "det")
    constraint_concave = (True, True, False)

    def __init__(self, potential: Optional[QuiverPotential] = None,
                 include_y_source: bool = True):
        self.potential = potential
        self.include_y_source = include_y_source
        self.has_source = potential is not None

    # -- pointwise physics (kernel-backed) --------------------------------

    def flux(self, u, axis=0):
        flat, trail = _flat6(u)
        if np.any(flat[0] == 0.0):
            raise AdmissibilityError("zero density in flux evaluation",
                                     constraint="rho")
        return kernels.tm_flux(flat, axis).reshape((6,) + trail)

    def max_wave_speed(self, u, axis=0):
        flat, trail = _flat6(u)
        self.check_admissible(flat)
        return kernels.tm_wave_speed(flat, axis).reshape(trail)

    def constraint_values(self, u):
        flat, trail = _flat6(u)
        return kernels.tm_constraints(flat).reshape((3,) + trail)

    def check_admissible(self, u, context=""):
        """Raise AdmissibilityError naming the first violated constraint."""
        p = self.constraint_values(u)
        for k, name in enumerate(self.constraint_names):
            if not np.all(p[k] > 0.0):
                where = "" if context == "" else f" in {context}"
                raise AdmissibilityError(
                    f"inadmissible state{where}: min {name} = {np.min(p[k]):.6g}",
                    constraint=name)

    def rusanov(self, ul, ur, axis=0):
        """First-order Rusanov flux of two admissible state batches."""
        fl, trail = _flat6(ul)
        fr, _ = _flat6(ur)
        return kernels.tm_rusanov(fl, fr, axis).reshape((6,) + trail)

    def theta_segment_pair(self, k, ulow_a, uhigh_a, eps_a, act_a,
                           ulow_b, uhigh_b, eps_b, act_b):
        """Largest blend parameter keeping constraint k >= eps on two segments.

        Only the determinant constraint needs a root solve; the concave
        constraints are handled in closed form by the limiter itself.
        """
        if k != 2:
            raise ValueError("root solve is only wired up for the det constraint")
        la, trail = _flat6(ulow_a)
        ha, _ = _flat6(uhigh_a)
        lb, _ = _flat6(ulow_b)
        hb, _ = _flat6(uhigh_b)
        theta = kernels.tm_theta_det_pair(
            la, ha, np.ascontiguousarray(eps_a, dtype=float).ravel(),
            np.asarray(act_a, dtype=bool).ravel(),
            lb, hb, np.ascontiguousarray(eps_b, dtype=float).ravel(),
            np.asarray(act_b, dtype=bool).ravel())
        return theta.reshape(trail)

    # -- source terms ------------------------------------------------------

    def source(self, u, x, y, t):
        """Quiver source s^{x1} (+ s^{x2} in 2-D) + absorption term s_E."""
        u = np.asarray(u, dtype=float)
        s = np.zeros_like(u)
        if self.potential is None:
            return s
        if np.any(u[0] == 0.0):
            raise AdmissibilityError("zero density in source evaluation",
                                     constraint="rho")
        pot = self.potential
        wx = pot.dw_dx(x, y, t)
        s[1] = -0.5 * u[0] * wx
        s[3] = -0.5 * u[1] * wx
        s[4] = -0.25 * u[2] * wx
        if y is not None and self.include_y_source and pot.dw_dy is not None:
            wy = pot.dw_dy(x, y, t)
            s[2] = -0.5 * u[0] * wy
            s[4] += -0.25 * u[1] * wy
            s[5] = -0.5 * u[2] * wy
        if pot.nu_t != 0.0:
            s[3] += pot.nu_t * u[0] * pot.w(x, y, t)
        return s

    # -- variable changes --------------------------------------------------

    @staticmethod
    def primitive_to_conserved(prim):
        """(rho, v1, v2, p11, p12, p22) -> conserved vector."""
        prim = np.asarray(prim, dtype=float)
        rho, v1, v2, p11, p12, p22 = prim
        u = np.empty_like(prim)
        u[0] = rho
        u[1] = rho * v1
        u[2] = rho * v2
        u[3] = 0.5 * p11 + 0.5 * rho * v1 * v1
        u[4] = 0.5 * p12 + 0.5 * rho * v1 * v2
        u[5] = 0.5 * p22 + 0.5 * rho * v2 * v2
        return u

    @staticmethod
    def conserved_to_primitive(u):
        """Inverse of primitive_to_conserved (requires rho > 0)."""
        flat, trail = _flat6(u)
        if np.any(flat[0] <= 0.0):
            raise AdmissibilityError("nonpositive density in primitive recovery",
                                     constraint="rho")
        p = kernels.tm_primitives(flat)
        prim = np.empty_like(flat)
        prim[0] = flat[0]
        prim[1:] = p
        return prim.reshape((6,) + trail)
