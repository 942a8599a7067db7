"""Reference-element operators for the nodal flux reconstruction scheme.

Everything lives on the unit interval [0, 1]: Gauss-Legendre solution points,
quadrature weights, the Lagrange differentiation matrix, boundary
extrapolation vectors and the derivatives of the Radau correction functions.
All operators are built once per polynomial degree and are immutable
afterwards, so they can be shared freely between solver phases.
"""

from dataclasses import dataclass

import numpy as np

from .errors import ConfigurationError

MAX_DEGREE = 4


def _legendre_and_derivative(n: int, x: np.ndarray):
    """Evaluate P_n and P_n' on [-1, 1] via the three-term recurrence."""
    p_prev = np.ones_like(x)
    if n == 0:
        return p_prev, np.zeros_like(x)
    p = x.copy()
    for k in range(1, n):
        p, p_prev = ((2 * k + 1) * x * p - k * p_prev) / (k + 1), p
    dp = n * (x * p - p_prev) / (x * x - 1.0)
    return p, dp


def gauss_legendre(npts: int):
    """Nodes and weights of the npts-point Gauss-Legendre rule on [0, 1].

    Newton iteration on the Legendre polynomial, started from the Chebyshev
    angles, converged to ~1e-15 on [-1, 1] and then mapped affinely to [0, 1].
    """
    if npts == 1:
        return np.array([0.5]), np.array([1.0])
    k = np.arange(1, npts + 1)
    x = np.cos(np.pi * (k - 0.25) / (npts + 0.5))
    for _ in range(100):
        p, dp = _legendre_and_derivative(npts, x)
        dx = p / dp
        x = x - dx
        if np.max(np.abs(dx)) < 1e-15:
            break
    _, dp = _legendre_and_derivative(npts, x)
    w = 2.0 / ((1.0 - x * x) * dp * dp)
    # map [-1, 1] -> [0, 1], ascending nodes
    nodes = 0.5 * (1.0 + x[::-1])
    weights = 0.5 * w[::-1]
    return nodes, weights


def lagrange_values(nodes: np.ndarray, x: float) -> np.ndarray:
    """Values ell_p(x) of the Lagrange basis defined on the given nodes."""
    n = len(nodes)
    vals = np.empty(n)
    for p in range(n):
        num = 1.0
        for q in range(n):
            if q != p:
                num *= (x - nodes[q]) / (nodes[p] - nodes[q])
        vals[p] = num
    return vals


def differentiation_matrix(nodes: np.ndarray) -> np.ndarray:
    """D[p, q] = ell_q'(xi_p), via the barycentric weights."""
    n = len(nodes)
    bary = np.ones(n)
    for p in range(n):
        for q in range(n):
            if q != p:
                bary[p] /= nodes[p] - nodes[q]
    d = np.zeros((n, n))
    for p in range(n):
        for q in range(n):
            if q != p:
                d[p, q] = (bary[q] / bary[p]) / (nodes[p] - nodes[q])
        d[p, p] = -np.sum(d[p, :])
    return d


def _radau_derivatives(degree: int, nodes: np.ndarray):
    """Derivatives of the left/right Radau correction functions at the nodes.

    On [-1, 1] the left correction is g_L = (-1)^(N+1)/2 (P_{N+1} - P_N) and
    the right one is g_R = (P_{N+1} + P_N)/2; this is the choice that makes
    flux reconstruction coincide with nodal DG. The chain rule supplies the
    factor 2 for the map to [0, 1].
    """
    leg = np.polynomial.legendre.Legendre
    n = degree + 1
    c_hi = np.zeros(n + 1)
    c_hi[n] = 1.0
    c_lo = np.zeros(n + 1)
    c_lo[n - 1] = 1.0
    g_left = ((-1.0) ** n / 2.0) * (leg(c_hi) - leg(c_lo))
    g_right = 0.5 * (leg(c_hi) + leg(c_lo))
    x = 2.0 * nodes - 1.0
    return 2.0 * g_left.deriv()(x), 2.0 * g_right.deriv()(x)


@dataclass(frozen=True)
class ElementOperators:
    """Degree-N nodal operators on the reference element [0, 1].

    Attributes:
        degree: polynomial degree N >= 0.
        nodes: Gauss-Legendre solution points, shape (N+1,).
        weights: quadrature weights summing to 1, shape (N+1,).
        diff_matrix: D[p, q] = ell_q'(xi_p).
        gl_prime: derivative of the left Radau correction at the nodes.
        gr_prime: derivative of the right Radau correction at the nodes.
        v_left: ell_p(0), interpolation to the left face.
        v_right: ell_p(1), interpolation to the right face.
    """

    degree: int
    nodes: np.ndarray
    weights: np.ndarray
    diff_matrix: np.ndarray
    gl_prime: np.ndarray
    gr_prime: np.ndarray
    v_left: np.ndarray
    v_right: np.ndarray

    def extrapolate_boundary(self, values: np.ndarray):
        """Evaluate the nodal polynomial at xi=0 and xi=1.

        The node axis must be the last axis of `values`.
        """
        left = values @ self.v_left
        right = values @ self.v_right
        return left, right


def build_operators(degree: int) -> ElementOperators:
    """Assemble all reference-element operators for a supported degree."""
    if not isinstance(degree, (int, np.integer)) or isinstance(degree, bool):
        raise ConfigurationError(f"degree must be an integer, got {degree!r}")
    if degree < 0 or degree > MAX_DEGREE:
        raise ConfigurationError(
            f"degree out of supported range 0..{MAX_DEGREE}: {degree}"
        )
    nodes, weights = gauss_legendre(degree + 1)
    gl_prime, gr_prime = _radau_derivatives(degree, nodes)
    ops = ElementOperators(
        degree=degree,
        nodes=nodes,
        weights=weights,
        diff_matrix=differentiation_matrix(nodes),
        gl_prime=gl_prime,
        gr_prime=gr_prime,
        v_left=lagrange_values(nodes, 0.0),
        v_right=lagrange_values(nodes, 1.0),
    )
    for arr in (ops.nodes, ops.weights, ops.diff_matrix, ops.gl_prime,
                ops.gr_prime, ops.v_left, ops.v_right):
        arr.setflags(write=False)
    return ops
