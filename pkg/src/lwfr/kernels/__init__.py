"""Hot pointwise kernels: compiled extension core with a numpy fallback.

The compiled Cython core is preferred when the extension built; the numpy
fallback implements identical signatures and is selected automatically when
the extension is missing or when the environment variable LWFR_PURE_PYTHON
is set. `use_backend()` switches at runtime (used by tests and benchmarks).
"""

import os

from . import fallback as _fallback

_compiled = None
if not os.environ.get("LWFR_PURE_PYTHON"):
    try:
        from . import _core as _compiled
    except ImportError:
        _compiled = None

_impl = _compiled if _compiled is not None else _fallback


def backend() -> str:
    """Name of the active backend: 'compiled' or 'python'."""
    return "python" if _impl is _fallback else "compiled"


def compiled_available() -> bool:
    return _compiled is not None


def use_backend(name: str) -> None:
    """Select the kernel backend at runtime ('compiled' or 'python')."""
    global _impl
    if name == "python":
        _impl = _fallback
    elif name == "compiled":
        if _compiled is None:
            raise RuntimeError("compiled kernel core is not available")
        _impl = _compiled
    else:
        raise ValueError(f"unknown backend {name!r}")


def tm_primitives(u):
    return _impl.tm_primitives(u)


def tm_flux(u, axis):
    return _impl.tm_flux(u, axis)


def tm_wave_speed(u, axis):
    return _impl.tm_wave_speed(u, axis)


def tm_constraints(u):
    return _impl.tm_constraints(u)


def tm_rusanov(ul, ur, axis):
    return _impl.tm_rusanov(ul, ur, axis)


def tm_theta_det_pair(ulow_a, uhigh_a, eps_a, act_a, ulow_b, uhigh_b, eps_b, act_b):
    return _impl.tm_theta_det_pair(
        ulow_a, uhigh_a, eps_a, act_a, ulow_b, uhigh_b, eps_b, act_b
    )
