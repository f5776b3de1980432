"""Kernel backend dispatch.

The package ships a compiled extension (`freespec._kernels._core`) for its
two hot kernels and a pure numpy fallback (`freespec._kernels.pure`) with
identical semantics.  The compiled backend is selected at import when the
extension built; `set_backend` switches explicitly (used by the benchmark
and by tests that exercise both paths).
"""

from __future__ import annotations

from . import pure

try:  # pragma: no cover - depends on whether the extension was built
    from . import _core as _compiled
except ImportError:  # pragma: no cover
    _compiled = None

_active = _compiled if _compiled is not None else pure


def available_backends() -> tuple[str, ...]:
    names = ["pure"]
    if _compiled is not None:
        names.insert(0, "compiled")
    return tuple(names)


def backend_name() -> str:
    return _active.NAME


def set_backend(name: str) -> None:
    """Select the kernel backend by name ('compiled' or 'pure')."""
    global _active
    if name == "pure":
        _active = pure
    elif name == "compiled":
        if _compiled is None:
            raise RuntimeError("compiled kernel backend is not available")
        _active = _compiled
    else:
        raise ValueError(f"unknown backend {name!r}")


def get_backend():
    """Return the active backend module."""
    return _active


def eigh_kernel(a):
    return _active.eigh_kernel(a)


def quartic_grid_scan(qn, qm, n_theta, n_phi):
    return _active.quartic_grid_scan(qn, qm, n_theta, n_phi)
