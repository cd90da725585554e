"""Kernel backend selection.

The compiled extension is used when it imports; otherwise the pure-Python
versions are used.  Set ``FERMISZEGO_BACKEND=python`` to force the fallback.
"""
import os

from fermiszego import _pykernels

BACKEND = "python"
_impl = _pykernels

if os.environ.get("FERMISZEGO_BACKEND", "").lower() != "python":
    try:
        from fermiszego import _kernels as _impl  # noqa: F811

        BACKEND = "compiled"
    except ImportError:  # pragma: no cover - depends on the build
        _impl = _pykernels


def backends():
    """Return the available kernel modules keyed by name."""
    out = {"python": _pykernels}
    try:
        from fermiszego import _kernels

        out["compiled"] = _kernels
    except ImportError:  # pragma: no cover
        pass
    return out


symplectic_orbit = _impl.symplectic_orbit
dpp_sample = _impl.dpp_sample
dhk_sums = _impl.dhk_sums
symplectic_orbit_callable = _pykernels.symplectic_orbit_callable
