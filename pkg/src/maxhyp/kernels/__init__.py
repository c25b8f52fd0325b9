"""Grid kernels with a numba path and a pure-numpy fallback.

``MAXHYP_BACKEND`` selects ``numba`` (default when importable) or ``numpy``.
``MAXHYP_THREADS`` caps numba worker threads; 0 or unset means automatic.
Point-wise helpers used by the symmetrizer always come from the numpy module
because they must accept complex input.
"""

from __future__ import annotations

import logging
import os

from . import _numpy
from ._numpy import (  # noqa: F401  re-exported point kernels
    a_from_y,
    conformation,
    dissipation,
    energy,
    entropy,
    pressure,
    pressure_slope,
    sym_eigs,
    xi,
    y_from_a,
)

log = logging.getLogger(__name__)

_requested = os.environ.get("MAXHYP_BACKEND", "numba").strip().lower()
if _requested not in ("numba", "numpy"):
    raise ValueError(f"MAXHYP_BACKEND must be 'numba' or 'numpy', got {_requested!r}")

_impl = _numpy
BACKEND = "numpy"
if _requested == "numba":
    try:
        from . import _numba

        _impl = _numba
        BACKEND = "numba"
    except ImportError:  # pragma: no cover - numba is a declared dependency
        log.warning("numba unavailable, falling back to numpy kernels")


def configure_threads(n: int | None = None) -> int:
    """Apply ``MAXHYP_THREADS`` (or ``n``) to numba; returns the thread count in use."""
    if BACKEND != "numba":
        return 1
    import numba

    if n is None:
        n = int(os.environ.get("MAXHYP_THREADS", "0") or 0)
    limit = numba.config.NUMBA_NUM_THREADS
    numba.set_num_threads(limit if n <= 0 else min(n, limit))
    return numba.get_num_threads()


def fluxes(U, ucm, ratio, gamma):
    return _impl.fluxes(U, ucm, ratio, gamma)


def speeds(U, ucm, ratio, gamma):
    return _impl.speeds(U, ucm, ratio, gamma)


def flux_divergence(U, ucm, ratio, gamma, ha, hb, dissipative):
    return _impl.flux_divergence(U, bool(ucm), float(ratio), float(gamma), float(ha), float(hb),
                                 bool(dissipative))


def relax(U, dt, lam):
    return _impl.relax(U, float(dt), float(lam))


def get_impl(name: str):
    """Explicit access to one backend, for benchmarks and parity tests."""
    if name == "numpy":
        return _numpy
    if name == "numba":
        from . import _numba

        return _numba
    raise ValueError(name)
