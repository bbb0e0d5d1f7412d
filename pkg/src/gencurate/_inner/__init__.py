"""Inner-maximizer backends.

The hot loops (noisy coordinate ascent over grids, simulated annealing
over feasible bit-codes) exist twice: a Cython extension and a pure
Python twin.  Both draw scalars from the caller's ``numpy.random.Generator``
in exactly the same order, so a run is bit-identical regardless of which
backend happened to load.

Set ``GENCURATE_PURE_PYTHON=1`` to force the fallback.
"""

import os

if os.environ.get("GENCURATE_PURE_PYTHON"):
    from . import _pyfallback as _backend
else:
    try:
        from . import _native as _backend
    except ImportError:
        from . import _pyfallback as _backend

ascend_grid = _backend.ascend_grid
anneal_codes = _backend.anneal_codes


def backend_name():
    """Either "native" or "python", whichever is active."""
    return _backend.NAME


def load_backend(name):
    """Explicitly fetch one backend module (used by parity tests)."""
    if name == "python":
        from . import _pyfallback

        return _pyfallback
    if name == "native":
        from . import _native

        return _native
    raise ValueError(f"unknown backend {name!r}")
