"""Hot-kernel dispatch: compiled Cython core with a pure-numpy fallback.

The compiled module is used when it importable; set NFSG_PURE_PYTHON=1 to
force the numpy reference implementation. `IMPL` reports which one is active.
"""

import os

from . import _reference

if os.environ.get("NFSG_PURE_PYTHON"):
    _impl = _reference
    IMPL = "numpy"
else:
    try:
        from . import _fastkern as _impl  # type: ignore[no-redef]

        IMPL = "compiled"
    except ImportError:
        _impl = _reference
        IMPL = "numpy"

gain_pairs = _impl.gain_pairs
interference_sums = _impl.interference_sums
cf_reduce = _impl.cf_reduce

__all__ = ["IMPL", "gain_pairs", "interference_sums", "cf_reduce"]
