"""Hot numerical kernels with a compiled core and a NumPy fallback.

The Cython extension ``_ckernels`` is used when it was built; otherwise, or
when ``VORTEXKG_PURE_PYTHON=1`` is set, the NumPy/SciPy versions in
``_pykernels`` are used. Both expose the same functions.
"""

import os

from . import _pykernels as python

compiled = None
if os.environ.get("VORTEXKG_PURE_PYTHON", "") not in ("1", "true", "yes"):
    try:
        from . import _ckernels as compiled
    except ImportError:
        compiled = None

active = compiled if compiled is not None else python
BACKEND = "cython" if compiled is not None else "python"

lia_velocity = active.lia_velocity
lia_rk4 = active.lia_rk4
resample = active.resample
spline_arclength = active.spline_arclength
cyclic_tridiag_solve = active.cyclic_tridiag_solve
cn_schrodinger_step = active.cn_schrodinger_step
leapfrog_step = active.leapfrog_step
biot_savart = active.biot_savart

__all__ = [
    "BACKEND", "compiled", "python", "lia_velocity", "lia_rk4", "resample",
    "spline_arclength", "cyclic_tridiag_solve", "cn_schrodinger_step",
    "leapfrog_step", "biot_savart",
]
