"""Hot numeric kernels with two interchangeable backends.

The default backend is numba-jitted loops; a vectorized pure-numpy fallback
is selected when numba is unavailable or when ``GEOBLUR_BACKEND=numpy`` is
set in the environment (``GEOBLUR_BACKEND=numba`` insists on numba).
``benchmarks/bench_kernels.py`` compares the two.
"""

import os

_choice = os.environ.get("GEOBLUR_BACKEND", "auto").strip().lower()

if _choice == "numpy":
    from . import numpy_impl as _impl
elif _choice == "numba":
    from . import numba_impl as _impl
elif _choice == "auto":
    try:
        from . import numba_impl as _impl
    except ImportError:
        from . import numpy_impl as _impl
else:
    raise RuntimeError(
        f"GEOBLUR_BACKEND must be 'auto', 'numba' or 'numpy', got {_choice!r}"
    )

BACKEND = _impl.__name__.rsplit(".", 1)[-1].removesuffix("_impl")

sobel_gradients = _impl.sobel_gradients
central_gradients = _impl.central_gradients
area_resample = _impl.area_resample
rotate_mean = _impl.rotate_mean
fft2 = _impl.fft2
ifft2 = _impl.ifft2
svd_values = _impl.svd_values
svd_factor = _impl.svd_factor

__all__ = [
    "BACKEND",
    "sobel_gradients",
    "central_gradients",
    "area_resample",
    "rotate_mean",
    "fft2",
    "ifft2",
    "svd_values",
    "svd_factor",
]
