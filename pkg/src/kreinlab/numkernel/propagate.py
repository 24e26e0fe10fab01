"""Backend selection for the propagation kernels (compiled or pure Python)."""

try:
    from . import _propagate as _impl

    HAVE_COMPILED_PROPAGATE = True
except ImportError:
    from . import _propagate_py as _impl

    HAVE_COMPILED_PROPAGATE = False

from . import _propagate_py as _impl_py

magnus_sl = _impl.magnus_sl
rk4_ho = _impl.rk4_ho
magnus_sl_py = _impl_py.magnus_sl
rk4_ho_py = _impl_py.rk4_ho
