"""Dispatch to the numba or numpy kernel set (see ``_accel``)."""
from . import _numpy_kernels
from ._accel import USE_NUMBA

if USE_NUMBA:
    from . import _numba_kernels as _impl
else:
    _impl = _numpy_kernels

BACKEND = "numba" if USE_NUMBA else "numpy"

csr_matvec = _impl.csr_matvec
csr_rmatvec = _impl.csr_rmatvec
power_loop = _impl.power_loop
iterate_log_norms = _impl.iterate_log_norms
