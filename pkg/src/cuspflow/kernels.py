"""Kernel selection: the compiled extension when importable, numpy otherwise.

Set ``CUSPFLOW_PURE_PYTHON=1`` to force the fallback.
"""
import os

from . import _fallback

BACKEND = "python"
_impl = _fallback
if not os.environ.get("CUSPFLOW_PURE_PYTHON"):
    try:
        from . import _kernels as _impl  # noqa: F811
        BACKEND = "cython"
    except ImportError:  # extension not built
        _impl = _fallback

weighted_moments = _impl.weighted_moments
roof_values = _impl.roof_values
periodic_log_traces = _impl.periodic_log_traces
block_logsums = _impl.block_logsums

__all__ = ["BACKEND", "weighted_moments", "roof_values", "periodic_log_traces", "block_logsums"]
