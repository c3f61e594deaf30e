"""Backend selection for the numeric kernels.

The compiled extension is preferred; the pure-NumPy module is the fallback.
Set DRIFTMAP_DISABLE_COMPILED=1 to force the fallback (used by the parity
tests and the kernel benchmark).
"""

import os

from driftmap import _pykernels

try:
    from driftmap import _core
except ImportError:
    _core = None

if _core is not None and not os.environ.get("DRIFTMAP_DISABLE_COMPILED"):
    _impl = _core
else:
    _impl = _pykernels

BACKEND = _impl.BACKEND
NEIGH_GAUSSIAN = _pykernels.NEIGH_GAUSSIAN
NEIGH_DOG = _pykernels.NEIGH_DOG

pairwise_distances = _impl.pairwise_distances
winner_indices = _impl.winner_indices
train_epoch = _impl.train_epoch


def available_backends():
    """Mapping of backend name -> kernel module, for benchmarks and tests."""
    backends = {"python": _pykernels}
    if _core is not None:
        backends["compiled"] = _core
    return backends
