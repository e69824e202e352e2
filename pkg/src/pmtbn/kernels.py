"""Backend selection for the hot kernels.

The numba backend is used when available. Set ``PMTBN_NUMBA=0`` in the
environment to force the pure-numpy fallback; set ``PMTBN_NUMBA=1`` to
require numba (import fails if it is missing). Both backends return
bit-identical results; see ``benchmarks/bench_kernels.py`` for timings.
"""

import os

_flag = os.environ.get("PMTBN_NUMBA", "auto").strip().lower()

if _flag in ("0", "false", "off", "numpy"):
    from . import _kernels_numpy as _impl
elif _flag in ("1", "true", "on", "numba"):
    from . import _kernels_numba as _impl
else:
    try:
        from . import _kernels_numba as _impl
    except ImportError:
        from . import _kernels_numpy as _impl

BACKEND = "numba" if _impl.__name__.endswith("numba") else "numpy"

splitmix64_fill = _impl.splitmix64_fill
joint_counts = _impl.joint_counts
ancestral_states = _impl.ancestral_states
full_evidence_scores = _impl.full_evidence_scores
