"""Hot kernels: the compiled extension when importable, pure Python otherwise.

Set ``DICTANOMALY_PURE_PYTHON=1`` to force the fallback.
"""

import os

from . import _fallback

if os.environ.get("DICTANOMALY_PURE_PYTHON"):
    _impl = _fallback
    BACKEND = "python"
else:
    try:
        from . import _core as _impl  # type: ignore[attr-defined]

        BACKEND = "cython"
    except ImportError:
        _impl = _fallback
        BACKEND = "python"

levenshtein = _impl.levenshtein
forward_backward = _impl.forward_backward
viterbi = _impl.viterbi
beam_search = _impl.beam_search
PackedLM = _impl.PackedLM

__all__ = ["BACKEND", "PackedLM", "beam_search", "forward_backward", "levenshtein", "viterbi"]
