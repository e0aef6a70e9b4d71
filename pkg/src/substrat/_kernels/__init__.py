"""Entropy kernel selection: compiled Cython extension when built, numpy
fallback otherwise. SUBSTRAT_PURE_PYTHON=1 forces the fallback (useful for
benchmarking and debugging)."""
import os

if os.environ.get("SUBSTRAT_PURE_PYTHON"):
    from substrat._kernels.entropy_py import mean_entropy
    BACKEND = "python"
else:
    try:
        from substrat._kernels.entropy_fast import mean_entropy
        BACKEND = "compiled"
    except ImportError:
        from substrat._kernels.entropy_py import mean_entropy
        BACKEND = "python"

__all__ = ["mean_entropy", "BACKEND"]
