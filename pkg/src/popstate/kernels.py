"""Hot loops over dense vectors: the compiled extension when built, pure Python otherwise."""
try:
    from ._kernels import dominated, explore, fire, hilbert_cd, minimize

    BACKEND = "cython"
except ImportError:  # extension not built
    from ._pykernels import dominated, explore, fire, hilbert_cd, minimize

    BACKEND = "python"

__all__ = ["BACKEND", "dominated", "explore", "fire", "hilbert_cd", "minimize"]
