"""kreinlab: spectra of Krein-like extensions on exactly solvable models."""

from .numkernel import HAVE_COMPILED_KERNEL

__version__ = "0.1.0"
__all__ = ["HAVE_COMPILED_KERNEL", "__version__"]
