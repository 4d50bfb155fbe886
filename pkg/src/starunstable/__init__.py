"""Star-unstable algebras over the Steenrod algebra, computed degreewise over F_2."""

from .gf2core import BACKEND, F2Vector

__all__ = ["BACKEND", "F2Vector"]
__version__ = "0.1.0"
