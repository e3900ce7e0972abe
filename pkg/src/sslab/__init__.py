"""sslab: a numerical laboratory for spacelike stationary surfaces in
4-dimensional Lorentz space, built from Weierstrass-type data."""

from __future__ import annotations

__version__ = "0.1.0"
