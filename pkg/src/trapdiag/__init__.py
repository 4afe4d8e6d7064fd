"""Compile monoidal-category terms to trapezoid-shaped string diagrams."""
from __future__ import annotations

__version__ = "0.1.0"
