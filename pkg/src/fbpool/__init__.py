"""Numerical toolkit for the two-phase free-boundary energy on rectangles:
slice-built minimizers, pools of zeroes, branch-point detection, and
regularized-distance almost-minimizers with prescribed free boundaries."""

__version__ = "0.1.0"

from .geometry import Grid, Rect, ScalarField2D, gradient, restrict

__all__ = ["Grid", "Rect", "ScalarField2D", "gradient", "restrict", "__version__"]
