"""Numerical verification toolkit for three-dimensional submanifolds of
five-dimensional space forms that attain equality in the normal-scalar-
curvature (DDVV) inequality, via conformal moving-frame invariants."""

__version__ = "0.1.0"
