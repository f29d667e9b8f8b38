"""Numerical toolkit for holomorphic extendibility of sphere data in C^2 along complex lines."""

__version__ = "0.1.0"
