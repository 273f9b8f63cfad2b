"""Folds, Kirby diagrams and trisections of nonorientable 4-manifolds."""

__version__ = "0.1.0"
