"""Colorful transversals - exact verification of the colorful hyperplane-transversal theorem."""

__version__ = "0.1.0"
