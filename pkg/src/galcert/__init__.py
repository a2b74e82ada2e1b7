"""Certified projective mod-ell image computation for newforms."""

__version__ = "0.1.0"
