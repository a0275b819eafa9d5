"""Exact-arithmetic toolkit for joints, multijoints and the Hasse calculus."""

__version__ = "0.1.0"
