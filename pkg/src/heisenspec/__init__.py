"""Spectral toolkit for hypoelliptic sublaplacians on Heisenberg manifolds."""
