"""Finite partial groups and localities: construction, quotients and exhaustive checks."""
