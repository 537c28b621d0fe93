"""Finite-window construction of a systolic complex for a finitely presented subgroup."""
