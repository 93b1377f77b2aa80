"""Determinant uncertainty bounds from monotone quantum metrics."""
