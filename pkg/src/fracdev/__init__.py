"""Compound fractional Poisson processes."""
