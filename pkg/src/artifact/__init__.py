"""Finite-model engine for etale groupoid atlases."""
