"""Exact Hochschild, cyclic and deformation calculus package."""
