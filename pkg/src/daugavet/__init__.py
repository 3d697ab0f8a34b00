"""Daugavet and Delta constants of points in finite-dimensional normed spaces."""
