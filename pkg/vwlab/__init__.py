"""Numerical lab for very weak solutions of wave equations with rough time-dependent propagation speed."""

__version__ = 'v1.0-dev'
