"""Numerical verification and counterexample search for the two-copy
distillability conjecture on 4x4 matrices."""

__version__ = "0.1.0"
