"""Finite-model selection monads, controlled bar recursion, and a DNS verifier."""

__version__ = "0.1.0"
