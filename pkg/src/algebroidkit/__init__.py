"""Exact polynomial-model toolkit for Lie algebroids, derivative endomorphisms and their actions."""

__version__ = "0.1.0"
