"""Artifact writers for solves and convergence studies."""
