"""Finite extensive games with perfect information: solvers, dominance and epistemics."""
