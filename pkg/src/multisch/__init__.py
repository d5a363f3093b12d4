"""Exact computations with finite multisets, multijections and the Schur category."""
