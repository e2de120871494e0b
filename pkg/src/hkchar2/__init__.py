"""Exact computations for characteristic-2 Hilbert-Kunz functions on the dyadic interval."""
