"""Exact loci of integrability, boundedness and vanishing for Presburger
constructible functions, with a skeleton-factored p-adic layer."""

__version__ = "0.1.0"
