"""Additive characters of prime fields: finite Fourier transform and the
coefficient-witness lemma."""
from __future__ import annotations

from typing import Sequence

import numpy as np


def fourier_finite(f: Sequence[complex], p: int) -> np.ndarray:
    """``fhat(y) = sum_x f(x) exp(-2 pi i x y / p)``."""
    f = np.asarray(f, dtype=complex)
    if f.shape != (p,):
        raise ValueError(f"expected a vector of length {p}, got shape {f.shape}")
    x = np.arange(p)
    return np.exp(-2j * np.pi * np.outer(x, x) / p) @ f


def inverse_fourier_finite(fhat: Sequence[complex], p: int) -> np.ndarray:
    """Inverse of :func:`fourier_finite`: ``f(x) = (1/p) sum_y fhat(y) exp(2 pi i x y / p)``."""
    fhat = np.asarray(fhat, dtype=complex)
    if fhat.shape != (p,):
        raise ValueError(f"expected a vector of length {p}, got shape {fhat.shape}")
    x = np.arange(p)
    return np.exp(2j * np.pi * np.outer(x, x) / p) @ fhat / p


def witness_max_coeff(c: Sequence[complex], b: Sequence[int], p: int, tol: float = 1e-12) -> int:
    """``y0`` maximizing ``|sum_j c_j psi(b_j y)|``; asserts
    ``max |c_j| <= |f(y0)|``."""
    c = np.asarray(c, dtype=complex)
    b = [int(v) % p for v in b]
    if len(c) != len(b):
        raise ValueError("coefficient and frequency lists differ in length")
    if len(set(b)) != len(b):
        raise ValueError("frequencies must be pairwise distinct mod p")
    y = np.arange(p)
    vals = np.exp(2j * np.pi * np.outer(y, b) / p) @ c
    y0 = int(np.argmax(np.abs(vals)))
    bound = float(np.abs(c).max()) if len(c) else 0.0
    if abs(vals[y0]) + tol < bound:
        raise AssertionError(f"max |c| = {bound} exceeds |f(y0)| = {abs(vals[y0])}")
    return y0
