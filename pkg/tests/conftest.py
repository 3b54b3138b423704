"""Shared oracles for the test suite."""

import numpy as np


def brute_force_windowed_dft(x: np.ndarray) -> np.ndarray:
    """Literal O(N^2) evaluation of the windowed, 1/N-normalized transform.

    Independent of the library path on purpose: the taper comes straight from
    the raised-cosine formula and the sum is an explicit complex matrix
    product, so this is the reference any fast transform must match.
    """
    x = np.asarray(x, dtype=float)
    n = len(x)
    i = np.arange(n)
    w = 0.5 - 0.5 * np.cos(2.0 * np.pi * i / (n - 1))
    y = x * w
    k = np.arange(n)
    basis = np.exp(-2j * np.pi * np.outer(k, i) / n)
    return basis @ y / n


def tree_bytes(root):
    """Map of relative path -> file bytes for a directory tree."""
    return {
        str(p.relative_to(root)): p.read_bytes()
        for p in sorted(root.rglob("*"))
        if p.is_file()
    }
