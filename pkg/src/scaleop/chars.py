"""The principal additive character of F_q and character-sum utilities.

The table stores chi(s) = exp(2*pi*i*Tr(s)/p) for every element index s.
The companion sums implemented here are the exact building blocks used by
the norm computations: full orthogonality sums and the oscillation sums
sum_t |chi(t) + chi(-t)|^n.
"""

from __future__ import annotations

from functools import lru_cache

import numpy as np

from .field import FieldElement, FieldSpec


class CharTable:
    """Lookup table for the principal additive character; immutable."""

    def __init__(self, spec: FieldSpec):
        self.spec = spec
        angles = 2.0 * np.pi * spec._trace.astype(np.float64) / spec.p
        values = np.exp(1j * angles)
        values[0] = 1.0 + 0.0j  # chi(0) is exactly 1
        self.values = values

    def chi(self, s) -> complex:
        """chi(s) for a FieldElement or a raw element index."""
        idx = s.idx if isinstance(s, FieldElement) else int(s)
        return complex(self.values[idx])

    def chi_vec(self, idx) -> np.ndarray:
        return self.values[idx]


@lru_cache(maxsize=64)
def _cached_table(spec: FieldSpec) -> CharTable:
    return CharTable(spec)


def char_table(spec: FieldSpec) -> CharTable:
    return _cached_table(spec)


def orthogonality_sum(table: CharTable, a) -> complex:
    """sum over s in F_q of chi(a*s); q at a = 0 and 0 otherwise."""
    spec = table.spec
    a_idx = a.idx if isinstance(a, FieldElement) else int(a)
    prods = spec.mul_idx(a_idx, np.arange(spec.q, dtype=np.int64))
    return complex(np.sum(table.values[prods]))


def osc_sum(table: CharTable, n) -> float:
    """sum over t in F_q of |chi(t) + chi(-t)|**n.

    Integer n is the primary use; fractional exponents are accepted for
    interpolation-style experiments.
    """
    if n < 0:
        raise ValueError("exponent must be nonnegative")
    spec = table.spec
    neg = spec.neg_idx(np.arange(spec.q, dtype=np.int64))
    mags = np.abs(table.values + table.values[neg])
    return float(np.sum(mags**n))


def osc_sum_binomial_constant(n: int, p: int) -> int:
    """Exact value of osc_sum(n)/q for even n, from expanding the binomial.

    Every index i in [0, n] with 2i = n (mod p) contributes C(n, i); when
    p > n only i = n/2 survives, giving the classical binom(n, n/2).
    """
    from math import comb

    if n % 2 != 0:
        raise ValueError("closed form is for even n only")
    return sum(comb(n, i) for i in range(n + 1) if (2 * i - n) % p == 0)
