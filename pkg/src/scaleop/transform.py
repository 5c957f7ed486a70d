"""The Fourier transform on F_q^n and the scaling-average operator.

The core object is the linear map taking g on F_q^d to the function

    (m, u) |-> (1/q) * sum over t != 0 of chi(t*u) * g(t*m)

on F_q^{d+1}.  `s_apply` evaluates it densely, `s_apply_radial` exploits
radial structure (cost independent of d), and `SOperatorKernel` exposes
the exact row structure used for the sharp sup-norm constant.
"""

from __future__ import annotations

from fractions import Fraction
from functools import lru_cache
import numpy as np

from .chars import char_table
from .field import FieldSpec
from .grid import (
    GridFunction,
    Lr_norm_on_variety,
    RadialFunction,
    Variety,
    lp_norm,
    scalar_mult_perm,
)

DENSE_COST_CAP = 10**8


@lru_cache(maxsize=32)
def char_matrix(spec: FieldSpec) -> np.ndarray:
    """C[u, t] = chi(u * t); the q-point transform kernel."""
    table = char_table(spec)
    q = spec.q
    r = np.arange(q, dtype=np.int64)
    prods = spec.mul_idx(r[:, None], r[None, :])
    return table.values[prods]


def _apply_axis(values: np.ndarray, mat: np.ndarray, n: int, axis: int, q: int) -> np.ndarray:
    cube = values.reshape((q,) * n)
    cube = np.tensordot(mat, cube, axes=([1], [axis]))
    cube = np.moveaxis(cube, 0, axis)
    return cube.reshape(-1)


def fourier(f: GridFunction) -> GridFunction:
    """f_hat(x) = sum_m f(m) chi(-x.m), via one q-point pass per axis."""
    spec = f.spec
    mat = np.conj(char_matrix(spec))
    vals = f.values
    for axis in range(f.dim):
        vals = _apply_axis(vals, mat, f.dim, axis, spec.q)
    return GridFunction(spec, f.dim, vals)


def inverse_fourier(F: GridFunction) -> GridFunction:
    """f(m) = q^-n sum_x F(x) chi(x.m); inverts `fourier` exactly."""
    spec = F.spec
    mat = char_matrix(spec)
    vals = F.values
    for axis in range(F.dim):
        vals = _apply_axis(vals, mat, F.dim, axis, spec.q)
    return GridFunction(spec, F.dim, vals / spec.q**F.dim)


def s_apply(g: GridFunction) -> GridFunction:
    """Dense evaluation of the scaling-average operator; output lives on
    F_q^{d+1} with the extra coordinate least significant."""
    spec = g.spec
    d = g.dim
    q = spec.q
    if q ** (d + 2) > DENSE_COST_CAP:
        raise ValueError(
            f"dense evaluation cost q^(d+2) = {q**(d + 2)} exceeds {DENSE_COST_CAP}; "
            "use the radial path"
        )
    C = char_matrix(spec)
    # G[t-1, i] = g(t * point_i)
    G = np.empty((q - 1, q**d), dtype=np.complex128)
    for t in range(1, q):
        G[t - 1] = g.values[scalar_mult_perm(spec, d, t)]
    out_by_u = C[:, 1:] @ G / q  # (q_u, q^d)
    return GridFunction(spec, d + 1, out_by_u.T.reshape(-1))


def s_apply_radial(rf: RadialFunction) -> np.ndarray:
    """Radial fast path: the (q, q) table T[k, u] giving the operator value
    at any point m with norm k and last coordinate u."""
    spec = rf.spec
    q = spec.q
    r = np.arange(q, dtype=np.int64)
    sq = spec.mul_idx(r, r)
    # W[t-1, k] = M[t^2 * k]
    tk = spec.mul_idx(sq[1:, None], r[None, :])
    W = rf.radial[tk]
    C = char_matrix(spec)
    return (C[:, 1:] @ W / q).T  # (k, u)


def expand_radial_table(rf: RadialFunction, table: np.ndarray) -> GridFunction:
    """Lift a (k, u) table back to a dense function on F_q^{d+1}."""
    from .grid import norm_values

    spec = rf.spec
    q = spec.q
    idx = np.arange(q ** (rf.dim + 1), dtype=np.int64)
    k = norm_values(spec, rf.dim)[idx // q]
    u = idx % q
    return GridFunction(spec, rf.dim + 1, table[k, u])


def s_norm_ratio(g: GridFunction, p, s) -> float:
    """||Sg||_s / ||g||_p, a lower-bound witness for the operator norm."""
    denom = lp_norm(g, p)
    if denom == 0.0:
        raise ValueError("ratio undefined for the zero function")
    return lp_norm(s_apply(g), s) / denom


def restricted_L2_norm_of_hat(G: GridFunction, V: Variety) -> float:
    """Normalized L^2 norm of the Fourier transform of G over V."""
    return Lr_norm_on_variety(fourier(G), V, 2)


class SOperatorKernel:
    """Row view of the operator as a kernel K((m, u), alpha): for m != 0 a
    row has q-1 entries of modulus 1/q supported on the line through m; the
    m = 0 row concentrates at alpha = 0."""

    def __init__(self, spec: FieldSpec, d: int):
        self.spec = spec
        self.d = d
        self._table = char_table(spec)

    def row_entries(self, m_idx: int, u_idx: int) -> dict[int, complex]:
        spec = self.spec
        q = spec.q
        entries: dict[int, complex] = {}
        for t in range(1, q):
            alpha = int(scalar_mult_perm(spec, self.d, t)[m_idx])
            coeff = self._table.chi(int(spec.mul_idx(t, u_idx))) / q
            entries[alpha] = entries.get(alpha, 0.0) + coeff
        return entries

    def row_l1_mass(self, m_idx: int, u_idx: int) -> Fraction:
        q = self.spec.q
        if m_idx != 0:
            return Fraction(q - 1, q)
        # sum over t != 0 of chi(t*u) is q-1 at u = 0 and -1 otherwise
        return Fraction(q - 1, q) if u_idx == 0 else Fraction(1, q)

    def max_row_l1_mass(self) -> Fraction:
        return Fraction(self.spec.q - 1, self.spec.q)

    def sup_norm_witness(self) -> GridFunction:
        """A unimodular g achieving |Sg(m, 0)| = (q-1)/q at a nonzero m."""
        spec = self.spec
        q = spec.q
        m_idx = q ** (self.d - 1)  # the first standard basis vector
        v = np.zeros(q**self.d, dtype=np.complex128)
        for t in range(1, q):
            v[int(scalar_mult_perm(spec, self.d, t)[m_idx])] = 1.0
        return GridFunction(spec, self.d, v)
