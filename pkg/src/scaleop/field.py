"""Exact arithmetic in F_q for odd prime powers q = p^alpha.

Elements are addressed by their canonical index sum(c[i] * p**i) where
(c[0], ..., c[alpha-1]) are the coefficients of the element in the
polynomial basis, each reduced mod p.  Index 0 is the additive identity
and index 1 the multiplicative identity.  All table-driven operations
(`add_idx`, `mul_idx`, ...) accept plain ints or numpy integer arrays and
are the hot path for everything downstream; `FieldElement` is a thin
convenience wrapper over an index.
"""

from __future__ import annotations

from dataclasses import dataclass
from functools import lru_cache
from typing import Iterator, Optional, Sequence

import numpy as np

MAX_PRIME_Q = 1 << 16
MAX_PRIME_POWER_Q = 1 << 12

# Default irreducible moduli for the built-in prime-power fields,
# low-to-high coefficient order.
BUILTIN_MODULI: dict[int, tuple[int, ...]] = {
    9: (1, 0, 1),      # t^2 + 1 over F_3
    25: (2, 0, 1),     # t^2 + 2 over F_5
    27: (1, 2, 0, 1),  # t^3 + 2t + 1 over F_3
    49: (1, 0, 1),     # t^2 + 1 over F_7
}


def is_prime(n: int) -> bool:
    if n < 2:
        return False
    if n % 2 == 0:
        return n == 2
    f = 3
    while f * f <= n:
        if n % f == 0:
            return False
        f += 2
    return True


def prime_factors(n: int) -> list[int]:
    out = []
    f = 2
    while f * f <= n:
        if n % f == 0:
            out.append(f)
            while n % f == 0:
                n //= f
        f += 1
    if n > 1:
        out.append(n)
    return out


def _poly_trim(a: list[int]) -> list[int]:
    while a and a[-1] == 0:
        a.pop()
    return a


def _poly_mulmod(a: Sequence[int], b: Sequence[int], mod: Sequence[int], p: int) -> list[int]:
    """Product of coefficient lists a*b reduced mod the monic poly `mod`, over F_p."""
    prod = [0] * (len(a) + len(b) - 1) if a and b else []
    for i, ai in enumerate(a):
        if ai:
            for j, bj in enumerate(b):
                prod[i + j] = (prod[i + j] + ai * bj) % p
    deg_m = len(mod) - 1
    # mod is monic, so reduction is plain long division
    for k in range(len(prod) - 1, deg_m - 1, -1):
        c = prod[k]
        if c:
            prod[k] = 0
            for j in range(deg_m):
                prod[k - deg_m + j] = (prod[k - deg_m + j] - c * mod[j]) % p
    prod = prod[:deg_m]
    return prod + [0] * (deg_m - len(prod))


def _poly_divides(div: Sequence[int], poly: Sequence[int], p: int) -> bool:
    """Whether monic `div` divides `poly` over F_p."""
    rem = list(poly)
    dd = len(div) - 1
    inv_lead = pow(div[-1], p - 2, p)
    while len(_poly_trim(rem[:])) - 1 >= dd and any(rem):
        rem = _poly_trim(rem)
        if len(rem) - 1 < dd:
            break
        c = (rem[-1] * inv_lead) % p
        shift = len(rem) - 1 - dd
        for j in range(len(div)):
            rem[shift + j] = (rem[shift + j] - c * div[j]) % p
    return not any(rem)


def _is_irreducible(mod: Sequence[int], p: int) -> bool:
    """Brute-force irreducibility over F_p: trial division by every monic
    polynomial of degree up to deg/2 (degree-1 trials are the root check)."""
    deg = len(mod) - 1
    if deg == 1:
        return True
    for d in range(1, deg // 2 + 1):
        for tail in range(p**d):
            cand = [0] * (d + 1)
            t = tail
            for i in range(d):
                cand[i] = t % p
                t //= p
            cand[d] = 1
            if _poly_divides(cand, mod, p):
                return False
    return True


class FieldSpec:
    """An odd-characteristic finite field F_q with all lookup tables built
    eagerly at construction.  Immutable; safe to share across threads."""

    def __init__(self, p: int, alpha: int = 1, modulus: Optional[Sequence[int]] = None):
        if not is_prime(p):
            raise ValueError(f"p={p} is not prime")
        if p == 2:
            raise ValueError("characteristic 2 is not supported (odd p required)")
        if alpha < 1:
            raise ValueError(f"alpha={alpha} must be >= 1")
        q = p**alpha
        if alpha == 1 and q > MAX_PRIME_Q:
            raise ValueError(f"q={q} exceeds the prime-field cap {MAX_PRIME_Q}")
        if alpha > 1 and q > MAX_PRIME_POWER_Q:
            raise ValueError(f"q={q} exceeds the prime-power cap {MAX_PRIME_POWER_Q}")

        if modulus is None:
            if alpha == 1:
                modulus = (0, 1)
            elif q in BUILTIN_MODULI:
                modulus = BUILTIN_MODULI[q]
            else:
                raise ValueError(
                    f"no built-in modulus for q={q}; supply an irreducible "
                    f"degree-{alpha} polynomial (coefficients low-to-high)"
                )
        modulus = tuple(int(c) % p for c in modulus[:-1]) + (int(modulus[-1]),)
        if len(modulus) != alpha + 1:
            raise ValueError(f"modulus must have degree alpha={alpha} (got {len(modulus) - 1})")
        if modulus[-1] % p != 1:
            raise ValueError("modulus must be monic")
        modulus = modulus[:-1] + (1,)
        if alpha > 1 and not _is_irreducible(modulus, p):
            raise ValueError(f"modulus {list(modulus)} is reducible over F_{p}")

        self.p = p
        self.alpha = alpha
        self.q = q
        self.modulus = modulus

        self._pows = p ** np.arange(alpha, dtype=np.int64)
        # digits[i] = polynomial-basis coefficients of the element with index i
        idx = np.arange(q, dtype=np.int64)
        self._digits = (idx[:, None] // self._pows[None, :]) % p

        self._build_mul_tables()
        self._build_trace()
        self._build_eta_sqrt()

    # -- construction helpers -------------------------------------------------

    @classmethod
    def from_q(cls, q: int) -> "FieldSpec":
        """Field of order q, using the built-in modulus for prime powers."""
        if q < 3:
            raise ValueError(f"q={q} too small")
        facs = prime_factors(q)
        if len(facs) != 1:
            raise ValueError(f"q={q} is not a prime power")
        p = facs[0]
        alpha = 0
        n = q
        while n > 1:
            n //= p
            alpha += 1
        return cls(p, alpha)

    @classmethod
    def from_dict(cls, d: dict) -> "FieldSpec":
        return cls(int(d["p"]), int(d["alpha"]), d.get("modulus"))

    def to_dict(self) -> dict:
        return {"p": self.p, "alpha": self.alpha, "modulus": list(self.modulus)}

    # -- table construction ----------------------------------------------------

    def _coeffs_to_idx(self, coeffs: Sequence[int]) -> int:
        return int(sum((c % self.p) * self.p**i for i, c in enumerate(coeffs)))

    def _mul_scalar(self, a: int, b: int) -> int:
        """Reference product of two element indices (used only to bootstrap
        the log/exp tables; everything else goes through them)."""
        if self.alpha == 1:
            return (a * b) % self.p
        ca = [int(c) for c in self._digits[a]]
        cb = [int(c) for c in self._digits[b]]
        return self._coeffs_to_idx(_poly_mulmod(ca, cb, self.modulus, self.p))

    def _build_mul_tables(self) -> None:
        q = self.q
        # find a generator of the multiplicative group
        order = q - 1
        fs = prime_factors(order)
        gen = None
        for cand in range(2, q):
            ok = True
            for f in fs:
                # cand^(order/f) by square-and-multiply over indices
                e = order // f
                acc, base = 1, cand
                while e:
                    if e & 1:
                        acc = self._mul_scalar(acc, base)
                    base = self._mul_scalar(base, base)
                    e >>= 1
                if acc == 1:
                    ok = False
                    break
            if ok:
                gen = cand
                break
        assert gen is not None, "multiplicative group of a finite field is cyclic"
        exp = np.empty(order, dtype=np.int64)
        log = np.full(q, -1, dtype=np.int64)
        acc = 1
        for k in range(order):
            exp[k] = acc
            log[acc] = k
            acc = self._mul_scalar(acc, gen)
        assert acc == 1
        self.generator = gen
        self._exp = exp
        self._log = log

    def _build_trace(self) -> None:
        if self.alpha == 1:
            self._trace = np.arange(self.q, dtype=np.int64)
            return
        idx = np.arange(self.q, dtype=np.int64)
        frob = self.pow_idx(idx, self.p)  # x -> x^p as an index permutation
        acc = idx.copy()
        cur = idx.copy()
        for _ in range(self.alpha - 1):
            cur = frob[cur]
            acc = self.add_idx(acc, cur)
        # the trace lands in the prime subfield, whose elements are indices < p
        assert np.all(acc < self.p), "trace left the prime subfield"
        self._trace = acc

    def _build_eta_sqrt(self) -> None:
        q = self.q
        eta = np.where(self._log % 2 == 0, 1, -1).astype(np.int8)
        eta[0] = 0
        self._eta = eta
        sqrt = np.full(q, -1, dtype=np.int64)
        r = np.arange(q, dtype=np.int64)
        sq = self.mul_idx(r, r)
        # keep the root with the smaller canonical index among {r, -r}
        for root in range(q - 1, -1, -1):
            sqrt[sq[root]] = root
        self._sqrt = sqrt

    # -- index-level operations (ints or numpy arrays) -------------------------

    def add_idx(self, a, b):
        if self.alpha == 1:
            return (a + b) % self.p
        da = self._digits[a]
        db = self._digits[b]
        return ((da + db) % self.p) @ self._pows

    def neg_idx(self, a):
        if self.alpha == 1:
            return (-np.asarray(a)) % self.p if isinstance(a, np.ndarray) else (-a) % self.p
        return ((self.p - self._digits[a]) % self.p) @ self._pows

    def sub_idx(self, a, b):
        return self.add_idx(a, self.neg_idx(b))

    def mul_idx(self, a, b):
        if self.alpha == 1:
            if isinstance(a, np.ndarray) or isinstance(b, np.ndarray):
                return (np.asarray(a, dtype=np.int64) * np.asarray(b, dtype=np.int64)) % self.p
            return (a * b) % self.p
        a_arr = np.asarray(a)
        b_arr = np.asarray(b)
        la = self._log[a_arr]
        lb = self._log[b_arr]
        res = self._exp[(la + lb) % (self.q - 1)]
        res = np.where((a_arr == 0) | (b_arr == 0), 0, res)
        if res.ndim == 0:
            return int(res)
        return res

    def pow_idx(self, a, e: int):
        """a**e with the usual convention 0**0 = 1."""
        if e < 0:
            raise ValueError("exponent must be nonnegative")
        a_arr = np.asarray(a)
        la = self._log[a_arr]
        res = self._exp[(la * (e % (self.q - 1))) % (self.q - 1)]
        res = np.where(a_arr == 0, 0 if e else 1, res)
        if res.ndim == 0:
            return int(res)
        return res

    def inv_idx(self, a):
        a_arr = np.asarray(a)
        if np.any(a_arr == 0):
            raise ZeroDivisionError("0 has no multiplicative inverse")
        return self.pow_idx(a, self.q - 2)

    def trace_idx(self, a):
        return self._trace[a]

    def eta_idx(self, a):
        return self._eta[a]

    def sqrt_idx(self, a):
        """Index of the canonical square root, or -1 where none exists."""
        return self._sqrt[a]

    # -- element-level API ------------------------------------------------------

    def element(self, value) -> "FieldElement":
        if isinstance(value, FieldElement):
            if value.spec != self:
                raise ValueError("element belongs to a different field")
            return value
        if isinstance(value, (list, tuple, np.ndarray)):
            coeffs = list(value) + [0] * (self.alpha - len(value))
            return FieldElement(self, self._coeffs_to_idx(coeffs))
        idx = int(value)
        if self.alpha == 1:
            idx %= self.p
        if not 0 <= idx < self.q:
            raise ValueError(f"index {idx} out of range for q={self.q}")
        return FieldElement(self, idx)

    def zero(self) -> "FieldElement":
        return FieldElement(self, 0)

    def one(self) -> "FieldElement":
        return FieldElement(self, 1)

    def elements(self) -> Iterator["FieldElement"]:
        for i in range(self.q):
            yield FieldElement(self, i)

    # -- identity ---------------------------------------------------------------

    def __eq__(self, other) -> bool:
        return (
            isinstance(other, FieldSpec)
            and self.p == other.p
            and self.alpha == other.alpha
            and self.modulus == other.modulus
        )

    def __hash__(self) -> int:
        return hash((self.p, self.alpha, self.modulus))

    def __repr__(self) -> str:
        if self.alpha == 1:
            return f"FieldSpec(F_{self.q})"
        return f"FieldSpec(F_{self.q} = F_{self.p}[t]/{list(self.modulus)})"


# user-supplied moduli (q -> coefficients); consulted by get_field
_custom_moduli: dict[int, tuple[int, ...]] = {}


@lru_cache(maxsize=64)
def get_field(q: int) -> FieldSpec:
    """Cached field of order q, honoring any registered custom modulus."""
    if q in _custom_moduli:
        base = FieldSpec.from_q(q)
        return FieldSpec(base.p, base.alpha, _custom_moduli[q])
    return FieldSpec.from_q(q)


def register_modulus(q: int, modulus: Sequence[int], alpha: Optional[int] = None) -> FieldSpec:
    """Install a custom irreducible modulus for the field of order q (it is
    validated by construction).  Subsequent get_field(q) calls use it until
    clear_custom_moduli()."""
    spec = FieldSpec.from_q(q)
    if alpha is not None and alpha != spec.alpha:
        raise ValueError(f"alpha={alpha} inconsistent with q={q} = {spec.p}^{spec.alpha}")
    custom = FieldSpec(spec.p, spec.alpha, modulus)
    _custom_moduli[q] = custom.modulus
    get_field.cache_clear()
    return custom


def clear_custom_moduli() -> None:
    _custom_moduli.clear()
    get_field.cache_clear()


@dataclass(frozen=True)
class FieldElement:
    spec: FieldSpec
    idx: int

    @property
    def coeffs(self) -> tuple[int, ...]:
        return tuple(int(c) for c in self.spec._digits[self.idx])

    def _check(self, other: "FieldElement") -> None:
        if not isinstance(other, FieldElement):
            raise TypeError(f"expected FieldElement, got {type(other).__name__}")
        if other.spec != self.spec:
            raise ValueError("operands belong to different fields")

    def __add__(self, other: "FieldElement") -> "FieldElement":
        self._check(other)
        return FieldElement(self.spec, int(self.spec.add_idx(self.idx, other.idx)))

    def __sub__(self, other: "FieldElement") -> "FieldElement":
        self._check(other)
        return FieldElement(self.spec, int(self.spec.sub_idx(self.idx, other.idx)))

    def __neg__(self) -> "FieldElement":
        return FieldElement(self.spec, int(self.spec.neg_idx(self.idx)))

    def __mul__(self, other: "FieldElement") -> "FieldElement":
        self._check(other)
        return FieldElement(self.spec, int(self.spec.mul_idx(self.idx, other.idx)))

    def __pow__(self, e: int) -> "FieldElement":
        return FieldElement(self.spec, int(self.spec.pow_idx(self.idx, e)))

    def inverse(self) -> "FieldElement":
        return FieldElement(self.spec, int(self.spec.inv_idx(self.idx)))

    def trace(self) -> int:
        return int(self.spec.trace_idx(self.idx))

    def eta(self) -> int:
        return int(self.spec.eta_idx(self.idx))

    def sqrt(self) -> Optional["FieldElement"]:
        r = int(self.spec.sqrt_idx(self.idx))
        return None if r < 0 else FieldElement(self.spec, r)

    def is_zero(self) -> bool:
        return self.idx == 0

    def __repr__(self) -> str:
        return f"<{self.idx} in F_{self.spec.q}>"


def trace(x: FieldElement) -> int:
    return x.trace()


def eta(t: FieldElement) -> int:
    return t.eta()


def sqrt(t: FieldElement) -> Optional[FieldElement]:
    return t.sqrt()
