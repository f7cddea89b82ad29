"""Exact unbounded-integer primitives the rest of the toolkit builds on.

Everything here is pure integer arithmetic.  No floating point anywhere:
float root/log shortcuts misround exactly at the power boundaries
(e.g. 16**4 = 65536 vs 65535) that the moduli generator pivots on.
"""

from __future__ import annotations

from math import gcd

__all__ = [
    "gcd",
    "ceil_nth_root",
    "mod_inverse",
    "coprime_to_all",
    "bit_length",
    "NotCoprimeError",
]


class NotCoprimeError(ValueError):
    """A modular inverse was requested for non-coprime inputs."""


def ceil_nth_root(v: int, n: int) -> int:
    """Smallest r with r**n >= v, i.e. the ceiling of the real n-th root.

    Requires v >= 1 and n >= 1.  Binary search on exact integers.
    """
    if v < 1:
        raise ValueError(f"ceil_nth_root requires v >= 1, got {v}")
    if n < 1:
        raise ValueError(f"ceil_nth_root requires n >= 1, got {n}")
    if n == 1:
        return v
    # 2**ceil(bitlen/n) raised to the n-th is >= 2**bitlen > v
    lo, hi = 1, 1 << ((v.bit_length() + n - 1) // n)
    while lo < hi:
        mid = (lo + hi) // 2
        if mid**n >= v:
            hi = mid
        else:
            lo = mid + 1
    return lo


def mod_inverse(a: int, m: int) -> int:
    """Inverse of a modulo m >= 2 via the extended Euclidean algorithm.

    Returns y in [1, m) with (a * y) % m == 1; raises NotCoprimeError
    when gcd(a % m, m) != 1.
    """
    if m < 2:
        raise ValueError(f"mod_inverse requires m >= 2, got {m}")
    a %= m
    old_r, r = a, m
    old_s, s = 1, 0
    while r:
        q = old_r // r
        old_r, r = r, old_r - q * r
        old_s, s = s, old_s - q * s
    if old_r != 1:
        raise NotCoprimeError(f"{a} is not invertible mod {m} (gcd = {old_r})")
    return old_s % m


def coprime_to_all(c: int, ms) -> bool:
    """True iff gcd(c, m) == 1 for every m in ms."""
    return all(gcd(c, m) == 1 for m in ms)


def bit_length(m: int) -> int:
    """Number of binary digits of m >= 1, i.e. floor(log2 m) + 1."""
    if m < 1:
        raise ValueError(f"bit_length requires m >= 1, got {m}")
    return m.bit_length()
