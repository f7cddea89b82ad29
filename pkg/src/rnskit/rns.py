"""Forward conversion, channel-wise carry-free arithmetic, and reverse conversion.

An integer x in [0, M) is represented by its remainders against each
modulus; addition, subtraction and multiplication act independently per
channel, so no carry crosses channel boundaries.  Reverse conversion is
the classic weighted sum with precomputed per-channel weights
(M_i = M / m_i and y_i = M_i^-1 mod m_i).
"""

from __future__ import annotations

from dataclasses import dataclass, field

from .moduli import ModuliSet
from .numbers import gcd, mod_inverse

__all__ = [
    "RnsContext",
    "RnsNumber",
    "RnsError",
    "to_rns",
    "from_rns",
    "rns_add",
    "rns_sub",
    "rns_mul",
    "rns_pow",
]


class RnsError(ValueError):
    """Invalid moduli set, residue vector, or mismatched context."""


@dataclass(frozen=True, slots=True)
class RnsContext:
    """A validated moduli set plus the reverse-conversion weights.

    Immutable after construction; safe to share across threads.
    """

    moduli_set: ModuliSet
    crt_weights: tuple[tuple[int, int], ...] = field(init=False)
    _coeffs: tuple[int, ...] = field(init=False, repr=False)

    def __post_init__(self) -> None:
        ms = self.moduli_set.moduli
        if not ms:
            raise RnsError("moduli set is empty")
        for m in ms:
            if m < 2:
                raise RnsError(f"modulus {m} < 2")
        for i in range(len(ms)):
            for j in range(i + 1, len(ms)):
                g = gcd(ms[i], ms[j])
                if g != 1:
                    raise RnsError(
                        f"moduli {ms[i]} and {ms[j]} are not coprime (gcd = {g})"
                    )
        total = self.moduli_set.dynamic_range
        weights = []
        coeffs = []
        for m in ms:
            partial = total // m
            inv = mod_inverse(partial % m, m)
            weights.append((partial, inv))
            coeffs.append(partial * inv)
        object.__setattr__(self, "crt_weights", tuple(weights))
        object.__setattr__(self, "_coeffs", tuple(coeffs))

    @classmethod
    def from_moduli(cls, moduli) -> "RnsContext":
        return cls(ModuliSet(tuple(moduli)))


@dataclass(frozen=True, slots=True)
class RnsNumber:
    """Residue vector bound to the moduli set it was formed against."""

    residues: tuple[int, ...]
    moduli_set: ModuliSet

    def __post_init__(self) -> None:
        ms = self.moduli_set.moduli
        if len(self.residues) != len(ms):
            raise RnsError(
                f"expected {len(ms)} residues, got {len(self.residues)}"
            )
        for r, m in zip(self.residues, ms):
            if not 0 <= r < m:
                raise RnsError(f"residue {r} out of range for modulus {m}")


def _check_operand(ctx: RnsContext, value: RnsNumber) -> None:
    if value.moduli_set != ctx.moduli_set:
        raise RnsError(
            f"context mismatch: operand built over {value.moduli_set.moduli}, "
            f"context over {ctx.moduli_set.moduli}"
        )


def to_rns(ctx: RnsContext, x: int) -> RnsNumber:
    """Convert x to residues; values >= the dynamic range wrap around."""
    if x < 0:
        raise RnsError(f"negative values are unsupported, got {x}")
    x %= ctx.moduli_set.dynamic_range
    return RnsNumber(tuple(x % m for m in ctx.moduli_set.moduli), ctx.moduli_set)


def from_rns(ctx: RnsContext, value: RnsNumber) -> int:
    """Recover the unique integer in [0, M) with the given residues."""
    _check_operand(ctx, value)
    total = 0
    for r, c in zip(value.residues, ctx._coeffs):
        total += r * c
    return total % ctx.moduli_set.dynamic_range


def rns_add(ctx: RnsContext, a: RnsNumber, b: RnsNumber) -> RnsNumber:
    """Channel-wise addition; equals to_rns((A + B) mod M)."""
    _check_operand(ctx, a)
    _check_operand(ctx, b)
    residues = tuple(
        (x + y) % m
        for x, y, m in zip(a.residues, b.residues, ctx.moduli_set.moduli)
    )
    return RnsNumber(residues, ctx.moduli_set)


def rns_sub(ctx: RnsContext, a: RnsNumber, b: RnsNumber) -> RnsNumber:
    """Channel-wise subtraction with wraparound; equals to_rns((A - B) mod M)."""
    _check_operand(ctx, a)
    _check_operand(ctx, b)
    residues = tuple(
        (x + m - y) % m
        for x, y, m in zip(a.residues, b.residues, ctx.moduli_set.moduli)
    )
    return RnsNumber(residues, ctx.moduli_set)


def rns_mul(ctx: RnsContext, a: RnsNumber, b: RnsNumber) -> RnsNumber:
    """Channel-wise multiplication; equals to_rns((A * B) mod M)."""
    _check_operand(ctx, a)
    _check_operand(ctx, b)
    residues = tuple(
        (x * y) % m
        for x, y, m in zip(a.residues, b.residues, ctx.moduli_set.moduli)
    )
    return RnsNumber(residues, ctx.moduli_set)


def rns_pow(ctx: RnsContext, a: RnsNumber, e: int) -> RnsNumber:
    """Channel-wise exponentiation (square-and-multiply per channel)."""
    _check_operand(ctx, a)
    if e < 0:
        raise RnsError(f"exponent must be >= 0, got {e}")
    residues = tuple(
        pow(x, e, m) for x, m in zip(a.residues, ctx.moduli_set.moduli)
    )
    return RnsNumber(residues, ctx.moduli_set)
