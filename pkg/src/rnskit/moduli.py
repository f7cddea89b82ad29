"""Moduli-set generation, baseline families, bit-cost, and validation.

The generator pivots on an even integer near the n-th root of the target
range: the consecutive triple (c, c+1, c-1) around an even c is always
pairwise coprime, and for cardinalities above three the remaining slots
are filled greedily with the smallest integers that stay coprime to the
set while covering what is left of the range.

A set of t moduli represents every integer in [0, M) where M is the
product of the moduli (the dynamic range); the total width of the set is
the sum of the moduli's binary bit-lengths, and lower is better.
"""

from __future__ import annotations

from dataclasses import dataclass, field

from .numbers import bit_length, ceil_nth_root, coprime_to_all, gcd

__all__ = [
    "ModuliSet",
    "GenerationRequest",
    "GenerationTrace",
    "ExtraChoice",
    "SchemeId",
    "ValidationReport",
    "CardinalityError",
    "RangeTooSmallError",
    "find_moduli",
    "baseline",
    "bit_cost",
    "validate",
]

BASELINE_FAMILIES = ("sm1", "sm2", "sm3")


class CardinalityError(ValueError):
    """Requested cardinality is below the minimum of three."""


class RangeTooSmallError(ValueError):
    """The bit budget is too small for the request (a modulus < 2 would result)."""


@dataclass(frozen=True, slots=True)
class ModuliSet:
    """Ordered moduli with their cached dynamic range (exact product).

    Construction is permissive so that invalid candidate sets can still be
    inspected; `validate` reports >= 2 / coprimality / range violations.
    """

    moduli: tuple[int, ...]
    dynamic_range: int = field(init=False)

    def __post_init__(self) -> None:
        ms = tuple(int(m) for m in self.moduli)
        object.__setattr__(self, "moduli", ms)
        prod = 1
        for m in ms:
            prod *= m
        object.__setattr__(self, "dynamic_range", prod)

    def __len__(self) -> int:
        return len(self.moduli)

    def __iter__(self):
        return iter(self.moduli)


@dataclass(frozen=True, slots=True)
class GenerationRequest:
    """Target width in bits and the number of moduli to generate."""

    bits: int
    cardinality: int

    def __post_init__(self) -> None:
        if self.cardinality < 3:
            raise CardinalityError(
                f"cardinality must be >= 3, got {self.cardinality}"
            )
        if self.bits < 2:
            raise RangeTooSmallError(f"bits must be >= 2, got {self.bits}")


@dataclass(frozen=True, slots=True)
class ExtraChoice:
    """One greedy fill step beyond the triple.

    k is the exact ceiling of remaining-range over product-so-far, k_root
    its descending-index integer root (k itself for the final slot), and
    chosen the smallest candidate >= max(k_root, 2) coprime to everything
    picked before it.
    """

    k: int
    k_root: int
    chosen: int


@dataclass(frozen=True, slots=True)
class GenerationTrace:
    """Intermediate generator quantities, kept for inspection and audits."""

    x: int
    center: int
    extras: tuple[ExtraChoice, ...]


@dataclass(frozen=True, slots=True)
class SchemeId:
    """Identifies a generation scheme: ours at some cardinality, or a baseline.

    family is "proposed" (cardinality >= 3 required) or one of the
    power-of-two baseline families "sm1", "sm2", "sm3".
    """

    family: str
    cardinality: int | None = None

    def __post_init__(self) -> None:
        if self.family == "proposed":
            if self.cardinality is None or self.cardinality < 3:
                raise CardinalityError(
                    f"proposed scheme needs cardinality >= 3, got {self.cardinality}"
                )
        elif self.family in BASELINE_FAMILIES:
            if self.cardinality is not None:
                raise ValueError(f"{self.family} does not take a cardinality")
        else:
            raise ValueError(f"unknown scheme family {self.family!r}")

    @classmethod
    def parse(cls, label: str) -> "SchemeId":
        """Parse labels like "proposed4" or "sm1" (case-insensitive)."""
        text = label.strip().lower()
        if text.startswith("proposed"):
            suffix = text[len("proposed"):]
            if not suffix.isdigit():
                raise ValueError(f"unknown scheme {label!r}")
            return cls("proposed", int(suffix))
        if text in BASELINE_FAMILIES:
            return cls(text)
        raise ValueError(f"unknown scheme {label!r}")

    @property
    def label(self) -> str:
        if self.family == "proposed":
            return f"proposed{self.cardinality}"
        return self.family


@dataclass(frozen=True, slots=True)
class ValidationReport:
    """Outcome of the three structural checks on a candidate set."""

    small_moduli: tuple[int, ...]
    conflicting_pairs: tuple[tuple[int, int], ...]
    shortfall: int

    @property
    def moduli_ok(self) -> bool:
        return not self.small_moduli

    @property
    def coprime_ok(self) -> bool:
        return not self.conflicting_pairs

    @property
    def range_ok(self) -> bool:
        return self.shortfall == 0

    @property
    def ok(self) -> bool:
        return self.moduli_ok and self.coprime_ok and self.range_ok


def find_moduli(req: GenerationRequest) -> tuple[ModuliSet, GenerationTrace]:
    """Generate a pairwise-coprime moduli set covering 2**bits - 1.

    Steps: take x = ceil(cardinality-th root of 2**bits - 1) and round it
    up to an even center c.  For cardinality 3, grow c by 2 until
    c(c+1)(c-1) covers the target, and return (c, c+1, c-1).  For larger
    cardinalities keep the triple and append, one slot at a time, the
    smallest integer >= max(k_root, 2) coprime to all earlier picks,
    where k is the exact ceiling of target / product-so-far and k_root
    its integer root of descending index (square root for the
    next-to-last two slots... down to k itself for the last).

    Moduli are returned in generation order.  The accompanying trace
    records x, the final center, and every (k, k_root, chosen) step.
    """
    target = (1 << req.bits) - 1
    x = ceil_nth_root(target, req.cardinality)
    center = x if x % 2 == 0 else x + 1
    if req.cardinality == 3:
        while center * (center + 1) * (center - 1) < target:
            center += 2
    if center - 1 < 2:
        raise RangeTooSmallError(
            f"bits={req.bits} with cardinality={req.cardinality} forces "
            f"modulus {center - 1} < 2"
        )
    picked = [center, center + 1, center - 1]
    extras = []
    for j in range(1, req.cardinality - 2):
        product = 1
        for m in picked:
            product *= m
        k = (target + product - 1) // product
        k_root = ceil_nth_root(k, req.cardinality - 2 - j)
        candidate = max(k_root, 2)
        while not coprime_to_all(candidate, picked):
            candidate += 1
        extras.append(ExtraChoice(k=k, k_root=k_root, chosen=candidate))
        picked.append(candidate)
    return ModuliSet(tuple(picked)), GenerationTrace(x, center, tuple(extras))


def _family_member(family: str, n: int) -> tuple[int, ...]:
    p = 1 << n
    if family == "sm1":
        return (p, p + 1, p - 1)
    if family == "sm2":
        return (p, p - 1, (p >> 1) - 1)
    if family == "sm3":
        return ((1 << (2 * n)) + 1, p + 1, p - 1)
    raise ValueError(f"unknown baseline family {family!r}")


def baseline(scheme: SchemeId, bits: int) -> ModuliSet:
    """Smallest member of a power-of-two baseline family covering 2**bits - 1.

    Walks the family parameter upward and returns the first member whose
    moduli are all >= 2 and whose product reaches the target.
    """
    if scheme.family not in BASELINE_FAMILIES:
        raise ValueError(f"baseline requires one of {BASELINE_FAMILIES}, got {scheme.label}")
    if bits < 2:
        raise RangeTooSmallError(f"bits must be >= 2, got {bits}")
    target = (1 << bits) - 1
    n = 1
    while True:
        ms = _family_member(scheme.family, n)
        if min(ms) >= 2:
            prod = ms[0] * ms[1] * ms[2]
            if prod >= target:
                return ModuliSet(ms)
        n += 1


def bit_cost(moduli_set: ModuliSet) -> int:
    """Total binary width of the set: sum of bit_length over the moduli."""
    return sum(bit_length(m) for m in moduli_set.moduli)


def validate(moduli_set: ModuliSet, bits: int) -> ValidationReport:
    """Check moduli >= 2, pairwise coprimality, and range coverage.

    The report carries each failure separately: the offending small
    moduli, every non-coprime pair, and how far the dynamic range falls
    short of 2**bits - 1 (zero when covered).
    """
    ms = moduli_set.moduli
    small = tuple(m for m in ms if m < 2)
    pairs = tuple(
        (ms[i], ms[j])
        for i in range(len(ms))
        for j in range(i + 1, len(ms))
        if gcd(ms[i], ms[j]) != 1
    )
    target = (1 << bits) - 1
    shortfall = max(0, target - moduli_set.dynamic_range)
    return ValidationReport(small, pairs, shortfall)
