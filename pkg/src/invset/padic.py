"""Truncated p-adic integers as addresses in a nested-disk fractal.

Digit 0 is the coarsest level: the disk a trajectory passes through in the
first cross-section.  Digit k picks one of the p sub-disks at level k.  As a
p-adic integer the same digits read least-significant first, so two
addresses sharing a prefix of length k are within p**-k of each other.
"""
from __future__ import annotations

import csv
import io
from collections.abc import Callable, Mapping, Sequence
from dataclasses import dataclass
from fractions import Fraction

__all__ = [
    "STANDARD",
    "UNNORMALIZED",
    "PadicInt",
    "DiskEntry",
    "DiskAddress",
    "valuation",
    "distance",
    "add",
    "mul",
    "address_to_padic",
    "padic_to_address",
    "cluster_label",
    "default_alphabet",
    "parity_colorings",
    "distance_matrix_csv",
]

STANDARD = "standard"
UNNORMALIZED = "unnormalized"
_CONVENTIONS = (STANDARD, UNNORMALIZED)


@dataclass(frozen=True)
class PadicInt:
    p: int
    digits: tuple[int, ...]

    def __post_init__(self):
        if self.p < 2:
            raise ValueError(f"p must be >= 2, got {self.p}")
        digits = tuple(int(d) for d in self.digits)
        if not digits:
            raise ValueError("depth must be >= 1")
        for k, d in enumerate(digits):
            if not 0 <= d < self.p:
                raise ValueError(f"digit {d} at level {k} is outside [0, {self.p})")
        object.__setattr__(self, "digits", digits)

    @property
    def depth(self) -> int:
        return len(self.digits)

    @classmethod
    def from_int(cls, value: int, p: int, depth: int) -> "PadicInt":
        value %= p**depth
        digits = []
        for _ in range(depth):
            value, d = divmod(value, p)
            digits.append(d)
        return cls(p, tuple(digits))

    def to_int(self) -> int:
        """Representative in [0, p**depth)."""
        v = 0
        for d in reversed(self.digits):
            v = v * self.p + d
        return v

    def to_dict(self) -> dict:
        return {"p": self.p, "depth": self.depth, "digits": list(self.digits)}

    @classmethod
    def from_dict(cls, d: dict) -> "PadicInt":
        x = cls(int(d["p"]), tuple(d["digits"]))
        if "depth" in d and int(d["depth"]) != x.depth:
            raise ValueError("depth field does not match number of digits")
        return x

    def __add__(self, other):
        return add(self, other)

    def __mul__(self, other):
        return mul(self, other)


def _check_pair(x: PadicInt, y: PadicInt, same_depth: bool = False) -> None:
    if x.p != y.p:
        raise ValueError(f"mismatched p: {x.p} vs {y.p}")
    if same_depth and x.depth != y.depth:
        raise ValueError(f"mismatched depth: {x.depth} vs {y.depth}")


def valuation(x: PadicInt, y: PadicInt) -> int | None:
    """Index of the first differing digit, None if x == y."""
    _check_pair(x, y, same_depth=True)
    for k, (a, b) in enumerate(zip(x.digits, y.digits)):
        if a != b:
            return k
    return None


def distance(x: PadicInt, y: PadicInt, conv: str = STANDARD) -> Fraction:
    """Ultrametric distance p**-v (standard) or p**(1-v) (unnormalized).

    Under the unnormalized convention, points that already differ at the
    coarsest level are exactly p apart.
    """
    if conv not in _CONVENTIONS:
        raise ValueError(f"unknown metric convention {conv!r}")
    v = valuation(x, y)
    if v is None:
        return Fraction(0)
    e = -v if conv == STANDARD else 1 - v
    return Fraction(x.p) ** e


def add(x: PadicInt, y: PadicInt) -> PadicInt:
    """Digit-wise addition with carries, truncated to the common depth."""
    _check_pair(x, y)
    depth = min(x.depth, y.depth)
    out = []
    carry = 0
    for k in range(depth):
        carry, d = divmod(x.digits[k] + y.digits[k] + carry, x.p)
        out.append(d)
    return PadicInt(x.p, tuple(out))


def mul(x: PadicInt, y: PadicInt) -> PadicInt:
    """Schoolbook product, truncated to the common depth."""
    _check_pair(x, y)
    depth = min(x.depth, y.depth)
    acc = [0] * depth
    for i in range(depth):
        xi = x.digits[i]
        if xi == 0:
            continue
        for j in range(depth - i):
            acc[i + j] += xi * y.digits[j]
    out = []
    carry = 0
    for k in range(depth):
        carry, d = divmod(acc[k] + carry, x.p)
        out.append(d)
    return PadicInt(x.p, tuple(out))


# --------------------------------------------------------------------------
# disk addresses

Coloring = Callable[[int], str] | Mapping[int, str]


def _color(coloring: Coloring, digit: int) -> str:
    if isinstance(coloring, Mapping):
        return coloring[digit]
    return coloring(digit)


def default_alphabet(level: int) -> tuple[str, str]:
    """Cluster labels for one level: (a, ~a), (b, ~b), ..."""
    name = chr(ord("a") + level) if level < 26 else f"c{level}"
    return name, "~" + name


def parity_colorings(depth: int) -> list[Callable[[int], str]]:
    """Even disks go to the positive cluster, odd disks to its complement."""
    def make(level):
        pos, neg = default_alphabet(level)
        return lambda d: pos if d % 2 == 0 else neg
    return [make(k) for k in range(depth)]


@dataclass(frozen=True)
class DiskEntry:
    level: int
    index: int
    label: str


@dataclass(frozen=True)
class DiskAddress:
    """One disk per fractal level, each with its cluster label."""

    p: int
    entries: tuple[DiskEntry, ...]
    alphabets: tuple[tuple[str, ...], ...] | None = None

    def __post_init__(self):
        entries = tuple(self.entries)
        if not entries:
            raise ValueError("address needs at least one level")
        for k, e in enumerate(entries):
            if e.level != k:
                raise ValueError(f"entry {k} has level {e.level}")
            if not 0 <= e.index < self.p:
                raise ValueError(f"disk index {e.index} at level {k} is outside [0, {self.p})")
            alphabet = self.alphabets[k] if self.alphabets else default_alphabet(k)
            if e.label not in alphabet:
                raise ValueError(f"label {e.label!r} at level {k} not in {alphabet}")
        object.__setattr__(self, "entries", entries)


def address_to_padic(addr: DiskAddress) -> PadicInt:
    return PadicInt(addr.p, tuple(e.index for e in addr.entries))


def padic_to_address(x: PadicInt, colorings: Sequence[Coloring] | None = None,
                     alphabets=None) -> DiskAddress:
    colorings = colorings if colorings is not None else parity_colorings(x.depth)
    entries = tuple(DiskEntry(k, d, _color(colorings[k], d)) for k, d in enumerate(x.digits))
    return DiskAddress(x.p, entries, alphabets)


def cluster_label(x: PadicInt, level: int, coloring: Coloring) -> str:
    if not 0 <= level < x.depth:
        raise ValueError(f"level {level} outside [0, {x.depth})")
    return _color(coloring, x.digits[level])


def distance_matrix_csv(points: Sequence[PadicInt], conv: str = STANDARD) -> str:
    """Pairwise distances as CSV; the header row lists each point's digits."""
    names = ["".join(f"{d}." for d in x.digits).rstrip(".") for x in points]
    buf = io.StringIO()
    w = csv.writer(buf, lineterminator="\n")
    w.writerow([""] + names)
    for name, x in zip(names, points):
        w.writerow([name] + [str(distance(x, y, conv)) for y in points])
    return buf.getvalue()
