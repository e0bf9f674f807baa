"""Roots of unity as signed permutations of +/-1 bit strings.

For p = 4 the square root of i acts as ``{a1, a2, a3, a4} -> {-a4, a3, a1, a2}``.
The general operator is defined by halving::

    Omega_p {S1, S2} = {Omega_{p/2}(S2), S1},    Omega_1(a) = -a

which reproduces the p = 4 rule and has order 2p, so it realises
``exp(i*pi/p)``.  Operators are kept as (permutation, sign) index arrays;
nothing here builds a dense matrix.
"""
from __future__ import annotations

import struct
from dataclasses import dataclass
from fractions import Fraction
from functools import lru_cache

import numpy as np

__all__ = [
    "BitString",
    "PhaseOperator",
    "is_power_of_two",
    "negate",
    "omega_apply",
    "omega_permutation",
    "order_of",
    "apply_phase",
]


def is_power_of_two(p: int) -> bool:
    return p >= 1 and p & (p - 1) == 0


def _check_p(p: int) -> None:
    if not is_power_of_two(p):
        raise ValueError(f"p must be a power of 2, got {p}")


class BitString:
    """An immutable length-p string over {+1, -1}."""

    __slots__ = ("_entries",)

    def __init__(self, entries):
        arr = np.array(entries, dtype=np.int8).reshape(-1)
        if arr.size == 0:
            raise ValueError("bit string must be non-empty")
        if not np.all((arr == 1) | (arr == -1)):
            raise ValueError("entries must be +1 or -1")
        arr.setflags(write=False)
        self._entries = arr

    @classmethod
    def _wrap(cls, arr: np.ndarray) -> "BitString":
        obj = cls.__new__(cls)
        arr = np.ascontiguousarray(arr, dtype=np.int8)
        arr.setflags(write=False)
        obj._entries = arr
        return obj

    @property
    def entries(self) -> np.ndarray:
        return self._entries

    @property
    def p(self) -> int:
        return int(self._entries.size)

    def __len__(self):
        return self.p

    def __iter__(self):
        return (int(a) for a in self._entries)

    def __getitem__(self, i):
        return int(self._entries[i])

    def __eq__(self, other):
        if not isinstance(other, BitString):
            return NotImplemented
        return np.array_equal(self._entries, other._entries)

    def __hash__(self):
        return hash(self._entries.tobytes())

    def __neg__(self):
        return negate(self)

    def __repr__(self):
        if self.p <= 16:
            return "BitString(" + "".join("+" if a > 0 else "-" for a in self._entries) + ")"
        return f"BitString(p={self.p}, plus={self.count(1)})"

    def count(self, outcome: int) -> int:
        return int(np.count_nonzero(self._entries == outcome))

    def to_bytes(self) -> bytes:
        """4-byte big-endian length, then one bit per entry (1 marks -1)."""
        return struct.pack(">I", self.p) + np.packbits(self._entries < 0).tobytes()

    @classmethod
    def from_bytes(cls, data: bytes) -> "BitString":
        (p,) = struct.unpack(">I", data[:4])
        body = np.frombuffer(data[4:], dtype=np.uint8)
        if body.size != (p + 7) // 8:
            raise ValueError("payload length does not match header")
        bits = np.unpackbits(body)[:p]
        return cls._wrap(np.where(bits == 1, -1, 1))


def negate(s: BitString) -> BitString:
    return BitString._wrap(-s.entries)


@lru_cache(maxsize=64)
def _omega_arrays(p: int) -> tuple[np.ndarray, np.ndarray]:
    if p == 1:
        perm, sign = np.zeros(1, dtype=np.int64), -np.ones(1, dtype=np.int8)
    else:
        h = p // 2
        hp, hs = _omega_arrays(h)
        perm = np.concatenate([hp + h, np.arange(h)])
        sign = np.concatenate([hs, np.ones(h, dtype=np.int8)])
    perm.setflags(write=False)
    sign.setflags(write=False)
    return perm, sign


def omega_permutation(p: int) -> tuple[np.ndarray, np.ndarray]:
    """(perm, sign) with ``Omega_p(S)[i] = sign[i] * S[perm[i]]``."""
    _check_p(p)
    return _omega_arrays(p)


def omega_apply(s: BitString) -> BitString:
    perm, sign = omega_permutation(s.p)
    return BitString._wrap(sign * s.entries[perm])


def _compose(outer, inner):
    # (outer . inner)(S)[i] = so[i] * si[po[i]] * S[pi[po[i]]]
    po, so = outer
    pi, si = inner
    return pi[po], (so * si[po]).astype(np.int8)


def _power(p: int, n: int):
    base = omega_permutation(p)
    result = (np.arange(p), np.ones(p, dtype=np.int8))
    while n:
        if n & 1:
            result = _compose(base, result)
        base = _compose(base, base)
        n >>= 1
    return result


def order_of(p: int) -> int:
    """Least k > 0 with Omega_p**k = identity, found by repeated composition."""
    _check_p(p)
    base = omega_permutation(p)
    ident = np.arange(p)
    cur = base
    k = 1
    while not (np.array_equal(cur[0], ident) and np.all(cur[1] == 1)):
        cur = _compose(base, cur)
        k += 1
    return k


def apply_phase(s: BitString, n: int) -> BitString:
    """Apply ``Omega_p**n``, i.e. multiply by exp(i*pi*n/p)."""
    _check_p(s.p)
    perm, sign = _power(s.p, n % (2 * s.p))
    return BitString._wrap(sign * s.entries[perm])


@dataclass(frozen=True)
class PhaseOperator:
    """``Omega_p**exponent`` with the exponent reduced mod 2p."""

    p: int
    exponent: int = 1

    def __post_init__(self):
        _check_p(self.p)
        object.__setattr__(self, "exponent", self.exponent % (2 * self.p))

    def __call__(self, s: BitString) -> BitString:
        if s.p != self.p:
            raise ValueError(f"operator is for p={self.p}, string has p={s.p}")
        return apply_phase(s, self.exponent)

    def __mul__(self, other: "PhaseOperator") -> "PhaseOperator":
        if other.p != self.p:
            raise ValueError("cannot compose operators for different p")
        return PhaseOperator(self.p, self.exponent + other.exponent)

    def __pow__(self, k: int) -> "PhaseOperator":
        return PhaseOperator(self.p, self.exponent * k)

    def signed_permutation(self) -> tuple[np.ndarray, np.ndarray]:
        return _power(self.p, self.exponent)

    @property
    def turn(self) -> Fraction:
        return Fraction(self.exponent, 2 * self.p)
