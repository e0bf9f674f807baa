"""Hilbert states over C_p as finite ensembles of labelled trajectories.

A qubit is a length-p bit string of outcome labels; the squared amplitude
of outcome +1 is the fraction of +1 labels.  The complex phase is kept as
an exponent of the bit-string root of unity and never touches the labels,
so phases cannot move Born frequencies.  Joint states are Cartesian
products of strings, and a singlet pair at relative angle theta is a list
of p label pairs of which m agree, with cos(theta) = 1 - 2m/p.
"""
from __future__ import annotations

import csv
import io
import itertools
from collections import Counter
from dataclasses import dataclass
from fractions import Fraction
from functools import reduce

import numpy as np

from .bits import BitString, apply_phase, is_power_of_two

__all__ = [
    "QubitEnsemble",
    "MultiQubitEnsemble",
    "SingletPairEnsemble",
    "make_qubit",
    "born_frequency",
    "tensor",
    "singlet_ensemble",
    "correlation",
]


@dataclass(frozen=True)
class QubitEnsemble:
    p: int
    bits: BitString
    phase_exponent: int = 0

    def __post_init__(self):
        if not is_power_of_two(self.p):
            raise ValueError(f"p must be a power of 2, got {self.p}")
        if self.bits.p != self.p:
            raise ValueError("bit string length differs from p")
        object.__setattr__(self, "phase_exponent", self.phase_exponent % (2 * self.p))

    @property
    def m(self) -> int:
        return self.bits.count(1)

    def amp2(self) -> Fraction:
        return Fraction(self.m, self.p)

    def rotate(self, n: int) -> "QubitEnsemble":
        """Multiply by exp(i*pi*n/p)."""
        return QubitEnsemble(self.p, self.bits, self.phase_exponent + n)

    def phase_string(self) -> BitString:
        """The labels acted on by the phase operator: the constructive form of the phase."""
        return apply_phase(self.bits, self.phase_exponent)

    def to_dict(self) -> dict:
        return {"p": self.p, "m": self.m, "phase_exponent": self.phase_exponent}


def make_qubit(m: int, n: int, p: int) -> QubitEnsemble:
    """Canonical ensemble: first m labels +1, the rest -1, phase exponent n."""
    if not is_power_of_two(p):
        raise ValueError(f"p must be a power of 2, got {p}")
    if not 0 <= m <= p:
        raise ValueError(f"m must lie in [0, {p}], got {m}")
    entries = np.where(np.arange(p) < m, 1, -1)
    return QubitEnsemble(p, BitString(entries), n)


def born_frequency(q: QubitEnsemble, outcome: int) -> Fraction:
    if outcome not in (1, -1):
        raise ValueError("outcome must be +1 or -1")
    return Fraction(q.bits.count(outcome), q.p)


@dataclass(frozen=True)
class MultiQubitEnsemble:
    components: tuple[QubitEnsemble, ...]

    @property
    def size(self) -> int:
        return reduce(lambda a, q: a * q.p, self.components, 1)

    def rows(self):
        """Every joint row of the Cartesian product, in lexicographic order."""
        return itertools.product(*(tuple(q.bits) for q in self.components))

    def joint_counts(self) -> dict[tuple[int, ...], int]:
        """Counts per joint outcome, from the component counts."""
        per = [{1: q.bits.count(1), -1: q.bits.count(-1)} for q in self.components]
        out = {}
        for outcome in itertools.product((1, -1), repeat=len(per)):
            n = 1
            for c, o in zip(per, outcome):
                n *= c[o]
            out[outcome] = n
        return out

    def enumerate_counts(self) -> dict[tuple[int, ...], int]:
        """Counts per joint outcome by walking every row."""
        c = Counter(self.rows())
        return {o: c.get(o, 0) for o in itertools.product((1, -1), repeat=len(self.components))}

    def joint_frequency(self, outcome: tuple[int, ...]) -> Fraction:
        return Fraction(self.joint_counts()[tuple(outcome)], self.size)

    def marginal_counts(self, k: int) -> dict[int, int]:
        """Sum the joint table over every factor except k, expressed per row of factor k."""
        others = self.size // self.components[k].p
        out = {1: 0, -1: 0}
        for outcome, n in self.joint_counts().items():
            out[outcome[k]] += n
        return {o: n // others for o, n in out.items()}

    def frequency_csv(self) -> str:
        buf = io.StringIO()
        w = csv.writer(buf, lineterminator="\n")
        w.writerow([f"q{k}" for k in range(len(self.components))] + ["count", "frequency"])
        for outcome, n in self.joint_counts().items():
            w.writerow(list(outcome) + [n, str(Fraction(n, self.size))])
        return buf.getvalue()


def tensor(*qs: QubitEnsemble) -> MultiQubitEnsemble:
    parts = []
    for q in qs:
        parts.extend(q.components if isinstance(q, MultiQubitEnsemble) else [q])
    return MultiQubitEnsemble(tuple(parts))


@dataclass(frozen=True, eq=False)
class SingletPairEnsemble:
    """p rows (A_i, B_i); exactly m agree.

    Rows are canonical: A alternates +1, -1 and the first m rows agree.
    """

    p: int
    m: int
    pairs: np.ndarray

    def __post_init__(self):
        pairs = np.asarray(self.pairs, dtype=np.int8)
        if pairs.shape != (self.p, 2):
            raise ValueError(f"pairs must have shape ({self.p}, 2)")
        pairs.setflags(write=False)
        object.__setattr__(self, "pairs", pairs)

    @property
    def cos_theta(self) -> Fraction:
        return 1 - Fraction(2 * self.m, self.p)

    def agreements(self) -> int:
        return int(np.count_nonzero(self.pairs[:, 0] == self.pairs[:, 1]))

    def to_csv(self) -> str:
        buf = io.StringIO()
        w = csv.writer(buf, lineterminator="\n")
        w.writerow(["i", "A", "B"])
        for i, (a, b) in enumerate(self.pairs.tolist()):
            w.writerow([i, a, b])
        return buf.getvalue()

    def to_dict(self) -> dict:
        return {"p": self.p, "m": self.m}


def singlet_ensemble(p: int, m: int) -> SingletPairEnsemble:
    if p < 1:
        raise ValueError(f"p must be >= 1, got {p}")
    if not 0 <= m <= p:
        raise ValueError(f"m must lie in [0, {p}], got {m}")
    i = np.arange(p)
    a = np.where(i % 2 == 0, 1, -1).astype(np.int8)
    b = np.where(i < m, a, -a).astype(np.int8)
    return SingletPairEnsemble(p, m, np.stack([a, b], axis=1))


def correlation(pairs: SingletPairEnsemble) -> Fraction:
    """Mean of A_i * B_i as an exact rational."""
    prod = pairs.pairs[:, 0].astype(np.int64) * pairs.pairs[:, 1]
    return Fraction(int(prod.sum()), pairs.p)
