"""Exact arithmetic over the finite rational-complex sets C_p.

An element A*exp(i*phi) is stored by its squared amplitude A**2 and its
phase in turns (phi / 2pi), both as :class:`fractions.Fraction`.  Membership
of C_p means A**2 = m/p and phi/2pi = n/p for integers m, n.

Multiplication never leaves the rationals.  Addition does, and deciding when
it does is the job of :func:`niven_classify`: the cosine of a rational number
of turns j/n has algebraic degree phi(n)/2, so it is rational only for
n in {1, 2, 3, 4, 6}.
"""
from __future__ import annotations

import math
from dataclasses import dataclass
from fractions import Fraction
from typing import NamedTuple, Union

import mpmath

__all__ = [
    "ExactPolar",
    "ApproxPolar",
    "QuadSurd",
    "CosineClass",
    "ClosureVerdict",
    "AddResult",
    "MomentumResult",
    "MEMBER",
    "NON_MEMBER",
    "INDETERMINATE",
    "totient",
    "make_cp",
    "is_member",
    "minimal_grid",
    "mul",
    "niven_classify",
    "sine_classify",
    "try_add",
    "momentum_difference",
    "half_grid_product_closure",
]

MEMBER = "Member"
NON_MEMBER = "NonMember"
INDETERMINATE = "Indeterminate"

_DIGITS = 50
_RATIONAL_DENOMINATORS = frozenset({1, 2, 3, 4, 6})

Rational = Union[int, Fraction]


def _frac(x) -> Fraction:
    if isinstance(x, float):
        raise TypeError("floats are not accepted in exact arithmetic; use Fraction or str")
    return Fraction(x)


def totient(n: int) -> int:
    """Euler's phi by trial division."""
    if n < 1:
        raise ValueError("totient is defined for n >= 1")
    result = n
    k = n
    q = 2
    while q * q <= k:
        if k % q == 0:
            while k % q == 0:
                k //= q
            result -= result // q
        q += 1
    if k > 1:
        result -= result // k
    return result


def _rational_sqrt(x: Fraction) -> Fraction | None:
    if x < 0:
        return None
    rn, rd = math.isqrt(x.numerator), math.isqrt(x.denominator)
    if rn * rn == x.numerator and rd * rd == x.denominator:
        return Fraction(rn, rd)
    return None


# --------------------------------------------------------------------------
# quadratic surds


@dataclass(frozen=True)
class QuadSurd:
    """The real number ``a + b*sqrt(d)`` with rational a, b and squarefree d > 1.

    Only what the degree-2 cosines and CHSH sums need: ring operations within
    one quadratic field, exact sign, and numeric evaluation.
    """

    a: Fraction
    b: Fraction
    d: int

    def __post_init__(self):
        object.__setattr__(self, "a", Fraction(self.a))
        object.__setattr__(self, "b", Fraction(self.b))
        if self.d < 2:
            raise ValueError("d must be a squarefree integer > 1")

    @staticmethod
    def make(a, b, d: int) -> Fraction | "QuadSurd":
        """Build ``a + b*sqrt(d)``, collapsing to a Fraction when b == 0."""
        b = Fraction(b)
        if b == 0:
            return Fraction(a)
        return QuadSurd(Fraction(a), b, d)

    def _coerce(self, other):
        if isinstance(other, QuadSurd):
            if other.d != self.d:
                raise ValueError(f"surds from different fields: sqrt({self.d}) vs sqrt({other.d})")
            return other.a, other.b
        if isinstance(other, (int, Fraction)):
            return Fraction(other), Fraction(0)
        return None

    def __add__(self, other):
        c = self._coerce(other)
        if c is None:
            return NotImplemented
        return QuadSurd.make(self.a + c[0], self.b + c[1], self.d)

    __radd__ = __add__

    def __neg__(self):
        return QuadSurd(-self.a, -self.b, self.d)

    def __sub__(self, other):
        c = self._coerce(other)
        if c is None:
            return NotImplemented
        return QuadSurd.make(self.a - c[0], self.b - c[1], self.d)

    def __rsub__(self, other):
        return (-self) + other

    def __mul__(self, other):
        c = self._coerce(other)
        if c is None:
            return NotImplemented
        x, y = c
        return QuadSurd.make(self.a * x + self.b * y * self.d, self.a * y + self.b * x, self.d)

    __rmul__ = __mul__

    def __truediv__(self, other):
        if isinstance(other, (int, Fraction)):
            other = Fraction(other)
            return QuadSurd.make(self.a / other, self.b / other, self.d)
        return NotImplemented

    def sign(self) -> int:
        sa = (self.a > 0) - (self.a < 0)
        sb = (self.b > 0) - (self.b < 0)
        if sa == 0 or sa == sb:
            return sb if sa == 0 else sa
        # opposite signs: compare a**2 with b**2 * d
        diff = self.a * self.a - self.b * self.b * self.d
        return sa if diff > 0 else sb

    def __abs__(self):
        return -self if self.sign() < 0 else self

    def _cmp(self, other) -> int:
        return (self - other).sign() if not isinstance(other, float) else (
            (float(self) > other) - (float(self) < other))

    def __lt__(self, other):
        return self._cmp(other) < 0

    def __le__(self, other):
        return self._cmp(other) <= 0

    def __gt__(self, other):
        return self._cmp(other) > 0

    def __ge__(self, other):
        return self._cmp(other) >= 0

    def to_mpf(self):
        return mpmath.mpf(self.a.numerator) / self.a.denominator + (
            mpmath.mpf(self.b.numerator) / self.b.denominator) * mpmath.sqrt(self.d)

    def __float__(self):
        with mpmath.workdps(30):
            return float(self.to_mpf())

    def __str__(self):
        return f"{self.a} + {self.b}*sqrt({self.d})" if self.a else f"{self.b}*sqrt({self.d})"


# --------------------------------------------------------------------------
# polar values


@dataclass(frozen=True)
class ExactPolar:
    """``sqrt(amp2) * exp(2*pi*i*turn)`` with rational amp2 and turn.

    The turn is reduced into [0, 1); the zero value has turn 0.
    """

    amp2: Fraction
    turn: Fraction = Fraction(0)

    def __post_init__(self):
        amp2 = _frac(self.amp2)
        if amp2 < 0:
            raise ValueError("squared amplitude must be non-negative")
        turn = Fraction(0) if amp2 == 0 else _frac(self.turn) % 1
        object.__setattr__(self, "amp2", amp2)
        object.__setattr__(self, "turn", turn)

    @property
    def is_zero(self) -> bool:
        return self.amp2 == 0

    def to_complex(self) -> complex:
        return complex(mpmath.sqrt(self.amp2.numerator / mpmath.mpf(self.amp2.denominator))
                       * mpmath.expjpi(2 * mpmath.mpf(self.turn.numerator) / self.turn.denominator))

    def to_dict(self) -> dict:
        return {
            "amp2_num": self.amp2.numerator,
            "amp2_den": self.amp2.denominator,
            "turn_num": self.turn.numerator,
            "turn_den": self.turn.denominator,
        }

    @classmethod
    def from_dict(cls, d: dict) -> "ExactPolar":
        return cls(Fraction(d["amp2_num"], d["amp2_den"]), Fraction(d["turn_num"], d["turn_den"]))


@dataclass(frozen=True)
class ApproxPolar:
    """A sum that left the rationals: amp2 is known only numerically (50 digits).

    ``turn`` stays exact when the phase is still a rational number of turns,
    otherwise it is an mpf.
    """

    amp2: object
    turn: object

    is_zero = False

    def to_complex(self) -> complex:
        t = self.turn
        if isinstance(t, Fraction):
            t = mpmath.mpf(t.numerator) / t.denominator
        return complex(mpmath.sqrt(self.amp2) * mpmath.expjpi(2 * t))


def make_cp(m: int, n: int, p: int) -> ExactPolar:
    """The element of C_p with amp2 = m/p and turn = n/p."""
    if p < 1:
        raise ValueError(f"p must be >= 1, got {p}")
    if m < 0:
        raise ValueError(f"m must be non-negative, got {m}")
    return ExactPolar(Fraction(m, p), Fraction(n % p, p))


def is_member(x, p: int) -> bool:
    """True iff x lies in C_p.  Numeric (:class:`ApproxPolar`) values never do."""
    if p < 1:
        raise ValueError(f"p must be >= 1, got {p}")
    if not isinstance(x, ExactPolar):
        return False
    return p % x.amp2.denominator == 0 and p % x.turn.denominator == 0


def minimal_grid(x: ExactPolar) -> int:
    """Smallest p with x in C_p."""
    return math.lcm(x.amp2.denominator, x.turn.denominator)


def mul(a: ExactPolar, b: ExactPolar) -> ExactPolar:
    return ExactPolar(a.amp2 * b.amp2, a.turn + b.turn)


# --------------------------------------------------------------------------
# Niven classification

# cos(2*pi*j/n) for the degree-2 denominators, keyed by (n, min(j, n - j))
_DEGREE_TWO = {
    (5, 1): (Fraction(-1, 4), Fraction(1, 4), 5),
    (5, 2): (Fraction(-1, 4), Fraction(-1, 4), 5),
    (8, 1): (Fraction(0), Fraction(1, 2), 2),
    (8, 3): (Fraction(0), Fraction(-1, 2), 2),
    (10, 1): (Fraction(1, 4), Fraction(1, 4), 5),
    (10, 3): (Fraction(1, 4), Fraction(-1, 4), 5),
    (12, 1): (Fraction(0), Fraction(1, 2), 3),
    (12, 5): (Fraction(0), Fraction(-1, 2), 3),
}

_RATIONAL_COS = {
    1: Fraction(1),
    2: Fraction(-1),
    3: Fraction(-1, 2),
    4: Fraction(0),
    6: Fraction(1, 2),
}


@dataclass(frozen=True)
class CosineClass:
    """Exact description of cos(2*pi*turn) for a rational turn.

    ``value`` is a Fraction when the degree is 1, a :class:`QuadSurd` when it
    is 2, and None beyond that (``symbol`` names the number instead).
    """

    turn: Fraction
    denominator: int
    degree: int
    value: Fraction | QuadSurd | None
    symbol: str

    @property
    def rational(self) -> bool:
        return self.degree == 1

    def numeric(self, dps: int = _DIGITS):
        with mpmath.workdps(dps + 10):
            return mpmath.cospi(2 * mpmath.mpf(self.turn.numerator) / self.turn.denominator)


def niven_classify(turn) -> CosineClass:
    """Classify cos(2*pi*turn) by the reduced denominator of ``turn``."""
    t = _frac(turn) % 1
    j, n = t.numerator, t.denominator
    degree = 1 if n <= 2 else totient(n) // 2
    symbol = f"cos(2*pi*{j}/{n})"
    if n in _RATIONAL_DENOMINATORS:
        value = _RATIONAL_COS[n]
    elif degree == 2:
        a, b, d = _DEGREE_TWO[(n, min(j, n - j))]
        value = QuadSurd(a, b, d)
    else:
        value = None
    return CosineClass(t, n, degree, value, symbol)


def sine_classify(turn) -> CosineClass:
    """sin(2*pi*turn), expressed as cos(2*pi*(1/4 - turn))."""
    return niven_classify(Fraction(1, 4) - _frac(turn))


# --------------------------------------------------------------------------
# closure verdicts


@dataclass(frozen=True)
class ClosureVerdict:
    """Outcome of a closure question.

    Member verdicts carry the minimal grid p and the integers m, n with
    amp2 = m/p, turn = n/p.  ``exact`` holds the exact squared amplitude
    whenever it is known (Fraction or QuadSurd); ``numeric`` is a
    50-significant-digit rendering of it.
    """

    tag: str
    p: int | None = None
    m: int | None = None
    n: int | None = None
    proof: str = ""
    exact: Fraction | QuadSurd | None = None
    numeric: str | None = None

    @property
    def closed(self) -> bool:
        return self.tag == MEMBER

    def to_dict(self) -> dict:
        d = {"tag": self.tag, "proof": self.proof}
        if self.tag == MEMBER:
            d.update(p=self.p, m=self.m, n=self.n)
        if self.exact is not None:
            d["exact_amp2"] = str(self.exact)
        if self.numeric is not None:
            d["numeric_amp2"] = self.numeric
        return d


class AddResult(NamedTuple):
    value: ExactPolar | ApproxPolar
    verdict: ClosureVerdict


class MomentumResult(NamedTuple):
    amplitude: Fraction | QuadSurd | None
    value: ExactPolar | ApproxPolar
    verdict: ClosureVerdict


def _nstr(x) -> str:
    if isinstance(x, (Fraction, int)):
        x = mpmath.mpf(Fraction(x).numerator) / Fraction(x).denominator
    elif isinstance(x, QuadSurd):
        x = x.to_mpf()
    return mpmath.nstr(x, _DIGITS)


def _member(x: ExactPolar, proof: str) -> ClosureVerdict:
    p = minimal_grid(x)
    return ClosureVerdict(MEMBER, p, int(x.amp2 * p), int(x.turn * p), proof, x.amp2, _nstr(x.amp2))


def _mpf(q: Fraction):
    return mpmath.mpf(q.numerator) / q.denominator


def try_add(a: ExactPolar, b: ExactPolar) -> AddResult:
    """Add two elements and decide whether the sum is still in some C_p.

    Equal amplitudes follow the half-angle identity
    ``e^{ia} + e^{ib} = 2 cos((a-b)/2) e^{i(a+b)/2}``, so the squared
    amplitude is ``2*amp2*(1 + cos(a - b))`` and closure reduces to Niven.
    Unequal amplitudes are decided from the cross term and, when the squared
    amplitude is rational, from cos(2*arg) of the sum.  Indeterminate is kept
    as a tag for callers but exact inputs always get a decision.
    """
    with mpmath.workdps(_DIGITS + 15):
        if a.is_zero or b.is_zero:
            x = b if a.is_zero else a
            return AddResult(x, _member(x, "sum with zero"))
        delta = (b.turn - a.turn) % 1
        cos_delta = niven_classify(delta)
        if a.amp2 == b.amp2:
            return _add_equal(a, b, cos_delta)
        return _add_unequal(a, b, cos_delta)


def _add_equal(a: ExactPolar, b: ExactPolar, c: CosineClass) -> AddResult:
    # half-angle direction; cos of the half difference is negative past a half turn
    d = b.turn - a.turn
    mean = (a.turn + b.turn) / 2
    if abs(d) > Fraction(1, 2):
        mean += Fraction(1, 2)
    if c.rational:
        amp2 = 2 * a.amp2 * (1 + c.value)
        x = ExactPolar(amp2, mean)
        return AddResult(x, _member(x, f"cos of relative phase is {c.value} (rational)"))
    numeric = 2 * _mpf(a.amp2) * (1 + c.numeric())
    exact = 2 * a.amp2 * (1 + c.value) if c.value is not None else None
    proof = f"cosine of degree phi({c.denominator})/2 = {c.degree} > 1"
    verdict = ClosureVerdict(NON_MEMBER, proof=proof, exact=exact, numeric=mpmath.nstr(numeric, _DIGITS))
    return AddResult(ApproxPolar(numeric, mean), verdict)


def _add_unequal(a: ExactPolar, b: ExactPolar, c: CosineClass) -> AddResult:
    # |w|^2 = a2 + b2 + 2*sqrt(a2*b2)*cos(delta).  The cross term is rational
    # only if cos(delta) is rational, or if cos(delta) = beta*sqrt(d) is a pure
    # surd and sqrt(a2*b2) = t*sqrt(d) over the same radicand.  A product
    # sqrt(x)*cos with cos of degree > 2 is never rational.
    a2, b2 = a.amp2, b.amp2
    s = _rational_sqrt(a2 * b2)
    w = mpmath.sqrt(_mpf(a2)) + mpmath.sqrt(_mpf(b2)) * mpmath.expjpi(2 * _mpf(c.turn))
    numeric_amp2 = abs(w) ** 2
    numeric_turn = (_mpf(a.turn) + mpmath.arg(w) / (2 * mpmath.pi)) % 1
    approx = ApproxPolar(numeric_amp2, numeric_turn)
    nstr = mpmath.nstr(numeric_amp2, _DIGITS)

    def non_member(proof, exact=None):
        return AddResult(approx, ClosureVerdict(NON_MEMBER, proof=proof, exact=exact, numeric=nstr))

    if c.rational:
        if c.value != 0 and s is None:
            return non_member(f"sqrt({a2 * b2}) is irrational and cos = {c.value} != 0")
        cross = 2 * s * c.value if c.value != 0 else Fraction(0)
        cos_sq = c.value * c.value
    elif c.value is None:
        return non_member(f"cosine of degree {c.degree} > 2 times sqrt({a2 * b2}) cannot be rational")
    else:
        q = c.value
        if s is not None:
            return non_member(f"rational cross amplitude times cosine of degree {c.degree} > 1",
                              a2 + b2 + 2 * s * q)
        t = _rational_sqrt(a2 * b2 / q.d)
        if t is None or q.a != 0:
            exact = a2 + b2 + 2 * t * QuadSurd(q.b * q.d, q.a, q.d) if t is not None else None
            return non_member(f"sqrt({a2 * b2}) * ({q}) is irrational", exact)
        cross = 2 * t * q.b * q.d
        cos_sq = q.b * q.b * q.d

    amp2 = a2 + b2 + cross
    if amp2 == 0:
        x = ExactPolar(0)
        return AddResult(x, _member(x, "exact cancellation"))
    # The phase relative to a is psi = arg(w).  cos(2 psi) = Re(w^2)/|w|^2 is rational here.
    re_w2 = a2 + b2 * (2 * cos_sq - 1) + cross
    cos2psi = re_w2 / amp2
    if cos2psi not in _RATIONAL_COS.values():
        return non_member(f"amp2 = {amp2} but cos(2*arg) = {cos2psi} is not a Niven value, "
                          "so the phase is irrational", amp2)
    # psi is then a multiple of 1/24 turn; 50 digits pick it out unambiguously
    psi = Fraction(int(mpmath.nint(mpmath.arg(w) / (2 * mpmath.pi) * 24)), 24)
    x = ExactPolar(amp2, a.turn + psi)
    return AddResult(x, _member(x, f"cos = {c.value}, amp2 = {amp2}, cos(2*arg) = {cos2psi}"))


def momentum_difference(k_dx_turn, dx) -> MomentumResult:
    """Amplitude ``sin(k*dx)/dx`` of the central difference of a plane wave.

    ``k_dx_turn`` is k*dx measured in turns.  The squared amplitude is
    ``(1 - cos(2*k*dx)) / (2*dx**2)``, so its rationality is decided by
    Niven on the doubled angle.
    """
    t = _frac(k_dx_turn)
    dx = _frac(dx)
    if dx <= 0:
        raise ValueError("dx must be positive; dx -> 0 is the continuum limit, outside every C_p")
    sine = sine_classify(t)
    amplitude = sine.value / dx if sine.value is not None else None
    with mpmath.workdps(_DIGITS + 15):
        numeric_amp = sine.numeric() / _mpf(dx)
        numeric_amp2 = numeric_amp ** 2
        if numeric_amp == 0:
            x = ExactPolar(0)
            return MomentumResult(Fraction(0), x, _member(x, "sin(k*dx) = 0"))
        turn = Fraction(0) if numeric_amp > 0 else Fraction(1, 2)
        doubled = niven_classify(2 * t)
        if doubled.rational:
            amp2 = (1 - doubled.value) / 2 / (dx * dx)
            x = ExactPolar(amp2, turn)
            return MomentumResult(amplitude, x, _member(x, f"cos(2*k*dx) = {doubled.value} is rational"))
        exact = (1 - doubled.value) / 2 / (dx * dx) if doubled.value is not None else None
        proof = f"sin^2 = (1 - cos(2*k*dx))/2 with cosine of degree {doubled.degree} > 1"
        verdict = ClosureVerdict(NON_MEMBER, proof=proof, exact=exact,
                                 numeric=mpmath.nstr(numeric_amp2, _DIGITS))
        return MomentumResult(amplitude, ApproxPolar(numeric_amp2, turn), verdict)


def half_grid_product_closure(p: int) -> dict:
    """Where does C_{p/2} x C_{p/2} land under multiplication?

    Enumerates amp2 = m/(p/2), m in [0, p/2], and all p/2 phases.  Returns
    the number of products lying in C_p and in C_{p^2}.
    """
    if p < 2 or p % 2:
        raise ValueError("p must be even and >= 2")
    h = p // 2
    elems = [make_cp(m, n, h) for m in range(h + 1) for n in range(h)]
    total = in_p = in_p2 = 0
    for x in elems:
        for y in elems:
            z = mul(x, y)
            total += 1
            in_p += is_member(z, p)
            in_p2 += is_member(z, p * p)
    return {"p": p, "pairs": total, "in_C_p": in_p, "in_C_p2": in_p2}
