"""CHSH on the C_p grid and the supermeasured statistical-independence audit.

Two halves.

Correlations: a singlet pair at relative angle theta is realised exactly
when cos(theta) = 1 - 2m/p for an integer m, giving C = 2m/p - 1 = -cos(theta).
Angles off that grid raise :class:`OffGridAngle` naming the nearest grid
angle.

Measures: a hidden variable is a truncated p-adic address.  The colours of
its two coarsest disks are the settings (X, Y) of the world it belongs to;
everything else (the position of each disk within its colour class, and all
deeper digits) is payload.  The state-space measure mu is positive only at
the world's own settings, and only if the cosines between the particle's
frame and both chosen settings lie on the 1 - 2m/p grid.  The experimenter
distribution rho lives on the payload alone.
"""
from __future__ import annotations

import csv
import io
import itertools
import math
from collections import Counter
from collections.abc import Callable, Iterable, Mapping, Sequence
from dataclasses import dataclass, field
from fractions import Fraction

import mpmath
import numpy as np
from scipy import stats

from .cp import QuadSurd, niven_classify
from .ensemble import correlation, singlet_ensemble
from .padic import PadicInt

__all__ = [
    "ALICE",
    "BOB",
    "TSIRELSON",
    "Setting",
    "Settings",
    "GridAngle",
    "OffGridAngle",
    "CHSHResult",
    "HiddenVariable",
    "MeasureTable",
    "grid_angle",
    "nearest_grid_angle",
    "tsirelson_angles",
    "chsh_value",
    "run_bell_experiment",
    "run_grid_experiment",
    "classical_strategies",
    "classical_chsh_values",
    "parity_tag",
    "constant_tag",
    "enumerate_lambdas",
    "adversarial_lambdas",
    "sample_hidden_variables",
    "partition_by_tag",
    "mu",
    "measure_table",
    "counterfactual_audit",
    "check_SI_rho",
    "check_SI_mu",
    "pairs_csv",
    "report_dict",
]

ALICE = "Alice"
BOB = "Bob"
TSIRELSON = 2 * math.sqrt(2)
SETTING_PAIRS = ((0, 0), (0, 1), (1, 0), (1, 1))


# --------------------------------------------------------------------------
# settings and grid angles


@dataclass(frozen=True)
class Setting:
    party: str
    choice: int
    angle: Fraction  # turns

    def __post_init__(self):
        if self.party not in (ALICE, BOB):
            raise ValueError(f"party must be {ALICE!r} or {BOB!r}")
        if self.choice not in (0, 1):
            raise ValueError("choice must be 0 or 1")
        object.__setattr__(self, "angle", Fraction(self.angle) % 1)

    def on_grid(self, p: int) -> bool:
        return p % self.angle.denominator == 0


@dataclass(frozen=True)
class Settings:
    """Alice's two orientations and Bob's two, in turns."""

    alice: tuple[Fraction, Fraction] = (Fraction(0), Fraction(1, 4))
    bob: tuple[Fraction, Fraction] = (Fraction(0), Fraction(1, 4))

    def __post_init__(self):
        object.__setattr__(self, "alice", tuple(Fraction(a) for a in self.alice))
        object.__setattr__(self, "bob", tuple(Fraction(b) for b in self.bob))

    def setting(self, party: str, choice: int) -> Setting:
        angles = self.alice if party == ALICE else self.bob
        return Setting(party, choice, angles[choice])

    def all(self) -> list[Setting]:
        return [self.setting(party, c) for party in (ALICE, BOB) for c in (0, 1)]

    def check_grid(self, p: int) -> None:
        for s in self.all():
            if not s.on_grid(p):
                raise ValueError(f"{s.party} setting {s.choice} at turn {s.angle} is not on the 1/{p} grid")


@dataclass(frozen=True)
class GridAngle:
    """A relative angle with cos(theta) = 1 - 2m/p."""

    p: int
    m: int

    def __post_init__(self):
        if self.p < 1 or not 0 <= self.m <= self.p:
            raise ValueError(f"need p >= 1 and 0 <= m <= p, got p={self.p}, m={self.m}")

    @property
    def cos(self) -> Fraction:
        return 1 - Fraction(2 * self.m, self.p)

    @property
    def radians(self) -> float:
        return math.acos(float(self.cos))

    @property
    def degrees(self) -> float:
        return math.degrees(self.radians)

    def to_dict(self) -> dict:
        c = self.cos
        return {"m": self.m, "cos": {"num": c.numerator, "den": c.denominator},
                "degrees": round(self.degrees, 12)}


class OffGridAngle(ValueError):
    def __init__(self, p: int, description: str, nearest: GridAngle):
        self.nearest = nearest
        super().__init__(
            f"relative angle {description} has no cosine of the form 1 - 2m/{p}; "
            f"nearest grid angle is m={nearest.m} ({nearest.degrees:.6f} deg, cos = {nearest.cos})")


def _round_half_even(x) -> int:
    # exact binary value of the mpf, then Python's half-to-even rounding
    sign, man, exp, _ = mpmath.mpf(x)._mpf_
    return round((-1) ** sign * Fraction(int(man)) * Fraction(2) ** exp)


def nearest_grid_angle(p: int, theta: float | None = None, *, cos_value=None) -> GridAngle:
    """Grid angle whose cosine is nearest; ties go to even m."""
    with mpmath.workdps(60):
        if cos_value is None:
            cos_value = mpmath.cos(mpmath.mpf(theta))
        elif isinstance(cos_value, Fraction):
            cos_value = mpmath.mpf(cos_value.numerator) / cos_value.denominator
        elif isinstance(cos_value, QuadSurd):
            cos_value = cos_value.to_mpf()
        m = _round_half_even(p * (1 - mpmath.mpf(cos_value)) / 2)
    return GridAngle(p, min(max(m, 0), p))


def grid_angle(p: int, relative_turn) -> GridAngle:
    """Exact grid angle for a rational relative turn, or OffGridAngle."""
    c = niven_classify(Fraction(relative_turn))
    if c.rational:
        m = (1 - c.value) * p / 2
        if m.denominator == 1:
            return GridAngle(p, int(m))
    with mpmath.workdps(60):
        nearest = nearest_grid_angle(p, cos_value=c.numeric())
    raise OffGridAngle(p, f"{c.turn} turn (cos = {c.value if c.value is not None else c.symbol})", nearest)


def tsirelson_angles(p: int) -> dict[tuple[int, int], GridAngle]:
    """Grid approximation of the optimal configuration: 45, 45, 45 and 135 degrees."""
    q = math.pi / 4
    return {(0, 0): nearest_grid_angle(p, q), (0, 1): nearest_grid_angle(p, q),
            (1, 0): nearest_grid_angle(p, q), (1, 1): nearest_grid_angle(p, 3 * q)}


# --------------------------------------------------------------------------
# CHSH


@dataclass(frozen=True)
class CHSHResult:
    correlations: tuple  # C(0,0), C(0,1), C(1,0), C(1,1)
    S: object
    p: int | None = None
    angles: dict | None = field(default=None, compare=False)

    @property
    def abs_S(self):
        return abs(self.S)

    @property
    def exceeds_local(self) -> bool:
        return self.abs_S > 2

    @property
    def exceeds_tsirelson(self) -> bool:
        if isinstance(self.S, (int, Fraction)):
            return Fraction(self.S) ** 2 > 8
        return float(self.abs_S) > TSIRELSON + 1e-12

    def as_float(self) -> float:
        return float(self.S)


def chsh_value(corrs) -> CHSHResult:
    """S = C(0,0) + C(0,1) + C(1,0) - C(1,1), exact for rational or surd inputs."""
    if isinstance(corrs, Mapping):
        corrs = [corrs[k] for k in SETTING_PAIRS]
    corrs = tuple(corrs)
    if len(corrs) != 4:
        raise ValueError("need four correlations")
    for k, c in zip(SETTING_PAIRS, corrs):
        if isinstance(c, float):
            raise TypeError("correlations must be exact (int, Fraction or QuadSurd)")
        if c < -1 or c > 1:
            raise ValueError(f"correlation C{k} = {c} outside [-1, 1]")
    S = corrs[0] + corrs[1] + corrs[2] - corrs[3]
    return CHSHResult(corrs, S)


def run_grid_experiment(p: int, angles: Mapping[tuple[int, int], GridAngle]) -> CHSHResult:
    """Build a singlet ensemble for each setting pair and count."""
    corrs = []
    for k in SETTING_PAIRS:
        g = angles[k]
        if g.p != p:
            raise ValueError(f"angle for {k} is on the p={g.p} grid, not p={p}")
        corrs.append(correlation(singlet_ensemble(p, g.m)))
    r = chsh_value(corrs)
    return CHSHResult(r.correlations, r.S, p, dict(angles))


def run_bell_experiment(p: int, settings: Settings) -> CHSHResult:
    """CHSH from four orientations (turns); every relative angle must be on the grid."""
    angles = {(x, y): grid_angle(p, settings.alice[x] - settings.bob[y]) for x, y in SETTING_PAIRS}
    return run_grid_experiment(p, angles)


def classical_strategies() -> list[tuple[int, int, int, int]]:
    """All 16 deterministic local assignments (A0, A1, B0, B1)."""
    return list(itertools.product((1, -1), repeat=4))


def classical_chsh_values() -> list[CHSHResult]:
    out = []
    for a0, a1, b0, b1 in classical_strategies():
        a, b = (a0, a1), (b0, b1)
        out.append(chsh_value([a[x] * b[y] for x, y in SETTING_PAIRS]))
    return out


def pairs_csv(p: int, angles: Mapping[tuple[int, int], GridAngle]) -> str:
    buf = io.StringIO()
    w = csv.writer(buf, lineterminator="\n")
    w.writerow(["X", "Y", "i", "A", "B"])
    for x, y in SETTING_PAIRS:
        pairs = singlet_ensemble(p, angles[(x, y)].m).pairs
        for i, (a, b) in enumerate(pairs.tolist()):
            w.writerow([x, y, i, a, b])
    return buf.getvalue()


# --------------------------------------------------------------------------
# hidden variables

TagColoring = Callable[[int], int]


def parity_tag(d: int) -> int:
    return d % 2


def constant_tag(d: int) -> int:
    return 0


def _residual(d: int, coloring: TagColoring) -> int:
    # position of disk d among the disks sharing its colour
    c = coloring(d)
    return sum(1 for e in range(d) if coloring(e) == c)


@dataclass(frozen=True)
class HiddenVariable:
    lam: PadicInt
    coloring: TagColoring = field(default=parity_tag, compare=False)

    def __post_init__(self):
        if self.lam.depth < 2:
            raise ValueError("hidden variable needs depth >= 2 (two tag levels)")

    @property
    def world_tag(self) -> tuple[int, int]:
        return self.coloring(self.lam.digits[0]), self.coloring(self.lam.digits[1])

    @property
    def payload(self) -> tuple[int, ...]:
        d = self.lam.digits
        return (_residual(d[0], self.coloring), _residual(d[1], self.coloring)) + d[2:]

    @property
    def frame(self) -> Fraction:
        """Particle frame orientation in turns: the coarsest disk on the 1/p turn grid."""
        return Fraction(self.lam.digits[0], self.lam.p)


def enumerate_lambdas(p: int, depth: int, coloring: TagColoring = parity_tag) -> list[HiddenVariable]:
    return [HiddenVariable(PadicInt(p, digits), coloring)
            for digits in itertools.product(range(p), repeat=depth)]


def adversarial_lambdas(p: int, depth: int, coloring: TagColoring = parity_tag) -> list[HiddenVariable]:
    """Negative control: keep only addresses whose first payload digit copies the Y tag."""
    return [h for h in enumerate_lambdas(p, depth, coloring) if h.payload[0] % 2 == h.world_tag[1]]


def sample_hidden_variables(p: int, depth: int, n: int, seed: int, *, bias: float = 0.0,
                            coloring: TagColoring = parity_tag) -> list[HiddenVariable]:
    """i.i.d. uniform digits.  With probability ``bias`` the first payload digit is
    overwritten to copy the Y tag (for negative controls)."""
    rng = np.random.default_rng(seed)
    digits = rng.integers(0, p, size=(n, depth))
    lams = [HiddenVariable(PadicInt(p, tuple(row)), coloring) for row in digits.tolist()]
    if bias <= 0:
        return lams
    flips = rng.random(n) < bias
    out = []
    for h, flip in zip(lams, flips):
        if flip and h.payload[0] % 2 != h.world_tag[1]:
            d0 = h.lam.digits[0]
            same = [e for e in range(p) if coloring(e) == coloring(d0)
                    and _residual(e, coloring) % 2 == h.world_tag[1]]
            if same:
                h = HiddenVariable(PadicInt(p, (same[0],) + h.lam.digits[1:]), coloring)
        out.append(h)
    return out


def partition_by_tag(lams: Iterable[HiddenVariable]) -> dict[tuple[int, int], list[HiddenVariable]]:
    out = {k: [] for k in SETTING_PAIRS}
    for h in lams:
        out[h.world_tag].append(h)
    return out


# --------------------------------------------------------------------------
# measures

MuFunction = Callable[[HiddenVariable, int, int], Fraction]


def _on_cos_grid(p: int, turn: Fraction) -> bool:
    c = niven_classify(turn)
    return c.rational and ((1 - c.value) * p / 2).denominator == 1


def mu(lam: HiddenVariable, X: int, Y: int, settings: Settings = Settings()) -> Fraction:
    """1 on the invariant set, 0 off it."""
    if lam.world_tag != (X, Y):
        return Fraction(0)
    p = lam.lam.p
    if _on_cos_grid(p, lam.frame - settings.alice[X]) and _on_cos_grid(p, lam.frame - settings.bob[Y]):
        return Fraction(1)
    return Fraction(0)


def _mu_fn(settings: Settings | None, mu_fn: MuFunction | None) -> MuFunction:
    if mu_fn is not None:
        return mu_fn
    s = settings or Settings()
    return lambda h, x, y: mu(h, x, y, s)


@dataclass
class MeasureTable:
    """mu over (lambda, X, Y) and rho over lambda; rho_Bell = rho * mu."""

    mu: dict[tuple[tuple[int, ...], int, int], Fraction]
    rho: dict[tuple[int, ...], Fraction]

    def rho_bell(self, X: int, Y: int) -> dict[tuple[int, ...], Fraction]:
        """rho_Bell(lambda | X, Y), normalised; empty if the setting pair is never realised."""
        w = {lam: self.rho[lam] * self.mu[(lam, X, Y)] for lam in self.rho}
        total = sum(w.values())
        if total == 0:
            return {}
        return {lam: v / total for lam, v in w.items() if v}


def measure_table(p: int, depth: int, settings: Settings | None = None,
                  coloring: TagColoring = parity_tag, mu_fn: MuFunction | None = None) -> MeasureTable:
    f = _mu_fn(settings, mu_fn)
    lams = enumerate_lambdas(p, depth, coloring)
    rho = {h.lam.digits: Fraction(1, len(lams)) for h in lams}
    table = {(h.lam.digits, x, y): f(h, x, y) for h in lams for x, y in SETTING_PAIRS}
    return MeasureTable(table, rho)


def _check_small(p: int, depth: int) -> None:
    if p > 16 or depth > 3 or depth < 2:
        raise ValueError("exhaustive audits need p <= 16 and 2 <= depth <= 3")


@dataclass(frozen=True)
class CounterfactualReport:
    p: int
    depth: int
    n_lambda: int
    n_triples: int
    n_admissible: int
    violations: int
    admissible_per_lambda: dict[int, int]

    @property
    def compliance(self) -> Fraction:
        return Fraction(self.n_admissible - self.violations, self.n_admissible) if self.n_admissible else Fraction(1)

    def to_dict(self) -> dict:
        c = self.compliance
        return {"p": self.p, "depth": self.depth, "lambdas": self.n_lambda, "triples": self.n_triples,
                "admissible": self.n_admissible, "violations": self.violations,
                "compliance": {"num": c.numerator, "den": c.denominator},
                "admissible_per_lambda": {str(k): v for k, v in sorted(self.admissible_per_lambda.items())}}


def counterfactual_audit(p: int, depth: int, settings: Settings | None = None,
                         coloring: TagColoring = parity_tag,
                         mu_fn: MuFunction | None = None) -> CounterfactualReport:
    """Check mu(l|X,Y) > 0  =>  mu(l|X',Y) = mu(l|X,Y') = mu(l|X',Y') = 0 on the full grid."""
    _check_small(p, depth)
    f = _mu_fn(settings, mu_fn)
    lams = enumerate_lambdas(p, depth, coloring)
    admissible = violations = 0
    per_lambda = Counter()
    for h in lams:
        values = {(x, y): f(h, x, y) for x, y in SETTING_PAIRS}
        pos = [k for k, v in values.items() if v > 0]
        per_lambda[len(pos)] += 1
        for x, y in pos:
            admissible += 1
            flips = ((1 - x, y), (x, 1 - y), (1 - x, 1 - y))
            if any(values[k] != 0 for k in flips):
                violations += 1
    return CounterfactualReport(p, depth, len(lams), 4 * len(lams), admissible, violations, dict(per_lambda))


@dataclass(frozen=True)
class RhoReport:
    mode: str
    passed: bool
    sizes: dict[tuple[int, int], int]
    statistic: float | None = None
    p_value: float | None = None
    alpha: float | None = None
    distributions: dict | None = field(default=None, compare=False, repr=False)

    def to_dict(self) -> dict:
        d = {"mode": self.mode, "passed": self.passed,
             "sizes": {f"{x}{y}": n for (x, y), n in sorted(self.sizes.items())}}
        if self.mode == "chi2":
            d.update(statistic=self.statistic, p_value=self.p_value, alpha=self.alpha)
        return d


def check_SI_rho(subensembles: Mapping[tuple[int, int], Sequence[HiddenVariable]] | Iterable[HiddenVariable],
                 mode: str = "exact", alpha: float = 0.01) -> RhoReport:
    """Compare payload distributions across the four realised sub-ensembles.

    ``exact``: the four distributions must be equal as rational distributions.
    ``chi2``: homogeneity test on the 4 x K contingency table; passes when the
    p-value exceeds ``alpha``.
    """
    if not isinstance(subensembles, Mapping):
        subensembles = partition_by_tag(subensembles)
    counts = {}
    for k in SETTING_PAIRS:
        members = subensembles.get(k, [])
        if not members:
            raise ValueError(f"sub-ensemble {k} is empty")
        counts[k] = Counter(h.payload for h in members)
    sizes = {k: sum(c.values()) for k, c in counts.items()}
    if mode == "exact":
        dists = {k: {pl: Fraction(n, sizes[k]) for pl, n in c.items()} for k, c in counts.items()}
        first = dists[SETTING_PAIRS[0]]
        passed = all(d == first for d in dists.values())
        return RhoReport("exact", passed, sizes, distributions=dists)
    if mode != "chi2":
        raise ValueError(f"unknown mode {mode!r}")
    cats = sorted(set().union(*(c.keys() for c in counts.values())))
    table = np.array([[counts[k].get(c, 0) for c in cats] for k in SETTING_PAIRS])
    stat, pval, _, _ = stats.chi2_contingency(table)
    return RhoReport("chi2", bool(pval > alpha), sizes, float(stat), float(pval), alpha)


@dataclass(frozen=True)
class MuReport:
    p: int
    depth: int
    support: int
    off_set: int
    dependent: int
    witness: tuple | None

    @property
    def dependence_fraction(self) -> Fraction:
        return Fraction(self.dependent, self.support) if self.support else Fraction(0)

    @property
    def si3_holds(self) -> bool:
        return self.dependent == 0

    def to_dict(self) -> dict:
        f = self.dependence_fraction
        d = {"p": self.p, "depth": self.depth, "support": self.support, "off_set": self.off_set,
             "dependent": self.dependent, "dependence_fraction": {"num": f.numerator, "den": f.denominator},
             "si3_holds": self.si3_holds}
        if self.witness:
            lam, s1, s2, m1, m2 = self.witness
            d["witness"] = {"lambda": list(lam), "settings": [list(s1), list(s2)], "mu": [str(m1), str(m2)]}
        return d


def check_SI_mu(p: int, depth: int, settings: Settings | None = None,
                coloring: TagColoring = parity_tag, mu_fn: MuFunction | None = None) -> MuReport:
    """How many lambdas on the invariant set see mu change with the settings?

    The support is the set of lambdas with mu > 0 at some setting pair; lambdas
    with mu = 0 everywhere are off the set and counted separately.
    """
    _check_small(p, depth)
    f = _mu_fn(settings, mu_fn)
    support = off = dependent = 0
    witness = None
    for h in enumerate_lambdas(p, depth, coloring):
        values = {k: f(h, *k) for k in SETTING_PAIRS}
        if not any(v > 0 for v in values.values()):
            off += 1
            continue
        support += 1
        if len(set(values.values())) > 1:
            dependent += 1
            if witness is None:
                x, y = next(k for k, v in values.items() if v > 0)
                witness = (h.lam.digits, (x, y), (1 - x, y), values[(x, y)], values[(1 - x, y)])
    return MuReport(p, depth, support, off, dependent, witness)


def _frac_dict(q) -> dict:
    q = Fraction(q)
    return {"num": q.numerator, "den": q.denominator}


def report_dict(result: CHSHResult, audits: dict | None = None) -> dict:
    """JSON-ready report: p, settings, exact correlations and S, audits."""
    settings = []
    if result.angles:
        for (x, y) in SETTING_PAIRS:
            settings.append({"X": x, "Y": y, **result.angles[(x, y)].to_dict()})
    return {
        "p": result.p,
        "settings": settings,
        "correlations": [_frac_dict(c) for c in result.correlations],
        "S": _frac_dict(result.S),
        "abs_S": float(abs(result.S)),
        "exceeds_local_bound": result.exceeds_local,
        "tsirelson": TSIRELSON,
        "audits": audits or {},
    }
