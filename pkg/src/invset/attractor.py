"""Fixed points, limit cycles and the Lorenz attractor.

All integration is classical fixed-step RK4 so that runs are bit-for-bit
reproducible.  Single trajectories step in plain Python floats; ensembles
of initial conditions step as (M, 3) arrays with the same operation order.
"""
from __future__ import annotations

import csv
import io
import json
import math
from dataclasses import dataclass, field

import numpy as np
from scipy import stats
from scipy.spatial import cKDTree

__all__ = [
    "LorenzParams",
    "FlowState",
    "TrajectorySegment",
    "SymbolString",
    "DimensionFit",
    "logistic_exact",
    "logistic_flow",
    "limit_cycle_flow",
    "lorenz_field",
    "lorenz_jacobian",
    "equilibria",
    "step_lorenz",
    "integrate",
    "integrate_batch",
    "divergence",
    "volume_contraction",
    "symbolize",
    "sample_attractor",
    "correlation_sums",
    "default_radii",
    "correlation_dimension",
]

TWO_PI = 2 * math.pi


@dataclass(frozen=True)
class LorenzParams:
    sigma: float = 10.0
    rho_L: float = 28.0
    beta: float = 8.0 / 3.0

    def __post_init__(self):
        for name in ("sigma", "rho_L", "beta"):
            v = getattr(self, name)
            if isinstance(v, float) and not math.isfinite(v):
                raise ValueError(f"{name} must be finite")

    def as_floats(self) -> tuple[float, float, float]:
        return float(self.sigma), float(self.rho_L), float(self.beta)


@dataclass(frozen=True)
class FlowState:
    r: float
    phi: float = 0.0

    def __post_init__(self):
        if not self.r > 0:
            raise ValueError("r must be positive")
        object.__setattr__(self, "phi", self.phi % TWO_PI)


@dataclass(frozen=True, eq=False)
class TrajectorySegment:
    t: np.ndarray
    states: np.ndarray  # (n + 1, 3): X, Y, Z
    params: LorenzParams = field(default_factory=LorenzParams)
    dt: float = 1e-3

    def window(self, t0: float, t1: float) -> "TrajectorySegment":
        sel = (self.t >= t0) & (self.t <= t1)
        return TrajectorySegment(self.t[sel], self.states[sel], self.params, self.dt)

    def mirrored(self) -> "TrajectorySegment":
        return TrajectorySegment(self.t, self.states * np.array([-1.0, -1.0, 1.0]), self.params, self.dt)

    def to_csv(self) -> str:
        buf = io.StringIO()
        header = {"sigma": float(self.params.sigma), "rho_L": float(self.params.rho_L),
                  "beta": float(self.params.beta), "dt": self.dt, "n": len(self.t) - 1}
        buf.write("# " + json.dumps(header, sort_keys=True) + "\n")
        w = csv.writer(buf, lineterminator="\n")
        w.writerow(["t", "X", "Y", "Z"])
        for t, (x, y, z) in zip(self.t.tolist(), self.states.tolist()):
            w.writerow([repr(t), repr(x), repr(y), repr(z)])
        return buf.getvalue()


@dataclass(frozen=True)
class SymbolString:
    symbols: str
    times: tuple[float, ...]

    def __str__(self):
        return self.symbols

    def swapped(self) -> str:
        return self.symbols.translate(str.maketrans("LR", "RL"))


# --------------------------------------------------------------------------
# r' = r(1 - r), phi' = 1


def logistic_exact(r0: float, t: float) -> float:
    if r0 <= 0:
        raise ValueError("r0 must be positive")
    e = math.exp(t)
    return r0 * e / (1 + r0 * (e - 1))


def logistic_flow(r0: float, t: float, dt: float = 1e-3) -> tuple[float, float]:
    """(analytic, RK4) values of r(t) for r' = r(1 - r)."""
    if r0 <= 0:
        raise ValueError("r0 must be positive")
    if t < 0 or dt <= 0:
        raise ValueError("need t >= 0 and dt > 0")
    n = int(math.floor(t / dt + 1e-9))
    r = float(r0)

    def f(r):
        return r * (1 - r)

    def step(r, h):
        k1 = f(r)
        k2 = f(r + 0.5 * h * k1)
        k3 = f(r + 0.5 * h * k2)
        k4 = f(r + h * k3)
        return r + h / 6 * (k1 + 2 * k2 + 2 * k3 + k4)

    for _ in range(n):
        r = step(r, dt)
    rest = t - n * dt
    if rest > 1e-15:
        r = step(r, rest)
    return logistic_exact(r0, t), r


def limit_cycle_flow(state: FlowState, t: float) -> FlowState:
    return FlowState(logistic_exact(state.r, t), (state.phi + t) % TWO_PI)


# --------------------------------------------------------------------------
# Lorenz


def lorenz_field(state, params: LorenzParams = LorenzParams()) -> np.ndarray:
    s, r, b = params.as_floats()
    u = np.asarray(state, dtype=float)
    x, y, z = u[..., 0], u[..., 1], u[..., 2]
    return np.stack([s * (y - x), x * (r - z) - y, x * y - b * z], axis=-1)


def lorenz_jacobian(state, params: LorenzParams = LorenzParams()) -> np.ndarray:
    s, r, b = params.as_floats()
    x, y, z = (float(v) for v in state)
    return np.array([[-s, s, 0.0], [r - z, -1.0, -x], [y, x, -b]])


def equilibria(params: LorenzParams = LorenzParams()) -> list[tuple[float, float, float]]:
    """The origin and, for rho_L > 1, C+ and C-."""
    s, r, b = params.as_floats()
    out = [(0.0, 0.0, 0.0)]
    if r > 1:
        q = math.sqrt(b * (r - 1))
        out += [(q, q, r - 1), (-q, -q, r - 1)]
    return out


def _check_finite(*vals):
    for v in vals:
        if not math.isfinite(v):
            raise ValueError("non-finite state")


def step_lorenz(state, params: LorenzParams = LorenzParams(), dt: float = 1e-3) -> tuple[float, float, float]:
    if not dt > 0:
        raise ValueError("dt must be positive")
    x, y, z = (float(v) for v in state)
    _check_finite(x, y, z)
    s, r, b = params.as_floats()
    return _rk4(x, y, z, s, r, b, dt)


def _rk4(x, y, z, s, r, b, dt):
    h = dt / 2
    k1x = s * (y - x); k1y = x * (r - z) - y; k1z = x * y - b * z
    x2 = x + h * k1x; y2 = y + h * k1y; z2 = z + h * k1z
    k2x = s * (y2 - x2); k2y = x2 * (r - z2) - y2; k2z = x2 * y2 - b * z2
    x3 = x + h * k2x; y3 = y + h * k2y; z3 = z + h * k2z
    k3x = s * (y3 - x3); k3y = x3 * (r - z3) - y3; k3z = x3 * y3 - b * z3
    x4 = x + dt * k3x; y4 = y + dt * k3y; z4 = z + dt * k3z
    k4x = s * (y4 - x4); k4y = x4 * (r - z4) - y4; k4z = x4 * y4 - b * z4
    c = dt / 6
    return (x + c * (k1x + 2 * k2x + 2 * k3x + k4x),
            y + c * (k1y + 2 * k2y + 2 * k3y + k4y),
            z + c * (k1z + 2 * k2z + 2 * k3z + k4z))


def integrate(state, params: LorenzParams = LorenzParams(), dt: float = 1e-3, n: int = 1000) -> TrajectorySegment:
    """n RK4 steps from ``state``; returns n + 1 samples including the start."""
    if not dt > 0:
        raise ValueError("dt must be positive")
    x, y, z = (float(v) for v in state)
    _check_finite(x, y, z)
    s, r, b = params.as_floats()
    out = np.empty((n + 1, 3))
    out[0] = (x, y, z)
    for i in range(1, n + 1):
        x, y, z = _rk4(x, y, z, s, r, b, dt)
        out[i] = (x, y, z)
    if not np.all(np.isfinite(out[-1])):
        raise ValueError("trajectory became non-finite; reduce dt")
    return TrajectorySegment(np.arange(n + 1) * dt, out, params, dt)


def integrate_batch(states, params: LorenzParams = LorenzParams(), dt: float = 1e-3, n: int = 1000) -> np.ndarray:
    """Advance an (M, 3) array of states by n RK4 steps; returns the final (M, 3) array."""
    u = np.array(states, dtype=float)
    if u.ndim != 2 or u.shape[1] != 3:
        raise ValueError("states must have shape (M, 3)")
    s, r, b = params.as_floats()
    x, y, z = u[:, 0].copy(), u[:, 1].copy(), u[:, 2].copy()
    for _ in range(n):
        x, y, z = _rk4(x, y, z, s, r, b, dt)
    return np.stack([x, y, z], axis=1)


def divergence(params: LorenzParams = LorenzParams()):
    """Trace of the Jacobian, -(sigma + 1 + beta); exact for Fraction inputs."""
    return -(params.sigma + 1 + params.beta)


def _variational_rhs(u, J, s, r, b):
    x, y, z = u
    return (np.array([s * (y - x), x * (r - z) - y, x * y - b * z]),
            np.array([[-s, s, 0.0], [r - z, -1.0, -x], [y, x, -b]]) @ J)


def _tangent_log_volume(base, E, params: LorenzParams, t: float, dt: float) -> float:
    s, r, b = params.as_floats()
    u = np.array(base, dtype=float)
    J = np.array(E, dtype=float)
    n = int(round(t / dt))
    for _ in range(n):
        k1u, k1J = _variational_rhs(u, J, s, r, b)
        k2u, k2J = _variational_rhs(u + 0.5 * dt * k1u, J + 0.5 * dt * k1J, s, r, b)
        k3u, k3J = _variational_rhs(u + 0.5 * dt * k2u, J + 0.5 * dt * k2J, s, r, b)
        k4u, k4J = _variational_rhs(u + dt * k3u, J + dt * k3J, s, r, b)
        u = u + dt / 6 * (k1u + 2 * k2u + 2 * k3u + k4u)
        J = J + dt / 6 * (k1J + 2 * k2J + 2 * k3J + k4J)
    return math.log(abs(np.linalg.det(J)))


def volume_contraction(cloud, params: LorenzParams = LorenzParams(), t: float = 0.5,
                       dt: float = 1e-3, method: str = "tangent") -> float:
    """Measured d(log V)/dt for the simplex spanned by ``cloud`` (first 4 points).

    ``tangent`` integrates the variational equations along the trajectory of the
    first vertex, with the simplex edges as initial tangent vectors.
    ``simplex`` evolves the four vertices themselves.
    """
    pts = np.asarray(cloud, dtype=float)
    if pts.ndim != 2 or pts.shape[0] < 4 or pts.shape[1] != 3:
        raise ValueError("need at least 4 points in 3-d")
    base = pts[0]
    E = (pts[1:4] - base).T
    det0 = np.linalg.det(E)
    scale = np.abs(E).max()
    if scale == 0 or abs(det0) <= 1e-12 * scale**3:
        raise ValueError("degenerate simplex")
    n = int(round(t / dt))
    if n < 1:
        raise ValueError("t must cover at least one step")
    if method == "tangent":
        logv = _tangent_log_volume(base, E, params, n * dt, dt)
    elif method == "simplex":
        end = integrate_batch(pts[:4], params, dt, n)
        logv = math.log(abs(np.linalg.det((end[1:4] - end[0]).T)))
    else:
        raise ValueError(f"unknown method {method!r}")
    return (logv - math.log(abs(det0))) / (n * dt)


def symbolize(traj: TrajectorySegment, t_start: float | None = None, t_end: float | None = None,
              eps_lobe: float = 1e-6) -> SymbolString:
    """One symbol per local maximum of Z: L when X < 0, R when X > 0.

    Maxima with |X| < eps_lobe are skipped.
    """
    if len(traj.t) < 3:
        raise ValueError("trajectory too short to symbolize")
    x, z, t = traj.states[:, 0], traj.states[:, 2], traj.t
    peak = np.zeros(len(z), dtype=bool)
    peak[1:-1] = (z[1:-1] > z[:-2]) & (z[1:-1] >= z[2:])
    if t_start is not None:
        peak &= t >= t_start
    if t_end is not None:
        peak &= t <= t_end
    peak &= np.abs(x) >= eps_lobe
    idx = np.flatnonzero(peak)
    symbols = "".join("L" if x[i] < 0 else "R" for i in idx)
    return SymbolString(symbols, tuple(float(t[i]) for i in idx))


# --------------------------------------------------------------------------
# correlation dimension


def sample_attractor(n_points: int = 20000, params: LorenzParams = LorenzParams(), *, seed: int = 0,
                     n_traj: int = 2000, transient: float = 20.0, spacing: float = 2.0,
                     dt: float = 5e-3) -> np.ndarray:
    """Decorrelated attractor samples from an ensemble of trajectories.

    Each of ``n_traj`` random starts is run past the transient, then sampled
    every ``spacing`` time units until ``n_points`` are collected.
    """
    rng = np.random.default_rng(seed)
    u = rng.normal(0.0, 5.0, (n_traj, 3)) + np.array([0.0, 0.0, 25.0])
    u = integrate_batch(u, params, dt, int(round(transient / dt)))
    rounds = -(-n_points // n_traj)
    out = []
    for _ in range(rounds):
        u = integrate_batch(u, params, dt, int(round(spacing / dt)))
        out.append(u)
    return np.concatenate(out)[:n_points]


def correlation_sums(points, radii) -> np.ndarray:
    """C(r): fraction of distinct pairs closer than r (kd-tree pair counts)."""
    pts = np.asarray(points, dtype=float)
    if pts.ndim == 1:
        pts = pts[:, None]
    n = len(pts)
    tree = cKDTree(pts)
    counts = tree.count_neighbors(tree, np.asarray(radii, dtype=float)) - n
    return counts / (n * (n - 1))


def default_radii(points, fraction: float = 0.04, decades: float = 1.0, num: int = 12) -> np.ndarray:
    """``num`` log-spaced radii spanning ``decades`` below ``fraction`` of the bounding-box diagonal."""
    pts = np.asarray(points, dtype=float)
    if pts.ndim == 1:
        pts = pts[:, None]
    diag = float(np.linalg.norm(pts.max(axis=0) - pts.min(axis=0)))
    hi = fraction * diag
    return np.geomspace(hi * 10.0 ** (-decades), hi, num)


@dataclass(frozen=True)
class DimensionFit:
    slope: float
    intercept: float
    r_value: float
    stderr: float
    radii: np.ndarray = field(repr=False)
    sums: np.ndarray = field(repr=False)
    n_points: int = 0

    def to_csv(self) -> str:
        buf = io.StringIO()
        w = csv.writer(buf, lineterminator="\n")
        w.writerow(["radius", "C"])
        for r, c in zip(self.radii.tolist(), self.sums.tolist()):
            w.writerow([repr(r), repr(c)])
        return buf.getvalue()

    def to_dict(self) -> dict:
        return {"slope": self.slope, "intercept": self.intercept, "r_value": self.r_value,
                "stderr": self.stderr, "n_points": self.n_points,
                "radius_range": [float(self.radii[0]), float(self.radii[-1])]}


def correlation_dimension(points, radii=None, *, min_points: int = 10_000) -> DimensionFit:
    """Grassberger-Procaccia slope of log C(r) against log r."""
    pts = np.asarray(points, dtype=float)
    if len(pts) < min_points:
        raise ValueError(f"need at least {min_points} points, got {len(pts)}")
    radii = default_radii(pts) if radii is None else np.asarray(radii, dtype=float)
    if radii.ndim != 1 or len(np.unique(radii)) < 2 or np.any(radii <= 0):
        raise ValueError("need at least two distinct positive radii")
    sums = correlation_sums(pts, radii)
    if np.any(sums <= 0):
        raise ValueError("some radii enclose no pairs; widen the radius range")
    fit = stats.linregress(np.log(radii), np.log(sums))
    return DimensionFit(float(fit.slope), float(fit.intercept), float(fit.rvalue), float(fit.stderr),
                        radii, sums, len(pts))
