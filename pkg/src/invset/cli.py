"""Batch front end: one subcommand group per lab, deterministic file outputs.

Exit codes: 0 success, 2 usage or validation error, 3 output not writable.
"""
from __future__ import annotations

import argparse
import json
import shlex
import sys
from fractions import Fraction

from . import __version__
from . import attractor, bell, bits, cp, padic

EXIT_OK = 0
EXIT_USAGE = 2
EXIT_IO = 3


class UsageError(Exception):
    def __init__(self, flag: str, message: str):
        super().__init__(f"{flag}: {message}")


class _Parser(argparse.ArgumentParser):
    def error(self, message):
        self.print_usage(sys.stderr)
        raise UsageError(self.prog, message)


# --------------------------------------------------------------------------
# argument types


def _fraction(s: str) -> Fraction:
    try:
        return Fraction(s.strip())
    except (ValueError, ZeroDivisionError):
        raise argparse.ArgumentTypeError(f"not a rational number: {s!r}")


def _triple(s: str) -> tuple[int, int, int]:
    try:
        m, n, p = (int(v) for v in s.split(","))
    except ValueError:
        raise argparse.ArgumentTypeError(f"expected m,n,p integers, got {s!r}")
    return m, n, p


def _int_list(s: str) -> tuple[int, ...]:
    try:
        return tuple(int(v) for v in s.split(",") if v.strip())
    except ValueError:
        raise argparse.ArgumentTypeError(f"expected comma-separated integers, got {s!r}")


def _fraction_pair(s: str) -> tuple[Fraction, Fraction]:
    parts = s.split(",")
    if len(parts) != 2:
        raise argparse.ArgumentTypeError(f"expected two comma-separated turns, got {s!r}")
    return tuple(_fraction(v) for v in parts)


def _signs(s: str) -> tuple[int, ...]:
    if not s or set(s) - {"+", "-"}:
        raise argparse.ArgumentTypeError(f"bit string must use only '+' and '-', got {s!r}")
    return tuple(1 if c == "+" else -1 for c in s)


def _make_cp(flag: str, t) -> cp.ExactPolar:
    m, n, p = t
    if p < 1:
        raise UsageError(flag, "p must be >= 1")
    if m < 0:
        raise UsageError(flag, "m must be non-negative")
    return cp.make_cp(m, n, p)


def _q(x) -> dict:
    x = Fraction(x)
    return {"num": x.numerator, "den": x.denominator}


def _power_of_two(flag: str, p: int) -> None:
    if not bits.is_power_of_two(p):
        raise UsageError(flag, f"must be a power of 2, got {p}")


# --------------------------------------------------------------------------
# handlers return (payload, kind) where kind is "json" or "text"


def cmd_cp(a):
    if a.action in ("mul", "add"):
        x, y = _make_cp("--a", a.a), _make_cp("--b", a.b)
        if a.action == "mul":
            z = cp.mul(x, y)
            return {"a": x.to_dict(), "b": y.to_dict(), "product": z.to_dict(),
                    "minimal_grid": cp.minimal_grid(z)}
        value, verdict = cp.try_add(x, y)
        out = {"a": x.to_dict(), "b": y.to_dict(), "verdict": verdict.to_dict()}
        if isinstance(value, cp.ExactPolar):
            out["sum"] = value.to_dict()
        return out
    if a.action == "member":
        if a.p < 1:
            raise UsageError("--p", "must be >= 1")
        if a.amp2 < 0:
            raise UsageError("--amp2", "must be non-negative")
        x = cp.ExactPolar(a.amp2, a.turn)
        return {"x": x.to_dict(), "p": a.p, "member": cp.is_member(x, a.p)}
    if a.dx <= 0:
        raise UsageError("--dx", "must be positive")
    amp, value, verdict = cp.momentum_difference(a.turn, a.dx)
    return {"turn": _q(a.turn), "dx": _q(a.dx), "amplitude": None if amp is None else str(amp),
            "verdict": verdict.to_dict()}


def cmd_bits(a):
    if a.action == "order":
        _power_of_two("--p", a.p)
        return {"p": a.p, "order": bits.order_of(a.p)}
    s = bits.BitString(a.bits)
    _power_of_two("--bits", s.p)
    out = bits.apply_phase(s, a.n)
    text = "".join("+" if v > 0 else "-" for v in out)
    return {"p": s.p, "n": a.n, "input": "".join("+" if v > 0 else "-" for v in s), "output": text}


def _padic(flag, digits, p) -> padic.PadicInt:
    if p < 2:
        raise UsageError("--p", "must be >= 2")
    try:
        return padic.PadicInt(p, digits)
    except ValueError as e:
        raise UsageError(flag, str(e))


def _coloring(spec: str):
    if spec == "parity":
        return lambda d: "a" if d % 2 == 0 else "~a"
    try:
        pairs = [item.split(":", 1) for item in spec.split(",")]
        return {int(k): v for k, v in pairs}
    except ValueError:
        raise UsageError("--coloring", "expected 'parity' or digit:label pairs like 0:a,1:~a")


def cmd_padic(a):
    x = _padic("--x", a.x, a.p)
    if a.action == "label":
        if not 0 <= a.level < x.depth:
            raise UsageError("--level", f"must lie in [0, {x.depth})")
        col = _coloring(a.coloring)
        try:
            label = padic.cluster_label(x, a.level, col)
        except KeyError as e:
            raise UsageError("--coloring", f"no label for digit {e}")
        return {"x": x.to_dict(), "level": a.level, "label": label}
    if a.y is None:
        raise UsageError("--y", "required for this action")
    y = _padic("--y", a.y, a.p)
    if a.action == "dist":
        if x.depth != y.depth:
            raise UsageError("--y", "must have the same depth as --x")
        if a.format == "csv":
            return padic.distance_matrix_csv([x, y], a.conv), "text"
        return {"x": x.to_dict(), "y": y.to_dict(), "conv": a.conv, "distance": _q(padic.distance(x, y, a.conv))}
    z = padic.add(x, y) if a.action == "add" else padic.mul(x, y)
    return {"x": x.to_dict(), "y": y.to_dict(), "result": z.to_dict()}


def _audits(p: int, depth: int, seed: int, samples: int, flags=("--p", "--depth")) -> dict:
    if not 2 <= p <= 16:
        raise UsageError(flags[0], "exhaustive audits need 2 <= p <= 16")
    if depth not in (2, 3):
        raise UsageError(flags[1], "exhaustive audits need depth 2 or 3")
    lams = bell.enumerate_lambdas(p, depth)
    out = {
        "si_rho": bell.check_SI_rho(lams).to_dict(),
        "si_mu": bell.check_SI_mu(p, depth).to_dict(),
        "counterfactual": bell.counterfactual_audit(p, depth).to_dict(),
    }
    if samples:
        sample = bell.sample_hidden_variables(p, depth, samples, seed)
        out["si_rho_sampled"] = bell.check_SI_rho(sample, mode="chi2").to_dict()
    return out


def cmd_bell(a):
    if a.action == "audit":
        return {"audits": _audits(a.p, a.depth, a.seed, a.samples)}
    if a.p < 1:
        raise UsageError("--p", "must be >= 1")
    if a.alice is not None or a.bob is not None:
        settings = bell.Settings(a.alice or (0, Fraction(1, 4)), a.bob or (0, Fraction(1, 4)))
        try:
            result = bell.run_bell_experiment(a.p, settings)
        except bell.OffGridAngle as e:
            raise UsageError("--alice/--bob", str(e))
    else:
        angles = bell.tsirelson_angles(a.p)
        result = bell.run_grid_experiment(a.p, angles)
    if a.pairs_csv:
        _write(a.pairs_csv, bell.pairs_csv(a.p, result.angles))
    return bell.report_dict(result, _audits(a.audit_p, a.audit_depth, a.seed, a.samples,
                                            ("--audit-p", "--audit-depth")))


def cmd_lorenz(a):
    if a.action == "divergence":
        d = attractor.divergence(attractor.LorenzParams(a.sigma, 0, a.beta))
        return {"sigma": str(a.sigma), "beta": str(a.beta), "divergence": float(d), "exact": str(d)}
    params = attractor.LorenzParams(float(a.sigma), float(a.rho), float(a.beta))
    if a.dt <= 0:
        raise UsageError("--dt", "must be positive")
    if a.action == "dimension":
        if a.points < 10_000:
            raise UsageError("--points", "need at least 10000 points")
        pts = attractor.sample_attractor(a.points, params, seed=a.seed)
        fit = attractor.correlation_dimension(pts)
        if a.format == "csv":
            return fit.to_csv(), "csv"
        return {"fit": fit.to_dict()}
    n = a.steps if a.steps is not None else int(round(a.t_end / a.dt))
    if n < 1:
        raise UsageError("--steps", "must be >= 1")
    traj = attractor.integrate((a.x0, a.y0, a.z0), params, a.dt, n)
    if a.action == "integrate":
        return traj.to_csv(), "csv"
    sym = attractor.symbolize(traj, a.t_start, a.t_end)
    return sym.symbols + "\n", "text"


def cmd_flow(a):
    if a.r0 <= 0:
        raise UsageError("--r0", "must be positive")
    if a.t < 0:
        raise UsageError("--t", "must be non-negative")
    if a.action == "logistic":
        exact, rk4 = attractor.logistic_flow(a.r0, a.t, a.dt)
        return {"analytic": exact, "rk4": rk4, "abs_error": abs(exact - rk4)}
    s = attractor.limit_cycle_flow(attractor.FlowState(a.r0, a.phi0), a.t)
    return {"r": s.r, "phi": s.phi}


# --------------------------------------------------------------------------
# parser


def build_parser() -> argparse.ArgumentParser:
    parser = _Parser(prog="invset", description=__doc__.splitlines()[0])
    parser.add_argument("--version", action="version", version=f"invset {__version__}")
    groups = parser.add_subparsers(dest="group", required=True, parser_class=_Parser)

    def common(sp, formats=("json",)):
        sp.add_argument("--out", help="output path (default: stdout)")
        sp.add_argument("--format", choices=formats, default=formats[0])
        sp.add_argument("--seed", type=int, default=0)
        sp.add_argument("--config", help="key = value file; explicit flags win")

    g = groups.add_parser("cp", help="exact C_p arithmetic").add_subparsers(dest="action", required=True)
    for name in ("mul", "add"):
        sp = g.add_parser(name)
        sp.add_argument("--a", type=_triple, required=True, help="m,n,p")
        sp.add_argument("--b", type=_triple, required=True, help="m,n,p")
        common(sp)
    sp = g.add_parser("member")
    sp.add_argument("--amp2", type=_fraction, required=True)
    sp.add_argument("--turn", type=_fraction, required=True)
    sp.add_argument("--p", type=int, required=True)
    common(sp)
    sp = g.add_parser("momentum")
    sp.add_argument("--turn", type=_fraction, required=True, help="k*dx in turns")
    sp.add_argument("--dx", type=_fraction, default=Fraction(1))
    common(sp)

    g = groups.add_parser("bits", help="bit-string roots of unity").add_subparsers(dest="action", required=True)
    sp = g.add_parser("apply")
    sp.add_argument("--bits", type=_signs, required=True, help="e.g. +-+-")
    sp.add_argument("--n", type=int, default=1, help="power of the root operator")
    common(sp)
    sp = g.add_parser("order")
    sp.add_argument("--p", type=int, required=True)
    common(sp)

    g = groups.add_parser("padic", help="p-adic addresses").add_subparsers(dest="action", required=True)
    for name in ("dist", "add", "mul", "label"):
        sp = g.add_parser(name)
        sp.add_argument("--p", type=int, required=True)
        sp.add_argument("--x", type=_int_list, required=True, help="digits, coarsest first")
        if name == "label":
            sp.add_argument("--level", type=int, default=0)
            sp.add_argument("--coloring", default="parity")
        else:
            sp.add_argument("--y", type=_int_list)
        if name == "dist":
            sp.add_argument("--conv", choices=(padic.STANDARD, padic.UNNORMALIZED), default=padic.STANDARD)
        common(sp, ("json", "csv") if name == "dist" else ("json",))

    g = groups.add_parser("bell", help="CHSH and independence audits").add_subparsers(dest="action", required=True)
    sp = g.add_parser("chsh")
    sp.add_argument("--p", type=int, required=True)
    sp.add_argument("--alice", type=_fraction_pair, help="two orientations in turns (strict grid mode)")
    sp.add_argument("--bob", type=_fraction_pair, help="two orientations in turns (strict grid mode)")
    sp.add_argument("--pairs-csv", help="also write per-pair outcomes here")
    sp.add_argument("--audit-p", type=int, default=4)
    sp.add_argument("--audit-depth", type=int, default=2)
    sp.add_argument("--samples", type=int, default=0, help="sampled chi-square audit size (0 = off)")
    common(sp)
    sp = g.add_parser("audit")
    sp.add_argument("--p", type=int, default=4)
    sp.add_argument("--depth", type=int, default=2)
    sp.add_argument("--samples", type=int, default=0)
    common(sp)

    g = groups.add_parser("lorenz", help="Lorenz system").add_subparsers(dest="action", required=True)
    for name in ("integrate", "divergence", "symbolize", "dimension"):
        sp = g.add_parser(name)
        sp.add_argument("--sigma", type=_fraction, default=Fraction(10))
        sp.add_argument("--rho", type=_fraction, default=Fraction(28))
        sp.add_argument("--beta", type=_fraction, default=Fraction(8, 3))
        if name != "divergence":
            sp.add_argument("--dt", type=float, default=1e-3)
        if name in ("integrate", "symbolize"):
            sp.add_argument("--x0", type=float, default=1.0)
            sp.add_argument("--y0", type=float, default=1.0)
            sp.add_argument("--z0", type=float, default=1.0)
            sp.add_argument("--steps", type=int)
            sp.add_argument("--t-start", type=float, default=20.0 if name == "symbolize" else 0.0)
            sp.add_argument("--t-end", type=float, default=60.0 if name == "symbolize" else 10.0)
        if name == "dimension":
            sp.add_argument("--points", type=int, default=20000)
        common(sp, ("json", "csv") if name == "dimension" else
               ("csv",) if name == "integrate" else ("text",) if name == "symbolize" else ("json",))

    g = groups.add_parser("flow", help="fixed point and limit cycle").add_subparsers(dest="action", required=True)
    for name in ("logistic", "cycle"):
        sp = g.add_parser(name)
        sp.add_argument("--r0", type=float, required=True)
        sp.add_argument("--t", type=float, required=True)
        if name == "logistic":
            sp.add_argument("--dt", type=float, default=1e-3)
        else:
            sp.add_argument("--phi0", type=float, default=0.0)
        common(sp)
    return parser


HANDLERS = {"cp": cmd_cp, "bits": cmd_bits, "padic": cmd_padic, "bell": cmd_bell,
            "lorenz": cmd_lorenz, "flow": cmd_flow}


def _config_tokens(argv: list[str]) -> list[str]:
    """Turn ``--config FILE`` into flag tokens placed before the explicit ones."""
    path = None
    for i, tok in enumerate(argv):
        if tok == "--config" and i + 1 < len(argv):
            path = argv[i + 1]
        elif tok.startswith("--config="):
            path = tok.split("=", 1)[1]
    if path is None:
        return []
    try:
        with open(path, encoding="utf-8") as fh:
            lines = fh.read().splitlines()
    except OSError as e:
        raise UsageError("--config", f"cannot read {path}: {e.strerror}")
    tokens = []
    for line in lines:
        line = line.split("#", 1)[0].strip()
        if not line:
            continue
        if "=" not in line:
            raise UsageError("--config", f"expected key = value, got {line!r}")
        key, value = (s.strip() for s in line.split("=", 1))
        tokens += [f"--{key.replace('_', '-')}", *shlex.split(value)]
    return tokens


def _jsonable(v):
    if isinstance(v, Fraction):
        return str(v)
    if isinstance(v, tuple):
        return [_jsonable(x) for x in v]
    return v


def _write(path: str | None, text: str) -> None:
    if path is None:
        sys.stdout.write(text)
        return
    with open(path, "w", encoding="utf-8", newline="\n") as fh:
        fh.write(text)


def dispatch(argv: list[str]) -> int:
    parser = build_parser()
    try:
        if len(argv) >= 2 and not argv[0].startswith("-"):
            argv = argv[:2] + _config_tokens(argv) + argv[2:]
        args = parser.parse_args(argv)
        params = {k: _jsonable(v) for k, v in sorted(vars(args).items()) if k not in ("out", "config")}
        result = HANDLERS[args.group](args)
    except UsageError as e:
        print(f"invset: error: {e}", file=sys.stderr)
        return EXIT_USAGE
    except ValueError as e:
        print(f"invset: error: {e}", file=sys.stderr)
        return EXIT_USAGE
    except OSError as e:
        print(f"invset: error: {e.filename}: {e.strerror}", file=sys.stderr)
        return EXIT_IO
    kind = "json"
    if isinstance(result, tuple):
        result, kind = result
    header = {"command": f"{args.group} {args.action}", "params": params, "seed": args.seed,
              "version": __version__}
    if kind == "json":
        text = json.dumps({**header, **result}, sort_keys=True, indent=2) + "\n"
    else:
        text = "# " + json.dumps(header, sort_keys=True) + "\n" + result
    try:
        _write(args.out, text)
    except OSError as e:
        print(f"invset: error: cannot write --out {args.out}: {e.strerror}", file=sys.stderr)
        return EXIT_IO
    return EXIT_OK


def main(argv: list[str] | None = None) -> int:
    return dispatch(sys.argv[1:] if argv is None else list(argv))


if __name__ == "__main__":
    sys.exit(main())
