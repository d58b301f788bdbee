"""Command-line entry points.

Subcommands: constants, verify, basis, profile, simulate, shoot.  A
line-oriented ``key = value`` configuration file supplies the knobs; every
output file starts with a header block echoing the resolved configuration.

Exit codes: 0 success, 2 domain error, 3 numerical failure,
4 verification failure.
"""

from __future__ import annotations

import argparse
import json
import sys
from fractions import Fraction
from pathlib import Path

import numpy as np

from . import __version__
from .constants import (
    DomainError,
    derive_params,
    formal_pipeline,
    mu_critical,
    ode_coefficients,
    shrink_combo_constants,
)
from .exact import format_poly, to_complex

CONFIG_KEYS = {
    "p": "3",
    "delta": "1",
    "grid.L": "88",
    "grid.N": "8192",
    "ds": "5e-4",
    "s0": "100",
    "s_end": "105",
    "K": "12",
    "A": "20",
    "M_track": "6",
    "scheme": "imex2",
    "output.dir": "out",
}


def parse_config(path) -> dict:
    cfg = dict(CONFIG_KEYS)
    if path is None:
        return cfg
    text = Path(path).read_text()
    for lineno, raw in enumerate(text.splitlines(), 1):
        line = raw.split("#", 1)[0].strip()
        if not line:
            continue
        if "=" not in line:
            raise ValueError(f"{path}:{lineno}: expected key = value")
        key, _, value = line.partition("=")
        key = key.strip()
        if key not in CONFIG_KEYS:
            raise ValueError(f"{path}:{lineno}: unknown key {key!r}")
        cfg[key] = value.strip()
    return cfg


def _frac(s: str) -> Fraction:
    return Fraction(s)


def header_lines(cfg: dict, extra: dict = None) -> list:
    lines = [f"# cglblow {__version__}"]
    for k in sorted(cfg):
        lines.append(f"# {k} = {cfg[k]}")
    for k, v in sorted((extra or {}).items()):
        lines.append(f"# {k} = {v}")
    return lines


def _fmt(x: float) -> str:
    return f"{x:.17g}"


def _scalar_json(v, kappa: float) -> dict:
    c = to_complex(v, kappa)
    out = {"float_re": c.real, "float_im": c.imag}
    val = v.value if hasattr(v, "grade") else v
    if hasattr(val, "c0"):
        out["exact"] = str(val)
        if hasattr(v, "grade"):
            out["kappa_grade"] = v.grade
    return out


def _params_for(cfg) -> "ProfileParams":
    pm = derive_params(_frac(cfg["p"]), _frac(cfg["delta"]))
    return pm


def _full_m(pm) -> int:
    from .profilefield import FloatParams, bound_M

    return bound_M(FloatParams.from_exact(pm, mu=0.0))


def cmd_constants(cfg, args) -> int:
    pm = _params_for(cfg)
    ode = ode_coefficients(pm)
    mu_sc = mu_critical(pm)
    mu_pr = mu_critical(pm, flavor="printed")
    pm = pm.with_mu(mu_sc.mu)
    combos = shrink_combo_constants(pm)
    fr = formal_pipeline(pm.p, pm.delta)
    kap = pm.kappa_float
    payload = {
        "version": __version__,
        "config": cfg,
        "params": {
            "p": str(pm.p), "delta": str(pm.delta), "beta": str(pm.beta),
            "b2": str(pm.b2), "b_float": pm.b_float,
            "nu": _scalar_json(pm.nu, kap), "a": _scalar_json(pm.a, kap),
            "kappa_float": kap,
            "p_cri2": None if pm.p_cri2 is None else str(pm.p_cri2),
            "mu_selfconsistent": _scalar_json(mu_sc.mu, kap),
            "mu_printed_flavor": _scalar_json(mu_pr.mu, kap),
        },
        "ode": {
            "Htilde1": _scalar_json(ode.Htilde1, kap),
            "Htilde1_closed": str(ode.Htilde1_closed),
            "Htilde1_selfconsistent": _scalar_json(ode.Htilde1_selfconsistent, kap),
            "Htilde2": _scalar_json(ode.Htilde2, kap),
            "b2_root": str(ode.b2_root),
            "cancellations_zero": True,
        },
        "shrink_combos": {
            k: v for k, v in combos.float_map(kap).items()
        },
        "full_M_bound": _full_m(pm),
        "formal": {
            "b2_root": str(fr.b2_root),
            "mu_bracket": str(fr.mu_bracket),
            "mu_bracket_printed": str(fr.mu_bracket_printed),
            "mu_C_coefficient": str(fr.mu_C_coefficient),
        },
    }
    out = Path(cfg["output.dir"])
    out.mkdir(parents=True, exist_ok=True)
    path = out / "constants.json"
    path.write_text(json.dumps(payload, indent=2))
    print(f"wrote {path}")
    return 0


def cmd_verify(cfg, args) -> int:
    from .verify import verification_report

    checks = verification_report(_frac(cfg["p"]), _frac(cfg["delta"]))
    out = Path(cfg["output.dir"])
    out.mkdir(parents=True, exist_ok=True)
    path = out / "verify.txt"
    failures = 0
    with path.open("w") as fh:
        for line in header_lines(cfg):
            fh.write(line + "\n")
        for name, ok, detail in checks:
            mark = "PASS" if ok else "FAIL"
            fh.write(f"[{mark}] {name}: {detail}\n")
            print(f"[{mark}] {name}: {detail}")
            failures += not ok
    print(f"wrote {path} ({len(checks)} checks, {failures} failures)")
    return 4 if failures else 0


def cmd_basis(cfg, args) -> int:
    from .spectral import build_basis

    pm = _params_for(cfg)
    M = int(cfg["M_track"])
    basis = build_basis(M, pm.p, pm.delta, pm.beta)
    out = Path(cfg["output.dir"])
    out.mkdir(parents=True, exist_ok=True)
    path = out / "basis.txt"
    with path.open("w") as fh:
        for line in header_lines(cfg):
            fh.write(line + "\n")
        for n in range(M + 1):
            fh.write(f"h_{n} = {format_poly(basis.h[n])}\n")
            fh.write(f"ht_{n} = {format_poly(basis.h_tilde[n])}\n")
            fh.write(f"c_{n} = {basis.c[n]}\n")
    print(f"wrote {path}")
    return 0


def cmd_profile(cfg, args) -> int:
    from .profilefield import EvalContext, FloatParams, phi, potentials, rest_R

    pm = _params_for(cfg)
    pm = pm.with_mu(mu_critical(pm).mu)
    fp = FloatParams.from_exact(pm)
    s = float(cfg["s0"])
    L, N = float(cfg["grid.L"]), int(cfg["grid.N"])
    y = np.linspace(-L, L, N)
    ctx = EvalContext(fp, s)
    ph = phi(y, ctx)
    v1, v2 = potentials(y, ctx)
    R = rest_R(y, ctx)
    out = Path(cfg["output.dir"])
    out.mkdir(parents=True, exist_ok=True)
    path = out / "profile.csv"
    with path.open("w") as fh:
        for line in header_lines(cfg, {"s": s}):
            fh.write(line + "\n")
        fh.write("y,re_phi,im_phi,abs_R,abs_V1,abs_V2\n")
        for i in range(N):
            fh.write(
                ",".join(
                    _fmt(v)
                    for v in (
                        y[i], ph[i].real, ph[i].imag,
                        abs(R[i]), abs(v1[i]), abs(v2[i]),
                    )
                )
                + "\n"
            )
    print(f"wrote {path}")
    return 0


def _sim_config(cfg):
    from .simulate import SimConfig

    pm = _params_for(cfg)
    pm = pm.with_mu(mu_critical(pm).mu)
    return SimConfig(
        params=pm,
        L=float(cfg["grid.L"]),
        N=int(cfg["grid.N"]),
        ds=float(cfg["ds"]),
        s0=float(cfg["s0"]),
        s_end=float(cfg["s_end"]),
        K=float(cfg["K"]),
        A=float(cfg["A"]),
        M_track=int(cfg["M_track"]),
        scheme=cfg["scheme"],
    )


def cmd_simulate(cfg, args) -> int:
    from .profilefield import InitialDataSpec
    from .simulate import Simulator

    sc = _sim_config(cfg)
    sim = Simulator(sc)
    spec = InitialDataSpec(
        s0=sc.s0, d0_tilde=args.d0_tilde, d1_tilde=args.d1_tilde,
        K=sc.K, A=sc.A,
    )
    res = sim.run(spec)
    h = res.history
    M = sc.M_track
    cols = (
        ["s", "theta", "theta_prime"]
        + [f"q{n}" for n in range(M + 1)]
        + [f"qt{n}" for n in range(M + 1)]
        + ["Qt0", "Q2", "Qt2", "Q4", "Qt4", "qe_norm", "qminus_norm"]
    )
    flag_names = res.report.names
    out = Path(cfg["output.dir"])
    out.mkdir(parents=True, exist_ok=True)
    path = out / "simulate.csv"
    with path.open("w") as fh:
        extra = dict(res.config_meta)
        extra["d0_tilde"] = args.d0_tilde
        extra["d1_tilde"] = args.d1_tilde
        for line in header_lines(cfg, extra):
            fh.write(line + "\n")
        fh.write(",".join(cols + [f"VA_{k}" for k in flag_names]) + "\n")
        nrec = len(h["s"])
        ratios = res.report.ratios
        for i in range(nrec):
            row = [_fmt(h[c][i]) for c in cols]
            row += ["1" if ratios[i, j] > 1.0 else "0" for j in range(len(flag_names))]
            fh.write(",".join(row) + "\n")
    print(f"wrote {path}")
    if res.report.exit_s is not None:
        print(
            f"shrinking-set exit at s = {res.report.exit_s} "
            f"via {res.report.exit_component}"
        )
    return 0


def cmd_shoot(cfg, args) -> int:
    from .shooting import exit_sign_pattern, shoot

    sc = _sim_config(cfg)
    res = shoot(
        sc, grid_n=args.grid_n, refine=not args.no_refine,
        probe_N=args.probe_N, probe_ds=args.probe_ds,
        workers=args.workers,
    )
    payload = {
        "version": __version__,
        "config": cfg,
        "meta": res.meta,
        "best": vars(res.best),
        "corner_signs": {
            f"{k[0]},{k[1]}": [v[0], v[1]] for k, v in res.corner_signs.items()
        },
        "quadrants": sorted(exit_sign_pattern(res.probes)),
        "probes": [vars(p) for p in res.probes],
    }
    if args.s0_study:
        from .simulate import s0_scaling_study

        payload["s0_scaling"] = s0_scaling_study(sc.params)
    out = Path(cfg["output.dir"])
    out.mkdir(parents=True, exist_ok=True)
    path = out / "shoot.json"
    path.write_text(json.dumps(payload, indent=2, default=float))
    print(f"wrote {path}")
    print(
        f"best pair: ({res.best.d0:.6g}, {res.best.d1:.6g}) "
        f"exit s = {res.best.exit_s:.6g}"
    )
    return 0


COMMANDS = {
    "constants": cmd_constants,
    "verify": cmd_verify,
    "basis": cmd_basis,
    "profile": cmd_profile,
    "simulate": cmd_simulate,
    "shoot": cmd_shoot,
}


def main(argv=None) -> int:
    ap = argparse.ArgumentParser(prog="cglblow", description=__doc__)
    ap.add_argument("command", choices=sorted(COMMANDS))
    ap.add_argument("--config", help="key = value configuration file")
    ap.add_argument("--output-dir", help="override output.dir")
    ap.add_argument("--d0-tilde", type=float, default=0.0,
                    help="simulate: unit-mode shooting knob")
    ap.add_argument("--d1-tilde", type=float, default=0.0,
                    help="simulate: degree-one shooting knob")
    ap.add_argument("--grid-n", type=int, default=8, help="shoot: grid size")
    ap.add_argument("--no-refine", action="store_true",
                    help="shoot: skip the refinement round")
    ap.add_argument("--probe-N", type=int, default=None,
                    help="shoot: cheaper probe grid size")
    ap.add_argument("--probe-ds", type=float, default=None,
                    help="shoot: cheaper probe step")
    ap.add_argument("--workers", type=int, default=None,
                    help="shoot: worker count (default CGLBLOW_WORKERS)")
    ap.add_argument("--s0-study", action="store_true",
                    help="shoot: record bound-ratio scaling over s0 in {50,100,200}")
    args = ap.parse_args(argv)
    try:
        cfg = parse_config(args.config)
        if args.output_dir:
            cfg["output.dir"] = args.output_dir
        return COMMANDS[args.command](cfg, args)
    except DomainError as exc:
        print(f"domain error: {exc}", file=sys.stderr)
        return 2
    except (ValueError, KeyError) as exc:
        print(f"error: {exc}", file=sys.stderr)
        return 2
    except FloatingPointError as exc:
        print(f"numerical failure: {exc}", file=sys.stderr)
        return 3


if __name__ == "__main__":
    raise SystemExit(main())
