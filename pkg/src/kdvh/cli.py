"""Command-line front end for the library.

Subcommands: catastrophe, hodograph, p12, evolve, universality, sweep.
Every run resolves its configuration as defaults < --config JSON <
explicit flags, writes the fully resolved configuration next to its
outputs (so `--config <echo>` reproduces the run), and writes all files
atomically.  Data files never contain timestamps: identical
configurations give byte-identical outputs.

Exit codes: 0 success, 1 validation error (bad flags or inadmissible
inputs), 2 numerical failure (no convergence, instability, resolution
loss).  On failure a single-line JSON object {error, message,
exit_code} goes to stderr.

Grid/range arguments accept either a comma list "a,b,c" or an
inclusive range "start:stop:step"; an empty string means an empty list.
"""

from __future__ import annotations

import argparse
import json
import os
import sys
from concurrent.futures import ProcessPoolExecutor
from datetime import datetime, timezone

import numpy as np

from . import io as kio
from . import hodograph, painleve, spectral, universality
from .errors import KdvhError
from .hierarchy import conserved
from .profiles import get_profile

GLOBAL_DEFAULTS = {
    "config": None, "out": ".", "jobs": 1, "seed": 0, "verbose": False,
}

SUB_DEFAULTS = {
    "catastrophe": {"profile": "sech2", "m": 1},
    "hodograph": {"profile": "sech2", "m": 1, "t": 0.1, "x": "-3:3:0.01"},
    "p12": {"T": 0.0, "L": 120.0, "N": 6001, "dT": 0.25, "tol": 1e-12},
    "evolve": {"profile": "sech2", "m": 1, "eps": 0.05, "t": 0.15,
               "Lx": 60.0, "N": 16384, "snap": "", "dt": 0.0,
               "checkpoint": ""},
    "universality": {"profile": "sech2", "m": 1,
                     "eps": "0.1,0.07,0.05,0.035", "X": "-3:3:0.5",
                     "T": "-1,0,1", "Lx": 60.0, "N": 65536,
                     "painleve_L": 120.0, "painleve_N": 6001},
    "sweep": {"axis": "", "values": ""},
}

_PRIMARY_EXT = {"catastrophe": ".json", "hodograph": ".csv", "p12": ".csv",
                "evolve": "", "universality": ".json", "sweep": ""}


class _UsageError(ValueError):
    pass


class _Parser(argparse.ArgumentParser):
    """argparse that reports usage problems on our exit-code contract."""

    def error(self, message):
        raise _UsageError(message)


def parse_float_list(value) -> list:
    """Comma list or inclusive start:stop:step range; '' -> []."""
    if isinstance(value, (list, tuple, np.ndarray)):
        return [float(v) for v in value]
    if isinstance(value, (int, float)):
        return [float(value)]
    s = str(value).strip()
    if not s:
        return []
    if ":" in s:
        parts = s.split(":")
        if len(parts) != 3:
            raise _UsageError(f"range {s!r} must be start:stop:step")
        try:
            a, b, step = (float(v) for v in parts)
        except ValueError:
            raise _UsageError(f"range {s!r} has non-numeric parts")
        if step == 0 or (b - a) * step < 0:
            raise _UsageError(f"empty range {s!r}")
        n = int(np.floor((b - a) / step + 1e-9)) + 1
        return [a + i * step for i in range(n)]
    try:
        return [float(v) for v in s.split(",")]
    except ValueError:
        raise _UsageError(f"could not parse {s!r} as a comma list of floats")


def _glue_negative_values(argv):
    """Join '--flag -3:3:0.5' into '--flag=-3:3:0.5' for argparse."""
    out = []
    i = 0
    while i < len(argv):
        tok = argv[i]
        if (tok.startswith("--") and "=" not in tok and i + 1 < len(argv)
                and argv[i + 1][:1] == "-" and len(argv[i + 1]) > 1
                and argv[i + 1][1].isdigit()):
            out.append(f"{tok}={argv[i + 1]}")
            i += 2
        else:
            out.append(tok)
            i += 1
    return out


def _build_parser() -> _Parser:
    common = _Parser(add_help=False)
    g = common.add_argument_group("global options")
    g.add_argument("--config", default=argparse.SUPPRESS,
                   help="JSON file with resolved options (echoed configs work)")
    g.add_argument("--out", default=argparse.SUPPRESS,
                   help="output directory, or primary output file path")
    g.add_argument("--jobs", type=int, default=argparse.SUPPRESS,
                   help="sweep concurrency bound")
    g.add_argument("--seed", type=int, default=argparse.SUPPRESS,
                   help="reserved; no subcommand draws random numbers")
    g.add_argument("--verbose", action="store_true",
                   default=argparse.SUPPRESS)

    p = _Parser(prog="kdvh", description=__doc__.splitlines()[0],
                parents=[common])
    sub = p.add_subparsers(dest="subcommand", metavar="SUBCOMMAND")

    sp = sub.add_parser("catastrophe", parents=[common],
                        help="gradient-catastrophe point and constants")
    sp.add_argument("--profile", default=argparse.SUPPRESS)
    sp.add_argument("--m", type=int, default=argparse.SUPPRESS)

    sp = sub.add_parser("hodograph", parents=[common],
                        help="characteristic solution u(x,t) before breakup")
    sp.add_argument("--profile", default=argparse.SUPPRESS)
    sp.add_argument("--m", type=int, default=argparse.SUPPRESS)
    sp.add_argument("--t", type=float, default=argparse.SUPPRESS)
    sp.add_argument("--x", default=argparse.SUPPRESS,
                    help="x grid, 'a:b:step' or comma list")

    sp = sub.add_parser("p12", parents=[common],
                        help="pole-free Painleve transcendent U(X,T)")
    sp.add_argument("--T", type=float, default=argparse.SUPPRESS)
    sp.add_argument("--L", type=float, default=argparse.SUPPRESS)
    sp.add_argument("--N", type=int, default=argparse.SUPPRESS)
    sp.add_argument("--dT", type=float, default=argparse.SUPPRESS)
    sp.add_argument("--tol", type=float, default=argparse.SUPPRESS)

    sp = sub.add_parser("evolve", parents=[common],
                        help="pseudospectral evolution of one hierarchy flow")
    sp.add_argument("--profile", default=argparse.SUPPRESS)
    sp.add_argument("--m", type=int, default=argparse.SUPPRESS)
    sp.add_argument("--eps", type=float, default=argparse.SUPPRESS)
    sp.add_argument("--t", type=float, default=argparse.SUPPRESS)
    sp.add_argument("--Lx", type=float, default=argparse.SUPPRESS)
    sp.add_argument("--N", type=int, default=argparse.SUPPRESS)
    sp.add_argument("--snap", default=argparse.SUPPRESS,
                    help="extra snapshot times, comma list")
    sp.add_argument("--dt", type=float, default=argparse.SUPPRESS,
                    help="fixed step; 0 = automatic")
    sp.add_argument("--checkpoint", default=argparse.SUPPRESS,
                    help="also write the final state as a binary checkpoint")

    sp = sub.add_parser("universality", parents=[common],
                        help="double-scaling expansion vs direct evolution")
    sp.add_argument("--profile", default=argparse.SUPPRESS)
    sp.add_argument("--m", type=int, default=argparse.SUPPRESS)
    sp.add_argument("--eps", default=argparse.SUPPRESS,
                    help="descending ladder, comma list")
    sp.add_argument("--X", default=argparse.SUPPRESS,
                    help="window positions, 'a:b:step' or comma list")
    sp.add_argument("--T", default=argparse.SUPPRESS,
                    help="window times, comma list")
    sp.add_argument("--Lx", type=float, default=argparse.SUPPRESS)
    sp.add_argument("--N", type=int, default=argparse.SUPPRESS)
    sp.add_argument("--painleve-L", dest="painleve_L", type=float,
                    default=argparse.SUPPRESS)
    sp.add_argument("--painleve-N", dest="painleve_N", type=int,
                    default=argparse.SUPPRESS)

    sp = sub.add_parser("sweep", parents=[common],
                        help="run one subcommand across an axis of values")
    sp.add_argument("--axis", choices=("eps", "T"),
                    default=argparse.SUPPRESS)
    sp.add_argument("--values", default=argparse.SUPPRESS,
                    help="axis values, comma list")
    sp.add_argument("template", nargs=argparse.REMAINDER,
                    help="subcommand invocation to repeat per value")
    return p


def _resolve(ns: argparse.Namespace) -> dict:
    """defaults < config file < explicit flags, then echo-ready dict."""
    sub = ns.subcommand
    given = {k: v for k, v in vars(ns).items() if k != "subcommand"}
    cfg = dict(GLOBAL_DEFAULTS)
    cfg.update(SUB_DEFAULTS[sub])
    path = given.get("config", cfg["config"])
    if path:
        try:
            with open(path, "r", encoding="utf-8") as fh:
                loaded = json.load(fh)
        except (OSError, json.JSONDecodeError) as e:
            raise _UsageError(f"--config {path}: {e}")
        if not isinstance(loaded, dict):
            raise _UsageError(f"--config {path}: expected a JSON object")
        known = set(cfg) | {"subcommand"}
        bad = sorted(set(loaded) - known)
        if bad:
            raise _UsageError(
                f"--config {path}: keys {bad} unknown for '{sub}'")
        loaded.pop("subcommand", None)
        cfg.update(loaded)
    cfg.update(given)
    cfg["config"] = None  # the echo must not point at another config
    return cfg


def _out_paths(cfg: dict, sub: str):
    """Split --out into (directory, primary basename)."""
    out = cfg["out"] or "."
    ext = _PRIMARY_EXT[sub]
    root, got_ext = os.path.splitext(out)
    if ext and got_ext == ext:
        return os.path.dirname(out) or ".", os.path.basename(root)
    return out, sub


def _echo_config(cfg: dict, sub: str, d: str, base: str) -> None:
    kio.write_json(os.path.join(d, base + ".config.json"),
                   {"subcommand": sub, **cfg})


def _cmd_catastrophe(cfg: dict) -> int:
    p = get_profile(cfg["profile"])
    m = int(cfg["m"])
    cp = hodograph.catastrophe(p, m)
    (_, _, t_3sys), res_3sys = hodograph.refine_newton3(p, m, cp)
    doc = {
        "profile": p.name, "m": m,
        "u_c": cp.u_c, "x_c": cp.x_c, "t_c": cp.t_c,
        "xi_star": cp.xi_star, "k": cp.k, "F4": cp.F4,
        "residuals": {
            "F": hodograph.F_eval(cp.u_c, cp.x_c, cp.t_c, p, m, 0),
            "F_u": hodograph.F_eval(cp.u_c, cp.x_c, cp.t_c, p, m, 1),
            "F_uu": hodograph.F_eval(cp.u_c, cp.x_c, cp.t_c, p, m, 2),
            "newton3_tc_shift": abs(t_3sys - cp.t_c),
            "newton3_system": res_3sys,
        },
    }
    d, base = _out_paths(cfg, "catastrophe")
    kio.write_json(os.path.join(d, base + ".json"), doc)
    _echo_config(cfg, "catastrophe", d, base)
    print(json.dumps(doc, indent=2, sort_keys=True))
    return 0


def _cmd_hodograph(cfg: dict) -> int:
    p = get_profile(cfg["profile"])
    m = int(cfg["m"])
    t = float(cfg["t"])
    xs = parse_float_list(cfg["x"])
    if not xs:
        raise _UsageError("--x produced no evaluation points")
    us, xis, res = [], [], 0.0
    for x in xs:
        cs = hodograph.solve_u(x, t, p, m)
        us.append(cs.u)
        xis.append(cs.xi)
        res = max(res, cs.residual)
    d, base = _out_paths(cfg, "hodograph")
    kio.write_csv(os.path.join(d, base + ".csv"),
                  ["x", "u", "xi"], [xs, us, xis])
    cp = hodograph.catastrophe(p, m)
    kio.write_json(os.path.join(d, base + ".json"),
                   {"profile": p.name, "m": m, "t": t, "t_c": cp.t_c,
                    "n_points": len(xs), "max_x_residual": res})
    _echo_config(cfg, "hodograph", d, base)
    if cfg["verbose"]:
        print(f"hodograph: {len(xs)} points at t={t} -> {d}/{base}.csv")
    return 0


def _cmd_p12(cfg: dict) -> int:
    f = painleve.solve_p12(float(cfg["T"]), L=float(cfg["L"]),
                           N=int(cfg["N"]), dT=float(cfg["dT"]),
                           tol=float(cfg["tol"]))
    d, base = _out_paths(cfg, "p12")
    kio.write_csv(
        os.path.join(d, base + ".csv"),
        ["X", "U", "U_X", "U_XX", "U_XXX", "U_T", "Q", "Q_T", "U_XXT"],
        [f.X, f.U, f.U_X, f.U_XX, f.U_XXX, f.U_T, f.Q, f.Q_T, f.U_XXT])
    # far-field agreement just inside the Dirichlet nodes (X = +-0.95 L)
    dev = {}
    for side, sgn in (("left", -1.0), ("right", 1.0)):
        i = int(np.argmin(np.abs(f.X - sgn * 0.95 * f.L)))
        dev[side] = abs(f.U[i] - painleve.asymptotic_value(f.X[i], f.T))
    kio.write_json(os.path.join(d, base + ".json"), {
        "T": f.T, "L": f.L, "N": f.N,
        "newton_residual": f.newton_residual,
        "ode_residual_interior": painleve.ode_residual(f),
        "boundary_deviation": dev,
        "boundary_budget": painleve.boundary_budget(0.95 * f.L, f.T),
        "U_at_0": f.U[f.N // 2],
    })
    _echo_config(cfg, "p12", d, base)
    if cfg["verbose"]:
        print(f"p12: T={f.T} -> {d}/{base}.csv")
    return 0


def _cmd_evolve(cfg: dict) -> int:
    p = get_profile(cfg["profile"])
    m = int(cfg["m"])
    eps = float(cfg["eps"])
    t_final = float(cfg["t"])
    snaps = sorted(set(parse_float_list(cfg["snap"])) | {t_final})
    if snaps[0] < 0:
        raise _UsageError(f"snapshot time {snaps[0]} is negative")
    if snaps[-1] > t_final:
        raise _UsageError(
            f"snapshot time {snaps[-1]} is past the final time {t_final}")
    dt = float(cfg["dt"]) or None
    d, _ = _out_paths(cfg, "evolve")
    st = spectral.init_state(p, eps, m, Lx=float(cfg["Lx"]),
                             N=int(cfg["N"]))
    mass0, h00 = conserved(st.u, st.grid.dx)
    log: list = []
    rows = []
    for i, t_snap in enumerate(snaps):
        st = spectral.evolve(st, t_snap, dt=dt, log=log)
        fname = f"u_{i:04d}.csv"
        kio.write_csv(os.path.join(d, fname), ["x", "u"],
                      [st.grid.x, st.u])
        mass, h0 = conserved(st.u, st.grid.dx)
        rows.append({"t": t_snap, "file": fname, "mass": mass, "h0": h0,
                     "mass_drift": abs(mass - mass0),
                     "h0_rel_drift": abs((h0 - h00) / h00)})
    steps = [h for _, h in log]
    kio.write_json(os.path.join(d, "manifest.json"), {
        "profile": p.name, "m": m, "eps": eps, "Lx": st.grid.Lx,
        "N": st.grid.N, "dt_policy": dt if dt else "auto",
        "snapshots": rows, "n_steps": len(steps),
        "dt_first": steps[0] if steps else None,
        "dt_last": steps[-1] if steps else None,
        "dt_min": min(steps) if steps else None,
        "dt_max": max(steps) if steps else None,
        "tail_ratio_final": spectral.tail_ratio(st),
    })
    if cfg["checkpoint"]:
        kio.write_checkpoint(os.path.join(d, cfg["checkpoint"]), st)
    _echo_config(cfg, "evolve", d, "evolve")
    if cfg["verbose"]:
        print(f"evolve: {len(snaps)} snapshots, {len(steps)} steps -> {d}")
    return 0


def _cmd_universality(cfg: dict) -> int:
    p = get_profile(cfg["profile"])
    eps = parse_float_list(cfg["eps"])
    Xs = parse_float_list(cfg["X"])
    Ts = parse_float_list(cfg["T"])
    grid = [(X, T) for X in Xs for T in Ts]
    rep = universality.scaling_study(
        p, int(cfg["m"]), eps, grid, Lx=float(cfg["Lx"]), N=int(cfg["N"]),
        painleve_L=float(cfg["painleve_L"]),
        painleve_N=int(cfg["painleve_N"]))
    d, base = _out_paths(cfg, "universality")
    kio.write_json(os.path.join(d, base + ".json"), rep.to_dict())
    kio.write_csv(os.path.join(d, base + "_prebreak.csv"),
                  ["eps", "error"],
                  [eps, [rep.prebreak_errors[repr(e)] for e in eps]])
    if Ts:
        kio.write_csv(os.path.join(d, base + "_errors.csv"),
                      ["eps", "E_lead", "E_corr"],
                      [eps, [rep.E_lead[repr(e)] for e in eps],
                       [rep.E_corr[repr(e)] for e in eps]])
        cols = {k: [s[k] for s in rep.samples]
                for k in ("eps", "T", "X", "x", "t",
                          "u_num", "u_lead", "u_corr")}
        cols["err_lead"] = [abs(s["u_num"] - s["u_lead"])
                            for s in rep.samples]
        cols["err_corr"] = [abs(s["u_num"] - s["u_corr"])
                            for s in rep.samples]
        kio.write_csv(os.path.join(d, base + "_samples.csv"),
                      list(cols), list(cols.values()))
    _echo_config(cfg, "universality", d, base)
    if cfg["verbose"]:
        print(f"universality: slopes lead={rep.slope_lead} "
              f"corr={rep.slope_corr} prebreak={rep.slope_prebreak} -> {d}")
    return 0


def _cmd_sweep(cfg: dict) -> int:
    axis = cfg["axis"]
    if axis not in ("eps", "T"):
        raise _UsageError("sweep needs --axis eps|T")
    values = parse_float_list(cfg["values"])
    if not values:
        raise _UsageError("sweep needs a nonempty --values list")
    template = [a for a in cfg["template"] if a != "--"]
    if not template or template[0] not in SUB_DEFAULTS \
            or template[0] == "sweep":
        raise _UsageError(
            "sweep template must start with a non-sweep subcommand")
    d, _ = _out_paths(cfg, "sweep")
    jobs = []
    for v in values:
        vdir = os.path.join(d, f"{axis}={v:.12g}")
        jobs.append(template + [f"--{axis}={kio.format_float(v)}",
                                f"--out={vdir}"])
    started = datetime.now(timezone.utc).isoformat()
    if int(cfg["jobs"]) > 1:
        with ProcessPoolExecutor(max_workers=int(cfg["jobs"])) as pool:
            codes = list(pool.map(main, jobs))
    else:
        codes = [main(argv) for argv in jobs]
    manifest = {
        "axis": axis, "values": values,
        "jobs": [{"value": v, "argv": argv, "exit_code": code,
                  "out_dir": os.path.join(d, f"{axis}={v:.12g}")}
                 for v, argv, code in zip(values, jobs, codes)],
        "n_ok": sum(1 for c in codes if c == 0),
        "n_failed": sum(1 for c in codes if c != 0),
        "started": started,
        "finished": datetime.now(timezone.utc).isoformat(),
    }
    kio.write_json(os.path.join(d, "sweep_manifest.json"), manifest)
    if any(codes):
        _fail_json("SweepPartialFailure",
                   f"{manifest['n_failed']} of {len(values)} jobs failed", 2)
        return 2
    if cfg["verbose"]:
        print(f"sweep: {len(values)} jobs ok -> {d}")
    return 0


_DISPATCH = {
    "catastrophe": _cmd_catastrophe,
    "hodograph": _cmd_hodograph,
    "p12": _cmd_p12,
    "evolve": _cmd_evolve,
    "universality": _cmd_universality,
    "sweep": _cmd_sweep,
}


def _fail_json(name: str, message: str, code: int) -> None:
    print(json.dumps({"error": name, "message": message,
                      "exit_code": code}), file=sys.stderr)


def main(argv=None) -> int:
    parser = _build_parser()
    try:
        ns = parser.parse_args(
            _glue_negative_values(sys.argv[1:] if argv is None else argv))
        if not getattr(ns, "subcommand", None):
            raise _UsageError("a subcommand is required (see --help)")
        cfg = _resolve(ns)
        return _DISPATCH[ns.subcommand](cfg)
    except _UsageError as e:
        _fail_json("UsageError", str(e), 1)
        return 1
    except KdvhError as e:
        code = 1 if isinstance(e, ValueError) else 2
        _fail_json(type(e).__name__, str(e), code)
        return code


if __name__ == "__main__":
    sys.exit(main())
