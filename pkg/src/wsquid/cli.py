"""Command-line reproduction of the W-state simulations.

    wsquid fig2 a|b        three-qubit trajectories at the two emission rates
    wsquid fig3            fidelity / success sweep over qubit number at t = 50/g
    wsquid simulate        single run described by --config
    wsquid oracle-check    full tensor-product space vs single-excitation model
    wsquid squid-levels    rf-SQUID levels, flux matrix elements and coupling g

Exit status is 0 on success, 1 when a check fails and 2 on an error; errors
print a single JSON line prefixed with ``error`` on stderr.
"""
from __future__ import annotations

import argparse
import csv
import json
import sys
from concurrent.futures import ThreadPoolExecutor
from pathlib import Path

from .config import RunConfig, load_config
from .dynamics import evolve_conditional, monte_carlo
from .errors import ConfigError, WsquidError
from .model import (
    REF_G,
    REF_GAMMA,
    REF_GAMMA_STRONG,
    ModelParams,
    cavity_photon_state,
    dark_state,
)
from .oracle import FullSpaceConfig, compare_subspace, embed, full_space_evolve
from .protocol import ProtocolConfig, generate_w, prepare_photon, run_full_protocol
from .squid_spectrum import CouplingGeometry, coupling_constants, solve_flux_levels, write_potential_csv

FIG3_QUBITS = (3, 5, 10, 20, 40, 60, 80)
FIG2_GAMMA = {"a": REF_GAMMA, "b": REF_GAMMA_STRONG}


def _fmt(x):
    return f"{x:.17g}"


def default_config():
    return RunConfig(params=ModelParams.experimental(3), g_si=REF_G)


def _base(args):
    return load_config(args.config) if args.config else default_config()


def _say(args, text):
    if not args.quiet:
        print(text)


def fig2(variant, cfg: RunConfig, t_end=25.0):
    """Three-qubit generation run with the emission rate of the chosen variant."""
    params = ModelParams(3, gamma=FIG2_GAMMA[variant] / cfg.g_si, kappa=cfg.params.kappa, K=cfg.params.K)
    return evolve_conditional(params, cfg.pulse, cavity_photon_state(3), (0.0, t_end), cfg.integrator)


def fig3(cfg: RunConfig, qubits=FIG3_QUBITS, t_end=50.0, jobs=1):
    """Rows (N, F, P_s) at t_end for each qubit number, sorted by N."""
    p = cfg.params

    def point(N):
        params = ModelParams(N, gamma=p.gamma, kappa=p.kappa, K=p.K)
        rec = evolve_conditional(params, cfg.pulse, cavity_photon_state(N), (0.0, t_end), cfg.integrator)
        return N, rec.final_fidelity, rec.final_success

    qubits = sorted(set(qubits))
    if jobs > 1:
        with ThreadPoolExecutor(jobs) as ex:
            rows = list(ex.map(point, qubits))
    else:
        rows = [point(N) for N in qubits]
    return sorted(rows)


def _initial(cfg: RunConfig):
    if cfg.initial == "dark":
        return dark_state(cfg.params, cfg.pulse, 0.0)
    return cavity_photon_state(cfg.params.N)


def _protocol_config(cfg: RunConfig):
    return ProtocolConfig(
        cfg.params,
        gen_pulse=cfg.pulse,
        prep_pulse=cfg.prep_pulse,
        prep_duration=cfg.prep_duration,
        gen_duration=cfg.gen_duration,
        integrator=cfg.integrator,
    )


def cmd_fig2(args):
    cfg = _base(args)
    rec = fig2(args.variant, cfg)
    out = Path(args.out)
    out.mkdir(parents=True, exist_ok=True)
    rec.to_csv(out / f"fig2{args.variant}.csv")
    _say(args, f"fig2{args.variant} F(25)={_fmt(rec.final_fidelity)} P_s(25)={_fmt(rec.final_success)}")
    return 0


def cmd_fig3(args):
    cfg = _base(args)
    qubits = [int(q) for q in args.qubits.split(",")] if args.qubits else FIG3_QUBITS
    rows = fig3(cfg, qubits, jobs=args.jobs)
    out = Path(args.out)
    out.mkdir(parents=True, exist_ok=True)
    with open(out / "fig3.csv", "w", newline="") as fh:
        w = csv.writer(fh, lineterminator="\n")
        w.writerow(["N", "F", "P_s"])
        for N, F, ps in rows:
            w.writerow([N, _fmt(F), _fmt(ps)])
    for N, F, ps in rows:
        _say(args, f"N={N} F(50)={_fmt(F)} P_s(50)={_fmt(ps)}")
    return 0


def cmd_simulate(args):
    cfg = _base(args)
    out = Path(args.out)
    out.mkdir(parents=True, exist_ok=True)
    stem = cfg.prefix or "run"
    pc = _protocol_config(cfg)
    if cfg.stage == "full":
        report = run_full_protocol(pc)
        report.write(out, stem)
        _say(args, f"{stem} P_s={_fmt(report.success_probability)} F={_fmt(report.fidelity)}")
    else:
        if cfg.stage == "preparation":
            rec = prepare_photon(pc)
        else:
            rec = generate_w(pc, _initial(cfg))
        rec.to_csv(out / f"{stem}.csv")
        _say(args, f"{stem} P_s={_fmt(rec.final_success)} F={_fmt(rec.final_fidelity)}")
    if cfg.n_traj:
        if cfg.stage != "generation":
            raise ConfigError("[mc] sampling is only available for the generation stage", cfg.path)
        seed = args.seed if args.seed is not None else cfg.seed
        mc = monte_carlo(cfg.params, cfg.pulse, _initial(cfg), (0.0, cfg.gen_duration), cfg.integrator, cfg.n_traj, seed)
        (out / f"{stem}_mc.txt").write_text(
            f"n_trajectories={mc.n_trajectories}\nn_no_jump={mc.n_no_jump}\n"
            f"success_probability={_fmt(mc.success_probability)}\nstandard_error={_fmt(mc.standard_error)}\nseed={seed}\n"
        )
        _say(args, f"{stem} mc p={_fmt(mc.success_probability)} +/- {_fmt(mc.standard_error)}")
    return 0


def oracle_check(cfg: RunConfig):
    N = cfg.params.N
    psi0 = _initial(cfg)
    reduced_params = cfg.params
    if cfg.oracle_reduced_couplings is not None:
        reduced_params = cfg.params.with_(couplings=cfg.oracle_reduced_couplings)
    reduced = evolve_conditional(reduced_params, cfg.pulse, psi0, (0.0, cfg.oracle_t_end), cfg.integrator)
    full_cfg = FullSpaceConfig(cfg.params, cfg.pulse, cfg.n_max)
    full = full_space_evolve(full_cfg, embed(psi0, cfg.n_max), (0.0, cfg.oracle_t_end), cfg.integrator)
    return compare_subspace(full, reduced), reduced, N


def cmd_oracle_check(args):
    cfg = _base(args)
    dev, reduced, N = oracle_check(cfg)
    ok = dev.passes(cfg.oracle_tolerance)
    out = Path(args.out)
    out.mkdir(parents=True, exist_ok=True)
    (out / "oracle_check.txt").write_text(
        f"N={N}\nn_max={cfg.n_max}\nmax_dP_s={_fmt(dev.success_probability)}\nmax_dF={_fmt(dev.fidelity)}\n"
        f"max_damplitude={_fmt(dev.amplitude)}\ntolerance={_fmt(cfg.oracle_tolerance)}\nresult={'PASS' if ok else 'FAIL'}\n"
    )
    _say(args, f"oracle-check {'PASS' if ok else 'FAIL'} max deviation {dev.max:.3e} (tol {cfg.oracle_tolerance:.1e})")
    return 0 if ok else 1


def cmd_squid_levels(args):
    if not args.config:
        raise ConfigError("squid-levels needs --config with a [device] section")
    cfg = load_config(args.config, need_coupling=False)
    if cfg.device is None:
        raise ConfigError("config has no [device] section", cfg.path)
    dev = cfg.device
    levels = solve_flux_levels(dev.spec, dev.grid, num_levels=dev.num_levels, keep_wavefunctions=True)
    wc = dev.cavity_frequency or levels.transition_frequency_0e
    rows = [(f"E_{k}", e) for k, e in enumerate(levels.energies)]
    rows += [
        ("flux_0e", levels.flux_matrix_element_0e),
        ("flux_1e", levels.flux_matrix_element_1e),
        ("omega_c", wc),
    ]
    if dev.cavity_overlap is not None:
        g, omega_scale = coupling_constants(levels, CouplingGeometry(wc, dev.cavity_overlap, dev.drive_overlap_ratio), dev.spec)
        rows += [("g", g), ("omega_scale", omega_scale)]
    out = Path(args.out)
    out.mkdir(parents=True, exist_ok=True)
    with open(out / "squid_levels.csv", "w", newline="") as fh:
        w = csv.writer(fh, lineterminator="\n")
        w.writerow(["quantity", "value"])
        for name, val in rows:
            w.writerow([name, _fmt(val)])
    write_potential_csv(dev.spec, levels, out / "squid_potential.csv")
    for name, val in rows:
        _say(args, f"{name}={_fmt(val)}")
    return 0


def build_parser():
    common = argparse.ArgumentParser(add_help=False)
    common.add_argument("--config", metavar="PATH", help="run configuration file")
    common.add_argument("--out", metavar="DIR", default=".", help="output directory (default: .)")
    common.add_argument("--seed", type=int, default=None, help="random seed for jump sampling")
    common.add_argument("--quiet", action="store_true", help="suppress summary lines")

    p = argparse.ArgumentParser(prog="wsquid", description=__doc__.splitlines()[0], parents=[common])
    sub = p.add_subparsers(dest="command", required=True)
    f2 = sub.add_parser("fig2", parents=[common], help="three-qubit trajectory at t = 25/g")
    f2.add_argument("variant", choices=("a", "b"))
    f2.set_defaults(func=cmd_fig2)
    f3 = sub.add_parser("fig3", parents=[common], help="sweep over qubit number at t = 50/g")
    f3.add_argument("--qubits", help="comma-separated qubit numbers")
    f3.add_argument("--jobs", type=int, default=1, help="parallel threads")
    f3.set_defaults(func=cmd_fig3)
    sub.add_parser("simulate", parents=[common], help="run the configured stage").set_defaults(func=cmd_simulate)
    sub.add_parser("oracle-check", parents=[common], help="full vs reduced model").set_defaults(func=cmd_oracle_check)
    sub.add_parser("squid-levels", parents=[common], help="rf-SQUID spectrum and couplings").set_defaults(func=cmd_squid_levels)
    return p


def _error_line(exc):
    info = {"type": type(exc).__name__, "message": getattr(exc, "message", str(exc))}
    if isinstance(exc, ConfigError):
        info["file"] = str(exc.path) if exc.path else None
        info["line"] = exc.line
    return "error " + json.dumps(info)


def main(argv=None):
    args = build_parser().parse_args(argv)
    try:
        return args.func(args)
    except (WsquidError, ValueError, OSError) as exc:
        print(_error_line(exc), file=sys.stderr)
        return 2


if __name__ == "__main__":
    sys.exit(main())
