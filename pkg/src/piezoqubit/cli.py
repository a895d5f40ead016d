"""Command-line front end: ``piezoqubit <command> [options]``.

Every output file starts with a header (CSV ``#`` comments, JSON ``header``
object) carrying the tool version, the command line and the seed. The run
manifest is the only file with a timestamp.

Exit codes: 0 success, 1 usage or I/O error, 2 numerical non-convergence.
"""
from __future__ import annotations

import argparse
import csv
import datetime
import io
import json
import math
import os
import shlex
import sys
from dataclasses import asdict, dataclass, field
from pathlib import Path

import numpy as np

from . import __version__
from .circuit import TWO_PI, circuit_from_json, circuit_to_json, sweep_admittance, sweep_to_csv, sweep_to_rows
from .dynamics import DensityMatrix3, DynamicsConfig, evolve
from .errors import FitFailedError, IntegrationDivergedError, PiezoQubitError
from .experiment_sim import Scenario, bias_average, demo_scenario, map_header, map_to_csv, pe_map, profile_to_csv
from .fixtures import SAMPLES, qubit_table, recover_sample, sample_couplings, sample_qubit
from .loss_budget import LossModel, load_config, loss_budget
from .quantization import QubitParams, quantize_circuit, synthesize_circuit
from .spectrum_fit import SpectrumData, analyze_spectrum

COMMANDS = ("sweep", "quantize", "decay", "pemap", "fit", "budget", "reproduce")

EXIT_OK = 0
EXIT_USAGE = 1
EXIT_NUMERICAL = 2


class UsageError(Exception):
    pass


class _Parser(argparse.ArgumentParser):
    def error(self, message):
        raise UsageError(message)


@dataclass
class RunManifest:
    command: str
    input_paths: list
    output_dir: str
    seed: int
    tool_version: str
    outputs: list = field(default_factory=list)
    exit_code: int = 0
    timestamp: str = ""


class Output:
    """Writes headed output files into the run directory and tracks them."""

    def __init__(self, out_dir: Path, fmt: str, argv: list[str], seed: int):
        self.dir = out_dir
        self.format = fmt
        self.seed = seed
        self.command_line = shlex.join(["piezoqubit", *argv])
        self.written: list[str] = []

    @property
    def header(self) -> dict:
        return {"tool_version": __version__, "command": self.command_line, "seed": self.seed}

    def comments(self) -> list[str]:
        return [f"piezoqubit {__version__}", f"command: {self.command_line}", f"seed: {self.seed}"]

    def write_text(self, name: str, text: str):
        path = self.dir / name
        path.write_text(text)
        self.written.append(name)

    def write_json(self, name: str, payload: dict):
        self.write_text(name, json.dumps({"header": self.header, **payload}, indent=1, allow_nan=True) + "\n")

    def write_table(self, stem: str, rows: list[dict], extra: dict | None = None):
        """Rows as ``stem.csv`` or ``stem.json`` according to ``--format``."""
        if self.format == "json":
            self.write_json(f"{stem}.json", {**(extra or {}), "rows": rows})
            return
        buf = io.StringIO()
        for line in self.comments():
            buf.write(f"# {line}\n")
        if rows:
            w = csv.DictWriter(buf, fieldnames=list(rows[0]), lineterminator="\n")
            w.writeheader()
            for r in rows:
                w.writerow({k: _csv_value(v) for k, v in r.items()})
        self.write_text(f"{stem}.csv", buf.getvalue())


def _csv_value(v):
    if v is None:
        return ""
    if isinstance(v, float):
        return repr(v)
    return v


def _read(path: str) -> str:
    try:
        return Path(path).read_text()
    except OSError as exc:
        raise UsageError(f"cannot read {path}: {exc.strerror or exc}") from exc


def _qubit(args) -> QubitParams:
    t = qubit_table()[args.sample]
    return QubitParams(t["ec_hz"], t["ej_max_hz"], flux=args.flux)


# ------------------------------------------------------------------ commands


def cmd_sweep(args, out: Output, manifest: RunManifest) -> int:
    if args.circuit:
        manifest.input_paths.append(args.circuit)
        circuit = circuit_from_json(_read(args.circuit))
    else:
        q = sample_qubit(args.sample)
        circuit = synthesize_circuit(sample_couplings(args.sample), q.omega, q.total_capacitance)
    if not (args.fmin > 0 and args.fmax > args.fmin and args.npoints >= 2):
        raise UsageError("need 0 < --fmin < --fmax and --npoints >= 2")
    grid = TWO_PI * np.linspace(args.fmin, args.fmax, args.npoints)
    sweep = sweep_admittance(circuit, grid)
    if out.format == "json":
        out.write_json("sweep.json", {"circuit": json.loads(circuit_to_json(circuit)), "rows": sweep_to_rows(sweep)})
    else:
        out.write_text("sweep.csv", sweep_to_csv(sweep, out.comments()))
    return EXIT_OK


def cmd_quantize(args, out: Output, manifest: RunManifest) -> int:
    qubit = _qubit(args)
    if args.circuit:
        manifest.input_paths.append(args.circuit)
        circuit = circuit_from_json(_read(args.circuit))
        qubit = QubitParams(
            qubit.charging_energy, qubit.max_josephson_energy, qubit.flux, shunt_capacitance=circuit.static_capacitance
        )
    else:
        q0 = sample_qubit(args.sample)
        circuit = synthesize_circuit(sample_couplings(args.sample), q0.omega, q0.total_capacitance)
    cs = quantize_circuit(circuit, qubit)
    rows = [
        {
            "f_m_hz": m.mode_frequency / TWO_PI,
            "g_hz": m.coupling / TWO_PI,
            "kappa_hz": m.linewidth / TWO_PI,
            "K2": m.em_coupling_coefficient,
        }
        for m in cs.modes
    ]
    warnings = sorted({w for m in cs.modes for w in m.warnings} | set(qubit.warnings))
    extra = {"fq_hz": qubit.omega / TWO_PI, "c_q_f": qubit.total_capacitance, "warnings": warnings}
    out.write_table("quantize", rows, extra)
    for w in warnings:
        print(f"warning: {w}", file=sys.stderr)
    return EXIT_OK


def cmd_decay(args, out: Output, manifest: RunManifest) -> int:
    cfg = DynamicsConfig(
        TWO_PI * args.detuning,
        TWO_PI * args.g,
        nominal_decay=args.gamma1_0,
        pure_dephasing=args.gamma_phi,
        mode_linewidth=TWO_PI * args.kappa,
        total_time=1.0,
    )
    predicted = cfg.predicted_rate()
    t_total = args.time if args.time else 4.0 / predicted
    cfg = DynamicsConfig(
        cfg.detuning, cfg.coupling, cfg.nominal_decay, cfg.pure_dephasing, cfg.mode_linewidth, total_time=t_total
    )
    traj = evolve(DensityMatrix3.basis(2), cfg)
    fit = traj.decay_rate()
    summary = {
        "rate_ode_per_s": fit.rate,
        "rate_predicted_per_s": predicted,
        "relative_difference": fit.rate / predicted - 1.0,
        "time_step_s": traj.time_step,
        "n_steps": traj.n_steps,
        "backend": traj.backend,
    }
    if out.format == "json":
        rows = [
            {"t_s": float(t), "rho22": float(a), "rho33": float(b), "rho11": float(c)}
            for t, a, b, c in zip(traj.times, traj.rho22, traj.rho33, traj.rho11)
        ]
        out.write_json("decay.json", {"summary": summary, "rows": rows})
    else:
        notes = out.comments() + [f"{k}: {v!r}" for k, v in summary.items()]
        out.write_text("decay.csv", traj.to_csv(notes))
    return EXIT_OK


def cmd_pemap(args, out: Output, manifest: RunManifest) -> int:
    if args.config:
        manifest.input_paths.append(args.config)
        sc = Scenario.from_json(_read(args.config))
    else:
        sc = demo_scenario()
    plan = sc.plan
    if args.shots is not None:
        plan = type(plan)(plan.qubit_frequency_grid, plan.bias_grid, plan.delay, args.shots)
    pe = pe_map(plan, sc.saw, sc.tls, sc.qubit, out.seed)
    prof = bias_average(pe)
    meta = map_header(plan, sc.saw, sc.tls, sc.qubit, out.seed)
    if out.format == "json":
        out.write_json("pemap.json", {"meta": meta, "fq_hz": plan.qubit_frequency_grid.tolist(),
                                      "v_bias": plan.bias_grid.tolist(), "pe": pe.tolist()})
        out.write_json("pemap_avg.json", {"fq_hz": plan.qubit_frequency_grid.tolist(), "pe_avg": prof.tolist()})
    else:
        out.write_text("pemap.csv", map_to_csv(plan, pe, out.comments()))
        out.write_json("pemap_header.json", {"meta": meta})
        out.write_text("pemap_avg.csv", profile_to_csv(plan.qubit_frequency_grid, prof, out.comments()))
    return EXIT_OK


def cmd_fit(args, out: Output, manifest: RunManifest) -> int:
    manifest.input_paths.append(args.spectrum)
    data = SpectrumData.from_csv(_read(args.spectrum))
    if args.gamma2q < 0:
        raise UsageError("--gamma2q must be non-negative")
    res = analyze_spectrum(
        data,
        args.gamma2q,
        min_prominence=args.min_prominence,
        smooth=args.smooth,
        noise_sigmas=args.noise_sigmas,
        fill_comb=not args.no_fill,
        weighted=args.weighted,
    )
    out.write_json("fit.json", {"result": res.to_dict()})
    f = np.linspace(data.frequencies[0], data.frequencies[-1], max(len(data), 2))
    out.write_text("fit_curve.csv", res.curve_csv(f, out.comments()))
    if not res.converged:
        print("error: fit did not converge", file=sys.stderr)
        return EXIT_NUMERICAL
    return EXIT_OK


def cmd_budget(args, out: Output, manifest: RunManifest) -> int:
    if args.config:
        manifest.input_paths.append(args.config)
        model = load_config(_read(args.config))
    else:
        model = LossModel()
    if not (args.fmin > 0 and args.fmax > args.fmin):
        raise UsageError(f"need 0 < --fmin < --fmax (got {args.fmin:g}, {args.fmax:g})")
    if args.npoints < 2:
        raise UsageError("--npoints must be at least 2")
    b = loss_budget(model, args.fmin, args.fmax, args.npoints)
    if out.format == "json":
        out.write_json("budget.json", {"model": asdict(model), **b.to_dict()})
    else:
        out.write_text("budget.csv", b.to_csv(out.comments() + [f"note: {a}" for a in b.assumptions]))
    report = {
        "model": asdict(model),
        "crossover_hz": b.crossover,
        "crossover_in_8_13_ghz": b.crossover is not None and 8e9 <= b.crossover <= 13e9,
        "assumptions": list(b.assumptions),
    }
    out.write_json("crossover.json", report)
    if b.crossover is None:
        print("crossover: none (piezo exponent does not exceed TLS exponent)")
    else:
        print(f"crossover: {b.crossover / 1e9:.4f} GHz")
    return EXIT_OK


def cmd_reproduce(args, out: Output, manifest: RunManifest) -> int:
    samples = SAMPLES if args.sample == "all" else (args.sample,)
    summary = {}
    all_converged = True
    for s in samples:
        rep = recover_sample(s, out.seed, args.replicates)
        out.write_table(f"reproduce_{s}", rep.table(), {"sample": s})
        summary[s] = {
            "n_modes": rep.n_modes,
            "replicates": args.replicates,
            "median_error": rep.median_error,
            "worst_error": rep.worst_error,
            "criteria": rep.criteria(),
            "converged": rep.all_converged,
        }
        all_converged &= rep.all_converged
        verdict = " ".join(f"{k}={'PASS' if v else 'FAIL'}" for k, v in rep.criteria().items())
        print(f"sample {s}: {rep.n_modes} modes, {verdict}")
    out.write_json("reproduce_summary.json", {"samples": summary})
    return EXIT_OK if all_converged else EXIT_NUMERICAL


HANDLERS = {
    "sweep": cmd_sweep,
    "quantize": cmd_quantize,
    "decay": cmd_decay,
    "pemap": cmd_pemap,
    "fit": cmd_fit,
    "budget": cmd_budget,
    "reproduce": cmd_reproduce,
}


def build_parser() -> argparse.ArgumentParser:
    common = _Parser(add_help=False)
    common.add_argument("--seed", type=int, default=argparse.SUPPRESS, help="random seed (default 0)")
    common.add_argument("--out", default=argparse.SUPPRESS, help="output directory (default .)")
    common.add_argument("--format", choices=("csv", "json"), default=argparse.SUPPRESS, help="table format")

    p = _Parser(prog="piezoqubit", description="Interface-piezoelectric loss toolkit.", parents=[common])
    p.add_argument("--version", action="version", version=f"piezoqubit {__version__}")
    sub = p.add_subparsers(dest="command", required=True, parser_class=_Parser)

    s = sub.add_parser("sweep", parents=[common], help="admittance sweep of a BVD circuit")
    s.add_argument("--circuit", help="circuit JSON; default: synthesized from a sample's couplings")
    s.add_argument("--sample", choices=SAMPLES, default="A")
    s.add_argument("--fmin", type=float, default=3.10e9, help="Hz")
    s.add_argument("--fmax", type=float, default=3.20e9, help="Hz")
    s.add_argument("--npoints", type=int, default=1001)

    s = sub.add_parser("quantize", parents=[common], help="quantize a BVD circuit against a transmon")
    s.add_argument("--circuit", help="circuit JSON; default: synthesized from a sample's couplings")
    s.add_argument("--sample", choices=SAMPLES, default="A", help="transmon parameters")
    s.add_argument("--flux", type=float, default=0.0, help="flux in units of the flux quantum")

    s = sub.add_parser("decay", parents=[common], help="master-equation decay of an excited qubit")
    s.add_argument("--g", type=float, default=100e3, help="coupling g/2pi, Hz")
    s.add_argument("--kappa", type=float, default=2.25e6, help="mode linewidth kappa/2pi, Hz")
    s.add_argument("--detuning", type=float, default=0.0, help="(w_q - w_m)/2pi, Hz")
    s.add_argument("--gamma1-0", type=float, default=0.0, help="background qubit decay, 1/s")
    s.add_argument("--gamma-phi", type=float, default=0.0, help="pure dephasing, 1/s")
    s.add_argument("--time", type=float, default=None, help="total time, s (default 4/Gamma_pred)")

    s = sub.add_parser("pemap", parents=[common], help="synthetic p_e(f_q, V_bias) map and bias average")
    s.add_argument("--config", help="scenario JSON; default: built-in 11-mode, 5-TLS scenario")
    s.add_argument("--shots", type=int, default=None, help="shots per point (default: noise-free)")

    s = sub.add_parser("fit", parents=[common], help="fit a T1 spectrum CSV (fq_hz,t1_s[,t1_err_s])")
    s.add_argument("spectrum", help="input CSV")
    s.add_argument("--gamma2q", type=float, required=True, help="qubit decoherence rate 1/T2*, 1/s")
    s.add_argument("--smooth", type=int, default=61, help="detection smoothing window, points")
    s.add_argument("--noise-sigmas", type=float, default=5.0, help="detection threshold in noise sigmas")
    s.add_argument("--min-prominence", type=float, default=0.0, help="detection threshold, fraction of range")
    s.add_argument("--no-fill", action="store_true", help="do not fill gaps in the detected mode comb")
    s.add_argument("--weighted", action="store_true", help="weight by t1_err_s when present")

    s = sub.add_parser("budget", parents=[common], help="piezo/TLS loss budget and crossover")
    s.add_argument("--config", help="key = value model file; default: built-in anchors")
    s.add_argument("--fmin", type=float, default=1e9, help="Hz")
    s.add_argument("--fmax", type=float, default=30e9, help="Hz")
    s.add_argument("--npoints", type=int, default=30)

    s = sub.add_parser("reproduce", parents=[common], help="round-trip the bundled sample tables")
    s.add_argument("--sample", choices=(*SAMPLES, "all"), default="all")
    s.add_argument("--replicates", type=int, default=20)
    return p


def main(argv: list[str] | None = None) -> int:
    argv = list(sys.argv[1:] if argv is None else argv)
    parser = build_parser()
    try:
        args = parser.parse_args(argv)
    except UsageError as exc:
        parser.print_usage(sys.stderr)
        print(f"error: {exc}", file=sys.stderr)
        return EXIT_USAGE
    seed = getattr(args, "seed", 0)
    out_dir = Path(getattr(args, "out", "."))
    fmt = getattr(args, "format", "csv")
    manifest = RunManifest(args.command, [], str(out_dir), seed, __version__)
    try:
        out_dir.mkdir(parents=True, exist_ok=True)
        if not os.access(out_dir, os.W_OK):
            raise UsageError(f"output directory {out_dir} is not writable")
        out = Output(out_dir, fmt, argv, seed)
        code = HANDLERS[args.command](args, out, manifest)
    except UsageError as exc:
        print(f"error: {exc}", file=sys.stderr)
        return EXIT_USAGE
    except (IntegrationDivergedError, FitFailedError) as exc:
        print(f"error: {exc}", file=sys.stderr)
        return EXIT_NUMERICAL
    except (PiezoQubitError, OSError) as exc:
        print(f"error: {exc}", file=sys.stderr)
        return EXIT_USAGE
    manifest.outputs = out.written
    manifest.exit_code = code
    manifest.timestamp = datetime.datetime.now(datetime.timezone.utc).isoformat(timespec="seconds")
    (out_dir / "manifest.json").write_text(json.dumps(asdict(manifest), indent=1) + "\n")
    return code


if __name__ == "__main__":
    sys.exit(main())
