"""Command-line front end.

Exit codes: 0 success, 1 verification failure, 2 usage or configuration error.
"""
import argparse
import logging
import os
import sys as _sys
import time
from concurrent.futures import ThreadPoolExecutor
from pathlib import Path

import numpy as np

from . import __version__
from .config import axes, build_system, load_config, parse_config
from .cumulant import field_exact, field_rdm, linear_response
from .errors import ConfigError, ResponseError
from .output import spectrum_image, write_csv, write_json, write_pgm, write_sidecar
from .propagator import r2_via_master
from .spectra import absorption, compare, crop, lineshape_metrics, spectrum2d
from .units import cm_to_rad_fs, rad_fs_to_cm
from .verify import run_checks

log = logging.getLogger("nlresponse")

EXIT_OK, EXIT_FAIL, EXIT_USAGE = 0, 1, 2

UNITS = {
    "time": "fs",
    "frequency_file": "cm^-1",
    "frequency_internal": "rad/fs",
    "response": "|d|^4 (dipole units^4)",
}


class Run:
    """Validated config plus everything derived from it once."""

    def __init__(self, cfg, out_dir, jobs):
        self.cfg = cfg
        self.sys, self.pathway = build_system(cfg)
        self.tau_axis, self.t_axis = axes(cfg)
        self.out = Path(out_dir)
        self.jobs = max(1, int(jobs))
        self.out.mkdir(parents=True, exist_ok=True)

    def meta(self, **extra):
        base = {
            "code_version": __version__,
            "config_hash": self.cfg.digest(),
            "parameters": self.cfg.canonical(),
            "units": UNITS,
        }
        base.update(extra)
        return base

    def field(self, provenance, T):
        args = (self.sys, self.pathway, self.tau_axis, self.t_axis, T)
        if provenance == "exact":
            return field_exact(*args)
        if provenance == "rdm":
            return field_rdm(*args)
        return r2_via_master(*args, step=self.cfg.run.rk_step_fs)

    def map_jobs(self, fn, items):
        if self.jobs == 1 or len(items) <= 1:
            return [fn(x) for x in items]
        with ThreadPoolExecutor(max_workers=self.jobs) as pool:
            return list(pool.map(fn, items))

    def write_effective_config(self):
        (self.out / "effective_config.yaml").write_text(self.cfg.dump_yaml())


def _tag(T):
    return f"T{T:g}fs"


def _pathway_meta(pw):
    return {"i": pw.i + 1, "j": pw.j + 1}


def cmd_linear(run):
    t = run.t_axis
    resp = linear_response(run.sys, t)
    path = run.out / "linear_response.csv"
    write_csv(path, ["t_fs", "re", "im"], [t, resp.real, resp.imag])
    write_sidecar(path, run.meta(kind="linear_response", columns={"t_fs": "fs", "re": "1", "im": "1"}))

    spec = absorption(run.sys, t, window=run.cfg.run.window)
    path = run.out / "absorption.csv"
    write_csv(path, ["omega_cm", "intensity"], [spec.omega_cm, spec.values])
    write_sidecar(
        path,
        run.meta(
            kind="absorption",
            window=run.cfg.run.window,
            peak_omega_cm=float(rad_fs_to_cm(spec.peak_omega)),
            columns={"omega_cm": "cm^-1", "intensity": "fs"},
        ),
    )
    return EXIT_OK


def _write_field(run, field):
    path = run.out / f"response_{field.provenance}_{_tag(field.T)}.csv"
    tau = np.repeat(field.tau_axis, field.t_axis.size)
    t = np.tile(field.t_axis, field.tau_axis.size)
    v = field.values.ravel()
    write_csv(path, ["tau_fs", "t_fs", "re", "im"], [tau, t, v.real, v.imag])
    write_sidecar(
        path,
        run.meta(
            kind="response_field",
            provenance=field.provenance,
            T_fs=field.T,
            pathway=_pathway_meta(field.pathway),
            grid={"tau": [float(field.tau_axis[0]), float(field.tau_axis[-1]), int(field.tau_axis.size)],
                  "t": [float(field.t_axis[0]), float(field.t_axis[-1]), int(field.t_axis.size)]},
        ),
    )
    return path


def cmd_response(run, provenance):
    fields = run.map_jobs(lambda T: run.field(provenance, T), run.cfg.grids.T_fs)
    for f in fields:
        _write_field(run, f)
    return EXIT_OK


def _spectrum(run, provenance, T):
    f = run.field(provenance, T)
    r = run.cfg.run
    return spectrum2d(f, window=r.window, pad=r.pad_factor, part=r.spectrum_part)


def _metrics(spec):
    if not np.any(spec.values):
        return {
            "peak_omega_tau": 0.0, "peak_omega_t": 0.0, "peak_amplitude": 0.0, "ellipticity": 0.0,
            "diagonal_width": 0.0, "antidiagonal_width": 0.0, "note": "empty spectrum",
        }
    try:
        return lineshape_metrics(spec).as_dict()
    except ResponseError as exc:
        return {"error": str(exc)}


def cmd_spectrum2d(run):
    jobs = [(p, T) for T in run.cfg.grids.T_fs for p in run.cfg.run.provenances]
    spectra = run.map_jobs(lambda job: _spectrum(run, *job), jobs)
    formats = set(run.cfg.run.formats)
    half = run.cfg.run.crop_cm
    for (prov, T), full in zip(jobs, spectra):
        metrics = _metrics(full)
        spec = full if half is None else crop(full, run.sys.frame, cm_to_rad_fs(half))
        stem = f"spectrum2d_{prov}_{_tag(T)}"
        common = dict(provenance=prov, T_fs=T, pathway=_pathway_meta(run.pathway),
                      window=run.cfg.run.window, part=run.cfg.run.spectrum_part, crop_cm=half)
        if "csv" in formats:
            path = run.out / f"{stem}.csv"
            w1 = np.repeat(rad_fs_to_cm(spec.omega_tau_axis), spec.omega_t_axis.size)
            w3 = np.tile(rad_fs_to_cm(spec.omega_t_axis), spec.omega_tau_axis.size)
            write_csv(path, ["omega_tau_cm", "omega_t_cm", "value"], [w1, w3, spec.values.ravel()])
            write_sidecar(path, run.meta(kind="spectrum2d", **common))
        if "pgm" in formats:
            path = run.out / f"{stem}.pgm"
            vmin, vmax = write_pgm(path, spectrum_image(spec.values))
            write_sidecar(
                path,
                run.meta(
                    kind="spectrum2d_image",
                    mapping="pixel = round(255 * (value - min) / (max - min)); constant map -> 0",
                    orientation="rows: omega_t descending; columns: omega_tau ascending",
                    value_min=vmin,
                    value_max=vmax,
                    omega_tau_cm=[float(rad_fs_to_cm(spec.omega_tau_axis[0])), float(rad_fs_to_cm(spec.omega_tau_axis[-1]))],
                    omega_t_cm=[float(rad_fs_to_cm(spec.omega_t_axis[0])), float(rad_fs_to_cm(spec.omega_t_axis[-1]))],
                    **common,
                ),
            )
        if "json" in formats:
            write_json(run.out / f"metrics_{prov}_{_tag(T)}.json", run.meta(kind="lineshape_metrics", metrics=metrics, **common))
    return EXIT_OK


def cmd_compare(run):
    Ts = run.cfg.grids.T_fs
    exact = run.map_jobs(lambda T: _spectrum(run, "exact", T), Ts)
    rdm = run.map_jobs(lambda T: _spectrum(run, "rdm", T), Ts)
    per_T = [dict(T_fs=T, **compare(e, r)) for T, e, r in zip(Ts, exact, rdm)]
    series = [lineshape_metrics(e).ellipticity for e in exact]
    report = run.meta(
        kind="compare",
        exact_vs_rdm=per_T,
        exact_ellipticity_vs_T={"T_fs": list(Ts), "ellipticity": series},
        exact_ellipticity_decreasing=bool(all(b < a for a, b in zip(series, series[1:]))),
    )
    write_json(run.out / "compare_report.json", report)
    return EXIT_OK


def cmd_verify(run):
    t0 = time.perf_counter()
    records = run_checks(run.cfg, run.sys, run.pathway)
    passed = all(r.passed for r in records)
    report = run.meta(
        kind="verification_report",
        passed=passed,
        checks=[r.as_dict() for r in records],
        runtime_s=time.perf_counter() - t0,
    )
    write_json(run.out / "verification_report.json", report)
    for r in records:
        status = "PASS" if r.passed else "FAIL"
        print(f"{status} {r.name}: max_abs={r.max_abs:.3e} max_rel={r.max_rel:.3e} tol={r.tolerance:.3e} {r.note}")
    return EXIT_OK if passed else EXIT_FAIL


def build_parser():
    common = argparse.ArgumentParser(add_help=False)
    common.add_argument("--config", required=True, metavar="PATH", help="experiment YAML file")
    common.add_argument("--out", metavar="DIR", help="output directory (overrides run.output_dir)")
    common.add_argument("--jobs", type=int, default=os.cpu_count() or 1, metavar="N", help="worker threads")
    common.add_argument("--window", choices=["none", "cos2"], help="apodization (overrides run.window)")
    common.add_argument("--rk-step", type=float, metavar="FS", help="RK4 step in fs (overrides run.rk_step_fs)")
    common.add_argument("-v", "--verbose", action="store_true")

    parser = argparse.ArgumentParser(prog="nlresponse", description=__doc__.splitlines()[0])
    parser.add_argument("--version", action="version", version=__version__)
    sub = parser.add_subparsers(dest="command", required=True)
    sub.add_parser("linear", parents=[common], help="linear response and absorption spectrum")
    p = sub.add_parser("response", parents=[common], help="R2 response fields per waiting time")
    p.add_argument("--provenance", choices=["exact", "rdm", "propagated"], default="exact")
    sub.add_parser("spectrum2d", parents=[common], help="2D spectra, heatmaps and lineshape metrics")
    sub.add_parser("verify", parents=[common], help="oracle checks; exit 1 on any failure")
    sub.add_parser("compare", parents=[common], help="exact vs RDM lineshape comparison")
    return parser


def _apply_overrides(cfg, args):
    data = cfg.canonical()
    if args.out is not None:
        data["run"]["output_dir"] = args.out
    if args.window is not None:
        data["run"]["window"] = args.window
    if args.rk_step is not None:
        data["run"]["rk_step_fs"] = args.rk_step
    return parse_config(data)


def main(argv=None):
    args = build_parser().parse_args(argv)
    logging.basicConfig(level=logging.INFO if args.verbose else logging.WARNING, format="%(message)s")
    try:
        cfg = _apply_overrides(load_config(args.config), args)
        run = Run(cfg, cfg.run.output_dir, args.jobs)
        run.write_effective_config()
        log.info("config %s -> %s", args.config, run.out)
        if args.command == "linear":
            return cmd_linear(run)
        if args.command == "response":
            return cmd_response(run, args.provenance)
        if args.command == "spectrum2d":
            return cmd_spectrum2d(run)
        if args.command == "compare":
            return cmd_compare(run)
        return cmd_verify(run)
    except (ConfigError, ResponseError, OSError) as exc:
        print(f"error: {exc}", file=_sys.stderr)
        return EXIT_USAGE


if __name__ == "__main__":  # pragma: no cover
    _sys.exit(main())
