"""Command-line scenario runner and figure-data generator.

    thermoprobe simulate    scenario.json [--outdir DIR] [--seed N] [--quiet]
    thermoprobe spectrum    scenario.json
    thermoprobe thermometry scenario.json
    thermoprobe reproduce   fig2|fig3|fig4|fig5

Exit codes: 0 ok, 2 invalid config, 3 physics error, 4 numerical failure.
The default output directory can be set with THERMOPROBE_OUTDIR.
"""

from __future__ import annotations

import argparse
import json
import logging
import math
import os
import re
import sys
from dataclasses import dataclass, field
from importlib import resources
from pathlib import Path

import jsonschema
import numpy as np

from .bath import BathMoments, ClusterSpec, Dicke, ExplicitCluster, HECTwoQubit, spec_moments
from .dynamics import (
    Collision,
    LindbladGenerator,
    ProbeParams,
    Rates,
    Trajectory,
    apparent_temperature,
    collision_trajectory,
    default_n_max,
    evolve,
    rates,
    steady_state,
    thermalization_time,
    truncation_monitor,
)
from .errors import NumericalError, PhysicsError
from .spectra import (
    Spectrum,
    bandwidth,
    ew_longtime,
    lorentzian_fit,
    spectral_intensity,
    wk_grid,
    wk_spectrum,
    write_spectrum,
)
from .thermometry import cramer_rao, fisher_curve, qfi_temperature

log = logging.getLogger("thermoprobe")

OUTDIR_ENV = "THERMOPROBE_OUTDIR"
EXIT_OK, EXIT_CONFIG, EXIT_PHYSICS, EXIT_NUMERIC = 0, 2, 3, 4
FIGURES = ("fig2", "fig3", "fig4", "fig5")


class ConfigError(Exception):
    """Invalid scenario file; the message carries line/field diagnostics."""


def load_schema(name: str) -> dict:
    text = resources.files("thermoprobe").joinpath(f"schemas/{name}.schema.json").read_text()
    return json.loads(text)


def _fmt(x) -> str:
    return f"{float(x):.17g}"


def write_csv(path: Path, header: list[str], rows) -> Path:
    """CSV with '.' decimals and 17 significant digits, independent of locale."""
    lines = [",".join(header)]
    lines += [",".join(_fmt(v) for v in row) for row in rows]
    path.write_text("\n".join(lines) + "\n")
    return path


# --- config ------------------------------------------------------------------

@dataclass(frozen=True)
class RunConfig:
    mode: str = "generator"
    t_final: float | None = None
    samples: int = 101
    seed: int = 0
    tol: float = 1e-10
    n_traj: int = 200
    dt: float | None = None
    initial: str = "ground"


@dataclass(frozen=True)
class OutputConfig:
    state_series: bool = False
    spectrum: bool = False
    thermometry: bool = False
    nu: int = 1
    formats: tuple[str, ...] = ("csv", "json")


@dataclass(frozen=True)
class ScenarioConfig:
    probe: ProbeParams
    cluster: ClusterSpec
    run: RunConfig = field(default_factory=RunConfig)
    outputs: OutputConfig = field(default_factory=OutputConfig)


def _line_of(text: str, path) -> int | None:
    keys = [k for k in path if isinstance(k, str)]
    if not keys or not text:
        return None
    needle = f'"{keys[-1]}"'
    for i, line in enumerate(text.splitlines(), 1):
        if needle in line:
            return i
    return None


def _where(text: str, path) -> str:
    name = ".".join(str(k) for k in path) or "<root>"
    line = _line_of(text, path)
    return f"field '{name}'" + (f" (line {line})" if line else "")


def _complex(v) -> complex:
    return complex(v[0], v[1]) if isinstance(v, list) else complex(v)


def _cluster(d: dict) -> ClusterSpec:
    if d["type"] == "hec":
        zeta = _complex(d.get("zeta", 0.0))
        return HECTwoQubit(d["phi"], zeta.real if zeta.imag == 0 else zeta)
    if d["type"] == "dicke":
        return Dicke(d["n"], d["k"])
    rho = np.array(d["rho_re"], dtype=float) + 1j * np.array(d.get("rho_im", 0.0))
    return ExplicitCluster(rho, d["n"])


def parse_config(data: dict, text: str = "") -> ScenarioConfig:
    """Validate a decoded scenario against the schema and the physics checks."""
    validator = jsonschema.Draft202012Validator(load_schema("config"))
    errors = sorted(validator.iter_errors(data), key=lambda e: list(e.path))
    if errors:
        msgs = [f"{_where(text, e.path)}: {e.message}" for e in errors]
        raise ConfigError("schema violation: " + "; ".join(msgs))

    section = "probe"
    try:
        pd = dict(data["probe"])
        if "collision" in pd:
            pd["collision"] = Collision(**pd["collision"])
        probe = ProbeParams(**pd)
        section = "cluster"
        cluster = _cluster(data["cluster"])
    except PhysicsError as exc:
        # name the offending key when the library message mentions it
        keys = [k for k in data[section] if re.search(rf"\b{k}\b", str(exc))]
        raise ConfigError(f"{_where(text, [section] + keys[:1])}: {exc}") from exc

    run = RunConfig(**data.get("run", {}))
    if run.mode != "generator" and probe.collision is None:
        raise ConfigError(f"{_where(text, ['run', 'mode'])}: "
                          f"mode {run.mode!r} needs probe.collision")
    if run.initial == "excited" and probe.kind == "cavity":
        raise ConfigError(f"{_where(text, ['run', 'initial'])}: "
                          "'excited' is a qubit initial state")
    out = dict(data.get("outputs", {}))
    if "formats" in out:
        out["formats"] = tuple(out["formats"])
    return ScenarioConfig(probe, cluster, run, OutputConfig(**out))


def load_config(path: str | Path) -> ScenarioConfig:
    path = Path(path)
    try:
        text = path.read_text()
    except OSError as exc:
        raise ConfigError(f"cannot read config: {exc}") from exc
    try:
        data = json.loads(text)
    except json.JSONDecodeError as exc:
        raise ConfigError(f"{path}: line {exc.lineno}, column {exc.colno}: {exc.msg}") from exc
    return parse_config(data, text)


# --- scenario ------------------------------------------------------------------

def _probe_for_run(cfg: ScenarioConfig, r: Rates) -> ProbeParams:
    p = cfg.probe
    if p.kind == "cavity" and p.n_max is None:
        # r.steady raises in the negative-temperature regime
        p = p.replace(n_max=default_n_max(r.steady))
    return p


def _initial_state(kind: str, which: str, r: Rates, dim: int) -> np.ndarray:
    if which == "steady":
        return steady_state(r, dim if kind == "cavity" else None).data
    if which == "mixed":
        return np.eye(dim, dtype=complex) / dim
    # qubit basis is (e, g); the cavity ground state is the vacuum
    level = 1 if kind == "qubit" and which == "ground" else 0
    rho = np.zeros((dim, dim), dtype=complex)
    rho[level, level] = 1.0
    return rho


def simulate(cfg: ScenarioConfig, m: BathMoments, r: Rates, seed: int) -> Trajectory:
    p = _probe_for_run(cfg, r)
    run = cfg.run
    t_final = run.t_final
    if t_final is None:
        t_final = 5.0 * thermalization_time(m, p)
    rho0 = _initial_state(p.kind, run.initial, r, p.dim)
    if run.mode == "generator":
        times = np.linspace(0.0, t_final, run.samples)
        monitor = truncation_monitor() if p.kind == "cavity" else None
        states = evolve(LindbladGenerator(m, p), rho0, times, run.tol, monitor)
        return Trajectory(times, states)
    mode = "averaged" if run.mode == "collision-averaged" else "poisson"
    return collision_trajectory(p, cfg.cluster, rho0, t_final, mode, dt=run.dt,
                                samples=run.samples, seed=seed, n_traj=run.n_traj)


def _series_rows(kind: str, traj: Trajectory):
    if kind == "qubit":
        header = ["t", "rho_ee", "rho_eg_re", "rho_eg_im", "rho_gg"]
        rows = [(t, s[0, 0].real, s[0, 1].real, s[0, 1].imag, s[1, 1].real)
                for t, s in zip(traj.times, traj.states)]
        return header, rows
    d = traj.states.shape[1]
    sq = np.sqrt(np.arange(1, d))
    header = ["t", "n_mean", "a_re", "a_im"]
    rows = []
    for t, s, n in zip(traj.times, traj.states, traj.photons):
        a = np.sum(sq * np.diagonal(s, offset=-1))
        rows.append((t, n, a.real, a.imag))
    return header, rows


def _finite(x):
    return None if x is None or not math.isfinite(x) else float(x)


def run_scenario(cfg: ScenarioConfig, outdir: str | Path, *, series: bool | None = None,
                 spectrum: bool | None = None, thermometry: bool | None = None,
                 seed: int | None = None) -> dict:
    """Run one scenario, write the requested files and ``report.json``; return the report."""
    outdir = Path(outdir)
    outdir.mkdir(parents=True, exist_ok=True)
    o = cfg.outputs
    series = o.state_series if series is None else series
    spectrum = o.spectrum if spectrum is None else spectrum
    thermometry = o.thermometry if thermometry is None else thermometry
    seed = cfg.run.seed if seed is None else seed

    p = cfg.probe
    m = spec_moments(cfg.cluster)
    r = rates(m, p)
    temp = apparent_temperature(r, p.omega)
    gamma = float(bandwidth(m, p))
    steady = r.steady
    files: list[str] = []
    report = {
        "kind": p.kind,
        "T_apparent": {"T": _finite(temp.T), "beta": temp.beta, "inverted": temp.beta < 0},
        "t_therm": _finite(thermalization_time(m, p)),
        "rates": {"heat": r.heat, "cool": r.cool, "steady": steady},
        "Gamma": gamma,
        "intensity": {"steady": steady, "quadrature": None},
        "fit": None,
        "bounds": None,
        "files": files,
    }

    if series:
        traj = simulate(cfg, m, r, seed)
        header, rows = _series_rows(p.kind, traj)
        files.append(write_csv(outdir / "state_series.csv", header, rows).name)
        log.info("wrote %d samples of the probe state", len(rows))

    if spectrum:
        s = wk_spectrum(r, p)
        fit = lorentzian_fit(s)
        report["fit"] = {"center": fit.center, "fwhm": fit.fwhm,
                         "intensity": fit.intensity, "residual_rms": fit.residual_rms}
        report["intensity"]["quadrature"] = spectral_intensity(s, fit)
        if "csv" in o.formats:
            files += [f.name for f in write_spectrum(s, outdir / "spectrum")]
        log.info("spectrum fit: FWHM %.6g, intensity %.6g", fit.fwhm, fit.intensity)

    if thermometry and temp.beta > 0:
        qfi = qfi_temperature(p.kind, temp.T, p.omega)
        est = cramer_rao(qfi, o.nu)
        report["bounds"] = {"qfi": est.qfi, "bound": _finite(est.bound), "nu": est.nu}
    elif thermometry:
        log.warning("no thermal bound: apparent temperature is not positive")

    if "json" in o.formats:
        files.append("report.json")
    jsonschema.validate(report, load_schema("report"))
    if "json" in o.formats:
        (outdir / "report.json").write_text(json.dumps(report, indent=2, sort_keys=True) + "\n")
    return report


# --- figure datasets --------------------------------------------------------------

FIG2_ZETAS = (0.9, 0.5, 0.0)
FIG2_MUS = (0.0, 0.1, 1.0, 3.0)
FIG2_N_ENV = 0.1
FIG3_PARAMS = dict(mu=2.0, dephasing=0.15, n_env=0.1)
FIG3_CASES = ((0.9, math.pi / 4), (0.9, -math.pi / 4), (0.0, math.pi / 4), (0.0, -math.pi / 4))
FIG5_GAMMA_F = 0.2
FIG5_RABI = (2.0, 0.5)


def cavity_temperature_ratio(phi: float, zeta: float, mu: float,
                             n_env: float = FIG2_N_ENV) -> float:
    """``T_c / T_en`` for a cavity probe (kappa = 1) fed by the two-qubit HEC cluster."""
    p = ProbeParams("cavity", decay=1.0, n_env=n_env, mu=mu)
    r = rates(BathMoments.from_hec(phi, zeta), p)
    return math.log1p(1.0 / n_env) / math.log1p(1.0 / r.steady)


def fig2_rows(points: int = 101):
    rows = []
    for zeta in FIG2_ZETAS:
        for mu in FIG2_MUS:
            for phi in np.linspace(-math.pi / 4, math.pi / 4, points):
                hec = zeta * math.sin(phi) * math.cos(phi)
                rows.append((phi, zeta, mu, hec, cavity_temperature_ratio(phi, zeta, mu)))
    return rows


def fig3_spectra(points: int = 2001) -> tuple[np.ndarray, list[tuple[float, float, Spectrum]]]:
    """Qubit WK spectra (gamma = 1, detuning axis) on one grid wide enough for all cases."""
    base = ProbeParams("qubit", omega=1.0, decay=1.0, **FIG3_PARAMS)
    cases = [(z, phi, rates(BathMoments.from_hec(phi, z), base)) for z, phi in FIG3_CASES]
    widest = max(bandwidth(BathMoments.from_hec(phi, z), base) for z, phi, _ in cases)
    grid = wk_grid(base.omega, widest, points=points)
    return grid - base.omega, [(z, phi, wk_spectrum(r, base, grid=grid)) for z, phi, r in cases]


def fig4_rows(points: int = 2951):
    temps = np.linspace(0.05, 3.0, points)
    return list(zip(temps, fisher_curve("qubit", temps), fisher_curve("cavity", temps)))


def fig5_rows(points: int = 1601):
    grid = np.linspace(-4.0, 4.0, points)
    curves = [ew_longtime(grid, FIG5_GAMMA_F, w).values for w in FIG5_RABI]
    return list(zip(grid, *curves))


def reproduce(figure: str, outdir: str | Path) -> list[Path]:
    outdir = Path(outdir)
    outdir.mkdir(parents=True, exist_ok=True)
    if figure == "fig2":
        return [write_csv(outdir / "fig2.csv",
                          ["phi", "zeta", "mu_over_kappa", "hec", "T_ratio"], fig2_rows())]
    if figure == "fig3":
        detuning, cases = fig3_spectra()
        header = ["detuning"] + [f"S_zeta{z:g}_phi{'+' if phi > 0 else '-'}pi4"
                                 for z, phi, _ in cases]
        rows = zip(detuning, *(s.values for _, _, s in cases))
        fits = []
        for z, phi, s in cases:
            fit = lorentzian_fit(s)
            fits.append((z, phi, s.params["fwhm"], fit.fwhm, s.params["intensity"],
                         fit.intensity))
        return [write_csv(outdir / "fig3.csv", header, rows),
                write_csv(outdir / "fig3_fits.csv",
                          ["zeta", "phi", "Gamma", "fwhm_fit", "rho_ee", "intensity_fit"],
                          fits)]
    if figure == "fig4":
        return [write_csv(outdir / "fig4.csv", ["T", "F_qubit", "F_cavity"], fig4_rows())]
    if figure == "fig5":
        header = ["omega"] + [f"S_rabi{w:g}" for w in FIG5_RABI]
        return [write_csv(outdir / "fig5.csv", header, fig5_rows())]
    raise ValueError(f"unknown figure {figure!r}; choose from {', '.join(FIGURES)}")


# --- entry point -----------------------------------------------------------------

def build_parser() -> argparse.ArgumentParser:
    common = argparse.ArgumentParser(add_help=False)
    common.add_argument("--outdir", type=Path,
                        default=Path(os.environ.get(OUTDIR_ENV, "thermoprobe-out")),
                        help=f"output directory (default ${OUTDIR_ENV} or ./thermoprobe-out)")
    common.add_argument("--seed", type=int, default=None,
                        help="override run.seed for Monte-Carlo collisions")
    common.add_argument("--quiet", action="store_true", help="only report errors")

    parser = argparse.ArgumentParser(prog="thermoprobe", description=__doc__.split("\n")[0])
    sub = parser.add_subparsers(dest="command", required=True)
    for name, help_ in (("simulate", "integrate the probe state"),
                        ("spectrum", "stationary spectrum and Lorentzian fit"),
                        ("thermometry", "apparent temperature and Cramer-Rao bound")):
        cmd = sub.add_parser(name, parents=[common], help=help_)
        cmd.add_argument("config", type=Path, help="scenario JSON file")
    rep = sub.add_parser("reproduce", parents=[common], help="write a figure dataset")
    rep.add_argument("figure", choices=FIGURES)
    return parser


def main(argv: list[str] | None = None) -> int:
    args = build_parser().parse_args(argv)
    logging.basicConfig(level=logging.ERROR if args.quiet else logging.INFO,
                        format="%(levelname)s: %(message)s", stream=sys.stderr)
    try:
        if args.command == "reproduce":
            for path in reproduce(args.figure, args.outdir):
                log.info("wrote %s", path)
            return EXIT_OK
        cfg = load_config(args.config)
        flags = {"series": args.command == "simulate" or None,
                 "spectrum": args.command == "spectrum" or None,
                 "thermometry": args.command == "thermometry" or None}
        report = run_scenario(cfg, args.outdir, seed=args.seed, **flags)
        if not args.quiet:
            print(json.dumps(report, indent=2, sort_keys=True))
        return EXIT_OK
    except ConfigError as exc:
        log.error("%s", exc)
        return EXIT_CONFIG
    except PhysicsError as exc:
        log.error("%s", exc)
        return EXIT_PHYSICS
    except NumericalError as exc:
        log.error("%s", exc)
        return EXIT_NUMERIC


if __name__ == "__main__":
    sys.exit(main())
