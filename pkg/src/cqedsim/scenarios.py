"""Config-driven benchmark scenarios: cooling, lattice self-organization, spectra.

Configs are flat JSON with units embedded in field names (omega_R units for
cooling scenarios, hopping-J units for the lattice ones).  Unknown keys are
rejected.  All runs are deterministic; CSV payloads are byte-stable across
repeats.
"""

from __future__ import annotations

import concurrent.futures
import hashlib
import json
import time
from pathlib import Path

import numpy as np
import scipy.linalg
import jsonschema

from . import bosehubbard as bh
from . import cooling as cool
from .lindblad import DensityState, LindbladModel, evolve
from .observables import ObservableSeries, gaussian_ansatz_trajectory, kinetic_energy, kurtosis
from .spaces import MomentumLadder, OperatorMatrix, fock_number, identity, tensor
from .spectral import liouvillian_matrix

__all__ = [
    "ConfigError",
    "load_config",
    "run_scenario",
    "compare_runs",
    "CONFIG_SCHEMA",
]


class ConfigError(ValueError):
    """Invalid scenario configuration; carries the offending field path."""

    def __init__(self, message: str, path: str = ""):
        super().__init__(message)
        self.path = path


_COOLING_PARAMS = {
    "type": "object",
    "additionalProperties": False,
    "required": ["eta_per_wr", "delta_per_wr", "kappa_per_wr"],
    "properties": {
        "eta_per_wr": {"type": "number"},
        "delta_per_wr": {"type": "number"},
        "kappa_per_wr": {"type": "number", "exclusiveMinimum": 0},
        "dispersive_shift_per_wr": {"type": "number"},
        "n_max": {"type": "integer", "minimum": 1},
        "photon_cutoff": {"type": "integer", "minimum": 2},
        "beta_inv_hbar_wr": {"type": "number", "exclusiveMinimum": 0},
    },
}

_SWEEP_PARAMS = {
    **_COOLING_PARAMS,
    "required": ["eta_per_wr", "delta_per_wr", "kappa_per_wr", "sweep_field", "sweep_values"],
    "properties": {
        **_COOLING_PARAMS["properties"],
        "sweep_field": {
            "type": "string",
            "enum": ["eta_per_wr", "delta_per_wr", "kappa_per_wr"],
        },
        "sweep_values": {"type": "array", "items": {"type": "number"}, "minItems": 1},
    },
}

_BH_PARAMS = {
    "type": "object",
    "additionalProperties": False,
    "required": ["sites", "bosons", "u_per_J", "eta_per_J", "delta_per_J", "kappa_per_J"],
    "properties": {
        "sites": {"type": "integer", "minimum": 2},
        "bosons": {"type": "integer", "minimum": 0},
        "u_per_J": {"type": "number"},
        "eta_per_J": {"type": "number"},
        "delta_per_J": {"type": "number"},
        "kappa_per_J": {"type": "number", "exclusiveMinimum": 0},
        "photon_cutoff": {"type": "integer", "minimum": 2},
        "spectrum_photon_cutoff": {"type": "integer", "minimum": 2},
        "n_eigenvalues": {"type": "integer", "minimum": 1},
    },
}

CONFIG_SCHEMA = {
    "type": "object",
    "additionalProperties": False,
    "required": ["scenario", "params"],
    "properties": {
        "scenario": {
            "type": "string",
            "enum": ["cooling", "bosehubbard", "spectrum", "sweep"],
        },
        "tiers": {"type": "array", "items": {"type": "string"}, "minItems": 1},
        "params": {"type": "object"},
        "t_final": {"type": "number", "exclusiveMinimum": 0},
        "n_samples": {"type": "integer", "minimum": 2},
        "tolerances": {
            "type": "object",
            "additionalProperties": False,
            "properties": {
                "rel_tol": {"type": "number", "exclusiveMinimum": 0},
                "abs_tol": {"type": "number", "exclusiveMinimum": 0},
            },
        },
        "output_dir": {"type": "string"},
    },
}

_PARAM_SCHEMAS = {
    "cooling": _COOLING_PARAMS,
    "sweep": _SWEEP_PARAMS,
    "bosehubbard": _BH_PARAMS,
    "spectrum": _BH_PARAMS,
}

_VALID_TIERS = {
    "cooling": ("full", "atom_only", "rate_equation", "gaussian_ansatz"),
    "bosehubbard": ("full", "adiabatic", "diabatic"),
    "spectrum": ("full", "adiabatic", "diabatic"),
    "sweep": ("gaussian_ansatz",),
}

_DEFAULT_TIERS = {
    "cooling": ["full", "atom_only"],
    "bosehubbard": ["full", "adiabatic", "diabatic"],
    "spectrum": ["full", "adiabatic", "diabatic"],
    "sweep": ["gaussian_ansatz"],
}


def load_config(path) -> dict:
    """Read, schema-validate, and default-fill a scenario config."""
    try:
        with open(path) as fh:
            cfg = json.load(fh)
    except json.JSONDecodeError as exc:
        raise ConfigError(f"config is not valid JSON: {exc}") from exc
    try:
        jsonschema.validate(cfg, CONFIG_SCHEMA)
        jsonschema.validate(cfg["params"], _PARAM_SCHEMAS[cfg["scenario"]])
    except jsonschema.ValidationError as exc:
        path_str = "/".join(str(p) for p in exc.absolute_path)
        raise ConfigError(f"config invalid at '{path_str}': {exc.message}", path_str) from exc

    cfg.setdefault("tiers", list(_DEFAULT_TIERS[cfg["scenario"]]))
    valid = _VALID_TIERS[cfg["scenario"]]
    for tier in cfg["tiers"]:
        if tier not in valid:
            raise ConfigError(
                f"tier '{tier}' not valid for scenario '{cfg['scenario']}' "
                f"(choose from {valid})",
                "tiers",
            )
    cfg.setdefault("tolerances", {})
    cfg["tolerances"].setdefault("rel_tol", 1e-8)
    cfg["tolerances"].setdefault("abs_tol", 1e-10)
    return cfg


# ---------------------------------------------------------------------------
# Series I/O
# ---------------------------------------------------------------------------


def _write_series(out_dir: Path, series: ObservableSeries) -> Path:
    path = out_dir / f"{series.name}.csv"
    complex_valued = np.iscomplexobj(series.values) and np.any(
        np.abs(series.values.imag) > 0
    )
    with open(path, "w") as fh:
        if complex_valued:
            fh.write("time,value,value_imag\n")
            for t, v in zip(series.times, series.values):
                fh.write(f"{t:.12e},{v.real:.12e},{v.imag:.12e}\n")
        else:
            fh.write("time,value\n")
            for t, v in zip(series.times, np.real(series.values)):
                fh.write(f"{t:.12e},{v:.12e}\n")
    return path


def _read_series(path: Path):
    data = np.loadtxt(path, delimiter=",", skiprows=1, ndmin=2)
    return data[:, 0], data[:, 1]


def _sha256(path: Path) -> str:
    return hashlib.sha256(path.read_bytes()).hexdigest()


# ---------------------------------------------------------------------------
# Cooling tiers
# ---------------------------------------------------------------------------


def _cooling_params(params: dict) -> cool.CoolingParams:
    ladder = MomentumLadder(n_max=params.get("n_max", 40))
    return cool.CoolingParams(
        eta=params["eta_per_wr"],
        delta=params["delta_per_wr"],
        kappa=params["kappa_per_wr"],
        dispersive_shift=params.get("dispersive_shift_per_wr", 0.0),
        ladder=ladder,
        photon_cutoff=params.get("photon_cutoff", 6),
    )


def _run_cooling_tier(tier, p: cool.CoolingParams, pi0, t_grid, tol):
    series = []
    diag = {}
    lad = p.ladder

    if tier == "gaussian_ansatz":
        coeffs = cool.gaussian_ansatz(p)
        e0 = kinetic_energy(pi0)
        s = gaussian_ansatz_trajectory(coeffs, e0, t_grid)
        s.name = "e_kin_gaussian_ansatz"
        series.append(s)
        diag["gamma_c_per_wr"] = coeffs.gamma_c
        diag["h_hbar_wr2"] = coeffs.h
        diag["e_ss_hbar_wr"] = coeffs.e_ss
        return series, diag

    if tier == "rate_equation":
        pops, leakage = cool.evolve_rate_equation(p, pi0, t_grid)
        e = np.array([kinetic_energy(row) for row in pops])
        k = np.array([kurtosis(row) for row in pops])
        series.append(ObservableSeries("e_kin_rate_equation", t_grid, e, "hbar*omega_R"))
        series.append(ObservableSeries("kurtosis_rate_equation", t_grid, k, "1"))
        diag["boundary_leakage"] = float(leakage)
        return series, diag

    if tier == "atom_only":
        model = cool.build_atom_only_cooling_model(p)
        rho0 = DensityState.from_populations(lad.space, pi0)
        alpha = cool.build_alpha_operator(p)
        traj = evolve(
            model,
            rho0,
            t_grid,
            rel_tol=tol["rel_tol"],
            abs_tol=tol["abs_tol"],
            observables={"photon": alpha.dagger() @ alpha},
            store_states=True,
        )
        pops = np.array([np.real(np.diag(st.entries)) for st in traj.states])
        validity = cool.weak_coupling_validity(p, pi0)
        diag["trace_drift"] = traj.trace_drift
        diag["validity"] = {
            "photon_number": validity.photon_number,
            "coupling_ratio": validity.coupling_ratio,
            "shift_ratio": validity.shift_ratio,
            "timescale_ratio": validity.timescale_ratio,
            "statuses": validity.statuses,
        }
    else:  # full
        model = cool.build_full_cooling_model(p)
        pops_mat = np.diag(np.asarray(pi0, dtype=complex))
        vac = np.zeros((p.photon_cutoff, p.photon_cutoff), dtype=complex)
        vac[0, 0] = 1.0
        rho0 = DensityState(
            OperatorMatrix(model.space, np.kron(pops_mat, vac))
        )
        n_ph = tensor(identity(lad.space), fock_number(p.photon_cutoff, label="photon"))
        traj = evolve(
            model,
            rho0,
            t_grid,
            rel_tol=tol["rel_tol"],
            abs_tol=tol["abs_tol"],
            observables={"photon": n_ph},
            store_states=True,
            rotating_frame=True,
        )
        from .observables import momentum_populations

        pops = np.array([momentum_populations(st) for st in traj.states])
        diag["trace_drift"] = traj.trace_drift

    e = np.array([kinetic_energy(row) for row in pops])
    k = np.array([kurtosis(row) for row in pops])
    boundary = float(np.max(pops[:, 0] + pops[:, -1]))
    diag["boundary_occupation"] = boundary
    series.append(ObservableSeries(f"e_kin_{tier}", t_grid, e, "hbar*omega_R"))
    series.append(ObservableSeries(f"kurtosis_{tier}", t_grid, k, "1"))
    series.append(
        ObservableSeries(
            f"photon_{tier}", t_grid, np.real(traj.observables["photon"]), "1"
        )
    )
    return series, diag


def _run_cooling(cfg: dict, out_dir: Path) -> dict:
    p = _cooling_params(cfg["params"])
    beta_inv = cfg["params"].get("beta_inv_hbar_wr", 20.0)
    pi0 = cool.thermal_populations(p.ladder, beta_inv)
    coeffs = cool.gaussian_ansatz(p)
    t_final = cfg.get("t_final", 5.0 / coeffs.gamma_c)
    n_samples = cfg.get("n_samples", 41)
    t_grid = np.linspace(0.0, t_final, n_samples)
    return _run_tiers(
        cfg["tiers"],
        lambda tier: _run_cooling_tier(tier, p, pi0, t_grid, cfg["tolerances"]),
        out_dir,
    )


# ---------------------------------------------------------------------------
# Lattice (Bose-Hubbard) tiers
# ---------------------------------------------------------------------------


def _bh_params(params: dict, cutoff_key: str = "photon_cutoff") -> bh.BHParams:
    return bh.BHParams(
        sites=params["sites"],
        bosons=params["bosons"],
        u=params["u_per_J"],
        eta=params["eta_per_J"],
        delta=params["delta_per_J"],
        kappa=params["kappa_per_J"],
        photon_cutoff=params.get(cutoff_key, 6 if cutoff_key == "photon_cutoff" else 4),
    )


def _bh_ground_state(p: bh.BHParams) -> np.ndarray:
    _, vecs = np.linalg.eigh(bh.build_bh_hamiltonian(p).entries)
    return vecs[:, 0]


def _run_bh_tier(tier, p: bh.BHParams, t_grid, tol):
    theta = bh.build_theta_bh(p)
    theta_sq = theta @ theta
    ground = _bh_ground_state(p)
    diag = {}

    if tier == "full":
        model = bh.build_full_bh_model(p)
        vac = np.zeros(p.photon_cutoff, dtype=complex)
        vac[0] = 1.0
        rho0 = DensityState.pure(model.space, np.kron(ground, vac))
        n_ph = fock_number(p.photon_cutoff, label="photon")
        obs = {
            "theta_sq": tensor(theta_sq, identity(n_ph.space)),
            "photon": tensor(identity(p.basis.space), n_ph),
        }
    else:
        model = (
            bh.build_adiabatic_bh_model(p)
            if tier == "adiabatic"
            else bh.build_diabatic_bh_model(p)
        )
        rho0 = DensityState.pure(p.basis.space, ground)
        alpha = (
            bh.build_alpha0_bh(p)
            if tier == "adiabatic"
            else bh.build_alpha0_bh(p) + bh.build_alpha1_bh(p)
        )
        obs = {"theta_sq": theta_sq, "photon": alpha.dagger() @ alpha}

    traj = evolve(
        model,
        rho0,
        t_grid,
        rel_tol=tol["rel_tol"],
        abs_tol=tol["abs_tol"],
        observables=obs,
        store_states=False,
    )
    diag["trace_drift"] = traj.trace_drift
    series = [
        ObservableSeries(
            f"theta_sq_{tier}", t_grid, np.real(traj.observables["theta_sq"]), "1"
        ),
        ObservableSeries(
            f"photon_{tier}", t_grid, np.real(traj.observables["photon"]), "1"
        ),
    ]
    return series, diag


def _run_bosehubbard(cfg: dict, out_dir: Path) -> dict:
    p = _bh_params(cfg["params"])
    rep = bh.epsilon_report(p)
    gamma = rep.gamma_heat
    t_final = cfg.get("t_final", 2.0 / gamma if gamma > 0 else 10.0)
    n_samples = cfg.get("n_samples", 101)
    t_grid = np.linspace(0.0, t_final, n_samples)
    result = _run_tiers(
        cfg["tiers"],
        lambda tier: _run_bh_tier(tier, p, t_grid, cfg["tolerances"]),
        out_dir,
    )
    result["validity"] = {
        "eps2": rep.eps2,
        "eps_fig3": rep.eps_fig3,
        "gamma_heat_per_J": rep.gamma_heat,
    }
    return result


# ---------------------------------------------------------------------------
# Liouvillian spectra
# ---------------------------------------------------------------------------


def _slowest(eigs: np.ndarray, n: int) -> np.ndarray:
    order = np.argsort(-eigs.real)
    return eigs[order][:n]


def _spectrum_eigs(model: LindbladModel) -> np.ndarray:
    return scipy.linalg.eigvals(liouvillian_matrix(model))


def _run_spectrum(cfg: dict, out_dir: Path) -> dict:
    params = cfg["params"]
    n_eig = params.get("n_eigenvalues", 10)
    spectra = {}
    convergence = {}
    for tier in cfg["tiers"]:
        if tier == "full":
            p = _bh_params(params, cutoff_key="spectrum_photon_cutoff")
            eigs = _spectrum_eigs(bh.build_full_bh_model(p))
            # convergence of the slow bundle under a one-photon-larger cutoff
            p_up = bh.BHParams(
                sites=p.sites, bosons=p.bosons, u=p.u, eta=p.eta, delta=p.delta,
                kappa=p.kappa, photon_cutoff=p.photon_cutoff + 1,
            )
            eigs_up = _spectrum_eigs(bh.build_full_bh_model(p_up))
            dev = np.max(
                np.abs(_slowest(eigs, n_eig) - _slowest(eigs_up, n_eig))
            )
            convergence["full_cutoff_plus_one_max_dev"] = float(dev)
        else:
            p = _bh_params(params)
            model = (
                bh.build_adiabatic_bh_model(p)
                if tier == "adiabatic"
                else bh.build_diabatic_bh_model(p)
            )
            eigs = _spectrum_eigs(model)
        slow = _slowest(eigs, n_eig)
        spectra[tier] = {
            "eigenvalues_real": [round(float(v), 12) for v in eigs.real],
            "eigenvalues_imag": [round(float(v), 12) for v in eigs.imag],
            "slowest_real": [round(float(v), 12) for v in slow.real],
            "slowest_imag": [round(float(v), 12) for v in slow.imag],
        }
    path = out_dir / "spectra.json"
    with open(path, "w") as fh:
        json.dump({"tiers": spectra, "convergence": convergence}, fh, indent=1)
        fh.write("\n")
    return {"files": [path], "diagnostics": {"convergence": convergence}}


# ---------------------------------------------------------------------------
# Parameter sweep (closed-form cooling coefficients)
# ---------------------------------------------------------------------------


def _run_sweep(cfg: dict, out_dir: Path) -> dict:
    params = dict(cfg["params"])
    field = params.pop("sweep_field")
    values = params.pop("sweep_values")
    path = out_dir / "sweep.csv"
    with open(path, "w") as fh:
        fh.write(f"{field},gamma_c_per_wr,h_hbar_wr2,e_ss_hbar_wr\n")
        for v in values:
            pt = dict(params)
            pt[field] = v
            coeffs = cool.gaussian_ansatz(_cooling_params(pt))
            fh.write(
                f"{v:.12e},{coeffs.gamma_c:.12e},{coeffs.h:.12e},{coeffs.e_ss:.12e}\n"
            )
    return {"files": [path], "diagnostics": {}}


# ---------------------------------------------------------------------------
# Orchestration
# ---------------------------------------------------------------------------


def _run_tiers(tiers, tier_fn, out_dir: Path) -> dict:
    files = []
    diagnostics = {}
    with concurrent.futures.ThreadPoolExecutor(max_workers=len(tiers)) as pool:
        futures = {tier: pool.submit(tier_fn, tier) for tier in tiers}
        results = {tier: fut.result() for tier, fut in futures.items()}
    for tier in tiers:  # single collector writes files deterministically
        series_list, diag = results[tier]
        for s in series_list:
            files.append(_write_series(out_dir, s))
        diagnostics[tier] = diag
    return {"files": files, "diagnostics": diagnostics}


_RUNNERS = {
    "cooling": _run_cooling,
    "bosehubbard": _run_bosehubbard,
    "spectrum": _run_spectrum,
    "sweep": _run_sweep,
}


def run_scenario(cfg: dict, out_dir) -> dict:
    """Execute a validated config, writing CSV/JSON outputs plus manifest.json."""
    from . import __version__

    out_dir = Path(out_dir)
    out_dir.mkdir(parents=True, exist_ok=True)
    start = time.monotonic()
    result = _RUNNERS[cfg["scenario"]](cfg, out_dir)
    wall = time.monotonic() - start

    manifest = {
        "config": cfg,
        "version": __version__,
        "wall_time_s": wall,
        "diagnostics": result.get("diagnostics", {}),
        "validity": result.get("validity", {}),
        "files": {p.name: _sha256(p) for p in result["files"]},
    }
    with open(out_dir / "manifest.json", "w") as fh:
        json.dump(manifest, fh, indent=1, default=float)
        fh.write("\n")
    return manifest


def compare_runs(dir_a, dir_b, series: str, tolerance: float) -> dict:
    """Max relative deviation of one named series between two run directories.

    The finer grid is linearly interpolated onto the coarser one over the
    overlapping time window.
    """
    path_a = Path(dir_a) / f"{series}.csv"
    path_b = Path(dir_b) / f"{series}.csv"
    for path in (path_a, path_b):
        if not path.exists():
            raise ConfigError(f"series file missing: {path}", str(path))
    ta, va = _read_series(path_a)
    tb, vb = _read_series(path_b)
    lo, hi = max(ta[0], tb[0]), min(ta[-1], tb[-1])
    if hi <= lo:
        raise ConfigError("time grids do not overlap")
    # evaluate both on the coarser grid restricted to the overlap
    coarse_t = ta if len(ta) <= len(tb) else tb
    grid = coarse_t[(coarse_t >= lo) & (coarse_t <= hi)]
    ya = np.interp(grid, ta, va)
    yb = np.interp(grid, tb, vb)
    denom = np.maximum(np.abs(ya), np.abs(yb))
    dev = np.abs(ya - yb) / np.where(denom > 0, denom, 1.0)
    max_dev = float(dev.max())
    return {
        "series": series,
        "max_relative_deviation": max_dev,
        "tolerance": tolerance,
        "pass": bool(max_dev <= tolerance),
        "n_points": int(len(grid)),
    }
