"""Batch command-line front end: reproducible experiments from JSON configs.

Commands write machine-readable outputs (CSV / JSON, every file carrying a
schema_version field) into an output directory. Outputs are a deterministic
function of (config, master seed); the single exception is the wall-time
entry in tomography metrics.

Exit codes: 0 success, 2 config error, 3 resource-cap error.
"""
from __future__ import annotations

import argparse
import copy
import json
import sys
import time
from dataclasses import dataclass, field
from pathlib import Path
from typing import Any, Sequence

import numpy as np

from .ansatz import AnsatzParams, build_ansatz_circuit, decompose_to_native, export_qasm, prepare_trial_state
from .errors import ConfigError, ResourceCapError, UsageError
from .model import ModelParams, cached_hamiltonian, from_couplings
from .pauli import to_matrix, to_text
from .phase import (
    critical_points_from_scan,
    neutral_ground_state,
    scan,
)
from .rng import derive_seed
from .simulator import NoiseModel
from .tomography import (
    bootstrap,
    fidelity,
    linear_inversion_exact,
    magnitude_table,
    project_to_physical,
    qmi,
    reconstruct,
    tomography_measure,
    two_by_two_bipartitions,
)
from .vqe import Backend, SpsaConfig, mean_window_stderr, spsa_run

SCHEMA_VERSION = 1

_DEFAULT_SCAN_K = [
    -14.0, -12.0, -10.0, -8.0, -6.0, -5.0, -4.5, -4.0, -3.5, -3.0, -2.0, -1.0,
    0.0, 1.0, 2.0, 3.0, 3.5, 4.0, 4.5, 5.0, 6.0, 8.0, 10.0,
]

_BASE_CONFIG: dict[str, Any] = {
    "model": {
        "num_sites": 2,
        "num_flavors": 2,
        "x": 16.0,
        "m_over_g": [0.0, 0.0],
        "kappa_over_g": [0.0, 0.0],
    },
    "backend": {"kind": "exact", "p_twoqubit": 0.0, "p_spam": 0.0},
    "spsa": {
        "iterations": 150,
        "c0": 0.1,
        "a0": None,
        "alpha": 0.602,
        "gamma": 0.101,
        "stability": None,
        "gradient_resamplings": 3,
        "gradient_mode": "pairs",
        "eval_shots": 100,
        "calibration_probes": 20,
    },
    "scan": {"k_values": _DEFAULT_SCAN_K, "mode": "exact", "particle_shots": 400, "restarts": 3},
    "tomography": {
        "shots_per_basis": 400,
        "bootstrap_resamples": 200,
        "exact_probabilities": False,
        "theta": None,
    },
    "seed": 7,
    "out_dir": "results",
}

PRESETS: dict[str, dict[str, Any]] = {
    "Km14": {"model": {"kappa_over_g": [-14.0, 0.0]}},
    "K0": {"model": {"kappa_over_g": [0.0, 0.0]}},
    "K10": {"model": {"kappa_over_g": [10.0, 0.0]}},
}


@dataclass(frozen=True)
class RunConfig:
    model: ModelParams
    backend: Backend
    spsa: SpsaConfig
    scan_k_values: tuple[float, ...]
    scan_mode: str
    particle_shots: int
    scan_restarts: int
    tomo_shots: int
    bootstrap_resamples: int
    exact_probabilities: bool
    theta: tuple[float, ...] | None
    seed: int
    out_dir: Path
    raw: dict[str, Any] = field(repr=False, default_factory=dict)


def _deep_update(base: dict, overrides: dict) -> dict:
    out = copy.deepcopy(base)
    for key, value in overrides.items():
        if isinstance(value, dict) and isinstance(out.get(key), dict):
            out[key] = _deep_update(out[key], value)
        else:
            out[key] = copy.deepcopy(value)
    return out


def load_config(
    path: str | Path | None = None,
    preset: str | None = None,
    seed: int | None = None,
    out_dir: str | None = None,
) -> RunConfig:
    """Merge defaults, an optional preset, an optional JSON file, and CLI
    overrides into a validated RunConfig."""
    raw = copy.deepcopy(_BASE_CONFIG)
    if preset is not None:
        if preset not in PRESETS:
            raise ConfigError(f"unknown preset {preset!r}; choose from {sorted(PRESETS)}")
        raw = _deep_update(raw, PRESETS[preset])
    if path is not None:
        try:
            text = Path(path).read_text()
        except OSError as exc:
            raise ConfigError(f"cannot read config file {path}: {exc}") from exc
        try:
            user = json.loads(text)
        except json.JSONDecodeError as exc:
            raise ConfigError(f"config file {path} is not valid JSON: {exc}") from exc
        if not isinstance(user, dict):
            raise ConfigError("config root must be a JSON object")
        unknown = set(user) - set(_BASE_CONFIG) - {"schema_version"}
        if unknown:
            raise ConfigError(f"unknown config keys: {sorted(unknown)}")
        raw = _deep_update(raw, user)
    if seed is not None:
        raw["seed"] = seed
    if out_dir is not None:
        raw["out_dir"] = out_dir

    try:
        m = raw["model"]
        params = from_couplings(
            int(m["num_sites"]),
            int(m["num_flavors"]),
            float(m["x"]),
            tuple(float(v) for v in m["m_over_g"]),
            tuple(float(v) for v in m["kappa_over_g"]),
        )
        b = raw["backend"]
        noise = None
        if b["kind"] == "noisy":
            noise = NoiseModel(float(b["p_twoqubit"]), float(b["p_spam"]))
        backend = Backend(str(b["kind"]), noise)
        s = raw["spsa"]
        spsa = SpsaConfig(
            iterations=int(s["iterations"]),
            c0=float(s["c0"]),
            a0=None if s["a0"] is None else float(s["a0"]),
            alpha=float(s["alpha"]),
            gamma=float(s["gamma"]),
            stability=None if s["stability"] is None else float(s["stability"]),
            gradient_resamplings=int(s["gradient_resamplings"]),
            gradient_mode=str(s["gradient_mode"]),
            eval_shots=int(s["eval_shots"]),
            calibration_probes=int(s["calibration_probes"]),
            seed=int(raw["seed"]),
        )
        t = raw["tomography"]
        theta = None if t["theta"] is None else tuple(float(v) for v in t["theta"])
        return RunConfig(
            model=params,
            backend=backend,
            spsa=spsa,
            scan_k_values=tuple(float(v) for v in raw["scan"]["k_values"]),
            scan_mode=str(raw["scan"]["mode"]),
            particle_shots=int(raw["scan"]["particle_shots"]),
            scan_restarts=int(raw["scan"]["restarts"]),
            tomo_shots=int(t["shots_per_basis"]),
            bootstrap_resamples=int(t["bootstrap_resamples"]),
            exact_probabilities=bool(t["exact_probabilities"]),
            theta=theta,
            seed=int(raw["seed"]),
            out_dir=Path(raw["out_dir"]),
            raw=raw,
        )
    except (KeyError, TypeError, ValueError, UsageError) as exc:
        if isinstance(exc, ConfigError):
            raise
        raise ConfigError(f"invalid configuration: {exc}") from exc


def _write_json(path: Path, payload: dict) -> None:
    payload = {"schema_version": SCHEMA_VERSION, **payload}
    path.write_text(json.dumps(payload, indent=2, sort_keys=True) + "\n")


def _write_csv(path: Path, header: list[str], rows: list[list]) -> None:
    lines = [f"# schema_version={SCHEMA_VERSION}", ",".join(header)]
    for row in rows:
        lines.append(",".join(repr(v) if isinstance(v, float) else str(v) for v in row))
    path.write_text("\n".join(lines) + "\n")


def _model_dict(params: ModelParams) -> dict:
    return {
        "num_sites": params.num_sites,
        "num_flavors": params.num_flavors,
        "x": params.x,
        "mu": list(params.mu),
        "nu": list(params.nu),
    }


def cmd_hamiltonian(config: RunConfig) -> dict[str, Path]:
    """Write the Hamiltonian in the textual Pauli format plus its spectrum."""
    out = config.out_dir
    out.mkdir(parents=True, exist_ok=True)
    w = cached_hamiltonian(config.model)
    ham_path = out / "hamiltonian.txt"
    ham_path.write_text(f"# schema_version={SCHEMA_VERSION}\n" + to_text(w))

    from .model import total_charge

    full = np.linalg.eigvalsh(to_matrix(w))
    e0, _, gap = neutral_ground_state(config.model)
    charge_diag = np.diag(to_matrix(total_charge(config.model))).real
    neutral = np.linalg.eigvalsh(
        to_matrix(w)[np.ix_(np.abs(charge_diag) < 1e-9, np.abs(charge_diag) < 1e-9)]
    )
    spec_path = out / "spectrum.json"
    _write_json(
        spec_path,
        {
            "model": _model_dict(config.model),
            "ground_energy": e0,
            "gap": gap,
            "eigenvalues_neutral_sector": [float(v) for v in neutral],
            "eigenvalues_full": [float(v) for v in full],
        },
    )
    return {"hamiltonian": ham_path, "spectrum": spec_path}


def cmd_vqe(config: RunConfig, export_qasm_file: bool = False) -> dict[str, Path]:
    """Run one VQE optimization; write the iteration CSV and summary JSON."""
    out = config.out_dir
    out.mkdir(parents=True, exist_ok=True)
    result = spsa_run(config.spsa, config.model, config.backend)

    n_par = AnsatzParams.num_parameters(config.model.num_qubits)
    header = ["iteration"] + [f"theta{i}" for i in range(n_par)] + [
        "E_measured",
        "stderr",
        "E_simulated",
    ]
    rows = [
        [r.iteration, *[float(v) for v in r.theta], r.energy_measured, r.stderr, r.energy_simulated]
        for r in result.records
    ]
    csv_path = out / "iterations.csv"
    _write_csv(csv_path, header, rows)

    summary_path = out / "summary.json"
    _write_json(
        summary_path,
        {
            "model": _model_dict(config.model),
            "backend": config.backend.kind,
            "seed": config.seed,
            "iterations": config.spsa.iterations,
            "E_exact": result.e_exact,
            "E_min_measured": result.e_min_measured,
            "E_min_simulated": result.e_min_simulated,
            "theta_opt": [float(v) for v in result.theta_opt],
            "Delta_W": result.stats.delta_w,
            "delta_W": result.stats.spread_w,
            "Delta_W_sim": result.stats.delta_w_sim,
            "delta_W_sim": result.stats.spread_w_sim,
            "mean_window_stderr": mean_window_stderr(result.records),
        },
    )
    written = {"iterations": csv_path, "summary": summary_path}

    if export_qasm_file:
        circuit = decompose_to_native(
            build_ansatz_circuit(config.model, AnsatzParams(result.theta_opt))
        )
        qasm_path = out / "circuit_opt.qasm"
        qasm_path.write_text(export_qasm(circuit))
        written["qasm"] = qasm_path
    return written


def cmd_scan(config: RunConfig) -> dict[str, Path]:
    """Phase-diagram scan; writes scan.csv and the critical-point JSON."""
    out = config.out_dir
    out.mkdir(parents=True, exist_ok=True)
    points = scan(
        config.model,
        config.scan_k_values,
        mode=config.scan_mode,
        spsa_config=config.spsa,
        backend=config.backend if config.scan_mode == "vqe" else None,
        particle_shots=config.particle_shots,
        seed=config.seed,
        restarts=config.scan_restarts,
    )
    header = [
        "K", "nu0", "energy", "energy_stderr", "energy_exact",
        "N0_measured", "N0_rounded", "N1_measured", "N1_rounded",
    ]
    rows = [
        [
            p.K, p.nu[0], p.energy, p.energy_stderr, p.energy_exact,
            p.particle_numbers[0], p.rounded_numbers[0],
            p.particle_numbers[1], p.rounded_numbers[1],
        ]
        for p in points
    ]
    csv_path = out / "scan.csv"
    _write_csv(csv_path, header, rows)

    kcrit_path = out / "kcrit.json"
    _write_json(
        kcrit_path,
        {
            "model": _model_dict(config.model),
            "mode": config.scan_mode,
            "critical_points": critical_points_from_scan(points, config.model.x),
        },
    )
    return {"scan": csv_path, "kcrit": kcrit_path}


def _tomography_source(config: RunConfig, theta: AnsatzParams):
    """Trial state (pure) or noisy-circuit density matrix, plus readout flip p."""
    if config.backend.kind == "noisy":
        from .simulator import run_noisy

        circuit = decompose_to_native(build_ansatz_circuit(config.model, theta))
        rho = run_noisy(
            circuit.gates,
            config.backend.noise,
            config.model.num_qubits,
            mode="exact",
            apply_readout_flips=False,
        )
        return rho, config.backend.noise.p_spam
    return prepare_trial_state(config.model, theta), 0.0


def cmd_tomography(config: RunConfig, theta: Sequence[float] | None = None) -> dict[str, Path]:
    """Tomograph the trial state at `theta`; write dataset, rho, and metrics."""
    start = time.perf_counter()
    out = config.out_dir
    out.mkdir(parents=True, exist_ok=True)
    angles = theta if theta is not None else config.theta
    if angles is None:
        raise ConfigError(
            "tomography needs circuit angles: set tomography.theta in the config, "
            "pass --theta, or point --theta-from at a VQE summary.json"
        )
    ansatz_theta = AnsatzParams(tuple(float(v) for v in angles))
    reference = prepare_trial_state(config.model, ansatz_theta)
    source, p_readout = _tomography_source(config, ansatz_theta)

    written: dict[str, Path] = {}
    if config.exact_probabilities:
        rho = project_to_physical(linear_inversion_exact(source))
        dataset_dict = {"mode": "exact_probabilities"}
    else:
        dataset = tomography_measure(
            source, config.tomo_shots, derive_seed(config.seed, "tomography"), p_readout
        )
        rho = reconstruct(dataset)
        dataset_dict = dataset.to_json_dict()
    ds_path = out / "dataset.json"
    _write_json(ds_path, dataset_dict)
    written["dataset"] = ds_path

    rho_path = out / "rho.json"
    _write_json(
        rho_path,
        {
            "num_qubits": rho.num_qubits,
            "matrix_re_im": [
                [[float(v.real), float(v.imag)] for v in row] for row in rho.matrix
            ],
        },
    )
    written["rho"] = rho_path

    labels, magnitudes = magnitude_table(rho)
    mag_path = out / "rho_magnitudes.csv"
    _write_csv(
        mag_path,
        ["state"] + labels,
        [[labels[i]] + row for i, row in enumerate(magnitudes)],
    )
    written["rho_magnitudes"] = mag_path

    fid = fidelity(rho, reference)
    parts = two_by_two_bipartitions(config.model.num_qubits)
    qmi_values = {p.label: qmi(rho, p) for p in parts}
    if config.exact_probabilities or config.bootstrap_resamples < 2:
        fid_boot = {"mean": fid, "stddev": 0.0}
        qmi_boot = {p.label: {"mean": qmi_values[p.label], "stddev": 0.0} for p in parts}
    else:
        mean, std = bootstrap(
            rho,
            lambda d: fidelity(d, reference),
            resamples=config.bootstrap_resamples,
            shots=config.tomo_shots,
            seed=derive_seed(config.seed, "bootstrap-fidelity"),
        )
        fid_boot = {"mean": mean, "stddev": std}
        qmi_boot = {}
        for p in parts:
            m, s = bootstrap(
                rho,
                lambda d, p=p: qmi(d, p),
                resamples=config.bootstrap_resamples,
                shots=config.tomo_shots,
                seed=derive_seed(config.seed, "bootstrap-qmi", p.label),
            )
            qmi_boot[p.label] = {"mean": m, "stddev": s}

    metrics_path = out / "metrics.json"
    _write_json(
        metrics_path,
        {
            "theta": [float(v) for v in ansatz_theta.theta],
            "backend": config.backend.kind,
            "shots_per_basis": config.tomo_shots,
            "fidelity": fid,
            "fidelity_bootstrap": fid_boot,
            "qmi": qmi_values,
            "qmi_bootstrap": qmi_boot,
            "wall_time_s": round(time.perf_counter() - start, 3),
        },
    )
    written["metrics"] = metrics_path
    return written


def _parse_theta_arg(value: str) -> tuple[float, ...]:
    try:
        return tuple(float(v) for v in value.split(","))
    except ValueError as exc:
        raise ConfigError(f"--theta expects a comma-separated float list: {exc}") from exc


def _theta_from_summary(path: str) -> tuple[float, ...]:
    try:
        payload = json.loads(Path(path).read_text())
        return tuple(float(v) for v in payload["theta_opt"])
    except (OSError, json.JSONDecodeError, KeyError, TypeError, ValueError) as exc:
        raise ConfigError(f"cannot read theta_opt from {path}: {exc}") from exc


def build_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(
        prog="schwinger-vqe",
        description="Multi-flavor lattice Schwinger model VQE simulation toolkit",
    )
    sub = parser.add_subparsers(dest="command", required=True)
    for name, help_text in [
        ("hamiltonian", "write the Pauli-sum Hamiltonian and its exact spectrum"),
        ("vqe", "run a VQE optimization and log per-iteration energies"),
        ("scan", "scan the phase diagram over K and extract critical points"),
        ("tomography", "tomograph a trial state and compute fidelity and QMI"),
    ]:
        p = sub.add_parser(name, help=help_text)
        p.add_argument("--config", type=str, default=None, help="JSON config file")
        p.add_argument("--preset", type=str, default=None, choices=sorted(PRESETS))
        p.add_argument("--seed", type=int, default=None, help="master seed override")
        p.add_argument("--out", type=str, default=None, help="output directory")
        if name == "vqe":
            p.add_argument(
                "--export-qasm", action="store_true",
                help="also write the optimal circuit in OpenQASM 3",
            )
        if name == "tomography":
            p.add_argument("--theta", type=str, default=None, help="comma-separated angles")
            p.add_argument(
                "--theta-from", type=str, default=None,
                help="read theta_opt from a VQE summary.json",
            )
    return parser


def main(argv: Sequence[str] | None = None) -> int:
    args = build_parser().parse_args(argv)
    try:
        config = load_config(args.config, args.preset, args.seed, args.out)
        if args.command == "hamiltonian":
            written = cmd_hamiltonian(config)
        elif args.command == "vqe":
            written = cmd_vqe(config, export_qasm_file=args.export_qasm)
        elif args.command == "scan":
            written = cmd_scan(config)
        elif args.command == "tomography":
            theta = None
            if args.theta is not None:
                theta = _parse_theta_arg(args.theta)
            elif args.theta_from is not None:
                theta = _theta_from_summary(args.theta_from)
            written = cmd_tomography(config, theta)
        else:  # pragma: no cover - argparse enforces the choices
            raise ConfigError(f"unknown command {args.command!r}")
    except (ConfigError, UsageError) as exc:
        print(f"error: {exc}", file=sys.stderr)
        return 2
    except ResourceCapError as exc:
        print(f"resource error: {exc}", file=sys.stderr)
        return 3
    for kind, path in written.items():
        print(f"{kind}: {path}")
    return 0


if __name__ == "__main__":
    sys.exit(main())
