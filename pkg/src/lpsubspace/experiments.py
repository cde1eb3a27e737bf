"""Monte Carlo harness for the recovery, stability, phase-transition,
local-minimum-rate, and single-outlier-counterexample experiments.

A spec fixes a generative model and grids over (p, eps, N); every grid cell
runs independently seeded trials: sample, minimize (the exhaustive angle
grid when D = 2 and d = 1, geodesic descent otherwise), record the geodesic
distance of the result from the most significant subspace, and judge success
by the cell's criterion.  Per-trial seeds derive from (master seed, cell
index, trial index), so sweeps reproduce exactly no matter how trials are
scheduled.
"""

from __future__ import annotations

import json
import math
import time
from concurrent.futures import ThreadPoolExecutor
from dataclasses import dataclass, replace

import numpy as np

from .bounds import InlierDistribution, kappa_delta_lower_bound, stability_radius
from .certificates import Verdict, certify_l1, certify_p_less_1, check_necessary_p_gt_1
from .energy import Dataset
from .exceptions import ConfigError, LpSubspaceError
from .grassmann import Subspace, geodesic_distance
from .model import HlmModelConfig, sample, sample_weakly_symmetric
from .optimize import OptimizerConfig, grid_oracle, minimize

RESULT_HEADER = "p,eps,n,trial,seed,distance,energy,success,runtime_ms"

KINDS = (
    "recovery",
    "stability",
    "phase-transition",
    "local-min-rate",
    "counterexample",
)


@dataclass(frozen=True, eq=False)
class ExperimentSpec:
    kind: str
    model: HlmModelConfig | None
    n_grid: list[int]
    p_grid: list[float]
    eps_grid: list[float]
    trials: int
    optimizer: OptimizerConfig | None = None
    outlier_points: Dataset | None = None  # weakly symmetric outlier pool
    recovery_tol: float = 1e-3
    grid_angle_step: float = 1e-3

    def __post_init__(self):
        if self.kind not in KINDS:
            raise ConfigError(f"unknown experiment kind {self.kind!r}")
        if not self.n_grid or not self.p_grid or not self.eps_grid:
            raise ConfigError("grids must be nonempty")
        if self.trials < 1:
            raise ConfigError("trials must be at least 1")
        if self.kind != "counterexample" and self.model is None:
            raise ConfigError(f"experiment kind {self.kind!r} requires a model")

    @classmethod
    def from_json(cls, path_or_dict) -> "ExperimentSpec":
        if isinstance(path_or_dict, dict):
            raw = path_or_dict
        else:
            with open(path_or_dict) as fh:
                raw = json.load(fh)
        model = None
        if raw.get("model") is not None:
            model = HlmModelConfig.from_json(raw["model"])
        optimizer = None
        if raw.get("optimizer") is not None:
            opt = dict(raw["optimizer"])
            opt.setdefault("p", raw.get("p_grid", [1.0])[0])
            optimizer = OptimizerConfig(**opt)
        outliers = None
        if raw.get("outlier_points") is not None:
            outliers = Dataset(np.asarray(raw["outlier_points"], dtype=float))
        try:
            return cls(
                kind=raw["kind"],
                model=model,
                n_grid=[int(v) for v in raw["n_grid"]],
                p_grid=[float(v) for v in raw["p_grid"]],
                eps_grid=[float(v) for v in raw.get("eps_grid", [0.0])],
                trials=int(raw["trials"]),
                optimizer=optimizer,
                outlier_points=outliers,
                recovery_tol=float(raw.get("recovery_tol", 1e-3)),
                grid_angle_step=float(raw.get("grid_angle_step", 1e-3)),
            )
        except (KeyError, TypeError, ValueError) as exc:
            raise ConfigError(f"malformed experiment spec: {exc}") from exc


@dataclass(frozen=True)
class TrialRecord:
    p: float
    eps: float
    n: int
    trial: int
    seed: int
    distance: float
    energy: float
    success: bool
    runtime_ms: float

    def csv_row(self) -> str:
        return ",".join(
            [
                format(self.p, ".17g"),
                format(self.eps, ".17g"),
                str(self.n),
                str(self.trial),
                str(self.seed),
                format(self.distance, ".17g"),
                format(self.energy, ".17g"),
                str(int(self.success)),
                format(self.runtime_ms, ".3f"),
            ]
        )


def wilson_interval(successes: int, trials: int, z: float = 1.959963984540054):
    """Wilson 95% score interval for a binomial proportion."""
    if trials == 0:
        return 0.0, 1.0
    phat = successes / trials
    denom = 1.0 + z**2 / trials
    center = (phat + z**2 / (2 * trials)) / denom
    half = (
        z * math.sqrt(phat * (1 - phat) / trials + z**2 / (4 * trials**2)) / denom
    )
    return max(0.0, center - half), min(1.0, center + half)


def trial_seed(master_seed: int, cell_index: int, trial_index: int) -> int:
    """Stable per-trial seed: master xor a platform-independent hash of the
    (cell, trial) pair."""
    h = np.random.SeedSequence([cell_index, trial_index]).generate_state(2)
    return (int(master_seed) ^ (int(h[0]) << 32 | int(h[1]))) & ((1 << 63) - 1)


def _with_noise(model: HlmModelConfig, eps: float) -> HlmModelConfig:
    if model.noise_level == eps:
        return model
    return replace(model, noise_level=eps)


def _counterexample_data(n1: int, p: float, seed) -> tuple[Dataset, Subspace]:
    """n1 points uniform on a segment of length n1^(-1/p) on the x-axis plus
    one outlier at the orthogonal unit vector."""
    eps_len = n1 ** (-1.0 / p)
    rng = np.random.default_rng(seed)
    xs = rng.uniform(-eps_len / 2, eps_len / 2, size=n1)
    points = np.zeros((n1 + 1, 2))
    points[:n1, 0] = xs
    points[n1, 1] = 1.0
    labels = np.concatenate([np.ones(n1, dtype=int), np.zeros(1, dtype=int)])
    return Dataset(points, labels), Subspace(np.array([[1.0], [0.0]]))


def _solve(data: Dataset, d: int, p: float, spec: ExperimentSpec, seed: int):
    if data.ambient_dim == 2 and d == 1:
        return grid_oracle(data, p, spec.grid_angle_step)
    base = spec.optimizer or OptimizerConfig(p=p)
    config = replace(base, p=p, seed=seed)
    result = minimize(data, d, config)
    return result.best, result.energy


def _run_trial(spec: ExperimentSpec, p, eps, n, trial_idx, seed) -> TrialRecord:
    t0 = time.perf_counter()
    model = spec.model

    if spec.kind == "counterexample":
        data, true_sub = _counterexample_data(n, p, seed)
        best, e = grid_oracle(data, p, spec.grid_angle_step)
        outlier = data.points[-1]
        coeff = best.basis.T @ outlier
        dist_outlier = float(np.linalg.norm(outlier - best.basis @ coeff))
        success = dist_outlier <= 1e-9
        distance = geodesic_distance(best, true_sub)
    else:
        model = _with_noise(model, eps)
        if spec.outlier_points is not None:
            data = sample_weakly_symmetric(model, spec.outlier_points, n, seed)
        else:
            data = sample(model, n, seed)
        true_sub = model.components[0].subspace
        d = model.subspace_dim

        if spec.kind == "local-min-rate":
            distance = 0.0
            if p == 1:
                res = certify_l1(data, true_sub, seed=seed)
                success = res.verdict is Verdict.CERTIFIED_LOCAL_MIN
            elif p < 1:
                res = certify_p_less_1(data, true_sub)
                success = res.verdict is Verdict.CERTIFIED_LOCAL_MIN
            else:
                res = check_necessary_p_gt_1(data, true_sub, p)
                success = res.verdict is Verdict.NECESSARY_CONDITION_FAILS
            e = res.margin
        else:
            best, e = _solve(data, d, p, spec, seed)
            distance = geodesic_distance(best, true_sub)
            if spec.kind == "recovery":
                success = distance <= spec.recovery_tol
            elif spec.kind == "stability":
                comp = model.components[0]
                mu1 = InlierDistribution(
                    dim=d, radius=comp.radius, kind=comp.distribution
                )
                f = stability_radius(
                    p,
                    d,
                    len(model.components),
                    model.outlier.weight,
                    comp.weight,
                    mu1,
                    eps,
                )
                success = distance <= f
            elif spec.kind == "phase-transition":
                if len(model.components) < 2 or d != 1 or model.ambient_dim != 2:
                    raise ConfigError(
                        "phase-transition cells need two lines in the plane"
                    )
                theta = geodesic_distance(
                    model.components[0].subspace, model.components[1].subspace
                )
                bound = kappa_delta_lower_bound(p, model.components[1].weight, theta)
                success = distance >= bound
            else:
                raise ConfigError(f"unhandled kind {spec.kind!r}")

    runtime_ms = (time.perf_counter() - t0) * 1e3
    return TrialRecord(
        p=float(p),
        eps=float(eps),
        n=int(n),
        trial=trial_idx,
        seed=seed,
        distance=float(distance),
        energy=float(e),
        success=bool(success),
        runtime_ms=runtime_ms,
    )


def run_experiment(
    spec: ExperimentSpec, seed: int = 0, threads: int = 1
) -> tuple[list[TrialRecord], list[dict]]:
    """All trial records (ordered by cell then trial) plus per-cell summary."""
    cells = [
        (p, eps, n)
        for p in spec.p_grid
        for eps in spec.eps_grid
        for n in spec.n_grid
    ]
    tasks = []
    for cell_idx, (p, eps, n) in enumerate(cells):
        for trial_idx in range(spec.trials):
            tasks.append((cell_idx, p, eps, n, trial_idx))

    def run(task) -> TrialRecord:
        cell_idx, p, eps, n, trial_idx = task
        ts = trial_seed(seed, cell_idx, trial_idx)
        try:
            return _run_trial(spec, p, eps, n, trial_idx, ts)
        except LpSubspaceError:
            return TrialRecord(
                p=float(p),
                eps=float(eps),
                n=int(n),
                trial=trial_idx,
                seed=ts,
                distance=float("nan"),
                energy=float("nan"),
                success=False,
                runtime_ms=0.0,
            )

    if threads > 1:
        with ThreadPoolExecutor(max_workers=threads) as pool:
            records = list(pool.map(run, tasks))
    else:
        records = [run(t) for t in tasks]

    summary = []
    for cell_idx, (p, eps, n) in enumerate(cells):
        cell_records = records[cell_idx * spec.trials : (cell_idx + 1) * spec.trials]
        wins = sum(r.success for r in cell_records)
        lo, hi = wilson_interval(wins, len(cell_records))
        dists = np.array([r.distance for r in cell_records])
        finite = dists[np.isfinite(dists)]
        summary.append(
            {
                "p": p,
                "eps": eps,
                "n": n,
                "trials": len(cell_records),
                "successes": wins,
                "frequency": wins / len(cell_records),
                "wilson_low": lo,
                "wilson_high": hi,
                "median_distance": float(np.median(finite)) if finite.size else float("nan"),
            }
        )
    return records, summary


def write_records_csv(records: list[TrialRecord], path) -> None:
    with open(path, "w", newline="") as fh:
        fh.write(RESULT_HEADER + "\n")
        for rec in records:
            fh.write(rec.csv_row() + "\n")


def summary_csv_lines(summary: list[dict]) -> list[str]:
    header = (
        "p,eps,n,trials,successes,frequency,wilson_low,wilson_high,median_distance"
    )
    lines = [header]
    for row in summary:
        lines.append(
            ",".join(
                [
                    format(row["p"], ".17g"),
                    format(row["eps"], ".17g"),
                    str(row["n"]),
                    str(row["trials"]),
                    str(row["successes"]),
                    format(row["frequency"], ".6g"),
                    format(row["wilson_low"], ".6g"),
                    format(row["wilson_high"], ".6g"),
                    format(row["median_distance"], ".6g"),
                ]
            )
        )
    return lines
