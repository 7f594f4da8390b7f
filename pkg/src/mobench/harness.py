"""Experiment definition, run-matrix expansion, execution, and reports.

The pipeline is two-pass: the run pass executes (instance, algorithm, seed)
jobs, persists one raw evaluation log per run, and keeps a light summary
(archive insertion history plus final population). The report pass pools
per-problem objective extrema into normalization boxes, computes hypervolume
columns, and emits plot-ready CSV tables.
"""

from __future__ import annotations

import hashlib
import json
import os
from concurrent.futures import ProcessPoolExecutor
from dataclasses import dataclass, field
from pathlib import Path
from typing import Iterable, Sequence

import numpy as np

from . import __version__
from .algorithms import ALGORITHM_NAMES, AlgoConfig, RunResult, run_algorithm
from .errors import ConfigError, ReportError
from .indicators import NormalizationBox, ParetoArchive, compute_normalization, normalized_hv
from .instance import ProblemInstance
from .problems import ProblemId, list_problems, parse_problem_id
from .transforms import BETA_CDF, IDENTITY, SPHERED_ROTATION, TransformSpec

__all__ = [
    "ExperimentConfig",
    "Job",
    "RunSummary",
    "RunRow",
    "expand_matrix",
    "execute",
    "load_runs",
    "compute_boxes",
    "compute_run_rows",
    "emit_runs_csv",
    "emit_errors_csv",
    "report_ab_heatmap",
    "report_relative_hv",
    "report_hv_over_time",
    "full_matrix_config",
    "checkpoint_grid",
]

OUTPUT_DIR_ENV = "MOBENCH_OUT"
N_CHECKPOINTS = 50

RUNS_CSV_COLUMNS = (
    "instance,algorithm,population,seed,final_archive_hv,final_pop_hv,"
    "checkpoint_evals,checkpoint_hvs"
)


@dataclass
class ExperimentConfig:
    problems: list[str]
    search_transforms: list[dict]
    objective_transforms: list[dict]
    algorithms: list[dict]
    budget: int = 5000
    repetitions: int = 10
    base_seed: int = 0
    output_dir: str | None = None
    combined_grid: bool = False

    def __post_init__(self):
        if self.repetitions < 1:
            raise ConfigError("repetitions must be at least 1")
        if not self.problems:
            raise ConfigError("at least one problem selector is required")
        if not self.search_transforms and not self.objective_transforms:
            raise ConfigError("at least one transform list entry is required")
        if not self.algorithms:
            raise ConfigError("at least one algorithm is required")
        for algo in self.algorithms:
            if not isinstance(algo, dict) or "name" not in algo:
                raise ConfigError(f"algorithm entries need a name: {algo!r}")
            if algo["name"] not in ALGORITHM_NAMES:
                raise ConfigError(f"unknown algorithm {algo['name']!r}")

    @staticmethod
    def from_dict(raw: dict) -> "ExperimentConfig":
        known = {
            "problems",
            "search_transforms",
            "objective_transforms",
            "algorithms",
            "budget",
            "repetitions",
            "base_seed",
            "output_dir",
            "combined_grid",
        }
        unknown = set(raw) - known
        if unknown:
            raise ConfigError(f"unknown config fields: {sorted(unknown)}")
        try:
            return ExperimentConfig(
                problems=list(raw["problems"]),
                search_transforms=list(raw.get("search_transforms", [])),
                objective_transforms=list(raw.get("objective_transforms", [])),
                algorithms=list(raw["algorithms"]),
                budget=int(raw.get("budget", 5000)),
                repetitions=int(raw.get("repetitions", 10)),
                base_seed=int(raw.get("base_seed", 0)),
                output_dir=raw.get("output_dir"),
                combined_grid=bool(raw.get("combined_grid", False)),
            )
        except KeyError as exc:
            raise ConfigError(f"missing config field: {exc}") from exc

    @staticmethod
    def from_file(path: str | Path) -> "ExperimentConfig":
        try:
            raw = json.loads(Path(path).read_text(encoding="utf-8"))
        except (OSError, json.JSONDecodeError) as exc:
            raise ConfigError(f"cannot read config {path}: {exc}") from exc
        return ExperimentConfig.from_dict(raw)


@dataclass(frozen=True)
class Job:
    instance: ProblemInstance
    algo: AlgoConfig
    rep: int


@dataclass
class RunSummary:
    """What the report pass needs from one run."""

    problem: str
    instance: str
    search_t: dict
    objective_t: dict
    algorithm: str
    population: int
    budget: int
    seed: int
    accepted: list[tuple[int, float, float]] = field(default_factory=list)
    final_pop_f: list[tuple[float, float]] = field(default_factory=list)
    error: str | None = None


@dataclass
class RunRow:
    """One emitted CSV row; hypervolumes are in the pooled normalized frame."""

    instance: str
    algorithm: str
    population: int
    seed: int
    final_archive_hv: float
    final_pop_hv: float
    checkpoint_evals: list[int]
    checkpoint_hvs: list[float]
    problem: str
    search_t: dict
    objective_t: dict


def _resolve_problem_selector(sel: str) -> list[ProblemId]:
    text = sel.strip().lower()
    dim = None
    if "-d" in text:
        text, _, dim_part = text.rpartition("-d")
        try:
            dim = int(dim_part)
        except ValueError as exc:
            raise ConfigError(f"bad dimension in selector {sel!r}") from exc
    catalog = list_problems()
    if text == "all":
        hits = [p for p in catalog if dim is None or p.dim == dim]
    elif text in ("zdt", "dtlz", "mmf"):
        hits = [p for p in catalog if p.suite == text and (dim is None or p.dim == dim)]
    else:
        hits = [
            p
            for p in catalog
            if f"{p.suite}{p.index}" == text and (dim is None or p.dim == dim)
        ]
    if not hits:
        raise ConfigError(f"problem selector {sel!r} matches nothing")
    return hits


def resolve_problems(selectors: Iterable[str]) -> list[ProblemId]:
    out: list[ProblemId] = []
    for sel in selectors:
        for pid in _resolve_problem_selector(sel):
            if pid not in out:
                out.append(pid)
    return out


def _expand_transform_entries(entries: Sequence[dict]) -> list[dict]:
    """Expand grid shorthands into plain transform configs."""
    out: list[dict] = []
    for entry in entries:
        if not isinstance(entry, dict) or "kind" not in entry:
            raise ConfigError(f"transform entries need a kind: {entry!r}")
        if entry["kind"] == "beta_cdf_grid":
            values = entry.get("values")
            if not values:
                raise ConfigError(f"beta_cdf_grid needs values: {entry!r}")
            for a in values:
                for b in values:
                    out.append({"kind": BETA_CDF, "alpha": float(a), "beta": float(b)})
        else:
            out.append(entry)
    return out


def _job_seed(base_seed: int, instance_desc: str, algo_name: str, population: int, rep: int) -> int:
    key = f"{base_seed}|{instance_desc}|{algo_name}|{population}|{rep}"
    digest = hashlib.sha256(key.encode("utf-8")).digest()
    return int.from_bytes(digest[:8], "big") >> 1  # keep it in int64 range


def expand_matrix(cfg: ExperimentConfig) -> list[Job]:
    """Expand the experiment into (instance, algorithm, repetition) jobs.

    Search and objective transform grids vary one space at a time (the other
    held at identity) unless combined_grid is set, in which case the full
    cross product is taken. Per-job seeds are a stable hash of the base seed
    and the job coordinates.
    """
    problems = resolve_problems(cfg.problems)
    search_entries = _expand_transform_entries(cfg.search_transforms)
    objective_entries = _expand_transform_entries(cfg.objective_transforms)
    identity_cfg = {"kind": IDENTITY}
    if cfg.combined_grid:
        pairs = [
            (s, o)
            for s in (search_entries or [identity_cfg])
            for o in (objective_entries or [identity_cfg])
        ]
    else:
        pairs = [(s, identity_cfg) for s in search_entries]
        pairs += [(identity_cfg, o) for o in objective_entries]
    jobs: list[Job] = []
    for pid in problems:
        seen: set[str] = set()
        for s_cfg, o_cfg in pairs:
            try:
                search_t = TransformSpec.from_config(s_cfg, dim=pid.dim)
                objective_t = TransformSpec.from_config(o_cfg, dim=pid.dim)
                inst = ProblemInstance(pid, search_t, objective_t)
            except ValueError as exc:  # invalid transform/instance combination
                raise ConfigError(f"invalid instance for {pid}: {exc}") from exc
            if inst.descriptor in seen:
                continue
            seen.add(inst.descriptor)
            for algo in cfg.algorithms:
                population = int(algo.get("population", 100))
                budget = int(algo.get("budget", cfg.budget))
                for rep in range(cfg.repetitions):
                    seed = _job_seed(
                        cfg.base_seed, inst.descriptor, algo["name"], population, rep
                    )
                    jobs.append(
                        Job(
                            inst,
                            AlgoConfig(algo["name"], population, budget, seed),
                            rep,
                        )
                    )
    return jobs


def _run_id(summary_or_job) -> str:
    if isinstance(summary_or_job, Job):
        return (
            f"{summary_or_job.instance.descriptor}__{summary_or_job.algo.name}"
            f"__p{summary_or_job.algo.population}__s{summary_or_job.algo.seed}"
        )
    s = summary_or_job
    return f"{s.instance}__{s.algorithm}__p{s.population}__s{s.seed}"


def _write_raw_log(result: RunResult, path: Path) -> None:
    # line format: eval_index,x_seen...,f_seen1,f_seen2,f_orig1,f_orig2
    with path.open("w", encoding="utf-8") as fh:
        for rec in result.log:
            coords = ",".join(repr(v) for v in rec.x_seen)
            fh.write(
                f"{rec.eval_index},{coords},{rec.f_seen[0]!r},{rec.f_seen[1]!r},"
                f"{rec.f_original[0]!r},{rec.f_original[1]!r}\n"
            )


def _summarize(job: Job, result: RunResult) -> RunSummary:
    return RunSummary(
        problem=str(job.instance.problem),
        instance=job.instance.descriptor,
        search_t=job.instance.search_t.to_config(),
        objective_t=job.instance.objective_t.to_config(),
        algorithm=job.algo.name,
        population=job.algo.population,
        budget=job.algo.budget,
        seed=job.algo.seed,
        accepted=list(result.archive.history),
        final_pop_f=[ind.f_original for ind in result.final_population],
    )


def _execute_job(job: Job, output_dir: str | None) -> RunSummary:
    try:
        result = run_algorithm(job.instance, job.algo)
        summary = _summarize(job, result)
        if output_dir is not None:
            runs_dir = Path(output_dir) / "runs"
            runs_dir.mkdir(parents=True, exist_ok=True)
            _write_raw_log(result, runs_dir / f"{_run_id(job)}.log")
            meta = {k: v for k, v in summary.__dict__.items() if k != "accepted"}
            (runs_dir / f"{_run_id(job)}.json").write_text(
                json.dumps(meta), encoding="utf-8"
            )
        return summary
    except Exception as exc:  # job failures are recorded, never abort the batch
        return RunSummary(
            problem=str(job.instance.problem),
            instance=job.instance.descriptor,
            search_t=job.instance.search_t.to_config(),
            objective_t=job.instance.objective_t.to_config(),
            algorithm=job.algo.name,
            population=job.algo.population,
            budget=job.algo.budget,
            seed=job.algo.seed,
            error=f"{type(exc).__name__}: {exc}",
        )


def execute(jobs: Sequence[Job], parallelism: int = 1, output_dir: str | None = None) -> list[RunSummary]:
    """Run all jobs; output order matches job order regardless of parallelism."""
    if parallelism < 1:
        raise ConfigError("parallelism must be at least 1")
    if output_dir is not None:
        Path(output_dir).mkdir(parents=True, exist_ok=True)
    if parallelism == 1 or len(jobs) <= 1:
        return [_execute_job(job, output_dir) for job in jobs]
    with ProcessPoolExecutor(max_workers=parallelism) as pool:
        return list(pool.map(_execute_job, jobs, [output_dir] * len(jobs), chunksize=1))


def load_runs(output_dir: str | Path) -> list[RunSummary]:
    """Rebuild run summaries from persisted logs (stable run-id order).

    The archive insertion history is recomputed from the raw evaluation log;
    final populations and configuration come from the sidecar metadata.
    """
    runs_dir = Path(output_dir) / "runs"
    if not runs_dir.is_dir():
        raise ReportError(f"no runs directory under {output_dir}")
    summaries = []
    for meta_path in sorted(runs_dir.glob("*.json")):
        meta = json.loads(meta_path.read_text(encoding="utf-8"))
        summary = RunSummary(
            problem=meta["problem"],
            instance=meta["instance"],
            search_t=meta["search_t"],
            objective_t=meta["objective_t"],
            algorithm=meta["algorithm"],
            population=meta["population"],
            budget=meta["budget"],
            seed=meta["seed"],
            final_pop_f=[tuple(f) for f in meta["final_pop_f"]],
            error=meta.get("error"),
        )
        log_path = meta_path.with_suffix(".log")
        if summary.error is None and log_path.exists():
            archive = ParetoArchive()
            with log_path.open(encoding="utf-8") as fh:
                for line in fh:
                    parts = line.rstrip("\n").split(",")
                    archive.insert((float(parts[-2]), float(parts[-1])), int(parts[0]))
            summary.accepted = list(archive.history)
        summaries.append(summary)
    return summaries


def checkpoint_grid(population: int, budget: int, n: int = N_CHECKPOINTS) -> list[int]:
    """Log-spaced evaluation indices from the population size to the budget."""
    raw = np.geomspace(max(population, 1), budget, num=n)
    return sorted(set(int(round(v)) for v in raw))


def compute_boxes(summaries: Iterable[RunSummary]) -> dict[str, NormalizationBox]:
    """Normalization box per base problem, pooled across all its runs."""
    fronts: dict[str, list[list[tuple[float, float]]]] = {}
    for s in summaries:
        if s.error is not None:
            continue
        archive = ParetoArchive()
        for idx, f1, f2 in s.accepted:
            archive.insert((f1, f2), idx)
        fronts.setdefault(s.problem, []).append(archive.points())
    return {problem: compute_normalization(runs) for problem, runs in fronts.items()}


def compute_run_rows(
    summaries: Iterable[RunSummary], boxes: dict[str, NormalizationBox]
) -> list[RunRow]:
    """Second pass: normalized HV columns and checkpointed archive HV."""
    rows = []
    for s in summaries:
        if s.error is not None:
            continue
        box = boxes[s.problem]
        grid = checkpoint_grid(s.population, s.budget)
        archive = ParetoArchive()
        pending = iter(sorted(s.accepted))
        nxt = next(pending, None)
        hvs = []
        last_hv = 0.0
        dirty = True
        for cut in grid:
            while nxt is not None and nxt[0] <= cut:
                archive.insert((nxt[1], nxt[2]), nxt[0])
                nxt = next(pending, None)
                dirty = True
            if dirty:
                last_hv = normalized_hv(archive.points(), box)
                dirty = False
            hvs.append(last_hv)
        rows.append(
            RunRow(
                instance=s.instance,
                algorithm=s.algorithm,
                population=s.population,
                seed=s.seed,
                final_archive_hv=hvs[-1],
                final_pop_hv=normalized_hv(s.final_pop_f, box),
                checkpoint_evals=grid,
                checkpoint_hvs=hvs,
                problem=s.problem,
                search_t=s.search_t,
                objective_t=s.objective_t,
            )
        )
    return rows


def emit_runs_csv(rows: Iterable[RunRow], path: str | Path) -> Path:
    """Write one row per run; byte-stable for identical inputs."""
    path = Path(path)
    path.parent.mkdir(parents=True, exist_ok=True)
    lines = [f"# mobench {__version__}", RUNS_CSV_COLUMNS]
    for r in rows:
        evals = ";".join(str(e) for e in r.checkpoint_evals)
        hvs = ";".join(repr(h) for h in r.checkpoint_hvs)
        lines.append(
            f"{r.instance},{r.algorithm},{r.population},{r.seed},"
            f"{r.final_archive_hv!r},{r.final_pop_hv!r},{evals},{hvs}"
        )
    path.write_text("\n".join(lines) + "\n", encoding="utf-8")
    return path


def emit_errors_csv(summaries: Iterable[RunSummary], path: str | Path) -> Path:
    path = Path(path)
    path.parent.mkdir(parents=True, exist_ok=True)
    lines = ["instance,algorithm,population,seed,error"]
    for s in summaries:
        if s.error is not None:
            err = s.error.replace(",", ";").replace("\n", " ")
            lines.append(f"{s.instance},{s.algorithm},{s.population},{s.seed},{err}")
    path.write_text("\n".join(lines) + "\n", encoding="utf-8")
    return path


# --- report tables ---------------------------------------------------------


def _is_neutral_cfg(t_cfg: dict) -> bool:
    if t_cfg["kind"] == IDENTITY:
        return True
    return t_cfg["kind"] == BETA_CDF and t_cfg["alpha"] == 1.0 and t_cfg["beta"] == 1.0


def transform_family(search_t: dict, objective_t: dict) -> str:
    if search_t["kind"] == SPHERED_ROTATION:
        return "sphered-rotation"
    if search_t["kind"] == BETA_CDF and not _is_neutral_cfg(search_t):
        return "beta-cdf-search"
    if objective_t["kind"] == BETA_CDF and not _is_neutral_cfg(objective_t):
        return "beta-cdf-objective"
    return "identity"


def report_ab_heatmap(
    rows: Sequence[RunRow],
    problem: str,
    algorithm: str,
    space: str = "search",
    population: int | None = None,
) -> dict:
    """Mean final archive HV per (alpha, beta) cell of a Beta-CDF grid.

    Rows qualify when their grid-side transform is a Beta CDF (or neutral,
    which fills the (1, 1) cell) and the other side is neutral. Returns
    alphas/betas ascending and a cells matrix with None marking gaps.
    """
    if space not in ("search", "objective"):
        raise ReportError(f"space must be 'search' or 'objective', got {space!r}")
    per_cell: dict[tuple[float, float], list[float]] = {}
    for r in rows:
        if r.problem != problem or r.algorithm != algorithm:
            continue
        if population is not None and r.population != population:
            continue
        grid_side = r.search_t if space == "search" else r.objective_t
        other = r.objective_t if space == "search" else r.search_t
        if not _is_neutral_cfg(other):
            continue
        if grid_side["kind"] == BETA_CDF:
            cell = (grid_side["alpha"], grid_side["beta"])
        elif grid_side["kind"] == IDENTITY:
            cell = (1.0, 1.0)
        else:
            continue
        per_cell.setdefault(cell, []).append(r.final_archive_hv)
    if not per_cell:
        raise ReportError(
            f"no grid runs for problem={problem} algorithm={algorithm} space={space}"
        )
    alphas = sorted({a for a, _ in per_cell})
    betas = sorted({b for _, b in per_cell})
    cells = [
        [
            (float(np.mean(per_cell[(a, b)])) if (a, b) in per_cell else None)
            for b in betas
        ]
        for a in alphas
    ]
    return {"problem": problem, "algorithm": algorithm, "space": space,
            "alphas": alphas, "betas": betas, "cells": cells}


def report_relative_hv(rows: Sequence[RunRow]) -> list[dict]:
    """Mean final-population HV relative to the untransformed base runs.

    Per-run ratios are taken against the mean base HV of the matching
    (problem, algorithm, population); instantiations get equal weight, then
    problems are averaged within each (suite, dim, algorithm, family).
    """
    base_hv: dict[tuple[str, str, int], list[float]] = {}
    for r in rows:
        if transform_family(r.search_t, r.objective_t) == "identity":
            base_hv.setdefault((r.problem, r.algorithm, r.population), []).append(
                r.final_pop_hv
            )
    base_mean = {k: float(np.mean(v)) for k, v in base_hv.items()}
    # per-instantiation mean ratio
    inst_ratios: dict[tuple[str, str, str, int, str], list[float]] = {}
    for r in rows:
        key = (r.problem, r.algorithm, r.population)
        if key not in base_mean:
            raise ReportError(
                f"missing base (identity) runs for problem={r.problem} "
                f"algorithm={r.algorithm} population={r.population}"
            )
        if base_mean[key] <= 0.0:
            raise ReportError(f"degenerate base hypervolume for {key}")
        family = transform_family(r.search_t, r.objective_t)
        inst_key = (r.problem, r.algorithm, r.instance, r.population, family)
        inst_ratios.setdefault(inst_key, []).append(r.final_pop_hv / base_mean[key])
    # instantiation -> problem -> (suite, dim, algorithm, family)
    per_problem: dict[tuple[str, str, str], list[float]] = {}
    for (problem, algorithm, _inst, _pop, family), ratios in inst_ratios.items():
        per_problem.setdefault((problem, algorithm, family), []).append(
            float(np.mean(ratios))
        )
    per_group: dict[tuple[str, int, str, str], list[float]] = {}
    for (problem, algorithm, family), values in per_problem.items():
        pid = parse_problem_id(problem)
        per_group.setdefault((pid.suite, pid.dim, algorithm, family), []).append(
            float(np.mean(values))
        )
    return [
        {
            "suite": suite,
            "dim": dim,
            "algorithm": algorithm,
            "family": family,
            "relative_hv": float(np.mean(values)),
            "n_problems": len(values),
        }
        for (suite, dim, algorithm, family), values in sorted(per_group.items())
    ]


def report_hv_over_time(
    rows: Sequence[RunRow], problem: str, transform: str
) -> list[dict]:
    """Long-format archive-HV curves for one (problem, transform pair).

    `transform` is the descriptor suffix 's:<search>__o:<objective>' of the
    instance. Emits one record per (algorithm, population, eval) per run
    plus a mean series.
    """
    wanted = f"{problem}__{transform}"
    selected = [r for r in rows if r.instance == wanted]
    out: list[dict] = []
    groups: dict[tuple[str, int], list[RunRow]] = {}
    for r in selected:
        groups.setdefault((r.algorithm, r.population), []).append(r)
    for (algorithm, population), members in sorted(groups.items()):
        for r in members:
            for ev, hv in zip(r.checkpoint_evals, r.checkpoint_hvs):
                out.append(
                    {
                        "algorithm": algorithm,
                        "population": population,
                        "eval": ev,
                        "series": f"seed{r.seed}",
                        "hv": hv,
                    }
                )
        grid = members[0].checkpoint_evals
        for i, ev in enumerate(grid):
            out.append(
                {
                    "algorithm": algorithm,
                    "population": population,
                    "eval": ev,
                    "series": "mean",
                    "hv": float(np.mean([r.checkpoint_hvs[i] for r in members])),
                }
            )
    return out


def full_matrix_config(
    dims: Sequence[int] = (2,),
    output_dir: str | None = None,
    rotation_seeds: Sequence[int] = (3, 5, 7, 11),
    grid_values: Sequence[float] = (0.2, 0.5, 1.0, 2.0, 5.0),
    populations: Sequence[int] = (10, 100),
    budget: int = 5000,
    repetitions: int = 10,
) -> ExperimentConfig:
    """The full experimental matrix restricted to the given dimensions."""
    problems = [f"all-d{d}" for d in dims]
    search = (
        [{"kind": "beta_cdf_grid", "values": list(grid_values)}]
        + [{"kind": IDENTITY}]
        + [{"kind": SPHERED_ROTATION, "seed": s} for s in rotation_seeds]
    )
    objective = [{"kind": "beta_cdf_grid", "values": list(grid_values)}]
    algorithms = [
        {"name": name, "population": pop}
        for name in ALGORITHM_NAMES
        for pop in populations
    ]
    return ExperimentConfig(
        problems=problems,
        search_transforms=search,
        objective_transforms=objective,
        algorithms=algorithms,
        budget=budget,
        repetitions=repetitions,
        output_dir=output_dir or os.environ.get(OUTPUT_DIR_ENV, "mobench-out"),
    )
