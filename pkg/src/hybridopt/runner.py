"""Experiment orchestration: the BO loop, baselines, ablations, and logging.

Objectives are minimized at the reporting boundary; internally the GP/EI
machinery maximizes the negated objective. Every method evaluates exactly
n_init + budget points; acquisition optimization only queries the surrogate.
"""

from __future__ import annotations

import time
from dataclasses import dataclass, field

import numpy as np

from . import acq, afo, bench, gp, hyper, rbfgp, space

METHODS = ("hybo", "hybo_no_marg", "random", "cont_bo", "vanilla_bo")


@dataclass(frozen=True)
class RunConfig:
    benchmark: str
    method: str
    budget: int
    n_init: int = 5
    seed: int = 0
    max_order: int | str = "full"
    afo: afo.AfoConfig = field(default_factory=afo.AfoConfig)
    n_hyper_samples: int = 10
    burn_in: int = 50
    output_path: str | None = None

    def __post_init__(self):
        if self.method not in METHODS:
            raise ValueError(f"method must be one of {METHODS}")
        if self.budget < 1 or self.n_init < 1:
            raise ValueError("budget and n_init must be >= 1")
        if self.max_order != "full" and (not isinstance(self.max_order, int)
                                         or self.max_order < 1):
            raise ValueError("max_order must be 'full' or a positive int")


@dataclass
class IterRecord:
    index: int
    point: space.HybridPoint
    d_raw: np.ndarray
    c_raw: np.ndarray
    y: float
    best: float
    fit_s: float = 0.0
    sample_s: float = 0.0
    afo_s: float = 0.0


@dataclass
class RunLog:
    config: RunConfig
    spec: space.SpaceSpec
    records: list[IterRecord] = field(default_factory=list)
    total_s: float = 0.0

    @property
    def best(self) -> float:
        return min(r.y for r in self.records)

    @property
    def best_record(self) -> IterRecord:
        return min(self.records, key=lambda r: r.y)

    def sample_time(self) -> float:
        return sum(r.sample_s for r in self.records)


def _resolve_max_order(cfg: RunConfig, spec: space.SpaceSpec) -> int:
    if cfg.max_order == "full" or cfg.max_order is None:
        return spec.dim
    return min(int(cfg.max_order), spec.dim)


def _record(log: RunLog, fn: bench.BenchmarkFn, point: space.HybridPoint,
            **times) -> float:
    y = fn.evaluate(point)
    best = min(y, log.records[-1].best) if log.records else y
    d_raw = fn.discrete_raw(point.x_d)
    c_raw = (space.denormalize(fn.spec, point.xc_array)
             if fn.spec.n else np.zeros(0))
    log.records.append(IterRecord(index=len(log.records), point=point,
                                  d_raw=d_raw, c_raw=c_raw, y=y, best=best,
                                  **times))
    return y


def _init_design(log: RunLog, fn: bench.BenchmarkFn, cfg: RunConfig,
                 rng: np.random.Generator):
    for _ in range(cfg.n_init):
        _record(log, fn, space.sample_uniform(fn.spec, rng))


def run_bo(cfg: RunConfig) -> RunLog:
    """Full BO loop with the hybrid additive-kernel surrogate.

    hybo marginalizes the acquisition over slice-sampled hyper posteriors;
    hybo_no_marg uses a single MAP hyper estimate (warm-started refits after
    the first iteration).
    """
    if cfg.method not in ("hybo", "hybo_no_marg"):
        raise ValueError("run_bo handles hybo / hybo_no_marg only")
    fn = bench.lookup(cfg.benchmark)
    spec = fn.spec
    rng = np.random.default_rng(cfg.seed)
    priors = hyper.HyperPriorSpec()
    max_order = _resolve_max_order(cfg, spec)
    log = RunLog(config=cfg, spec=spec)
    t_start = time.perf_counter()
    _init_design(log, fn, cfg, rng)
    warm_hypers = None
    try:
        for _ in range(cfg.budget):
            points = [r.point for r in log.records]
            y_int = -np.array([r.y for r in log.records])
            t0 = time.perf_counter()
            if cfg.method == "hybo":
                samples = hyper.posterior_samples(
                    points, y_int, spec, priors, cfg.n_hyper_samples,
                    cfg.burn_in, rng, max_order=max_order, init=warm_hypers)
                warm_hypers = samples[-1].hypers
            else:
                if warm_hypers is None:
                    h = hyper.fit_map(points, y_int, spec, priors, rng,
                                      max_order=max_order, n_starts=8,
                                      rounds=10)
                else:
                    # cheap warm refit: the MAP moves little per new point
                    h = hyper.fit_map(points, y_int, spec, priors, rng,
                                      max_order=max_order, n_starts=1,
                                      rounds=3, init=warm_hypers)
                if warm_hypers is not None:
                    # warm-started refit: keep the better of old and new
                    target = hyper.make_log_target(points, y_int, spec,
                                                   priors, max_order)
                    if target(hyper.pack(warm_hypers)) > target(hyper.pack(h)):
                        h = warm_hypers
                warm_hypers = h
                samples = [hyper.HyperSample(h, 0.0)]
            sample_s = time.perf_counter() - t0
            t0 = time.perf_counter()
            models = [gp.fit(points, y_int, s.hypers, spec) for s in samples]
            fit_s = time.perf_counter() - t0
            ctx = acq.AcquisitionContext(models=tuple(models),
                                         incumbent_best=float(y_int.max()))
            incumbent = points[int(np.argmax(y_int))]

            def af(xd, xc):
                return acq.marginalized_af_batch(ctx, xd, xc)

            t0 = time.perf_counter()
            x_next = afo.optimize_acquisition(af, spec, cfg.afo, rng,
                                              warm_start=incumbent)
            afo_s = time.perf_counter() - t0
            _record(log, fn, x_next, fit_s=fit_s, sample_s=sample_s,
                    afo_s=afo_s)
    finally:
        log.total_s = time.perf_counter() - t_start
        if cfg.output_path:
            emit(log, cfg.output_path)
    return log


def run_baseline(cfg: RunConfig) -> RunLog:
    """Baselines: uniform random, Cont-BO, and Vanilla BO.

    Cont-BO relaxes discrete variables to continuous for both modeling and
    acquisition optimization (proposals rounded to the nearest category for
    evaluation). Vanilla BO keeps the RBF-over-everything surrogate but uses
    the alternating hybrid acquisition optimizer.
    """
    if cfg.method not in ("random", "cont_bo", "vanilla_bo"):
        raise ValueError("run_baseline handles random / cont_bo / vanilla_bo")
    fn = bench.lookup(cfg.benchmark)
    spec = fn.spec
    rng = np.random.default_rng(cfg.seed)
    log = RunLog(config=cfg, spec=spec)
    t_start = time.perf_counter()
    _init_design(log, fn, cfg, rng)
    warm_z = None
    try:
        for _ in range(cfg.budget):
            if cfg.method == "random":
                _record(log, fn, space.sample_uniform(spec, rng))
                continue
            points = [r.point for r in log.records]
            y_int = -np.array([r.y for r in log.records])
            xd, xc = _encode(points, spec)
            x_relaxed = rbfgp.embed(spec, xd, xc)
            t0 = time.perf_counter()
            if warm_z is None:
                model, warm_z = rbfgp.fit_map(x_relaxed, y_int, rng)
            else:
                # warm-started refit from last iteration's optimum
                model, warm_z = rbfgp.fit_map(x_relaxed, y_int, rng,
                                              init=warm_z, n_starts=1,
                                              rounds=5)
            sample_s = time.perf_counter() - t0
            best_int = float(y_int.max())
            incumbent = points[int(np.argmax(y_int))]
            t0 = time.perf_counter()
            if cfg.method == "cont_bo":
                def f_all(z_batch):
                    mean, var = rbfgp.predict_batch(model, z_batch)
                    return acq.expected_improvement(mean, var, best_int)

                z0 = rbfgp.embed(spec, incumbent.xd_array.reshape(1, -1),
                                 incumbent.xc_array.reshape(1, -1))[0]
                z_best, _ = afo.cmaes_maximize(f_all, spec.dim, cfg.afo, rng,
                                               x0=z0)
                x_next = space.HybridPoint(
                    tuple(rbfgp.round_to_categories(spec, z_best[:spec.m])),
                    tuple(z_best[spec.m:]))
            else:  # vanilla_bo
                def af(xd_b, xc_b):
                    z = rbfgp.embed(spec, xd_b, xc_b)
                    mean, var = rbfgp.predict_batch(model, z)
                    return acq.expected_improvement(mean, var, best_int)

                x_next = afo.optimize_acquisition(af, spec, cfg.afo, rng,
                                                  warm_start=incumbent)
            afo_s = time.perf_counter() - t0
            _record(log, fn, x_next, sample_s=sample_s, afo_s=afo_s)
    finally:
        log.total_s = time.perf_counter() - t_start
        if cfg.output_path:
            emit(log, cfg.output_path)
    return log


def run(cfg: RunConfig) -> RunLog:
    if cfg.method in ("hybo", "hybo_no_marg"):
        return run_bo(cfg)
    return run_baseline(cfg)


def _encode(points, spec):
    from . import kernel
    return kernel.encode_points(points, spec)


# ---------------------------------------------------------------------------
# Surrogate mean-absolute-error ablation.
# ---------------------------------------------------------------------------

def fit_surrogate_map(points, ys_min, spec, rng, max_order=None):
    """MAP-mode hybrid surrogate on internal (negated) targets."""
    priors = hyper.HyperPriorSpec()
    h = hyper.fit_map(points, -np.asarray(ys_min, dtype=float), spec, priors,
                      rng, max_order=max_order, n_starts=4, rounds=10)
    return gp.fit(points, -np.asarray(ys_min, dtype=float), h, spec)


def surrogate_mae(model, test_points, test_ys_min, spec) -> float:
    from . import kernel
    xd, xc = kernel.encode_points(test_points, spec)
    mean, _ = gp.predict_batch(model, xd, xc)
    return float(np.mean(np.abs(-mean - np.asarray(test_ys_min, dtype=float))))


def surrogate_mae_experiment(benchmark: str, train_sizes, seeds,
                             test_size: int = 200, max_order=None):
    """Held-out MAE of the MAP-mode surrogate per (seed, train size).

    Returns (rows, aggregates): rows are per-cell dicts, aggregates map each
    train size to (mean MAE, two standard errors) across seeds.
    """
    fn = bench.lookup(benchmark)
    spec = fn.spec
    rows = []
    for seed in seeds:
        rng = np.random.default_rng(seed)
        test_points = [space.sample_uniform(spec, rng) for _ in range(test_size)]
        test_ys = [fn.evaluate(p) for p in test_points]
        for size in train_sizes:
            train_points = [space.sample_uniform(spec, rng) for _ in range(size)]
            train_ys = [fn.evaluate(p) for p in train_points]
            model = fit_surrogate_map(train_points, train_ys, spec, rng,
                                      max_order=max_order)
            mae = surrogate_mae(model, test_points, test_ys, spec)
            rows.append({"seed": seed, "train_size": size, "mae": mae})
    aggregates = {}
    for size in train_sizes:
        vals = np.array([r["mae"] for r in rows if r["train_size"] == size])
        se = vals.std(ddof=1) / np.sqrt(len(vals)) if len(vals) > 1 else 0.0
        aggregates[size] = (float(vals.mean()), float(2.0 * se))
    return rows, aggregates


# ---------------------------------------------------------------------------
# CSV emission.
# ---------------------------------------------------------------------------

def _config_lines(cfg: RunConfig) -> list[str]:
    a = cfg.afo
    return [
        f"# benchmark = {cfg.benchmark}",
        f"# method = {cfg.method}",
        f"# budget = {cfg.budget}",
        f"# n_init = {cfg.n_init}",
        f"# seed = {cfg.seed}",
        f"# max_order = {cfg.max_order}",
        f"# cma_population = {a.cma_population}",
        f"# cma_sigma0 = {a.cma_sigma0}",
        f"# cma_budget = {a.cma_budget}",
        f"# ls_restarts = {a.ls_restarts}",
        f"# alternations = {a.alternations}",
        f"# n_hyper_samples = {cfg.n_hyper_samples}",
        f"# burn_in = {cfg.burn_in}",
    ]


def csv_header(spec: space.SpaceSpec) -> str:
    cols = ["iter", "y", "best", "fit_s", "sample_s", "afo_s"]
    cols += [f"d_{v.name}" for v in spec.discrete_vars]
    cols += [f"c_{v.name}" for v in spec.continuous_vars]
    return ",".join(cols)


def csv_row(rec: IterRecord) -> str:
    vals = [str(rec.index), repr(rec.y), repr(rec.best),
            repr(rec.fit_s), repr(rec.sample_s), repr(rec.afo_s)]
    vals += [repr(float(v)) for v in rec.d_raw]
    vals += [repr(float(v)) for v in rec.c_raw]
    return ",".join(vals)


def emit(log: RunLog, path) -> None:
    """Write config echo (# comments), CSV body, and a summary trailer."""
    try:
        with open(path, "w") as fh:
            for line in _config_lines(log.config):
                fh.write(line + "\n")
            fh.write(csv_header(log.spec) + "\n")
            for rec in log.records:
                fh.write(csv_row(rec) + "\n")
                fh.flush()
            if log.records:
                fh.write(f"# final_best = {log.best!r}\n")
            fh.write(f"# total_wall_s = {log.total_s!r}\n")
    except OSError as exc:
        raise OSError(f"failed to write run log to {path}: {exc}") from exc


def read_csv(path):
    """Parse an emitted CSV back into (header, rows of floats)."""
    header, rows = None, []
    with open(path) as fh:
        for line in fh:
            line = line.strip()
            if not line or line.startswith("#"):
                continue
            if header is None:
                header = line.split(",")
            else:
                rows.append([float(v) for v in line.split(",")])
    return header, rows
