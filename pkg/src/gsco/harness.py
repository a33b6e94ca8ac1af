"""Experiment orchestration: instance generation, runs, and comparisons.

Run configuration is a flat ``key=value`` text file ('#' starts a comment);
command-line ``key=value`` arguments override file entries, and the
``--seed`` flag overrides the global ``seed`` key. Every run directory
receives a config echo, the trace CSV, a summary JSON, and a rendered
convergence figure.
"""

from __future__ import annotations

import csv
import json
from pathlib import Path

from .baselines import PgdConfig, best_pgd, random_pgd
from .constraints import DEFAULT_ENUMERATION_CAP, ConstraintModel
from .errors import ConfigError
from .graph import load_edge_list, small_world_graph
from .objective import (
    InstanceSpec,
    generate_instance,
    lipschitz_constant,
    load_instance,
    save_instance,
)
from .plotting import save_convergence_figure
from .solver import SolverConfig, solve

__all__ = [
    "parse_config_file",
    "parse_overrides",
    "cmd_generate",
    "cmd_solve",
    "cmd_compare",
    "read_trace_csv",
]

METHODS = ("dmo_fw", "dmo_accfw", "random_pgd", "best_pgd")


def parse_config_file(path: str | Path) -> dict[str, str]:
    cfg: dict[str, str] = {}
    for line_no, raw in enumerate(Path(path).read_text(encoding="utf-8").splitlines(), 1):
        text = raw.strip()
        if not text or text.startswith("#"):
            continue
        if "=" not in text:
            raise ConfigError(f"{path}:{line_no}: expected key=value, got {text!r}")
        key, _, value = text.partition("=")
        cfg[key.strip()] = value.strip()
    return cfg


def parse_overrides(pairs: list[str]) -> dict[str, str]:
    cfg: dict[str, str] = {}
    for pair in pairs:
        if "=" not in pair:
            raise ConfigError(f"expected key=value override, got {pair!r}")
        key, _, value = pair.partition("=")
        cfg[key.strip()] = value.strip()
    return cfg


def _get(cfg: dict[str, str], key: str, default=None, required: bool = False) -> str | None:
    if key in cfg:
        return cfg[key]
    if required:
        raise ConfigError(f"missing required config key {key!r}")
    return default


def _get_int(cfg, key, default=None, required=False) -> int | None:
    raw = _get(cfg, key, None, required)
    if raw is None:
        return default
    try:
        return int(raw)
    except ValueError:
        raise ConfigError(f"config key {key!r} must be an integer, got {raw!r}") from None


def _get_float(cfg, key, default=None, required=False) -> float | None:
    raw = _get(cfg, key, None, required)
    if raw is None:
        return default
    try:
        return float(raw)
    except ValueError:
        raise ConfigError(f"config key {key!r} must be a number, got {raw!r}") from None


def _get_choice(cfg, key, choices, default=None, required=False) -> str | None:
    raw = _get(cfg, key, None, required)
    if raw is None:
        return default
    if raw not in choices:
        raise ConfigError(f"config key {key!r} must be one of {choices}, got {raw!r}")
    return raw


def _global_seed(cfg: dict[str, str]) -> int:
    return _get_int(cfg, "seed", 0)


def _build_generation_model(cfg: dict[str, str], out_dir: Path) -> tuple[ConstraintModel, int]:
    variant = _get_choice(cfg, "model.variant", ("gsubgraph", "cardinality"), required=True)
    radius = _get_float(cfg, "model.C", 1.0)
    s = _get_int(cfg, "model.s", required=True)
    if variant == "cardinality":
        dim = _get_int(cfg, "instance.d", required=True)
        return ConstraintModel.cardinality(dim=dim, s=s, radius=radius), dim
    g = _get_int(cfg, "model.g", required=True)
    graph_path = _get(cfg, "model.graph_path")
    if graph_path is not None:
        graph = load_edge_list(graph_path)
    else:
        nodes = _get_int(cfg, "graph.nodes", required=True)
        edges = _get_int(cfg, "graph.edges", required=True)
        graph = small_world_graph(nodes, edges, _get_int(cfg, "graph.seed", _global_seed(cfg)))
    dim = _get_int(cfg, "instance.d", graph.node_count)
    if dim != graph.node_count:
        raise ConfigError(
            f"instance.d={dim} does not match graph node count {graph.node_count}"
        )
    return ConstraintModel.g_subgraph(graph, s=s, g=g, radius=radius), dim


def cmd_generate(cfg: dict[str, str], out_dir: str | Path) -> str:
    """Generate an instance into ``out_dir``; returns the fingerprint."""
    out_dir = Path(out_dir)
    out_dir.mkdir(parents=True, exist_ok=True)
    model, dim = _build_generation_model(cfg, out_dir)
    spec = InstanceSpec(
        dim=dim,
        n_obs=_get_int(cfg, "instance.n", required=True),
        sigma=_get_float(cfg, "instance.sigma", 0.01),
        model=model,
        seed=_get_int(cfg, "instance.seed", _global_seed(cfg)),
    )
    obj, x_star = generate_instance(spec)
    fingerprint = save_instance(out_dir, spec, obj, x_star)
    print(f"generated instance in {out_dir} (d={dim}, n={spec.n_obs})")
    print(f"fingerprint {fingerprint}")
    return fingerprint


def _model_with_overrides(cfg: dict[str, str], model: ConstraintModel) -> ConstraintModel:
    if _get(cfg, "model.variant") is not None and cfg["model.variant"] != model.variant:
        raise ConfigError("model.variant cannot be overridden at solve time")
    s = _get_int(cfg, "model.s", model.s)
    radius = _get_float(cfg, "model.C", model.radius)
    if model.graph is not None:
        g = _get_int(cfg, "model.g", model.g)
        return ConstraintModel.g_subgraph(model.graph, s=s, g=g, radius=radius)
    return ConstraintModel.cardinality(dim=model.dim, s=s, radius=radius)


def _resolve_lipschitz(cfg, obj, key: str) -> float:
    given = _get_float(cfg, key)
    if given is not None:
        return given
    return lipschitz_constant(obj, tol=1e-9)


def _echo_lines(cfg: dict[str, str]) -> str:
    return "".join(f"{k}={cfg[k]}\n" for k in sorted(cfg))


def cmd_solve(cfg: dict[str, str], out_dir: str | Path) -> dict:
    """Run one configured method; writes trace, summary, echo, and figure."""
    out_dir = Path(out_dir)
    out_dir.mkdir(parents=True, exist_ok=True)
    instance_path = Path(_get(cfg, "instance.path", required=True)).resolve()
    spec, obj, _x_star = load_instance(instance_path)
    model = _model_with_overrides(cfg, spec.model)
    method = _get_choice(cfg, "method", METHODS, required=True)
    seed = _global_seed(cfg)
    max_iters = _get_int(cfg, "solver.max_iters", 500)
    rel_tol = _get_float(cfg, "solver.rel_tol", 1e-6)
    cap = _get_int(cfg, "solver.enumeration_cap", DEFAULT_ENUMERATION_CAP)

    echo = dict(cfg)
    echo["instance.path"] = str(instance_path)
    echo["method"] = method
    echo.setdefault("seed", str(seed))

    if method in ("dmo_fw", "dmo_accfw"):
        variant = "fw" if method == "dmo_fw" else "accfw"
        default_dmo = "topg" if model.graph is not None else "exact"
        dmo = _get_choice(cfg, "dmo.variant", ("exact", "topg", "topg_optimal"), default_dmo)
        step_rule = _get_choice(
            cfg,
            "solver.step_rule",
            ("open_loop", "backtracking", "demyanov_rubinov"),
            "open_loop",
        )
        lipschitz = None
        if variant == "accfw" or step_rule == "demyanov_rubinov":
            lipschitz = _resolve_lipschitz(cfg, obj, "solver.L")
            echo["solver.L"] = repr(lipschitz)
        config = SolverConfig(
            variant=variant,
            option=_get_choice(cfg, "solver.option", ("I", "II"), "I"),
            step_rule=step_rule,
            beta=_get_float(cfg, "solver.beta", 0.5),
            eta_init=_get_float(cfg, "solver.eta_init", 1.0),
            lipschitz=lipschitz,
            delta=_get_float(cfg, "solver.delta"),
            max_iters=max_iters,
            rel_tol=rel_tol,
            dmo=dmo,
            theta=_get_int(cfg, "dmo.theta", 5),
            dmo_seed=_get_int(cfg, "dmo.seed", seed),
            enumeration_cap=cap,
        )
        echo["dmo.variant"] = dmo
        echo["dmo.seed"] = str(config.dmo_seed)
        _x_best, _f_best, trace = solve(config, obj, model)
    else:
        step_size = _get_float(cfg, "pgd.step_size")
        lipschitz = None
        if step_size is None:
            lipschitz = _resolve_lipschitz(cfg, obj, "pgd.L")
            echo["pgd.L"] = repr(lipschitz)
        config = PgdConfig(
            step_size=step_size,
            lipschitz=lipschitz,
            max_iters=max_iters,
            rel_tol=rel_tol,
            seed=_get_int(cfg, "pgd.seed", seed),
            enumeration_cap=cap,
        )
        echo["pgd.seed"] = str(config.seed)
        runner = random_pgd if method == "random_pgd" else best_pgd
        _x_best, _f_best, trace = runner(obj, model, config)

    (out_dir / "config.echo").write_text(_echo_lines(echo), encoding="utf-8")
    trace.to_csv(out_dir / "trace.csv")
    summary = trace.summary_dict(config_echo=echo)
    (out_dir / "summary.json").write_text(
        json.dumps(summary, indent=2, sort_keys=True) + "\n", encoding="utf-8"
    )
    ts = [r.t for r in trace.records]
    fs = [r.objective for r in trace.records]
    save_convergence_figure([(method, ts, fs)], out_dir / "convergence.png")
    print(
        f"{method}: best_objective={trace.best_objective:.6e} at t={trace.best_t} "
        f"({trace.termination}); outputs in {out_dir}"
    )
    return summary


def read_trace_csv(path: str | Path) -> list[dict]:
    with open(path, newline="", encoding="utf-8") as fh:
        return [
            {
                "t": int(row["t"]),
                "eta": float(row["eta"]),
                "objective": float(row["objective"]),
                "captured_norm": float(row["captured_norm"]),
                "support_size": int(row["support_size"]),
                "shrinks": int(row["shrinks"]),
                "wall_ns": int(row["wall_ns"]),
            }
            for row in csv.DictReader(fh)
        ]


def cmd_compare(
    config_paths: list[str | Path],
    overrides: dict[str, str],
    out_dir: str | Path,
) -> list[tuple[str, float]]:
    """Run every member config and emit aligned comparison outputs.

    All configs must reference the same instance. Writes a long-format
    ``comparison.csv`` (method,t,objective) plus an overlay figure, and
    prints the final-objective ranking. Returns (label, best_objective)
    pairs in ranked order.
    """
    if len(config_paths) < 2:
        raise ConfigError("compare needs at least 2 run configs")
    out_dir = Path(out_dir)
    out_dir.mkdir(parents=True, exist_ok=True)

    members: list[tuple[str, dict[str, str]]] = []
    seen_labels: set[str] = set()
    for i, path in enumerate(config_paths):
        cfg = parse_config_file(path)
        cfg.update(overrides)
        label = Path(path).stem
        if label in seen_labels:
            label = f"{label}_{i}"
        seen_labels.add(label)
        members.append((label, cfg))

    instances = {
        str(Path(_get(cfg, "instance.path", required=True)).resolve())
        for _, cfg in members
    }
    if len(instances) != 1:
        raise ConfigError(f"compare configs reference different instances: {sorted(instances)}")

    results = []
    for label, cfg in members:
        run_dir = out_dir / label
        summary = cmd_solve(cfg, run_dir)
        rows = read_trace_csv(run_dir / "trace.csv")
        results.append((label, summary["best_objective"], rows))

    with open(out_dir / "comparison.csv", "w", newline="", encoding="utf-8") as fh:
        writer = csv.writer(fh)
        writer.writerow(["method", "t", "objective"])
        for label, _best, rows in results:
            for row in rows:
                writer.writerow([label, row["t"], repr(row["objective"])])

    save_convergence_figure(
        [
            (label, [r["t"] for r in rows], [r["objective"] for r in rows])
            for label, _best, rows in results
        ],
        out_dir / "comparison.png",
    )

    ranking = sorted(((label, best) for label, best, _ in results), key=lambda kv: kv[1])
    print("final-objective ranking:")
    for rank, (label, best) in enumerate(ranking, start=1):
        print(f"  {rank}. {label}: {best:.6e}")
    return ranking
