"""Least-squares objective, curvature estimation, and synthetic instances.

Instances serialize to a directory holding ``header.json`` plus CSV dumps
of the sensing matrix (row-major), the observations, and the ground-truth
signal; a g-subgraph model additionally stores its graph as ``graph.txt``.
"""

from __future__ import annotations

import hashlib
import json
import math
from dataclasses import dataclass
from pathlib import Path

import numpy as np

from .constraints import ConstraintModel, random_feasible_support
from .errors import ConfigError, GenerationError, NumericError
from .graph import load_edge_list, save_edge_list

__all__ = [
    "LeastSquaresObjective",
    "InstanceSpec",
    "lipschitz_constant",
    "generate_instance",
    "save_instance",
    "load_instance",
]

# Power iteration gives up after this many matrix applications.
POWER_ITERATION_MAX_ITERS = 10_000


@dataclass(frozen=True)
class LeastSquaresObjective:
    """f(x) = 0.5 * ||A x - y||_2^2 for a dense n x d sensing matrix A."""

    a_mat: np.ndarray
    y: np.ndarray

    def __post_init__(self):
        a = np.asarray(self.a_mat, dtype=float)
        y = np.asarray(self.y, dtype=float)
        if a.ndim != 2 or y.ndim != 1 or a.shape[0] != y.shape[0]:
            raise ConfigError(
                f"shape mismatch: A is {a.shape}, y is {y.shape}"
            )
        if not (np.isfinite(a).all() and np.isfinite(y).all()):
            raise NumericError("objective data contains non-finite entries")
        object.__setattr__(self, "a_mat", a)
        object.__setattr__(self, "y", y)

    @property
    def n_obs(self) -> int:
        return self.a_mat.shape[0]

    @property
    def dim(self) -> int:
        return self.a_mat.shape[1]

    def _check_dim(self, x: np.ndarray) -> None:
        if x.shape != (self.dim,):
            raise ConfigError(f"expected vector of length {self.dim}, got {x.shape}")

    def evaluate(self, x: np.ndarray) -> float:
        self._check_dim(x)
        r = self.a_mat @ x - self.y
        return 0.5 * float(r @ r)

    def gradient(self, x: np.ndarray) -> np.ndarray:
        self._check_dim(x)
        return self.a_mat.T @ (self.a_mat @ x - self.y)


def lipschitz_constant(
    obj: LeastSquaresObjective,
    tol: float = 1e-10,
    max_iters: int = POWER_ITERATION_MAX_ITERS,
) -> float:
    """Largest eigenvalue of A^T A by power iteration.

    Starts from the all-ones vector (no randomness) and stops when the
    Rayleigh quotient changes by a relative amount <= tol. Raises
    NumericError if that never happens within max_iters applications.
    """
    if tol <= 0:
        raise ConfigError(f"tol must be positive, got {tol}")
    a = obj.a_mat
    v = np.ones(obj.dim) / math.sqrt(obj.dim)
    lam_prev = None
    for _ in range(max_iters):
        w = a.T @ (a @ v)
        lam = float(v @ w)
        if lam_prev is not None and abs(lam - lam_prev) <= tol * max(abs(lam), 1e-300):
            return lam
        lam_prev = lam
        nw = float(np.linalg.norm(w))
        if nw == 0.0:
            return 0.0
        v = w / nw
    raise NumericError(
        f"power iteration did not reach relative tolerance {tol} "
        f"within {max_iters} iterations"
    )


@dataclass(frozen=True)
class InstanceSpec:
    """Recipe for a synthetic recovery instance.

    ``model`` fixes the ground-truth support family; seeds split into three
    independent streams (sensing matrix, signal, noise) via
    ``np.random.SeedSequence(seed).spawn(3)``, in that order.
    """

    dim: int
    n_obs: int
    sigma: float
    model: ConstraintModel
    seed: int

    def __post_init__(self):
        if self.n_obs < 1:
            raise ConfigError(f"need n >= 1, got {self.n_obs}")
        if self.sigma < 0:
            raise ConfigError(f"need sigma >= 0, got {self.sigma}")


def generate_instance(spec: InstanceSpec) -> tuple[LeastSquaresObjective, np.ndarray]:
    """Draw (objective, ground-truth signal) from the spec, reproducibly.

    The sensing matrix has i.i.d. N(0, 1) entries scaled by 1/sqrt(n) so
    columns have expected unit norm. The signal is supported on a feasible
    support of the model, filled with i.i.d. N(0, 1) values and rescaled to
    unit norm. Observations are y = A x_star + e with e ~ N(0, sigma^2).
    """
    if spec.model.dim != spec.dim:
        raise GenerationError(
            f"model dimension {spec.model.dim} does not match instance d={spec.dim}"
        )
    seq_a, seq_x, seq_e = np.random.SeedSequence(spec.seed).spawn(3)
    rng_a = np.random.default_rng(seq_a)
    rng_x = np.random.default_rng(seq_x)
    rng_e = np.random.default_rng(seq_e)

    a_mat = rng_a.standard_normal((spec.n_obs, spec.dim)) / math.sqrt(spec.n_obs)
    support = random_feasible_support(spec.model, rng_x)
    if not support:
        raise GenerationError("drew an empty ground-truth support")
    values = rng_x.standard_normal(len(support))
    nrm = float(np.linalg.norm(values))
    if nrm == 0.0:
        raise GenerationError("degenerate zero draw for the signal values")
    x_star = np.zeros(spec.dim)
    x_star[list(support)] = values / nrm
    noise = rng_e.standard_normal(spec.n_obs) * spec.sigma
    y = a_mat @ x_star + noise
    return LeastSquaresObjective(a_mat, y), x_star


_CSV_FMT = "%.17g"


def _model_header(model: ConstraintModel, graph_path: str | None) -> dict:
    return {
        "variant": model.variant,
        "s": model.s,
        "g": model.g,
        "C": model.radius,
        "graph_path": graph_path,
    }


def save_instance(
    directory: str | Path,
    spec: InstanceSpec,
    obj: LeastSquaresObjective,
    x_star: np.ndarray,
) -> str:
    """Write the instance files into ``directory`` and return a fingerprint.

    The fingerprint is the hex SHA-256 over the written files in a fixed
    order; identical specs produce byte-identical files and fingerprints.
    """
    directory = Path(directory)
    directory.mkdir(parents=True, exist_ok=True)
    graph_rel = None
    if spec.model.graph is not None:
        graph_rel = "graph.txt"
        save_edge_list(spec.model.graph, directory / graph_rel)
    header = {
        "d": spec.dim,
        "n": spec.n_obs,
        "sigma": spec.sigma,
        "seed": spec.seed,
        "model": _model_header(spec.model, graph_rel),
        "f_x_star": obj.evaluate(x_star),
    }
    (directory / "header.json").write_text(
        json.dumps(header, indent=2, sort_keys=True) + "\n", encoding="utf-8"
    )
    np.savetxt(directory / "A.csv", obj.a_mat, fmt=_CSV_FMT, delimiter=",")
    np.savetxt(directory / "y.csv", obj.y, fmt=_CSV_FMT, delimiter=",")
    np.savetxt(directory / "x_star.csv", x_star, fmt=_CSV_FMT, delimiter=",")
    digest = hashlib.sha256()
    names = ["header.json", "A.csv", "y.csv", "x_star.csv"]
    if graph_rel:
        names.append(graph_rel)
    for name in names:
        digest.update((directory / name).read_bytes())
    return digest.hexdigest()


def load_instance(
    directory: str | Path,
) -> tuple[InstanceSpec, LeastSquaresObjective, np.ndarray]:
    """Load an instance previously written by :func:`save_instance`."""
    directory = Path(directory)
    header = json.loads((directory / "header.json").read_text(encoding="utf-8"))
    m = header["model"]
    if m["variant"] == "gsubgraph":
        graph = load_edge_list(directory / m["graph_path"])
        model = ConstraintModel.g_subgraph(graph, s=m["s"], g=m["g"], radius=m["C"])
    elif m["variant"] == "cardinality":
        model = ConstraintModel.cardinality(dim=header["d"], s=m["s"], radius=m["C"])
    else:
        raise ConfigError(f"unknown model variant {m['variant']!r}")
    a_mat = np.loadtxt(directory / "A.csv", delimiter=",", ndmin=2)
    y = np.loadtxt(directory / "y.csv", delimiter=",", ndmin=1)
    x_star = np.loadtxt(directory / "x_star.csv", delimiter=",", ndmin=1)
    spec = InstanceSpec(
        dim=header["d"],
        n_obs=header["n"],
        sigma=header["sigma"],
        model=model,
        seed=header["seed"],
    )
    return spec, LeastSquaresObjective(a_mat, y), x_star
