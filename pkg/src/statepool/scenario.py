"""Two-agent coarse-graining simulation.

Wanda and Theo share a prior for a quantum system, then interact with it
through potentially different (and defective) detectors while the system
undergoes unitary dynamics.  Each pipeline produces a posterior; the
simulation decides whether the two posteriors are compatible and, when
they are, attempts to pool them against the shared prior.  Incompatibility
and non-Hermitian pooling products are reported outcomes, never exceptions.
"""

from __future__ import annotations

from dataclasses import dataclass, field

import numpy as np

from .compatibility import CompatibilityVerdict, quantum_compatible
from .errors import DimensionMismatchError, StatePoolError
from .linalg import (
    DEFAULT_HERM_TOL,
    DEFAULT_RANK_TOL,
    as_matrix,
    check_density,
    max_norm,
)
from .pooling import PoolingReport, quantum_pool


@dataclass(frozen=True)
class KrausChannel:
    """CPTP map as a finite Kraus decomposition: rho -> sum K rho K†."""

    kraus_ops: tuple

    def __post_init__(self):
        ops = tuple(np.asarray(k, dtype=complex) for k in self.kraus_ops)
        if not ops:
            raise ValueError("a channel needs at least one Kraus operator")
        d_out, d_in = ops[0].shape
        if any(k.shape != (d_out, d_in) for k in ops):
            raise DimensionMismatchError("Kraus operators have inconsistent shapes")
        comp = sum(k.conj().T @ k for k in ops)
        if max_norm(comp - np.eye(d_in)) > 1e-10:
            raise ValueError(
                f"Kraus operators violate trace preservation (residual {max_norm(comp - np.eye(d_in)):.3e})"
            )
        object.__setattr__(self, "kraus_ops", ops)

    @property
    def dim_in(self) -> int:
        return self.kraus_ops[0].shape[1]

    @property
    def dim_out(self) -> int:
        return self.kraus_ops[0].shape[0]


@dataclass(frozen=True)
class UnitaryDynamics:
    """Closed evolution rho -> U rho U†."""

    u: np.ndarray = field(repr=False)

    def __post_init__(self):
        u = as_matrix(self.u)
        if max_norm(u.conj().T @ u - np.eye(u.shape[0])) > 1e-10:
            raise ValueError("matrix is not unitary")
        object.__setattr__(self, "u", u)

    @property
    def dim(self) -> int:
        return self.u.shape[0]


@dataclass(frozen=True)
class AgentPipeline:
    """Ordered steps (unitaries and channels) one agent applies to the prior."""

    name: str
    steps: tuple = ()

    def __post_init__(self):
        steps = tuple(self.steps)
        for s in steps:
            if not isinstance(s, (UnitaryDynamics, KrausChannel)):
                raise TypeError(f"pipeline step must be a unitary or a channel, got {type(s)}")
        d = None
        for s in steps:
            d_in = s.dim if isinstance(s, UnitaryDynamics) else s.dim_in
            d_out = s.dim if isinstance(s, UnitaryDynamics) else s.dim_out
            if d is not None and d_in != d:
                raise DimensionMismatchError(
                    f"pipeline {self.name!r}: step input dim {d_in} != previous output dim {d}"
                )
            d = d_out
        object.__setattr__(self, "steps", steps)

    def output_dim(self, input_dim: int) -> int:
        d = input_dim
        for s in self.steps:
            d = s.dim if isinstance(s, UnitaryDynamics) else s.dim_out
        return d


@dataclass(frozen=True)
class ScenarioConfig:
    """Prior, the two agents' pipelines, tolerances and the generation seed.

    ``pool_against_evolved`` switches the pooling prior from the shared
    original prior to the prior pushed through ``evolved_by`` (a unitary),
    for exploring the alternative reading of the narrative.
    """

    prior: np.ndarray = field(repr=False)
    pipelines: tuple = ()
    rank_tol: float = DEFAULT_RANK_TOL
    herm_tol: float = DEFAULT_HERM_TOL
    seed: int = 0
    pool_against_evolved: bool = False
    evolved_by: UnitaryDynamics | None = None

    def __post_init__(self):
        prior = check_density(self.prior)
        pipelines = tuple(self.pipelines)
        if len(pipelines) != 2:
            raise ValueError(f"exactly two agent pipelines required, got {len(pipelines)}")
        d = prior.shape[0]
        outs = {p.output_dim(d) for p in pipelines}
        if outs != {d}:
            raise DimensionMismatchError(
                f"pipeline output dims {outs} must equal the prior dim {d} used for pooling"
            )
        if self.pool_against_evolved and self.evolved_by is None:
            raise ValueError("pool_against_evolved requires evolved_by")
        object.__setattr__(self, "prior", prior)
        object.__setattr__(self, "pipelines", pipelines)


@dataclass(frozen=True)
class ScenarioResult:
    sigma1: np.ndarray = field(repr=False)
    sigma2: np.ndarray = field(repr=False)
    verdict: CompatibilityVerdict = None
    pooling: PoolingReport | None = None
    pooling_error: dict | None = None


def apply_channel(ch: KrausChannel, rho) -> np.ndarray:
    """sum K rho K†; preserves trace and positivity."""
    r = as_matrix(rho)
    if r.shape[0] != ch.dim_in:
        raise DimensionMismatchError(
            f"channel input dim {ch.dim_in} != state dim {r.shape[0]}"
        )
    out = sum(k @ r @ k.conj().T for k in ch.kraus_ops)
    return (out + out.conj().T) / 2


def evolve(u: UnitaryDynamics, rho) -> np.ndarray:
    """U rho U†; preserves the spectrum."""
    r = as_matrix(rho)
    if r.shape[0] != u.dim:
        raise DimensionMismatchError(f"unitary dim {u.dim} != state dim {r.shape[0]}")
    return u.u @ r @ u.u.conj().T


def run_pipeline(p: AgentPipeline, prior) -> np.ndarray:
    """Left-to-right composition of the pipeline's steps applied to the prior."""
    rho = as_matrix(prior)
    for s in p.steps:
        rho = evolve(s, rho) if isinstance(s, UnitaryDynamics) else apply_channel(s, rho)
    return rho


def run_scenario(cfg: ScenarioConfig) -> ScenarioResult:
    """Run both pipelines, decide compatibility, attempt pooling.

    Never raises on incompatibility or pooling failure: those are reported
    in the result (``pooling_error`` carries the exception class and
    message, plus the Hermiticity residual when available).
    """
    sigma1 = run_pipeline(cfg.pipelines[0], cfg.prior)
    sigma2 = run_pipeline(cfg.pipelines[1], cfg.prior)
    verdict = quantum_compatible(sigma1, sigma2, cfg.rank_tol)
    pooling = None
    pooling_error = None
    if verdict.compatible:
        pool_prior = cfg.prior
        if cfg.pool_against_evolved:
            pool_prior = evolve(cfg.evolved_by, cfg.prior)
        try:
            pooling = quantum_pool(
                pool_prior, sigma1, sigma2,
                rank_tol=cfg.rank_tol, herm_tol=cfg.herm_tol,
            )
        except StatePoolError as exc:
            pooling_error = {"error": type(exc).__name__, "message": str(exc)}
            if hasattr(exc, "residual"):
                pooling_error["residual"] = exc.residual
    else:
        pooling_error = {"error": "IncompatibleAssignmentsError",
                         "message": verdict.diagnostics}
    return ScenarioResult(sigma1, sigma2, verdict, pooling, pooling_error)


# ---------------------------------------------------------------------------
# Random instance generation (deterministic in the seed)


def random_density(dim: int, rng) -> np.ndarray:
    """Full-rank-almost-surely random density matrix: normalize G† G."""
    g = rng.standard_normal((dim, dim)) + 1j * rng.standard_normal((dim, dim))
    rho = g.conj().T @ g
    return rho / np.real(np.trace(rho))


def haar_unitary(dim: int, rng) -> np.ndarray:
    """Haar-distributed unitary via QR of a complex Gaussian, phases fixed."""
    g = rng.standard_normal((dim, dim)) + 1j * rng.standard_normal((dim, dim))
    q, r = np.linalg.qr(g)
    d = np.diagonal(r)
    return q * (d / np.abs(d))


def depolarizing_channel(dim: int, strength: float) -> KrausChannel:
    """Convex mixture of identity and full depolarization with weight ``strength``."""
    p = float(strength)
    if not 0.0 <= p <= 1.0:
        raise ValueError(f"strength {p} outside [0, 1]")
    ops = [np.sqrt(1.0 - p) * np.eye(dim)]
    for i in range(dim):
        for j in range(dim):
            ops.append(np.sqrt(p / dim) * np.outer(np.eye(dim)[:, i], np.eye(dim)[j, :]))
    return KrausChannel(tuple(ops))


def dephasing_channel(dim: int, strength: float) -> KrausChannel:
    """Convex mixture of identity and full dephasing in the computational basis."""
    p = float(strength)
    if not 0.0 <= p <= 1.0:
        raise ValueError(f"strength {p} outside [0, 1]")
    ops = [np.sqrt(1.0 - p) * np.eye(dim)]
    for i in range(dim):
        proj = np.zeros((dim, dim))
        proj[i, i] = 1.0
        ops.append(np.sqrt(p) * proj)
    return KrausChannel(tuple(ops))


def replacement_channel(dim: int, target_index: int) -> KrausChannel:
    """Channel replacing every input with the basis state |target_index>."""
    ops = tuple(
        np.outer(np.eye(dim)[:, target_index], np.eye(dim)[i, :]) for i in range(dim)
    )
    return KrausChannel(ops)


def random_instance(dim: int, seed, noise_strength: float = 0.5) -> ScenarioConfig:
    """Reproducible pseudo-random scenario.

    Prior from a seeded Gaussian G† G; each agent gets a Haar unitary step
    followed by a detector channel (Wanda dephasing, Theo depolarizing)
    with the given noise weight.  Same seed, bit-identical config.
    """
    if dim < 2:
        raise ValueError(f"dim {dim} < 2")
    rng = np.random.default_rng(seed)
    prior = random_density(dim, rng)
    u1 = UnitaryDynamics(haar_unitary(dim, rng))
    u2 = UnitaryDynamics(haar_unitary(dim, rng))
    steps1 = [u1] + ([dephasing_channel(dim, noise_strength)] if noise_strength > 0 else [])
    steps2 = [u2] + ([depolarizing_channel(dim, noise_strength)] if noise_strength > 0 else [])
    return ScenarioConfig(
        prior=prior,
        pipelines=(
            AgentPipeline("Wanda", tuple(steps1)),
            AgentPipeline("Theo", tuple(steps2)),
        ),
        seed=seed if isinstance(seed, int) else 0,
    )


def adversarial_instance(dim: int, seed) -> ScenarioConfig:
    """Engineered incompatible scenario: the pipelines replace every input
    with orthogonal pure states, so the posteriors' supports are disjoint."""
    if dim < 2:
        raise ValueError(f"dim {dim} < 2")
    rng = np.random.default_rng(seed)
    prior = random_density(dim, rng)
    return ScenarioConfig(
        prior=prior,
        pipelines=(
            AgentPipeline("Wanda", (replacement_channel(dim, 0),)),
            AgentPipeline("Theo", (replacement_channel(dim, 1),)),
        ),
        seed=seed if isinstance(seed, int) else 0,
    )


def batch_report(dims, count: int, noise_grid, seed: int, generator: str = "random"):
    """Fractions of compatible / Hermitian-poolable instances per (dim, noise) cell.

    Deterministic for a fixed seed: instance i in cell (d, g) uses the seed
    sequence [seed, d, g, i].  ``generator`` is "random" or "adversarial".
    Returns a list of row dicts.
    """
    if count < 1:
        raise ValueError("count must be >= 1")
    if generator not in ("random", "adversarial"):
        raise ValueError(f"unknown generator {generator!r}")
    rows = []
    for dim in dims:
        for gi, noise in enumerate(noise_grid):
            n_compat = 0
            n_herm = 0
            residuals = []
            for i in range(count):
                child_seed = [int(seed), int(dim), gi, i]
                if generator == "adversarial":
                    cfg = adversarial_instance(dim, child_seed)
                else:
                    cfg = random_instance(dim, child_seed, noise)
                res = run_scenario(cfg)
                if res.verdict.compatible:
                    n_compat += 1
                    if res.pooling is not None:
                        n_herm += 1
                        residuals.append(res.pooling.hermiticity_residual)
                    elif res.pooling_error and "residual" in res.pooling_error:
                        residuals.append(res.pooling_error["residual"])
            rows.append({
                "dim": int(dim),
                "noise": float(noise),
                "count": int(count),
                "frac_compatible": n_compat / count,
                "frac_hermitian_pooling": n_herm / count,
                "mean_hermiticity_residual": (
                    float(np.mean(residuals)) if residuals else 0.0
                ),
            })
    return rows
