"""JSON interchange for matrices, distributions, configs and results.

Matrix encoding: {"dim": n, "entries": [[re, im], ...]} with exactly n^2
row-major entries, each a pair of finite reals.  Serialization prints
floats with 17 significant digits so every value round-trips exactly and
repeated runs are byte-identical.
"""

from __future__ import annotations

import json

import numpy as np

from .compatibility import ProbabilityDistribution
from .pooling import PoolingReport
from .regions import HybridState, JointState, RegionLabel
from .scenario import (
    AgentPipeline,
    KrausChannel,
    ScenarioConfig,
    ScenarioResult,
    UnitaryDynamics,
)


class MalformedInputError(ValueError):
    """The input JSON does not match the expected schema."""


# --- serialization ---------------------------------------------------------


def _fmt_float(x: float) -> str:
    if not np.isfinite(x):
        raise ValueError(f"cannot serialize non-finite value {x!r}")
    return format(float(x), ".17g")


def _encode(obj) -> str:
    """Deterministic JSON text with 17-significant-digit floats."""
    if obj is None or obj is True or obj is False:
        return json.dumps(obj)
    if isinstance(obj, (int, np.integer)) and not isinstance(obj, bool):
        return str(int(obj))
    if isinstance(obj, (float, np.floating)):
        return _fmt_float(obj)
    if isinstance(obj, str):
        return json.dumps(obj)
    if isinstance(obj, dict):
        items = ", ".join(f"{json.dumps(str(k))}: {_encode(v)}" for k, v in obj.items())
        return "{" + items + "}"
    if isinstance(obj, (list, tuple)):
        return "[" + ", ".join(_encode(v) for v in obj) + "]"
    raise TypeError(f"cannot serialize {type(obj)}")


def dumps(obj) -> str:
    return _encode(obj) + "\n"


def matrix_to_json(m) -> dict:
    a = np.asarray(m, dtype=complex)
    return {
        "dim": int(a.shape[0]),
        "entries": [[float(z.real), float(z.imag)] for z in a.reshape(-1)],
    }


def matrix_from_json(obj) -> np.ndarray:
    if not isinstance(obj, dict) or set(obj) != {"dim", "entries"}:
        raise MalformedInputError('matrix object must have exactly keys "dim" and "entries"')
    dim = obj["dim"]
    entries = obj["entries"]
    if not isinstance(dim, int) or dim < 1:
        raise MalformedInputError(f'"dim" must be a positive integer, got {dim!r}')
    if not isinstance(entries, list) or len(entries) != dim * dim:
        raise MalformedInputError(f'"entries" must hold exactly {dim * dim} pairs')
    flat = np.empty(dim * dim, dtype=complex)
    for i, pair in enumerate(entries):
        if (
            not isinstance(pair, list)
            or len(pair) != 2
            or not all(isinstance(v, (int, float)) and not isinstance(v, bool) for v in pair)
        ):
            raise MalformedInputError(f"entry {i} is not a [re, im] pair of reals")
        flat[i] = complex(pair[0], pair[1])
    if not np.all(np.isfinite(flat)):
        raise MalformedInputError("matrix entries must be finite")
    return flat.reshape(dim, dim)


def distribution_to_json(p: ProbabilityDistribution) -> dict:
    return {"outcomes": list(p.outcomes), "probs": [float(x) for x in p.probs]}


def distribution_from_json(obj) -> ProbabilityDistribution:
    if not isinstance(obj, dict) or set(obj) != {"outcomes", "probs"}:
        raise MalformedInputError(
            'distribution object must have exactly keys "outcomes" and "probs"'
        )
    if not isinstance(obj["outcomes"], list) or not isinstance(obj["probs"], list):
        raise MalformedInputError('"outcomes" and "probs" must be lists')
    try:
        return ProbabilityDistribution(tuple(obj["outcomes"]), np.asarray(obj["probs"], float))
    except (ValueError, TypeError) as exc:
        raise MalformedInputError(str(exc)) from exc


def joint_state_to_json(s: JointState) -> dict:
    return {
        "regions": [{"name": r.name, "dim": r.dim, "kind": r.kind} for r in s.regions],
        "normalized": s.normalized,
        "matrix": matrix_to_json(s.op),
    }


def joint_state_from_json(obj) -> JointState:
    try:
        regions = tuple(
            RegionLabel(r["name"], int(r["dim"]), r.get("kind", "quantum"))
            for r in obj["regions"]
        )
        return JointState(regions, matrix_from_json(obj["matrix"]),
                          normalized=bool(obj.get("normalized", True)))
    except (KeyError, TypeError, ValueError) as exc:
        raise MalformedInputError(f"bad joint state: {exc}") from exc


def hybrid_to_json(h: HybridState) -> dict:
    return {
        "classical_dims": list(h.classical_dims),
        "outcomes": [list(k) for k in sorted(h.blocks)],
        "blocks": {
            ",".join(map(str, k)): matrix_to_json(b) for k, b in sorted(h.blocks.items())
        },
        "normalized": h.normalized,
    }


def hybrid_from_json(obj) -> HybridState:
    try:
        blocks = {
            tuple(int(s) for s in key.split(",")): matrix_from_json(b)
            for key, b in obj["blocks"].items()
        }
        return HybridState(
            tuple(int(d) for d in obj["classical_dims"]),
            blocks,
            normalized=bool(obj.get("normalized", True)),
        )
    except (KeyError, TypeError, ValueError) as exc:
        raise MalformedInputError(f"bad hybrid state: {exc}") from exc


def pooling_report_to_json(r: PoolingReport) -> dict:
    if isinstance(r.pooled, ProbabilityDistribution):
        pooled = distribution_to_json(r.pooled)
    else:
        pooled = matrix_to_json(r.pooled)
    out = {
        "pooled": pooled,
        "normalization_c": float(r.normalization_c),
        "hermiticity_residual": float(r.hermiticity_residual),
        "min_eigenvalue": float(r.min_eigenvalue),
        "precondition_checked": r.precondition_checked,
    }
    if r.precondition_residual is not None:
        out["precondition_residual"] = float(r.precondition_residual)
    return out


# --- scenario configs and results ------------------------------------------


def _step_to_json(step) -> dict:
    if isinstance(step, UnitaryDynamics):
        return {"type": "unitary", "matrix": matrix_to_json(step.u)}
    return {"type": "channel", "kraus": [matrix_to_json(k) for k in step.kraus_ops]}


def _step_from_json(obj):
    if not isinstance(obj, dict) or "type" not in obj:
        raise MalformedInputError('pipeline step needs a "type" field')
    if obj["type"] == "unitary":
        return UnitaryDynamics(matrix_from_json(obj["matrix"]))
    if obj["type"] == "channel":
        kraus = obj.get("kraus")
        if not isinstance(kraus, list) or not kraus:
            raise MalformedInputError('channel step needs a nonempty "kraus" list')
        return KrausChannel(tuple(matrix_from_json(k) for k in kraus))
    raise MalformedInputError(f'unknown step type {obj["type"]!r}')


def scenario_config_to_json(cfg: ScenarioConfig) -> dict:
    out = {
        "prior": matrix_to_json(cfg.prior),
        "pipelines": [
            {"name": p.name, "steps": [_step_to_json(s) for s in p.steps]}
            for p in cfg.pipelines
        ],
        "rank_tol": float(cfg.rank_tol),
        "herm_tol": float(cfg.herm_tol),
        "seed": int(cfg.seed),
        "pool_against_evolved": cfg.pool_against_evolved,
    }
    if cfg.evolved_by is not None:
        out["evolved_by"] = matrix_to_json(cfg.evolved_by.u)
    return out


def scenario_config_from_json(obj) -> ScenarioConfig:
    try:
        pipelines = tuple(
            AgentPipeline(p["name"], tuple(_step_from_json(s) for s in p["steps"]))
            for p in obj["pipelines"]
        )
        evolved = obj.get("evolved_by")
        return ScenarioConfig(
            prior=matrix_from_json(obj["prior"]),
            pipelines=pipelines,
            rank_tol=float(obj.get("rank_tol", 1e-10)),
            herm_tol=float(obj.get("herm_tol", 1e-8)),
            seed=int(obj.get("seed", 0)),
            pool_against_evolved=bool(obj.get("pool_against_evolved", False)),
            evolved_by=UnitaryDynamics(matrix_from_json(evolved)) if evolved else None,
        )
    except MalformedInputError:
        raise
    except (KeyError, TypeError, ValueError) as exc:
        raise MalformedInputError(f"bad scenario config: {exc}") from exc


def scenario_result_to_json(res: ScenarioResult) -> dict:
    out = {
        "sigma1": matrix_to_json(res.sigma1),
        "sigma2": matrix_to_json(res.sigma2),
        "compatible": res.verdict.compatible,
        "intersection_rank": res.verdict.intersection_rank(),
        "diagnostics": res.verdict.diagnostics,
        "pooling": pooling_report_to_json(res.pooling) if res.pooling else None,
        "pooling_error": res.pooling_error,
    }
    return out
