"""Regions, joint states, the star product, conditioning and hybrid states.

A *region* is anything modeled as quantum and attached to a tensor factor;
classical registers are regions carrying a preferred (computational) basis.
Joint descriptions are Hermitian operators on the product space.  They need
not be positive overall, but their marginals onto elementary regions must
be.  Conditioning is done with the non-commutative star product

    star(psi, phi) = (1 (x) phi)^{1/2} psi (1 (x) phi)^{1/2}

and the pseudo-inverse of the conditioning marginal, so conditioning on
singular marginals restricts to the support instead of failing (the
classical convention of only conditioning on possible events).
"""

from __future__ import annotations

from dataclasses import dataclass, field
from typing import Mapping

import numpy as np

from . import linalg
from .errors import (
    DimensionMismatchError,
    ImpossibleConditioningError,
    NotPSDError,
)
from .linalg import (
    DEFAULT_RANK_TOL,
    as_matrix,
    embed,
    hermitize,
    is_psd,
    max_norm,
    partial_trace,
    pseudo_inverse,
    sqrt_psd,
    tensor,
)


@dataclass(frozen=True)
class RegionLabel:
    """A named tensor factor. ``kind`` is "quantum" or "classical"."""

    name: str
    dim: int
    kind: str = "quantum"

    def __post_init__(self):
        if self.dim < 1:
            raise ValueError(f"region {self.name!r} has dim {self.dim} < 1")
        if self.kind not in ("quantum", "classical"):
            raise ValueError(f"unknown region kind {self.kind!r}")


def _check_unique_names(regions):
    names = [r.name for r in regions]
    if len(set(names)) != len(names):
        raise ValueError(f"duplicate region names in {names}")


@dataclass(frozen=True)
class JointState:
    """Hermitian operator over an ordered list of regions.

    ``normalized`` joint states have unit trace; conditional states and
    other unnormalized constructions set the flag to False.
    """

    regions: tuple
    op: np.ndarray = field(repr=False)
    normalized: bool = True

    def __post_init__(self):
        regions = tuple(self.regions)
        _check_unique_names(regions)
        op = hermitize(self.op, tol=1e-8)
        d = int(np.prod([r.dim for r in regions]))
        if op.shape[0] != d:
            raise DimensionMismatchError(
                f"operator dim {op.shape[0]} != product of region dims {d}"
            )
        if self.normalized and abs(np.real(np.trace(op)) - 1.0) > 1e-8:
            raise ValueError(f"normalized joint state has trace {np.trace(op):g}")
        object.__setattr__(self, "regions", regions)
        object.__setattr__(self, "op", op)

    @property
    def dims(self):
        return [r.dim for r in self.regions]

    def region_index(self, name: str) -> int:
        for i, r in enumerate(self.regions):
            if r.name == name:
                return i
        raise KeyError(f"unknown region {name!r}")


@dataclass(frozen=True)
class ConditionalState:
    """Operator representing (target | given) on the full composite space."""

    target: tuple
    given: tuple
    op: np.ndarray = field(repr=False)


def marginalize(s: JointState, keep) -> JointState:
    """Trace out every region not named in ``keep``."""
    keep_names = {keep} if isinstance(keep, str) else set(keep)
    unknown = keep_names - {r.name for r in s.regions}
    if unknown:
        raise KeyError(f"unknown region labels {sorted(unknown)}")
    idx = [i for i, r in enumerate(s.regions) if r.name in keep_names]
    out = partial_trace(s.op, s.dims, idx)
    return JointState(
        tuple(s.regions[i] for i in idx), out, normalized=s.normalized
    )


def star_product(psi, phi, dims=None, apply_to=None) -> np.ndarray:
    """Sandwich product (1 (x) phi)^{1/2} psi (1 (x) phi)^{1/2}.

    With ``dims`` and ``apply_to`` given, ``phi`` acts on the tensor factors
    ``apply_to`` of the space described by ``dims`` and identities are
    inserted elsewhere; otherwise phi must act on the whole space of psi.
    Requires phi PSD.  The result is Hermitian for Hermitian psi and PSD
    for PSD psi.
    """
    psi = as_matrix(psi)
    phi = as_matrix(phi)
    if dims is None:
        big = phi
    else:
        if apply_to is None:
            raise ValueError("apply_to is required when dims is given")
        pos = [apply_to] if isinstance(apply_to, int) else list(apply_to)
        big = embed(phi, dims, pos)
    if big.shape != psi.shape:
        raise DimensionMismatchError(
            f"embedded factor shape {big.shape} != state shape {psi.shape}"
        )
    root = sqrt_psd(big)
    return root @ psi @ root


def condition(s: JointState, on, rank_tol: float = DEFAULT_RANK_TOL) -> ConditionalState:
    """Conditional state of the remaining regions given the ones in ``on``.

    Star product of the joint with the pseudo-inverse of the marginal on
    ``on``; singular marginals condition on their support.
    """
    on_names = {on} if isinstance(on, str) else set(on)
    marg = marginalize(s, on_names)
    if linalg.support_projector(marg.op, rank_tol).is_empty:
        raise ImpossibleConditioningError("conditioning on impossible event (zero marginal)")
    inv = pseudo_inverse(marg.op, rank_tol)
    pos = [i for i, r in enumerate(s.regions) if r.name in on_names]
    out = star_product(s.op, inv, dims=s.dims, apply_to=pos)
    target = tuple(r for r in s.regions if r.name not in on_names)
    given = tuple(r for r in s.regions if r.name in on_names)
    return ConditionalState(target=target, given=given, op=out)


def quantum_bayes(likelihood, prior, tol: float = 1e-12) -> np.ndarray:
    """Posterior state from the quantum Bayes rule.

    posterior = prior^{1/2} likelihood prior^{1/2} / Tr(likelihood prior).
    ``likelihood`` is the PSD operator for one observed outcome; ``prior``
    is a density operator.  Raises ImpossibleConditioningError when the
    predictive probability vanishes.
    """
    like = as_matrix(likelihood)
    rho = as_matrix(prior)
    if like.shape != rho.shape:
        raise DimensionMismatchError("likelihood and prior dims differ")
    p = float(np.real(np.trace(like @ rho)))
    if p <= tol:
        raise ImpossibleConditioningError(
            f"conditioning on impossible outcome (predictive probability {p:.3e})"
        )
    return star_product(like, rho) / p


@dataclass(frozen=True)
class HybridState:
    """Joint state of classical registers with one quantum region.

    ``classical_dims`` are the outcome counts of the classical registers,
    ``blocks`` maps each outcome tuple to the (sub-normalized) PSD operator
    on the quantum region.  The explicit joint is block-diagonal in the
    classical preferred basis; no coherences across classical outcomes.
    """

    classical_dims: tuple
    blocks: Mapping
    normalized: bool = True

    def __post_init__(self):
        cdims = tuple(int(d) for d in self.classical_dims)
        blocks = {}
        qdim = None
        for key, block in dict(self.blocks).items():
            key = (key,) if isinstance(key, int) else tuple(key)
            if len(key) != len(cdims) or any(
                not (0 <= k < d) for k, d in zip(key, cdims)
            ):
                raise ValueError(f"outcome {key} out of range for registers {cdims}")
            b = as_matrix(block)
            if qdim is None:
                qdim = b.shape[0]
            elif b.shape[0] != qdim:
                raise DimensionMismatchError("blocks have differing quantum dims")
            if not is_psd(b, tol=1e-8):
                raise NotPSDError(f"block at outcome {key} is not PSD")
            blocks[key] = hermitize(b)
        if not blocks:
            raise ValueError("hybrid state needs at least one block")
        total = sum(float(np.real(np.trace(b))) for b in blocks.values())
        if self.normalized and abs(total - 1.0) > 1e-8:
            raise ValueError(f"hybrid blocks have total trace {total:g}, expected 1")
        object.__setattr__(self, "classical_dims", cdims)
        object.__setattr__(self, "blocks", blocks)
        object.__setattr__(self, "quantum_dim", qdim)

    @property
    def total_classical_dim(self) -> int:
        return int(np.prod(self.classical_dims))

    def block(self, key) -> np.ndarray:
        key = (key,) if isinstance(key, int) else tuple(key)
        return self.blocks.get(key, np.zeros((self.quantum_dim, self.quantum_dim), complex))

    def classical_weight(self, key) -> float:
        return float(np.real(np.trace(self.block(key))))

    def classical_distribution(self) -> np.ndarray:
        """Marginal over the classical registers, as an array over outcome tuples."""
        p = np.zeros(self.classical_dims)
        for key, b in self.blocks.items():
            p[key] = float(np.real(np.trace(b)))
        return p

    def quantum_marginal(self) -> np.ndarray:
        """Marginal state on the quantum region (sum of blocks)."""
        return sum(self.blocks.values())

    def to_joint(self) -> JointState:
        """Explicit block-diagonal operator |x><x| (x) block(x) over all registers."""
        nc = self.total_classical_dim
        d = nc * self.quantum_dim
        out = np.zeros((d, d), dtype=complex)
        for key, b in self.blocks.items():
            flat = int(np.ravel_multi_index(key, self.classical_dims))
            sl = slice(flat * self.quantum_dim, (flat + 1) * self.quantum_dim)
            out[sl, sl] = b
        regions = tuple(
            RegionLabel(f"X{i}", d, "classical")
            for i, d in enumerate(self.classical_dims)
        ) + (RegionLabel("B", self.quantum_dim, "quantum"),)
        return JointState(regions, out, normalized=self.normalized)

    @classmethod
    def from_joint(cls, op, classical_dims, quantum_dim, tol: float = 1e-10) -> "HybridState":
        """Extract blocks from an explicit joint operator.

        Raises if the operator carries coherences across classical outcomes
        beyond ``tol``.
        """
        m = as_matrix(op)
        cdims = tuple(int(d) for d in classical_dims)
        nc = int(np.prod(cdims))
        if m.shape[0] != nc * quantum_dim:
            raise DimensionMismatchError("joint dim != classical x quantum dims")
        blocks = {}
        scale = max(max_norm(m), 1.0)
        for flat in range(nc):
            key = tuple(int(k) for k in np.unravel_index(flat, cdims))
            sl = slice(flat * quantum_dim, (flat + 1) * quantum_dim)
            b = m[sl, sl]
            off = m[sl, :].copy()
            off[:, sl] = 0
            if max_norm(off) > tol * scale:
                raise ValueError("joint operator has coherences across classical outcomes")
            if max_norm(b) > tol * scale:
                blocks[key] = b
        total = sum(float(np.real(np.trace(b))) for b in blocks.values())
        return cls(cdims, blocks, normalized=abs(total - 1.0) <= 1e-8)


def make_hybrid(blocks, normalize: bool = True) -> HybridState:
    """Build a HybridState from a map outcome -> PSD block.

    Integer keys describe a single classical register; tuple keys describe
    several.  With ``normalize`` the blocks are rescaled to total trace 1;
    otherwise the state is flagged unnormalized.
    """
    items = {}
    width = None
    for key, b in dict(blocks).items():
        key = (key,) if isinstance(key, int) else tuple(key)
        if width is None:
            width = len(key)
        elif len(key) != width:
            raise ValueError("inconsistent outcome tuple lengths")
        items[key] = as_matrix(b)
    cdims = tuple(max(k[i] for k in items) + 1 for i in range(width))
    total = sum(float(np.real(np.trace(b))) for b in items.values())
    if normalize:
        if total <= 0:
            raise ValueError("cannot normalize: total trace is not positive")
        items = {k: b / total for k, b in items.items()}
        return HybridState(cdims, items, normalized=True)
    return HybridState(cdims, items, normalized=abs(total - 1.0) <= 1e-8)
