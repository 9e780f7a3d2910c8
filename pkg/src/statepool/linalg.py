"""Dense complex linear algebra primitives.

Everything downstream (conditional states, compatibility, pooling) is built
on the handful of spectral operations collected here: tensor products,
partial traces, support projectors, PSD square roots, Moore-Penrose
pseudo-inverses and geometric subspace intersections.

Operators are plain complex numpy arrays.  All spectral routines force
Hermitian symmetrization before calling ``eigh`` so that numerical
Hermiticity drift cannot cascade through a computation.  The library
targets desk-scale dimensions (<= 64), dense storage only.

Conventions
-----------
* ``tensor(a, b)`` is the Kronecker product with the LEFT factor as the
  FIRST region: index ``i*dim(b) + j`` of the product corresponds to basis
  state ``|i>|j>``.
* Rank decisions use a relative threshold ``rank_tol * max|eigenvalue|``
  with default ``rank_tol = 1e-10``.
"""

from __future__ import annotations

from dataclasses import dataclass, field

import numpy as np

from .errors import DimensionMismatchError, NotPSDError

DEFAULT_RANK_TOL = 1e-10
DEFAULT_HERM_TOL = 1e-8


def as_matrix(m) -> np.ndarray:
    """Validate and return ``m`` as a square complex matrix with finite entries."""
    a = np.asarray(m, dtype=complex)
    if a.ndim != 2 or a.shape[0] != a.shape[1]:
        raise DimensionMismatchError(f"expected a square matrix, got shape {a.shape}")
    if not np.all(np.isfinite(a)):
        raise ValueError("matrix contains NaN or Inf entries")
    return a


def max_norm(m) -> float:
    """Entrywise max-abs norm."""
    m = np.asarray(m)
    return 0.0 if m.size == 0 else float(np.max(np.abs(m)))


def hermitize(m, tol: float | None = None) -> np.ndarray:
    """Return the symmetrization (M + M†)/2, checking M is Hermitian within ``tol``.

    ``tol`` is absolute on the max-norm of M - M†; ``None`` skips the check.
    """
    a = as_matrix(m)
    if tol is not None and max_norm(a - a.conj().T) > tol:
        raise ValueError(
            f"matrix is not Hermitian within tolerance {tol:g} "
            f"(residual {max_norm(a - a.conj().T):.3e})"
        )
    return (a + a.conj().T) / 2


def herm_eig(m):
    """Eigendecomposition of the symmetrized input; returns (eigvals, eigvecs)."""
    return np.linalg.eigh(hermitize(m))


def is_psd(m, tol: float = DEFAULT_RANK_TOL) -> bool:
    """Whether the symmetrization of ``m`` has eigenvalues >= -tol * scale."""
    w = np.linalg.eigvalsh(hermitize(m))
    scale = max(float(np.max(np.abs(w))), 1.0) if w.size else 1.0
    return bool(w.size == 0 or w.min() >= -tol * scale)


def check_density(rho, tol: float = 1e-8) -> np.ndarray:
    """Validate ``rho`` as a density operator: Hermitian, PSD, unit trace.

    Returns the symmetrized matrix with tiny negative eigenvalues clamped
    to zero.  Raises NotPSDError / ValueError on genuine violations.
    """
    h = hermitize(rho, tol=tol)
    w, v = np.linalg.eigh(h)
    scale = max(float(np.max(np.abs(w))), 1.0)
    if w.min() < -tol * scale:
        raise NotPSDError(f"density operator has eigenvalue {w.min():.3e} < 0")
    tr = float(np.real(np.trace(h)))
    if abs(tr - 1.0) > tol:
        raise ValueError(f"density operator has trace {tr!r}, expected 1")
    if w.min() >= 0.0:
        return h
    return (v * np.clip(w, 0.0, None)) @ v.conj().T


def tensor(*ops) -> np.ndarray:
    """Kronecker product of one or more matrices, left factor first."""
    out = as_matrix(ops[0])
    for op in ops[1:]:
        out = np.kron(out, as_matrix(op))
    return out


def partial_trace(m, dims, keep) -> np.ndarray:
    """Trace out all tensor factors not listed in ``keep``.

    ``dims`` are the factor dimensions (product must equal dim(m)); ``keep``
    is an iterable of factor indices.  The result acts on the kept factors
    in their original order, and Tr(result) == Tr(m).
    """
    a = as_matrix(m)
    dims = [int(d) for d in dims]
    if int(np.prod(dims)) != a.shape[0]:
        raise DimensionMismatchError(
            f"product of dims {dims} != matrix dimension {a.shape[0]}"
        )
    keep = sorted(set(int(k) for k in keep))
    if any(k < 0 or k >= len(dims) for k in keep):
        raise DimensionMismatchError(f"keep indices {keep} out of range for {len(dims)} factors")
    n = len(dims)
    t = a.reshape(dims + dims)
    # trace out discarded factors from the highest index down so positions stay valid
    for idx in sorted(set(range(n)) - set(keep), reverse=True):
        t = np.trace(t, axis1=idx, axis2=idx + t.ndim // 2)
    d_keep = int(np.prod([dims[k] for k in keep])) if keep else 1
    return t.reshape(d_keep, d_keep)


def permute_factors(m, dims, perm) -> np.ndarray:
    """Reorder tensor factors: factor ``perm[i]`` of the input becomes factor ``i``."""
    a = as_matrix(m)
    dims = [int(d) for d in dims]
    n = len(dims)
    perm = list(perm)
    if sorted(perm) != list(range(n)):
        raise ValueError(f"perm {perm} is not a permutation of 0..{n - 1}")
    t = a.reshape(dims + dims)
    t = t.transpose(perm + [n + p for p in perm])
    return t.reshape(a.shape)


def embed(op, dims, positions) -> np.ndarray:
    """Embed ``op`` (acting on the factors ``positions``, in that order) into
    the full product space described by ``dims``, tensoring identities on
    every other factor."""
    a = as_matrix(op)
    dims = [int(d) for d in dims]
    positions = [int(p) for p in positions]
    d_pos = int(np.prod([dims[p] for p in positions]))
    if a.shape[0] != d_pos:
        raise DimensionMismatchError(
            f"operator dim {a.shape[0]} != product of factor dims {d_pos}"
        )
    rest = [i for i in range(len(dims)) if i not in positions]
    d_rest = int(np.prod([dims[i] for i in rest])) if rest else 1
    big = np.kron(a, np.eye(d_rest))
    # big currently has factor order positions + rest; permute back
    order = positions + rest
    inv = [order.index(i) for i in range(len(dims))]
    return permute_factors(big, [dims[i] for i in order], inv)


def sqrt_psd(h, tol: float = DEFAULT_RANK_TOL) -> np.ndarray:
    """PSD square root via spectral decomposition.

    Eigenvalues in [-tol*scale, 0) are clamped to zero; anything more
    negative raises NotPSDError.
    """
    w, v = herm_eig(h)
    scale = max(float(np.max(np.abs(w))), 1.0) if w.size else 1.0
    if w.size and w.min() < -tol * scale:
        raise NotPSDError(f"not PSD: eigenvalue {w.min():.3e}")
    w = np.clip(w, 0.0, None)
    return (v * np.sqrt(w)) @ v.conj().T


def pseudo_inverse(h, rank_tol: float = DEFAULT_RANK_TOL) -> np.ndarray:
    """Moore-Penrose inverse of a Hermitian operator, restricted to its support."""
    w, v = herm_eig(h)
    if w.size == 0:
        return np.zeros_like(np.asarray(h, dtype=complex))
    cut = rank_tol * float(np.max(np.abs(w)))
    inv = np.where(np.abs(w) > cut, 1.0 / np.where(np.abs(w) > cut, w, 1.0), 0.0)
    return (v * inv) @ v.conj().T


@dataclass(frozen=True)
class Subspace:
    """A subspace of C^ambient_dim given by an orthonormal basis (columns)."""

    ambient_dim: int
    basis: np.ndarray = field(repr=False)  # shape (ambient_dim, rank)

    def __post_init__(self):
        b = np.asarray(self.basis, dtype=complex).reshape(self.ambient_dim, -1)
        gram = b.conj().T @ b
        if max_norm(gram - np.eye(b.shape[1])) > 1e-8:
            raise ValueError("basis columns are not orthonormal")
        object.__setattr__(self, "basis", b)

    @property
    def rank(self) -> int:
        return self.basis.shape[1]

    @property
    def is_empty(self) -> bool:
        return self.rank == 0

    def projector(self) -> np.ndarray:
        return self.basis @ self.basis.conj().T

    def contains(self, vec, tol: float = 1e-8) -> bool:
        v = np.asarray(vec, dtype=complex).reshape(-1)
        nrm = np.linalg.norm(v)
        if nrm == 0:
            return True
        return float(np.linalg.norm(self.projector() @ v - v)) <= tol * nrm

    @classmethod
    def empty(cls, ambient_dim: int) -> "Subspace":
        return cls(ambient_dim, np.zeros((ambient_dim, 0)))

    @classmethod
    def full(cls, ambient_dim: int) -> "Subspace":
        return cls(ambient_dim, np.eye(ambient_dim))


def support_projector(h, rank_tol: float = DEFAULT_RANK_TOL) -> Subspace:
    """Span of eigenvectors with |eigenvalue| > rank_tol * max|eigenvalue|.

    The zero operator yields the empty subspace.
    """
    w, v = herm_eig(h)
    dim = v.shape[0]
    if w.size == 0 or np.max(np.abs(w)) == 0.0:
        return Subspace.empty(dim)
    mask = np.abs(w) > rank_tol * float(np.max(np.abs(w)))
    return Subspace(dim, v[:, mask])


def subspace_intersection(p: Subspace, q: Subspace, tol: float = 1e-8) -> Subspace:
    """Geometric intersection of two subspaces.

    Computed from a single eigendecomposition of P + Q (sum of the two
    orthogonal projectors): the intersection is spanned by eigenvectors
    with eigenvalue within ``tol`` of 2.
    """
    if p.ambient_dim != q.ambient_dim:
        raise DimensionMismatchError(
            f"ambient dims differ: {p.ambient_dim} vs {q.ambient_dim}"
        )
    w, v = np.linalg.eigh(p.projector() + q.projector())
    mask = w >= 2.0 - tol
    return Subspace(p.ambient_dim, v[:, mask])
