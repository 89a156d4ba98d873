"""Linear Dirac structures on V = R^n (+) (R^n)*.

The doubled space carries the symmetric pairing

    <(u, a), (v, b)> = b(u) + a(v),

of signature (n, n).  A linear Dirac structure is a subspace that is
Lagrangian for this pairing: dimension exactly n and self-orthogonal.
Backward and forward images under linear maps are computed by solving a
single null-space problem on a stacked constraint matrix; no pseudo-inverses
are involved.
"""

from __future__ import annotations

from dataclasses import dataclass

import numpy as np

from .subspace import (
    DEFAULT_TOL,
    DimensionMismatchError,
    Subspace,
    direct_sum,
    nullspace,
    orthonormal_rows,
)

__all__ = [
    "NotLagrangianError",
    "SplitVector",
    "LinearDirac",
    "ForwardImage",
    "pairing",
    "pairing_matrix",
    "max_self_pairing",
    "is_lagrangian",
    "from_bivector",
    "from_two_form",
    "from_distribution",
    "backward_image",
    "forward_image",
    "transform",
]


class NotLagrangianError(ValueError):
    """A subspace fails the Lagrangian conditions (dimension or pairing)."""


@dataclass(frozen=True)
class SplitVector:
    """An element (tangent, covector) of R^n (+) (R^n)*."""

    tangent: np.ndarray
    covector: np.ndarray

    def __post_init__(self) -> None:
        t = np.asarray(self.tangent, dtype=float)
        c = np.asarray(self.covector, dtype=float)
        if t.ndim != 1 or c.ndim != 1 or t.shape != c.shape:
            raise DimensionMismatchError(
                "tangent and covector must be 1-d arrays of equal length"
            )
        object.__setattr__(self, "tangent", t)
        object.__setattr__(self, "covector", c)

    @property
    def base_dim(self) -> int:
        return self.tangent.shape[0]

    def as_vector(self) -> np.ndarray:
        return np.concatenate([self.tangent, self.covector])

    @classmethod
    def from_vector(cls, x: np.ndarray) -> "SplitVector":
        x = np.asarray(x, dtype=float)
        if x.ndim != 1 or x.shape[0] % 2:
            raise DimensionMismatchError("expected a flat vector of even length")
        n = x.shape[0] // 2
        return cls(x[:n], x[n:])


def pairing(p: SplitVector, q: SplitVector) -> float:
    """<(u, a), (v, b)> = b(u) + a(v)."""
    if p.base_dim != q.base_dim:
        raise DimensionMismatchError(
            f"split vectors on R^{p.base_dim} and R^{q.base_dim}"
        )
    return float(q.covector @ p.tangent + p.covector @ q.tangent)


def pairing_matrix(n: int) -> np.ndarray:
    """Matrix of the pairing on R^(2n): [[0, I], [I, 0]]."""
    j = np.zeros((2 * n, 2 * n))
    j[:n, n:] = np.eye(n)
    j[n:, :n] = np.eye(n)
    return j


def max_self_pairing(space: Subspace) -> float:
    """Largest |<b_i, b_j>| over the (orthonormal) basis of ``space``."""
    if space.ambient_dim % 2:
        raise DimensionMismatchError("ambient dimension must be even")
    if space.dim == 0:
        return 0.0
    gram = space.basis @ pairing_matrix(space.ambient_dim // 2) @ space.basis.T
    return float(np.max(np.abs(gram)))


def is_lagrangian(space: Subspace) -> bool:
    """Dimension n and self-orthogonality, both at ``space.tol``."""
    if space.ambient_dim % 2:
        raise DimensionMismatchError("ambient dimension must be even")
    n = space.ambient_dim // 2
    return space.dim == n and max_self_pairing(space) <= space.tol


@dataclass(frozen=True)
class LinearDirac:
    """A Lagrangian subspace of R^n (+) (R^n)*; validated on construction."""

    base_dim: int
    space: Subspace

    def __post_init__(self) -> None:
        if self.space.ambient_dim != 2 * self.base_dim:
            raise DimensionMismatchError(
                f"space lives in R^{self.space.ambient_dim}, "
                f"expected R^{2 * self.base_dim}"
            )
        if self.space.dim != self.base_dim:
            raise NotLagrangianError(
                f"dimension {self.space.dim} != base dimension {self.base_dim}"
            )
        worst = max_self_pairing(self.space)
        if worst > self.space.tol:
            raise NotLagrangianError(
                f"self-pairing {worst:.3e} exceeds tolerance {self.space.tol:.3e}"
            )

    @property
    def tol(self) -> float:
        return self.space.tol

    def sections(self) -> list[SplitVector]:
        """Basis elements as split vectors."""
        return [SplitVector.from_vector(row) for row in self.space.basis]


# -- constructors ------------------------------------------------------


def from_bivector(pi: np.ndarray, tol: float = DEFAULT_TOL) -> LinearDirac:
    """Graph of a bivector: span of (pi @ e_i, e_i) over the dual basis."""
    pi = np.asarray(pi, dtype=float)
    n = pi.shape[0]
    if pi.shape != (n, n):
        raise DimensionMismatchError("bivector matrix must be square")
    scale = max(1.0, float(np.abs(pi).max()) if n else 1.0)
    if np.abs(pi + pi.T).max(initial=0.0) > tol * scale:
        raise ValueError("bivector matrix must be antisymmetric")
    rows = np.hstack([pi.T, np.eye(n)])  # row i = (pi @ e_i, e_i)
    return LinearDirac(n, Subspace(2 * n, orthonormal_rows(rows, tol), tol))


def from_two_form(omega: np.ndarray, tol: float = DEFAULT_TOL) -> LinearDirac:
    """Graph of a 2-form: span of (e_i, omega contracted with e_i);
    the covector attached to e_i is row i of the matrix."""
    omega = np.asarray(omega, dtype=float)
    n = omega.shape[0]
    if omega.shape != (n, n):
        raise DimensionMismatchError("two-form matrix must be square")
    scale = max(1.0, float(np.abs(omega).max()) if n else 1.0)
    if np.abs(omega + omega.T).max(initial=0.0) > tol * scale:
        raise ValueError("two-form matrix must be antisymmetric")
    rows = np.hstack([np.eye(n), omega])  # row i = (e_i, omega[i, :])
    return LinearDirac(n, Subspace(2 * n, orthonormal_rows(rows, tol), tol))


def from_distribution(delta: Subspace) -> LinearDirac:
    """Delta (+) ann(Delta): tangent directions plus covectors killing them."""
    return LinearDirac(delta.ambient_dim, direct_sum(delta, delta.annihilator()))


# -- images ------------------------------------------------------------


def _check_map(phi: np.ndarray) -> np.ndarray:
    phi = np.asarray(phi, dtype=float)
    if phi.ndim != 2:
        raise DimensionMismatchError("linear map must be a 2-d matrix")
    return phi


def backward_image(phi: np.ndarray, dirac: LinearDirac) -> LinearDirac:
    """Pull-back {(v, phi^T b) : (phi v, b) in D} for phi: R^m -> R^n.

    Always Lagrangian on R^m.
    """
    phi = _check_map(phi)
    n, m = phi.shape
    if n != dirac.base_dim:
        raise DimensionMismatchError(
            f"map targets R^{n}, Dirac structure lives on R^{dirac.base_dim}"
        )
    tol = dirac.tol
    # Kernel variables (v, b) in R^(m+n) subject to (phi v, b) in D.
    lift = np.zeros((2 * n, m + n))
    lift[:n, :m] = phi
    lift[n:, m:] = np.eye(n)
    constraint = (np.eye(2 * n) - dirac.space.projector()) @ lift
    kernel = nullspace(constraint, tol)  # rows
    push = np.zeros((m + n, 2 * m))
    push[:m, :m] = np.eye(m)
    push[m:, m:] = phi  # rows transform contravariantly: b @ phi = (phi^T b)^T
    rows = kernel @ push
    return LinearDirac(m, Subspace(2 * m, orthonormal_rows(rows, tol), tol))


@dataclass(frozen=True)
class ForwardImage:
    """Result of a push-forward, with status flags.

    The span is always computed; it is Lagrangian whenever the map is
    surjective, and the ``lagrangian`` flag records whether it is one here.
    """

    base_dim: int
    space: Subspace
    lagrangian: bool
    surjective: bool

    @property
    def dirac(self) -> LinearDirac:
        if not self.lagrangian:
            raise NotLagrangianError(
                "forward image is not Lagrangian "
                f"(dimension {self.space.dim} on R^{self.base_dim}); "
                "the map was "
                + ("surjective" if self.surjective else "not surjective")
            )
        return LinearDirac(self.base_dim, self.space)


def forward_image(phi: np.ndarray, dirac: LinearDirac) -> ForwardImage:
    """Push-forward {(phi v, b) : (v, phi^T b) in D} for phi: R^m -> R^n."""
    phi = _check_map(phi)
    n, m = phi.shape
    if m != dirac.base_dim:
        raise DimensionMismatchError(
            f"map starts on R^{m}, Dirac structure lives on R^{dirac.base_dim}"
        )
    tol = dirac.tol
    lift = np.zeros((2 * m, m + n))
    lift[:m, :m] = np.eye(m)
    lift[m:, m:] = phi.T
    constraint = (np.eye(2 * m) - dirac.space.projector()) @ lift
    kernel = nullspace(constraint, tol)
    push = np.zeros((m + n, 2 * n))
    push[:m, :n] = phi.T
    push[m:, n:] = np.eye(n)
    rows = kernel @ push
    space = Subspace(2 * n, orthonormal_rows(rows, tol), tol)
    if phi.size:
        s = np.linalg.svd(phi, compute_uv=False)
        rank = int(np.sum(s > tol * s[0])) if s.size else 0
    else:
        rank = 0
    return ForwardImage(
        base_dim=n,
        space=space,
        lagrangian=is_lagrangian(space),
        surjective=rank == n,
    )


def transform(g: np.ndarray, dirac: LinearDirac) -> LinearDirac:
    """Image under the Pontryagin lift (v, a) -> (g v, g^-T a) of an
    invertible g."""
    g = _check_map(g)
    n = dirac.base_dim
    if g.shape != (n, n):
        raise DimensionMismatchError(f"expected a {n} x {n} matrix, got {g.shape}")
    if n == 0:
        return dirac
    s = np.linalg.svd(g, compute_uv=False)
    if s[-1] <= dirac.tol * s[0]:
        raise ValueError("transform matrix is singular at tolerance")
    lift = np.zeros((2 * n, 2 * n))
    lift[:n, :n] = g
    lift[n:, n:] = np.linalg.inv(g).T
    rows = dirac.space.basis @ lift.T
    tol = dirac.tol
    return LinearDirac(n, Subspace(2 * n, orthonormal_rows(rows, tol), tol))
