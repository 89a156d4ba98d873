"""Tolerance-aware linear subspaces of R^n.

A :class:`Subspace` stores an orthonormal basis (rows) produced by a
rank-revealing SVD.  All comparisons go through orthogonal projectors, so
results do not depend on which spanning set was used to build a subspace.
Rank decisions use a relative singular-value threshold ``tol * s_max``.

The dual space (R^n)* is identified with R^n through the standard basis, so
annihilators are computed as Euclidean orthogonal complements.
"""

from __future__ import annotations

from dataclasses import dataclass, field

import numpy as np

DEFAULT_TOL = 1e-9

__all__ = [
    "DEFAULT_TOL",
    "DimensionMismatchError",
    "FormDegenerateError",
    "Subspace",
    "span",
    "direct_sum",
    "nullspace",
    "orthonormal_rows",
]


class DimensionMismatchError(ValueError):
    """Operands live in different ambient spaces (or have wrong shapes)."""


class FormDegenerateError(ValueError):
    """A bilinear form is singular at the working tolerance."""


def orthonormal_rows(matrix: np.ndarray, tol: float = DEFAULT_TOL) -> np.ndarray:
    """Orthonormal basis (rows) of the row space of ``matrix``.

    Rank is the number of singular values above ``tol * s_max``.
    """
    matrix = np.atleast_2d(np.asarray(matrix, dtype=float))
    if matrix.size == 0:
        return np.zeros((0, matrix.shape[1]))
    _, s, vh = np.linalg.svd(matrix, full_matrices=False)
    if s.size == 0:
        return np.zeros((0, matrix.shape[1]))
    rank = int(np.sum(s > tol * s[0]))
    return vh[:rank].copy()


def nullspace(matrix: np.ndarray, tol: float = DEFAULT_TOL) -> np.ndarray:
    """Orthonormal basis (rows) of ``{x : matrix @ x = 0}``."""
    matrix = np.atleast_2d(np.asarray(matrix, dtype=float))
    n_cols = matrix.shape[1]
    if matrix.shape[0] == 0 or n_cols == 0:
        return np.eye(n_cols)
    _, s, vh = np.linalg.svd(matrix, full_matrices=True)
    if s.size == 0:
        return np.eye(n_cols)
    rank = int(np.sum(s > tol * s[0]))
    return vh[rank:].copy()


@dataclass(frozen=True, eq=False)
class Subspace:
    """A linear subspace of R^n with an orthonormal row basis.

    ``basis`` has shape ``(dim, ambient_dim)``; the zero subspace has an
    empty basis.  Equality is projector equality at the larger of the two
    tolerances.
    """

    ambient_dim: int
    basis: np.ndarray = field(repr=False)
    tol: float = DEFAULT_TOL

    def __post_init__(self) -> None:
        basis = np.atleast_2d(np.asarray(self.basis, dtype=float))
        if basis.size == 0:
            basis = basis.reshape(0, self.ambient_dim)
        if basis.shape[1] != self.ambient_dim:
            raise DimensionMismatchError(
                f"basis vectors have length {basis.shape[1]}, "
                f"ambient dimension is {self.ambient_dim}"
            )
        if basis.shape[0]:
            gram = basis @ basis.T
            if not np.allclose(gram, np.eye(basis.shape[0]), atol=1e-8):
                raise ValueError("basis rows are not orthonormal; build with span()")
        basis = basis.copy()
        basis.setflags(write=False)
        object.__setattr__(self, "basis", basis)

    # -- constructors ------------------------------------------------

    @classmethod
    def zero(cls, ambient_dim: int, tol: float = DEFAULT_TOL) -> "Subspace":
        return cls(ambient_dim, np.zeros((0, ambient_dim)), tol)

    @classmethod
    def full(cls, ambient_dim: int, tol: float = DEFAULT_TOL) -> "Subspace":
        return cls(ambient_dim, np.eye(ambient_dim), tol)

    # -- basic queries -----------------------------------------------

    @property
    def dim(self) -> int:
        return self.basis.shape[0]

    def projector(self) -> np.ndarray:
        """Orthogonal projector onto the subspace (n x n)."""
        if self.dim == 0:
            return np.zeros((self.ambient_dim, self.ambient_dim))
        return self.basis.T @ self.basis

    def contains(self, vector: np.ndarray) -> bool:
        vector = np.asarray(vector, dtype=float)
        if vector.shape != (self.ambient_dim,):
            raise DimensionMismatchError(
                f"vector of length {vector.shape}, ambient {self.ambient_dim}"
            )
        residual = vector - self.projector() @ vector
        return bool(
            np.linalg.norm(residual) <= self.tol * max(1.0, np.linalg.norm(vector))
        )

    # -- lattice operations ------------------------------------------

    def _check_same_ambient(self, other: "Subspace") -> None:
        if self.ambient_dim != other.ambient_dim:
            raise DimensionMismatchError(
                f"ambient dimensions differ: {self.ambient_dim} vs {other.ambient_dim}"
            )

    def sum(self, other: "Subspace") -> "Subspace":
        """Smallest subspace containing both operands."""
        self._check_same_ambient(other)
        tol = max(self.tol, other.tol)
        stacked = np.vstack([self.basis, other.basis])
        return Subspace(self.ambient_dim, orthonormal_rows(stacked, tol), tol)

    def annihilator(self) -> "Subspace":
        """Annihilator in the dual, identified with the Euclidean
        orthogonal complement."""
        return Subspace(self.ambient_dim, nullspace(self.basis, self.tol), self.tol)

    def intersect(self, other: "Subspace") -> "Subspace":
        """Intersection, computed as ann(ann(S1) + ann(S2))."""
        self._check_same_ambient(other)
        return self.annihilator().sum(other.annihilator()).annihilator()

    def orthogonal_wrt_form(self, form: np.ndarray) -> "Subspace":
        """Orthogonal complement with respect to a symmetric nondegenerate
        bilinear form ``B``: all ``w`` with ``B(w, s) = 0`` for ``s`` here."""
        form = np.asarray(form, dtype=float)
        if form.shape != (self.ambient_dim, self.ambient_dim):
            raise DimensionMismatchError(
                f"form has shape {form.shape}, expected "
                f"({self.ambient_dim}, {self.ambient_dim})"
            )
        if self.ambient_dim == 0:
            return Subspace.zero(0, self.tol)
        scale = np.linalg.norm(form, 2)
        if scale == 0.0:
            raise FormDegenerateError("form is zero")
        if np.linalg.norm(form - form.T, 2) > self.tol * scale:
            raise ValueError("form is not symmetric")
        smallest = np.linalg.svd(form, compute_uv=False)[-1]
        if smallest <= self.tol * scale:
            raise FormDegenerateError(
                f"form is singular at tolerance {self.tol} "
                f"(smallest singular value {smallest:.3e})"
            )
        if self.dim == 0:
            return Subspace.full(self.ambient_dim, self.tol)
        return Subspace(
            self.ambient_dim, nullspace(self.basis @ form, self.tol), self.tol
        )

    # -- metric ---------------------------------------------------------

    def distance(self, other: "Subspace") -> float:
        """Operator-norm distance of orthogonal projectors; lies in [0, 1]
        for subspaces of equal dimension and in [0, 1] in general."""
        self._check_same_ambient(other)
        if self.ambient_dim == 0:
            return 0.0
        return float(np.linalg.norm(self.projector() - other.projector(), 2))

    def __eq__(self, other: object) -> bool:
        if not isinstance(other, Subspace):
            return NotImplemented
        if self.ambient_dim != other.ambient_dim:
            return False
        return self.distance(other) <= max(self.tol, other.tol)


def span(vectors, ambient_dim: int | None = None, tol: float = DEFAULT_TOL) -> Subspace:
    """Subspace spanned by a sequence of vectors (rows).

    ``ambient_dim`` is required when ``vectors`` is empty.
    """
    rows = [np.asarray(v, dtype=float) for v in vectors]
    if not rows:
        if ambient_dim is None:
            raise DimensionMismatchError("empty span needs an explicit ambient_dim")
        return Subspace.zero(ambient_dim, tol)
    length = rows[0].shape[-1] if rows[0].ndim else 0
    for v in rows:
        if v.ndim != 1:
            raise DimensionMismatchError("span expects 1-d vectors")
        if v.shape[0] != length:
            raise DimensionMismatchError("span vectors have inconsistent lengths")
    if ambient_dim is not None and ambient_dim != length:
        raise DimensionMismatchError(
            f"vectors of length {length}, ambient_dim {ambient_dim}"
        )
    matrix = np.vstack(rows)
    return Subspace(length, orthonormal_rows(matrix, tol), tol)


def direct_sum(a: Subspace, b: Subspace) -> Subspace:
    """External direct sum inside R^(n_a + n_b)."""
    tol = max(a.tol, b.tol)
    n = a.ambient_dim + b.ambient_dim
    rows = np.zeros((a.dim + b.dim, n))
    rows[: a.dim, : a.ambient_dim] = a.basis
    rows[a.dim :, a.ambient_dim :] = b.basis
    return Subspace(n, rows, tol)
