"""Polynomial vector fields, one-forms, and Courant/Dorfman brackets.

Everything symbolic here is exact (rational coefficients); floating point
enters only when a field is evaluated at a point.  A Dirac structure field
is described by one of four specs (bivector graph, two-form graph, constant
distribution, explicit sections), each of which knows its canonical
generating sections and how to evaluate to a :class:`LinearDirac` fiber.
"""

from __future__ import annotations

from dataclasses import dataclass
from fractions import Fraction
from typing import Union

import numpy as np

from .lindirac import (
    LinearDirac,
    from_bivector,
    from_distribution,
    from_two_form,
    is_lagrangian,
)
from .poly import Poly, _coerce
from .subspace import DEFAULT_TOL, Subspace, span

__all__ = [
    "DegeneratePointError",
    "PolyVectorField",
    "PolyOneForm",
    "PolyTwoForm",
    "PolySection",
    "d_function",
    "d_oneform",
    "contract",
    "lie_bracket",
    "lie_derivative_oneform",
    "courant_bracket",
    "dorfman_bracket",
    "section_pairing",
    "pushforward_field",
    "pushforward_oneform",
    "pushforward_section",
    "BivectorSpec",
    "TwoFormSpec",
    "DistributionSpec",
    "SectionsSpec",
    "DiracFieldSpec",
    "generating_sections",
    "evaluate_at",
    "BracketResidual",
    "SampleCheckReport",
    "integrability_check",
    "infinitesimal_invariance",
]


class DegeneratePointError(ValueError):
    """Section values fail to span a Dirac fiber at a sample point."""


def _unit(index: int, n: int) -> tuple[Fraction, ...]:
    return tuple(Fraction(1 if j == index else 0) for j in range(n))


@dataclass(frozen=True)
class _Components:
    """Shared behaviour for tuple-of-polynomial objects."""

    components: tuple

    def __post_init__(self) -> None:
        comps = tuple(self.components)
        n = len(comps)
        for c in comps:
            if not isinstance(c, Poly):
                raise TypeError("components must be Poly instances")
            if c.n_vars != n:
                raise ValueError(
                    f"component in {c.n_vars} variables inside a {n}-component field"
                )
        object.__setattr__(self, "components", comps)

    @property
    def base_dim(self) -> int:
        return len(self.components)

    def evaluate(self, point) -> np.ndarray:
        point = list(point)
        return np.array([float(c.evaluate(point)) for c in self.components])

    def degree(self) -> int:
        return max((c.degree() for c in self.components), default=0)

    # componentwise linear structure
    def __add__(self, other):
        if type(other) is not type(self):
            return NotImplemented
        return type(self)(tuple(a + b for a, b in zip(self.components, other.components)))

    def __sub__(self, other):
        if type(other) is not type(self):
            return NotImplemented
        return type(self)(tuple(a - b for a, b in zip(self.components, other.components)))

    def __neg__(self):
        return type(self)(tuple(-c for c in self.components))

    def __mul__(self, scalar):
        return type(self)(tuple(c * scalar for c in self.components))

    __rmul__ = __mul__

    @classmethod
    def zero(cls, n: int):
        return cls(tuple(Poly.zero(n) for _ in range(n)))

    @classmethod
    def from_constant(cls, values):
        values = list(values)
        n = len(values)
        return cls(
            tuple(Poly.constant(_coerce(v), n) for v in values)
        )

    @classmethod
    def from_linear(cls, matrix):
        """The linear object x -> M x (componentwise M[i] . x)."""
        rows = [[_coerce(entry) for entry in row] for row in matrix]
        n = len(rows)
        if any(len(r) != n for r in rows):
            raise ValueError("linear coefficient matrix must be square")
        comps = []
        for i in range(n):
            terms = tuple(
                (tuple(1 if k == j else 0 for k in range(n)), rows[i][j])
                for j in range(n)
            )
            comps.append(Poly(n, terms))
        return cls(tuple(comps))


class PolyVectorField(_Components):
    """Vector field on R^n with polynomial components."""


class PolyOneForm(_Components):
    """One-form on R^n with polynomial components."""

    def pair(self, field: PolyVectorField) -> Poly:
        """The function alpha(X)."""
        if field.base_dim != self.base_dim:
            raise ValueError("one-form and field live on different spaces")
        total = Poly.zero(self.base_dim)
        for a, x in zip(self.components, field.components):
            total = total + a * x
        return total


@dataclass(frozen=True)
class PolyTwoForm:
    """Antisymmetric n x n matrix of polynomials.

    The same container serves two-forms and bivectors; the contraction
    convention (i_X W)_j = sum_i X_i W_ij fixes the interpretation.
    """

    entries: tuple

    def __post_init__(self) -> None:
        rows = tuple(tuple(row) for row in self.entries)
        n = len(rows)
        for i, row in enumerate(rows):
            if len(row) != n:
                raise ValueError("entries must form a square matrix")
            for j, p in enumerate(row):
                if not isinstance(p, Poly):
                    raise TypeError("entries must be Poly instances")
                if p.n_vars != n:
                    raise ValueError(
                        f"entry ({i},{j}) has {p.n_vars} variables, expected {n}"
                    )
        for i in range(n):
            for j in range(i, n):
                if not (rows[i][j] + rows[j][i]).is_zero():
                    raise ValueError(
                        f"entries ({i},{j}) and ({j},{i}) are not antisymmetric"
                    )
        object.__setattr__(self, "entries", rows)

    @property
    def base_dim(self) -> int:
        return len(self.entries)

    @classmethod
    def zero(cls, n: int) -> "PolyTwoForm":
        z = Poly.zero(n)
        return cls(tuple(tuple(z for _ in range(n)) for _ in range(n)))

    @classmethod
    def from_constant(cls, matrix) -> "PolyTwoForm":
        rows = [list(row) for row in matrix]
        n = len(rows)
        return cls(
            tuple(
                tuple(Poly.constant(_coerce(entry), n) for entry in row)
                for row in rows
            )
        )

    def evaluate(self, point) -> np.ndarray:
        point = list(point)
        n = self.base_dim
        out = np.zeros((n, n))
        for i in range(n):
            for j in range(n):
                out[i, j] = float(self.entries[i][j].evaluate(point))
        return out


@dataclass(frozen=True)
class PolySection:
    """A section (X, alpha) of TM + T*M with polynomial components."""

    tangent: PolyVectorField
    covector: PolyOneForm

    def __post_init__(self) -> None:
        if self.tangent.base_dim != self.covector.base_dim:
            raise ValueError("tangent and covector parts have different dimensions")

    @property
    def base_dim(self) -> int:
        return self.tangent.base_dim

    def evaluate(self, point) -> np.ndarray:
        return np.concatenate([self.tangent.evaluate(point), self.covector.evaluate(point)])

    def __add__(self, other: "PolySection") -> "PolySection":
        return PolySection(self.tangent + other.tangent, self.covector + other.covector)

    def __sub__(self, other: "PolySection") -> "PolySection":
        return PolySection(self.tangent - other.tangent, self.covector - other.covector)

    def __neg__(self) -> "PolySection":
        return PolySection(-self.tangent, -self.covector)

    def __mul__(self, scalar) -> "PolySection":
        return PolySection(self.tangent * scalar, self.covector * scalar)

    __rmul__ = __mul__

    @classmethod
    def zero(cls, n: int) -> "PolySection":
        return cls(PolyVectorField.zero(n), PolyOneForm.zero(n))


# -- exterior calculus ----------------------------------------------------


def d_function(f: Poly) -> PolyOneForm:
    """df, componentwise partial derivatives."""
    return PolyOneForm(tuple(f.partial(i) for i in range(f.n_vars)))


def d_oneform(alpha: PolyOneForm) -> PolyTwoForm:
    """(d alpha)_ij = d_i alpha_j - d_j alpha_i."""
    n = alpha.base_dim
    comps = alpha.components
    return PolyTwoForm(
        tuple(
            tuple(comps[j].partial(i) - comps[i].partial(j) for j in range(n))
            for i in range(n)
        )
    )


def contract(field: PolyVectorField, form: PolyTwoForm) -> PolyOneForm:
    """(i_X W)_j = sum_i X_i W_ij."""
    n = field.base_dim
    if form.base_dim != n:
        raise ValueError("field and two-form live on different spaces")
    out = []
    for j in range(n):
        total = Poly.zero(n)
        for i in range(n):
            total = total + field.components[i] * form.entries[i][j]
        out.append(total)
    return PolyOneForm(tuple(out))


def lie_bracket(x: PolyVectorField, y: PolyVectorField) -> PolyVectorField:
    """[X, Y]^i = X^j d_j Y^i - Y^j d_j X^i."""
    n = x.base_dim
    if y.base_dim != n:
        raise ValueError("fields live on different spaces")
    out = []
    for i in range(n):
        total = Poly.zero(n)
        for j in range(n):
            total = total + x.components[j] * y.components[i].partial(j)
            total = total - y.components[j] * x.components[i].partial(j)
        out.append(total)
    return PolyVectorField(tuple(out))


def lie_derivative_oneform(x: PolyVectorField, alpha: PolyOneForm) -> PolyOneForm:
    """Cartan formula: L_X alpha = i_X d(alpha) + d(alpha(X))."""
    return contract(x, d_oneform(alpha)) + d_function(alpha.pair(x))


def section_pairing(s1: PolySection, s2: PolySection) -> Poly:
    """<s1, s2> = alpha(Y) + beta(X) as a polynomial function."""
    return s1.covector.pair(s2.tangent) + s2.covector.pair(s1.tangent)


def courant_bracket(s1: PolySection, s2: PolySection) -> PolySection:
    """([X,Y], L_X beta - L_Y alpha + 1/2 d(alpha(Y) - beta(X)))."""
    x, alpha = s1.tangent, s1.covector
    y, beta = s2.tangent, s2.covector
    vec = lie_bracket(x, y)
    correction = alpha.pair(y) - beta.pair(x)
    form = (
        lie_derivative_oneform(x, beta)
        - lie_derivative_oneform(y, alpha)
        + Fraction(1, 2) * d_function(correction)
    )
    return PolySection(vec, form)


def dorfman_bracket(s1: PolySection, s2: PolySection) -> PolySection:
    """([X,Y], L_X beta - i_Y d(alpha))."""
    x, alpha = s1.tangent, s1.covector
    y, beta = s2.tangent, s2.covector
    vec = lie_bracket(x, y)
    form = lie_derivative_oneform(x, beta) - contract(y, d_oneform(alpha))
    return PolySection(vec, form)


# -- push-forwards along orthogonal matrices --------------------------------


def _fraction_matrix(matrix) -> list[list[Fraction]]:
    rows = [[_coerce(entry) for entry in row] for row in matrix]
    n = len(rows)
    if any(len(r) != n for r in rows):
        raise ValueError("matrix must be square")
    approx = np.array([[float(e) for e in row] for row in rows])
    if n and np.max(np.abs(approx.T @ approx - np.eye(n))) > 1e-9:
        raise ValueError("push-forward is only defined for orthogonal matrices")
    return rows


def _pushforward_components(rows, comps):
    """g^T . C(g x) for components C, exact in the entries of g."""
    n = len(rows)
    composed = [c.subs_linear(rows) for c in comps]
    out = []
    for i in range(n):
        total = Poly.zero(n)
        for j in range(n):
            total = total + rows[j][i] * composed[j]
        out.append(total)
    return tuple(out)


def pushforward_field(matrix, field: PolyVectorField) -> PolyVectorField:
    """(Phi_g)_* X at m, i.e. g^T X(g m), for orthogonal g."""
    rows = _fraction_matrix(matrix)
    if len(rows) != field.base_dim:
        raise ValueError("matrix and field dimensions differ")
    return PolyVectorField(_pushforward_components(rows, field.components))


def pushforward_oneform(matrix, alpha: PolyOneForm) -> PolyOneForm:
    """Push-forward of a one-form; same formula as for fields since g is
    orthogonal (g^{-T} = g)."""
    rows = _fraction_matrix(matrix)
    if len(rows) != alpha.base_dim:
        raise ValueError("matrix and one-form dimensions differ")
    return PolyOneForm(_pushforward_components(rows, alpha.components))


def pushforward_section(matrix, section: PolySection) -> PolySection:
    return PolySection(
        pushforward_field(matrix, section.tangent),
        pushforward_oneform(matrix, section.covector),
    )


# -- Dirac field specifications ---------------------------------------------


@dataclass(frozen=True)
class BivectorSpec:
    """Graph of a bivector: sections (Pi e_i, e_i)."""

    matrix: PolyTwoForm

    @property
    def base_dim(self) -> int:
        return self.matrix.base_dim


@dataclass(frozen=True)
class TwoFormSpec:
    """Graph of a two-form: sections (e_i, i_{e_i} W)."""

    matrix: PolyTwoForm

    @property
    def base_dim(self) -> int:
        return self.matrix.base_dim


@dataclass(frozen=True)
class DistributionSpec:
    """Constant Dirac structure Delta + ann(Delta)."""

    subspace: Subspace

    @property
    def base_dim(self) -> int:
        return self.subspace.ambient_dim


@dataclass(frozen=True)
class SectionsSpec:
    """Explicit generating sections, with a basepoint certifying rank n."""

    sections: tuple
    basepoint: tuple

    def __post_init__(self) -> None:
        sections = tuple(self.sections)
        if not sections:
            raise ValueError("sections variant needs at least one section")
        n = sections[0].base_dim
        if any(s.base_dim != n for s in sections):
            raise ValueError("sections live on different spaces")
        if len(sections) != n:
            raise ValueError(f"expected {n} sections, got {len(sections)}")
        basepoint = tuple(float(c) for c in self.basepoint)
        if len(basepoint) != n:
            raise ValueError("basepoint has the wrong number of coordinates")
        object.__setattr__(self, "sections", sections)
        object.__setattr__(self, "basepoint", basepoint)
        evaluate_at(self, basepoint)  # raises DegeneratePointError if rank < n

    @property
    def base_dim(self) -> int:
        return self.sections[0].base_dim


DiracFieldSpec = Union[BivectorSpec, TwoFormSpec, DistributionSpec, SectionsSpec]


def generating_sections(spec: DiracFieldSpec) -> tuple:
    """Canonical polynomial sections spanning the structure pointwise."""
    n = spec.base_dim
    if isinstance(spec, BivectorSpec):
        out = []
        for i in range(n):
            column = PolyVectorField(
                tuple(spec.matrix.entries[j][i] for j in range(n))
            )
            out.append(PolySection(column, PolyOneForm.from_constant(_unit(i, n))))
        return tuple(out)
    if isinstance(spec, TwoFormSpec):
        out = []
        for i in range(n):
            row = PolyOneForm(tuple(spec.matrix.entries[i][j] for j in range(n)))
            out.append(PolySection(PolyVectorField.from_constant(_unit(i, n)), row))
        return tuple(out)
    if isinstance(spec, DistributionSpec):
        out = []
        for v in spec.subspace.basis:
            out.append(
                PolySection(PolyVectorField.from_constant(v), PolyOneForm.zero(n))
            )
        for w in spec.subspace.annihilator().basis:
            out.append(
                PolySection(PolyVectorField.zero(n), PolyOneForm.from_constant(w))
            )
        return tuple(out)
    if isinstance(spec, SectionsSpec):
        return spec.sections
    raise TypeError(f"not a Dirac field spec: {type(spec).__name__}")


def evaluate_at(spec: DiracFieldSpec, point, tol: float = DEFAULT_TOL) -> LinearDirac:
    """The fiber D(m) as a LinearDirac."""
    n = spec.base_dim
    point = [float(c) for c in point]
    if len(point) != n:
        raise ValueError(f"point of length {len(point)}, expected {n}")
    if isinstance(spec, BivectorSpec):
        return from_bivector(spec.matrix.evaluate(point), tol)
    if isinstance(spec, TwoFormSpec):
        return from_two_form(spec.matrix.evaluate(point), tol)
    if isinstance(spec, DistributionSpec):
        delta = spec.subspace
        if delta.tol != tol:
            delta = Subspace(delta.ambient_dim, delta.basis, tol)
        return from_distribution(delta)
    if isinstance(spec, SectionsSpec):
        rows = [s.evaluate(point) for s in spec.sections]
        space = span(rows, ambient_dim=2 * n, tol=tol)
        if space.dim != n or not is_lagrangian(space):
            raise DegeneratePointError(
                f"sections span a rank-{space.dim} non-Dirac space at point "
                f"{tuple(point)}"
            )
        return LinearDirac(n, space)
    raise TypeError(f"not a Dirac field spec: {type(spec).__name__}")


# -- sampled closure checks ---------------------------------------------------


@dataclass(frozen=True)
class BracketResidual:
    """One failing membership test: section pair x sample point."""

    first: int
    second: int
    point_index: int
    residual: float


@dataclass(frozen=True)
class SampleCheckReport:
    kind: str
    ok: bool
    tol: float
    max_residual: float
    failures: tuple
    skipped: tuple

    def describe(self) -> str:
        state = "pass" if self.ok else "fail"
        msg = f"{self.kind}: {state} (max residual {self.max_residual:.3e})"
        if self.skipped:
            msg += f", skipped points {list(self.skipped)}"
        return msg


def _membership_residual(value: np.ndarray, projector: np.ndarray) -> float:
    defect = value - projector @ value
    return float(np.linalg.norm(defect) / max(1.0, np.linalg.norm(value)))


def _sampled_check(kind, spec, derived, samples, tol):
    failures = []
    skipped = []
    max_residual = 0.0
    for p_idx, point in enumerate(samples):
        try:
            fiber = evaluate_at(spec, point, tol)
        except DegeneratePointError:
            skipped.append(p_idx)
            continue
        projector = fiber.space.projector()
        for i, j, section in derived:
            residual = _membership_residual(section.evaluate(point), projector)
            max_residual = max(max_residual, residual)
            if residual > tol:
                failures.append(BracketResidual(i, j, p_idx, residual))
    return SampleCheckReport(
        kind=kind,
        ok=not failures,
        tol=tol,
        max_residual=max_residual,
        failures=tuple(failures),
        skipped=tuple(skipped),
    )


def integrability_check(
    spec: DiracFieldSpec, samples, tol: float = DEFAULT_TOL
) -> SampleCheckReport:
    """Courant brackets of generating sections stay in the structure.

    Sampled proxy for closedness: for every pair of generating sections the
    bracket value at each sample must lie in the fiber there.
    """
    sections = generating_sections(spec)
    derived = [
        (i, j, courant_bracket(sections[i], sections[j]))
        for i in range(len(sections))
        for j in range(i + 1, len(sections))
    ]
    return _sampled_check("integrability", spec, derived, samples, tol)


def infinitesimal_invariance(
    spec: DiracFieldSpec, action, samples, tol: float = DEFAULT_TOL
) -> SampleCheckReport:
    """Lie derivatives along the circle generator stay in the structure.

    ``action`` only needs a ``circle`` attribute (or None); finite factors
    contribute nothing infinitesimal, so an action without a circle passes
    vacuously.
    """
    circle = getattr(action, "circle", None)
    if circle is None:
        return SampleCheckReport(
            kind="invariance",
            ok=True,
            tol=tol,
            max_residual=0.0,
            failures=(),
            skipped=(),
        )
    xi = PolyVectorField.from_linear(circle.generator())
    sections = generating_sections(spec)
    derived = [
        (
            0,
            k,
            PolySection(
                lie_bracket(xi, s.tangent),
                lie_derivative_oneform(xi, s.covector),
            ),
        )
        for k, s in enumerate(sections)
    ]
    return _sampled_check("invariance", spec, derived, samples, tol)
