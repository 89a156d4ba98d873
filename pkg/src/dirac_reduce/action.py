"""Compact linear symmetry: a finite orthogonal group times one weighted circle.

The group G = F x S^1 acts on R^n by orthogonal matrices, the circle in
standard block form (2x2 rotation blocks with integer weights, identity on
the remaining coordinates).  This module computes isotropy subgroups
exactly, averaging projectors, Haar averages of polynomial objects, and the
pointwise distributions V, V°, V_G°, T_G, T used by the reduction routes.
"""

from __future__ import annotations

import math
import warnings
from dataclasses import dataclass
from fractions import Fraction

import numpy as np

from .poly import Poly, _coerce
from .polyfield import (
    PolyOneForm,
    PolySection,
    PolyVectorField,
    pushforward_field,
    pushforward_oneform,
)
from .subspace import DEFAULT_TOL, Subspace, span

__all__ = [
    "ActionValidationError",
    "AmbiguousIsotropyError",
    "ZeroAlgebraError",
    "ExactnessWarning",
    "FiniteGroupRep",
    "CircleFactor",
    "ActionSpec",
    "IsotropyDescriptor",
    "validate_action",
    "fundamental_vector_field",
    "vertical_space",
    "isotropy",
    "average_projector",
    "fixed_subspace",
    "haar_average_function",
    "haar_average_field",
    "haar_average_oneform",
    "haar_average_section",
    "quadrature_nodes_required",
    "default_quadrature_nodes",
    "v_annihilator",
    "v_G_annihilator",
    "tangent_isotropy_type",
    "tangent_orbit_type",
]

TWO_PI = 2.0 * math.pi


class ActionValidationError(ValueError):
    """The action data violate a group axiom at tolerance."""


class AmbiguousIsotropyError(ValueError):
    """Point too close to a stratum boundary to classify safely."""


class ZeroAlgebraError(ValueError):
    """An infinitesimal operation was requested of a finite group."""


class ExactnessWarning(UserWarning):
    """Quadrature node count below the exactness threshold."""


@dataclass(frozen=True, eq=False)
class FiniteGroupRep:
    """A finite group given by its orthogonal matrices (identity included)."""

    elements: tuple

    def __eq__(self, other) -> bool:
        if not isinstance(other, FiniteGroupRep):
            return NotImplemented
        return len(self.elements) == len(other.elements) and all(
            np.array_equal(a, b) for a, b in zip(self.elements, other.elements)
        )

    def __hash__(self) -> int:
        return hash((len(self.elements), self.elements[0].shape))

    def __post_init__(self) -> None:
        mats = []
        for e in self.elements:
            m = np.array(e, dtype=float)
            if m.ndim != 2 or m.shape[0] != m.shape[1]:
                raise ValueError("group elements must be square matrices")
            m.setflags(write=False)
            mats.append(m)
        if not mats:
            raise ValueError("a finite group needs at least the identity")
        if any(m.shape != mats[0].shape for m in mats):
            raise ValueError("group elements act on different spaces")
        object.__setattr__(self, "elements", tuple(mats))

    @property
    def n(self) -> int:
        return self.elements[0].shape[0]

    @property
    def order(self) -> int:
        return len(self.elements)

    @classmethod
    def trivial(cls, n: int) -> "FiniteGroupRep":
        return cls((np.eye(n),))


@dataclass(frozen=True)
class CircleFactor:
    """Weighted circle on R^(2k+l): rotation by w_j*theta on block j."""

    weights: tuple
    fixed_dim: int = 0

    def __post_init__(self) -> None:
        ws = tuple(int(w) for w in self.weights)
        if any(w == 0 for w in ws):
            raise ValueError("circle weights must be nonzero")
        if self.fixed_dim < 0:
            raise ValueError("fixed_dim must be nonnegative")
        object.__setattr__(self, "weights", ws)
        object.__setattr__(self, "fixed_dim", int(self.fixed_dim))

    @property
    def n(self) -> int:
        return 2 * len(self.weights) + self.fixed_dim

    def generator(self) -> np.ndarray:
        """d/dtheta at 0 of the rotation: block-diagonal w_j * [[0,-1],[1,0]]."""
        a = np.zeros((self.n, self.n))
        for j, w in enumerate(self.weights):
            a[2 * j, 2 * j + 1] = -w
            a[2 * j + 1, 2 * j] = w
        return a

    def rotation(self, theta: float) -> np.ndarray:
        r = np.eye(self.n)
        for j, w in enumerate(self.weights):
            c, s = math.cos(w * theta), math.sin(w * theta)
            r[2 * j : 2 * j + 2, 2 * j : 2 * j + 2] = [[c, -s], [s, c]]
        return r

@dataclass(frozen=True)
class ActionSpec:
    """G = finite x circle acting orthogonally on R^n."""

    n: int
    finite: FiniteGroupRep
    circle: CircleFactor | None = None

    def __post_init__(self) -> None:
        if self.finite.n != self.n:
            raise ValueError(
                f"finite group acts on R^{self.finite.n}, expected R^{self.n}"
            )
        if self.circle is not None and self.circle.n != self.n:
            raise ValueError(
                f"circle acts on R^{self.circle.n}, expected R^{self.n}"
            )

    @classmethod
    def trivial(cls, n: int) -> "ActionSpec":
        return cls(n, FiniteGroupRep.trivial(n), None)


def validate_action(spec: ActionSpec, tol: float = DEFAULT_TOL) -> ActionSpec:
    """Verify orthogonality, identity, closure, inverses, and commutation
    with the circle; raises ActionValidationError listing every violation."""
    violations = []
    elements = spec.finite.elements
    n = spec.n
    eye = np.eye(n)

    def closest(m):
        return min(float(np.max(np.abs(m - e))) for e in elements)

    for i, e in enumerate(elements):
        if np.max(np.abs(e.T @ e - eye)) > tol:
            violations.append(f"element {i} is not orthogonal at tolerance {tol}")
    if closest(eye) > tol:
        violations.append("identity matrix missing from the finite group")
    for i, e in enumerate(elements):
        for j, f in enumerate(elements):
            if closest(e @ f) > tol:
                violations.append(
                    f"closure failure: product of elements {i} and {j} is missing"
                )
        if closest(e.T) > tol:
            violations.append(f"inverse of element {i} is missing")
        for j in range(i + 1, len(elements)):
            if np.max(np.abs(e - elements[j])) <= tol:
                violations.append(f"duplicate elements: {i} and {j} coincide")
    if spec.circle is not None:
        a = spec.circle.generator()
        scale = max(1.0, float(np.max(np.abs(a))))
        for i, e in enumerate(elements):
            if np.max(np.abs(e @ a - a @ e)) > tol * scale:
                violations.append(
                    f"element {i} does not commute with the circle generator"
                )
    if violations:
        raise ActionValidationError("; ".join(violations))
    return spec


def fundamental_vector_field(spec: ActionSpec, xi=1) -> PolyVectorField:
    """The linear field m -> xi * A m of the circle direction xi."""
    if spec.circle is None:
        raise ZeroAlgebraError("the action has no circle factor")
    coeff = _coerce(xi)
    a = spec.circle.generator()
    rows = [[coeff * Fraction(int(entry)) for entry in row] for row in a]
    return PolyVectorField.from_linear(rows)


def vertical_space(spec: ActionSpec, m, tol: float = DEFAULT_TOL) -> Subspace:
    """V(m) = span of the fundamental vector fields at m."""
    m = _as_point(spec, m)
    if spec.circle is None:
        return Subspace.zero(spec.n, tol)
    return span([spec.circle.generator() @ m], ambient_dim=spec.n, tol=tol)


@dataclass(frozen=True)
class IsotropyDescriptor:
    """The subgroup G_m: a circle flag plus finite components (f, theta).

    ``continuous_circle`` is true when the whole circle factor fixes the
    point (vacuously true when there is none); then each pair carries angle
    0 and stands for the component {f} x S^1.
    """

    continuous_circle: bool
    pairs: tuple

    def __post_init__(self) -> None:
        object.__setattr__(
            self,
            "pairs",
            tuple(sorted((int(i), float(t)) for i, t in self.pairs)),
        )

    @property
    def component_count(self) -> int:
        return len(self.pairs)

    def matrices(self, spec: ActionSpec) -> list:
        out = []
        for idx, theta in self.pairs:
            f = spec.finite.elements[idx]
            if spec.circle is None:
                out.append(f)
            else:
                out.append(f @ spec.circle.rotation(theta))
        return out

    def same_as(self, other: "IsotropyDescriptor", angle_tol: float = 1e-7) -> bool:
        if self.continuous_circle != other.continuous_circle:
            return False
        if len(self.pairs) != len(other.pairs):
            return False
        for (i, t), (j, u) in zip(self.pairs, other.pairs):
            if i != j or _angle_distance(t, u) > angle_tol:
                return False
        return True

    def label(self) -> str:
        circ = "S1" if self.continuous_circle else "-"
        return f"circle:{circ} components:{len(self.pairs)}"

    def to_dict(self) -> dict:
        return {
            "continuous_circle": self.continuous_circle,
            "pairs": [[i, t] for i, t in self.pairs],
        }


def _angle_distance(a: float, b: float) -> float:
    d = abs(a - b) % TWO_PI
    return min(d, TWO_PI - d)


def _as_point(spec: ActionSpec, m) -> np.ndarray:
    m = np.asarray(m, dtype=float).reshape(-1)
    if m.shape != (spec.n,):
        raise ValueError(f"point of length {m.shape[0]}, expected {spec.n}")
    return m


def _candidate_angles(source, target, weight, atol, guard):
    """Angles theta with R(weight*theta) source = target on one 2-d block.

    Returns None for "unconstrained" (both vectors vanish), a list of
    candidate angles, or raises on ambiguity.
    """
    ns = float(np.hypot(*source))
    nt = float(np.hypot(*target))
    if ns <= atol and nt <= atol:
        return None
    if min(ns, nt) <= guard:
        if min(ns, nt) <= atol and max(ns, nt) > guard:
            return []  # one side is zero, the other is definitely not
        raise AmbiguousIsotropyError(
            "a rotation block has magnitude inside the guard band"
        )
    if abs(ns - nt) > guard:
        return []
    if abs(ns - nt) > atol:
        raise AmbiguousIsotropyError(
            "rotation-block magnitudes match only inside the guard band"
        )
    psi = math.atan2(target[1], target[0]) - math.atan2(source[1], source[0])
    return [((psi + TWO_PI * r) / weight) % TWO_PI for r in range(abs(int(weight)))]


def isotropy(spec: ActionSpec, m, tol: float = DEFAULT_TOL) -> IsotropyDescriptor:
    """The isotropy subgroup of m, solved exactly per weight block.

    Points whose classification depends on sub-guard-band distinctions
    raise AmbiguousIsotropyError instead of being silently classified.
    """
    m = _as_point(spec, m)
    norm_m = float(np.linalg.norm(m))
    atol = tol * max(norm_m, 1.0)
    guard = 1000.0 * atol
    angle_atol = max(tol, 1e-12)
    angle_guard = 1000.0 * angle_atol

    circle = spec.circle
    if circle is None:
        continuous = True
    else:
        a_m = circle.generator() @ m
        continuous = float(np.linalg.norm(a_m)) <= tol * norm_m

    pairs = []
    for idx, f in enumerate(spec.finite.elements):
        if circle is None or continuous:
            # theta is unconstrained; f belongs iff it fixes m by itself
            residual = float(np.max(np.abs(f @ m - m)))
            if residual <= atol:
                pairs.append((idx, 0.0))
            elif residual <= guard:
                raise AmbiguousIsotropyError(
                    f"finite element {idx} fixes the point only inside the guard band"
                )
            continue

        target = f.T @ m
        k = len(circle.weights)
        fixed_diff = (
            float(np.max(np.abs(target[2 * k :] - m[2 * k :])))
            if circle.fixed_dim
            else 0.0
        )
        if fixed_diff > guard:
            continue
        if fixed_diff > atol:
            raise AmbiguousIsotropyError(
                f"fixed coordinates under element {idx} match only inside the guard band"
            )

        candidates = None  # None = every angle admissible so far
        dead = False
        for j, w in enumerate(circle.weights):
            block = _candidate_angles(
                m[2 * j : 2 * j + 2], target[2 * j : 2 * j + 2], w, atol, guard
            )
            if block is None:
                continue
            if not block:
                dead = True
                break
            if candidates is None:
                candidates = block
                continue
            merged = []
            for t in candidates:
                best = min(_angle_distance(t, u) for u in block)
                if best <= angle_atol:
                    merged.append(t)
                elif best <= angle_guard:
                    raise AmbiguousIsotropyError(
                        "candidate angles of two blocks agree only inside the guard band"
                    )
            candidates = merged
            if not candidates:
                dead = True
                break
        if dead:
            continue
        if candidates is None:
            # not continuous, yet no block constrained the angle: the point is
            # too close to the circle-fixed set to classify
            raise AmbiguousIsotropyError(
                "every rotation block is below tolerance while the vertical "
                "direction is not"
            )
        for theta in candidates:
            residual = float(np.max(np.abs(f @ circle.rotation(theta) @ m - m)))
            if residual <= atol:
                if _angle_distance(theta, 0.0) <= angle_atol:
                    theta = 0.0
                pairs.append((idx, theta))
            elif residual <= guard:
                raise AmbiguousIsotropyError(
                    f"element {idx} with angle {theta:.6f} fixes the point only "
                    "inside the guard band"
                )
    return IsotropyDescriptor(continuous_circle=continuous, pairs=tuple(pairs))


def average_projector(h: IsotropyDescriptor, spec: ActionSpec) -> np.ndarray:
    """Mean of the isotropy-subgroup matrices: the orthogonal projector onto
    the fixed subspace.  The circle factor, when entirely contained, is
    averaged in closed form (rotation blocks to zero, fixed block intact)."""
    n = spec.n
    if h.continuous_circle and spec.circle is not None:
        k2 = 2 * len(spec.circle.weights)
        circle_mean = np.zeros((n, n))
        circle_mean[k2:, k2:] = np.eye(spec.circle.fixed_dim)
        mats = [spec.finite.elements[i] @ circle_mean for i, _ in h.pairs]
    else:
        mats = h.matrices(spec)
    return sum(mats) / len(mats)


def fixed_subspace(
    h: IsotropyDescriptor, spec: ActionSpec, tol: float = DEFAULT_TOL
) -> Subspace:
    """Fix(H) = image of the averaging projector."""
    p = average_projector(h, spec)
    _, s, vh = np.linalg.svd(p)
    return Subspace(spec.n, vh[s > 0.5], tol)


# -- Haar averaging of polynomial objects -----------------------------------


def quadrature_nodes_required(circle: CircleFactor, degree: int, kind: str = "field") -> int:
    """Smallest N for which N-node quadrature is exact.

    Pushing a degree-d object through the circle makes its coefficients
    trigonometric polynomials of degree max|w| * d (functions) or
    max|w| * (d+1) (fields/forms, one extra factor from the frame); uniform
    N-node quadrature is exact up to trigonometric degree N - 1.
    """
    w = max(abs(x) for x in circle.weights)
    if kind == "function":
        return w * degree + 1
    return w * (degree + 1) + 1


def default_quadrature_nodes(circle: CircleFactor, degree: int, kind: str = "field") -> int:
    w = max(abs(x) for x in circle.weights)
    base = max(2 * (w * degree + 1), quadrature_nodes_required(circle, degree, kind))
    return base if base % 2 == 0 else base + 1


def _exact_matrix(matrix) -> list:
    return [[_coerce(entry) for entry in row] for row in np.asarray(matrix, dtype=float)]


# Powers of i as (re, im) pairs, indexed by the exponent mod 4.
_I_POW = (
    (Fraction(1), Fraction(0)),
    (Fraction(0), Fraction(1)),
    (Fraction(-1), Fraction(0)),
    (Fraction(0), Fraction(-1)),
)


def _gmul(a, b):
    return (a[0] * b[0] - a[1] * b[1], a[0] * b[1] + a[1] * b[0])


def _circle_node_count(
    circle: CircleFactor, degree: int, kind: str, nodes: int | None
) -> int:
    needed = quadrature_nodes_required(circle, degree, kind)
    n_nodes = default_quadrature_nodes(circle, degree, kind) if nodes is None else int(nodes)
    if n_nodes < 1:
        raise ValueError("quadrature node count must be positive")
    if n_nodes < needed:
        warnings.warn(
            f"{n_nodes} quadrature nodes cannot integrate trigonometric degree "
            f"{needed - 1} exactly; use at least {needed}",
            ExactnessWarning,
            stacklevel=3,
        )
    return n_nodes


def _circle_quadrature_poly(f: Poly, pairs, n_nodes: int) -> Poly:
    """Uniform N-node circle quadrature of ``f``, evaluated exactly.

    ``pairs`` lists ``(ix, iy, weight)`` for each coordinate pair the circle
    rotates.  In complex coordinates z = x + iy the node substitutions become
    harmonic factors e^{i k theta_r}, and the uniform node average of e^{i k
    theta} is 1 when N divides k and 0 otherwise, so the quadrature sum can
    be carried out in rational arithmetic without floating-point nodes.
    """
    # Change of basis x^p y^q -> z^a zbar^b; the z exponent is stored in the
    # x slot and the zbar exponent in the y slot.
    terms = {exps: (c, Fraction(0)) for exps, c in f.terms}
    for ix, iy, _w in pairs:
        expanded: dict = {}
        for exps, coeff in terms.items():
            p, q = exps[ix], exps[iy]
            base = _gmul(
                (coeff[0] / 2 ** (p + q), coeff[1] / 2 ** (p + q)), _I_POW[(-q) % 4]
            )
            for a in range(p + 1):
                for b in range(q + 1):
                    scale = math.comb(p, a) * math.comb(q, b) * (-1) ** ((q - b) % 2)
                    g = (base[0] * scale, base[1] * scale)
                    e = list(exps)
                    e[ix] = a + b
                    e[iy] = (p - a) + (q - b)
                    key = tuple(e)
                    acc = expanded.get(key)
                    expanded[key] = (g[0] + acc[0], g[1] + acc[1]) if acc else g
        terms = expanded
    # z^a zbar^b picks up e^{i w (a - b) theta} at each node; only exponents
    # aliased to zero survive the average.
    terms = {
        exps: coeff
        for exps, coeff in terms.items()
        if sum(w * (exps[ix] - exps[iy]) for ix, iy, w in pairs) % n_nodes == 0
    }
    for ix, iy, _w in pairs:
        collapsed: dict = {}
        for exps, coeff in terms.items():
            a, b = exps[ix], exps[iy]
            for aa in range(a + 1):
                for bb in range(b + 1):
                    ip = _I_POW[((a - aa) - (b - bb)) % 4]
                    scale = math.comb(a, aa) * math.comb(b, bb)
                    g = _gmul(coeff, (ip[0] * scale, ip[1] * scale))
                    e = list(exps)
                    e[ix] = aa + bb
                    e[iy] = (a - aa) + (b - bb)
                    key = tuple(e)
                    acc = collapsed.get(key)
                    collapsed[key] = (g[0] + acc[0], g[1] + acc[1]) if acc else g
        terms = collapsed
    real = {}
    for exps, (re, im) in terms.items():
        assert im == 0  # the average of a real polynomial is real
        if re:
            real[exps] = re
    return Poly(f.n_vars, real)


def _base_pairs(circle: CircleFactor):
    return tuple((2 * j, 2 * j + 1, w) for j, w in enumerate(circle.weights))


def _circle_quadrature_components(components, circle: CircleFactor, n_nodes: int):
    """Exact circle quadrature of a field-like tuple of component polynomials.

    The components are bundled as sum_i comp_i * xi_i on a doubled variable
    set; the frame variables xi rotate with the same weights as the base
    pairs, which reproduces the orthogonal pushforward componentwise.
    """
    n = len(components)
    bundled: dict = {}
    for i, p in enumerate(components):
        for exps, c in p.terms:
            key = exps + tuple(1 if t == i else 0 for t in range(n))
            bundled[key] = bundled.get(key, Fraction(0)) + c
    pairs = list(_base_pairs(circle))
    pairs += [(n + ix, n + iy, w) for ix, iy, w in _base_pairs(circle)]
    avg = _circle_quadrature_poly(Poly(2 * n, bundled), pairs, n_nodes)
    out: list = [{} for _ in range(n)]
    for exps, c in avg.terms:
        frame = exps[n:]
        assert sum(frame) == 1  # averaging preserves the frame degree
        out[frame.index(1)][exps[:n]] = c
    return tuple(Poly(n, d) for d in out)


def haar_average_function(f: Poly, spec: ActionSpec, nodes: int | None = None) -> Poly:
    """The G-invariant average of a polynomial function."""
    mats = [_exact_matrix(g) for g in spec.finite.elements]
    total = Poly.zero(f.n_vars)
    for m in mats:
        total = total + f.subs_linear(m)
    avg = total * Fraction(1, len(mats))
    if spec.circle is not None:
        n_nodes = _circle_node_count(spec.circle, f.degree(), "function", nodes)
        avg = _circle_quadrature_poly(avg, _base_pairs(spec.circle), n_nodes)
    return avg


def haar_average_field(
    x: PolyVectorField, spec: ActionSpec, nodes: int | None = None
) -> PolyVectorField:
    """The G-invariant average of a vector field."""
    mats = [_exact_matrix(g) for g in spec.finite.elements]
    total = PolyVectorField.zero(x.base_dim)
    for m in mats:
        total = total + pushforward_field(m, x)
    avg = total * Fraction(1, len(mats))
    if spec.circle is not None:
        n_nodes = _circle_node_count(spec.circle, x.degree(), "field", nodes)
        avg = PolyVectorField(
            _circle_quadrature_components(avg.components, spec.circle, n_nodes)
        )
    return avg


def haar_average_oneform(
    alpha: PolyOneForm, spec: ActionSpec, nodes: int | None = None
) -> PolyOneForm:
    """The G-invariant average of a one-form."""
    mats = [_exact_matrix(g) for g in spec.finite.elements]
    total = PolyOneForm.zero(alpha.base_dim)
    for m in mats:
        total = total + pushforward_oneform(m, alpha)
    avg = total * Fraction(1, len(mats))
    if spec.circle is not None:
        n_nodes = _circle_node_count(spec.circle, alpha.degree(), "field", nodes)
        avg = PolyOneForm(
            _circle_quadrature_components(avg.components, spec.circle, n_nodes)
        )
    return avg


def haar_average_section(
    s: PolySection, spec: ActionSpec, nodes: int | None = None
) -> PolySection:
    degree = max(s.tangent.degree(), s.covector.degree())
    mats = [_exact_matrix(g) for g in spec.finite.elements]
    total = PolySection.zero(s.base_dim)
    for m in mats:
        total = total + PolySection(
            pushforward_field(m, s.tangent), pushforward_oneform(m, s.covector)
        )
    avg = total * Fraction(1, len(mats))
    if spec.circle is not None:
        n_nodes = _circle_node_count(spec.circle, degree, "field", nodes)
        avg = PolySection(
            PolyVectorField(
                _circle_quadrature_components(avg.tangent.components, spec.circle, n_nodes)
            ),
            PolyOneForm(
                _circle_quadrature_components(avg.covector.components, spec.circle, n_nodes)
            ),
        )
    return avg


# -- the paper's pointwise distributions -------------------------------------


def v_annihilator(spec: ActionSpec, m, tol: float = DEFAULT_TOL) -> Subspace:
    """V°(m), the annihilator of the vertical space."""
    return vertical_space(spec, m, tol).annihilator()


def v_G_annihilator(spec: ActionSpec, m, tol: float = DEFAULT_TOL) -> Subspace:
    """V_G°(m): the G_m-invariant part of V°(m) (image of the dual averaging
    projector, which for orthogonal actions is the averaging projector itself)."""
    h = isotropy(spec, m, tol)
    p = average_projector(h, spec)
    v_ann = v_annihilator(spec, m, tol)
    return span(v_ann.basis @ p, ambient_dim=spec.n, tol=tol)


def tangent_isotropy_type(spec: ActionSpec, m, tol: float = DEFAULT_TOL) -> Subspace:
    """T_G(m) = Fix(G_m), the tangent space of the isotropy-type manifold."""
    return fixed_subspace(isotropy(spec, m, tol), spec, tol)


def tangent_orbit_type(spec: ActionSpec, m, tol: float = DEFAULT_TOL) -> Subspace:
    """T(m) = T_G(m) + V(m), the tangent space of the orbit-type manifold."""
    return tangent_isotropy_type(spec, m, tol).sum(vertical_space(spec, m, tol))
