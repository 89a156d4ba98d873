"""Pointwise reduction of a Dirac structure under a compact linear action.

Two routes are computed and compared at each sample point m:

* isotropy route: restrict to the fixed space of the isotropy subgroup
  (a backward image), then push forward along the quotient by the
  remaining group directions;
* orbit route: intersect the fiber with the descending window
  (orbit-type tangent plus admissible covectors) and map both components
  onto the representative of the quotient.

Quotient tangent spaces are modeled by Euclidean orthogonal complements of
the vertical inside the total, which is legitimate because the action is
orthogonal.  The canonical identification between the two quotient models
is induced by inclusion of the fixed space into the orbit-type tangent.
"""

from __future__ import annotations

from dataclasses import dataclass

import numpy as np

from .action import (
    ActionSpec,
    AmbiguousIsotropyError,
    IsotropyDescriptor,
    average_projector,
    fixed_subspace,
    isotropy,
    v_annihilator,
    vertical_space,
)
from .lindirac import (
    ForwardImage,
    LinearDirac,
    backward_image,
    forward_image,
    is_lagrangian,
    transform,
)
from .polyfield import DegeneratePointError, DiracFieldSpec, evaluate_at
from .subspace import DEFAULT_TOL, Subspace, direct_sum, nullspace, span

__all__ = [
    "InternalConsistencyError",
    "QuotientModel",
    "RankDims",
    "RankRow",
    "RankClass",
    "RankReport",
    "RouteComparison",
    "PointReduction",
    "k_perp",
    "restrict_to_stratum",
    "reduce_isotropy_route",
    "reduce_orbit_route",
    "compare_routes",
    "rank_report",
    "reduce_point",
    "descriptor_classes",
]

STATUS_OK = "ok"
STATUS_BOUNDARY = "skipped-boundary"
STATUS_DEGENERATE = "skipped-degenerate"


class InternalConsistencyError(RuntimeError):
    """A covector that must annihilate the vertical space does not."""


@dataclass(frozen=True)
class QuotientModel:
    """Linear model of a quotient tangent space at one point.

    ``projection`` maps ambient coordinates to coordinates on the
    representative (the Euclidean complement of ``vertical`` inside
    ``total``); restricted to the representative it is an isometry.
    """

    point: np.ndarray
    total: Subspace
    vertical: Subspace
    representative: Subspace
    projection: np.ndarray  # (r, n)

    @property
    def reduced_dim(self) -> int:
        return self.representative.dim


def _make_model(point, total: Subspace, vertical: Subspace, tol: float) -> QuotientModel:
    basis = total.basis  # (t, n) orthonormal rows
    if vertical.dim:
        local = vertical.basis @ basis.T  # vertical in total coordinates
        rep_local = nullspace(local, tol)
    else:
        rep_local = np.eye(total.dim)
    projection = rep_local @ basis
    representative = Subspace(total.ambient_dim, projection, tol)
    point = np.array(point, dtype=float)
    point.setflags(write=False)
    return QuotientModel(point, total, vertical, representative, projection)


def k_perp(action: ActionSpec, m, tol: float = DEFAULT_TOL) -> Subspace:
    """The smooth-orthogonal window R^n + V°(m) inside R^2n."""
    return direct_sum(
        Subspace.full(action.n, tol), v_annihilator(action, m, tol)
    )


def restrict_to_stratum(
    spec: DiracFieldSpec, action: ActionSpec, m, tol: float = DEFAULT_TOL
) -> LinearDirac:
    """D_Q(m): backward image of D(m) under the inclusion of Fix(G_m).

    Coordinates on the stratum are an orthonormal basis of Fix(G_m).
    """
    fix = fixed_subspace(isotropy(action, m, tol), action, tol)
    d = evaluate_at(spec, m, tol)
    return backward_image(fix.basis.T, d)


def reduce_isotropy_route(
    spec: DiracFieldSpec, action: ActionSpec, m, tol: float = DEFAULT_TOL
):
    """Restrict to the isotropy stratum, then quotient the vertical part.

    Returns (QuotientModel, ForwardImage); the image's ``lagrangian`` flag
    records whether the push-forward produced a Dirac structure (it does
    whenever the constant-rank hypothesis holds at m).
    """
    h = isotropy(action, m, tol)
    fix = fixed_subspace(h, action, tol)
    d = evaluate_at(spec, m, tol)
    d_q = backward_image(fix.basis.T, d)
    v_q = vertical_space(action, m, tol).intersect(fix)
    model = _make_model(m, fix, v_q, tol)
    phi = model.projection @ fix.basis.T  # stratum coords -> representative
    return model, forward_image(phi, d_q)


def reduce_orbit_route(
    spec: DiracFieldSpec, action: ActionSpec, m, tol: float = DEFAULT_TOL
):
    """Span of descending-section values, pushed to the orbit-type quotient.

    The fiber is intersected with T(m) + (V_G°(m) + ann T(m)): tangent parts
    along the orbit-type tangent, covectors admissible once restricted to
    it.  Both components then descend through the quotient projection.
    """
    h = isotropy(action, m, tol)
    fix = fixed_subspace(h, action, tol)
    v = vertical_space(action, m, tol)
    t = fix.sum(v)
    p = average_projector(h, action)
    v_ann = v.annihilator()
    v_g_ann = span(v_ann.basis @ p, ambient_dim=action.n, tol=tol)
    d = evaluate_at(spec, m, tol)

    admissible = v_g_ann.sum(t.annihilator())
    window = direct_sum(t, admissible)
    s_space = d.space.intersect(window)

    n = action.n
    model = _make_model(m, t, v, tol)
    c = model.projection
    rows = []
    for row in s_space.basis:
        alpha = row[n:]
        if v.dim:
            leak = float(np.linalg.norm(v.basis @ alpha))
            if leak > 1e4 * tol * max(1.0, float(np.linalg.norm(alpha))):
                raise InternalConsistencyError(
                    f"descending covector does not annihilate the vertical "
                    f"space (residual {leak:.3e})"
                )
        rows.append(np.concatenate([c @ row[:n], c @ alpha]))
    r = model.reduced_dim
    space = span(rows, ambient_dim=2 * r, tol=tol)
    image = ForwardImage(
        base_dim=r,
        space=space,
        lagrangian=is_lagrangian(space),
        surjective=True,
    )
    return model, image


@dataclass(frozen=True)
class RouteComparison:
    agree: bool
    distance: float


def _compare_reduced(model_a, image_a, model_b, image_b, tol: float) -> RouteComparison:
    """Transport route A through the inclusion-induced isomorphism and
    measure the subspace distance to route B."""
    phi_hat = model_b.projection @ model_a.projection.T
    transported = transform(phi_hat, image_a.dirac)
    distance = transported.space.distance(image_b.space)
    return RouteComparison(agree=bool(distance <= tol), distance=distance)


def compare_routes(
    spec: DiracFieldSpec, action: ActionSpec, m, tol: float = 1e-8
) -> RouteComparison:
    """Run both routes at m and compare them in route B's model."""
    rank_tol = min(DEFAULT_TOL, tol)
    model_a, image_a = reduce_isotropy_route(spec, action, m, rank_tol)
    model_b, image_b = reduce_orbit_route(spec, action, m, rank_tol)
    return _compare_reduced(model_a, image_a, model_b, image_b, tol)


# -- rank bookkeeping ----------------------------------------------------------


@dataclass(frozen=True)
class RankDims:
    """Dimension table at one point."""

    vertical: int
    v_annihilator: int
    v_g_annihilator: int
    tangent_isotropy: int
    tangent_orbit: int
    d_cap_k_perp: int
    d_cap_t_vg: int
    dq_cap_kq_perp: int

    def to_dict(self) -> dict:
        return {
            "V": self.vertical,
            "V_ann": self.v_annihilator,
            "V_G_ann": self.v_g_annihilator,
            "T_G": self.tangent_isotropy,
            "T": self.tangent_orbit,
            "D_cap_K_perp": self.d_cap_k_perp,
            "D_cap_T_plus_VG": self.d_cap_t_vg,
            "DQ_cap_KQ_perp": self.dq_cap_kq_perp,
        }


def _point_dims(spec, action, m, tol) -> tuple[IsotropyDescriptor, RankDims, bool]:
    """Descriptor, dimension table, and the I_q dimension identity flag."""
    h = isotropy(action, m, tol)
    fix = fixed_subspace(h, action, tol)
    v = vertical_space(action, m, tol)
    t = fix.sum(v)
    p = average_projector(h, action)
    v_ann = v.annihilator()
    v_g_ann = span(v_ann.basis @ p, ambient_dim=action.n, tol=tol)
    d = evaluate_at(spec, m, tol)

    k_perp_space = direct_sum(Subspace.full(action.n, tol), v_ann)
    d_k = d.space.intersect(k_perp_space).dim
    # Covector condition taken on the stratum: alpha restricted to T must
    # descend, i.e. alpha in V_G° + ann(T).  This is the window the
    # descending-sections route intersects with.
    d_t_vg = d.space.intersect(direct_sum(t, v_g_ann.sum(t.annihilator()))).dim

    d_q = backward_image(fix.basis.T, d)
    v_q = v.intersect(fix)
    s = fix.dim
    vq_local = span(v_q.basis @ fix.basis.T, ambient_dim=s, tol=tol)
    kq_perp = direct_sum(Subspace.full(s, tol), vq_local.annihilator())
    dq_k = d_q.space.intersect(kq_perp).dim

    dims = RankDims(
        vertical=v.dim,
        v_annihilator=v_ann.dim,
        v_g_annihilator=v_g_ann.dim,
        tangent_isotropy=fix.dim,
        tangent_orbit=t.dim,
        d_cap_k_perp=d_k,
        d_cap_t_vg=d_t_vg,
        dq_cap_kq_perp=dq_k,
    )
    return h, dims, dq_k == d_t_vg


@dataclass(frozen=True)
class RankRow:
    index: int
    point: tuple
    status: str
    reason: str | None
    descriptor: IsotropyDescriptor | None
    dims: RankDims | None
    iq_identity: bool | None


@dataclass(frozen=True)
class RankClass:
    """Samples sharing an isotropy descriptor, with a constancy verdict."""

    indices: tuple
    descriptor: IsotropyDescriptor
    constant: bool


@dataclass(frozen=True)
class RankReport:
    rows: tuple
    classes: tuple

    @property
    def all_constant(self) -> bool:
        return all(c.constant for c in self.classes)

    @property
    def iq_all(self) -> bool:
        return all(r.iq_identity for r in self.rows if r.status == STATUS_OK)


def descriptor_classes(descriptors, angle_tol: float = 1e-7) -> list:
    """First-fit partition of descriptors by tolerance equality.

    Returns one list of member positions per class, in first-seen order.
    """
    classes: list = []
    reps: list = []
    for pos, h in enumerate(descriptors):
        for cls_idx, rep in enumerate(reps):
            if h.same_as(rep, angle_tol):
                classes[cls_idx].append(pos)
                break
        else:
            reps.append(h)
            classes.append([pos])
    return classes


def rank_report(
    spec: DiracFieldSpec, action: ActionSpec, samples, tol: float = DEFAULT_TOL
) -> RankReport:
    """Per-point intersection dimensions and per-class constancy verdicts.

    Constancy across samples with the same isotropy descriptor is the
    sampled stand-in for the constant-rank hypothesis; it is evidence, not
    proof, and is reported rather than asserted.
    """
    rows = []
    for index, m in enumerate(samples):
        try:
            h, dims, iq = _point_dims(spec, action, m, tol)
            rows.append(
                RankRow(index, tuple(float(c) for c in m), STATUS_OK, None, h, dims, iq)
            )
        except AmbiguousIsotropyError as exc:
            rows.append(
                RankRow(
                    index,
                    tuple(float(c) for c in m),
                    STATUS_BOUNDARY,
                    str(exc),
                    None,
                    None,
                    None,
                )
            )
        except DegeneratePointError as exc:
            rows.append(
                RankRow(
                    index,
                    tuple(float(c) for c in m),
                    STATUS_DEGENERATE,
                    str(exc),
                    None,
                    None,
                    None,
                )
            )
    ok_rows = [r for r in rows if r.status == STATUS_OK]
    classes = []
    for members in descriptor_classes([r.descriptor for r in ok_rows]):
        group = [ok_rows[i] for i in members]
        classes.append(
            RankClass(
                indices=tuple(r.index for r in group),
                descriptor=group[0].descriptor,
                constant=all(r.dims == group[0].dims for r in group),
            )
        )
    return RankReport(rows=tuple(rows), classes=tuple(classes))


# -- one-point pipeline ----------------------------------------------------------


@dataclass(frozen=True)
class PointReduction:
    """Everything the runner records about one sample point."""

    point: tuple
    status: str
    reason: str | None
    descriptor: IsotropyDescriptor | None
    dims: RankDims | None
    iq_identity: bool | None
    d_q: LinearDirac | None
    route_a: ForwardImage | None
    route_b: ForwardImage | None
    lagrangian_ok: bool | None
    distance: float | None
    agree: bool | None


def reduce_point(
    spec: DiracFieldSpec,
    action: ActionSpec,
    m,
    rank_tol: float = DEFAULT_TOL,
    agree_tol: float = 1e-8,
) -> PointReduction:
    """Run the full per-point pipeline, classifying boundary and degenerate
    points as skips.  Internal-consistency violations propagate."""
    point = tuple(float(c) for c in m)
    try:
        h, dims, iq = _point_dims(spec, action, m, rank_tol)
        d_q = restrict_to_stratum(spec, action, m, rank_tol)
        model_a, image_a = reduce_isotropy_route(spec, action, m, rank_tol)
        model_b, image_b = reduce_orbit_route(spec, action, m, rank_tol)
    except AmbiguousIsotropyError as exc:
        return PointReduction(
            point, STATUS_BOUNDARY, str(exc), None, None, None, None, None,
            None, None, None, None,
        )
    except DegeneratePointError as exc:
        return PointReduction(
            point, STATUS_DEGENERATE, str(exc), None, None, None, None, None,
            None, None, None, None,
        )
    lagrangian_ok = image_a.lagrangian and image_b.lagrangian
    if lagrangian_ok:
        comparison = _compare_reduced(model_a, image_a, model_b, image_b, agree_tol)
        distance, agree = comparison.distance, comparison.agree
    else:
        distance, agree = None, None
    return PointReduction(
        point=point,
        status=STATUS_OK,
        reason=None,
        descriptor=h,
        dims=dims,
        iq_identity=iq,
        d_q=d_q,
        route_a=image_a,
        route_b=image_b,
        lagrangian_ok=lagrangian_ok,
        distance=distance,
        agree=agree,
    )
