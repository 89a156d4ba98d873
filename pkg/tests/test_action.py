import math
from fractions import Fraction

import numpy as np
import pytest

from dirac_reduce.action import (
    ActionSpec,
    ActionValidationError,
    AmbiguousIsotropyError,
    CircleFactor,
    ExactnessWarning,
    FiniteGroupRep,
    ZeroAlgebraError,
    average_projector,
    default_quadrature_nodes,
    fixed_subspace,
    fundamental_vector_field,
    haar_average_field,
    haar_average_function,
    haar_average_section,
    isotropy,
    quadrature_nodes_required,
    tangent_isotropy_type,
    tangent_orbit_type,
    v_G_annihilator,
    v_annihilator,
    validate_action,
    vertical_space,
)
from dirac_reduce.poly import Poly, parse_poly
from dirac_reduce.polyfield import PolyOneForm, PolySection, PolyVectorField
from dirac_reduce.subspace import span

from helpers import assert_subspace_close, circle_action, d4_action, z2_reflection_action


def test_circle_generator_and_rotation():
    c = CircleFactor((1, 2), fixed_dim=1)
    assert c.n == 5
    a = c.generator()
    np.testing.assert_allclose(a, -a.T)
    theta = 0.37
    r = c.rotation(theta)
    np.testing.assert_allclose(r @ r.T, np.eye(5), atol=1e-12)
    # block angles scale with the weights
    assert r[0, 0] == pytest.approx(math.cos(theta))
    assert r[2, 2] == pytest.approx(math.cos(2 * theta))
    assert r[4, 4] == 1.0


def test_circle_rejects_zero_weight():
    with pytest.raises(ValueError):
        CircleFactor((0,))


def test_validate_rejects_non_orthogonal():
    with pytest.raises(ActionValidationError):
        validate_action(ActionSpec(2, FiniteGroupRep((np.eye(2), 2 * np.eye(2)))))


def test_validate_rejects_missing_identity():
    refl = np.diag([1.0, -1.0])
    with pytest.raises(ActionValidationError, match="identity"):
        validate_action(ActionSpec(2, FiniteGroupRep((refl,))))


def test_validate_rejects_closure_failure():
    # {I, R(pi/2)} is missing R(pi)
    r = np.array([[0.0, -1.0], [1.0, 0.0]])
    with pytest.raises(ActionValidationError, match="closure"):
        validate_action(ActionSpec(2, FiniteGroupRep((np.eye(2), r))))


def test_validate_rejects_duplicates():
    with pytest.raises(ActionValidationError, match="duplicate"):
        validate_action(ActionSpec(2, FiniteGroupRep((np.eye(2), np.eye(2)))))


def test_validate_rejects_noncommuting_circle():
    # a reflection does not commute with the rotation flow
    refl = np.diag([1.0, -1.0])
    with pytest.raises(ActionValidationError, match="commute"):
        validate_action(
            ActionSpec(2, FiniteGroupRep((np.eye(2), refl)), CircleFactor((1,)))
        )


def test_product_action_validates():
    spec = ActionSpec(
        3,
        FiniteGroupRep((np.eye(3), np.diag([1.0, 1.0, -1.0]))),
        CircleFactor((1,), fixed_dim=1),
    )
    assert validate_action(spec) is spec


def test_fundamental_vector_field():
    act = circle_action((1,))
    xi = fundamental_vector_field(act)
    assert xi.components == (parse_poly("-y", 2), parse_poly("x", 2))
    with pytest.raises(ZeroAlgebraError):
        fundamental_vector_field(z2_reflection_action())


def test_vertical_space():
    act = circle_action((1,))
    v = vertical_space(act, np.array([1.0, 0.0]))
    assert_subspace_close(v, span(np.array([[0.0, 1.0]]), ambient_dim=2))
    assert vertical_space(act, np.zeros(2)).dim == 0
    assert vertical_space(z2_reflection_action(), np.array([1.0, 1.0])).dim == 0


# -- isotropy ----------------------------------------------------------------


def test_isotropy_circle_free_point():
    h = isotropy(circle_action((1,)), np.array([1.0, 0.0]))
    assert not h.continuous_circle
    assert h.pairs == ((0, 0.0),)


def test_isotropy_circle_origin():
    h = isotropy(circle_action((1,)), np.zeros(2))
    assert h.continuous_circle
    assert h.component_count == 1


def test_isotropy_weight_two_has_two_components():
    h = isotropy(circle_action((2,)), np.array([0.9, 0.4]))
    assert not h.continuous_circle
    assert h.component_count == 2
    angles = sorted(t for _, t in h.pairs)
    assert angles[0] == pytest.approx(0.0, abs=1e-12)
    assert angles[1] == pytest.approx(math.pi, abs=1e-12)
    # the nontrivial component really fixes the point
    mats = h.matrices(circle_action((2,)))
    for g in mats:
        np.testing.assert_allclose(g @ [0.9, 0.4], [0.9, 0.4], atol=1e-9)


def test_isotropy_mixed_weights_partial_zero_block():
    act = circle_action((1, 2))
    # first block at the origin: only the second block constrains theta
    h = isotropy(act, np.array([0.0, 0.0, 0.7, 0.2]))
    assert h.component_count == 2
    h_generic = isotropy(act, np.array([0.5, 0.1, 0.7, 0.2]))
    assert h_generic.pairs == ((0, 0.0),)


def test_isotropy_finite_reflection():
    act = z2_reflection_action()
    on_axis = isotropy(act, np.array([1.3, 0.0]))
    assert on_axis.component_count == 2
    off_axis = isotropy(act, np.array([1.3, 0.8]))
    assert off_axis.pairs == ((0, 0.0),)


def test_isotropy_dihedral_table():
    act = d4_action()
    cases = {
        (0.0, 0.0): 8,
        (1.1, 0.0): 2,
        (0.0, 1.3): 2,
        (0.7, 0.7): 2,
        (0.8, -0.8): 2,
        (0.9, 0.4): 1,
    }
    for point, count in cases.items():
        h = isotropy(act, np.array(point))
        assert h.component_count == count, point
        for g in h.matrices(act):
            np.testing.assert_allclose(g @ np.array(point), point, atol=1e-9)


def test_isotropy_boundary_band_is_ambiguous():
    act = z2_reflection_action()
    with pytest.raises(AmbiguousIsotropyError):
        isotropy(act, np.array([1.0, 1e-8]))


def test_isotropy_conjugate_points_share_component_count():
    act = d4_action()
    rot = act.finite.elements[1]
    a = isotropy(act, np.array([1.1, 0.0]))
    b = isotropy(act, rot @ np.array([1.1, 0.0]))
    assert a.component_count == b.component_count
    assert not a.same_as(b)  # different subgroup, same type


def test_descriptor_same_as_tolerates_angle_jitter():
    a = isotropy(circle_action((2,)), np.array([0.9, 0.4]))
    b = isotropy(circle_action((2,)), np.array([-0.3, 1.7]))
    assert a.same_as(b)


# -- averaging ---------------------------------------------------------------


def test_average_projector_idempotent_and_image_fixed():
    act = d4_action()
    for point in [(0.0, 0.0), (1.1, 0.0), (0.7, 0.7), (0.9, 0.4)]:
        h = isotropy(act, np.array(point))
        p = average_projector(h, act)
        np.testing.assert_allclose(p @ p, p, atol=1e-12)
        np.testing.assert_allclose(p, p.T, atol=1e-12)
        fix = fixed_subspace(h, act)
        assert_subspace_close(fix, span(p, ambient_dim=2) if fix.dim else fix)
        # averaging projects onto exactly the fixed vectors
        for g in h.matrices(act):
            np.testing.assert_allclose(g @ p, p, atol=1e-12)


def test_average_projector_continuous_circle_closed_form():
    act = circle_action((1,), fixed_dim=1)
    h = isotropy(act, np.zeros(3))
    assert h.continuous_circle
    np.testing.assert_allclose(average_projector(h, act), np.diag([0.0, 0.0, 1.0]))


def test_fixed_subspace_product_action():
    act = ActionSpec(
        3,
        FiniteGroupRep((np.eye(3), np.diag([1.0, 1.0, -1.0]))),
        CircleFactor((1,), fixed_dim=1),
    )
    validate_action(act)
    h = isotropy(act, np.zeros(3))  # full group
    assert fixed_subspace(h, act).dim == 0
    h_axis = isotropy(act, np.array([0.0, 0.0, 1.0]))
    assert_subspace_close(
        fixed_subspace(h_axis, act), span(np.array([[0.0, 0.0, 1.0]]), ambient_dim=3)
    )


def test_haar_average_function_frozen():
    """x^2 averaged over the weight-1 circle is (x^2 + y^2)/2, exactly."""
    act = circle_action((1,))
    f = parse_poly("x^2", 2)
    avg = haar_average_function(f, act)
    assert avg == parse_poly("1/2*x^2 + 1/2*y^2", 2)


def test_haar_average_field_frozen():
    act = circle_action((1,))
    x_dx = PolyVectorField((parse_poly("x", 2), Poly.zero(2)))
    avg = haar_average_field(x_dx, act)
    assert avg.components == (parse_poly("1/2*x", 2), parse_poly("1/2*y", 2))
    const = PolyVectorField((Poly.one(2), Poly.zero(2)))
    assert all(p.is_zero() for p in haar_average_field(const, act).components)


def test_haar_average_finite_reflection():
    act = z2_reflection_action()
    f = parse_poly("y + x*y + x^2", 2)
    # odd-in-y terms cancel
    assert haar_average_function(f, act) == parse_poly("x^2", 2)


def test_haar_average_is_idempotent():
    act = circle_action((2,))
    f = parse_poly("x^2*y - x + 2", 2)
    once = haar_average_function(f, act)
    assert haar_average_function(once, act) == once


def test_haar_node_doubling_is_exact():
    act = circle_action((3,))
    f = parse_poly("x^3 - x*y^2 + y", 2)
    n = default_quadrature_nodes(act.circle, f.degree(), "function")
    assert haar_average_function(f, act, nodes=n) == haar_average_function(
        f, act, nodes=2 * n
    )


def test_quadrature_node_counts():
    c = CircleFactor((1,))
    assert quadrature_nodes_required(c, 2, "function") == 3
    assert quadrature_nodes_required(c, 2, "field") == 4
    assert default_quadrature_nodes(c, 2, "function") % 2 == 0
    assert default_quadrature_nodes(c, 2, "function") >= 6
    c3 = CircleFactor((3,))
    assert quadrature_nodes_required(c3, 1, "field") == 7


def test_too_few_nodes_warns():
    act = circle_action((1,))
    f = parse_poly("x^2", 2)
    with pytest.warns(ExactnessWarning):
        haar_average_function(f, act, nodes=2)


def test_haar_average_section_kills_constant_poisson_frame():
    act = circle_action((1,))
    s = PolySection(
        PolyVectorField((Poly.zero(2), Poly.constant(-1, 2))),
        PolyOneForm((Poly.one(2), Poly.zero(2))),
    )
    avg = haar_average_section(s, act)
    assert all(p.is_zero() for p in avg.tangent.components)
    assert all(p.is_zero() for p in avg.covector.components)


# -- derived subspaces --------------------------------------------------------


def test_v_annihilator_example():
    act = circle_action((1,))
    ann = v_annihilator(act, np.array([1.0, 0.0]))
    assert_subspace_close(ann, span(np.array([[1.0, 0.0]]), ambient_dim=2))


def test_v_g_annihilator_reflection():
    act = z2_reflection_action()
    out = v_G_annihilator(act, np.array([1.0, 0.0]))
    assert_subspace_close(out, span(np.array([[1.0, 0.0]]), ambient_dim=2))


def test_v_g_annihilator_free_circle_point_is_v_annihilator():
    act = circle_action((1,))
    m = np.array([0.8, 0.3])
    assert_subspace_close(v_G_annihilator(act, m), v_annihilator(act, m))


def test_tangent_spaces_product_action():
    act = ActionSpec(
        3,
        FiniteGroupRep((np.eye(3), np.diag([1.0, 1.0, -1.0]))),
        CircleFactor((1,), fixed_dim=1),
    )
    validate_action(act)
    m = np.array([0.8, 0.5, 0.0])
    t_g = tangent_isotropy_type(act, m)
    t = tangent_orbit_type(act, m)
    assert t_g.dim == 2 and t.dim == 2
    # central circle: the vertical sits inside the isotropy-type tangent
    assert all(t_g.contains(row) for row in vertical_space(act, m).basis)
    assert_subspace_close(t_g, t)


def test_vertical_inside_fixed_subspace_everywhere():
    """With a central circle the orbit direction is fixed by the isotropy."""
    act = ActionSpec(
        3,
        FiniteGroupRep((np.eye(3), np.diag([1.0, 1.0, -1.0]))),
        CircleFactor((1,), fixed_dim=1),
    )
    validate_action(act)
    rng = np.random.default_rng(31)
    for _ in range(10):
        m = rng.uniform(0.3, 1.5, size=3)
        fix = tangent_isotropy_type(act, m)
        for row in vertical_space(act, m).basis:
            assert fix.contains(row)
