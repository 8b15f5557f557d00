import json

import pytest

from homtower.deltacomplex import (
    AMENABLE_BUILTINS,
    ComplexFormatError,
    DeltaComplex,
    FundamentalCycle,
    NotPseudomanifoldError,
    boundary_matrix,
    builtin,
    cap_duality_check,
    complex_from_json,
    complex_to_json,
    homology_profile,
    orient,
    orientation_double_cover,
    validate_complex,
)
from homtower.intlinalg import FgAbelianGroup, IntegerMatrix

Z = FgAbelianGroup
PRIMES = (2, 3, 5)

# hand-derived homology of every built-in, frozen before the build
EXPECTED_HOMOLOGY = {
    "circle": [Z(1), Z(1)],
    "interval": [Z(1), Z(0)],
    "sphere2": [Z(1), Z(0), Z(1)],
    "torus2": [Z(1), Z(2), Z(1)],
    "klein_bottle": [Z(1), Z(1, (2,)), Z(0)],
    "rp2": [Z(1), Z(0, (2,)), Z(0)],
    "surface2": [Z(1), Z(4), Z(1)],
}


def make(name):
    if name == "surface2":
        return builtin("surface", genus=2)
    return builtin(name)


def all_builtins():
    return [(name, make(name)) for name in EXPECTED_HOMOLOGY]


# ---------------------------------------------------------------------------
# Structure and validation

def test_builtins_validate_and_have_expected_counts():
    assert builtin("circle").counts == (1, 1)
    assert builtin("interval").counts == (2, 1)
    assert builtin("torus2").counts == (1, 3, 2)
    assert builtin("sphere2").counts == (4, 6, 4)
    s2 = builtin("surface", genus=2)
    assert s2.counts == (1, 9, 6)
    assert s2.euler_characteristic() == -2
    for g in (1, 3, 4):
        s = builtin("surface", genus=g)
        assert s.counts == (1, 6 * g - 3, 4 * g - 2)
        assert s.euler_characteristic() == 2 - 2 * g
        assert validate_complex(s).ok


def test_builtin_rejects_bad_names():
    with pytest.raises(ValueError):
        builtin("moebius")
    with pytest.raises(ValueError):
        builtin("surface")
    with pytest.raises(ValueError):
        builtin("surface", genus=0)
    with pytest.raises(ValueError):
        builtin("torus2", genus=2)


def test_validate_reports_out_of_range_face():
    bad = DeltaComplex((1, 2), {1: [(0, 0), (5, 0)]})
    report = validate_complex(bad)
    assert not report.ok
    assert "faces[1][1][0] = 5" in report.problems[0]


def test_validate_reports_chain_violation():
    # one triangle whose boundary is a single unbalanced edge
    bad = DeltaComplex((2, 1, 1), {1: [(1, 0)], 2: [(0, 0, 0)]})
    report = validate_complex(bad)
    assert not report.ok
    assert "chain condition" in report.problems[0]


def test_single_vertex_complex_is_ok():
    point = DeltaComplex((1,), {})
    assert validate_complex(point).ok
    assert point.dim == 0
    assert point.is_connected()


# ---------------------------------------------------------------------------
# Boundary matrices

def test_boundary_matrix_examples():
    circle = builtin("circle")
    assert boundary_matrix(circle, 1) == IntegerMatrix.zeros(1, 1)
    interval = builtin("interval")
    assert boundary_matrix(interval, 1).to_rows() == [[-1], [1]]
    torus = builtin("torus2")
    d2 = boundary_matrix(torus, 2)
    assert d2.to_rows() == [[1, 1], [1, 1], [-1, -1]]
    with pytest.raises(ValueError):
        boundary_matrix(circle, 2)


def test_boundary_columns_obey_norm_bound():
    for name, complex in all_builtins():
        for k in range(1, complex.dim + 1):
            d = boundary_matrix(complex, k)
            for j in range(d.cols):
                assert d.column_norm_sq(j) <= (k + 1) ** 2, (name, k, j)


def test_chain_condition_for_all_builtins():
    for name, complex in all_builtins():
        assert validate_complex(complex).ok, name


# ---------------------------------------------------------------------------
# Homology

def test_homology_tables():
    for name, complex in all_builtins():
        profile = homology_profile(complex, PRIMES)
        assert list(profile.groups) == EXPECTED_HOMOLOGY[name], name


def test_mod_p_dimensions_match_hand_values():
    klein = homology_profile(builtin("klein_bottle"), PRIMES)
    assert [klein.fp_dim(k, 2) for k in range(3)] == [1, 2, 1]
    assert [klein.fp_dim(k, 3) for k in range(3)] == [1, 1, 0]
    torus = homology_profile(builtin("torus2"), PRIMES)
    assert [torus.fp_dim(k, 2) for k in range(3)] == [1, 2, 1]
    rp2 = homology_profile(builtin("rp2"), PRIMES)
    assert [rp2.fp_dim(k, 2) for k in range(3)] == [1, 1, 1]
    assert [rp2.fp_dim(k, 5) for k in range(3)] == [1, 0, 0]


def test_euler_characteristic_equals_alternating_betti():
    for name, complex in all_builtins():
        profile = homology_profile(complex, (2,))
        alternating = sum((-1) ** k * profile.betti(k) for k in range(complex.dim + 1))
        assert alternating == complex.euler_characteristic(), name


# ---------------------------------------------------------------------------
# Orientation

def test_orient_torus_signs():
    cycle = orient(builtin("torus2"))
    assert cycle is not None
    assert cycle.signs == (1, -1)


def test_orient_sphere_is_a_cycle():
    sphere = builtin("sphere2")
    cycle = orient(sphere)
    assert cycle is not None
    column = IntegerMatrix(4, 1, {(t, 0): s for t, s in enumerate(cycle.signs)})
    assert (boundary_matrix(sphere, 2) @ column).is_zero()


def test_orient_surfaces():
    for g in (1, 2, 3):
        cycle = orient(builtin("surface", genus=g))
        assert cycle is not None
        assert cycle.support_size() == 4 * g - 2


def test_orient_detects_nonorientable():
    assert orient(builtin("klein_bottle")) is None
    assert orient(builtin("rp2")) is None


def test_orient_rejects_open_complex():
    with pytest.raises(NotPseudomanifoldError):
        orient(builtin("interval"))


def test_orient_rejects_disconnected_dual_graph():
    # two one-vertex tori wedged at the vertex: connected complex,
    # disconnected dual graph
    wedge = DeltaComplex((1, 6, 4), {
        1: [(0, 0)] * 6,
        2: [(0, 2, 1), (1, 2, 0), (3, 5, 4), (4, 5, 3)],
    })
    assert validate_complex(wedge).ok
    with pytest.raises(NotPseudomanifoldError, match="dual graph"):
        orient(wedge)


def test_negated_cycle_is_still_a_cycle():
    sphere = builtin("sphere2")
    cycle = orient(sphere)
    flipped = cycle.negated()
    column = IntegerMatrix(4, 1, {(t, 0): s for t, s in enumerate(flipped.signs)})
    assert (boundary_matrix(sphere, 2) @ column).is_zero()
    with pytest.raises(ValueError):
        FundamentalCycle((1, 0))


# ---------------------------------------------------------------------------
# Orientation double cover

def test_klein_bottle_double_cover_is_torus_like():
    cover, projection = orientation_double_cover(builtin("klein_bottle"))
    assert cover.counts == (2, 6, 4)
    assert cover.euler_characteristic() == 0
    assert orient(cover) is not None
    profile = homology_profile(cover, (2,))
    assert list(profile.groups) == [Z(1), Z(2), Z(1)]
    assert projection.degree == 2
    # every base simplex is covered exactly twice in every dimension
    for k in range(3):
        for base in range(builtin("klein_bottle").counts[k]):
            assert projection.base_index[k].count(base) == 2


def test_rp2_double_cover_is_sphere_like():
    cover, _ = orientation_double_cover(builtin("rp2"))
    assert cover.counts == (4, 6, 4)
    assert cover.euler_characteristic() == 2
    profile = homology_profile(cover, (2,))
    assert list(profile.groups) == [Z(1), Z(0), Z(1)]


def test_double_cover_rejects_orientable_input():
    with pytest.raises(ValueError, match="orientable"):
        orientation_double_cover(builtin("torus2"))


# ---------------------------------------------------------------------------
# Cap product duality

def test_cap_duality_on_torus_and_sphere():
    for name in ("torus2", "sphere2"):
        complex = make(name)
        cycle = orient(complex)
        report = cap_duality_check(complex, cycle)
        assert report.all_isomorphisms, name
        for k, record in enumerate(report.records):
            assert record.degree == k
            assert record.source == record.target


def test_cap_duality_records_expected_groups():
    report = cap_duality_check(builtin("torus2"), orient(builtin("torus2")))
    assert report.record(0).source == Z(1)   # H^2 -> H_0
    assert report.record(1).source == Z(2)   # H^1 -> H_1
    assert report.record(2).source == Z(1)   # H^0 -> H_2


def test_unit_cocycle_caps_to_fundamental_cycle():
    # the all-ones vertex cochain capped with tau gives back tau on the nose
    for name in ("torus2", "sphere2"):
        complex = make(name)
        cycle = orient(complex)
        n = complex.dim
        from homtower.deltacomplex import _back_face, _front_face
        out = [0] * complex.counts[n]
        for t, s in enumerate(cycle.signs):
            front_vertex = _front_face(complex, t, 0)
            assert 0 <= front_vertex < complex.counts[0]
            out[_back_face(complex, t, n)] += s * 1
        assert tuple(out) == cycle.signs, name


def test_cap_duality_rejects_fake_cycle():
    sphere = builtin("sphere2")
    bad = FundamentalCycle((1, 1, 1, 1))
    cycle = orient(sphere)
    if bad == cycle or bad == cycle.negated():
        bad = FundamentalCycle((1, 1, 1, -1))
    with pytest.raises(ValueError, match="cycle"):
        cap_duality_check(sphere, bad)


# ---------------------------------------------------------------------------
# Poincare duality numerics (oriented closed examples)

def test_poincare_duality_betti_and_torsion():
    for name in ("circle", "sphere2", "torus2", "surface2"):
        complex = make(name)
        assert orient(complex) is not None
        n = complex.dim
        profile = homology_profile(complex, (2,))
        for k in range(n + 1):
            assert profile.betti(k) == profile.betti(n - k), (name, k)
        for k in range(n):
            assert profile.torsion_order(k) == profile.torsion_order(n - k - 1), (name, k)


# ---------------------------------------------------------------------------
# JSON interchange

def test_json_round_trip():
    for name, complex in all_builtins():
        blob = json.dumps(complex_to_json(complex))
        again = complex_from_json(json.loads(blob))
        assert again == complex, name


def test_json_parser_positions():
    with pytest.raises(ComplexFormatError, match=r"\$"):
        complex_from_json([1, 2])
    with pytest.raises(ComplexFormatError, match="missing key"):
        complex_from_json({"dim": 1, "counts": [1, 1]})
    with pytest.raises(ComplexFormatError, match="counts"):
        complex_from_json({"dim": 1, "counts": [1], "faces": {"1": []}})
    with pytest.raises(ComplexFormatError, match=r"faces\.1\[0\]\[1\]"):
        complex_from_json({"dim": 1, "counts": [1, 1], "faces": {"1": [[0, -2]]}})
    with pytest.raises(ComplexFormatError, match=r"faces\.1"):
        complex_from_json({"dim": 1, "counts": [1, 2], "faces": {"1": [[0, 0]]}})
    with pytest.raises(ComplexFormatError, match="unexpected keys"):
        complex_from_json({"dim": 0, "counts": [1], "faces": {"1": []}})


def test_amenable_registry_is_explicit():
    assert "torus2" in AMENABLE_BUILTINS
    assert "circle" in AMENABLE_BUILTINS
    assert "klein_bottle" not in AMENABLE_BUILTINS
    assert "surface_2" not in AMENABLE_BUILTINS
