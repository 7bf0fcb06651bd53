import cmath
import math

import numpy as np
import pytest

from compqec.channel import random_hermitian, random_unitary, z1
from compqec.errors import (
    BadRank,
    CombinatorialBlowup,
    DegenerateChords,
    NotHermitian,
    NotUnitary,
    ValueOutsideRange,
    WrongDimension,
)
from compqec.matcore import scalar_compression_check
from compqec.numrange import (
    RangeResult,
    chord_intersection,
    hermitian_range,
    hermitian_range_projection,
    normal_hull_membership,
    range_shape_constraints,
    unitary4_rank2_projection,
    unitary4_rank2_range,
    unitary_plot_data,
    unitary_rank2_any_dim,
)
from oracles import in_hull, lines_cross

SIGMA = np.diag([1.0, 2.0, 3.0, 4.0])


@pytest.mark.parametrize("k, expected", [(1, (1, 4)), (2, (2, 3)), (3, None), (4, None)])
def test_hermitian_range_diag(k, expected):
    r = hermitian_range(SIGMA, k)
    if expected is None:
        assert r.is_empty
    else:
        assert (r.kind, r.lo, r.hi) == ("interval", *expected)


def test_hermitian_range_pauli_z():
    z = np.diag([1.0, -1.0])
    r = hermitian_range(z, 1)
    assert (r.lo, r.hi) == (-1, 1)
    assert hermitian_range(z, 2).is_empty


@pytest.mark.parametrize("n", [2, 3, 4])
def test_hermitian_range_z1(n):
    op = z1(n)
    half = 2 ** (n - 1)
    for k in range(1, 2**n + 1):
        r = hermitian_range(op, k)
        if k <= half:
            assert (r.lo, r.hi) == (-1, 1)
        else:
            assert r.is_empty


def test_hermitian_range_singleton_at_repeated_eigenvalue():
    r = hermitian_range(np.diag([1.0, 2.0, 2.0, 2.0, 5.0]), 3)
    assert r.kind == "point" and r.point == 2


def test_hermitian_range_errors():
    with pytest.raises(BadRank):
        hermitian_range(SIGMA, 0)
    with pytest.raises(BadRank):
        hermitian_range(SIGMA, 5)
    with pytest.raises(NotHermitian):
        hermitian_range(np.triu(np.ones((3, 3))), 1)


def test_hermitian_projection_pairs_eigenvectors():
    p = hermitian_range_projection(SIGMA, 2, 2.5)
    assert np.linalg.norm(p.matrix @ SIGMA @ p.matrix - 2.5 * p.matrix) <= 1e-9
    # pairs (e1, e3) and (e2, e4); cos^2 a_lo + sin^2 a_hi = 2.5 gives cos^2 = 1/4 and 3/4
    v1 = np.array([0.5, 0, math.sqrt(0.75), 0])
    v2 = np.array([0, math.sqrt(0.75), 0, 0.5])
    expected = np.outer(v1, v1) + np.outer(v2, v2)
    np.testing.assert_allclose(p.matrix, expected, atol=1e-12)


def test_hermitian_projection_z1_structure():
    op = z1(2)
    p = hermitian_range_projection(op, 2, 0.0)
    assert scalar_compression_check(op, p) == pytest.approx(0.0, abs=1e-12)
    plus = np.diag([1.0, 1.0, 0.0, 0.0])
    # each code vector has equal weight in the two Z1 eigenspaces
    q = np.linalg.eigh(p.matrix)[1][:, 2:]
    for j in range(2):
        assert np.linalg.norm(plus @ q[:, j]) ** 2 == pytest.approx(0.5)


def test_hermitian_projection_outside_range():
    with pytest.raises(ValueOutsideRange):
        hermitian_range_projection(SIGMA, 2, 3.5)
    with pytest.raises(BadRank):
        hermitian_range_projection(SIGMA, 3, 2.5)


def test_hermitian_projection_high_rank_singleton():
    h = np.diag([1.0, 2.0, 2.0, 2.0, 5.0])
    p = hermitian_range_projection(h, 3, 2.0)
    assert p.rank == 3
    assert scalar_compression_check(h, p) == pytest.approx(2.0)


def test_chord_intersection_value():
    z = chord_intersection(1, 1j, -1, cmath.exp(1j * 5 * math.pi / 4))
    assert z == pytest.approx(1 - math.sqrt(2), abs=1e-12)


def test_chord_intersection_matches_line_formula():
    rng = np.random.default_rng(5)
    for _ in range(50):
        th = np.sort(rng.uniform(0, 2 * np.pi, 4))
        pts = [cmath.exp(1j * t) for t in th]
        if min(np.diff(th)) < 1e-3:
            continue
        assert abs(chord_intersection(*pts) - lines_cross(*pts)) <= 1e-9


def test_chord_intersection_rejects_bad_order():
    with pytest.raises(DegenerateChords):
        chord_intersection(1, -1, 1j, -1j)
    with pytest.raises(DegenerateChords):
        chord_intersection(1, 1, -1, -1j)
    with pytest.raises(DegenerateChords):
        chord_intersection(2, 1j, -1, -1j)


def test_unitary4_cases():
    assert unitary4_rank2_range(np.diag([1, 1j, -1, -1j])) == RangeResult.at(0, "a")
    r = unitary4_rank2_range(np.diag([1, 1, 1j, -1]))
    assert (r.kind, r.case_label) == ("point", "b") and r.point == pytest.approx(1)
    r = unitary4_rank2_range(np.diag([1, 1, 1j, 1j]))
    assert (r.kind, r.case_label) == ("segment", "c")
    assert set(np.round(r.endpoints, 12)) == {1, 1j}
    r = unitary4_rank2_range(np.diag([1j, 1j, 1j, -1]))
    assert (r.kind, r.case_label) == ("point", "d") and r.point == pytest.approx(1j)
    w = cmath.exp(1j * math.pi / 3)
    r = unitary4_rank2_range(w * np.eye(4))
    assert (r.kind, r.case_label) == ("point", "e") and r.point == pytest.approx(w)


def test_unitary4_errors():
    with pytest.raises(WrongDimension):
        unitary4_rank2_range(np.eye(3))
    with pytest.raises(NotUnitary):
        unitary4_rank2_range(np.diag([1, 1, 1, 2]))


def test_unitary4_projection_case_a():
    u = np.diag([1, 1j, -1, -1j])
    p = unitary4_rank2_projection(u, 0)
    e = np.eye(4)
    phi1, phi2 = (e[0] + e[2]) / math.sqrt(2), (e[1] + e[3]) / math.sqrt(2)
    expected = np.outer(phi1, phi1) + np.outer(phi2, phi2)
    np.testing.assert_allclose(p.matrix, expected, atol=1e-12)
    assert np.linalg.norm(p.matrix @ u @ p.matrix) <= 1e-9


def test_unitary4_projection_case_b():
    p = unitary4_rank2_projection(np.diag([1, 1, 1j, -1]), 1)
    np.testing.assert_allclose(p.matrix, np.diag([1, 1, 0, 0]), atol=1e-12)


def test_unitary4_projection_segment_and_outside():
    u = np.diag([1, 1, 1j, 1j])
    for lam in np.linspace(0, 1, 7):
        z = lam * 1 + (1 - lam) * 1j
        p = unitary4_rank2_projection(u, z)
        assert scalar_compression_check(u, p) == pytest.approx(z, abs=1e-9)
    with pytest.raises(ValueOutsideRange):
        unitary4_rank2_projection(u, 0.5)


def test_unitary4_haar_projections():
    for seed in range(30):
        u = random_unitary(4, seed)
        r = unitary4_rank2_range(u)
        p = unitary4_rank2_projection(u, r.point)
        pm = p.matrix
        assert np.linalg.norm(pm @ u @ pm - r.point * pm) <= 1e-9


def test_shape_constraints():
    assert range_shape_constraints(4, 2).kind == "unconstrained"
    c = range_shape_constraints(4, 3)
    assert c.kind == "empty-or-singleton" and c.min_geometric_multiplicity == 2
    assert range_shape_constraints(4, 4).kind == "scalar-only"
    with pytest.raises(BadRank):
        range_shape_constraints(4, 5)


def test_hull_membership_examples():
    u = np.diag([1, 1j, -1, -1j])
    assert normal_hull_membership(u, 2, 0)
    assert not normal_hull_membership(u, 2, 0.9)


def test_hull_membership_against_delaunay():
    from itertools import combinations

    rng = np.random.default_rng(2)
    for seed in range(15):
        z = np.exp(1j * rng.uniform(0, 2 * np.pi, 5)) * rng.uniform(0.5, 1.5, 5)
        a = np.diag(z)
        for _ in range(5):
            lam = complex(*rng.uniform(-0.6, 0.6, 2))
            expected = all(in_hull(sub, lam, 0.0) for sub in combinations(z, 4))
            assert normal_hull_membership(a, 2, lam) == expected


def test_hull_membership_cap():
    with pytest.raises(CombinatorialBlowup):
        normal_hull_membership(np.diag(np.arange(12.0)), 6, 5.0, cap=100)


def test_any_dim_five():
    u = np.diag([1, cmath.exp(1j * math.pi / 4), 1j, -1, -1j])
    lam, p = unitary_rank2_any_dim(u)
    assert np.linalg.norm(p.matrix @ u @ p.matrix - lam * p.matrix) <= 1e-9
    assert normal_hull_membership(u, 2, lam)


def test_any_dim_degenerate_and_small():
    lam, p = unitary_rank2_any_dim(np.diag([1, 1j, 1j, -1, -1j]))
    assert lam == pytest.approx(1j)
    with pytest.raises(WrongDimension):
        unitary_rank2_any_dim(np.eye(3))


def test_plot_data():
    data = unitary_plot_data(np.diag([1, 1j, -1, -1j]))
    assert len(data["eigenvalues"]) == 4 and len(data["chords"]) == 2
    assert data["range"].point == 0


def test_range_result_helpers():
    r = RangeResult.interval(2.0, 3.0)
    assert r.contains(2.5) and not r.contains(3.5)
    assert r.distance(2.5 + 1j) == pytest.approx(1.0)
    assert r.includes(RangeResult.at(2.2))
    assert RangeResult.interval(1, 4).includes(r)
    assert not r.includes(RangeResult.interval(1, 4))
    assert RangeResult.empty().distance(0) == math.inf
    assert len(RangeResult.segment(0, 1j).sample(5)) == 5


def test_hermitian_projection_random_endpoints():
    for seed in range(10):
        h = random_hermitian(6, seed)
        for k in (1, 2, 3):
            r = hermitian_range(h, k)
            for lam in (r.lo, r.hi):
                p = hermitian_range_projection(h, k, lam)
                assert scalar_compression_check(h, p) == pytest.approx(lam, abs=1e-8)
