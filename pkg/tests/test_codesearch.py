import cmath
import math

import numpy as np
import pytest

from compqec.channel import make_buc, random_unitary, unitary_mixture, z1, zz
from compqec.codesearch import (
    SearchBudget,
    _canonical_rotation,
    find_codes_buc4,
    multi_unitary_common_code,
    pauli_demo_channel,
    twoqubit_generic_solve,
    z1_code,
    zz_code,
)
from compqec.errors import BadParameter, BadSupport, DegenerateSpectrum, EmptySweep, NotOrthonormal, NotUnitary
from compqec.matcore import scalar_compression_check
from compqec.numrange import unitary4_rank2_projection, unitary4_rank2_range
from compqec.qec import kl_verify
from oracles import kl_residual

E = np.eye(4)
P1 = np.diag([1.0, 0, 0, 1])
PM1 = np.diag([0, 1.0, 1, 0])


def subspace_distance(p, q):
    return np.linalg.norm(p - q)


@pytest.mark.parametrize("a", np.linspace(0, 1, 11))
def test_zz_code_compression(a):
    code = zz_code(a)
    pm = code.projection.matrix
    assert np.linalg.norm(pm @ zz() @ pm - (2 * a - 1) * pm) <= 1e-12
    assert kl_verify(make_buc(E, zz(), 0.3).kraus(), code.projection).correctable


def test_zz_code_endpoints_exact():
    assert np.array_equal(zz_code(1.0).projection.matrix, P1)
    assert np.array_equal(zz_code(0.0).projection.matrix, PM1)
    with pytest.raises(BadParameter):
        zz_code(1.2)


def test_zz_code_midpoint():
    pm = zz_code(0.5).projection.matrix
    assert np.linalg.norm(pm @ zz() @ pm) <= 1e-10


def test_z1_code_standard_basis():
    code = z1_code(E[0], E[1], E[2], E[3])
    v1, v2 = (E[0] + E[2]) / math.sqrt(2), (E[1] + E[3]) / math.sqrt(2)
    np.testing.assert_allclose(code.projection.matrix, np.outer(v1, v1) + np.outer(v2, v2), atol=1e-14)
    pm = code.projection.matrix
    assert np.linalg.norm(pm @ z1(2) @ pm) <= 1e-12


def test_z1_code_random_pairs():
    rng = np.random.default_rng(3)
    for _ in range(10):
        a, _ = np.linalg.qr(rng.standard_normal((2, 2)) + 1j * rng.standard_normal((2, 2)))
        b, _ = np.linalg.qr(rng.standard_normal((2, 2)) + 1j * rng.standard_normal((2, 2)))
        plus = [np.concatenate([a[:, j], [0, 0]]) for j in range(2)]
        minus = [np.concatenate([[0, 0], b[:, j]]) for j in range(2)]
        code = z1_code(plus[0], plus[1], minus[0], minus[1])
        rep = kl_verify(make_buc(E, z1(2), 0.4).kraus(), code.projection)
        assert rep.correctable and abs(rep.estimates[0, 1]) <= 1e-12
        # the code meets each Z1 eigenspace in a two-dimensional image
        pp = np.diag([1, 1, 0, 0]) @ code.projection.matrix
        pm = np.diag([0, 0, 1, 1]) @ code.projection.matrix
        assert np.linalg.matrix_rank(pp, tol=1e-10) == 2
        assert np.linalg.matrix_rank(pm, tol=1e-10) == 2


def test_z1_code_errors():
    with pytest.raises(NotOrthonormal):
        z1_code(E[0], E[0], E[2], E[3])
    with pytest.raises(BadSupport):
        z1_code(E[0], E[1], E[2], E[0])


def test_canonical_rotation_phase_invariant():
    z = np.exp(1j * np.array([0.1, 0.9, 2.0, 4.0]))
    base = z[_canonical_rotation(z)]
    for phi in (0.3, 1.7, 3.0):
        w = np.sort_complex(z * cmath.exp(1j * phi))
        w = w[np.argsort(np.mod(np.angle(w), 2 * np.pi))]
        assert w[_canonical_rotation(w)] == pytest.approx(base * cmath.exp(1j * phi))


def test_generic_solve_diag():
    u = np.diag([1, 1j, -1, -1j])
    codes = twoqubit_generic_solve(u, sweep=500, seed=1)
    assert len(codes) > 0
    for c in codes:
        pm = c.projection.matrix
        assert np.linalg.norm(pm @ u @ pm) <= 1e-9


def test_generic_solve_shifted():
    u = np.diag([1, 1j, -1, cmath.exp(1j * 5 * math.pi / 4)])
    lam = 1 - math.sqrt(2)
    codes = twoqubit_generic_solve(u, sweep=300, seed=2)
    assert len(codes) > 0
    for c in codes:
        pm = c.projection.matrix
        assert np.linalg.norm(pm @ u @ pm - lam * pm) <= 1e-9
        assert c.compression_values[(0, 1)] == pytest.approx(lam)


@pytest.mark.parametrize("alpha", [0.0, math.pi / 2])
def test_generic_solve_reproduces_pairing_code(alpha):
    u = random_unitary(4, 12)
    lam = unitary4_rank2_range(u).point
    pairing = unitary4_rank2_projection(u, lam).matrix
    # alpha at either end with all phases zero puts xi1 on one pairing chord
    codes = twoqubit_generic_solve(u, sweep=np.array([[alpha, 0.0, 0.0, 0.0]]))
    assert len(codes) == 1
    assert subspace_distance(codes[0].projection.matrix, pairing) <= 1e-8


def test_generic_solve_haar_value_matches_range():
    for seed in range(5):
        u = random_unitary(4, seed)
        lam = unitary4_rank2_range(u).point
        for c in twoqubit_generic_solve(u, sweep=200, seed=seed):
            assert scalar_compression_check(u, c.projection) == pytest.approx(lam, abs=1e-9)


def test_generic_solve_errors():
    with pytest.raises(DegenerateSpectrum):
        twoqubit_generic_solve(zz())
    with pytest.raises(EmptySweep):
        twoqubit_generic_solve(np.diag([1, 1j, -1, -1j]), sweep=0)


def test_find_codes_zz_family():
    fam = find_codes_buc4(E, zz(), 0.5)
    mats = [c.projection.matrix for c, _ in fam.codes]
    assert any(np.array_equal(m, P1) for m in mats)
    assert any(np.array_equal(m, PM1) for m in mats)
    assert len(mats) == 11 and fam.compression_range.kind == "segment"
    values = sorted(round(c.compression_values[(0, 1)].real / 0.5, 9) for c, _ in fam.codes)
    np.testing.assert_allclose(values, np.linspace(-1, 1, 11), atol=1e-9)


def test_find_codes_haar_all_verified():
    for seed in range(5):
        v, w = random_unitary(4, 100 + seed), random_unitary(4, 200 + seed)
        ch = make_buc(v, w, 0.3).kraus()
        fam = find_codes_buc4(v, w, 0.3, seed=seed)
        assert len(fam.codes) >= 1 and not fam.exhaustive
        for code, _ in fam.codes:
            assert kl_residual(ch.kraus_ops, code.projection.matrix, 2) <= 1e-9


def test_find_codes_identical_unitaries():
    v = random_unitary(4, 3)
    fam = find_codes_buc4(v, v, 0.5)
    assert fam.exhaustive and "all rank-2 subspaces correctable" in fam.notes


def test_find_codes_global_phase_invariant():
    v, w = random_unitary(4, 31), random_unitary(4, 32)
    base = find_codes_buc4(v, w, 0.4, seed=5)
    rotated = find_codes_buc4(cmath.exp(0.77j) * v, w, 0.4, seed=5)
    assert len(base.codes) == len(rotated.codes)
    for (a, _), (b, _) in zip(base.codes, rotated.codes):
        assert subspace_distance(a.projection.matrix, b.projection.matrix) <= 1e-9


def test_find_codes_errors():
    with pytest.raises(NotUnitary):
        find_codes_buc4(E, 2 * E, 0.5)


def test_pauli_demo():
    ch = pauli_demo_channel("Z1", 0.2)
    assert np.array_equal(ch.W, z1(2))
    with pytest.raises(BadParameter):
        pauli_demo_channel("XX", 0.2)


def test_common_code_trivial():
    r = multi_unitary_common_code([E])
    assert r.found
    np.testing.assert_array_equal(r.code.projection.matrix, np.diag([1, 1, 0, 0]))


def test_common_code_pauli_triple_absent():
    r = multi_unitary_common_code([E, z1(2), zz()])
    assert not r.found


def test_common_code_hidden_code_found():
    b = random_unitary(4, 9)
    u = b @ np.diag([1, 1, 1j, -1]) @ b.conj().T
    v = b @ np.diag([-1j, -1j, 1, cmath.exp(0.3j)]) @ b.conj().T
    r = multi_unitary_common_code([E, u, v], seed=1)
    assert r.found
    assert kl_verify(unitary_mixture([E, u, v]), r.code.projection).correctable


def test_common_code_generic_absent():
    budget = SearchBudget(random_trials=20_000)
    for seed in range(3):
        r = multi_unitary_common_code([E, random_unitary(4, 500 + seed), random_unitary(4, 600 + seed)], budget=budget, seed=seed)
        assert not r.found and not r.proven_empty and r.best_residual > 1e-3
