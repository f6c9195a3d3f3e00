import math
import random

import numpy as np
import pytest

from fforge.errors import StructureViolation, TooSmall
from fforge.jacobi import jacobi_eigh, jacobi_eigh_batch
from fforge.spectral import (
    ExtremaRule,
    Policy,
    Reason,
    TreeType,
    algebraic_connectivity,
    check_fed,
    classify_tree_type,
    degenerate_fed_heuristic,
    eigen_symmetric,
    fiedler,
    laplacian,
    laplacian_stack,
)
from fforge.enumeration import free_trees, parents
from fforge.tree import add_pendant, build_path, build_rose, build_star, distance, from_edge_list

from conftest import numpy_fiedler, random_tree


def charpoly_roots(mat):
    """Eigenvalues via Faddeev-LeVerrier coefficients and np.roots."""
    n = mat.shape[0]
    coeffs = [1.0]
    m = np.zeros_like(mat)
    for k in range(1, n + 1):
        m = mat @ m + coeffs[-1] * np.eye(n)
        coeffs.append(-np.trace(mat @ m) / k)
    return np.sort(np.roots(coeffs).real)


class TestLaplacian:
    def test_p2(self):
        assert laplacian(build_path(2)).tolist() == [[1, -1], [-1, 1]]

    def test_star(self):
        mat = laplacian(build_star(3))
        assert np.diag(mat).tolist() == [3, 1, 1, 1]
        assert mat[0, 1:].tolist() == [-1, -1, -1]
        assert mat[1:, 1:].tolist() == np.eye(3).tolist()

    def test_rows_sum_to_zero(self):
        rng = random.Random(3)
        for _ in range(20):
            mat = laplacian(random_tree(rng, rng.randint(2, 30)))
            assert np.all(mat.sum(axis=1) == 0)
            assert np.array_equal(mat, mat.T)

    def test_stack_matches_single(self):
        seqs = list(free_trees(9))
        par = np.array([parents(s) for s in seqs])
        from fforge.enumeration import decode
        stack = laplacian_stack(par)
        for b, s in enumerate(seqs):
            assert np.array_equal(stack[b], laplacian(decode(s)))


class TestEigen:
    def test_two_by_two(self):
        res = eigen_symmetric(np.array([[1.0, -1.0], [-1.0, 1.0]]))
        assert res.values == pytest.approx([0.0, 2.0], abs=1e-15)

    def test_identity(self):
        assert eigen_symmetric(np.eye(3)).values.tolist() == [1.0, 1.0, 1.0]

    def test_p3_against_characteristic_polynomial(self):
        mat = laplacian(build_path(3))
        expected = charpoly_roots(mat)
        assert expected == pytest.approx([0.0, 1.0, 3.0], abs=1e-12)
        assert eigen_symmetric(mat).values == pytest.approx(expected, abs=1e-12)

    @pytest.mark.parametrize("n", [1, 2, 5, 17, 40, 80])
    def test_random_symmetric_against_lapack(self, n):
        rng = np.random.default_rng(n)
        a = rng.normal(size=(n, n))
        a = a + a.T
        res = eigen_symmetric(a)
        assert res.values == pytest.approx(np.linalg.eigvalsh(a), abs=1e-12 * n)
        assert res.residual(a) <= 1e-11 * n * np.max(np.abs(a))
        assert res.orthogonality_error() <= 1e-11 * n

    def test_residual_bound_on_trees(self):
        rng = random.Random(11)
        for _ in range(30):
            t = random_tree(rng, rng.randint(2, 40))
            mat = laplacian(t)
            res = eigen_symmetric(mat)
            assert res.residual(mat) <= 1e-11 * t.n
            assert res.orthogonality_error() <= 1e-11 * t.n

    def test_deterministic(self):
        mat = laplacian(build_rose((4, 6, 5)))
        a, b = jacobi_eigh(mat), jacobi_eigh(mat)
        assert np.array_equal(a[0], b[0]) and np.array_equal(a[1], b[1])

    def test_batch_matches_single(self):
        rng = random.Random(5)
        stack = np.stack([laplacian(random_tree(rng, 12)) for _ in range(25)])
        values, vectors = jacobi_eigh_batch(stack)
        for b in range(len(stack)):
            w, v = jacobi_eigh(stack[b])
            assert np.array_equal(values[b], w)
            assert np.array_equal(vectors[b], v)

    def test_batch_shape_checks(self):
        with pytest.raises(ValueError):
            jacobi_eigh_batch(np.zeros((2, 3, 4)))
        values, vectors = jacobi_eigh_batch(np.zeros((0, 3, 3)))
        assert values.shape == (0, 3)


class TestAlgebraicConnectivity:
    def test_path(self):
        assert algebraic_connectivity(build_path(4)) == pytest.approx(2 - math.sqrt(2), abs=1e-12)

    def test_star(self):
        assert algebraic_connectivity(build_star(4)) == pytest.approx(1.0, abs=1e-12)

    def test_rose_plateau(self):
        r3 = 2 * (1 - math.cos(math.pi / 7))
        assert algebraic_connectivity(build_rose((3, 3, 2))) == pytest.approx(r3, abs=1e-12)
        assert r3 == pytest.approx(0.1980622642, abs=1e-10)

    def test_too_small(self):
        with pytest.raises(TooSmall):
            algebraic_connectivity(build_path(1))
        with pytest.raises(TooSmall):
            fiedler(build_path(1))


class TestFiedler:
    def test_p3(self):
        rep = fiedler(build_path(3))
        assert rep.lambda2 == pytest.approx(1.0, abs=1e-12)
        assert rep.vector == pytest.approx([1 / math.sqrt(2), 0, -1 / math.sqrt(2)], abs=1e-12)
        assert rep.tree_type is TreeType.TYPE_I and rep.characteristic == 2
        assert rep.zero_set == {2}

    def test_p4_type_ii(self):
        # LAPACK oracle: the sign change sits on the middle edge
        t = build_path(4)
        _, v = numpy_fiedler(t)
        phi = v[:, 1] * np.sign(v[0, 1])
        assert phi[1] > 0 > phi[2]
        rep = fiedler(t)
        assert rep.tree_type is TreeType.TYPE_II and rep.characteristic == (2, 3)

    def test_star_degenerate(self):
        t = build_star(3)
        mat = laplacian(t)
        for u, w in [(2, 3), (3, 4), (2, 4)]:
            x = np.zeros(4)
            x[u - 1], x[w - 1] = 1, -1
            assert np.array_equal(mat @ x, x)
        rep = fiedler(t)
        assert rep.multiplicity == 2 and rep.tree_type is TreeType.DEGENERATE

    def test_unit_norm_and_sign(self):
        rep = fiedler(build_rose((3, 5, 2)))
        phi = np.array(rep.vector)
        assert np.linalg.norm(phi) == pytest.approx(1.0, abs=1e-14)
        first = next(x for x in phi if abs(x) > 1e-8 * np.max(np.abs(phi)))
        assert first > 0

    def test_repeat_is_bitwise_identical(self):
        t = build_rose((4, 5, 7))
        assert fiedler(t) == fiedler(t)
        assert fiedler(t).vector == fiedler(t).vector

    def test_rose_type_i_at_attach_point(self):
        rep = fiedler(build_rose((3, 3, 2)))
        assert rep.tree_type is TreeType.TYPE_I and rep.characteristic == 4

    def test_report_dict(self):
        d = fiedler(build_path(4)).to_dict()
        assert d["tree_type"] == "TypeII" and d["characteristic"] == [2, 3]
        assert d["fed"]["satisfied"] is True


class TestClassify:
    def test_p3_explicit_vector(self):
        assert classify_tree_type(build_path(3), [1.0, 0.0, -1.0]) == (TreeType.TYPE_I, 2)

    def test_p4(self):
        _, v = numpy_fiedler(build_path(4))
        tt, edge = classify_tree_type(build_path(4), v[:, 1])
        assert tt is TreeType.TYPE_II and set(edge) == {2, 3}

    def test_disconnected_zero_set(self):
        with pytest.raises(StructureViolation):
            classify_tree_type(build_path(5), [0.0, 1.0, 0.0, -1.0, 0.0])

    def test_two_sign_changes(self):
        with pytest.raises(StructureViolation):
            classify_tree_type(build_path(4), [1.0, -1.0, 1.0, -1.0])


class TestCheckFed:
    def test_p5(self):
        v = check_fed(build_path(5))
        assert v.satisfied and {v.m, v.M} == {1, 5} and v.extrema_distance == 4 == v.diameter

    def test_smallest_violator(self):
        v = check_fed(build_rose((3, 3, 4)))
        assert not v.satisfied and v.reason is Reason.DISTANCE_BELOW_DIAMETER

    def test_r333_against_lapack(self):
        t = build_rose((3, 3, 3))
        w, v = numpy_fiedler(t)
        assert w[2] - w[1] > 1e-3
        phi = v[:, 1]
        m, big = int(np.argmin(phi)) + 1, int(np.argmax(phi)) + 1
        assert distance(t, m, big) == 6
        assert check_fed(t).satisfied

    def test_strict_policy_on_star(self):
        v = check_fed(build_star(3), policy=Policy.STRICT)
        assert not v.satisfied and v.reason is Reason.DEGENERATE_EIGENSPACE and v.path == "strict"

    def test_unique_rule_rejects_ties(self):
        # twin leaves 5 and 6 at one end share the extremal value
        t = from_edge_list(6, [(1, 2), (2, 3), (3, 4), (4, 5), (4, 6)])
        assert check_fed(t).satisfied
        v = check_fed(t, extrema=ExtremaRule.UNIQUE)
        assert not v.satisfied
        assert v.reason in (Reason.MULTIPLE_MAXIMA, Reason.MULTIPLE_MINIMA)

    def test_satisfied_implies_ok(self, small_trees):
        for t in small_trees[:300]:
            v = check_fed(t)
            if v.satisfied:
                assert v.reason is Reason.OK and v.extrema_distance == v.diameter


class TestDegenerateHeuristic:
    def test_star_projection(self):
        t = build_star(3)
        rep = fiedler(t)
        eig = eigen_symmetric(laplacian(t))
        basis = eig.vectors[:, 1:1 + rep.multiplicity]
        x = np.array([0.0, 1.0, -1.0, 0.0])
        # e_2 - e_3 already lies in the eigenspace spanned by leaf differences
        assert basis @ (basis.T @ x) == pytest.approx(x, abs=1e-12)
        v = degenerate_fed_heuristic(t, basis)
        assert v.satisfied and v.path == "projection"

    def test_spider_three_legs(self):
        t = from_edge_list(7, [(1, 2), (2, 3), (1, 4), (4, 5), (1, 6), (6, 7)])
        rep = fiedler(t)
        assert rep.multiplicity == 2
        assert rep.lambda2 == pytest.approx((3 - math.sqrt(5)) / 2, abs=1e-12)
        assert rep.fed.satisfied and rep.fed.path == "projection"
        assert (rep.fed.M, rep.fed.m) == (3, 5)

    def test_projection_failure_reports_degenerate(self):
        t = build_star(3)
        eig = eigen_symmetric(laplacian(t))
        # a basis vector orthogonal to every leaf difference projects to zero
        v = degenerate_fed_heuristic(t, eig.vectors[:, [0]])
        assert not v.satisfied and v.reason is Reason.DEGENERATE_EIGENSPACE


class TestStructuralProperties:
    def test_spectrum_bounds(self, small_trees):
        for t in small_trees:
            res = eigen_symmetric(laplacian(t))
            assert res.values[0] <= 1e-11 * t.n
            lam2 = res.values[1]
            if t.n == 2:
                assert lam2 == pytest.approx(2.0)
                continue
            assert 2 * (1 - math.cos(math.pi / t.n)) - 1e-9 <= lam2 <= 1 + 1e-9

    def test_pendant_monotonicity(self):
        rng = random.Random(2024)
        for _ in range(200):
            t = random_tree(rng, rng.randint(2, 30))
            v = rng.randint(1, t.n)
            assert algebraic_connectivity(add_pendant(t, v)) <= algebraic_connectivity(t) + 1e-10

    def test_extrema_at_leaves_and_type_shape(self, small_trees):
        for t in small_trees:
            rep = fiedler(t)
            if rep.multiplicity > 1:
                continue
            assert all(t.degree(v) == 1 for v in rep.argmin_set | rep.argmax_set)
            if rep.tree_type is TreeType.TYPE_II:
                p, q = rep.characteristic
                phi = rep.vector
                # values grow moving away from p on p's side (shrink on q's side)
                for start, sign in ((p, 1), (q, -1)):
                    stack = [(start, 0 if start == p else p)]
                    while stack:
                        u, prev = stack.pop()
                        for w in t.neighbors(u):
                            if w == prev or {u, w} == {p, q}:
                                continue
                            assert sign * (phi[w - 1] - phi[u - 1]) > -1e-8
                            stack.append((w, u))
