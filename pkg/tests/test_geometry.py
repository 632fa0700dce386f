import numpy as np
import pytest

from regge3 import geometry
from regge3.complexes import double_tetrahedron
from regge3.conformal import random_equihedral_lengths
from regge3.geometry import (InadmissibleMetricError, cayley_menger,
                             cayley_menger_gradient, dihedral_angles, dual_lengths,
                             embed_tet, face_angle, heights_and_areas, tet_geometry,
                             tet_volume)
from regge3.solve import random_admissible_lengths

REGULAR = np.ones(6)
ACOS13 = np.arccos(1.0 / 3.0)


def oracle_det5(lengths):
    """Generic determinant of the bordered matrix, independent route:
    cofactor expansion along the first row."""
    q = np.asarray(lengths, float) ** 2
    A = np.array([
        [0, 1, 1, 1, 1],
        [1, 0, q[0], q[1], q[2]],
        [1, q[0], 0, q[3], q[4]],
        [1, q[1], q[3], 0, q[5]],
        [1, q[2], q[4], q[5], 0],
    ])

    def det(M):
        n = len(M)
        if n == 1:
            return M[0][0]
        total = 0.0
        for j in range(n):
            minor = [row[:j] + row[j + 1:] for row in M[1:]]
            total += ((-1) ** j) * M[0][j] * det(minor)
        return total

    return det(A.tolist())


class TestCayleyMenger:
    def test_regular(self):
        assert cayley_menger(REGULAR) == pytest.approx(4.0, abs=1e-12)
        assert cayley_menger(REGULAR) == pytest.approx(oracle_det5(REGULAR), abs=1e-12)

    def test_flat_square_family_vanishes(self):
        l = np.array([np.sqrt(2), 1, 1, 1, 1, np.sqrt(2)])
        assert abs(cayley_menger(l)) < 1e-12
        assert abs(oracle_det5(l)) < 1e-12

    def test_violated_triangle_negative(self):
        l = np.array([1, 1, 1, 1, 1, 3.0])
        assert cayley_menger(l) < 0
        assert cayley_menger(l) == pytest.approx(oracle_det5(l), rel=1e-12)

    def test_matches_oracle_on_random_lengths(self):
        rng = np.random.default_rng(0)
        for _ in range(10):
            l = rng.uniform(0.5, 1.5, 6)
            assert cayley_menger(l) == pytest.approx(oracle_det5(l), rel=1e-10, abs=1e-10)

    def test_degree_six_homogeneity(self):
        rng = np.random.default_rng(1)
        for _ in range(10):
            l = rng.uniform(0.5, 1.5, 6)
            c = rng.uniform(0.5, 2.0)
            assert cayley_menger(c * l) == pytest.approx(
                c ** 6 * cayley_menger(l), rel=1e-12)

    def test_gradient_matches_finite_differences(self):
        rng = np.random.default_rng(2)
        dt = double_tetrahedron()
        for _ in range(10):
            l = random_admissible_lengths(dt, rng)
            g = cayley_menger_gradient(l)
            h = 1e-6
            for i in range(6):
                e = np.zeros(6)
                e[i] = h
                fd = (cayley_menger(l + e) - cayley_menger(l - e)) / (2 * h)
                assert g[i] == pytest.approx(fd, rel=1e-6, abs=1e-8)


class TestVolume:
    def test_regular(self):
        assert tet_volume(REGULAR) == pytest.approx(1 / (6 * np.sqrt(2)), abs=1e-15)

    def test_cubic_homogeneity(self):
        rng = np.random.default_rng(3)
        dt = double_tetrahedron()
        for _ in range(5):
            l = random_admissible_lengths(dt, rng)
            c = rng.uniform(0.5, 2.0)
            assert tet_volume(c * l) == pytest.approx(c ** 3 * tet_volume(l), rel=1e-12)

    def test_degenerate_raises(self):
        with pytest.raises(InadmissibleMetricError):
            tet_volume(np.array([np.sqrt(2), 1, 1, 1, 1, np.sqrt(2)]))
        with pytest.raises(InadmissibleMetricError):
            tet_volume(np.array([1.4143, 1, 1, 1, 1, 1.4143]))
        with pytest.raises(InadmissibleMetricError):
            tet_volume(np.array([1, 1, 1, 1, 1, 3.0]))


class TestFaceAngle:
    def test_equilateral(self):
        assert face_angle(1, 1, 1) == pytest.approx(np.pi / 3, abs=1e-15)

    def test_right_isoceles(self):
        assert face_angle(np.sqrt(2), 1, 1) == pytest.approx(np.pi / 2, abs=1e-15)

    def test_obtuse(self):
        # oracle: direct evaluation of the cosine law
        assert face_angle(1.9, 1, 1) == pytest.approx(np.arccos((2 - 3.61) / 2.0),
                                                      abs=1e-15)

    def test_degenerate_raises(self):
        with pytest.raises(InadmissibleMetricError):
            face_angle(2.0, 1.0, 1.0)
        with pytest.raises(InadmissibleMetricError):
            face_angle(-1.0, 1.0, 1.0)


class TestDihedralAngles:
    def test_regular_all_arccos_one_third(self):
        assert dihedral_angles(REGULAR) == pytest.approx(np.full(6, ACOS13), abs=1e-14)

    def test_corner_orthoscheme_right_angles(self):
        # three mutually orthogonal unit edges at vertex 0
        l = np.array([1, 1, 1, np.sqrt(2), np.sqrt(2), np.sqrt(2)])
        betas = dihedral_angles(l)
        assert betas[:3] == pytest.approx(np.full(3, np.pi / 2), abs=1e-12)

    def test_equihedral_opposite_angles_equal(self):
        l = np.array([1.3, 1, 1, 1, 1, 1.3])
        betas = dihedral_angles(l)
        assert betas[0] == pytest.approx(betas[5], abs=1e-13)
        assert betas[1] == pytest.approx(betas[4], abs=1e-13)
        assert betas[2] == pytest.approx(betas[3], abs=1e-13)

    def test_random_equihedral_opposite_angles_equal(self):
        rng = np.random.default_rng(4)
        for _ in range(10):
            l = random_equihedral_lengths(rng)
            betas = dihedral_angles(l)
            assert betas[[0, 1, 2]] == pytest.approx(betas[[5, 4, 3]], abs=1e-12)

    def test_both_endpoint_computations_agree(self):
        rng = np.random.default_rng(5)
        dt = double_tetrahedron()
        for _ in range(10):
            l = random_admissible_lengths(dt, rng)
            assert dihedral_angles(l) == pytest.approx(
                dihedral_angles(l, at_second_vertex=True), abs=1e-12)

    def test_angles_in_open_interval(self):
        rng = np.random.default_rng(6)
        dt = double_tetrahedron()
        for _ in range(20):
            betas = dihedral_angles(random_admissible_lengths(dt, rng))
            assert np.all(betas > 0) and np.all(betas < np.pi)

    def test_schlaefli_identity(self):
        rng = np.random.default_rng(7)
        dt = double_tetrahedron()
        h = 1e-6
        for _ in range(10):
            l = random_admissible_lengths(dt, rng)
            for j in range(6):
                e = np.zeros(6)
                e[j] = h
                db = (dihedral_angles(l + e) - dihedral_angles(l - e)) / (2 * h)
                assert abs(float(l @ db)) < 1e-6


class TestEmbedding:
    def test_regular_apex_height(self):
        p = embed_tet(REGULAR)
        assert abs(p[3, 2]) == pytest.approx(np.sqrt(2.0 / 3.0), abs=1e-14)

    def test_distances_reconstruct(self):
        rng = np.random.default_rng(8)
        dt = double_tetrahedron()
        from regge3.complexes import LOCAL_PAIRS
        for _ in range(10):
            l = random_admissible_lengths(dt, rng)
            p = embed_tet(l)
            for m, (i, j) in enumerate(LOCAL_PAIRS):
                d = np.linalg.norm(p[i] - p[j])
                assert d == pytest.approx(l[m], rel=1e-12)

    def test_scaling(self):
        rng = np.random.default_rng(9)
        l = random_admissible_lengths(double_tetrahedron(), rng)
        c = 1.7
        assert embed_tet(c * l) == pytest.approx(c * embed_tet(l), rel=1e-12)

    def test_inadmissible_raises(self):
        with pytest.raises(InadmissibleMetricError):
            embed_tet(np.array([1.4143, 1, 1, 1, 1, 1.4143]))


class TestHeightsAndAreas:
    def test_regular_values(self):
        areas, h_face, h_edge = heights_and_areas(REGULAR)
        assert areas == pytest.approx(np.full(4, np.sqrt(3) / 4), abs=1e-14)
        assert h_face == pytest.approx(np.full(4, 1 / (2 * np.sqrt(6))), abs=1e-14)
        assert h_edge == pytest.approx(np.full((4, 3), 1 / (2 * np.sqrt(3))), abs=1e-14)

    def test_right_triangle_hypotenuse_height_zero(self):
        # face {0,1,2} of the corner tet has sides (sqrt2, 1, 1); the
        # circumcenter sits on the hypotenuse midpoint
        l = np.array([1, 1, 1, np.sqrt(2), np.sqrt(2), np.sqrt(2)])
        _, _, h_edge = heights_and_areas(l)
        # face 3 = (0,1,2); its slot 0 is the edge opposite vertex 0 = (1,2)
        assert h_edge[3, 0] == pytest.approx(0.0, abs=1e-13)

    def test_triangle_decomposition_identity(self):
        rng = np.random.default_rng(10)
        dt = double_tetrahedron()
        from regge3.complexes import FACE_EDGES
        for _ in range(10):
            l = random_admissible_lengths(dt, rng)
            areas, _, h_edge = heights_and_areas(l)
            sides = l[np.asarray(FACE_EDGES)]
            recon = np.sum(h_edge * sides / 2.0, axis=-1)
            assert recon == pytest.approx(areas, rel=1e-10)

    def test_tet_decomposition_identity(self):
        rng = np.random.default_rng(11)
        dt = double_tetrahedron()
        for _ in range(10):
            l = random_admissible_lengths(dt, rng)
            areas, h_face, _ = heights_and_areas(l)
            assert np.sum(h_face * areas) == pytest.approx(3 * tet_volume(l), rel=1e-10)

    def test_circumcenters_equidistant(self):
        rng = np.random.default_rng(12)
        dt = double_tetrahedron()
        for _ in range(5):
            l = random_admissible_lengths(dt, rng)
            geo = tet_geometry(l)
            d = np.linalg.norm(geo.points - geo.circumcenter, axis=-1)
            assert np.max(d) - np.min(d) < 1e-10
            for k, fv in enumerate(((1, 2, 3), (0, 2, 3), (0, 1, 3), (0, 1, 2))):
                dc = np.linalg.norm(geo.points[list(fv)]
                                    - geo.face_circumcenters[k], axis=-1)
                assert np.max(dc) - np.min(dc) < 1e-10

    def test_equihedral_faces_acute_and_heights_nonnegative(self):
        rng = np.random.default_rng(13)
        for _ in range(20):
            l = random_equihedral_lengths(rng)
            geo = tet_geometry(l)
            _, _, h_edge = heights_and_areas(l)
            assert np.all(h_edge >= -1e-12)
            # all face angles acute
            from regge3.complexes import FACE_EDGES
            sides = l[np.asarray(FACE_EDGES)]
            for k in range(3):
                ang = face_angle(sides[..., k], sides[..., (k + 1) % 3],
                                 sides[..., (k + 2) % 3])
                assert np.all(ang < np.pi / 2 + 1e-12)


class TestDualLengths:
    def test_double_tet_regular(self):
        dt = double_tetrahedron()
        expect = np.full(6, 1 / (6 * np.sqrt(2)))
        assert dual_lengths(dt, REGULAR) == pytest.approx(expect, abs=1e-14)

    def test_nonnegative_on_equihedral(self):
        dt = double_tetrahedron()
        rng = np.random.default_rng(14)
        for _ in range(20):
            l = random_equihedral_lengths(rng)
            assert np.all(dual_lengths(dt, l) >= -1e-12)

    def test_quadratic_scaling(self):
        dt = double_tetrahedron()
        rng = np.random.default_rng(15)
        l = random_admissible_lengths(dt, rng)
        c = 1.9
        assert dual_lengths(dt, c * l) == pytest.approx(
            c ** 2 * dual_lengths(dt, l), rel=1e-11)

    def test_inadmissible_raises(self):
        dt = double_tetrahedron()
        with pytest.raises(InadmissibleMetricError):
            dual_lengths(dt, np.array([1.4143, 1, 1, 1, 1, 1.4143]))
