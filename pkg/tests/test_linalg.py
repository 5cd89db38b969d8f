import numpy as np
import pytest

from secrecy_opt.errors import DimensionMismatchError
from secrecy_opt.linalg import (
    gsvd_transform,
    null_space_basis,
    numeric_rank,
    orthonormal_complement,
    span_contained,
    span_intersection_trivial,
    subspace_dims_oracle,
)


def crandn(rng, *shape):
    return rng.standard_normal(shape) + 1j * rng.standard_normal(shape)


class TestNumericRank:
    def test_full_rank(self):
        rng = np.random.default_rng(0)
        assert numeric_rank(crandn(rng, 4, 4)) == 4

    def test_rank_deficient(self):
        a = np.ones((3, 3))
        assert numeric_rank(a) == 1

    def test_zero_and_empty(self):
        assert numeric_rank(np.zeros((2, 2))) == 0
        assert numeric_rank(np.zeros((2, 0))) == 0

    def test_scale_override(self):
        # roundoff-level matrix counts as zero against an O(1) scale
        tiny = 1e-15 * np.ones((2, 2))
        assert numeric_rank(tiny) == 1
        assert numeric_rank(tiny, scale=1.0) == 0


class TestNullSpace:
    def test_dimensions(self):
        rng = np.random.default_rng(1)
        a = crandn(rng, 2, 5)
        z = null_space_basis(a)
        assert z.shape == (5, 3)
        assert np.linalg.norm(a @ z) < 1e-10
        assert np.allclose(z.conj().T @ z, np.eye(3), atol=1e-12)

    def test_full_column_rank(self):
        rng = np.random.default_rng(2)
        assert null_space_basis(crandn(rng, 5, 3)).shape == (3, 0)

    def test_zero_matrix(self):
        z = null_space_basis(np.zeros((2, 3)))
        assert np.allclose(z, np.eye(3))


class TestComplement:
    def test_completes_basis(self):
        rng = np.random.default_rng(3)
        q, _ = np.linalg.qr(crandn(rng, 5, 2))
        comp = orthonormal_complement(q, 5)
        full = np.hstack([q, comp])
        assert np.allclose(full.conj().T @ full, np.eye(5), atol=1e-12)

    def test_empty_input(self):
        comp = orthonormal_complement(np.zeros((4, 0), dtype=complex), 4)
        assert np.allclose(comp, np.eye(4))


class TestSpanPredicates:
    def test_contained(self):
        rng = np.random.default_rng(4)
        b = crandn(rng, 5, 3)
        a = b @ crandn(rng, 3, 2)
        assert span_contained(a, b)
        assert not span_contained(b, a)

    def test_trivial_intersection(self):
        rng = np.random.default_rng(5)
        m = crandn(rng, 6, 6)
        assert span_intersection_trivial(m[:, :3], m[:, 3:])
        assert not span_intersection_trivial(m[:, :3], m[:, 2:4])

    def test_roundoff_zero_column(self):
        a = 1e-16 * np.ones((3, 1))
        b = np.eye(3)[:, :1]
        assert span_contained(a, b)
        assert span_intersection_trivial(a, b)

    def test_dimension_error(self):
        with pytest.raises(DimensionMismatchError):
            span_contained(np.zeros((2, 1)), np.zeros((3, 1)))


class TestDimsOracle:
    def test_generic(self):
        rng = np.random.default_rng(6)
        h, g = crandn(rng, 4, 3), crandn(rng, 4, 2)
        k, p, r, s = subspace_dims_oracle(h, g)
        assert (k, p, r, s) == (4, 1, 2, 1)

    def test_disjoint(self):
        h = np.eye(4)[:, :2]
        g = np.eye(4)[:, 2:]
        assert subspace_dims_oracle(h, g) == (4, 2, 2, 0)


class TestGsvd:
    @pytest.mark.parametrize("seed", range(10))
    def test_random_properties(self, seed):
        rng = np.random.default_rng(seed)
        n, m, k = rng.integers(1, 7, size=3)
        h, g = crandn(rng, n, m), crandn(rng, n, k)
        f = gsvd_transform(h, g)
        assert np.linalg.norm(h @ f.psi1 - f.x @ f.d1.conj().T) < 1e-10
        assert np.linalg.norm(g @ f.psi2 - f.x @ f.d2.conj().T) < 1e-10
        assert np.allclose(f.psi1.conj().T @ f.psi1, np.eye(m), atol=1e-10)
        assert np.allclose(f.psi2.conj().T @ f.psi2, np.eye(k), atol=1e-10)
        assert np.allclose(f.d1.conj().T @ f.d1 + f.d2.conj().T @ f.d2,
                           np.eye(f.k), atol=1e-10)
        assert (f.k, f.p, f.r, f.s) == subspace_dims_oracle(h, g)
        assert np.linalg.matrix_rank(f.x) == f.k

    def test_block_structure(self):
        rng = np.random.default_rng(42)
        h, g = crandn(rng, 4, 3), crandn(rng, 4, 2)
        f = gsvd_transform(h, g)
        # d1 = [I_r 0 0; 0 S1 0; 0 0 0], d2 = [0 0 0; 0 S2 0; 0 0 I_p]
        assert np.allclose(f.d1[: f.r, : f.r], np.eye(f.r), atol=1e-10)
        assert np.allclose(np.abs(f.d2[-f.p:, -f.p:]), np.eye(f.p), atol=1e-10)
        assert np.all(f.s1_diag > 0) and np.all(f.s2_diag > 0)
        assert np.allclose(f.s1_diag ** 2 + f.s2_diag ** 2, 1.0)
        # common-block columns ordered by descending cosine
        assert np.all(np.diff(f.s1_diag) <= 1e-12)

    def test_shared_column(self):
        # h and g sharing one direction yields s = 1
        rng = np.random.default_rng(7)
        shared = crandn(rng, 5, 1)
        h = np.hstack([shared, crandn(rng, 5, 1)])
        g = np.hstack([shared + crandn(rng, 5, 1), shared])
        f = gsvd_transform(h, g)
        assert f.k == 3

    def test_zero_inputs(self):
        f = gsvd_transform(np.zeros((3, 2)), np.zeros((3, 2)))
        assert f.k == 0
        assert f.x.shape == (3, 0)

    def test_empty_second_factor(self):
        rng = np.random.default_rng(8)
        h = crandn(rng, 4, 2)
        f = gsvd_transform(h, np.zeros((4, 0)))
        assert (f.k, f.r, f.s, f.p) == (2, 2, 0, 0)
        assert np.linalg.norm(h @ f.psi1 - f.x @ f.d1.conj().T) < 1e-10
