import itertools

import numpy as np
import pytest

from conftest import I2, SX, SZ, kron, random_unitary
from ctxlab.errors import DomainError
from ctxlab.fincat import check_category
from ctxlab.staralg import (
    boolean_blocks,
    context_category,
    context_category_from_groups,
    dominating_character_index,
    full_matrix_algebra,
    gelfand_spectrum,
    generate_algebra,
    intersect_algebras,
    is_commutative,
    trivial_algebra,
)


class TestGenerateAlgebra:
    def test_empty_generators_give_unital_span(self):
        alg = generate_algebra([], 2)
        assert alg.dimension == 1
        assert alg.contains(np.eye(2))

    def test_single_diagonal_generator(self):
        alg = generate_algebra([SZ], 2)
        assert alg.dimension == 2

    def test_x_and_z_generate_everything(self):
        # closure must reach the full matrix algebra, whose dimension is d*d
        alg = generate_algebra([SX, SZ], 2)
        assert alg.dimension == 4

    def test_closure_invariants_hold(self):
        rng = np.random.default_rng(3)
        for _ in range(4):
            z = rng.standard_normal((3, 3)) + 1j * rng.standard_normal((3, 3))
            alg = generate_algebra([(z + z.conj().T) / 2], 3)
            assert alg.validate().ok

    def test_non_square_generator_rejected(self):
        from ctxlab.errors import InputError

        with pytest.raises(InputError):
            generate_algebra([np.ones((2, 3))], 2)


class TestCommutativity:
    def test_diagonal_commutes(self):
        assert is_commutative(generate_algebra([np.diag([1.0, 2.0, 3.0]).astype(complex)], 3))

    def test_full_m2_does_not(self):
        assert not is_commutative(full_matrix_algebra(2))

    def test_pairwise_x_string_algebra_commutes(self):
        gens = [kron(SX, I2), kron(I2, SX), kron(SX, SX)]
        for a, b in itertools.combinations(gens, 2):
            assert np.allclose(a @ b, b @ a)
        assert is_commutative(generate_algebra(gens, 4))


class TestGelfandSpectrum:
    def test_diagonal_d3_values_are_entries(self):
        alg = generate_algebra([np.diag([3.0, 1.0, 2.0]).astype(complex)], 3)
        chars = gelfand_spectrum(alg)
        assert len(chars) == 3
        values = sorted(chi.value_of(np.diag([3.0, 1.0, 2.0])).real for chi in chars)
        assert np.allclose(values, [1.0, 2.0, 3.0])

    def test_sigma_z_context(self):
        chars = gelfand_spectrum(generate_algebra([SZ], 2))
        assert sorted(round(chi.value_of(SZ).real) for chi in chars) == [-1, 1]

    def test_two_site_z_joint_eigenvalues(self):
        z1, z2 = kron(SZ, I2), kron(I2, SZ)
        chars = gelfand_spectrum(generate_algebra([z1, z2], 4))
        pairs = sorted((round(c.value_of(z1).real), round(c.value_of(z2).real)) for c in chars)
        assert pairs == [(-1, -1), (-1, 1), (1, -1), (1, 1)]

    def test_count_equals_dimension_and_projections_resolve_identity(self, rng):
        for d in (2, 3, 4):
            u = random_unitary(rng, d)
            alg = generate_algebra([u @ np.diag(rng.standard_normal(d)).astype(complex) @ u.conj().T], d)
            chars = gelfand_spectrum(alg)
            assert len(chars) == alg.dimension
            assert np.allclose(sum(c.projection for c in chars), np.eye(d), atol=1e-9)

    def test_reconstruction_from_characters(self, rng):
        alg = generate_algebra([kron(SZ, I2), kron(I2, SZ)], 4)
        chars = gelfand_spectrum(alg)
        coeffs = rng.standard_normal(alg.dimension) + 1j * rng.standard_normal(alg.dimension)
        a = sum(c * b for c, b in zip(coeffs, alg.basis))
        rebuilt = sum(chi.value_of(a) * chi.projection for chi in chars)
        assert np.linalg.norm(rebuilt - a) < 1e-9

    def test_characters_multiplicative(self, rng):
        alg = generate_algebra([np.diag([1.0, 4.0, 2.0, 2.0]).astype(complex)], 4)
        chars = gelfand_spectrum(alg)
        for _ in range(5):
            ca = rng.standard_normal(alg.dimension)
            cb = rng.standard_normal(alg.dimension)
            a = sum(c * b for c, b in zip(ca, alg.basis))
            b = sum(c * bb for c, bb in zip(cb, alg.basis))
            for chi in chars:
                assert abs(chi.value_of(a @ b) - chi.value_of(a) * chi.value_of(b)) < 1e-8
                assert abs(chi.value_of(np.eye(4)) - 1.0) < 1e-10

    def test_degenerate_rank2_projections(self):
        alg = generate_algebra([kron(SZ, I2)], 4)
        chars = gelfand_spectrum(alg)
        assert len(chars) == 2
        assert all(chi.rank == 2 for chi in chars)

    def test_noncommutative_rejected(self):
        with pytest.raises(DomainError):
            gelfand_spectrum(full_matrix_algebra(2))


class TestContextCategory:
    def test_single_seed(self):
        cc = context_category(full_matrix_algebra(2), [SZ])
        assert set(cc.ids()) == {"V0", "I"}
        assert cc.algebra("V0").dimension == 2
        assert cc.algebra("I").dimension == 1

    def test_incompatible_seeds_meet_only_trivially(self):
        cc = context_category(full_matrix_algebra(2), [SZ, SX])
        maximal = [cid for cid in cc.ids() if cc.algebra(cid).dimension == 2]
        assert len(maximal) == 2
        assert cc.leq("I", maximal[0]) and cc.leq("I", maximal[1])
        # commutation graph has no edge, so no joint context exists
        assert all(cc.algebra(cid).dimension in (1, 2) for cid in cc.ids())

    def test_clique_contexts_in_dimension_four(self):
        seeds = [kron(SZ, I2), kron(I2, SZ), kron(SX, SX)]
        comm = [
            (i, j)
            for i, j in itertools.combinations(range(3), 2)
            if np.allclose(seeds[i] @ seeds[j], seeds[j] @ seeds[i])
        ]
        assert comm == [(0, 1)]  # the clique structure the category must mirror
        cc = context_category(full_matrix_algebra(4), seeds)
        dims = sorted(cc.algebra(cid).dimension for cid in cc.ids())
        assert dims == [1, 2, 4]

    def test_order_is_span_containment_with_trivial_minimum(self):
        cc = context_category(full_matrix_algebra(4), [kron(SZ, I2), kron(I2, SZ), kron(SX, I2)])
        for cid in cc.ids():
            assert cc.leq("I", cid)
        for sub, sup in cc.strict_pairs():
            for b in cc.algebra(sub).basis:
                assert cc.algebra(sup).contains(b)
        assert check_category(cc.as_poset_category()).ok

    def test_nested_chain_from_groups(self):
        groups = [[kron(SZ, I2)], [kron(SZ, I2), kron(I2, SZ)]]
        cc = context_category_from_groups(full_matrix_algebra(4), groups)
        assert cc.leq("V0", "V1")

    def test_seed_outside_ambient_rejected(self):
        small = generate_algebra([SZ], 2)
        with pytest.raises(DomainError):
            context_category(small, [SX])

    def test_non_selfadjoint_seed_rejected(self):
        with pytest.raises(DomainError):
            context_category(full_matrix_algebra(2), [np.array([[0, 1], [0, 0]])])


class TestIntersectionsAndRestrictions:
    def test_intersection_of_diagonal_contexts(self):
        a = generate_algebra([kron(SZ, I2), kron(I2, SZ)], 4)
        b = generate_algebra([kron(SZ, I2), kron(SX, I2) @ kron(I2, I2)], 4)
        meet = intersect_algebras(a, b)
        assert meet.contains(kron(SZ, I2))
        assert meet.validate().ok

    def test_dominating_character_is_unique(self):
        fine = generate_algebra([kron(SZ, I2), kron(I2, SZ)], 4)
        coarse = generate_algebra([kron(SZ, I2)], 4)
        fine_chars = gelfand_spectrum(fine)
        coarse_chars = gelfand_spectrum(coarse)
        for chi in fine_chars:
            idx = dominating_character_index(chi, coarse_chars)
            assert abs(coarse_chars[idx].value_of(kron(SZ, I2)) - chi.value_of(kron(SZ, I2))) < 1e-9


class TestBooleanBlocks:
    def test_projection_and_complement_one_block(self):
        p = np.diag([1.0, 0.0]).astype(complex)
        blocks = boolean_blocks([p, np.eye(2) - p])
        assert len(blocks) == 1
        assert len(blocks[0].elements) == 4

    def test_incompatible_rank_one_projections_two_blocks(self):
        p0 = np.diag([1.0, 0.0]).astype(complex)
        plus = np.full((2, 2), 0.5, dtype=complex)
        assert np.linalg.norm(p0 @ plus - plus @ p0) > 1e-6
        blocks = boolean_blocks([p0, plus])
        assert len(blocks) == 2
        assert all(len(b.elements) == 4 for b in blocks)

    def test_three_orthogonal_projections_give_eight_elements(self):
        ps = [np.diag([1.0, 0, 0]), np.diag([0, 1.0, 0]), np.diag([0, 0, 1.0])]
        blocks = boolean_blocks([p.astype(complex) for p in ps])
        assert len(blocks) == 1
        assert len(blocks[0].atoms) == 3
        assert len(blocks[0].elements) == 8

    def test_block_is_distributive_lattice(self):
        ps = [np.diag([1.0, 1.0, 0, 0]), np.diag([1.0, 0, 1.0, 0])]
        (block,) = boolean_blocks([p.astype(complex) for p in ps])
        for a, b, c in itertools.product(block.elements, repeat=3):
            left = block.meet(a, block.join(b, c))
            right = block.join(block.meet(a, b), block.meet(a, c))
            assert np.linalg.norm(left - right) < 1e-9

    def test_elements_pairwise_commute(self):
        ps = [np.diag([1.0, 0.0]).astype(complex)]
        (block,) = boolean_blocks(ps)
        for a, b in itertools.combinations(block.elements, 2):
            assert np.linalg.norm(a @ b - b @ a) < 1e-12

    def test_non_projection_rejected(self):
        with pytest.raises(DomainError):
            boolean_blocks([SX + 2 * SZ])


def test_trivial_algebra_is_trivial():
    alg = trivial_algebra(3)
    assert alg.dimension == 1 and alg.contains(np.eye(3))
