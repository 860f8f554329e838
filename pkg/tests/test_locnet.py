import itertools

import numpy as np
import pytest

from conftest import SX, SZ
from ctxlab.errors import DomainError
from ctxlab.linalg import opnorm
from ctxlab.locnet import (
    LocalNet,
    Region,
    check_covariance,
    check_isotony,
    check_lc_square,
    check_locality,
    composite_context,
    inductive_limit,
    pauli_string,
    shifted_region,
    site_operator,
    spectrum_multiplicativity,
    standard_net,
    standard_region_algebra,
    translation_unitary,
)
from ctxlab.staralg import MatrixStarAlgebra, generate_algebra, gelfand_spectrum, is_commutative


def site_context(site: int, length: int, single=SZ):
    op = site_operator(single, site, length)
    return generate_algebra([op], 2**length, dim_cap=2**length)


def single_site_family(length: int):
    return [
        (r, site_context(r.start, length))
        for r in standard_net(length).regions()
        if r.start == r.stop
    ]


class TestAxioms:
    def test_single_region_net_valid(self):
        region = Region(0, 0)
        net = LocalNet(2, {region: standard_region_algebra(region, 2)})
        assert check_isotony(net).ok
        assert check_locality(net).ok

    @pytest.mark.parametrize("length", [2, 3, 4])
    def test_standard_net_isotony_and_locality(self, length):
        net = standard_net(length)
        assert check_isotony(net).ok
        assert check_locality(net).ok

    def test_five_site_chain_exhaustive(self):
        net = standard_net(5)
        assert check_isotony(net).ok
        assert check_locality(net).ok

    def test_corrupted_isotony_reported(self):
        net = standard_net(2)
        corrupted = dict(net.assignment)
        corrupted[Region(0, 1)] = standard_region_algebra(Region(1, 1), 2)
        bad = LocalNet(2, corrupted, builder=net.builder)
        report = check_isotony(bad)
        assert any(v.kind == "net.isotony" and "[0,0]" in v.message for v in report.violations)

    def test_operator_leaking_across_the_cut_reported(self):
        net = standard_net(2)
        corrupted = dict(net.assignment)
        leak = pauli_string({0: "X", 1: "X"}, 2) / 2.0
        eye = np.eye(4, dtype=complex) / 2.0
        corrupted[Region(0, 0)] = MatrixStarAlgebra(4, [eye, leak])
        bad = LocalNet(2, corrupted, builder=net.builder)
        report = check_locality(bad)
        assert any(v.kind == "net.locality" for v in report.violations)


class TestCompositeContexts:
    def test_single_part_reproduces_itself(self):
        net = standard_net(2)
        ctx = site_context(0, 2)
        comp = composite_context(net, [(Region(0, 0), ctx)])
        assert comp.dimension == ctx.dimension

    def test_two_disjoint_parts_multiply(self):
        net = standard_net(2)
        za = site_context(0, 2, SZ)
        xb = site_context(1, 2, SX)
        comp = composite_context(net, [(Region(0, 0), za), (Region(1, 1), xb)])
        assert is_commutative(comp)
        assert comp.dimension == 4
        count, expected = spectrum_multiplicativity(
            net, [(Region(0, 0), za), (Region(1, 1), xb)]
        )
        assert count == expected == 4

    def test_overlapping_regions_rejected(self):
        net = standard_net(2)
        ctx = site_context(0, 2)
        with pytest.raises(DomainError, match="causally separated"):
            composite_context(net, [(Region(0, 0), ctx), (Region(0, 1), ctx)])

    def test_composite_characters_are_value_pairs(self):
        net = standard_net(2)
        za = site_context(0, 2, SZ)
        zb = site_context(1, 2, SZ)
        comp = composite_context(net, [(Region(0, 0), za), (Region(1, 1), zb)])
        z0 = site_operator(SZ, 0, 2)
        z1 = site_operator(SZ, 1, 2)
        pairs = sorted(
            (round(c.value_of(z0).real), round(c.value_of(z1).real))
            for c in gelfand_spectrum(comp)
        )
        assert pairs == [(-1, -1), (-1, 1), (1, -1), (1, 1)]


class TestCovariance:
    def test_zero_shift_identity(self):
        net = standard_net(3)
        assert check_covariance(net, 0, single_site_family(3)).ok

    @pytest.mark.parametrize("shift", [1, 2])
    def test_cyclic_shifts_on_invariant_family(self, shift):
        net = standard_net(3)
        assert check_covariance(net, shift, single_site_family(3)).ok

    def test_orphan_context_named(self):
        net = standard_net(3)
        family = single_site_family(3)[:2]  # drop site 2: not translation closed
        report = check_covariance(net, 1, family)
        assert any("orphan" in v.message for v in report.violations)

    def test_translation_is_automorphism_and_group_action(self):
        length = 3
        d = 2**length
        u1 = translation_unitary(1, length)
        assert np.allclose(u1 @ u1.conj().T, np.eye(d))
        for g, h in itertools.product(range(length), repeat=2):
            lhs = translation_unitary(g, length) @ translation_unitary(h, length)
            rhs = translation_unitary((g + h) % length, length)
            assert np.allclose(lhs, rhs)
        # alpha respects products on a basis of the full algebra
        full = standard_region_algebra(Region(0, length - 1), length)
        rng = np.random.default_rng(0)
        picks = rng.integers(0, full.dimension, size=(5, 2))
        for i, j in picks:
            a, b = full.basis[i], full.basis[j]
            left = u1 @ (a @ b) @ u1.conj().T
            right = (u1 @ a @ u1.conj().T) @ (u1 @ b @ u1.conj().T)
            assert opnorm(left - right) < 1e-10

    def test_non_cyclic_out_of_range(self):
        with pytest.raises(DomainError):
            shifted_region(Region(1, 2), 1, 3, cyclic=False)
        assert shifted_region(Region(1, 1), 1, 3, cyclic=False) == Region(2, 2)


class TestInductiveLimit:
    def test_single_site_chain(self):
        net = standard_net(1)
        assert inductive_limit(net).dimension == 4

    def test_two_site_chain_full(self):
        net = standard_net(2)
        assert inductive_limit(net).dimension == 16

    def test_diagonal_net_stays_diagonal(self):
        length = 3
        d = 2**length
        assignment = {}

        def diagonal_algebra(region):
            combos = itertools.product("IZ", repeat=region.stop - region.start + 1)
            basis = [
                pauli_string(dict(zip(region.sites(), c)), length) / np.sqrt(d) for c in combos
            ]
            return MatrixStarAlgebra(d, basis)

        for a in range(length):
            for b in range(a, length):
                assignment[Region(a, b)] = diagonal_algebra(Region(a, b))
        net = LocalNet(length, assignment, builder=diagonal_algebra)
        assert check_isotony(net).ok
        assert check_locality(net).ok
        assert inductive_limit(net).dimension == d


class TestLocallyCovariantSquare:
    def test_degenerate_square(self):
        net = standard_net(2)
        assert check_lc_square(Region(0, 1), Region(0, 1), net).ok

    def test_site_inside_pair(self):
        net = standard_net(2)
        assert check_lc_square(Region(0, 0), Region(0, 1), net).ok

    def test_corrupted_assignment_reported(self):
        net = standard_net(2)
        corrupted = dict(net.assignment)
        corrupted[Region(0, 0)] = standard_region_algebra(Region(1, 1), 2)
        bad = LocalNet(2, corrupted, builder=net.builder)
        report = check_lc_square(Region(0, 0), Region(0, 1), bad)
        assert any(v.kind == "net.lcsquare" for v in report.violations)

    def test_non_nested_rejected(self):
        net = standard_net(2)
        with pytest.raises(DomainError):
            check_lc_square(Region(0, 1), Region(1, 1), net)
