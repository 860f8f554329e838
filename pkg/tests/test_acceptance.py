"""Acceptance gate: one test per criterion, each printing a PASS/FAIL line.

Run with ``pytest tests/test_acceptance.py -s`` to see the per-criterion
lines; every tolerance and runtime budget is pinned here.
"""

import itertools
import time

import numpy as np

from conftest import SX, SY, SZ, random_density, random_projection, random_unitary
from ctxlab.ctxext import build_limit_extension, embed, evaluate_state, extend_state, spectrum_diagram
from ctxlab.fincat import check_cone, check_diagram, check_universal_property, enumerate_cones, limit_of_diagram
from ctxlab.fixtures import ALL_FIXTURES
from ctxlab.gft import PolyhedronSpace, ccr_defect, fock_for, inner_product, weyl_relation_defect
from ctxlab.locnet import (
    Region,
    check_covariance,
    check_isotony,
    check_lc_square,
    check_locality,
    site_operator,
    spectrum_multiplicativity,
    standard_net,
)
from ctxlab.presheaf import (
    build_spectral_presheaf,
    bundled_fixture,
    global_sections,
    inner_daseinisation,
    load_ray_fixture,
    outer_daseinisation,
    ray_family_context_category,
)
from ctxlab.realism import (
    CarrierObservable,
    MatrixObservable,
    MeasureProvider,
    ObservableFamily,
    ObservableGroup,
    QuantumProvider,
    roy_singh_lhs,
    search_signs,
)
from ctxlab.staralg import context_category, full_matrix_algebra, generate_algebra


class Budget:
    def __init__(self, name: str, seconds: float | None):
        self.name = name
        self.seconds = seconds

    def __enter__(self):
        self.start = time.monotonic()
        return self

    def __exit__(self, exc_type, exc, tb):
        elapsed = time.monotonic() - self.start
        status = "FAIL" if exc_type else "PASS"
        if self.seconds is not None and elapsed >= self.seconds:
            status = "FAIL"
        print(f"[acceptance] {self.name}: {status} ({elapsed:.2f}s)")
        if exc_type is None and self.seconds is not None:
            assert elapsed < self.seconds, f"{self.name} exceeded {self.seconds}s budget"
        return False


def random_selfadjoint(rng, d):
    z = rng.standard_normal((d, d)) + 1j * rng.standard_normal((d, d))
    return (z + z.conj().T) / 2.0


def test_criterion_1_valuation_obstruction():
    with Budget("1 valuation obstruction (18 rays vs any qubit family)", 5.0):
        dim, bases = load_ray_fixture(bundled_fixture("cabello18.json"))
        cc = ray_family_context_category(dim, bases)
        sheaf = build_spectral_presheaf(cc)
        assert global_sections(sheaf, limit=1) == []

        rng = np.random.default_rng(11)
        for _ in range(4):
            seeds = [random_selfadjoint(rng, 2) for _ in range(3)]
            qubit_cc = context_category(full_matrix_algebra(2), seeds)
            qubit_sheaf = build_spectral_presheaf(qubit_cc)
            assert len(global_sections(qubit_sheaf, limit=1)) >= 1


def test_criterion_2_state_extension_exactness():
    with Budget("2 state-extension exactness (100 random triples, 1e-8)", 10.0):
        rng = np.random.default_rng(23)
        worst = 0.0
        for trial in range(100):
            d = int(rng.choice([2, 3, 4]))
            seeds = [random_selfadjoint(rng, d) for _ in range(2)]
            cc = context_category(full_matrix_algebra(d), seeds)
            ext = build_limit_extension(cc)
            rho = random_density(rng, d)
            mu = extend_state(rho, ext)
            cid = cc.ids()[int(rng.integers(0, len(cc.ids())))]
            basis = cc.algebra(cid).basis
            coeffs = rng.standard_normal(len(basis)) + 1j * rng.standard_normal(len(basis))
            a = sum(c * b for c, b in zip(coeffs, basis))
            defect = abs(evaluate_state(mu, embed(a, cid, ext)) - complex(np.trace(rho @ a)))
            worst = max(worst, defect)
        assert worst <= 1e-8, f"worst defect {worst}"


def test_criterion_3_limit_object_agreement():
    with Budget("3 limit agreement + universality (20 families, apex bound 3)", 30.0):
        rng = np.random.default_rng(37)
        for trial in range(20):
            d = int(rng.choice([2, 3, 4]))
            seeds = [
                random_projection(rng, d, int(rng.integers(1, d)))
                for _ in range(2)
            ]
            cc = context_category(full_matrix_algebra(d), seeds)
            ext = build_limit_extension(cc)
            diagram = spectrum_diagram(ext)
            cone = limit_of_diagram(diagram)
            assert set(cone.apex) == set(ext.carrier.points)
            assert len(cone.apex) == ext.carrier.size
            cones = enumerate_cones(diagram, 3)
            assert check_universal_property(cone, diagram, cones)


def test_criterion_4_daseinisation_order():
    with Budget("4 daseinisation sandwich + monotonicity (50 draws, 1e-9)", None):
        rng = np.random.default_rng(41)
        for trial in range(50):
            d = int(rng.choice([2, 3, 4]))
            u = random_unitary(rng, d)
            splits = [np.diag([1.0 if i <= j else -1.0 for i in range(d)]) for j in range(d - 1)]
            fine = generate_algebra([u @ s.astype(complex) @ u.conj().T for s in splits], d)
            coarse = generate_algebra([u @ splits[0].astype(complex) @ u.conj().T], d)
            p = random_projection(rng, d, int(rng.integers(1, d + 1)))
            outer_f, outer_c = outer_daseinisation(p, fine), outer_daseinisation(p, coarse)
            inner_f, inner_c = inner_daseinisation(p, fine), inner_daseinisation(p, coarse)
            for upper, lower in (
                (outer_f, p),
                (p, inner_f),
                (outer_c, p),
                (p, inner_c),
                (outer_c, outer_f),
                (inner_f, inner_c),
            ):
                gap = np.linalg.eigvalsh(upper - lower)
                assert gap.min() >= -1e-9, f"order violated by {-gap.min()}"


def test_criterion_5_fock_sector_relations():
    with Budget("5 commutation relations + exponentiated convergence", 60.0):
        space = PolyhedronSpace(2, 2)
        rng = np.random.default_rng(53)
        for n_max in (1, 2, 3):
            fock = fock_for(space, n_max)
            for _ in range(20):
                f = rng.standard_normal(space.size) + 1j * rng.standard_normal(space.size)
                g = rng.standard_normal(space.size) + 1j * rng.standard_normal(space.size)
                assert ccr_defect(f, g, fock) <= 1e-10

        f = rng.standard_normal(space.size) + 1j * rng.standard_normal(space.size)
        g = rng.standard_normal(space.size) + 1j * rng.standard_normal(space.size)
        f *= 0.5 / np.sqrt(abs(inner_product(f, f, space)))
        g *= 0.4 / np.sqrt(abs(inner_product(g, g, space)))
        defects = [
            weyl_relation_defect(f, g, fock_for(space, n_max), sector_cap=1)
            for n_max in (2, 3, 4, 5)
        ]
        assert all(a > b for a, b in zip(defects, defects[1:])), f"not decreasing: {defects}"


def test_criterion_6_chain_net_axioms():
    with Budget("6 chain net: isotony, locality, covariance, squares", 30.0):
        for length in (2, 3, 4):
            net = standard_net(length)
            assert check_isotony(net).ok
            assert check_locality(net).ok
            for sub in net.regions():
                for whole in net.regions():
                    if whole.contains(sub):
                        assert check_lc_square(sub, whole, net).ok
            family = [
                (
                    r,
                    generate_algebra(
                        [site_operator(SZ, r.start, length)], net.dim, dim_cap=net.dim
                    ),
                )
                for r in net.regions()
                if r.start == r.stop
            ]
            for shift in range(length):
                assert check_covariance(net, shift, family).ok

        net = standard_net(4)
        parts = [
            (Region(0, 0), generate_algebra([site_operator(SZ, 0, 4)], 16, dim_cap=16)),
            (Region(2, 2), generate_algebra([site_operator(SX, 2, 4)], 16, dim_cap=16)),
            (Region(3, 3), generate_algebra([site_operator(SZ, 3, 4)], 16, dim_cap=16)),
        ]
        count, expected = spectrum_multiplicativity(net, parts)
        assert count == expected == 8


def test_criterion_7_realism_bound():
    with Budget("7 realism bound (1000 instances, all signs, margin 1e-12)", None):
        rng = np.random.default_rng(61)
        worst_margin = np.inf
        for trial in range(1000):
            q = int(rng.integers(1, 4))
            sizes = []
            for _ in range(q):
                room = 9 - sum(sizes) - (q - len(sizes) - 1)
                sizes.append(int(rng.choice([s for s in (1, 3, 5) if s <= max(1, room)])))
            total = sum(sizes)
            points = int(rng.integers(2, 9))
            weights = rng.random(points)
            weights /= weights.sum()
            tables = rng.choice([-1.0, 1.0], size=(total, points))
            sign_matrix = np.array(list(itertools.product((1.0, -1.0), repeat=total)))
            lhs = np.zeros(len(sign_matrix))
            pos = 0
            for size in sizes:
                block = tables[pos : pos + size]
                corr = (block * weights) @ block.T
                s = sign_matrix[:, pos : pos + size]
                lhs += np.einsum("si,ij,sj->s", s, corr, s)
                pos += size
            worst_margin = min(worst_margin, float(lhs.min()) - q)
        assert worst_margin >= -1e-12, f"margin {worst_margin}"

        # spot-check the vectorized sweep against the library search
        weights = np.full(4, 0.25)
        obs = [CarrierObservable(rng.choice([-1.0, 1.0], 4)) for _ in range(3)]
        fam = ObservableFamily([ObservableGroup(obs[:1], obs[1:])])
        _, minimum = search_signs(fam, MeasureProvider(weights))
        assert minimum >= fam.q - 1e-12

        pauli = ObservableFamily(
            [ObservableGroup([MatrixObservable(SX), MatrixObservable(SY)], [MatrixObservable(SZ)])]
        )
        lhs = roy_singh_lhs(pauli, [1, 1, 1], QuantumProvider(np.eye(2, dtype=complex) / 2))
        assert lhs == 3.0


def test_criterion_8_cone_fixtures():
    with Budget("8 cone fixtures commute; corrupted variants located", None):
        for name in sorted(ALL_FIXTURES):
            good = ALL_FIXTURES[name](False)
            assert check_diagram(good.diagram).ok, name
            assert check_cone(good.cone, good.diagram).ok, name
            bad = ALL_FIXTURES[name](True)
            report = check_cone(bad.cone, bad.diagram)
            assert not report.ok, name
            assert all(v.kind == "cone.triangle" for v in report.violations), name
