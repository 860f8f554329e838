"""A toy net of observable algebras on a chain of qubit sites.

Regions are site intervals (shadows of causal diamonds on a 1-d slice);
the standard assignment gives each region the full matrix algebra on its
sites tensored with the identity elsewhere.  Isotony, locality for
disjoint regions, cyclic-translation covariance (including its action on
the context extension), the inductive limit, and the square relating a
region's algebra to the whole are all checked, never assumed.
"""

from __future__ import annotations

import itertools
from dataclasses import dataclass, field

import numpy as np

from .ctxext import build_limit_extension, embed
from .errors import DomainError, InputError
from .linalg import DEFAULT_TOL, opnorm
from .staralg import (
    MatrixStarAlgebra,
    algebra_span_equal,
    algebra_span_leq,
    full_matrix_algebra,
    generate_algebra,
    gelfand_spectrum,
    is_commutative,
    _assemble_context_category,
)
from .validation import ValidationReport

_PAULI = {
    "I": np.eye(2, dtype=complex),
    "X": np.array([[0, 1], [1, 0]], dtype=complex),
    "Y": np.array([[0, -1j], [1j, 0]], dtype=complex),
    "Z": np.array([[1, 0], [0, -1]], dtype=complex),
}


@dataclass(frozen=True, order=True)
class Region:
    """A site interval [start, stop], both ends inclusive."""

    start: int
    stop: int

    def __post_init__(self):
        if self.start > self.stop:
            raise InputError(f"region start {self.start} exceeds stop {self.stop}")

    def sites(self) -> range:
        return range(self.start, self.stop + 1)

    def contains(self, other: "Region") -> bool:
        return self.start <= other.start and other.stop <= self.stop

    def disjoint(self, other: "Region") -> bool:
        return self.stop < other.start or other.stop < self.start

    def label(self) -> str:
        return f"[{self.start},{self.stop}]"


def site_operator(single: np.ndarray, site: int, length: int) -> np.ndarray:
    """Embed a one-qubit operator at a site of the chain."""
    out = np.array([[1.0 + 0j]])
    for j in range(length):
        out = np.kron(out, single if j == site else _PAULI["I"])
    return out


def pauli_string(labels: dict, length: int) -> np.ndarray:
    """Tensor product with the given Paulis at their sites, identity elsewhere."""
    out = np.array([[1.0 + 0j]])
    for j in range(length):
        out = np.kron(out, _PAULI[labels.get(j, "I")])
    return out


def standard_region_algebra(region: Region, length: int, tol: float = DEFAULT_TOL) -> MatrixStarAlgebra:
    """Full matrix algebra on the region's sites, identity on the rest.

    Basis: normalized Pauli strings supported inside the region.  These are
    Frobenius-orthonormal, so the span data is exact.
    """
    d = 2**length
    norm = np.sqrt(d)
    sites = list(region.sites())
    basis = []
    for combo in itertools.product("IXYZ", repeat=len(sites)):
        labels = {site: p for site, p in zip(sites, combo)}
        basis.append(pauli_string(labels, length) / norm)
    alg = MatrixStarAlgebra(d, basis, tol)
    alg._ortho = basis
    return alg


@dataclass
class LocalNet:
    """Region -> algebra assignment on a chain of ``length`` qubit sites.

    ``builder`` is the local rule used as the reference when checking that
    assigning a region agrees with assigning it as a part of the whole.
    """

    length: int
    assignment: dict
    builder: object = field(default=None, repr=False)
    tol: float = DEFAULT_TOL

    def regions(self) -> list:
        return sorted(self.assignment.keys())

    def algebra(self, region: Region) -> MatrixStarAlgebra:
        return self.assignment[region]

    @property
    def dim(self) -> int:
        return 2**self.length


def standard_net(length: int, max_interval: int | None = None, tol: float = DEFAULT_TOL) -> LocalNet:
    """The net of all intervals (optionally capped in length) on the chain."""
    if length < 1:
        raise InputError("chain length must be positive")
    cap = length if max_interval is None else max_interval
    assignment = {}
    for a in range(length):
        for b in range(a, min(length, a + cap)):
            region = Region(a, b)
            assignment[region] = standard_region_algebra(region, length, tol)
    return LocalNet(length, assignment, builder=lambda r: standard_region_algebra(r, length, tol), tol=tol)


# ---------------------------------------------------------------------------
# net axioms


def check_isotony(net: LocalNet) -> ValidationReport:
    """Interval containment must give span containment of the algebras."""
    report = ValidationReport()
    regions = net.regions()
    for small in regions:
        for big in regions:
            if small == big or not big.contains(small):
                continue
            sub = net.algebra(small)
            sup = net.algebra(big)
            if not algebra_span_leq(sub, sup, net.tol):
                report.add(
                    "net.isotony",
                    f"algebra of {small.label()} is not contained in algebra of {big.label()}",
                )
    return report


def check_locality(net: LocalNet) -> ValidationReport:
    """Algebras of disjoint regions must commute elementwise."""
    report = ValidationReport()
    regions = net.regions()
    for i, left in enumerate(regions):
        for right in regions[i + 1 :]:
            if not left.disjoint(right):
                continue
            a_stack = np.stack(net.algebra(left).basis)
            b_stack = np.stack(net.algebra(right).basis)
            prod_ab = np.einsum("aij,bjk->abik", a_stack, b_stack)
            prod_ba = np.einsum("bij,ajk->abik", b_stack, a_stack)
            comm = prod_ab - prod_ba
            fro = np.linalg.norm(comm, axis=(2, 3))
            for ai, bi in zip(*np.nonzero(fro > net.tol)):
                if opnorm(comm[ai, bi]) > net.tol:
                    report.add(
                        "net.locality",
                        f"basis elements {ai} of {left.label()} and {bi} of {right.label()} do not commute",
                    )
    return report


def composite_context(net: LocalNet, parts: list) -> MatrixStarAlgebra:
    """Context spanning several mutually disjoint regions.

    ``parts`` is a list of (Region, commutative subalgebra of that region's
    algebra); the generated algebra is their joint span closure, which is
    commutative with multiplicative character count.
    """
    if not parts:
        raise InputError("composite context needs at least one part")
    for (r1, _), (r2, _) in itertools.combinations(parts, 2):
        if not r1.disjoint(r2):
            raise DomainError(f"regions {r1.label()} and {r2.label()} are not causally separated")
    gens = []
    for region, alg in parts:
        if region not in net.assignment:
            raise DomainError(f"region {region.label()} is not in the net")
        if not is_commutative(alg):
            raise DomainError(f"context on {region.label()} is not commutative")
        if not algebra_span_leq(alg, net.algebra(region), net.tol):
            raise DomainError(f"context on {region.label()} leaves its region algebra")
        gens.extend(alg.basis)
    composite = generate_algebra(gens, net.dim, net.tol, dim_cap=net.dim)
    if not is_commutative(composite):
        raise DomainError("composite context failed to be commutative")
    return composite


# ---------------------------------------------------------------------------
# translation covariance


def translation_unitary(shift: int, length: int) -> np.ndarray:
    """Permutation matrix moving site j to site (j + shift) mod length."""
    d = 2**length
    u = np.zeros((d, d), dtype=complex)
    for idx in range(d):
        bits = [(idx >> (length - 1 - j)) & 1 for j in range(length)]
        moved = [0] * length
        for j in range(length):
            moved[(j + shift) % length] = bits[j]
        new_idx = sum(b << (length - 1 - j) for j, b in enumerate(moved))
        u[new_idx, idx] = 1.0
    return u


def shifted_region(region: Region, shift: int, length: int, cyclic: bool = True):
    """Image of a region under the site translation; None if it wraps."""
    if not cyclic:
        if region.stop + shift >= length or region.start + shift < 0:
            raise DomainError(f"shift {shift} moves {region.label()} off the chain")
        return Region(region.start + shift, region.stop + shift)
    sites = sorted(((j + shift) % length) for j in region.sites())
    if sites == list(range(sites[0], sites[0] + len(sites))):
        return Region(sites[0], sites[-1])
    return None


def check_covariance(net: LocalNet, shift: int, contexts: list, cyclic: bool = True) -> ValidationReport:
    """Translation covariance of a context family and of its extension.

    The conjugation by the shift permutation must map every context algebra
    onto the context at the shifted region, and the induced permutation of
    the product-spectrum components must intertwine the embeddings.
    """
    report = ValidationReport()
    u = translation_unitary(shift, net.length)
    ud = u.conj().T

    def alpha(m):
        return u @ m @ ud

    family = {region: alg for region, alg in contexts}
    targets = {}
    for region, alg in contexts:
        image = shifted_region(region, shift, net.length, cyclic)
        if image is None or image not in family:
            report.add(
                "net.covariance",
                f"context at {region.label()} has no translate in the family (orphan context)",
            )
            continue
        moved = MatrixStarAlgebra(net.dim, [alpha(b) for b in alg.basis], net.tol)
        if not algebra_span_equal(moved, family[image], net.tol):
            report.add(
                "net.covariance",
                f"translate of the context at {region.label()} differs from the context at {image.label()}",
            )
            continue
        targets[region] = image
    if not report.ok:
        return report

    # extension part: build the product carrier over the family and check
    # that embedding then permuting equals translating then embedding.
    ambient = full_matrix_algebra(net.dim, net.tol)
    algebras = [alg for _, alg in contexts]
    cc = _assemble_context_category(ambient, algebras, [[] for _ in contexts], seed=0)
    ids_by_region = {}
    for region, alg in contexts:
        for cid in cc.ids():
            if algebra_span_equal(cc.algebra(cid), alg, net.tol):
                ids_by_region[region] = cid
                break
    ext = build_limit_extension(cc)
    positions = {cid: ext.carrier.position(cid) for cid in ext.carrier.context_ids}

    char_maps = {}
    for region, image in targets.items():
        cid, tid = ids_by_region[region], ids_by_region[image]
        table = {}
        for i, chi in enumerate(ext.spectra[cid]):
            moved = alpha(chi.projection)
            hits = [
                j
                for j, tchi in enumerate(ext.spectra[tid])
                if opnorm(moved - tchi.projection) <= max(net.tol, 1e-8)
            ]
            if len(hits) != 1:
                report.add(
                    "net.covariance",
                    f"character {i} of the context at {region.label()} has no unique translate",
                )
            else:
                table[i] = hits[0]
        char_maps[region] = table
    if not report.ok:
        return report

    point_index = {pt: k for k, pt in enumerate(ext.carrier.points)}

    def moved_point(pt):
        out = list(pt)
        for region, image in targets.items():
            cid, tid = ids_by_region[region], ids_by_region[image]
            out[positions[tid]] = char_maps[region][pt[positions[cid]]]
        return tuple(out)

    for region, image in targets.items():
        cid, tid = ids_by_region[region], ids_by_region[image]
        for b_idx, b in enumerate(cc.algebra(cid).basis):
            before = embed(b, cid, ext).values
            after = embed(alpha(b), tid, ext).values
            for pt in ext.carrier.points:
                lhs = after[point_index[moved_point(pt)]]
                rhs = before[point_index[pt]]
                if abs(lhs - rhs) > max(net.tol, 1e-8):
                    report.add(
                        "net.covariance",
                        f"extension automorphism fails on basis element {b_idx} of context at {region.label()}",
                    )
                    break
    return report


# ---------------------------------------------------------------------------
# inductive limit and the region-to-whole square


def inductive_limit(net: LocalNet) -> MatrixStarAlgebra:
    """Algebra generated by every local algebra of the net."""
    gens = []
    for region in net.regions():
        gens.extend(net.algebra(region).basis)
    return generate_algebra(gens, net.dim, net.tol, dim_cap=net.dim)


def check_lc_square(sub: Region, whole: Region, net: LocalNet) -> ValidationReport:
    """The two ways from a subregion to the whole agree.

    Path one includes the assigned subregion algebra into the whole's
    algebra; path two embeds the region first and applies the net's local
    rule.  Both must give the same subalgebra span.
    """
    if not whole.contains(sub):
        raise DomainError(f"region {sub.label()} is not inside {whole.label()}")
    report = ValidationReport()
    if sub not in net.assignment or whole not in net.assignment:
        raise DomainError("both regions must belong to the net")
    assigned = net.algebra(sub)
    if not algebra_span_leq(assigned, net.algebra(whole), net.tol):
        report.add(
            "net.lcsquare",
            f"algebra of {sub.label()} does not include into algebra of {whole.label()}",
        )
    if net.builder is not None:
        reference = net.builder(sub)
        if not algebra_span_equal(assigned, reference, net.tol):
            report.add(
                "net.lcsquare",
                f"assigned algebra of {sub.label()} differs from the region rule applied inside {whole.label()}",
            )
    return report


def spectrum_multiplicativity(net: LocalNet, parts: list, seed: int = 0) -> tuple:
    """(character count of the composite, product of the part counts)."""
    composite = composite_context(net, parts)
    count = len(gelfand_spectrum(composite, seed=seed))
    expected = 1
    for _, alg in parts:
        expected *= len(gelfand_spectrum(alg, seed=seed))
    return count, expected
