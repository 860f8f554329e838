"""Finite-dimensional matrix *-algebras and their measurement contexts.

An algebra is a unital, adjoint- and product-closed span of d x d complex
matrices.  Commutative algebras expose their character space (minimal
projections with eigenvalue functionals), context families are generated
from seed observables by commutation cliques, and projection lists split
into Boolean blocks.
"""

from __future__ import annotations

import itertools
from dataclasses import dataclass, field

import numpy as np

from .errors import CapExceeded, DomainError, InputError
from .fincat import FinCategory, poset_category
from .linalg import (
    DEFAULT_TOL,
    as_matrix,
    commutator,
    dagger,
    in_span,
    intersect_spans,
    is_projection,
    is_selfadjoint,
    opnorm,
    orthonormalize_span,
    projector_leq,
    span_leq,
    span_residual,
    spans_equal,
)
from .validation import ValidationReport

DIM_CAP = 16


@dataclass
class MatrixStarAlgebra:
    """A *-closed unital span of d x d complex matrices.

    ``basis`` is linearly independent (orthonormal in Frobenius norm when
    produced by this module); the span, not the individual basis matrices,
    is what carries the algebraic structure.
    """

    dim: int
    basis: list
    tol: float = DEFAULT_TOL
    _ortho: list = field(default=None, repr=False, compare=False)

    @property
    def dimension(self) -> int:
        return len(self.basis)

    @property
    def ortho(self) -> list:
        if self._ortho is None:
            self._ortho = orthonormalize_span(self.basis, self.tol)
        return self._ortho

    @property
    def identity(self) -> np.ndarray:
        return np.eye(self.dim, dtype=complex)

    def contains(self, m) -> bool:
        return in_span(as_matrix(m, self.dim), self.ortho, self.tol)

    def residual(self, m) -> float:
        return span_residual(as_matrix(m, self.dim), self.ortho)

    def validate(self) -> ValidationReport:
        """Check unitality and closure under adjoint and product."""
        report = ValidationReport()
        if not self.contains(self.identity):
            report.add("algebra.unit", "identity matrix not in span")
        for i, a in enumerate(self.basis):
            if not self.contains(dagger(a)):
                report.add("algebra.adjoint", f"adjoint of basis element {i} leaves span")
            for j, b in enumerate(self.basis):
                if not self.contains(a @ b):
                    report.add("algebra.product", f"product of basis elements ({i},{j}) leaves span")
        return report


def trivial_algebra(d: int, tol: float = DEFAULT_TOL) -> MatrixStarAlgebra:
    return MatrixStarAlgebra(d, [np.eye(d, dtype=complex) / np.sqrt(d)], tol)


def full_matrix_algebra(d: int, tol: float = DEFAULT_TOL) -> MatrixStarAlgebra:
    """All d x d matrices, with the matrix units as orthonormal basis."""
    basis = []
    for i in range(d):
        for j in range(d):
            e = np.zeros((d, d), dtype=complex)
            e[i, j] = 1.0
            basis.append(e)
    return MatrixStarAlgebra(d, basis, tol)


def algebra_span_equal(a: MatrixStarAlgebra, b: MatrixStarAlgebra, tol: float = DEFAULT_TOL) -> bool:
    return a.dim == b.dim and spans_equal(a.ortho, b.ortho, tol)


def algebra_span_leq(sub: MatrixStarAlgebra, sup: MatrixStarAlgebra, tol: float = DEFAULT_TOL) -> bool:
    return sub.dim == sup.dim and span_leq(sub.ortho, sup.ortho, tol)


def _batched_products(basis: list) -> list:
    """All pairwise products a @ b, chunked to bound peak memory."""
    n = len(basis)
    if n == 0:
        return []
    d = basis[0].shape[0]
    stack = np.stack(basis)
    chunk = max(1, 4_000_000 // max(1, n * d * d))
    out = []
    for i in range(0, n, chunk):
        block = np.einsum("aij,bjk->abik", stack[i : i + chunk], stack)
        out.extend(block.reshape(-1, d, d))
    return out


def generate_algebra(
    generators: list,
    d: int,
    tol: float = DEFAULT_TOL,
    dim_cap: int = DIM_CAP,
) -> MatrixStarAlgebra:
    """Smallest *-closed unital span containing the generators.

    Closure by iterated pairwise products with rank-revealing span
    reduction after each round, until the dimension stabilizes.
    """
    if d > dim_cap:
        raise InputError(f"matrix dimension {d} exceeds cap {dim_cap}")
    mats = [np.eye(d, dtype=complex)]
    for g in generators:
        gm = as_matrix(g, d)
        mats.append(gm)
        mats.append(dagger(gm))
    basis = orthonormalize_span(mats, tol)
    for _ in range(2 * d * d + 2):
        if len(basis) == d * d:
            break
        enlarged = orthonormalize_span(basis + _batched_products(basis), tol)
        if len(enlarged) == len(basis):
            basis = enlarged
            break
        basis = enlarged
    return MatrixStarAlgebra(d, basis, tol)


def is_commutative(a: MatrixStarAlgebra) -> bool:
    """All pairwise basis commutators vanish within tolerance (operator norm)."""
    n = a.dimension
    for i in range(n):
        for j in range(i + 1, n):
            c = commutator(a.basis[i], a.basis[j])
            # Frobenius norm dominates the operator norm: cheap accept first.
            if np.linalg.norm(c) <= a.tol:
                continue
            if opnorm(c) > a.tol:
                return False
    return True


# ---------------------------------------------------------------------------
# Gel'fand spectrum


@dataclass
class Character:
    """A point of the character space: minimal projection plus eigenvalues.

    ``values[i]`` is the scalar by which ``basis[i]`` acts on the
    projection's range; ``value_of`` extends that to any algebra element.
    """

    projection: np.ndarray
    values: np.ndarray
    rank: int

    def value_of(self, m) -> complex:
        return complex(np.trace(self.projection @ np.asarray(m, dtype=complex)) / self.rank)


def _selfadjoint_spanning(basis: list) -> list:
    out = []
    for b in basis:
        h = (b + dagger(b)) / 2.0
        k = (b - dagger(b)) / 2.0j
        if opnorm(h) > 1e-13:
            out.append(h)
        if opnorm(k) > 1e-13:
            out.append(k)
    return out


def _cluster(values: np.ndarray) -> list:
    """Group sorted real values whose gaps stay below a scaled threshold."""
    order = np.argsort(values)
    scale = max(1.0, float(np.abs(values).max())) if values.size else 1.0
    groups = [[order[0]]] if values.size else []
    for idx in order[1:]:
        if values[idx] - values[groups[-1][-1]] <= 1e-8 * scale:
            groups[-1].append(idx)
        else:
            groups.append([idx])
    return groups


def _blocks_from_vectors(h: np.ndarray, isometry: np.ndarray) -> list:
    """Split an invariant subspace (columns of ``isometry``) by eigenvalue of h."""
    compressed = dagger(isometry) @ h @ isometry
    w, vecs = np.linalg.eigh((compressed + dagger(compressed)) / 2.0)
    return [isometry @ vecs[:, group] for group in _cluster(w)]


def _validate_blocks(blocks: list, basis: list, tol: float) -> bool:
    for iso in blocks:
        p = iso @ dagger(iso)
        r = iso.shape[1]
        for b in basis:
            val = np.trace(p @ b) / r
            scale = max(1.0, opnorm(b))
            if opnorm(p @ b @ p - val * p) > max(tol, 1e-9) * scale:
                return False
    return True


def gelfand_spectrum(
    v: MatrixStarAlgebra, seed: int = 0, max_retries: int = 3
) -> list:
    """Characters of a commutative algebra via simultaneous diagonalization.

    A random self-adjoint combination of the basis splits joint eigenspaces
    in one shot; residual degeneracy triggers fresh coefficients and finally
    an exact refinement sweep over the self-adjoint spanning set.  Output is
    sorted by rounded value vector, so fixed (algebra, seed) gives a fixed
    ordering.
    """
    if not is_commutative(v):
        raise DomainError("gelfand_spectrum requires a commutative algebra")
    herm = _selfadjoint_spanning(v.basis)
    d = v.dim
    rng = np.random.default_rng(seed)

    blocks = None
    for _ in range(max_retries):
        coeffs = rng.standard_normal(len(herm))
        h = sum(c * s for c, s in zip(coeffs, herm)) if herm else np.zeros((d, d), dtype=complex)
        candidate = _blocks_from_vectors(h, np.eye(d, dtype=complex))
        if len(candidate) == v.dimension and _validate_blocks(candidate, v.basis, v.tol):
            blocks = candidate
            break
    if blocks is None:
        blocks = [np.eye(d, dtype=complex)]
        for s in herm:
            blocks = [sub for iso in blocks for sub in _blocks_from_vectors(s, iso)]
        if not _validate_blocks(blocks, v.basis, v.tol):
            raise DomainError("simultaneous diagonalization failed to isolate characters")

    chars = []
    for iso in blocks:
        p = iso @ dagger(iso)
        r = iso.shape[1]
        values = np.array([np.trace(p @ b) / r for b in v.basis])
        chars.append(Character(projection=p, values=values, rank=r))
    chars.sort(key=lambda c: tuple(np.round(c.values.view(float), 8)))
    return chars


def dominating_character_index(chi: Character, sub_spectrum: list, tol: float = DEFAULT_TOL) -> int:
    """Index of the unique coarser character whose projection dominates chi's."""
    hits = [
        i
        for i, sub in enumerate(sub_spectrum)
        if projector_leq(chi.projection, sub.projection, max(tol, 1e-8))
    ]
    if len(hits) != 1:
        raise DomainError(
            f"character restriction ill-defined: {len(hits)} dominating projections"
        )
    return hits[0]


# ---------------------------------------------------------------------------
# context categories


@dataclass
class ContextCategory:
    """A finite family of commutative subalgebras ordered by span inclusion."""

    ambient: MatrixStarAlgebra
    contexts: dict
    order: set
    generators: dict
    seed: int = 0
    _spectra: dict = field(default_factory=dict, repr=False, compare=False)

    def ids(self) -> list:
        return list(self.contexts.keys())

    def algebra(self, ctx_id: str) -> MatrixStarAlgebra:
        return self.contexts[ctx_id]

    def leq(self, a: str, b: str) -> bool:
        return a == b or (a, b) in self.order

    def strict_pairs(self) -> list:
        """(sub, sup) pairs with sub strictly below sup, deterministic order."""
        ids = self.ids()
        return [(a, b) for a in ids for b in ids if a != b and (a, b) in self.order]

    def spectrum(self, ctx_id: str) -> list:
        if ctx_id not in self._spectra:
            self._spectra[ctx_id] = gelfand_spectrum(self.contexts[ctx_id], seed=self.seed)
        return self._spectra[ctx_id]

    def as_poset_category(self) -> FinCategory:
        return poset_category(self.ids(), self.leq)


def _maximal_cliques(n: int, adjacent) -> list:
    cliques = []

    def bk(r: set, p: set, x: set) -> None:
        if not p and not x:
            cliques.append(tuple(sorted(r)))
            return
        for vtx in sorted(p):
            bk(r | {vtx}, p & adjacent[vtx], x & adjacent[vtx])
            p = p - {vtx}
            x = x | {vtx}

    bk(set(), set(range(n)), set())
    return sorted(cliques)


def intersect_algebras(
    a: MatrixStarAlgebra, b: MatrixStarAlgebra, tol: float = DEFAULT_TOL
) -> MatrixStarAlgebra:
    if a.dim != b.dim:
        raise InputError("cannot intersect algebras of different matrix dimension")
    basis = intersect_spans(a.ortho, b.ortho, tol)
    if not basis:
        basis = [np.eye(a.dim, dtype=complex) / np.sqrt(a.dim)]
    return MatrixStarAlgebra(a.dim, basis, tol)


def _assemble_context_category(
    ambient: MatrixStarAlgebra,
    group_algebras: list,
    group_generators: list,
    seed: int,
) -> ContextCategory:
    tol = ambient.tol
    contexts: dict = {}
    generators: dict = {}

    def register(name: str, alg: MatrixStarAlgebra, gens: list) -> None:
        for existing, other in contexts.items():
            if algebra_span_equal(alg, other, tol):
                if gens and not generators[existing]:
                    generators[existing] = gens
                return
        contexts[name] = alg
        generators[name] = gens

    for i, alg in enumerate(group_algebras):
        register(f"V{i}", alg, group_generators[i])
    maximal_ids = list(contexts.keys())
    for i, j in itertools.combinations(range(len(maximal_ids)), 2):
        meet = intersect_algebras(contexts[maximal_ids[i]], contexts[maximal_ids[j]], tol)
        if meet.dimension <= 1:
            continue
        register(f"{maximal_ids[i]}^{maximal_ids[j]}", meet, [])
    register("I", trivial_algebra(ambient.dim, tol), [])

    order = set()
    ids = list(contexts.keys())
    for a in ids:
        for b in ids:
            if a != b and algebra_span_leq(contexts[a], contexts[b], tol):
                order.add((a, b))
    return ContextCategory(ambient, contexts, order, generators, seed=seed)


def context_category(
    ambient: MatrixStarAlgebra, seeds: list, seed: int = 0
) -> ContextCategory:
    """Contexts generated by the maximal pairwise-commuting subsets of seeds.

    Pairwise intersections of the maximal contexts and the trivial span of
    the identity are included; the order is span containment.
    """
    tol = ambient.tol
    mats = [as_matrix(s, ambient.dim) for s in seeds]
    for k, m in enumerate(mats):
        if not is_selfadjoint(m, tol):
            raise DomainError(f"seed {k} is not self-adjoint")
        if not ambient.contains(m):
            raise DomainError(f"seed {k} lies outside the ambient algebra")
    adjacent = [
        {j for j in range(len(mats)) if j != i and opnorm(commutator(mats[i], mats[j])) <= tol}
        for i in range(len(mats))
    ]
    cliques = _maximal_cliques(len(mats), adjacent) if mats else []
    algebras = [generate_algebra([mats[i] for i in clique], ambient.dim, tol) for clique in cliques]
    return _assemble_context_category(ambient, algebras, [list(c) for c in cliques], seed)


def context_category_from_groups(
    ambient: MatrixStarAlgebra, groups: list, seed: int = 0
) -> ContextCategory:
    """Contexts generated from explicit seed groups (one context per group)."""
    tol = ambient.tol
    algebras = []
    for k, group in enumerate(groups):
        mats = [as_matrix(g, ambient.dim) for g in group]
        for m in mats:
            if not ambient.contains(m):
                raise DomainError(f"group {k} contains a matrix outside the ambient algebra")
        alg = generate_algebra(mats, ambient.dim, tol)
        if not is_commutative(alg):
            raise DomainError(f"group {k} does not generate a commutative algebra")
        algebras.append(alg)
    return _assemble_context_category(ambient, algebras, [[] for _ in groups], seed)


# ---------------------------------------------------------------------------
# Boolean blocks of projection families


@dataclass
class BooleanBlock:
    """A maximal commuting family of projections closed under complement and meet."""

    members: list
    atoms: list
    elements: list

    def meet(self, a, b):
        return a @ b

    def join(self, a, b):
        return a + b - a @ b

    def complement(self, a):
        d = a.shape[0]
        return np.eye(d, dtype=complex) - a


def boolean_blocks(
    projections: list, tol: float = DEFAULT_TOL, max_atoms: int = 12
) -> list:
    """Split projections into Boolean blocks along commutation cliques.

    Each block is generated by its clique: atoms are the nonzero products
    of each projection or its complement, elements are all atom subset sums.
    """
    mats = [as_matrix(p) for p in projections]
    for k, m in enumerate(mats):
        if not is_projection(m, max(tol, 1e-8)):
            raise DomainError(f"input {k} is not a projection")
    if not mats:
        return []
    d = mats[0].shape[0]
    for m in mats:
        if m.shape[0] != d:
            raise InputError("projections must share one matrix dimension")
    eye = np.eye(d, dtype=complex)
    adjacent = [
        {j for j in range(len(mats)) if j != i and opnorm(commutator(mats[i], mats[j])) <= tol}
        for i in range(len(mats))
    ]
    blocks = []
    for clique in _maximal_cliques(len(mats), adjacent):
        partial = [eye]
        for idx in clique:
            p = mats[idx]
            partial = [x @ p for x in partial] + [x @ (eye - p) for x in partial]
        atoms = [a for a in partial if opnorm(a) > 0.5]
        if len(atoms) > max_atoms:
            raise CapExceeded("Boolean block atom count", len(atoms), max_atoms)
        elements = []
        for bits in itertools.product((0, 1), repeat=len(atoms)):
            total = np.zeros((d, d), dtype=complex)
            for take, atom in zip(bits, atoms):
                if take:
                    total = total + atom
            elements.append(total)
        blocks.append(BooleanBlock(members=[mats[i] for i in clique], atoms=atoms, elements=elements))
    return blocks
