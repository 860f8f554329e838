"""Truncated bosonic Fock sector over a finite group-tuple mode space.

Single-particle modes are tuples of elements of a cyclic group, one per
face of a polyhedron; the Haar integral is the uniform average.  Smeared
field operators act on an occupation-cutoff Fock space, where the
canonical commutation relations hold exactly below the cutoff and the
exponentiated (Weyl) relation converges as the cutoff grows.  Copy-count
and face-count inclusions give the coarse-graining morphisms.
"""

from __future__ import annotations

import itertools
from dataclasses import dataclass, field

import numpy as np
from scipy.linalg import expm

from .errors import DomainError, InputError
from .fincat import Cone, Diagram, FinCategory, check_cone
from .linalg import dagger, opnorm
from .validation import ValidationReport


@dataclass
class PolyhedronSpace:
    """Mode space of one polyhedron: group order m, n faces, dim m**n."""

    m: int
    n: int

    def __post_init__(self):
        if self.m < 1 or self.n < 1:
            raise InputError("group order and face count must be positive")

    @property
    def size(self) -> int:
        return self.m**self.n

    @property
    def haar(self) -> float:
        """Weight of one group tuple under the uniform (Haar) measure."""
        return float(self.m) ** (-self.n)

    def tuples(self) -> list:
        return list(itertools.product(range(self.m), repeat=self.n))

    def index(self, g: tuple) -> int:
        idx = 0
        for gi in g:
            idx = idx * self.m + gi
        return idx

    def delta(self, g: tuple) -> np.ndarray:
        """Indicator test function of a single group tuple."""
        f = np.zeros(self.size, dtype=complex)
        f[self.index(tuple(g))] = 1.0
        return f


def _coerce_fn(f, dim: int) -> np.ndarray:
    arr = np.asarray(f, dtype=complex).reshape(-1)
    if arr.shape != (dim,):
        raise InputError(f"test function needs {dim} values, got {arr.shape[0]}")
    return arr


def inner_product(f, fp, space: PolyhedronSpace) -> complex:
    """Haar-weighted product sum, linear in the first argument."""
    fv = _coerce_fn(f, space.size)
    gv = _coerce_fn(fp, space.size)
    return complex(space.haar * np.sum(fv * gv.conj()))


def weighted_inner(f, fp, weight: float) -> complex:
    fv = np.asarray(f, dtype=complex).reshape(-1)
    gv = np.asarray(fp, dtype=complex).reshape(-1)
    if fv.shape != gv.shape:
        raise InputError("test functions of different lengths")
    return complex(weight * np.sum(fv * gv.conj()))


# ---------------------------------------------------------------------------
# truncated Fock space


@dataclass
class TruncatedFock:
    """Symmetric occupation basis over ``modes`` modes, total count <= n_max.

    ``mode_weight`` is the measure weight of one mode; mode operators carry
    the matching delta normalization so that smeared fields reproduce the
    weighted inner product in their commutator.
    """

    modes: int
    n_max: int
    mode_weight: float = 1.0
    occupations: list = field(default=None, repr=False)
    index: dict = field(default=None, repr=False)
    _ladders: dict = field(default_factory=dict, repr=False)

    def __post_init__(self):
        if self.modes < 1:
            raise InputError("need at least one mode")
        if self.n_max < 0:
            raise InputError("occupation cutoff must be nonnegative")
        if self.occupations is None:
            occs: list = []

            def fill(prefix, remaining, budget):
                if remaining == 0:
                    occs.append(tuple(prefix))
                    return
                for k in range(budget + 1):
                    fill(prefix + [k], remaining - 1, budget - k)

            for total in range(self.n_max + 1):
                start = len(occs)
                fill([], self.modes, total)
                occs[start:] = [o for o in occs[start:] if sum(o) == total]
            self.occupations = occs
            self.index = {occ: i for i, occ in enumerate(occs)}

    @property
    def dim(self) -> int:
        return len(self.occupations)

    def vacuum(self) -> np.ndarray:
        v = np.zeros(self.dim, dtype=complex)
        v[self.index[(0,) * self.modes]] = 1.0
        return v

    def annihilator(self, mode: int) -> np.ndarray:
        """Standard ladder matrix: a |..n..> = sqrt(n) |..n-1..>."""
        if mode not in self._ladders:
            a = np.zeros((self.dim, self.dim), dtype=complex)
            for occ, col in self.index.items():
                if occ[mode] == 0:
                    continue
                lowered = occ[:mode] + (occ[mode] - 1,) + occ[mode + 1 :]
                a[self.index[lowered], col] = np.sqrt(occ[mode])
            self._ladders[mode] = a
        return self._ladders[mode]

    def sector_mask(self, max_total: int) -> np.ndarray:
        return np.array([sum(occ) <= max_total for occ in self.occupations])


def fock_for(space: PolyhedronSpace, n_max: int, copies: int = 1) -> TruncatedFock:
    return TruncatedFock(modes=copies * space.size, n_max=n_max, mode_weight=space.haar)


def compressed_opnorm(matrix: np.ndarray, mask: np.ndarray) -> float:
    sub = matrix[np.ix_(mask, mask)]
    return opnorm(sub)


@dataclass
class FieldOperator:
    matrix: np.ndarray
    test_function: np.ndarray
    fock: TruncatedFock


@dataclass
class WeylElement:
    matrix: np.ndarray
    test_function: np.ndarray
    fock: TruncatedFock


def field_operator(f, fock: TruncatedFock) -> FieldOperator:
    """Smeared annihilation operator: measure-weighted sum of mode lowerings.

    The mode operators are delta-normalized against the measure, so the
    commutator with a conjugate field gives the weighted inner product on
    every sector below the cutoff.  Annihilates the vacuum.
    """
    fv = _coerce_fn(f, fock.modes)
    w = np.sqrt(fock.mode_weight)
    mat = np.zeros((fock.dim, fock.dim), dtype=complex)
    for mode in range(fock.modes):
        if fv[mode] != 0:
            mat = mat + w * fv[mode] * fock.annihilator(mode)
    return FieldOperator(mat, fv, fock)


def ccr_defect(f, fp, fock: TruncatedFock, guard: int = 1) -> float:
    """Norm of ([field(f), field(fp)*] - (f, fp)) on sectors <= n_max - guard.

    Zero (to rounding) with the default guard; the top sector feels the
    cutoff, so guard=0 reports the truncation artifact instead.
    """
    if fock.n_max == 0:
        raise DomainError("no sector below the cutoff to test")
    a = field_operator(f, fock).matrix
    b = field_operator(fp, fock).matrix
    ip = weighted_inner(f, fp, fock.mode_weight)
    c = a @ dagger(b) - dagger(b) @ a - ip * np.eye(fock.dim)
    return compressed_opnorm(c, fock.sector_mask(fock.n_max - guard))


def weyl_element(f, fock: TruncatedFock) -> WeylElement:
    """exp(i/sqrt(2) (field(f) + field(f)*)): unitary on the whole truncation."""
    psi = field_operator(f, fock).matrix
    return WeylElement(expm(1j / np.sqrt(2.0) * (psi + dagger(psi))), _coerce_fn(f, fock.modes), fock)


def weyl_relation_defect(f, fp, fock: TruncatedFock, sector_cap: int) -> float:
    """Compressed norm of W(f) W(fp) - phase * W(f + fp).

    The phase is exp(-i Im(f, fp) / 2); the defect shrinks toward zero as
    the occupation cutoff grows at fixed arguments and sector cap.
    """
    if sector_cap >= fock.n_max:
        raise DomainError("sector cap must stay below the occupation cutoff")
    fv = _coerce_fn(f, fock.modes)
    gv = _coerce_fn(fp, fock.modes)
    wf = weyl_element(fv, fock).matrix
    wg = weyl_element(gv, fock).matrix
    wsum = weyl_element(fv + gv, fock).matrix
    phase = np.exp(-0.5j * weighted_inner(fv, gv, fock.mode_weight).imag)
    return compressed_opnorm(wf @ wg - phase * wsum, fock.sector_mask(sector_cap))


def weyl_commutator_defect(f, fp, fock: TruncatedFock, sector_cap: int) -> float:
    """Compressed norm of W(f) W(fp) - W(fp) W(f)."""
    if sector_cap >= fock.n_max:
        raise DomainError("sector cap must stay below the occupation cutoff")
    wf = weyl_element(f, fock).matrix
    wg = weyl_element(fp, fock).matrix
    return compressed_opnorm(wf @ wg - wg @ wf, fock.sector_mask(sector_cap))


def is_gft_context(fs: list, space: PolyhedronSpace, tol: float = 1e-10) -> bool:
    """True iff all pairwise inner products are real (commuting smearings)."""
    if not fs:
        raise InputError("a context needs at least one test function")
    fns = [_coerce_fn(f, space.size) for f in fs]
    for i, a in enumerate(fns):
        for b in fns[i + 1 :]:
            if abs(inner_product(a, b, space).imag) > tol:
                return False
    return True


# ---------------------------------------------------------------------------
# second quantization as copy-count inclusion


@dataclass
class WeylPresentation:
    """Generator presentation of the Weyl sector over ``copies`` copies."""

    space: PolyhedronSpace
    copies: int
    generators: list


@dataclass
class InclusionCone:
    diagram: Diagram
    cone: Cone
    source: WeylPresentation
    target: WeylPresentation
    report: ValidationReport


def _fn_key(vec: np.ndarray) -> tuple:
    r = np.round(np.asarray(vec, dtype=complex), 12)
    return tuple((float(x.real), float(x.imag)) for x in r)


def copy_embedding(f, copies: int, space: PolyhedronSpace) -> np.ndarray:
    """Place a base test function on copy 0 of the direct sum, zero elsewhere."""
    fv = _coerce_fn(f, space.size)
    out = np.zeros(copies * space.size, dtype=complex)
    out[: space.size] = fv
    return out


def copy_padding(fv: np.ndarray, k: int, l: int, space: PolyhedronSpace, sign: float = 1.0) -> np.ndarray:
    """Zero-pad a k-copy function onto l copies (the inclusion morphism)."""
    arr = _coerce_fn(fv, k * space.size)
    out = np.zeros(l * space.size, dtype=complex)
    out[: k * space.size] = sign * arr
    return out


def second_quantization_cone(
    k: int,
    l: int,
    context_fns: list,
    space: PolyhedronSpace,
    corrupt: bool = False,
) -> InclusionCone:
    """Cone of a context over the copy-count inclusion of Weyl sectors.

    Builds generator presentations over k and l copies, the zero-padding
    inclusion between them, and the two context embeddings; the triangle
    (pad after embedding into k copies = direct embedding into l copies)
    is checked as a concrete cone.  ``corrupt`` flips the padding sign to
    produce a located violation.
    """
    if k > l:
        raise InputError(f"copy counts out of order: {k} > {l}")
    if not context_fns:
        raise InputError("context needs at least one test function")
    if not is_gft_context(context_fns, space):
        raise DomainError("test functions do not form a context (complex inner products)")
    sign = -1.0 if corrupt else 1.0

    base = [_coerce_fn(f, space.size) for f in context_fns]
    gens_k = [copy_embedding(f, k, space) for f in base]
    gens_l_direct = [copy_embedding(f, l, space) for f in base]
    gens_l = list(gens_l_direct)
    if l > k:
        gens_l.append(_coerce_fn(np.eye(l * space.size)[k * space.size], l * space.size))

    carrier_k = [_fn_key(g) for g in gens_k]
    padded = {_fn_key(g): _fn_key(copy_padding(g, k, l, space, sign)) for g in gens_k}
    carrier_l = sorted(set(_fn_key(g) for g in gens_l) | set(padded.values()))

    index = FinCategory(
        objects=["Sk", "Sl"],
        homs={("Sk", "Sk"): ["id_Sk"], ("Sl", "Sl"): ["id_Sl"], ("Sk", "Sl"): ["pad"]},
        compose={
            ("id_Sk", "id_Sk"): "id_Sk",
            ("id_Sl", "id_Sl"): "id_Sl",
            ("pad", "id_Sk"): "pad",
            ("id_Sl", "pad"): "pad",
        },
        identities={"Sk": "id_Sk", "Sl": "id_Sl"},
    )
    diagram = Diagram(index, {"Sk": carrier_k, "Sl": carrier_l}, {"pad": padded})
    apex = [_fn_key(f) for f in base]
    legs = {
        "Sk": {_fn_key(f): _fn_key(copy_embedding(f, k, space)) for f in base},
        "Sl": {_fn_key(f): _fn_key(copy_embedding(f, l, space)) for f in base},
    }
    cone = Cone(apex=apex, legs=legs)
    report = check_cone(cone, diagram)
    return InclusionCone(
        diagram=diagram,
        cone=cone,
        source=WeylPresentation(space, k, gens_k),
        target=WeylPresentation(space, l, gens_l),
        report=report,
    )


# ---------------------------------------------------------------------------
# face-count coarse graining


@dataclass
class FaceCoarseGrain:
    """Isometry from k-face to l-face mode space by identity-padding tuples."""

    m: int
    source_faces: int
    target_faces: int
    matrix: np.ndarray
    scale: float


def face_coarse_grain(k: int, l: int, m: int, face_cap: int = 10) -> FaceCoarseGrain:
    """Extend k-face group tuples by the identity element up to l faces.

    The induced map on test functions scales inner products by m**(k - l);
    composing k -> l -> p equals the direct k -> p map.
    """
    if k > l:
        raise InputError(f"face counts out of order: {k} > {l}")
    if l > face_cap:
        raise InputError(f"face count {l} exceeds cap {face_cap}")
    src = PolyhedronSpace(m, k)
    dst = PolyhedronSpace(m, l)
    t = np.zeros((dst.size, src.size))
    for g in src.tuples():
        t[dst.index(tuple(g) + (0,) * (l - k)), src.index(g)] = 1.0
    return FaceCoarseGrain(m, k, l, t, scale=float(m) ** (k - l))
