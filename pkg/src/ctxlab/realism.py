"""Correlations over carrier measures and quantum states, and the
odd-group realism bound.

Each observable group mixes two kinds of +/-1 observables: functions on an
extension carrier (correlated through a point measure) and self-adjoint
matrices squaring to the identity (correlated through a shared density
matrix).  The bound

    sum_p < (signed sum of the p-th group)^2 >  >=  number of groups

holds for every measure-based model because an odd sum of +/-1 values is
never zero; quantum evaluation of the same expression may dip below it.
"""

from __future__ import annotations

import itertools
from dataclasses import dataclass

import numpy as np

from .ctxext import ExtendedState
from .errors import CapExceeded, DomainError, InputError, MixedObservableError
from .linalg import as_matrix, is_selfadjoint, opnorm

SIGN_SEARCH_CAP = 16


@dataclass
class CarrierObservable:
    """A +/-1-valued function on the points of an extension carrier."""

    values: np.ndarray

    def __post_init__(self):
        self.values = np.asarray(self.values, dtype=float).reshape(-1)
        if np.any(np.abs(np.abs(self.values) - 1.0) > 1e-9):
            raise DomainError("carrier observable must take values +1 or -1")


@dataclass
class MatrixObservable:
    """A self-adjoint matrix with spectrum in {-1, +1} (squares to identity)."""

    matrix: np.ndarray

    def __post_init__(self):
        self.matrix = as_matrix(self.matrix)
        if not is_selfadjoint(self.matrix, 1e-9):
            raise DomainError("matrix observable must be self-adjoint")
        eye = np.eye(self.matrix.shape[0])
        if opnorm(self.matrix @ self.matrix - eye) > 1e-9:
            raise DomainError("matrix observable must square to the identity")


@dataclass
class ObservableGroup:
    a_side: list
    b_side: list

    def observables(self) -> list:
        return list(self.a_side) + list(self.b_side)

    @property
    def size(self) -> int:
        return len(self.a_side) + len(self.b_side)


@dataclass
class ObservableFamily:
    groups: list

    def __post_init__(self):
        if not self.groups:
            raise InputError("family needs at least one group")
        for p, group in enumerate(self.groups):
            if group.size % 2 == 0:
                raise DomainError(f"group {p} has even size {group.size}; an odd count is required")

    @property
    def q(self) -> int:
        return len(self.groups)

    @property
    def total(self) -> int:
        return sum(g.size for g in self.groups)


def _weights_of(mu) -> np.ndarray:
    w = mu.weights if isinstance(mu, ExtendedState) else np.asarray(mu, dtype=float)
    if np.any(w < -1e-12):
        raise DomainError("measure weights must be nonnegative")
    return w


def _function_values(obs) -> np.ndarray:
    if isinstance(obs, CarrierObservable):
        return obs.values
    if isinstance(obs, MatrixObservable):
        raise MixedObservableError("matrix observable offered to a measure correlation")
    return np.asarray(getattr(obs, "values", obs), dtype=complex).reshape(-1)


def measure_correlation(mu, a, b) -> float:
    """Point-wise product integrated against the measure; symmetric."""
    w = _weights_of(mu)
    av = _function_values(a)
    bv = _function_values(b)
    if av.shape != w.shape or bv.shape != w.shape:
        raise DomainError("observable is not defined on the measure's carrier")
    return float(np.real(np.sum(av * bv * w)))


class MeasureProvider:
    """Correlations of carrier observables under a fixed point measure."""

    def __init__(self, mu):
        self.weights = _weights_of(mu)

    def correlation(self, o1, o2) -> float:
        if not isinstance(o1, CarrierObservable) or not isinstance(o2, CarrierObservable):
            raise MixedObservableError("measure provider correlates carrier observables only")
        return measure_correlation(self.weights, o1.values, o2.values)


class QuantumProvider:
    """Correlations and group squares of matrix observables in one state."""

    def __init__(self, rho):
        self.rho = as_matrix(rho)
        if not is_selfadjoint(self.rho, 1e-9) or abs(np.trace(self.rho) - 1.0) > 1e-8:
            raise DomainError("state must be a self-adjoint trace-one matrix")
        if np.linalg.eigvalsh(self.rho).min() < -1e-8:
            raise DomainError("state must be positive semidefinite")

    def correlation(self, o1, o2) -> float:
        if not isinstance(o1, MatrixObservable) or not isinstance(o2, MatrixObservable):
            raise MixedObservableError("quantum provider correlates matrix observables only")
        sym = (o1.matrix @ o2.matrix + o2.matrix @ o1.matrix) / 2.0
        return float(np.trace(self.rho @ sym).real)

    def group_square_expectation(self, observables: list, signs: list) -> float:
        total = np.zeros_like(self.rho)
        for s, obs in zip(signs, observables):
            if not isinstance(obs, MatrixObservable):
                raise MixedObservableError("quantum provider squares matrix observables only")
            total = total + s * obs.matrix
        return float(np.trace(self.rho @ total @ total).real)


class HybridProvider:
    """Dispatch by observable kind; cross-kind pairs are refused."""

    def __init__(self, mu, rho):
        self.measure = MeasureProvider(mu)
        self.quantum = QuantumProvider(rho)

    def correlation(self, o1, o2) -> float:
        if isinstance(o1, CarrierObservable) and isinstance(o2, CarrierObservable):
            return self.measure.correlation(o1, o2)
        if isinstance(o1, MatrixObservable) and isinstance(o2, MatrixObservable):
            return self.quantum.correlation(o1, o2)
        raise MixedObservableError(
            "no correlation is defined between a carrier function and a matrix observable"
        )


def _split_signs(fam: ObservableFamily, signs) -> list:
    flat = list(signs)
    if len(flat) != fam.total:
        raise InputError(f"need {fam.total} signs, got {len(flat)}")
    if any(s not in (1, -1) for s in flat):
        raise InputError("signs must be +1 or -1")
    out = []
    pos = 0
    for group in fam.groups:
        out.append(flat[pos : pos + group.size])
        pos += group.size
    return out


def roy_singh_lhs(fam: ObservableFamily, signs, provider) -> float:
    """Sum over groups of the expected square of the signed observable sum.

    Measure-type groups expand the square into pairwise correlations;
    matrix-type groups are evaluated as literal operator squares.
    """
    per_group = _split_signs(fam, signs)
    lhs = 0.0
    for group, gsigns in zip(fam.groups, per_group):
        obs = group.observables()
        if isinstance(provider, QuantumProvider):
            lhs += provider.group_square_expectation(obs, gsigns)
        else:
            for (i, oi), (j, oj) in itertools.product(enumerate(obs), repeat=2):
                lhs += gsigns[i] * gsigns[j] * provider.correlation(oi, oj)
    return float(lhs)


def search_signs(fam: ObservableFamily, provider, cap: int = SIGN_SEARCH_CAP) -> tuple:
    """Exhaustive minimum of the bound's left side over all sign vectors.

    Per-group correlation matrices are precomputed once, so each candidate
    costs one small quadratic form.  The first minimizer in the iteration
    order (+1 before -1 per slot) is returned.
    """
    if fam.total > cap:
        raise CapExceeded("sign search", fam.total, cap)
    corr = []
    for group in fam.groups:
        obs = group.observables()
        mat = np.zeros((group.size, group.size))
        for i, oi in enumerate(obs):
            for j, oj in enumerate(obs):
                # the quantum correlation is symmetrized, so the quadratic
                # form reproduces the operator-square value exactly
                mat[i, j] = provider.correlation(oi, oj)
        corr.append(mat)

    best_signs = None
    best_value = None
    for flat in itertools.product((1, -1), repeat=fam.total):
        value = 0.0
        pos = 0
        for group, mat in zip(fam.groups, corr):
            s = np.array(flat[pos : pos + group.size], dtype=float)
            value += float(s @ mat @ s)
            pos += group.size
        if best_value is None or value < best_value - 1e-15:
            best_value = value
            best_signs = flat
    return list(best_signs), float(best_value)
