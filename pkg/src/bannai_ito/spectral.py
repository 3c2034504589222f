"""Floating-point spectral layer: orthonormal gauge, chain subalgebras and
their joint eigenbases, and banded actions of non-chain Casimirs.
"""

from __future__ import annotations

import math
from dataclasses import dataclass
from fractions import Fraction
from typing import Sequence

import numpy as np

from .osp import weight_coeff
from .tensor import TensorSpace, _as_mask, subset_casimir, subset_elements, subset_mask

EIG_TOL = 1e-8
RESIDUAL_TOL = 1e-10
ORTHO_TOL = 1e-12
BAND_TOL = 1e-9


class SpectralError(Exception):
    pass


class GaugeError(SpectralError, ValueError):
    pass


class DegeneracyError(SpectralError):
    pass


class ShapeError(SpectralError):
    pass


def _check_gauge(space: TensorSpace) -> None:
    bad = [i + 1 for i, mu in enumerate(space.mus) if mu <= Fraction(-1, 2)]
    if bad:
        raise GaugeError(f"sites {bad} have mu <= -1/2; the orthonormal gauge is not real")


def _weight_sq(space: TensorSpace, multi: Sequence[int]) -> Fraction:
    w = Fraction(1)
    for mu, k in zip(space.mus, multi):
        for m in range(1, k + 1):
            w *= weight_coeff(m, mu)
    return w


def normalized_block(space: TensorSpace, A, E: int) -> np.ndarray:
    """Level-``E`` block of G_A in the orthonormal basis e_n / sqrt(c_1..c_n)."""
    _check_gauge(space)
    block = subset_casimir(space, _as_mask(A)).blocks[E]
    basis = space.level_basis(E)
    w = [_weight_sq(space, m) for m in basis]
    out = np.zeros(block.shape)
    for i, j, v in block.items():
        out[i, j] = float(v) * math.sqrt(w[i] / w[j])
    return out


@dataclass(frozen=True)
class ChainAlgebra:
    """Nested-chain Abelian subalgebra <G_{pi[2]}, .., G_{pi[n-1]}>."""

    perm: tuple[int, ...]

    def __post_init__(self):
        perm = tuple(int(p) for p in self.perm)
        if sorted(perm) != list(range(1, len(perm) + 1)):
            raise ValueError(f"{self.perm} is not a permutation of 1..{len(perm)}")
        object.__setattr__(self, "perm", perm)

    @property
    def n(self) -> int:
        return len(self.perm)

    def prefix(self, k: int) -> int:
        return subset_mask(self.perm[:k])

    @property
    def generators(self) -> tuple[int, ...]:
        return tuple(self.prefix(k) for k in range(2, self.n))

    @property
    def label_subsets(self) -> tuple[int, ...]:
        """Chain generators followed by the total Casimir G_[n]."""
        return self.generators + (self.prefix(self.n),)

    def describe(self) -> list[list[int]]:
        return [list(subset_elements(m)) for m in self.generators]


@dataclass
class EigenBasis:
    """Orthonormal joint eigenvectors (columns of ``vectors``) at one level.

    ``labels[k, g]`` is the eigenvalue of ``chain.label_subsets[g]`` on
    vector ``k``.
    """

    chain: ChainAlgebra
    level: int
    labels: np.ndarray
    vectors: np.ndarray

    @property
    def size(self) -> int:
        return self.vectors.shape[1]

    @property
    def label_subsets(self) -> tuple[int, ...]:
        return self.chain.label_subsets

    def reordered(self, order: Sequence[int]) -> "EigenBasis":
        order = list(order)
        return EigenBasis(self.chain, self.level, self.labels[order], self.vectors[:, order])


def sign_convention(vectors: np.ndarray, tol: float = 1e-9) -> np.ndarray:
    """Make the largest-magnitude coordinate of each column positive.

    Near-ties (within ``tol`` of the maximum) go to the lowest index.
    """
    out = np.array(vectors, dtype=float, copy=True)
    for k in range(out.shape[1]):
        col = out[:, k]
        mags = np.abs(col)
        idx = int(np.flatnonzero(mags >= mags.max() - tol)[0])
        if col[idx] < 0:
            out[:, k] = -col
    return out


def _clusters(values: np.ndarray, tol: float) -> list[list[int]]:
    groups: list[list[int]] = []
    for i in np.argsort(values, kind="stable"):
        if groups and values[i] - values[groups[-1][-1]] <= tol:
            groups[-1].append(int(i))
        else:
            groups.append([int(i)])
    return groups


def bi_sort_key(labels: Sequence[float], decimals: int = 7) -> tuple:
    # |eigenvalue| ascending, sign as tie-break
    return tuple(x for v in labels for x in (round(abs(v), decimals), round(v, decimals)))


def joint_eigenbasis(space: TensorSpace, chain: ChainAlgebra, E: int,
                     tol: float = EIG_TOL) -> EigenBasis:
    """Diagonalize the chain generators one after another inside clusters."""
    if chain.n != space.n:
        raise ValueError(f"chain on {chain.n} sites, space has {space.n}")
    _check_gauge(space)
    dim = space.level_dimension(E)
    blocks = [normalized_block(space, A, E) for A in chain.label_subsets]
    blocks = [(b + b.T) / 2 for b in blocks]
    groups = [np.eye(dim)]
    for M in blocks:
        cutoff = tol * max(1.0, np.linalg.norm(M, 2))
        refined = []
        for Q in groups:
            w, U = np.linalg.eigh(Q.T @ M @ Q)
            for cl in _clusters(w, cutoff):
                refined.append(Q @ U[:, cl])
        groups = refined
    bad = [g.shape[1] for g in groups if g.shape[1] > 1]
    if bad:
        raise DegeneracyError(
            f"level {E}, chain {chain.describe()}: {len(bad)} unresolved clusters "
            f"(sizes {bad}) after all chain generators")
    V = sign_convention(np.hstack(groups))
    labels = np.array([[V[:, k] @ M @ V[:, k] for M in blocks] for k in range(dim)])
    labels = labels.reshape(dim, len(blocks))
    order = sorted(range(dim), key=lambda k: bi_sort_key(labels[k]))
    return EigenBasis(chain, E, labels[order], V[:, order])


def eigen_residual(space: TensorSpace, basis: EigenBasis) -> float:
    """Largest ||G v - label v|| over vectors and label generators."""
    worst = 0.0
    for g, A in enumerate(basis.label_subsets):
        M = normalized_block(space, A, basis.level)
        R = M @ basis.vectors - basis.vectors * basis.labels[:, g]
        worst = max(worst, float(np.max(np.linalg.norm(R, axis=0), initial=0.0)))
    return worst


def group_by_labels(basis: EigenBasis, keep: Sequence[int], tol: float = 1e-7) -> list[tuple[tuple, list[int]]]:
    """Partition vectors by the label entries ``keep``.

    Returns ``(labels, indices)`` pairs; inside a group the basis order is
    preserved.  Groups come out in order of first appearance.
    """
    groups: list[tuple[np.ndarray, list[int]]] = []
    for k in range(basis.size):
        key = basis.labels[k, list(keep)]
        for ref, members in groups:
            if np.all(np.abs(ref - key) <= tol):
                members.append(k)
                break
        else:
            groups.append((key, [k]))
    return [(tuple(float(x) for x in ref), members) for ref, members in groups]


def ordered_for(basis: EigenBasis, sort_key: int) -> tuple[EigenBasis, list[tuple[int, int]]]:
    """Order vectors by the other labels, then by BI index of ``sort_key``.

    Returns the reordered basis and the ``[start, stop)`` bounds of the groups
    sharing all labels except ``sort_key``.
    """
    others = [g for g in range(basis.labels.shape[1]) if g != sort_key]
    groups = group_by_labels(basis, others)
    groups.sort(key=lambda item: bi_sort_key(item[0]))
    order, bounds = [], []
    for _, members in groups:
        members = sorted(members, key=lambda k: bi_sort_key([basis.labels[k, sort_key]]))
        bounds.append((len(order), len(order) + len(members)))
        order.extend(members)
    return basis.reordered(order), bounds


@dataclass
class TridiagonalAction:
    """Bands of an operator in an ordered eigenbasis.

    With ``G phi_s = a[s,s-1] phi_{s-1} + a[s,s] phi_s + a[s,s+1] phi_{s+1}``,
    ``diagonal[s] = a[s,s]``, ``upper[s] = a[s,s+1]``, ``lower[s] = a[s+1,s]``.
    """

    op: int
    diagonal: np.ndarray
    upper: np.ndarray
    lower: np.ndarray
    residual: float
    norm: float
    bounds: list[tuple[int, int]]
    basis: EigenBasis

    @property
    def relative_residual(self) -> float:
        return self.residual / max(self.norm, 1e-300)

    def matrix(self) -> np.ndarray:
        """a[s, t] as a dense array."""
        n = len(self.diagonal)
        a = np.diag(self.diagonal)
        if n > 1:
            a += np.diag(self.upper, 1) + np.diag(self.lower, -1)
        return a

    def block(self, g: int) -> np.ndarray:
        lo, hi = self.bounds[g]
        return self.matrix()[lo:hi, lo:hi]


def tridiagonal_action(space: TensorSpace, op, basis: EigenBasis, sort_key: int,
                       tol: float = BAND_TOL) -> TridiagonalAction:
    """Matrix of G_op in ``basis`` split into three bands.

    Entries outside the bands, or coupling different label groups, count
    toward the residual; above ``tol`` relative to the block norm this is a
    :class:`ShapeError`.
    """
    op = _as_mask(op)
    ordered, bounds = ordered_for(basis, sort_key)
    N = normalized_block(space, op, basis.level)
    V = ordered.vectors
    # a[s, t] = <phi_t, G phi_s>
    a = (V.T @ N @ V).T
    mask = np.zeros(a.shape, dtype=bool)
    for lo, hi in bounds:
        for s in range(lo, hi):
            mask[s, max(lo, s - 1):min(hi, s + 2)] = True
    residual = float(np.max(np.abs(a[~mask]), initial=0.0))
    norm = float(np.linalg.norm(N, 2)) or 1.0
    act = TridiagonalAction(op, np.diag(a).copy(), np.diag(a, 1).copy(), np.diag(a, -1).copy(),
                            residual, norm, bounds, ordered)
    if residual > tol * norm:
        raise ShapeError(f"G{list(subset_elements(op))} is not tridiagonal in this basis: "
                         f"off-band residual {residual:.3e}")
    return act
