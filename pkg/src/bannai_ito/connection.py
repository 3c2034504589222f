"""Connection coefficients between chain eigenbases.

Overlaps are stored source-by-target: ``matrix[s, k] = <phi_s, psi_k>``, so
``psi_k = sum_s matrix[s, k] phi_s`` and composing along a path is plain
matrix multiplication.
"""

from __future__ import annotations

from dataclasses import dataclass, field
from typing import Sequence

import numpy as np

from .spectral import (
    ChainAlgebra,
    EigenBasis,
    SpectralError,
    TridiagonalAction,
    joint_eigenbasis,
    normalized_block,
)
from .tensor import TensorSpace, subset_elements

CC_TOL = 1e-9
LABEL_TOL = 1e-7
RECURRENCE_TOL = 1e-8


class PairingError(SpectralError):
    pass


class NumericalError(SpectralError):
    pass


@dataclass(frozen=True)
class SwapStep:
    """Exchange of the entries at ``position`` and ``position + 1`` (1-based).

    Only ``2 <= position <= n-1`` changes the chain (G_{C+a} -> G_{C+b});
    a swap at position 1 reorders two singletons and leaves it intact.
    """

    position: int
    before: tuple[int, ...]
    after: tuple[int, ...]

    @property
    def n(self) -> int:
        return len(self.before)

    @property
    def changes_chain(self) -> bool:
        return 2 <= self.position <= self.n - 1

    @property
    def source(self) -> ChainAlgebra:
        return ChainAlgebra(self.before)

    @property
    def target(self) -> ChainAlgebra:
        return ChainAlgebra(self.after)

    @property
    def swapped(self) -> tuple[int, int]:
        """Masks of the outgoing and incoming generator."""
        return self.source.prefix(self.position), self.target.prefix(self.position)


def _inverse(perm: Sequence[int]) -> dict[int, int]:
    return {p: i for i, p in enumerate(perm)}


def adjacent_path(pi: Sequence[int], sigma: Sequence[int], strategy: str = "left") -> list[SwapStep]:
    """Bubble-sort ``pi`` into ``sigma`` with adjacent transpositions.

    ``"left"`` fixes positions 1, 2, .. in turn; ``"right"`` fixes n, n-1, ..
    Both give a path of length equal to the inversion count.
    """
    pi, sigma = tuple(pi), tuple(sigma)
    ChainAlgebra(pi), ChainAlgebra(sigma)
    if len(pi) != len(sigma):
        raise ValueError("permutations of different size")
    cur = list(pi)
    steps: list[SwapStep] = []

    def swap(j):
        before = tuple(cur)
        cur[j], cur[j + 1] = cur[j + 1], cur[j]
        steps.append(SwapStep(j + 1, before, tuple(cur)))

    n = len(cur)
    if strategy == "left":
        for i in range(n):
            j = cur.index(sigma[i])
            while j > i:
                swap(j - 1)
                j -= 1
    elif strategy == "right":
        for i in reversed(range(n)):
            j = cur.index(sigma[i])
            while j < i:
                swap(j)
                j += 1
    else:
        raise ValueError(f"unknown strategy {strategy!r}")
    return steps


def inversion_count(pi: Sequence[int], sigma: Sequence[int]) -> int:
    pos = _inverse(sigma)
    seq = [pos[p] for p in pi]
    return sum(1 for i in range(len(seq)) for j in range(i + 1, len(seq)) if seq[i] > seq[j])


@dataclass
class CCBlock:
    common_labels: tuple[float, ...]
    source_index: list[int]
    target_index: list[int]
    matrix: np.ndarray


@dataclass
class ConnectionMatrix:
    source: ChainAlgebra
    target: ChainAlgebra
    level: int
    blocks: list[CCBlock]
    assembled: np.ndarray
    source_basis: EigenBasis | None = field(default=None, repr=False)
    target_basis: EigenBasis | None = field(default=None, repr=False)

    def orthogonality_residual(self) -> float:
        worst = 0.0
        for b in self.blocks:
            m = b.matrix
            worst = max(worst, float(np.max(np.abs(m.T @ m - np.eye(m.shape[1])), initial=0.0)))
        return worst

    def offblock_residual(self) -> float:
        mask = np.ones(self.assembled.shape, dtype=bool)
        for b in self.blocks:
            mask[np.ix_(b.source_index, b.target_index)] = False
        return float(np.max(np.abs(self.assembled[mask]), initial=0.0))


def _common_label_positions(a: ChainAlgebra, b: ChainAlgebra) -> tuple[list[int], list[int]]:
    la, lb = a.label_subsets, b.label_subsets
    shared = [m for m in la if m in lb]
    return [la.index(m) for m in shared], [lb.index(m) for m in shared]


def _groups(basis: EigenBasis, positions: list[int]) -> list[tuple[np.ndarray, list[int]]]:
    groups: list[tuple[np.ndarray, list[int]]] = []
    for k in range(basis.size):
        key = basis.labels[k, positions]
        for ref, members in groups:
            if np.all(np.abs(ref - key) <= LABEL_TOL):
                members.append(k)
                break
        else:
            groups.append((key, [k]))
    return groups


def _blocks_from(assembled: np.ndarray, basisA: EigenBasis, basisB: EigenBasis,
                 source: ChainAlgebra, target: ChainAlgebra) -> list[CCBlock]:
    pa, pb = _common_label_positions(source, target)
    ga, gb = _groups(basisA, pa), _groups(basisB, pb)
    blocks = []
    unmatched = list(range(len(gb)))
    for key, rows in ga:
        hit = next((g for g in unmatched if np.all(np.abs(gb[g][0] - key) <= LABEL_TOL)), None)
        if hit is None:
            raise PairingError(f"common labels {np.round(key, 8).tolist()} have no partner in the target basis")
        unmatched.remove(hit)
        cols = gb[hit][1]
        if len(cols) != len(rows):
            raise PairingError(f"common labels {np.round(key, 8).tolist()}: "
                               f"{len(rows)} source vs {len(cols)} target vectors")
        blocks.append(CCBlock(tuple(float(x) for x in key), rows, cols,
                              assembled[np.ix_(rows, cols)]))
    if unmatched:
        raise PairingError(f"{len(unmatched)} target label groups have no partner in the source basis")
    return blocks


def _validate(cc: ConnectionMatrix, tol: float) -> ConnectionMatrix:
    ortho = cc.orthogonality_residual()
    if ortho > tol:
        raise NumericalError(f"connection block not orthogonal: residual {ortho:.3e}")
    leak = cc.offblock_residual()
    if leak > tol:
        raise NumericalError(f"overlap between different label blocks: {leak:.3e}")
    return cc


def block_overlap(basisA: EigenBasis, basisB: EigenBasis, step: SwapStep | None = None,
                  tol: float = CC_TOL) -> ConnectionMatrix:
    """Overlaps of two eigenbases, grouped by the labels both chains share.

    For a single swap step the shared labels are every chain generator except
    the swapped one, plus G_[n]; each block is then a rank-one Racah matrix.
    """
    if basisA.level != basisB.level or basisA.vectors.shape != basisB.vectors.shape:
        raise ValueError("bases live on different levels")
    if step is not None and (step.source != basisA.chain or step.target != basisB.chain):
        raise ValueError("bases do not match the chains of the step")
    assembled = basisA.vectors.T @ basisB.vectors
    blocks = _blocks_from(assembled, basisA, basisB, basisA.chain, basisB.chain)
    cc = ConnectionMatrix(basisA.chain, basisB.chain, basisA.level, blocks, assembled,
                          basisA, basisB)
    return _validate(cc, tol)


class BasisCache:
    """Per-space memo of joint eigenbases keyed by (chain, level)."""

    def __init__(self, space: TensorSpace):
        self.space = space
        self._store: dict[tuple[tuple[int, ...], int], EigenBasis] = {}

    def get(self, chain: ChainAlgebra | Sequence[int], E: int) -> EigenBasis:
        chain = chain if isinstance(chain, ChainAlgebra) else ChainAlgebra(chain)
        key = (chain.perm, E)
        if key not in self._store:
            self._store[key] = joint_eigenbasis(self.space, chain, E)
        return self._store[key]


def compose_path(space: TensorSpace, path: Sequence[SwapStep], E: int,
                 start: Sequence[int] | None = None, cache: BasisCache | None = None,
                 tol: float = CC_TOL) -> ConnectionMatrix:
    """Multiply the single-step connection matrices along ``path``."""
    cache = cache or BasisCache(space)
    if not path:
        perm = tuple(start) if start is not None else tuple(range(1, space.n + 1))
        basis = cache.get(perm, E)
        return block_overlap(basis, basis, tol=tol)
    if start is not None and tuple(start) != path[0].before:
        raise ValueError("path does not start at the given permutation")
    total = None
    for prev, step in zip((None,) + tuple(path[:-1]), path):
        if prev is not None and prev.after != step.before:
            raise ValueError("path steps do not chain together")
        cc = block_overlap(cache.get(step.before, E), cache.get(step.after, E), step, tol)
        total = cc.assembled if total is None else total @ cc.assembled
    first, last = cache.get(path[0].before, E), cache.get(path[-1].after, E)
    blocks = _blocks_from(total, first, last, first.chain, last.chain)
    cc = ConnectionMatrix(first.chain, last.chain, E, blocks, total, first, last)
    return _validate(cc, tol)


def direct_overlap(space: TensorSpace, pi: Sequence[int], sigma: Sequence[int], E: int,
                   cache: BasisCache | None = None, tol: float = CC_TOL) -> ConnectionMatrix:
    cache = cache or BasisCache(space)
    return block_overlap(cache.get(pi, E), cache.get(sigma, E), tol=tol)


@dataclass
class RecurrenceReport:
    max_residual: float
    norm: float
    per_block: list[float]

    @property
    def relative(self) -> float:
        return self.max_residual / max(1.0, self.norm)

    def passed(self, tol: float = RECURRENCE_TOL) -> bool:
        return self.relative < tol


def check_three_term(cc: ConnectionMatrix, tri: TridiagonalAction,
                     target_labels: Sequence[float]) -> RecurrenceReport:
    """Residual of lambda_k B_ks = a_{s,s-1} B_{k,s-1} + a_{s,s} B_ks + a_{s,s+1} B_{k,s+1}.

    ``tri`` must be the action of the incoming generator in the source
    basis; ``target_labels[k]`` is its eigenvalue on target vector ``k``.
    Terms falling outside a block are dropped.
    """
    target_labels = np.asarray(target_labels, dtype=float)
    src = cc.source_basis
    if src is None:
        raise ValueError("connection matrix carries no source basis")
    # positions of source vectors inside the tridiagonal ordering
    where = {}
    for k in range(src.size):
        hits = np.flatnonzero(np.all(np.abs(tri.basis.vectors - src.vectors[:, [k]]) < 1e-12, axis=0))
        if len(hits) != 1:
            raise ValueError("tridiagonal action was computed in a different basis")
        where[k] = int(hits[0])
    a = tri.matrix()
    per_block = []
    for b in cc.blocks:
        pos = [where[s] for s in b.source_index]
        if pos != list(range(pos[0], pos[0] + len(pos))) or (pos[0], pos[-1] + 1) not in tri.bounds:
            raise ValueError(f"block {b.common_labels} does not match a tridiagonal group")
        ab = a[pos[0]:pos[-1] + 1, pos[0]:pos[-1] + 1]
        B = b.matrix.T  # B[k, s]
        lam = target_labels[b.target_index]
        size = len(pos)
        R = lam[:, None] * B
        for s in range(size):
            for t in (s - 1, s, s + 1):
                if 0 <= t < size:
                    R[:, s] -= ab[s, t] * B[:, t]
        per_block.append(float(np.max(np.abs(R), initial=0.0)))
    return RecurrenceReport(max(per_block, default=0.0), tri.norm, per_block)


def act_in_basis(cc: ConnectionMatrix, target_generator_labels: Sequence[float]) -> np.ndarray:
    """Matrix of a generator in the source basis, given its target eigenvalues."""
    lam = np.asarray(target_generator_labels, dtype=float)
    O = cc.assembled
    return (O * lam) @ O.T


def direct_action(space: TensorSpace, A, basis: EigenBasis) -> np.ndarray:
    N = normalized_block(space, A, basis.level)
    return basis.vectors.T @ N @ basis.vectors


def label_column(basis: EigenBasis, A: int) -> np.ndarray:
    """Eigenvalues of G_A on ``basis``; A must be one of its label subsets."""
    return basis.labels[:, list(basis.label_subsets).index(A)]


def chain_containing(n: int, A: int) -> tuple[int, ...]:
    """A permutation whose chain has G_A as a generator (or G_[n] if A = [n])."""
    els = list(subset_elements(A))
    rest = [i for i in range(1, n + 1) if i not in els]
    return tuple(els + rest)
