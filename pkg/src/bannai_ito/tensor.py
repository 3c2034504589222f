"""n-fold tensor products, subset realizations J^A and subset Casimirs.

Subsets of ``[n] = {1..n}`` are plain ``int`` bitmasks: site ``i`` is bit
``i - 1``.  The basis of the truncated tensor space is the set of
multi-indices ``(n_1, .., n_n)`` with ``n_i <= truncation_i`` in
lexicographic order, which is also the Kronecker-product order.
"""

from __future__ import annotations

import itertools
import json
import threading
from dataclasses import dataclass, field
from fractions import Fraction
from functools import cached_property
from math import comb
from typing import Iterable, Mapping, Sequence

from .linalg import SparseRatMatrix, bracket, kron, parse_rational, format_rational
from .osp import HALF, GeneratorSet, ModuleSpec, build_site

MAX_SITES = 16

# subset helpers


def subset_mask(elements: Iterable[int]) -> int:
    mask = 0
    for i in elements:
        if not 1 <= i <= MAX_SITES:
            raise ValueError(f"site {i} out of range 1..{MAX_SITES}")
        mask |= 1 << (i - 1)
    return mask


def subset_elements(mask: int) -> tuple[int, ...]:
    """Sites of ``mask`` in increasing order."""
    out = []
    i = 1
    while mask:
        if mask & 1:
            out.append(i)
        mask >>= 1
        i += 1
    return tuple(out)


def subset_name(mask: int) -> str:
    els = subset_elements(mask)
    return "{" + ",".join(map(str, els)) + "}" if els else "{}"


def all_subsets(n: int, include_empty: bool = False) -> list[int]:
    """Nonempty subsets of [n] ordered by size, then lexicographically."""
    out = [subset_mask(c) for k in range(0 if include_empty else 1, n + 1)
           for c in itertools.combinations(range(1, n + 1), k)]
    return out


def _as_mask(A) -> int:
    if isinstance(A, int):
        return A
    return subset_mask(A)


class TensorSpace:
    """The truncated space ``V_1 x .. x V_n`` with its level grading.

    Only levels ``0..max_level`` are retained for leveled operators; on
    these every Casimir block is exact.  ``max_level`` may not exceed the
    smallest truncation when ``n >= 2``.
    """

    def __init__(self, specs: Sequence[ModuleSpec], max_level: int | None = None):
        self.specs = tuple(specs)
        if not 1 <= len(self.specs) <= MAX_SITES:
            raise ValueError(f"need 1..{MAX_SITES} sites, got {len(self.specs)}")
        bound = min(s.truncation for s in self.specs)
        if len(self.specs) == 1:
            bound = self.specs[0].truncation
        if max_level is None:
            max_level = bound
        if not 0 <= max_level <= bound:
            raise ValueError(f"max_level must lie in 0..{bound}, got {max_level}")
        self.max_level = int(max_level)
        self._sites = [build_site(s) for s in self.specs]
        self._lock = threading.Lock()
        self._gens: dict[int, GeneratorSet] = {}
        self._full_casimir: dict[int, SparseRatMatrix] = {}
        self._casimir: dict[int, LeveledOperator] = {}

    @classmethod
    def uniform(cls, mus: Sequence, max_level: int, truncation: int | None = None) -> "TensorSpace":
        t = max_level if truncation is None else truncation
        return cls([ModuleSpec(parse_rational(m), max(t, 1)) for m in mus], max_level)

    @property
    def n(self) -> int:
        return len(self.specs)

    @property
    def mus(self) -> tuple[Fraction, ...]:
        return tuple(s.mu for s in self.specs)

    @property
    def full_mask(self) -> int:
        return (1 << self.n) - 1

    @property
    def dim(self) -> int:
        d = 1
        for s in self.specs:
            d *= s.truncation + 1
        return d

    @cached_property
    def multi_indices(self) -> tuple[tuple[int, ...], ...]:
        return tuple(itertools.product(*(range(s.truncation + 1) for s in self.specs)))

    @cached_property
    def levels(self) -> tuple[int, ...]:
        return tuple(sum(m) for m in self.multi_indices)

    @cached_property
    def level_indices(self) -> dict[int, list[int]]:
        """Full-space positions of each retained level, in lexicographic order."""
        out: dict[int, list[int]] = {E: [] for E in range(self.max_level + 1)}
        for pos, E in enumerate(self.levels):
            if E <= self.max_level:
                out[E].append(pos)
        return out

    def level_basis(self, E: int) -> list[tuple[int, ...]]:
        return [self.multi_indices[p] for p in self.level_indices[E]]

    def level_dimension(self, E: int) -> int:
        if not 0 <= E <= self.max_level:
            raise ValueError(f"level {E} not retained (max_level={self.max_level})")
        return len(self.level_indices[E])

    # serialization

    def to_json_obj(self) -> dict:
        return {"n": self.n, "sites": [s.to_json_obj() for s in self.specs],
                "max_level": self.max_level}

    @classmethod
    def from_json_obj(cls, obj: Mapping) -> "TensorSpace":
        sites = [ModuleSpec.from_json_obj(s) for s in obj["sites"]]
        if "n" in obj and int(obj["n"]) != len(sites):
            raise ValueError(f"n={obj['n']} but {len(sites)} sites given")
        return cls(sites, obj.get("max_level"))

    @classmethod
    def from_json(cls, text: str) -> "TensorSpace":
        return cls.from_json_obj(json.loads(text))

    def same_as(self, other: "TensorSpace") -> bool:
        return self is other or (self.specs == other.specs and self.max_level == other.max_level)

    def __repr__(self) -> str:
        mus = ",".join(map(format_rational, self.mus))
        return f"TensorSpace(n={self.n}, mu=({mus}), max_level={self.max_level})"

    # site embedding

    def _site_op(self, site: int, which: str, pstring_to: int = 0) -> SparseRatMatrix:
        """``which`` at ``site`` with P on sites site+1..pstring_to, identity elsewhere."""
        out = None
        for i, g in enumerate(self._sites, start=1):
            if i == site:
                m = getattr(g, which)
            elif site < i <= pstring_to:
                m = g.parity
            else:
                m = SparseRatMatrix.identity(g.dim)
            out = m if out is None else kron(out, m)
        return out


def level_dimension(space: TensorSpace, E: int) -> int:
    return space.level_dimension(E)


def subset_generators(space: TensorSpace, A) -> GeneratorSet:
    """Realization of osp(1,2) on the sites of ``A``.

    ``J+-^A = sum_a J+-^(a) prod_{a<j<=max A} P^(j)``; the parity string runs
    over every site up to ``max A``, including sites outside ``A``.
    """
    A = _as_mask(A)
    if A == 0:
        raise ValueError("empty subset has no generators; use gamma_empty")
    if A >> space.n:
        raise ValueError(f"subset {subset_name(A)} not inside [{space.n}]")
    with space._lock:
        cached = space._gens.get(A)
    if cached is not None:
        return cached
    els = subset_elements(A)
    last = els[-1]
    jp = jm = j0 = None
    for a in els:
        terms = (space._site_op(a, "jplus", last), space._site_op(a, "jminus", last),
                 space._site_op(a, "j0"))
        if jp is None:
            jp, jm, j0 = terms
        else:
            jp, jm, j0 = jp + terms[0], jm + terms[1], j0 + terms[2]
    parity = None
    for i, g in enumerate(space._sites, start=1):
        m = g.parity if i in els else SparseRatMatrix.identity(g.dim)
        parity = m if parity is None else kron(parity, m)
    gens = GeneratorSet(jp, jm, j0, parity, space.levels, space.max_level)
    with space._lock:
        return space._gens.setdefault(A, gens)


def full_casimir(space: TensorSpace, A) -> SparseRatMatrix:
    """Gamma_A on the whole truncated space (not only retained levels)."""
    A = _as_mask(A)
    with space._lock:
        cached = space._full_casimir.get(A)
    if cached is not None:
        return cached
    if A == 0:
        m = SparseRatMatrix.identity(space.dim, -HALF)
    else:
        g = subset_generators(space, A)
        P = g.parity
        m = g.j0 @ P - g.jplus @ (g.jminus @ P) - P * HALF
    with space._lock:
        return space._full_casimir.setdefault(A, m)


@dataclass(frozen=True)
class LeveledOperator:
    """Operator stored as its diagonal level blocks ``0..space.max_level``."""

    space: TensorSpace = field(repr=False, compare=False)
    blocks: dict[int, SparseRatMatrix]
    label: str = ""

    def _check(self, other: "LeveledOperator") -> None:
        if not self.space.same_as(other.space):
            raise ValueError("operators live on different tensor spaces")

    def __add__(self, other: "LeveledOperator") -> "LeveledOperator":
        self._check(other)
        return LeveledOperator(self.space, {E: b + other.blocks[E] for E, b in self.blocks.items()})

    def __sub__(self, other: "LeveledOperator") -> "LeveledOperator":
        self._check(other)
        return LeveledOperator(self.space, {E: b - other.blocks[E] for E, b in self.blocks.items()})

    def __matmul__(self, other: "LeveledOperator") -> "LeveledOperator":
        self._check(other)
        return LeveledOperator(self.space, {E: b @ other.blocks[E] for E, b in self.blocks.items()})

    def scale(self, c) -> "LeveledOperator":
        return LeveledOperator(self.space, {E: b.scale(c) for E, b in self.blocks.items()})

    def __mul__(self, c) -> "LeveledOperator":
        return self.scale(c)

    __rmul__ = __mul__

    def is_zero(self) -> bool:
        return all(b.is_zero() for b in self.blocks.values())

    def first_nonzero(self) -> tuple[int, int, int, Fraction] | None:
        """(level, row, col, value) of the first nonzero entry, scanning levels upward."""
        for E in sorted(self.blocks):
            for i, j, v in self.blocks[E].items():
                return E, i, j, v
        return None

    def equals(self, other: "LeveledOperator") -> bool:
        self._check(other)
        return all(b == other.blocks[E] for E, b in self.blocks.items())

    def with_block(self, E: int, block: SparseRatMatrix) -> "LeveledOperator":
        blocks = dict(self.blocks)
        blocks[E] = block
        return LeveledOperator(self.space, blocks, self.label)

    def to_json_obj(self) -> dict:
        return {str(E): self.blocks[E].to_json_obj() for E in sorted(self.blocks)}


def scalar_operator(space: TensorSpace, c, label: str = "") -> LeveledOperator:
    return LeveledOperator(space, {E: SparseRatMatrix.identity(space.level_dimension(E), c)
                                   for E in range(space.max_level + 1)}, label)


def subset_casimir(space: TensorSpace, A) -> LeveledOperator:
    A = _as_mask(A)
    with space._lock:
        cached = space._casimir.get(A)
    if cached is not None:
        return cached
    label = "Gamma" + subset_name(A)
    if A == 0:
        op = scalar_operator(space, -HALF, label)
    else:
        full = full_casimir(space, A)
        op = LeveledOperator(space, {E: full.submatrix(idx, idx)
                                     for E, idx in space.level_indices.items()}, label)
    with space._lock:
        return space._casimir.setdefault(A, op)


def gamma_empty(space: TensorSpace) -> LeveledOperator:
    return subset_casimir(space, 0)


def op_algebra(kind: str, operands: Sequence[LeveledOperator],
               coefficients: Sequence | None = None) -> LeveledOperator:
    """Blockwise commutator, anticommutator, product or linear combination."""
    if not operands:
        raise ValueError("no operands")
    space = operands[0].space
    for op in operands[1:]:
        if not space.same_as(op.space):
            raise ValueError("operators live on different tensor spaces")
    if kind in ("commutator", "anticommutator"):
        if len(operands) != 2:
            raise ValueError(f"{kind} takes two operands")
        a, b = operands
        return LeveledOperator(space, {E: bracket(kind, a.blocks[E], b.blocks[E]) for E in a.blocks})
    if kind == "product":
        out = operands[0]
        for op in operands[1:]:
            out = out @ op
        return out
    if kind == "linear-combination":
        if coefficients is None or len(coefficients) != len(operands):
            raise ValueError("linear-combination needs one coefficient per operand")
        out = None
        for c, op in zip(coefficients, operands):
            term = op.scale(parse_rational(c))
            out = term if out is None else out + term
        return out
    raise ValueError(f"unknown operation {kind!r}")
