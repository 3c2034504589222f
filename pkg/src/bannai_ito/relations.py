"""Exact checks of the Bannai-Ito anticommutation relations.

For subsets A, B of [n]:

    {G_A, G_B} = G_{A^B} + 2 G_{A&B} G_{A|B} + 2 G_{A-B} G_{B-A}

with G_{} = -1/2.  A nonzero residual is reported, never raised.
"""

from __future__ import annotations

import time
from dataclasses import dataclass, field
from fractions import Fraction
from typing import Callable, Mapping

from .linalg import format_rational
from .tensor import (
    LeveledOperator,
    TensorSpace,
    _as_mask,
    all_subsets,
    op_algebra,
    subset_casimir,
    subset_elements,
)

CasimirSource = Callable[[int], LeveledOperator]


def _source(space: TensorSpace, overrides: Mapping[int, LeveledOperator] | None) -> CasimirSource:
    overrides = dict(overrides or {})

    def gamma(mask: int) -> LeveledOperator:
        op = overrides.get(mask)
        return op if op is not None else subset_casimir(space, mask)

    return gamma


def commutes_trivially(A, B) -> bool:
    """True when A and B are nested or disjoint (the empty set is nested in all)."""
    A, B = _as_mask(A), _as_mask(B)
    return (A & B) in (A, B) or not (A & B)


def bi_residual(space: TensorSpace, A, B,
                overrides: Mapping[int, LeveledOperator] | None = None) -> LeveledOperator:
    A, B = _as_mask(A), _as_mask(B)
    G = _source(space, overrides)
    lhs = op_algebra("anticommutator", [G(A), G(B)])
    rhs = op_algebra("linear-combination",
                     [G(A ^ B), G(A & B) @ G(A | B), G(A & ~B) @ G(B & ~A)],
                     [1, 2, 2])
    return lhs - rhs


@dataclass
class PairResult:
    A: int
    B: int
    kind: str = "relation"
    failure: tuple[int, int, int, Fraction] | None = None

    @property
    def passed(self) -> bool:
        return self.failure is None

    def status(self):
        if self.failure is None:
            return "zero"
        E, i, j, v = self.failure
        return {"level": E, "entry": [i, j, format_rational(v)]}

    def to_json_obj(self) -> dict:
        out = {"A": list(subset_elements(self.A)), "B": list(subset_elements(self.B)),
               "status": self.status()}
        if self.kind != "relation":
            out["check"] = self.kind
        return out


@dataclass
class RelationReport:
    n: int
    pairs: list[PairResult] = field(default_factory=list)
    central: list[PairResult] = field(default_factory=list)
    elapsed_ms: float = 0.0

    @property
    def passed(self) -> bool:
        return not self.failures

    @property
    def failures(self) -> list[PairResult]:
        return [p for p in self.pairs + self.central if not p.passed]

    def first_failure(self) -> PairResult | None:
        bad = self.failures
        return bad[0] if bad else None

    def to_json_obj(self, include_timing: bool = True) -> dict:
        out = {"n": self.n, "passed": self.passed,
               "pairs": [p.to_json_obj() for p in self.pairs]}
        if self.central:
            out["central"] = [p.to_json_obj() for p in self.central]
        if include_timing:
            out["elapsed_ms"] = round(self.elapsed_ms, 3)
        return out


def b3_embedding_check(space: TensorSpace, K, L, M,
                       overrides: Mapping[int, LeveledOperator] | None = None) -> RelationReport:
    """Check the three rank-one relations generated by disjoint K, L, M.

    {G_KL, G_LM} = G_KM + 2 G_L G_KLM + 2 G_K G_M and its two rotations.
    """
    K, L, M = _as_mask(K), _as_mask(L), _as_mask(M)
    if K & L or K & M or L & M:
        raise ValueError("K, L, M must be pairwise disjoint")
    if not K | L | M:
        raise ValueError("K, L, M are all empty")
    G = _source(space, overrides)
    t0 = time.perf_counter()
    report = RelationReport(space.n)
    full = K | L | M
    for X, Y, Z in ((K, L, M), (L, M, K), (M, K, L)):
        # {G_{X|Y}, G_{Y|Z}} = G_{X|Z} + 2 G_Y G_XYZ + 2 G_X G_Z
        lhs = op_algebra("anticommutator", [G(X | Y), G(Y | Z)])
        rhs = op_algebra("linear-combination",
                         [G(X | Z), G(Y) @ G(full), G(X) @ G(Z)], [1, 2, 2])
        res = lhs - rhs
        report.pairs.append(PairResult(X | Y, Y | Z, "embedding", res.first_nonzero()))
    report.elapsed_ms = (time.perf_counter() - t0) * 1e3
    return report


def _relation_rows(space: TensorSpace, rows: list[int], overrides=None) -> list[PairResult]:
    subsets = all_subsets(space.n)
    return [PairResult(A, B, "relation", bi_residual(space, A, B, overrides).first_nonzero())
            for A in rows for B in subsets]


def _relation_rows_worker(space_obj: dict, rows: list[int]) -> list[PairResult]:
    return _relation_rows(TensorSpace.from_json_obj(space_obj), rows)


def verify_all(space: TensorSpace, overrides: Mapping[int, LeveledOperator] | None = None,
               workers: int = 1) -> RelationReport:
    """All ordered pairs of nonempty subsets, then centrality of G_{i} and G_[n].

    ``workers > 1`` spreads the pair rows over processes; results keep the
    serial order.  Overrides force a serial run.
    """
    t0 = time.perf_counter()
    subsets = all_subsets(space.n)
    report = RelationReport(space.n)
    if workers > 1 and not overrides and len(subsets) > 1:
        from concurrent.futures import ProcessPoolExecutor

        chunks = [subsets[i::workers] for i in range(workers)]
        with ProcessPoolExecutor(max_workers=workers) as pool:
            parts = list(pool.map(_relation_rows_worker, [space.to_json_obj()] * len(chunks), chunks))
        by_row = {}
        for part in parts:
            for res in part:
                by_row.setdefault(res.A, []).append(res)
        for A in subsets:
            report.pairs.extend(by_row.get(A, []))
    else:
        report.pairs.extend(_relation_rows(space, subsets, overrides))
    G = _source(space, overrides)
    central = [1 << i for i in range(space.n)]
    if space.full_mask not in central:
        central.append(space.full_mask)
    for C in central:
        for A in subsets:
            com = op_algebra("commutator", [G(C), G(A)])
            report.central.append(PairResult(C, A, "central", com.first_nonzero()))
    report.elapsed_ms = (time.perf_counter() - t0) * 1e3
    return report


def omega(space: TensorSpace, i: int, j: int, k: int) -> LeveledOperator:
    """Realized central term 2 G_j G_ijk + 2 G_i G_k of the rank-one algebra."""
    gi, gj, gk = (subset_casimir(space, 1 << (s - 1)) for s in (i, j, k))
    gijk = subset_casimir(space, (1 << (i - 1)) | (1 << (j - 1)) | (1 << (k - 1)))
    return op_algebra("linear-combination", [gj @ gijk, gi @ gk], [2, 2])
