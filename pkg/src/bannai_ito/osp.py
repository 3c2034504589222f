"""Truncated lowest-weight modules of osp(1,2) in the monomial basis.

Basis ``e_0 .. e_N`` with ``J+ e_n = e_{n+1}`` (``J+ e_N = 0``),
``J- e_n = c_n e_{n-1}``, ``J0 e_n = (n + mu + 1/2) e_n`` and
``P e_n = (-1)^n e_n``.  With this normalisation the Casimir is exactly
``mu`` times the identity.
"""

from __future__ import annotations

from dataclasses import dataclass, field
from fractions import Fraction
from typing import Mapping

from .linalg import SparseRatMatrix, bracket, kron, parse_rational, format_rational

HALF = Fraction(1, 2)


@dataclass(frozen=True)
class ModuleSpec:
    mu: Fraction
    truncation: int

    def __post_init__(self):
        object.__setattr__(self, "mu", parse_rational(self.mu))
        if int(self.truncation) < 1:
            raise ValueError(f"truncation must be >= 1, got {self.truncation}")
        object.__setattr__(self, "truncation", int(self.truncation))

    def to_json_obj(self) -> dict:
        return {"mu": format_rational(self.mu), "truncation": self.truncation}

    @classmethod
    def from_json_obj(cls, obj: Mapping) -> "ModuleSpec":
        return cls(parse_rational(obj["mu"]), int(obj["truncation"]))


@dataclass(frozen=True)
class GeneratorSet:
    """Matrices of J+, J-, J0 and the grade involution P on one space.

    ``levels[i]`` is the total degree of basis state ``i``; relations are
    only expected to hold on columns whose level is below ``safe_below``.
    """

    jplus: SparseRatMatrix
    jminus: SparseRatMatrix
    j0: SparseRatMatrix
    parity: SparseRatMatrix
    levels: tuple[int, ...]
    safe_below: int

    @property
    def dim(self) -> int:
        return self.j0.nrows

    def replace(self, **kw) -> "GeneratorSet":
        data = dict(jplus=self.jplus, jminus=self.jminus, j0=self.j0,
                    parity=self.parity, levels=self.levels, safe_below=self.safe_below)
        data.update(kw)
        return GeneratorSet(**data)


def weight_coeff(n: int, mu) -> Fraction:
    """Lowering coefficient c_n: n for even n, n + 2 mu for odd n."""
    if n < 0:
        raise ValueError("n must be non-negative")
    mu = parse_rational(mu)
    return Fraction(n) + (2 * mu if n % 2 else 0)


def build_site(spec: ModuleSpec) -> GeneratorSet:
    N = spec.truncation
    dim = N + 1
    jplus = SparseRatMatrix(dim, dim, {n + 1: {n: 1} for n in range(N)})
    jminus = SparseRatMatrix(dim, dim, {n - 1: {n: weight_coeff(n, spec.mu)} for n in range(1, dim)})
    j0 = SparseRatMatrix.diag(n + spec.mu + HALF for n in range(dim))
    parity = SparseRatMatrix.diag((-1) ** n for n in range(dim))
    return GeneratorSet(jplus, jminus, j0, parity, tuple(range(dim)), N)


RELATIONS = ("[J0,J+]=J+", "[J0,J-]=-J-", "{J+,J-}=2J0", "[J0,P]=0", "{J+,P}=0", "{J-,P}=0", "P^2=1")


@dataclass
class OspReport:
    """Outcome of :func:`verify_osp_relations`.

    ``max_bad_level[name]`` is the highest level of a nonzero residual column
    (``None`` when the residual vanishes identically).
    """

    max_bad_level: dict[str, int | None]
    safe_below: int
    violated: list[str] = field(default_factory=list)

    @property
    def passed(self) -> bool:
        return not self.violated


def _residuals(g: GeneratorSet) -> dict[str, SparseRatMatrix]:
    eye = SparseRatMatrix.identity(g.dim)
    return {
        "[J0,J+]=J+": bracket("commutator", g.j0, g.jplus) - g.jplus,
        "[J0,J-]=-J-": bracket("commutator", g.j0, g.jminus) + g.jminus,
        "{J+,J-}=2J0": bracket("anticommutator", g.jplus, g.jminus) - g.j0 * 2,
        "[J0,P]=0": bracket("commutator", g.j0, g.parity),
        "{J+,P}=0": bracket("anticommutator", g.jplus, g.parity),
        "{J-,P}=0": bracket("anticommutator", g.jminus, g.parity),
        "P^2=1": g.parity @ g.parity - eye,
    }


def verify_osp_relations(gens: GeneratorSet) -> OspReport:
    worst: dict[str, int | None] = {}
    violated = []
    for name, res in _residuals(gens).items():
        bad = [gens.levels[j] for _, j, _ in res.items()]
        worst[name] = max(bad) if bad else None
        if any(lvl < gens.safe_below for lvl in bad):
            violated.append(name)
    return OspReport(worst, gens.safe_below, violated)


def casimir_single(gens: GeneratorSet) -> SparseRatMatrix:
    """Gamma = J0 P - J+ J- P - P/2."""
    P = gens.parity
    return gens.j0 @ P - gens.jplus @ gens.jminus @ P - P * HALF


def coproduct(left: GeneratorSet, right: GeneratorSet) -> GeneratorSet:
    """Delta(J0) = J0x1 + 1xJ0, Delta(J+-) = J+- x P + 1 x J+-, Delta(P) = P x P."""
    il = SparseRatMatrix.identity(left.dim)
    ir = SparseRatMatrix.identity(right.dim)
    levels = tuple(a + b for a in left.levels for b in right.levels)
    return GeneratorSet(
        jplus=kron(left.jplus, right.parity) + kron(il, right.jplus),
        jminus=kron(left.jminus, right.parity) + kron(il, right.jminus),
        j0=kron(left.j0, ir) + kron(il, right.j0),
        parity=kron(left.parity, right.parity),
        levels=levels,
        safe_below=min(left.safe_below, right.safe_below),
    )

