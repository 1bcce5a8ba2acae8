"""Log discrepancies of surface singularities from exceptional residues.

Given the exceptional intersection matrix M of a surface resolution and the
componentwise residue vector I, the log discrepancy vector is b = -M^{-1} I;
the discrepancies are a = b - 1 and classify the singularity.  A built-in
model realizes the cyclic quotient of weight (1, 1) end to end, computing
the residues on the two resolution charts.
"""

from __future__ import annotations

from dataclasses import dataclass
from fractions import Fraction

from .algebra import MultiPoly, RatMatrix, det_exact, solve_linear
from .foliation import ChartField
from .residue import ResidueRecord, SingularPoint, simple_residues


class NotNegativeDefinite(Exception):
    def __init__(self, k: int):
        self.k = k
        super().__init__(f"leading principal minor {k} violates negative definiteness")


CLASSES = ("terminal", "canonical", "log_terminal", "log_canonical", "not_log_canonical")


@dataclass(frozen=True)
class DiscrepancyProblem:
    M: RatMatrix
    I: tuple[Fraction, ...]
    genera: tuple[int, ...] | None = None

    @property
    def r(self) -> int:
        return self.M.rows


@dataclass(frozen=True)
class DiscrepancyResult:
    b: tuple[Fraction, ...]  # log discrepancies
    a: tuple[Fraction, ...]  # discrepancies, a = b - 1
    classification: str


def check_negative_definite(M: RatMatrix) -> tuple[bool, int | None]:
    """Sylvester test: (-1)^k * (k-th leading principal minor) > 0 for all k.

    Returns (True, None) or (False, first violating k).
    """
    if not M.is_symmetric():
        raise ValueError("intersection matrix must be symmetric")
    for k in range(1, M.rows + 1):
        minor = det_exact(M.submatrix(k))
        if (-1) ** k * minor <= 0:
            return False, k
    return True, None


def classify(a) -> str:
    """Finest nested class of a discrepancy vector."""
    a = [Fraction(x) for x in a]
    if any(x < -1 for x in a):
        return "not_log_canonical"
    if all(x > 0 for x in a):
        return "terminal"
    if all(x >= 0 for x in a):
        return "canonical"
    if all(x > -1 for x in a):
        return "log_terminal"
    return "log_canonical"


def solve_discrepancies(problem: DiscrepancyProblem) -> DiscrepancyResult:
    """Exact b = -M^{-1} I with the defining identity re-checked."""
    ok, k = check_negative_definite(problem.M)
    if not ok:
        raise NotNegativeDefinite(k)
    b = solve_linear(problem.M, [-v for v in problem.I])
    recovered = [-v for v in problem.M.mul_vector(b)]
    assert tuple(recovered) == tuple(problem.I), "I = -M b round trip failed"
    a = [v - 1 for v in b]
    return DiscrepancyResult(b=tuple(b), a=tuple(a), classification=classify(a))


def expected_exceptional_residues(M: RatMatrix, genera=None) -> list[Fraction]:
    """Residue vector forced by adjunction on each exceptional component.

    I_j = 2 - 2*g_j - sum_{k != j} M_{jk}: the degree of the logarithmic
    normal bundle restricted to a component, via (K+D).D_j and adjunction.
    """
    if not M.is_symmetric():
        raise ValueError("intersection matrix must be symmetric")
    r = M.rows
    genera = [0] * r if genera is None else list(genera)
    if len(genera) != r:
        raise ValueError("genera length must match the number of components")
    if any(g < 0 for g in genera):
        raise ValueError("genera must be non-negative")
    return [
        Fraction(2 - 2 * genera[j]) - sum(M[j, k] for k in range(r) if k != j)
        for j in range(r)
    ]


@dataclass(frozen=True)
class CyclicQuotientModel:
    m: int
    charts: tuple[ChartField, ChartField]
    point_residues: tuple[ResidueRecord, ResidueRecord]
    I_E: Fraction
    M: RatMatrix
    result: DiscrepancyResult


def cyclic_quotient_model(m: int) -> CyclicQuotientModel:
    """The weight-(1,1) cyclic quotient of order m, resolved.

    The minimal resolution is the total space of a degree -m line bundle
    over the exceptional rational curve E.  The descending diagonal field
    lifts to (m*x, -2*b) and (-m*y, 2*c) on the two charts, with E the
    first coordinate axis in each; the induced field on E has one simple
    zero per chart, each with logarithmic residue 1, so I_E = 2 and
    b = 2/m.
    """
    if m < 2:
        raise ValueError(f"cyclic quotient order must be at least 2, got {m}")

    def chart(sign: int, names: tuple[str, str]) -> ChartField:
        x = MultiPoly.variable(names, names[0])
        t = MultiPoly.variable(names, names[1])
        return ChartField(
            chart=0 if sign > 0 else 1,
            variables=names,
            a=(sign * m * x, -sign * 2 * t),
            f=x,
            k=MultiPoly.const(names, sign * m),
        )

    charts = (chart(+1, ("x", "b")), chart(-1, ("y", "c")))
    origin = (Fraction(0), Fraction(0))
    records = tuple(
        simple_residues(cf, SingularPoint(cf.chart, origin, on_divisor=True), 1)
        for cf in charts
    )
    I_E = sum((r.log for r in records), Fraction(0))
    M = RatMatrix([[-m]])
    result = solve_discrepancies(DiscrepancyProblem(M=M, I=(I_E,)))
    return CyclicQuotientModel(
        m=m, charts=charts, point_residues=records, I_E=I_E, M=M, result=result
    )
