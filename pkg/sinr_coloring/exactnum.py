"""
Exact rational linear programming.

A dense two-phase tableau simplex over ``fractions.Fraction`` with Bland's
smallest-index rule, so every solve terminates and identical inputs give
identical bases. Rows start from an identity basis made of slack columns,
existing unit columns of equality rows, and artificials only where neither
exists.
"""

from dataclasses import dataclass
from enum import Enum
from fractions import Fraction
import logging
import math
from typing import List, Optional, Sequence, Tuple, Union

from .errors import NO_DEADLINE, Deadline, InvalidArgumentError

logger = logging.getLogger(__name__)

Scalar = Union[Fraction, int]

ZERO = Fraction(0)
ONE = Fraction(1)


class LPStatus(str, Enum):
    OPTIMAL = "optimal"
    INFEASIBLE = "infeasible"
    UNBOUNDED = "unbounded"


class Sense(str, Enum):
    MIN = "min"
    MAX = "max"


class Relation(str, Enum):
    EQ = "="
    LE = "<="


@dataclass(frozen=True)
class LPSolution:
    """
    ``primal`` follows the caller's variable order; ``dual`` has one value
    per row in the caller's row orientation, so b.y equals the objective.
    """

    status: LPStatus
    objective: Optional[Fraction]
    primal: Tuple[Fraction, ...]
    dual: Tuple[Fraction, ...]
    pivots: int


class SimplexTableau:
    """
    Standard-form tableau: ``rows[i]`` holds the coefficients of row i
    followed by its right-hand side; ``basis[i]`` is the basic column of row
    i. ``banned`` columns (artificials in phase 2) never enter.
    """

    def __init__(self, rows: List[List[Fraction]], basis: List[int], n_cols: int, banned: Sequence[bool]):
        self.rows = rows
        self.basis = basis
        self.n_cols = n_cols
        self.banned = list(banned)
        self.pivots = 0

    def rhs(self, i: int) -> Fraction:
        return self.rows[i][-1]

    def reduced_costs(self, cost: Sequence[Fraction]) -> List[Fraction]:
        """c_j - c_B B^-1 A_j for every column, read off the current tableau."""
        d = list(cost) + [ZERO]
        for i, b in enumerate(self.basis):
            cb = cost[b]
            if cb == 0:
                continue
            row = self.rows[i]
            for j, a in enumerate(row):
                if a:
                    d[j] -= cb * a
        return d

    def pivot(self, r: int, col: int, obj: List[Fraction]) -> None:
        pivot_row = self.rows[r]
        p = pivot_row[col]
        if p != 1:
            pivot_row = [a / p for a in pivot_row]
            self.rows[r] = pivot_row
        nz = [j for j, a in enumerate(pivot_row) if a]
        for i, row in enumerate(self.rows):
            if i == r:
                continue
            factor = row[col]
            if factor:
                for j in nz:
                    row[j] -= factor * pivot_row[j]
        factor = obj[col]
        if factor:
            for j in nz:
                obj[j] -= factor * pivot_row[j]
        self.basis[r] = col
        self.pivots += 1

    def entering(self, obj: List[Fraction]) -> Optional[int]:
        """Bland: smallest admissible column with negative reduced cost."""
        for j in range(self.n_cols):
            if not self.banned[j] and obj[j] < 0:
                return j
        return None

    def leaving(self, col: int) -> Optional[int]:
        """Bland: minimum ratio, ties to the smallest basic column index."""
        best: Optional[int] = None
        best_ratio: Optional[Fraction] = None
        for i, row in enumerate(self.rows):
            a = row[col]
            if a > 0:
                ratio = row[-1] / a
                if (
                    best is None
                    or ratio < best_ratio
                    or (ratio == best_ratio and self.basis[i] < self.basis[best])
                ):
                    best, best_ratio = i, ratio
        return best

    def optimize(self, obj: List[Fraction], deadline: Deadline) -> bool:
        """Pivot to optimality for the objective row ``obj``; False if unbounded."""
        while True:
            deadline.check()
            col = self.entering(obj)
            if col is None:
                return True
            r = self.leaving(col)
            if r is None:
                return False
            self.pivot(r, col, obj)


def _as_fraction(v: Scalar) -> Fraction:
    return v if isinstance(v, Fraction) else Fraction(v)


def simplex_solve(
    A: Sequence[Sequence[Scalar]],
    b: Sequence[Scalar],
    c: Sequence[Scalar],
    sense: Union[Sense, str] = Sense.MIN,
    row_relations: Optional[Sequence[Union[Relation, str]]] = None,
    free: Optional[Sequence[bool]] = None,
    deadline: Deadline = NO_DEADLINE,
) -> LPSolution:
    """
    Optimize c.x subject to A x (=|<=) b, x >= 0 except where ``free``.

    Free variables are split into differences of two non-negative columns.
    Infeasible and unbounded problems are reported through ``status``.
    """
    sense = Sense(sense)
    m = len(A)
    n = len(c)
    if len(b) != m:
        raise InvalidArgumentError(f"A has {m} rows but b has {len(b)} entries")
    if any(len(row) != n for row in A):
        raise InvalidArgumentError(f"every row of A must have {n} entries")
    relations = [Relation(r) for r in (row_relations or [Relation.EQ] * m)]
    if len(relations) != m:
        raise InvalidArgumentError("one relation per row is required")
    free_flags = list(free) if free is not None else [False] * n
    if len(free_flags) != n:
        raise InvalidArgumentError("one free flag per variable is required")

    # structural columns: x_j, or x_j+ and x_j- for free variables
    col_of: List[Tuple[int, int]] = []
    for j in range(n):
        col_of.append((j, 1))
        if free_flags[j]:
            col_of.append((j, -1))
    n_struct = len(col_of)

    sign = 1 if sense is Sense.MIN else -1
    cost: List[Fraction] = [sign * s * _as_fraction(c[j]) for j, s in col_of]

    rows: List[List[Fraction]] = []
    row_sign: List[int] = []
    for i in range(m):
        rhs = _as_fraction(b[i])
        flip = -1 if rhs < 0 else 1
        row_sign.append(flip)
        rows.append([flip * s * _as_fraction(A[i][j]) for j, s in col_of] + [flip * rhs])

    # initial identity basis
    extra_cols: List[List[Tuple[int, Fraction]]] = []  # sparse (row, coef) per added column
    is_artificial: List[bool] = [False] * n_struct
    basis: List[Optional[int]] = [None] * m
    unit_col: List[int] = [0] * m
    used_struct = set()

    def add_col(entries: List[Tuple[int, Fraction]], artificial: bool) -> int:
        extra_cols.append(entries)
        is_artificial.append(artificial)
        return n_struct + len(extra_cols) - 1

    for i, rel in enumerate(relations):
        if rel is Relation.LE:
            if row_sign[i] == 1:
                col = add_col([(i, ONE)], artificial=False)
                basis[i] = unit_col[i] = col
            else:
                add_col([(i, -ONE)], artificial=False)
                col = add_col([(i, ONE)], artificial=True)
                basis[i] = unit_col[i] = col
        else:
            found = None
            for j in range(n_struct):
                if j in used_struct or rows[i][j] != 1:
                    continue
                if all(rows[k][j] == 0 for k in range(m) if k != i):
                    found = j
                    break
            if found is not None:
                used_struct.add(found)
                basis[i] = unit_col[i] = found
            else:
                col = add_col([(i, ONE)], artificial=True)
                basis[i] = unit_col[i] = col

    n_cols = n_struct + len(extra_cols)
    for i in range(m):
        rhs = rows[i].pop()
        rows[i].extend([ZERO] * len(extra_cols))
        rows[i].append(rhs)
    for k, entries in enumerate(extra_cols):
        for i, coef in entries:
            rows[i][n_struct + k] = coef
    cost.extend([ZERO] * len(extra_cols))

    tableau = SimplexTableau(rows, [int(v) for v in basis], n_cols, [False] * n_cols)

    # phase 1
    if any(is_artificial):
        phase1_cost = [ONE if a else ZERO for a in is_artificial]
        obj = tableau.reduced_costs(phase1_cost)
        tableau.optimize(obj, deadline)
        infeasibility = sum(tableau.rhs(i) for i, bcol in enumerate(tableau.basis) if is_artificial[bcol])
        if infeasibility > 0:
            logger.debug("Phase 1 ended with infeasibility %s.", infeasibility)
            return LPSolution(LPStatus.INFEASIBLE, None, (), (), tableau.pivots)
        # drive zero-level artificials out where a real column can replace them
        for i in range(m):
            if not is_artificial[tableau.basis[i]]:
                continue
            row = tableau.rows[i]
            for j in range(n_cols):
                if not is_artificial[j] and row[j] != 0:
                    tableau.pivot(i, j, obj)
                    break
        tableau.banned = list(is_artificial)

    obj = tableau.reduced_costs(cost)
    if not tableau.optimize(obj, deadline):
        return LPSolution(LPStatus.UNBOUNDED, None, (), (), tableau.pivots)

    values = [ZERO] * n_cols
    for i, bcol in enumerate(tableau.basis):
        values[bcol] = tableau.rhs(i)
    primal = [ZERO] * n
    for k, (j, s) in enumerate(col_of):
        primal[j] += s * values[k]

    objective = sum((_as_fraction(c[j]) * primal[j] for j in range(n)), ZERO)

    # y'_i = c_u - d_u for the column u that started as e_i in row i
    dual = []
    for i in range(m):
        u = unit_col[i]
        y = cost[u] - obj[u]
        dual.append(sign * row_sign[i] * y)

    logger.debug("Simplex optimal after %d pivots: objective %s", tableau.pivots, objective)
    return LPSolution(LPStatus.OPTIMAL, objective, tuple(primal), tuple(dual), tableau.pivots)


def lcm_of_denominators(values: Sequence[Fraction]) -> int:
    """Least common multiple of the denominators (zeros contribute 1)."""
    if not values:
        raise InvalidArgumentError("lcm of an empty list is undefined")
    return math.lcm(*(_as_fraction(v).denominator for v in values))
