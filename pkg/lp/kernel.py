"""Exact rational linear feasibility, optimization and vertex enumeration.

Every number is a `fractions.Fraction`; no floating point enters a solver path.
Optimization is a two-phase tableau simplex with Bland's rule. Deterministic
outputs are obtained lexicographically: after the objective is optimized the
tableau is restricted to the optimal face and each coordinate is minimized in
turn, which yields the lexicographically least optimal point.
"""
import logging
from dataclasses import dataclass
from fractions import Fraction
from itertools import combinations
from typing import List, Optional, Sequence, Tuple, Union

from signals.errors import ContractViolation, InputError

logger = logging.getLogger(__name__)

RationalLike = Union[Fraction, int, str]
Vector = Tuple[Fraction, ...]
Row = Tuple[Vector, Fraction]

ZERO = Fraction(0)
ONE = Fraction(1)


def as_rational(value: RationalLike) -> Fraction:
    """Convert an int, Fraction or "p/q" string to a Fraction. Floats are rejected."""
    if isinstance(value, Fraction):
        return value
    if isinstance(value, bool) or isinstance(value, float):
        raise InputError(f"expected an exact rational, got {value!r}")
    if isinstance(value, int):
        return Fraction(value)
    if isinstance(value, str):
        text = value.strip()
        try:
            result = Fraction(text)
        except (ValueError, ZeroDivisionError) as exc:
            raise InputError(f"not a rational literal: {value!r}") from exc
        if "." in text or "e" in text.lower():
            raise InputError(f"rational literals are 'p/q' or integers, got {value!r}")
        return result
    raise InputError(f"expected an exact rational, got {type(value).__name__}")


def as_vector(values: Sequence[RationalLike]) -> Vector:
    return tuple(as_rational(v) for v in values)


class UnboundedError(ContractViolation):
    """The objective is unbounded over the feasible region."""


@dataclass(frozen=True)
class LinearSystem:
    """Rows over `num_vars` variables: eq rows (a·x = b), ineq rows (a·x <= b) and per-variable bounds."""

    num_vars: int
    eq_rows: Tuple[Row, ...] = ()
    ineq_rows: Tuple[Row, ...] = ()
    lower: Tuple[Optional[Fraction], ...] = ()
    upper: Tuple[Optional[Fraction], ...] = ()

    def __post_init__(self):
        if self.num_vars < 0:
            raise InputError("num_vars must be non-negative")
        for kind, rows in (("eq", self.eq_rows), ("ineq", self.ineq_rows)):
            for coeffs, _ in rows:
                if len(coeffs) != self.num_vars:
                    raise InputError(
                        f"{kind} row has {len(coeffs)} coefficients, expected {self.num_vars}"
                    )
        if len(self.lower) != self.num_vars or len(self.upper) != self.num_vars:
            raise InputError("bounds must list one entry per variable")

    @classmethod
    def build(
        cls,
        num_vars: int,
        eq: Sequence[Tuple[Sequence[RationalLike], RationalLike]] = (),
        ineq: Sequence[Tuple[Sequence[RationalLike], RationalLike]] = (),
        lower: Optional[Sequence[Optional[RationalLike]]] = None,
        upper: Optional[Sequence[Optional[RationalLike]]] = None,
    ) -> "LinearSystem":
        """Normalize plain numbers and strings into a LinearSystem."""
        def bounds(values):
            if values is None:
                return (None,) * num_vars
            return tuple(None if v is None else as_rational(v) for v in values)

        return cls(
            num_vars=num_vars,
            eq_rows=tuple((as_vector(c), as_rational(b)) for c, b in eq),
            ineq_rows=tuple((as_vector(c), as_rational(b)) for c, b in ineq),
            lower=bounds(lower),
            upper=bounds(upper),
        )

    @classmethod
    def nonnegative(cls, num_vars: int, eq=(), ineq=()) -> "LinearSystem":
        return cls.build(num_vars, eq=eq, ineq=ineq, lower=[0] * num_vars)

    def with_rows(self, eq=(), ineq=()) -> "LinearSystem":
        extra = LinearSystem.build(self.num_vars, eq=eq, ineq=ineq)
        return LinearSystem(
            self.num_vars,
            self.eq_rows + extra.eq_rows,
            self.ineq_rows + extra.ineq_rows,
            self.lower,
            self.upper,
        )

    def with_equality(self, coeffs: Sequence[RationalLike], rhs: RationalLike) -> "LinearSystem":
        return self.with_rows(eq=[(coeffs, rhs)])

    def bound_rows(self) -> List[Row]:
        """The variable bounds written as inequality rows."""
        rows = []
        for j in range(self.num_vars):
            if self.lower[j] is not None:
                rows.append((_unit(self.num_vars, j, -ONE), -self.lower[j]))
            if self.upper[j] is not None:
                rows.append((_unit(self.num_vars, j, ONE), self.upper[j]))
        return rows

    def residuals(self, point: Sequence[Fraction]) -> List[Fraction]:
        """a·x - b for every eq row, in order."""
        self._check_point(point)
        return [_dot(c, point) - b for c, b in self.eq_rows]

    def satisfied_by(self, point: Sequence[Fraction]) -> bool:
        self._check_point(point)
        if any(_dot(c, point) != b for c, b in self.eq_rows):
            return False
        return all(_dot(c, point) <= b for c, b in list(self.ineq_rows) + self.bound_rows())

    def _check_point(self, point):
        if len(point) != self.num_vars:
            raise InputError(f"point has {len(point)} entries, expected {self.num_vars}")


def _unit(n: int, j: int, value: Fraction = ONE) -> Vector:
    return tuple(value if k == j else ZERO for k in range(n))


def _dot(a: Sequence[Fraction], b: Sequence[Fraction]) -> Fraction:
    return sum((x * y for x, y in zip(a, b) if x and y), ZERO)


class _Standard:
    """`sys` rewritten as A y = b, y >= 0, b >= 0, with x_j = const_j + sum(coef * y_k)."""

    def __init__(self, sys: LinearSystem):
        self.num_vars = sys.num_vars
        self.maps: List[Tuple[Fraction, List[Tuple[int, Fraction]]]] = []
        width = 0
        bound_rows = []
        for j in range(sys.num_vars):
            lo, hi = sys.lower[j], sys.upper[j]
            if lo is not None:
                self.maps.append((lo, [(width, ONE)]))
                if hi is not None:
                    bound_rows.append(({width: ONE}, hi - lo))
                width += 1
            elif hi is not None:
                self.maps.append((hi, [(width, -ONE)]))
                width += 1
            else:
                self.maps.append((ZERO, [(width, ONE), (width + 1, -ONE)]))
                width += 2
        self.structural = width

        eq = [self._substitute(c, b) for c, b in sys.eq_rows]
        ineq = [self._substitute(c, b) for c, b in sys.ineq_rows]
        for sparse, b in bound_rows:
            ineq.append(({k: v for k, v in sparse.items()}, b))

        self.width = width + len(ineq)
        self.rows: List[List[Fraction]] = []
        self.rhs: List[Fraction] = []
        for sparse, b in eq:
            self._append(sparse, b, None)
        for k, (sparse, b) in enumerate(ineq):
            self._append(sparse, b, width + k)

    def _substitute(self, coeffs, rhs):
        sparse = {}
        for j, a in enumerate(coeffs):
            if not a:
                continue
            const, terms = self.maps[j]
            rhs -= a * const
            for k, c in terms:
                sparse[k] = sparse.get(k, ZERO) + a * c
        return sparse, rhs

    def _append(self, sparse, rhs, slack):
        row = [ZERO] * self.width
        for k, v in sparse.items():
            row[k] = v
        if slack is not None:
            row[slack] = ONE
        if rhs < 0:
            row = [-v for v in row]
            rhs = -rhs
        self.rows.append(row)
        self.rhs.append(rhs)

    def objective(self, coeffs: Sequence[Fraction]) -> List[Fraction]:
        cost = [ZERO] * self.width
        for j, a in enumerate(coeffs):
            if not a:
                continue
            for k, c in self.maps[j][1]:
                cost[k] += a * c
        return cost

    def constant(self, coeffs: Sequence[Fraction]) -> Fraction:
        return sum((a * self.maps[j][0] for j, a in enumerate(coeffs) if a), ZERO)

    def recover(self, y: Sequence[Fraction]) -> Vector:
        return tuple(const + sum((c * y[k] for k, c in terms), ZERO) for const, terms in self.maps)


class _Tableau:
    """Canonical tableau for max c·y subject to T y = rhs, y >= 0, with `basis` feasible."""

    def __init__(self, rows: List[List[Fraction]], rhs: List[Fraction], basis: List[int], width: int):
        self.rows = rows
        self.rhs = rhs
        self.basis = basis
        self.width = width
        self.pivots = 0

    def pivot(self, r: int, col: int):
        row = self.rows[r]
        p = row[col]
        if p != ONE:
            row = [v / p for v in row]
            self.rows[r] = row
            self.rhs[r] /= p
        for i, other in enumerate(self.rows):
            if i == r:
                continue
            f = other[col]
            if f:
                self.rows[i] = [a - f * b if b else a for a, b in zip(other, row)]
                self.rhs[i] -= f * self.rhs[r]
        self.basis[r] = col
        self.pivots += 1

    def reduced_costs(self, cost: Sequence[Fraction]) -> List[Fraction]:
        red = list(cost[: self.width])
        for i, row in enumerate(self.rows):
            cb = cost[self.basis[i]]
            if cb:
                red = [d - cb * a if a else d for d, a in zip(red, row)]
        return red

    def optimize(self, cost: Sequence[Fraction], allowed: List[bool]) -> Optional[List[Fraction]]:
        """Bland's rule. Returns the final reduced costs, or None when unbounded."""
        red = self.reduced_costs(cost)
        while True:
            col = next((j for j in range(self.width) if allowed[j] and red[j] > 0), None)
            if col is None:
                return red
            best = None
            for i, row in enumerate(self.rows):
                if row[col] > 0:
                    key = (self.rhs[i] / row[col], self.basis[i])
                    if best is None or key < best[0]:
                        best = (key, i)
            if best is None:
                return None
            r = best[1]
            self.pivot(r, col)
            factor = red[col]
            red = [d - factor * a if a else d for d, a in zip(red, self.rows[r])]

    def value(self, cost: Sequence[Fraction]) -> Fraction:
        return sum((cost[b] * self.rhs[i] for i, b in enumerate(self.basis)), ZERO)

    def solution(self) -> List[Fraction]:
        y = [ZERO] * self.width
        for i, b in enumerate(self.basis):
            y[b] = self.rhs[i]
        return y


def _phase_one(std: _Standard) -> Optional[_Tableau]:
    m, n = len(std.rows), std.width
    rows = [list(r) + [ONE if k == i else ZERO for k in range(m)] for i, r in enumerate(std.rows)]
    tab = _Tableau(rows, list(std.rhs), [n + i for i in range(m)], n + m)
    cost = [ZERO] * n + [-ONE] * m
    tab.optimize(cost, [True] * n + [False] * m)
    if any(tab.rhs[i] != 0 for i, b in enumerate(tab.basis) if b >= n):
        return None

    i = 0
    while i < len(tab.rows):
        if tab.basis[i] >= n:
            col = next((j for j in range(n) if tab.rows[i][j] != 0), None)
            if col is None:
                # redundant row
                del tab.rows[i], tab.rhs[i], tab.basis[i]
                continue
            tab.pivot(i, col)
        i += 1
    tab.rows = [r[:n] for r in tab.rows]
    tab.width = n
    return tab


def _restrict_to_face(allowed: List[bool], red: Sequence[Fraction]):
    for j, d in enumerate(red):
        if d < 0:
            allowed[j] = False


def _solve(
    sys: LinearSystem,
    objective: Optional[Sequence[Fraction]] = None,
    lexicographic: bool = True,
) -> Optional[Tuple[Optional[Fraction], Vector]]:
    std = _Standard(sys)
    tab = _phase_one(std)
    if tab is None:
        logger.debug("infeasible system: %d vars, %d rows", sys.num_vars, len(std.rows))
        return None
    allowed = [True] * tab.width
    value = None
    if objective is not None:
        cost = std.objective(objective)
        red = tab.optimize(cost, allowed)
        if red is None:
            raise UnboundedError("objective is unbounded over the feasible region")
        value = std.constant(objective) + tab.value(cost)
        _restrict_to_face(allowed, red)
    if lexicographic:
        for j in range(sys.num_vars):
            red = tab.optimize(std.objective(_unit(sys.num_vars, j, -ONE)), allowed)
            if red is None:
                # coordinate unbounded below; keep the current basic point
                break
            _restrict_to_face(allowed, red)
    logger.debug(
        "solved system: %d vars, %d rows, %d pivots", sys.num_vars, len(tab.rows), tab.pivots
    )
    return value, std.recover(tab.solution())


def feasible_point(sys: LinearSystem, lexicographic: bool = True) -> Optional[Vector]:
    """A point satisfying every row exactly, or None when infeasible.

    With `lexicographic` (the default) the point is the lexicographically least
    feasible point whenever every coordinate is bounded below.
    """
    result = _solve(sys, None, lexicographic)
    return None if result is None else result[1]


def maximize(
    sys: LinearSystem, objective: Sequence[RationalLike]
) -> Optional[Tuple[Fraction, Vector]]:
    """Exact maximum of objective·x and the lexicographically least optimal point.

    Returns None when infeasible; raises UnboundedError (a ContractViolation) when unbounded.
    """
    objective = as_vector(objective)
    if len(objective) != sys.num_vars:
        raise InputError(f"objective has {len(objective)} entries, expected {sys.num_vars}")
    result = _solve(sys, objective, True)
    if result is None:
        return None
    value, point = result
    return value, point


def _reduce_against(basis: List[Tuple[List[Fraction], int]], row: List[Fraction]) -> List[Fraction]:
    row = list(row)
    for pivot_row, col in basis:
        f = row[col]
        if f:
            row = [a - f * b for a, b in zip(row, pivot_row)]
    return row


def _independent_rows(rows: Sequence[Row]) -> List[Row]:
    """A maximal linearly independent subset of coefficient rows, in input order."""
    echelon: List[Tuple[List[Fraction], int]] = []
    kept = []
    for coeffs, rhs in rows:
        reduced = _reduce_against(echelon, list(coeffs))
        col = next((k for k, v in enumerate(reduced) if v), None)
        if col is None:
            continue
        p = reduced[col]
        echelon.append(([v / p for v in reduced], col))
        kept.append((coeffs, rhs))
    return kept


def solve_square(rows: Sequence[Row]) -> Optional[Vector]:
    """Unique solution of a square system by Gauss-Jordan elimination, or None if singular."""
    n = len(rows)
    aug = [list(c) + [b] for c, b in rows]
    for col in range(n):
        piv = next((r for r in range(col, n) if aug[r][col] != 0), None)
        if piv is None:
            return None
        aug[col], aug[piv] = aug[piv], aug[col]
        p = aug[col][col]
        aug[col] = [v / p for v in aug[col]]
        for r in range(n):
            if r != col and aug[r][col]:
                f = aug[r][col]
                aug[r] = [a - f * b for a, b in zip(aug[r], aug[col])]
    return tuple(aug[r][n] for r in range(n))


def require_bounded(sys: LinearSystem):
    """Raise ContractViolation when the (nonempty) region is unbounded in some coordinate."""
    for j in range(sys.num_vars):
        for sign in (ONE, -ONE):
            try:
                _solve(sys, _unit(sys.num_vars, j, sign), lexicographic=False)
            except UnboundedError as exc:
                raise ContractViolation(f"region is unbounded along coordinate {j}") from exc


def enumerate_vertices(sys: LinearSystem) -> List[Vector]:
    """Every vertex of a bounded polytope, exactly once, in lexicographic order.

    Basic-solution enumeration: the independent equality rows plus every choice
    of (num_vars - rank) inequality rows are solved as a square system and the
    feasible solutions are kept.
    """
    if feasible_point(sys, lexicographic=False) is None:
        return []
    require_bounded(sys)
    eq = _independent_rows(sys.eq_rows)
    ineq = list(sys.ineq_rows) + sys.bound_rows()
    k = sys.num_vars - len(eq)
    found = set()
    for combo in combinations(range(len(ineq)), k):
        point = solve_square(eq + [ineq[i] for i in combo])
        if point is not None and sys.satisfied_by(point):
            found.add(point)
    vertices = sorted(found)
    logger.debug("enumerated %d vertices over %d variables", len(vertices), sys.num_vars)
    return vertices


def is_extreme_point(sys: LinearSystem, point: Sequence[RationalLike]) -> bool:
    """True iff `point` is feasible and no d != 0 keeps both point + d and point - d feasible."""
    point = as_vector(point)
    if not sys.satisfied_by(point):
        return False
    n = sys.num_vars
    eq = [(c, ZERO) for c, _ in sys.eq_rows]
    ineq = []
    for c, b in list(sys.ineq_rows) + sys.bound_rows():
        slack = b - _dot(c, point)
        ineq.append((c, slack))
        ineq.append((tuple(-v for v in c), slack))
    directions = LinearSystem.build(n, eq=eq, ineq=ineq)
    for j in range(n):
        try:
            best = maximize(directions, _unit(n, j))
        except UnboundedError:
            return False
        if best is not None and best[0] > 0:
            return False
    return True
