"""Exact linear programming over the rationals.

A small two-phase primal simplex using Bland's rule, with every number
a Fraction, so optima like 2/3 come out exactly rather than as 0.667.
All decision variables are assumed nonnegative; callers encode other
bounds as ordinary constraint rows.
"""

from __future__ import annotations

from dataclasses import dataclass, field
from fractions import Fraction


@dataclass
class LinearProgram:
    """min or max of c·x + c0 subject to rows of A x (<=|>=|=) b, x >= 0."""

    variables: list[str]
    objective: dict[str, Fraction]
    constant: Fraction = Fraction(0)
    sense: str = "min"
    rows: list[tuple[dict[str, Fraction], str, Fraction]] = field(default_factory=list)

    def add_row(self, coeffs: dict[str, Fraction], relation: str, rhs) -> None:
        if relation not in ("<=", ">=", "="):
            raise ValueError(f"bad relation {relation!r}")
        self.rows.append((dict(coeffs), relation, Fraction(rhs)))


@dataclass
class LPResult:
    status: str  # optimal | infeasible | unbounded
    value: Fraction | None = None
    point: dict[str, Fraction] | None = None


def solve(lp: LinearProgram) -> LPResult:
    n = len(lp.variables)
    col = {name: j for j, name in enumerate(lp.variables)}

    # standard form rows: A x + slack = b with b >= 0
    rows = []
    slack_signs = []  # +1 slack, -1 surplus, 0 none
    for coeffs, rel, rhs in lp.rows:
        a = [Fraction(0)] * n
        for name, c in coeffs.items():
            a[col[name]] += Fraction(c)
        if rhs < 0:
            a = [-x for x in a]
            rhs = -rhs
            rel = {"<=": ">=", ">=": "<=", "=": "="}[rel]
        rows.append((a, rel, Fraction(rhs)))

    m = len(rows)
    slack_count = sum(1 for _, rel, _ in rows if rel != "=")
    total = n + slack_count + m  # structural + slack + artificial
    tableau = []
    basis = []
    slack_at = n
    art_at = n + slack_count
    for i, (a, rel, rhs) in enumerate(rows):
        row = a + [Fraction(0)] * (slack_count + m) + [rhs]
        if rel != "=":
            row[slack_at] = Fraction(1) if rel == "<=" else Fraction(-1)
            slack_col = slack_at
            slack_at += 1
        else:
            slack_col = None
        # start from the slack basis when it is feasible, else artificial
        if rel == "<=" and slack_col is not None:
            basis.append(slack_col)
        else:
            row[art_at] = Fraction(1)
            basis.append(art_at)
            art_at += 1
        tableau.append(row)

    def pivot(r: int, c: int) -> None:
        piv = tableau[r][c]
        tableau[r] = [x / piv for x in tableau[r]]
        for i in range(len(tableau)):
            if i != r and tableau[i][c] != 0:
                factor = tableau[i][c]
                tableau[i] = [
                    x - factor * y for x, y in zip(tableau[i], tableau[r])
                ]
        basis[r] = c

    def optimize(costs: list[Fraction], allowed: int) -> str:
        # minimize costs·x over columns [0, allowed); Bland's rule
        while True:
            reduced = list(costs)
            offset = Fraction(0)
            for i, b in enumerate(basis):
                cb = costs[b] if b < len(costs) else Fraction(0)
                if cb != 0:
                    for j in range(allowed):
                        reduced[j] -= cb * tableau[i][j]
                    offset += cb * tableau[i][-1]
            entering = None
            for j in range(allowed):
                if j not in basis and reduced[j] < 0:
                    entering = j
                    break
            if entering is None:
                return "optimal"
            leaving = None
            best = None
            for i in range(m):
                if tableau[i][entering] > 0:
                    ratio = tableau[i][-1] / tableau[i][entering]
                    if best is None or ratio < best or (
                        ratio == best and basis[i] < basis[leaving]
                    ):
                        best = ratio
                        leaving = i
            if leaving is None:
                return "unbounded"
            pivot(leaving, entering)

    # phase 1: drive artificial variables to zero
    art_start = n + slack_count
    if any(b >= art_start for b in basis):
        phase1 = [Fraction(0)] * total
        for j in range(art_start, total):
            phase1[j] = Fraction(1)
        optimize(phase1, total)
        infeasibility = sum(
            tableau[i][-1] for i, b in enumerate(basis) if b >= art_start
        )
        if infeasibility != 0:
            return LPResult("infeasible")
        # pivot any artificial variables out of the basis
        for i, b in enumerate(basis):
            if b >= art_start:
                for j in range(art_start):
                    if tableau[i][j] != 0:
                        pivot(i, j)
                        break

    # phase 2
    sign = Fraction(1) if lp.sense == "min" else Fraction(-1)
    costs = [Fraction(0)] * total
    for name, c in lp.objective.items():
        costs[col[name]] = sign * Fraction(c)
    status = optimize(costs, art_start)
    if status == "unbounded":
        return LPResult("unbounded")

    point = {name: Fraction(0) for name in lp.variables}
    for i, b in enumerate(basis):
        if b < n:
            point[lp.variables[b]] = tableau[i][-1]
    value = lp.constant + sum(
        Fraction(c) * point[name] for name, c in lp.objective.items()
    )
    return LPResult("optimal", value, point)
