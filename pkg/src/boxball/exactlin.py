"""Tiny exact-rational linear helpers: a phase-1 simplex for feasibility.

Problem sizes here are a handful of variables and at most a few dozen
constraints, so a dense tableau with Fractions and Bland's rule is plenty.
"""

from __future__ import annotations

from fractions import Fraction


def solve_nonneg_feasible(
    A: list[list[Fraction]], b: list[Fraction]
) -> list[Fraction] | None:
    """Find x >= 0 with A x >= b, or None if infeasible.

    Phase-1 simplex: rows with negative right-hand side are flipped so the
    slack can start basic; the rest get artificial variables whose sum is
    driven to zero.  Bland's rule guarantees termination.
    """
    m = len(A)
    n = len(A[0]) if m else 0
    if m == 0:
        return [Fraction(0)] * n

    rows: list[list[Fraction]] = []
    rhs: list[Fraction] = []
    basis: list[int] = []
    art_cols: list[int] = []
    # columns: x (n) | slacks (m) | artificials (appended)
    ncols = n + m
    for i in range(m):
        coeff = [Fraction(x) for x in A[i]] + [Fraction(0)] * m
        bi = Fraction(b[i])
        if bi <= 0:
            # -A x + s = -b >= 0: slack starts basic
            coeff = [-c for c in coeff]
            coeff[n + i] = Fraction(1)
            rows.append(coeff)
            rhs.append(-bi)
            basis.append(n + i)
        else:
            # A x - s + a = b: artificial starts basic
            coeff[n + i] = Fraction(-1)
            rows.append(coeff)
            rhs.append(bi)
            art_cols.append(ncols)
            basis.append(ncols)
            ncols += 1
    for r in rows:
        r.extend([Fraction(0)] * (ncols - len(r)))
    for i, bcol in enumerate(basis):
        if bcol >= n + m:
            rows[i][bcol] = Fraction(1)

    if not art_cols:
        # trivially feasible at x = 0
        return [Fraction(0)] * n

    # objective: minimize sum of artificials; reduced costs via basis rows
    def reduced_costs() -> list[Fraction]:
        cost = [Fraction(0)] * ncols
        for c in art_cols:
            cost[c] = Fraction(1)
        red = list(cost)
        for i, bcol in enumerate(basis):
            cb = cost[bcol]
            if cb:
                for j in range(ncols):
                    red[j] -= cb * rows[i][j]
        return red

    while True:
        red = reduced_costs()
        enter = next((j for j in range(ncols) if red[j] < 0), None)
        if enter is None:
            break
        ratios = [
            (rhs[i] / rows[i][enter], basis[i], i)
            for i in range(m)
            if rows[i][enter] > 0
        ]
        if not ratios:
            return None  # unbounded phase-1 cannot happen, but fail safe
        _, _, piv = min(ratios, key=lambda t: (t[0], t[1]))
        pv = rows[piv][enter]
        rows[piv] = [c / pv for c in rows[piv]]
        rhs[piv] /= pv
        for i in range(m):
            if i != piv and rows[i][enter]:
                f = rows[i][enter]
                rows[i] = [c - f * p for c, p in zip(rows[i], rows[piv])]
                rhs[i] -= f * rhs[piv]
        basis[piv] = enter

    objective = sum(rhs[i] for i in range(m) if basis[i] in set(art_cols))
    if objective != 0:
        return None
    x = [Fraction(0)] * n
    for i, bcol in enumerate(basis):
        if bcol < n:
            x[bcol] = rhs[i]
    return x


def mat_vec(mat: list[list[Fraction]], vec: list[Fraction]) -> list[Fraction]:
    return [sum((r * v for r, v in zip(row, vec)), Fraction(0)) for row in mat]


def format_fraction(x: Fraction) -> str:
    x = Fraction(x)
    return f"{x.numerator}/{x.denominator}" if x.denominator != 1 else str(x.numerator)


def parse_fraction(s: str) -> Fraction:
    return Fraction(s)
