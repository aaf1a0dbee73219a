"""Dense exact-rational simplex for desk-scale linear programs.

Solves  max c.x  subject to  A x <= b  with free variables, entirely in
`fractions.Fraction`, so feasibility answers and redundancy certificates
are exact.  Free variables are split into differences of nonnegative
ones; a two-phase tableau with Bland's rule guarantees termination.
Problem sizes here are tiny (tens of rows), so no effort is spent on
sparsity or revised-simplex bookkeeping.
"""

from __future__ import annotations

from fractions import Fraction

OPTIMAL = "optimal"
UNBOUNDED = "unbounded"
INFEASIBLE = "infeasible"

_ZERO = Fraction(0)
_ONE = Fraction(1)


def _pivot(tableau, cost, basis, row, col):
    prow = tableau[row]
    piv = prow[col]
    if piv != 1:
        prow = [v / piv for v in prow]
        tableau[row] = prow
    nonzero = [j for j, v in enumerate(prow) if v]
    for r in range(len(tableau)):
        line = tableau[r]
        if r != row and line[col]:
            f = line[col]
            for j in nonzero:
                line[j] -= f * prow[j]
    f = cost[col]
    if f:
        for j in nonzero:
            cost[j] -= f * prow[j]
    basis[row] = col


def _run_simplex(tableau, cost, basis):
    """Maximize; ``cost`` holds reduced costs with cost[-1] = -objective.
    Bland's rule: enter the smallest improving column, leave on the
    smallest-index basic variable among minimal ratios."""
    ncols = len(cost) - 1
    while True:
        col = next((j for j in range(ncols) if cost[j] > 0), None)
        if col is None:
            return OPTIMAL
        row, best = None, None
        for r in range(len(tableau)):
            if tableau[r][col] > 0:
                ratio = tableau[r][-1] / tableau[r][col]
                if best is None or ratio < best or (ratio == best and basis[r] < basis[row]):
                    row, best = r, ratio
        if row is None:
            return UNBOUNDED
        _pivot(tableau, cost, basis, row, col)


def solve_max(c, a_ub, b_ub):
    """Return (status, value) for  max c.x  s.t.  a_ub x <= b_ub, x free.

    ``value`` is the exact optimum as a Fraction when status is OPTIMAL,
    otherwise None.
    """
    c = [Fraction(v) for v in c]
    a = [[Fraction(v) for v in row] for row in a_ub]
    b = [Fraction(v) for v in b_ub]
    n = len(c)
    m = len(a)
    if any(len(row) != n for row in a):
        raise ValueError("constraint matrix width does not match objective length")
    if m == 0:
        return (UNBOUNDED, None) if any(c) else (OPTIMAL, _ZERO)

    # columns: u_0..u_{n-1}, w_0..w_{n-1} (x = u - w), slacks, artificials
    nslack = m
    art_rows = [i for i in range(m) if b[i] < 0]
    nart = len(art_rows)
    ncols = 2 * n + nslack + nart
    art_col = {r: 2 * n + nslack + k for k, r in enumerate(art_rows)}
    tableau = []
    basis = []
    for i in range(m):
        flip = -_ONE if b[i] < 0 else _ONE
        row = [flip * v for v in a[i]] + [-flip * v for v in a[i]]
        slack = [_ZERO] * nslack
        slack[i] = flip
        row += slack + [_ZERO] * nart + [flip * b[i]]
        if i in art_col:
            row[art_col[i]] = _ONE
            basis.append(art_col[i])
        else:
            basis.append(2 * n + i)
        tableau.append(row)

    if nart:
        # phase 1: maximize -(sum of artificials); feasible iff optimum is 0
        cost = [_ZERO] * (ncols + 1)
        for k in range(nart):
            cost[2 * n + nslack + k] = -_ONE
        for r in range(m):
            if basis[r] >= 2 * n + nslack:
                for j in range(ncols + 1):
                    cost[j] += tableau[r][j]
        status = _run_simplex(tableau, cost, basis)
        assert status == OPTIMAL, "phase-1 objective is bounded above by zero"
        if cost[-1] > 0:  # objective = -cost[-1] < 0
            return INFEASIBLE, None
        # drive leftover (degenerate) artificials out of the basis
        zero_cost = [_ZERO] * (ncols + 1)
        for r in range(m):
            if basis[r] >= 2 * n + nslack:
                col = next((j for j in range(2 * n + nslack) if tableau[r][j]), None)
                if col is not None:
                    _pivot(tableau, zero_cost, basis, r, col)
        keep = [r for r in range(m) if basis[r] < 2 * n + nslack]
        tableau = [tableau[r][: 2 * n + nslack] + [tableau[r][-1]] for r in keep]
        basis = [basis[r] for r in keep]
        ncols = 2 * n + nslack

    # phase 2
    if not any(c):
        return OPTIMAL, _ZERO
    cost = c + [-v for v in c] + [_ZERO] * (ncols - 2 * n) + [_ZERO]
    for r in range(len(tableau)):
        if cost[basis[r]]:
            f = cost[basis[r]]
            for j in range(ncols + 1):
                cost[j] -= f * tableau[r][j]
    status = _run_simplex(tableau, cost, basis)
    if status == UNBOUNDED:
        return UNBOUNDED, None
    return OPTIMAL, -cost[-1]


def feasible(a_ub, b_ub) -> bool:
    """Exact feasibility of  a_ub x <= b_ub  over free x."""
    width = len(a_ub[0]) if a_ub else 0
    status, _ = solve_max([_ZERO] * width, a_ub, b_ub)
    return status != INFEASIBLE
