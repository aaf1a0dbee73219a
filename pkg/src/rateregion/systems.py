"""Exact linear-inequality systems over rate symbols.

Coefficients are rationals and right-hand sides are symbolic
mutual-information combinations (`MiSum`), so elimination is sound
without ever comparing constant values: equalities are consumed by
substitution, and the pairwise (Fourier-Motzkin) step only ever adds
positive multiples of inequalities.

Symbolic redundancy removal is deliberately limited to two safe rules on
rows with identical left-hand sides: an identical right-hand side, or a
right-hand side exceeding another's by a nonnegative constant plus a
single positively-weighted conditional mutual information (which is never
negative).  Anything deeper needs Shannon-inequality reasoning and is
done numerically per channel by `prune_numeric`.
"""

from __future__ import annotations

import math
from dataclasses import dataclass
from fractions import Fraction

from . import lp
from .bounds import (
    EQ,
    GE,
    LE,
    R_BIN,
    R_CODE,
    R_MSG,
    R_SPLIT,
    RateIneq,
    RateSymbol,
    bin_rate,
    code_rate,
    msg_rate,
    split_rate,
)
from .expressions import MiSum, as_single_mi
from .network import Recomposition, SchemeError

DEFAULT_MAX_ROWS = 100_000


class EliminationLimitError(RuntimeError):
    """Raised when an elimination step exceeds the configured row cap."""

    def __init__(self, variable: RateSymbol, count: int, limit: int):
        self.variable = variable
        self.count = count
        self.limit = limit
        super().__init__(
            f"eliminating {variable} would produce {count} inequalities"
            f" (limit {limit}); raise the cap or simplify the scheme"
        )


def _normalized(row: RateIneq) -> RateIneq:
    """Scale to a canonical representative: sense <= (or ==), integer
    primitive coefficients, equalities sign-fixed on the leading symbol."""
    lhs, sense, rhs = row.lhs, row.sense, row.rhs
    if sense == GE:
        lhs = tuple((s, -c) for s, c in lhs)
        rhs = rhs.scale(-1)
        sense = LE
    scale = Fraction(1)
    if lhs:
        denom_lcm = 1
        num_gcd = 0
        for _, c in lhs:
            denom_lcm = denom_lcm * c.denominator // math.gcd(denom_lcm, c.denominator)
            num_gcd = math.gcd(num_gcd, abs(c.numerator))
        scale = Fraction(denom_lcm, num_gcd)
        if sense == EQ and lhs[0][1] * scale < 0:
            scale = -scale
    if scale != 1:
        lhs = tuple((s, c * scale) for s, c in lhs)
        rhs = rhs.scale(scale)
    return RateIneq(lhs, sense, rhs)


def _row_key(row: RateIneq):
    const, expr = row.rhs.canonical()
    return (row.sense, tuple((s.key(), c) for s, c in row.lhs), const, expr.atoms)


def _sort_key(row: RateIneq):
    const, expr = row.rhs.canonical()
    expr_key = tuple((tuple(sorted(v.key() for v in rvs)), c) for rvs, c in expr.atoms)
    return (
        0 if row.sense == EQ else 1,
        tuple((s.key(), c) for s, c in row.lhs),
        const,
        expr_key,
    )


def _provably_nonneg(rhs: MiSum) -> bool:
    """True when the right-hand side is a nonnegative constant plus
    positively-weighted conditional mutual informations (each >= 0)."""
    return rhs.const >= 0 and all(c >= 0 for c, _ in rhs.terms)


def _is_nonneg_marker(row: RateIneq) -> bool:
    return (
        row.sense == LE
        and len(row.lhs) == 1
        and row.lhs[0][1] < 0
        and row.rhs.is_zero
    )


def _drop_vacuous(rows) -> list[RateIneq]:
    """Drop rows implied by nonnegativity markers present in the system
    plus nonnegativity of conditional mutual information."""
    rows = list(rows)
    marked = {r.lhs[0][0] for r in rows if _is_nonneg_marker(r)}
    kept = []
    for r in rows:
        if (
            r.sense == LE
            and not _is_nonneg_marker(r)
            and all(c < 0 for _, c in r.lhs)
            and all(s in marked for s, _ in r.lhs)
            and _provably_nonneg(r.rhs)
        ):
            continue
        kept.append(r)
    return kept


def prune_dominated(rows) -> list[RateIneq]:
    """Drop duplicates and rows implied by another row with the same lhs
    and a right-hand side that is larger by a provably nonnegative amount."""
    seen = {}
    for row in rows:
        key = _row_key(row)
        if key not in seen:
            seen[key] = row
    unique = list(seen.values())
    by_lhs: dict[tuple, list[RateIneq]] = {}
    for row in unique:
        if row.sense == LE:
            by_lhs.setdefault(row.lhs, []).append(row)
    dropped = set()
    for lhs, group in by_lhs.items():
        for i, weaker in enumerate(group):
            if id(weaker) in dropped:
                continue
            for j, stronger in enumerate(group):
                if i == j or id(stronger) in dropped:
                    continue
                diff = weaker.rhs - stronger.rhs
                if diff.const < 0:
                    continue
                dexpr = diff.expr
                if dexpr.is_zero:
                    if diff.const > 0 or j < i:
                        dropped.add(id(weaker))
                        break
                else:
                    single = as_single_mi(dexpr)
                    if single is not None:
                        dropped.add(id(weaker))
                        break
    return [r for r in unique if id(r) not in dropped]


@dataclass(frozen=True)
class RateSystem:
    """A canonical collection of rate constraints."""

    variables: tuple[RateSymbol, ...]
    rows: tuple[RateIneq, ...]

    @staticmethod
    def build(rows) -> "RateSystem":
        normalized = [_normalized(r) for r in rows]
        pruned = prune_dominated(normalized)
        ordered = tuple(sorted(pruned, key=_sort_key))
        symbols = sorted({s for r in ordered for s in r.symbols()}, key=RateSymbol.key)
        return RateSystem(tuple(symbols), ordered)

    def pretty(self) -> list[str]:
        return [str(r) for r in self.rows]

    def __str__(self) -> str:
        return "\n".join(self.pretty())


def _add_rows(r1: RateIneq, m1: Fraction, r2: RateIneq, m2: Fraction, sense: str) -> RateIneq:
    coeffs: dict[RateSymbol, Fraction] = {}
    for s, c in r1.lhs:
        coeffs[s] = coeffs.get(s, Fraction(0)) + m1 * c
    for s, c in r2.lhs:
        coeffs[s] = coeffs.get(s, Fraction(0)) + m2 * c
    rhs = r1.rhs.scale(m1) + r2.rhs.scale(m2)
    return RateIneq.of(coeffs, sense, rhs)


def assemble(enc, dec, recomposition: Recomposition) -> RateSystem:
    """Combine both bound families with the structural equalities.

    Adds, per post-split message, the codebook-rate definition
    (L = R' + Rhat for binned messages, L = R' otherwise), the
    recomposition equality R = sum of R' for every genuinely split
    message, and nonnegativity of R' and Rhat.  Pass-through messages
    are renamed rather than equated at projection time.
    """
    enc, dec = tuple(enc), tuple(dec)
    parts_parent: dict = {}
    for parent, parts in recomposition.entries:
        for part in parts:
            parts_parent[part] = parent
    for row in enc + dec:
        for sym in row.symbols():
            if sym.kind in (R_SPLIT, R_BIN, R_CODE) and sym.owner not in parts_parent:
                raise SchemeError(
                    f"bound references {sym} but {sym.owner} is not a post-split message"
                )
    binned = sorted(
        {s.owner for row in enc for s in row.symbols() if s.kind == R_BIN},
        key=lambda m: m.key(),
    )
    rows = list(enc) + list(dec)
    for part, parent in sorted(parts_parent.items(), key=lambda kv: kv[0].key()):
        coeffs = {code_rate(part): Fraction(1), split_rate(part, parent): Fraction(-1)}
        if part in binned:
            coeffs[bin_rate(part)] = Fraction(-1)
        rows.append(RateIneq.of(coeffs, EQ, MiSum.zero()))
        rows.append(RateIneq.of({split_rate(part, parent): Fraction(1)}, GE, MiSum.zero()))
    for m in binned:
        rows.append(RateIneq.of({bin_rate(m): Fraction(1)}, GE, MiSum.zero()))
    for parent, parts in recomposition.entries:
        if len(parts) > 1:
            coeffs = {msg_rate(parent): Fraction(1)}
            for part in parts:
                coeffs[split_rate(part, parent)] = Fraction(-1)
            rows.append(RateIneq.of(coeffs, EQ, MiSum.zero()))
    return RateSystem.build(rows)


def eliminate(sys: RateSystem, variables, max_rows: int = DEFAULT_MAX_ROWS) -> RateSystem:
    """Project the system onto the remaining variables, exactly.

    Each variable is removed by substituting an equality that contains it
    when one exists, and by pairwise positive combination of opposing
    inequalities otherwise.  The result's solution set is the exact
    projection for every valuation of the symbolic right-hand sides.
    """
    rows = [_normalized(r) for r in sys.rows]
    for v in variables:
        if v not in {s for r in rows for s in r.symbols()}:
            continue
        eq_row = next((r for r in rows if r.sense == EQ and r.coeff(v)), None)
        if eq_row is not None:
            a = eq_row.coeff(v)
            new_rows = []
            for r in rows:
                if r is eq_row:
                    continue
                bcoef = r.coeff(v)
                if bcoef:
                    r = _add_rows(r, Fraction(1), eq_row, -bcoef / a, r.sense)
                new_rows.append(r)
            rows = new_rows
        else:
            pos = [r for r in rows if r.sense == LE and r.coeff(v) > 0]
            neg = [r for r in rows if r.sense == LE and r.coeff(v) < 0]
            keep = [r for r in rows if not r.coeff(v)]
            combos = []
            for p in pos:
                for q in neg:
                    combos.append(
                        _add_rows(p, 1 / p.coeff(v), q, -1 / q.coeff(v), LE)
                    )
            if len(keep) + len(combos) > max_rows:
                raise EliminationLimitError(v, len(keep) + len(combos), max_rows)
            rows = keep + combos
        rows = prune_dominated(_normalized(r) for r in rows)
        rows = [r for r in rows if r.lhs or not r.rhs.is_zero]
        rows = _drop_vacuous(rows)
    return RateSystem.build(rows)


def rename_symbols(sys: RateSystem, mapping) -> RateSystem:
    """Substitute symbols one-for-one (used to fold single-part split
    rates back into their message rates)."""
    rows = []
    for r in sys.rows:
        coeffs = {}
        for s, c in r.lhs:
            coeffs[mapping.get(s, s)] = coeffs.get(mapping.get(s, s), Fraction(0)) + c
        rows.append(RateIneq.of(coeffs, r.sense, r.rhs))
    return RateSystem.build(rows)


def drop_plain_nonnegativity(sys: RateSystem) -> RateSystem:
    """Remove rows implied by rate nonnegativity (which rate regions carry
    implicitly): bare R >= 0 markers and rows whose left-hand side has no
    positive coefficient while the right-hand side is provably >= 0."""
    kept = []
    for r in sys.rows:
        if r.sense == LE and all(c < 0 for _, c in r.lhs) and _provably_nonneg(r.rhs):
            continue
        kept.append(r)
    return RateSystem.build(kept)


def project_to_message_rates(
    sys: RateSystem, recomposition: Recomposition, max_rows: int = DEFAULT_MAX_ROWS
) -> RateSystem:
    """Eliminate codebook, bin-selection and split rates, leaving the
    region over original message rates.

    Order: L first (pure substitution), then Rhat, then the split rates of
    genuinely split messages; single-part messages are renamed R' -> R.
    Bare nonnegativity rows are dropped from the final presentation.
    """
    order = [s for s in sys.variables if s.kind == R_CODE]
    order += [s for s in sys.variables if s.kind == R_BIN]
    rename = {}
    for parent, parts in recomposition.entries:
        if len(parts) == 1:
            rename[split_rate(parts[0], parent)] = msg_rate(parent)
        else:
            order += [split_rate(p, parent) for p in parts]
    projected = eliminate(sys, order, max_rows=max_rows)
    renamed = rename_symbols(projected, rename)
    leftover = [s for s in renamed.variables if s.kind != R_MSG]
    if leftover:
        raise SchemeError(
            "projection left non-message symbols: " + ", ".join(map(str, leftover))
        )
    return drop_plain_nonnegativity(renamed)


def prune_numeric(sys: RateSystem, pmf, tol=Fraction(0)) -> RateSystem:
    """Remove inequalities that exact LP certifies redundant once the
    right-hand sides are instantiated on ``pmf``.

    The instantiated constants (floats) are rationalized exactly, so a row
    is only removed when the optimum of its left-hand side over the other
    rows provably stays within ``tol`` of its bound; facets always stay.
    """
    from . import numeric

    tol = Fraction(tol)
    variables = list(sys.variables)
    index = {s: i for i, s in enumerate(variables)}

    def as_vector(row):
        vec = [Fraction(0)] * len(variables)
        for s, c in row.lhs:
            vec[index[s]] = c
        return vec, Fraction(numeric.eval_msum(pmf, row.rhs))

    constraints = []
    for row in sys.rows:
        vec, val = as_vector(row)
        if row.sense == EQ:
            constraints.append((row, vec, val, True))
        else:
            constraints.append((row, vec, val, False))

    kept = list(constraints)
    result = []
    for i, (row, vec, val, is_eq) in enumerate(constraints):
        if is_eq:
            result.append(row)
            continue
        a_ub, b_ub = [], []
        for j, (r2, vec2, val2, eq2) in enumerate(kept):
            if r2 is row:
                continue
            a_ub.append(vec2)
            b_ub.append(val2)
            if eq2:
                a_ub.append([-c for c in vec2])
                b_ub.append(-val2)
        status, best = lp.solve_max(vec, a_ub, b_ub)
        if status == lp.OPTIMAL and best <= val + tol:
            kept = [k for k in kept if k[0] is not row]
        else:
            result.append(row)
    return RateSystem.build(result)
