"""Symbolic mutual-information algebra.

Bound right-hand sides are rational combinations of conditional mutual
informations, optionally plus a rational constant (`MiSum`).  For equality
testing and cancellation every term is expanded into joint-entropy atoms,

    I(A; B | C) = H(AC) + H(BC) - H(ABC) - H(C),

and `InfoExpr` keeps the expansion in canonical form (sorted atoms, no
zero coefficients, H(empty) dropped), so two combinations are formally
equal iff their canonical forms coincide.  Formal equality is weaker than
information-theoretic equality: identities that need Shannon inequalities
are not decided here; the numeric evaluator provides the semantic check.
"""

from __future__ import annotations

from dataclasses import dataclass
from fractions import Fraction

from .graph import Dag, Q, Rv, U, d_separated


def _atom_key(rvs: frozenset[Rv]):
    return tuple(sorted(v.key() for v in rvs))


def _fmt_rvs(rvs) -> str:
    # Q prints last so conditioning sets read like hand-written bounds
    return ", ".join(str(v) for v in sorted(rvs, key=lambda v: (v.kind == "Q", v.key())))


@dataclass(frozen=True)
class MiTerm:
    """A single conditional mutual information I(left; right | given)."""

    left: frozenset[Rv]
    right: frozenset[Rv]
    given: frozenset[Rv]

    def __post_init__(self):
        object.__setattr__(self, "left", frozenset(self.left))
        object.__setattr__(self, "right", frozenset(self.right))
        object.__setattr__(self, "given", frozenset(self.given))
        if not self.left or not self.right:
            raise ValueError("mutual information needs two nonempty argument sets")
        if self.left & self.right or (self.left | self.right) & self.given:
            raise ValueError(
                f"mutual information argument sets overlap:"
                f" I({_fmt_rvs(self.left)}; {_fmt_rvs(self.right)} | {_fmt_rvs(self.given)})"
            )

    def key(self):
        return (_atom_key(self.left), _atom_key(self.right), _atom_key(self.given))

    def __str__(self) -> str:
        if self.given:
            return f"I({_fmt_rvs(self.left)}; {_fmt_rvs(self.right)} | {_fmt_rvs(self.given)})"
        return f"I({_fmt_rvs(self.left)}; {_fmt_rvs(self.right)})"


def mi(left, right, given=()) -> MiTerm:
    """Build I(left; right | given, Q); Q joins the conditioning always."""
    return MiTerm(frozenset(left), frozenset(right), frozenset(given) | {Q})


def maybe_mi(left, right, given=()) -> MiTerm | None:
    """Like `mi`, but an empty argument set yields None (the term is zero)."""
    if not left or not right:
        return None
    return mi(left, right, given)


@dataclass(frozen=True)
class InfoExpr:
    """Canonical signed sum of joint-entropy atoms."""

    atoms: tuple[tuple[frozenset[Rv], Fraction], ...]

    @staticmethod
    def of(mapping) -> "InfoExpr":
        acc: dict[frozenset[Rv], Fraction] = {}
        for rvs, coeff in mapping.items():
            rvs = frozenset(rvs)
            if not rvs:
                continue  # H(empty) = 0
            c = acc.get(rvs, Fraction(0)) + Fraction(coeff)
            if c:
                acc[rvs] = c
            elif rvs in acc:
                del acc[rvs]
        ordered = tuple(sorted(acc.items(), key=lambda kv: _atom_key(kv[0])))
        return InfoExpr(ordered)

    @staticmethod
    def zero() -> "InfoExpr":
        return InfoExpr(())

    @staticmethod
    def entropy(rvs, coeff=1) -> "InfoExpr":
        return InfoExpr.of({frozenset(rvs): Fraction(coeff)})

    def as_dict(self) -> dict[frozenset[Rv], Fraction]:
        return dict(self.atoms)

    @property
    def is_zero(self) -> bool:
        return not self.atoms

    def __add__(self, other: "InfoExpr") -> "InfoExpr":
        acc = self.as_dict()
        for rvs, c in other.atoms:
            acc[rvs] = acc.get(rvs, Fraction(0)) + c
        return InfoExpr.of(acc)

    def __sub__(self, other: "InfoExpr") -> "InfoExpr":
        return self + (-1) * other

    def __rmul__(self, scalar) -> "InfoExpr":
        scalar = Fraction(scalar)
        return InfoExpr.of({rvs: scalar * c for rvs, c in self.atoms})

    def __str__(self) -> str:
        if not self.atoms:
            return "0"
        parts = []
        for rvs, c in self.atoms:
            term = f"H({_fmt_rvs(rvs)})"
            if c == 1:
                piece = term
            elif c == -1:
                piece = f"-{term}"
            else:
                piece = f"{c} {term}"
            parts.append(piece)
        return " + ".join(parts).replace("+ -", "- ")


def mi_to_expr(t: MiTerm) -> InfoExpr:
    """Expand I(A;B|C) into its four joint-entropy atoms."""
    acc: dict[frozenset[Rv], Fraction] = {}
    for rvs, sign in (
        (t.left | t.given, 1),
        (t.right | t.given, 1),
        (t.left | t.right | t.given, -1),
        (t.given, -1),
    ):
        acc[rvs] = acc.get(rvs, Fraction(0)) + sign
    return InfoExpr.of(acc)


def combine(coeffs) -> InfoExpr:
    """Rational linear combination of expressions: sum of coeff * expr."""
    acc: dict[frozenset[Rv], Fraction] = {}
    for coeff, expr in coeffs:
        coeff = Fraction(coeff)
        for rvs, c in expr.atoms:
            acc[rvs] = acc.get(rvs, Fraction(0)) + coeff * c
    return InfoExpr.of(acc)


def as_single_mi(expr: InfoExpr) -> tuple[Fraction, MiTerm] | None:
    """Recognize q * I(A;B|C) with q > 0; None if the expression is not of
    that shape.  Used for the one sound symbolic dominance rule (a single
    conditional mutual information is never negative)."""
    if len(expr.atoms) != 4:
        return None
    pos = [(rvs, c) for rvs, c in expr.atoms if c > 0]
    neg = [(rvs, c) for rvs, c in expr.atoms if c < 0]
    if len(pos) != 2 or len(neg) != 2:
        return None
    q = pos[0][1]
    if pos[1][1] != q or {neg[0][1], neg[1][1]} != {-q}:
        return None
    (p1, _), (p2, _) = pos
    (n1, _), (n2, _) = neg
    if len(n1) > len(n2):
        n1, n2 = n2, n1
    if n1 != p1 & p2 or n2 != p1 | p2:
        return None
    a, b = p1 - n1, p2 - n1
    if not a or not b:
        return None
    if _atom_key(a) > _atom_key(b):
        a, b = b, a
    try:
        return q, MiTerm(a, b, n1)
    except ValueError:
        return None


def vanishes_under(term: MiTerm, dag: Dag) -> bool:
    """Whether the term is certified zero by the graph factorization.

    Conservative: only codeword variables and Q can be certified; a False
    answer means "not known to vanish", never "nonzero".
    """
    known = {Q} | {U(n) for n in dag.nodes}
    if (term.left | term.right | term.given) - known:
        return False
    return d_separated(dag, term.left, term.right, term.given)


@dataclass(frozen=True)
class MiSum:
    """A rational constant plus a rational combination of MI terms.

    Keeps the human-readable term list alongside the canonical entropy
    expansion; comparisons should use ``(const, expr)``.
    """

    const: Fraction
    terms: tuple[tuple[Fraction, MiTerm], ...]

    @staticmethod
    def of_terms(pairs, const=0) -> "MiSum":
        acc: dict[MiTerm, Fraction] = {}
        for coeff, term in pairs:
            coeff = Fraction(coeff)
            acc[term] = acc.get(term, Fraction(0)) + coeff
        merged = tuple(
            (c, t) for t, c in sorted(acc.items(), key=lambda kv: kv[0].key()) if c
        )
        return MiSum(Fraction(const), merged)

    @staticmethod
    def zero() -> "MiSum":
        return MiSum(Fraction(0), ())

    @staticmethod
    def constant(value) -> "MiSum":
        return MiSum(Fraction(value), ())

    @property
    def expr(self) -> InfoExpr:
        return combine((c, mi_to_expr(t)) for c, t in self.terms)

    @property
    def is_zero(self) -> bool:
        return not self.const and self.expr.is_zero

    def canonical(self) -> tuple[Fraction, InfoExpr]:
        return (self.const, self.expr)

    def __add__(self, other: "MiSum") -> "MiSum":
        return MiSum.of_terms(self.terms + other.terms, self.const + other.const)

    def __sub__(self, other: "MiSum") -> "MiSum":
        return self + other.scale(-1)

    def scale(self, scalar) -> "MiSum":
        scalar = Fraction(scalar)
        if not scalar:
            return MiSum.zero()
        return MiSum(
            scalar * self.const, tuple((scalar * c, t) for c, t in self.terms)
        )

    def __str__(self) -> str:
        parts = []
        if self.const:
            parts.append(str(self.const))
        for c, t in self.terms:
            if c == 1:
                piece = str(t)
            elif c == -1:
                piece = f"-{t}"
            else:
                piece = f"{c} {t}"
            parts.append(piece)
        if not parts:
            return "0"
        return " + ".join(parts).replace("+ -", "- ")
