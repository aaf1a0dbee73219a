"""Inequality generation for a layered/binned scheme.

Two families of bounds over the (post-split) codeword variables:

* covering-type lower bounds on the bin-selection rates: for every closed
  subset of the binned node set, the rates of the remaining binned nodes
  must jointly exceed the statistical dependency their re-selected
  codewords have to emulate (dependency on each node's oriented binning
  parents that are either re-selected with it or not binned at all, given
  its superposition ancestors).
* packing-type upper bounds on the codebook rates decodable at a receiver:
  for every nonempty closed subset of the receiver's decoding set, the
  summed codebook rates cannot exceed what the channel output plus the
  remaining decoded codewords can disambiguate.

"Closed" means closed under superposition descendants within the base
set: re-selecting or re-testing a bottom codeword drags along everything
stacked on it.  A stricter variant (joint-binning classes entering
subsets atomically) would enumerate fewer subsets; all closed subsets are
enumerated here.

The side the covering sum ranges over is configurable (`SVO_SUBSET` /
`SVO_COMPLEMENT`).  The complement reading reproduces the classical
mutual-covering specializations (it is the calibrated default); the
subset reading is exposed for comparison and fails them.
"""

from __future__ import annotations

import itertools
import warnings
from dataclasses import dataclass
from fractions import Fraction

from .expressions import MiSum, MiTerm, maybe_mi, mi, vanishes_under
from .graph import Dag, U, Y
from .network import MessageId

R_MSG = "R"
R_SPLIT = "R'"
R_BIN = "Rhat"
R_CODE = "L"
_KIND_RANK = {R_MSG: 0, R_SPLIT: 1, R_BIN: 2, R_CODE: 3}

LE = "<="
GE = ">="
EQ = "=="

SVO_SUBSET = "subset"
SVO_COMPLEMENT = "complement"
SVO_MODES = (SVO_SUBSET, SVO_COMPLEMENT)
DEFAULT_SVO_MODE = SVO_COMPLEMENT


@dataclass(frozen=True)
class RateSymbol:
    """A rate variable: message rate R, split rate R', bin-selection rate
    Rhat, or codebook rate L (with L = R' + Rhat for binned nodes)."""

    kind: str
    owner: MessageId
    parent: MessageId | None = None  # split parent, R' only

    def key(self):
        pk = self.parent.key() if self.parent is not None else ()
        return (_KIND_RANK[self.kind], self.owner.key(), pk)

    def __str__(self) -> str:
        return f"{self.kind}[{self.owner}]"


def msg_rate(m: MessageId) -> RateSymbol:
    return RateSymbol(R_MSG, m)


def split_rate(part: MessageId, parent: MessageId) -> RateSymbol:
    return RateSymbol(R_SPLIT, part, parent)


def bin_rate(m: MessageId) -> RateSymbol:
    return RateSymbol(R_BIN, m)


def code_rate(m: MessageId) -> RateSymbol:
    return RateSymbol(R_CODE, m)


@dataclass(frozen=True)
class RateIneq:
    """A linear constraint: sum of coeff * symbol  (<=, >=, ==)  rhs."""

    lhs: tuple[tuple[RateSymbol, Fraction], ...]
    sense: str
    rhs: MiSum

    @staticmethod
    def of(coeffs, sense: str, rhs: MiSum) -> "RateIneq":
        items = tuple(
            (s, Fraction(c))
            for s, c in sorted(coeffs.items(), key=lambda kv: kv[0].key())
            if c
        )
        return RateIneq(items, sense, rhs)

    def coeff(self, sym: RateSymbol) -> Fraction:
        for s, c in self.lhs:
            if s == sym:
                return c
        return Fraction(0)

    def symbols(self) -> tuple[RateSymbol, ...]:
        return tuple(s for s, _ in self.lhs)

    def __str__(self) -> str:
        if not self.lhs:
            left = "0"
        else:
            parts = []
            for s, c in self.lhs:
                if c == 1:
                    parts.append(str(s))
                elif c == -1:
                    parts.append(f"-{s}")
                else:
                    parts.append(f"{c} {s}")
            left = " + ".join(parts).replace("+ -", "- ")
        return f"{left} {self.sense} {self.rhs}"


@dataclass(frozen=True)
class SubsetFamily:
    """All subsets of ``base`` closed under superposition descendants
    within ``base``, in canonical order (empty set first)."""

    base: tuple[MessageId, ...]
    members: tuple[frozenset[MessageId], ...]


def binned_set(dag: Dag) -> tuple[MessageId, ...]:
    """Nodes whose codeword carries a bin index, i.e. nodes binned against
    something (both members of every mutual pair qualify)."""
    binners = {b for (_, b) in dag.graph.bin_edges}
    return tuple(sorted(binners, key=MessageId.key))


def valid_subsets(base, dag: Dag) -> SubsetFamily:
    base = tuple(sorted(set(base), key=MessageId.key))
    base_set = frozenset(base)
    members = []
    for r in range(len(base) + 1):
        for combo in itertools.combinations(base, r):
            s = frozenset(combo)
            if all((dag.sup_descendants(n) & base_set) <= s for n in s):
                members.append(s)
    members.sort(key=lambda s: (len(s), tuple(sorted(n.key() for n in s))))
    return SubsetFamily(base, tuple(members))


def _u_set(nodes) -> frozenset:
    return frozenset(U(n) for n in nodes)


def _covering_cost(dag: Dag, kept: frozenset[MessageId], redrawn) -> MiSum:
    """Dependency the re-selected codewords must emulate when the bins of
    ``kept`` stay put: per re-drawn node, its dependency on binning parents
    outside ``kept`` (re-drawn with it, or unbinned and thus fixed), given
    its superposition ancestors."""
    terms = []
    for n in sorted(redrawn, key=MessageId.key):
        partners = dag.bin_parents(n) - kept
        t = maybe_mi(_u_set([n]), _u_set(partners), _u_set(dag.sup_ancestors(n)))
        if t is not None and not vanishes_under(t, dag):
            terms.append((1, t))
    return MiSum.of_terms(terms)


def encoding_bounds(dag: Dag, mode: str = DEFAULT_SVO_MODE) -> tuple[RateIneq, ...]:
    """Lower bounds on the bin-selection rates Rhat.

    One inequality per closed subset S of the binned set: the sum of Rhat
    over the mode-selected side (S or its complement) must cover the
    dependency cost of re-drawing the complement.  Rows whose cost is
    identically zero are pruned (they only restate Rhat >= 0).
    """
    if mode not in SVO_MODES:
        raise ValueError(f"unknown covering-sum mode {mode!r}; use one of {SVO_MODES}")
    sb = binned_set(dag)
    sb_set = frozenset(sb)
    rows = []
    for s in valid_subsets(sb, dag).members:
        redrawn = sb_set - s
        rhs = _covering_cost(dag, kept=s, redrawn=redrawn)
        if rhs.is_zero:
            continue
        lhs_nodes = s if mode == SVO_SUBSET else redrawn
        rows.append(RateIneq.of({bin_rate(n): 1 for n in lhs_nodes}, GE, rhs))
    return tuple(rows)


def decoding_set(dag: Dag, z: int) -> tuple[MessageId, ...]:
    """Messages decoded at receiver z."""
    return tuple(m for m in dag.nodes if z in m.rx)


def decoding_bounds(dag: Dag, z: int) -> tuple[RateIneq, ...]:
    """Upper bounds on the codebook rates L jointly decodable at receiver z.

    One inequality per nonempty closed subset S of the decoding set:
    sum of L over S is at most the channel information about S's codewords
    given the rest of the decoding set, plus each S-member's dependency on
    binning parents inside S given superposition ancestors outside S.
    """
    dset = decoding_set(dag, z)
    if not dset:
        warnings.warn(f"receiver {z} decodes no messages; no bounds generated")
        return ()
    dset_frozen = frozenset(dset)
    rows = []
    for s in valid_subsets(dset, dag).members:
        if not s:
            continue
        rest = dset_frozen - s
        terms = []
        t1 = mi({Y(z)}, _u_set(s), _u_set(rest))
        if not vanishes_under(t1, dag):
            terms.append((1, t1))
        for n in sorted(s, key=MessageId.key):
            t2 = maybe_mi(
                _u_set([n]),
                _u_set(dag.bin_parents(n) & s),
                _u_set(dag.sup_ancestors(n) & rest),
            )
            if t2 is not None and not vanishes_under(t2, dag):
                terms.append((1, t2))
        rows.append(RateIneq.of({code_rate(n): 1 for n in s}, LE, MiSum.of_terms(terms)))
    return tuple(rows)


def all_decoding_bounds(dag: Dag) -> tuple[RateIneq, ...]:
    """Decoding bounds of every receiver, concatenated in receiver order."""
    rows = []
    for z in range(1, dag.network.n_rx + 1):
        rows.extend(decoding_bounds(dag, z))
    return tuple(rows)
