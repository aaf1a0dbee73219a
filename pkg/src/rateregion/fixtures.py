"""Built-in calibration schemes with hand-derived expected regions.

Each fixture packages a scheme, the region the classical single-letter
analysis assigns to it, and (where useful) a concrete channel
distribution for numeric cross-checks.  The expected systems are
constructed term by term in `_expected_*` below — they are re-derivable
hand calculations, not trusted constants:

* ``p2p``: a single codebook through a channel supports any rate up to
  I(Y;U|Q) (single-codeword disambiguation).
* ``mac2``: joint decoding of two independent codebooks at one receiver
  gives the corner bounds I(Y;U_i|U_j,Q) and the sum bound I(Y;U_1U_2|Q).
* ``bc2``: a two-layer stack decoded at nested receivers; the weak
  receiver peels the bottom layer, the strong one decodes both.  The
  bottom codeword plays the usual auxiliary "cloud" and the top codeword
  is the channel input.
* ``marton2``: two mutually precoded codewords to separate receivers; the
  bin-selection budget Rhat_1 + Rhat_2 >= I(U_1;U_2|Q) eliminates into
  the -I(U_1;U_2|Q) sum-rate correction.
* ``hk2``: split messages into private and common parts, stack private on
  common; the expected side is the full list of per-receiver joint-decoding
  bounds over the split rates, checked by linear-programming membership
  (region equality as sets; presentations differ after projection).
"""

from __future__ import annotations

import random
from dataclasses import dataclass
from fractions import Fraction

import numpy as np

from . import lp
from .bounds import (
    DEFAULT_SVO_MODE,
    GE,
    LE,
    RateIneq,
    all_decoding_bounds,
    encoding_bounds,
    msg_rate,
    split_rate,
)
from .expressions import MiSum, mi
from .graph import Edge, BINNING, SUPERPOSITION, U, Y, build, check_assumptions, factorize, orient
from .network import NetworkSpec, SplitDecl, apply_splits, message, validate_network
from .numeric import DmcSpec, JointPmf, compose_pmf, eval_msum, eval_region
from .systems import RateSystem, assemble, project_to_message_rates


def _row(coeffs, sense, terms) -> RateIneq:
    return RateIneq.of(coeffs, sense, MiSum.of_terms(terms))


@dataclass(frozen=True)
class Fixture:
    name: str
    network: NetworkSpec
    splits: tuple[SplitDecl, ...]
    edges: tuple[Edge, ...]
    expected: RateSystem | None
    hand_bounds: tuple[RateIneq, ...] | None  # over split rates, LP-checked
    make_pmf: object | None  # () -> (JointPmf, DmcSpec)


@dataclass
class FixtureReport:
    name: str
    mode: str
    error: str | None = None
    symbolic_match: bool | None = None
    symbolic_missing: tuple = ()
    symbolic_extra: tuple = ()
    numeric_points: int = 0
    numeric_disagreements: int = 0
    max_violation: float = 0.0

    @property
    def passed(self) -> bool:
        return (
            self.error is None
            and self.symbolic_match is not False
            and self.numeric_disagreements == 0
        )

    def summary(self) -> str:
        if self.error is not None:
            return f"error at {self.error}"
        bits = []
        if self.symbolic_match is not None:
            bits.append("symbolic match" if self.symbolic_match else "symbolic MISMATCH")
        if self.numeric_points:
            bits.append(
                f"{self.numeric_points} points, {self.numeric_disagreements} disagreements"
            )
        return "; ".join(bits) if bits else "nothing checked"


# ---------------------------------------------------------------- schemes

_P2P_M = message(1, 1)
_MAC_M1, _MAC_M2 = message(1, 1), message(2, 1)
_BC_TOP, _BC_BOT = message(1, 1), message(1, (1, 2))
_MAR_A, _MAR_B = message(1, 1), message(1, 2)
_HK_W1, _HK_W2 = message(1, 1), message(2, 2)
_HK_P1, _HK_C1 = message(1, 1), message(1, (1, 2))
_HK_P2, _HK_C2 = message(2, 2), message(2, (1, 2))


def _expected_p2p() -> RateSystem:
    u = U(_P2P_M)
    return RateSystem.build(
        [_row({msg_rate(_P2P_M): 1}, LE, [(1, mi({Y(1)}, {u}))])]
    )


def _expected_mac2() -> RateSystem:
    u1, u2 = U(_MAC_M1), U(_MAC_M2)
    r1, r2 = msg_rate(_MAC_M1), msg_rate(_MAC_M2)
    return RateSystem.build(
        [
            _row({r1: 1}, LE, [(1, mi({Y(1)}, {u1}, {u2}))]),
            _row({r2: 1}, LE, [(1, mi({Y(1)}, {u2}, {u1}))]),
            _row({r1: 1, r2: 1}, LE, [(1, mi({Y(1)}, {u1, u2}))]),
        ]
    )


def _expected_bc2() -> RateSystem:
    utop, ubot = U(_BC_TOP), U(_BC_BOT)
    r1, r2 = msg_rate(_BC_TOP), msg_rate(_BC_BOT)
    return RateSystem.build(
        [
            _row({r1: 1}, LE, [(1, mi({Y(1)}, {utop}, {ubot}))]),
            _row({r2: 1}, LE, [(1, mi({Y(2)}, {ubot}))]),
            _row({r1: 1, r2: 1}, LE, [(1, mi({Y(1)}, {utop, ubot}))]),
        ]
    )


def _expected_marton2() -> RateSystem:
    ua, ub = U(_MAR_A), U(_MAR_B)
    ra, rb = msg_rate(_MAR_A), msg_rate(_MAR_B)
    return RateSystem.build(
        [
            _row({ra: 1}, LE, [(1, mi({Y(1)}, {ua}))]),
            _row({rb: 1}, LE, [(1, mi({Y(2)}, {ub}))]),
            _row(
                {ra: 1, rb: 1},
                LE,
                [(1, mi({Y(1)}, {ua})), (1, mi({Y(2)}, {ub})), (-1, mi({ua}, {ub}))],
            ),
        ]
    )


def _hand_bounds_hk2() -> tuple[RateIneq, ...]:
    """Joint-decoding bounds of the split scheme, written out by hand.

    Receiver 1 decodes (private 1, common 1, common 2) with private 1
    stacked on common 1, so the decodable subsets are those containing
    private 1 whenever they contain common 1; receiver 2 mirrors this.
    """
    s1 = split_rate(_HK_P1, _HK_W1)
    t1 = split_rate(_HK_C1, _HK_W1)
    s2 = split_rate(_HK_P2, _HK_W2)
    t2 = split_rate(_HK_C2, _HK_W2)
    up1, uc1, up2, uc2 = U(_HK_P1), U(_HK_C1), U(_HK_P2), U(_HK_C2)
    y1, y2 = Y(1), Y(2)
    return (
        _row({s1: 1}, LE, [(1, mi({y1}, {up1}, {uc1, uc2}))]),
        _row({t2: 1}, LE, [(1, mi({y1}, {uc2}, {up1, uc1}))]),
        _row({s1: 1, t2: 1}, LE, [(1, mi({y1}, {up1, uc2}, {uc1}))]),
        _row({s1: 1, t1: 1}, LE, [(1, mi({y1}, {up1, uc1}, {uc2}))]),
        _row({s1: 1, t1: 1, t2: 1}, LE, [(1, mi({y1}, {up1, uc1, uc2}))]),
        _row({s2: 1}, LE, [(1, mi({y2}, {up2}, {uc2, uc1}))]),
        _row({t1: 1}, LE, [(1, mi({y2}, {uc1}, {up2, uc2}))]),
        _row({s2: 1, t1: 1}, LE, [(1, mi({y2}, {up2, uc1}, {uc2}))]),
        _row({s2: 1, t2: 1}, LE, [(1, mi({y2}, {up2, uc2}, {uc1}))]),
        _row({s2: 1, t2: 1, t1: 1}, LE, [(1, mi({y2}, {up2, uc2, uc1}))]),
    )


# ------------------------------------------------------------------ pmfs

def _bsc(p: float) -> np.ndarray:
    return np.array([[1 - p, p], [p, 1 - p]])


def _pipeline(fx: Fixture, mode: str):
    split, recomp = apply_splits(fx.network, fx.splits)
    g = build(split, fx.edges)
    dag = orient(g)
    enc = encoding_bounds(dag, mode)
    dec = all_decoding_bounds(dag)
    sys_ = assemble(enc, dec, recomp)
    region = project_to_message_rates(sys_, recomp)
    return dag, recomp, region


def _identity_x(q_card: int, u_sizes: tuple[int, ...], pick: int) -> np.ndarray:
    """Encoder table that copies the ``pick``-th of its codewords."""
    shape = (q_card,) + u_sizes
    out = np.zeros(shape, dtype=int)
    for idx in np.ndindex(shape):
        out[idx] = idx[1 + pick]
    return out


def _make_pmf_p2p(p: float = 0.11):
    fx = get_fixture("p2p")
    dag, _, _ = _pipeline(fx, DEFAULT_SVO_MODE)
    fact = factorize(dag)
    ch = DmcSpec((2,), (2,), _bsc(p))
    pmf = compose_pmf(
        fact,
        [1.0],
        {_P2P_M: np.array([[0.5, 0.5]])},
        {1: _identity_x(1, (2,), 0)},
        ch,
    )
    return pmf, ch


def _make_pmf_mac2():
    fx = get_fixture("mac2")
    dag, _, _ = _pipeline(fx, DEFAULT_SVO_MODE)
    fact = factorize(dag)
    # orthogonal outputs: y = (x1, x2), so the corner bounds meet the sum bound
    table = np.zeros((2, 2, 4))
    for x1 in range(2):
        for x2 in range(2):
            table[x1, x2, 2 * x1 + x2] = 1.0
    ch = DmcSpec((2, 2), (4,), table)
    pmf = compose_pmf(
        fact,
        [1.0],
        {_MAC_M1: np.array([[0.5, 0.5]]), _MAC_M2: np.array([[0.5, 0.5]])},
        {1: _identity_x(1, (2,), 0), 2: _identity_x(1, (2,), 0)},
        ch,
    )
    return pmf, ch


def _make_pmf_mac2_xor():
    fx = get_fixture("mac2")
    dag, _, _ = _pipeline(fx, DEFAULT_SVO_MODE)
    fact = factorize(dag)
    table = np.zeros((2, 2, 2))
    for x1 in range(2):
        for x2 in range(2):
            table[x1, x2, x1 ^ x2] = 1.0
    ch = DmcSpec((2, 2), (2,), table)
    pmf = compose_pmf(
        fact,
        [1.0],
        {_MAC_M1: np.array([[0.5, 0.5]]), _MAC_M2: np.array([[0.5, 0.5]])},
        {1: _identity_x(1, (2,), 0), 2: _identity_x(1, (2,), 0)},
        ch,
    )
    return pmf, ch


def _make_pmf_bc2():
    fx = get_fixture("bc2")
    dag, _, _ = _pipeline(fx, DEFAULT_SVO_MODE)
    fact = factorize(dag)
    noise1, noise2 = 0.05, 0.2
    table = np.zeros((2, 2, 2))
    for x in range(2):
        for y1 in range(2):
            for y2 in range(2):
                p1 = 1 - noise1 if y1 == x else noise1
                p2 = 1 - noise2 if y2 == x else noise2
                table[x, y1, y2] = p1 * p2
    ch = DmcSpec((2,), (2, 2), table)
    # bottom (cloud) uniform, top drawn from the bottom through a 0.3 flip
    u_bot = np.array([[0.5, 0.5]])
    u_top = np.array([[[0.7, 0.3], [0.3, 0.7]]])
    pmf = compose_pmf(
        fact,
        [1.0],
        {_BC_BOT: u_bot, _BC_TOP: u_top},
        {1: _identity_x(1, (2, 2), 0)},  # codewords in canonical order: top, bottom
        ch,
    )
    return pmf, ch


def _make_pmf_marton2():
    fx = get_fixture("marton2")
    dag, _, _ = _pipeline(fx, DEFAULT_SVO_MODE)
    fact = factorize(dag)
    # correlated pair via the oriented class: P(a), P(b | a)
    u_a = np.array([[0.5, 0.5]])
    u_b = np.array([[[0.8, 0.2], [0.2, 0.8]]])
    # input is the pair (a, b); each receiver sees its own bit, noisy
    x_table = np.zeros((1, 2, 2), dtype=int)
    for a in range(2):
        for b in range(2):
            x_table[0, a, b] = 2 * a + b
    noise1, noise2 = 0.05, 0.1
    table = np.zeros((4, 2, 2))
    for x in range(4):
        a, b = divmod(x, 2)
        for y1 in range(2):
            for y2 in range(2):
                p1 = 1 - noise1 if y1 == a else noise1
                p2 = 1 - noise2 if y2 == b else noise2
                table[x, y1, y2] = p1 * p2
    ch = DmcSpec((4,), (2, 2), table)
    pmf = compose_pmf(fact, [1.0], {_MAR_A: u_a, _MAR_B: u_b}, {1: x_table}, ch)
    return pmf, ch


def _make_pmf_hk2():
    fx = get_fixture("hk2")
    dag, _, _ = _pipeline(fx, DEFAULT_SVO_MODE)
    fact = factorize(dag)
    uc1 = np.array([[0.5, 0.5]])
    uc2 = np.array([[0.6, 0.4]])
    up1 = np.array([[[0.8, 0.2], [0.3, 0.7]]])  # P(p1 | c1)
    up2 = np.array([[[0.75, 0.25], [0.2, 0.8]]])  # P(p2 | c2)
    # canonical node order: p1=(1->1), c1=(1->1,2), c2=(2->1,2), p2=(2->2)
    x1 = _identity_x(1, (2, 2), 0)  # transmitter 1 encodes p1, c1; sends p1
    x2 = np.zeros((1, 2, 2), dtype=int)  # transmitter 2 encodes c2, p2; sends p2
    for a in range(2):
        for b in range(2):
            x2[0, a, b] = b
    table = np.zeros((2, 2, 2, 2))
    for x1v in range(2):
        for x2v in range(2):
            for y1 in range(2):
                for y2 in range(2):
                    p1 = 0.94 if y1 == (x1v ^ x2v) else 0.06
                    flip2 = 0.12 if x1v == 0 else 0.25
                    p2 = 1 - flip2 if y2 == x2v else flip2
                    table[x1v, x2v, y1, y2] = p1 * p2
    ch = DmcSpec((2, 2), (2, 2), table)
    pmf = compose_pmf(
        fact,
        [1.0],
        {_HK_P1: up1, _HK_C1: uc1, _HK_C2: uc2, _HK_P2: up2},
        {1: x1, 2: x2},
        ch,
    )
    return pmf, ch


# -------------------------------------------------------------- registry

def _fixtures() -> dict[str, Fixture]:
    return {
        "p2p": Fixture(
            "p2p",
            NetworkSpec(1, 1, (_P2P_M,)),
            (),
            (),
            _expected_p2p(),
            None,
            _make_pmf_p2p,
        ),
        "mac2": Fixture(
            "mac2",
            NetworkSpec(2, 1, (_MAC_M1, _MAC_M2)),
            (),
            (),
            _expected_mac2(),
            None,
            _make_pmf_mac2_xor,
        ),
        "bc2": Fixture(
            "bc2",
            NetworkSpec(1, 2, (_BC_TOP, _BC_BOT)),
            (),
            (Edge(_BC_BOT, _BC_TOP, SUPERPOSITION),),
            _expected_bc2(),
            None,
            _make_pmf_bc2,
        ),
        "marton2": Fixture(
            "marton2",
            NetworkSpec(1, 2, (_MAR_A, _MAR_B)),
            (),
            (Edge(_MAR_A, _MAR_B, BINNING), Edge(_MAR_B, _MAR_A, BINNING)),
            _expected_marton2(),
            None,
            _make_pmf_marton2,
        ),
        "hk2": Fixture(
            "hk2",
            NetworkSpec(2, 2, (_HK_W1, _HK_W2)),
            (SplitDecl(_HK_W1, (_HK_P1, _HK_C1)), SplitDecl(_HK_W2, (_HK_P2, _HK_C2))),
            (Edge(_HK_C1, _HK_P1, SUPERPOSITION), Edge(_HK_C2, _HK_P2, SUPERPOSITION)),
            None,
            _hand_bounds_hk2(),
            _make_pmf_hk2,
        ),
    }


FIXTURE_NAMES = ("p2p", "mac2", "bc2", "marton2", "hk2")


def get_fixture(name: str) -> Fixture:
    table = _fixtures()
    if name not in table:
        raise KeyError(f"unknown fixture {name!r}; available: {', '.join(FIXTURE_NAMES)}")
    return table[name]


# -------------------------------------------------------- numeric oracle

def _hand_lp_membership(fx: Fixture, pmf: JointPmf, shift: float):
    """Membership in the hand-written split-rate system via exact LP:
    a rate pair is inside iff nonnegative split rates summing to it
    satisfy every hand bound (relaxed/tightened by ``shift``)."""
    split, recomp = apply_splits(fx.network, fx.splits)
    originals = [p for p, _ in recomp.entries]
    split_syms = []
    for parent, parts in recomp.entries:
        split_syms.extend(split_rate(p, parent) for p in parts)
    index = {s: i for i, s in enumerate(split_syms)}
    rows_a, rows_b = [], []
    for row in fx.hand_bounds:
        vec = [Fraction(0)] * len(split_syms)
        for s, c in row.lhs:
            vec[index[s]] = c
        rows_a.append(vec)
        rows_b.append(Fraction(eval_msum(pmf, row.rhs)) + Fraction(shift))
    for i in range(len(split_syms)):  # nonnegativity
        vec = [Fraction(0)] * len(split_syms)
        vec[i] = Fraction(-1)
        rows_a.append(vec)
        rows_b.append(Fraction(0))

    def member(point) -> bool:
        a = [list(v) for v in rows_a]
        b = list(rows_b)
        for parent, target in zip(originals, point):
            vec = [Fraction(0)] * len(split_syms)
            for s in split_syms:
                if s.parent == parent:
                    vec[index[s]] = Fraction(1)
            t = Fraction(float(target))
            a.append(list(vec))
            b.append(t)
            a.append([-c for c in vec])
            b.append(-t)
        return lp.feasible(a, b)

    def coordinate_max(i: int) -> float:
        obj = [Fraction(0)] * len(split_syms)
        for s in split_syms:
            if s.parent == originals[i]:
                obj[index[s]] = Fraction(1)
        status, value = lp.solve_max(obj, rows_a, rows_b)
        return float(value) if status == lp.OPTIMAL else 1.0

    return originals, member, coordinate_max


def run_fixture(fx: Fixture, mode: str = DEFAULT_SVO_MODE, points: int = 1000) -> FixtureReport:
    """Run the full pipeline on a fixture and compare with its oracle."""
    report = FixtureReport(name=fx.name, mode=mode)
    stage = "validate_network"
    try:
        problems = validate_network(fx.network)
        if problems:
            raise ValueError("; ".join(problems))
        stage = "apply_splits"
        split, recomp = apply_splits(fx.network, fx.splits)
        stage = "build"
        g = build(split, fx.edges)
        stage = "check_assumptions"
        problems = check_assumptions(g)
        if problems:
            raise ValueError("; ".join(problems))
        stage = "orient"
        dag = orient(g)
        stage = "bounds"
        enc = encoding_bounds(dag, mode)
        dec = all_decoding_bounds(dag)
        stage = "assemble"
        sys_ = assemble(enc, dec, recomp)
        stage = "eliminate"
        region = project_to_message_rates(sys_, recomp)
    except Exception as exc:
        report.error = f"{stage}: {exc}"
        return report

    if fx.expected is not None:
        got = {str(r) for r in region.rows}
        want = {str(r) for r in fx.expected.rows}
        got_keys = _canonical_row_keys(region)
        want_keys = _canonical_row_keys(fx.expected)
        report.symbolic_match = got_keys == want_keys
        if not report.symbolic_match:
            report.symbolic_missing = tuple(sorted(want - got))
            report.symbolic_extra = tuple(sorted(got - want))

    if fx.make_pmf is not None and report.symbolic_match is not False:
        try:
            stage = "numeric"
            pmf, _ = fx.make_pmf()
            gen = eval_region(region, pmf)
            rng = random.Random(20260810)
            tol = 1e-9
            if fx.expected is not None:
                exp = eval_region(fx.expected, pmf)
                box = _bounding_box(exp)
                inside = lambda pt: exp.slack(pt)  # noqa: E731
                for _ in range(points):
                    pt = [rng.uniform(0.0, hi) for hi in box]
                    s_gen, s_exp = gen.slack(pt), inside(pt)
                    if s_gen > tol and s_exp < -tol or s_gen < -tol and s_exp > tol:
                        report.numeric_disagreements += 1
                        report.max_violation = max(
                            report.max_violation, min(abs(s_gen), abs(s_exp))
                        )
                    report.numeric_points += 1
            elif fx.hand_bounds is not None:
                originals, _, coordinate_max = _hand_lp_membership(fx, pmf, 0.0)
                _, member_relaxed, _ = _hand_lp_membership(fx, pmf, tol)
                _, member_tight, _ = _hand_lp_membership(fx, pmf, -tol)
                box = [1.1 * coordinate_max(i) + 0.05 for i in range(len(originals))]
                for _ in range(points):
                    pt = [rng.uniform(0.0, hi) for hi in box]
                    s_gen = gen.slack(pt)
                    if s_gen > tol and not member_relaxed(pt):
                        report.numeric_disagreements += 1
                        report.max_violation = max(report.max_violation, s_gen)
                    elif s_gen < -tol and member_tight(pt):
                        report.numeric_disagreements += 1
                        report.max_violation = max(report.max_violation, -s_gen)
                    report.numeric_points += 1
        except Exception as exc:
            report.error = f"{stage}: {exc}"
    return report


def _canonical_row_keys(sys_: RateSystem):
    keys = set()
    for r in sys_.rows:
        const, expr = r.rhs.canonical()
        keys.add((r.sense, tuple((s.key(), c) for s, c in r.lhs), const, expr.atoms))
    return keys


def _bounding_box(region) -> list[float]:
    """Coordinate-wise maxima of a numeric region, padded."""
    index = {s: i for i, s in enumerate(region.variables)}
    out = []
    for i, _ in enumerate(region.variables):
        a_ub, b_ub = [], []
        for lhs, sense, value in region.rows:
            vec = [Fraction(0)] * len(region.variables)
            for s, c in lhs:
                vec[index[s]] = c
            if sense in (LE, GE):
                if sense == GE:
                    vec = [-c for c in vec]
                    value = -value
                a_ub.append(vec)
                b_ub.append(Fraction(float(value)))
        for j in range(len(region.variables)):
            vec = [Fraction(0)] * len(region.variables)
            vec[j] = Fraction(-1)
            a_ub.append(vec)
            b_ub.append(Fraction(0))
        obj = [Fraction(0)] * len(region.variables)
        obj[i] = Fraction(1)
        status, value = lp.solve_max(obj, a_ub, b_ub)
        hi = float(value) if status == lp.OPTIMAL else 1.0
        out.append(1.1 * hi + 0.05)
    return out


def run_all(mode: str = DEFAULT_SVO_MODE, points: int = 1000) -> list[FixtureReport]:
    return [run_fixture(get_fixture(name), mode, points) for name in FIXTURE_NAMES]
