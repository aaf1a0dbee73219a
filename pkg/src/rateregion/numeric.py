"""Numeric instantiation on a concrete discrete memoryless channel.

A `JointPmf` is a dense table over (Q, all codeword variables, all channel
inputs, all channel outputs).  Validation checks that the table actually
comes from the scheme: it factorizes over the oriented graph (each
codeword variable depends only on its parents and Q), each channel input
is a deterministic function of Q and the codewords its transmitter
encodes, and the output conditionals equal the declared channel law.

Entropies are computed in bits with 0 log 0 = 0; comparisons downstream
use 1e-9 and normalization checks 1e-12.
"""

from __future__ import annotations

import itertools
from dataclasses import dataclass, field
from fractions import Fraction

import numpy as np

from .bounds import EQ, GE, LE, R_MSG
from .expressions import InfoExpr, MiSum, MiTerm, mi_to_expr
from .graph import Factorization, Q, Rv, U, X, Y

NORM_TOL = 1e-12
EVAL_TOL = 1e-9


@dataclass
class JointPmf:
    """Dense joint distribution over declared axes (row-major table)."""

    axes: tuple[tuple[Rv, int], ...]
    table: np.ndarray
    _marginals: dict = field(default_factory=dict, repr=False, compare=False)

    def __post_init__(self):
        self.axes = tuple((rv, int(size)) for rv, size in self.axes)
        sizes = tuple(size for _, size in self.axes)
        self.table = np.asarray(self.table, dtype=float).reshape(sizes)

    def rvs(self) -> tuple[Rv, ...]:
        return tuple(rv for rv, _ in self.axes)

    def axis(self, rv: Rv) -> int:
        for i, (v, _) in enumerate(self.axes):
            if v == rv:
                return i
        raise ValueError(f"unknown variable {rv} (declared: {', '.join(map(str, self.rvs()))})")

    def size(self, rv: Rv) -> int:
        return self.axes[self.axis(rv)][1]

    def marginal(self, rvs) -> np.ndarray:
        """Marginal over ``rvs`` with axes in declared order."""
        keep = frozenset(self.axis(rv) for rv in rvs)
        key = tuple(sorted(keep))
        if key not in self._marginals:
            drop = tuple(i for i in range(len(self.axes)) if i not in keep)
            self._marginals[key] = self.table.sum(axis=drop) if drop else self.table
        return self._marginals[key]


def entropy(pmf: JointPmf, rvs) -> float:
    """Shannon entropy of the marginal over ``rvs``, in bits."""
    rvs = frozenset(rvs)
    if not rvs:
        return 0.0
    p = pmf.marginal(rvs).ravel()
    p = p[p > 0]
    return float(-(p * np.log2(p)).sum())


def eval_expr(pmf: JointPmf, expr: InfoExpr) -> float:
    """Value of a joint-entropy combination, in bits."""
    return float(sum(float(c) * entropy(pmf, rvs) for rvs, c in expr.atoms))


def eval_mi(pmf: JointPmf, term: MiTerm) -> float:
    return eval_expr(pmf, mi_to_expr(term))


def eval_msum(pmf: JointPmf, rhs: MiSum) -> float:
    return float(rhs.const) + eval_expr(pmf, rhs.expr)


@dataclass
class DmcSpec:
    """Memoryless channel law P(y_1..y_RX | x_1..x_TX) as a dense table
    with input axes first."""

    input_sizes: tuple[int, ...]
    output_sizes: tuple[int, ...]
    table: np.ndarray

    def __post_init__(self):
        self.input_sizes = tuple(int(s) for s in self.input_sizes)
        self.output_sizes = tuple(int(s) for s in self.output_sizes)
        self.table = np.asarray(self.table, dtype=float).reshape(
            self.input_sizes + self.output_sizes
        )

    @property
    def n_tx(self) -> int:
        return len(self.input_sizes)

    @property
    def n_rx(self) -> int:
        return len(self.output_sizes)

    def validate(self) -> list[str]:
        report = []
        if (self.table < -NORM_TOL).any():
            report.append("channel table has negative entries")
        sums = self.table.reshape(self.input_sizes + (-1,)).sum(axis=-1)
        bad = np.argwhere(np.abs(sums - 1.0) > NORM_TOL)
        for idx in bad[:5]:
            report.append(
                f"channel slice x={tuple(int(i) for i in idx)} sums to {sums[tuple(idx)]!r}, not 1"
            )
        return report


def _conditional(joint: np.ndarray, cond_axes_count: int) -> np.ndarray:
    """P(rest | first ``cond_axes_count`` axes); 0/0 treated as 0."""
    given = joint.reshape(joint.shape[:cond_axes_count] + (-1,)).sum(axis=-1)
    shape = given.shape + (1,) * (joint.ndim - cond_axes_count)
    with np.errstate(divide="ignore", invalid="ignore"):
        out = np.where(given.reshape(shape) > 0, joint / given.reshape(shape), 0.0)
    return out


def validate_pmf(pmf: JointPmf, fact: Factorization, ch: DmcSpec) -> list[str]:
    """Empty report iff the table is a normalized distribution that follows
    the graph factorization, deterministic encoding maps, and channel law."""
    report = []
    nodes = fact.nodes()
    want = [Q] + [U(n) for n in nodes]
    want += [X(k) for k in range(1, ch.n_tx + 1)]
    want += [Y(z) for z in range(1, ch.n_rx + 1)]
    have = set(pmf.rvs())
    missing = [rv for rv in want if rv not in have]
    if missing:
        report.append("missing axes: " + ", ".join(map(str, missing)))
        return report
    extra = have - set(want)
    if extra:
        report.append(
            "unexpected axes: " + ", ".join(sorted(map(str, extra)))
        )
        return report
    for k in range(1, ch.n_tx + 1):
        if pmf.size(X(k)) != ch.input_sizes[k - 1]:
            report.append(f"axis X{k} size {pmf.size(X(k))} != channel input size {ch.input_sizes[k - 1]}")
    for z in range(1, ch.n_rx + 1):
        if pmf.size(Y(z)) != ch.output_sizes[z - 1]:
            report.append(f"axis Y{z} size {pmf.size(Y(z))} != channel output size {ch.output_sizes[z - 1]}")
    if report:
        return report

    if (pmf.table < -NORM_TOL).any():
        report.append("negative probabilities in table")
    total = float(pmf.table.sum())
    if abs(total - 1.0) > NORM_TOL:
        report.append(f"table sums to {total!r}, not 1 (tolerance {NORM_TOL})")
    if report:
        return report

    # model DAG reconstruction: Q, each U given (parents, Q), each X_k given
    # (Q, its codewords), the Y block given all X jointly
    recon = _model_reconstruction(pmf, fact, ch)
    p = pmf.table
    with np.errstate(divide="ignore", invalid="ignore"):
        ratios = np.where(p > 0, p / np.where(recon > 0, recon, 1.0), 1.0)
        bad_support = (p > NORM_TOL) & (recon <= 0)
        kl = float(np.where(p > 0, p * np.log2(ratios), 0.0).sum())
    if bad_support.any():
        report.append("table puts mass outside the factorized support")
    elif not (kl < NORM_TOL):
        report.append(
            f"table does not factorize over the scheme graph (KL divergence {kl:.3e} >= {NORM_TOL})"
        )

    # deterministic encoders
    for k in range(1, ch.n_tx + 1):
        inputs = [Q] + [U(n) for n in nodes if k in n.tx]
        joint = pmf.marginal(inputs + [X(k)])
        cond = _conditional(joint, joint.ndim - 1)
        mass = joint.reshape(joint.shape[:-1] + (-1,)).sum(axis=-1)
        peak = cond.max(axis=-1)
        if ((mass > NORM_TOL) & (peak < 1.0 - EVAL_TOL)).any():
            report.append(
                f"X{k} is not a deterministic function of (Q, its codewords):"
                f" a conditional entry of {float(peak[(mass > NORM_TOL)].min()):.6f} was found"
            )

    # channel law
    xs = [X(k) for k in range(1, ch.n_tx + 1)]
    ys = [Y(z) for z in range(1, ch.n_rx + 1)]
    joint = pmf.marginal(xs + ys)
    cond = _conditional(joint, ch.n_tx)
    x_mass = joint.reshape(ch.input_sizes + (-1,)).sum(axis=-1)
    diff = np.abs(cond - ch.table)
    mask = (x_mass > NORM_TOL).reshape(ch.input_sizes + (1,) * ch.n_rx)
    worst = float(np.where(mask, diff, 0.0).max())
    if worst > EVAL_TOL:
        report.append(
            f"output conditionals deviate from the channel law by {worst:.3e}"
        )
    return report


def _model_reconstruction(pmf: JointPmf, fact: Factorization, ch: DmcSpec) -> np.ndarray:
    """Product of the model's conditionals, each estimated from the table
    itself; equals the table exactly iff the table is Markov w.r.t. the
    model DAG."""
    nodes = fact.nodes()
    recon = np.ones_like(pmf.table)

    def broadcast(marg: np.ndarray, rvs) -> np.ndarray:
        # embed a marginal (axes in declared order) into full-table shape
        axes = sorted(pmf.axis(rv) for rv in rvs)
        shape = [1] * pmf.table.ndim
        for ax, n in zip(axes, marg.shape):
            shape[ax] = n
        return marg.reshape(shape)

    def cond_factor(child_rvs, parent_rvs):
        all_rvs = list(parent_rvs) + list(child_rvs)
        joint = pmf.marginal(all_rvs)  # axes in declared order
        # conditional = joint / parent-marginal, both embedded in full shape
        jfull = broadcast(joint, all_rvs)
        if parent_rvs:
            pm = pmf.marginal(parent_rvs)
            pfull = broadcast(pm, parent_rvs)
        else:
            pfull = np.ones_like(jfull)
        with np.errstate(divide="ignore", invalid="ignore"):
            return np.where(pfull > 0, jfull / np.where(pfull > 0, pfull, 1.0), 0.0)

    recon = cond_factor([Q], [])
    for node in nodes:
        parents = list(fact.parents_of(node))
        recon = recon * cond_factor([U(node)], parents)
    for k in range(1, ch.n_tx + 1):
        parents = [Q] + [U(n) for n in nodes if k in n.tx]
        recon = recon * cond_factor([X(k)], parents)
    xs = [X(k) for k in range(1, ch.n_tx + 1)]
    ys = [Y(z) for z in range(1, ch.n_rx + 1)]
    recon = recon * cond_factor(ys, xs)
    return recon


def compose_pmf(
    fact: Factorization,
    q_dist,
    u_factors,
    x_tables=None,
    channel: DmcSpec | None = None,
) -> JointPmf:
    """Build a joint table from model pieces.

    ``q_dist``: probabilities over Q.  ``u_factors[node]``: array of shape
    (|Q|, parent sizes in canonical node order, node size) giving
    P(U | parents, Q).  ``x_tables[k]``: integer array of shape
    (|Q|, sizes of the codewords transmitter k encodes, in canonical node
    order) selecting the input symbol.  When a channel is given, output
    axes are appended and weighted by its law.
    """
    q_dist = np.asarray(q_dist, dtype=float)
    nodes = tuple(sorted(fact.nodes(), key=lambda m: m.key()))
    u_sizes = {n: np.asarray(u_factors[n]).shape[-1] for n in nodes}
    axes: list[tuple[Rv, int]] = [(Q, len(q_dist))]
    axes += [(U(n), u_sizes[n]) for n in nodes]
    n_tx = channel.n_tx if channel is not None else 0
    if channel is not None:
        axes += [(X(k), channel.input_sizes[k - 1]) for k in range(1, n_tx + 1)]
        axes += [(Y(z), channel.output_sizes[z - 1]) for z in range(1, channel.n_rx + 1)]
    sizes = tuple(s for _, s in axes)
    table = np.zeros(sizes)
    node_pos = {n: i for i, n in enumerate(nodes)}
    for q in range(len(q_dist)):
        for u_vals in itertools.product(*(range(u_sizes[n]) for n in nodes)):
            p = float(q_dist[q])
            for n in nodes:
                parents = [rv for rv in fact.parents_of(n) if rv.kind == "U"]
                parent_idx = tuple(
                    u_vals[node_pos[p_rv.msg]]
                    for p_rv in sorted(parents, key=Rv.key)
                )
                factor = np.asarray(u_factors[n], dtype=float)
                p *= float(factor[(q,) + parent_idx + (u_vals[node_pos[n]],)])
            if p == 0.0:
                continue
            if channel is None:
                table[(q,) + u_vals] += p
            else:
                x_vals = []
                for k in range(1, n_tx + 1):
                    owners = [n for n in nodes if k in n.tx]
                    sel = np.asarray(x_tables[k])
                    idx = (q,) + tuple(u_vals[node_pos[n]] for n in owners)
                    x_vals.append(int(sel[idx]))
                x_vals = tuple(x_vals)
                table[(q,) + u_vals + x_vals] += p * channel.table[x_vals]
    return JointPmf(tuple(axes), table)


@dataclass
class NumericRegion:
    """Inequalities with numeric right-hand sides over message rates,
    plus the vertex list when the dimension allows enumeration."""

    variables: tuple
    rows: tuple  # (lhs pairs, sense, float value)
    vertices: tuple | None

    def contains(self, point, tol: float = EVAL_TOL) -> bool:
        point = list(point)
        if len(point) != len(self.variables):
            raise ValueError("point dimension mismatch")
        if any(x < -tol for x in point):
            return False
        coords = {s: float(x) for s, x in zip(self.variables, point)}
        for lhs, sense, value in self.rows:
            total = sum(float(c) * coords[s] for s, c in lhs)
            if sense == LE and total > value + tol:
                return False
            if sense == GE and total < value - tol:
                return False
            if sense == EQ and abs(total - value) > tol:
                return False
        return True

    def slack(self, point) -> float:
        """Smallest signed margin over all constraints (negative outside)."""
        coords = {s: float(x) for s, x in zip(self.variables, point)}
        worst = min((float(x) for x in point), default=0.0)
        for lhs, sense, value in self.rows:
            total = sum(float(c) * coords[s] for s, c in lhs)
            if sense == LE:
                worst = min(worst, value - total)
            elif sense == GE:
                worst = min(worst, total - value)
            else:
                worst = min(worst, -abs(total - value))
        return worst


def eval_region(sys, pmf: JointPmf) -> NumericRegion:
    """Instantiate a symbolic region; requires all auxiliary rates gone."""
    leftover = [s for s in sys.variables if s.kind != R_MSG]
    if leftover:
        raise ValueError(
            "system still contains auxiliary symbols (elimination incomplete): "
            + ", ".join(map(str, leftover))
        )
    rows = tuple((r.lhs, r.sense, eval_msum(pmf, r.rhs)) for r in sys.rows)
    region = NumericRegion(tuple(sys.variables), rows, None)
    if 1 <= len(sys.variables) <= 3:
        region.vertices = _enumerate_vertices(region)
    return region


def _enumerate_vertices(region: NumericRegion) -> tuple:
    d = len(region.variables)
    index = {s: i for i, s in enumerate(region.variables)}
    facets = []
    for lhs, sense, value in region.rows:
        vec = [0.0] * d
        for s, c in lhs:
            vec[index[s]] = float(c)
        if sense in (LE, EQ):
            facets.append((vec, value))
        if sense in (GE, EQ):
            facets.append(([-v for v in vec], -value))
    for i in range(d):
        vec = [0.0] * d
        vec[i] = -1.0
        facets.append((vec, 0.0))
    vertices = []
    for combo in itertools.combinations(range(len(facets)), d):
        a = np.array([facets[i][0] for i in combo])
        b = np.array([facets[i][1] for i in combo])
        if abs(np.linalg.det(a)) < 1e-12:
            continue
        point = np.linalg.solve(a, b)
        if region.contains(point, tol=EVAL_TOL):
            if not any(max(abs(point - np.array(v))) < 1e-9 for v in vertices):
                vertices.append(tuple(float(x) + 0.0 if abs(x) > 1e-12 else 0.0 for x in point))
    vertices.sort()
    return tuple(vertices)
