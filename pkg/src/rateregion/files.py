"""Scheme and pmf file formats (strict JSON).

A scheme file has four sections::

    {
      "network": {"n_tx": 1, "n_rx": 2, "messages": ["1->1", "1->2"]},
      "splits": [{"parent": "1->1", "parts": ["1->1", "1->1,2"]}],
      "edges": {
        "superposition": [{"bottom": "1->1,2", "top": "1->1"}],
        "binning": [{"victim": "1->1", "binner": "1->2"}],
        "joint_binning": [["1->1", "1->2"]]
      },
      "options": {"q_cardinality": 1, "svo_mode": "complement"}
    }

Messages are written ``tx->rx`` with comma-separated node indices.  Edges
and splits refer to post-split messages.  ``joint_binning`` classes are
sugar for listing every internal pair in both binning directions.  The
schema is strict: unknown keys are rejected with their path.  The
serializer emits a canonical form (all sections present, everything
sorted), and parsing a canonical file and serializing it again reproduces
it byte for byte.

A pmf file declares axes (in table order), the dense joint table in
row-major order, and the channel law::

    {
      "axes": [{"rv": "Q", "size": 1}, {"rv": "U[1->1]", "size": 2},
               {"rv": "X1", "size": 2}, {"rv": "Y1", "size": 2}],
      "table": [...],
      "channel": {"inputs": [2], "outputs": [2], "table": [...]}
    }
"""

from __future__ import annotations

import json
import re
from dataclasses import dataclass, field

import numpy as np

from .bounds import DEFAULT_SVO_MODE, SVO_MODES
from .graph import BINNING, SUPERPOSITION, Edge, Q, Rv, U, X, Y
from .network import MessageId, NetworkSpec, NodeSet, SchemeError, SplitDecl
from .numeric import DmcSpec, JointPmf

_MSG_RE = re.compile(r"^\s*(\d+(?:,\d+)*)\s*->\s*(\d+(?:,\d+)*)\s*$")
_RV_RE = re.compile(r"^(?:Q|U\[(.+)\]|X(\d+)|Y(\d+))$")


def format_message(m: MessageId) -> str:
    return str(m)


def parse_message(text: str, path: str = "message") -> MessageId:
    if not isinstance(text, str):
        raise SchemeError(f"{path}: expected a 'tx->rx' string, got {text!r}")
    m = _MSG_RE.match(text)
    if not m:
        raise SchemeError(f"{path}: {text!r} is not of the form 'tx->rx' (e.g. '1,2->1')")
    tx = NodeSet.of(*(int(i) for i in m.group(1).split(",")))
    rx = NodeSet.of(*(int(i) for i in m.group(2).split(",")))
    return MessageId(tx, rx)


def format_rv(rv: Rv) -> str:
    return str(rv)


def parse_rv(text: str, path: str = "rv") -> Rv:
    if not isinstance(text, str):
        raise SchemeError(f"{path}: expected a variable name string, got {text!r}")
    m = _RV_RE.match(text.strip())
    if not m:
        raise SchemeError(
            f"{path}: {text!r} is not a variable name (use 'Q', 'U[1->1]', 'X1', 'Y1')"
        )
    if m.group(1) is not None:
        return U(parse_message(m.group(1), path))
    if m.group(2) is not None:
        return X(int(m.group(2)))
    if m.group(3) is not None:
        return Y(int(m.group(3)))
    return Q


def _check_keys(obj, path, required, optional=()):
    if not isinstance(obj, dict):
        raise SchemeError(f"{path}: expected an object")
    allowed = set(required) | set(optional)
    for key in obj:
        if key not in allowed:
            raise SchemeError(f"{path}.{key}: unknown key")
    for key in required:
        if key not in obj:
            raise SchemeError(f"{path}: missing key '{key}'")


def _expect_list(value, path):
    if not isinstance(value, list):
        raise SchemeError(f"{path}: expected a list")
    return value


def _expect_int(value, path):
    if not isinstance(value, int) or isinstance(value, bool):
        raise SchemeError(f"{path}: expected an integer, got {value!r}")
    return value


@dataclass(frozen=True)
class SchemeOptions:
    q_cardinality: int = 1
    svo_mode: str = DEFAULT_SVO_MODE


@dataclass(frozen=True)
class SchemeDoc:
    """Parsed scheme file, canonically ordered."""

    network: NetworkSpec
    splits: tuple[SplitDecl, ...]
    superposition: tuple[tuple[MessageId, MessageId], ...]  # (bottom, top)
    binning: tuple[tuple[MessageId, MessageId], ...]  # (victim, binner)
    joint_binning: tuple[tuple[MessageId, ...], ...]
    options: SchemeOptions = field(default_factory=SchemeOptions)

    def edge_list(self) -> tuple[Edge, ...]:
        """Declared edges plus both directions of every joint-binning pair."""
        edges = [Edge(b, t, SUPERPOSITION) for b, t in self.superposition]
        edges += [Edge(v, b, BINNING) for v, b in self.binning]
        for cls in self.joint_binning:
            for i, a in enumerate(cls):
                for b in cls[i + 1:]:
                    edges.append(Edge(a, b, BINNING))
                    edges.append(Edge(b, a, BINNING))
        return tuple(edges)


def _loads(text: str, what: str):
    try:
        return json.loads(text)
    except json.JSONDecodeError as exc:
        raise SchemeError(
            f"{what} syntax error at line {exc.lineno} column {exc.colno}: {exc.msg}"
        ) from exc


def parse_scheme_text(text: str) -> SchemeDoc:
    data = _loads(text, "scheme file")
    _check_keys(data, "scheme", ["network"], ["splits", "edges", "options"])

    net = data["network"]
    _check_keys(net, "network", ["n_tx", "n_rx", "messages"])
    n_tx = _expect_int(net["n_tx"], "network.n_tx")
    n_rx = _expect_int(net["n_rx"], "network.n_rx")
    messages = tuple(
        parse_message(m, f"network.messages[{i}]")
        for i, m in enumerate(_expect_list(net["messages"], "network.messages"))
    )
    network = NetworkSpec(n_tx, n_rx, messages)

    splits = []
    for i, s in enumerate(_expect_list(data.get("splits", []), "splits")):
        path = f"splits[{i}]"
        _check_keys(s, path, ["parent", "parts"])
        parent = parse_message(s["parent"], f"{path}.parent")
        parts = tuple(
            parse_message(p, f"{path}.parts[{j}]")
            for j, p in enumerate(_expect_list(s["parts"], f"{path}.parts"))
        )
        splits.append(SplitDecl(parent, tuple(sorted(parts, key=MessageId.key))))
    splits.sort(key=lambda s: s.parent.key())

    edges = data.get("edges", {})
    _check_keys(edges, "edges", [], ["superposition", "binning", "joint_binning"])
    superposition = []
    for i, e in enumerate(_expect_list(edges.get("superposition", []), "edges.superposition")):
        path = f"edges.superposition[{i}]"
        _check_keys(e, path, ["bottom", "top"])
        superposition.append(
            (parse_message(e["bottom"], f"{path}.bottom"), parse_message(e["top"], f"{path}.top"))
        )
    binning = []
    for i, e in enumerate(_expect_list(edges.get("binning", []), "edges.binning")):
        path = f"edges.binning[{i}]"
        _check_keys(e, path, ["victim", "binner"])
        binning.append(
            (parse_message(e["victim"], f"{path}.victim"), parse_message(e["binner"], f"{path}.binner"))
        )
    joint = []
    for i, cls in enumerate(_expect_list(edges.get("joint_binning", []), "edges.joint_binning")):
        path = f"edges.joint_binning[{i}]"
        members = tuple(
            parse_message(m, f"{path}[{j}]")
            for j, m in enumerate(_expect_list(cls, path))
        )
        if len(members) < 2:
            raise SchemeError(f"{path}: a joint-binning class needs at least two members")
        joint.append(tuple(sorted(members, key=MessageId.key)))

    opts = data.get("options", {})
    _check_keys(opts, "options", [], ["q_cardinality", "svo_mode"])
    q_card = _expect_int(opts.get("q_cardinality", 1), "options.q_cardinality")
    if q_card < 1:
        raise SchemeError("options.q_cardinality: must be at least 1")
    svo = opts.get("svo_mode", DEFAULT_SVO_MODE)
    if svo not in SVO_MODES:
        raise SchemeError(
            f"options.svo_mode: {svo!r} is not one of {', '.join(SVO_MODES)}"
        )

    return SchemeDoc(
        network=network,
        splits=tuple(splits),
        superposition=tuple(sorted(superposition, key=lambda p: (p[0].key(), p[1].key()))),
        binning=tuple(sorted(binning, key=lambda p: (p[0].key(), p[1].key()))),
        joint_binning=tuple(sorted(joint, key=lambda c: tuple(m.key() for m in c))),
        options=SchemeOptions(q_card, svo),
    )


def parse_scheme(path) -> SchemeDoc:
    with open(path, "r", encoding="utf-8") as fh:
        return parse_scheme_text(fh.read())


def serialize_scheme(doc: SchemeDoc) -> str:
    data = {
        "network": {
            "n_tx": doc.network.n_tx,
            "n_rx": doc.network.n_rx,
            "messages": [str(m) for m in doc.network.messages],
        },
        "splits": [
            {"parent": str(s.parent), "parts": [str(p) for p in s.parts]}
            for s in doc.splits
        ],
        "edges": {
            "superposition": [{"bottom": str(b), "top": str(t)} for b, t in doc.superposition],
            "binning": [{"victim": str(v), "binner": str(b)} for v, b in doc.binning],
            "joint_binning": [[str(m) for m in cls] for cls in doc.joint_binning],
        },
        "options": {
            "q_cardinality": doc.options.q_cardinality,
            "svo_mode": doc.options.svo_mode,
        },
    }
    return json.dumps(data, indent=2) + "\n"


def parse_pmf_text(text: str) -> tuple[JointPmf, DmcSpec]:
    data = _loads(text, "pmf file")
    _check_keys(data, "pmf", ["axes", "table", "channel"])
    axes = []
    for i, ax in enumerate(_expect_list(data["axes"], "axes")):
        path = f"axes[{i}]"
        _check_keys(ax, path, ["rv", "size"])
        size = _expect_int(ax["size"], f"{path}.size")
        if size < 1:
            raise SchemeError(f"{path}.size: must be at least 1")
        axes.append((parse_rv(ax["rv"], f"{path}.rv"), size))
    table = _expect_list(data["table"], "table")
    expected = 1
    for _, size in axes:
        expected *= size
    if len(table) != expected:
        raise SchemeError(
            f"table: got {len(table)} entries, expected {expected}"
            " (product of axis sizes)"
        )
    values = np.array([float(v) for v in table])
    if (values < 0).any():
        raise SchemeError("table: negative entries are not probabilities")

    ch = data["channel"]
    _check_keys(ch, "channel", ["inputs", "outputs", "table"])
    inputs = [_expect_int(v, f"channel.inputs[{i}]") for i, v in enumerate(_expect_list(ch["inputs"], "channel.inputs"))]
    outputs = [_expect_int(v, f"channel.outputs[{i}]") for i, v in enumerate(_expect_list(ch["outputs"], "channel.outputs"))]
    ch_table = _expect_list(ch["table"], "channel.table")
    expected = 1
    for size in inputs + outputs:
        expected *= size
    if len(ch_table) != expected:
        raise SchemeError(
            f"channel.table: got {len(ch_table)} entries, expected {expected}"
        )
    ch_values = np.array([float(v) for v in ch_table])
    if (ch_values < 0).any():
        raise SchemeError("channel.table: negative entries are not probabilities")
    dmc = DmcSpec(tuple(inputs), tuple(outputs), ch_values)
    problems = dmc.validate()
    if problems:
        raise SchemeError("channel.table: " + "; ".join(problems))
    return JointPmf(tuple(axes), values), dmc


def parse_pmf(path) -> tuple[JointPmf, DmcSpec]:
    with open(path, "r", encoding="utf-8") as fh:
        return parse_pmf_text(fh.read())


def serialize_pmf(pmf: JointPmf, ch: DmcSpec) -> str:
    data = {
        "axes": [{"rv": str(rv), "size": size} for rv, size in pmf.axes],
        "table": [float(v) for v in pmf.table.ravel()],
        "channel": {
            "inputs": list(ch.input_sizes),
            "outputs": list(ch.output_sizes),
            "table": [float(v) for v in ch.table.ravel()],
        },
    }
    return json.dumps(data, indent=2) + "\n"
