"""Single-hop network descriptions.

A network is ``n_tx`` transmitting nodes and ``n_rx`` receiving nodes
together with a collection of messages, each sent by a set of transmitters
to a set of receivers.  Multicast and shared-encoder (cognitive) messages
are allowed; feedback, cooperation and relaying are not modelled.

Rate splitting rewrites one message into sub-messages that are encoded by
fewer transmitters and decoded by more receivers than the original.  The
split preserves total rate: `apply_splits` returns the rewritten network
together with a `Recomposition` that records, for every original message,
which sub-message rates sum back to its rate.  Split fractions are never
fixed numerically; downstream elimination of the free sub-message rates
recovers the union over all splits automatically.
"""

from __future__ import annotations

from dataclasses import dataclass


class SchemeError(ValueError):
    """A scheme description violates a structural rule."""


@dataclass(frozen=True)
class NodeSet:
    """An unordered set of 1-based node indices."""

    members: frozenset[int]

    @staticmethod
    def of(*indices: int) -> "NodeSet":
        return NodeSet(frozenset(indices))

    def key(self) -> tuple[int, ...]:
        """Canonical sort key (ascending index tuple)."""
        return tuple(sorted(self.members))

    def issubset(self, other: "NodeSet") -> bool:
        return self.members <= other.members

    def __contains__(self, index: int) -> bool:
        return index in self.members

    def __len__(self) -> int:
        return len(self.members)

    def __str__(self) -> str:
        return ",".join(str(i) for i in self.key())


@dataclass(frozen=True)
class MessageId:
    """A message, identified by its transmitter set and receiver set."""

    tx: NodeSet
    rx: NodeSet

    def key(self):
        return (self.tx.key(), self.rx.key())

    def __str__(self) -> str:
        return f"{self.tx}->{self.rx}"


def message(tx, rx) -> MessageId:
    """Convenience constructor: ``message(1, 2)`` or ``message((1, 2), 1)``."""
    if isinstance(tx, int):
        tx = (tx,)
    if isinstance(rx, int):
        rx = (rx,)
    return MessageId(NodeSet.of(*tx), NodeSet.of(*rx))


@dataclass(frozen=True)
class NetworkSpec:
    """Node counts plus the message collection, kept in canonical order."""

    n_tx: int
    n_rx: int
    messages: tuple[MessageId, ...]

    def __post_init__(self):
        ordered = tuple(sorted(self.messages, key=MessageId.key))
        object.__setattr__(self, "messages", ordered)


def validate_network(spec: NetworkSpec) -> list[str]:
    """Return one entry per violated invariant; an empty list means valid."""
    report = []
    if spec.n_tx < 1:
        report.append(f"transmitter count must be positive, got {spec.n_tx}")
    if spec.n_rx < 1:
        report.append(f"receiver count must be positive, got {spec.n_rx}")
    seen = set()
    for m in spec.messages:
        if not m.tx.members:
            report.append(f"message {m}: empty transmitter set")
        if not m.rx.members:
            report.append(f"message {m}: empty receiver set")
        bad_tx = [i for i in m.tx.key() if not 1 <= i <= spec.n_tx]
        if bad_tx:
            report.append(f"message {m}: transmitter index out of range: {bad_tx}")
        bad_rx = [i for i in m.rx.key() if not 1 <= i <= spec.n_rx]
        if bad_rx:
            report.append(f"message {m}: receiver index out of range: {bad_rx}")
        if m in seen:
            report.append(f"message {m}: duplicate")
        seen.add(m)
    return report


@dataclass(frozen=True)
class SplitDecl:
    """Replace ``parent`` by the sub-messages ``parts``."""

    parent: MessageId
    parts: tuple[MessageId, ...]

    def __post_init__(self):
        object.__setattr__(self, "parts", tuple(self.parts))


@dataclass(frozen=True)
class Recomposition:
    """Per original message, the post-split parts whose rates sum to its rate."""

    entries: tuple[tuple[MessageId, tuple[MessageId, ...]], ...]

    def parts_of(self, parent: MessageId) -> tuple[MessageId, ...]:
        for p, parts in self.entries:
            if p == parent:
                return parts
        raise KeyError(f"no recomposition entry for {parent}")

    def parent_of(self, part: MessageId) -> MessageId:
        for p, parts in self.entries:
            if part in parts:
                return p
        raise KeyError(f"{part} is not a post-split message")

    def all_parts(self) -> tuple[MessageId, ...]:
        out = []
        for _, parts in self.entries:
            out.extend(parts)
        return tuple(sorted(out, key=MessageId.key))


def apply_splits(spec: NetworkSpec, splits) -> tuple[NetworkSpec, Recomposition]:
    """Rewrite the message set according to the split declarations.

    Messages without a declaration pass through as their own single part.
    Each part (l, m) of a parent (i, j) must satisfy l <= i (a sub-message
    can only be encoded by transmitters that know the original) and
    m >= j (it must still reach every original receiver).
    """
    splits = tuple(splits)
    by_parent: dict[MessageId, SplitDecl] = {}
    for decl in splits:
        if decl.parent not in spec.messages:
            raise SchemeError(f"split parent {decl.parent} is not a message of the network")
        if decl.parent in by_parent:
            raise SchemeError(f"message {decl.parent} split more than once")
        if not decl.parts:
            raise SchemeError(f"split of {decl.parent} declares no parts")
        seen_parts = set()
        for part in decl.parts:
            if not part.tx.issubset(decl.parent.tx):
                raise SchemeError(
                    f"split part {part} of {decl.parent}: part transmitter set"
                    f" {{{part.tx}}} is not a subset of {{{decl.parent.tx}}}"
                )
            if not decl.parent.rx.issubset(part.rx):
                raise SchemeError(
                    f"split part {part} of {decl.parent}: part receiver set"
                    f" {{{part.rx}}} does not contain {{{decl.parent.rx}}}"
                )
            bad_rx = [i for i in part.rx.key() if not 1 <= i <= spec.n_rx]
            if bad_rx:
                raise SchemeError(
                    f"split part {part} of {decl.parent}: receiver index out of range: {bad_rx}"
                )
            if part in seen_parts:
                raise SchemeError(f"split of {decl.parent} repeats part {part}")
            seen_parts.add(part)
        by_parent[decl.parent] = decl

    entries = []
    new_messages: list[MessageId] = []
    owners: dict[MessageId, MessageId] = {}
    for parent in spec.messages:
        parts = by_parent[parent].parts if parent in by_parent else (parent,)
        entries.append((parent, tuple(sorted(parts, key=MessageId.key))))
        for part in parts:
            if part in owners:
                raise SchemeError(
                    f"post-split message {part} appears under both"
                    f" {owners[part]} and {parent}; part ids must be unique"
                )
            owners[part] = parent
            new_messages.append(part)

    new_spec = NetworkSpec(spec.n_tx, spec.n_rx, tuple(new_messages))
    return new_spec, Recomposition(tuple(entries))
