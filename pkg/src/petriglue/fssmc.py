"""Morphism terms of a free symmetric strict monoidal category.

Terms are syntax trees built from generators, identities, permutations,
sequential composition and monoidal product.  Their canonical form is a
:class:`StringDiagram`, an anchored acyclic port graph on which equality
of free-SMC morphisms is decidable: two terms denote the same morphism
iff their diagrams are isomorphic by a box bijection that preserves
generator labels, every wire, and the interface positions.
"""
from __future__ import annotations

from dataclasses import dataclass
from typing import Sequence

from .errors import (
    BadPermutationError,
    TypeMismatchError,
    UnknownGeneratorError,
    ValidationError,
)
from .net_model import SmcPresentation, Word


class MorphismTerm:
    """Base class of the term syntax; concrete nodes are the subclasses."""

    __slots__ = ()


@dataclass(frozen=True)
class Gen(MorphismTerm):
    name: str


@dataclass(frozen=True)
class Id(MorphismTerm):
    word: Word


@dataclass(frozen=True)
class Perm(MorphismTerm):
    """Symmetry on ``word``: output position ``i`` is fed by input ``perm[i]``."""

    word: Word
    perm: tuple[int, ...]


@dataclass(frozen=True)
class Compose(MorphismTerm):
    """Diagrammatic composite ``first ; second``."""

    first: MorphismTerm
    second: MorphismTerm


@dataclass(frozen=True)
class Tensor(MorphismTerm):
    left: MorphismTerm
    right: MorphismTerm


def _check_perm(word: Word, perm: Sequence[int]) -> None:
    if sorted(perm) != list(range(len(word))):
        raise BadPermutationError(
            f"{tuple(perm)} is not a permutation of 0..{len(word) - 1}"
        )


def symmetry(word: Word, perm: Sequence[int]) -> Perm:
    """Build the symmetry of ``word`` given by ``perm`` (validated)."""
    word = tuple(word)
    _check_perm(word, perm)
    return Perm(word, tuple(perm))


def identity_perm(n: int) -> tuple[int, ...]:
    return tuple(range(n))


def invert_perm(perm: Sequence[int]) -> tuple[int, ...]:
    out = [0] * len(perm)
    for i, p in enumerate(perm):
        out[p] = i
    return tuple(out)


def apply_perm(word: Word, perm: Sequence[int]) -> Word:
    return tuple(word[p] for p in perm)


def sorting_permutation(word: Word, order: Sequence[str]) -> tuple[int, ...]:
    """Stable permutation p with ``apply_perm(word, p)`` sorted by ``order``."""
    position = {name: i for i, name in enumerate(order)}
    return tuple(sorted(range(len(word)), key=lambda i: (position[word[i]], i)))


def alignment_permutation(source: Word, target: Word) -> tuple[int, ...]:
    """Stable permutation p with ``apply_perm(source, p) == target``.

    Requires the two words to agree as multisets; equal letters are
    matched left to right.
    """
    pools: dict[str, list[int]] = {}
    for i, letter in enumerate(source):
        pools.setdefault(letter, []).append(i)
    out: list[int] = []
    for letter in target:
        pool = pools.get(letter)
        if not pool:
            raise TypeMismatchError(f"words {source} and {target} differ as multisets")
        out.append(pool.pop(0))
    if any(pools.values()):
        raise TypeMismatchError(f"words {source} and {target} differ as multisets")
    return tuple(out)


def block_permutation(sizes: Sequence[int], block_map: Sequence[int]) -> tuple[int, ...]:
    """Letter-level permutation whose output block ``j`` is input block ``block_map[j]``."""
    offsets = [0]
    for size in sizes:
        offsets.append(offsets[-1] + size)
    out: list[int] = []
    for j in block_map:
        out.extend(range(offsets[j], offsets[j] + sizes[j]))
    return tuple(out)


def typecheck(t: MorphismTerm, sig: SmcPresentation) -> tuple[Word, Word]:
    """Return (dom, cod) of a well-formed term, or raise.

    Raises :class:`UnknownGeneratorError` for undeclared names,
    :class:`BadPermutationError` for invalid symmetries and
    :class:`TypeMismatchError` when a composition boundary disagrees.
    """
    if isinstance(t, Gen):
        if not sig.has_morphism(t.name):
            raise UnknownGeneratorError(f"unknown morphism generator {t.name!r}")
        gen = sig.morphism(t.name)
        return gen.dom, gen.cod
    if isinstance(t, Id):
        _check_letters(t.word, sig)
        return t.word, t.word
    if isinstance(t, Perm):
        _check_letters(t.word, sig)
        _check_perm(t.word, t.perm)
        return t.word, apply_perm(t.word, t.perm)
    if isinstance(t, Compose):
        dom1, cod1 = typecheck(t.first, sig)
        dom2, cod2 = typecheck(t.second, sig)
        if cod1 != dom2:
            raise TypeMismatchError(
                f"cannot compose: left codomain {cod1} != right domain {dom2}"
            )
        return dom1, cod2
    if isinstance(t, Tensor):
        dom1, cod1 = typecheck(t.left, sig)
        dom2, cod2 = typecheck(t.right, sig)
        return dom1 + dom2, cod1 + cod2
    raise ValidationError(f"not a morphism term: {t!r}")


def _check_letters(word: Word, sig: SmcPresentation) -> None:
    declared = set(sig.objects)
    for letter in word:
        if letter not in declared:
            raise UnknownGeneratorError(f"unknown object generator {letter!r}")


def compose_terms(terms: Sequence[MorphismTerm]) -> MorphismTerm:
    """Left-nested sequential composite; a single term is returned as is."""
    if not terms:
        raise ValidationError("cannot compose an empty sequence of terms")
    out = terms[0]
    for t in terms[1:]:
        out = Compose(out, t)
    return out


def tensor_terms(terms: Sequence[MorphismTerm]) -> MorphismTerm:
    """Left-nested monoidal product; the empty product is ``Id(())``."""
    if not terms:
        return Id(())
    out = terms[0]
    for t in terms[1:]:
        out = Tensor(out, t)
    return out


def decomposition(t: MorphismTerm) -> frozenset[str]:
    """The set of morphism generators occurring in ``t``.

    For well-typed terms this is the unique decomposition: terms with
    equal diagrams always use the same generators.
    """
    if isinstance(t, Gen):
        return frozenset((t.name,))
    if isinstance(t, (Id, Perm)):
        return frozenset()
    if isinstance(t, Compose):
        return decomposition(t.first) | decomposition(t.second)
    if isinstance(t, Tensor):
        return decomposition(t.left) | decomposition(t.right)
    raise ValidationError(f"not a morphism term: {t!r}")


def belongs(generator: str, t: MorphismTerm) -> bool:
    """True iff ``generator`` occurs in the decomposition of ``t``."""
    return generator in decomposition(t)


# ---------------------------------------------------------------------------
# String diagrams

# Endpoints of a wire.  Sources are interface inputs ("in", i) or box
# output ports ("bo", box, port); targets are interface outputs
# ("out", i) or box input ports ("bi", box, port).
Endpoint = tuple


@dataclass(frozen=True)
class StringDiagram:
    """Canonical anchored form of a free-SMC morphism.

    ``boxes[b]`` is the generator label of box ``b``; wires pair a source
    endpoint with a target endpoint, and every port and every interface
    position carries exactly one wire.
    """

    boxes: tuple[str, ...]
    box_doms: tuple[Word, ...]
    box_cods: tuple[Word, ...]
    inputs: Word
    outputs: Word
    wires: frozenset[tuple[Endpoint, Endpoint]]

    def validate(self) -> None:
        """Check port coverage, label agreement and acyclicity."""
        sources = [("in", i) for i in range(len(self.inputs))]
        targets = [("out", i) for i in range(len(self.outputs))]
        for b, _ in enumerate(self.boxes):
            sources.extend(("bo", b, j) for j in range(len(self.box_cods[b])))
            targets.extend(("bi", b, j) for j in range(len(self.box_doms[b])))
        seen_src = [src for src, _ in self.wires]
        seen_tgt = [tgt for _, tgt in self.wires]
        if sorted(seen_src) != sorted(sources) or sorted(seen_tgt) != sorted(targets):
            raise ValidationError("every port must carry exactly one wire")
        for src, tgt in self.wires:
            if self._label(src) != self._label(tgt):
                raise ValidationError(f"wire {src} -> {tgt} joins unequal labels")
        order: dict[int, int] = {}
        remaining = set(range(len(self.boxes)))
        deps = {
            b: {
                src[1]
                for src, tgt in self.wires
                if tgt[0] == "bi" and tgt[1] == b and src[0] == "bo"
            }
            for b in remaining
        }
        while remaining:
            ready = {b for b in remaining if deps[b] <= set(order)}
            if not ready:
                raise ValidationError("box dependency relation has a cycle")
            for b in ready:
                order[b] = len(order)
            remaining -= ready

    def _label(self, endpoint: Endpoint) -> str:
        kind = endpoint[0]
        if kind == "in":
            return self.inputs[endpoint[1]]
        if kind == "out":
            return self.outputs[endpoint[1]]
        if kind == "bi":
            return self.box_doms[endpoint[1]][endpoint[2]]
        return self.box_cods[endpoint[1]][endpoint[2]]


class _Builder:
    """Mutable open diagram used while folding a term."""

    __slots__ = ("boxes", "producer", "consumer", "in_wires", "out_wires", "next_wire")

    def __init__(self) -> None:
        self.boxes: list[tuple[str, Word, Word]] = []
        self.producer: dict[int, Endpoint] = {}
        self.consumer: dict[int, Endpoint] = {}
        self.in_wires: list[int] = []
        self.out_wires: list[int] = []
        self.next_wire = 0

    def new_wire(self, producer: Endpoint, consumer: Endpoint) -> int:
        wire = self.next_wire
        self.next_wire += 1
        self.producer[wire] = producer
        self.consumer[wire] = consumer
        return wire


def _shift_endpoint(endpoint: Endpoint, box_offset: int) -> Endpoint:
    if endpoint[0] in ("bi", "bo"):
        return (endpoint[0], endpoint[1] + box_offset, endpoint[2])
    return endpoint


def _shift_interface(endpoint: Endpoint, kind: str, offset: int) -> Endpoint:
    if endpoint[0] == kind:
        return (kind, endpoint[1] + offset)
    return endpoint


def _merge(a: _Builder, b: _Builder, box_offset: int) -> tuple[_Builder, int]:
    """Copy ``a`` and import ``b``'s boxes and wires with offsets applied."""
    out = _Builder()
    out.boxes = list(a.boxes) + list(b.boxes)
    out.producer = dict(a.producer)
    out.consumer = dict(a.consumer)
    wire_offset = a.next_wire
    for wire, endpoint in b.producer.items():
        out.producer[wire + wire_offset] = _shift_endpoint(endpoint, box_offset)
    for wire, endpoint in b.consumer.items():
        out.consumer[wire + wire_offset] = _shift_endpoint(endpoint, box_offset)
    out.next_wire = a.next_wire + b.next_wire
    return out, wire_offset


def _build(t: MorphismTerm, sig: SmcPresentation) -> _Builder:
    if isinstance(t, Gen):
        gen = sig.morphism(t.name)
        builder = _Builder()
        builder.boxes.append((gen.name, gen.dom, gen.cod))
        builder.in_wires = [
            builder.new_wire(("in", i), ("bi", 0, i)) for i in range(len(gen.dom))
        ]
        builder.out_wires = [
            builder.new_wire(("bo", 0, j), ("out", j)) for j in range(len(gen.cod))
        ]
        return builder
    if isinstance(t, Id):
        builder = _Builder()
        builder.in_wires = [
            builder.new_wire(("in", i), ("out", i)) for i in range(len(t.word))
        ]
        builder.out_wires = list(builder.in_wires)
        return builder
    if isinstance(t, Perm):
        builder = _Builder()
        wires = [
            builder.new_wire(("in", t.perm[j]), ("out", j)) for j in range(len(t.word))
        ]
        builder.in_wires = [wires[j] for j in invert_perm(t.perm)]
        builder.out_wires = wires
        return builder
    if isinstance(t, Compose):
        a = _build(t.first, sig)
        b = _build(t.second, sig)
        out, wire_offset = _merge(a, b, len(a.boxes))
        remap: dict[int, int] = {}
        for k, wa in enumerate(a.out_wires):
            wb = b.in_wires[k] + wire_offset
            out.consumer[wa] = out.consumer[wb]
            del out.producer[wb]
            del out.consumer[wb]
            remap[wb] = wa
        out.in_wires = list(a.in_wires)
        out.out_wires = [remap.get(w + wire_offset, w + wire_offset) for w in b.out_wires]
        return out
    if isinstance(t, Tensor):
        a = _build(t.left, sig)
        b = _build(t.right, sig)
        out, wire_offset = _merge(a, b, len(a.boxes))
        a_dom, a_cod = typecheck(t.left, sig)
        for wire in list(out.producer):
            if wire >= wire_offset:
                out.producer[wire] = _shift_interface(out.producer[wire], "in", len(a_dom))
                out.consumer[wire] = _shift_interface(out.consumer[wire], "out", len(a_cod))
        out.in_wires = list(a.in_wires) + [w + wire_offset for w in b.in_wires]
        out.out_wires = list(a.out_wires) + [w + wire_offset for w in b.out_wires]
        return out
    raise ValidationError(f"not a morphism term: {t!r}")


def to_diagram(t: MorphismTerm, sig: SmcPresentation) -> StringDiagram:
    """Evaluate a term to its string diagram; one box per Gen occurrence."""
    dom, cod = typecheck(t, sig)
    builder = _build(t, sig)
    wires = frozenset(
        (builder.producer[w], builder.consumer[w]) for w in builder.producer
    )
    return StringDiagram(
        boxes=tuple(label for label, _, _ in builder.boxes),
        box_doms=tuple(d for _, d, _ in builder.boxes),
        box_cods=tuple(c for _, _, c in builder.boxes),
        inputs=dom,
        outputs=cod,
        wires=wires,
    )


def _connection_maps(d: StringDiagram) -> tuple[dict, dict]:
    by_consumer = {tgt: src for src, tgt in d.wires}
    by_producer = {src: tgt for src, tgt in d.wires}
    return by_consumer, by_producer


def _joint_colors(d1: StringDiagram, d2: StringDiagram) -> tuple[list[int], list[int]]:
    """Anchored color refinement run jointly so codes are comparable.

    Each round re-encodes box signatures over both diagrams into one
    shared integer alphabet, keeping colors small for long chains.
    """
    bc1, bp1 = _connection_maps(d1)
    bc2, bp2 = _connection_maps(d2)

    def signatures(d: StringDiagram, colors: list[int], bc: dict, bp: dict) -> list[tuple]:
        sigs = []
        for b in range(len(d.boxes)):
            ins = []
            for j in range(len(d.box_doms[b])):
                src = bc[("bi", b, j)]
                ins.append(("I", src[1]) if src[0] == "in" else ("B", colors[src[1]], src[2]))
            outs = []
            for j in range(len(d.box_cods[b])):
                tgt = bp[("bo", b, j)]
                outs.append(("O", tgt[1]) if tgt[0] == "out" else ("B", colors[tgt[1]], tgt[2]))
            sigs.append((d.boxes[b], tuple(ins), tuple(outs)))
        return sigs

    labels = sorted(set(d1.boxes) | set(d2.boxes))
    code = {label: i for i, label in enumerate(labels)}
    c1 = [code[label] for label in d1.boxes]
    c2 = [code[label] for label in d2.boxes]
    for _ in range(len(d1.boxes) + 1):
        sig1 = signatures(d1, c1, bc1, bp1)
        sig2 = signatures(d2, c2, bc2, bp2)
        recode = {s: i for i, s in enumerate(sorted(set(sig1) | set(sig2), key=repr))}
        n1 = [recode[s] for s in sig1]
        n2 = [recode[s] for s in sig2]
        if n1 == c1 and n2 == c2:
            break
        c1, c2 = n1, n2
    return c1, c2


def diagram_equal(d1: StringDiagram, d2: StringDiagram) -> bool:
    """Interface-preserving isomorphism of diagrams.

    The interfaces are anchored: the candidate box bijection must send
    every wire of ``d1`` to a wire of ``d2`` with interface positions
    fixed pointwise.  Colors from anchored refinement prune the search;
    a backtracking match settles residual symmetric cases.
    """
    if d1.inputs != d2.inputs or d1.outputs != d2.outputs:
        return False
    if len(d1.boxes) != len(d2.boxes) or len(d1.wires) != len(d2.wires):
        return False
    if sorted(d1.boxes) != sorted(d2.boxes):
        return False

    colors1, colors2 = _joint_colors(d1, d2)
    if sorted(colors1) != sorted(colors2):
        return False

    candidates: list[list[int]] = [
        [b2 for b2 in range(len(d2.boxes)) if colors2[b2] == colors1[b1]]
        for b1 in range(len(d1.boxes))
    ]
    order = sorted(range(len(d1.boxes)), key=lambda b: len(candidates[b]))
    mapping: dict[int, int] = {}
    used: set[int] = set()

    def map_endpoint(endpoint: Endpoint) -> Endpoint:
        if endpoint[0] in ("bi", "bo"):
            return (endpoint[0], mapping[endpoint[1]], endpoint[2])
        return endpoint

    def locally_consistent(b1: int) -> bool:
        for src, tgt in d1.wires:
            ends = []
            for endpoint in (src, tgt):
                if endpoint[0] in ("bi", "bo") and endpoint[1] not in mapping:
                    break
                ends.append(map_endpoint(endpoint))
            else:
                if (ends[0], ends[1]) not in d2.wires:
                    return False
        return True

    def search(i: int) -> bool:
        if i == len(order):
            return all(
                (map_endpoint(src), map_endpoint(tgt)) in d2.wires
                for src, tgt in d1.wires
            )
        b1 = order[i]
        for b2 in candidates[b1]:
            if b2 in used:
                continue
            mapping[b1] = b2
            used.add(b2)
            if locally_consistent(b1) and search(i + 1):
                return True
            del mapping[b1]
            used.discard(b2)
        return False

    return search(0)


def terms_equal(t1: MorphismTerm, t2: MorphismTerm, sig: SmcPresentation) -> bool:
    """Convenience: compare two terms by their diagrams."""
    return diagram_equal(to_diagram(t1, sig), to_diagram(t2, sig))
