"""Strict monoidal functors between presentations, with predicate checks.

A functor is determined by generator images.  Strictness is enforced on
the nose: the boundaries of every morphism image must equal the mapped
boundary words exactly, permutations being encoded by explicit ``Perm``
nodes rather than held implicitly.
"""
from __future__ import annotations

from dataclasses import dataclass
from typing import Mapping, Sequence

from .errors import (
    BudgetExceededError,
    PreconditionFailedError,
    SourceMismatchError,
    ValidationError,
)
from .fssmc import (
    Compose,
    Gen,
    Id,
    MorphismTerm,
    Perm,
    StringDiagram,
    Tensor,
    apply_perm,
    block_permutation,
    decomposition,
    diagram_equal,
    identity_perm,
    sorting_permutation,
    to_diagram,
    typecheck,
)
from .net_model import SmcPresentation, Word


@dataclass(frozen=True)
class StrictFunctor:
    """A strict monoidal functor presented by generator images.

    ``object_map`` sends each source object generator to a word over the
    target; ``morphism_map`` sends each source morphism generator to a
    target term whose boundaries are the mapped boundary words.
    """

    source: SmcPresentation
    target: SmcPresentation
    object_map: Mapping[str, Word]
    morphism_map: Mapping[str, MorphismTerm]

    def __post_init__(self) -> None:
        for obj in self.source.objects:
            if obj not in self.object_map:
                raise ValidationError(f"object generator {obj!r} has no image")
        declared = set(self.target.objects)
        for obj, word in self.object_map.items():
            for letter in word:
                if letter not in declared:
                    raise ValidationError(
                        f"image of {obj!r} uses undeclared target object {letter!r}"
                    )
        for gen in self.source.morphisms:
            if gen.name not in self.morphism_map:
                raise ValidationError(f"morphism generator {gen.name!r} has no image")
            image = self.morphism_map[gen.name]
            dom, cod = typecheck(image, self.target)
            if dom != self.map_word(gen.dom) or cod != self.map_word(gen.cod):
                raise ValidationError(
                    f"image of {gen.name!r} is not strict: expected "
                    f"{self.map_word(gen.dom)} -> {self.map_word(gen.cod)}, "
                    f"got {dom} -> {cod}"
                )

    def map_object(self, name: str) -> Word:
        return self.object_map[name]

    def map_word(self, word: Word) -> Word:
        out: list[str] = []
        for letter in word:
            out.extend(self.object_map[letter])
        return tuple(out)


def identity_functor(sig: SmcPresentation) -> StrictFunctor:
    return StrictFunctor(
        source=sig,
        target=sig,
        object_map={obj: (obj,) for obj in sig.objects},
        morphism_map={gen.name: Gen(gen.name) for gen in sig.morphisms},
    )


def apply_functor(functor: StrictFunctor, t: MorphismTerm) -> MorphismTerm:
    """Homomorphic image of a term; permutations become block permutations."""
    if isinstance(t, Gen):
        return functor.morphism_map[t.name]
    if isinstance(t, Id):
        return Id(functor.map_word(t.word))
    if isinstance(t, Perm):
        sizes = [len(functor.map_object(letter)) for letter in t.word]
        return Perm(functor.map_word(t.word), block_permutation(sizes, t.perm))
    if isinstance(t, Compose):
        return Compose(apply_functor(functor, t.first), apply_functor(functor, t.second))
    if isinstance(t, Tensor):
        return Tensor(apply_functor(functor, t.left), apply_functor(functor, t.right))
    raise ValidationError(f"not a morphism term: {t!r}")


def compose_functors(first: StrictFunctor, second: StrictFunctor) -> StrictFunctor:
    """Diagrammatic composite ``first ; second``."""
    if first.target != second.source:
        raise SourceMismatchError("target of first functor differs from source of second")
    return StrictFunctor(
        source=first.source,
        target=second.target,
        object_map={obj: second.map_word(word) for obj, word in first.object_map.items()},
        morphism_map={
            name: apply_functor(second, image)
            for name, image in first.morphism_map.items()
        },
    )


def is_generator_preserving_on_objects(functor: StrictFunctor) -> bool:
    """True iff every object image is a single generator."""
    return all(len(functor.map_object(obj)) == 1 for obj in functor.source.objects)


def is_injective_on_object_generators(functor: StrictFunctor) -> bool:
    """True iff the object map is injective as a map of generator names."""
    if not is_generator_preserving_on_objects(functor):
        raise PreconditionFailedError("object images must be single generators")
    images = [functor.map_object(obj)[0] for obj in functor.source.objects]
    return len(set(images)) == len(images)


def is_transition_preserving(functor: StrictFunctor) -> bool:
    """True iff every generator image is a symmetry-conjugated single box."""
    return all(
        len(to_diagram(functor.morphism_map[gen.name], functor.target).boxes) == 1
        for gen in functor.source.morphisms
    )


def covers_all_target_generators(functor: StrictFunctor) -> bool:
    """True iff every target generator occurs in some generator image."""
    covered: set[str] = set()
    for gen in functor.source.morphisms:
        covered |= decomposition(functor.morphism_map[gen.name])
    return all(gen.name in covered for gen in functor.target.morphisms)


def uncovered_target_generators(functor: StrictFunctor) -> tuple[str, ...]:
    covered: set[str] = set()
    for gen in functor.source.morphisms:
        covered |= decomposition(functor.morphism_map[gen.name])
    return tuple(gen.name for gen in functor.target.morphisms if gen.name not in covered)


# ---------------------------------------------------------------------------
# Bounded faithfulness

@dataclass(frozen=True)
class FaithfulUpTo:
    """No collapse among the enumerated morphisms with <= bound generators."""

    bound: int

    def holds(self) -> bool:
        return True


@dataclass(frozen=True)
class CounterexampleFound:
    """Two parallel source terms with distinct diagrams but equal images."""

    bound: int
    left: MorphismTerm
    right: MorphismTerm

    def holds(self) -> bool:
        return False


FaithfulnessVerdict = FaithfulUpTo | CounterexampleFound


def _canonical_firing_term(
    sig: SmcPresentation, sequence: Sequence[str]
) -> tuple[Word, Word, MorphismTerm]:
    """Build the canonical term firing ``sequence`` from its minimal marking.

    Pass one computes the smallest initial multiset feeding the sequence;
    pass two routes tokens with leftmost-occurrence symmetries and ends
    with the canonical sort of the final word, so every enumerated term
    has order-sorted boundaries.
    """
    order = sig.objects
    available: dict[str, int] = {}
    initial: dict[str, int] = {}
    for name in sequence:
        gen = sig.morphism(name)
        for letter in gen.dom:
            if available.get(letter, 0) > 0:
                available[letter] -= 1
            else:
                initial[letter] = initial.get(letter, 0) + 1
        for letter in gen.cod:
            available[letter] = available.get(letter, 0) + 1

    position = {name: i for i, name in enumerate(order)}
    start: list[str] = []
    for letter in sorted(initial, key=position.__getitem__):
        start.extend([letter] * initial[letter])
    word = tuple(start)

    steps: list[MorphismTerm] = []
    current = word
    for name in sequence:
        gen = sig.morphism(name)
        chosen: list[int] = []
        taken: set[int] = set()
        for letter in gen.dom:
            for i, have in enumerate(current):
                if i not in taken and have == letter:
                    chosen.append(i)
                    taken.add(i)
                    break
        rest = [i for i in range(len(current)) if i not in taken]
        route = tuple(chosen) + tuple(rest)
        if route != identity_perm(len(current)):
            steps.append(Perm(current, route))
        rest_word = tuple(current[i] for i in rest)
        steps.append(Gen(name) if not rest_word else Tensor(Gen(name), Id(rest_word)))
        current = gen.cod + rest_word

    sort = sorting_permutation(current, order)
    if sort != identity_perm(len(current)):
        steps.append(Perm(current, sort))
        current = apply_perm(current, sort)
    if not steps:
        term: MorphismTerm = Id(word)
    else:
        term = steps[0]
        for step in steps[1:]:
            term = Compose(term, step)
    return word, current, term


def check_faithful_bounded(
    functor: StrictFunctor, bound: int, node_limit: int = 50_000
) -> FaithfulnessVerdict:
    """Semi-decide faithfulness by enumerating canonical firing terms.

    All firing sequences of up to ``bound`` generator occurrences are
    realized as terms with canonical symmetries, grouped into parallel
    classes together with the identity on each boundary word.  A pair
    with distinct diagrams but diagram-equal images is a certificate of
    unfaithfulness; otherwise the functor is faithful on everything the
    enumeration reaches.
    """
    if bound < 1:
        raise PreconditionFailedError("faithfulness bound must be >= 1")
    names = [gen.name for gen in functor.source.morphisms]
    total = sum(len(names) ** n for n in range(1, bound + 1))
    if total > node_limit:
        raise BudgetExceededError(
            f"{total} candidate sequences exceed the node limit {node_limit}"
        )

    groups: dict[tuple[Word, Word], list[tuple[MorphismTerm, StringDiagram]]] = {}

    def add(term: MorphismTerm, dom: Word, cod: Word) -> None:
        groups.setdefault((dom, cod), []).append((term, to_diagram(term, functor.source)))

    sequences: list[list[str]] = [[]]
    for _ in range(bound):
        sequences = [seq + [name] for seq in sequences for name in names]
        for seq in sequences:
            dom, cod, term = _canonical_firing_term(functor.source, seq)
            add(term, dom, cod)

    for (dom, cod) in list(groups):
        if dom == cod:
            add(Id(dom), dom, cod)

    for members in groups.values():
        images = [
            to_diagram(apply_functor(functor, term), functor.target)
            for term, _ in members
        ]
        for i in range(len(members)):
            for j in range(i + 1, len(members)):
                if diagram_equal(members[i][1], members[j][1]):
                    continue
                if diagram_equal(images[i], images[j]):
                    return CounterexampleFound(bound, members[i][0], members[j][0])
    return FaithfulUpTo(bound)
