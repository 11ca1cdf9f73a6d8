"""Petri nets with well-ordered places and their monoidal presentations.

The declaration order of ``places`` is the well-order used everywhere a
multiset has to be linearized into a word.  All values are immutable;
every operation is a pure function.
"""
from __future__ import annotations

from dataclasses import dataclass
from typing import Iterable, Mapping, Sequence

from .errors import UnknownPlaceError, ValidationError

#: A word over object generators; the empty tuple is the monoidal unit.
Word = tuple[str, ...]


@dataclass(frozen=True)
class Multiset:
    """Finite multiset of place names; absence encodes count zero.

    >>> Multiset.from_counts({"A": 2, "C": 1}).total()
    3
    """

    entries: tuple[tuple[str, int], ...]

    def __post_init__(self) -> None:
        names = [name for name, _ in self.entries]
        if names != sorted(names) or len(set(names)) != len(names):
            raise ValidationError("multiset entries must be name-sorted and unique")
        for name, count in self.entries:
            if count < 1:
                raise ValidationError(f"multiset count for {name!r} must be >= 1")

    @classmethod
    def empty(cls) -> Multiset:
        return cls(())

    @classmethod
    def from_counts(cls, counts: Mapping[str, int]) -> Multiset:
        return cls(tuple(sorted((n, c) for n, c in counts.items() if c != 0)))

    @classmethod
    def of_word(cls, word: Iterable[str]) -> Multiset:
        counts: dict[str, int] = {}
        for letter in word:
            counts[letter] = counts.get(letter, 0) + 1
        return cls.from_counts(counts)

    def count(self, name: str) -> int:
        for entry, count in self.entries:
            if entry == name:
                return count
        return 0

    def names(self) -> tuple[str, ...]:
        return tuple(name for name, _ in self.entries)

    def total(self) -> int:
        return sum(count for _, count in self.entries)

    def to_dict(self) -> dict[str, int]:
        return dict(self.entries)

    def __contains__(self, name: str) -> bool:
        return self.count(name) > 0

    def __bool__(self) -> bool:
        return bool(self.entries)


@dataclass(frozen=True)
class Transition:
    name: str
    pre: Multiset
    post: Multiset


@dataclass(frozen=True)
class PetriNet:
    """A net: ordered places plus transitions with pre/post multisets."""

    places: tuple[str, ...]
    transitions: tuple[Transition, ...]

    def __post_init__(self) -> None:
        if len(set(self.places)) != len(self.places):
            raise ValidationError("place names must be pairwise distinct")
        names = [t.name for t in self.transitions]
        if len(set(names)) != len(names):
            raise ValidationError("transition names must be pairwise distinct")
        declared = set(self.places)
        for t in self.transitions:
            for side in (t.pre, t.post):
                for place in side.names():
                    if place not in declared:
                        raise UnknownPlaceError(
                            f"transition {t.name!r} refers to undeclared place {place!r}"
                        )

    def transition(self, name: str) -> Transition:
        for t in self.transitions:
            if t.name == name:
                return t
        raise UnknownPlaceError(f"no transition named {name!r}")


@dataclass(frozen=True)
class MorphismGenerator:
    name: str
    dom: Word
    cod: Word


@dataclass(frozen=True)
class SmcPresentation:
    """Generating data of a free symmetric strict monoidal category."""

    objects: tuple[str, ...]
    morphisms: tuple[MorphismGenerator, ...]

    def __post_init__(self) -> None:
        if len(set(self.objects)) != len(self.objects):
            raise ValidationError("object generator names must be distinct")
        names = [m.name for m in self.morphisms]
        if len(set(names)) != len(names):
            raise ValidationError("morphism generator names must be distinct")
        declared = set(self.objects)
        for m in self.morphisms:
            for letter in m.dom + m.cod:
                if letter not in declared:
                    raise UnknownPlaceError(
                        f"generator {m.name!r} uses undeclared object {letter!r}"
                    )

    def morphism(self, name: str) -> MorphismGenerator:
        for m in self.morphisms:
            if m.name == name:
                return m
        raise UnknownPlaceError(f"no morphism generator named {name!r}")

    def has_morphism(self, name: str) -> bool:
        return any(m.name == name for m in self.morphisms)

    def object_index(self) -> dict[str, int]:
        return {name: i for i, name in enumerate(self.objects)}


def linearize(ms: Multiset, order: Sequence[str]) -> Word:
    """Flatten a multiset into the word sorted by the given place order.

    >>> linearize(Multiset.from_counts({"A": 2, "C": 1}), ["A", "B", "C"])
    ('A', 'A', 'C')
    """
    position = {place: i for i, place in enumerate(order)}
    for name in ms.names():
        if name not in position:
            raise UnknownPlaceError(f"multiset entry {name!r} is not in the place order")
    out: list[str] = []
    for place in sorted(ms.names(), key=position.__getitem__):
        out.extend([place] * ms.count(place))
    return tuple(out)


def free_smc(net: PetriNet) -> SmcPresentation:
    """Present the category of executions of a net.

    Places become object generators in declaration order; each transition
    becomes a morphism generator between the linearized pre and post sets.
    """
    morphisms = tuple(
        MorphismGenerator(t.name, linearize(t.pre, net.places), linearize(t.post, net.places))
        for t in net.transitions
    )
    return SmcPresentation(net.places, morphisms)


def net_of_presentation(sig: SmcPresentation) -> PetriNet:
    """Forget word order: every generator becomes a transition."""
    transitions = tuple(
        Transition(m.name, Multiset.of_word(m.dom), Multiset.of_word(m.cod))
        for m in sig.morphisms
    )
    return PetriNet(sig.objects, transitions)


def is_fsm(net: PetriNet) -> bool:
    """True iff every transition consumes and produces exactly one token."""
    return all(t.pre.total() == 1 and t.post.total() == 1 for t in net.transitions)


@dataclass(frozen=True)
class RenameMap:
    """Injection of one coproduct summand: old name -> new name."""

    places: tuple[tuple[str, str], ...]
    transitions: tuple[tuple[str, str], ...]

    def place(self, name: str) -> str:
        return dict(self.places)[name]

    def transition(self, name: str) -> str:
        return dict(self.transitions)[name]


def _fresh(name: str, taken: set[str]) -> str:
    while name in taken:
        name = name + "'"
    return name


def _rename_side(ms: Multiset, renaming: Mapping[str, str]) -> Multiset:
    return Multiset.from_counts({renaming[n]: ms.count(n) for n in ms.names()})


def net_coproduct(m: PetriNet, n: PetriNet) -> tuple[PetriNet, RenameMap, RenameMap]:
    """Disjoint union of nets; colliding names on the right gain a prime.

    The place order is m's order followed by n's.  The returned rename
    maps record both injections and are jointly surjective.
    """
    place_map_m = {p: p for p in m.places}
    taken = set(m.places)
    place_map_n: dict[str, str] = {}
    for p in n.places:
        fresh = _fresh(p, taken)
        place_map_n[p] = fresh
        taken.add(fresh)

    trans_map_m = {t.name: t.name for t in m.transitions}
    taken_t = {t.name for t in m.transitions}
    trans_map_n: dict[str, str] = {}
    for t in n.transitions:
        fresh = _fresh(t.name, taken_t)
        trans_map_n[t.name] = fresh
        taken_t.add(fresh)

    places = tuple(m.places) + tuple(place_map_n[p] for p in n.places)
    transitions = tuple(m.transitions) + tuple(
        Transition(trans_map_n[t.name], _rename_side(t.pre, place_map_n), _rename_side(t.post, place_map_n))
        for t in n.transitions
    )
    net = PetriNet(places, transitions)
    iota1 = RenameMap(tuple(place_map_m.items()), tuple(trans_map_m.items()))
    iota2 = RenameMap(
        tuple((p, place_map_n[p]) for p in n.places),
        tuple((t.name, trans_map_n[t.name]) for t in n.transitions),
    )
    return net, iota1, iota2


def prune_isolated_places(net: PetriNet) -> tuple[PetriNet, tuple[str, ...]]:
    """Drop places that no transition consumes from or produces to."""
    used: set[str] = set()
    for t in net.transitions:
        used.update(t.pre.names())
        used.update(t.post.names())
    removed = tuple(p for p in net.places if p not in used)
    survivors = tuple(p for p in net.places if p in used)
    return PetriNet(survivors, net.transitions), removed


def presentations_isomorphic(p: SmcPresentation, q: SmcPresentation) -> bool:
    """Decide presentation isomorphism by exhaustive matching.

    An isomorphism is a pair of bijections on object and morphism
    generators such that every generator's dom/cod multisets correspond.
    Word order is not compared: an invertible transition-preserving
    functor may reorder letters by symmetries.
    """
    if len(p.objects) != len(q.objects) or len(p.morphisms) != len(q.morphisms):
        return False

    def profile(sig: SmcPresentation, obj: str) -> tuple[tuple[int, int], ...]:
        return tuple(sorted((m.dom.count(obj), m.cod.count(obj)) for m in sig.morphisms))

    p_profiles = {o: profile(p, o) for o in p.objects}
    q_profiles = {o: profile(q, o) for o in q.objects}
    candidates = {
        o: [o2 for o2 in q.objects if q_profiles[o2] == p_profiles[o]] for o in p.objects
    }
    if any(not c for c in candidates.values()):
        return False

    def match_morphisms(obj_map: dict[str, str]) -> bool:
        remaining = list(q.morphisms)
        for m in p.morphisms:
            dom = Multiset.of_word(tuple(obj_map[letter] for letter in m.dom))
            cod = Multiset.of_word(tuple(obj_map[letter] for letter in m.cod))
            for i, cand in enumerate(remaining):
                if Multiset.of_word(cand.dom) == dom and Multiset.of_word(cand.cod) == cod:
                    del remaining[i]
                    break
            else:
                return False
        return True

    def assign(i: int, obj_map: dict[str, str], used: set[str]) -> bool:
        if i == len(p.objects):
            return match_morphisms(obj_map)
        obj = p.objects[i]
        for target in candidates[obj]:
            if target in used:
                continue
            obj_map[obj] = target
            if assign(i + 1, obj_map, used | {target}):
                return True
            del obj_map[obj]
        return False

    return assign(0, {}, set())
