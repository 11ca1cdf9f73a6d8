"""Composition algebra on nets with semantics.

Synchronizations conflate transitions into single events whose meaning
is the composite of the parts; identifications merge places and
transitions that carry equal semantics, computed as coequalizers of
transition-preserving functors.  Coproducts, pushout gluing and
two-stage boundary composition are derived from those two primitives.

Quotient classes are named by their order-minimal member, and every
sorting symmetry introduced when words are re-linearized is
materialized explicitly in generator images, keeping all functors
strict on the nose.
"""
from __future__ import annotations

from dataclasses import dataclass
from typing import Mapping, Sequence

from .errors import (
    BoundaryOrientationError,
    EmptyDecompositionError,
    NoSolutionWithinBoundError,
    PreconditionFailedError,
    SamePlaceError,
    SemanticsMismatchError,
    SemanticsObstructionError,
    SourceMismatchError,
    UnknownGeneratorError,
    UnknownPlaceError,
    VerdictFailedError,
    WellDefinednessError,
)
from .fssmc import (
    Gen,
    Id,
    MorphismTerm,
    Perm,
    Tensor,
    alignment_permutation,
    apply_perm,
    block_permutation,
    compose_terms,
    decomposition,
    diagram_equal,
    identity_perm,
    invert_perm,
    sorting_permutation,
    tensor_terms,
    to_diagram,
    typecheck,
)
from .functors import (
    CounterexampleFound,
    StrictFunctor,
    apply_functor,
    check_faithful_bounded,
    compose_functors,
    identity_functor,
    is_generator_preserving_on_objects,
    is_injective_on_object_generators,
    is_transition_preserving,
    uncovered_target_generators,
)
from .net_model import (
    Multiset,
    MorphismGenerator,
    PetriNet,
    SmcPresentation,
    Transition,
    Word,
    free_smc,
    net_coproduct,
    net_of_presentation,
    prune_isolated_places,
)
from .semantics import (
    Fold,
    FreeFold,
    NetWithSemantics,
    PairFold,
    TerminalFold,
    commutes_with_semantics,
    sem_equal,
)


@dataclass(frozen=True)
class SyncRecipe:
    """How to conflate transitions: a name and the composite they become."""

    new_name: str
    expression: MorphismTerm
    prune: bool = False


@dataclass(frozen=True)
class ConditionFailure:
    condition: str
    detail: str
    certificate: tuple = ()


@dataclass(frozen=True)
class Verdict:
    """Outcome of a checked definition, with one entry per failed condition."""

    failures: tuple[ConditionFailure, ...]
    faithfulness_bound: int | None = None

    @property
    def passed(self) -> bool:
        return not self.failures


SyncVerdict = Verdict
IdentVerdict = Verdict


@dataclass(frozen=True)
class Witness:
    """A net selecting components to identify, via two pattern functors."""

    net: PetriNet
    left: StrictFunctor
    right: StrictFunctor

    def __post_init__(self) -> None:
        sig = free_smc(self.net)
        for name, functor in (("left", self.left), ("right", self.right)):
            if functor.source != sig:
                raise PreconditionFailedError(
                    f"{name} witness functor is not defined on the witness net"
                )
            if not is_generator_preserving_on_objects(functor):
                raise PreconditionFailedError(
                    f"{name} witness functor must send places to places"
                )
            if not is_transition_preserving(functor):
                raise PreconditionFailedError(
                    f"{name} witness functor must be transition-preserving"
                )
        if self.left.target != self.right.target:
            raise PreconditionFailedError("witness functors must share their target")


def _conjugate(
    core: MorphismTerm,
    core_dom: Word,
    core_cod: Word,
    outer_dom: Word,
    outer_cod: Word,
) -> MorphismTerm:
    """Wrap a term in the symmetries matching it to the outer boundaries."""
    parts: list[MorphismTerm] = []
    pre = alignment_permutation(outer_dom, core_dom)
    if pre != identity_perm(len(pre)):
        parts.append(Perm(outer_dom, pre))
    parts.append(core)
    post = alignment_permutation(core_cod, outer_cod)
    if post != identity_perm(len(post)):
        parts.append(Perm(core_cod, post))
    return compose_terms(parts)


# ---------------------------------------------------------------------------
# Synchronizations

def _definition_conditions(functor: StrictFunctor, bound: int) -> list[ConditionFailure]:
    failures: list[ConditionFailure] = []
    if not is_generator_preserving_on_objects(functor):
        failures.append(
            ConditionFailure(
                "generator_preserving_on_objects",
                "some object generator is sent to a non-generator word",
            )
        )
        return failures
    if not is_injective_on_object_generators(functor):
        failures.append(
            ConditionFailure(
                "injective_on_object_generators",
                "two object generators share an image",
            )
        )
    verdict = check_faithful_bounded(functor, bound)
    if isinstance(verdict, CounterexampleFound):
        failures.append(
            ConditionFailure(
                "faithful",
                f"distinct parallel morphisms collapse at bound {bound}",
                (verdict.left, verdict.right),
            )
        )
    uncovered = uncovered_target_generators(functor)
    if uncovered:
        failures.append(
            ConditionFailure(
                "covers_all_target_generators",
                f"target generators never used: {', '.join(uncovered)}",
                uncovered,
            )
        )
    return failures


def is_synchronization(
    functor: StrictFunctor,
    src: NetWithSemantics,
    tgt: NetWithSemantics,
    bound: int = 3,
) -> Verdict:
    """Check the synchronization conditions plus semantics commutation."""
    if src.semantics != tgt.semantics:
        raise SemanticsMismatchError("source and target carry different semantics")
    if functor.source != src.presentation or functor.target != tgt.presentation:
        raise SourceMismatchError("functor does not run between the given nets")
    failures = _definition_conditions(functor, bound)
    if not commutes_with_semantics(functor, src, tgt):
        failures.append(
            ConditionFailure(
                "commutes_with_semantics",
                "source fold differs from functor followed by target fold",
            )
        )
    return Verdict(tuple(failures), bound)


def make_synchronization(
    tgt: NetWithSemantics,
    source_net: PetriNet,
    functor: StrictFunctor,
    bound: int = 3,
) -> NetWithSemantics:
    """Equip a conflated net with the semantics induced along the functor.

    The commutation condition then holds by construction; the remaining
    synchronization conditions are verified and failures are fatal.
    """
    if functor.source != free_smc(source_net) or functor.target != tgt.presentation:
        raise SourceMismatchError("functor does not run between the given nets")
    failures = _definition_conditions(functor, bound)
    if failures:
        raise VerdictFailedError(
            "; ".join(f"{f.condition}: {f.detail}" for f in failures),
            Verdict(tuple(failures), bound),
        )
    return NetWithSemantics(source_net, tgt.fold.after(functor))


def synchronize_transitions(
    net_sem: NetWithSemantics, recipe: SyncRecipe, bound: int = 3
) -> tuple[NetWithSemantics, StrictFunctor]:
    """Replace the transitions used by an expression with one new event.

    The new transition consumes and produces the boundary multisets of
    the expression; the emitted functor sends it to the expression and
    every surviving generator to itself.
    """
    sig = net_sem.presentation
    dom, cod = typecheck(recipe.expression, sig)
    conflated = decomposition(recipe.expression)
    if not conflated:
        raise EmptyDecompositionError("expression must use at least one generator")
    survivors = tuple(t for t in net_sem.net.transitions if t.name not in conflated)
    new_transition = Transition(
        recipe.new_name, Multiset.of_word(dom), Multiset.of_word(cod)
    )
    merged = PetriNet(net_sem.net.places, survivors + (new_transition,))
    if recipe.prune:
        merged, _ = prune_isolated_places(merged)

    merged_sig = free_smc(merged)
    new_gen = merged_sig.morphism(recipe.new_name)
    morphism_map: dict[str, MorphismTerm] = {t.name: Gen(t.name) for t in survivors}
    morphism_map[recipe.new_name] = _conjugate(
        recipe.expression, dom, cod, new_gen.dom, new_gen.cod
    )
    functor = StrictFunctor(
        source=merged_sig,
        target=sig,
        object_map={p: (p,) for p in merged.places},
        morphism_map=morphism_map,
    )
    return make_synchronization(net_sem, merged, functor, bound), functor


# ---------------------------------------------------------------------------
# Identifications

class _UnionFind:
    def __init__(self, items: Sequence[str], order: Mapping[str, int]) -> None:
        self.parent = {item: item for item in items}
        self.order = order

    def find(self, item: str) -> str:
        root = item
        while self.parent[root] != root:
            root = self.parent[root]
        while self.parent[item] != root:
            self.parent[item], item = root, self.parent[item]
        return root

    def union(self, a: str, b: str) -> None:
        ra, rb = self.find(a), self.find(b)
        if ra == rb:
            return
        keep, drop = (ra, rb) if self.order[ra] <= self.order[rb] else (rb, ra)
        self.parent[drop] = keep


def _single_decomposition(term: MorphismTerm, role: str) -> str:
    parts = decomposition(term)
    if len(parts) != 1:
        raise PreconditionFailedError(f"{role} image must use exactly one generator")
    return next(iter(parts))


def coequalize_tp(
    first: StrictFunctor, second: StrictFunctor
) -> tuple[SmcPresentation, StrictFunctor]:
    """Coequalizer of two transition-preserving, place-preserving functors.

    Object and morphism generators of the target are quotiented by the
    relations the two functors generate; each class is named by its
    order-minimal member and its boundaries are the re-sorted class
    images, with the sorting symmetries recorded in the coequalizing
    functor's generator images.
    """
    if first.source != second.source or first.target != second.target:
        raise SourceMismatchError("coequalized functors must be parallel")
    for functor in (first, second):
        if not is_generator_preserving_on_objects(functor):
            raise PreconditionFailedError("functors must send places to places")
        if not is_transition_preserving(functor):
            raise PreconditionFailedError("functors must be transition-preserving")

    target = first.target
    obj_order = {name: i for i, name in enumerate(target.objects)}
    objects = _UnionFind(target.objects, obj_order)
    for obj in first.source.objects:
        objects.union(first.map_object(obj)[0], second.map_object(obj)[0])

    mor_order = {m.name: i for i, m in enumerate(target.morphisms)}
    morphisms = _UnionFind([m.name for m in target.morphisms], mor_order)
    for gen in first.source.morphisms:
        morphisms.union(
            _single_decomposition(first.morphism_map[gen.name], "left"),
            _single_decomposition(second.morphism_map[gen.name], "right"),
        )

    quotient_objects = tuple(o for o in target.objects if objects.find(o) == o)

    def class_word(word: Word) -> Word:
        return tuple(objects.find(letter) for letter in word)

    quotient_morphisms: list[MorphismGenerator] = []
    class_boundaries: dict[str, tuple[Word, Word]] = {}
    for gen in target.morphisms:
        rep = morphisms.find(gen.name)
        dom_classes = class_word(gen.dom)
        cod_classes = class_word(gen.cod)
        dom_sorted = apply_perm(dom_classes, sorting_permutation(dom_classes, quotient_objects))
        cod_sorted = apply_perm(cod_classes, sorting_permutation(cod_classes, quotient_objects))
        if rep == gen.name:
            quotient_morphisms.append(MorphismGenerator(rep, dom_sorted, cod_sorted))
            class_boundaries[rep] = (dom_sorted, cod_sorted)
        elif class_boundaries.get(rep, (dom_sorted, cod_sorted)) != (dom_sorted, cod_sorted):
            raise WellDefinednessError(
                f"members of class {rep!r} disagree on boundaries"
            )
    quotient = SmcPresentation(quotient_objects, tuple(quotient_morphisms))

    morphism_map: dict[str, MorphismTerm] = {}
    for gen in target.morphisms:
        rep = morphisms.find(gen.name)
        rep_dom, rep_cod = class_boundaries[rep]
        try:
            morphism_map[gen.name] = _conjugate(
                Gen(rep), rep_dom, rep_cod, class_word(gen.dom), class_word(gen.cod)
            )
        except Exception as exc:
            raise WellDefinednessError(
                f"members of class {rep!r} disagree on boundaries"
            ) from exc
    coequalizer = StrictFunctor(
        source=target,
        target=quotient,
        object_map={o: (objects.find(o),) for o in target.objects},
        morphism_map=morphism_map,
    )
    for gen in first.source.morphisms:
        left_image = apply_functor(coequalizer, first.morphism_map[gen.name])
        right_image = apply_functor(coequalizer, second.morphism_map[gen.name])
        if not diagram_equal(
            to_diagram(left_image, quotient), to_diagram(right_image, quotient)
        ):
            raise PreconditionFailedError(
                f"the two images of {gen.name!r} twist merged generators "
                "against each other; the coequalizer of this pair is not a "
                "free quotient of the target"
            )
    return quotient, coequalizer


def merge_two_places(
    sig: SmcPresentation, keep: str, drop: str
) -> tuple[SmcPresentation, StrictFunctor]:
    """Identify two places directly: drop one, rename its occurrences.

    Fast path for the one-place witness; agrees with :func:`coequalize_tp`
    on that witness up to presentation isomorphism.
    """
    if keep == drop:
        raise SamePlaceError("cannot merge a place with itself")
    for name in (keep, drop):
        if name not in sig.objects:
            raise UnknownGeneratorError(f"unknown object generator {name!r}")

    objects = tuple(o for o in sig.objects if o != drop)

    def substitute(word: Word) -> Word:
        return tuple(keep if letter == drop else letter for letter in word)

    generators: list[MorphismGenerator] = []
    morphism_map: dict[str, MorphismTerm] = {}
    for gen in sig.morphisms:
        dom_sub = substitute(gen.dom)
        cod_sub = substitute(gen.cod)
        dom_sorted = apply_perm(dom_sub, sorting_permutation(dom_sub, objects))
        cod_sorted = apply_perm(cod_sub, sorting_permutation(cod_sub, objects))
        generators.append(MorphismGenerator(gen.name, dom_sorted, cod_sorted))
        morphism_map[gen.name] = _conjugate(
            Gen(gen.name), dom_sorted, cod_sorted, dom_sub, cod_sub
        )
    merged = SmcPresentation(objects, tuple(generators))
    functor = StrictFunctor(
        source=sig,
        target=merged,
        object_map={o: (keep,) if o == drop else (o,) for o in sig.objects},
        morphism_map=morphism_map,
    )
    return merged, functor


def _sequential_merge(
    sig: SmcPresentation, pairs: Sequence[tuple[str, str]]
) -> StrictFunctor:
    """Composite of two-place merges, keeping the order-minimal name."""
    total = identity_functor(sig)
    current = sig
    for left_name, right_name in pairs:
        a = total.map_object(left_name)[0]
        b = total.map_object(right_name)[0]
        if a == b:
            continue
        order = {name: i for i, name in enumerate(current.objects)}
        keep, drop = (a, b) if order[a] <= order[b] else (b, a)
        current, step = merge_two_places(current, keep, drop)
        total = compose_functors(total, step)
    return total


def factor_fold_through_coequalizer(coequalizer: StrictFunctor, fold: Fold) -> Fold:
    """Induce a fold on the quotient, checking it is single-valued.

    Every quotient generator takes the fold image of its order-minimal
    member, conjugated by the block symmetries the re-sorted boundaries
    demand; all other members must agree up to backend equality.
    """
    if coequalizer.source != fold.source:
        raise SourceMismatchError("fold is not defined on the coequalizer's source")
    if isinstance(fold, TerminalFold):
        return TerminalFold(coequalizer.target)
    if isinstance(fold, PairFold):
        return PairFold(
            factor_fold_through_coequalizer(coequalizer, fold.left),
            factor_fold_through_coequalizer(coequalizer, fold.right),
        )
    if not isinstance(fold, FreeFold):
        raise SemanticsMismatchError(f"unsupported fold: {fold!r}")

    source = coequalizer.source
    quotient = coequalizer.target
    carrier = fold.functor

    object_map: dict[str, Word] = {}
    for obj in quotient.objects:
        members = [o for o in source.objects if coequalizer.map_object(o) == (obj,)]
        images = {carrier.map_object(o) for o in members}
        if len(images) != 1:
            raise WellDefinednessError(
                f"merged places {members} carry different semantics objects"
            )
        object_map[obj] = images.pop()

    morphism_map: dict[str, MorphismTerm] = {}
    for gen in quotient.morphisms:
        members = [
            m
            for m in source.morphisms
            if decomposition(coequalizer.morphism_map[m.name]) == {gen.name}
        ]
        if not members:
            raise WellDefinednessError(f"class {gen.name!r} has no members")
        rep = members[0]

        def conjugating_perm(rep_word: Word, sorted_word: Word, inverse: bool) -> tuple[int, ...]:
            classes = tuple(coequalizer.map_object(letter)[0] for letter in rep_word)
            sort = sorting_permutation(classes, quotient.objects)
            if apply_perm(classes, sort) != sorted_word:
                raise WellDefinednessError(
                    f"class {gen.name!r} boundaries disagree with its members"
                )
            sizes = [len(carrier.map_object(letter)) for letter in rep_word]
            if inverse:
                return block_permutation([sizes[i] for i in sort], invert_perm(sort))
            return block_permutation(sizes, sort)

        core = carrier.morphism_map[rep.name]
        parts: list[MorphismTerm] = []
        pre = conjugating_perm(rep.dom, gen.dom, inverse=True)
        mapped_dom = tuple(
            letter for cls in gen.dom for letter in object_map[cls]
        )
        if pre != identity_perm(len(pre)):
            parts.append(Perm(mapped_dom, pre))
        parts.append(core)
        post = conjugating_perm(rep.cod, gen.cod, inverse=False)
        if post != identity_perm(len(post)):
            parts.append(Perm(carrier.map_word(rep.cod), post))
        morphism_map[gen.name] = compose_terms(parts)

    induced = FreeFold(
        StrictFunctor(
            source=quotient,
            target=carrier.target,
            object_map=object_map,
            morphism_map=morphism_map,
        )
    )
    handle = fold.semantics
    for gen in source.morphisms:
        expected = fold.morphism_image(gen.name)
        actual = induced.term_image(coequalizer.morphism_map[gen.name])
        if not sem_equal(handle, expected, actual):
            raise WellDefinednessError(
                f"induced fold disagrees with the original on {gen.name!r}"
            )
    return induced


def identify(
    net_sem: NetWithSemantics, witness: Witness
) -> tuple[NetWithSemantics, StrictFunctor]:
    """Merge the components a witness pairs, when their semantics agree.

    A witness with no transitions is handled as a chain of two-place
    merges; otherwise the general coequalizer is computed.  The result
    fold is the one induced on quotient classes.
    """
    sig = net_sem.presentation
    if witness.left.target != sig:
        raise SourceMismatchError("witness functors do not land in the given net")
    fold = net_sem.fold
    witness_sig = free_smc(witness.net)
    for obj in witness_sig.objects:
        left_obj = witness.left.map_object(obj)[0]
        right_obj = witness.right.map_object(obj)[0]
        if fold.object_image(left_obj) != fold.object_image(right_obj):
            raise SemanticsObstructionError(
                f"witness place {obj!r} pairs places with different semantics: "
                f"{left_obj!r} vs {right_obj!r}"
            )
    handle = fold.semantics
    for gen in witness_sig.morphisms:
        left_image = fold.term_image(witness.left.morphism_map[gen.name])
        right_image = fold.term_image(witness.right.morphism_map[gen.name])
        if not sem_equal(handle, left_image, right_image):
            raise SemanticsObstructionError(
                f"witness transition {gen.name!r} pairs transitions "
                "with different semantics"
            )

    if not witness.net.transitions:
        pairs = [
            (witness.left.map_object(o)[0], witness.right.map_object(o)[0])
            for o in witness_sig.objects
        ]
        coequalizer = _sequential_merge(sig, pairs)
    else:
        _, coequalizer = coequalize_tp(witness.left, witness.right)

    induced = factor_fold_through_coequalizer(coequalizer, fold)
    result = NetWithSemantics(net_of_presentation(coequalizer.target), induced)
    return result, coequalizer


# ---------------------------------------------------------------------------
# Coproducts and gluing between nets

def _copair_folds(
    left: Fold,
    right: Fold,
    left_places: Mapping[str, str],
    left_transitions: Mapping[str, str],
    right_places: Mapping[str, str],
    right_transitions: Mapping[str, str],
    coproduct: SmcPresentation,
) -> Fold:
    if isinstance(left, TerminalFold) and isinstance(right, TerminalFold):
        return TerminalFold(coproduct)
    if isinstance(left, PairFold) and isinstance(right, PairFold):
        return PairFold(
            _copair_folds(
                left.left, right.left,
                left_places, left_transitions, right_places, right_transitions,
                coproduct,
            ),
            _copair_folds(
                left.right, right.right,
                left_places, left_transitions, right_places, right_transitions,
                coproduct,
            ),
        )
    if isinstance(left, FreeFold) and isinstance(right, FreeFold):
        object_map: dict[str, Word] = {}
        morphism_map: dict[str, MorphismTerm] = {}
        for old, new in left_places.items():
            object_map[new] = left.functor.object_map[old]
        for old, new in right_places.items():
            object_map[new] = right.functor.object_map[old]
        for old, new in left_transitions.items():
            morphism_map[new] = left.functor.morphism_map[old]
        for old, new in right_transitions.items():
            morphism_map[new] = right.functor.morphism_map[old]
        return FreeFold(
            StrictFunctor(coproduct, left.functor.target, object_map, morphism_map)
        )
    raise SemanticsMismatchError("folds disagree on their backend shape")


def monoidal_product(
    m_sem: NetWithSemantics, n_sem: NetWithSemantics
) -> tuple[NetWithSemantics, StrictFunctor, StrictFunctor]:
    """Place two nets side by side; the fold is the copairing."""
    if m_sem.semantics != n_sem.semantics:
        raise SemanticsMismatchError("nets carry different semantics")
    coproduct, iota1, iota2 = net_coproduct(m_sem.net, n_sem.net)
    sig = free_smc(coproduct)
    left_places = dict(iota1.places)
    right_places = dict(iota2.places)
    left_transitions = dict(iota1.transitions)
    right_transitions = dict(iota2.transitions)
    functor1 = StrictFunctor(
        source=m_sem.presentation,
        target=sig,
        object_map={p: (left_places[p],) for p in m_sem.net.places},
        morphism_map={t.name: Gen(left_transitions[t.name]) for t in m_sem.net.transitions},
    )
    functor2 = StrictFunctor(
        source=n_sem.presentation,
        target=sig,
        object_map={p: (right_places[p],) for p in n_sem.net.places},
        morphism_map={t.name: Gen(right_transitions[t.name]) for t in n_sem.net.transitions},
    )
    fold = _copair_folds(
        m_sem.fold, n_sem.fold,
        left_places, left_transitions, right_places, right_transitions,
        sig,
    )
    return NetWithSemantics(coproduct, fold), functor1, functor2


@dataclass(frozen=True)
class PushoutResult:
    net: NetWithSemantics
    coequalizer: StrictFunctor
    left_leg: StrictFunctor
    right_leg: StrictFunctor
    product: NetWithSemantics


def pushout_glue(
    m_sem: NetWithSemantics,
    n_sem: NetWithSemantics,
    witness_net: PetriNet,
    left: StrictFunctor,
    right: StrictFunctor,
) -> PushoutResult:
    """Glue two nets along a witness: coequalize on their coproduct."""
    product, iota1, iota2 = monoidal_product(m_sem, n_sem)
    if left.target != m_sem.presentation or right.target != n_sem.presentation:
        raise SourceMismatchError("witness functors do not land in the given nets")
    witness = Witness(
        witness_net,
        compose_functors(left, iota1),
        compose_functors(right, iota2),
    )
    result, coequalizer = identify(product, witness)
    return PushoutResult(
        net=result,
        coequalizer=coequalizer,
        left_leg=compose_functors(iota1, coequalizer),
        right_leg=compose_functors(iota2, coequalizer),
        product=product,
    )


# ---------------------------------------------------------------------------
# Boundary composition

def minimal_firing_vector(
    producers: Sequence[tuple[str, int]], consumers: Sequence[tuple[str, int]]
) -> dict[str, int]:
    """Balance token flow with the fewest total firings, all at least one.

    Searches flows exhaustively up to a bound past which no assignment
    can beat the guaranteed fallback (every producer fires once per
    consumed token and vice versa); ties are broken lexicographically
    in declaration order, producers first.
    """
    if not producers or not consumers:
        raise PreconditionFailedError("producer and consumer lists must be nonempty")
    for name, amount in tuple(producers) + tuple(consumers):
        if amount < 1:
            raise PreconditionFailedError(f"amount for {name!r} must be >= 1")
    names = [name for name, _ in producers] + [name for name, _ in consumers]
    if len(set(names)) != len(names):
        raise PreconditionFailedError("transition names must be unique")

    produced = [amount for _, amount in producers]
    consumed = [amount for _, amount in consumers]

    def side_best(amounts: list[int], flow: int) -> tuple[int, tuple[int, ...]] | None:
        best: tuple[int, tuple[int, ...]] | None = None

        def recurse(i: int, remaining: int, total: int, acc: list[int]) -> None:
            nonlocal best
            if i == len(amounts) - 1:
                if remaining >= amounts[i] and remaining % amounts[i] == 0:
                    count = remaining // amounts[i]
                    candidate = (total + count, tuple(acc + [count]))
                    if best is None or candidate < best:
                        best = candidate
                return
            floor_rest = sum(amounts[i + 1 :])
            count = 1
            while amounts[i] * count + floor_rest <= remaining:
                recurse(i + 1, remaining - amounts[i] * count, total + count, acc + [count])
                count += 1

        recurse(0, flow, 0, [])
        return best

    sum_p, sum_c = sum(produced), sum(consumed)
    fallback = (
        len(produced) * sum_c + len(consumed) * sum_p,
        tuple([sum_c] * len(produced)),
        tuple([sum_p] * len(consumed)),
    )
    best = fallback
    max_p, max_c = max(produced), max(consumed)
    flow_cap = fallback[0] * max_p * max_c // (max_p + max_c)
    for flow in range(max(sum_p, sum_c), flow_cap + 1):
        side_p = side_best(produced, flow)
        side_c = side_best(consumed, flow)
        if side_p is None or side_c is None:
            continue
        candidate = (side_p[0] + side_c[0], side_p[1], side_c[1])
        if candidate < best:
            best = candidate
    if best is None:  # pragma: no cover - the fallback always exists
        raise NoSolutionWithinBoundError("no balanced firing vector within bound")
    counts = {name: count for (name, _), count in zip(producers, best[1])}
    counts.update({name: count for (name, _), count in zip(consumers, best[2])})
    return counts


@dataclass(frozen=True)
class BoundaryComposition:
    """Result of two-stage composition, kept with its audit trail."""

    net: NetWithSemantics
    merged: NetWithSemantics
    functor: StrictFunctor
    firing_vectors: tuple[tuple[str, tuple[tuple[str, int], ...]], ...]


def _synchronization_expression(
    sig: SmcPresentation,
    boundary: str,
    producer_counts: Sequence[tuple[str, int]],
    consumer_counts: Sequence[tuple[str, int]],
) -> MorphismTerm:
    """The conflated event: producers, a canonical routing, consumers.

    Boundary tokens flow from producer outputs to consumer inputs in
    order; non-boundary producer outputs ride along on identities, and
    consumer inputs outside the boundary enter as extra identities on
    the producer side.
    """
    producer_term = tensor_terms(
        [Gen(name) for name, count in producer_counts for _ in range(count)]
    )
    consumer_term = tensor_terms(
        [Gen(name) for name, count in consumer_counts for _ in range(count)]
    )
    out_word: Word = tuple(
        letter
        for name, count in producer_counts
        for _ in range(count)
        for letter in sig.morphism(name).cod
    )
    need_word: Word = tuple(
        letter
        for name, count in consumer_counts
        for _ in range(count)
        for letter in sig.morphism(name).dom
    )
    out_rest = tuple(letter for letter in out_word if letter != boundary)
    need_rest = tuple(letter for letter in need_word if letter != boundary)

    stage_in = producer_term if not need_rest else Tensor(producer_term, Id(need_rest))
    mid_word = out_word + need_rest
    target_word = need_word + out_rest

    boundary_positions = [i for i, letter in enumerate(out_word) if letter == boundary]
    rest_positions = [i for i, letter in enumerate(out_word) if letter != boundary]
    extra_positions = list(range(len(out_word), len(mid_word)))
    route: list[int] = []
    take_boundary = iter(boundary_positions)
    take_extra = iter(extra_positions)
    take_rest = iter(rest_positions)
    for letter in need_word:
        route.append(next(take_boundary) if letter == boundary else next(take_extra))
    for _ in out_rest:
        route.append(next(take_rest))

    stage_out = consumer_term if not out_rest else Tensor(consumer_term, Id(out_rest))
    parts: list[MorphismTerm] = [stage_in]
    if tuple(route) != identity_perm(len(mid_word)):
        parts.append(Perm(mid_word, tuple(route)))
    parts.append(stage_out)
    assert apply_perm(mid_word, tuple(route)) == target_word
    return compose_terms(parts)


def boundary_compose(
    left_sem: NetWithSemantics,
    right_sem: NetWithSemantics,
    pairing: Sequence[tuple[str, str]],
    bound: int = 3,
) -> BoundaryComposition:
    """Compose nets along paired places: merge, then synchronize.

    Stage one glues the nets over the paired boundary places.  Stage two
    conflates, for every merged place, its producers and consumers with
    the minimal balanced firing counts, pruning the place afterwards.
    Producers must all come from the left net and consumers from the
    right one.
    """
    if left_sem.semantics != right_sem.semantics:
        raise SemanticsMismatchError("nets carry different semantics")
    for left_place, right_place in pairing:
        if left_place not in left_sem.net.places:
            raise UnknownPlaceError(f"unknown left place {left_place!r}")
        if right_place not in right_sem.net.places:
            raise UnknownPlaceError(f"unknown right place {right_place!r}")
        if left_sem.fold.object_image(left_place) != right_sem.fold.object_image(
            right_place
        ):
            raise SemanticsObstructionError(
                f"paired places {left_place!r} and {right_place!r} "
                "carry different semantics"
            )
        offenders = [t.name for t in left_sem.net.transitions if left_place in t.pre]
        if offenders:
            raise BoundaryOrientationError(
                f"left transitions {offenders} consume from boundary place "
                f"{left_place!r}"
            )
        offenders = [t.name for t in right_sem.net.transitions if right_place in t.post]
        if offenders:
            raise BoundaryOrientationError(
                f"right transitions {offenders} produce on boundary place "
                f"{right_place!r}"
            )

    witness_net = PetriNet(tuple(f"b{i}" for i in range(len(pairing))), ())
    witness_sig = free_smc(witness_net)
    left = StrictFunctor(
        witness_sig,
        left_sem.presentation,
        {f"b{i}": (lp,) for i, (lp, _) in enumerate(pairing)},
        {},
    )
    right = StrictFunctor(
        witness_sig,
        right_sem.presentation,
        {f"b{i}": (rp,) for i, (_, rp) in enumerate(pairing)},
        {},
    )
    pushout = pushout_glue(left_sem, right_sem, witness_net, left, right)

    current = pushout.net
    total: StrictFunctor | None = None
    vectors: list[tuple[str, tuple[tuple[str, int], ...]]] = []
    for i, (left_place, _) in enumerate(pairing):
        merged_place = pushout.left_leg.map_object(left_place)[0]
        producers = [
            (t.name, t.post.count(merged_place))
            for t in current.net.transitions
            if merged_place in t.post
        ]
        consumers = [
            (t.name, t.pre.count(merged_place))
            for t in current.net.transitions
            if merged_place in t.pre
        ]
        if not producers or not consumers:
            raise BoundaryOrientationError(
                f"merged place {merged_place!r} lacks a producer or a consumer"
            )
        both = {name for name, _ in producers} & {name for name, _ in consumers}
        if both:
            raise BoundaryOrientationError(
                f"transitions {sorted(both)} both produce and consume on "
                f"{merged_place!r}"
            )
        counts = minimal_firing_vector(producers, consumers)
        vectors.append((merged_place, tuple(sorted(counts.items()))))
        expression = _synchronization_expression(
            current.presentation,
            merged_place,
            [(name, counts[name]) for name, _ in producers],
            [(name, counts[name]) for name, _ in consumers],
        )
        new_name = "+".join(
            f"{name}*{counts[name]}" if counts[name] > 1 else name
            for name, _ in producers + consumers
        )
        existing = {t.name for t in current.net.transitions}
        while new_name in existing:
            new_name += "'"
        current, step = synchronize_transitions(
            current, SyncRecipe(new_name, expression, prune=True), bound
        )
        total = step if total is None else compose_functors(step, total)

    if total is None:
        total = identity_functor(current.presentation)
    return BoundaryComposition(
        net=current,
        merged=pushout.net,
        functor=total,
        firing_vectors=tuple(vectors),
    )
