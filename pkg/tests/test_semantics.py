"""Backends, folds, morphism equality, products and transport."""
from __future__ import annotations

import random

import pytest

from petriglue import (
    Compose,
    FreeFold,
    FreeSmc,
    Gen,
    Id,
    MorphismGenerator,
    NetWithSemantics,
    Product,
    SemanticsMismatchError,
    SmcPresentation,
    SourceMismatchError,
    StrictFunctor,
    Terminal,
    TerminalFold,
    TypeMismatchError,
    commutes_with_semantics,
    free_smc,
    identity_fold,
    identity_functor,
    pair_folds,
    product_semantics,
    sem_equal,
    symmetry,
    terminal_net,
    transport,
)
from support import fig1_net, fig1_nws, random_embedding, random_term

SIG = free_smc(fig1_net())


class TestSemEqual:
    def test_terminal_everything_equal(self):
        assert sem_equal(Terminal(), Gen("g"), Compose(Gen("g"), Gen("k")))

    def test_free_symmetry_cancellation(self):
        word = ("A", "B")
        term = Compose(symmetry(word, (1, 0)), symmetry(("B", "A"), (1, 0)))
        assert sem_equal(FreeSmc(SIG), term, Id(word))

    def test_free_distinct_generators(self):
        handle = FreeSmc(
            SmcPresentation(
                ("X",),
                (
                    MorphismGenerator("g", ("X",), ("X",)),
                    MorphismGenerator("h", ("X",), ("X",)),
                ),
            )
        )
        assert not sem_equal(handle, Gen("g"), Gen("h"))

    def test_non_parallel_rejected(self):
        with pytest.raises(TypeMismatchError):
            sem_equal(FreeSmc(SIG), Gen("g"), Gen("h"))

    def test_product_is_conjunction(self):
        handle = SmcPresentation(
            ("X",),
            (
                MorphismGenerator("g", ("X",), ("X",)),
                MorphismGenerator("h", ("X",), ("X",)),
            ),
        )
        product = product_semantics(FreeSmc(handle), FreeSmc(handle))
        g, h = Gen("g"), Gen("h")
        assert sem_equal(product, (g, g), (g, g))
        assert not sem_equal(product, (g, g), (g, h))
        assert not sem_equal(product, (h, g), (g, g))
        assert not sem_equal(product, (g, h), (h, g))

    def test_equivalence_relation_per_backend(self):
        rng = random.Random(31)
        from support import random_rewrite

        handle = FreeSmc(SIG)
        for _ in range(15):
            t = random_term(rng, SIG, 3)
            u = random_rewrite(rng, t, SIG)
            assert sem_equal(handle, t, t)
            assert sem_equal(handle, t, u) == sem_equal(handle, u, t)


class TestProductFolds:
    def test_pair_and_project(self):
        nws = fig1_nws()
        left = nws.fold
        right = TerminalFold(SIG)
        paired = pair_folds(left, right)
        assert paired.left is left
        assert paired.right is right
        assert paired.semantics == Product(left.semantics, Terminal())

    def test_pairing_requires_shared_source(self):
        with pytest.raises(SourceMismatchError):
            pair_folds(identity_fold(fig1_net()), TerminalFold(SmcPresentation(("Z",), ())))

    def test_paired_images_are_pairs(self):
        nws = fig1_nws()
        paired = pair_folds(nws.fold, TerminalFold(SIG))
        assert paired.object_image("A") == (("A",), None)
        value = paired.morphism_image("g")
        assert value[0] == Gen("g") and value[1] is None


class TestCommutes:
    def test_terminal_always_commutes(self):
        nws = terminal_net(fig1_net())
        assert commutes_with_semantics(identity_functor(SIG), nws, nws)

    def test_identity_commutes(self):
        nws = fig1_nws()
        assert commutes_with_semantics(identity_functor(SIG), nws, nws)

    def test_perturbed_decoration_fails(self):
        nws = fig1_nws()
        # cross the two A inputs of g's decoration: parallel to gen(g)
        # but a different morphism, so commutation breaks
        g_dom = SIG.morphism("g").dom
        crossing = symmetry(g_dom, (1, 0, 2, 3, 4, 5))
        twisted = FreeFold(
            StrictFunctor(
                SIG,
                SIG,
                {o: (o,) for o in SIG.objects},
                {
                    "f": Gen("f"),
                    "g": Compose(crossing, Gen("g")),
                    "h": Gen("h"),
                    "k": Gen("k"),
                },
            )
        )
        other = NetWithSemantics(fig1_net(), twisted)
        assert not commutes_with_semantics(identity_functor(SIG), nws, other)

    def test_mismatched_semantics_rejected(self):
        with pytest.raises(SemanticsMismatchError):
            commutes_with_semantics(
                identity_functor(SIG), fig1_nws(), terminal_net(fig1_net())
            )


class TestTransport:
    def test_identity_change_keeps_fold(self):
        nws = fig1_nws()
        change = FreeFold(identity_functor(SIG))
        moved = transport(change, nws)
        assert moved.fold.functor.object_map == nws.fold.functor.object_map

    def test_to_terminal(self):
        nws = fig1_nws()
        moved = transport(TerminalFold(SIG), nws)
        assert moved.semantics == Terminal()
        assert moved.net == nws.net

    def test_requires_free_backend(self):
        nws = terminal_net(fig1_net())
        with pytest.raises(SemanticsMismatchError):
            transport(TerminalFold(SIG), nws)

    def test_morphisms_stay_morphisms(self):
        rng = random.Random(33)
        nws = fig1_nws()
        change = FreeFold(random_embedding(rng, SIG))
        src = transport(change, nws)
        tgt = transport(change, nws)
        assert commutes_with_semantics(identity_functor(SIG), src, tgt)
