"""JSON document formats, term expressions, DOT export and the CLI.

Documents are canonicalized on output: object keys sorted, arrays in
declaration order, two-space indentation, trailing newline.  Terms are
embedded as strings in a small expression grammar::

    term := gen(NAME) | id([NAME,...]) | perm([NAME,...],[INT,...])
          | comp(term,term) | ten(term,term)
"""
from __future__ import annotations

import argparse
import json
import sys
from pathlib import Path
from typing import Any, Sequence

from .errors import (
    ParseError,
    PetriGlueError,
    SemanticsObstructionError,
    ValidationError,
    VerdictFailedError,
)
from .fssmc import Compose, Gen, Id, MorphismTerm, Perm, Tensor, symmetry
from .functors import StrictFunctor
from .gluing import (
    SyncRecipe,
    Verdict,
    Witness,
    boundary_compose,
    identify,
    is_synchronization,
    monoidal_product,
    pushout_glue,
    synchronize_transitions,
)
from .net_model import (
    Multiset,
    MorphismGenerator,
    PetriNet,
    SmcPresentation,
    Transition,
    free_smc,
)
from .semantics import (
    Fold,
    FreeFold,
    FreeSmc,
    NetWithSemantics,
    PairFold,
    Product,
    SemanticsHandle,
    Terminal,
    TerminalFold,
    transport,
)

# ---------------------------------------------------------------------------
# Term expressions

_PUNCTUATION = set("()[],")


def _tokenize(text: str) -> list[tuple[str, str, int]]:
    tokens: list[tuple[str, str, int]] = []
    i = 0
    while i < len(text):
        ch = text[i]
        if ch.isspace():
            i += 1
            continue
        if ch in _PUNCTUATION:
            tokens.append(("punct", ch, i))
            i += 1
            continue
        start = i
        while i < len(text) and not text[i].isspace() and text[i] not in _PUNCTUATION:
            i += 1
        tokens.append(("atom", text[start:i], start))
    return tokens


class _TermParser:
    def __init__(self, text: str) -> None:
        self.text = text
        self.tokens = _tokenize(text)
        self.pos = 0

    def error(self, message: str) -> ParseError:
        at = self.tokens[self.pos][2] if self.pos < len(self.tokens) else len(self.text)
        return ParseError(f"at position {at}: {message}")

    def peek(self) -> tuple[str, str, int] | None:
        return self.tokens[self.pos] if self.pos < len(self.tokens) else None

    def expect(self, value: str) -> None:
        token = self.peek()
        if token is None or token[1] != value:
            raise self.error(f"expected {value!r}")
        self.pos += 1

    def atom(self) -> str:
        token = self.peek()
        if token is None or token[0] != "atom":
            raise self.error("expected a name")
        self.pos += 1
        return token[1]

    def name_list(self) -> tuple[str, ...]:
        self.expect("[")
        names: list[str] = []
        if self.peek() and self.peek()[1] == "]":
            self.pos += 1
            return ()
        names.append(self.atom())
        while self.peek() and self.peek()[1] == ",":
            self.pos += 1
            names.append(self.atom())
        self.expect("]")
        return tuple(names)

    def int_list(self) -> tuple[int, ...]:
        names = self.name_list()
        try:
            return tuple(int(n) for n in names)
        except ValueError as exc:
            raise self.error("expected a list of integers") from exc

    def term(self) -> MorphismTerm:
        head = self.atom()
        self.expect("(")
        if head == "gen":
            name = self.atom()
            self.expect(")")
            return Gen(name)
        if head == "id":
            word = self.name_list()
            self.expect(")")
            return Id(word)
        if head == "perm":
            word = self.name_list()
            self.expect(",")
            perm = self.int_list()
            self.expect(")")
            return symmetry(word, perm)
        if head == "comp" or head == "ten":
            first = self.term()
            self.expect(",")
            second = self.term()
            self.expect(")")
            return Compose(first, second) if head == "comp" else Tensor(first, second)
        raise self.error(f"unknown term constructor {head!r}")


def parse_term(text: str) -> MorphismTerm:
    """Parse a term expression; positions are reported on failure."""
    parser = _TermParser(text)
    term = parser.term()
    if parser.peek() is not None:
        raise parser.error("trailing input after term")
    return term


def term_to_text(term: MorphismTerm) -> str:
    """Canonical expression form; inverse of :func:`parse_term`."""
    if isinstance(term, Gen):
        return f"gen({term.name})"
    if isinstance(term, Id):
        return f"id([{','.join(term.word)}])"
    if isinstance(term, Perm):
        return f"perm([{','.join(term.word)}],[{','.join(map(str, term.perm))}])"
    if isinstance(term, Compose):
        return f"comp({term_to_text(term.first)},{term_to_text(term.second)})"
    if isinstance(term, Tensor):
        return f"ten({term_to_text(term.left)},{term_to_text(term.right)})"
    raise ValidationError(f"not a morphism term: {term!r}")


def pretty_term(term: MorphismTerm) -> str:
    """Human form used in DOT labels: ``(f⊗f);k`` style."""
    def go(t: MorphismTerm, parent: str) -> str:
        if isinstance(t, Gen):
            return t.name
        if isinstance(t, Id):
            return f"id({'·'.join(t.word) or 'ε'})"
        if isinstance(t, Perm):
            return f"σ{list(t.perm)}"
        if isinstance(t, Compose):
            body = f"{go(t.first, ';')};{go(t.second, ';')}"
            return f"({body})" if parent == "⊗" else body
        if isinstance(t, Tensor):
            body = f"{go(t.left, '⊗')}⊗{go(t.right, '⊗')}"
            return f"({body})" if parent == ";" else body
        raise ValidationError(f"not a morphism term: {t!r}")

    return go(term, "")


# ---------------------------------------------------------------------------
# JSON documents

def _require(doc: Any, key: str, kind: type, where: str) -> Any:
    if not isinstance(doc, dict) or key not in doc:
        raise ParseError(f"{where}: missing key {key!r}")
    value = doc[key]
    if not isinstance(value, kind):
        raise ParseError(f"{where}: key {key!r} must be a {kind.__name__}")
    return value


def _counts(doc: Any, where: str) -> Multiset:
    if not isinstance(doc, dict):
        raise ParseError(f"{where}: expected an object of counts")
    for place, count in doc.items():
        if not isinstance(count, int) or count < 1:
            raise ValidationError(f"{where}: count for {place!r} must be a positive integer")
    return Multiset.from_counts(doc)


def parse_bare_net(doc: Any, where: str = "net") -> PetriNet:
    places = tuple(_require(doc, "places", list, where))
    transitions = []
    for i, tdoc in enumerate(_require(doc, "transitions", list, where)):
        name = _require(tdoc, "name", str, f"{where}.transitions[{i}]")
        pre = _counts(_require(tdoc, "pre", dict, f"{where}.transitions[{i}]"), f"{where}.{name}.pre")
        post = _counts(_require(tdoc, "post", dict, f"{where}.transitions[{i}]"), f"{where}.{name}.post")
        transitions.append(Transition(name, pre, post))
    return PetriNet(places, tuple(transitions))


def bare_net_to_doc(net: PetriNet) -> dict:
    return {
        "places": list(net.places),
        "transitions": [
            {"name": t.name, "pre": t.pre.to_dict(), "post": t.post.to_dict()}
            for t in net.transitions
        ],
    }


def parse_semantics(doc: Any) -> SemanticsHandle:
    backend = _require(doc, "backend", str, "semantics")
    if backend == "terminal":
        return Terminal()
    if backend == "product":
        return Product(
            parse_semantics(_require(doc, "left", dict, "semantics")),
            parse_semantics(_require(doc, "right", dict, "semantics")),
        )
    if backend == "free":
        if doc.get("equations"):
            raise ValidationError(
                "presentations with equations are not supported: "
                "their word problem is undecidable"
            )
        objects = tuple(_require(doc, "objects", list, "semantics"))
        morphisms = []
        for i, mdoc in enumerate(_require(doc, "morphisms", list, "semantics")):
            morphisms.append(
                MorphismGenerator(
                    _require(mdoc, "name", str, f"semantics.morphisms[{i}]"),
                    tuple(_require(mdoc, "dom", list, f"semantics.morphisms[{i}]")),
                    tuple(_require(mdoc, "cod", list, f"semantics.morphisms[{i}]")),
                )
            )
        return FreeSmc(SmcPresentation(objects, tuple(morphisms)))
    raise ParseError(f"semantics: unknown backend {backend!r}")


def semantics_to_doc(handle: SemanticsHandle) -> dict:
    if isinstance(handle, Terminal):
        return {"backend": "terminal"}
    if isinstance(handle, Product):
        return {
            "backend": "product",
            "left": semantics_to_doc(handle.left),
            "right": semantics_to_doc(handle.right),
        }
    return {
        "backend": "free",
        "objects": list(handle.presentation.objects),
        "morphisms": [
            {"name": m.name, "dom": list(m.dom), "cod": list(m.cod)}
            for m in handle.presentation.morphisms
        ],
    }


def parse_fold(doc: Any, source: SmcPresentation, handle: SemanticsHandle) -> Fold:
    if isinstance(handle, Terminal):
        return TerminalFold(source)
    if isinstance(handle, Product):
        return PairFold(
            parse_fold(_require(doc, "left", dict, "fold"), source, handle.left),
            parse_fold(_require(doc, "right", dict, "fold"), source, handle.right),
        )
    objects_doc = _require(doc, "objects", dict, "fold")
    morphisms_doc = _require(doc, "morphisms", dict, "fold")
    object_map = {name: tuple(word) for name, word in objects_doc.items()}
    morphism_map = {name: parse_term(text) for name, text in morphisms_doc.items()}
    return FreeFold(StrictFunctor(source, handle.presentation, object_map, morphism_map))


def fold_to_doc(fold: Fold) -> dict:
    if isinstance(fold, TerminalFold):
        return {}
    if isinstance(fold, PairFold):
        return {"left": fold_to_doc(fold.left), "right": fold_to_doc(fold.right)}
    assert isinstance(fold, FreeFold)
    return {
        "objects": {name: list(word) for name, word in fold.functor.object_map.items()},
        "morphisms": {
            name: term_to_text(term) for name, term in fold.functor.morphism_map.items()
        },
    }


def parse_net(text: str) -> NetWithSemantics:
    """Load and validate a net document into a net with semantics."""
    try:
        doc = json.loads(text)
    except json.JSONDecodeError as exc:
        raise ParseError(f"line {exc.lineno}, column {exc.colno}: {exc.msg}") from exc
    net = parse_bare_net(doc, "document")
    handle = parse_semantics(_require(doc, "semantics", dict, "document"))
    fold_doc = doc.get("fold", {})
    fold = parse_fold(fold_doc, free_smc(net), handle)
    return NetWithSemantics(net, fold)


def serialize_net(net_sem: NetWithSemantics) -> str:
    """Canonical document text; parse and serialize are mutually inverse."""
    doc = bare_net_to_doc(net_sem.net)
    doc["semantics"] = semantics_to_doc(net_sem.semantics)
    doc["fold"] = fold_to_doc(net_sem.fold)
    return json.dumps(doc, sort_keys=True, indent=2) + "\n"


def parse_functor(doc: Any, source: SmcPresentation, target: SmcPresentation) -> StrictFunctor:
    objects_doc = _require(doc, "objects", dict, "functor")
    morphisms_doc = _require(doc, "morphisms", dict, "functor")
    return StrictFunctor(
        source=source,
        target=target,
        object_map={name: tuple(word) for name, word in objects_doc.items()},
        morphism_map={name: parse_term(text) for name, text in morphisms_doc.items()},
    )


def parse_witness(doc: Any, target: SmcPresentation) -> Witness:
    net = parse_bare_net(_require(doc, "net", dict, "witness"), "witness.net")
    sig = free_smc(net)
    return Witness(
        net,
        parse_functor(_require(doc, "l", dict, "witness"), sig, target),
        parse_functor(_require(doc, "r", dict, "witness"), sig, target),
    )


def parse_recipe(doc: Any) -> SyncRecipe:
    return SyncRecipe(
        new_name=_require(doc, "name", str, "recipe"),
        expression=parse_term(_require(doc, "expression", str, "recipe")),
        prune=bool(doc.get("prune", False)),
    )


# ---------------------------------------------------------------------------
# DOT export

def _quote(name: str) -> str:
    return '"' + name.replace("\\", "\\\\").replace('"', '\\"') + '"'


def _sem_object_label(value: object) -> str:
    if value is None:
        return "•"
    if isinstance(value, tuple) and value and all(isinstance(x, str) for x in value):
        return "·".join(value)
    if isinstance(value, tuple) and len(value) == 2:
        return f"⟨{_sem_object_label(value[0])},{_sem_object_label(value[1])}⟩"
    if isinstance(value, tuple) and not value:
        return "ε"
    return str(value)


def _sem_morphism_label(value: object) -> str:
    if value is None:
        return "•"
    if isinstance(value, MorphismTerm):
        return pretty_term(value)
    if isinstance(value, tuple) and len(value) == 2:
        return f"⟨{_sem_morphism_label(value[0])},{_sem_morphism_label(value[1])}⟩"
    return str(value)


def export_dot(net: PetriNet, fold: Fold | None = None) -> str:
    """Render a decorated net as a deterministic DOT digraph.

    Places are circles, transitions boxes; arc weights above one label
    the edges.  Node and edge order follows declaration order, so the
    output is byte-identical across runs.
    """
    lines = ["digraph net {", "  rankdir=LR;"]
    for place in net.places:
        label = place
        if fold is not None:
            label = f"{place} : {_sem_object_label(fold.object_image(place))}"
        lines.append(f"  {_quote('place:' + place)} [shape=circle, label={_quote(label)}];")
    for t in net.transitions:
        label = t.name
        if fold is not None:
            label = f"{t.name} : {_sem_morphism_label(fold.morphism_image(t.name))}"
        lines.append(f"  {_quote('trans:' + t.name)} [shape=box, label={_quote(label)}];")
    for t in net.transitions:
        for place in net.places:
            count = t.pre.count(place)
            if count:
                suffix = f" [label=\"{count}\"]" if count > 1 else ""
                lines.append(
                    f"  {_quote('place:' + place)} -> {_quote('trans:' + t.name)}{suffix};"
                )
        for place in net.places:
            count = t.post.count(place)
            if count:
                suffix = f" [label=\"{count}\"]" if count > 1 else ""
                lines.append(
                    f"  {_quote('trans:' + t.name)} -> {_quote('place:' + place)}{suffix};"
                )
    lines.append("}")
    return "\n".join(lines) + "\n"


# ---------------------------------------------------------------------------
# Command line

def _read(path: str) -> str:
    try:
        return Path(path).read_text(encoding="utf-8")
    except OSError as exc:
        raise ParseError(f"cannot read {path}: {exc}") from exc


def _load_net(path: str) -> NetWithSemantics:
    return parse_net(_read(path))


def _load_json(path: str) -> Any:
    try:
        return json.loads(_read(path))
    except json.JSONDecodeError as exc:
        raise ParseError(f"{path}: line {exc.lineno}: {exc.msg}") from exc


def _emit(text: str, out: str | None) -> None:
    if out:
        Path(out).write_text(text, encoding="utf-8")
    else:
        sys.stdout.write(text)


def _print_verdict(verdict: Verdict) -> None:
    if verdict.passed:
        print(f"pass (faithfulness bound {verdict.faithfulness_bound})")
        return
    for failure in verdict.failures:
        print(f"fail {failure.condition}: {failure.detail}")
        for item in failure.certificate:
            text = term_to_text(item) if isinstance(item, MorphismTerm) else str(item)
            print(f"  certificate: {text}")


def _presentation_text(sig: SmcPresentation) -> str:
    lines = ["objects: " + (" ".join(sig.objects) or "(none)")]
    for m in sig.morphisms:
        dom = "·".join(m.dom) or "ε"
        cod = "·".join(m.cod) or "ε"
        lines.append(f"{m.name} : {dom} -> {cod}")
    return "\n".join(lines) + "\n"


def _build_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(
        prog="petriglue",
        description="Compose Petri nets while respecting their semantics.",
    )
    sub = parser.add_subparsers(dest="command", required=True)

    p = sub.add_parser("validate", help="check a net document")
    p.add_argument("net")

    p = sub.add_parser("freecat", help="print the presentation of a net")
    p.add_argument("net")

    p = sub.add_parser("check-functor", help="verify the synchronization conditions")
    p.add_argument("functor")
    p.add_argument("--src", required=True)
    p.add_argument("--tgt", required=True)
    p.add_argument("--faithful-bound", type=int, default=3)

    p = sub.add_parser("sync", help="conflate transitions by a recipe")
    p.add_argument("net")
    p.add_argument("--recipe", required=True)
    p.add_argument("--out")

    p = sub.add_parser("identify", help="merge components selected by a witness")
    p.add_argument("net")
    p.add_argument("--witness", required=True)
    p.add_argument("--out")

    p = sub.add_parser("coproduct", help="place two nets side by side")
    p.add_argument("left")
    p.add_argument("right")
    p.add_argument("--out")

    p = sub.add_parser("pushout", help="glue two nets along a witness net")
    p.add_argument("left")
    p.add_argument("right")
    p.add_argument("--witness", required=True)
    p.add_argument("--l", dest="lmap", required=True)
    p.add_argument("--r", dest="rmap", required=True)
    p.add_argument("--out")

    p = sub.add_parser("compose", help="boundary-compose nets on paired places")
    p.add_argument("left")
    p.add_argument("right")
    p.add_argument("--pair", action="append", required=True, metavar="LEFT=RIGHT")
    p.add_argument("--faithful-bound", type=int, default=3)
    p.add_argument("--out")

    p = sub.add_parser("transport", help="move a net to a new semantics")
    p.add_argument("net")
    p.add_argument("--functor", required=True)
    p.add_argument("--out")

    p = sub.add_parser("dot", help="render a net document as DOT")
    p.add_argument("net")
    p.add_argument("--out")

    return parser


def _run(args: argparse.Namespace) -> int:
    if args.command == "validate":
        net_sem = _load_net(args.net)
        print(
            f"ok: {len(net_sem.net.places)} places, "
            f"{len(net_sem.net.transitions)} transitions"
        )
        return 0

    if args.command == "freecat":
        net_sem = _load_net(args.net)
        sys.stdout.write(_presentation_text(net_sem.presentation))
        return 0

    if args.command == "check-functor":
        src = _load_net(args.src)
        tgt = _load_net(args.tgt)
        functor = parse_functor(
            _load_json(args.functor), src.presentation, tgt.presentation
        )
        verdict = is_synchronization(functor, src, tgt, args.faithful_bound)
        _print_verdict(verdict)
        return 0 if verdict.passed else 1

    if args.command == "sync":
        net_sem = _load_net(args.net)
        recipe = parse_recipe(_load_json(args.recipe))
        result, _ = synchronize_transitions(net_sem, recipe)
        _emit(serialize_net(result), args.out)
        return 0

    if args.command == "identify":
        net_sem = _load_net(args.net)
        witness = parse_witness(_load_json(args.witness), net_sem.presentation)
        result, _ = identify(net_sem, witness)
        _emit(serialize_net(result), args.out)
        return 0

    if args.command == "coproduct":
        left = _load_net(args.left)
        right = _load_net(args.right)
        result, _, _ = monoidal_product(left, right)
        _emit(serialize_net(result), args.out)
        return 0

    if args.command == "pushout":
        left = _load_net(args.left)
        right = _load_net(args.right)
        witness_net = parse_bare_net(_load_json(args.witness), "witness")
        sig = free_smc(witness_net)
        lmap = parse_functor(_load_json(args.lmap), sig, left.presentation)
        rmap = parse_functor(_load_json(args.rmap), sig, right.presentation)
        result = pushout_glue(left, right, witness_net, lmap, rmap)
        _emit(serialize_net(result.net), args.out)
        return 0

    if args.command == "compose":
        left = _load_net(args.left)
        right = _load_net(args.right)
        pairing = []
        for pair in args.pair:
            if "=" not in pair:
                raise ParseError(f"--pair must look like LEFT=RIGHT, got {pair!r}")
            lp, rp = pair.split("=", 1)
            pairing.append((lp, rp))
        result = boundary_compose(left, right, pairing, args.faithful_bound)
        _emit(serialize_net(result.net), args.out)
        return 0

    if args.command == "transport":
        net_sem = _load_net(args.net)
        doc = _load_json(args.functor)
        handle = parse_semantics(_require(doc, "semantics", dict, "functor"))
        if not isinstance(net_sem.fold, FreeFold):
            raise ValidationError("transport requires a net with a free backend")
        change = parse_fold(doc, net_sem.fold.functor.target, handle)
        result = transport(change, net_sem)
        _emit(serialize_net(result), args.out)
        return 0

    if args.command == "dot":
        net_sem = _load_net(args.net)
        _emit(export_dot(net_sem.net, net_sem.fold), args.out)
        return 0

    raise AssertionError(f"unhandled command {args.command!r}")


def main(argv: Sequence[str] | None = None) -> int:
    parser = _build_parser()
    args = parser.parse_args(argv)
    try:
        return _run(args)
    except (VerdictFailedError, SemanticsObstructionError) as exc:
        print(f"verdict failure: {exc}", file=sys.stderr)
        verdict = getattr(exc, "verdict", None)
        if isinstance(verdict, Verdict):
            for failure in verdict.failures:
                print(f"  {failure.condition}: {failure.detail}", file=sys.stderr)
        return 1
    except PetriGlueError as exc:
        print(f"error: {exc}", file=sys.stderr)
        return 2


if __name__ == "__main__":
    raise SystemExit(main())
