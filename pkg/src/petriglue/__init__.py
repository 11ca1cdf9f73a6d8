"""Petri nets with attached categorical semantics and their composition algebra."""

from .errors import (
    BadPermutationError,
    BoundaryOrientationError,
    BudgetExceededError,
    EmptyDecompositionError,
    NoSolutionWithinBoundError,
    ParseError,
    PetriGlueError,
    PreconditionFailedError,
    SamePlaceError,
    SemanticsMismatchError,
    SemanticsObstructionError,
    SourceMismatchError,
    TypeMismatchError,
    UnknownGeneratorError,
    UnknownPlaceError,
    ValidationError,
    VerdictFailedError,
    WellDefinednessError,
)
from .net_model import (
    MorphismGenerator,
    Multiset,
    PetriNet,
    SmcPresentation,
    Transition,
    Word,
    free_smc,
    is_fsm,
    linearize,
    net_coproduct,
    net_of_presentation,
    presentations_isomorphic,
    prune_isolated_places,
)
from .fssmc import (
    Compose,
    Gen,
    Id,
    MorphismTerm,
    Perm,
    StringDiagram,
    Tensor,
    belongs,
    decomposition,
    diagram_equal,
    symmetry,
    terms_equal,
    to_diagram,
    typecheck,
)
from .functors import (
    CounterexampleFound,
    FaithfulUpTo,
    StrictFunctor,
    apply_functor,
    check_faithful_bounded,
    compose_functors,
    covers_all_target_generators,
    identity_functor,
    is_generator_preserving_on_objects,
    is_injective_on_object_generators,
    is_transition_preserving,
)
from .semantics import (
    Fold,
    FreeFold,
    FreeSmc,
    NetWithSemantics,
    PairFold,
    Product,
    Terminal,
    TerminalFold,
    commutes_with_semantics,
    identity_fold,
    pair_folds,
    product_semantics,
    sem_equal,
    terminal_net,
    transport,
)
from .gluing import (
    BoundaryComposition,
    ConditionFailure,
    PushoutResult,
    SyncRecipe,
    Verdict,
    Witness,
    boundary_compose,
    coequalize_tp,
    factor_fold_through_coequalizer,
    identify,
    is_synchronization,
    make_synchronization,
    merge_two_places,
    minimal_firing_vector,
    monoidal_product,
    pushout_glue,
    synchronize_transitions,
)
from .cli_io import export_dot, main, parse_net, parse_term, serialize_net, term_to_text

__version__ = "0.1.0"
