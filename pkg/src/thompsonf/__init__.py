"""Exact computations in Thompson's group F.

Elements live in three equivalent forms -- normal-form words over
x_0, x_1, x_2, ..., pairs of binary trees, and dyadic piecewise-linear
homeomorphisms of [0,1] -- with exact conversions between them.  On top of
that the package decides subgroup membership through 2-dimensional
Stallings folding and produces checkable witnesses for the structural facts
about the subgroup generated by x_0x_1, x_1x_2, x_2x_3 and its relatives.

All values are immutable after construction and all operations are pure, so
everything can be shared freely across threads.
"""

from .words import (
    Block,
    CosetCertificate,
    Letter,
    NormalForm,
    Word,
    WordParseError,
    conjugate,
    coset_minimize,
    coset_positivize,
    find_blocks,
    format_word,
    group_op,
    invert,
    multiply,
    multiply_normal,
    normalize,
    normalize_stepwise,
    parity_in_G,
    parse_word,
    semi_normal_form,
    skips,
    word,
)
from .treepairs import (
    LEAF,
    BinTree,
    TreePair,
    caret,
    concat,
    concat_reduce,
    diagram_to_word,
    generator_diagram,
    invert_pair,
    leaf_count,
    pair_from_string,
    reduce_dipoles,
    word_to_diagram,
)
from .plmaps import (
    BinaryPoint,
    NonDyadicCutWarning,
    PLMap,
    PrefixMap,
    act_on_point,
    apply_prefix,
    components,
    evaluate_exact,
    fixed_set,
    is_dyadic,
    oplus,
    pair_to_prefix,
    parse_binary_point,
    plmap_to_pair,
    prefix_to_pair,
    prefix_to_plmap,
    plmap_to_prefix,
    stabilizes,
    word_to_plmap,
)
from .folding import (
    FoldedCore,
    FoldEvent,
    TwoAutomaton,
    bouquet,
    build_core,
    closure_member,
    core_from_dot,
    core_from_json,
    extend_core,
    fold_to_fixpoint,
)
from .subgroups import (
    NamedSubgroup,
    WitnessExpr,
    augmentation_witness,
    classify_jones_extension,
    g_witness,
    jones_core,
    jones_member,
    psi_inverse,
    psi_map,
    savchuk_member,
    stabilizer_generators,
    stabilizer_member,
)

__all__ = [name for name in dir() if not name.startswith("_")]
__version__ = "0.1.0"
