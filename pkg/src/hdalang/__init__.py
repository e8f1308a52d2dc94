"""Higher-dimensional automata, interval-ipomset languages, and the
constructions relating them: expression compilation, language extraction,
and exhaustively checkable bounded oracles."""

from .errors import HdaError
from .ipomset import (
    IloSet,
    Ipomset,
    Measures,
    canonicalize,
    discrete,
    down_close,
    empty,
    glue,
    identity,
    is_interval,
    measures,
    parallel,
    parse_ipomset,
    reverse,
    singleton,
    subsumes,
)
from .langset import (
    Language,
    RatExpr,
    Truncation,
    dump_language,
    eval_expr,
    format_expr,
    lang_equal,
    lang_glue,
    lang_parallel,
    lang_plus,
    lang_subset,
    lang_union,
    language,
    parse_expr,
)
from .pcset import (
    Cell,
    Hda,
    PcMap,
    PrecubeSet,
    close,
    coproduct,
    from_doc,
    load_hda,
    resolve,
    reverse_hda,
    save_hda,
    standard_cube,
    tensor,
    to_doc,
    yoneda,
)
from .pathlang import (
    Path,
    Step,
    bounded_weak_equivalence,
    enumerate_language,
    ev_path,
    member_by_paths,
    member_by_track,
    parse_path,
    sparse_normal_form,
    track_object,
)
from .surgery import (
    classify_inclusion,
    compose_serial,
    cylinder,
    decompose_simple,
    glue_hdas,
    kleene_plus,
    accept_properize,
    self_glue,
    seq_glue,
    spider_plus,
    start_properize,
    subtract_identities,
)
from .kleene import compile_expr, extract, interleaving_automaton

__all__ = [name for name in dir() if not name.startswith("_")]
__version__ = "0.1.0"
