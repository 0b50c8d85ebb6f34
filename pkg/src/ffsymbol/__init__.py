"""Exact symbol calculus and dataset pipeline for three-gluon form factors.

The symbol of the L-loop form factor is a sparse map from length-2L words
over the alphabet {a,b,c,d,e,f} to exact integer coefficients.  This
package provides the data model, the dihedral group action, trivial-zero
rules and exact key counting, the full linear-relation catalog with
instance generation and scoring, the quad-compressed representation,
dataset emission for sequence models, and scoring of prediction files.
"""

from ffsymbol.keys import (
    parse_key,
    format_key,
    pack_key,
    unpack_key,
    cycle_key,
    flip_key,
    dihedral_orbit,
    canonical_key,
    forbidden_pairs,
    is_trivial_zero,
    count_valid_keys,
)
from ffsymbol.symbol import Symbol, builtin_symbol
from ffsymbol.relations import (
    catalog,
    get_relation,
    instantiate,
    generate_instances,
    enumerate_instances,
    residual,
    score_instances,
)
from ffsymbol.quad import QuadSymbol, to_quad, expand_quad, resolve_key
from ffsymbol.datasets import (
    SplitSpec,
    Dataset,
    encode_coefficient,
    decode_coefficient,
    make_zero_nonzero,
    make_coeff_from_key,
    make_mixed_loop,
    make_strikeout,
    strike_parents,
    parent_count,
)
from ffsymbol.ingest import read_symbol, write_symbol, ingest_archive, read_predictions
from ffsymbol.evaluate import (
    score_predictions,
    magnitude_histogram,
    embedding_angles,
    relation_curves,
)

__all__ = [
    "parse_key",
    "format_key",
    "pack_key",
    "unpack_key",
    "cycle_key",
    "flip_key",
    "dihedral_orbit",
    "canonical_key",
    "forbidden_pairs",
    "is_trivial_zero",
    "count_valid_keys",
    "Symbol",
    "builtin_symbol",
    "catalog",
    "get_relation",
    "instantiate",
    "generate_instances",
    "enumerate_instances",
    "residual",
    "score_instances",
    "QuadSymbol",
    "to_quad",
    "expand_quad",
    "resolve_key",
    "SplitSpec",
    "Dataset",
    "encode_coefficient",
    "decode_coefficient",
    "make_zero_nonzero",
    "make_coeff_from_key",
    "make_mixed_loop",
    "make_strikeout",
    "strike_parents",
    "parent_count",
    "read_symbol",
    "write_symbol",
    "ingest_archive",
    "read_predictions",
    "score_predictions",
    "magnitude_histogram",
    "embedding_angles",
    "relation_curves",
]
