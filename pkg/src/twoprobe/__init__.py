"""Restricted two-adaptive bitprobe schemes: storability, universes, adversaries and transforms."""

from .model import (
    Element,
    Scheme,
    SchemeFormatError,
    SetRecord,
    Table,
    build_scheme,
    index_add,
    load_scheme,
    parse_scheme,
    parse_subset,
    validate,
)
from .storability import Assignment, Forced, can_store, can_store_bruteforce, forced_table, storable, verify_assignment
from .universe import Node, Path, badness, enumerate_paths, i_universe, universe_via_paths
from .adversary import AdversaryPair, adversarial_pair, certify, two_table_contradiction
from .transform import modify
from .analysis import compare_bounds, restricted_bound

__version__ = "0.1.0"
