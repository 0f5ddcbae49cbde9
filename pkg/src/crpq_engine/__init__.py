"""
Output-sensitive evaluation of acyclic conjunctive regular path queries
"""
from .errors import (
    CrpqError,
    RegexSyntaxError,
    GraphFormatError,
    QuerySyntaxError,
    CyclicQueryError,
    NotFreeLeafError,
    ResourceGuardError,
)
from .regex import Label, parse_regex, compile_nfa
from .graph import LabeledGraph, VertexSet, load_graph, write_graph, gen_star_instance, gen_random
from .query import Atom, Crpq, parse_query, format_query, check_acyclic, bound_connected_components
from .join import BindingRelation, yannakakis_join
from .width import fn_fhtw
from .planner import Engine, evaluate
from .models import EvalReport, WidthReport, BenchRecord
from .config import Config, get_config

__all__ = [
    'CrpqError',
    'RegexSyntaxError',
    'GraphFormatError',
    'QuerySyntaxError',
    'CyclicQueryError',
    'NotFreeLeafError',
    'ResourceGuardError',
    'Label',
    'parse_regex',
    'compile_nfa',
    'LabeledGraph',
    'VertexSet',
    'load_graph',
    'write_graph',
    'gen_star_instance',
    'gen_random',
    'Atom',
    'Crpq',
    'parse_query',
    'format_query',
    'check_acyclic',
    'bound_connected_components',
    'BindingRelation',
    'yannakakis_join',
    'fn_fhtw',
    'Engine',
    'evaluate',
    'EvalReport',
    'WidthReport',
    'BenchRecord',
    'Config',
    'get_config'
]
