"""Detect how hearers rephrase ironic messages: lexical antonyms, negation,
weakened sentiment, rhetorical-question rewrites, counterfactual wishes and
phrase-level pragmatic inference."""

from .corpus import (DependencyTree, GoldAnnotation, Incongruity, IronyPair, Role, StrategyLabel, Utterance,
                     load_pairs, load_parses, make_pair, validate_corpus)
from .errors import DuplicateIdError, FormatError, InvariantError, IronyInterpError, TreeError
from .lexicons import LexiconBundle, load_lexicons
from .strategies import Resources, StrategyEvidence, StrategySet, classify_pair

__version__ = "0.1.0"

__all__ = [
    "DependencyTree", "GoldAnnotation", "Incongruity", "IronyPair", "Role", "StrategyLabel", "Utterance",
    "load_pairs", "load_parses", "make_pair", "validate_corpus",
    "DuplicateIdError", "FormatError", "InvariantError", "IronyInterpError", "TreeError",
    "LexiconBundle", "load_lexicons", "Resources", "StrategyEvidence", "StrategySet", "classify_pair",
]
