"""Tokenization, classification and component segmentation."""

from .components import segment_components
from .lexer import Lexer, Piece, tokenize
from .registry import LanguageEntry, LanguageRegistry, load_bundled_spec, load_registry
from .spec import (
    CommentRule,
    ComponentRules,
    LanguageSpec,
    StringRule,
    load_language_spec,
    parse_language_spec,
    validate_language_spec,
)

__all__ = [
    "CommentRule",
    "ComponentRules",
    "LanguageEntry",
    "LanguageRegistry",
    "LanguageSpec",
    "Lexer",
    "Piece",
    "StringRule",
    "load_bundled_spec",
    "load_language_spec",
    "load_registry",
    "parse_language_spec",
    "segment_components",
    "tokenize",
    "validate_language_spec",
]
