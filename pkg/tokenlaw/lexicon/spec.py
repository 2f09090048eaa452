"""Declarative language specifications.

A specification file is line oriented and split into bracketed sections; the
grammar is documented in ``registry/lang/README.md`` and the bundled ``.lang``
files are its normative examples.
"""

import logging
import re
from pathlib import Path
from typing import Any, Dict, FrozenSet, List, Literal, Optional, Tuple, Union

from pydantic import BaseModel, ConfigDict, Field, PrivateAttr

from ..errors import LanguageSpecError

logger = logging.getLogger(__name__)

SECTIONS = ("language", "fixed", "comments", "strings", "identifier", "number", "components")
EOL = "EOL"
NO_ESCAPE = "NONE"

_SECTION_RE = re.compile(r"^\[([a-z]+)\]$")
_TRUE = {"true", "yes", "1", "on"}
_FALSE = {"false", "no", "0", "off"}


class CommentRule(BaseModel):
    """Comment delimiters; ``close`` of None means the comment runs to end of line."""
    model_config = ConfigDict(frozen=True)

    open: str = Field(..., min_length=1)
    close: Optional[str] = Field(None, min_length=1)
    column_one: bool = Field(default=False, description="Open delimiter only counts in column 1")


class StringRule(BaseModel):
    """String literal quote and escape character (None when there is no escape)."""
    model_config = ConfigDict(frozen=True)

    quote: str = Field(..., min_length=1)
    escape: Optional[str] = Field(None, min_length=1, max_length=1)


class ComponentRules(BaseModel):
    """How component start and end are recognised.

    ``brace``: a variable identifier followed by a parenthesised list and then a
    body block. ``keyword``: opener keywords closed by END. ``proc``: a command
    keyword followed by name, argument word and body block. ``none``: no
    components.
    """
    model_config = ConfigDict(frozen=True)

    style: Literal["brace", "keyword", "proc", "none"] = "none"
    # brace and proc
    params_open: str = "("
    params_close: str = ")"
    body_open: str = "{"
    body_close: str = "}"
    body_forbid: Tuple[str, ...] = (";", "=")
    statement_end: Tuple[str, ...] = (";",)
    exclude_before: Tuple[str, ...] = ()
    # keyword and proc
    openers: Tuple[str, ...] = ()
    end_keyword: str = "END"
    close_qualifiers: Tuple[str, ...] = ()
    block_qualifiers: Tuple[str, ...] = ()
    block_openers: Tuple[str, ...] = ()
    begin_keyword: Optional[str] = None
    body_marker: Optional[str] = None
    body_marker_exclusions: Tuple[str, ...] = ()
    decl_terminator: Optional[str] = None


class LanguageSpec(BaseModel):
    """A validated, immutable language specification."""
    model_config = ConfigDict(frozen=True)

    name: str = Field(..., min_length=1, description="Language name")
    case_sensitive: bool = Field(default=True, description="Keywords compare case-sensitively")
    directive_prefix: Optional[str] = Field(None, description="Start of a skipped preprocessor line")
    keywords: Tuple[str, ...] = Field(default=(), description="Reserved words")
    operators: Tuple[str, ...] = Field(default=(), description="Operators and punctuators")
    aliases: Dict[str, str] = Field(default_factory=dict, description="Fixed lexeme -> alphabet member")
    comment_rules: Tuple[CommentRule, ...] = Field(default=())
    string_rules: Tuple[StringRule, ...] = Field(default=())
    identifier_patterns: Tuple[str, ...] = Field(..., min_length=1)
    number_patterns: Tuple[str, ...] = Field(..., min_length=1)
    components: ComponentRules = Field(default_factory=ComponentRules)
    source: Optional[str] = Field(None, description="File the spec was loaded from")

    _identifier_re: Any = PrivateAttr(default=None)
    _lexer: Any = PrivateAttr(default=None)

    @property
    def fixed_lexemes(self) -> FrozenSet[str]:
        return frozenset(self.keywords) | frozenset(self.operators)

    @property
    def identifier_pattern(self) -> str:
        return "|".join(f"(?:{p})" for p in self.identifier_patterns)

    @property
    def number_pattern(self) -> str:
        return "|".join(f"(?:{p})" for p in self.number_patterns)

    def is_identifier(self, lexeme: str) -> bool:
        if self._identifier_re is None:
            self._identifier_re = re.compile(self.identifier_pattern)
        return self._identifier_re.fullmatch(lexeme) is not None

    def normalize(self, lexeme: str) -> str:
        """Alphabet key of an identifier-like lexeme."""
        return lexeme if self.case_sensitive else lexeme.upper()

    def lexer(self) -> "Any":
        """The compiled lexer for this spec, built once and shared."""
        if self._lexer is None:
            from .lexer import Lexer

            self._lexer = Lexer(self)
        return self._lexer


def _unescape_entry(entry: str) -> str:
    return entry[1:] if entry.startswith("\\#") else entry


def _parse_bool(value: str, where: str) -> bool:
    lowered = value.lower()
    if lowered in _TRUE:
        return True
    if lowered in _FALSE:
        return False
    raise LanguageSpecError(f"{where}: expected a boolean, got '{value}'")


def _split_sections(text: str, origin: str) -> Dict[str, List[Tuple[int, str]]]:
    sections: Dict[str, List[Tuple[int, str]]] = {}
    current: Optional[str] = None
    for number, raw in enumerate(text.splitlines(), start=1):
        line = raw.strip()
        if not line or line.startswith("#"):
            continue
        header = _SECTION_RE.match(line)
        if header:
            current = header.group(1)
            if current not in SECTIONS:
                raise LanguageSpecError(f"{origin}:{number}: unknown section [{current}]")
            if current in sections:
                raise LanguageSpecError(f"{origin}:{number}: section [{current}] repeated")
            sections[current] = []
            continue
        if current is None:
            raise LanguageSpecError(f"{origin}:{number}: entry outside any section")
        sections[current].append((number, line))
    return sections


def _key_values(entries: List[Tuple[int, str]], origin: str, section: str) -> Dict[str, Tuple[int, str]]:
    values: Dict[str, Tuple[int, str]] = {}
    for number, line in entries:
        key, sep, value = line.partition("=")
        if not sep:
            raise LanguageSpecError(f"{origin}:{number}: expected 'key = value' in [{section}]")
        values[key.strip()] = (number, value.strip())
    return values


_LIST_OPTIONS = frozenset({
    "body_forbid",
    "statement_end",
    "exclude_before",
    "openers",
    "close_qualifiers",
    "block_qualifiers",
    "block_openers",
    "body_marker_exclusions",
})


def _parse_components(entries: List[Tuple[int, str]], origin: str) -> ComponentRules:
    options: Dict[str, Union[str, Tuple[str, ...]]] = {}
    for key, (number, value) in _key_values(entries, origin, "components").items():
        if key not in ComponentRules.model_fields:
            raise LanguageSpecError(f"{origin}:{number}: unknown component option '{key}'")
        if key in _LIST_OPTIONS:
            options[key] = tuple(_unescape_entry(item) for item in value.split())
        else:
            options[key] = _unescape_entry(value)
    try:
        return ComponentRules(**options)
    except ValueError as e:
        raise LanguageSpecError(f"{origin}: invalid [components] section: {e}") from e


def parse_language_spec(text: str, origin: str = "<spec>") -> LanguageSpec:
    """Parse and validate the text of a language specification.

    Args:
        text: Specification file contents
        origin: Name used in error messages

    Returns:
        Validated LanguageSpec

    Raises:
        LanguageSpecError: On grammar errors or invariant violations
    """
    sections = _split_sections(text, origin)
    for required in ("language", "fixed", "identifier", "number"):
        if required not in sections:
            raise LanguageSpecError(f"{origin}: missing [{required}] section")

    language = _key_values(sections["language"], origin, "language")
    if "name" not in language:
        raise LanguageSpecError(f"{origin}: [language] has no name")
    name = language["name"][1]
    case_sensitive = True
    if "case_sensitive" in language:
        number, value = language["case_sensitive"]
        case_sensitive = _parse_bool(value, f"{origin}:{number}")
    directive = language.get("directive_prefix", (0, ""))[1]
    directive_prefix = _unescape_entry(directive) or None

    keywords: List[str] = []
    operators: List[str] = []
    aliases: Dict[str, str] = {}
    seen: Dict[str, int] = {}
    for number, line in sections["fixed"]:
        kind, *items = line.split()
        items = [_unescape_entry(item) for item in items]
        if kind == "alias":
            if len(items) != 2:
                raise LanguageSpecError(f"{origin}:{number}: alias takes exactly two lexemes")
            aliases[items[0]] = items[1]
            continue
        if kind not in ("keyword", "operator"):
            raise LanguageSpecError(f"{origin}:{number}: unknown fixed entry kind '{kind}'")
        for item in items:
            key = item if case_sensitive or kind == "operator" else item.upper()
            if key in seen:
                raise LanguageSpecError(
                    f"{origin}:{number}: duplicate fixed lexeme '{item}' (first on line {seen[key]})"
                )
            seen[key] = number
            (keywords if kind == "keyword" else operators).append(key)
    if not case_sensitive:
        keyword_set = set(keywords)
        aliases = {
            (k.upper() if k.upper() in keyword_set else k): (v.upper() if v.upper() in keyword_set else v)
            for k, v in aliases.items()
        }

    comments: List[CommentRule] = []
    for number, line in sections.get("comments", []):
        parts = [_unescape_entry(part) for part in line.split()]
        if len(parts) != 2:
            raise LanguageSpecError(f"{origin}:{number}: comment rule needs '<open> <close|EOL>'")
        opener, closer = parts
        column_one = opener.startswith("^") and len(opener) > 1
        comments.append(CommentRule(
            open=opener[1:] if column_one else opener,
            close=None if closer == EOL else closer,
            column_one=column_one,
        ))

    strings: List[StringRule] = []
    for number, line in sections.get("strings", []):
        parts = [_unescape_entry(part) for part in line.split()]
        if len(parts) != 2 or (parts[1] != NO_ESCAPE and len(parts[1]) != 1):
            raise LanguageSpecError(f"{origin}:{number}: string rule needs '<quote> <escape|NONE>'")
        strings.append(StringRule(quote=parts[0], escape=None if parts[1] == NO_ESCAPE else parts[1]))

    def patterns(section: str) -> Tuple[str, ...]:
        compiled = []
        for number, line in sections[section]:
            pattern = _unescape_entry(line)
            try:
                re.compile(pattern)
            except re.error as e:
                raise LanguageSpecError(f"{origin}:{number}: bad [{section}] pattern: {e}") from e
            compiled.append(pattern)
        if not compiled:
            raise LanguageSpecError(f"{origin}: [{section}] has no patterns")
        return tuple(compiled)

    components = _parse_components(sections.get("components", []), origin)

    spec = LanguageSpec(
        name=name,
        case_sensitive=case_sensitive,
        directive_prefix=directive_prefix,
        keywords=tuple(keywords),
        operators=tuple(operators),
        aliases=aliases,
        comment_rules=tuple(comments),
        string_rules=tuple(strings),
        identifier_patterns=patterns("identifier"),
        number_patterns=patterns("number"),
        components=components,
        source=origin,
    )
    validate_language_spec(spec)
    return spec


def validate_language_spec(spec: LanguageSpec) -> None:
    """Check that fixed lexemes exist and classify unambiguously.

    Raises:
        LanguageSpecError: If the fixed set is empty, an alias is dangling, a
            keyword is not identifier-shaped, or an operator would be read as an
            identifier or number
    """
    if not spec.keywords and not spec.operators:
        raise LanguageSpecError(f"{spec.source}: language '{spec.name}' has no fixed lexemes")
    identifier = re.compile(spec.identifier_pattern)
    number = re.compile(spec.number_pattern)
    for keyword in spec.keywords:
        if identifier.fullmatch(keyword) is None:
            raise LanguageSpecError(
                f"{spec.source}: keyword '{keyword}' does not match the identifier pattern"
            )
        if number.match(keyword):
            raise LanguageSpecError(f"{spec.source}: keyword '{keyword}' matches the number pattern")
    for operator in spec.operators:
        if identifier.match(operator) or number.match(operator):
            raise LanguageSpecError(
                f"{spec.source}: fixed lexeme '{operator}' matches the identifier or number pattern"
            )
    fixed = spec.fixed_lexemes
    for lexeme, member in spec.aliases.items():
        if spec.normalize(lexeme) not in fixed and lexeme not in fixed:
            raise LanguageSpecError(f"{spec.source}: alias of unknown fixed lexeme '{lexeme}'")
        if spec.normalize(member) not in fixed and member not in fixed:
            raise LanguageSpecError(f"{spec.source}: alias target '{member}' is not a fixed lexeme")


def load_language_spec(path: Union[str, Path]) -> LanguageSpec:
    """Load a language specification file.

    Args:
        path: Path to a ``.lang`` file

    Returns:
        Validated LanguageSpec

    Raises:
        LanguageSpecError: If the file is missing, unreadable or invalid
    """
    spec_path = Path(path)
    if not spec_path.is_file():
        raise LanguageSpecError(f"language spec '{spec_path}' not found")
    try:
        text = spec_path.read_text(encoding="utf-8")
    except (OSError, UnicodeDecodeError) as e:
        raise LanguageSpecError(f"cannot read language spec '{spec_path}': {e}") from e
    spec = parse_language_spec(text, origin=str(spec_path))
    logger.debug(
        f"Loaded language '{spec.name}' from {spec_path}: "
        f"{len(spec.keywords)} keywords, {len(spec.operators)} operators"
    )
    return spec
