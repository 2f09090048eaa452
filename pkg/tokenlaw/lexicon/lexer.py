"""Master-regex tokenizer driven by a LanguageSpec.

All rules of a spec are compiled into one alternation of named groups, tried in
this order at every position (after skipping blanks):

    newline, directive, comments, strings, unterminated comment or string,
    number, identifier, operators (longest first), any other character

Identifiers whose normalized form is a keyword become Fixed tokens; operators are
Fixed; identifiers, numbers and strings are Variable.
"""

import logging
import re
from typing import Dict, Iterator, List, NamedTuple, Optional, Tuple

from ..types import Diagnostics, Token, TokenClass
from .spec import LanguageSpec

logger = logging.getLogger(__name__)

FIXED = TokenClass.FIXED
VARIABLE = TokenClass.VARIABLE

_BLANKS = r"[ \t\r\f\v]*"


class Piece(NamedTuple):
    """A consumed span of source: a token or a skipped run."""
    kind: str
    start: int
    end: int


def _comment_pattern(open_: str, close: Optional[str], column_one: bool) -> str:
    anchor = r"(?:\A|(?<=\n))" if column_one else ""
    if close is None:
        return f"{anchor}{re.escape(open_)}[^\\n]*"
    return f"{anchor}{re.escape(open_)}(?s:.*?){re.escape(close)}"


def _string_pattern(quote: str, escape: Optional[str]) -> str:
    """Single-character quotes end at the line; longer (block) quotes may span lines."""
    q = re.escape(quote)
    body = "(?s:.)" if len(quote) > 1 else "[^\\n]"
    if escape is None:
        return f"{q}(?:(?!{q}){body})*{q}"
    e = re.escape(escape)
    return f"{q}(?:{e}(?s:.)|(?!{q})(?!{e}){body})*{q}"


class Lexer:
    """Compiled tokenizer for one language."""

    def __init__(self, spec: LanguageSpec):
        self.spec = spec
        self.case_sensitive = spec.case_sensitive
        aliases = spec.aliases
        self.keyword_symbols: Dict[str, str] = {k: aliases.get(k, k) for k in spec.keywords}
        self.operator_symbols: Dict[str, str] = {
            (o if spec.case_sensitive else o.upper()): aliases.get(o, o) for o in spec.operators
        }

        groups: List[Tuple[str, str]] = [("nl", r"\n")]
        if spec.directive_prefix:
            groups.append(("directive", f"{re.escape(spec.directive_prefix)}(?:\\\\\\r?\\n|[^\\n])*"))
        for index, rule in enumerate(spec.comment_rules):
            groups.append((f"comment{index}", _comment_pattern(rule.open, rule.close, rule.column_one)))
        for index, rule in enumerate(spec.string_rules):
            groups.append((f"string{index}", _string_pattern(rule.quote, rule.escape)))
        bad_comments = [re.escape(r.open) for r in spec.comment_rules if r.close is not None]
        if bad_comments:
            groups.append(("bad_comment", "|".join(bad_comments)))
        if spec.string_rules:
            groups.append(("bad_string", "|".join(re.escape(r.quote) for r in spec.string_rules)))
        groups.append(("number", spec.number_pattern))
        groups.append(("ident", spec.identifier_pattern))
        if spec.operators:
            ordered = sorted(spec.operators, key=lambda op: (-len(op), op))
            operators = "|".join(re.escape(op) for op in ordered)
            groups.append(("op", operators if spec.case_sensitive else f"(?i:{operators})"))
        groups.append(("unknown", r"(?s:.)"))
        groups.append(("eof", r"\Z"))

        alternation = "|".join(f"(?P<{name}>{pattern})" for name, pattern in groups)
        self.pattern = re.compile(f"{_BLANKS}(?:{alternation})")
        logger.debug(f"Compiled lexer for {spec.name} with {len(groups)} rule groups")

    def pieces(self, source: str) -> Iterator[Piece]:
        """Yield every consumed span in order, skipped runs included.

        Concatenating ``source[p.start:p.end]`` over the pieces reconstructs the source.
        """
        pos = 0
        end = len(source)
        while pos < end:
            m = self.pattern.match(source, pos)
            kind = m.lastgroup or "eof"
            start = m.start(kind)
            if start > pos:
                yield Piece("whitespace", pos, start)
            if kind == "eof":
                return
            if kind in ("bad_comment", "bad_string"):
                yield Piece(kind, start, end)
                return
            if kind.startswith("comment"):
                kind = "comment"
            elif kind.startswith("string"):
                kind = "string"
            yield Piece(kind, start, m.end())
            pos = m.end()

    def tokenize(
        self,
        source: str,
        diagnostics: Optional[Diagnostics] = None,
        file: str = "<source>",
    ) -> List[Token]:
        """Split ``source`` into classified tokens.

        Lexical problems never raise: unterminated strings and comments end the
        scan of the file, unrecognised characters are skipped one at a time, and
        directive lines are skipped; each is counted in ``diagnostics``.
        """
        tokens: List[Token] = []
        append = tokens.append
        keyword_symbols = self.keyword_symbols
        operator_symbols = self.operator_symbols
        case_sensitive = self.case_sensitive
        line = 1
        line_start = 0

        for m in self.pattern.finditer(source):
            kind = m.lastgroup
            if kind == "op":
                lexeme = m.group(kind)
                start = m.start(kind)
                symbol = operator_symbols[lexeme if case_sensitive else lexeme.upper()]
                append(Token(lexeme, FIXED, line, start - line_start + 1, symbol))
            elif kind == "ident":
                lexeme = m.group(kind)
                start = m.start(kind)
                key = lexeme if case_sensitive else lexeme.upper()
                symbol = keyword_symbols.get(key)
                if symbol is None:
                    append(Token(lexeme, VARIABLE, line, start - line_start + 1, key))
                else:
                    append(Token(lexeme, FIXED, line, start - line_start + 1, symbol))
            elif kind == "nl":
                line += 1
                line_start = m.end()
            elif kind == "number":
                lexeme = m.group(kind)
                start = m.start(kind)
                key = lexeme if case_sensitive else lexeme.upper()
                append(Token(lexeme, VARIABLE, line, start - line_start + 1, key))
            elif kind == "eof":
                break
            elif kind.startswith("string"):
                lexeme = m.group(kind)
                start = m.start(kind)
                append(Token(lexeme, VARIABLE, line, start - line_start + 1, lexeme))
                line, line_start = self._advance(source, start, m.end(), line, line_start)
            elif kind.startswith("comment"):
                line, line_start = self._advance(source, m.start(kind), m.end(), line, line_start)
            elif kind == "directive":
                if diagnostics is not None:
                    diagnostics.record("directive")
                line, line_start = self._advance(source, m.start(kind), m.end(), line, line_start)
            elif kind == "unknown":
                if diagnostics is not None:
                    start = m.start(kind)
                    diagnostics.record(
                        "unknown_character",
                        f"skipped character {m.group(kind)!r}",
                        file, line, start - line_start + 1,
                    )
            else:
                # bad_comment or bad_string: nothing after it can be trusted
                start = m.start(kind)
                if diagnostics is not None:
                    what = "comment" if kind == "bad_comment" else "string"
                    diagnostics.record(
                        f"unterminated_{what}",
                        f"unterminated {what} starting here, rest of file skipped",
                        file, line, start - line_start + 1,
                    )
                break
        return tokens

    @staticmethod
    def _advance(source: str, start: int, end: int, line: int, line_start: int) -> Tuple[int, int]:
        newlines = source.count("\n", start, end)
        if newlines:
            return line + newlines, source.rfind("\n", start, end) + 1
        return line, line_start


def tokenize(
    source: str,
    spec: LanguageSpec,
    diagnostics: Optional[Diagnostics] = None,
    file: str = "<source>",
) -> List[Token]:
    """Tokenize ``source`` with the shared lexer of ``spec``.

    Args:
        source: Source text, decoded as 8-bit text
        spec: Language specification
        diagnostics: Tally receiving skipped constructs
        file: Name used in diagnostic messages

    Returns:
        Tokens in source order
    """
    return spec.lexer().tokenize(source, diagnostics=diagnostics, file=file)
