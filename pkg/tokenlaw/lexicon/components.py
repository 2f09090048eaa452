"""Segmentation of token streams into non-nested components.

Definitions nested inside a component (inner classes, local procedures) are
folded into the enclosing component. Tokens outside every component, such as
file-scope declarations, belong to no span.
"""

import logging
from typing import List, Optional, Sequence, Set

from ..types import ComponentSpan, Diagnostics, Token, TokenClass
from .spec import ComponentRules, LanguageSpec

logger = logging.getLogger(__name__)


class UnbalancedStructure(Exception):
    """Raised internally when a block runs past the end of the file."""

    def __init__(self, opener: Token):
        super().__init__(f"'{opener.lexeme}' never closed")
        self.opener = opener


def _match_close(tokens: Sequence[Token], index: int, open_: str, close: str) -> int:
    """Index of the token closing the ``open_`` at ``index``."""
    depth = 0
    for j in range(index, len(tokens)):
        lexeme = tokens[j].lexeme
        if lexeme == open_:
            depth += 1
        elif lexeme == close:
            depth -= 1
            if depth == 0:
                return j
    raise UnbalancedStructure(tokens[index])


class _Segmenter:
    def __init__(self, tokens: Sequence[Token], spec: LanguageSpec, file: str):
        self.tokens = tokens
        self.spec = spec
        self.rules: ComponentRules = spec.components
        self.file = file
        self.spans: List[ComponentSpan] = []
        self._block_qualifiers: Set[str] = set()
        self._close_qualifiers: Set[str] = set()

    def emit(self, name_token: Token, first: int, last: int) -> None:
        self.spans.append(ComponentSpan(
            name=name_token.lexeme,
            file=self.file,
            first_token_index=first,
            last_token_index=last,
            tokens=tuple(self.tokens[first:last + 1]),
        ))

    def _is_name(self, index: int) -> bool:
        token = self.tokens[index]
        return token.token_class is TokenClass.VARIABLE and self.spec.is_identifier(token.lexeme)

    # brace style: C, C++, Java

    def brace(self) -> None:
        tokens = self.tokens
        rules = self.rules
        n = len(tokens)
        terminators = set(rules.statement_end) | {rules.body_open, rules.body_close}
        forbid = set(rules.body_forbid) | {rules.body_close}
        exclude = {self.spec.normalize(word) for word in rules.exclude_before}
        boundary = -1
        i = 0
        while i < n:
            token = tokens[i]
            if token.lexeme in terminators:
                boundary = i
                i += 1
                continue
            if not (
                i + 1 < n
                and tokens[i + 1].lexeme == rules.params_open
                and self._is_name(i)
                and not (i > 0 and tokens[i - 1].symbol in exclude)
            ):
                i += 1
                continue
            name_index = i
            close = _match_close(tokens, i + 1, rules.params_open, rules.params_close)
            j = close + 1
            body: Optional[int] = None
            while j < n:
                lexeme = tokens[j].lexeme
                if lexeme == rules.body_open:
                    body = j
                    break
                if lexeme in forbid:
                    break
                if j + 1 < n and tokens[j + 1].lexeme == rules.params_open and self._is_name(j):
                    # A later declarator wins (after an attribute or annotation call),
                    # but not a member initializer following ':' or ','.
                    if tokens[j - 1].lexeme not in (",", ":"):
                        name_index = j
                    j = _match_close(tokens, j + 1, rules.params_open, rules.params_close) + 1
                    continue
                j += 1
            if body is None:
                i = j
                continue
            end = _match_close(tokens, body, rules.body_open, rules.body_close)
            self.emit(tokens[name_index], boundary + 1, end)
            boundary = end
            i = end + 1

    # proc style: Tcl

    def proc(self) -> None:
        tokens = self.tokens
        rules = self.rules
        n = len(tokens)
        openers = {self.spec.normalize(word) for word in rules.openers}
        i = 0
        while i < n:
            if tokens[i].symbol not in openers or i + 3 >= n:
                i += 1
                continue
            name = tokens[i + 1]
            if name.token_class is not TokenClass.VARIABLE:
                i += 1
                continue
            args = i + 2
            if tokens[args].lexeme == rules.body_open:
                args = _match_close(tokens, args, rules.body_open, rules.body_close)
            body = args + 1
            if body >= n or tokens[body].lexeme != rules.body_open:
                i += 1
                continue
            end = _match_close(tokens, body, rules.body_open, rules.body_close)
            self.emit(name, i, end)
            i = end + 1

    # keyword style: Fortran, Ada

    def _closes(self, index: int) -> bool:
        """Whether the END at ``index`` closes a unit rather than a qualified block."""
        rules = self.rules
        tokens = self.tokens
        if index + 1 >= len(tokens):
            return True
        nxt = tokens[index + 1]
        if nxt.line != tokens[index].line:
            return True
        key = nxt.symbol
        if key in self._block_qualifiers:
            return False
        if key in self._close_qualifiers or nxt.lexeme == rules.decl_terminator:
            return True
        return nxt.token_class is TokenClass.VARIABLE

    def _has_body(self, opener: int) -> bool:
        """For languages with a body marker: 'is' before the declaration terminator."""
        rules = self.rules
        if rules.body_marker is None:
            return True
        marker = self.spec.normalize(rules.body_marker)
        exclusions = {self.spec.normalize(word) for word in rules.body_marker_exclusions}
        depth = 0
        tokens = self.tokens
        for j in range(opener + 1, len(tokens)):
            lexeme = tokens[j].lexeme
            if lexeme == rules.params_open:
                depth += 1
            elif lexeme == rules.params_close:
                depth -= 1
            elif depth == 0 and lexeme == rules.decl_terminator:
                return False
            elif depth == 0 and tokens[j].symbol == marker:
                return j + 1 < len(tokens) and tokens[j + 1].symbol not in exclusions
        return False

    def keyword(self) -> None:
        tokens = self.tokens
        rules = self.rules
        normalize = self.spec.normalize
        n = len(tokens)
        openers = {normalize(word) for word in rules.openers}
        block_openers = {normalize(word) for word in rules.block_openers}
        exclude = {normalize(word) for word in rules.exclude_before}
        end_keyword = normalize(rules.end_keyword)
        not_after = exclude | {end_keyword}
        begin = normalize(rules.begin_keyword) if rules.begin_keyword else None
        self._block_qualifiers = {normalize(word) for word in rules.block_qualifiers}
        self._close_qualifiers = {normalize(word) for word in rules.close_qualifiers}
        terminators = set(rules.statement_end)
        boundary = -1

        i = 0
        while i < n:
            token = tokens[i]
            if token.lexeme in terminators:
                boundary = i
            is_opener = (
                token.symbol in openers
                and i + 1 < n
                and not (i > 0 and tokens[i - 1].symbol in not_after)
                and self._has_body(i)
            )
            if not is_opener:
                i += 1
                continue
            first = i
            while first - 1 > boundary and tokens[first - 1].line == token.line:
                first -= 1
            # frames of open units; the flag records whether the unit's own 'begin' was seen
            frames = [False]
            j = i + 1
            end: Optional[int] = None
            while j < n:
                symbol = tokens[j].symbol
                if symbol == end_keyword and self._closes(j):
                    frames.pop()
                    if not frames:
                        end = j
                        break
                elif symbol in openers and tokens[j - 1].symbol not in not_after and self._has_body(j):
                    frames.append(False)
                elif symbol in block_openers:
                    frames.append(False)
                elif begin is not None and symbol == begin:
                    if frames[-1]:
                        frames.append(True)
                    else:
                        frames[-1] = True
                j += 1
            if end is None:
                raise UnbalancedStructure(token)
            # the closing statement runs to its terminator or the end of its line
            last = end
            while last + 1 < n and tokens[last + 1].line == tokens[end].line:
                last += 1
                if tokens[last].lexeme in terminators:
                    break
            self.emit(tokens[i + 1], first, last)
            boundary = last
            i = last + 1


def segment_components(
    tokens: Sequence[Token],
    spec: LanguageSpec,
    file: str = "<source>",
    diagnostics: Optional[Diagnostics] = None,
) -> List[ComponentSpan]:
    """Split a file's tokens into non-overlapping component spans.

    Args:
        tokens: Tokens produced by ``tokenize`` with the same spec
        spec: Language specification whose ``[components]`` rules apply
        file: File name recorded on each span
        diagnostics: Tally receiving unbalanced-structure reports

    Returns:
        Spans in source order. When a block is still open at end of file, that
        span is discarded, a diagnostic is recorded and the earlier spans are
        returned.
    """
    segmenter = _Segmenter(tokens, spec, file)
    style = spec.components.style
    if style == "none" or not tokens:
        return []
    try:
        getattr(segmenter, style)()
    except UnbalancedStructure as e:
        logger.debug(f"{file}: unbalanced structure at line {e.opener.line}")
        if diagnostics is not None:
            diagnostics.record(
                "unbalanced_structure",
                f"{e}; unterminated component discarded",
                file, e.opener.line, e.opener.column,
            )
    return segmenter.spans
