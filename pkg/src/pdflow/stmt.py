"""Tolerant statement extraction for Java, JavaScript, and TypeScript.

This is deliberately not a full parser. Flow classification only needs
assignment targets, receiver chains, callees, and arguments, so a lexical
scanner that understands comments, strings, brackets, and statement
terminators is enough. Statements end at ``;``, at a ``}`` closing their
block, or (JS/TS) at a newline where the heuristic decides the expression is
complete. Function, method, arrow, and constructor bodies each get a fresh
scope id; other blocks share their enclosing scope.

Guarantees relied on elsewhere:
  * ``statement.text`` equals the file slice at ``statement.span``, byte-exact;
  * statements never overlap and appear in source order;
  * comments and string contents never open or close a statement;
  * arbitrary input never raises (malformed code degrades to ``Other`` records).
"""

from __future__ import annotations

import re
from bisect import bisect_right
from dataclasses import dataclass
from enum import Enum
from pathlib import Path

from .errors import UnsupportedLanguage


class Language(Enum):
    JAVA = "java"
    JAVASCRIPT = "javascript"
    TYPESCRIPT = "typescript"


_EXTENSIONS = {
    ".java": Language.JAVA,
    ".js": Language.JAVASCRIPT,
    ".jsx": Language.JAVASCRIPT,
    ".mjs": Language.JAVASCRIPT,
    ".cjs": Language.JAVASCRIPT,
    ".ts": Language.TYPESCRIPT,
    ".tsx": Language.TYPESCRIPT,
}


def language_for_path(path: str | Path) -> Language | None:
    return _EXTENSIONS.get(Path(path).suffix.lower())


@dataclass(frozen=True)
class SourceFile:
    path: str
    language: Language
    text: str

    @classmethod
    def from_path(cls, path: str | Path, repo_relative: str | None = None) -> "SourceFile":
        lang = language_for_path(path)
        if lang is None:
            raise UnsupportedLanguage(f"unsupported extension: {path}")
        text = Path(path).read_text(encoding="utf-8")
        return cls(path=repo_relative or str(path), language=lang, text=text)


@dataclass(frozen=True)
class Span:
    """1-based (line, col) pair per end; ``offsets`` are 0-based into the text."""

    start_line: int
    start_col: int
    end_line: int
    end_col: int
    start_offset: int
    end_offset: int

    def as_tuple(self) -> tuple[int, int, int, int]:
        return (self.start_line, self.start_col, self.end_line, self.end_col)


@dataclass(frozen=True)
class ChainRef:
    """An identifier chain plus the verbatim text it came from."""

    ids: tuple[str, ...]
    text: str

    @property
    def dotted(self) -> str:
        return ".".join(self.ids)


class ArgKind(Enum):
    IDENTIFIER = "identifier"
    STRING_LITERAL = "string"
    NUMBER_LITERAL = "number"
    OTHER = "other"


@dataclass(frozen=True)
class Arg:
    kind: ArgKind
    text: str
    content: str | None = None  # string literals: raw content without quotes
    chains: tuple[ChainRef, ...] = ()  # identifier chains usable as sources


@dataclass(frozen=True)
class CallExpr:
    receiver: tuple[str, ...]  # identifiers before the final callee, this/new stripped
    callee: str
    args: tuple[Arg, ...]
    display: str  # verbatim chain text through the callee, e.g. "this.users.findOne"
    nested: tuple["CallExpr", ...] = ()


class StatementKind(Enum):
    ASSIGNMENT = "assignment"
    EXPRESSION_CALL = "call"
    OTHER = "other"


@dataclass(frozen=True)
class Statement:
    file: str
    span: Span
    text: str
    kind: StatementKind
    scope_id: int
    target: ChainRef | None = None
    call: CallExpr | None = None


# ---------------------------------------------------------------------------
# Lexer

class TokKind(Enum):
    NAME = "name"
    NUMBER = "number"
    STRING = "string"
    PUNCT = "punct"
    NEWLINE = "newline"


@dataclass(frozen=True)
class Token:
    kind: TokKind
    text: str
    start: int
    end: int
    content: str | None = None  # strings: inner text without quotes


_MASTER = re.compile(
    r"""
    (?P<comment_line>//[^\n]*)
  | (?P<comment_block>/\*.*?(?:\*/|\Z))
  | (?P<template>`(?:[^`\\]|\\.)*(?:`|\Z))
  | (?P<dstring>"(?:[^"\\\n]|\\.)*(?:"|(?=\n)|\Z))
  | (?P<sstring>'(?:[^'\\\n]|\\.)*(?:'|(?=\n)|\Z))
  | (?P<number>0[xXoObB][0-9a-fA-F_]+n?
      |(?:\d[\d_]*(?:\.\d[\d_]*)?|\.\d[\d_]*)(?:[eE][+-]?\d+)?[fFdDlLn]?)
  | (?P<name>[A-Za-z_$@][A-Za-z0-9_$]*)
  | (?P<punct>=>|\?\.|===|!==|\*\*=|<<=|>>>=|>>=|==|!=|<=|>=|&&|\|\||\+\+|--
      |\+=|-=|\*=|/=|%=|&=|\|=|\^=|\*\*|<<|>>>|>>
      |[{}()\[\];,.:?~!@&|^*/%+<>=-])
  | (?P<nl>\n)
  | (?P<ws>[ \t\r\f\v]+)
  | (?P<other>.)
    """,
    re.DOTALL | re.VERBOSE,
)

_STRING_GROUPS = {"template", "dstring", "sstring"}


def _lex(text: str) -> list[Token]:
    tokens: list[Token] = []
    for m in _MASTER.finditer(text):
        group = m.lastgroup
        if group in ("ws", "comment_line", "other"):
            continue
        raw = m.group(0)
        if group == "comment_block":
            # A block comment can span lines; JS newline handling needs to know.
            if "\n" in raw:
                tokens.append(Token(TokKind.NEWLINE, "\n", m.start(), m.end()))
            continue
        if group == "nl":
            tokens.append(Token(TokKind.NEWLINE, raw, m.start(), m.end()))
        elif group in _STRING_GROUPS:
            quote = raw[0]
            inner = raw[1:-1] if len(raw) >= 2 and raw.endswith(quote) else raw[1:]
            tokens.append(Token(TokKind.STRING, raw, m.start(), m.end(), content=inner))
        elif group == "number":
            tokens.append(Token(TokKind.NUMBER, raw, m.start(), m.end()))
        elif group == "name":
            tokens.append(Token(TokKind.NAME, raw, m.start(), m.end()))
        else:
            tokens.append(Token(TokKind.PUNCT, raw, m.start(), m.end()))
    return tokens


# ---------------------------------------------------------------------------
# Statement assembly

_CONTROL_KEYWORDS = {
    "if", "for", "while", "switch", "catch", "do", "else", "try", "finally",
    "synchronized", "return", "throw", "assert", "case", "default", "break",
    "continue", "function", "class", "interface", "enum", "extends",
    "implements", "import", "export", "package", "new", "typeof",
    "instanceof", "in", "of", "void", "yield", "await", "super", "with",
}
# `delete` is deliberately absent: it is a common repository method name.

_LEADING_SKIP = {
    "public", "private", "protected", "static", "final", "abstract", "export",
    "default", "async", "const", "let", "var", "await", "return", "yield",
    "throw", "native", "transient", "volatile", "readonly", "declare",
}

_BLOCK_LITERAL_PRECEDERS = {
    "return", "new", "typeof", "delete", "void", "yield", "await", "in",
    "of", "case", "const", "let", "var",
}

_ASSIGN_OPS = {"=", "+=", "-=", "*=", "/=", "%=", "&=", "|=", "^=", "<<=", ">>=", ">>>="}

# Next-line tokens that continue the previous JS/TS statement.
_CONTINUE_NEXT = {
    ".", "?.", "+", "-", "*", "/", "%", "=", "==", "===", "!=", "!==", "<",
    ">", "<=", ">=", "&&", "||", "?", ":", ",", ")", "]", "(", "[", "=>",
    "&", "|", "^", "+=", "-=", "*=", "/=", "%=", "**", "<<", ">>", ">>>",
    "instanceof", "in",
}

_COMPLETE_ENDINGS = {")", "]", "}", "++", "--"}


class _LineIndex:
    def __init__(self, text: str):
        self.starts = [0]
        for i, ch in enumerate(text):
            if ch == "\n":
                self.starts.append(i + 1)

    def linecol(self, offset: int) -> tuple[int, int]:
        line = bisect_right(self.starts, offset)
        return line, offset - self.starts[line - 1] + 1


def extract_statements(file: SourceFile) -> list[Statement]:
    """All statements of ``file`` in source order, spans byte-exact."""
    tokens = _lex(file.text)
    lines = _LineIndex(file.text)
    statements: list[Statement] = []

    js_like = file.language is not Language.JAVA
    scope_counter = 0
    scope_stack = [0]
    brace_stack: list[bool] = []  # True where the brace opened a function body
    pending: list[Token] = []
    depth = 0  # ( [ nesting inside the pending statement
    curly = 0  # { nesting absorbed as expression content (object literals, callbacks)

    def flush(force_other: bool = False) -> None:
        nonlocal pending, depth, curly
        if pending:
            statements.append(
                _build_statement(file, pending, scope_stack[-1], lines, force_other)
            )
        pending = []
        depth = 0
        curly = 0

    def opens_function_body() -> bool:
        # Called when a `{` arrives at statement level: does it start a
        # function/method/arrow/constructor body (fresh scope)?
        if not pending:
            return False
        last = pending[-1]
        if last.kind is TokKind.PUNCT and last.text == "=>":
            return True
        if last.kind is TokKind.PUNCT and last.text == ")":
            # Find the matching ( and look at the word before it.
            bal = 0
            for tok in reversed(pending):
                if tok.kind is TokKind.PUNCT:
                    if tok.text == ")":
                        bal += 1
                    elif tok.text == "(":
                        bal -= 1
                        if bal == 0:
                            idx = pending.index(tok)
                            for before in reversed(pending[:idx]):
                                if before.kind is TokKind.NAME:
                                    return before.text not in _CONTROL_KEYWORDS
                                if before.kind is TokKind.PUNCT and before.text in (">", "]"):
                                    continue  # generic return types / array types
                                return False
                            return False
            return False
        return False

    def absorbs_brace() -> bool:
        # `{` after an operator, `return`, `=`... is an object literal and is
        # kept inside the pending expression.
        if not pending:
            return False
        last = pending[-1]
        if last.kind is TokKind.PUNCT:
            return last.text not in (")", "=>")
        if last.kind is TokKind.NAME:
            return last.text in _BLOCK_LITERAL_PRECEDERS
        return True  # number / string before { : expression context

    n = len(tokens)
    i = 0
    while i < n:
        tok = tokens[i]
        i += 1
        if tok.kind is TokKind.NEWLINE:
            if (
                js_like
                and pending
                and depth == 0
                and curly == 0
                and _newline_terminates(pending, tokens, i)
            ):
                flush()
            continue
        if tok.kind is TokKind.PUNCT:
            t = tok.text
            if t in ("(", "["):
                depth += 1
                pending.append(tok)
                continue
            if t in (")", "]"):
                depth = max(0, depth - 1)
                pending.append(tok)
                continue
            if t == "{":
                if depth > 0 or curly > 0 or absorbs_brace():
                    curly += 1
                    pending.append(tok)
                    continue
                is_scope = opens_function_body()
                flush(force_other=True)  # headers are never classified
                brace_stack.append(is_scope)
                if is_scope:
                    scope_counter += 1
                    scope_stack.append(scope_counter)
                continue
            if t == "}":
                if curly > 0:
                    curly -= 1
                    pending.append(tok)
                    continue
                flush()
                if brace_stack:
                    if brace_stack.pop() and len(scope_stack) > 1:
                        scope_stack.pop()
                continue
            if t == ";" and depth == 0 and curly == 0:
                pending.append(tok)
                flush()
                continue
            pending.append(tok)
            continue
        pending.append(tok)
    flush()
    return statements


def _newline_terminates(pending: list[Token], tokens: list[Token], next_index: int) -> bool:
    last = pending[-1]
    if last.kind in (TokKind.NAME, TokKind.NUMBER, TokKind.STRING):
        complete = last.kind is not TokKind.NAME or last.text not in _CONTINUE_NEXT
    else:
        complete = last.text in _COMPLETE_ENDINGS
    if not complete:
        return False
    for tok in tokens[next_index:]:
        if tok.kind is TokKind.NEWLINE:
            continue
        if tok.kind is TokKind.PUNCT and tok.text in _CONTINUE_NEXT:
            return False
        if tok.kind is TokKind.NAME and tok.text in ("instanceof", "in"):
            return False
        return True
    return True


# ---------------------------------------------------------------------------
# Statement parsing (token run -> kind / target / call)

def _build_statement(
    file: SourceFile,
    toks: list[Token],
    scope_id: int,
    lines: _LineIndex,
    force_other: bool,
) -> Statement:
    start, end = toks[0].start, toks[-1].end
    sl, sc = lines.linecol(start)
    el, ec = lines.linecol(end - 1) if end > start else (sl, sc)
    ec += 1  # end col is exclusive-style: one past the last character
    span = Span(sl, sc, el, ec, start, end)
    text = file.text[start:end]

    kind = StatementKind.OTHER
    target: ChainRef | None = None
    call: CallExpr | None = None
    if not force_other:
        try:
            kind, target, call = _parse_tokens(file.text, toks)
        except Exception:  # tolerant by contract: junk input degrades to Other
            kind, target, call = StatementKind.OTHER, None, None
    return Statement(
        file=file.path, span=span, text=text, kind=kind, scope_id=scope_id,
        target=target, call=call,
    )


def _parse_tokens(
    source: str, toks: list[Token]
) -> tuple[StatementKind, ChainRef | None, CallExpr | None]:
    work = list(toks)
    if work and work[-1].kind is TokKind.PUNCT and work[-1].text == ";":
        work.pop()
    while work and work[0].kind is TokKind.NAME and work[0].text in _LEADING_SKIP:
        work.pop(0)
    while work and work[0].kind is TokKind.NAME and work[0].text.startswith("@"):
        work.pop(0)  # annotations/decorators
    if not work:
        return StatementKind.OTHER, None, None

    assign_idx = _top_level_assign(work)
    if assign_idx is not None:
        target = _target_chain(source, work[:assign_idx])
        if target is None:
            return StatementKind.OTHER, None, None
        rhs = work[assign_idx + 1 :]
        call = _parse_call_chain(source, rhs)
        return StatementKind.ASSIGNMENT, target, call

    if work[0].kind is TokKind.NAME and work[0].text in _CONTROL_KEYWORDS:
        return StatementKind.OTHER, None, None
    call = _parse_call_chain(source, work)
    if call is not None:
        return StatementKind.EXPRESSION_CALL, None, call
    return StatementKind.OTHER, None, None


def _top_level_assign(toks: list[Token]) -> int | None:
    depth = 0
    for idx, tok in enumerate(toks):
        if tok.kind is not TokKind.PUNCT:
            continue
        if tok.text in ("(", "[", "{"):
            depth += 1
        elif tok.text in (")", "]", "}"):
            depth = max(0, depth - 1)
        elif depth == 0 and tok.text in _ASSIGN_OPS:
            return idx
    return None


def _target_chain(source: str, lhs: list[Token]) -> ChainRef | None:
    """Trailing identifier chain before the assignment operator."""
    i = len(lhs) - 1
    while True:
        ids: list[str] = []
        end_off = None
        start_off = None
        expect_name = True
        while i >= 0:
            tok = lhs[i]
            if expect_name:
                if tok.kind is TokKind.PUNCT and tok.text == "]":
                    # computed access collapses to its base identifier
                    bal = 0
                    while i >= 0:
                        t2 = lhs[i]
                        if t2.kind is TokKind.PUNCT and t2.text == "]":
                            bal += 1
                        elif t2.kind is TokKind.PUNCT and t2.text == "[":
                            bal -= 1
                            if bal == 0:
                                break
                        if end_off is None:
                            end_off = t2.end
                        i -= 1
                    i -= 1
                    continue
                if tok.kind is TokKind.NAME and tok.text not in _CONTROL_KEYWORDS:
                    ids.append(tok.text)
                    if end_off is None:
                        end_off = tok.end
                    start_off = tok.start
                    i -= 1
                    expect_name = False
                    continue
                break
            else:
                if tok.kind is TokKind.PUNCT and tok.text in (".", "?."):
                    i -= 1
                    expect_name = True
                    continue
                break
        if not ids:
            return None
        # `ident : Type =` (TS annotation): the chain we collected is the type.
        if i >= 0 and lhs[i].kind is TokKind.PUNCT and lhs[i].text == ":":
            i -= 1
            continue
        ids.reverse()
        ids = [x for x in ids if x not in ("this", "new")]
        if not ids:
            return None
        assert start_off is not None and end_off is not None
        return ChainRef(ids=tuple(ids), text=source[start_off:end_off])


_CHAIN_SKIP_HEAD = ("this", "new", "await")


def _parse_call_chain(source: str, toks: list[Token]) -> CallExpr | None:
    """Parse a postfix chain; the last called segment is the sink candidate."""
    work = list(toks)
    display_start: int | None = None
    while work and work[0].kind is TokKind.NAME:
        head = work[0].text
        if head in ("new", "await"):
            work.pop(0)
            continue
        if (
            head == "this"
            and len(work) > 1
            and work[1].kind is TokKind.PUNCT
            and work[1].text in (".", "?.")
        ):
            # keep `this.` in the display text, drop it from the chain
            if display_start is None:
                display_start = work[0].start
            work.pop(0)
            work.pop(0)
            continue
        break
    if not work or work[0].kind is not TokKind.NAME:
        return None
    if work[0].text in _CONTROL_KEYWORDS:
        return None

    segments: list[tuple[Token, list[Token] | None]] = []  # (name, arg tokens)
    i = 0
    n = len(work)
    while i < n:
        tok = work[i]
        if tok.kind is not TokKind.NAME:
            break
        # member names after a dot may collide with keywords; only the head
        # position is keyword-filtered
        if not segments and tok.text in _CONTROL_KEYWORDS:
            break
        name_tok = tok
        i += 1
        # optional generics: Foo<Bar>(...)
        if i < n and work[i].kind is TokKind.PUNCT and work[i].text == "<":
            save = i
            bal = 0
            ok = True
            j = i
            while j < n:
                t2 = work[j]
                if t2.kind is TokKind.PUNCT and t2.text == "<":
                    bal += 1
                elif t2.kind is TokKind.PUNCT and t2.text in (">", ">>", ">>>"):
                    bal -= len(t2.text)
                    if bal <= 0:
                        j += 1
                        break
                elif t2.kind is TokKind.NAME or (
                    t2.kind is TokKind.PUNCT and t2.text in (",", ".", "[", "]", "?")
                ):
                    pass
                else:
                    ok = False
                    break
                j += 1
            if ok and bal <= 0 and j < n and work[j].kind is TokKind.PUNCT and work[j].text == "(":
                i = j
            else:
                i = save
        args_tokens: list[Token] | None = None
        if i < n and work[i].kind is TokKind.PUNCT and work[i].text == "(":
            bal = 0
            start = i
            while i < n:
                t2 = work[i]
                if t2.kind is TokKind.PUNCT and t2.text == "(":
                    bal += 1
                elif t2.kind is TokKind.PUNCT and t2.text == ")":
                    bal -= 1
                    if bal == 0:
                        break
                i += 1
            args_tokens = work[start + 1 : i]
            i += 1  # past )
        segments.append((name_tok, args_tokens))
        # computed access after a segment collapses to the base
        while i < n and work[i].kind is TokKind.PUNCT and work[i].text == "[":
            bal = 0
            while i < n:
                t2 = work[i]
                if t2.kind is TokKind.PUNCT and t2.text == "[":
                    bal += 1
                elif t2.kind is TokKind.PUNCT and t2.text == "]":
                    bal -= 1
                    if bal == 0:
                        break
                i += 1
            i += 1
        if i < n and work[i].kind is TokKind.PUNCT and work[i].text in (".", "?."):
            i += 1
            continue
        break

    called = [k for k, (_, a) in enumerate(segments) if a is not None]
    if not called:
        return None
    last_call = called[-1]
    callee_tok, arg_toks = segments[last_call]
    receiver_names = [
        seg.text for seg, _ in segments[:last_call] if seg.text not in ("this", "new")
    ]
    if display_start is None:
        display_start = segments[0][0].start
    nested: list[CallExpr] = []
    for k in called[:-1]:
        seg_tok, seg_args = segments[k]
        inner = CallExpr(
            receiver=tuple(
                s.text for s, _ in segments[:k] if s.text not in ("this", "new")
            ),
            callee=seg_tok.text,
            args=tuple(_parse_args(source, seg_args or [])[0]),
            display=source[display_start : seg_tok.end],
            nested=(),
        )
        nested.append(inner)
    args, arg_nested = _parse_args(source, arg_toks or [])
    nested.extend(arg_nested)
    display = source[display_start : callee_tok.end]
    return CallExpr(
        receiver=tuple(receiver_names),
        callee=callee_tok.text,
        args=tuple(args),
        display=display,
        nested=tuple(nested),
    )


def _parse_args(source: str, toks: list[Token]) -> tuple[list[Arg], list[CallExpr]]:
    args: list[Arg] = []
    nested: list[CallExpr] = []
    if not toks:
        return args, nested
    groups: list[list[Token]] = [[]]
    depth = 0
    for tok in toks:
        if tok.kind is TokKind.PUNCT:
            if tok.text in ("(", "[", "{"):
                depth += 1
            elif tok.text in (")", "]", "}"):
                depth = max(0, depth - 1)
            elif tok.text == "," and depth == 0:
                groups.append([])
                continue
        groups[-1].append(tok)
    for group in groups:
        if not group:
            continue
        text = source[group[0].start : group[-1].end]
        if len(group) == 1 and group[0].kind is TokKind.STRING:
            args.append(Arg(kind=ArgKind.STRING_LITERAL, text=text, content=group[0].content))
            continue
        if len(group) == 1 and group[0].kind is TokKind.NUMBER:
            args.append(Arg(kind=ArgKind.NUMBER_LITERAL, text=text))
            continue
        chain = _pure_chain(source, group)
        if chain is not None:
            args.append(Arg(kind=ArgKind.IDENTIFIER, text=text, chains=(chain,)))
            continue
        chains = _embedded_chains(source, group)
        for inner in _embedded_calls(source, group):
            nested.append(inner)
        args.append(Arg(kind=ArgKind.OTHER, text=text, chains=tuple(chains)))
    return args, nested


def _pure_chain(source: str, group: list[Token]) -> ChainRef | None:
    """A bare dotted/indexed identifier chain, or None."""
    ids: list[str] = []
    i = 0
    n = len(group)
    expect_name = True
    while i < n:
        tok = group[i]
        if expect_name:
            if tok.kind is TokKind.NAME and tok.text in ("this", "new", "await"):
                i += 1
                if i < n and group[i].kind is TokKind.PUNCT and group[i].text in (".", "?."):
                    i += 1
                continue
            if tok.kind is TokKind.NAME and tok.text not in _CONTROL_KEYWORDS:
                ids.append(tok.text)
                i += 1
                expect_name = False
                continue
            return None
        if tok.kind is TokKind.PUNCT and tok.text in (".", "?."):
            i += 1
            expect_name = True
            continue
        if tok.kind is TokKind.PUNCT and tok.text == "[":
            bal = 0
            while i < n:
                t2 = group[i]
                if t2.kind is TokKind.PUNCT and t2.text == "[":
                    bal += 1
                elif t2.kind is TokKind.PUNCT and t2.text == "]":
                    bal -= 1
                    if bal == 0:
                        break
                i += 1
            if bal != 0:
                return None
            i += 1
            continue
        return None
    if expect_name or not ids:
        return None
    ids = [x for x in ids if x not in ("this", "new")]
    if not ids:
        return None
    return ChainRef(ids=tuple(ids), text=source[group[0].start : group[-1].end])


def _embedded_chains(source: str, group: list[Token]) -> list[ChainRef]:
    """Identifier chains inside a complex argument; callee names are skipped."""
    chains: list[ChainRef] = []
    i = 0
    n = len(group)
    while i < n:
        tok = group[i]
        if tok.kind is TokKind.NAME and tok.text not in _CONTROL_KEYWORDS:
            start = i
            ids = [tok.text]
            j = i + 1
            while (
                j + 1 < n
                and group[j].kind is TokKind.PUNCT
                and group[j].text in (".", "?.")
                and group[j + 1].kind is TokKind.NAME
                and group[j + 1].text not in _CONTROL_KEYWORDS
            ):
                ids.append(group[j + 1].text)
                j += 2
            followed_by_call = (
                j < n and group[j].kind is TokKind.PUNCT and group[j].text == "("
            )
            if not followed_by_call:
                ids = [x for x in ids if x not in ("this", "new")]
                if ids:
                    chains.append(
                        ChainRef(
                            ids=tuple(ids),
                            text=source[group[start].start : group[j - 1].end],
                        )
                    )
            i = j
            continue
        i += 1
    return chains


def _embedded_calls(source: str, group: list[Token]) -> list[CallExpr]:
    """Complete call expressions inside a complex argument (for inner-sink stats)."""
    calls: list[CallExpr] = []
    i = 0
    n = len(group)
    while i < n:
        tok = group[i]
        if (
            tok.kind is TokKind.NAME
            and tok.text not in _CONTROL_KEYWORDS
            and i + 1 < n
        ):
            parsed = _parse_call_chain(source, group[i:])
            if parsed is not None:
                calls.append(parsed)
                # jump past this chain's opening segment to avoid re-parsing
                bal = 0
                j = i
                seen_paren = False
                while j < n:
                    t2 = group[j]
                    if t2.kind is TokKind.PUNCT and t2.text == "(":
                        bal += 1
                        seen_paren = True
                    elif t2.kind is TokKind.PUNCT and t2.text == ")":
                        bal -= 1
                        if bal == 0 and seen_paren:
                            break
                    j += 1
                i = j + 1
                continue
        i += 1
    return calls


def normalize_chain(raw: str) -> tuple[str, ...]:
    """Identifier chain of a dotted/bracketed access expression.

    Computed accesses collapse to their base identifier; a leading ``this``
    (or ``new``) is dropped. Unparseable text yields an empty tuple.
    """
    toks = _lex(raw)
    toks = [t for t in toks if t.kind is not TokKind.NEWLINE]
    chain = _pure_chain(raw, toks)
    return chain.ids if chain is not None else ()
