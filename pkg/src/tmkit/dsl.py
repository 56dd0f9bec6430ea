"""Textual surface language for machine models, events, and behavior graphs.

Grammar (comments run from ``#`` to end of line)::

    model     := item*
    item      := machine | flow | trigger | event | behavior
    machine   := "machine" ID "constraint"? (":" STRING)? "{" (stagedecl | machine)* "}"
    stagedecl := KIND ("store")? (":" STRING)? ";"
    KIND      := "create" | "process" | "release" | "transfer" | "receive"
    flow      := "flow" (ID ":")? REF "->" REF ";"
    trigger   := "trigger" (ID ":")? REF "=>" REF ("if" STRING)? ";"
    REF       := ID ("." ID)* "." KIND
    event     := "event" ID (":" STRING)? "{" "time" STRING ";"
                 "region" "{" (REF | "edge" ID)+ "}" ("intensity" STRING ";")? "}"
    behavior  := "behavior" "{" (ID "->" ID ("excl" STRING)? ";")* "}"

``->`` draws solid flows, ``=>`` dashed triggers.  Machine identifiers are
dotted paths from the root; a stage is addressed as ``path.kind``.  Unlabeled
flows and triggers receive ids ``f1, f2, ...`` / ``t1, t2, ...`` in declaration
order.  The printer is deterministic (everything sorted by id) and always
emits explicit edge ids, so parse/print round-trips preserve identity.
"""

from __future__ import annotations

import re
from dataclasses import dataclass, field
from typing import Optional, Sequence

from .model import (
    ActionKind,
    BehavioralModel,
    BehaviorEdge,
    Event,
    Flow,
    KIND_ORDER,
    Machine,
    Region,
    Stage,
    StaticModel,
    TmError,
    Trigger,
    natural_key,
)

KIND_WORDS = {k.value: k for k in ActionKind}

RESERVED = frozenset(KIND_WORDS) | {
    "machine",
    "constraint",
    "store",
    "flow",
    "trigger",
    "if",
    "event",
    "time",
    "region",
    "edge",
    "intensity",
    "behavior",
    "excl",
}

_IDENT = re.compile(r"[A-Za-z][A-Za-z0-9_]*")


@dataclass(frozen=True)
class SourceSpan:
    line: int
    column: int
    length: int = 1


@dataclass(frozen=True)
class ParseDiagnostic:
    span: SourceSpan
    code: str  # "syntax" | "duplicate-id" | "unresolved-ref" | "invalid"
    message: str

    def __str__(self) -> str:
        return f"{self.span.line}:{self.span.column}: {self.code}: {self.message}"


@dataclass
class CommentMap:
    """Comment text attached to elements, keyed by element id."""

    header: tuple[str, ...] = ()
    items: dict[str, tuple[str, ...]] = field(default_factory=dict)


@dataclass
class ParseResult:
    model: Optional[StaticModel]
    events: tuple[Event, ...]
    behavior: Optional[BehavioralModel]
    comments: CommentMap
    diagnostics: tuple[ParseDiagnostic, ...]

    @property
    def ok(self) -> bool:
        return not self.diagnostics


class ParseError(TmError):
    def __init__(self, diagnostics: Sequence[ParseDiagnostic]):
        super().__init__("; ".join(str(d) for d in diagnostics))
        self.diagnostics = tuple(diagnostics)


class PrintError(TmError):
    pass


# -- lexer --------------------------------------------------------------------


@dataclass(frozen=True)
class _Token:
    kind: str  # ID STRING LBRACE RBRACE SEMI COLON DOT ARROW DARROW EOF
    value: str
    line: int
    column: int

    @property
    def span(self) -> SourceSpan:
        return SourceSpan(self.line, self.column, max(1, len(self.value)))


_PUNCT = {
    "->": "ARROW",
    "=>": "DARROW",
    "{": "LBRACE",
    "}": "RBRACE",
    ";": "SEMI",
    ":": "COLON",
    ".": "DOT",
}

_ESCAPES = {"\\": "\\", '"': '"', "n": "\n", "t": "\t", "r": "\r"}


def _lex(text: str) -> tuple[list[_Token], list[tuple[int, str]], list[ParseDiagnostic]]:
    tokens: list[_Token] = []
    comments: list[tuple[int, str]] = []
    diagnostics: list[ParseDiagnostic] = []
    line, col, i = 1, 1, 0
    n = len(text)
    while i < n:
        ch = text[i]
        if ch == "\n":
            line += 1
            col = 1
            i += 1
            continue
        if ch in " \t\r":
            i += 1
            col += 1
            continue
        if ch == "#":
            j = text.find("\n", i)
            j = n if j < 0 else j
            body = text[i + 1 : j]
            comments.append((line, body[1:] if body.startswith(" ") else body))
            col += j - i
            i = j
            continue
        if text[i : i + 2] in _PUNCT:
            tokens.append(_Token(_PUNCT[text[i : i + 2]], text[i : i + 2], line, col))
            i += 2
            col += 2
            continue
        if ch in _PUNCT:
            tokens.append(_Token(_PUNCT[ch], ch, line, col))
            i += 1
            col += 1
            continue
        if ch == '"':
            start_line, start_col = line, col
            i += 1
            col += 1
            out = []
            closed = False
            while i < n:
                c = text[i]
                if c == '"':
                    i += 1
                    col += 1
                    closed = True
                    break
                if c == "\n":
                    break
                if c == "\\":
                    esc = text[i + 1 : i + 2]
                    if esc not in _ESCAPES:
                        diagnostics.append(
                            ParseDiagnostic(
                                SourceSpan(line, col, 2), "syntax", f"unknown escape \\{esc}"
                            )
                        )
                        out.append(esc)
                    else:
                        out.append(_ESCAPES[esc])
                    i += 2
                    col += 2
                    continue
                out.append(c)
                i += 1
                col += 1
            if not closed:
                diagnostics.append(
                    ParseDiagnostic(
                        SourceSpan(start_line, start_col, max(1, col - start_col)),
                        "syntax",
                        "unterminated string literal",
                    )
                )
            tokens.append(_Token("STRING", "".join(out), start_line, start_col))
            continue
        m = _IDENT.match(text, i)
        if m:
            word = m.group(0)
            tokens.append(_Token("ID", word, line, col))
            i = m.end()
            col += len(word)
            continue
        diagnostics.append(
            ParseDiagnostic(SourceSpan(line, col, 1), "syntax", f"unexpected character {ch!r}")
        )
        i += 1
        col += 1
    tokens.append(_Token("EOF", "", line, col))
    return tokens, comments, diagnostics


# -- raw syntax tree ----------------------------------------------------------


@dataclass
class _RawStage:
    kind: ActionKind
    store: bool
    label: Optional[str]
    tok: _Token


@dataclass
class _RawMachine:
    name_tok: _Token
    display: Optional[str]
    constraint: bool
    stages: list[_RawStage]
    children: list["_RawMachine"]


@dataclass
class _RawRef:
    path: list[_Token]
    kind: ActionKind
    span: SourceSpan


@dataclass
class _RawEdge:
    label_tok: Optional[_Token]
    source: _RawRef
    target: _RawRef
    guard: Optional[str]
    dashed: bool
    tok: _Token


@dataclass
class _RawEvent:
    id_tok: _Token
    display: Optional[str]
    time: str
    time_tok: _Token
    stage_refs: list[_RawRef]
    edge_refs: list[_Token]
    intensity: Optional[str]


@dataclass
class _RawBehaviorEdge:
    from_tok: _Token
    to_tok: _Token
    group: Optional[str]


class _Parser:
    def __init__(self, tokens: list[_Token]):
        self.tokens = tokens
        self.pos = 0
        self.diagnostics: list[ParseDiagnostic] = []
        self.machines: list[_RawMachine] = []
        self.edges: list[_RawEdge] = []
        self.events: list[_RawEvent] = []
        self.behavior_edges: list[_RawBehaviorEdge] = []
        self.behavior_toks: list[_Token] = []

    # token helpers

    @property
    def cur(self) -> _Token:
        return self.tokens[self.pos]

    def peek(self, offset: int = 1) -> _Token:
        return self.tokens[min(self.pos + offset, len(self.tokens) - 1)]

    def advance(self) -> _Token:
        tok = self.cur
        if tok.kind != "EOF":
            self.pos += 1
        return tok

    def error(self, message: str, tok: Optional[_Token] = None, code: str = "syntax") -> None:
        tok = tok or self.cur
        self.diagnostics.append(ParseDiagnostic(tok.span, code, message))

    def expect(self, kind: str, what: str) -> Optional[_Token]:
        if self.cur.kind == kind:
            return self.advance()
        found = self.cur.value or self.cur.kind
        self.error(f"expected {what}, found {found!r}")
        return None

    def expect_word(self, word: str) -> bool:
        if self.cur.kind == "ID" and self.cur.value == word:
            self.advance()
            return True
        found = self.cur.value or self.cur.kind
        self.error(f"expected {word!r}, found {found!r}")
        return False

    def at_word(self, word: str) -> bool:
        return self.cur.kind == "ID" and self.cur.value == word

    def sync_statement(self) -> None:
        # one diagnostic per statement: skip to the next ';' or block edge
        while self.cur.kind not in ("EOF", "SEMI", "RBRACE"):
            self.advance()
        if self.cur.kind == "SEMI":
            self.advance()

    # grammar

    def parse_model(self) -> None:
        while self.cur.kind != "EOF":
            if self.at_word("machine"):
                machine = self.parse_machine()
                if machine:
                    self.machines.append(machine)
            elif self.at_word("flow"):
                self.parse_edge(dashed=False)
            elif self.at_word("trigger"):
                self.parse_edge(dashed=True)
            elif self.at_word("event"):
                self.parse_event()
            elif self.at_word("behavior"):
                self.parse_behavior()
            else:
                found = self.cur.value or self.cur.kind
                self.error(f"expected a declaration, found {found!r}")
                self.advance()
                self.sync_statement()

    def parse_name(self, what: str) -> Optional[_Token]:
        tok = self.expect("ID", f"{what} name")
        if tok is None:
            return None
        if tok.value in RESERVED:
            self.error(f"{tok.value!r} is a reserved word", tok)
            return None
        return tok

    def parse_machine(self) -> Optional[_RawMachine]:
        self.advance()  # 'machine'
        name_tok = self.parse_name("machine")
        if name_tok is None:
            self.sync_statement()
            return None
        constraint = False
        if self.at_word("constraint"):
            self.advance()
            constraint = True
        display = None
        if self.cur.kind == "COLON":
            self.advance()
            tok = self.expect("STRING", "machine display name")
            display = tok.value if tok else None
        if self.expect("LBRACE", "'{'") is None:
            self.sync_statement()
            return None
        machine = _RawMachine(name_tok, display, constraint, [], [])
        while self.cur.kind not in ("RBRACE", "EOF"):
            if self.at_word("machine"):
                child = self.parse_machine()
                if child:
                    machine.children.append(child)
            elif self.cur.kind == "ID" and self.cur.value in KIND_WORDS:
                stage = self.parse_stage()
                if stage:
                    machine.stages.append(stage)
            else:
                found = self.cur.value or self.cur.kind
                self.error(f"expected a stage or submachine, found {found!r}")
                self.advance()
                self.sync_statement()
        self.expect("RBRACE", "'}'")
        return machine

    def parse_stage(self) -> Optional[_RawStage]:
        tok = self.advance()
        kind = KIND_WORDS[tok.value]
        store = False
        if self.at_word("store"):
            self.advance()
            store = True
        label = None
        if self.cur.kind == "COLON":
            self.advance()
            lab = self.expect("STRING", "stage label")
            label = lab.value if lab else None
        if self.expect("SEMI", "';'") is None:
            self.sync_statement()
            return None
        return _RawStage(kind, store, label, tok)

    def parse_ref(self) -> Optional[_RawRef]:
        first = self.expect("ID", "stage reference")
        if first is None:
            return None
        parts = [first]
        while self.cur.kind == "DOT":
            self.advance()
            nxt = self.expect("ID", "name or stage kind")
            if nxt is None:
                return None
            parts.append(nxt)
        last = parts[-1]
        if len(parts) < 2 or last.value not in KIND_WORDS:
            self.error("a stage reference ends in a stage kind (machine.kind)", last)
            return None
        span = SourceSpan(first.line, first.column, last.column + len(last.value) - first.column)
        return _RawRef(parts[:-1], KIND_WORDS[last.value], span)

    def parse_edge(self, dashed: bool) -> None:
        head = self.advance()  # 'flow' | 'trigger'
        label_tok = None
        if self.cur.kind == "ID" and self.peek().kind == "COLON":
            label_tok = self.parse_name("flow" if not dashed else "trigger")
            if label_tok is None:
                self.sync_statement()
                return
            self.advance()  # ':'
        source = self.parse_ref()
        if source is None:
            self.sync_statement()
            return
        arrow = "DARROW" if dashed else "ARROW"
        if self.expect(arrow, "'=>'" if dashed else "'->'") is None:
            self.sync_statement()
            return
        target = self.parse_ref()
        if target is None:
            self.sync_statement()
            return
        guard = None
        if dashed and self.at_word("if"):
            self.advance()
            tok = self.expect("STRING", "guard text")
            guard = tok.value if tok else None
        if self.expect("SEMI", "';'") is None:
            self.sync_statement()
            return
        self.edges.append(_RawEdge(label_tok, source, target, guard, dashed, head))

    def parse_event(self) -> None:
        self.advance()  # 'event'
        id_tok = self.parse_name("event")
        if id_tok is None:
            self.sync_statement()
            return
        display = None
        if self.cur.kind == "COLON":
            self.advance()
            tok = self.expect("STRING", "event name")
            display = tok.value if tok else None
        if self.expect("LBRACE", "'{'") is None:
            self.sync_statement()
            return
        if not self.expect_word("time"):
            self.sync_statement()
            return
        time_tok = self.expect("STRING", "time annotation")
        if time_tok is None or self.expect("SEMI", "';'") is None:
            self.sync_statement()
            return
        if not self.expect_word("region") or self.expect("LBRACE", "'{'") is None:
            self.sync_statement()
            return
        stage_refs: list[_RawRef] = []
        edge_refs: list[_Token] = []
        while self.cur.kind not in ("RBRACE", "EOF"):
            if self.at_word("edge"):
                self.advance()
                tok = self.expect("ID", "edge id")
                if tok:
                    edge_refs.append(tok)
            else:
                ref = self.parse_ref()
                if ref is None:
                    break
                stage_refs.append(ref)
        if self.expect("RBRACE", "'}'") is None:
            self.sync_statement()
            return
        if not stage_refs and not edge_refs:
            self.error("region must reference at least one stage", id_tok)
        intensity = None
        if self.at_word("intensity"):
            self.advance()
            tok = self.expect("STRING", "intensity text")
            intensity = tok.value if tok else None
            self.expect("SEMI", "';'")
        if self.expect("RBRACE", "'}'") is None:
            self.sync_statement()
            return
        self.events.append(
            _RawEvent(id_tok, display, time_tok.value, time_tok, stage_refs, edge_refs, intensity)
        )

    def parse_behavior(self) -> None:
        self.behavior_toks.append(self.advance())  # 'behavior'
        if self.expect("LBRACE", "'{'") is None:
            self.sync_statement()
            return
        while self.cur.kind not in ("RBRACE", "EOF"):
            from_tok = self.expect("ID", "event id")
            if from_tok is None:
                self.sync_statement()
                continue
            if self.expect("ARROW", "'->'") is None:
                self.sync_statement()
                continue
            to_tok = self.expect("ID", "event id")
            if to_tok is None:
                self.sync_statement()
                continue
            group = None
            if self.at_word("excl"):
                self.advance()
                tok = self.expect("STRING", "exclusion group")
                group = tok.value if tok else None
            if self.expect("SEMI", "';'") is None:
                self.sync_statement()
                continue
            self.behavior_edges.append(_RawBehaviorEdge(from_tok, to_tok, group))
        self.expect("RBRACE", "'}'")


# -- resolution ---------------------------------------------------------------


class _Resolver:
    def __init__(self, parser: _Parser, comments: list[tuple[int, str]]):
        self.p = parser
        self.raw_comments = comments
        self.diagnostics = list(parser.diagnostics)
        self.ids: dict[str, _Token] = {}
        self.line_keys: dict[int, str] = {}

    def error(self, tok: _Token, code: str, message: str) -> None:
        self.diagnostics.append(ParseDiagnostic(tok.span, code, message))

    def claim(self, id_: str, tok: _Token) -> bool:
        if id_ in self.ids:
            other = self.ids[id_]
            self.error(tok, "duplicate-id", f"{id_!r} already declared at line {other.line}")
            return False
        self.ids[id_] = tok
        return True

    def resolve(self) -> ParseResult:
        machines = tuple(
            m for m in (self.build_machine(raw, None) for raw in self.p.machines) if m
        )
        model_for_refs = StaticModel(machines=machines)

        flows: list[Flow] = []
        triggers: list[Trigger] = []
        auto_f, auto_t = 1, 1
        for raw in self.p.edges:
            src = self.resolve_ref(model_for_refs, raw.source)
            dst = self.resolve_ref(model_for_refs, raw.target)
            if raw.label_tok is not None:
                edge_id = raw.label_tok.value
                if not self.claim(edge_id, raw.label_tok):
                    continue
            else:
                prefix = "t" if raw.dashed else "f"
                counter = auto_t if raw.dashed else auto_f
                while f"{prefix}{counter}" in self.ids:
                    counter += 1
                edge_id = f"{prefix}{counter}"
                self.ids[edge_id] = raw.tok
                if raw.dashed:
                    auto_t = counter + 1
                else:
                    auto_f = counter + 1
            if src is None or dst is None:
                continue
            if src == dst:
                self.error(raw.tok, "invalid", "source and target stages are the same")
                continue
            self.line_keys[raw.tok.line] = edge_id
            if raw.dashed:
                triggers.append(Trigger(edge_id, src, dst, raw.guard))
            else:
                flows.append(Flow(edge_id, src, dst))

        model_for_refs = StaticModel(
            machines=machines, flows=tuple(flows), triggers=tuple(triggers)
        )

        events: list[Event] = []
        for raw in self.p.events:
            event = self.build_event(model_for_refs, raw)
            if event:
                events.append(event)
        events.sort(key=lambda e: natural_key(e.id))

        declared = {e.id for e in events}
        seen_pairs: set[tuple[str, str]] = set()
        behavior_edges: list[BehaviorEdge] = []
        for raw_edge in self.p.behavior_edges:
            ok = True
            for tok in (raw_edge.from_tok, raw_edge.to_tok):
                if tok.value not in declared:
                    self.error(tok, "unresolved-ref", f"unknown event {tok.value!r}")
                    ok = False
            if raw_edge.from_tok.value == raw_edge.to_tok.value:
                self.error(raw_edge.from_tok, "invalid", "behavior edge loops on one event")
                ok = False
            pair = (raw_edge.from_tok.value, raw_edge.to_tok.value)
            if pair in seen_pairs:
                self.error(raw_edge.from_tok, "duplicate-id", f"edge {pair[0]} -> {pair[1]} repeated")
                ok = False
            seen_pairs.add(pair)
            if ok:
                behavior_edges.append(BehaviorEdge(pair[0], pair[1], raw_edge.group))
                self.line_keys[raw_edge.from_tok.line] = f"{pair[0]}->{pair[1]}"
        for tok in self.p.behavior_toks:
            self.line_keys[tok.line] = "behavior"

        errors = tuple(self.diagnostics)
        if errors:
            return ParseResult(None, (), None, CommentMap(), errors)

        model = StaticModel.build(machines, flows, triggers)
        behavior = BehavioralModel.build(sorted(declared, key=natural_key), behavior_edges)
        return ParseResult(model, tuple(events), behavior, self.attach_comments(), ())

    def build_machine(self, raw: _RawMachine, parent_id: Optional[str]) -> Optional[Machine]:
        mid = raw.name_tok.value if parent_id is None else f"{parent_id}.{raw.name_tok.value}"
        if not self.claim(mid, raw.name_tok):
            return None
        self.line_keys[raw.name_tok.line] = mid
        stages = []
        kinds_seen: set[ActionKind] = set()
        for raw_stage in raw.stages:
            if raw_stage.kind in kinds_seen:
                self.error(
                    raw_stage.tok,
                    "duplicate-id",
                    f"machine {mid!r} already has a {raw_stage.kind.value} stage",
                )
                continue
            kinds_seen.add(raw_stage.kind)
            sid = f"{mid}.{raw_stage.kind.value}"
            self.ids[sid] = raw_stage.tok
            self.line_keys[raw_stage.tok.line] = sid
            stages.append(
                Stage(sid, raw_stage.kind, mid, raw_stage.store, raw_stage.label)
            )
        if raw.constraint and ActionKind.PROCESS not in kinds_seen:
            self.error(raw.name_tok, "invalid", f"constraint machine {mid!r} needs a process stage")
        children = tuple(
            c for c in (self.build_machine(child, mid) for child in raw.children) if c
        )
        return Machine(
            id=mid,
            name=raw.display if raw.display is not None else raw.name_tok.value,
            is_constraint=raw.constraint,
            stages=tuple(stages),
            submachines=children,
            parent=parent_id,
        )

    def resolve_ref(self, model: StaticModel, ref: _RawRef) -> Optional[str]:
        mid = ".".join(tok.value for tok in ref.path)
        machine = model.machines_by_id.get(mid)
        if machine is None:
            self.diagnostics.append(
                ParseDiagnostic(ref.span, "unresolved-ref", f"unknown machine {mid!r}")
            )
            return None
        stage = machine.stage_of(ref.kind)
        if stage is None:
            self.diagnostics.append(
                ParseDiagnostic(
                    ref.span,
                    "unresolved-ref",
                    f"machine {mid!r} has no {ref.kind.value} stage",
                )
            )
            return None
        return stage.id

    def build_event(self, model: StaticModel, raw: _RawEvent) -> Optional[Event]:
        if not self.claim(raw.id_tok.value, raw.id_tok):
            return None
        self.line_keys[raw.id_tok.line] = raw.id_tok.value
        stage_ids = set()
        for ref in raw.stage_refs:
            sid = self.resolve_ref(model, ref)
            if sid:
                stage_ids.add(sid)
        edge_ids = set()
        for tok in raw.edge_refs:
            edge = model.flows_by_id.get(tok.value) or model.triggers_by_id.get(tok.value)
            if edge is None:
                self.error(tok, "unresolved-ref", f"unknown edge {tok.value!r}")
                continue
            if not {edge.source, edge.target} <= stage_ids:
                self.error(
                    tok, "invalid", f"edge {tok.value!r} has an endpoint outside the region"
                )
                continue
            edge_ids.add(tok.value)
        return Event(
            id=raw.id_tok.value,
            name=raw.display if raw.display is not None else raw.id_tok.value,
            time=raw.time,
            region=Region(frozenset(stage_ids), frozenset(edge_ids)),
            intensity=raw.intensity,
        )

    def attach_comments(self) -> CommentMap:
        if not self.raw_comments:
            return CommentMap()
        blocks: list[tuple[int, list[str]]] = []
        for line, text in self.raw_comments:
            if blocks and blocks[-1][0] + len(blocks[-1][1]) == line:
                blocks[-1][1].append(text)
            else:
                blocks.append((line, [text]))
        header: list[str] = []
        items: dict[str, tuple[str, ...]] = {}
        for start, lines in blocks:
            key = self.line_keys.get(start + len(lines))
            if key is None:
                header.extend(lines)
            else:
                items[key] = items.get(key, ()) + tuple(lines)
        return CommentMap(header=tuple(header), items=items)


def parse(text: str) -> ParseResult:
    """Parse a model document.  Diagnostics non-empty means failure."""
    tokens, comments, lex_diags = _lex(text)
    parser = _Parser(tokens)
    parser.diagnostics.extend(lex_diags)
    parser.parse_model()
    return _Resolver(parser, comments).resolve()


def parse_or_raise(text: str) -> ParseResult:
    result = parse(text)
    if not result.ok:
        raise ParseError(result.diagnostics)
    return result


# -- printer ------------------------------------------------------------------


def _escape(text: str) -> str:
    out = text.replace("\\", "\\\\").replace('"', '\\"')
    out = out.replace("\n", "\\n").replace("\t", "\\t").replace("\r", "\\r")
    return f'"{out}"'


def _check_ident(word: str, what: str) -> str:
    if not _IDENT.fullmatch(word) or word in RESERVED:
        raise PrintError(f"{what} {word!r} is not a printable identifier")
    return word


class _RefTable:
    """Maps stage ids to printable dotted references."""

    def __init__(self, model: StaticModel):
        self.refs: dict[str, str] = {}
        self.tokens: dict[str, str] = {}
        for root in model.machines:
            self._enter(root, None)

    def _enter(self, machine: Machine, prefix: Optional[str]) -> None:
        token = _check_ident(machine.id.split(".")[-1], "machine id segment")
        path = token if prefix is None else f"{prefix}.{token}"
        self.tokens[machine.id] = token
        seen = set()
        for sub in machine.submachines:
            seg = sub.id.split(".")[-1]
            if seg in seen:
                raise PrintError(f"machines under {machine.id!r} share the segment {seg!r}")
            seen.add(seg)
        for stage in machine.stages:
            self.refs[stage.id] = f"{path}.{stage.kind.value}"
        for sub in machine.submachines:
            self._enter(sub, path)

    def ref(self, stage_id: str) -> str:
        return self.refs[stage_id]


def print_model(
    model: Optional[StaticModel],
    events: Sequence[Event] = (),
    behavior: Optional[BehavioralModel] = None,
    comments: Optional[CommentMap] = None,
) -> str:
    """Render the canonical text form: deterministic, sorted by id."""
    model = model or StaticModel()
    comments = comments or CommentMap()
    table = _RefTable(model)
    chunks: list[str] = []

    if comments.header:
        chunks.append("\n".join(f"# {line}".rstrip() for line in comments.header))

    def annotate(key: str, body: list[str], indent: str = "") -> list[str]:
        lines = [f"{indent}# {c}".rstrip() for c in comments.items.get(key, ())]
        return lines + body

    def emit_machine(machine: Machine, indent: str) -> list[str]:
        token = table.tokens[machine.id]
        head = f"{indent}machine {token}"
        if machine.is_constraint:
            head += " constraint"
        if machine.name != token:
            head += f" : {_escape(machine.name)}"
        head += " {"
        lines = annotate(machine.id, [head], indent)
        inner = indent + "  "
        for kind in KIND_ORDER:
            stage = machine.stage_of(kind)
            if stage is None:
                continue
            decl = f"{inner}{kind.value}"
            if stage.has_storage:
                decl += " store"
            if stage.label is not None:
                decl += f" : {_escape(stage.label)}"
            lines.extend(annotate(stage.id, [decl + ";"], inner))
        for sub in sorted(machine.submachines, key=lambda m: natural_key(table.tokens[m.id])):
            lines.extend(emit_machine(sub, inner))
        lines.append(indent + "}")
        return lines

    for root in sorted(model.machines, key=lambda m: natural_key(table.tokens[m.id])):
        chunks.append("\n".join(emit_machine(root, "")))

    for flow in sorted(model.flows, key=lambda f: natural_key(f.id)):
        _check_ident(flow.id, "flow id")
        line = f"flow {flow.id}: {table.ref(flow.source)} -> {table.ref(flow.target)};"
        chunks.append("\n".join(annotate(flow.id, [line])))

    for trig in sorted(model.triggers, key=lambda t: natural_key(t.id)):
        _check_ident(trig.id, "trigger id")
        line = f"trigger {trig.id}: {table.ref(trig.source)} => {table.ref(trig.target)}"
        if trig.guard is not None:
            line += f" if {_escape(trig.guard)}"
        chunks.append("\n".join(annotate(trig.id, [line + ";"])))

    for event in sorted(events, key=lambda e: natural_key(e.id)):
        _check_ident(event.id, "event id")
        head = f"event {event.id}"
        if event.name != event.id:
            head += f" : {_escape(event.name)}"
        lines = [head + " {", f"  time {_escape(event.time)};", "  region {"]
        for sid in sorted(event.region.stage_ids, key=lambda s: natural_key(table.ref(s))):
            lines.append(f"    {table.ref(sid)}")
        for eid in sorted(event.region.edge_ids, key=natural_key):
            lines.append(f"    edge {eid}")
        lines.append("  }")
        if event.intensity is not None:
            lines.append(f"  intensity {_escape(event.intensity)};")
        lines.append("}")
        chunks.append("\n".join(annotate(event.id, lines)))

    if behavior is not None and behavior.edges:
        lines = annotate("behavior", ["behavior {"])
        for edge in behavior.edges:
            stmt = f"  {edge.source} -> {edge.target}"
            if edge.exclusive_group is not None:
                stmt += f" excl {_escape(edge.exclusive_group)}"
            lines.extend(annotate(f"{edge.source}->{edge.target}", [stmt + ";"], "  "))
        lines.append("}")
        chunks.append("\n".join(lines))

    if not chunks:
        return ""
    return "\n\n".join(chunks) + "\n"


def format_text(text: str) -> str:
    """Reprint a document in canonical form, preserving attached comments."""
    result = parse_or_raise(text)
    return print_model(result.model, result.events, result.behavior, result.comments)
