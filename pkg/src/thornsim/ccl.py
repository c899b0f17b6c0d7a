"""Thorn declaration DSL and run-configuration parsing.

One ``.thorn`` file declares a thorn: its implementation name, the
implementations it inherits, its variable groups, parameters, and schedule
items.  The grammar is line-agnostic (newlines are whitespace); every parse
error carries a 1-based line:column location.

A run config is genuinely line-oriented: one ``ActiveThorns`` line plus
``impl::param = value`` assignments.  Assignment values are captured
verbatim; typing happens later, when the flesh binds them against parameter
declarations, so this parser needs no manifest context.
"""

from __future__ import annotations

import re
from dataclasses import dataclass, field

from .errors import (
    BadRange,
    BadValue,
    CclSyntaxError,
    DuplicateAssignment,
    DuplicateName,
)

SCHEDULE_BINS = (
    "STARTUP",
    "PARAMCHECK",
    "INITIAL",
    "PRESTEP",
    "EVOL",
    "POSTSTEP",
    "ANALYSIS",
    "TERMINATE",
)

PARAM_TYPES = ("real", "int", "keyword", "boolean", "string")

_IDENT_RE = re.compile(r"[A-Za-z][A-Za-z0-9_]*")


def is_identifier(text: str) -> bool:
    return bool(_IDENT_RE.fullmatch(text))


# ---------------------------------------------------------------------------
# Manifest data model


@dataclass(frozen=True)
class GroupDecl:
    """One variable group: a set of like-shaped variables sharing storage policy."""

    name: str
    kind: str  # "GF" | "SCALAR"
    timelevels: int = 1
    ghost: int = 0
    members: tuple[str, ...] = ()
    parity: tuple[str, ...] = ()  # one entry per member: "even" | "odd"

    def parity_of(self, member: str) -> str:
        return self.parity[self.members.index(member)]


@dataclass(frozen=True)
class NumericRange:
    """Closed interval with ``None`` for an unbounded end."""

    lo: float | None
    hi: float | None

    def contains(self, value: float) -> bool:
        if self.lo is not None and value < self.lo:
            return False
        if self.hi is not None and value > self.hi:
            return False
        return True

    def render(self) -> str:
        lo = "*" if self.lo is None else _render_number(self.lo)
        hi = "*" if self.hi is None else _render_number(self.hi)
        return f"{lo}:{hi}"


@dataclass(frozen=True)
class KeywordRange:
    allowed: tuple[str, ...]

    def contains(self, value: str) -> bool:
        return value in self.allowed

    def render(self) -> str:
        return " | ".join(f'"{v}"' for v in self.allowed)


@dataclass(frozen=True)
class ParamDecl:
    name: str
    ptype: str
    description: str
    range: NumericRange | KeywordRange | None
    default: object
    steerable: str = "never"  # never | always | recover

    def accepts(self, value: object) -> bool:
        """Type-aware range check for an already-typed value."""
        if self.ptype in ("real", "int"):
            if not isinstance(value, (int, float)) or isinstance(value, bool):
                return False
            if self.ptype == "int" and not float(value).is_integer():
                return False
            return self.range is None or self.range.contains(float(value))
        if self.ptype == "keyword":
            return isinstance(value, str) and self.range is not None and self.range.contains(value)
        if self.ptype == "boolean":
            return isinstance(value, bool)
        return isinstance(value, str)


@dataclass(frozen=True)
class ScheduleDecl:
    routine: str
    bin: str | None = None  # exactly one of bin/group is set
    group: str | None = None
    before: tuple[str, ...] = ()
    after: tuple[str, ...] = ()
    reads: tuple[str, ...] = ()
    writes: tuple[str, ...] = ()
    sync: tuple[str, ...] = ()
    description: str = ""

    @property
    def location(self) -> str:
        return self.bin if self.bin is not None else self.group  # type: ignore[return-value]


@dataclass(frozen=True)
class ThornManifest:
    thorn_name: str
    implementation: str
    inherits: tuple[str, ...] = ()
    groups: tuple[GroupDecl, ...] = ()
    params: tuple[ParamDecl, ...] = ()
    schedule_items: tuple[ScheduleDecl, ...] = ()

    def group(self, name: str) -> GroupDecl | None:
        for g in self.groups:
            if g.name == name:
                return g
        return None

    def param(self, name: str) -> ParamDecl | None:
        for p in self.params:
            if p.name == name:
                return p
        return None


@dataclass(frozen=True)
class RunConfig:
    active_thorns: tuple[str, ...] = ()
    assignments: tuple[tuple[str, str], ...] = ()  # (impl::param, raw value) in file order


# ---------------------------------------------------------------------------
# Lexer


@dataclass(frozen=True)
class _Token:
    kind: str  # IDENT NUMBER STRING PUNCT EOF
    value: str
    line: int
    column: int


_PUNCT = ("::", ":", ",", "{", "}", "=", "|", "*")
_NUMBER_RE = re.compile(r"[+-]?(\d+\.\d*([eE][+-]?\d+)?|\d+([eE][+-]?\d+)?|\.\d+([eE][+-]?\d+)?)")


def _lex(source: str) -> list[_Token]:
    tokens: list[_Token] = []
    line, col = 1, 1
    i, n = 0, len(source)
    while i < n:
        ch = source[i]
        if ch == "\n":
            line += 1
            col = 1
            i += 1
            continue
        if ch in " \t\r":
            i += 1
            col += 1
            continue
        if ch == "#":  # comment to end of line
            while i < n and source[i] != "\n":
                i += 1
            continue
        if ch == '"':
            j = i + 1
            while j < n and source[j] not in '"\n':
                j += 1
            if j >= n or source[j] != '"':
                raise CclSyntaxError("unterminated string", line, col)
            tokens.append(_Token("STRING", source[i + 1 : j], line, col))
            col += j - i + 1
            i = j + 1
            continue
        two = source[i : i + 2]
        if two == "::":
            tokens.append(_Token("PUNCT", "::", line, col))
            i += 2
            col += 2
            continue
        m = _NUMBER_RE.match(source, i)
        if m and (ch.isdigit() or (ch in "+-." and m.end() > i + 1)):
            tokens.append(_Token("NUMBER", m.group(), line, col))
            col += m.end() - i
            i = m.end()
            continue
        m = _IDENT_RE.match(source, i)
        if m:
            tokens.append(_Token("IDENT", m.group(), line, col))
            col += m.end() - i
            i = m.end()
            continue
        if ch in "{},=|*:":
            tokens.append(_Token("PUNCT", ch, line, col))
            i += 1
            col += 1
            continue
        raise CclSyntaxError(f"unexpected character {ch!r}", line, col)
    tokens.append(_Token("EOF", "", line, col))
    return tokens


# ---------------------------------------------------------------------------
# Manifest parser (recursive descent over the token stream)


class _Parser:
    def __init__(self, tokens: list[_Token]):
        self.tokens = tokens
        self.pos = 0

    def peek(self) -> _Token:
        return self.tokens[self.pos]

    def advance(self) -> _Token:
        tok = self.tokens[self.pos]
        if tok.kind != "EOF":
            self.pos += 1
        return tok

    def error(self, message: str, tok: _Token | None = None) -> CclSyntaxError:
        tok = tok or self.peek()
        return CclSyntaxError(message, tok.line, tok.column)

    def expect_punct(self, value: str) -> _Token:
        tok = self.peek()
        if tok.kind != "PUNCT" or tok.value != value:
            raise self.error(f"expected {value!r}, got {tok.value!r}")
        return self.advance()

    def expect_ident(self, what: str = "identifier") -> _Token:
        tok = self.peek()
        if tok.kind != "IDENT":
            raise self.error(f"expected {what}, got {tok.value!r}")
        return self.advance()

    def expect_keyword(self, word: str) -> _Token:
        tok = self.peek()
        if tok.kind != "IDENT" or tok.value != word:
            raise self.error(f"expected {word!r}, got {tok.value!r}")
        return self.advance()

    def expect_string(self, what: str = "quoted string") -> _Token:
        tok = self.peek()
        if tok.kind != "STRING":
            raise self.error(f"expected {what}, got {tok.value!r}")
        return self.advance()

    def at_keyword(self, word: str) -> bool:
        tok = self.peek()
        return tok.kind == "IDENT" and tok.value == word

    # -- grammar productions

    def parse_manifest(self) -> ThornManifest:
        self.expect_keyword("thorn")
        thorn_name = self.expect_ident("thorn name").value
        self.expect_keyword("implements")
        implementation = self.expect_ident("implementation name").value

        inherits: list[str] = []
        if self.at_keyword("inherits"):
            self.advance()
            inherits.append(self.expect_ident().value)
            while self.peek().value == ",":
                self.advance()
                inherits.append(self.expect_ident().value)

        groups: list[GroupDecl] = []
        params: list[ParamDecl] = []
        schedule: list[ScheduleDecl] = []
        seen: dict[tuple[str, str], None] = {}

        while self.peek().kind != "EOF":
            tok = self.peek()
            if self.at_keyword("group"):
                decl, where = self.parse_group()
                self._check_dup(seen, "group", decl.name, where)
                groups.append(decl)
            elif self.at_keyword("param"):
                decl, where = self.parse_param()
                self._check_dup(seen, "param", decl.name, where)
                params.append(decl)
            elif self.at_keyword("schedule"):
                decl, where = self.parse_schedule()
                self._check_dup(seen, "schedule", decl.routine, where)
                schedule.append(decl)
            else:
                raise self.error(f"expected group/param/schedule declaration, got {tok.value!r}")

        return ThornManifest(
            thorn_name=thorn_name,
            implementation=implementation,
            inherits=tuple(inherits),
            groups=tuple(groups),
            params=tuple(params),
            schedule_items=tuple(schedule),
        )

    def _check_dup(self, seen: dict, kind: str, name: str, tok: _Token) -> None:
        key = (kind, name)
        if key in seen:
            raise DuplicateName(f"{kind} {name!r} declared twice", tok.line, tok.column)
        seen[key] = None

    def parse_group(self) -> tuple[GroupDecl, _Token]:
        self.expect_keyword("group")
        name_tok = self.expect_ident("group name")
        self.expect_keyword("kind")
        self.expect_punct("=")
        kind_tok = self.expect_ident("GF or SCALAR")
        if kind_tok.value not in ("GF", "SCALAR"):
            raise self.error("group kind must be GF or SCALAR", kind_tok)
        timelevels, ghost = 1, 0
        parity_list: list[str] = []
        while self.peek().kind == "IDENT" and self.peek().value in ("timelevels", "ghost", "parity"):
            attr = self.advance()
            self.expect_punct("=")
            if attr.value == "parity":
                parity_list.append(self._parity_word())
                while self.peek().value == ",":
                    self.advance()
                    parity_list.append(self._parity_word())
            else:
                num = self.peek()
                if num.kind != "NUMBER" or not num.value.lstrip("+").isdigit():
                    raise self.error(f"{attr.value} takes a non-negative integer")
                self.advance()
                if attr.value == "timelevels":
                    timelevels = int(num.value)
                else:
                    ghost = int(num.value)

        self.expect_punct("{")
        members = [self.expect_ident("variable name").value]
        while self.peek().value == ",":
            self.advance()
            members.append(self.expect_ident("variable name").value)
        close = self.expect_punct("}")

        if timelevels not in (1, 2, 3):
            raise BadValue("timelevels must be 1, 2, or 3", name_tok.line, name_tok.column)
        if not 0 <= ghost <= 4:
            raise BadValue("ghost width must be between 0 and 4", name_tok.line, name_tok.column)
        if kind_tok.value == "SCALAR" and ghost != 0:
            raise BadValue("SCALAR groups cannot have ghost points", name_tok.line, name_tok.column)
        if len(set(members)) != len(members):
            raise DuplicateName("variable repeated in group", close.line, close.column)
        if not parity_list:
            parity = ("even",) * len(members)
        elif len(parity_list) == 1:
            parity = (parity_list[0],) * len(members)
        elif len(parity_list) == len(members):
            parity = tuple(parity_list)
        else:
            raise BadValue(
                "parity list must have one entry or one per member",
                name_tok.line,
                name_tok.column,
            )
        decl = GroupDecl(
            name=name_tok.value,
            kind=kind_tok.value,
            timelevels=timelevels,
            ghost=ghost,
            members=tuple(members),
            parity=parity,
        )
        return decl, name_tok

    def _parity_word(self) -> str:
        tok = self.expect_ident("even or odd")
        if tok.value not in ("even", "odd"):
            raise self.error("parity must be even or odd", tok)
        return tok.value

    def parse_param(self) -> tuple[ParamDecl, _Token]:
        self.expect_keyword("param")
        type_tok = self.expect_ident("parameter type")
        if type_tok.value not in PARAM_TYPES:
            raise self.error(f"parameter type must be one of {'/'.join(PARAM_TYPES)}", type_tok)
        name_tok = self.expect_ident("parameter name")
        description = self.expect_string("parameter description").value

        self.expect_punct("{")
        prange: NumericRange | KeywordRange | None
        if type_tok.value in ("real", "int"):
            lo = self._range_bound(type_tok.value)
            self.expect_punct(":")
            hi = self._range_bound(type_tok.value)
            prange = NumericRange(lo, hi)
        elif type_tok.value == "keyword":
            allowed = [self.expect_string("keyword alternative").value]
            while self.peek().value == "|":
                self.advance()
                allowed.append(self.expect_string("keyword alternative").value)
            prange = KeywordRange(tuple(allowed))
        else:
            prange = None
        self.expect_punct("}")

        self.expect_keyword("default")
        default = self._default_value(type_tok.value, name_tok)

        steerable = "never"
        if self.at_keyword("steerable"):
            self.advance()
            self.expect_punct("=")
            st = self.expect_ident("never, always, or recover")
            if st.value not in ("never", "always", "recover"):
                raise self.error("steerable must be never, always, or recover", st)
            steerable = st.value

        decl = ParamDecl(
            name=name_tok.value,
            ptype=type_tok.value,
            description=description,
            range=prange,
            default=default,
            steerable=steerable,
        )
        if not decl.accepts(default):
            raise BadRange(
                f"default for {name_tok.value!r} is outside the declared range",
                name_tok.line,
                name_tok.column,
            )
        return decl, name_tok

    def _range_bound(self, ptype: str) -> float | None:
        tok = self.peek()
        if tok.value == "*":
            self.advance()
            return None
        if tok.kind != "NUMBER":
            raise self.error("expected number or '*' in range")
        self.advance()
        value = float(tok.value)
        if ptype == "int" and not value.is_integer():
            raise self.error("int range bound must be an integer", tok)
        return value

    def _default_value(self, ptype: str, name_tok: _Token) -> object:
        tok = self.peek()
        if ptype == "real":
            if tok.kind != "NUMBER":
                raise self.error("real default must be a number")
            self.advance()
            return float(tok.value)
        if ptype == "int":
            if tok.kind != "NUMBER" or not float(tok.value).is_integer():
                raise self.error("int default must be an integer")
            self.advance()
            return int(float(tok.value))
        if ptype == "boolean":
            if tok.kind != "IDENT" or tok.value not in ("true", "false"):
                raise self.error("boolean default must be true or false")
            self.advance()
            return tok.value == "true"
        if ptype == "keyword":
            if tok.kind == "STRING" or tok.kind == "IDENT":
                self.advance()
                return tok.value
            raise self.error("keyword default must be a word or quoted string")
        # string
        if tok.kind != "STRING":
            raise self.error("string default must be quoted")
        self.advance()
        return tok.value

    def parse_schedule(self) -> tuple[ScheduleDecl, _Token]:
        self.expect_keyword("schedule")
        routine_tok = self.expect_ident("routine name")
        where = self.peek()
        bin_name: str | None = None
        group_name: str | None = None
        if self.at_keyword("at"):
            self.advance()
            tok = self.expect_ident("schedule bin")
            if tok.value not in SCHEDULE_BINS:
                raise self.error(
                    f"unknown schedule bin {tok.value!r} (expected one of {', '.join(SCHEDULE_BINS)})",
                    tok,
                )
            bin_name = tok.value
        elif self.at_keyword("in"):
            self.advance()
            group_name = self.expect_ident("schedule group name").value
        else:
            raise self.error("expected 'at <BIN>' or 'in <GroupName>'", where)

        before: list[str] = []
        after: list[str] = []
        while self.at_keyword("before") or self.at_keyword("after"):
            which = self.advance().value
            target = self.expect_ident("routine name").value
            (before if which == "before" else after).append(target)

        self.expect_punct("{")
        reads: list[str] = []
        writes: list[str] = []
        sync: list[str] = []
        while self.peek().kind == "IDENT" and self.peek().value in ("reads", "writes", "sync"):
            which = self.advance().value
            self.expect_punct(":")
            target = {"reads": reads, "writes": writes, "sync": sync}[which]
            target.append(self._group_ref())
            while self.peek().value == ",":
                self.advance()
                target.append(self._group_ref())
        self.expect_punct("}")
        description = self.expect_string("schedule description").value

        decl = ScheduleDecl(
            routine=routine_tok.value,
            bin=bin_name,
            group=group_name,
            before=tuple(before),
            after=tuple(after),
            reads=tuple(reads),
            writes=tuple(writes),
            sync=tuple(sync),
            description=description,
        )
        return decl, routine_tok

    def _group_ref(self) -> str:
        impl = self.expect_ident("implementation name")
        self.expect_punct("::")
        group = self.expect_ident("group name")
        return f"{impl.value}::{group.value}"


def parse_manifest(source_text: str) -> ThornManifest:
    """Parse one thorn manifest; raises CclError subclasses with line:column."""
    return _Parser(_lex(source_text)).parse_manifest()


# ---------------------------------------------------------------------------
# Canonical pretty-printer (round-trips through parse_manifest)


def _render_number(x: float) -> str:
    if float(x).is_integer() and abs(x) < 1e15:
        return f"{x:.1f}"
    return repr(float(x))


def _render_default(p: ParamDecl) -> str:
    if p.ptype == "real":
        return _render_number(float(p.default))  # type: ignore[arg-type]
    if p.ptype == "int":
        return str(int(p.default))  # type: ignore[arg-type]
    if p.ptype == "boolean":
        return "true" if p.default else "false"
    return f'"{p.default}"'


def print_manifest(m: ThornManifest) -> str:
    """Render a manifest in canonical grammar form."""
    out: list[str] = [f"thorn {m.thorn_name}", f"implements {m.implementation}"]
    if m.inherits:
        out.append("inherits " + ", ".join(m.inherits))
    for g in m.groups:
        attrs = [f"kind={g.kind}", f"timelevels={g.timelevels}", f"ghost={g.ghost}"]
        attrs.append("parity=" + ",".join(g.parity))
        out.append(f"group {g.name} " + " ".join(attrs))
        out.append("{ " + ", ".join(g.members) + " }")
    for p in m.params:
        out.append(f'param {p.ptype} {p.name} "{p.description}"')
        if isinstance(p.range, NumericRange) and p.ptype == "int":
            lo = "*" if p.range.lo is None else str(int(p.range.lo))
            hi = "*" if p.range.hi is None else str(int(p.range.hi))
            body = f"{lo}:{hi}"
        else:
            body = p.range.render() if p.range is not None else ""
        out.append(
            ("{ " + body + " }" if body else "{ }")
            + f" default {_render_default(p)} steerable={p.steerable}"
        )
    for s in m.schedule_items:
        loc = f"at {s.bin}" if s.bin is not None else f"in {s.group}"
        head = f"schedule {s.routine} {loc}"
        for b in s.before:
            head += f" before {b}"
        for a in s.after:
            head += f" after {a}"
        out.append(head)
        body_parts = []
        if s.reads:
            body_parts.append("reads: " + ", ".join(s.reads))
        if s.writes:
            body_parts.append("writes: " + ", ".join(s.writes))
        if s.sync:
            body_parts.append("sync: " + ", ".join(s.sync))
        body = " ".join(body_parts)
        out.append(("{ " + body + " }" if body else "{ }") + f' "{s.description}"')
    return "\n".join(out) + "\n"


# ---------------------------------------------------------------------------
# Run configuration


_ASSIGN_RE = re.compile(
    r"^(?P<impl>[A-Za-z][A-Za-z0-9_]*)::(?P<name>[A-Za-z][A-Za-z0-9_]*)\s*=\s*(?P<value>.+)$"
)
_ACTIVE_RE = re.compile(r'^ActiveThorns\s*=\s*"(?P<names>[^"]*)"\s*$')


def _strip_comment(line: str) -> str:
    out = []
    in_string = False
    for ch in line:
        if ch == '"':
            in_string = not in_string
        if ch == "#" and not in_string:
            break
        out.append(ch)
    return "".join(out)


def parse_run_config(source_text: str) -> RunConfig:
    """Parse a run config; assignment values are captured verbatim."""
    active: tuple[str, ...] | None = None
    assignments: list[tuple[str, str]] = []
    seen: set[str] = set()
    for lineno, raw in enumerate(source_text.splitlines(), start=1):
        line = _strip_comment(raw).strip()
        if not line:
            continue
        m = _ACTIVE_RE.match(line)
        if m:
            if active is not None:
                raise CclSyntaxError("ActiveThorns given twice", lineno, 1)
            names = m.group("names").split()
            for name in names:
                if not is_identifier(name):
                    raise CclSyntaxError(f"bad thorn name {name!r}", lineno, 1)
            active = tuple(names)
            continue
        m = _ASSIGN_RE.match(line)
        if m:
            full = f"{m.group('impl')}::{m.group('name')}"
            if full in seen:
                raise DuplicateAssignment(
                    f"parameter {full} assigned twice", lineno, raw.index(m.group("impl")) + 1
                )
            seen.add(full)
            assignments.append((full, m.group("value").strip()))
            continue
        raise CclSyntaxError(f"cannot parse line {line!r}", lineno, 1)
    return RunConfig(active_thorns=active or (), assignments=tuple(assignments))


def print_run_config(config: RunConfig) -> str:
    lines = ['ActiveThorns = "' + " ".join(config.active_thorns) + '"']
    lines += [f"{name} = {value}" for name, value in config.assignments]
    return "\n".join(lines) + "\n"


# ---------------------------------------------------------------------------
# Closure validation


@dataclass(frozen=True)
class ValidationIssue:
    kind: str  # missing_implementation | unknown_group_ref | unknown_parameter
    #          # | duplicate_implementation | missing_thorn
    message: str

    def __str__(self) -> str:
        return f"[{self.kind}] {self.message}"


@dataclass
class ValidationReport:
    issues: list[ValidationIssue] = field(default_factory=list)

    @property
    def ok(self) -> bool:
        return not self.issues

    def add(self, kind: str, message: str) -> None:
        self.issues.append(ValidationIssue(kind, message))

    def __str__(self) -> str:
        return "\n".join(str(issue) for issue in self.issues) if self.issues else "ok"


def validate_closure(manifests: list[ThornManifest], config: RunConfig) -> ValidationReport:
    """Cross-check active thorns, inheritance, group references, and assignments."""
    report = ValidationReport()
    by_thorn = {m.thorn_name: m for m in manifests}

    active: list[ThornManifest] = []
    for name in config.active_thorns:
        m = by_thorn.get(name)
        if m is None:
            report.add("missing_thorn", f"active thorn {name!r} has no manifest")
        else:
            active.append(m)

    impl_owner: dict[str, str] = {}
    for m in active:
        if m.implementation in impl_owner:
            report.add(
                "duplicate_implementation",
                f"thorns {impl_owner[m.implementation]!r} and {m.thorn_name!r} "
                f"both provide implementation {m.implementation!r}",
            )
        else:
            impl_owner[m.implementation] = m.thorn_name

    groups: set[str] = set()
    param_names: set[str] = set()
    for m in active:
        for g in m.groups:
            groups.add(f"{m.implementation}::{g.name}")
        for p in m.params:
            param_names.add(f"{m.implementation}::{p.name}")

    for m in active:
        for impl in m.inherits:
            if impl not in impl_owner:
                report.add(
                    "missing_implementation",
                    f"thorn {m.thorn_name!r} inherits {impl!r}, provided by no active thorn",
                )
        for s in m.schedule_items:
            for which, refs in (("reads", s.reads), ("writes", s.writes), ("sync", s.sync)):
                for ref in refs:
                    if ref not in groups:
                        report.add(
                            "unknown_group_ref",
                            f"{m.thorn_name}::{s.routine} {which} unknown group {ref!r}",
                        )

    for name, _value in config.assignments:
        impl = name.split("::", 1)[0]
        if impl in impl_owner and name not in param_names:
            report.add("unknown_parameter", f"assignment to unknown parameter {name!r}")
        elif impl not in impl_owner:
            report.add(
                "unknown_parameter",
                f"assignment {name!r} names implementation {impl!r} of no active thorn",
            )

    return report


__all__ = [
    "SCHEDULE_BINS",
    "PARAM_TYPES",
    "GroupDecl",
    "NumericRange",
    "KeywordRange",
    "ParamDecl",
    "ScheduleDecl",
    "ThornManifest",
    "RunConfig",
    "ValidationIssue",
    "ValidationReport",
    "parse_manifest",
    "print_manifest",
    "parse_run_config",
    "print_run_config",
    "validate_closure",
    "is_identifier",
]
