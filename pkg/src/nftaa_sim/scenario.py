"""Scenario script parsing.

Scripts are plain text, one step per line, `#` starts a comment. Labels are
declared before use (`actor`, `mintnftaa`, `minttoken`, `createtba` declare;
everything else references), and referencing an undeclared label is a parse
error rather than a runtime one. `begin`/`commit` group the enclosed steps
into a single atomic transaction; `expect_error CODE` qualifies the step it
immediately follows.

Amounts are plain integers in the smallest denomination, with `<n>eth`
accepted as sugar for n * 10^18.
"""

from __future__ import annotations

import re
from dataclasses import dataclass, field

ETH = 10**18

# step kinds that build one ledger operation and may appear in begin/commit groups
TRANSACTIONAL = frozenset({
    "mintnftaa", "minttoken", "transfernftaa", "transfertoken", "proxy", "tbacall",
    "stake", "addstake", "unstake", "withdraw", "upgrade", "createtba",
    "fail", "interrupt",
})
# step kinds that change state and may carry an expectation
EXECUTABLE = TRANSACTIONAL | frozenset({"actor", "faucet", "advance", "commit", "probe"})
ASSERTS = frozenset({
    "assert_digest", "assert_event", "assert_note", "assert_bound",
    "assert_account", "assert_balance", "assert_stake", "assert_staker",
})
CONTROL = frozenset({"begin", "expect_error", "expect_tba", "set", "queue_report"})
ALL_KINDS = EXECUTABLE | ASSERTS | CONTROL

PROXY_FORMS = {
    "noop": 0,
    "request_unstake": 0,
    "stake": 1,           # amount
    "add_to_stake": 1,    # amount
    "transfer_value": 2,  # to, amount
}

CONFIG_KEYS = frozenset({
    "seed", "unlock_delay", "missed_prob", "per_block_cap", "blocks_per_day",
    "min_stake",
})

_TOKEN = re.compile(r'"([^"]*)"|(\S+)')
_DIGEST = re.compile(r"^[0-9a-f]{64}$")
_AMOUNT = re.compile(r"^(\d+)(eth)?$")


class ScenarioParseError(Exception):
    def __init__(self, line: int, column: int, message: str, code: str = "ParseError"):
        self.line = line
        self.column = column
        self.message = message
        self.code = code
        super().__init__(f"line {line}, col {column}: {message}")


@dataclass(frozen=True)
class Step:
    kind: str
    args: tuple[str, ...]
    line: int = field(compare=False, default=0)


@dataclass(frozen=True)
class ScenarioScript:
    config: tuple[tuple[str, str], ...] = ()
    steps: tuple[Step, ...] = ()

    def config_dict(self) -> dict[str, str]:
        return dict(self.config)


def parse_amount(token: str) -> int:
    match = _AMOUNT.match(token)
    if match is None:
        raise ValueError(f"bad amount {token!r}")
    value = int(match.group(1))
    return value * ETH if match.group(2) else value


@dataclass
class _Token:
    value: str
    column: int
    quoted: bool


def _tokenize(line: str) -> list[_Token]:
    tokens = []
    for match in _TOKEN.finditer(line):
        quoted = match.group(1) is not None
        value = match.group(1) if quoted else match.group(2)
        if not quoted and value.startswith("#"):
            break
        tokens.append(_Token(value, match.start() + 1, quoted))
    return tokens


class _Parser:
    """Single pass over the lines, tracking label declarations as it goes."""

    def __init__(self):
        self.labels: dict[str, str] = {}  # name -> actor | account | token
        self.config: list[tuple[str, str]] = []
        self.steps: list[Step] = []
        self.in_group = False
        self.group_open_line = 0

    def fail(self, token: _Token, message: str, code: str = "ParseError"):
        raise ScenarioParseError(self.line_no, token.column, message, code)

    def parse(self, text: str) -> ScenarioScript:
        for self.line_no, raw in enumerate(text.splitlines(), start=1):
            tokens = _tokenize(raw)
            if tokens:
                self.step(tokens)
        if self.in_group:
            raise ScenarioParseError(self.group_open_line, 1,
                                     "begin without matching commit")
        return ScenarioScript(tuple(self.config), tuple(self.steps))

    # -- helpers ---------------------------------------------------------

    def args(self, tokens: list[_Token], low: int, high: int | None = None) -> list[_Token]:
        high = low if high is None else high
        given = len(tokens) - 1
        if given < low or given > high:
            expected = str(low) if low == high else f"{low}..{high}"
            self.fail(tokens[0], f"{tokens[0].value} takes {expected} argument(s), got {given}")
        return tokens[1:]

    def declare(self, token: _Token, label_type: str) -> str:
        if token.value in self.labels:
            self.fail(token, f"label {token.value!r} already declared")
        if not re.fullmatch(r"[A-Za-z_][A-Za-z0-9_-]*", token.value):
            self.fail(token, f"bad label {token.value!r}")
        self.labels[token.value] = label_type
        return token.value

    def ref(self, token: _Token, *types: str) -> str:
        declared = self.labels.get(token.value)
        if declared is None:
            self.fail(token, f"label {token.value!r} not declared", code="UnknownLabel")
        if types and declared not in types:
            self.fail(token, f"label {token.value!r} is {declared}, "
                             f"expected {' or '.join(types)}")
        return token.value

    def amount(self, token: _Token) -> str:
        if _AMOUNT.match(token.value) is None:
            self.fail(token, f"bad amount {token.value!r}")
        return token.value

    def integer(self, token: _Token) -> str:
        if not token.value.isdigit():
            self.fail(token, f"expected integer, got {token.value!r}")
        return token.value

    def emit(self, kind: str, *args: str):
        self.steps.append(Step(kind, tuple(args), self.line_no))

    # -- per-kind handling ----------------------------------------------

    def step(self, tokens: list[_Token]):
        head = tokens[0]
        kind = head.value
        if kind not in ALL_KINDS:
            self.fail(head, f"unknown step {kind!r}", code="UnknownStepKind")
        if self.in_group and kind not in TRANSACTIONAL and kind != "commit":
            self.fail(head, f"{kind} cannot appear inside a transaction group")

        if kind == "set":
            if self.steps:
                self.fail(head, "set must appear before any step")
            key, value = self.args(tokens, 2)
            if key.value not in CONFIG_KEYS:
                self.fail(key, f"unknown config key {key.value!r}")
            self.config.append((key.value, value.value))
            return

        if kind == "actor":
            (label,) = self.args(tokens, 1)
            self.emit(kind, self.declare(label, "actor"))
        elif kind == "faucet":
            to, amount = self.args(tokens, 2)
            self.emit(kind, self.ref(to), self.amount(amount))
        elif kind == "mintnftaa":
            actor, label, note = self.args(tokens, 3)
            if not note.quoted:
                self.fail(note, "note must be quoted")
            self.emit(kind, self.ref(actor, "actor"),
                      self.declare(label, "account"), note.value)
        elif kind == "minttoken":
            actor, label, note = self.args(tokens, 3)
            if not note.quoted:
                self.fail(note, "note must be quoted")
            self.emit(kind, self.ref(actor, "actor"),
                      self.declare(label, "token"), note.value)
        elif kind in ("transfernftaa", "transfertoken"):
            actor, what, to = self.args(tokens, 3)
            target_type = ("account",) if kind == "transfernftaa" else ("token",)
            self.emit(kind, self.ref(actor, "actor"), self.ref(what, *target_type),
                      self.ref(to))
        elif kind in ("proxy", "tbacall"):
            parsed = self.args(tokens, 3, 5)
            actor, account, method = parsed[0], parsed[1], parsed[2]
            if method.value not in PROXY_FORMS:
                self.fail(method, f"unknown proxy method {method.value!r}")
            extra = parsed[3:]
            want = PROXY_FORMS[method.value]
            if len(extra) != want:
                self.fail(method, f"{method.value} takes {want} argument(s), got {len(extra)}")
            rendered = [self.ref(actor, "actor"), self.ref(account, "account"),
                        method.value]
            if method.value == "transfer_value":
                rendered.append(self.ref(extra[0]))
                rendered.append(self.amount(extra[1]))
            elif want == 1:
                rendered.append(self.amount(extra[0]))
            self.emit(kind, *rendered)
        elif kind in ("stake", "addstake"):
            actor, account, amount = self.args(tokens, 3)
            self.emit(kind, self.ref(actor, "actor"), self.ref(account, "account"),
                      self.amount(amount))
        elif kind == "unstake":
            actor, account = self.args(tokens, 2)
            self.emit(kind, self.ref(actor, "actor"), self.ref(account, "account"))
        elif kind == "withdraw":
            actor, account, to, amount = self.args(tokens, 4)
            self.emit(kind, self.ref(actor, "actor"), self.ref(account, "account"),
                      self.ref(to), self.amount(amount))
        elif kind == "upgrade":
            actor, account, version = self.args(tokens, 3)
            self.emit(kind, self.ref(actor, "actor"), self.ref(account, "account"),
                      self.integer(version))
        elif kind == "createtba":
            parsed = self.args(tokens, 4, 5)
            actor, token, salt, label = parsed[0], parsed[1], parsed[2], parsed[3]
            flags = [t.value for t in parsed[4:]]
            if flags and flags[0] != "noexec":
                self.fail(parsed[4], f"unknown flag {flags[0]!r}")
            self.emit(kind, self.ref(actor, "actor"), self.ref(token, "token"),
                      self.integer(salt), self.declare(label, "account"), *flags)
        elif kind == "advance":
            (count,) = self.args(tokens, 1)
            self.emit(kind, self.integer(count))
        elif kind == "begin":
            self.args(tokens, 0)
            if self.in_group:
                self.fail(head, "nested begin")
            self.in_group = True
            self.group_open_line = self.line_no
            self.emit(kind)
        elif kind == "commit":
            self.args(tokens, 0)
            if not self.in_group:
                self.fail(head, "commit without begin")
            self.in_group = False
            self.emit(kind)
        elif kind in ("fail", "interrupt"):
            self.args(tokens, 0)
            self.emit(kind)
        elif kind in ("expect_error", "expect_tba"):
            (code,) = self.args(tokens, 1)
            if self.in_group:
                self.fail(head, f"{kind} cannot appear inside a transaction group")
            other = "expect_tba" if kind == "expect_error" else "expect_error"
            recent = [s.kind for s in self.steps[-2:]]
            qualifies = (recent[-1:] == [other] and recent[:1] and recent[0] in EXECUTABLE) \
                or (recent[-1:] and recent[-1] in EXECUTABLE)
            if not qualifies:
                self.fail(head, f"{kind} must immediately follow an executable step")
            self.emit(kind, code.value)
        elif kind == "assert_digest":
            (digest,) = self.args(tokens, 1)
            if _DIGEST.match(digest.value) is None:
                self.fail(digest, "expected 64 lowercase hex chars")
            self.emit(kind, digest.value)
        elif kind == "assert_event":
            parsed = self.args(tokens, 1, 9)
            for kv in parsed[1:]:
                if "=" not in kv.value:
                    self.fail(kv, "expected key=value")
                value = kv.value.split("=", 1)[1]
                if value.startswith("@"):
                    self.ref(_Token(value[1:], kv.column, False))
            self.emit(kind, *[t.value for t in parsed])
        elif kind == "assert_note":
            target, note = self.args(tokens, 2)
            if not note.quoted:
                self.fail(note, "note must be quoted")
            self.emit(kind, self.ref(target, "account", "token"), note.value)
        elif kind == "assert_bound":
            account, token_id = self.args(tokens, 2)
            self.emit(kind, self.ref(account, "account"), self.integer(token_id))
        elif kind == "assert_account":
            target, expected = self.args(tokens, 2)
            self.emit(kind, self.ref(target, "account", "token"),
                      expected.value if expected.value == "none" else self.ref(expected, "account"))
        elif kind == "assert_balance":
            target, amount = self.args(tokens, 2)
            self.emit(kind, self.ref(target), self.amount(amount))
        elif kind == "assert_stake":
            account, amount = self.args(tokens, 2)
            self.emit(kind, self.ref(account, "account"), self.amount(amount))
        elif kind == "assert_staker":
            account, expected = self.args(tokens, 2)
            self.emit(kind, self.ref(account, "account"),
                      expected.value if expected.value == "none" else self.ref(expected, "account"))
        elif kind == "probe":
            parsed = self.args(tokens, 1, 3)
            what = parsed[0].value
            if what == "binding":
                if len(parsed) != 2:
                    self.fail(parsed[0], "probe binding takes a label")
                self.emit(kind, what, self.ref(parsed[1], "account", "token"))
            elif what == "tba_address":
                if len(parsed) != 3:
                    self.fail(parsed[0], "probe tba_address takes token and salt")
                self.emit(kind, what, self.ref(parsed[1], "token"),
                          self.integer(parsed[2]))
            elif what in ("locked", "counts"):
                if len(parsed) != 1:
                    self.fail(parsed[0], f"probe {what} takes no arguments")
                self.emit(kind, what)
            else:
                self.fail(parsed[0], f"unknown probe {what!r}")
        elif kind == "queue_report":
            pending, mode = self.args(tokens, 2)
            if mode.value not in ("closed", "simulate"):
                self.fail(mode, "mode must be closed or simulate")
            self.emit(kind, self.integer(pending), mode.value)
        else:  # pragma: no cover - ALL_KINDS is exhaustive above
            self.fail(head, f"unhandled step {kind!r}")


def parse_scenario(text: str) -> ScenarioScript:
    return _Parser().parse(text)


# quoted argument positions, for serialization
_QUOTED_ARG = {"mintnftaa": 2, "minttoken": 2, "assert_note": 1}


def serialize_scenario(script: ScenarioScript) -> str:
    lines = [f"set {key} {value}" for key, value in script.config]
    for step in script.steps:
        parts = [step.kind]
        for position, arg in enumerate(step.args):
            if _QUOTED_ARG.get(step.kind) == position:
                parts.append(f'"{arg}"')
            else:
                parts.append(arg)
        lines.append(" ".join(parts))
    return "\n".join(lines) + ("\n" if lines else "")
