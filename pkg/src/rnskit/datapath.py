"""Cycle-stepped simulator of a reconfigurable residue datapath.

The machine has two forward converters feeding the IN1/IN2 latches, one
adder, one subtractor and one multiplier, each behind a pair of source
selects, and one output select feeding the reverse converter.  A
microprogram is an ordered list of steps; each step may inject binary
values, activate any subset of the units, and emit one latch.

Within a step: injections land first, then every active unit reads its
two selected latches as they stand after injection, then all unit results
latch simultaneously, then the emit select (if any) reverse-converts the
post-update latch.  Reading a latch that was never written is a fault,
not a silent zero.
"""

from __future__ import annotations

import re
from dataclasses import dataclass, field
from enum import Enum

from .rns import RnsContext, RnsNumber, from_rns, rns_add, rns_mul, rns_sub, to_rns

__all__ = [
    "Source",
    "Step",
    "Microprogram",
    "DatapathState",
    "RunFault",
    "UnboundPlaceholderError",
    "ProgramParseError",
    "step",
    "run",
    "builtin_function1",
    "builtin_function2",
    "parse_program",
    "render_program",
]

_IDENT = re.compile(r"[A-Za-z_][A-Za-z0-9_]*\Z")


class Source(Enum):
    """A latch that a unit input or the output select can read."""

    IN1 = "IN1"
    IN2 = "IN2"
    ADD = "ADD"
    SUB = "SUB"
    MUL = "MUL"
    NONE = "NONE"


class RunFault(RuntimeError):
    """A step read a latch that has never been written."""

    def __init__(self, step_index: int | None, source: Source):
        self.step_index = step_index
        self.source = source
        where = "?" if step_index is None else str(step_index)
        super().__init__(f"step {where}: read of undefined latch {source.value}")


class UnboundPlaceholderError(ValueError):
    """A program placeholder has no binding."""

    def __init__(self, name: str):
        self.name = name
        super().__init__(f"unbound placeholder ${name}")


class ProgramParseError(ValueError):
    """One or more line-numbered diagnostics from the program parser."""

    def __init__(self, diagnostics: list[tuple[int, str]]):
        self.diagnostics = list(diagnostics)
        super().__init__(
            "; ".join(f"line {n}: {msg}" for n, msg in self.diagnostics)
        )


def _check_injection(label: str, value) -> None:
    if value is None:
        return
    if isinstance(value, int):
        if value < 0:
            raise ValueError(f"{label} injection must be unsigned, got {value}")
    elif isinstance(value, str):
        if not _IDENT.match(value):
            raise ValueError(f"{label} placeholder {value!r} is not an identifier")
    else:
        raise ValueError(f"{label} injection must be an int or placeholder name")


@dataclass(frozen=True, slots=True)
class Step:
    """One microprogram step: injections, unit selects, and the emit select.

    inject_a / inject_b are unsigned integers, placeholder names bound at
    run time, or None.  A unit computes this step iff both of its selects
    are non-NONE; half-selected units are rejected at construction.
    """

    inject_a: int | str | None = None
    inject_b: int | str | None = None
    add_l: Source = Source.NONE
    add_r: Source = Source.NONE
    sub_l: Source = Source.NONE
    sub_r: Source = Source.NONE
    mul_l: Source = Source.NONE
    mul_r: Source = Source.NONE
    emit: Source = Source.NONE

    def __post_init__(self) -> None:
        _check_injection("a", self.inject_a)
        _check_injection("b", self.inject_b)
        for name, l, r in (
            ("add", self.add_l, self.add_r),
            ("sub", self.sub_l, self.sub_r),
            ("mul", self.mul_l, self.mul_r),
        ):
            if (l is Source.NONE) != (r is Source.NONE):
                raise ValueError(f"{name} selects must both be set or both NONE")

    def placeholders(self) -> set[str]:
        names = set()
        for value in (self.inject_a, self.inject_b):
            if isinstance(value, str):
                names.add(value)
        return names


@dataclass(frozen=True, slots=True)
class Microprogram:
    """Named, ordered list of steps, executed once each in order."""

    name: str
    steps: tuple[Step, ...]

    def __post_init__(self) -> None:
        if not self.name or any(ch.isspace() for ch in self.name):
            raise ValueError(f"program name must be a non-empty token, got {self.name!r}")
        object.__setattr__(self, "steps", tuple(self.steps))

    def placeholders(self) -> set[str]:
        names = set()
        for s in self.steps:
            names |= s.placeholders()
        return names


@dataclass(slots=True)
class DatapathState:
    """Latches of the five sources plus the emitted-output list.

    Owned by a single run; latches start undefined and, once written,
    always hold a residue vector valid for the run's context.
    """

    latches: dict[Source, RnsNumber] = field(default_factory=dict)
    outputs: list[int] = field(default_factory=list)


def step(ctx: RnsContext, state: DatapathState, s: Step, index: int | None = None) -> DatapathState:
    """Execute one step in place and return the state.

    Order inside the step: injections overwrite IN1/IN2, active units read
    the post-injection latches, all unit results latch at once, and the
    emit select (post-update) appends one reverse-converted output.
    """
    for value, latch in ((s.inject_a, Source.IN1), (s.inject_b, Source.IN2)):
        if value is None:
            continue
        if isinstance(value, str):
            raise UnboundPlaceholderError(value)
        state.latches[latch] = to_rns(ctx, value)

    reads = dict(state.latches)

    def fetch(src: Source) -> RnsNumber:
        try:
            return reads[src]
        except KeyError:
            raise RunFault(index, src) from None

    updates: dict[Source, RnsNumber] = {}
    if s.add_l is not Source.NONE:
        updates[Source.ADD] = rns_add(ctx, fetch(s.add_l), fetch(s.add_r))
    if s.sub_l is not Source.NONE:
        updates[Source.SUB] = rns_sub(ctx, fetch(s.sub_l), fetch(s.sub_r))
    if s.mul_l is not Source.NONE:
        updates[Source.MUL] = rns_mul(ctx, fetch(s.mul_l), fetch(s.mul_r))
    state.latches.update(updates)

    if s.emit is not Source.NONE:
        latched = state.latches.get(s.emit)
        if latched is None:
            raise RunFault(index, s.emit)
        state.outputs.append(from_rns(ctx, latched))
    return state


def _resolve(s: Step, bindings: dict[str, int]) -> Step:
    def value_of(v):
        if isinstance(v, str):
            if v not in bindings:
                raise UnboundPlaceholderError(v)
            return bindings[v]
        return v

    if not s.placeholders():
        return s
    return Step(
        inject_a=value_of(s.inject_a),
        inject_b=value_of(s.inject_b),
        add_l=s.add_l, add_r=s.add_r,
        sub_l=s.sub_l, sub_r=s.sub_r,
        mul_l=s.mul_l, mul_r=s.mul_r,
        emit=s.emit,
    )


def run(
    ctx: RnsContext, prog: Microprogram, bindings: dict[str, int] | None = None
) -> tuple[list[int], list[dict[Source, RnsNumber]]]:
    """Run a program and return (outputs, per-step latch snapshots).

    All placeholders must be bound before the first step executes; a read
    of an undefined latch raises RunFault carrying the step index.
    """
    bindings = bindings or {}
    resolved = [_resolve(s, bindings) for s in prog.steps]
    state = DatapathState()
    trace: list[dict[Source, RnsNumber]] = []
    for i, s in enumerate(resolved):
        step(ctx, state, s, index=i)
        trace.append(dict(state.latches))
    return list(state.outputs), trace


# --- Built-in programs -------------------------------------------------------


def builtin_function1() -> Microprogram:
    """(X + Y) * Z: add the first two inputs, scale by the third, emit.

    Step 1 injects X and Y and routes both input latches to the adder;
    step 2 reuses the second converter for Z and routes the adder latch
    and Z to the multiplier; step 3 emits the multiplier latch.
    """
    return Microprogram(
        name="function1",
        steps=(
            Step(inject_a="X", inject_b="Y", add_l=Source.IN1, add_r=Source.IN2),
            Step(inject_b="Z", mul_l=Source.ADD, mul_r=Source.IN2),
            Step(emit=Source.MUL),
        ),
    )


def builtin_function2(e: int) -> Microprogram:
    """X ** e by repeated multiplication, unrolled at build time.

    e == 0 emits an injected constant 1 and e == 1 emits X directly;
    otherwise X is injected into both converters and e - 1 multiply steps
    accumulate into the multiplier latch before the emit.
    """
    if e < 0:
        raise ValueError(f"exponent must be >= 0, got {e}")
    if e == 0:
        steps: tuple[Step, ...] = (Step(inject_a=1, emit=Source.IN1),)
    elif e == 1:
        steps = (Step(inject_a="X", emit=Source.IN1),)
    else:
        body = [Step(inject_a="X", inject_b="X")]
        body.append(Step(mul_l=Source.IN1, mul_r=Source.IN2))
        for _ in range(e - 2):
            body.append(Step(mul_l=Source.MUL, mul_r=Source.IN1))
        body.append(Step(emit=Source.MUL))
        steps = tuple(body)
    return Microprogram(name="function2", steps=steps)


# --- Program text format -----------------------------------------------------
#
#   PROG <name>
#   STEP [a=<dec|$id>] [b=<dec|$id>] [add=<src>,<src>] [sub=<src>,<src>]
#        [mul=<src>,<src>] [emit=<src>]
#   END
#
# <src> is one of IN1, IN2, ADD, SUB, MUL; omitted unit fields mean the
# unit is idle.  Lines starting with '#' are comments.

_SOURCE_TOKENS = {s.value: s for s in Source if s is not Source.NONE}
_STEP_KEYS = ("a", "b", "add", "sub", "mul", "emit")


def _parse_value(text: str):
    if text.startswith("$"):
        name = text[1:]
        if not _IDENT.match(name):
            raise ValueError(f"bad placeholder {text!r}")
        return name
    if not text.isdigit():
        raise ValueError(f"bad unsigned decimal {text!r}")
    return int(text)


def _parse_source(text: str) -> Source:
    try:
        return _SOURCE_TOKENS[text]
    except KeyError:
        raise ValueError(f"unknown source token {text!r}") from None


def _parse_step_line(body: str) -> Step:
    fields: dict[str, str] = {}
    for token in body.split():
        key, sep, value = token.partition("=")
        if not sep or key not in _STEP_KEYS:
            raise ValueError(f"malformed field {token!r}")
        if key in fields:
            raise ValueError(f"duplicate field {key!r}")
        fields[key] = value
    kwargs: dict = {}
    for key in ("a", "b"):
        if key in fields:
            kwargs[f"inject_{key}"] = _parse_value(fields[key])
    for key in ("add", "sub", "mul"):
        if key in fields:
            parts = fields[key].split(",")
            if len(parts) != 2:
                raise ValueError(f"field {key!r} needs exactly two sources")
            kwargs[f"{key}_l"] = _parse_source(parts[0])
            kwargs[f"{key}_r"] = _parse_source(parts[1])
    if "emit" in fields:
        kwargs["emit"] = _parse_source(fields["emit"])
    return Step(**kwargs)


def parse_program(text: str) -> Microprogram:
    """Parse program text, collecting line-numbered diagnostics on failure."""
    diagnostics: list[tuple[int, str]] = []
    lines = []
    for number, raw in enumerate(text.splitlines(), start=1):
        stripped = raw.strip()
        if not stripped or stripped.startswith("#"):
            continue
        lines.append((number, stripped))

    if not lines:
        raise ProgramParseError([(1, "empty program: missing PROG header")])

    name = None
    number, header = lines[0]
    parts = header.split()
    if len(parts) == 2 and parts[0] == "PROG":
        name = parts[1]
    else:
        diagnostics.append((number, "expected 'PROG <name>' header"))

    last_number, footer = lines[-1]
    has_end = footer == "END" and len(lines) > 1
    if not has_end:
        diagnostics.append((last_number, "missing END terminator"))

    steps = []
    body = lines[1:-1] if has_end else lines[1:]
    for number, line in body:
        keyword, _, rest = line.partition(" ")
        if keyword != "STEP":
            diagnostics.append((number, f"expected STEP line, got {line.split()[0]!r}"))
            continue
        try:
            steps.append(_parse_step_line(rest))
        except ValueError as exc:
            diagnostics.append((number, str(exc)))

    if diagnostics:
        diagnostics.sort(key=lambda d: d[0])
        raise ProgramParseError(diagnostics)
    return Microprogram(name=name, steps=tuple(steps))


def _render_value(value) -> str:
    return f"${value}" if isinstance(value, str) else str(value)


def render_program(prog: Microprogram) -> str:
    """Render a program to the text format; parse(render(p)) == p."""
    lines = [f"PROG {prog.name}"]
    for s in prog.steps:
        parts = ["STEP"]
        if s.inject_a is not None:
            parts.append(f"a={_render_value(s.inject_a)}")
        if s.inject_b is not None:
            parts.append(f"b={_render_value(s.inject_b)}")
        for key, l, r in (
            ("add", s.add_l, s.add_r),
            ("sub", s.sub_l, s.sub_r),
            ("mul", s.mul_l, s.mul_r),
        ):
            if l is not Source.NONE:
                parts.append(f"{key}={l.value},{r.value}")
        if s.emit is not Source.NONE:
            parts.append(f"emit={s.emit.value}")
        lines.append(" ".join(parts))
    lines.append("END")
    return "\n".join(lines) + "\n"
