"""Line-oriented text formats.

Model file (``.evt``)::

    # comment
    events x y
    00 0 0.25
    01 1 0.25
    10 2 0.25
    11 3 0.25

Each data row is ``<bitstring> <value> <pstar>``. The leftmost bit is the
first listed event, so ``01`` above is ``{y}``. All ``2**n`` rows must be
present exactly once, in any order.

Distribution file: same header, optional ``# alpha=.. logZ=.. H=..``
comment, then ``<bitstring> <prob>`` rows. Batch file: one bitstring per
line.

Numbers are written with 17 significant digits, which round-trips every
double exactly.
"""

from __future__ import annotations

import math
import re
from dataclasses import dataclass, field

import numpy as np

from .errors import InvalidEventSet, ParseError
from .powerset import (
    MAX_EVENTS,
    RESCALE_TOL,
    EventSet,
    PowersetDistribution,
    ValueFunction,
    validate_distribution,
)
from .sampling import SampleBatch

_NUMBER = re.compile(r"[+-]?(?:\d+\.?\d*|\.\d+)(?:[eE][+-]?\d+)?\Z")
_FIELD = re.compile(r"\S+")
_META = re.compile(r"([A-Za-z_]\w*)=(\S+)")


def fmt(x: float) -> str:
    return "%.17g" % x


@dataclass(frozen=True, eq=False)
class Model:
    eventset: EventSet
    value: ValueFunction
    base: PowersetDistribution


@dataclass(frozen=True, eq=False)
class DistFile:
    distribution: PowersetDistribution
    metadata: dict = field(default_factory=dict)


def _fields(line):
    return [(m.group(), m.start() + 1) for m in _FIELD.finditer(line)]


def _content_lines(text):
    """Yield ``(lineno, line)`` for non-blank, non-comment lines."""
    for lineno, line in enumerate(text.splitlines(), start=1):
        stripped = line.strip()
        if not stripped or stripped.startswith("#"):
            continue
        yield lineno, line


def _number(tok, col, lineno, what):
    if not _NUMBER.match(tok):
        raise ParseError("BadNumber", f"{what} {tok!r} is not a decimal number", lineno, col)
    x = float(tok)
    if not math.isfinite(x):
        raise ParseError("BadNumber", f"{what} {tok!r} overflows", lineno, col)
    return x


def _parse_header(lines):
    try:
        lineno, line = next(lines)
    except StopIteration:
        raise ParseError("MissingHeader", "no 'events' line", 1, 1) from None
    toks = _fields(line)
    if toks[0][0] != "events":
        raise ParseError("MissingHeader", f"expected 'events', got {toks[0][0]!r}",
                         lineno, toks[0][1])
    names = [t for t, _ in toks[1:]]
    if not names:
        raise ParseError("BadHeader", "no event names", lineno, len(line) + 1)
    if len(names) > MAX_EVENTS:
        raise ParseError("TooManyEvents", f"{len(names)} events, at most {MAX_EVENTS}",
                         lineno, toks[MAX_EVENTS + 1][1])
    try:
        return lineno, EventSet(tuple(names))
    except InvalidEventSet as exc:
        raise ParseError("BadHeader", str(exc), lineno, toks[1][1]) from None


def _parse_rows(lines, eventset, ncols, what):
    """Collect ``{mask: [numbers]}`` from the data rows, checking coverage."""
    rows = {}
    last = 0
    for lineno, line in lines:
        last = lineno
        toks = _fields(line)
        if len(toks) != ncols + 1:
            raise ParseError("BadRow", f"expected {ncols + 1} fields, got {len(toks)}",
                             lineno, toks[0][1])
        bits, col = toks[0]
        if len(bits) != eventset.n or set(bits) - {"0", "1"}:
            raise ParseError("BadBitstring",
                             f"{bits!r} is not a {eventset.n}-character 0/1 string",
                             lineno, col)
        mask = eventset.parse_bitstring(bits)
        if mask in rows:
            raise ParseError("DuplicateMask",
                             f"{bits} already given on line {rows[mask][0]}", lineno, col)
        nums = [_number(t, c, lineno, w) for (t, c), w in zip(toks[1:], what)]
        rows[mask] = (lineno, nums, [c for _, c in toks[1:]])
    if len(rows) != eventset.size:
        missing = next(m for m in range(eventset.size) if m not in rows)
        raise ParseError("MissingMask",
                         f"{len(rows)} of {eventset.size} rows; first missing is "
                         f"{eventset.bitstring(missing)}", last + 1, 1)
    return rows, last


def _check_probs(rows, eventset, col_index, last):
    probs = np.empty(eventset.size)
    for mask, (lineno, nums, cols) in rows.items():
        x = nums[col_index]
        if x < 0:
            raise ParseError("NegativeProbability", f"probability {x!r} < 0",
                             lineno, cols[col_index])
        probs[mask] = x
    total = math.fsum(probs)
    if abs(total - 1.0) > RESCALE_TOL:
        raise ParseError("NotNormalized", f"probabilities sum to {total!r}", last, 1)
    return validate_distribution(probs, eventset)


def parse_model(text: str) -> Model:
    lines = _content_lines(text)
    _, es = _parse_header(lines)
    rows, last = _parse_rows(lines, es, 2, ("value", "probability"))
    values = np.empty(es.size)
    for mask, (lineno, nums, cols) in rows.items():
        if nums[0] < 0:
            raise ParseError("NegativeValue", f"value {nums[0]!r} < 0", lineno, cols[0])
        values[mask] = nums[0]
    base = _check_probs(rows, es, 1, last)
    return Model(es, ValueFunction(es, values), base)


def emit_model(model: Model) -> str:
    es = model.eventset
    out = ["events " + " ".join(es.names)]
    for mask in range(es.size):
        out.append(f"{es.bitstring(mask)} {fmt(model.value.values[mask])} "
                   f"{fmt(model.base.probs[mask])}")
    return "\n".join(out) + "\n"


def parse_dist(text: str) -> DistFile:
    meta = {}
    for line in text.splitlines():
        s = line.strip()
        if s.startswith("#"):
            for key, val in _META.findall(s):
                try:
                    meta[key] = float(val)
                except ValueError:
                    meta[key] = val
    lines = _content_lines(text)
    _, es = _parse_header(lines)
    rows, last = _parse_rows(lines, es, 1, ("probability",))
    return DistFile(_check_probs(rows, es, 0, last), meta)


def emit_dist(p: PowersetDistribution, metadata: dict | None = None) -> str:
    es = p.eventset
    out = ["events " + " ".join(es.names)]
    if metadata:
        out.append("# " + " ".join(
            f"{k}={fmt(v) if isinstance(v, float) else v}" for k, v in metadata.items()))
    for mask in range(es.size):
        out.append(f"{es.bitstring(mask)} {fmt(p.probs[mask])}")
    return "\n".join(out) + "\n"


def emit_batch(batch: SampleBatch) -> str:
    es = batch.eventset
    return "".join(es.bitstring(int(m)) + "\n" for m in batch.draws)


def parse_batch(text: str, eventset: EventSet) -> SampleBatch:
    draws = []
    for lineno, line in _content_lines(text):
        toks = _fields(line)
        bits, col = toks[0]
        if len(toks) != 1 or len(bits) != eventset.n or set(bits) - {"0", "1"}:
            raise ParseError("BadBitstring", f"{line.strip()!r} is not one bitstring",
                             lineno, col)
        draws.append(eventset.parse_bitstring(bits))
    return SampleBatch(eventset, np.array(draws, dtype=np.int64))
