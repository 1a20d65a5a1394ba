"""Parsing and cleaning of raw two-finger touch event logs.

A log is plain text, one event per line, eight whitespace- or tab-delimited
fields. The default (headerless) column order is::

    timestamp x y button_touch width_major orientation pressure finger

A header row, when present, overrides that order.
"""

from __future__ import annotations

import csv
import enum
import io
import logging
import math
import random
import re
from dataclasses import dataclass, field
from pathlib import Path
from typing import Iterable, Sequence, TypeVar

from .errors import ConfigError, IngestError

logger = logging.getLogger(__name__)

T = TypeVar("T")

FIELDS: tuple[str, ...] = (
    "timestamp",
    "x",
    "y",
    "button_touch",
    "width_major",
    "orientation",
    "pressure",
    "finger",
)
DEFAULT_FIELD_ORDER = FIELDS

BUTTON_STATES = frozenset({"DOWN", "HELD", "UP"})
NULL_TOKENS = frozenset({"", "null", "none", "nan", "na", "n/a", "-"})

# one finger stream needs 3 warm-up events plus a full 10-event gesture
MIN_STREAM_EVENTS = 14

_HEADER_ALIASES = {
    "timestamp": "timestamp",
    "time": "timestamp",
    "t": "timestamp",
    "x": "x",
    "y": "y",
    "buttontouch": "button_touch",
    "button": "button_touch",
    "touch": "button_touch",
    "action": "button_touch",
    "widthmajor": "width_major",
    "width": "width_major",
    "orientation": "orientation",
    "pressure": "pressure",
    "finger": "finger",
    "fingerid": "finger",
}


class Game(str, enum.Enum):
    PUBG = "PUBG"
    DIEPIO = "DIEPIO"
    SLITHER = "SLITHER"
    MINECRAFT = "MINECRAFT"

    @classmethod
    def parse(cls, text: str) -> "Game":
        key = re.sub(r"[^A-Za-z]", "", text).upper()
        try:
            return cls(key)
        except ValueError:
            raise ConfigError(f"unknown game tag {text!r}") from None


@dataclass(frozen=True, slots=True)
class TouchEvent:
    timestamp: float
    x: float
    y: float
    button_touch: str
    width_major: float
    orientation: float
    pressure: float
    finger: int


@dataclass(frozen=True, slots=True)
class Diagnostic:
    line: int
    reason: str
    severity: str = "error"


@dataclass(frozen=True)
class FingerStream:
    finger: int
    events: tuple[TouchEvent, ...]

    def __len__(self) -> int:
        return len(self.events)


@dataclass(frozen=True)
class UserLog:
    user_id: str
    game: Game
    streams: tuple[FingerStream, ...]

    def __post_init__(self):
        if not self.user_id:
            raise ConfigError("user_id must be non-empty")
        fingers = [s.finger for s in self.streams]
        if len(set(fingers)) != len(fingers):
            raise ConfigError("at most one stream per finger id")


@dataclass
class CleanResult:
    streams: tuple[FingerStream, ...]
    dropped: int
    warnings: list[str] = field(default_factory=list)

    def stream(self, finger: int) -> FingerStream:
        for s in self.streams:
            if s.finger == finger:
                return s
        return FingerStream(finger, ())


@dataclass
class ParseResult:
    events: list[TouchEvent]
    diagnostics: list[Diagnostic]
    field_order: tuple[str, ...]


def _normalize_column(name: str) -> str:
    return re.sub(r"[^a-z0-9]", "", name.lower())


def _is_number(token: str) -> bool:
    try:
        float(token)
    except ValueError:
        return False
    return True


def parse_header(line: str) -> tuple[str, ...]:
    """Map a header row to canonical field names.

    Multi-word names such as ``Button Touch`` are allowed in
    space-delimited headers; adjacent tokens are joined greedily.
    """
    if "\t" in line:
        tokens = [tok.strip() for tok in line.strip("\r\n").split("\t")]
    else:
        tokens = line.split()
    names: list[str] = []
    i = 0
    while i < len(tokens):
        pair = _normalize_column(tokens[i] + (tokens[i + 1] if i + 1 < len(tokens) else ""))
        if i + 1 < len(tokens) and pair in _HEADER_ALIASES and pair in ("buttontouch", "widthmajor", "fingerid"):
            names.append(_HEADER_ALIASES[pair])
            i += 2
            continue
        key = _normalize_column(tokens[i])
        if key not in _HEADER_ALIASES:
            raise ConfigError(f"unknown header column {tokens[i]!r}")
        names.append(_HEADER_ALIASES[key])
        i += 1
    return validate_field_order(names)


def validate_field_order(order: Sequence[str]) -> tuple[str, ...]:
    order = tuple(order)
    unknown = [name for name in order if name not in FIELDS]
    if unknown:
        raise ConfigError(f"unknown column(s) {unknown}")
    if sorted(order) != sorted(FIELDS):
        raise ConfigError(f"column order must name each of {FIELDS} exactly once, got {order}")
    return order


def _split_fields(line: str, n: int) -> list[str] | None:
    if "\t" in line:
        parts = [p.strip() for p in line.split("\t")]
        return parts if len(parts) == n else None
    parts = line.split()
    if len(parts) == n:
        return parts
    # a doubled single-space delimiter marks an empty field
    parts = line.strip().split(" ")
    return parts if len(parts) == n else None


def _parse_line(tokens: list[str], order: tuple[str, ...]) -> tuple[dict, str | None]:
    values: dict = {}
    for name, token in zip(order, tokens):
        if token.lower() in NULL_TOKENS:
            return values, f"null field: {name}"
        if name == "button_touch":
            values[name] = token
            continue
        try:
            number = float(token)
        except ValueError:
            return values, f"unparseable field: {name}={token!r}"
        if not math.isfinite(number):
            return values, f"non-finite field: {name}={token!r}"
        values[name] = number
    if values["finger"] not in (0.0, 1.0):
        return values, f"invalid finger id {values['finger']:g}"
    if values["timestamp"] < 0:
        return values, "negative timestamp"
    values["finger"] = int(values["finger"])
    return values, None


def parse_log(lines: Iterable[str], field_order: Sequence[str] | None = None) -> ParseResult:
    """Parse event lines into TouchEvents.

    Bad lines are skipped and recorded as diagnostics (1-based line
    numbers). A header row found as the first non-blank line overrides
    ``field_order``. Unknown ``button_touch`` tokens are kept and flagged
    with a warning-severity diagnostic.
    """
    order = validate_field_order(field_order) if field_order is not None else DEFAULT_FIELD_ORDER
    events: list[TouchEvent] = []
    diagnostics: list[Diagnostic] = []
    seen_content = False
    try:
        for lineno, raw in enumerate(lines, start=1):
            line = raw.rstrip("\r\n")
            if not line.strip():
                continue
            if not seen_content:
                seen_content = True
                first = line.split()[0]
                if not _is_number(first):
                    order = parse_header(line)
                    continue
            tokens = _split_fields(line, len(order))
            if tokens is None:
                diagnostics.append(Diagnostic(lineno, f"expected {len(order)} fields, got {len(line.split())}"))
                continue
            values, problem = _parse_line(tokens, order)
            if problem is not None:
                diagnostics.append(Diagnostic(lineno, problem))
                continue
            event = TouchEvent(**values)
            if event.button_touch.upper() not in BUTTON_STATES:
                diagnostics.append(
                    Diagnostic(lineno, f"unrecognised button_touch token {event.button_touch!r}", "warning")
                )
            events.append(event)
    except (OSError, UnicodeDecodeError) as exc:
        raise IngestError(f"unreadable input: {exc}") from exc
    return ParseResult(events, diagnostics, order)


def read_log(path: str | Path, field_order: Sequence[str] | None = None) -> ParseResult:
    path = Path(path)
    try:
        with path.open("r", encoding="utf-8") as fh:
            return parse_log(fh, field_order)
    except FileNotFoundError as exc:
        raise IngestError(f"no such file: {path}") from exc
    except (OSError, UnicodeDecodeError) as exc:
        raise IngestError(f"unreadable input {path}: {exc}") from exc


def clean_stream(events: Sequence[TouchEvent]) -> CleanResult:
    """Split events by finger, sort by time, and drop repeated timestamps.

    Within each finger the first event at a given timestamp is kept, so
    every stream comes out strictly increasing in time.
    """
    by_finger: dict[int, list[TouchEvent]] = {}
    for event in events:
        by_finger.setdefault(event.finger, []).append(event)

    streams = []
    dropped = 0
    warnings: list[str] = []
    for finger in sorted(by_finger):
        ordered = sorted(by_finger[finger], key=lambda e: e.timestamp)
        kept: list[TouchEvent] = []
        for event in ordered:
            if kept and event.timestamp <= kept[-1].timestamp:
                dropped += 1
                continue
            kept.append(event)
        if len(kept) < MIN_STREAM_EVENTS:
            msg = f"finger {finger}: {len(kept)} events after cleaning, fewer than {MIN_STREAM_EVENTS}"
            warnings.append(msg)
            logger.warning(msg)
        streams.append(FingerStream(finger, tuple(kept)))
    return CleanResult(tuple(streams), dropped, warnings)


def shuffle_rows(rows: Sequence[T], seed: int) -> list[T]:
    """Seeded Fisher-Yates permutation; the input is left untouched."""
    out = list(rows)
    random.Random(seed).shuffle(out)
    return out


def split_log_name(path: str | Path) -> tuple[str, Game]:
    """``<user_id>_<game>.txt`` -> (user_id, Game)."""
    stem = Path(path).name
    for suffix in (".txt", ".clean"):
        stem = stem.removesuffix(suffix)
    user, sep, game = stem.rpartition("_")
    if not sep or not user:
        raise ConfigError(f"log file name {Path(path).name!r} does not match <user_id>_<game>.txt")
    return user, Game.parse(game)


def load_user_log(path: str | Path, field_order: Sequence[str] | None = None) -> tuple[UserLog, ParseResult, CleanResult]:
    user, game = split_log_name(path)
    parsed = read_log(path, field_order)
    cleaned = clean_stream(parsed.events)
    return UserLog(user, game, cleaned.streams), parsed, cleaned


def format_number(value: float) -> str:
    if float(value).is_integer() and abs(value) < 1e15:
        return str(int(value))
    return repr(float(value))


def format_event(event: TouchEvent, order: Sequence[str] = DEFAULT_FIELD_ORDER) -> str:
    parts = []
    for name in order:
        value = getattr(event, name)
        parts.append(value if name == "button_touch" else format_number(value))
    return " ".join(parts)


def format_log(events: Iterable[TouchEvent], header: bool = True, order: Sequence[str] = DEFAULT_FIELD_ORDER) -> str:
    out = io.StringIO()
    if header:
        out.write("\t".join(_display_name(n) for n in order) + "\n")
    for event in events:
        out.write(format_event(event, order) + "\n")
    return out.getvalue()


def _display_name(name: str) -> str:
    return name.replace("_", " ").title().replace(" ", "")


def diagnostics_csv(diagnostics: Iterable[Diagnostic]) -> str:
    out = io.StringIO()
    writer = csv.writer(out, lineterminator="\n")
    writer.writerow(["line", "severity", "reason"])
    for d in diagnostics:
        writer.writerow([d.line, d.severity, d.reason])
    return out.getvalue()
