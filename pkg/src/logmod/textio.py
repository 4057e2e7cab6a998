"""The line-oriented document format.

Grammar (one statement per line, ``#`` starts a comment)::

    line    := key "=" value | key "+=" vector
    key     := segment ("." segment)*       segment: name or list index
    value   := int | vector | "[]" | "true" | "false" | "none" | word | json-string
    vector  := "[" int* "]"                  integers separated by spaces

``key = v`` sets a value, ``key += [..]`` appends a vector to a list, and a
numeric segment indexes a list of records (``charts.0.label = [1 0]``).
Emission is canonical, so ``emit(parse(text)) == text`` for emitted text.
"""
from __future__ import annotations

import json
import re

_WORD = re.compile(r"^[A-Za-z_][A-Za-z0-9_\-]*$")
_KEY = re.compile(r"^[A-Za-z0-9_\-]+(\.[A-Za-z0-9_\-]+)*$")


class FormatError(ValueError):
    def __init__(self, message, line=None, source="<input>"):
        self.line = line
        where = f"{source}:{line}: " if line is not None else f"{source}: "
        super().__init__(where + message)


def _parse_value(text, lineno, source):
    text = text.strip()
    if text.startswith("["):
        if not text.endswith("]"):
            raise FormatError("unterminated vector", lineno, source)
        body = text[1:-1].split()
        try:
            return tuple(int(x) for x in body)
        except ValueError:
            raise FormatError(f"non-integer entry in vector {text}", lineno, source) from None
    if text.startswith('"'):
        try:
            return json.loads(text)
        except json.JSONDecodeError as e:
            raise FormatError(f"bad string: {e.msg}", lineno, source) from None
    if re.fullmatch(r"-?\d+", text):
        return int(text)
    if text == "true":
        return True
    if text == "false":
        return False
    if text == "none":
        return None
    if _WORD.match(text):
        return text
    raise FormatError(f"cannot read value {text!r}", lineno, source)


def _slot(container, seg, lineno, source, make):
    """Fetch (creating with ``make``) the child ``seg`` of a dict or list."""
    if isinstance(container, list):
        if not seg.isdigit():
            raise FormatError(f"expected a list index, got {seg!r}", lineno, source)
        i = int(seg)
        if i > len(container):
            raise FormatError(f"list index {i} skips entries", lineno, source)
        if i == len(container):
            container.append(make())
        return container, i
    if not isinstance(container, dict):
        raise FormatError(f"cannot descend into a value at {seg!r}", lineno, source)
    if seg not in container:
        container[seg] = make()
    return container, seg


def parse(text: str, source: str = "<input>") -> dict:
    root: dict = {}
    for lineno, raw in enumerate(text.splitlines(), 1):
        line = raw.strip()
        if not line or line.startswith("#"):
            continue
        m = re.match(r"^([^=+\s]+)\s*(\+?=)\s*(.*)$", line)
        if not m:
            raise FormatError("expected 'key = value' or 'key += [vector]'", lineno, source)
        key, op, rest = m.groups()
        if not _KEY.match(key):
            raise FormatError(f"bad key {key!r}", lineno, source)
        segs = key.split(".")
        node = root
        for k, seg in enumerate(segs[:-1]):
            nxt_is_index = segs[k + 1].isdigit()
            parent, idx = _slot(node, seg, lineno, source, list if nxt_is_index else dict)
            node = parent[idx]
        last = segs[-1]
        value = _parse_value(rest, lineno, source)
        if op == "+=":
            if not isinstance(value, tuple):
                raise FormatError("'+=' needs a vector", lineno, source)
            parent, idx = _slot(node, last, lineno, source, list)
            if not isinstance(parent[idx], list):
                raise FormatError(f"{key} is not a list", lineno, source)
            parent[idx].append(value)
        else:
            if value == ():
                value = []
            if isinstance(node, list):
                parent, idx = _slot(node, last, lineno, source, lambda: None)
                parent[idx] = value
            else:
                if last in node:
                    raise FormatError(f"duplicate key {key}", lineno, source)
                node[last] = value
    return root


def _fmt_scalar(v):
    if v is True:
        return "true"
    if v is False:
        return "false"
    if v is None:
        return "none"
    if isinstance(v, int):
        return str(v)
    if isinstance(v, str):
        if _WORD.match(v) and v not in ("true", "false", "none"):
            return v
        return json.dumps(v, ensure_ascii=False)
    raise TypeError(f"cannot emit {v!r}")


def _is_vector(v):
    return isinstance(v, (tuple, list)) and all(isinstance(x, int) and not isinstance(x, bool) for x in v)


def _fmt_vec(v):
    return "[" + " ".join(str(x) for x in v) + "]"


def emit(doc: dict) -> str:
    lines = []

    def walk(prefix, v):
        if isinstance(v, dict):
            for k, x in v.items():
                walk(f"{prefix}.{k}" if prefix else str(k), x)
        elif isinstance(v, (list, tuple)) and len(v) == 0:
            lines.append(f"{prefix} = []")
        elif _is_vector(v) and isinstance(v, tuple):
            lines.append(f"{prefix} = {_fmt_vec(v)}")
        elif isinstance(v, list) and all(_is_vector(x) and isinstance(x, tuple) for x in v):
            for x in v:
                lines.append(f"{prefix} += {_fmt_vec(x)}")
        elif isinstance(v, (list, tuple)):
            for i, x in enumerate(v):
                walk(f"{prefix}.{i}", x)
        else:
            lines.append(f"{prefix} = {_fmt_scalar(v)}")

    walk("", doc)
    return "\n".join(lines) + "\n"


def to_jsonable(v):
    if isinstance(v, dict):
        return {k: to_jsonable(x) for k, x in v.items()}
    if isinstance(v, (list, tuple)):
        return [to_jsonable(x) for x in v]
    return v


def emit_machine(doc: dict) -> str:
    return json.dumps(to_jsonable(doc), sort_keys=True, separators=(",", ":")) + "\n"


def _from_json(v, path="", vectors=False):
    if isinstance(v, dict):
        return {k: _from_json(x) for k, x in v.items()}
    if isinstance(v, list):
        if v and all(isinstance(x, int) and not isinstance(x, bool) for x in v):
            return tuple(v)
        return [_from_json(x) for x in v]
    return v


def parse_any(text: str, source: str = "<input>") -> dict:
    """Parse either format; machine documents are JSON objects."""
    if text.lstrip().startswith("{"):
        try:
            data = json.loads(text)
        except json.JSONDecodeError as e:
            raise FormatError(f"bad JSON at line {e.lineno}: {e.msg}", e.lineno, source) from None
        return _from_json(data)
    return parse(text, source)
