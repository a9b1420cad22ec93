"""Canonical key-value text format for bundles, secrets, and configs.

One "key = value" pair per line, keys sorted, with a typed prefix on every
value so parsing never guesses:

    int:7       float:0.05      str:passive
    bits:13:0d1f            (length in bits, then little-endian hex)
    bytes:<base64>

The first line names the record kind and format version.
"""

from __future__ import annotations

import base64
import io

from .bits import Bits

_FORMAT_VERSION = 1


def _encode(value) -> str:
    if isinstance(value, Bits):
        return f"bits:{value.length}:{value.hex()}"
    if isinstance(value, bool):
        return f"int:{int(value)}"
    if isinstance(value, int):
        return f"int:{value}"
    if isinstance(value, float):
        return f"float:{value!r}"
    if isinstance(value, str):
        return f"str:{value}"
    if isinstance(value, (bytes, bytearray)):
        return "bytes:" + base64.b64encode(bytes(value)).decode()
    raise TypeError(f"cannot encode {type(value).__name__}")


def _decode(text: str):
    kind, _, body = text.partition(":")
    if kind == "int":
        return int(body)
    if kind == "float":
        return float(body)
    if kind == "str":
        return body
    if kind == "bits":
        length, _, hexpart = body.partition(":")
        return Bits.from_hex(hexpart, int(length))
    if kind == "bytes":
        return base64.b64decode(body)
    raise ValueError(f"unknown value type {kind!r}")


def dumps(kind: str, mapping: dict) -> str:
    lines = [f"# tamperstore {kind} v{_FORMAT_VERSION}"]
    for key in sorted(mapping):
        if "=" in key or key != key.strip():
            raise ValueError(f"bad key {key!r}")
        lines.append(f"{key} = {_encode(mapping[key])}")
    return "\n".join(lines) + "\n"


def loads(text: str) -> tuple[str, dict]:
    stream = io.StringIO(text)
    header = stream.readline().strip()
    parts = header.split()
    if len(parts) != 4 or parts[0] != "#" or parts[1] != "tamperstore":
        raise ValueError(f"bad header {header!r}")
    kind = parts[2]
    if parts[3] != f"v{_FORMAT_VERSION}":
        raise ValueError(f"unsupported version {parts[3]}")
    mapping = {}
    for line in stream:
        line = line.strip()
        if not line or line.startswith("#"):
            continue
        key, _, value = line.partition(" = ")
        mapping[key] = _decode(value)
    return kind, mapping


def dump(path, kind: str, mapping: dict) -> None:
    with open(path, "w") as fh:
        fh.write(dumps(kind, mapping))


def load(path) -> tuple[str, dict]:
    with open(path) as fh:
        return loads(fh.read())
