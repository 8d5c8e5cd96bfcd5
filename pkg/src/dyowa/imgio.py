"""PGM (P2 ASCII / P5 binary) reading and writing."""

from __future__ import annotations

import re
from pathlib import Path

import numpy as np

from .errors import FormatError
from .image import GrayImage, denormalize, normalize

_WS = b" \t\n\r\v\f"
_TOKEN = re.compile(rb"#[^\n\r]*|\S+")
P2_LINE_WIDTH = 70


def _header_token(data: bytes, pos: int) -> tuple[bytes, int, int]:
    """Next header token after whitespace and ``#`` comments.

    Returns ``(token, start, end)``.
    """
    n = len(data)
    while pos < n:
        c = data[pos]
        if c == ord("#"):
            while pos < n and data[pos] not in b"\n\r":
                pos += 1
        elif c in _WS:
            pos += 1
        else:
            break
    start = pos
    while pos < n and data[pos] not in _WS and data[pos] != ord("#"):
        pos += 1
    if start == pos:
        raise FormatError("unexpected end of header", start)
    return data[start:pos], start, pos


def _header_int(data: bytes, pos: int, what: str) -> tuple[int, int]:
    token, start, end = _header_token(data, pos)
    if not token.isdigit():
        raise FormatError(f"invalid {what} {token!r}", start)
    return int(token), end


def read_raster(data: bytes) -> tuple[np.ndarray, int, str]:
    """Decode PGM bytes into ``(raster, maxval, variant)``."""
    magic = data[:2]
    if magic not in (b"P2", b"P5"):
        raise FormatError(f"bad magic number {magic!r}, expected P2 or P5", 0)
    width, pos = _header_int(data, 2, "width")
    height, pos = _header_int(data, pos, "height")
    maxval, pos = _header_int(data, pos, "maxval")
    if width < 1 or height < 1:
        raise FormatError(f"image dimensions must be positive, got {width}x{height}", pos)
    if not 1 <= maxval <= 65535:
        raise FormatError(f"maxval {maxval} outside [1, 65535]", pos)
    count = width * height

    if magic == b"P5":
        if pos >= len(data) or data[pos:pos + 1] not in _WS:
            raise FormatError("missing whitespace after maxval", pos)
        pos += 1
        itemsize = 1 if maxval < 256 else 2
        need = count * itemsize
        if len(data) - pos < need:
            raise FormatError(
                f"truncated raster: need {need} bytes, have {len(data) - pos}", len(data)
            )
        dtype = np.uint8 if itemsize == 1 else np.dtype(">u2")
        raster = np.frombuffer(data, dtype=dtype, count=count, offset=pos).astype(np.int64)
        offsets = None
    else:
        raster, offsets = _p2_samples(data, pos, count)

    over = np.flatnonzero(raster > maxval)
    if over.size:
        i = int(over[0])
        offset = offsets[i] if offsets is not None else pos + i * (1 if maxval < 256 else 2)
        raise FormatError(f"sample {raster[i]} exceeds maxval {maxval}", offset)
    return raster.reshape(height, width), maxval, magic.decode()


def _p2_samples(data: bytes, pos: int, count: int) -> tuple[np.ndarray, list[int]]:
    values, offsets = [], []
    for m in _TOKEN.finditer(data, pos):
        token = m.group()
        if token.startswith(b"#"):
            continue
        if not token.isdigit():
            raise FormatError(f"invalid sample {token!r}", m.start())
        values.append(int(token))
        offsets.append(m.start())
        if len(values) == count:
            break
    if len(values) < count:
        raise FormatError(f"truncated raster: need {count} samples, found {len(values)}", len(data))
    return np.array(values, dtype=np.int64), offsets


def read_pgm(data: bytes) -> GrayImage:
    raster, maxval, _ = read_raster(data)
    return normalize(raster, maxval)


def _p2_lines(row: np.ndarray) -> list[str]:
    lines, current = [], ""
    for value in row:
        token = str(int(value))
        if current and len(current) + 1 + len(token) > P2_LINE_WIDTH:
            lines.append(current)
            current = token
        else:
            current = f"{current} {token}" if current else token
    lines.append(current)
    return lines


def write_pgm(img: GrayImage, variant: str = "P5") -> bytes:
    """Encode ``img`` (after :func:`denormalize`) as P2 or P5 bytes."""
    raster = denormalize(img)
    maxval = img.max_value
    if maxval > 65535:
        raise FormatError(f"max_value {maxval} exceeds the PGM limit 65535")
    header = f"{variant}\n{img.cols} {img.rows}\n{maxval}\n".encode("ascii")
    if variant == "P5":
        dtype = np.uint8 if maxval < 256 else np.dtype(">u2")
        return header + raster.astype(dtype).tobytes()
    if variant == "P2":
        lines = [line for row in raster for line in _p2_lines(row)]
        return header + ("\n".join(lines) + "\n").encode("ascii")
    raise ValueError(f"unknown PGM variant {variant!r}")


def load_pgm(path) -> GrayImage:
    return read_pgm(Path(path).read_bytes())


def save_pgm(img: GrayImage, path, variant: str = "P5") -> None:
    Path(path).write_bytes(write_pgm(img, variant))
