"""Instance files and one-line result records.

Instance file (UTF-8, LF)::

    <n> <N>                      or   <n> box <minx> <miny> <maxx> <maxy>
    A
    <x> <y>      (n lines)
    B
    <x> <y>      (n lines)

Lines starting with ``#`` are comments.  Result records are tab-separated
``key=value`` fields with exact decimal renderings of dyadic rationals.
"""

from __future__ import annotations

import hashlib
from fractions import Fraction
from pathlib import Path
from typing import Any, Dict, List, Tuple, Union

from .errors import ParseError
from .geometry import PointSetInstance

RECORD_KEYS = (
    "command", "instance", "engine", "ell", "K", "matching",
    "weight_lower", "weight_upper", "pass", "witness", "wall_ms",
)


def write_instance(inst: PointSetInstance) -> str:
    if inst.signed_box is None:
        header = f"{inst.n} {inst.grid_bound}"
    else:
        header = f"{inst.n} box " + " ".join(str(v) for v in inst.signed_box)
    lines = [header, "A"]
    lines += [f"{p.x} {p.y}" for p in inst.a_points]
    lines.append("B")
    lines += [f"{p.x} {p.y}" for p in inst.b_points]
    return "\n".join(lines) + "\n"


def save_instance(inst: PointSetInstance, path: Union[str, Path]) -> None:
    Path(path).write_text(write_instance(inst), encoding="utf-8", newline="\n")


def _int(tok: str, line: int, col: int) -> int:
    try:
        return int(tok)
    except ValueError:
        raise ParseError(f"expected an integer, got {tok!r}", line, col) from None


def _tokens(raw: str) -> List[Tuple[int, int, str]]:
    out = []
    col = 0
    for piece in raw.split(" "):
        if piece:
            out.append((col + 1, piece))
        col += len(piece) + 1
    return out


def parse_instance(text: str) -> PointSetInstance:
    rows = []
    for lineno, raw in enumerate(text.split("\n"), 1):
        stripped = raw.strip()
        if not stripped or stripped.startswith("#"):
            continue
        rows.append((lineno, raw.replace("\t", " ").rstrip("\r")))
    if not rows:
        raise ParseError("empty instance file", 1, 1)
    it = iter(rows)
    lineno, raw = next(it)
    toks = _tokens(raw)
    if len(toks) == 2:
        n = _int(toks[0][1], lineno, toks[0][0])
        N = _int(toks[1][1], lineno, toks[1][0])
        box = None
    elif len(toks) == 6 and toks[1][1] == "box":
        n = _int(toks[0][1], lineno, toks[0][0])
        box = tuple(_int(t, lineno, c) for c, t in toks[2:])
        N = max(box[2] - box[0], box[3] - box[1], 1)
    else:
        raise ParseError("header must be '<n> <N>' or '<n> box <minx> <miny> <maxx> <maxy>'", lineno, 1)
    if n < 1:
        raise ParseError("n must be positive", lineno, toks[0][0])

    def block(label):
        try:
            ln, line = next(it)
        except StopIteration:
            raise ParseError(f"missing {label} block", rows[-1][0] + 1, 1) from None
        if line.strip() != label:
            raise ParseError(f"expected {label!r}", ln, 1)
        pts = []
        for _ in range(n):
            try:
                ln, line = next(it)
            except StopIteration:
                raise ParseError(f"{label} block has fewer than {n} points", rows[-1][0] + 1, 1) from None
            t = _tokens(line)
            if len(t) != 2:
                raise ParseError("expected '<x> <y>'", ln, 1)
            pts.append((_int(t[0][1], ln, t[0][0]), _int(t[1][1], ln, t[1][0])))
        return pts

    a = block("A")
    b = block("B")
    extra = next(it, None)
    if extra is not None:
        raise ParseError(f"unexpected content {extra[1].strip()!r}", extra[0], 1)
    return PointSetInstance(tuple(a), tuple(b), N, box)


def read_instance(path: Union[str, Path]) -> PointSetInstance:
    return parse_instance(Path(path).read_text(encoding="utf-8"))


def instance_hash(inst: PointSetInstance) -> str:
    return hashlib.sha256(write_instance(inst).encode("utf-8")).hexdigest()[:16]


def format_number(x: Any) -> str:
    """Exact decimal for dyadic rationals, ``p/q`` for other fractions."""
    if x is None:
        return "-"
    if isinstance(x, bool):
        return "pass" if x else "fail"
    if isinstance(x, int):
        return str(x)
    if isinstance(x, float):
        return f"{x:.3f}"
    if isinstance(x, Fraction):
        den = x.denominator
        if den & (den - 1):
            return f"{x.numerator}/{den}"
        p = den.bit_length() - 1
        scaled = abs(x.numerator) * 5**p
        sign = "-" if x < 0 else ""
        if p == 0:
            return f"{sign}{scaled}"
        digits = str(scaled).rjust(p + 1, "0")
        whole, frac = digits[:-p], digits[-p:].rstrip("0") or "0"
        return f"{sign}{whole}.{frac}"
    if isinstance(x, (tuple, list)):
        return ";".join(format_number(v) for v in x)
    return str(x).replace("\t", " ").replace("\n", " ")


def format_record(fields: Dict[str, Any]) -> str:
    keys = list(RECORD_KEYS) + [k for k in fields if k not in RECORD_KEYS]
    return "\t".join(f"{k}={format_number(fields.get(k))}" for k in keys)


def parse_record(line: str) -> Dict[str, str]:
    out = {}
    for part in line.rstrip("\n").split("\t"):
        k, _, v = part.partition("=")
        out[k] = v
    return out


def strip_timing(line: str) -> str:
    return "\t".join(p for p in line.split("\t") if not p.startswith("wall_ms="))
