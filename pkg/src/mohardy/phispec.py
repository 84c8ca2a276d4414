"""Parser for the phi-spec mini-language.

    spec   := family [":" pair {"," pair}]
    pair   := key "=" value

Examples: ``power:p=2``, ``wpower:p=2,w=weights.csv``, ``orlicz-exp``,
``double-phase:p=2,q=4,w=zero``, ``xlog:alpha=2,beta=1,gamma=1``.
Weights and exponents given as CSV paths are leaf-value columns.
"""

from __future__ import annotations

import re
from dataclasses import replace
from pathlib import Path
from typing import Callable

import numpy as np

from . import musielak as mu
from .fileio import load_values

GRAMMAR = (
    'phi-spec grammar: family ":" key "=" value {"," key "=" value}\n'
    "  power:p=P                    t^p\n"
    "  wpower:p=P,w=CSV|one|zero    w(x) t^p\n"
    "  orlicz-exp                   e^t - t - 1\n"
    "  loglow:alpha=A               t^A (1 + |log t|)\n"
    "  loggrow:alpha=A              t^A (1 + log(1 + t))\n"
    "  logdamp:alpha=A              t^A / log(e + t)\n"
    "  double-phase:p=P,q=Q,w=W     t^P + w(x) t^Q\n"
    "  varexp:pfile=CSV             t^{p(x)}\n"
    "  xlog:alpha=A,beta=B,gamma=G  t^A / ((log(e+x))^B + (log(e+t))^G)\n"
    "  table:file=CSV               tabulated Phi(t), two columns t,Phi"
)


class SpecError(ValueError):
    def __init__(self, message: str, position: int, spec: str):
        super().__init__(f"{message} at position {position} in {spec!r}")
        self.position = position
        self.spec = spec


_FAMILIES: dict[str, tuple[tuple[str, ...], tuple[str, ...]]] = {
    # family: (required keys, optional keys)
    "power": (("p",), ()),
    "wpower": (("p", "w"), ()),
    "orlicz-exp": ((), ()),
    "loglow": (("alpha",), ()),
    "loggrow": (("alpha",), ()),
    "logdamp": (("alpha",), ()),
    "double-phase": (("p", "q", "w"), ()),
    "varexp": (("pfile",), ()),
    "xlog": (("alpha", "beta", "gamma"), ()),
    "table": (("file",), ()),
}

_FAMILY_RE = re.compile(r"[a-z][a-z0-9-]*")
_KEY_RE = re.compile(r"[a-z][a-z0-9_]*")


def tokenize(spec: str) -> tuple[str, list[tuple[str, str, int, int]]]:
    """Split into (family, [(key, value, key_pos, value_pos), ...])."""
    m = _FAMILY_RE.match(spec)
    if not m:
        raise SpecError("expected family name", 0, spec)
    family, pos = m.group(0), m.end()
    pairs = []
    if pos == len(spec):
        return family, pairs
    if spec[pos] != ":":
        raise SpecError(f"expected ':' after family, found {spec[pos]!r}", pos, spec)
    pos += 1
    while True:
        km = _KEY_RE.match(spec, pos)
        if not km:
            raise SpecError("expected key", pos, spec)
        key, key_pos, pos = km.group(0), pos, km.end()
        if pos >= len(spec) or spec[pos] != "=":
            raise SpecError("expected '='", pos, spec)
        pos += 1
        end = spec.find(",", pos)
        end = len(spec) if end < 0 else end
        if end == pos:
            raise SpecError("expected value", pos, spec)
        pairs.append((key, spec[pos:end], key_pos, pos))
        pos = end
        if pos == len(spec):
            return family, pairs
        pos += 1  # skip ','


def _number(spec, value, at) -> float:
    try:
        return float(value)
    except ValueError:
        raise SpecError(f"expected a number, got {value!r}", at, spec) from None


def _leaf_function(spec, value, at, base: Path) -> tuple[Callable, str]:
    if value == "one":
        return mu.constant_weight(1.0), "one"
    if value == "zero":
        return mu.constant_weight(0.0), "zero"
    path = Path(value)
    if not path.is_absolute():
        path = base / path
    if not path.exists():
        raise SpecError(f"no such file {value!r}", at, spec)
    try:
        return mu.weight_from_values(load_values(path)), value
    except ValueError as exc:
        raise SpecError(f"bad leaf file {value!r}: {exc}", at, spec) from None


def parse(spec: str, base_dir: str | Path = ".") -> mu.MusielakFunction:
    """Build a MusielakFunction; the spec string is kept as its label."""
    base = Path(base_dir)
    family, pairs = tokenize(spec.strip())
    if family not in _FAMILIES:
        raise SpecError(f"unknown family {family!r}", 0, spec)
    required, optional = _FAMILIES[family]
    seen: dict[str, tuple[str, int]] = {}
    for key, value, kpos, vpos in pairs:
        if key not in required and key not in optional:
            raise SpecError(f"unknown key {key!r} for family {family!r}", kpos, spec)
        if key in seen:
            raise SpecError(f"duplicate key {key!r}", kpos, spec)
        seen[key] = (value, vpos)
    for key in required:
        if key not in seen:
            raise SpecError(f"missing key {key!r} for family {family!r}", len(spec), spec)

    def num(key):
        return _number(spec, *seen[key])

    try:
        if family == "power":
            phi = mu.power(num("p"))
        elif family == "wpower":
            w, name = _leaf_function(spec, *seen["w"], base)
            if name == "zero":
                raise SpecError("weight 'zero' gives phi = 0, not a Musielak-Orlicz function", seen["w"][1], spec)
            phi = mu.wpower(num("p"), w, name=name) if name != "one" else mu.power(num("p"))
        elif family == "orlicz-exp":
            phi = mu.orlicz_exp()
        elif family == "loglow":
            phi = mu.loglow(num("alpha"))
        elif family == "loggrow":
            phi = mu.loggrow(num("alpha"))
        elif family == "logdamp":
            phi = mu.logdamp(num("alpha"))
        elif family == "double-phase":
            w, name = _leaf_function(spec, *seen["w"], base)
            phi = mu.double_phase(num("p"), num("q"), w, name=name)
        elif family == "varexp":
            pfun, name = _leaf_function(spec, *seen["pfile"], base)
            if name in ("one", "zero"):
                raise SpecError("pfile must be a CSV path", seen["pfile"][1], spec)
            phi = mu.varexp(pfun, name=name)
        elif family == "xlog":
            phi = mu.xlog(num("alpha"), num("beta"), num("gamma"))
        else:  # table
            value, at = seen["file"]
            path = Path(value) if Path(value).is_absolute() else base / value
            if not path.exists():
                raise SpecError(f"no such file {value!r}", at, spec)
            rows = np.loadtxt(path, delimiter=",", ndmin=2)
            phi = mu.tabulated(rows[:, 0], rows[:, 1])
    except mu.MusielakError as exc:
        raise SpecError(str(exc), len(family) + 1, spec) from None
    return replace(phi, spec=spec.strip())
