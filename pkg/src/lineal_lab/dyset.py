"""DYSET v1 text format.

::

    DYSET 1 n=<n> level=<j> backing=<explicit|digit|family> count=<records>
    <record>
    ...

Explicit records are cell coordinates in key order.  Digit records are one
``blocks`` line per coordinate.  Family records are line specs
(``a b x0 x1`` as ``p/q`` rationals, or ``vertical c y0 y1``), or a
``pencil b x0 x1`` line followed by the ``blocks`` line of its slope set.
"""

from __future__ import annotations

from fractions import Fraction
from pathlib import Path

import numpy as np

from .digits import DigitRule
from .dyadic import DigitBacked, DyadicSet, Explicit, FamilyBacked, LineFamily, LineSpec, family_lines
from .errors import FormatError


def _rat(v: Fraction) -> str:
    return f"{v.numerator}/{v.denominator}"


def dumps(s: DyadicSet) -> str:
    b = s.backing
    if isinstance(b, Explicit):
        kind = "explicit"
        records = [" ".join(str(int(v)) for v in row) for row in s.coords()]
    elif isinstance(b, DigitBacked):
        kind = "digit"
        records = [r.to_record() for r in b.rules]
    else:
        kind = "family"
        if b.family is not None:
            records = [ln.to_record() for ln in b.family]
        elif isinstance(b.slope_set.backing, DigitBacked):
            (rule,) = b.slope_set.backing.rules
            records = [f"pencil {_rat(b.intercept)} {_rat(b.window[0])} {_rat(b.window[1])}", rule.to_record()]
        else:
            keys = b.slope_set.keys()
            lvl = b.slope_set.level
            records = [LineSpec(Fraction(int(k), 1 << lvl), b.intercept, *b.window).to_record() for k in keys]
    head = f"DYSET 1 n={s.n} level={s.level} backing={kind} count={len(records)}"
    return "\n".join([head, *records]) + "\n"


def loads(text: str) -> DyadicSet:
    rows = [ln.strip() for ln in text.splitlines() if ln.strip()]
    if not rows:
        raise FormatError("empty DYSET text")
    head = rows[0].split()
    if head[:2] != ["DYSET", "1"]:
        raise FormatError(f"bad DYSET header: {rows[0]!r}")
    try:
        opts = dict(tok.split("=", 1) for tok in head[2:])
        n, level, kind, count = int(opts["n"]), int(opts["level"]), opts["backing"], int(opts["count"])
    except (KeyError, ValueError) as exc:
        raise FormatError(f"bad DYSET header: {rows[0]!r}") from exc
    body = rows[1:]
    if len(body) != count:
        raise FormatError(f"header announces {count} records, found {len(body)}")
    try:
        if kind == "explicit":
            coords = np.array([[int(v) for v in r.split()] for r in body], dtype=np.int64).reshape(-1, n)
            return DyadicSet.from_coords(n, level, coords)
        if kind == "digit":
            return DyadicSet.digits([DigitRule.from_record(r) for r in body], level)
        if kind == "family":
            if body and body[0].startswith("pencil"):
                _, b, x0, x1 = body[0].split()
                rule = DigitRule.from_record(body[1])
                slopes = DyadicSet.digits([rule], level)
                return DyadicSet(2, level, FamilyBacked(slope_set=slopes, intercept=Fraction(b),
                                                        window=(Fraction(x0), Fraction(x1))))
            fam = LineFamily(LineSpec.from_record(r) for r in body)
            return DyadicSet(2, level, FamilyBacked(family=fam))
    except (ValueError, IndexError) as exc:
        raise FormatError(f"malformed DYSET record: {exc}") from exc
    raise FormatError(f"unknown backing {kind!r}")


def save(s: DyadicSet, path) -> None:
    Path(path).write_text(dumps(s))


def load(path) -> DyadicSet:
    return loads(Path(path).read_text())


def family_of(s: DyadicSet) -> LineFamily:
    """The line family inside a family-backed set (pencils are expanded)."""
    if not isinstance(s.backing, FamilyBacked):
        raise FormatError("expected a family-backed set")
    return family_lines(s.backing)
