"""Plain-text configuration documents.

One document declares orbits, base curves, cover specs, count tables and
neck configurations, all cross-referenced by name.  Rationals are written
``a/b``.  The renderer is canonical (fixed key order, sorted names), so
``parse -> render -> parse`` is a fixpoint and rendered documents are
byte-stable.

Statement forms::

    truncation 8
    orbit <name> elliptic theta=3/10 max_iterate=4 [morse=no]
    orbit <name> hyperbolic cz1=1 [morse=no]
    curve <name> [closed=yes] [immersed=no] index=0 rel_c1_doubled=2
                 [pos=(a,b^2)] [neg=()]
    cover <name> base=<curve>|cyl:<orbit> degree=2 [pos=...] [neg=...]
                 [marked=1] [constrained=1]
    table <name> orbit=<orbit>|curve=<curve>
      <pos-collection> <neg-collection> <count>
      ...
    end
    neck <name> orbits=(a,b) plus=<curve> minus=<curve> [separating=no]
"""

from __future__ import annotations

from dataclasses import dataclass, field
from fractions import Fraction

from .covers import BaseCurve, CoverSpec, cylinder_over
from .errors import ConfigError, LocalSFTError
from .exceptional import NeckConfiguration
from .orbits import OrbitCollection, OrbitRegistry, ReebOrbit
from .potentials import CountTable

DEFAULT_TRUNCATION = 8


@dataclass
class ConfigDocument:
    truncation: int = DEFAULT_TRUNCATION
    registry: OrbitRegistry = field(default_factory=OrbitRegistry)
    curves: dict[str, BaseCurve] = field(default_factory=dict)
    covers: dict[str, CoverSpec] = field(default_factory=dict)
    tables: dict[str, CountTable] = field(default_factory=dict)
    necks: dict[str, NeckConfiguration] = field(default_factory=dict)

    def curve(self, name: str) -> BaseCurve:
        if name.startswith("cyl:"):
            return cylinder_over(self.registry.get(name[4:]))
        try:
            return self.curves[name]
        except KeyError:
            raise KeyError(f"unknown curve {name!r}") from None

    def __eq__(self, other):
        return (isinstance(other, ConfigDocument)
                and self.truncation == other.truncation
                and self.registry == other.registry
                and self.curves == other.curves
                and self.covers == other.covers
                and self.tables == other.tables
                and self.necks == other.necks)


def _parse_fraction(text: str, line: int, col: int) -> Fraction:
    try:
        return Fraction(text)
    except (ValueError, ZeroDivisionError):
        raise ConfigError(f"expected a rational number, got {text!r}", line, col)


def _parse_int(text: str, line: int, col: int) -> int:
    try:
        return int(text)
    except ValueError:
        raise ConfigError(f"expected an integer, got {text!r}", line, col)


def _parse_bool(text: str, line: int, col: int) -> bool:
    if text in ("yes", "true", "1"):
        return True
    if text in ("no", "false", "0"):
        return False
    raise ConfigError(f"expected yes/no, got {text!r}", line, col)


def _parse_name_list(text: str, line: int, col: int) -> list[str]:
    if not (text.startswith("(") and text.endswith(")")):
        raise ConfigError(f"expected a parenthesized list, got {text!r}", line, col)
    inner = text[1:-1]
    return [chunk for chunk in inner.split(",") if chunk] if inner else []


def _parse_collection(text: str, registry: OrbitRegistry, sign: str,
                      line: int, col: int) -> OrbitCollection:
    items = []
    for atom in _parse_name_list(text, line, col):
        name, _, power = atom.partition("^")
        k = _parse_int(power, line, col) if power else 1
        if name not in registry:
            raise ConfigError(f"unknown orbit {name!r}", line, col)
        try:
            items.append(registry.get(name).iterate(k))
        except LocalSFTError as exc:
            raise ConfigError(str(exc), line, col)
    return OrbitCollection(tuple(items), sign=sign)


class _Lines:
    def __init__(self, text: str):
        self.raw = text.splitlines()
        self.pos = 0

    def next_content(self) -> tuple[int, str] | None:
        while self.pos < len(self.raw):
            lineno = self.pos + 1
            line = self.raw[self.pos]
            self.pos += 1
            stripped = line.split("#", 1)[0].rstrip()
            if stripped.strip():
                return lineno, stripped
        return None


def _split_kv(tokens: list[str], line: int, text: str) -> dict[str, tuple[str, int]]:
    out: dict[str, tuple[str, int]] = {}
    for token in tokens:
        key, eq, value = token.partition("=")
        col = text.index(token) + 1
        if not eq:
            raise ConfigError(f"expected key=value, got {token!r}", line, col)
        if key in out:
            raise ConfigError(f"duplicate key {key!r}", line, col)
        out[key] = (value, col)
    return out


def parse_config(text: str) -> ConfigDocument:
    doc = ConfigDocument()
    lines = _Lines(text)
    saw_truncation = False
    while True:
        item = lines.next_content()
        if item is None:
            break
        lineno, content = item
        tokens = content.split()
        head = tokens[0]
        col0 = content.index(head) + 1
        if head == "truncation":
            if len(tokens) != 2:
                raise ConfigError("truncation takes exactly one value", lineno, col0)
            if saw_truncation:
                raise ConfigError("duplicate truncation statement", lineno, col0)
            doc.truncation = _parse_int(tokens[1], lineno, content.index(tokens[1]) + 1)
            if doc.truncation < 1:
                raise ConfigError("truncation must be positive", lineno, col0)
            saw_truncation = True
        elif head == "orbit":
            _parse_orbit(doc, tokens, lineno, content)
        elif head == "curve":
            _parse_curve(doc, tokens, lineno, content)
        elif head == "cover":
            _parse_cover(doc, tokens, lineno, content)
        elif head == "table":
            _parse_table(doc, tokens, lineno, content, lines)
        elif head == "neck":
            _parse_neck(doc, tokens, lineno, content)
        else:
            raise ConfigError(f"unknown statement {head!r}", lineno, col0)
    return doc


def _statement_name(tokens: list[str], lineno: int, content: str, what: str) -> str:
    if len(tokens) < 2 or "=" in tokens[1]:
        raise ConfigError(f"{what} statement needs a name", lineno, 1)
    name = tokens[1]
    return name


def _parse_orbit(doc: ConfigDocument, tokens, lineno, content):
    name = _statement_name(tokens, lineno, content, "orbit")
    if len(tokens) < 3 or "=" in tokens[2]:
        raise ConfigError("orbit statement needs a kind (elliptic/hyperbolic)", lineno, 1)
    kind = tokens[2]
    kv = _split_kv(tokens[3:], lineno, content)
    theta = kv.pop("theta", None)
    cz1 = kv.pop("cz1", None)
    max_iterate = kv.pop("max_iterate", None)
    morse = kv.pop("morse", None)
    if kv:
        key = next(iter(kv))
        raise ConfigError(f"unknown orbit key {key!r}", lineno, kv[key][1])
    try:
        orbit = ReebOrbit(
            name, kind,
            theta=None if theta is None else _parse_fraction(theta[0], lineno, theta[1]),
            cz1=None if cz1 is None else _parse_int(cz1[0], lineno, cz1[1]),
            max_iterate=None if max_iterate is None else _parse_int(max_iterate[0], lineno, max_iterate[1]),
            morse=True if morse is None else _parse_bool(morse[0], lineno, morse[1]),
        )
    except ConfigError:
        raise
    except (ValueError, LocalSFTError) as exc:
        raise ConfigError(str(exc), lineno)
    try:
        doc.registry.add(orbit)
    except ValueError as exc:
        raise ConfigError(str(exc), lineno)


def _parse_curve(doc: ConfigDocument, tokens, lineno, content):
    name = _statement_name(tokens, lineno, content, "curve")
    if name in doc.curves:
        raise ConfigError(f"duplicate curve name {name!r}", lineno)
    kv = _split_kv(tokens[2:], lineno, content)
    def take_bool(key, default):
        item = kv.pop(key, None)
        return default if item is None else _parse_bool(item[0], lineno, item[1])
    def take_int(key, default):
        item = kv.pop(key, None)
        return default if item is None else _parse_int(item[0], lineno, item[1])
    def take_coll(key, sign):
        item = kv.pop(key, None)
        if item is None:
            return OrbitCollection((), sign=sign)
        return _parse_collection(item[0], doc.registry, sign, lineno, item[1])
    closed = take_bool("closed", False)
    immersed = take_bool("immersed", True)
    index = take_int("index", 0)
    rel = take_int("rel_c1_doubled", 0)
    pos = take_coll("pos", "positive")
    neg = take_coll("neg", "negative")
    if kv:
        key = next(iter(kv))
        raise ConfigError(f"unknown curve key {key!r}", lineno, kv[key][1])
    try:
        doc.curves[name] = BaseCurve(name, pos, neg, index, rel, immersed, closed)
    except ConfigError:
        raise
    except (ValueError, LocalSFTError) as exc:
        raise ConfigError(str(exc), lineno)


def _parse_cover(doc: ConfigDocument, tokens, lineno, content):
    name = _statement_name(tokens, lineno, content, "cover")
    if name in doc.covers:
        raise ConfigError(f"duplicate cover name {name!r}", lineno)
    kv = _split_kv(tokens[2:], lineno, content)
    base_item = kv.pop("base", None)
    if base_item is None:
        raise ConfigError("cover statement needs base=<curve>", lineno)
    try:
        base = doc.curve(base_item[0])
    except KeyError as exc:
        raise ConfigError(str(exc), lineno, base_item[1])
    degree_item = kv.pop("degree", None)
    if degree_item is None:
        raise ConfigError("cover statement needs degree=<int>", lineno)
    degree = _parse_int(degree_item[0], lineno, degree_item[1])
    def take_coll(key, sign):
        item = kv.pop(key, None)
        if item is None:
            return OrbitCollection((), sign=sign)
        return _parse_collection(item[0], doc.registry, sign, lineno, item[1])
    pos = take_coll("pos", "positive")
    neg = take_coll("neg", "negative")
    marked_item = kv.pop("marked", None)
    marked = 0 if marked_item is None else _parse_int(marked_item[0], lineno, marked_item[1])
    con_item = kv.pop("constrained", None)
    constrained = 0 if con_item is None else _parse_int(con_item[0], lineno, con_item[1])
    if kv:
        key = next(iter(kv))
        raise ConfigError(f"unknown cover key {key!r}", lineno, kv[key][1])
    try:
        doc.covers[name] = CoverSpec(base, degree, pos, neg, marked, constrained)
    except ConfigError:
        raise
    except (ValueError, LocalSFTError) as exc:
        raise ConfigError(str(exc), lineno)


def _parse_table(doc: ConfigDocument, tokens, lineno, content, lines: _Lines):
    name = _statement_name(tokens, lineno, content, "table")
    if name in doc.tables:
        raise ConfigError(f"duplicate table name {name!r}", lineno)
    kv = _split_kv(tokens[2:], lineno, content)
    orbit_item = kv.pop("orbit", None)
    curve_item = kv.pop("curve", None)
    if kv:
        key = next(iter(kv))
        raise ConfigError(f"unknown table key {key!r}", lineno, kv[key][1])
    if (orbit_item is None) == (curve_item is None):
        raise ConfigError("table statement needs exactly one of orbit=.../curve=...", lineno)
    entries = {}
    while True:
        item = lines.next_content()
        if item is None:
            raise ConfigError(f"table {name!r} is missing its end line", lineno)
        row_line, row = item
        if row.strip() == "end":
            break
        parts = row.split()
        if len(parts) != 3:
            raise ConfigError("table rows are: <pos> <neg> <count>", row_line, 1)
        pos = _parse_collection(parts[0], doc.registry, "positive",
                                row_line, row.index(parts[0]) + 1)
        neg = _parse_collection(parts[1], doc.registry, "negative",
                                row_line, row.index(parts[1]) + 1)
        count = _parse_fraction(parts[2], row_line, row.index(parts[2]) + 1)
        key = (pos.key(), neg.key())
        if key in entries:
            raise ConfigError("duplicate table row", row_line, 1)
        entries[key] = count
    try:
        if orbit_item is not None:
            if orbit_item[0] not in doc.registry:
                raise ConfigError(f"unknown orbit {orbit_item[0]!r}", lineno, orbit_item[1])
            table = CountTable("orbit", orbit_item[0], entries, doc.registry)
        else:
            base = doc.curve(curve_item[0])
            table = CountTable("curve", curve_item[0], entries, doc.registry, base=base)
    except KeyError as exc:
        raise ConfigError(str(exc), lineno)
    except ConfigError:
        raise
    except LocalSFTError as exc:
        raise ConfigError(str(exc), lineno)
    doc.tables[name] = table


def _parse_neck(doc: ConfigDocument, tokens, lineno, content):
    name = _statement_name(tokens, lineno, content, "neck")
    if name in doc.necks:
        raise ConfigError(f"duplicate neck name {name!r}", lineno)
    kv = _split_kv(tokens[2:], lineno, content)
    orbits_item = kv.pop("orbits", None)
    plus_item = kv.pop("plus", None)
    minus_item = kv.pop("minus", None)
    sep_item = kv.pop("separating", None)
    if kv:
        key = next(iter(kv))
        raise ConfigError(f"unknown neck key {key!r}", lineno, kv[key][1])
    if orbits_item is None or plus_item is None or minus_item is None:
        raise ConfigError("neck statement needs orbits=, plus= and minus=", lineno)
    orbit_names = _parse_name_list(orbits_item[0], lineno, orbits_item[1])
    if not orbit_names:
        raise ConfigError("neck needs at least one orbit", lineno, orbits_item[1])
    orbits = []
    for oname in orbit_names:
        if oname not in doc.registry:
            raise ConfigError(f"unknown orbit {oname!r}", lineno, orbits_item[1])
        orbits.append(doc.registry.get(oname))
    try:
        side_plus = doc.curve(plus_item[0])
        side_minus = doc.curve(minus_item[0])
    except KeyError as exc:
        raise ConfigError(str(exc), lineno)
    separating = True if sep_item is None else _parse_bool(sep_item[0], lineno, sep_item[1])
    try:
        doc.necks[name] = NeckConfiguration(name, tuple(orbits), side_plus,
                                            side_minus, separating)
    except LocalSFTError as exc:
        raise ConfigError(str(exc), lineno)


# ---------------------------------------------------------------------------
# Rendering
# ---------------------------------------------------------------------------


def _render_collection(coll: OrbitCollection) -> str:
    return coll.render()


def render_config(doc: ConfigDocument) -> str:
    out: list[str] = [f"truncation {doc.truncation}", ""]
    for orbit in doc.registry.orbits():
        bits = [f"orbit {orbit.name} {orbit.kind}"]
        if orbit.elliptic:
            bits.append(f"theta={orbit.theta}")
            bits.append(f"max_iterate={orbit.max_iterate}")
        else:
            bits.append(f"cz1={orbit.cz1}")
        if not orbit.morse:
            bits.append("morse=no")
        out.append(" ".join(bits))
    if len(doc.registry):
        out.append("")
    for name in sorted(doc.curves):
        curve = doc.curves[name]
        bits = [f"curve {name}"]
        if curve.closed:
            bits.append("closed=yes")
        if not curve.immersed:
            bits.append("immersed=no")
        bits.append(f"index={curve.index}")
        bits.append(f"rel_c1_doubled={curve.rel_c1_doubled}")
        if len(curve.positive_ends):
            bits.append(f"pos={_render_collection(curve.positive_ends)}")
        if len(curve.negative_ends):
            bits.append(f"neg={_render_collection(curve.negative_ends)}")
        out.append(" ".join(bits))
    if doc.curves:
        out.append("")
    for name in sorted(doc.covers):
        cover = doc.covers[name]
        base = cover.base.name
        if base.startswith("cyl(") and base.endswith(")"):
            base = "cyl:" + base[4:-1]
        bits = [f"cover {name} base={base} degree={cover.degree}"]
        if len(cover.positive_ends):
            bits.append(f"pos={_render_collection(cover.positive_ends)}")
        if len(cover.negative_ends):
            bits.append(f"neg={_render_collection(cover.negative_ends)}")
        if cover.marked_points:
            bits.append(f"marked={cover.marked_points}")
        if cover.constrained_branch_points:
            bits.append(f"constrained={cover.constrained_branch_points}")
        out.append(" ".join(bits))
    if doc.covers:
        out.append("")
    for name in sorted(doc.tables):
        table = doc.tables[name]
        out.append(f"table {name} {table.context_kind}={table.context_name}")
        for (pos_key, neg_key), count in table.sorted_entries():
            pos = "(" + ",".join(n if k == 1 else f"{n}^{k}" for n, k in pos_key) + ")"
            neg = "(" + ",".join(n if k == 1 else f"{n}^{k}" for n, k in neg_key) + ")"
            out.append(f"  {pos} {neg} {count}")
        out.append("end")
        out.append("")
    for name in sorted(doc.necks):
        neck = doc.necks[name]
        orbit_names = ",".join(o.name for o in neck.gamma_set)
        plus = neck.side_plus.name
        minus = neck.side_minus.name
        bits = [f"neck {name} orbits=({orbit_names}) plus={plus} minus={minus}"]
        if not neck.separating:
            bits.append("separating=no")
        out.append(" ".join(bits))
    if doc.necks:
        out.append("")
    while out and out[-1] == "":
        out.pop()
    return "\n".join(out) + "\n"
