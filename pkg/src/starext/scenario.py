"""Scenario files: named definitions, points, fragment, formulas, suites.

Line-oriented sections, ``#`` comments allowed anywhere::

    [config]
    horizon = 10000
    seed = 42
    tiebreak = least          # or seeded:<n>
    scale = full              # or quick (smaller suite sizes)

    [functions]
    def parity = ifeq(x mod 2, 0, 1, 0)
    def2 add2 = p1(x) + p2(x)   # binary, usable in formulas

    [points]
    omega = x

    [fragment]
    functions = untag, tag1, tag2
    points = omega, pt1
    depth = 0
    sample = 0..499

    [formulas]
    x + 0 = x

    [closed]
    E1 = [(parity, std1), (parity, std0)]

    [suites]
    axioms, boolean, equalizer

The whole file is parsed and every name resolved before any oracle work
starts; errors carry the offending line number.
"""

from __future__ import annotations

from dataclasses import dataclass, field
from pathlib import Path

from .errors import ParseError
from .funlang import FnExpr, parse_fn
from .nary import NaryFn
from .oracle import OracleConfig
from .transfer import Formula, Registry, parse_formula

KNOWN_SUITES = (
    "axioms",
    "negative",
    "boolean",
    "equalizer",
    "finite",
    "nary",
    "transfer",
    "keisler",
    "topology",
    "toy_comp",
    "toy_diag",
    "toy_irredundant",
)


@dataclass
class FragmentSpec:
    functions: list[str] = field(default_factory=list)
    points: list[str] = field(default_factory=list)
    depth: int = 0
    sample_stop: int = 500


@dataclass
class Scenario:
    name: str
    horizon: int = 10_000
    seed: int = 0
    tiebreak: str = "least"
    scale: str = "full"
    defs: dict[str, FnExpr] = field(default_factory=dict)
    binary_fns: dict[str, NaryFn] = field(default_factory=dict)
    points: dict[str, FnExpr] = field(default_factory=dict)
    fragment: FragmentSpec = field(default_factory=FragmentSpec)
    formulas: list[tuple[str, Formula]] = field(default_factory=list)
    closed_sets: dict[str, list[tuple[str, str]]] = field(default_factory=dict)
    suites: list[str] = field(default_factory=list)

    def oracle_config(self, horizon: int | None = None,
                      tiebreak: str | None = None) -> OracleConfig:
        return OracleConfig(
            horizon=horizon or self.horizon,
            tiebreak=tiebreak or self.tiebreak,
        )

    def formula_registry(self) -> Registry:
        unary = {
            name: NaryFn(1, expr, name=name) for name, expr in self.defs.items()
        }
        merged = dict(unary)
        merged.update(self.binary_fns)
        return Registry.default().with_functions(merged)


def _strip(line: str) -> str:
    return line.split("#", 1)[0].strip()


def _parse_kv(line: str, lineno: int) -> tuple[str, str]:
    if "=" not in line:
        raise ParseError("expected 'key = value'", lineno, 1)
    key, _, value = line.partition("=")
    return key.strip(), value.strip()


def parse_scenario(text: str, name: str = "<scenario>") -> Scenario:
    sc = Scenario(name=name)
    section = None
    sample_range = (0, 500)
    for lineno, raw in enumerate(text.splitlines(), start=1):
        line = _strip(raw)
        if not line:
            continue
        if line.startswith("[") and line.endswith("]"):
            section = line[1:-1].strip().lower()
            if section not in (
                "config", "functions", "points", "fragment",
                "formulas", "closed", "suites",
            ):
                raise ParseError(f"unknown section [{section}]", lineno, 1)
            continue
        if section is None:
            raise ParseError("content before any section header", lineno, 1)

        if section == "config":
            key, value = _parse_kv(line, lineno)
            if key == "horizon":
                sc.horizon = int(value)
            elif key == "seed":
                sc.seed = int(value)
            elif key == "tiebreak":
                sc.tiebreak = value
            elif key == "scale":
                if value not in ("full", "quick"):
                    raise ParseError(f"scale must be full or quick, got {value!r}", lineno, 1)
                sc.scale = value
            else:
                raise ParseError(f"unknown config key {key!r}", lineno, 1)

        elif section == "functions":
            if line.startswith("def2 "):
                head, _, body = line[5:].partition("=")
                fname = head.strip()
                if not fname.isidentifier():
                    raise ParseError(f"bad name {fname!r}", lineno, 1)
                try:
                    expr = parse_fn(body, sc.defs)
                except ParseError as exc:
                    raise ParseError(f"in def2 {fname}: {exc}", lineno, 1)
                sc.binary_fns[fname] = NaryFn(2, expr, name=fname)
            elif line.startswith("def "):
                head, _, body = line[4:].partition("=")
                fname = head.strip()
                if not fname.isidentifier():
                    raise ParseError(f"bad name {fname!r}", lineno, 1)
                if fname in sc.defs:
                    raise ParseError(f"duplicate definition {fname!r}", lineno, 1)
                try:
                    sc.defs[fname] = parse_fn(body, sc.defs)
                except ParseError as exc:
                    raise ParseError(f"in def {fname}: {exc}", lineno, 1)
            else:
                raise ParseError("expected 'def name = expr'", lineno, 1)

        elif section == "points":
            key, value = _parse_kv(line, lineno)
            try:
                sc.points[key] = parse_fn(value, sc.defs)
            except ParseError as exc:
                raise ParseError(f"in point {key}: {exc}", lineno, 1)

        elif section == "fragment":
            key, value = _parse_kv(line, lineno)
            if key == "functions":
                names = [n.strip() for n in value.split(",") if n.strip()]
                for n in names:
                    if n not in sc.defs:
                        raise ParseError(f"fragment function {n!r} undefined", lineno, 1)
                sc.fragment.functions = names
            elif key == "points":
                names = [n.strip() for n in value.split(",") if n.strip()]
                for n in names:
                    if n not in sc.points:
                        raise ParseError(f"fragment point {n!r} undefined", lineno, 1)
                sc.fragment.points = names
            elif key == "depth":
                sc.fragment.depth = int(value)
            elif key == "sample":
                lo, _, hi = value.partition("..")
                if int(lo) != 0:
                    raise ParseError("sample must start at 0", lineno, 1)
                sample_range = (0, int(hi) + 1)
            else:
                raise ParseError(f"unknown fragment key {key!r}", lineno, 1)

        elif section == "formulas":
            try:
                phi = parse_formula(line, sc.formula_registry())
            except ParseError as exc:
                raise ParseError(f"in formula: {exc}", lineno, 1)
            sc.formulas.append((line, phi))

        elif section == "closed":
            key, value = _parse_kv(line, lineno)
            value = value.strip()
            if not (value.startswith("[") and value.endswith("]")):
                raise ParseError("closed set must be [(fn, point), ...]", lineno, 1)
            inner = value[1:-1].strip()
            pairs: list[tuple[str, str]] = []
            if inner:
                for chunk in inner.split("),"):
                    chunk = chunk.strip().lstrip("(").rstrip(")").strip()
                    parts = [p.strip() for p in chunk.split(",")]
                    if len(parts) != 2:
                        raise ParseError(f"bad pair {chunk!r}", lineno, 1)
                    fname, pname = parts
                    if fname not in sc.defs:
                        raise ParseError(f"closed-set function {fname!r} undefined", lineno, 1)
                    if pname not in sc.points:
                        raise ParseError(f"closed-set point {pname!r} undefined", lineno, 1)
                    pairs.append((fname, pname))
            sc.closed_sets[key] = pairs

        elif section == "suites":
            for n in line.split(","):
                n = n.strip()
                if not n:
                    continue
                if n not in KNOWN_SUITES:
                    raise ParseError(f"unknown suite {n!r}", lineno, 1)
                sc.suites.append(n)

    sc.fragment.sample_stop = sample_range[1]
    return sc


def load_scenario(path: str | Path) -> Scenario:
    path = Path(path)
    return parse_scenario(path.read_text(), name=path.name)


def bundled_scenario_path(name: str) -> Path:
    """Path of a scenario shipped with the package."""
    base = Path(__file__).parent / "scenarios"
    for candidate in (base / name, base / f"{name}.scn"):
        if candidate.exists():
            return candidate
    raise FileNotFoundError(f"no bundled scenario {name!r}")
