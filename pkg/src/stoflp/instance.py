"""Problem data model and the line-oriented instance file format.

An instance file is split into bracketed sections::

    [facility]
    W H
    [departments]
    id area max_ratio
    ...
    [flow_lower]
    n rows of n reals
    [flow_upper]          # optional, defaults to flow_lower
    [rearrange_cost]      # optional: rc_lo rc_hi
    [initial_layout]      # optional: id x y w h per department
    [config]              # optional: life_cycle_scale T

Blank lines and ``#`` comments are ignored.
"""

from __future__ import annotations

import math
from dataclasses import dataclass, field
from typing import Iterator

import numpy as np

AREA_TOL = 1e-6

_KNOWN_SECTIONS = (
    "facility",
    "departments",
    "flow_lower",
    "flow_upper",
    "rearrange_cost",
    "initial_layout",
    "config",
)


class InstanceError(ValueError):
    """Instance data violates a model invariant."""


class ParseError(InstanceError):
    def __init__(self, message: str, line: int | None = None):
        self.line = line
        if line is not None:
            message = f"line {line}: {message}"
        super().__init__(message)


def _frozen(a) -> np.ndarray:
    arr = np.array(a, dtype=float)
    arr.setflags(write=False)
    return arr


@dataclass(frozen=True)
class Department:
    id: int
    area: float
    max_ratio: float

    def __post_init__(self):
        if not self.area > 0:
            raise InstanceError(f"department {self.id}: area must be positive, got {self.area}")
        if not self.max_ratio >= 1:
            raise InstanceError(f"department {self.id}: max_ratio must be >= 1, got {self.max_ratio}")


@dataclass(frozen=True, eq=False)
class FlowModel:
    """Independent uniform flows ``F_ij ~ U(lower_ij, upper_ij)``."""

    lower: np.ndarray
    upper: np.ndarray

    def __post_init__(self):
        lower = _frozen(self.lower)
        upper = _frozen(self.upper)
        if lower.ndim != 2 or lower.shape[0] != lower.shape[1]:
            raise InstanceError(f"flow matrix must be square, got shape {lower.shape}")
        if upper.shape != lower.shape:
            raise InstanceError("flow_lower and flow_upper differ in shape")
        if np.any(lower < 0):
            raise InstanceError("flow lower bounds must be non-negative")
        if np.any(lower > upper):
            i, j = np.argwhere(lower > upper)[0]
            raise InstanceError(f"flow lower bound exceeds upper bound at ({i + 1}, {j + 1})")
        if np.any(np.diag(lower) != 0) or np.any(np.diag(upper) != 0):
            raise InstanceError("flow matrices must have a zero diagonal")
        object.__setattr__(self, "lower", lower)
        object.__setattr__(self, "upper", upper)
        object.__setattr__(self, "mean", _frozen((lower + upper) / 2))
        object.__setattr__(self, "std", _frozen((upper - lower) / math.sqrt(12)))

    @property
    def n(self) -> int:
        return self.lower.shape[0]

    @property
    def is_deterministic(self) -> bool:
        return bool(np.all(self.lower == self.upper))

    def __eq__(self, other):
        if not isinstance(other, FlowModel):
            return NotImplemented
        return np.array_equal(self.lower, other.lower) and np.array_equal(self.upper, other.upper)

    __hash__ = None


@dataclass(frozen=True, eq=False)
class ProblemInstance:
    width: float
    height: float
    departments: tuple[Department, ...]
    flows: FlowModel
    initial_layout: np.ndarray | None = None  # rows (x, y, w, h) in department order
    rearrange_cost: tuple[float, float] | None = None
    life_cycle_scale: float = 1.0
    name: str = field(default="", compare=False)

    def __post_init__(self):
        object.__setattr__(self, "departments", tuple(self.departments))
        n = len(self.departments)
        if n < 2:
            raise InstanceError("at least two departments are required")
        if not (self.width > 0 and self.height > 0):
            raise InstanceError("facility width and height must be positive")
        if [d.id for d in self.departments] != list(range(1, n + 1)):
            raise InstanceError("department ids must be exactly 1..n in order")
        if self.flows.n != n:
            raise InstanceError(f"flow matrices are {self.flows.n}x{self.flows.n} for {n} departments")
        total = sum(d.area for d in self.departments)
        fa = self.width * self.height
        if abs(total - fa) > AREA_TOL * fa:
            raise InstanceError(f"department areas sum to {total!r}, facility area is {fa!r}")
        if self.rearrange_cost is not None:
            lo, hi = (float(v) for v in self.rearrange_cost)
            if lo < 0 or lo > hi:
                raise InstanceError(f"invalid rearrangement cost interval ({lo}, {hi})")
            object.__setattr__(self, "rearrange_cost", (lo, hi))
        if self.initial_layout is not None:
            rects = _frozen(self.initial_layout)
            if rects.shape != (n, 4):
                raise InstanceError(f"initial layout must have {n} rows of (x, y, w, h)")
            if np.any(rects[:, 2:] <= 0):
                raise InstanceError("initial layout rectangles need positive width and height")
            if self.rearrange_cost is None:
                raise InstanceError("an initial layout requires a [rearrange_cost] section")
            object.__setattr__(self, "initial_layout", rects)
        if not self.life_cycle_scale > 0:
            raise InstanceError("life_cycle_scale must be positive")

    @property
    def n(self) -> int:
        return len(self.departments)

    @property
    def areas(self) -> np.ndarray:
        return np.array([d.area for d in self.departments])

    @property
    def max_ratios(self) -> np.ndarray:
        return np.array([d.max_ratio for d in self.departments])

    @property
    def is_dynamic(self) -> bool:
        return self.initial_layout is not None

    def __eq__(self, other):
        if not isinstance(other, ProblemInstance):
            return NotImplemented
        if self.initial_layout is None or other.initial_layout is None:
            same_layout = self.initial_layout is None and other.initial_layout is None
        else:
            same_layout = np.array_equal(self.initial_layout, other.initial_layout)
        return (
            self.width == other.width
            and self.height == other.height
            and self.departments == other.departments
            and self.flows == other.flows
            and same_layout
            and self.rearrange_cost == other.rearrange_cost
            and self.life_cycle_scale == other.life_cycle_scale
        )

    __hash__ = None


def candidate_flows(flows: FlowModel, b: float) -> np.ndarray:
    """Deterministic flow matrix ``max(0, mean + b * std)`` with a zero diagonal."""
    out = np.maximum(0.0, flows.mean + b * flows.std)
    np.fill_diagonal(out, 0.0)
    return out


# -- text format ---------------------------------------------------------------


def iter_sections(text: str) -> Iterator[tuple[str, int, list[tuple[int, list[str]]]]]:
    """Yield ``(name, header_line, [(line_no, tokens), ...])`` per section."""
    name = None
    header = 0
    rows: list[tuple[int, list[str]]] = []
    for no, raw in enumerate(text.splitlines(), start=1):
        line = raw.split("#", 1)[0].strip()
        if not line:
            continue
        if line.startswith("["):
            if not line.endswith("]"):
                raise ParseError(f"malformed section header {line!r}", no)
            if name is not None:
                yield name, header, rows
            name, header, rows = line[1:-1].strip(), no, []
            continue
        if name is None:
            raise ParseError("data before the first section header", no)
        rows.append((no, line.split()))
    if name is not None:
        yield name, header, rows


def _reals(tokens: list[str], line: int, count: int | None = None) -> list[float]:
    if count is not None and len(tokens) != count:
        raise ParseError(f"expected {count} values, got {len(tokens)}", line)
    try:
        return [float(t) for t in tokens]
    except ValueError as exc:
        raise ParseError(str(exc), line) from None


def _int(token: str, line: int) -> int:
    try:
        return int(token)
    except ValueError:
        raise ParseError(f"expected an integer id, got {token!r}", line) from None


def _matrix(rows, n: int, header: int, what: str) -> np.ndarray:
    if len(rows) != n:
        raise ParseError(f"[{what}] needs {n} rows, found {len(rows)}", header)
    return np.array([_reals(tok, no, n) for no, tok in rows])


def _single(rows, header: int, what: str):
    if len(rows) != 1:
        raise ParseError(f"[{what}] takes exactly one line", header)
    return rows[0]


def parse_instance(text: str, name: str = "") -> ProblemInstance:
    sections = {}
    for sec, header, rows in iter_sections(text):
        if sec not in _KNOWN_SECTIONS:
            raise ParseError(f"unknown section [{sec}]", header)
        if sec in sections:
            raise ParseError(f"duplicate section [{sec}]", header)
        sections[sec] = (header, rows)
    for required in ("facility", "departments", "flow_lower"):
        if required not in sections:
            raise ParseError(f"missing section [{required}]")

    header, rows = sections["facility"]
    no, tok = _single(rows, header, "facility")
    width, height = _reals(tok, no, 2)

    header, rows = sections["departments"]
    depts = []
    for no, tok in rows:
        if len(tok) != 3:
            raise ParseError("department lines are 'id area max_ratio'", no)
        area, ratio = _reals(tok[1:], no)
        depts.append(Department(_int(tok[0], no), area, ratio))
    depts.sort(key=lambda d: d.id)
    n = len(depts)

    header, rows = sections["flow_lower"]
    lower = _matrix(rows, n, header, "flow_lower")
    if "flow_upper" in sections:
        header, rows = sections["flow_upper"]
        upper = _matrix(rows, n, header, "flow_upper")
    else:
        upper = lower.copy()

    rc = None
    if "rearrange_cost" in sections:
        header, rows = sections["rearrange_cost"]
        no, tok = _single(rows, header, "rearrange_cost")
        rc = tuple(_reals(tok, no, 2))

    initial = None
    if "initial_layout" in sections:
        header, rows = sections["initial_layout"]
        initial = parse_rect_rows(rows, n, header, "initial_layout")

    scale = 1.0
    if "config" in sections:
        for no, tok in sections["config"][1]:
            if len(tok) != 2 or tok[0] != "life_cycle_scale":
                raise ParseError("config lines are 'life_cycle_scale T'", no)
            scale = _reals(tok[1:], no)[0]

    return ProblemInstance(
        width=width,
        height=height,
        departments=depts,
        flows=FlowModel(lower, upper),
        initial_layout=initial,
        rearrange_cost=rc,
        life_cycle_scale=scale,
        name=name,
    )


def parse_rect_rows(rows, n: int, header: int, what: str) -> np.ndarray:
    if len(rows) != n:
        raise ParseError(f"[{what}] needs {n} rows, found {len(rows)}", header)
    rects = np.zeros((n, 4))
    seen = set()
    for no, tok in rows:
        if len(tok) != 5:
            raise ParseError("layout lines are 'id x y w h'", no)
        i = _int(tok[0], no)
        if not 1 <= i <= n or i in seen:
            raise ParseError(f"bad or repeated department id {i}", no)
        seen.add(i)
        rects[i - 1] = _reals(tok[1:], no)
    return rects


def load_instance(path) -> ProblemInstance:
    from pathlib import Path

    path = Path(path)
    return parse_instance(path.read_text(encoding="utf-8"), name=path.stem)


def _fmt(x: float) -> str:
    return repr(float(x))


def render_rects(rects: np.ndarray) -> list[str]:
    return [f"{i + 1} " + " ".join(_fmt(v) for v in r) for i, r in enumerate(rects)]


def render_instance(inst: ProblemInstance) -> str:
    """Canonical text form; ``parse_instance(render_instance(x)) == x`` exactly."""
    out = ["[facility]", f"{_fmt(inst.width)} {_fmt(inst.height)}", "", "[departments]"]
    out += [f"{d.id} {_fmt(d.area)} {_fmt(d.max_ratio)}" for d in inst.departments]
    out += ["", "[flow_lower]"]
    out += [" ".join(_fmt(v) for v in row) for row in inst.flows.lower]
    if not inst.flows.is_deterministic:
        out += ["", "[flow_upper]"]
        out += [" ".join(_fmt(v) for v in row) for row in inst.flows.upper]
    if inst.rearrange_cost is not None:
        out += ["", "[rearrange_cost]", " ".join(_fmt(v) for v in inst.rearrange_cost)]
    if inst.initial_layout is not None:
        out += ["", "[initial_layout]"] + render_rects(inst.initial_layout)
    if inst.life_cycle_scale != 1.0:
        out += ["", "[config]", f"life_cycle_scale {_fmt(inst.life_cycle_scale)}"]
    return "\n".join(out) + "\n"
