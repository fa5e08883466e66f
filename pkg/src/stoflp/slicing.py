"""Slicing-tree chromosome and its decoder.

A chromosome has three rows: a permutation of departments ``1..n``, a
permutation of slice numbers ``1..n-1`` and one orientation bit per slice
(0 horizontal, 1 vertical).  Slice number ``k`` cuts between positions ``k``
and ``k+1`` of the department row, and slices are applied in the order they
appear in the second row.  The lower-position group always receives the left
(vertical cut) or bottom (horizontal cut) part, sized in proportion to area.
"""

from __future__ import annotations

import math
from dataclasses import dataclass
from itertools import accumulate

import numpy as np

from .instance import ParseError, ProblemInstance, iter_sections, parse_rect_rows, render_rects


class ChromosomeError(ValueError):
    pass


@dataclass(frozen=True)
class Chromosome:
    dept: tuple[int, ...]
    slices: tuple[int, ...]
    orient: tuple[int, ...]

    def __post_init__(self):
        for name in ("dept", "slices", "orient"):
            row = getattr(self, name)
            if type(row) is not tuple or (row and type(row[0]) is not int):
                object.__setattr__(self, name, tuple(int(v) for v in row))

    @property
    def n(self) -> int:
        return len(self.dept)

    def validate(self) -> Chromosome:
        n = self.n
        if sorted(self.dept) != list(range(1, n + 1)):
            raise ChromosomeError(f"department row is not a permutation of 1..{n}: {self.dept}")
        if sorted(self.slices) != list(range(1, n)):
            raise ChromosomeError(f"slice row is not a permutation of 1..{n - 1}: {self.slices}")
        if len(self.orient) != n - 1 or any(b not in (0, 1) for b in self.orient):
            raise ChromosomeError(f"orientation row must hold {n - 1} bits: {self.orient}")
        return self

    @classmethod
    def random(cls, n: int, rng: np.random.Generator) -> Chromosome:
        return cls(
            tuple((rng.permutation(n) + 1).tolist()),
            tuple((rng.permutation(n - 1) + 1).tolist()),
            tuple(rng.integers(0, 2, n - 1).tolist()),
        )

    def rows(self) -> str:
        return "\n".join(" ".join(map(str, row)) for row in (self.dept, self.slices, self.orient))


@dataclass(frozen=True, eq=False)
class Layout:
    """One axis-aligned rectangle ``(x, y, w, h)`` per department (row ``i`` is department ``i+1``)."""

    rects: np.ndarray
    feasible: np.ndarray
    width: float
    height: float

    @classmethod
    def from_rects(cls, rects, instance: ProblemInstance) -> Layout:
        rects = np.array(rects, dtype=float)
        if rects.shape != (instance.n, 4):
            raise ValueError(f"expected {instance.n} rectangles, got shape {rects.shape}")
        rects.setflags(write=False)
        w, h = rects[:, 2], rects[:, 3]
        ratio = np.maximum(w, h) / np.minimum(w, h)
        feasible = ratio <= instance.max_ratios
        feasible.setflags(write=False)
        return cls(rects, feasible, instance.width, instance.height)

    @property
    def n(self) -> int:
        return self.rects.shape[0]

    @property
    def centers(self) -> np.ndarray:
        return self.rects[:, :2] + self.rects[:, 2:] / 2

    @property
    def aspect_ratios(self) -> np.ndarray:
        w, h = self.rects[:, 2], self.rects[:, 3]
        return np.maximum(w, h) / np.minimum(w, h)

    @property
    def p_inf(self) -> int:
        return int(np.count_nonzero(~self.feasible))

    def __eq__(self, other):
        if not isinstance(other, Layout):
            return NotImplemented
        return np.array_equal(self.rects, other.rects) and np.array_equal(self.feasible, other.feasible)

    __hash__ = None


def decode(chrom: Chromosome, instance: ProblemInstance, validate: bool = True) -> Layout:
    if validate:
        chrom.validate()
        if chrom.n != instance.n:
            raise ChromosomeError(f"chromosome has {chrom.n} departments, instance has {instance.n}")
    n = chrom.n
    areas = [instance.departments[d - 1].area for d in chrom.dept]
    prefix = [0.0, *accumulate(areas)]

    # blocks[b] = [first_pos, last_pos, x, y, w, h], positions 0-based
    blocks = [[0, n - 1, 0.0, 0.0, float(instance.width), float(instance.height)]]
    block_of = [0] * n
    for k, vertical in zip(chrom.slices, chrom.orient):
        b = block_of[k - 1]
        p, q, x, y, w, h = blocks[b]
        a_left = prefix[k] - prefix[p]
        a_right = prefix[q + 1] - prefix[k]
        frac = a_left / (a_left + a_right)
        if vertical:
            wl = w * frac
            blocks[b] = [p, k - 1, x, y, wl, h]
            blocks.append([k, q, x + wl, y, w - wl, h])
        else:
            hl = h * frac
            blocks[b] = [p, k - 1, x, y, w, hl]
            blocks.append([k, q, x, y + hl, w, h - hl])
        new = len(blocks) - 1
        for pos in range(k, q + 1):
            block_of[pos] = new

    rects = np.empty((n, 4))
    for p, _, x, y, w, h in blocks:
        rects[chrom.dept[p] - 1] = (x, y, w, h)
    return Layout.from_rects(rects, instance)


def rectilinear_distances(layout: Layout) -> np.ndarray:
    c = layout.centers
    return np.abs(c[:, None, 0] - c[None, :, 0]) + np.abs(c[:, None, 1] - c[None, :, 1])


def count_solutions(n: int, seeded: bool = False) -> int:
    """Size of the chromosome space, or of the heuristically seeded subspace."""
    if n < 2:
        raise ValueError("need at least two departments")
    if not seeded:
        return 2 ** (n - 1) * math.factorial(n) * math.factorial(n - 1)
    if n < 5:
        raise ValueError("the seeded count needs n >= 5 (four departments are fixed)")
    return 2 ** (n - 1) * math.factorial(n - 4) ** 2 * (n - 1)


def shared_edge(layout: Layout, i: int, j: int, tol: float = 1e-9) -> float:
    """Length of the boundary segment shared by departments ``i`` and ``j`` (1-based)."""
    x1, y1, w1, h1 = layout.rects[i - 1]
    x2, y2, w2, h2 = layout.rects[j - 1]
    scale = tol * max(layout.width, layout.height)
    if abs(x1 + w1 - x2) <= scale or abs(x2 + w2 - x1) <= scale:
        return max(0.0, min(y1 + h1, y2 + h2) - max(y1, y2))
    if abs(y1 + h1 - y2) <= scale or abs(y2 + h2 - y1) <= scale:
        return max(0.0, min(x1 + w1, x2 + w2) - max(x1, x2))
    return 0.0


# -- layout files and SVG --------------------------------------------------------


def render_layout(layout: Layout, meta: dict | None = None, chrom: Chromosome | None = None) -> str:
    out = ["[layout]", *render_rects(layout.rects)]
    if chrom is not None:
        out += ["", "[chromosome]", chrom.rows()]
    out += ["", "[meta]"]
    for key, value in (meta or {}).items():
        out.append(f"{key} {value!r}" if isinstance(value, float) else f"{key} {value}")
    out.append(f"p_inf {layout.p_inf}")
    out.append("feasible " + " ".join(str(int(f)) for f in layout.feasible))
    return "\n".join(out) + "\n"


def parse_layout(text: str, instance: ProblemInstance) -> tuple[Layout, dict, Chromosome | None]:
    rects = None
    meta: dict = {}
    chrom = None
    for name, header, rows in iter_sections(text):
        if name in ("layout", "initial_layout"):
            rects = parse_rect_rows(rows, instance.n, header, name)
        elif name == "meta":
            for _, tok in rows:
                meta[tok[0]] = " ".join(tok[1:])
        elif name == "chromosome":
            if len(rows) != 3:
                raise ParseError("[chromosome] needs three rows", header)
            try:
                chrom = Chromosome(*([int(t) for t in tok] for _, tok in rows)).validate()
            except ValueError as exc:
                raise ParseError(str(exc), header) from None
    if rects is None:
        raise ParseError("no [layout] section found")
    return Layout.from_rects(rects, instance), meta, chrom


def overlap_area(layout: Layout) -> float:
    """Total pairwise interior intersection area."""
    r = layout.rects
    x0, y0 = r[:, 0], r[:, 1]
    x1, y1 = x0 + r[:, 2], y0 + r[:, 3]
    dx = np.minimum(x1[:, None], x1[None, :]) - np.maximum(x0[:, None], x0[None, :])
    dy = np.minimum(y1[:, None], y1[None, :]) - np.maximum(y0[:, None], y0[None, :])
    inter = np.clip(dx, 0, None) * np.clip(dy, 0, None)
    return float(np.triu(inter, 1).sum())


def render_svg(layout: Layout, viewport: float = 800.0) -> str:
    """Deterministic SVG: facility outline plus one labelled rect per department."""
    scale = viewport / layout.width
    vh = layout.height * scale
    pad = 10.0
    out = [
        f'<svg xmlns="http://www.w3.org/2000/svg" width="{viewport + 2 * pad:.2f}" '
        f'height="{vh + 2 * pad:.2f}" viewBox="0 0 {viewport + 2 * pad:.2f} {vh + 2 * pad:.2f}">',
        f'<rect id="facility" x="{pad:.2f}" y="{pad:.2f}" width="{viewport:.2f}" height="{vh:.2f}" '
        'fill="none" stroke="black" stroke-width="2"/>',
    ]
    font = max(8.0, min(24.0, viewport / 40))
    for i, (x, y, w, h) in enumerate(layout.rects):
        sx, sw, sh = pad + x * scale, w * scale, h * scale
        sy = pad + vh - (y + h) * scale  # SVG y grows downwards
        fill = "#cfe2f3" if layout.feasible[i] else "#f4cccc"
        out.append(
            f'<rect class="dept" id="d{i + 1}" x="{sx:.2f}" y="{sy:.2f}" width="{sw:.2f}" '
            f'height="{sh:.2f}" fill="{fill}" stroke="black" stroke-width="1"/>'
        )
        out.append(
            f'<text x="{sx + sw / 2:.2f}" y="{sy + sh / 2:.2f}" font-size="{font:.1f}" '
            f'text-anchor="middle" dominant-baseline="middle">{i + 1}</text>'
        )
    out.append("</svg>")
    return "\n".join(out) + "\n"
