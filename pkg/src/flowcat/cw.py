"""Face posets of finite regular CW complexes."""

from __future__ import annotations

import json
from dataclasses import dataclass
from itertools import combinations
from pathlib import Path

from .errors import CycleError, EmptyComplexError, ParseError
from .poset import FinitePoset, _bits, _find_cycle, _topological_order


def _vertex_key(v: str):
    return (0, int(v), "") if v.lstrip("-").isdigit() else (1, 0, v)


class FacePoset:
    """Cells of a regular CW complex ordered by the face relation.

    Cells are interned to ``0..n-1``.  ``down[i]`` is the bitmask of all
    faces of cell ``i`` (itself included), ``up[i]`` that of all cofaces.
    """

    def __init__(self, ids, dims, covers, regular_asserted=True):
        self.ids = tuple(ids)
        self.dims = tuple(int(d) for d in dims)
        if len(self.ids) != len(self.dims):
            raise ValueError("ids and dims differ in length")
        self.index = {c: i for i, c in enumerate(self.ids)}
        if len(self.index) != len(self.ids):
            raise ValueError("duplicate cell ids")
        self.regular_asserted = regular_asserted
        n = len(self.ids)
        self.facets = [[] for _ in range(n)]
        self.cofacets = [[] for _ in range(n)]
        for a, b in covers:
            ia = a if isinstance(a, int) else self.index[a]
            ib = b if isinstance(b, int) else self.index[b]
            self.facets[ib].append(ia)
            self.cofacets[ia].append(ib)
        for lst in self.facets + self.cofacets:
            lst.sort()
        succ = [set(c) for c in self.cofacets]
        order = _topological_order(succ)
        if order is None:
            raise CycleError([self.ids[i] for i in _find_cycle(succ)])
        down = [0] * n
        for v in order:
            m = 1 << v
            for f in self.facets[v]:
                m |= down[f]
            down[v] = m
        up = [0] * n
        for i, m in enumerate(down):
            for j in _bits(m):
                up[j] |= 1 << i
        self.down = down
        self.up = up

    def __len__(self):
        return len(self.ids)

    def __repr__(self):
        return "FacePoset(counts=%s)" % (self.cell_counts(),)

    @property
    def cells(self) -> range:
        return range(len(self.ids))

    @property
    def dim(self) -> int:
        return max(self.dims) if self.dims else -1

    def cell(self, cid: str) -> int:
        return self.index[cid]

    def label(self, i: int) -> str:
        return "[%s]" % self.ids[i]

    def is_face(self, a: int, b: int) -> bool:
        """a is a face of b (a <= b, reflexive)."""
        return bool((self.down[b] >> a) & 1)

    def is_proper_face(self, a: int, b: int) -> bool:
        return a != b and bool((self.down[b] >> a) & 1)

    def is_cover(self, a: int, b: int) -> bool:
        return self.dims[a] + 1 == self.dims[b] and self.is_face(a, b)

    def covers(self) -> list[tuple[int, int]]:
        return [(a, b) for b in self.cells for a in self.facets[b]]

    def proper_faces(self, b: int) -> list[int]:
        return list(_bits(self.down[b] & ~(1 << b)))

    def proper_cofaces(self, a: int) -> list[int]:
        return list(_bits(self.up[a] & ~(1 << a)))

    def cell_counts(self) -> tuple[int, ...]:
        counts = [0] * (self.dim + 1)
        for d in self.dims:
            counts[d] += 1
        return tuple(counts)

    def euler_characteristic(self) -> int:
        return sum((-1) ** d * k for d, k in enumerate(self.cell_counts()))

    def poset(self) -> FinitePoset:
        return FinitePoset(range(len(self)), self.down, label=self.label)

    def to_json(self) -> str:
        data = {"cells": [{"id": c, "dim": d} for c, d in zip(self.ids, self.dims)],
                "covers": [[self.ids[a], self.ids[b]] for a, b in self.covers()],
                "regular_asserted": self.regular_asserted}
        return json.dumps(data, indent=1)

    @classmethod
    def from_json(cls, text: str) -> "FacePoset":
        try:
            data = json.loads(text)
            ids = [c["id"] for c in data["cells"]]
            dims = [c["dim"] for c in data["cells"]]
            covers = [tuple(p) for p in data["covers"]]
            reg = bool(data.get("regular_asserted", False))
        except (ValueError, KeyError, TypeError) as exc:
            raise ParseError("bad face-poset JSON: %s" % exc) from exc
        unknown = {c for p in covers for c in p} - set(ids)
        if unknown:
            raise ParseError("covers mention unknown cells: %s" % sorted(unknown))
        return cls(ids, dims, covers, regular_asserted=reg)


@dataclass(frozen=True)
class SimplicialComplexInput:
    facets: tuple[frozenset, ...]

    @classmethod
    def of(cls, facets) -> "SimplicialComplexInput":
        return cls(tuple(frozenset(str(v) for v in f) for f in facets))

    def normalized(self) -> "SimplicialComplexInput":
        """Drop duplicate facets and facets contained in other facets."""
        fs = sorted(set(self.facets), key=len, reverse=True)
        keep = []
        for f in fs:
            if not any(f <= g for g in keep):
                keep.append(f)
        keep.sort(key=lambda f: sorted(map(_vertex_key, f)))
        return SimplicialComplexInput(tuple(keep))


def parse_simplicial(text: str) -> SimplicialComplexInput:
    """One facet per line, whitespace separated vertex ids, '#' comments."""
    facets = []
    for lineno, raw in enumerate(text.splitlines(), 1):
        line = raw.split("#", 1)[0].strip()
        if not line:
            continue
        verts = line.split()
        if len(set(verts)) != len(verts):
            raise ParseError("repeated vertex in facet %r" % line, lineno)
        if any("," in v or "[" in v or "]" in v for v in verts):
            raise ParseError("vertex ids may not contain ',' or brackets", lineno)
        facets.append(frozenset(verts))
    return SimplicialComplexInput(tuple(facets))


def cell_id(vertices) -> str:
    return ",".join(sorted(vertices, key=_vertex_key))


def from_simplicial_complex(sc: SimplicialComplexInput) -> FacePoset:
    """Face poset of a simplicial complex: every non-empty face of every facet."""
    if not sc.facets or not any(sc.facets):
        raise EmptyComplexError("simplicial complex has no facets")
    cells = set()
    for f in sc.normalized().facets:
        verts = sorted(f, key=_vertex_key)
        for k in range(1, len(verts) + 1):
            cells.update(combinations(verts, k))
    ordered = sorted(cells, key=lambda s: (len(s), [_vertex_key(v) for v in s]))
    ids = [",".join(s) for s in ordered]
    pos = {s: i for i, s in enumerate(ordered)}
    covers = []
    for s in ordered:
        if len(s) > 1:
            for i in range(len(s)):
                covers.append((pos[s[:i] + s[i + 1:]], pos[s]))
    return FacePoset(ids, [len(s) - 1 for s in ordered], covers)


def facets_of(fp: FacePoset) -> SimplicialComplexInput:
    """Maximal cells of a simplicial face poset, as vertex sets."""
    maximal = [i for i in fp.cells if not fp.cofacets[i]]
    return SimplicialComplexInput.of(fp.ids[i].split(",") for i in maximal)


def validate_regular(fp: FacePoset) -> tuple[bool, list[str]]:
    """Necessary combinatorial conditions for ``fp`` to be a regular CW face poset.

    Checks gradedness (covers raise dimension by one, vertices have no
    faces), that every 1-cell has exactly two vertices, and the diamond
    property: every interval of length two has exactly two middle elements.
    Passing does not prove regularity.
    """
    diag = []
    for b in fp.cells:
        if fp.dims[b] == 0 and fp.facets[b]:
            diag.append("0-cell %s has faces" % fp.ids[b])
        for a in fp.facets[b]:
            if fp.dims[a] + 1 != fp.dims[b]:
                diag.append("cover %s < %s changes dimension by %d"
                            % (fp.ids[a], fp.ids[b], fp.dims[b] - fp.dims[a]))
        if fp.dims[b] > 0 and not any(fp.dims[a] + 1 == fp.dims[b] for a in fp.facets[b]):
            diag.append("%d-cell %s has no codimension-one faces" % (fp.dims[b], fp.ids[b]))
        if fp.dims[b] == 1:
            nv = sum(1 for a in fp.facets[b] if fp.dims[a] == 0)
            if nv != 2:
                diag.append("1-cell %s has %d vertices" % (fp.ids[b], nv))
    for top in fp.cells:
        for bot in fp.proper_faces(top):
            if fp.dims[top] - fp.dims[bot] != 2:
                continue
            mid = (fp.down[top] & fp.up[bot]) & ~((1 << top) | (1 << bot))
            k = mid.bit_count()
            if k != 2:
                diag.append("interval [%s, %s] has %d middle cells"
                            % (fp.ids[bot], fp.ids[top], k))
    return (not diag, diag)


def torus_fixture() -> FacePoset:
    """3x3 square grid on the torus, opposite sides identified.

    Vertices ``p<x><y>``, horizontal edges ``h<x><y>`` from (x,y) to
    (x+1,y), vertical edges ``v<x><y>`` from (x,y) to (x,y+1), squares
    ``s<x><y>`` = [x,x+1] x [y,y+1]; coordinates mod 3.
    """
    ids, dims, covers = [], [], []
    grid = [(x, y) for y in range(3) for x in range(3)]
    for x, y in grid:
        ids.append("p%d%d" % (x, y))
        dims.append(0)
    for x, y in grid:
        ids.append("h%d%d" % (x, y))
        dims.append(1)
        covers += [("p%d%d" % (x, y), "h%d%d" % (x, y)),
                   ("p%d%d" % ((x + 1) % 3, y), "h%d%d" % (x, y))]
    for x, y in grid:
        ids.append("v%d%d" % (x, y))
        dims.append(1)
        covers += [("p%d%d" % (x, y), "v%d%d" % (x, y)),
                   ("p%d%d" % (x, (y + 1) % 3), "v%d%d" % (x, y))]
    for x, y in grid:
        s = "s%d%d" % (x, y)
        ids.append(s)
        dims.append(2)
        covers += [("h%d%d" % (x, y), s), ("h%d%d" % (x, (y + 1) % 3), s),
                   ("v%d%d" % (x, y), s), ("v%d%d" % ((x + 1) % 3, y), s)]
    return FacePoset(ids, dims, covers)


def load_complex(path, kind: str = "simplicial") -> FacePoset:
    text = Path(path).read_text()
    if kind == "simplicial":
        return from_simplicial_complex(parse_simplicial(text))
    if kind == "faceposet":
        return FacePoset.from_json(text)
    raise ValueError("unknown input kind %r" % kind)
