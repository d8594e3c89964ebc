"""Discrete Morse functions and acyclic partial matchings."""

from __future__ import annotations

import random
from dataclasses import dataclass
from pathlib import Path

from .cw import FacePoset
from .errors import CycleError, NotMorseError, ParseError
from .poset import FinitePoset, linear_extension, transitive_closure


@dataclass(frozen=True)
class DiscreteMorseFunction:
    fp: FacePoset
    values: tuple[int, ...]

    @classmethod
    def from_mapping(cls, fp: FacePoset, mapping: dict) -> "DiscreteMorseFunction":
        missing = [c for c in fp.ids if c not in mapping]
        if missing:
            raise ValueError("no value for cells %s" % missing)
        return cls(fp, tuple(int(mapping[c]) for c in fp.ids))

    def __call__(self, cell: int) -> int:
        return self.values[cell]

    def as_dict(self) -> dict[str, int]:
        return dict(zip(self.fp.ids, self.values))


def upper_neighbors(f: DiscreteMorseFunction, e: int) -> list[int]:
    """Cofaces e' of codimension one with f(e) >= f(e')."""
    return [b for b in f.fp.cofacets[e] if f.fp.dims[b] == f.fp.dims[e] + 1
            and f(e) >= f(b)]


def lower_neighbors(f: DiscreteMorseFunction, e: int) -> list[int]:
    return [a for a in f.fp.facets[e] if f.fp.dims[a] + 1 == f.fp.dims[e]
            and f(a) >= f(e)]


def is_discrete_morse(f: DiscreteMorseFunction) -> tuple[bool, list[int]]:
    bad = [e for e in f.fp.cells
           if len(upper_neighbors(f, e)) > 1 or len(lower_neighbors(f, e)) > 1]
    return (not bad, bad)


class PartialMatching:
    """A bijection ``D -> U`` of disjoint cell sets with ``d`` a codim-1 face of ``mu(d)``."""

    def __init__(self, fp: FacePoset, pairs):
        self.fp = fp
        up, down = {}, {}
        for d, u in pairs:
            d = d if isinstance(d, int) else fp.index[d]
            u = u if isinstance(u, int) else fp.index[u]
            if not fp.is_cover(d, u):
                raise ValueError("%s is not a codimension-one face of %s"
                                 % (fp.ids[d], fp.ids[u]))
            if d in up or d in down or u in up or u in down:
                raise ValueError("cell matched twice in pair (%s, %s)"
                                 % (fp.ids[d], fp.ids[u]))
            up[d] = u
            down[u] = d
        self.up = up
        self.down = down
        self.critical = tuple(c for c in fp.cells if c not in up and c not in down)

    @property
    def pairs(self) -> list[tuple[int, int]]:
        return sorted(self.up.items())

    def __eq__(self, other):
        return (isinstance(other, PartialMatching) and other.fp is self.fp
                and other.up == self.up)

    def __hash__(self):
        return hash(tuple(self.pairs))

    def __repr__(self):
        return "PartialMatching(%d pairs, %d critical)" % (len(self.up), len(self.critical))

    def is_critical(self, c: int) -> bool:
        return c not in self.up and c not in self.down

    def mu(self, d: int) -> int:
        return self.up[d]

    def mu_inv(self, u: int) -> int:
        return self.down[u]

    def to_text(self) -> str:
        ids = self.fp.ids
        return "".join("%s %s\n" % (ids[d], ids[u]) for d, u in self.pairs)


def matching_from_function(f: DiscreteMorseFunction) -> PartialMatching:
    ok, bad = is_discrete_morse(f)
    if not ok:
        raise NotMorseError("not a discrete Morse function at %s"
                            % [f.fp.ids[e] for e in bad])
    pairs = []
    for e in f.fp.cells:
        nb = upper_neighbors(f, e)
        if nb:
            pairs.append((e, nb[0]))
    return PartialMatching(f.fp, pairs)


def _gradient_digraph(m: PartialMatching) -> dict[int, list[int]]:
    # arc u -> mu(d) for every matched d that is a codim-1 face of u other than mu^-1(u)
    fp = m.fp
    arcs = {}
    for u, du in m.down.items():
        out = []
        for d in fp.facets[u]:
            if d != du and d in m.up and fp.dims[d] + 1 == fp.dims[u]:
                out.append(m.up[d])
        arcs[u] = out
    return arcs


def is_acyclic(m: PartialMatching) -> tuple[bool, list[int]]:
    """Acyclicity via cycle detection on the matched digraph.

    Nodes are the cells of ``U``; there is an arc ``u -> mu(d)`` whenever
    ``d`` is a matched codimension-one face of ``u`` other than
    ``mu^-1(u)``.  A directed cycle is exactly a closed Forman path.  The
    witness is the closed Forman path ``[d_1, ..., d_n]`` of lower cells.
    """
    arcs = _gradient_digraph(m)
    color = {u: 0 for u in arcs}
    parent = {}
    for root in sorted(arcs):
        if color[root]:
            continue
        color[root] = 1
        stack = [(root, iter(arcs[root]))]
        while stack:
            v, it = stack[-1]
            for w in it:
                if color[w] == 0:
                    color[w] = 1
                    parent[w] = v
                    stack.append((w, iter(arcs[w])))
                    break
                if color[w] == 1:
                    cyc = [v]
                    while cyc[-1] != w:
                        cyc.append(parent[cyc[-1]])
                    cyc.reverse()
                    return False, [m.down[u] for u in cyc]
            else:
                color[v] = 2
                stack.pop()
    return True, []


def forman_paths(m: PartialMatching):
    """Every Forman path (d_1, ..., d_n) as a tuple of cells, n >= 1.

    Exponential; meant as a reference enumeration on small complexes.
    """
    fp = m.fp

    def extend(path, used):
        yield tuple(path)
        u = m.up[path[-1]]
        for d in fp.facets[u]:
            if d in m.up and d not in used and fp.dims[d] == fp.dims[path[0]]:
                path.append(d)
                used.add(d)
                yield from extend(path, used)
                used.discard(d)
                path.pop()

    for d in sorted(m.up):
        yield from extend([d], {d})


def is_gradient(m: PartialMatching, path) -> bool:
    return len(path) == 1 or not m.fp.is_proper_face(path[0], m.up[path[-1]])


def is_acyclic_bruteforce(m: PartialMatching) -> bool:
    return all(is_gradient(m, p) for p in forman_paths(m))


def flow_relation(m: PartialMatching):
    """Pairs (e', e) with e |>_1 e', i.e. e flows one step down to e'."""
    fp = m.fp
    for e in fp.cells:
        for e2 in fp.proper_faces(e):
            if m.up.get(e2) != e:
                yield (e2, e)
        if e in m.up:
            yield (m.up[e], e)


def unrhd_order(m: PartialMatching) -> FinitePoset:
    """The flow order on cells, with ``x <= y`` meaning ``y`` flows down to ``x``.

    With the empty matching this is the face order.  Raises
    :class:`CycleError` when ``m`` is not acyclic.
    """
    fp = m.fp
    try:
        return transitive_closure(fp.cells, flow_relation(m), label=fp.label)
    except CycleError as exc:
        raise CycleError([fp.ids[c] for c in exc.cycle]) from None


def faithful_function(m: PartialMatching) -> DiscreteMorseFunction:
    """Injective integer Morse function inducing ``m``: rank in a linear extension of the flow order."""
    order = linear_extension(unrhd_order(m))
    values = [0] * len(m.fp)
    for rank, cell in enumerate(order):
        values[cell] = rank
    return DiscreteMorseFunction(m.fp, tuple(values))


def is_faithful(f: DiscreteMorseFunction) -> bool:
    if len(set(f.values)) != len(f.values):
        return False
    m = matching_from_function(f)
    fp = f.fp
    for b in fp.cells:
        for a in fp.proper_faces(b):
            if m.up.get(a) != b and not f(a) < f(b):
                return False
    return True


def equivalent(f: DiscreteMorseFunction, g: DiscreteMorseFunction) -> bool:
    if f.fp is not g.fp:
        raise ValueError("functions live on different complexes")
    return all((f(a) < f(b)) == (g(a) < g(b)) for a, b in f.fp.covers()
               if f.fp.is_cover(a, b))


def greedy_matching(fp: FacePoset, seed: int) -> PartialMatching:
    """Seeded random maximal acyclic matching.

    Cover pairs are visited in a shuffled order; a pair of free cells is
    kept when the enlarged matching stays acyclic.
    """
    rng = random.Random(seed)
    pairs = [(a, b) for a, b in fp.covers() if fp.is_cover(a, b)]
    pairs.sort()
    rng.shuffle(pairs)
    chosen = {}
    used = set()
    current = PartialMatching(fp, [])
    for d, u in pairs:
        if d in used or u in used:
            continue
        chosen[d] = u
        trial = PartialMatching(fp, chosen.items())
        if is_acyclic(trial)[0]:
            used.update((d, u))
            current = trial
        else:
            del chosen[d]
    return current


def _data_lines(text: str):
    for lineno, raw in enumerate(text.splitlines(), 1):
        line = raw.split("#", 1)[0].strip()
        if line:
            yield lineno, line.split()


def parse_matching(fp: FacePoset, text: str) -> PartialMatching:
    """Lines ``d_id u_id``; '#' starts a comment."""
    pairs = []
    for lineno, parts in _data_lines(text):
        if len(parts) != 2:
            raise ParseError("expected 'd_id u_id'", lineno)
        for c in parts:
            if c not in fp.index:
                raise ParseError("unknown cell %r" % c, lineno)
        pairs.append((fp.index[parts[0]], fp.index[parts[1]]))
    try:
        return PartialMatching(fp, pairs)
    except ValueError as exc:
        raise ParseError(str(exc)) from exc


def parse_morse(fp: FacePoset, text: str) -> DiscreteMorseFunction:
    """Lines ``cell_id integer``.  Non-integer values are rejected."""
    values = {}
    for lineno, parts in _data_lines(text):
        if len(parts) != 2:
            raise ParseError("expected 'cell_id integer'", lineno)
        cid, val = parts
        if cid not in fp.index:
            raise ParseError("unknown cell %r" % cid, lineno)
        try:
            values[cid] = int(val)
        except ValueError:
            raise ParseError("value %r is not an integer" % val, lineno) from None
    missing = [c for c in fp.ids if c not in values]
    if missing:
        raise ParseError("no value for cells: %s" % ", ".join(missing))
    return DiscreteMorseFunction.from_mapping(fp, values)


def load_matching(fp: FacePoset, path) -> PartialMatching:
    return parse_matching(fp, Path(path).read_text())


def load_morse(fp: FacePoset, path) -> DiscreteMorseFunction:
    return parse_morse(fp, Path(path).read_text())
