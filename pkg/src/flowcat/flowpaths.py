"""Flow paths, reduction, and the subpath order.

A flow path ``(e_1, u_1, ..., e_n, u_n; c)`` is stored as the tuple of
``(e_i, u_i)`` pairs plus the critical target ``c``.  Cells are the
interned integer ids of the underlying :class:`~flowcat.cw.FacePoset`.

Indices in this module follow the 1-based convention of the definitions:
``e_{n+1}`` means the target, and an embedding function ``phi`` is a tuple
``(phi(0), ..., phi(k))`` with ``phi(0) == 0`` and ``phi(k) == n + 1``.
"""

from __future__ import annotations

import json
from dataclasses import dataclass
from itertools import combinations

from .cw import FacePoset
from .errors import CapacityError, LengthError, OrderViolationError
from .morse import PartialMatching
from .poset import FinitePoset, _bits

DEFAULT_PATH_CAP = 10**6


@dataclass(frozen=True, order=True)
class FlowPath:
    steps: tuple[tuple[int, int], ...]
    target: int

    @property
    def length(self) -> int:
        return len(self.steps)

    @property
    def initial(self) -> int:
        return self.steps[0][0] if self.steps else self.target

    def e(self, i: int) -> int:
        """1-based lower cell; ``e(n+1)`` is the target."""
        return self.steps[i - 1][0] if i <= len(self.steps) else self.target

    def u(self, i: int) -> int:
        return self.steps[i - 1][1]

    def sort_key(self):
        return (self.target, len(self.steps), self.steps)

    def suffix(self, i: int) -> "FlowPath":
        return FlowPath(self.steps[i - 1:], self.target)


def trivial_path(c: int) -> FlowPath:
    return FlowPath((), c)


def path_label(fp: FacePoset, g: FlowPath) -> str:
    parts = []
    for e, u in g.steps:
        parts += [fp.label(e), fp.label(u)]
    head = ",".join(parts)
    return "(%s;%s)" % (head, fp.label(g.target)) if head else "(%s)" % fp.label(g.target)


def path_to_json(fp: FacePoset, g: FlowPath) -> dict:
    return {"steps": [{"e": fp.ids[e], "u": fp.ids[u]} for e, u in g.steps],
            "target": fp.ids[g.target]}


def path_from_json(fp: FacePoset, data: dict) -> FlowPath:
    steps = tuple((fp.index[s["e"]], fp.index[s["u"]]) for s in data["steps"])
    return FlowPath(steps, fp.index[data["target"]])


def path_problems(m: PartialMatching, g: FlowPath) -> list[str]:
    fp = m.fp
    out = []
    if not m.is_critical(g.target):
        out.append("target %s is not critical" % fp.ids[g.target])
    for i, (e, u) in enumerate(g.steps, 1):
        if u not in m.down:
            out.append("u_%d = %s is not in U" % (i, fp.ids[u]))
            continue
        if e != u and e != m.down[u]:
            out.append("e_%d is neither u_%d nor its matched face" % (i, i))
        nxt = g.e(i + 1)
        if not fp.is_proper_face(nxt, u):
            out.append("e_%d is not a proper face of u_%d" % (i + 1, i))
        elif nxt == m.down[u]:
            out.append("e_%d climbs back into u_%d through the matched pair" % (i + 1, i))
    return out


def is_flow_path(m: PartialMatching, g: FlowPath) -> bool:
    return not path_problems(m, g)


def enumerate_flow_paths(m: PartialMatching, cap: int = DEFAULT_PATH_CAP) -> list[FlowPath]:
    """All flow paths of an acyclic matching, by backward extension.

    Starting from each ``(c)``, a path with initial cell ``e`` is extended
    by ``(u, u)`` and ``(mu^-1(u), u)`` for every ``u`` in ``U`` having
    ``e`` as a proper face, except ``u = mu(e)``.  The descent ``u_i > e_{i+1}``
    never lands on ``mu^-1(u_i)``; otherwise ``(d, u, d, u, ...)`` would
    repeat forever.  Sorted by (target, length, steps).
    """
    fp = m.fp
    U = set(m.down)
    cofaces_in_u = {}
    frontier = [trivial_path(c) for c in m.critical]
    out = list(frontier)
    while frontier:
        nxt = []
        for g in frontier:
            e = g.initial
            ups = cofaces_in_u.get(e)
            if ups is None:
                # stepping into mu(e) from e itself is the matched pair, not a descent
                ups = cofaces_in_u[e] = [u for u in fp.proper_cofaces(e)
                                         if u in U and m.up.get(e) != u]
            for u in ups:
                nxt.append(FlowPath(((u, u),) + g.steps, g.target))
                nxt.append(FlowPath(((m.down[u], u),) + g.steps, g.target))
        if len(out) + len(nxt) > cap:
            raise CapacityError("more than %d flow paths" % cap)
        out.extend(nxt)
        frontier = nxt
    out.sort(key=FlowPath.sort_key)
    return out


def is_reducible_at(m: PartialMatching, g: FlowPath, i: int) -> bool:
    return m.fp.is_proper_face(g.e(i + 1), m.down[g.u(i)])


def is_reduced(m: PartialMatching, g: FlowPath) -> bool:
    return not any(is_reducible_at(m, g, i) for i in range(1, g.length + 1))


def _removed_steps(m: PartialMatching, g: FlowPath) -> list[int]:
    # right to left: removing step i only changes the successor seen by i-1
    fp = m.fp
    removed = []
    succ = g.target
    for i in range(g.length, 0, -1):
        e, u = g.steps[i - 1]
        if fp.is_proper_face(succ, m.down[u]):
            removed.append(i)
        else:
            succ = e
    return removed[::-1]


def reducible_intervals(m: PartialMatching, g: FlowPath) -> list[tuple[int, int]]:
    """Maximal runs ``(a, b)`` of step indices removed by :func:`reduce`.

    Steps ``a..b`` (inclusive, 1-based) all return into the boundary of
    the matched face of their own ``u`` as seen from the next kept cell.
    """
    runs = []
    for i in _removed_steps(m, g):
        if runs and runs[-1][1] == i - 1:
            runs[-1][1] = i
        else:
            runs.append([i, i])
    return [tuple(r) for r in runs]


def remove_step(g: FlowPath, i: int) -> FlowPath:
    return FlowPath(g.steps[:i - 1] + g.steps[i:], g.target)


def reduce(m: PartialMatching, g: FlowPath) -> FlowPath:
    drop = set(_removed_steps(m, g))
    if not drop:
        return g
    return FlowPath(tuple(s for i, s in enumerate(g.steps, 1) if i not in drop), g.target)


def reduce_bruteforce(m: PartialMatching, g: FlowPath) -> set:
    """All terminal results of removing one reducible step at a time, in every order."""
    seen = {}

    def walk(h):
        if h in seen:
            return seen[h]
        spots = [i for i in range(1, h.length + 1) if is_reducible_at(m, h, i)]
        if not spots:
            res = {h}
        else:
            res = set()
            for i in spots:
                res |= walk(remove_step(h, i))
        seen[h] = res
        return res

    return walk(g)


def embeddings(fp: FacePoset, g: FlowPath, h: FlowPath, first_only: bool = False):
    """Embedding functions witnessing ``g <= h``, each as a tuple ``phi(0..k)``.

    Depth-first over strictly increasing ``phi``: at step ``j`` either
    stop (``k = j``, ``phi(k) = n+1``) or jump to a position ``q`` with
    ``u'_q = u_j``, requiring ``e_j`` to be a face of every ``e'_p`` passed
    over.
    """
    m, n = g.length, h.length
    down = fp.down
    he = [None] + [s[0] for s in h.steps] + [h.target]
    hu = [None] + [s[1] for s in h.steps]

    def dfs(j, prev, phi):
        ej = g.e(j)
        bit = 1 << ej
        # stop here: e_j must be a face of e'_p for every p in (prev, n+1]
        p = prev + 1
        while p <= n + 1 and down[he[p]] & bit:
            p += 1
        if p == n + 2:
            yield phi + (n + 1,)
            if first_only:
                return
        if j > m:
            return
        uj = g.u(j)
        for q in range(prev + 1, min(p, n + 1)):
            if hu[q] == uj:
                for res in dfs(j + 1, q, phi + (q,)):
                    yield res
                    if first_only:
                        return

    if not down[h.initial] >> g.initial & 1:
        return iter(())
    return dfs(1, 0, (0,))


def embedding(fp: FacePoset, g: FlowPath, h: FlowPath):
    """The embedding function for ``g <= h``, or None."""
    return next(embeddings(fp, g, h, first_only=True), None)


def subpath_leq(fp: FacePoset, g: FlowPath, h: FlowPath) -> bool:
    return embedding(fp, g, h) is not None


def is_embedding(fp: FacePoset, g: FlowPath, h: FlowPath, phi) -> bool:
    """Literal check of the four defining conditions."""
    m, n = g.length, h.length
    k = len(phi) - 1
    if not 1 <= k <= m + 1 or phi[0] != 0 or phi[k] != n + 1:
        return False
    if any(a >= b for a, b in zip(phi, phi[1:])):
        return False
    for j in range(1, k):
        if g.u(j) != h.u(phi[j]):
            return False
    for j in range(1, k + 1):
        for p in range(phi[j - 1] + 1, phi[j] + 1):
            if not fp.is_face(g.e(j), h.e(p)):
                return False
    return True


def embeddings_bruteforce(fp: FacePoset, g: FlowPath, h: FlowPath) -> list[tuple]:
    m, n = g.length, h.length
    found = []
    for k in range(1, m + 2):
        for mid in combinations(range(1, n + 1), k - 1):
            phi = (0,) + mid + (n + 1,)
            if is_embedding(fp, g, h, phi):
                found.append(phi)
    return found


def upgrade(g: FlowPath) -> FlowPath:
    """Replace ``e_1`` by ``u_1``."""
    if not g.steps:
        raise LengthError("cannot upgrade a path of length 0")
    u1 = g.steps[0][1]
    return FlowPath(((u1, u1),) + g.steps[1:], g.target)


class FlowPoset:
    """Flow paths of one matching ordered by the subpath relation."""

    def __init__(self, m: PartialMatching, paths, poset: FinitePoset, reduced_only: bool):
        self.matching = m
        self.paths = tuple(paths)
        self.poset = poset
        self.reduced_only = reduced_only
        self.index = poset.index
        self.reduced_flags = tuple(is_reduced(m, g) for g in self.paths)

    def __len__(self):
        return len(self.paths)

    def leq(self, g: FlowPath, h: FlowPath) -> bool:
        return self.poset.leq(g, h)

    def label(self, g: FlowPath) -> str:
        return path_label(self.matching.fp, g)

    def by_target(self) -> dict[int, list[FlowPath]]:
        out = {c: [] for c in self.matching.critical}
        for g in self.paths:
            out[g.target].append(g)
        return out

    def to_json(self) -> str:
        fp = self.matching.fp
        data = {"paths": [dict(path_to_json(fp, g), reduced=r)
                          for g, r in zip(self.paths, self.reduced_flags)],
                "covers": [[self.index[a], self.index[b]]
                           for a, b in self.poset.cover_pairs()]}
        return json.dumps(data, indent=1)


def subpath_poset(fp: FacePoset, paths, label=str) -> FinitePoset:
    """Relation table of the subpath order on ``paths``, verified to be a partial order."""
    paths = list(paths)
    n = len(paths)
    by_initial = {}
    for i, h in enumerate(paths):
        by_initial.setdefault(h.initial, []).append(i)
    below = [1 << i for i in range(n)]
    for i, g in enumerate(paths):
        # e_1 must be a face of e'_1, so only look at paths starting above g
        for e in _bits(fp.up[g.initial]):
            for j in by_initial.get(e, ()):
                if j != i and embedding(fp, g, paths[j]) is not None:
                    below[j] |= 1 << i
    poset = FinitePoset(paths, below, label=label)
    problems = poset.check_axioms()
    if problems:
        raise OrderViolationError("subpath relation is not a partial order: %s"
                                  % "; ".join(problems[:5]))
    return poset


def flow_poset(m: PartialMatching, reduced_only: bool = False,
               cap: int = DEFAULT_PATH_CAP, paths=None) -> FlowPoset:
    if paths is None:
        paths = enumerate_flow_paths(m, cap)
    if reduced_only:
        paths = [g for g in paths if is_reduced(m, g)]
    fp = m.fp
    poset = subpath_poset(fp, paths, label=lambda g: path_label(fp, g))
    return FlowPoset(m, paths, poset, reduced_only)


def suffixes(g: FlowPath) -> list[FlowPath]:
    """``g^(1), ..., g^(n+1)``; the last one is ``(c)``."""
    return [g.suffix(i) for i in range(1, g.length + 2)]


def stable_cells(m: PartialMatching, g: FlowPath) -> set[FlowPath]:
    """Flow paths indexing the cells of the stable subspace along ``g``."""
    out = set(suffixes(g))
    for i, (e, u) in enumerate(g.steps, 1):
        if e in m.up:
            out.add(upgrade(g.suffix(i)))
    return out


def stable_space(m: PartialMatching, c: int, paths=None) -> set[FlowPath]:
    if paths is None:
        paths = enumerate_flow_paths(m)
    out = set()
    for g in paths:
        if g.target == c and is_reduced(m, g):
            out |= stable_cells(m, g)
    return out


def stable_cell_dim(m: PartialMatching, g: FlowPath) -> int:
    """Dimension of the cell indexed by a reduced path: dim c plus the number of steps with e_i = u_i."""
    return m.fp.dims[g.target] + sum(1 for e, u in g.steps if e == u)


def stable_face_poset(fpo: FlowPoset) -> FacePoset:
    """The reduced flow-path poset as a graded face poset, ready for :func:`validate_regular`."""
    m = fpo.matching
    paths = fpo.paths
    ids = [path_label(m.fp, g) for g in paths]
    dims = [stable_cell_dim(m, g) for g in paths]
    covers = [(fpo.index[a], fpo.index[b]) for a, b in fpo.poset.cover_pairs()]
    return FacePoset(ids, dims, covers, regular_asserted=False)
