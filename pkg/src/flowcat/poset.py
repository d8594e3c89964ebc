"""Finite posets, closure operators and order complexes.

Elements are arbitrary hashable objects.  Internally every element is
interned to its position in ``FinitePoset.elements`` and the order relation
is stored as one down-set bitmask per element, so that ``x <= y`` is a shift
and a mask.
"""

from __future__ import annotations

import heapq
import json
from dataclasses import dataclass, field
from typing import Callable, Hashable, Iterable, Sequence

from .errors import CapacityError, CycleError

MAX_RELATION_PAIRS = 10**6


def _bits(mask: int):
    while mask:
        low = mask & -mask
        yield low.bit_length() - 1
        mask ^= low


class FinitePoset:
    """A finite partially ordered set.

    ``below[i]`` is a bitmask of the indices ``j`` with
    ``elements[j] <= elements[i]`` (reflexive).  Build instances with
    :func:`transitive_closure` or :meth:`from_leq`; the constructor trusts
    its input.
    """

    def __init__(self, elements: Sequence[Hashable], below: Sequence[int],
                 label: Callable[[Hashable], str] = str):
        self.elements = tuple(elements)
        self.index = {x: i for i, x in enumerate(self.elements)}
        if len(self.index) != len(self.elements):
            raise ValueError("duplicate poset elements")
        self.below = list(below)
        self.label = label
        npairs = sum(m.bit_count() for m in self.below)
        if npairs > MAX_RELATION_PAIRS:
            raise CapacityError("poset has %d relation pairs (cap %d)"
                                % (npairs, MAX_RELATION_PAIRS))
        n = len(self.elements)
        above = [0] * n
        for i, m in enumerate(self.below):
            for j in _bits(m):
                above[j] |= 1 << i
        self.above = above
        self._cover_below = None

    @classmethod
    def from_leq(cls, elements, leq: Callable, label=str) -> "FinitePoset":
        """Build from an order predicate evaluated on every ordered pair.

        The predicate is trusted to be a partial order; call
        :meth:`check_axioms` to verify.
        """
        elements = tuple(elements)
        below = []
        for i, y in enumerate(elements):
            m = 1 << i
            for j, x in enumerate(elements):
                if j != i and leq(x, y):
                    m |= 1 << j
            below.append(m)
        return cls(elements, below, label)

    def __len__(self):
        return len(self.elements)

    def __iter__(self):
        return iter(self.elements)

    def __contains__(self, x):
        return x in self.index

    def __repr__(self):
        return "FinitePoset(%d elements, %d covers)" % (len(self), len(self.cover_pairs()))

    def leq(self, x, y) -> bool:
        return bool((self.below[self.index[y]] >> self.index[x]) & 1)

    def lt(self, x, y) -> bool:
        return x != y and self.leq(x, y)

    def leq_idx(self, i: int, j: int) -> bool:
        return bool((self.below[j] >> i) & 1)

    def down_set(self, x) -> list:
        return [self.elements[j] for j in _bits(self.below[self.index[x]])]

    def up_set(self, x) -> list:
        return [self.elements[j] for j in _bits(self.above[self.index[x]])]

    def relation_count(self) -> int:
        return sum(m.bit_count() for m in self.below)

    @property
    def cover_below(self) -> list[int]:
        """Bitmask per element of the elements it covers (Hasse diagram)."""
        if self._cover_below is None:
            strict = [m & ~(1 << i) for i, m in enumerate(self.below)]
            cb = []
            for i, s in enumerate(strict):
                under = 0
                for j in _bits(s):
                    under |= strict[j]
                cb.append(s & ~under)
            self._cover_below = cb
        return self._cover_below

    def cover_index_pairs(self) -> list[tuple[int, int]]:
        return sorted((j, i) for i, m in enumerate(self.cover_below) for j in _bits(m))

    def cover_pairs(self) -> list[tuple]:
        return [(self.elements[a], self.elements[b]) for a, b in self.cover_index_pairs()]

    def relation_pairs(self) -> list[tuple]:
        """All pairs ``(x, y)`` with ``x <= y``, reflexive ones included."""
        return [(self.elements[j], self.elements[i])
                for i, m in enumerate(self.below) for j in _bits(m)]

    def subposet(self, elements: Iterable) -> "FinitePoset":
        keep = [self.index[x] for x in elements]
        pos = {old: new for new, old in enumerate(keep)}
        below = []
        for old in keep:
            m = 0
            for j in _bits(self.below[old]):
                if j in pos:
                    m |= 1 << pos[j]
            below.append(m)
        return FinitePoset([self.elements[i] for i in keep], below, self.label)

    def check_axioms(self) -> list[str]:
        """Exhaustive reflexivity / antisymmetry / transitivity scan."""
        problems = []
        n = len(self)
        for i in range(n):
            if not (self.below[i] >> i) & 1:
                problems.append("not reflexive at %s" % self.label(self.elements[i]))
            for j in _bits(self.below[i]):
                if j != i and (self.below[j] >> i) & 1:
                    if j < i:
                        problems.append("not antisymmetric: %s, %s" % (
                            self.label(self.elements[j]), self.label(self.elements[i])))
                if self.below[j] & ~self.below[i]:
                    problems.append("not transitive below %s" % self.label(self.elements[i]))
        return problems

    def is_valid(self) -> bool:
        return not self.check_axioms()

    def to_json(self) -> str:
        data = {"elements": [self.label(x) for x in self.elements],
                "covers": [[self.label(a), self.label(b)] for a, b in self.cover_pairs()]}
        return json.dumps(data, indent=1)

    def to_dot(self, name="hasse") -> str:
        """Graphviz source of the Hasse diagram, edges pointing low -> high."""
        lines = ["digraph %s {" % name, "  rankdir=BT;"]
        for i, x in enumerate(self.elements):
            lines.append('  n%d [label="%s"];' % (i, _dot_escape(self.label(x))))
        for a, b in self.cover_index_pairs():
            lines.append("  n%d -> n%d;" % (a, b))
        lines.append("}")
        return "\n".join(lines) + "\n"


def _dot_escape(s: str) -> str:
    return s.replace("\\", "\\\\").replace('"', '\\"')


def transitive_closure(elements, relation, label=str) -> FinitePoset:
    """Poset generated by ``relation``, a collection of pairs ``(a, b)`` read as a <= b.

    Raises :class:`CycleError` when the reflexive-transitive closure is not
    antisymmetric.  Self pairs are ignored.
    """
    elements = list(elements)
    index = {x: i for i, x in enumerate(elements)}
    n = len(elements)
    succ = [set() for _ in range(n)]
    for a, b in relation:
        ia, ib = index[a], index[b]
        if ia != ib:
            succ[ia].add(ib)
    order = _topological_order(succ)
    if order is None:
        raise CycleError([elements[i] for i in _find_cycle(succ)])
    pred = [[] for _ in range(n)]
    for a in range(n):
        for b in succ[a]:
            pred[b].append(a)
    below = [0] * n
    for v in order:
        m = 1 << v
        for p in pred[v]:
            m |= below[p]
        below[v] = m
    return FinitePoset(elements, below, label)


def _topological_order(succ):
    indeg = [0] * len(succ)
    for s in succ:
        for b in s:
            indeg[b] += 1
    heap = [i for i, d in enumerate(indeg) if d == 0]
    heapq.heapify(heap)
    order = []
    while heap:
        v = heapq.heappop(heap)
        order.append(v)
        for b in succ[v]:
            indeg[b] -= 1
            if indeg[b] == 0:
                heapq.heappush(heap, b)
    return order if len(order) == len(succ) else None


def _find_cycle(succ) -> list[int]:
    # iterative colouring DFS; returns the vertices of one directed cycle
    n = len(succ)
    color = [0] * n
    parent = [-1] * n
    for root in range(n):
        if color[root]:
            continue
        stack = [(root, iter(sorted(succ[root])))]
        color[root] = 1
        while stack:
            v, it = stack[-1]
            for w in it:
                if color[w] == 0:
                    color[w] = 1
                    parent[w] = v
                    stack.append((w, iter(sorted(succ[w]))))
                    break
                if color[w] == 1:
                    cycle = [v]
                    while cycle[-1] != w:
                        cycle.append(parent[cycle[-1]])
                    return cycle[::-1]
            else:
                color[v] = 2
                stack.pop()
    raise AssertionError("no cycle found")


def linear_extension(p: FinitePoset) -> list:
    """Kahn's algorithm on the Hasse diagram, smallest interned index first."""
    n = len(p)
    cb = p.cover_below
    indeg = [m.bit_count() for m in cb]
    up = [[] for _ in range(n)]
    for i, m in enumerate(cb):
        for j in _bits(m):
            up[j].append(i)
    heap = [i for i in range(n) if indeg[i] == 0]
    heapq.heapify(heap)
    out = []
    while heap:
        v = heapq.heappop(heap)
        out.append(p.elements[v])
        for w in up[v]:
            indeg[w] -= 1
            if indeg[w] == 0:
                heapq.heappush(heap, w)
    return out


@dataclass
class PosetMap:
    domain: FinitePoset
    codomain: FinitePoset
    table: dict = field(default_factory=dict)

    def __call__(self, x):
        return self.table[x]

    def is_order_preserving(self) -> bool:
        d, c = self.domain, self.codomain
        for x, y in d.relation_pairs():
            if not c.leq(self.table[x], self.table[y]):
                return False
        return True

    def image(self) -> list:
        seen = dict.fromkeys(self.table[x] for x in self.domain.elements)
        return list(seen)


def _is_closure(f: PosetMap, descending: bool) -> bool:
    if f.domain is not f.codomain and f.domain.elements != f.codomain.elements:
        return False
    p = f.domain
    for x in p.elements:
        y = f(x)
        if f(y) != y:
            return False
        if descending and not p.leq(y, x):
            return False
        if not descending and not p.leq(x, y):
            return False
    return f.is_order_preserving()


def is_descending_closure_operator(f: PosetMap) -> bool:
    """Idempotent, order preserving and ``f(x) <= x`` everywhere."""
    return _is_closure(f, descending=True)


def is_ascending_closure_operator(f: PosetMap) -> bool:
    return _is_closure(f, descending=False)


@dataclass
class DeltaSet:
    """A simplicial set without degeneracies.

    ``simplices[n]`` lists the n-simplices (any hashable keys) and
    ``faces[n][k]`` the indices in ``simplices[n-1]`` of ``d_0 .. d_n`` of
    the k-th n-simplex.  ``faces[0]`` is a list of empty tuples.
    """

    simplices: list
    faces: list

    def counts(self) -> tuple[int, ...]:
        return tuple(len(s) for s in self.simplices)

    @property
    def dim(self) -> int:
        return len(self.simplices) - 1

    def check_identities(self) -> bool:
        """d_i d_j = d_{j-1} d_i for i < j on every simplex."""
        for n in range(2, len(self.simplices)):
            lower = self.faces[n - 1]
            for fs in self.faces[n]:
                for j in range(n + 1):
                    for i in range(j):
                        if lower[fs[j]][i] != lower[fs[i]][j - 1]:
                            return False
        return True


def order_complex(p: FinitePoset, max_dim: int | None = None,
                  cap: int = 2 * 10**6) -> DeltaSet:
    """Chains ``x0 < ... < xn`` of ``p``, as index tuples; face i deletes entry i."""
    n = len(p)
    strict_above = [m & ~(1 << i) for i, m in enumerate(p.above)]
    levels = [[(i,) for i in range(n)]] if n else []
    total = n
    while levels and levels[-1] and (max_dim is None or len(levels) <= max_dim):
        nxt = []
        for ch in levels[-1]:
            for j in _bits(strict_above[ch[-1]]):
                nxt.append(ch + (j,))
        if not nxt:
            break
        total += len(nxt)
        if total > cap:
            raise CapacityError("order complex exceeds %d simplices" % cap)
        nxt.sort()
        levels.append(nxt)
    faces = [[() for _ in levels[0]]] if levels else []
    for d in range(1, len(levels)):
        pos = {s: k for k, s in enumerate(levels[d - 1])}
        faces.append([tuple(pos[s[:i] + s[i + 1:]] for i in range(d + 1))
                      for s in levels[d]])
    return DeltaSet(levels, faces)
