"""Integral homology of Delta-sets and of the diagonal nerve of a flow category."""

from __future__ import annotations

import json
from dataclasses import dataclass
from itertools import product

from .errors import CapacityError
from .poset import DeltaSet, FinitePoset, _bits, order_complex

DEFAULT_SIMPLEX_CAP = 2 * 10**6


# Smith normal form

def smith_normal_form(mat) -> tuple[list[int], int]:
    """Invariant factors (positive, each dividing the next) and rank of an integer matrix."""
    a = [[int(x) for x in row] for row in mat]
    rows = len(a)
    cols = len(a[0]) if rows else 0
    factors = []
    t = 0
    while t < rows and t < cols:
        best = None
        for i in range(t, rows):
            for j in range(t, cols):
                v = a[i][j]
                if v and (best is None or abs(v) < best[0]):
                    best = (abs(v), i, j)
        if best is None:
            break
        _, i, j = best
        a[t], a[i] = a[i], a[t]
        for row in a:
            row[t], row[j] = row[j], row[t]
        while True:
            p = a[t][t]
            moved = False
            for i in range(t + 1, rows):
                if a[i][t]:
                    q = a[i][t] // p
                    ri, rt = a[i], a[t]
                    for j in range(t, cols):
                        ri[j] -= q * rt[j]
                    if ri[t]:
                        a[t], a[i] = a[i], a[t]
                        moved = True
                        break
            if moved:
                continue
            for j in range(t + 1, cols):
                if a[t][j]:
                    q = a[t][j] // p
                    for row in a[t:]:
                        row[j] -= q * row[t]
                    if a[t][j]:
                        for row in a:
                            row[t], row[j] = row[j], row[t]
                        moved = True
                        break
            if moved:
                continue
            bad = next((i for i in range(t + 1, rows)
                        if any(a[i][j] % p for j in range(t + 1, cols))), None)
            if bad is None:
                break
            rt, rb = a[t], a[bad]
            for j in range(t, cols):
                rt[j] += rb[j]
        factors.append(abs(a[t][t]))
        t += 1
    return factors, len(factors)


# sparse boundary matrices: one {row: coefficient} dict per column

@dataclass
class IntegerChainComplex:
    """``ranks[n]`` free generators in degree n; ``boundaries[n]`` is d_n as sparse columns.

    ``complete`` is False for truncated complexes, whose top degree only
    feeds the homology below it.
    """

    ranks: list
    boundaries: list
    complete: bool = True

    @property
    def top(self) -> int:
        return len(self.ranks) - 1

    def dense(self, n: int) -> list[list[int]]:
        rows = self.ranks[n - 1]
        out = [[0] * self.ranks[n] for _ in range(rows)]
        for j, col in enumerate(self.boundaries[n]):
            for i, v in col.items():
                out[i][j] = v
        return out

    def check_dd(self) -> bool:
        """d_{n-1} d_n = 0 for every n."""
        for n in range(2, len(self.ranks)):
            lower = self.boundaries[n - 1]
            for col in self.boundaries[n]:
                acc = {}
                for i, v in col.items():
                    for k, w in lower[i].items():
                        acc[k] = acc.get(k, 0) + v * w
                if any(acc.values()):
                    return False
        return True


def chain_complex_from_faces(ranks, faces, complete=True) -> IntegerChainComplex:
    """``faces[n][k]`` lists the (n-1)-face index for each i, or None for a dropped face."""
    bounds = [[{} for _ in range(ranks[0])]] if ranks else []
    for n in range(1, len(ranks)):
        cols = []
        for fs in faces[n]:
            col = {}
            for i, idx in enumerate(fs):
                if idx is None:
                    continue
                v = col.get(idx, 0) + (-1 if i % 2 else 1)
                if v:
                    col[idx] = v
                else:
                    col.pop(idx, None)
            cols.append(col)
        bounds.append(cols)
    return IntegerChainComplex(list(ranks), bounds, complete)


def chain_complex(ds: DeltaSet, complete: bool = True) -> IntegerChainComplex:
    cc = chain_complex_from_faces(ds.counts(), ds.faces, complete)
    if not cc.check_dd():
        raise AssertionError("boundary of boundary is not zero")
    return cc


def boundary_snf(cols: list, nrows: int) -> tuple[list[int], int]:
    """Invariant factors of a sparse matrix: unit-pivot elimination first, dense SNF on what is left."""
    cols = [dict(c) for c in cols]
    row_cols = {}
    for j, c in enumerate(cols):
        for i in c:
            row_cols.setdefault(i, set()).add(j)
    alive = set(j for j, c in enumerate(cols) if c)
    unit_rank = 0
    progress = True
    while progress:
        progress = False
        for j in sorted(alive, key=lambda j: len(cols[j])):
            if j not in alive:
                continue
            col = cols[j]
            piv = None
            for i, v in col.items():
                if v in (1, -1) and (piv is None or len(row_cols[i]) < len(row_cols[piv])):
                    piv = i
            if piv is None:
                continue
            pv = col[piv]
            for k in list(row_cols[piv]):
                if k == j:
                    continue
                ck = cols[k]
                q = ck[piv] * pv
                for i, v in col.items():
                    nv = ck.get(i, 0) - q * v
                    if nv:
                        if i not in ck:
                            row_cols[i].add(k)
                        ck[i] = nv
                    else:
                        ck.pop(i, None)
                        row_cols[i].discard(k)
                if not ck:
                    alive.discard(k)
            for i in col:
                row_cols[i].discard(j)
            # the pivot row is now zero outside column j; drop both
            for k in list(row_cols[piv]):
                cols[k].pop(piv, None)
                if not cols[k]:
                    alive.discard(k)
            row_cols[piv] = set()
            cols[j] = {}
            alive.discard(j)
            unit_rank += 1
            progress = True
    rest_cols = sorted(alive)
    rest_rows = sorted({i for j in rest_cols for i in cols[j]})
    if not rest_cols:
        return [1] * unit_rank, unit_rank
    pos = {i: r for r, i in enumerate(rest_rows)}
    dense = [[0] * len(rest_cols) for _ in rest_rows]
    for c, j in enumerate(rest_cols):
        for i, v in cols[j].items():
            dense[pos[i]][c] = v
    factors, rank = smith_normal_form(dense)
    return [1] * unit_rank + factors, unit_rank + rank


@dataclass
class HomologyResult:
    betti: list
    torsion: list
    euler: int
    complete: bool = True

    def groups(self) -> list[tuple[int, tuple[int, ...]]]:
        return [(b, tuple(t)) for b, t in zip(self.betti, self.torsion)]

    def agrees_with(self, other: "HomologyResult") -> bool:
        """Equal groups in every degree both results know about.

        A complete result is zero above its top degree; a truncated one
        says nothing there.
        """
        known = [len(h.betti) for h in (self, other) if not h.complete]
        k = min(known) if known else max(len(self.betti), len(other.betti))
        pad = [(0, ())] * k
        return (self.groups() + pad)[:k] == (other.groups() + pad)[:k]

    def describe(self) -> str:
        parts = []
        for b, t in self.groups():
            terms = []
            if b == 1:
                terms.append("Z")
            elif b > 1:
                terms.append("Z^%d" % b)
            terms += ["Z/%d" % x for x in t]
            parts.append(" + ".join(terms) if terms else "0")
        return "(" + ", ".join(parts) + ")"

    def to_json(self) -> str:
        data = {"degrees": [{"dim": n, "betti": b, "torsion": list(t)}
                            for n, (b, t) in enumerate(self.groups())],
                "euler": self.euler}
        return json.dumps(data, indent=1)


def homology(cc: IntegerChainComplex) -> HomologyResult:
    top = cc.top if cc.complete else cc.top - 1
    snf = [None] * (cc.top + 2)
    for n in range(1, cc.top + 1):
        snf[n] = boundary_snf(cc.boundaries[n], cc.ranks[n - 1])
    betti, torsion = [], []
    for n in range(0, top + 1):
        rank_out = snf[n][1] if n >= 1 else 0
        into = snf[n + 1] if n + 1 <= cc.top else ([], 0)
        betti.append(cc.ranks[n] - rank_out - into[1])
        torsion.append(sorted(x for x in into[0] if x > 1))
    euler = sum((-1) ** n * b for n, b in enumerate(betti))
    return HomologyResult(betti, torsion, euler, cc.complete)


def reduced_homology(cc: IntegerChainComplex) -> HomologyResult:
    h = homology(cc)
    betti = list(h.betti)
    if betti:
        betti[0] -= 1
    return HomologyResult(betti, h.torsion, h.euler - 1, h.complete)


def is_trivial(h: HomologyResult) -> bool:
    return not any(h.betti) and not any(h.torsion)


def poset_homology(p: FinitePoset) -> HomologyResult:
    return homology(chain_complex(order_complex(p)))


def is_acyclic_space(p: FinitePoset) -> bool:
    """Order complex has the integral homology of a point."""
    return len(p) > 0 and is_trivial(reduced_homology(chain_complex(order_complex(p))))


def mod2_betti(cc: IntegerChainComplex) -> list[int]:
    """Betti numbers over GF(2), via bitset elimination (cross-check only)."""
    ranks = [0] * (cc.top + 2)
    for n in range(1, cc.top + 1):
        pivots = {}
        r = 0
        for col in cc.boundaries[n]:
            v = 0
            for i, c in col.items():
                if c % 2:
                    v |= 1 << i
            while v:
                hi = v.bit_length() - 1
                if hi in pivots:
                    v ^= pivots[hi]
                else:
                    pivots[hi] = v
                    r += 1
                    break
        ranks[n] = r
    top = cc.top if cc.complete else cc.top - 1
    return [cc.ranks[n] - ranks[n] - ranks[n + 1] for n in range(top + 1)]


# diagonal of the bisimplicial nerve of a poset-enriched category
#
# A simplex of degree n is (objects, chains): objects x_0..x_n and, for
# i = 1..n, a weakly increasing chain of n+1 morphisms in hom(x_{i-1}, x_i).
# Face d_j deletes entry j of every chain and, horizontally, drops x_0 with
# its chain (j = 0), drops x_n with its chain (j = n), or composes the
# chains into and out of x_j entrywise.  Degeneracy s_j repeats x_j with
# the identity chain and doubles entry j of every chain.

def nerve_face(fc, simplex, j: int):
    objs, chains = simplex
    n = len(objs) - 1
    chains = [ch[:j] + ch[j + 1:] for ch in chains]
    if j == 0:
        return objs[1:], tuple(chains[1:])
    if j == n:
        return objs[:-1], tuple(chains[:-1])
    merged = tuple(fc.compose(g, h) for g, h in zip(chains[j], chains[j - 1]))
    return objs[:j] + objs[j + 1:], tuple(chains[:j - 1]) + (merged,) + tuple(chains[j + 1:])


def nerve_degeneracy(fc, simplex, j: int):
    objs, chains = simplex
    n = len(objs) - 1
    chains = [ch[:j + 1] + ch[j:] for ch in chains]
    ident = (fc.identity(objs[j]),) * (n + 2)
    return (objs[:j + 1] + objs[j:],
            tuple(chains[:j]) + (ident,) + tuple(chains[j:]))


def is_degenerate(simplex) -> bool:
    objs, chains = simplex
    for j in range(len(objs) - 1):
        # hom(x, x) holds only the identity, so equal objects force the identity chain
        if objs[j] == objs[j + 1] and all(ch[j] == ch[j + 1] for ch in chains):
            return True
    return False


def _multichains(p: FinitePoset, length: int) -> list[tuple]:
    out = [(x,) for x in range(len(p))]
    for _ in range(length - 1):
        out = [ch + (y,) for ch in out for y in _bits(p.above[ch[-1]])]
    return [tuple(p.elements[i] for i in ch) for ch in out]


@dataclass
class DiagonalNerve:
    simplices: list
    faces: list

    def counts(self) -> tuple[int, ...]:
        return tuple(len(s) for s in self.simplices)

    def chain_complex(self) -> IntegerChainComplex:
        cc = chain_complex_from_faces(self.counts(), self.faces, complete=False)
        if not cc.check_dd():
            raise AssertionError("boundary of boundary is not zero")
        return cc


def diagonal_nerve(fc, max_dim: int, cap: int = DEFAULT_SIMPLEX_CAP) -> DiagonalNerve:
    """Non-degenerate simplices of the diagonal up to degree ``max_dim``.

    Faces that are degenerate are recorded as None, which is exactly the
    normalized chain complex.
    """
    objs = fc.objects
    nonempty = {a: [b for b in objs if len(fc.homs[(a, b)])] for a in objs}
    chain_cache = {}

    def chains_of(a, b, length):
        key = (a, b, length)
        if key not in chain_cache:
            chain_cache[key] = _multichains(fc.homs[(a, b)], length)
        return chain_cache[key]

    levels = []
    total = 0
    for n in range(max_dim + 1):
        level = []
        seqs = [(x,) for x in objs]
        for _ in range(n):
            seqs = [s + (y,) for s in seqs for y in nonempty[s[-1]]]
        for s in seqs:
            options = [chains_of(s[i - 1], s[i], n + 1) for i in range(1, n + 1)]
            for chains in product(*options):
                simplex = (s, chains)
                if not is_degenerate(simplex):
                    level.append(simplex)
                    total += 1
                    if total > cap:
                        raise CapacityError("diagonal nerve exceeds %d simplices" % cap)
        levels.append(level)
    faces = [[() for _ in levels[0]]]
    for n in range(1, len(levels)):
        pos = {s: k for k, s in enumerate(levels[n - 1])}
        rows = []
        for s in levels[n]:
            row = []
            for j in range(n + 1):
                t = nerve_face(fc, s, j)
                k = pos.get(t)
                if k is None and not is_degenerate(t):
                    raise AssertionError("face %d of a simplex is missing from the nerve" % j)
                row.append(k)
            rows.append(tuple(row))
        faces.append(rows)
    return DiagonalNerve(levels, faces)


def nerve_homology(fc, max_dim: int, cap: int = DEFAULT_SIMPLEX_CAP) -> HomologyResult:
    return homology(diagonal_nerve(fc, max_dim, cap).chain_complex())
