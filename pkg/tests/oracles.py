"""Independent reference computations used to cross-check the package.

None of these call into the code under test beyond building inputs.
"""

from itertools import combinations, permutations

import numpy as np
import sympy


def edge_index(n):
    return {e: k for k, e in enumerate(combinations(range(n), 2))}


def _bit(idx, u, v):
    return 1 << idx[(min(u, v), max(u, v))]


def cycle_patterns(n):
    """For every embedded 4- or 5-cycle on n labelled vertices: (required edge mask, diagonal mask)."""
    idx = edge_index(n)
    req, forb = [], []
    for k in (4, 5):
        seen = set()
        for vs in permutations(range(n), k):
            if vs[0] != min(vs) or vs[1] > vs[-1]:
                continue
            if vs in seen:
                continue
            seen.add(vs)
            r = 0
            for i in range(k):
                r |= _bit(idx, vs[i], vs[(i + 1) % k])
            f = 0
            for i, j in combinations(range(k), 2):
                if j - i not in (1, k - 1):
                    f |= _bit(idx, vs[i], vs[j])
            req.append(r)
            forb.append(f)
    return np.array(req, dtype=np.int64), np.array(forb, dtype=np.int64)


def brute_six_large(masks, n, chunk=4096):
    """Vectorised: True where the graph (edge bitmask on n vertices) has no diagonal-free 4/5-cycle."""
    req, forb = cycle_patterns(n)
    masks = np.asarray(masks, dtype=np.int64)
    out = np.empty(len(masks), dtype=bool)
    for s in range(0, len(masks), chunk):
        m = masks[s : s + chunk, None]
        bad = ((m & req) == req) & ((m & forb) == 0)
        out[s : s + chunk] = ~bad.any(axis=1)
    return out


def edges_to_mask(n, edges):
    idx = edge_index(n)
    m = 0
    for u, v in edges:
        m |= _bit(idx, u, v)
    return m


def mask_to_edges(n, mask):
    return [e for k, e in enumerate(combinations(range(n), 2)) if mask >> k & 1]


def brute_short_cycles_no_diagonal(n, edges):
    """All diagonal-free embedded 4/5-cycles as vertex tuples, by direct enumeration."""
    es = {frozenset(e) for e in edges}
    out = []
    for k in (4, 5):
        for vs in permutations(range(n), k):
            if vs[0] != min(vs) or vs[1] > vs[-1]:
                continue
            if not all(frozenset((vs[i], vs[(i + 1) % k])) in es for i in range(k)):
                continue
            if any(frozenset((vs[i], vs[j])) in es for i, j in combinations(range(k), 2) if j - i not in (1, k - 1)):
                continue
            out.append(vs)
    return out


def sympy_h1(vertices, edges, triangles):
    """(rank, torsion) of H1 through sympy's rank and Smith normal form."""
    vertices = sorted(vertices)
    edges = sorted(tuple(sorted(e)) for e in edges)
    vpos = {v: k for k, v in enumerate(vertices)}
    epos = {e: k for k, e in enumerate(edges)}
    d1 = sympy.zeros(len(vertices), len(edges)) if edges else None
    for k, (u, v) in enumerate(edges):
        d1[vpos[u], k] = -1
        d1[vpos[v], k] = 1
    rank1 = d1.rank() if edges else 0
    rank2 = 0
    torsion = []
    if triangles:
        d2 = sympy.zeros(len(edges), len(triangles))
        for k, t in enumerate(triangles):
            a, b, c = sorted(t)
            d2[epos[(b, c)], k] += 1
            d2[epos[(a, c)], k] -= 1
            d2[epos[(a, b)], k] += 1
        rank2 = d2.rank()
        from sympy.matrices.normalforms import smith_normal_form

        snf = smith_normal_form(d2, domain=sympy.ZZ)
        for i in range(min(snf.shape)):
            x = abs(int(snf[i, i]))
            if x > 1:
                torsion.append(x)
    return len(edges) - rank1 - rank2, sorted(torsion)


def closure_partition(items, pairs):
    """Equivalence classes generated by ``pairs`` via repeated relaxation (no union-find)."""
    label = {x: x for x in items}
    changed = True
    while changed:
        changed = False
        for a, b in pairs:
            la, lb = label[a], label[b]
            if la != lb:
                lo = min(la, lb)
                for x in label:
                    if label[x] in (la, lb) and label[x] != lo:
                        label[x] = lo
                changed = True
    groups = {}
    for x, l in label.items():
        groups.setdefault(l, set()).add(x)
    return sorted(sorted(g) for g in groups.values())


def _vertex_patterns(n):
    pats = {}
    for k in (4, 5):
        rows = [
            vs
            for vs in permutations(range(n), k)
            if vs[0] == min(vs) and vs[1] < vs[-1]
        ]
        pats[k] = np.array(rows, dtype=np.intp).reshape(-1, k)
    return pats


_PATTERN_CACHE = {}


def brute_six_large_adj(n, edges):
    """Same test as ``brute_six_large`` but on an adjacency matrix, for any n."""
    if n not in _PATTERN_CACHE:
        _PATTERN_CACHE[n] = _vertex_patterns(n)
    a = np.zeros((n, n), dtype=bool)
    for u, v in edges:
        a[u, v] = a[v, u] = True
    for k, p in _PATTERN_CACHE[n].items():
        if len(p) == 0:
            continue
        ok = np.ones(len(p), dtype=bool)
        for i in range(k):
            ok &= a[p[:, i], p[:, (i + 1) % k]]
        for i, j in combinations(range(k), 2):
            if j - i not in (1, k - 1):
                ok &= ~a[p[:, i], p[:, j]]
        if ok.any():
            return False
    return True
