"""Enumeration of cores, principal types, shapes and reduction families."""

import os
from collections import Counter, defaultdict
from concurrent.futures import ProcessPoolExecutor
from dataclasses import dataclass
from fractions import Fraction
from functools import lru_cache
from itertools import combinations_with_replacement, permutations, product
from math import factorial, gcd

from .chains import min_depth
from .fibre import PrincipalInvariants, PrincipalType
from .label import (Chain, LabelGraph, MarkedGraph, Vertex, core_name, rkey,
                    type_label)


def max_proper_divisor(m):
    if m <= 1:
        return 0
    for p in range(2, int(m ** 0.5) + 1):
        if m % p == 0:
            return m // p
    return 1


# cores

@dataclass(frozen=True)
class Core:
    m: int
    residues: tuple

    def __post_init__(self):
        object.__setattr__(self, "residues", tuple(sorted(self.residues, key=lambda r: rkey(r, self.m))))

    @property
    def chi(self):
        return core_chi(self)

    def __str__(self):
        return core_name(self.m, self.residues).replace("I*0", "I*_0")


def core_chi(c):
    return c.m * (2 - len(c.residues)) + sum(gcd(c.m, o) for o in c.residues)


def core_of(p):
    """(weight, Core) of principal invariants."""
    rs = [r for r in p.O + p.L if r % p.m]
    c = gcd(p.m, *rs)
    m0 = p.m // c
    return c, Core(m0, tuple(r // c for r in rs))


def _gcd_multisets(m, k, S, lo=1):
    """Nondecreasing k-tuples in lo..m-1 whose gcds with m sum to S."""
    md = max_proper_divisor(m)
    if k == 0:
        if S == 0:
            yield ()
        return
    if not k <= S <= k * md:
        return
    for r in range(lo, m):
        d = gcd(r, m)
        if d > S:
            continue
        for rest in _gcd_multisets(m, k - 1, S - d, r):
            yield (r,) + rest


def enumerate_cores(chi):
    if chi == 2:
        raise ValueError("cores with chi = 2 form an infinite family")
    if chi > 2 or chi % 2:
        return set()
    out = set()
    for m in range(2, 6 - 2 * chi + 1):
        for k in range(1, 4 - chi + 1):
            S = chi - m * (2 - k)
            for rs in _gcd_multisets(m, k, S):
                if sum(rs) % m == 0 and gcd(m, *rs) == 1:
                    out.add(Core(m, rs))
    return out


# principal invariants and types

def invariant_bounds(chi):
    """Upper bounds on (m, g, |O|, |L|) for principal invariants with this chi."""
    return -6 * chi, (2 - chi) // 2, 4 - chi, 2 - chi


@lru_cache(maxsize=None)
def _principal_invariants(chi):
    if chi >= 0:
        raise ValueError("principal invariants are enumerated for chi < 0 only")
    mmax, gmax, amax, bmax = invariant_bounds(chi)
    out = set()
    for m in range(1, mmax + 1):
        md = max_proper_divisor(m)
        for g in range(gmax + 1):
            for a in range((amax if m > 1 else 0) + 1):
                for b in range(bmax + 1):
                    if g == 0 and a + b < 3:
                        continue
                    S = chi - (2 - 2 * g - a - b) * m
                    if not a <= S <= a * md:
                        continue
                    for O in _gcd_multisets(m, a, S):
                        t = -sum(O) % m
                        for L in combinations_with_replacement(range(1, m + 1), b):
                            if sum(L) % m == t:
                                out.add(PrincipalInvariants(m, g, _sorted(O, m), _sorted(L, m)))
    return frozenset(out)


def _sorted(rs, m):
    return tuple(sorted(rs, key=lambda r: rkey(r, m)))


def enumerate_principal_invariants(chi):
    return set(_principal_invariants(chi))


def _splits(items, m):
    """All ways to split a sorted residue list into loops, D-tails and edges."""
    if not items:
        yield (), (), ()
        return
    x, rest = items[0], items[1:]
    for LL, LD, LM in _splits(rest, m):
        yield LL, LD, (x,) + LM
        if gcd(x, m) % 2 == 0:
            yield LL, (x,) + LD, LM
    seen = set()
    for i, y in enumerate(rest):
        if y in seen or gcd(y, m) != gcd(x, m):
            continue
        seen.add(y)
        for LL, LD, LM in _splits(rest[:i] + rest[i + 1:], m):
            yield ((x, y),) + LL, LD, LM


@lru_cache(maxsize=None)
def _principal_types(chi):
    out = set()
    for p in _principal_invariants(chi):
        for LL, LD, LM in _splits(p.L, p.m):
            out.add(PrincipalType(p.m, p.g, p.O, LL, LD, LM))
    return frozenset(out)


def enumerate_principal_types(chi):
    return set(_principal_types(chi))


def edge_weights(t):
    return tuple(sorted(gcd(l, t.m) for l in t.LM))


@lru_cache(maxsize=None)
def _types_by_shape(chi):
    groups = defaultdict(list)
    for t in _principal_types(chi):
        groups[edge_weights(t)].append(t)
    return {w: sorted(ts, key=type_label) for w, ts in groups.items()}


def types_by_shape(chi):
    """Principal types grouped by their weight multiset (the shape (chi; w))."""
    return {w: list(ts) for w, ts in _types_by_shape(chi).items()}


def arrangements(t):
    """Distinct orderings of LM that realise one fixed weight vector."""
    n = 1
    by_w = defaultdict(Counter)
    for l in t.LM:
        by_w[gcd(l, t.m)][l] += 1
    for c in by_w.values():
        n *= factorial(sum(c.values()))
        for k in c.values():
            n //= factorial(k)
    return n


def count_types_by_weight_vector(chi, w):
    """Number of (type, ordering of LM) pairs with weight vector w."""
    return sum(arrangements(t) for t in _types_by_shape(chi).get(tuple(sorted(w)), []))


def large_multiplicity_check(chi):
    """Principal invariants with m / (-chi) > 2."""
    return {p for p in _principal_invariants(chi) if Fraction(p.m, -chi) > 2}


def ratio_is_admissible(r):
    """True if r = 2 + 4/k or r = 2 + 3/k for a positive integer k."""
    r = Fraction(r) - 2
    return r > 0 and ((4 / r).denominator == 1 or (3 / r).denominator == 1)


# shapes

@dataclass(frozen=True)
class Shape:
    chis: tuple       # vertex chi values
    edges: tuple      # (u, v, weights) with u < v and weights a sorted tuple

    def graph(self):
        return MarkedGraph(list(self.chis), [(u, v, w) for u, v, w in self.edges])

    @property
    def genus(self):
        return (2 - sum(self.chis)) // 2

    def key(self):
        return self.graph().minimal_path()

    def __str__(self):
        es = [f"{u}-{v}:{','.join(map(str, w))}" for u, v, w in self.edges]
        return " ".join([f"[{','.join(map(str, self.chis))}]"] + es)


@lru_cache(maxsize=None)
def weight_sets(chi):
    """Edge weight multisets that occur for principal types with this chi."""
    return frozenset(_types_by_shape(chi))


@lru_cache(maxsize=None)
def _weight_prefixes(chi):
    out = set()
    for ws in weight_sets(chi):
        c = Counter(ws)
        for sub in product(*[range(k + 1) for k in c.values()]):
            out.add(tuple(sorted(Counter(dict(zip(c, sub))).elements())))
    return frozenset(out)


def _parts(total, lo):
    # partitions of total (negative) into parts >= lo, parts listed in increasing order
    if total == 0:
        yield ()
        return
    for x in range(max(lo, total), 0):
        for rest in _parts(total - x, x):
            yield (x,) + rest


def _graph_key(chis, edges):
    return MarkedGraph(list(chis), [(u, v, 0) for u, v in edges]).minimal_path()


def _simple_graphs(chis, cap, emax):
    """Connected simple graphs on vertex marks chis, up to isomorphism."""
    target = Counter(chis)
    level = {}
    for x in target:
        level[_graph_key((x,), [])] = ((x,), ())
    for n in range(1, len(chis)):
        nxt = {}
        for vs, es in level.values():
            left = target - Counter(vs)
            deg = Counter()
            for u, v in es:
                deg[u] += 1
                deg[v] += 1
            for x in left:
                for size in range(1, min(n, cap[x]) + 1):
                    if len(es) + size > emax:
                        break
                    for nb in _subsets(n, size):
                        if any(deg[u] + 1 > cap[vs[u]] for u in nb):
                            continue
                        vs2 = vs + (x,)
                        es2 = es + tuple((u, n) for u in nb)
                        k = _graph_key(vs2, es2)
                        if k not in nxt:
                            nxt[k] = (vs2, es2)
        level = nxt
    # add the remaining edges among existing vertices
    done = {}
    stack = list(level.values())
    for vs, es in stack:
        done[_graph_key(vs, es)] = (vs, es)
    while stack:
        vs, es = stack.pop()
        if len(es) >= emax:
            continue
        deg = Counter()
        for u, v in es:
            deg[u] += 1
            deg[v] += 1
        present = set(es)
        N = len(vs)
        for u in range(N):
            for v in range(u + 1, N):
                if (u, v) in present or deg[u] >= cap[vs[u]] or deg[v] >= cap[vs[v]]:
                    continue
                es2 = tuple(sorted(es + ((u, v),)))
                k = _graph_key(vs, es2)
                if k not in done:
                    done[k] = (vs, es2)
                    stack.append((vs, es2))
    return list(done.values())


def _subsets(n, size, lo=0):
    if size == 0:
        yield ()
        return
    for i in range(lo, n - size + 1):
        for rest in _subsets(n, size - 1, i + 1):
            yield (i,) + rest


def _weightings(vs, es, emax):
    """Weight multisets on the edges of a simple graph, consistent at every vertex."""
    N = len(vs)
    cand = {}
    for u, v in es:
        opts = set()
        for ws in _weight_prefixes(vs[u]):
            if ws and ws in _weight_prefixes(vs[v]):
                for k in range(1, len(ws) + 1):
                    for sub in combinations_with_replacement(sorted(set(ws)), k):
                        opts.add(sub)
        cand[(u, v)] = sorted(opts)
    inc = [Counter() for _ in range(N)]
    chosen = []

    def rec(i, used):
        if i == len(es):
            if all(tuple(sorted(inc[x].elements())) in weight_sets(vs[x]) for x in range(N)):
                yield tuple(chosen)
            return
        u, v = es[i]
        for ws in cand[(u, v)]:
            if used + len(ws) > emax:
                continue
            inc[u].update(ws)
            inc[v].update(ws)
            if tuple(sorted(inc[u].elements())) in _weight_prefixes(vs[u]) and \
                    tuple(sorted(inc[v].elements())) in _weight_prefixes(vs[v]):
                chosen.append(ws)
                yield from rec(i + 1, used + len(ws))
                chosen.pop()
            inc[u].subtract(ws)
            inc[v].subtract(ws)

    if not es:
        if all(() in weight_sets(x) for x in vs):
            yield ()
        return
    yield from rec(0, 0)


def enumerate_shapes(g, extended=False):
    """All shapes of genus g, up to isomorphism, sorted by canonical key."""
    if g < 2:
        raise ValueError("shapes are defined for genus >= 2")
    if g > 5 and not extended:
        raise ValueError("genus > 5 needs extended=True")
    out = {}
    for chis in _parts(2 - 2 * g, 2 - 2 * g):
        N = len(chis)
        emax = g + N - 1
        cap = {x: max(len(w) for w in weight_sets(x)) for x in set(chis)}
        if N > 1 and any(c == 0 for c in cap.values()):
            continue
        for vs, es in _simple_graphs(chis, cap, emax):
            for ws in _weightings(vs, es, emax):
                sh = Shape(vs, tuple((u, v, w) for (u, v), w in zip(es, ws)))
                k = sh.key()
                if k not in out:
                    out[k] = sh
    return [out[k] for k in sorted(out)]


# families

@dataclass(frozen=True)
class Family:
    label: str
    shape: Shape
    vertices: tuple    # Vertex per shape vertex, minimal depths
    chains: tuple      # Chain objects, minimal depths

    def graph(self):
        return LabelGraph(self.vertices, self.chains)

    def fibre(self):
        return self.graph().fibre()

    @property
    def semistable(self):
        return all(v.m == 1 for v in self.vertices)


def _vertex_options(shape):
    N = len(shape.chis)
    inc = [[] for _ in range(N)]
    for u, v, ws in shape.edges:
        inc[u].extend(ws)
        inc[v].extend(ws)
    groups = []
    for x in range(N):
        groups.append(_types_by_shape(shape.chis[x]).get(tuple(sorted(inc[x])), []))
    return groups


def _slot_assignments(t, slots):
    """Distinct ways to give each slot (edge index, weight) a residue of that weight."""
    by_w = defaultdict(list)
    for l in t.LM:
        by_w[gcd(l, t.m)].append(l)
    idx_by_w = defaultdict(list)
    for i, (_, w) in enumerate(slots):
        idx_by_w[w].append(i)
    per_w = []
    for w, idxs in idx_by_w.items():
        opts = set()
        for perm in set(permutations(by_w[w])):
            opts.add(tuple(sorted(zip([slots[i][0] for i in idxs], perm))))
        per_w.append((idxs, sorted(opts)))
    for combo in product(*[o for _, o in per_w]):
        yield combo


def _families_of_shape(shape, semistable=False):
    sg = shape.graph()
    walks = sg.realizations(sg.minimal_path())
    options = _vertex_options(shape)
    if semistable:
        options = [[t for t in ts if t.m == 1] for ts in options]
    N = len(shape.chis)
    slots = [[] for _ in range(N)]
    for e, (u, v, ws) in enumerate(shape.edges):
        for w in ws:
            slots[u].append((e, w))
            slots[v].append((e, w))
    seen = {}
    for types in product(*options):
        verts = [Vertex.from_type(t) for t in types]
        per_vertex = []
        for x, t in enumerate(types):
            res = []
            for combo in _slot_assignments(t, slots[x]):
                d = defaultdict(list)
                for part in combo:
                    for e, l in part:
                        d[e].append(l)
                res.append({e: sorted(ls, key=lambda l: rkey(l, t.m)) for e, ls in d.items()})
            per_vertex.append(res)
        for choice in product(*per_vertex):
            for chains in _edge_pairings(shape, types, choice):
                lg = LabelGraph(verts, chains)
                key = min(lg.tokens(sg, w) for w in walks)
                if key not in seen:
                    seen[key] = (lg, chains)
    out = []
    for lg, chains in seen.values():
        out.append(Family(lg.label(sg, walks), shape, tuple(lg.vertices), tuple(chains)))
    return out


def _edge_pairings(shape, types, choice):
    """All chain sets: per edge, bijections between residues of equal weight."""
    per_edge = []
    for e, (u, v, ws) in enumerate(shape.edges):
        du, dv = choice[u][e], choice[v][e]
        mu, mv = types[u].m, types[v].m
        opts = set()
        for perm in set(permutations(dv)):
            pairs = list(zip(du, perm))
            if all(gcd(a, mu) == gcd(b, mv) for a, b in pairs):
                opts.add(tuple(sorted(pairs)))
        per_edge.append(sorted(opts))
    for combo in product(*per_edge):
        chains = []
        for e, pairs in enumerate(combo):
            u, v, _ = shape.edges[e]
            for a, b in pairs:
                chains.append(Chain(u, v, a, b, min_depth(types[u].m, a, types[v].m, b)))
        yield chains


def _shape_task(args):
    shape, semistable = args
    return [(f.label, f) for f in _families_of_shape(shape, semistable)]


def enumerate_families(g, semistable=False, jobs=None, shapes=None, extended=False):
    """All reduction families of genus g, sorted by label."""
    if shapes is None:
        shapes = enumerate_shapes(g, extended)
    tasks = [(s, semistable) for s in shapes]
    jobs = jobs or os.cpu_count() or 1
    results = []
    if jobs == 1:
        for t in tasks:
            results.extend(_shape_task(t))
    else:
        with ProcessPoolExecutor(jobs) as ex:
            for r in ex.map(_shape_task, tasks, chunksize=1):
                results.extend(r)
    results.sort(key=lambda x: x[0])
    return [f for _, f in results]


def enumerate_semistable_families(g, jobs=None):
    return enumerate_families(g, semistable=True, jobs=jobs)


def families_by_shape(g, jobs=None):
    out = defaultdict(list)
    for f in enumerate_families(g, jobs=jobs):
        out[f.shape].append(f)
    return out
