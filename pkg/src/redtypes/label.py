"""Canonical labels of reduction types.

Three layers:
  * minimal paths through marked multigraphs (MarkedGraph, minimal_path),
  * the graph of principal types of a fibre with its scores (LabelGraph),
  * printing a label from a path, and parsing a label back into a fibre.

Path tokens are tuples so that plain tuple comparison gives the required
order: a new vertex is (0, mark), a revisit is (1, index), an edge is
(0, mark) and a jump is (1,).  Revisits and jumps thus sort after marks.
"""

from collections import Counter
from dataclasses import dataclass, field
from math import gcd

from .chains import min_depth
from .fibre import (DecompositionData, ExceptionalType, FibreError,
                    PrincipalInvariants, PrincipalType, assemble, decompose,
                    exceptional_fibre, total_genus, validate)

JUMP = (1,)


def rkey(r, m):
    return (gcd(r, m), r)


# marked graphs and minimal paths

@dataclass
class MarkedGraph:
    """Vertices carry marks; edges are (u, v, mark) with u != v."""
    vertices: list
    edges: list = field(default_factory=list)

    def __post_init__(self):
        n = len(self.vertices)
        if not n:
            raise ValueError("empty graph")
        classes = Counter()
        for u, v, mark in self.edges:
            if u == v or not (0 <= u < n and 0 <= v < n):
                raise ValueError(f"bad edge {u}-{v}")
            classes[(min(u, v), max(u, v), mark)] += 1
        self._classes = sorted(classes, key=lambda c: (c[0], c[1], repr(c[2])))
        self._counts = tuple(classes[c] for c in self._classes)
        self._incident = [[] for _ in range(n)]
        for ci, (u, v, _) in enumerate(self._classes):
            self._incident[u].append(ci)
            self._incident[v].append(ci)
        if not self._connected():
            raise ValueError("graph is not connected")

    def _connected(self):
        seen, stack = {0}, [0]
        while stack:
            x = stack.pop()
            for ci in self._incident[x]:
                u, v, _ = self._classes[ci]
                y = v if u == x else u
                if y not in seen:
                    seen.add(y)
                    stack.append(y)
        return len(seen) == len(self.vertices)

    def _jumps_needed(self, rem, cur):
        """Fewest jumps to traverse the remaining edges starting at cur."""
        n = len(self.vertices)
        parent = list(range(n))

        def find(x):
            while parent[x] != x:
                parent[x] = parent[parent[x]]
                x = parent[x]
            return x

        deg = [0] * n
        for ci, k in enumerate(rem):
            if k:
                u, v, _ = self._classes[ci]
                deg[u] += k
                deg[v] += k
                parent[find(u)] = find(v)
        odd = Counter()
        roots = set()
        for x in range(n):
            if deg[x]:
                r = find(x)
                roots.add(r)
                odd[r] += deg[x] % 2
        home = find(cur) if deg[cur] else None
        jumps = 0
        for r in roots:
            k = odd[r] // 2
            if r == home:
                trails = max(k, 1) + (1 if k and deg[cur] % 2 == 0 else 0)
                jumps += trails - 1
            else:
                jumps += max(k, 1)
        return jumps

    def _vtok(self, w, order):
        if w in order:
            return (1, order.index(w) + 1)
        return (0, self.vertices[w])

    def _moves(self, cur, rem, order, jumps, J):
        for ci in self._incident[cur]:
            if not rem[ci]:
                continue
            u, v, mark = self._classes[ci]
            w = v if u == cur else u
            rem2 = rem[:ci] + (rem[ci] - 1,) + rem[ci + 1:]
            if jumps + self._jumps_needed(rem2, w) == J:
                o2 = order if w in order else order + (w,)
                yield (0, mark), self._vtok(w, order), (w, rem2, o2, jumps)
        if jumps < J:
            for w in range(len(self.vertices)):
                if w == cur or not any(rem[ci] for ci in self._incident[w]):
                    continue
                if jumps + 1 + self._jumps_needed(rem, w) == J:
                    o2 = order if w in order else order + (w,)
                    yield JUMP, self._vtok(w, order), (w, rem, o2, jumps + 1)

    def min_jumps(self):
        return min(self._jumps_needed(self._counts, v) for v in range(len(self.vertices)))

    def minimal_path(self):
        rem = self._counts
        need = [self._jumps_needed(rem, v) for v in range(len(self.vertices))]
        J = min(need)
        first = min(self.vertices[v] for v in range(len(need)) if need[v] == J)
        states = {(v, rem, (v,), 0) for v in range(len(need))
                  if need[v] == J and self.vertices[v] == first}
        path = [(0, first)]
        for _ in range(sum(rem) + J):
            cands = {}
            for st in states:
                for etok, vtok, new in self._moves(*st, J):
                    cands.setdefault((etok, vtok), set()).add(new)
            tok = min(cands)
            path += tok
            states = cands[tok]
        return tuple(path)

    def realizations(self, path):
        """All walks through the graph spelling out the given path.

        A walk is a tuple of (class index or None, vertex); None marks the
        start or a jump.  Parallel edges with equal marks are not told apart.
        """
        n = len(self.vertices)
        out = []

        def rec(pos, cur, rem, order, walk):
            if pos == len(path):
                if not any(rem):
                    out.append(tuple(walk))
                return
            etok, vtok = path[pos], path[pos + 1]
            if etok == JUMP:
                cands = [(None, w, rem) for w in range(n) if w != cur]
            else:
                cands = []
                for ci in self._incident[cur]:
                    u, v, mark = self._classes[ci]
                    if rem[ci] and mark == etok[1]:
                        cands.append((ci, v if u == cur else u,
                                      rem[:ci] + (rem[ci] - 1,) + rem[ci + 1:]))
            for ci, w, rem2 in cands:
                if self._vtok(w, order) != vtok:
                    continue
                o2 = order if w in order else order + (w,)
                walk.append((ci, w))
                rec(pos + 2, w, rem2, o2, walk)
                walk.pop()

        for v in range(n):
            if (0, self.vertices[v]) == path[0]:
                rec(1, v, self._counts, (v,), [(None, v)])
        return out

    def edge_class(self, ci):
        return self._classes[ci]


def minimal_path(g):
    return g.minimal_path()


def path_length(g):
    """Length of a minimal path: 2(m + J) + 1 with J the fewest jumps."""
    return 2 * (len(g.edges) + g.min_jumps()) + 1


def format_path(path):
    out = []
    for i, t in enumerate(path):
        if i % 2 == 0:
            out.append(str(t[1]))
        else:
            out.append("&" if t == JUMP else str(t[1]))
    return ",".join(out)


# principal types as graph vertices

@dataclass(frozen=True)
class Vertex:
    """A principal type with chi < 0, with depths of its loops and D-tails.

    loops are (l, l', n) and tails are (l, n); LM lists edge residues.
    """
    m: int
    g: int
    O: tuple
    loops: tuple = ()
    tails: tuple = ()
    LM: tuple = ()

    def __post_init__(self):
        m = self.m
        k = lambda r: rkey(r, m)
        loops = []
        for l, l2, n in self.loops:
            if k(l2) < k(l):
                l, l2 = l2, l
            loops.append((l, l2, n))
        object.__setattr__(self, "O", tuple(sorted(self.O, key=k)))
        object.__setattr__(self, "loops", tuple(sorted(loops, key=lambda x: (k(x[0]), k(x[1]), x[2]))))
        object.__setattr__(self, "tails", tuple(sorted(self.tails, key=lambda x: (k(x[0]), x[1]))))
        object.__setattr__(self, "LM", tuple(sorted(self.LM, key=k)))

    @property
    def L(self):
        return tuple(x for l, l2, _ in self.loops for x in (l, l2)) + tuple(l for l, _ in self.tails) + self.LM

    @property
    def chi(self):
        return (2 - 2 * self.g - len(self.O) - len(self.L)) * self.m + sum(gcd(o, self.m) for o in self.O)

    @property
    def weight(self):
        return gcd(self.m, *self.O, *self.L)

    def principal_type(self):
        return PrincipalType(self.m, self.g, self.O, tuple((l, l2) for l, l2, _ in self.loops),
                             tuple(l for l, _ in self.tails), self.LM)

    @classmethod
    def from_type(cls, t):
        """Vertex of a principal type with all loops and D-tails at minimal depth."""
        return cls(t.m, t.g, t.O, tuple((l, l2, loop_min_depth(t.m, l, l2)) for l, l2 in t.LL),
                   tuple((l, tail_min_depth(t.m, l)) for l in t.LD), t.LM)


def loop_min_depth(m, l, l2):
    return min_depth(m, l, m, l2)


def tail_min_depth(m, l):
    w = gcd(l, m)
    return min_depth(m, l, w, w)


def vertex_score(v):
    """Score (a) of a principal type."""
    return ((v.chi, v.m, -v.g, len(v.LM), len(v.tails), len(v.loops), len(v.O)) + v.O
            + tuple(x for l, l2, _ in v.loops for x in (l, l2))
            + tuple(l for l, _ in v.tails) + v.LM
            + tuple(n for _, _, n in v.loops) + tuple(n for _, n in v.tails))


def chain_score(m, d, m2, d2, n):
    """Score (b) of an inner chain m<d,d2>n m2, directed from the m side."""
    return (gcd(d, m), d, d2, n)


def shape_vertex_score(v):
    """Score (c)."""
    return v.chi


def shape_edge_score(weights):
    """Score (d)."""
    return tuple(sorted(weights))


@dataclass(frozen=True)
class Chain:
    u: int
    v: int
    du: int
    dv: int
    n: int


class LabelGraph:
    """Principal types (vertices) and inner chains between them (edges)."""

    def __init__(self, vertices, chains):
        self.vertices = list(vertices)
        self.chains = list(chains)
        for c in self.chains:
            if c.u == c.v:
                raise FibreError("chains from a vertex to itself are loops")
        self.vscores = [vertex_score(v) for v in self.vertices]
        self.bundles = {}
        for c in self.chains:
            mu, mv = self.vertices[c.u].m, self.vertices[c.v].m
            self.bundles.setdefault((c.u, c.v), []).append(
                (chain_score(mu, c.du, mv, c.dv, c.n), c.du, c.dv, c.n))
            self.bundles.setdefault((c.v, c.u), []).append(
                (chain_score(mv, c.dv, mu, c.du, c.n), c.dv, c.du, c.n))
        for b in self.bundles.values():
            b.sort()
        self.bundle_scores = {k: tuple(s for s, *_ in b) for k, b in self.bundles.items()}

    def shape(self):
        edges = []
        for (u, v), b in self.bundles.items():
            if u < v:
                edges.append((u, v, shape_edge_score(s[0] for s, *_ in b)))
        return MarkedGraph([shape_vertex_score(v) for v in self.vertices], edges)

    def edge_depths_minimal(self):
        for c in self.chains:
            a, b = self.vertices[c.u], self.vertices[c.v]
            if c.n != min_depth(a.m, c.du, b.m, c.dv):
                return False
        return True

    def tail_depths_minimal(self):
        for v in self.vertices:
            if any(n != loop_min_depth(v.m, l, l2) for l, l2, n in v.loops):
                return False
            if any(n != tail_min_depth(v.m, l) for l, n in v.tails):
                return False
        return True

    def tokens(self, shape, walk):
        """G-level token sequence of a walk through the shape."""
        toks, order, prev = [], {}, None
        for ci, w in walk:
            if prev is not None:
                toks.append(JUMP if ci is None else (0, self.bundle_scores[(prev, w)]))
            if w in order:
                toks.append((1, order[w]))
            else:
                order[w] = len(order) + 1
                toks.append((0, self.vscores[w]))
            prev = w
        return tuple(toks)

    def best_walk(self, shape=None, walks=None):
        if shape is None:
            shape = self.shape()
        if walks is None:
            walks = shape.realizations(shape.minimal_path())
        return min(walks, key=lambda w: self.tokens(shape, w))

    def label(self, shape=None, walks=None):
        walk = self.best_walk(shape, walks)
        edeps = not self.edge_depths_minimal()
        tdeps = not self.tail_depths_minimal()
        out, order, prev = [], {}, None
        for ci, w in walk:
            if prev is not None:
                if ci is None:
                    out.append("&")
                else:
                    out.append(self._bundle_label(prev, w, edeps))
            if w in order:
                out.append(f"c{order[w]}")
            else:
                order[w] = len(order) + 1
                out.append(principal_label(self.vertices[w], tdeps))
            prev = w
        return "".join(out)

    def _bundle_label(self, u, v, depths):
        sp = smallest_edge_pair(_edge_pool(self.vertices[u]), self.vertices[u].m,
                                _edge_pool(self.vertices[v]), self.vertices[v].m)
        out = []
        for _, d, d2, n in self.bundles[(u, v)]:
            s = "-" if (d, d2) == sp else f"-{{{d}-{d2}}}"
            if depths:
                s += f"({n})"
            out.append(s)
        return "".join(out)

    def decomposition(self):
        """DecompositionData of the fibre, D-tail terminals appended last."""
        prin, L, pairs, depths = [], [], [], []
        for v in self.vertices:
            prin.append([v.m, v.g, v.O])
            L.append(list(v.LM))
        for k, v in enumerate(self.vertices):
            for l, l2, n in v.loops:
                L[k] += [l, l2]
                pairs.append(((k, len(L[k]) - 2), (k, len(L[k]) - 1)))
                depths.append(n)
            for l, n in v.tails:
                w = gcd(l, v.m)
                L[k].append(l)
                prin.append([w, 0, (w // 2, w // 2)])
                L.append([w])
                pairs.append(((k, len(L[k]) - 1), (len(prin) - 1, 0)))
                depths.append(n)
        free = []
        for v in self.vertices:
            slots = {}
            for i, r in enumerate(v.LM):
                slots.setdefault(r, []).append(i)
            free.append(slots)
        for c in self.chains:
            try:
                i = free[c.u][c.du].pop(0)
                j = free[c.v][c.dv].pop(0)
            except (KeyError, IndexError):
                raise FibreError(f"chain {c} does not match the edge residues") from None
            pairs.append(((c.u, i), (c.v, j)))
            depths.append(c.n)
        if any(x for slots in free for x in slots.values()):
            raise FibreError("edge residues without a chain")
        principals = [PrincipalInvariants(m, g, tuple(O), tuple(L[k])) for k, (m, g, O) in enumerate(prin)]
        return DecompositionData(principals, pairs, depths)

    def fibre(self):
        return assemble(self.decomposition())


def _edge_pool(v):
    return Counter(v.O + v.LM)


def smallest_pair(pool, m):
    """Smallest pair of equal-gcd residues in a pool, by (gcd, l, l')."""
    by = {}
    for r in sorted(pool.elements(), key=lambda r: rkey(r, m)):
        by.setdefault(gcd(r, m), []).append(r)
    for w in sorted(by):
        if len(by[w]) >= 2:
            return tuple(by[w][:2])
    return None


def smallest_even(pool, m):
    even = [r for r in pool.elements() if gcd(r, m) % 2 == 0]
    return min(even, key=lambda r: rkey(r, m)) if even else None


def smallest_edge_pair(pool, m, pool2, m2):
    best = None
    for d in pool:
        for d2 in pool2:
            if pool[d] > 0 and pool2[d2] > 0 and gcd(d, m) == gcd(d2, m2):
                k = (gcd(d, m), d, d2)
                if best is None or k < best:
                    best = k
    return best[1:] if best else None


# printing principal types

CORE_NAMES = {
    (1, ()): "I", (2, (1, 1)): "D", (3, (1, 2)): "T", (2, (1, 1, 1, 1)): "I*0",
    (3, (1, 1, 1)): "IV", (3, (2, 2, 2)): "IV*", (4, (1, 1, 2)): "III", (4, (3, 3, 2)): "III*",
    (6, (1, 2, 3)): "II", (6, (5, 4, 3)): "II*",
}
NAMED_CORES = {name: core for core, name in CORE_NAMES.items()}


def core_of(m, residues):
    """(weight, m0, core residues) of a principal component.

    residues are all of O and L; zero residues are given as m.
    """
    c = gcd(m, *residues)
    m0 = m // c
    core = tuple(sorted((r // c for r in residues if r != m), key=lambda r: rkey(r, m0)))
    return c, m0, core


def core_name(m0, core):
    name = CORE_NAMES.get((m0, tuple(core)))
    if name:
        return name
    return f"{m0}^{{{','.join(map(str, core))}}}"


def _subscript(items):
    if not items:
        return ""
    if len(items) == 1 and (items[0].isdigit() or items[0] == "D"):
        return "_" + items[0]
    return "_{" + ",".join(items) + "}"


def principal_label(v, tail_depths=False, marks=False):
    """Label of a principal type; tail_depths prints minimal loop and D-tail depths too."""
    m = v.m
    c, m0, core = core_of(m, v.O + v.L)
    name = core_name(m0, core)
    pool = Counter(v.O + v.L)
    loops = []
    for l, l2, n in v.loops:
        omit = smallest_pair(pool, m) == (l, l2)
        pool[l] -= 1
        pool[l2] -= 1
        pool += Counter()
        s = "" if omit else f"{{{l}-{l2}}}"
        loops.append(s + (str(n) if omit or tail_depths else ""))
    tails = []
    star = None
    for l, n in v.tails:
        omit = smallest_even(pool, m) == l
        pool[l] -= 1
        pool += Counter()
        if name == "D" and star is None and l == m:
            star = n
            continue
        s = "" if omit else f"{{{l}}}"
        tails.append(s + (str(n) if tail_depths else "") + "D")
    front, gen = [], [f"g{v.g}"] if v.g else []
    if star is not None:
        name, front = "I*", [str(star)]
    elif name == "I*0":
        name, front = "I*", ["0"]
    elif name == "I" and loops:
        front = [loops.pop(0)]
    out = (f"[{c}]" if c > 1 else "") + name + _subscript(front + gen + loops + tails)
    if marks:
        out += "".join(f"<{l}>" for l in v.LM)
    return out


def type_label(t):
    """Standalone label of a PrincipalType, edges shown as <l>."""
    return principal_label(Vertex.from_type(t), False, marks=True)


# fibres to label graphs

def _is_terminal(p):
    return p.g == 0 and len(p.O) == 2 and p.O[0] == p.O[1] and p.L == (p.m,) and p.m == 2 * p.O[0]


def label_graph(f):
    """LabelGraph of a fibre of genus >= 2."""
    d, _ = decompose(f)
    P = d.principals
    chis = [p.chi for p in P]
    for k, p in enumerate(P):
        if chis[k] > 0 or (chis[k] == 0 and not _is_terminal(p)):
            raise FibreError(f"principal component {p} cannot occur in genus >= 2")
    index = {k: i for i, k in enumerate(k for k in range(len(P)) if chis[k] < 0)}
    loops = [[] for _ in index]
    tails = [[] for _ in index]
    LM = [[] for _ in index]
    chains = []
    for ((p, i), (q, j)), n in zip(d.pairs, d.depths):
        if p == q:
            loops[index[p]].append((P[p].L[i], P[p].L[j], n))
        elif p in index and q in index:
            LM[index[p]].append(P[p].L[i])
            LM[index[q]].append(P[q].L[j])
            chains.append(Chain(index[p], index[q], P[p].L[i], P[q].L[j], n))
        elif p in index:
            tails[index[p]].append((P[p].L[i], n))
        elif q in index:
            tails[index[q]].append((P[q].L[j], n))
        else:
            raise FibreError("two D-tail terminals joined together")
    verts = [Vertex(P[k].m, P[k].g, P[k].O, tuple(loops[i]), tuple(tails[i]), tuple(LM[i]))
             for k, i in index.items()]
    return LabelGraph(verts, chains)


def _genus_one_label(f):
    try:
        d, _ = decompose(f)
    except ExceptionalType as e:
        return (f"[{e.c}]" if e.c > 1 else "") + f"I_{e.n}"
    P = d.principals
    loops, tails = [], []
    for ((p, i), (q, j)), n in zip(d.pairs, d.depths):
        if p == q == 0:
            loops.append((P[0].L[i], P[0].L[j], n))
        elif p == 0:
            tails.append((P[0].L[i], n))
        elif q == 0:
            tails.append((P[0].L[j], n))
    v = Vertex(P[0].m, P[0].g, P[0].O, tuple(loops), tuple(tails))
    tdeps = any(n != loop_min_depth(v.m, l, l2) for l, l2, n in v.loops) or \
        any(n != tail_min_depth(v.m, l) for l, n in v.tails)
    return principal_label(v, tdeps)


def canonical_label(f):
    errs = validate(f)
    if errs:
        raise FibreError("; ".join(errs))
    if total_genus(f) == 1:
        return _genus_one_label(f)
    return label_graph(f).label()


# parsing

class LabelSyntaxError(ValueError):
    def __init__(self, text, pos, expected):
        found = repr(text[pos:pos + 10]) if pos < len(text) else "end of input"
        super().__init__(f"position {pos}: expected {expected}, found {found}")
        self.pos = pos
        self.expected = expected


class LabelSemanticError(ValueError):
    pass


NAMES = ["III*", "III", "II*", "II", "IV*", "IV", "I*", "I", "D", "T"]


@dataclass
class _Item:
    kind: str                # "g", "loop" or "tail"
    pair: tuple = None       # explicit residues
    depth: int = None


@dataclass
class _Principal:
    c: int
    name: str
    core: tuple
    items: list
    marks: list


class _Parser:
    def __init__(self, text):
        self.orig = text
        self.pos_map = [i for i, ch in enumerate(text) if not ch.isspace()]
        self.s = "".join(ch for ch in text if not ch.isspace())
        self.i = 0

    def fail(self, expected):
        pos = self.pos_map[self.i] if self.i < len(self.pos_map) else len(self.orig)
        raise LabelSyntaxError(self.orig, pos, expected)

    def peek(self, k=1):
        return self.s[self.i:self.i + k]

    def eat(self, lit):
        if self.s.startswith(lit, self.i):
            self.i += len(lit)
            return True
        return False

    def expect(self, lit):
        if not self.eat(lit):
            self.fail(repr(lit))

    def int(self, signed=False):
        j = self.i
        if signed and self.peek() == "-":
            self.i += 1
        k = self.i
        while self.i < len(self.s) and self.s[self.i].isdigit():
            self.i += 1
        if self.i == k:
            self.i = j
            self.fail("a signed integer" if signed else "an integer")
        return int(self.s[j:self.i])

    def at_int(self, signed=False):
        p = self.peek()
        return p.isdigit() or (signed and p == "-" and self.peek(2)[1:].isdigit())

    def principal(self):
        c = 1
        if self.eat("["):
            c = self.int()
            self.expect("]")
            if c < 1:
                self.fail("a positive weight")
        items = []
        if self.at_int():
            m0 = self.int()
            self.expect("^{")
            core = [self.int()]
            while self.eat(","):
                core.append(self.int())
            self.expect("}")
            name = None
            core = (m0, tuple(core))
        else:
            for name in NAMES:
                if self.eat(name):
                    break
            else:
                self.fail("a principal type name")
            core = None
            if self.at_int():
                items.append(_Item("loop", None, self.int()))
        if self.eat("_"):
            if self.eat("{"):
                items.append(self.item())
                while self.eat(","):
                    items.append(self.item())
                self.expect("}")
            else:
                items.append(self.item())
        marks = []
        while self.eat("<"):
            marks.append(self.int())
            self.expect(">")
        return _Principal(c, name, core, items, marks)

    def item(self):
        if self.eat("g"):
            return _Item("g", None, self.int())
        if self.eat("{"):
            a = self.int()
            if self.eat("-"):
                b = self.int()
                self.expect("}")
                n = self.int(True) if self.at_int(True) else None
                return _Item("loop", (a, b), n)
            self.expect("}")
            n = self.int(True) if self.at_int(True) else None
            self.expect("D")
            return _Item("tail", (a,), n)
        if self.eat("D"):
            return _Item("tail")
        if self.at_int(True):
            n = self.int(True)
            if self.eat("D"):
                return _Item("tail", None, n)
            return _Item("loop", None, n)
        self.fail("a subscript item")

    def edge(self):
        pair = n = None
        if self.eat("{"):
            a = self.int()
            self.expect("-")
            b = self.int()
            self.expect("}")
            pair = (a, b)
        if self.eat("("):
            n = self.int(True)
            self.expect(")")
        return pair, n

    def segment(self):
        if self.eat("c"):
            self.eat("_")
            return ("rev", self.int())
        return ("prin", self.principal())

    def label(self):
        segs = [self.segment()]
        conns = []
        while self.i < len(self.s):
            if self.eat("&"):
                conns.append(None)
            elif self.peek() == "-":
                bundle = []
                while self.eat("-"):
                    bundle.append(self.edge())
                conns.append(bundle)
            else:
                self.fail("'-' or '&'")
            segs.append(self.segment())
        return segs, conns


class _Build:
    """Residue bookkeeping for one parsed principal type."""

    def __init__(self, p):
        items = list(p.items)
        if p.core is not None:
            m0, core = p.core
            if m0 < 1 or any(not 1 <= r < m0 for r in core) or sum(core) % m0 or gcd(m0, *core) != 1:
                raise LabelSemanticError(f"{m0}^{core} is not a core")
            core = tuple(sorted(core, key=lambda r: rkey(r, m0)))
            if (m0, core) in CORE_NAMES:
                raise LabelSemanticError(f"core {m0}^{core} must be written {CORE_NAMES[(m0, core)]}")
        elif p.name == "I*":
            if not items or items[0].kind != "loop" or items[0].pair is not None:
                raise LabelSemanticError("I* needs its depth as the first subscript item")
            star = items.pop(0).depth
            m0, core = NAMED_CORES["I*0" if star == 0 else "D"]
        else:
            m0, core = NAMED_CORES[p.name]
            star = None
        if p.core is not None:
            star = None
        self.c, self.m = p.c, p.c * m0
        m = self.m
        self.pool = Counter(p.c * r for r in core)
        self.g = 0
        self.loops, self.tails = [], []
        if p.name == "I*" and star:
            tails_star = [(m, star)]
        else:
            tails_star = []
        for it in items:
            if it.kind == "g":
                self.g += it.depth
        for it in items:
            if it.kind != "loop":
                continue
            if it.pair is None:
                pair = smallest_pair(self.pool + Counter({m: 2}), m)
            else:
                pair = it.pair
                if any(not 1 <= x <= m for x in pair) or gcd(pair[0], m) != gcd(pair[1], m):
                    raise LabelSemanticError(f"loop {pair} is not valid for m={m}")
            self.take(pair)
            n = loop_min_depth(m, *pair) if it.depth is None else it.depth
            self.loops.append((pair[0], pair[1], n))
        for it in items:
            if it.kind != "tail":
                continue
            if it.pair is None:
                l = smallest_even(self.pool + Counter({m: 1}), m)
            else:
                l = it.pair[0]
            if l is None or not 1 <= l <= m or gcd(l, m) % 2:
                raise LabelSemanticError(f"no D-tail residue of even weight available for m={m}")
            self.take((l,))
            n = tail_min_depth(m, l) if it.depth is None else it.depth
            self.tails.append((l, n))
        self.tails += tails_star
        self.LM = []

    def take(self, rs):
        for r in rs:
            if r == self.m:
                continue
            if self.pool[r] <= 0:
                raise LabelSemanticError(f"residue {r} is not available (m={self.m})")
            self.pool[r] -= 1
        self.pool += Counter()

    def edge_pool(self):
        return self.pool + Counter({self.m: 1})

    def vertex(self):
        O = self.pool.copy()
        for r in self.LM:
            if r != self.m:
                if O[r] <= 0:
                    raise LabelSemanticError(f"edge residue {r} is not available (m={self.m})")
                O[r] -= 1
        O += Counter()
        for l, l2, n in self.loops:
            if n < loop_min_depth(self.m, l, l2):
                raise LabelSemanticError(f"loop depth {n} below minimum for m={self.m}")
        for l, n in self.tails:
            if n < tail_min_depth(self.m, l):
                raise LabelSemanticError(f"D-tail depth {n} below minimum for m={self.m}")
        return Vertex(self.m, self.g, tuple(O.elements()), tuple(self.loops), tuple(self.tails), tuple(self.LM))


def _parse(text):
    p = _Parser(text)
    segs, conns = p.label()
    return segs, conns


def parse_graph(text):
    """Parse a label into (LabelGraph, builds); genus-1 labels give one vertex."""
    segs, conns = _parse(text)
    if segs[0][0] != "prin":
        raise LabelSemanticError("a label must start with a principal type")
    builds, seq = [], []
    for kind, x in segs:
        if kind == "prin":
            if x.marks:
                raise LabelSemanticError("edge marks <l> only appear in standalone types")
            builds.append(_Build(x))
            seq.append(len(builds) - 1)
        else:
            if not 1 <= x <= len(builds):
                raise LabelSemanticError(f"c{x} refers to an unknown component")
            seq.append(x - 1)
    chains = []
    for k, bundle in enumerate(conns):
        if bundle is None:
            continue
        u, v = seq[k], seq[k + 1]
        if u == v:
            raise LabelSemanticError("an edge must join two different principal types")
        a, b = builds[u], builds[v]
        for pair, n in bundle:
            if pair is None:
                pair = smallest_edge_pair(a.edge_pool(), a.m, b.edge_pool(), b.m)
                if pair is None:
                    raise LabelSemanticError("no residues of equal weight for an edge")
            d, d2 = pair
            if not (1 <= d <= a.m and 1 <= d2 <= b.m):
                raise LabelSemanticError(f"edge residues {pair} out of range")
            lo = min_depth(a.m, d, b.m, d2)
            if lo is None:
                raise LabelSemanticError(f"edge {pair}: weights {gcd(d, a.m)} and {gcd(d2, b.m)} differ")
            if n is None:
                n = lo
            elif n < lo:
                raise LabelSemanticError(f"edge depth {n} below minimum {lo}")
            a.LM.append(d)
            b.LM.append(d2)
            chains.append(Chain(u, v, d, d2, n))
    verts = [b.vertex() for b in builds]
    return LabelGraph(verts, chains)


def parse_label(text):
    """Fibre with the given label; omitted depths are taken minimal."""
    lg = parse_graph(text)
    if len(lg.vertices) == 1 and not lg.chains:
        v = lg.vertices[0]
        if v.g == 0 and not v.O and not v.tails and len(v.loops) == 1 and v.m == v.weight \
                and v.loops[0][0] == v.loops[0][1] == v.m:
            return exceptional_fibre(v.m, v.loops[0][2])
    try:
        return lg.fibre()
    except FibreError as e:
        raise LabelSemanticError(str(e)) from None


def parse_principal_type(text):
    """PrincipalType from a standalone label such as 'I*_{1,D}<1>'."""
    p = _Parser(text)
    kind, x = p.segment()
    if p.i != len(p.s):
        p.fail("end of input")
    if kind != "prin":
        raise LabelSemanticError("not a principal type")
    b = _Build(x)
    b.LM = list(x.marks)
    v = b.vertex()
    return v.principal_type()
