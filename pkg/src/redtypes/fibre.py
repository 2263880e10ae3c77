"""Reduction types as special fibres: components, intersections, genus.

A fibre is stored as components (multiplicity m, geometric genus g and
number of nodes) and a symmetric intersection map.  Self-intersections are
never stored; they are forced by the kernel condition.
"""

import json
from collections import Counter
from dataclasses import dataclass, field
from math import gcd

from .chains import (ChainError, OuterType, depth, inner_sequence,
                     is_inner_sequence, is_outer_sequence, lift, min_depth,
                     outer_sequence, sequence_type)


class FibreError(ValueError):
    pass


class ExceptionalType(FibreError):
    """The looping type [c]I_n, which has no principal components."""

    def __init__(self, c, n):
        super().__init__(f"exceptional type [{c}]I_{n} has no principal components")
        self.c = c
        self.n = n


@dataclass
class Component:
    id: int
    m: int
    g: int = 0
    nodes: int = 0


class Fibre:
    def __init__(self, components, intersections=None):
        self.components = sorted(components, key=lambda c: c.id)
        self.intersections = {}
        for (i, j), k in (intersections or {}).items():
            if i == j:
                raise FibreError("self-intersections are derived, use nodes")
            if k:
                key = (min(i, j), max(i, j))
                self.intersections[key] = self.intersections.get(key, 0) + k
        ids = [c.id for c in self.components]
        if ids != list(range(len(ids))):
            raise FibreError("component ids must be 0..N-1")
        for i, j in self.intersections:
            if j >= len(ids) or i < 0:
                raise FibreError(f"intersection with unknown component {i},{j}")

    def __len__(self):
        return len(self.components)

    def __getitem__(self, i):
        return self.components[i]

    def neighbours(self, i):
        """Other components meeting component i, with multiplicity."""
        out = []
        for (a, b), k in self.intersections.items():
            if a == i:
                out += [b] * k
            elif b == i:
                out += [a] * k
        return sorted(out)

    def relabel(self, perm):
        """Fibre with component i renamed to perm[i]."""
        comps = [Component(perm[c.id], c.m, c.g, c.nodes) for c in self.components]
        inter = {(perm[i], perm[j]): k for (i, j), k in self.intersections.items()}
        return Fibre(comps, inter)

    # serialisation

    def to_json(self):
        return {
            "components": [{"id": c.id, "m": c.m, "g": c.g, "nodes": c.nodes}
                           for c in self.components],
            "intersections": [[i, j, k] for (i, j), k in sorted(self.intersections.items())],
        }

    def dumps(self, **kw):
        return json.dumps(self.to_json(), **kw)

    @classmethod
    def from_json(cls, obj):
        if isinstance(obj, str):
            obj = json.loads(obj)
        if not isinstance(obj, dict) or set(obj) - {"components", "intersections"}:
            raise FibreError("fibre must be an object with components and intersections")
        comps = []
        for c in obj.get("components", []):
            if not isinstance(c, dict) or set(c) - {"id", "m", "g", "nodes"} or "id" not in c or "m" not in c:
                raise FibreError(f"bad component entry {c!r}")
            vals = [c["id"], c["m"], c.get("g", 0), c.get("nodes", 0)]
            if not all(isinstance(v, int) and not isinstance(v, bool) for v in vals):
                raise FibreError(f"non-integer field in {c!r}")
            comps.append(Component(*vals))
        inter = {}
        for e in obj.get("intersections", []):
            if not (isinstance(e, list) and len(e) == 3 and all(isinstance(v, int) for v in e)):
                raise FibreError(f"bad intersection entry {e!r}")
            i, j, k = e
            if not i < j or k < 1:
                raise FibreError(f"intersection entries need i<j and k>=1: {e!r}")
            if (i, j) in inter:
                raise FibreError(f"duplicate intersection {e!r}")
            inter[(i, j)] = k
        return cls(comps, inter)

    def __repr__(self):
        return f"Fibre({self.dumps()})"


def incidence(f, i):
    c = f[i]
    return sorted(f.neighbours(i) + [i] * (2 * c.nodes))


def _incidence_sum(f, i):
    return sum(f[j].m for j in incidence(f, i))


def self_intersection(f, i):
    c = f[i]
    s = _incidence_sum(f, i)
    if s % c.m:
        raise FibreError(f"component {i}: self-intersection {2 * c.nodes} - {s}/{c.m} is not integral")
    return 2 * c.nodes - s // c.m


def total_genus(f):
    rhs = sum(c.m * (2 * c.g - 2) + _incidence_sum(f, c.id) for c in f.components)
    if rhs % 2:
        raise FibreError("odd value of 2g-2")
    return rhs // 2 + 1


def is_principal(f, i):
    return f[i].g > 0 or len(incidence(f, i)) >= 3


def principal_components(f):
    return [c for c in f.components if is_principal(f, c.id)]


def _connected(f):
    if not len(f):
        return False
    seen, stack = {0}, [0]
    while stack:
        i = stack.pop()
        for j in f.neighbours(i):
            if j not in seen:
                seen.add(j)
                stack.append(j)
    return len(seen) == len(f)


def validate(f):
    """List of violations; empty when f is a reduction type."""
    errs = []
    for c in f.components:
        if c.m < 1 or c.g < 0 or c.nodes < 0:
            errs.append(f"component {c.id}: need m>=1, g>=0, nodes>=0")
    if errs:
        return errs
    if not _connected(f):
        errs.append("fibre is not connected")
    for c in f.components:
        s = _incidence_sum(f, c.id)
        if s % c.m:
            errs.append(f"component {c.id}: kernel condition fails ({s} not divisible by {c.m})")
        elif c.g == 0 and c.nodes == 0 and 2 * c.nodes - s // c.m == -1 and len(incidence(f, c.id)) < 3:
            errs.append(f"component {c.id}: contractible (-1)-curve")
    if errs:
        return errs
    try:
        if total_genus(f) < 1:
            errs.append("total genus is 0")
    except FibreError as e:
        errs.append(str(e))
    if not errs and principal_components(f):
        try:
            _, records = decompose(f)
            for r in records:
                seq = [f[i].m for i in r.sequence]
                ok = is_outer_sequence(seq) if r.kind == "outer" else is_inner_sequence(seq)
                if not ok:
                    errs.append(f"chain {seq} is not a valid {r.kind} sequence")
        except (FibreError, ChainError) as e:
            errs.append(str(e))
    return errs


# decomposition into principal components and chains

@dataclass(frozen=True)
class PrincipalInvariants:
    m: int
    g: int
    O: tuple
    L: tuple

    @property
    def chi(self):
        return chi(self)


def chi(p):
    return (2 - 2 * p.g - len(p.O) - len(p.L)) * p.m + sum(gcd(o, p.m) for o in p.O)


@dataclass
class DecompositionData:
    """Principal invariants plus a matching of all L entries with depths.

    pairs[k] = ((p, i), (q, j)) matches principals[p].L[i] with
    principals[q].L[j]; depths[k] is the depth of that inner chain.
    """
    principals: list
    pairs: list = field(default_factory=list)
    depths: list = field(default_factory=list)

    def violations(self):
        errs = []
        used = Counter()
        for (p, i), (q, j) in self.pairs:
            used[(p, i)] += 1
            used[(q, j)] += 1
        for p, pr in enumerate(self.principals):
            if pr.m < 1 or pr.g < 0:
                errs.append(f"principal {p}: bad m or g")
                continue
            if any(not 1 <= o < pr.m for o in pr.O) or any(not 1 <= l <= pr.m for l in pr.L):
                errs.append(f"principal {p}: residues out of range")
            if (sum(pr.O) + sum(pr.L)) % pr.m:
                errs.append(f"principal {p}: residues do not sum to 0 mod {pr.m}")
            if pr.g == 0 and len(pr.O) + len(pr.L) < 3:
                errs.append(f"principal {p}: not principal (g=0 and fewer than 3 chains)")
            for i in range(len(pr.L)):
                if used[(p, i)] != 1:
                    errs.append(f"principal {p}: L entry {i} matched {used[(p, i)]} times")
        if len(self.depths) != len(self.pairs):
            errs.append("one depth per pair required")
        if errs:
            return errs
        for ((p, i), (q, j)), n in zip(self.pairs, self.depths):
            a, b = self.principals[p], self.principals[q]
            lo = min_depth(a.m, a.L[i], b.m, b.L[j])
            if lo is None:
                errs.append(f"pair {p}.{i}-{q}.{j}: weights differ")
            elif n < lo:
                errs.append(f"pair {p}.{i}-{q}.{j}: depth {n} below minimum {lo}")
        return errs


@dataclass
class ChainRecord:
    kind: str          # "outer" or "inner"
    ends: tuple        # principal component ids
    type: object       # OuterType or InnerType
    members: tuple     # non-principal component ids in order

    @property
    def sequence(self):
        if self.kind == "outer":
            return (self.ends[0],) + self.members
        return (self.ends[0],) + self.members + (self.ends[1],)


def exceptional_form(f):
    """(c, n) if f is the looping type [c]I_n, else None."""
    if any(c.g for c in f.components) or any(len(incidence(f, c.id)) != 2 for c in f.components):
        return None
    if not _connected(f) or len({c.m for c in f.components}) != 1:
        return None
    return f[0].m, len(f)


def decompose(f):
    """Principal invariants, inner-chain matching and chain records of f."""
    for c in f.components:
        s = _incidence_sum(f, c.id)
        if c.m < 1 or s % c.m:
            raise FibreError(f"component {c.id}: kernel condition fails")
    prin = [c.id for c in f.components if is_principal(f, c.id)]
    if not prin:
        ex = exceptional_form(f)
        if ex:
            raise ExceptionalType(*ex)
        raise FibreError("no principal components")
    index = {cid: k for k, cid in enumerate(prin)}
    O = [[] for _ in prin]
    L = [[] for _ in prin]
    pairs, depths, records = [], [], []
    seen = set()

    def add_inner(p, seq, members, q):
        a, b = f[p].m, f[q].m
        L[index[p]].append(lift(seq[1], a))
        i = len(L[index[p]]) - 1
        L[index[q]].append(lift(seq[-2], b))
        pairs.append(((index[p], i), (index[q], len(L[index[q]]) - 1)))
        if not is_inner_sequence(seq):
            raise FibreError(f"invalid inner chain {seq}")
        depths.append(depth(seq))
        records.append(ChainRecord("inner", (p, q), sequence_type(seq), tuple(members)))

    for p in prin:
        for _ in range(f[p].nodes):
            add_inner(p, (f[p].m, f[p].m), [], p)
        for q in f.neighbours(p):
            if q in index:
                if p < q:
                    add_inner(p, (f[p].m, f[q].m), [], q)
                continue
            if q in seen:
                continue
            prev, cur, members = p, q, []
            while cur not in index:
                if cur in seen:
                    raise FibreError("chain revisits a component")
                seen.add(cur)
                members.append(cur)
                inc = incidence(f, cur)
                inc.remove(prev)
                if not inc:
                    break
                if len(inc) > 1 or f[cur].g:
                    raise FibreError(f"component {cur} is not a chain component")
                prev, cur = cur, inc[0]
            seq = [f[p].m] + [f[i].m for i in members]
            if cur in index and cur not in members:
                add_inner(p, seq + [f[cur].m], members, cur)
            else:
                if seq[1] % seq[0] == 0:
                    raise FibreError(f"outer chain {seq} starts with a multiple of {seq[0]}")
                O[index[p]].append(seq[1] % seq[0])
                if not is_outer_sequence(seq):
                    raise FibreError(f"invalid outer chain {seq}")
                records.append(ChainRecord("outer", (p,), OuterType(seq[0], seq[1] % seq[0]),
                                           tuple(members)))
    principals = [PrincipalInvariants(f[p].m, f[p].g, tuple(O[k]), tuple(L[k]))
                  for k, p in enumerate(prin)]
    return DecompositionData(principals, pairs, depths), records


def principal_ids(f):
    return [c.id for c in f.components if is_principal(f, c.id)]


def assemble(d):
    """The fibre with decomposition data d."""
    errs = d.violations()
    if errs:
        raise FibreError("; ".join(errs))
    comps = [Component(k, p.m, p.g, 0) for k, p in enumerate(d.principals)]
    inter = Counter()

    def chain(start, seq):
        prev = start
        for x in seq:
            comps.append(Component(len(comps), x, 0, 0))
            inter[(min(prev, len(comps) - 1), max(prev, len(comps) - 1))] += 1
            prev = len(comps) - 1
        return prev

    for k, p in enumerate(d.principals):
        for o in p.O:
            chain(k, outer_sequence(p.m, o)[1:])
    for ((p, i), (q, j)), n in zip(d.pairs, d.depths):
        a, b = d.principals[p], d.principals[q]
        seq = inner_sequence(a.m, a.L[i], b.m, b.L[j], n)
        if len(seq) == 2 and p == q:
            comps[p].nodes += 1
            continue
        last = chain(p, seq[1:-1])
        if last == q:
            comps[q].nodes += 1
        else:
            inter[(min(last, q), max(last, q))] += 1
    return Fibre(comps, dict(inter))


def exceptional_fibre(c, n):
    """The looping type [c]I_n: a cycle of n rational curves of multiplicity c."""
    if n == 1:
        return Fibre([Component(0, c, 0, 1)])
    comps = [Component(i, c) for i in range(n)]
    inter = Counter()
    for i in range(n):
        a, b = i, (i + 1) % n
        inter[(min(a, b), max(a, b))] += 1
    return Fibre(comps, dict(inter))


def chi_sum_check(f):
    d, _ = decompose(f)
    return sum(chi(p) for p in d.principals) == 2 - 2 * total_genus(f)


def is_semistable(f):
    return all(c.m == 1 for c in f.components)


def is_snc(f):
    return all(c.nodes == 0 for c in f.components)


def abelian_toric(f):
    """(a, t): total genus of principal components, and cycle rank of the chain graph."""
    try:
        d, _ = decompose(f)
    except ExceptionalType:
        return 0, 1
    a = sum(p.g for p in d.principals)
    t = len(d.pairs) - len(d.principals) + 1
    return a, t


def family_representative(f):
    """Same fibre with every inner chain at its minimal depth."""
    try:
        d, _ = decompose(f)
    except ExceptionalType as e:
        return exceptional_fibre(e.c, 1)
    depths = []
    for (p, i), (q, j) in d.pairs:
        a, b = d.principals[p], d.principals[q]
        depths.append(min_depth(a.m, a.L[i], b.m, b.L[j]))
    return assemble(DecompositionData(d.principals, d.pairs, depths))


def residue_sorted(rs, m):
    return tuple(sorted(rs, key=lambda r: (gcd(r, m), r)))


@dataclass(frozen=True)
class PrincipalType:
    """Principal invariants with L split into loops, D-tails and edges."""
    m: int
    g: int
    O: tuple
    LL: tuple = ()
    LD: tuple = ()
    LM: tuple = ()

    def __post_init__(self):
        m = self.m
        key = lambda r: (gcd(r, m), r)
        pairs = [tuple(sorted(p, key=key)) for p in self.LL]
        object.__setattr__(self, "O", residue_sorted(self.O, m))
        object.__setattr__(self, "LL", tuple(sorted(pairs, key=lambda p: (key(p[0]), key(p[1])))))
        object.__setattr__(self, "LD", residue_sorted(self.LD, m))
        object.__setattr__(self, "LM", residue_sorted(self.LM, m))

    @property
    def L(self):
        return tuple(x for p in self.LL for x in p) + self.LD + self.LM

    def invariants(self):
        return PrincipalInvariants(self.m, self.g, self.O, residue_sorted(self.L, self.m))

    @property
    def chi(self):
        return chi(self.invariants())
