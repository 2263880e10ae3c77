"""Acceptance checks shared by the test suite and the `selftest` subcommand.

Each check returns a list of failure messages (empty on success).  Expected
values come from checked-in fixture files or from the literal constants below.
"""

import json
import os
import random
import time
from collections import Counter, deque
from fractions import Fraction
from math import gcd, sqrt
from pathlib import Path

from . import classify as C
from .chains import (ChainError, InnerType, OuterType, inner_sequence, min_depth,
                     outer_sequence, sequence_type, shortest_one_path)
from .fibre import (DecompositionData, Fibre, PrincipalInvariants, abelian_toric,
                    assemble, chi_sum_check, decompose, total_genus, validate)
from .label import canonical_label, parse_label, parse_principal_type, type_label


def fixture_dir():
    env = os.environ.get("REDTYPES_FIXTURES")
    if env:
        return Path(env)
    for base in (Path.cwd(), *Path(__file__).resolve().parents):
        p = base / "tests" / "data"
        if (p / "tables.json").exists():
            return p
    raise FileNotFoundError("fixture directory not found; set REDTYPES_FIXTURES")


def load(name):
    with open(fixture_dir() / name) as fh:
        return json.load(fh)


# fibres built directly from dual graphs

def tree_fibre(centre, arms):
    """A genus-0 centre of multiplicity `centre` with chains of given multiplicities."""
    comps = [{"id": 0, "m": centre}]
    inter = []
    for arm in arms:
        prev = 0
        for m in arm:
            i = len(comps)
            comps.append({"id": i, "m": m})
            inter.append([prev, i, 1])
            prev = i
    return Fibre.from_json({"components": comps, "intersections": inter})


def cycle_fibre(n):
    if n == 1:
        return Fibre.from_json({"components": [{"id": 0, "m": 1, "nodes": 1}], "intersections": []})
    if n == 2:
        return Fibre.from_json({"components": [{"id": 0, "m": 1}, {"id": 1, "m": 1}],
                                "intersections": [[0, 1, 2]]})
    return Fibre.from_json({"components": [{"id": i, "m": 1} for i in range(n)],
                            "intersections": [sorted([i, (i + 1) % n]) + [1] for i in range(n)]})


def dstar_fibre(n):
    """Kodaira I*_n: a chain of n+1 double curves with two simple curves at each end."""
    comps = [{"id": i, "m": 2} for i in range(n + 1)] + [{"id": n + 1 + i, "m": 1} for i in range(4)]
    inter = [[i, i + 1, 1] for i in range(n)]
    inter += [[0, n + 1, 1], [0, n + 2, 1], [n, n + 3, 1], [n, n + 4, 1]]
    return Fibre.from_json({"components": comps, "intersections": inter})


def kodaira_fibres():
    return {
        "I_{g1}": Fibre.from_json({"components": [{"id": 0, "m": 1, "g": 1}], "intersections": []}),
        "I_1": cycle_fibre(1),
        "I_2": cycle_fibre(2),
        "I_5": cycle_fibre(5),
        "I*_0": tree_fibre(2, [[1], [1], [1], [1]]),
        "I*_1": dstar_fibre(1),
        "I*_3": dstar_fibre(3),
        "II": tree_fibre(6, [[1], [2], [3]]),
        "III": tree_fibre(4, [[1], [1], [2]]),
        "IV": tree_fibre(3, [[1], [1], [1]]),
        "II*": tree_fibre(6, [[5, 4, 3, 2, 1], [4, 2], [3]]),
        "III*": tree_fibre(4, [[3, 2, 1], [3, 2, 1], [2]]),
        "IV*": tree_fibre(3, [[2, 1], [2, 1], [2, 1]]),
    }


def worked_example_fibre():
    P = [PrincipalInvariants(1, 0, (), (1, 1, 1)), PrincipalInvariants(2, 0, (1, 1, 1), (1,)),
         PrincipalInvariants(6, 0, (2, 3), (1,)), PrincipalInvariants(4, 0, (3, 2), (3,))]
    return assemble(DecompositionData(P, [((0, 0), (1, 0)), ((0, 1), (2, 0)), ((0, 2), (3, 0))], [1, 1, 0]))


def two_dtail_fibre():
    P = [PrincipalInvariants(2, 0, (1,), (1, 2)), PrincipalInvariants(2, 0, (1,), (1, 2)),
         PrincipalInvariants(2, 0, (1, 1), (2,)), PrincipalInvariants(2, 0, (1, 1), (2,))]
    return assemble(DecompositionData(P, [((0, 0), (1, 0)), ((0, 1), (2, 0)), ((1, 1), (3, 0))], [0, 2, 2]))


# oracles

def brute_one_path_lengths(target, D):
    """Shortest 1-path lengths from every fraction in [target, 1] down to target."""
    nodes = sorted({Fraction(p, q) for q in range(1, D + 1) for p in range(0, q + 1)})
    nodes = [x for x in nodes if x >= target]
    dist = {target: 1}
    count = {target: 1}
    q = deque([target])
    # reverse BFS: x -> y is a step when x > y and det(x, y) = 1
    while q:
        y = q.popleft()
        for x in nodes:
            if x > y and x.numerator * y.denominator - x.denominator * y.numerator == 1:
                if x not in dist:
                    dist[x] = dist[y] + 1
                    count[x] = count[y]
                    q.append(x)
                elif dist[x] == dist[y] + 1:
                    count[x] += count[y]
    return dist, count


def brute_cores(m, k, chi):
    out = set()
    from itertools import combinations_with_replacement
    for rs in combinations_with_replacement(range(1, m), k):
        if sum(rs) % m == 0 and gcd(m, *rs) == 1 and m * (2 - k) + sum(gcd(m, r) for r in rs) == chi:
            out.add(C.Core(m, rs))
    return out


def ratio_row_match(p, rows):
    """(row index, k, u) with p = n * row, or None."""
    if p.g:
        return None
    for i, r in enumerate(rows):
        ks = range(r["kmin"], 7 * p.m + 2) if "kmin" in r else [0]
        for k in ks:
            m0 = eval(r["m0"], {}, {"k": k})
            if m0 > p.m:
                break
            if p.m % m0:
                continue
            n = p.m // m0
            if any(x % n for x in p.O + p.L):
                continue
            O = sorted((x // n) % m0 for x in p.O)
            L = sorted((x // n) % m0 for x in p.L)
            ratio = eval(r["ratio"], {}, {"k": Fraction(k)}) if "k" in r["ratio"] else Fraction(r["ratio"])
            if Fraction(p.m, -p.chi) != ratio:
                continue
            for u in range(1, m0):
                if gcd(u, m0) != 1:
                    continue
                ev = lambda es: sorted(eval(e, {}, {"k": k, "u": u}) % m0 for e in es)
                if ev(r["O"]) == O and ev(r["L"]) == L:
                    return i, k, u
    return None


def principal_bounds_hold(p):
    b = -p.chi
    return p.m <= 6 * b and p.g <= (2 + b) // 2 and len(p.O) <= 4 + b and len(p.L) <= 2 + b


def shape_from_fixture(e):
    return C.Shape(tuple(e["chi"]), tuple((u, v, tuple(w)) for u, v, w in e["edges"]))


# criteria

def criterion_1():
    fails = []
    t = time.perf_counter()
    if inner_sequence(8, 5, 4, 3, -1) != (8, 5, 2, 3, 4):
        fails.append("inner_sequence(8,5,4,3,-1)")
    if inner_sequence(8, 5, 4, 3, 0) != (8, 5, 2, 1, 2, 3, 4):
        fails.append("inner_sequence(8,5,4,3,0)")
    try:
        inner_sequence(5, 3, 5, 3, -1)
        fails.append("inner_sequence(5,3,5,3,-1) accepted")
    except ChainError:
        pass
    if outer_sequence(8, 5) != (8, 5, 2, 1):
        fails.append("outer_sequence(8,5)")
    F = Fraction
    path = [F(19, 23), F(14, 17), F(9, 11), F(4, 5), F(3, 4), F(5, 7), F(7, 10), F(16, 23)]
    if shortest_one_path(F(19, 23), F(16, 23)) != path:
        fails.append("shortest_one_path(19/23, 16/23)")
    per = (time.perf_counter() - t) / 5
    if per > 1e-3:
        fails.append(f"too slow: {per * 1e3:.3f} ms per call")
    return fails


def criterion_2():
    fails = []
    t = time.perf_counter()
    for m in range(1, 13):
        for d in range(1, m + 1):
            if d < m and m >= 2:
                o = sequence_type(outer_sequence(m, d), "outer")
                if o != OuterType(m, d):
                    fails.append(f"outer {m},{d}")
            for m2 in range(1, 13):
                for d2 in range(1, m2 + 1):
                    lo = min_depth(m, d, m2, d2)
                    if lo is None:
                        continue
                    for n in range(lo, lo + 4):
                        seq = inner_sequence(m, d, m2, d2, n)
                        if sequence_type(seq) != InnerType(m, d, m2, d2, n):
                            fails.append(f"inner {m},{d},{m2},{d2},{n}")
    if time.perf_counter() - t > 5:
        fails.append("type/sequence round trip slower than 5 s")
    t = time.perf_counter()
    fr = sorted({Fraction(p, q) for q in range(1, 31) for p in range(0, q + 1)})
    for b in fr:
        dist, count = brute_one_path_lengths(b, 30)
        for a in fr:
            if a <= b:
                continue
            path = shortest_one_path(a, b)
            if len(path) != dist[a] or count[a] != 1 or path[0] != a or path[-1] != b:
                fails.append(f"1-path {a} -> {b}")
    if time.perf_counter() - t > 60:
        fails.append("1-path check slower than 60 s")
    return fails


def criterion_3():
    fails = []
    t = time.perf_counter()
    tables = load("tables.json")["cores"]
    for chi in (0, -2, -4, -6, -8):
        ours = C.enumerate_cores(chi)
        exp = {C.Core(m, tuple(r)) for m, r in tables[str(chi)]}
        if ours != exp:
            fails.append(f"cores chi={chi}: {len(ours)} vs {len(exp)}")
    if len(C.enumerate_cores(-2)) != 16 or len(C.enumerate_cores(-4)) != 43:
        fails.append("core counts 16/43")
    if len(C.enumerate_cores(0)) != 7:
        fails.append("seven cores with chi=0")
    if time.perf_counter() - t > 5:
        fails.append("slower than 5 s")
    return fails


def criterion_4():
    fails = []
    t = time.perf_counter()
    tables = load("tables.json")
    for chi, n in tables["principal_type_counts"].items():
        got = len(C.enumerate_principal_types(int(chi)))
        if got != n:
            fails.append(f"principal type count chi={chi}: {got} != {n}")
    if time.perf_counter() - t > 60:
        fails.append("principal type counts slower than 60 s")
    fixture = load("principal_types.json")
    for chi in (-1, -2, -3):
        exp = {e["label"] for e in fixture if e["chi"] == chi}
        ours = {type_label(tt) for tt in C.enumerate_principal_types(chi)}
        if ours != exp:
            fails.append(f"PS chi={chi}: {len(ours ^ exp)} labels differ")
        groups = C.types_by_shape(chi)
        exp_groups = Counter(C.edge_weights(parse_principal_type(lab)) for lab in exp)
        if {w: len(ts) for w, ts in groups.items()} != dict(exp_groups):
            fails.append(f"PS chi={chi}: shape grouping differs")
    if sorted(len(v) for v in C.types_by_shape(-1).values()) != [1, 1, 1, 10]:
        fails.append("chi=-1 grouping 10+1+1+1")
    spots = [(-1, (1,), 10), (-2, (), 46), (-2, (2,), 18), (-2, (1, 1), 8)]
    for chi, w, n in spots:
        got = C.count_types_by_weight_vector(chi, w)
        if got != n:
            fails.append(f"N^{chi}_{w} = {got} != {n}")
    for chi, row in tables["max_weight_counts"].items():
        chi = int(chi)
        if chi < -10:
            continue
        # N_w only depends on the multiset of w
        vecs = set(C.types_by_shape(chi))
        n = [0] * len(row)
        for w in vecs:
            N = C.count_types_by_weight_vector(chi, w)
            if N > sqrt(10) ** (2 - chi - len(w)) + 1e-9:
                fails.append(f"sqrt(10) bound fails at chi={chi}, w={w}")
            if len(w) < len(n):
                n[len(w)] = max(n[len(w)], N)
        if n != row:
            fails.append(f"max-arrangement count chi={chi}: {n} != {row}")
    return fails


_cache = {}


def families(g, jobs=None):
    if g not in _cache:
        _cache[g] = C.enumerate_families(g, jobs=jobs)
    return _cache[g]


def criterion_5(jobs=None, extended=False):
    fails = []
    sc = load("shape_counts.json")
    limits = {2: 10, 3: 10, 4: 300}
    expected_totals = {2: (5, 104), 3: (35, 1901), 4: (310, None)}
    for g in (2, 3, 4):
        t = time.perf_counter()
        shapes = C.enumerate_shapes(g)
        fs = C.enumerate_families(g, jobs=jobs, shapes=shapes)
        el = time.perf_counter() - t
        _cache[g] = fs
        ns, nf = expected_totals[g]
        if len(shapes) != ns:
            fails.append(f"genus {g}: {len(shapes)} shapes, expected {ns}")
        if nf is not None and len(fs) != nf:
            fails.append(f"genus {g}: {len(fs)} families, expected {nf}")
        ours = Counter(f.shape.key() for f in fs)
        rows = sc[f"genus{g}"]
        for e in rows:
            k = shape_from_fixture(e).key()
            if ours.get(k) != e["count"]:
                fails.append(f"genus {g}: shape {e['chi']} {e['edges']} has {ours.get(k)} families, expected {e['count']}")
        if g == 4 and len(rows) < 10:
            fails.append("fewer than 10 genus-4 spot checks")
        if g == 2 and sorted(ours.values()) != [1, 1, 1, 46, 55]:
            fails.append("genus 2 per-shape counts")
        if el > limits[g]:
            fails.append(f"genus {g} took {el:.1f} s")
    if extended:
        n5 = len(C.enumerate_shapes(5))
        if n5 != 3700:
            fails.append(f"genus 5: {n5} shapes, expected 3700")
    return fails


def criterion_6(jobs=None):
    fails = []
    exp2 = sorted(load("tables.json")["semistable_genus2"])
    for g, n in ((2, 7), (3, 42)):
        fs = C.enumerate_semistable_families(g, jobs=jobs)
        if len(fs) != n:
            fails.append(f"genus {g}: {len(fs)} semistable families, expected {n}")
        if g == 2 and sorted(f.label for f in fs) != exp2:
            fails.append("genus 2 semistable labels differ")
        for f in fs:
            a, tor = abelian_toric(f.fibre())
            if a + tor != g:
                fails.append(f"{f.label}: a + t = {a + tor}")
    return fails


def criterion_7(jobs=None):
    fails = []
    big = load("tables.json")["large_multiplicity"]
    for g in (2, 3, 4):
        fs = families(g, jobs)
        labs = sorted(f.label for f in fs if any(v.m > 6 * (g - 1) for v in f.vertices))
        if g == 2 and len(labs) != 10:
            fails.append(f"genus 2: {len(labs)} families with m > 6")
        if str(g) in big and labs != sorted(big[str(g)]):
            fails.append(f"genus {g}: large multiplicity families differ")
        top = [f for f in fs if any(v.m == 12 * (g - 1) for v in f.vertices)]
        names = sorted(f.label for f in top)
        want = sorted([f"[{2 * (g - 1)}]II*_D", f"[{2 * (g - 1)}]II_D"])
        if names != want:
            fails.append(f"genus {g}: m = 12(g-1) families are {names}")
    rows = load("ratio_rows.json")["rows"]
    for chi in range(-1, -11, -1):
        for p in C.large_multiplicity_check(chi):
            if ratio_row_match(p, rows) is None:
                fails.append(f"{p} matches no large-multiplicity row")
            if not C.ratio_is_admissible(Fraction(p.m, -chi)):
                fails.append(f"{p}: ratio not 2+4/k or 2+3/k")
    # ratio 6 at chi=-1 is the first large-multiplicity row with k=1: cores II and II*
    # with one weight-1 edge; their doubles carry the edge as a D-tail
    six = {p for p in C.large_multiplicity_check(-1) if p.m == 6}
    want = {PrincipalInvariants(6, 0, (2, 3), (1,)), PrincipalInvariants(6, 0, (4, 3), (5,))}
    if six != want:
        fails.append(f"chi=-1 ratio-6 instances: {sorted(map(str, six))}")
    if {C.core_of(p)[1] for p in six} != {C.Core(6, (1, 2, 3)), C.Core(6, (5, 4, 3))}:
        fails.append("chi=-1 ratio-6 cores are not II and II*")
    dt = {type_label(tt) for tt in C.enumerate_principal_types(-2) if tt.m == 12 and tt.LD}
    if dt != {"[2]II_D", "[2]II*_D"}:
        fails.append(f"ratio-6 D-tail types at chi=-2: {sorted(dt)}")
    return fails


def criterion_8(jobs=None):
    fails = []
    t = time.perf_counter()
    for g in (2, 3):
        for fam in families(g, jobs):
            f = fam.fibre()
            errs = validate(f)
            if errs:
                fails.append(f"{fam.label}: {errs[0]}")
                continue
            if total_genus(f) != g:
                fails.append(f"{fam.label}: genus {total_genus(f)}")
            if not chi_sum_check(f):
                fails.append(f"{fam.label}: chi sum")
            d, _ = decompose(f)
            for p in d.principals:
                if p.chi < 0 and not principal_bounds_hold(p):
                    fails.append(f"{fam.label}: bounds fail for {p}")
    if time.perf_counter() - t > 30:
        fails.append(f"slower than 30 s ({time.perf_counter() - t:.1f} s)")
    return fails


def criterion_9(jobs=None, shuffles=20, seed=0):
    fails = []
    t = time.perf_counter()
    for name, f in kodaira_fibres().items():
        lab = canonical_label(f)
        if lab != name:
            fails.append(f"Kodaira {name}: printed {lab}")
    if canonical_label(worked_example_fibre()) != "I*_0-(1)I-(1)II&III*-(0)c2":
        fails.append("worked example label")
    if canonical_label(two_dtail_fibre()) != "I*_2-I*_2":
        fails.append("I*_2-I*_2")
    for s, want in (("I2-(3)I4", "I_2-(3)I_4"), ("II*", "II*"),
                    ("I*_0-(1)I-(1)II&III*-(0)c2", "I*_0-(1)I-(1)II&III*-(0)c2")):
        if canonical_label(parse_label(s)) != want:
            fails.append(f"{s} prints as {canonical_label(parse_label(s))}")
    rng = random.Random(seed)
    for g in (2, 3):
        for fam in families(g, jobs):
            f = fam.fibre()
            if canonical_label(f) != fam.label:
                fails.append(f"{fam.label}: relabelled as {canonical_label(f)}")
            if canonical_label(parse_label(fam.label)) != fam.label:
                fails.append(f"{fam.label}: parse/label round trip")
            n = len(f.components)
            for _ in range(shuffles):
                perm = list(range(n))
                rng.shuffle(perm)
                if canonical_label(f.relabel(perm)) != fam.label:
                    fails.append(f"{fam.label}: not invariant under {perm}")
                    break
    if time.perf_counter() - t > 60:
        fails.append(f"slower than 60 s ({time.perf_counter() - t:.1f} s)")
    return fails


CRITERIA = {
    1: ("chains", criterion_1),
    2: ("round trips", criterion_2),
    3: ("cores", criterion_3),
    4: ("principal types", criterion_4),
    5: ("families", criterion_5),
    6: ("semistable", criterion_6),
    7: ("large multiplicity", criterion_7),
    8: ("genus and chi properties", criterion_8),
    9: ("labels", criterion_9),
}


def run(which=None, out=print, **kw):
    """Run criteria, print one line each, return True if all passed."""
    ok = True
    for k, (name, fn) in CRITERIA.items():
        if which and k not in which:
            continue
        t = time.perf_counter()
        args = {a: v for a, v in kw.items() if a in fn.__code__.co_varnames[:fn.__code__.co_argcount]}
        fails = fn(**args)
        el = time.perf_counter() - t
        status = "PASS" if not fails else "FAIL"
        out(f"criterion {k} ({name}): {status} [{el:.2f} s]")
        for msg in fails[:10]:
            out(f"    {msg}")
        ok = ok and not fails
    return ok
