"""Multiplicity sequences in chains of rational curves, and 1-paths.

Residues modulo m are represented by integers in 1..m, with m standing
for the zero class.
"""

from dataclasses import dataclass
from fractions import Fraction
from math import floor, gcd


class ChainError(ValueError):
    """Raised for invalid chain data; carries the minimal depth if known."""

    def __init__(self, msg, min_depth=None):
        super().__init__(msg)
        self.min_depth = min_depth


@dataclass(frozen=True)
class OuterType:
    m: int
    d: int

    def __post_init__(self):
        if self.m < 2 or not 1 <= self.d < self.m:
            raise ChainError(f"invalid outer type {self.m},{self.d}")


@dataclass(frozen=True)
class InnerType:
    m: int
    d: int
    m2: int
    d2: int
    n: int

    def __str__(self):
        return f"{self.m}<{self.d},{self.d2}>{self.n} {self.m2}"


def lift(a, m):
    """Representative of a mod m in 1..m."""
    r = a % m
    return r if r else m


def residue_key(r, m):
    """Sort key for residues: first by gcd with m, then by value."""
    return (gcd(r, m), r)


def weight(seq):
    if not seq:
        raise ChainError("empty sequence")
    w = 0
    for x in seq:
        w = gcd(w, x)
    return w


def _interior_ok(seq):
    for i in range(1, len(seq) - 1):
        s = seq[i - 1] + seq[i + 1]
        if s % seq[i] or s // seq[i] < 2:
            return False
    return True


def is_inner_sequence(seq):
    seq = list(seq)
    if len(seq) < 2 or min(seq) < 1:
        return False
    return _interior_ok(seq)


def is_outer_sequence(seq):
    seq = list(seq)
    if len(seq) < 2 or min(seq) < 1:
        return False
    return _interior_ok(seq + [0])


def depth(seq):
    if not is_inner_sequence(seq):
        raise ChainError(f"not an inner sequence: {tuple(seq)}")
    seq = list(seq)
    return seq.count(weight(seq)) - 1


def inv(a, b):
    """Smallest x >= 0 with a*x = gcd(a,b) mod b."""
    g = gcd(a, b)
    q = b // g
    if q == 1:
        return 0
    return pow((a // g) % q, -1, q)


def outer_sequence(m, d=None):
    """Outer sequence (m, d, ...) ending at gcd(m, d)."""
    if isinstance(m, OuterType):
        m, d = m.m, m.d
    OuterType(m, d)
    seq = [m, d]
    while seq[-1] != gcd(m, d):
        seq.append((-seq[-2]) % seq[-1])
    return tuple(seq)


def _offset(m, d, m2, d2):
    # chains of weight w are w times chains of weight 1
    return Fraction(inv(d, m) * gcd(d, m), m) + Fraction(inv(d2, m2) * gcd(d2, m2), m2)


def min_depth(m, d, m2, d2):
    """Smallest admissible depth of m<d,d2>n m2, or None if the weights differ."""
    if gcd(d, m) != gcd(d2, m2):
        return None
    return floor(-_offset(m, d, m2, d2)) + 1


def _inner_minus_one(m, d, m2, d2):
    out_left, out_right = [], []
    for _ in range(m + m2 + 2):
        if (d - m2) % m == 0 and (d2 - m) % m2 == 0:
            return tuple(out_left + [m, m2] + out_right[::-1])
        if m >= m2:
            out_left.append(m)
            m, d = lift(d, m), lift(-m, lift(d, m))
        else:
            out_right.append(m2)
            m2, d2 = lift(d2, m2), lift(-m2, lift(d2, m2))
    raise AssertionError("recursion for depth -1 did not terminate")


def inner_sequence(m, d=None, m2=None, d2=None, n=None):
    """The unique inner sequence of type m<d,d2>n m2."""
    if isinstance(m, InnerType):
        m, d, m2, d2, n = m.m, m.d, m.m2, m.d2, m.n
    if m < 1 or m2 < 1:
        raise ChainError("multiplicities must be positive")
    d, d2 = lift(d, m), lift(d2, m2)
    lo = min_depth(m, d, m2, d2)
    if lo is None:
        raise ChainError(f"weights differ: gcd({d},{m}) != gcd({d2},{m2})")
    if n < lo:
        raise ChainError(f"depth {n} below minimum {lo} for {m}<{d},{d2}>{n} {m2}", lo)
    if n == -1:
        seq = _inner_minus_one(m, d, m2, d2)
    else:
        c = gcd(d, m)
        left = outer_sequence(m, d) if c < m else (m,)
        right = outer_sequence(m2, d2)[::-1] if c < m2 else (m2,)
        seq = left[:-1] + (c,) * (n + 1) + right[1:]
    return seq


def sequence_type(seq, kind="inner"):
    seq = tuple(seq)
    if kind == "outer":
        if not is_outer_sequence(seq):
            raise ChainError(f"not an outer sequence: {seq}")
        return OuterType(seq[0], seq[1] % seq[0])
    if not is_inner_sequence(seq):
        raise ChainError(f"not an inner sequence: {seq}")
    m, m2 = seq[0], seq[-1]
    return InnerType(m, lift(seq[1], m), m2, lift(seq[-2], m2), depth(list(seq)))


def shortest_one_path(a, b):
    """Unique shortest 1-path from a down to b."""
    a, b = Fraction(a), Fraction(b)
    if a <= b:
        raise ChainError("a 1-path needs a > b")
    head, tail = [], []
    n, d, n2, d2 = a.numerator, a.denominator, b.numerator, b.denominator
    while n * d2 - d * n2 != 1:
        if d >= d2:
            head.append(Fraction(n, d))
            y = pow(n, -1, d) if d > 1 else 1
            n, d = (y * n - 1) // d, y
        else:
            tail.append(Fraction(n2, d2))
            y = (-pow(n2, -1, d2)) % d2 if d2 > 1 else 1
            n2, d2 = (1 + y * n2) // d2, y
    return head + [Fraction(n, d), Fraction(n2, d2)] + tail[::-1]
