"""Symmetric operads over F_2 in degree 0, with permutation bases.

Conventions
-----------
* Inputs are numbered from 0.  ``compose(mu, i, nu)`` plugs ``nu`` into input
  ``i`` of ``mu``; the inputs of the result are mu's inputs before i, then
  nu's inputs, then mu's inputs after i.
* Permutations act on the right: ``act(mu, perm)`` moves input p of mu to
  position ``perm[p]``.
* Free-algebra monomials (mu; x_1..x_n) are stored as canonical orbit
  representatives under the diagonal Sigma_n action.  Each operad family has
  a sort-based canonical form; the base class falls back on enumerating
  Sigma_n, which also serves as an oracle for small arities.

The Com family (Com, uCom, their composites with a unary operad, Lev and
T_qLev) is handled by ``DecoratedCom``: a token of arity n is an exponent
tuple (a_1..a_n) standing for (mu_n; d^{a_1},...,d^{a_n}).
"""

from __future__ import annotations

import math
from fractions import Fraction
from functools import lru_cache
from itertools import permutations, product
from typing import Dict, Hashable, Iterable, List, Optional, Sequence, Tuple

from .gf2core import ZERO, F2Vector, toggle

Perm = Tuple[int, ...]


class OperadError(ValueError):
    pass


class RelationError(OperadError):
    """A morphism or centrality check failed; ``relation`` names what broke."""

    def __init__(self, relation: str, detail: str = ""):
        super().__init__(f"relation violated: {relation}" + (f" ({detail})" if detail else ""))
        self.relation = relation


# permutations -------------------------------------------------------------


def act_tuple(seq: Sequence, perm: Perm) -> tuple:
    """new[perm[p]] = seq[p]."""
    out = [None] * len(seq)
    for p, q in enumerate(perm):
        out[q] = seq[p]
    return tuple(out)


def transposition(n: int, a: int, b: int) -> Perm:
    p = list(range(n))
    p[a], p[b] = p[b], p[a]
    return tuple(p)


def sigma_2n(n: int) -> Perm:
    """0-based form of 2i -> n+i, 2i-1 -> i (1-based)."""
    return tuple(p // 2 if p % 2 == 0 else n + p // 2 for p in range(2 * n))


def perm_compose(first: Perm, then: Perm) -> Perm:
    """Acting by ``first`` then ``then``."""
    return tuple(then[first[p]] for p in range(len(first)))


def generated_group_order(gens: Sequence[Perm], n: int) -> int:
    seen = {tuple(range(n))}
    frontier = list(seen)
    while frontier:
        nxt = []
        for g in frontier:
            for h in gens:
                c = perm_compose(g, h)
                if c not in seen:
                    seen.add(c)
                    nxt.append(c)
        frontier = nxt
    return len(seen)


# hole label for ideal contexts --------------------------------------------


class Hole:
    """Placeholder label sorting after every module token."""

    __slots__ = ()

    def __eq__(self, other):
        return isinstance(other, Hole)

    def __hash__(self):
        return 0x401E

    def __lt__(self, other):
        return False

    def __le__(self, other):
        return isinstance(other, Hole)

    def __gt__(self, other):
        return not isinstance(other, Hole)

    def __ge__(self, other):
        return True

    def __repr__(self):
        return "HOLE"


HOLE = Hole()

Atom = Tuple[Hashable, int, Fraction]  # (label, degree, weight factor)


def v2(x: Fraction) -> int:
    num, den = x.numerator, x.denominator
    return ((num & -num).bit_length() - 1) - ((den & -den).bit_length() - 1)


# base class ---------------------------------------------------------------


class Operad:
    name = "operad"
    unital = False
    supports_weight = False

    def __init__(self, arity_cap: int):
        self.arity_cap = arity_cap

    def __repr__(self):
        return f"<Operad {self.name}>"

    # to be provided
    def basis(self, n: int) -> List[Hashable]:
        raise NotImplementedError

    def arity(self, token) -> int:
        raise NotImplementedError

    def act(self, token, perm: Perm):
        raise NotImplementedError

    def compose(self, mu, i: int, nu) -> F2Vector:
        raise NotImplementedError

    @property
    def unit(self):
        raise NotImplementedError

    def generators(self) -> List[Hashable]:
        raise NotImplementedError

    def default_star(self) -> F2Vector:
        raise NotImplementedError

    def fmt(self, token) -> str:
        return repr(token)

    def decompose(self, token):
        """Expression tree over generators: ('gen', g) | ('unit',) |
        ('comp', tree, i, tree) | ('act', tree, perm)."""
        raise NotImplementedError(f"{self.name} has no generator decomposition")

    # linear extensions
    def compose_vec(self, u, i: int, v) -> F2Vector:
        acc: set = set()
        for a in u:
            for b in v:
                toggle(acc, self.compose(a, i, b))
        return F2Vector(acc)

    def act_vec(self, v, perm: Perm) -> F2Vector:
        return F2Vector.from_terms(self.act(t, perm) for t in v)

    def gamma_vec(self, u, args: Sequence) -> F2Vector:
        """Total composition u(v_0, ..., v_{n-1})."""
        cur = F2Vector(u)
        for i in range(len(args) - 1, -1, -1):
            cur = self.compose_vec(cur, i, args[i])
        return cur

    def evaluate(self, tree) -> F2Vector:
        kind = tree[0]
        if kind == "unit":
            return F2Vector((self.unit,))
        if kind == "gen":
            return F2Vector((tree[1],))
        if kind == "comp":
            return self.compose_vec(self.evaluate(tree[1]), tree[2], self.evaluate(tree[3]))
        if kind == "act":
            return self.act_vec(self.evaluate(tree[1]), tree[2])
        raise ValueError(kind)

    # free algebra hooks (generic, by enumerating Sigma_n)
    def canonical(self, token, labels: Sequence) -> Hashable:
        labels = tuple(labels)
        n = len(labels)
        best = None
        for perm in permutations(range(n)):
            cand = (self.act(token, perm), act_tuple(labels, perm))
            if best is None or cand < best:
                best = cand
        return best if best is not None else (token, ())

    def split(self, m) -> Tuple[Hashable, tuple]:
        return m

    def gamma(self, mu, monomials: Sequence) -> F2Vector:
        """Algebra composition mu(m_1, ..., m_n) of monomials."""
        parts = [self.split(m) for m in monomials]
        labels: tuple = ()
        for _, lab in parts:
            labels += lab
        res = self.gamma_vec(F2Vector((mu,)), [F2Vector((tok,)) for tok, _ in parts])
        return F2Vector.from_terms(self.canonical(t, labels) for t in res)

    def substitute(self, ctx, e_mono) -> F2Vector:
        tok, labels = self.split(ctx)
        h = labels.index(HOLE)
        etok, elab = self.split(e_mono)
        res = self.compose(tok, h, etok)
        new_labels = labels[:h] + elab + labels[h + 1:]
        return F2Vector.from_terms(self.canonical(t, new_labels) for t in res)

    def _label_multisets(self, atoms: Sequence[Atom], degree: int, need_hole: bool):
        atoms = sorted(atoms, key=lambda a: (a[1], a[0]))

        def rec(start, rem, cur):
            if rem == 0:
                yield tuple(cur)
                return
            for k in range(start, len(atoms)):
                lab, deg, _ = atoms[k]
                if deg > rem:
                    break
                if deg <= 0:
                    raise OperadError("free algebras need labels of positive degree")
                cur.append(lab)
                yield from rec(k, rem - deg, cur)
                cur.pop()

        for ms in rec(0, degree, []):
            if need_hole != (HOLE in ms):
                continue
            if ms.count(HOLE) > 1:
                continue
            yield ms

    def monomials(self, atoms: Sequence[Atom], degree: int, weight=None) -> List[Hashable]:
        if weight is not None:
            raise OperadError(f"{self.name} has no weight grading")
        out = set()
        if degree == 0:
            if self.unital:
                for t in self.basis(0):
                    out.add(self.canonical(t, ()))
            return sorted(out)
        for ms in self._label_multisets(atoms, degree, False):
            if len(ms) > self.arity_cap:
                raise OperadError(f"{self.name}: arity {len(ms)} above cap {self.arity_cap}")
            for t in self.basis(len(ms)):
                out.add(self.canonical(t, ms))
        return sorted(out)

    def contexts(self, atoms: Sequence[Atom], degree: int, hole: Atom, weight=None) -> List[Hashable]:
        if weight is not None:
            raise OperadError(f"{self.name} has no weight grading")
        out = set()
        for ms in self._label_multisets(list(atoms) + [hole], degree, True):
            if len(ms) > self.arity_cap:
                raise OperadError(f"{self.name}: arity {len(ms)} above cap {self.arity_cap}")
            for t in self.basis(len(ms)):
                out.add(self.canonical(t, ms))
        return sorted(out)

    def monomial_degree(self, m, degree_of) -> int:
        return sum(degree_of(l) for l in self.split(m)[1])

    def cartan(self, i: int, m, module) -> F2Vector:
        """Sq^i on a monomial: distribute i over the slots."""
        tok, labels = self.split(m)
        states: Dict[Tuple[int, tuple], int] = {(0, ()): 1}
        for lab in labels:
            dl = module.degree(lab)
            nxt: Dict[Tuple[int, tuple], int] = {}
            for (used, pre), c in states.items():
                for k in range(0, min(dl, i - used) + 1):
                    for s in module.sq_token(k, lab):
                        key = (used + k, pre + (s,))
                        nxt[key] = nxt.get(key, 0) ^ c
            states = {k: c for k, c in nxt.items() if c}
        acc: set = set()
        for (used, labs), c in states.items():
            if used == i and c:
                toggle(acc, (self.canonical(tok, labs),))
        return F2Vector(acc)

    def fmt_monomial(self, m, fmt_label=repr) -> str:
        tok, labels = self.split(m)
        return f"({self.fmt(tok)}; {', '.join(fmt_label(l) for l in labels)})"


# exponent monoids -----------------------------------------------------------


class ExponentMonoid:
    """Exponents of d in the unary operads D, D+-, Q_sD, T_qD (and trivial).

    ``add`` returns None when the product is zero (T_q overflow) and raises
    when an unbounded monoid leaves its stored range.
    """

    def __init__(self, kind: str, param: int = 0, cap: int = 8):
        if kind not in ("trivial", "N", "Z", "Q", "T"):
            raise ValueError(kind)
        if kind == "Q" and param < 1:
            raise ValueError("Q_s needs s >= 1")
        if kind == "T" and param < 0:
            raise ValueError("T_q needs q >= 0")
        self.kind = kind
        self.param = param
        self.cap = cap

    @property
    def label(self) -> str:
        return {"trivial": "", "N": "D", "Z": "D+-", "Q": f"Q{self.param}D", "T": f"T{self.param}D"}[self.kind]

    @property
    def lo(self) -> int:
        return -self.cap if self.kind == "Z" else 0

    @property
    def hi(self) -> int:
        return {"trivial": 0, "N": self.cap, "Z": self.cap, "Q": self.param - 1, "T": self.param}[self.kind]

    @property
    def bounded(self) -> bool:
        return self.kind in ("trivial", "Q", "T")

    def elements(self, lo: Optional[int] = None, hi: Optional[int] = None) -> range:
        a = self.lo if lo is None else max(lo, self.lo)
        b = self.hi if hi is None else min(hi, self.hi)
        return range(a, b + 1)

    def add(self, a: int, b: int) -> Optional[int]:
        s = a + b
        k = self.kind
        if k == "trivial":
            return 0
        if k == "Q":
            return s % self.param
        if k == "T":
            return s if s <= self.param else None
        if not self.lo <= s <= self.hi:
            raise OverflowError(f"exponent {s} outside stored range [{self.lo}, {self.hi}] of {self.label}")
        return s


class UnaryOperad(Operad):
    """Arity-one operad F[d] modulo a monoid relation; token = exponent."""

    def __init__(self, monoid: ExponentMonoid):
        super().__init__(1)
        self.monoid = monoid
        self.name = monoid.label or "I"

    def basis(self, n):
        return list(self.monoid.elements()) if n == 1 else []

    def arity(self, token):
        return 1

    def act(self, token, perm):
        return token

    def compose(self, mu, i, nu):
        if i != 0:
            raise IndexError(i)
        s = self.monoid.add(mu, nu)
        return ZERO if s is None else F2Vector((s,))

    @property
    def unit(self):
        return 0

    def generators(self):
        if self.monoid.kind == "Z":
            return [1, -1]
        return [1] if self.monoid.hi >= 1 else []

    def default_star(self):
        return ZERO

    def fmt(self, token):
        return f"d^{token}"


def unary_operad(kind: str, exponent_cap: int = 8) -> UnaryOperad:
    """kind: 'D', 'Dpm', ('QsD', s) or ('TqD', q)."""
    if isinstance(kind, tuple):
        k, p = kind
        return UnaryOperad(ExponentMonoid({"QsD": "Q", "TqD": "T"}[k], p, exponent_cap))
    return UnaryOperad(ExponentMonoid({"D": "N", "Dpm": "Z"}[kind], 0, exponent_cap))


# the Com family ---------------------------------------------------------------


class DecoratedCom(Operad):
    """(u)Com composed with a unary operad, optionally cut down by Kraft's sum.

    Token of arity n: exponent tuple (a_1..a_n) = (mu_n; d^{a_1},...,d^{a_n}).
    With ``kraft`` the basis is the tuples with sum 2^{-a_j} = 1 (Lev and
    T_qLev inside Com o D and Com o T_qD); Kraft's sum is preserved by
    composition, so this is a suboperad.
    Free-algebra monomials are sorted tuples of (exponent, label) pairs.
    """

    def __init__(self, monoid: ExponentMonoid, unital: bool, kraft: bool, arity_cap: int, name: str):
        super().__init__(arity_cap)
        if kraft and monoid.kind not in ("N", "T"):
            raise ValueError("Kraft's condition needs nonnegative exponents")
        if kraft and unital:
            raise ValueError("level operads have no arity-zero part")
        self.monoid = monoid
        self.unital = unital
        self.kraft = kraft
        self.name = name
        self.supports_weight = monoid.kind in ("N", "Z") and not kraft

    # operad structure
    def basis(self, n, exponent_bound: Optional[int] = None):
        if n < 0 or n > self.arity_cap:
            return []
        if n == 0:
            return [()] if self.unital else []
        if self.kraft:
            top = n - 1 if self.monoid.kind == "N" else min(n - 1, self.monoid.param)
            return sorted(set(t for ms in _kraft_multisets(n, top) for t in set(permutations(ms))))
        hi = None if exponent_bound is None else exponent_bound
        lo = None if exponent_bound is None else -exponent_bound
        vals = self.monoid.elements(lo, hi)
        return [tuple(t) for t in product(vals, repeat=n)]

    def arity(self, token):
        return len(token)

    def act(self, token, perm):
        return act_tuple(token, perm)

    def compose(self, mu, i, nu):
        a = mu[i]
        mid = []
        for b in nu:
            s = self.monoid.add(a, b)
            if s is None:
                return ZERO
            mid.append(s)
        return F2Vector((mu[:i] + tuple(mid) + mu[i + 1:],))

    @property
    def unit(self):
        return (0,)

    def generators(self):
        if self.kraft:
            return [(1, 1)] if self.monoid.add(0, 1) is not None else []
        gens = [(0, 0)]
        if self.unital:
            gens.append(())
        if self.monoid.kind == "Z":
            gens += [(1,), (-1,)]
        elif self.monoid.kind != "trivial" and self.monoid.hi >= 1:
            gens.append((1,))
        return gens

    def default_star(self):
        if self.monoid.kind == "trivial":
            return F2Vector(((0, 0),))
        if self.monoid.add(0, 1) is None:
            return ZERO
        return F2Vector(((1, 1),))

    def fmt(self, token):
        if not token:
            return "u"
        if self.monoid.kind == "trivial":
            return f"m{len(token)}"
        return f"m{len(token)}(" + ",".join(f"d^{a}" for a in token) + ")"

    def decompose(self, token):
        n = len(token)
        if self.kraft:
            return _kraft_tree(token)
        if n == 0:
            return ("gen", ())
        # mu_n(d^{a_1}, ..., d^{a_n}): a left comb of products, then unary leaves
        tree = ("unit",)
        for _ in range(n - 1):
            tree = ("comp", ("gen", (0, 0)), 0, tree)
        for p in range(n - 1, -1, -1):
            tree = ("comp", tree, p, _power_tree(token[p], self.monoid))
        return tree

    # free algebra hooks
    def canonical(self, token, labels):
        if len(token) != len(labels):
            raise ValueError("arity mismatch")
        return tuple(sorted(zip(token, labels)))

    def split(self, m):
        return tuple(a for a, _ in m), tuple(l for _, l in m)

    def shift(self, m, a) -> Optional[tuple]:
        out = []
        for b, l in m:
            s = self.monoid.add(a, b)
            if s is None:
                return None
            out.append((s, l))
        return tuple(sorted(out))

    def gamma(self, mu, monomials):
        pairs: list = []
        for a, m in zip(mu, monomials):
            sh = self.shift(m, a)
            if sh is None:
                return ZERO
            pairs.extend(sh)
        return F2Vector((tuple(sorted(pairs)),))

    def substitute(self, ctx, e_mono):
        rest = [p for p in ctx if p[1] != HOLE]
        holes = [p for p in ctx if p[1] == HOLE]
        if len(holes) != 1:
            raise ValueError("context must contain one hole")
        sh = self.shift(e_mono, holes[0][0])
        if sh is None:
            return ZERO
        return F2Vector((tuple(sorted(rest + list(sh))),))

    def _exponent_window(self, degree: int, weight) -> Tuple[int, int]:
        if self.kraft:
            hi = max(degree - 1, 0)
            if self.monoid.kind == "T":
                hi = min(hi, self.monoid.param)
            return 0, hi
        if self.monoid.bounded:
            return self.monoid.lo, self.monoid.hi
        if weight is None:
            raise OperadError(f"{self.name} is infinite in each degree; pass a weight")
        w = Fraction(weight)
        if w <= 0:
            raise OperadError("weights of nonempty monomials are positive")
        lo = -math.floor(math.log2(w)) if w >= 1 else math.ceil(-math.log2(w))
        # an atom never outweighs the total; at most `degree` atoms bound the depth
        while Fraction(2) ** (-(lo - 1)) <= w:
            lo -= 1
        while Fraction(2) ** (-lo) > w:
            lo += 1
        hi = degree - 1 - v2(w)
        if hi > self.monoid.hi or (self.monoid.kind == "Z" and lo < self.monoid.lo):
            raise OverflowError(f"{self.name}: weight {w} in degree {degree} needs exponents in [{lo}, {hi}], "
                                f"outside the stored range [{self.monoid.lo}, {self.monoid.hi}]")
        return max(lo, self.monoid.lo), hi

    def _enumerate(self, atoms: Sequence[Atom], degree: int, weight, hole: Optional[Atom]):
        if self.kraft:
            target = Fraction(1)
        elif weight is None:
            target = None
        else:
            target = Fraction(weight)
        if self.supports_weight and target is None:
            raise OperadError(f"{self.name} is infinite in each degree; pass a weight")
        lo, hi = self._exponent_window(degree, target)
        use_weight = target is not None
        # candidate pairs, heaviest first
        cands = []
        for lab, deg, om in atoms:
            if deg <= 0:
                raise OperadError("free algebras need labels of positive degree")
            for a in range(lo, hi + 1):
                wt = (Fraction(2) ** -a) * (1 if self.kraft else Fraction(om)) if use_weight else Fraction(0)
                cands.append((wt, deg, (a, lab)))
        cands.sort(key=lambda c: (-c[0], c[2]))
        hole_cands = []
        if hole is not None:
            hlab, hdeg, hom = hole
            for a in range(lo, hi + 1):
                wt = (Fraction(2) ** -a) * (1 if self.kraft else Fraction(hom)) if use_weight else Fraction(0)
                hole_cands.append((wt, hdeg, (a, HOLE)))
        out = []

        def rec(start, rem_deg, rem_w, cur):
            if rem_deg == 0:
                if not use_weight or rem_w == 0:
                    out.append(tuple(sorted(cur)))
                return
            for k in range(start, len(cands)):
                wt, deg, pair = cands[k]
                if deg > rem_deg:
                    continue
                if use_weight:
                    if wt > rem_w:
                        continue
                    # every further atom weighs at most wt and has degree >= 1
                    if rem_w > wt * rem_deg:
                        break
                cur.append(pair)
                rec(k, rem_deg - deg, rem_w - wt, cur)
                cur.pop()

        tw = target if use_weight else Fraction(0)
        if hole is None:
            if degree == 0:
                if self.unital and (not use_weight or tw == 0):
                    return [()]
                return []
            rec(0, degree, tw, [])
        else:
            for wt, hdeg, pair in hole_cands:
                if hdeg > degree or (use_weight and wt > tw):
                    continue
                rec(0, degree - hdeg, tw - wt, [pair])
        res = sorted(set(out))
        for m in res:
            if len(m) > self.arity_cap:
                raise OperadError(f"{self.name}: arity {len(m)} above cap {self.arity_cap}")
        return res

    def monomials(self, atoms, degree, weight=None):
        return self._enumerate(atoms, degree, weight, None)

    def contexts(self, atoms, degree, hole, weight=None):
        return self._enumerate(atoms, degree, weight, hole)

    def cartan(self, i, m, module):
        states: Dict[Tuple[int, tuple], int] = {(0, ()): 1}
        for a, lab in m:
            dl = module.degree(lab)
            nxt: Dict[Tuple[int, tuple], int] = {}
            for (used, pre), c in states.items():
                for k in range(0, min(dl, i - used) + 1):
                    for s in module.sq_token(k, lab):
                        key = (used + k, tuple(sorted(pre + ((a, s),))))
                        nxt[key] = nxt.get(key, 0) ^ c
            states = {k: c for k, c in nxt.items() if c}
        return F2Vector(labs for (used, labs), c in states.items() if used == i and c)


@lru_cache(maxsize=None)
def _kraft_multisets(n: int, top: int) -> Tuple[Tuple[int, ...], ...]:
    """Sorted n-tuples of exponents in [0, top] with sum 2^{-a} = 1."""
    out = []

    def rec(k, lo, rem, cur):
        if k == 0:
            if rem == 0:
                out.append(tuple(cur))
            return
        for a in range(lo, top + 1):
            w = Fraction(1, 2 ** a)
            if w > rem:
                continue
            if rem > w * k:
                break
            cur.append(a)
            rec(k - 1, a, rem - w, cur)
            cur.pop()

    rec(n, 0, Fraction(1), [])
    return tuple(out)


def _power_tree(a: int, monoid: ExponentMonoid):
    if a == 0:
        return ("unit",)
    g = (1,) if a > 0 else (-1,)
    tree = ("gen", g)
    for _ in range(abs(a) - 1):
        tree = ("comp", ("gen", g), 0, tree)
    return tree


def _kraft_tree(token):
    """Write a Kraft tuple as an iterated composite of the star (1,1)."""
    n = len(token)
    if n == 1:
        if token[0] != 0:
            raise OperadError(f"{token} is not a level operation")
        return ("unit",)
    if any(a < 1 for a in token):
        raise OperadError(f"{token} is not a level operation")
    order = sorted(range(n), key=lambda p: (token[p], p))
    half, acc, left = Fraction(1, 2), Fraction(0), []
    for p in order:
        if acc == half:
            break
        acc += Fraction(1, 2 ** token[p])
        left.append(p)
    if acc != half:
        raise OperadError(f"{token} does not split into halves")
    right = [p for p in order if p not in left]
    lt = tuple(token[p] - 1 for p in left)
    rt = tuple(token[p] - 1 for p in right)
    tree = ("comp", ("comp", ("gen", (1, 1)), 1, _kraft_tree(rt)), 0, _kraft_tree(lt))
    return ("act", tree, tuple(left + right))


def com_operad(unital: bool = False, arity_cap: int = 16) -> DecoratedCom:
    return DecoratedCom(ExponentMonoid("trivial"), unital, False, arity_cap, "uCom" if unital else "Com")


def compose_with_unary(P: Operad, U: UnaryOperad, arity_cap: Optional[int] = None) -> Operad:
    """P o U with the distributive law (d^n; mu) -> (mu; d^n, ..., d^n)."""
    cap = P.arity_cap if arity_cap is None else arity_cap
    if isinstance(P, DecoratedCom) and P.monoid.kind == "trivial" and not P.kraft:
        return DecoratedCom(U.monoid, P.unital, False, cap, f"{P.name}o{U.name}")
    return CompositeOperad(P, U)


def lev_operad(arity_cap: int = 16) -> DecoratedCom:
    return DecoratedCom(ExponentMonoid("N", 0, 4 * arity_cap + 64), False, True, arity_cap, "Lev")


def truncated_lev(q: int, arity_cap: int = 16) -> DecoratedCom:
    return DecoratedCom(ExponentMonoid("T", q), False, True, arity_cap, f"T{q}Lev")


class CompositeOperad(Operad):
    """Generic P o U for a unary U; token (mu, (a_1..a_n))."""

    def __init__(self, P: Operad, U: UnaryOperad):
        super().__init__(P.arity_cap)
        self.P, self.U = P, U
        self.unital = P.unital
        self.name = f"{P.name}o{U.name}"

    def basis(self, n, exponent_bound: Optional[int] = None):
        vals = list(self.U.monoid.elements(None if exponent_bound is None else -exponent_bound, exponent_bound))
        return [(mu, tuple(a)) for mu in self.P.basis(n) for a in product(vals, repeat=n)]

    def arity(self, token):
        return self.P.arity(token[0])

    def act(self, token, perm):
        return (self.P.act(token[0], perm), act_tuple(token[1], perm))

    def compose(self, mu, i, nu):
        a = mu[1][i]
        mid = []
        for b in nu[1]:
            s = self.U.monoid.add(a, b)
            if s is None:
                return ZERO
            mid.append(s)
        exps = mu[1][:i] + tuple(mid) + mu[1][i + 1:]
        return F2Vector.from_terms((t, exps) for t in self.P.compose(mu[0], i, nu[0]))

    @property
    def unit(self):
        return (self.P.unit, (0,))

    def generators(self):
        gens = [(g, (0,) * self.P.arity(g)) for g in self.P.generators()]
        gens += [(self.P.unit, (g,)) for g in self.U.generators()]
        return gens

    def default_star(self):
        return F2Vector.from_terms((t, (1, 1)) for t in self.P.default_star())


# MagCom -------------------------------------------------------------------
# trees: leaf (0, label) or node (1, left, right) with left <= right


def _canon_tree(t):
    if t[0] == 0:
        return t
    a, b = _canon_tree(t[1]), _canon_tree(t[2])
    return (1, a, b) if a <= b else (1, b, a)


def _leaves(t) -> list:
    if t[0] == 0:
        return [t[1]]
    return _leaves(t[1]) + _leaves(t[2])


def _relabel(t, f):
    if t[0] == 0:
        return (0, f(t[1]))
    return (1, _relabel(t[1], f), _relabel(t[2], f))


def _graft(t, sub):
    """Replace leaf labelled p by sub[p] (a tree)."""
    if t[0] == 0:
        return sub[t[1]]
    return (1, _graft(t[1], sub), _graft(t[2], sub))


def _strip(t, counter):
    if t[0] == 0:
        p = counter[0]
        counter[0] += 1
        return (0, p)
    return (1, _strip(t[1], counter), _strip(t[2], counter))


class MagCom(Operad):
    """Free operad on one commutative binary operation: trees modulo child swaps."""

    name = "MagCom"

    def __init__(self, arity_cap: int = 6):
        super().__init__(arity_cap)
        self._basis: Dict[int, list] = {}

    def basis(self, n):
        if n < 1 or n > self.arity_cap:
            return []
        if n not in self._basis:
            self._basis[n] = sorted(self._trees(tuple(range(n))))
        return self._basis[n]

    def _trees(self, labels: tuple) -> set:
        if len(labels) == 1:
            return {(0, labels[0])}
        out = set()
        first, rest = labels[0], labels[1:]
        # split labels into two nonempty parts; fix `first` on the left to avoid double counting
        for r in range(0, len(rest)):
            for pick in _subsets(rest, r):
                left = (first,) + pick
                right = tuple(x for x in rest if x not in pick)
                if not right:
                    continue
                for a in self._trees(left):
                    for b in self._trees(right):
                        out.add(_canon_tree((1, a, b)))
        return out

    def arity(self, token):
        return len(_leaves(token))

    def act(self, token, perm):
        return _canon_tree(_relabel(token, lambda p: perm[p]))

    def compose(self, mu, i, nu):
        n = self.arity(nu)
        shifted_nu = _relabel(nu, lambda p: p + i)
        sub = {}
        for p in _leaves(mu):
            if p < i:
                sub[p] = (0, p)
            elif p == i:
                sub[p] = shifted_nu
            else:
                sub[p] = (0, p + n - 1)
        return F2Vector((_canon_tree(_graft(mu, sub)),))

    @property
    def unit(self):
        return (0, 0)

    @property
    def star_token(self):
        return (1, (0, 0), (0, 1))

    def generators(self):
        return [self.star_token]

    def default_star(self):
        return F2Vector((self.star_token,))

    def fmt(self, token):
        if token[0] == 0:
            return str(token[1] + 1)
        return f"*({self.fmt(token[1])},{self.fmt(token[2])})"

    def decompose(self, token):
        # rebuild the tree from star compositions, then relabel
        shape = _strip(token, [0])
        labels = _leaves(token)
        return ("act", self._shape_tree(shape), tuple(labels))

    def _shape_tree(self, shape):
        if shape[0] == 0:
            return ("unit",)
        left, right = shape[1], shape[2]
        return ("comp", ("comp", ("gen", self.star_token), 1, self._shape_tree(_strip(right, [0]))), 0,
                self._shape_tree(_strip(left, [0])))

    # monomials are trees with module labels at the leaves
    def canonical(self, token, labels):
        return _canon_tree(_relabel(token, lambda p: labels[p]))

    def split(self, m):
        return _strip(m, [0]), tuple(_leaves(m))

    def gamma(self, mu, monomials):
        return F2Vector((_canon_tree(_graft(mu, {p: monomials[p] for p in range(len(monomials))})),))

    def substitute(self, ctx, e_mono):
        def rec(t):
            if t[0] == 0:
                return e_mono if t[1] == HOLE else t
            return (1, rec(t[1]), rec(t[2]))

        return F2Vector((_canon_tree(rec(ctx)),))

    def _labelled_trees(self, atoms, degree, hole):
        atoms = list(atoms)
        memo: Dict[Tuple[int, bool], list] = {}

        def trees(d, with_hole):
            key = (d, with_hole)
            if key in memo:
                return memo[key]
            out = set()
            if with_hole:
                if hole is not None and hole[1] == d:
                    out.add((0, HOLE))
            else:
                for lab, deg, _ in atoms:
                    if deg == d:
                        out.add((0, lab))
            for d1 in range(1, d):
                d2 = d - d1
                if with_hole:
                    for a in trees(d1, True):
                        for b in trees(d2, False):
                            out.add(_canon_tree((1, a, b)))
                elif d1 <= d2:
                    for a in trees(d1, False):
                        for b in trees(d2, False):
                            out.add(_canon_tree((1, a, b)))
            memo[key] = sorted(out)
            return memo[key]

        res = trees(degree, hole is not None)
        for m in res:
            if len(_leaves(m)) > self.arity_cap:
                raise OperadError(f"MagCom: arity {len(_leaves(m))} above cap {self.arity_cap}")
        return res

    def monomials(self, atoms, degree, weight=None):
        if weight is not None:
            raise OperadError("MagCom has no weight grading")
        if degree == 0:
            return []
        return self._labelled_trees(atoms, degree, None)

    def contexts(self, atoms, degree, hole, weight=None):
        if weight is not None:
            raise OperadError("MagCom has no weight grading")
        return self._labelled_trees(atoms, degree, hole)


def _subsets(seq, r):
    from itertools import combinations

    return combinations(seq, r)


def magcom_operad(arity_cap: int = 6) -> MagCom:
    return MagCom(arity_cap)


# centrality, star powers, axioms ------------------------------------------------


def _check_star(P: Operad, star: F2Vector) -> F2Vector:
    star = F2Vector(star)
    if any(P.arity(t) != 2 for t in star):
        raise OperadError("the star must live in arity 2")
    if P.act_vec(star, (1, 0)) != star:
        raise OperadError("the star is not fixed by the transposition (1 2)")
    return star


def centrality_relation(P: Operad, star, mu) -> Tuple[F2Vector, F2Vector]:
    """Both sides of star(mu, mu) = mu(star, ..., star) . sigma_2n."""
    star = F2Vector(star)
    m = F2Vector((mu,))
    n = P.arity(mu)
    lhs = P.gamma_vec(star, [m, m])
    rhs = P.gamma_vec(m, [star] * n)
    rhs = P.act_vec(rhs, sigma_2n(n))
    return lhs, rhs


def is_central(P: Operad, star=None, generators: Optional[Iterable] = None, exhaustive: bool = False,
               max_arity: Optional[int] = None, exponent_bound: int = 2):
    """Check the centrality relation on generators (default) or on every basis token.

    Returns (True, None) or (False, mu) for the first failing token.
    """
    star = _check_star(P, P.default_star() if star is None else star)
    if exhaustive:
        top = P.arity_cap // 2 if max_arity is None else max_arity
        toks = []
        for n in range(0, top + 1):
            try:
                toks.extend(P.basis(n, exponent_bound))
            except TypeError:
                toks.extend(P.basis(n))
    else:
        toks = list(P.generators() if generators is None else generators)
    for mu in toks:
        if 2 * P.arity(mu) > P.arity_cap:
            raise OperadError(f"arity {2 * P.arity(mu)} above cap {P.arity_cap}")
        lhs, rhs = centrality_relation(P, star, mu)
        if lhs != rhs:
            return False, mu
    return True, None


def star_power(P: Operad, star, k: int, check_invariance: bool = False) -> F2Vector:
    """star_0 = unit, star_k = star(star_{k-1}, star_{k-1})."""
    if k < 0:
        raise ValueError("negative k")
    if 2 ** k > P.arity_cap:
        raise OperadError(f"star_{k} has arity {2 ** k} above cap {P.arity_cap}")
    star = F2Vector(star)
    cur = F2Vector((P.unit,))
    for _ in range(k):
        cur = P.gamma_vec(star, [cur, cur])
    if check_invariance and k >= 1:
        n = 2 ** k
        for g in star_power_generating_set(k):
            if P.act_vec(cur, g) != cur:
                raise RelationError(f"Sigma_{n}-invariance of star_{k}", f"moved by {g}")
    return cur


def star_power_generating_set(k: int) -> List[Perm]:
    """Sigma_2 wr Sigma_{2^{k-1}} together with sigma_{2^k}; generates Sigma_{2^k}."""
    n = 2 ** k
    h = n // 2
    gens = []
    for a in range(h - 1):
        gens.append(transposition(n, a, a + 1))
    gens.append(tuple(list(range(h, n)) + list(range(h))))
    if k >= 1:
        gens.append(sigma_2n(h))
    return gens


def check_axioms(P: Operad, max_arity: int = 4, exponent_bound: int = 1) -> List[str]:
    """Unit, sequential/parallel associativity and equivariance up to max_arity.

    Returns a list of failure descriptions (empty when all pass).
    """
    fails: List[str] = []

    def basis(n):
        try:
            return P.basis(n, exponent_bound)
        except TypeError:
            return P.basis(n)

    toks = {n: basis(n) for n in range(0, max_arity + 1)}
    u = P.unit
    one = lambda t: F2Vector((t,))
    for n in range(1, max_arity + 1):
        for mu in toks[n]:
            for i in range(n):
                if P.compose(mu, i, u) != one(mu):
                    fails.append(f"right unit {P.fmt(mu)} o_{i} 1")
            if P.compose(u, 0, mu) != one(mu):
                fails.append(f"left unit 1 o {P.fmt(mu)}")
    lo = 0 if P.unital else 1
    for l in range(1, max_arity + 1):
        for m in range(lo, max_arity + 1):
            for r in range(lo, max_arity + 1):
                # sequential
                if l + m - 1 <= max_arity and m + r - 1 >= 0 and l + m + r - 2 <= max_arity:
                    for lam in toks[l]:
                        for mu in toks[m]:
                            for nu in toks[r]:
                                for i in range(l):
                                    for j in range(m):
                                        a = P.compose_vec(P.compose(lam, i, mu), i + j, one(nu))
                                        b = P.compose_vec(one(lam), i, P.compose(mu, j, nu))
                                        if a != b:
                                            fails.append(f"sequential {lam} {i} {mu} {j} {nu}")
                # parallel
                if l >= 2 and l + m + r - 2 <= max_arity:
                    for lam in toks[l]:
                        for mu in toks[m]:
                            for nu in toks[r]:
                                for i in range(l):
                                    for k in range(i + 1, l):
                                        a = P.compose_vec(P.compose(lam, i, mu), k + m - 1, one(nu))
                                        b = P.compose_vec(P.compose(lam, k, nu), i, one(mu))
                                        if a != b:
                                            fails.append(f"parallel {lam} {i} {mu} {k} {nu}")
    # equivariance for adjacent transpositions
    for m in range(1, max_arity + 1):
        for r in range(lo, max_arity + 1):
            if m + r - 1 > max_arity:
                continue
            for mu in toks[m]:
                for nu in toks[r]:
                    for a in range(m - 1):
                        s = transposition(m, a, a + 1)
                        for i in range(m):
                            lhs = P.compose(P.act(mu, s), s[i], nu)
                            rhs = P.act_vec(P.compose(mu, i, nu), _block_perm(s, i, r))
                            if lhs != rhs:
                                fails.append(f"equivariance (outer) {mu} {s} {i} {nu}")
                    for b in range(r - 1):
                        t = transposition(r, b, b + 1)
                        for i in range(m):
                            lhs = P.compose(mu, i, P.act(nu, t))
                            tt = tuple(list(range(i)) + [i + t[j] for j in range(r)] + list(range(i + r, m + r - 1)))
                            rhs = P.act_vec(P.compose(mu, i, nu), tt)
                            if lhs != rhs:
                                fails.append(f"equivariance (inner) {mu} {i} {nu} {t}")
    return fails


def _block_perm(s: Perm, i: int, r: int) -> Perm:
    """Position map from mu o_i nu to (mu.s) o_{s(i)} nu."""
    m = len(s)
    out = []
    si = s[i]
    for p in range(m):
        if p == i:
            out.extend(si + j for j in range(r))
        else:
            q = s[p]
            out.append(q if q < si else q + r - 1)
    return tuple(out)


# morphisms -------------------------------------------------------------------


class OperadMorphism:
    def __init__(self, source: Operad, target: Operad, images: Dict[Hashable, F2Vector]):
        self.source = source
        self.target = target
        self.images = images

    def __call__(self, token) -> F2Vector:
        if isinstance(token, frozenset):
            acc: set = set()
            for t in token:
                toggle(acc, self(t))
            return F2Vector(acc)
        img = self.images.get(token)
        if img is None:
            img = self.images[token] = _eval_in(self.target, self.source.decompose(token), self._gen_images)
        return img

    def is_injective_on_basis(self, max_arity: int) -> bool:
        seen = set()
        for n in range(0, max_arity + 1):
            for t in self.source.basis(n):
                img = self(t)
                if len(img) != 1:
                    return False
                (x,) = img
                if x in seen:
                    return False
                seen.add(x)
        return True


def _eval_in(target: Operad, tree, gen_images) -> F2Vector:
    kind = tree[0]
    if kind == "unit":
        return F2Vector((target.unit,))
    if kind == "gen":
        return gen_images[tree[1]]
    if kind == "comp":
        return target.compose_vec(_eval_in(target, tree[1], gen_images), tree[2], _eval_in(target, tree[3], gen_images))
    if kind == "act":
        return target.act_vec(_eval_in(target, tree[1], gen_images), tree[2])
    raise ValueError(kind)


def named_relations(P: Operad) -> List[Tuple[str, tuple, tuple]]:
    """Defining relations of the source operads we map out of, as expression trees."""
    rels = []
    if isinstance(P, MagCom):
        g = P.star_token
        rels.append(("commutativity *.(1 2) = *", ("act", ("gen", g), (1, 0)), ("gen", g)))
        return rels
    if isinstance(P, DecoratedCom):
        g = (1, 1) if P.kraft else (0, 0)
        if P.kraft and P.monoid.add(0, 1) is None:
            return rels
        rels.append(("commutativity *.(1 2) = *", ("act", ("gen", g), (1, 0)), ("gen", g)))
        ss = ("comp", ("comp", ("gen", g), 1, ("gen", g)), 0, ("gen", g))
        if P.kraft:
            rels.append(("level relation *(*,*) = *(*,*).(2 3)", ss, ("act", ss, (0, 2, 1, 3))))
        else:
            left = ("comp", ("gen", g), 0, ("gen", g))
            right = ("comp", ("gen", g), 1, ("gen", g))
            rels.append(("associativity m o_1 m = m o_2 m", left, right))
    return rels


def operad_morphism(source: Operad, target: Operad, generator_images: Dict[Hashable, object],
                    max_arity: Optional[int] = None, exponent_bound: int = 1) -> OperadMorphism:
    """Morphism determined by generator images; relations checked within the arity cap."""
    gi = {g: F2Vector(v) if isinstance(v, frozenset) else F2Vector((v,)) for g, v in generator_images.items()}
    missing = [g for g in source.generators() if g not in gi]
    if missing:
        raise OperadError(f"no image for generators {missing}")
    for g, v in gi.items():
        for t in v:
            if target.arity(t) != source.arity(g):
                raise RelationError("arity", f"{g} -> {t}")
    for name, lhs, rhs in named_relations(source):
        if _eval_in(target, lhs, gi) != _eval_in(target, rhs, gi):
            raise RelationError(name)
    f = OperadMorphism(source, target, {})
    f._gen_images = gi
    top = min(source.arity_cap, target.arity_cap, 4 if max_arity is None else max_arity)

    def basis(n):
        try:
            return source.basis(n, exponent_bound)
        except TypeError:
            return source.basis(n)

    toks = {n: basis(n) for n in range(0, top + 1)}
    if f(source.unit) != F2Vector((target.unit,)):
        raise RelationError("unit")
    for m in range(1, top + 1):
        for r in range(0, top + 2 - m):
            for mu in toks[m]:
                for nu in toks[r]:
                    for i in range(m):
                        if f(source.compose(mu, i, nu)) != target.compose_vec(f(mu), i, f(nu)):
                            raise RelationError("composition", f"{mu} o_{i} {nu}")
        for mu in toks[m]:
            for a in range(m - 1):
                s = transposition(m, a, a + 1)
                if f(source.act(mu, s)) != target.act_vec(f(mu), s):
                    raise RelationError("equivariance", f"{mu}.{s}")
    return f
