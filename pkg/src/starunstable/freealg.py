"""The free P-algebra S(P, M) on an unstable module, with the Cartan action."""

from __future__ import annotations

from fractions import Fraction
from itertools import permutations
from math import factorial
from typing import Dict, Hashable, List, Optional, Sequence

from .gf2core import ZERO, DegreeCapError, F2Vector, toggle
from .operads import DecoratedCom, Operad, OperadError
from .unstable import UnstableModule


class FreeAlgebra:
    """S(P, M) truncated at ``cap``; with ``weight`` only that weight piece.

    Basis tokens are canonical monomials produced by the operad's hooks.
    """

    def __init__(self, operad: Operad, module: UnstableModule, cap: Optional[int] = None, weight=None):
        cap = module.cap if cap is None else cap
        if cap > module.cap:
            raise DegreeCapError(f"algebra cap {cap} above module cap {module.cap}")
        if not module.is_connected:
            raise OperadError(f"{module.name} is not connected; the free algebra would be infinite in degree 0")
        if weight is not None and not getattr(operad, "supports_weight", False):
            raise OperadError(f"{operad.name} has no weight grading")
        if weight is None and getattr(operad, "supports_weight", False):
            raise OperadError(f"{operad.name} is infinite in each degree; pass a weight")
        self.operad = operad
        self.module = module
        self.cap = cap
        self.weight = None if weight is None else Fraction(weight)
        self.atoms = [(t, module.degree(t), Fraction(1)) for t in module.tokens() if 1 <= module.degree(t) <= cap]
        self._basis: Dict[int, tuple] = {}
        self._degree: Dict[Hashable, int] = {}
        self._sq_cache: Dict[tuple, F2Vector] = {}
        self.name = f"S({operad.name},{module.name})" + ("" if weight is None else f"[w={self.weight}]")

    def __repr__(self):
        return f"<FreeAlgebra {self.name} cap={self.cap}>"

    def atoms_upto(self, d: int):
        return [a for a in self.atoms if a[1] <= d]

    def basis(self, d: int) -> tuple:
        if d > self.cap:
            raise DegreeCapError(f"{self.name}: degree {d} above cap {self.cap}")
        if d < 0:
            return ()
        b = self._basis.get(d)
        if b is None:
            b = tuple(self.operad.monomials(self.atoms_upto(d), d, self.weight))
            for m in b:
                self._degree[m] = d
            self._basis[d] = b
        return b

    def dim(self, d: int) -> int:
        return len(self.basis(d))

    def dims(self, top: Optional[int] = None) -> List[int]:
        top = self.cap if top is None else top
        return [self.dim(d) for d in range(top + 1)]

    def degree(self, m) -> int:
        d = self._degree.get(m)
        if d is None:
            d = self._degree[m] = sum(self.module.degree(l) for l in self.operad.split(m)[1])
        return d

    def monomial_weight(self, m) -> Fraction:
        if not isinstance(self.operad, DecoratedCom):
            raise OperadError("weights are only defined for the Com family")
        return sum((Fraction(2) ** -a for a, _ in m), Fraction(0))

    def generator(self, t) -> F2Vector:
        """The module element t as a monomial (unit; t)."""
        return F2Vector((self.operad.canonical(self.operad.unit, (t,)),))

    def from_module(self, v) -> F2Vector:
        return F2Vector(self.operad.canonical(self.operad.unit, (t,)) for t in v)

    # Steenrod action
    def sq_monomial(self, i: int, m) -> F2Vector:
        d = self.degree(m)
        if i == 0:
            return F2Vector((m,))
        if d + i > self.cap:
            raise DegreeCapError(f"{self.name}: Sq^{i} on degree {d} exceeds cap {self.cap}")
        if i > d:
            return ZERO
        key = (i, m)
        out = self._sq_cache.get(key)
        if out is None:
            out = self._sq_cache[key] = self.operad.cartan(i, m, self.module)
        return out

    def sq(self, i: int, v) -> F2Vector:
        acc: set = set()
        for m in v:
            toggle(acc, self.sq_monomial(i, m))
        return F2Vector(acc)

    def sq0(self, v) -> F2Vector:
        acc: set = set()
        for m in v:
            toggle(acc, self.sq_monomial(self.degree(m), m))
        return F2Vector(acc)

    # operadic structure
    def compose(self, mu, args: Sequence) -> F2Vector:
        """mu(v_1, ..., v_n) for algebra elements v_j, multilinear."""
        if self.operad.arity(mu) != len(args):
            raise ValueError("arity mismatch")
        total = 0
        for v in args:
            if v:
                total += self.degree(next(iter(v)))
        if total > self.cap:
            raise DegreeCapError(f"composite degree {total} above cap {self.cap}")
        partial: Dict[tuple, int] = {(): 1}
        for v in args:
            nxt: Dict[tuple, int] = {}
            for pre, c in partial.items():
                for m in v:
                    key = pre + (m,)
                    nxt[key] = nxt.get(key, 0) ^ c
            partial = {k: c for k, c in nxt.items() if c}
        acc: set = set()
        for ms in partial:
            toggle(acc, self.operad.gamma(mu, list(ms)))
        return F2Vector(acc)

    def compose_vec(self, op: F2Vector, args: Sequence) -> F2Vector:
        acc: set = set()
        for mu in op:
            toggle(acc, self.compose(mu, args))
        return F2Vector(acc)

    def alpha_star(self, v, star: Optional[F2Vector] = None) -> F2Vector:
        """alpha(Phi v) = (star; v, v), linear in v since cross terms cancel."""
        star = self.operad.default_star() if star is None else F2Vector(star)
        acc: set = set()
        for m in v:
            for s in star:
                toggle(acc, self.operad.gamma(s, [m, m]))
        return F2Vector(acc)

    def square_bilinear(self, v, star: Optional[F2Vector] = None) -> F2Vector:
        """(star; v, v) expanded bilinearly (equal to alpha_star for symmetric star)."""
        star = self.operad.default_star() if star is None else F2Vector(star)
        return self.compose_vec(star, [F2Vector(v), F2Vector(v)])

    def as_module(self) -> UnstableModule:
        bases = {d: self.basis(d) for d in range(self.cap + 1)}
        return UnstableModule(self.name, self.cap, bases, lambda i, m: self.operad.cartan(i, m, self.module))

    def fmt(self, v, fmt_label=repr) -> str:
        terms = sorted(v)
        if not terms:
            return "0"
        return " + ".join(self.operad.fmt_monomial(m, fmt_label) for m in terms)


def orbit_count_oracle(operad: Operad, module: UnstableModule, d: int) -> int:
    """dim S(P, M)^d by Burnside's lemma over Sigma_n, for finite operads.

    Independent of the canonical-form machinery: counts pairs (token, label
    tuple) fixed by each permutation.
    """
    by_deg: Dict[int, int] = {}
    for t in module.tokens():
        e = module.degree(t)
        if 1 <= e <= d:
            by_deg[e] = by_deg.get(e, 0) + 1
    if d == 0:
        return len(operad.basis(0)) if operad.unital else 0
    total = Fraction(0)
    for n in range(1, d + 1):
        toks = operad.basis(n)
        if not toks:
            continue
        s = 0
        for perm in permutations(range(n)):
            fixed_toks = sum(1 for t in toks if operad.act(t, perm) == t)
            if not fixed_toks:
                continue
            s += fixed_toks * _fixed_labellings(perm, by_deg, d)
        total += Fraction(s, factorial(n))
    assert total.denominator == 1
    return int(total)


def _fixed_labellings(perm, by_deg: Dict[int, int], d: int) -> int:
    seen, cycles = set(), []
    for p in range(len(perm)):
        if p in seen:
            continue
        c, q = 0, p
        while q not in seen:
            seen.add(q)
            q = perm[q]
            c += 1
        cycles.append(c)
    ways = {0: 1}
    for c in cycles:
        nxt: Dict[int, int] = {}
        for tot, w in ways.items():
            for e, cnt in by_deg.items():
                nt = tot + c * e
                if nt <= d:
                    nxt[nt] = nxt.get(nt, 0) + w * cnt
        ways = nxt
    return ways.get(d, 0)


def dyadic_multiset_count(n: int) -> int:
    """Number of multisets of n nonnegative exponents with sum 2^{-a} = 1."""
    from .operads import _kraft_multisets

    return len(_kraft_multisets(n, max(n - 1, 0))) if n else 0


def binary_partition_count(d: int) -> int:
    """Multisets of powers of two summing to d."""
    ways = [1] + [0] * d
    p = 1
    while p <= d:
        for s in range(p, d + 1):
            ways[s] += ways[s - p]
        p *= 2
    return ways[d]
