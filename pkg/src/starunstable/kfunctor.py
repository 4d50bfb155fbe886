"""K_P^star(M) = S(P, M) / (instability ideal), and the isomorphism with S(P, Sigma Omega M).

Ideals are given by generators; the P-ideal they span in degree d is the
span of every generator plugged into every one-hole context of degree d
(``Operad.contexts``).  Three generator families are provided:

* ``unst``: Sq_0 y + (star; y, y) for y in the module basis,
* ``x``: Sq_0 t + (star; t, t) for t in the ambient monomial basis,
* ``e``: Sq_0^k s(b) + (star_k; s(b), ..., s(b)) for a graded section s.

Quotients are computed degree by degree.  Coset representatives are the
standard monomials of the elimination, i.e. the smallest monomials (in the
sorted basis order) outside the leading terms of the ideal.
"""

from __future__ import annotations

import random
from fractions import Fraction
from typing import Dict, Hashable, List, Optional, Sequence, Tuple

from .freealg import FreeAlgebra
from .gf2core import DegreeCapError, Eliminator, F2Vector, toggle
from .operads import HOLE, DecoratedCom, Operad, OperadError, OperadMorphism, is_central, star_power
from .unstable import GradedSection, Loops, UnstableModule, is_reduced

FLAVORS = ("x", "unst", "e")


class NotReducedError(ValueError):
    pass


class CentralityError(ValueError):
    pass


class InternalConsistencyError(AssertionError):
    pass


def _star(A: FreeAlgebra, star) -> F2Vector:
    return A.operad.default_star() if star is None else F2Vector(star)


def frobenius_power(A: FreeAlgebra, op: F2Vector, v: F2Vector, copies: int) -> F2Vector:
    """(op; v, ..., v) for a Sigma-invariant op of arity 2^k.

    Non-constant assignments of the terms of v to the slots come in orbits
    of even size, so only the diagonal terms survive.
    """
    acc: set = set()
    for m in v:
        for t in op:
            toggle(acc, A.operad.gamma(t, [m] * copies))
    return F2Vector(acc)


# generators -----------------------------------------------------------------


def unst_generators(A: FreeAlgebra, star=None, degree: Optional[int] = None) -> List[Tuple[int, F2Vector]]:
    """(degree, Sq_0 y + (star; y, y)) for module basis y with 2|y| <= cap."""
    star = _star(A, star)
    M = A.module
    out = []
    for e in range(1, A.cap // 2 + 1):
        if degree is not None and 2 * e > degree:
            break
        for y in M.basis(e):
            g = A.from_module(M.sq0(y)) + A.alpha_star(A.generator(y), star)
            out.append((2 * e, g))
    return out


def x_generators(A: FreeAlgebra, star=None, degree: Optional[int] = None) -> List[Tuple[int, F2Vector]]:
    """(degree, Sq_0 t + (star; t, t)) for every ambient monomial t."""
    if A.weight is not None:
        raise OperadError("the X presentation is only built for algebras that are finite in each degree")
    star = _star(A, star)
    out = []
    for e in range(1, A.cap // 2 + 1):
        if degree is not None and 2 * e > degree:
            break
        for t in A.basis(e):
            v = F2Vector((t,))
            out.append((2 * e, A.sq0(v) + A.alpha_star(v, star)))
    return out


def sq0_power(M: UnstableModule, v: F2Vector, k: int) -> F2Vector:
    for _ in range(k):
        v = M.sq0(v)
    return v


def e_generators(A: FreeAlgebra, section: GradedSection, star=None, degree: Optional[int] = None) -> List[Tuple[int, F2Vector]]:
    """(degree, Sq_0^k s(b) + (star_k; s(b)^{x 2^k})) for b in Sigma Omega M."""
    star = _star(A, star)
    M = A.module
    ok, witness = is_reduced(M, A.cap)
    if not ok:
        raise NotReducedError(f"{M.name} is not reduced (Sq_0 kills {witness}); the E presentation needs a reduced module")
    ssm = section.loops.ssm
    out = []
    for b in ssm.tokens():
        e = ssm.degree(b)
        k = 0
        while (2 ** k) * e <= A.cap:
            if degree is not None and (2 ** k) * e > degree:
                break
            if 2 ** k > A.operad.arity_cap:
                raise OperadError(f"star_{k} needs arity {2 ** k} above cap {A.operad.arity_cap}")
            sb = section(b)
            sk = star_power(A.operad, star, k)
            g = A.from_module(sq0_power(M, sb, k)) + frobenius_power(A, sk, A.from_module(sb), 2 ** k)
            out.append(((2 ** k) * e, g))
            k += 1
    return out


def generators(A: FreeAlgebra, flavor: str, star=None, section: Optional[GradedSection] = None,
               degree: Optional[int] = None) -> List[Tuple[int, F2Vector]]:
    if flavor == "unst":
        return unst_generators(A, star, degree)
    if flavor == "x":
        return x_generators(A, star, degree)
    if flavor == "e":
        if section is None:
            raise ValueError("the E presentation needs a graded section")
        return e_generators(A, section, star, degree)
    raise ValueError(f"unknown flavor {flavor!r}; expected one of {FLAVORS}")


def ideal_span(A: FreeAlgebra, flavor: str, d: int, star=None, section: Optional[GradedSection] = None,
               gens: Optional[List[Tuple[int, F2Vector]]] = None) -> List[F2Vector]:
    """Spanning set of the P-ideal generated by the flavor's generators, in degree d."""
    if d > A.cap:
        raise DegreeCapError(f"degree {d} above cap {A.cap}")
    if gens is None:
        gens = generators(A, flavor, star, section, d)
    by_deg: Dict[int, List[F2Vector]] = {}
    for e, g in gens:
        if e <= d and g:
            by_deg.setdefault(e, []).append(g)
    out: List[F2Vector] = []
    op = A.operad
    for e, gs in sorted(by_deg.items()):
        ctxs = op.contexts(A.atoms_upto(d - e), d, (HOLE, e, Fraction(1)), A.weight)
        for ctx in ctxs:
            for g in gs:
                acc: set = set()
                for m in g:
                    toggle(acc, op.substitute(ctx, m))
                if acc:
                    out.append(F2Vector(acc))
    return out


# quotients ----------------------------------------------------------------------


class QuotientAlgebra:
    """Degreewise quotient of a free algebra by a P-ideal."""

    def __init__(self, ambient: FreeAlgebra, flavor: str, star=None, section: Optional[GradedSection] = None,
                 check: bool = True):
        self.ambient = ambient
        self.flavor = flavor
        self.star = _star(ambient, star)
        self.section = section
        self.cap = ambient.cap
        gens = generators(ambient, flavor, self.star, section)
        self._elim: Dict[int, Eliminator] = {}
        for d in range(ambient.cap + 1):
            el = Eliminator(ambient.basis(d))
            el.extend(ideal_span(ambient, flavor, d, self.star, section, gens))
            self._elim[d] = el
        if check:
            self.check_star_instability()

    @property
    def name(self):
        return f"K[{self.flavor}]{self.ambient.name}"

    def eliminator(self, d: int) -> Eliminator:
        if d > self.cap:
            raise DegreeCapError(f"degree {d} above cap {self.cap}")
        return self._elim[d]

    def basis(self, d: int) -> List[Hashable]:
        """Coset representatives in degree d."""
        return self.eliminator(d).standard_tokens()

    def dim(self, d: int) -> int:
        el = self.eliminator(d)
        return len(el.tokens) - el.rank

    def dims(self, top: Optional[int] = None) -> List[int]:
        top = self.cap if top is None else top
        return [self.dim(d) for d in range(top + 1)]

    def ideal_rank(self, d: int) -> int:
        return self.eliminator(d).rank

    def ideal_rows(self, d: int) -> List[F2Vector]:
        el = self.eliminator(d)
        return [el.from_int(r) for r in el.pivots.values()]

    def reduce(self, v) -> F2Vector:
        by_deg: Dict[int, set] = {}
        for m in v:
            by_deg.setdefault(self.ambient.degree(m), set()).add(m)
        acc: set = set()
        for d, part in by_deg.items():
            toggle(acc, self.eliminator(d).normal_form(part))
        return F2Vector(acc)

    def contains(self, v) -> bool:
        return not self.reduce(v)

    def sq(self, i: int, v) -> F2Vector:
        return self.reduce(self.ambient.sq(i, v))

    def compose(self, mu, args) -> F2Vector:
        return self.reduce(self.ambient.compose(mu, args))

    def check_star_instability(self) -> None:
        """Sq_0 [t] = star([t], [t]) for every representative."""
        A = self.ambient
        for d in range(1, self.cap // 2 + 1):
            for t in self.basis(d):
                v = F2Vector((t,))
                if self.reduce(A.sq0(v) + A.alpha_star(v, self.star)):
                    raise InternalConsistencyError(f"{self.name}: star-instability fails on {t}")

    def check_action_well_defined(self) -> List[Tuple[int, int]]:
        """(degree, i) pairs where Sq^i leaves the ideal (empty if the ideal is A-stable)."""
        bad = []
        for d in range(1, self.cap + 1):
            rows = self.ideal_rows(d)
            for i in range(1, self.cap - d + 1):
                if any(self.reduce(self.ambient.sq(i, r)) for r in rows):
                    bad.append((d, i))
        return bad


def build_quotient(ambient: FreeAlgebra, flavor: str = "unst", star=None, section: Optional[GradedSection] = None,
                   check: bool = True) -> QuotientAlgebra:
    return QuotientAlgebra(ambient, flavor, star, section, check)


def ideal_equalities_check(ambient: FreeAlgebra, section: Optional[GradedSection], star=None,
                           flavors: Sequence[str] = FLAVORS) -> Dict:
    """Compare the spans of the requested presentations degree by degree."""
    star = _star(ambient, star)
    gens = {f: generators(ambient, f, star, section) for f in flavors}
    rows = []
    ok = True
    for d in range(ambient.cap + 1):
        ranks = {}
        joint = Eliminator(ambient.basis(d))
        for f in flavors:
            el = Eliminator(ambient.basis(d))
            span = ideal_span(ambient, f, d, star, section, gens[f])
            el.extend(span)
            ranks[f] = el.rank
            joint.extend(span)
        equal = all(r == joint.rank for r in ranks.values())
        ok &= equal
        rows.append({"d": d, "ranks": ranks, "union": joint.rank, "equal": equal})
    return {"degrees": rows, "ok": ok}


# the isomorphism ------------------------------------------------------------------


def _expand_slots(op: Operad, tok, slot_vectors: Sequence[F2Vector]) -> F2Vector:
    """(tok; v_1, ..., v_n) expanded multilinearly into canonical monomials."""
    partial: Dict[tuple, int] = {(): 1}
    for v in slot_vectors:
        nxt: Dict[tuple, int] = {}
        for pre, c in partial.items():
            for t in v:
                key = pre + (t,)
                nxt[key] = nxt.get(key, 0) ^ c
        partial = {k: c for k, c in nxt.items() if c}
    return F2Vector.from_terms(op.canonical(tok, labels) for labels in partial)


class ThetaIso:
    """psi_s: S(P, Sigma Omega M) -> K_P(M) and its inverse phi_hat_s."""

    def __init__(self, operad: Operad, M: UnstableModule, section: GradedSection, star=None,
                 cap: Optional[int] = None, weight=None):
        star = operad.default_star() if star is None else F2Vector(star)
        central, bad = is_central(operad, star)
        if not central:
            raise CentralityError(f"star is not {operad.name}-central (the centrality relation fails at {bad}); refusing to build the isomorphism")
        ok, witness = is_reduced(M, cap)
        if not ok:
            raise NotReducedError(
                f"{M.name} is not reduced (Sq_0 kills {witness}); for such modules, e.g. Sigma F(0), "
                "K_P(M) and S(P, Sigma Omega M) can differ")
        if not section.check():
            raise ValueError("the section does not split the projection")
        self.operad = operad
        self.star = star
        self.module = M
        self.section = section
        self.loops: Loops = section.loops
        cap = M.cap if cap is None else cap
        self.cap = cap
        self.source = FreeAlgebra(operad, self.loops.ssm, cap, weight)
        self.ambient = FreeAlgebra(operad, M, cap, weight)
        self.K = build_quotient(self.ambient, "e", star, section)
        self._phi = self._module_inverse()

    def _module_inverse(self) -> Dict[Hashable, F2Vector]:
        """phi_s on M: write y in the basis Sq_0^k s(b) and send it to (star_k; b^{x 2^k})."""
        M, ssm, src = self.module, self.loops.ssm, self.source
        phi: Dict[Hashable, F2Vector] = {}
        for d in range(1, self.cap + 1):
            vecs, vals = [], []
            for b in ssm.tokens():
                e = ssm.degree(b)
                k, f = 0, 1
                while f * e < d:
                    k, f = k + 1, f * 2
                if f * e != d:
                    continue
                vecs.append(sq0_power(M, self.section(b), k))
                vals.append(frobenius_power(src, star_power(self.operad, self.star, k), src.generator(b), f))
            el = Eliminator(M.basis(d), track=True)
            for v in vecs:
                if not el.add(v):
                    raise InternalConsistencyError(f"Sq_0^k s(b) are dependent in degree {d}")
            if el.rank != M.dim(d):
                raise InternalConsistencyError(f"Sq_0^k s(b) do not span M in degree {d}")
            for y in M.basis(d):
                w = el.witness(F2Vector((y,)))
                acc: set = set()
                for idx in w:
                    toggle(acc, vals[idx])
                phi[y] = F2Vector(acc)
        return phi

    def psi(self, v) -> F2Vector:
        acc: set = set()
        op = self.operad
        for m in v:
            tok, labels = op.split(m)
            toggle(acc, _expand_slots(op, tok, [self.section(b) for b in labels]))
        return self.K.reduce(F2Vector(acc))

    def phi_bar(self, v) -> F2Vector:
        acc: set = set()
        op = self.operad
        for m in v:
            tok, labels = op.split(m)
            args = [self._phi[y] for y in labels]
            partial: Dict[tuple, int] = {(): 1}
            for a in args:
                nxt: Dict[tuple, int] = {}
                for pre, c in partial.items():
                    for t in a:
                        key = pre + (t,)
                        nxt[key] = nxt.get(key, 0) ^ c
                partial = {k: c for k, c in nxt.items() if c}
            for ms in partial:
                toggle(acc, op.gamma(tok, list(ms)))
        return F2Vector(acc)

    def phi_hat(self, v) -> F2Vector:
        return self.phi_bar(self.K.reduce(v))

    def transported_sq(self, i: int, v) -> F2Vector:
        """Sq^i (.) f = phi_hat(Sq^i psi(f))."""
        return self.phi_hat(self.K.sq(i, self.psi(v)))

    def dimension_table(self) -> List[Dict]:
        return [{"d": d, "quotient": self.K.dim(d), "free": self.source.dim(d),
                 "match": self.K.dim(d) == self.source.dim(d)} for d in range(self.cap + 1)]

    def check_round_trips(self) -> List[str]:
        fails = []
        for d in range(self.cap + 1):
            for f in self.source.basis(d):
                v = F2Vector((f,))
                if self.phi_hat(self.psi(v)) != v:
                    fails.append(f"phi_hat psi != id on {f}")
            for r in self.K.basis(d):
                v = F2Vector((r,))
                if self.psi(self.phi_hat(v)) != v:
                    fails.append(f"psi phi_hat != id on {r}")
            for row in self.K.ideal_rows(d):
                if self.phi_bar(row):
                    fails.append(f"phi_bar does not kill the ideal in degree {d}")
                    break
        return fails

    def composition_pairs(self, count: int = 100, seed: int = 0) -> List[Tuple]:
        """Seeded random (mu, f1, f2) with mu of arity 2 and f1, f2 source monomials."""
        rng = random.Random(seed)
        op = self.operad
        if self.source.weight is not None:
            mus = [t for t in self.star]
        else:
            mus = [t for t in op.basis(2)] if not isinstance(op, DecoratedCom) or op.kraft or op.monoid.bounded else list(self.star)
        pool = [(d, f) for d in range(1, self.cap) for f in self.source.basis(d)]
        out = []
        tries = 0
        while len(out) < count and pool and tries < 100 * count:
            tries += 1
            (d1, f1), (d2, f2) = rng.choice(pool), rng.choice(pool)
            if d1 + d2 > self.cap:
                continue
            out.append((rng.choice(mus), f1, f2))
        return out

    def check_psi_multiplicative(self, count: int = 100, seed: int = 0) -> List[str]:
        fails = []
        for mu, f1, f2 in self.composition_pairs(count, seed):
            a, b = F2Vector((f1,)), F2Vector((f2,))
            lhs = self.psi(self.source.compose(mu, [a, b]))
            rhs = self.K.reduce(self.ambient.compose(mu, [self.psi(a), self.psi(b)]))
            if lhs != rhs:
                fails.append(f"psi({mu}; {f1}, {f2})")
            lhs2 = self.phi_hat(self.ambient.compose(mu, [self.psi(a), self.psi(b)]))
            if lhs2 != self.source.compose(mu, [a, b]):
                fails.append(f"phi_hat({mu}; ...) for {f1}, {f2}")
        return fails


def theorem_iso(operad: Operad, M: UnstableModule, section: GradedSection, star=None, cap=None, weight=None) -> ThetaIso:
    return ThetaIso(operad, M, section, star, cap, weight)


def verify_theorem_table(operad: Operad, M: UnstableModule, star=None, cap: Optional[int] = None,
                         weight=None, flavor: str = "unst") -> Dict:
    """dim K_P(M)^d against dim S(P, Sigma Omega M)^d, without assuming M reduced."""
    cap = M.cap if cap is None else cap
    loops = Loops(M)
    free = FreeAlgebra(operad, loops.ssm, cap, weight)
    K = build_quotient(FreeAlgebra(operad, M, cap, weight), flavor, star)
    rows = [{"d": d, "quotient": K.dim(d), "free": free.dim(d), "match": K.dim(d) == free.dim(d)}
            for d in range(cap + 1)]
    return {"degrees": rows, "ok": all(r["match"] for r in rows)}


# morphisms ------------------------------------------------------------------------


class InducedMap:
    """K_P(M) -> K_Q(M) induced by an operad morphism f with f(star_P) = star_Q."""

    def __init__(self, f: OperadMorphism, source: QuotientAlgebra, target: QuotientAlgebra):
        self.f = f
        self.source = source
        self.target = target

    def __call__(self, v) -> F2Vector:
        op_s, op_t = self.f.source, self.f.target
        acc: set = set()
        for m in v:
            tok, labels = op_s.split(m)
            for t in self.f(tok):
                toggle(acc, (op_t.canonical(t, labels),))
        return self.target.reduce(F2Vector(acc))

    def rank(self, d: int) -> int:
        el = Eliminator(self.target.ambient.basis(d))
        el.extend(self(F2Vector((r,))) for r in self.source.basis(d))
        return el.rank

    def kernel_dims(self) -> List[int]:
        return [self.source.dim(d) - self.rank(d) for d in range(self.source.cap + 1)]

    def commutes_with_sq(self) -> bool:
        for d in range(1, self.source.cap + 1):
            for r in self.source.basis(d):
                v = F2Vector((r,))
                for i in range(1, self.source.cap - d + 1):
                    if self(self.source.sq(i, v)) != self.target.sq(i, self(v)):
                        return False
        return True


def induced_morphism(f: OperadMorphism, source: QuotientAlgebra, target: QuotientAlgebra) -> InducedMap:
    if f(source.star) != target.star:
        raise ValueError(f"the morphism sends {sorted(source.star)} to {sorted(f(source.star))}, not to the target star {sorted(target.star)}")
    return InducedMap(f, source, target)
