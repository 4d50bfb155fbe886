"""Unstable A-modules truncated at a degree cap.

A module is a graded set of basis tokens plus a rule giving Sq^i on each
token.  Every construction here (F(n), suspension, Phi, cokernel of lambda,
direct sums) produces such a rule; results are cached per (i, token).
"""

from __future__ import annotations

import random
from typing import Callable, Dict, Hashable, Iterable, List, Optional, Sequence, Tuple

from .gf2core import (
    ZERO,
    DegreeCapError,
    Eliminator,
    F2Vector,
    GradedSpace,
    LinearMap,
    toggle,
)
from . import steenrod
from .steenrod import adem_normalize, admissible_sequences, excess

Rule = Callable[[int, Hashable], F2Vector]


class UnstableModuleError(ValueError):
    pass


class UnstableModule:
    """Graded F_2 space with a Steenrod action, known up to ``cap``."""

    def __init__(self, name: str, cap: int, bases: Dict[int, Sequence[Hashable]], rule: Rule):
        if cap < 0:
            raise ValueError("negative cap")
        self.name = name
        self.cap = cap
        self.space = GradedSpace(cap, bases, name)
        self._rule = rule
        self._cache: Dict[Tuple[int, Hashable], F2Vector] = {}

    def __repr__(self):
        return f"<UnstableModule {self.name} cap={self.cap}>"

    # graded space
    def basis(self, d: int) -> Tuple:
        if d < 0:
            return ()
        return self.space.basis(d)

    def dim(self, d: int) -> int:
        return len(self.basis(d))

    def dims(self) -> List[int]:
        return self.space.dims()

    def degree(self, token) -> int:
        return self.space.degree(token)

    def tokens(self) -> Iterable[Hashable]:
        for d in range(self.cap + 1):
            yield from self.basis(d)

    def __contains__(self, token):
        return token in self.space

    @property
    def is_connected(self) -> bool:
        return self.dim(0) == 0

    # action
    def sq_token(self, i: int, token) -> F2Vector:
        d = self.degree(token)
        if i == 0:
            return F2Vector((token,))
        if d + i > self.cap:
            raise DegreeCapError(f"{self.name}: Sq^{i} on degree {d} exceeds cap {self.cap}")
        if i > d:
            return ZERO
        key = (i, token)
        out = self._cache.get(key)
        if out is None:
            out = self._cache[key] = F2Vector(self._rule(i, token))
        return out

    def sq(self, i: int, v) -> F2Vector:
        if not isinstance(v, frozenset):
            return self.sq_token(i, v)
        if i == 0:
            return F2Vector(v)
        acc: set = set()
        for t in v:
            toggle(acc, self.sq_token(i, t))
        return F2Vector(acc)

    def act_word(self, word, v) -> F2Vector:
        cur = v if isinstance(v, frozenset) else F2Vector((v,))
        for i in reversed(steenrod.clean(word)):
            cur = self.sq(i, cur)
        return cur

    def act(self, element: Iterable, v) -> F2Vector:
        acc: set = set()
        for w in element:
            toggle(acc, self.act_word(w, v))
        return F2Vector(acc)

    def sq0(self, v) -> F2Vector:
        """Top square Sq_0 x = Sq^{|x|} x, applied tokenwise."""
        if not isinstance(v, frozenset):
            return self.sq_token(self.degree(v), v)
        acc: set = set()
        for t in v:
            toggle(acc, self.sq_token(self.degree(t), t))
        return F2Vector(acc)

    def matrix(self, i: int, d: int) -> LinearMap:
        cols = {t: self.sq_token(i, t) for t in self.basis(d)}
        return LinearMap(self.space, self.space, cols, shift=i)

    # certification
    def instability_failures(self) -> List[Tuple[int, Hashable]]:
        """Pairs (i, x) with i > |x| and the raw rule giving Sq^i x != 0."""
        bad = []
        for t in self.tokens():
            d = self.degree(t)
            for i in range(d + 1, self.cap - d + 1):
                if self._rule(i, t):
                    bad.append((i, t))
        return bad

    def adem_failures(self) -> List[Tuple[Tuple[int, int], Hashable]]:
        """Inadmissible pairs (i, j) whose composite action disagrees with its Adem expansion."""
        bad = []
        for t in self.tokens():
            d = self.degree(t)
            room = self.cap - d
            for j in range(1, room + 1):
                for i in range(1, min(2 * j, room - j + 1)):
                    lhs = self.sq(i, self.sq(j, t))
                    rhs = self.act(adem_normalize((i, j)), t)
                    if lhs != rhs:
                        bad.append(((i, j), t))
        return bad

    def certify(self) -> None:
        bad = self.instability_failures()
        if bad:
            raise UnstableModuleError(f"{self.name}: instability fails at {bad[0]}")
        bad = self.adem_failures()
        if bad:
            raise UnstableModuleError(f"{self.name}: Adem relation fails at {bad[0]}")


# constructors ---------------------------------------------------------------


def free_module(n: int, cap: int) -> UnstableModule:
    """F(n): basis Sq^I iota_n, I admissible with e(I) <= n, token = I."""
    if n < 0:
        raise ValueError("negative generator degree")
    if cap < n:
        raise ValueError(f"cap {cap} below generator degree {n}")
    bases = {n + k: admissible_sequences(k, n) for k in range(cap - n + 1)}

    def rule(i, word):
        return F2Vector(w for w in adem_normalize((i,) + word) if excess(w) <= n)

    return UnstableModule(f"F({n})", cap, bases, rule)


def zero_module(cap: int) -> UnstableModule:
    return UnstableModule("0", cap, {}, lambda i, t: ZERO)


def suspend(M: UnstableModule) -> UnstableModule:
    """Sigma M: same tokens one degree up, Sq^i(sigma x) = sigma Sq^i x for i <= |x|."""
    cap = M.cap + 1
    bases = {d + 1: M.basis(d) for d in range(M.cap + 1) if M.basis(d)}

    def rule(i, t):
        return M.sq_token(i, t) if i <= M.degree(t) else ZERO

    return UnstableModule(f"S{M.name}", cap, bases, rule)


def phi(M: UnstableModule) -> UnstableModule:
    """Phi M: degrees doubled, Sq^{2i} Phi x = Phi Sq^i x, odd squares zero.

    The cap is kept, so only M up to cap // 2 is used.
    """
    cap = M.cap
    bases = {2 * d: M.basis(d) for d in range(cap // 2 + 1) if M.basis(d)}

    def rule(i, t):
        if i % 2:
            return ZERO
        return M.sq_token(i // 2, t)

    return UnstableModule(f"Phi{M.name}", cap, bases, rule)


def lambda_map(M: UnstableModule) -> LinearMap:
    """lambda: Phi M -> M, Phi x -> Sq_0 x."""
    P = phi(M)
    cols = {t: M.sq0(t) for d in range(M.cap // 2 + 1) for t in M.basis(d)}
    return LinearMap(P, M, cols, shift=0)


def direct_sum(*modules: UnstableModule) -> UnstableModule:
    """Tokens (k, t) for t in the k-th summand; cap is the least summand cap."""
    if not modules:
        raise ValueError("empty direct sum")
    cap = min(m.cap for m in modules)
    bases: Dict[int, List] = {}
    for k, m in enumerate(modules):
        for d in range(cap + 1):
            for t in m.basis(d):
                bases.setdefault(d, []).append((k, t))

    def rule(i, tok):
        k, t = tok
        return F2Vector((k, s) for s in modules[k].sq_token(i, t))

    return UnstableModule("(+)".join(m.name for m in modules), cap, bases, rule)


def inclusion(summand: int, total: UnstableModule, part: UnstableModule) -> LinearMap:
    cols = {t: F2Vector(((summand, t),)) for t in part.tokens() if part.degree(t) <= total.cap}
    return LinearMap(part, total, cols)


# loops, sections, reducedness -------------------------------------------------


class GradedSection:
    """A degree-preserving linear map s: Sigma Omega M -> M with pr o s = id."""

    def __init__(self, loops: "Loops", values: Dict[Hashable, F2Vector], name: str = "section"):
        self.loops = loops
        self.values = values
        self.name = name

    def __call__(self, b) -> F2Vector:
        if not isinstance(b, frozenset):
            return self.values[b]
        acc: set = set()
        for t in b:
            toggle(acc, self.values[t])
        return F2Vector(acc)

    def check(self) -> bool:
        L = self.loops
        for b, v in self.values.items():
            if any(L.module.degree(t) != L.ssm.degree(b) for t in v):
                return False
            if L.pr(v) != F2Vector((b,)):
                return False
        return True


class Loops:
    """Sigma Omega M realized as the cokernel of lambda_M, with projection pr.

    Basis tokens of the cokernel are the standard (non-pivot) M tokens for
    the elimination of the image of Sq_0; pr sends x to its normal form.
    """

    def __init__(self, M: UnstableModule):
        if not M.is_connected:
            raise UnstableModuleError(f"{M.name} is not connected; Sigma Omega is only used for connected modules")
        self.module = M
        self.cap = M.cap
        self._elim: Dict[int, Eliminator] = {}
        bases = {}
        for d in range(1, M.cap + 1):
            el = Eliminator(M.basis(d))
            if d % 2 == 0:
                el.extend(M.sq0(t) for t in M.basis(d // 2))
            self._elim[d] = el
            std = el.standard_tokens()
            if std:
                bases[d] = std

        def rule(i, t):
            return self.pr(M.sq_token(i, t))

        self.ssm = UnstableModule(f"SO{M.name}", M.cap, bases, rule)

    def pr(self, v) -> F2Vector:
        if not isinstance(v, frozenset):
            v = F2Vector((v,))
        acc: set = set()
        by_deg: Dict[int, set] = {}
        for t in v:
            by_deg.setdefault(self.module.degree(t), set()).add(t)
        for d, part in by_deg.items():
            toggle(acc, self._elim[d].normal_form(part))
        return F2Vector(acc)

    def image_basis(self, d: int) -> List[F2Vector]:
        """A basis of Sq_0(M^{d/2}) inside M^d (empty for odd d)."""
        el = self._elim[d]
        return [el.from_int(r) for r in el.pivots.values()]

    def complement_section(self) -> GradedSection:
        """s(b) = b: the standard tokens themselves."""
        vals = {b: F2Vector((b,)) for b in self.ssm.tokens()}
        return GradedSection(self, vals, "classical")

    def random_section(self, seed: int) -> GradedSection:
        """s(b) = b + a random element of the image of Sq_0 in the same degree."""
        rng = random.Random(seed)
        vals = {}
        for b in self.ssm.tokens():
            v = F2Vector((b,))
            for row in self.image_basis(self.ssm.degree(b)):
                if rng.random() < 0.5:
                    v = v + row
            vals[b] = v
        return GradedSection(self, vals, f"random:{seed}")


def loops_via_cokernel(M: UnstableModule) -> Loops:
    return Loops(M)


def classical_section(n: int, cap: int) -> GradedSection:
    """For F(n): sigma(Sq^I iota_{n-1}) -> Sq^I iota_n.

    The cokernel of lambda on F(n) has basis the I with e(I) < n, which is
    exactly the basis of Sigma F(n-1) under the same token I.
    """
    if n < 1:
        raise ValueError("the classical section needs n >= 1")
    L = Loops(free_module(n, cap))
    expected = {t for d in range(cap + 1) for t in suspend(free_module(n - 1, cap - 1)).basis(d)}
    got = set(L.ssm.tokens())
    if expected != got:
        raise AssertionError("cokernel basis differs from Sigma F(n-1)")
    return L.complement_section()


def is_reduced(M: UnstableModule, cap: Optional[int] = None) -> Tuple[bool, Optional[F2Vector]]:
    """Is Sq_0 injective in degrees <= cap // 2?  Returns a kernel element if not."""
    cap = M.cap if cap is None else min(cap, M.cap)
    for d in range(1, cap // 2 + 1):
        basis = M.basis(d)
        if not basis:
            continue
        el = Eliminator(M.basis(2 * d), track=True)
        for t in basis:
            if not el.add(M.sq0(t)):
                # dependent: find the kernel combination
                w = el.witness(M.sq0(t))
                combo = F2Vector.from_terms([basis[k] for k in w] + [t])
                return False, combo
    return True, None


def sections_equal_dims(M: UnstableModule) -> bool:
    """For reduced connected M: dim M^d = sum_k dim (Sigma Omega M)^{d / 2^k}."""
    L = Loops(M)
    for d in range(1, M.cap + 1):
        total, e = 0, d
        while True:
            total += L.ssm.dim(e)
            if e % 2:
                break
            e //= 2
        if total != M.dim(d):
            return False
    return True
