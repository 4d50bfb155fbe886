"""Polynomial models with the shifted action: Brown-Gitler J, Carlsson K, Campbell-Selick M_s.

Variables x_i all have degree 1 and the total square is Sq(x_i) = x_i + x_{i-1}^2,
so Sq^k(x_i^e) = binom(e, k) x_i^{e-k} x_{i-1}^{2k}, extended by Cartan.

kinds
  j         i >= 0, x_{-1} = 0
  k         i in Z
  ms:s      i in Z/s
  jtrunc:q  0 <= i <= q, x_{-1} = 0 (the polynomial subalgebra F[x_0..x_q] of J)

The weight of x_i is 2^i (a dyadic rational for i < 0), additive under
products and preserved by the action.  J and K are infinite in each degree,
so they are always computed one weight at a time; J(n) and K(n) are the
weight-n pieces.  d is the ring endomorphism x_i -> x_{i-1} and the internal
product on a weight piece is a * b = d(a b).
"""

from __future__ import annotations

import math
from fractions import Fraction
from itertools import product
from typing import Dict, List, Optional, Sequence, Tuple

from .gf2core import DegreeCapError, Eliminator, F2Vector, toggle
from .operads import v2
from .steenrod import binom_mod2
from .unstable import UnstableModule

Mono = Tuple[Tuple[int, int], ...]  # sorted (index, exponent>0) pairs


def parse_kind(spec: str) -> Tuple[str, Optional[int]]:
    spec = spec.strip().lower()
    if spec in ("j", "k"):
        return spec, None
    for pre in ("ms", "jtrunc"):
        if spec.startswith(pre + ":"):
            return pre, int(spec.split(":", 1)[1])
    raise ValueError(f"unknown model {spec!r}; expected j, k, ms:<s> or jtrunc:<q>")


def _mono_from_indices(indices) -> Mono:
    counts: Dict[int, int] = {}
    for i in indices:
        counts[i] = counts.get(i, 0) + 1
    return tuple(sorted(counts.items()))


def mono_degree(m: Mono) -> int:
    return sum(e for _, e in m)


def mono_mul(a: Mono, b: Mono) -> Mono:
    counts = dict(a)
    for i, e in b:
        counts[i] = counts.get(i, 0) + e
    return tuple(sorted(counts.items()))


class ShiftedPolynomialAlgebra:
    def __init__(self, kind: str, cap: int, param: Optional[int] = None, weight=None):
        if kind not in ("j", "k", "ms", "jtrunc"):
            raise ValueError(kind)
        if kind in ("ms", "jtrunc") and (param is None or param < (1 if kind == "ms" else 0)):
            raise ValueError(f"{kind} needs a parameter")
        if kind in ("j", "k") and weight is None:
            raise ValueError(f"{kind} is infinite in each degree; pass a weight")
        if kind == "ms" and weight is not None:
            raise ValueError("Campbell-Selick models carry no weight grading")
        self.kind = kind
        self.param = param
        self.cap = cap
        self.weight = None if weight is None else Fraction(weight)
        if self.weight is not None and self.weight <= 0:
            raise ValueError("weights are positive")
        self._basis: Dict[int, tuple] = {}
        self._sq: Dict[tuple, F2Vector] = {}
        self.name = {"j": "J", "k": "K", "ms": f"M{param}", "jtrunc": f"Jtrunc{param}"}[kind]
        if self.weight is not None:
            self.name += f"({self.weight})"

    def __repr__(self):
        return f"<Model {self.name} cap={self.cap}>"

    # index arithmetic
    def shift(self, i: int, by: int) -> Optional[int]:
        """Index of d^by applied to x_i, or None when the variable is zero."""
        j = i - by
        if self.kind == "ms":
            return j % self.param
        if self.kind in ("j", "jtrunc") and j < 0:
            return None
        return j

    def variable_weight(self, i: int) -> Fraction:
        return Fraction(2) ** i

    def mono_weight(self, m: Mono) -> Fraction:
        return sum((e * self.variable_weight(i) for i, e in m), Fraction(0))

    def index_window(self, d: int) -> Tuple[int, int]:
        """Indices that can occur in degree d (exact for weight pieces)."""
        if self.kind == "ms":
            return 0, self.param - 1
        lo = 0 if self.kind in ("j", "jtrunc") else None
        hi = self.param if self.kind == "jtrunc" else None
        if self.weight is not None:
            w = self.weight
            top = math.floor(math.log2(w))
            while Fraction(2) ** (top + 1) <= w:
                top += 1
            while Fraction(2) ** top > w:
                top -= 1
            bottom = v2(w) - d + 1
            hi = top if hi is None else min(hi, top)
            lo = bottom if lo is None else max(lo, bottom)
        return lo, hi

    # bases
    def basis(self, d: int) -> tuple:
        if d > self.cap:
            raise DegreeCapError(f"{self.name}: degree {d} above cap {self.cap}")
        if d < 0:
            return ()
        b = self._basis.get(d)
        if b is None:
            b = self._basis[d] = tuple(sorted(self._enumerate(d)))
        return b

    def _enumerate(self, d: int) -> List[Mono]:
        if d == 0:
            return [()] if self.weight is None or self.weight == 0 else []
        lo, hi = self.index_window(d)
        if lo > hi:
            return []
        idx = list(range(hi, lo - 1, -1))  # heaviest first
        out = []
        if self.weight is None:
            def rec(k, rem, cur):
                if rem == 0:
                    out.append(_mono_from_indices(cur))
                    return
                for j in range(k, len(idx)):
                    cur.append(idx[j])
                    rec(j, rem - 1, cur)
                    cur.pop()
            rec(0, d, [])
            return out
        w = self.weight

        def recw(k, rem_d, rem_w, cur):
            if rem_d == 0:
                if rem_w == 0:
                    out.append(_mono_from_indices(cur))
                return
            for j in range(k, len(idx)):
                wt = Fraction(2) ** idx[j]
                if wt > rem_w:
                    continue
                if rem_w > wt * rem_d:
                    break
                cur.append(idx[j])
                recw(j, rem_d - 1, rem_w - wt, cur)
                cur.pop()

        recw(0, d, w, [])
        return out

    def dim(self, d: int) -> int:
        return len(self.basis(d))

    def dims(self, top: Optional[int] = None) -> List[int]:
        top = self.cap if top is None else top
        return [self.dim(d) for d in range(top + 1)]

    # action
    def _sq_power(self, k: int, i: int, e: int) -> Optional[Mono]:
        """Sq^k(x_i^e) as a monomial, or None if zero."""
        if not binom_mod2(e, k):
            return None
        if k == 0:
            return ((i, e),)
        j = self.shift(i, 1)
        if j is None:
            return None
        return mono_mul(((i, e - k),) if e - k else (), ((j, 2 * k),))

    def sq_monomial(self, k: int, m: Mono) -> F2Vector:
        d = mono_degree(m)
        if k == 0:
            return F2Vector((m,))
        if d + k > self.cap:
            raise DegreeCapError(f"{self.name}: Sq^{k} on degree {d} exceeds cap {self.cap}")
        key = (k, m)
        out = self._sq.get(key)
        if out is not None:
            return out
        states: Dict[Tuple[int, Mono], int] = {(0, ()): 1}
        for i, e in m:
            nxt: Dict[Tuple[int, Mono], int] = {}
            for (used, pre), c in states.items():
                for kk in range(0, min(e, k - used) + 1):
                    piece = self._sq_power(kk, i, e)
                    if piece is None:
                        continue
                    key2 = (used + kk, mono_mul(pre, piece))
                    nxt[key2] = nxt.get(key2, 0) ^ c
            states = {s: c for s, c in nxt.items() if c}
        out = F2Vector(mm for (used, mm), c in states.items() if used == k and c)
        self._sq[key] = out
        return out

    def sq(self, k: int, v) -> F2Vector:
        acc: set = set()
        for m in v:
            toggle(acc, self.sq_monomial(k, m))
        return F2Vector(acc)

    def sq0(self, v) -> F2Vector:
        acc: set = set()
        for m in v:
            toggle(acc, self.sq_monomial(mono_degree(m), m))
        return F2Vector(acc)

    # ring structure
    def variable(self, i: int) -> F2Vector:
        return F2Vector(((((i, 1),)),))

    def multiply(self, a, b) -> F2Vector:
        return F2Vector.from_terms(mono_mul(x, y) for x in a for y in b)

    def d_mono(self, m: Mono) -> Optional[Mono]:
        counts: Dict[int, int] = {}
        for i, e in m:
            j = self.shift(i, 1)
            if j is None:
                return None
            counts[j] = counts.get(j, 0) + e
        return tuple(sorted(counts.items()))

    def d(self, v) -> F2Vector:
        return F2Vector.from_terms(x for x in (self.d_mono(m) for m in v) if x is not None)

    def internal(self, a, b) -> F2Vector:
        """a * b = d(a b)."""
        return self.d(self.multiply(a, b))

    def as_module(self) -> UnstableModule:
        bases = {d: self.basis(d) for d in range(self.cap + 1)}
        return UnstableModule(self.name, self.cap, bases, lambda k, m: self.sq_monomial(k, m))

    def fmt(self, v) -> str:
        terms = sorted(v)
        if not terms:
            return "0"
        return " + ".join("*".join(f"x{i}" + (f"^{e}" if e > 1 else "") for i, e in m) or "1" for m in terms)


def build_model(kind: str, cap: int, param: Optional[int] = None, weight=None) -> ShiftedPolynomialAlgebra:
    return ShiftedPolynomialAlgebra(kind, cap, param, weight)


def model_from_spec(spec: str, cap: int, weight=None) -> ShiftedPolynomialAlgebra:
    kind, param = parse_kind(spec)
    return ShiftedPolynomialAlgebra(kind, cap, param, weight)


# checks ------------------------------------------------------------------------


def not_classically_unstable(model: ShiftedPolynomialAlgebra, i: Optional[int] = None):
    """A variable x_i with Sq_0 x_i = Sq^1 x_i != x_i^2, as (i, Sq^1 x_i, x_i^2)."""
    candidates = [i] if i is not None else list(range(0, 4))
    for c in candidates:
        x = ((c, 1),)
        got = model.sq_monomial(1, x) if model.cap >= 2 else None
        square = F2Vector((((c, 2),),))
        if got is not None and got != square:
            return c, got, square
    return None


def star_instability_check(model: ShiftedPolynomialAlgebra) -> Dict:
    """Sq_0 m = d(m)^2 for every basis monomial with 2|m| <= cap."""
    bad = []
    count = 0
    for d in range(1, model.cap // 2 + 1):
        for m in model.basis(d):
            count += 1
            v = F2Vector((m,))
            dm = model.d(v)
            if model.sq0(v) != model.multiply(dm, dm):
                bad.append(m)
    return {"checked": count, "failures": bad, "ok": not bad}


def level_identity_check(model: ShiftedPolynomialAlgebra, pieces: Sequence[ShiftedPolynomialAlgebra] = ()) -> Dict:
    """(a*b)*(c*e) = (a*c)*(b*e) for all basis quadruples of total degree <= cap.

    Extra weight pieces of the same model can be passed to mix weights.
    """
    cap = model.cap
    pool = [model] + [p for p in pieces if p is not model]
    basis = {d: sorted({m for p in pool for m in p.basis(d)}) for d in range(1, cap + 1)}
    bad, count = [], 0
    for degs in product(range(1, cap - 2), repeat=4):
        if sum(degs) > cap:
            continue
        for a, b, c, e in product(*(basis[d] for d in degs)):
            count += 1
            A, B, C, E = (F2Vector((x,)) for x in (a, b, c, e))
            if model.internal(model.internal(A, B), model.internal(C, E)) != model.internal(model.internal(A, C), model.internal(B, E)):
                bad.append((a, b, c, e))
    return {"checked": count, "failures": bad, "ok": not bad}


def weight_additivity_check(model: ShiftedPolynomialAlgebra, pieces: Sequence[ShiftedPolynomialAlgebra]) -> bool:
    ms = [m for p in pieces for d in range(p.cap + 1) for m in p.basis(d)]
    for a in ms:
        for b in ms:
            if model.mono_weight(mono_mul(a, b)) != model.mono_weight(a) + model.mono_weight(b):
                return False
    return True


# classifying maps ------------------------------------------------------------------


def f1_token_index(token) -> int:
    """F(1) basis token j_k = Sq^{2^{k-1}}...Sq^1 iota_1 has length k."""
    return len(token)


class ClassifyingMap:
    """K_P(F(1)) -> model, iota_1 -> x_g, extended along the operad structure.

    A Com-family monomial with pairs (a, j_k) goes to the product of
    x_{g-a-k}^{2^k}: d^a shifts indices and j_k = Sq_0^k iota_1 = x_{g-k}^{2^k}.
    """

    def __init__(self, quotient, model: ShiftedPolynomialAlgebra, generator_index: int):
        self.K = quotient
        self.model = model
        self.g = generator_index

    def on_monomial(self, m) -> Optional[Mono]:
        out: Mono = ()
        for a, tok in m:
            k = f1_token_index(tok)
            j = self.model.shift(self.g, a + k)
            if j is None:
                return None
            out = mono_mul(out, ((j, 2 ** k),))
        return out

    def __call__(self, v) -> F2Vector:
        return F2Vector.from_terms(x for x in (self.on_monomial(m) for m in v) if x is not None)


def compare_with_free(model: ShiftedPolynomialAlgebra, quotient, generator_index: Optional[int] = None,
                      pair_limit: int = 400) -> Dict:
    """Check that the classifying map K_P(F(1)) -> model is an isomorphism within the cap.

    Per degree: the map kills the ideal, sends coset representatives to
    independent vectors spanning the model, commutes with every Sq^i and
    with the star product (and with the plain product and d when the
    operad has them).
    """
    A = quotient.ambient
    if A.module.name != "F(1)":
        raise ValueError("the comparison maps start from F(1)")
    g = generator_index
    if g is None:
        g = model.param if model.kind == "jtrunc" else 0
    if model.cap < quotient.cap:
        raise DegreeCapError("model cap below the quotient cap")
    f = ClassifyingMap(quotient, model, g)
    rows, ok = [], True
    for d in range(quotient.cap + 1):
        reps = quotient.basis(d)
        el = Eliminator(model.basis(d))
        images = [f(F2Vector((r,))) for r in reps]
        independent = all(el.add(v) for v in images)
        onto = el.rank == model.dim(d)
        kills = all(not f(row) for row in quotient.ideal_rows(d))
        sq_ok = True
        for r, img in zip(reps, images):
            for i in range(1, quotient.cap - d + 1):
                if f(quotient.sq(i, F2Vector((r,)))) != model.sq(i, img):
                    sq_ok = False
                    break
            if not sq_ok:
                break
        good = independent and onto and kills and sq_ok
        ok &= good
        rows.append({"d": d, "free": len(reps), "model": model.dim(d), "injective": independent,
                     "surjective": onto, "kills_ideal": kills, "commutes_sq": sq_ok, "ok": good})
    prod = _product_checks(quotient, model, f, pair_limit)
    ok &= prod["ok"]
    return {"degrees": rows, "products": prod, "ok": ok}


def _product_checks(quotient, model, f: ClassifyingMap, pair_limit: int) -> Dict:
    A = quotient.ambient
    op = A.operad
    reps = [(d, r) for d in range(1, quotient.cap + 1) for r in quotient.basis(d)]
    checked, bad = 0, []
    star_tokens = list(quotient.star)
    for (d1, r1) in reps:
        for (d2, r2) in reps:
            if d1 + d2 > quotient.cap or checked >= pair_limit:
                continue
            a, b = F2Vector((r1,)), F2Vector((r2,))
            fa, fb = f(a), f(b)
            for s in star_tokens:
                lhs = f(quotient.reduce(A.compose(s, [a, b])))
                if s == (1, 1):
                    rhs = model.internal(fa, fb)
                elif s == (0, 0):
                    rhs = model.multiply(fa, fb)
                else:
                    continue
                checked += 1
                if lhs != rhs:
                    bad.append((r1, r2, s))
    if getattr(op, "monoid", None) is not None and op.monoid.kind != "trivial" and not op.kraft:
        # d acts on the algebra through (d; -); compare with the model's d
        for d0, r in reps:
            v = F2Vector((r,))
            shifted = op.shift(r, 1)
            if shifted is None:
                continue
            if A.weight is not None:
                break  # d changes the weight; checked on whole-algebra models only
            checked += 1
            if f(quotient.reduce(F2Vector((shifted,)))) != model.d(f(v)):
                bad.append((r, "d"))
    return {"checked": checked, "failures": bad[:10], "ok": not bad}


# cofiltration ---------------------------------------------------------------------


def cofiltration_maps(q_max: int, cap: int) -> List[Dict]:
    """d: J(2^{q+1}) -> J(2^q) for q <= q_max, checked against star and every Sq^i."""
    out = []
    for q in range(q_max + 1):
        src = build_model("j", cap, weight=2 ** (q + 1))
        tgt = build_model("j", cap, weight=2 ** q)
        sq_ok, star_ok = True, True
        for d in range(1, cap + 1):
            for m in src.basis(d):
                v = F2Vector((m,))
                for i in range(1, cap - d + 1):
                    if tgt.d(src.sq(i, v)) != tgt.sq(i, src.d(v)):
                        sq_ok = False
        mons = [(d, m) for d in range(1, cap + 1) for m in src.basis(d)]
        for d1, a in mons:
            for d2, b in mons:
                if d1 + d2 > cap:
                    continue
                A, B = F2Vector((a,)), F2Vector((b,))
                if src.d(src.internal(A, B)) != tgt.internal(src.d(A), src.d(B)):
                    star_ok = False
        out.append({"q": q, "source": src, "target": tgt, "commutes_sq": sq_ok, "commutes_star": star_ok})
    return out


def stabilization_table(q_max: int, cap: int) -> Dict[Tuple[int, int], Tuple[int, int]]:
    """(q, d) -> (dim J(2^q)^d, dim K(1)^d)."""
    K1 = build_model("k", cap, weight=1)
    out = {}
    for q in range(q_max + 1):
        J = build_model("j", cap, weight=2 ** q)
        for d in range(cap + 1):
            out[(q, d)] = (J.dim(d), K1.dim(d))
    return out
