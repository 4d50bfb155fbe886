"""Linear algebra over F_2 on degreewise finite bases.

Vectors are finite sets of basis tokens (``F2Vector``); a token is present iff
its coefficient is 1.  Elimination packs vectors into Python ints indexed by a
fixed column order and keeps pivots keyed by their leading (highest) bit, so
normal forms are expressed in the non-pivot ("standard") tokens.  Large dense
batches are handed to the compiled kernel when it is available.
"""

from __future__ import annotations

import os
from typing import Dict, Hashable, Iterable, List, Optional, Sequence, Tuple

try:
    if os.environ.get("STARUNSTABLE_PURE_PYTHON"):
        raise ImportError("pure python requested")
    from . import _gf2kernel as _kernel

    BACKEND = "cython"
except ImportError:  # pragma: no cover - exercised when the extension is absent
    from . import _gf2_py as _kernel

    BACKEND = "python"

from . import _gf2_py

# batches at least this large and this dense go through the packed kernel
DENSE_MIN_ROWS = 64
DENSE_MIN_DENSITY = 0.05


class F2Vector(frozenset):
    """Immutable F_2 vector: the support set of its nonzero coefficients."""

    __slots__ = ()

    def __add__(self, other):
        return F2Vector(frozenset.__xor__(self, other))

    __radd__ = __add__
    __xor__ = __add__
    __sub__ = __add__

    def __repr__(self):
        if not self:
            return "F2Vector(0)"
        return "F2Vector(%s)" % " + ".join(repr(t) for t in sorted_tokens(self))

    @classmethod
    def from_terms(cls, terms: Iterable[Hashable]) -> "F2Vector":
        """Sum of the given terms, repeated terms cancelling in pairs."""
        acc: set = set()
        for t in terms:
            if t in acc:
                acc.remove(t)
            else:
                acc.add(t)
        return cls(acc)


ZERO = F2Vector()


def vec(*tokens) -> F2Vector:
    return F2Vector.from_terms(tokens)


def toggle(acc: set, terms: Iterable[Hashable]) -> None:
    """In-place ``acc += sum(terms)`` over F_2."""
    for t in terms:
        if t in acc:
            acc.remove(t)
        else:
            acc.add(t)


def sorted_tokens(tokens: Iterable[Hashable]) -> list:
    try:
        return sorted(tokens)
    except TypeError:
        return sorted(tokens, key=repr)


class DegreeCapError(ValueError):
    """Raised when data above a module's degree cap is requested."""


class GradedSpace:
    """Finite-dimensional-per-degree F_2 space with chosen ordered bases."""

    def __init__(self, degree_cap: int, bases: Dict[int, Sequence[Hashable]], name: str = ""):
        self.degree_cap = degree_cap
        self.name = name
        self._basis: Dict[int, Tuple] = {}
        self._degree: Dict[Hashable, int] = {}
        for d, tokens in bases.items():
            if d > degree_cap:
                raise DegreeCapError(f"basis given in degree {d} > cap {degree_cap}")
            tokens = tuple(tokens)
            if len(set(tokens)) != len(tokens):
                raise ValueError(f"duplicate basis tokens in degree {d}")
            self._basis[d] = tokens
            for t in tokens:
                self._degree[t] = d

    def basis(self, d: int) -> Tuple:
        if d > self.degree_cap:
            raise DegreeCapError(f"{self.name or 'space'}: degree {d} above cap {self.degree_cap}")
        return self._basis.get(d, ())

    def dim(self, d: int) -> int:
        return len(self.basis(d))

    def dims(self) -> List[int]:
        return [self.dim(d) for d in range(self.degree_cap + 1)]

    def degree(self, token) -> int:
        return self._degree[token]

    def __contains__(self, token):
        return token in self._degree


class LinearMap:
    """Graded linear map given by the images of source basis tokens."""

    def __init__(self, source, target, columns: Dict[Hashable, F2Vector], shift: int = 0):
        self.source = source
        self.target = target
        self.shift = shift
        self.columns = columns

    def __call__(self, v) -> F2Vector:
        if not isinstance(v, frozenset):
            return self.columns[v]
        acc: set = set()
        for t in v:
            toggle(acc, self.columns[t])
        return F2Vector(acc)

    def rank(self, d: int) -> int:
        return rank([self.columns[t] for t in self.source.basis(d)])

    def is_injective(self, d: int) -> bool:
        return self.rank(d) == len(self.source.basis(d))


class Eliminator:
    """Incremental row reduction over a fixed ordered column set.

    Pivots are leading bits, so the column order decides which tokens end up
    as standard (non-pivot) representatives: the last tokens become pivots
    first.  ``track=True`` records, for each pivot row, which inserted
    vectors sum to it (used for membership witnesses).
    """

    def __init__(self, tokens: Sequence[Hashable], track: bool = False):
        self.tokens = tuple(tokens)
        self.column = {t: i for i, t in enumerate(self.tokens)}
        if len(self.column) != len(self.tokens):
            raise ValueError("duplicate column tokens")
        self.pivots: Dict[int, int] = {}
        self.track = track
        self._combo: Dict[int, int] = {}
        self._inserted = 0

    def to_int(self, v: Iterable[Hashable]) -> int:
        x = 0
        col = self.column
        try:
            for t in v:
                x ^= 1 << col[t]
        except KeyError as exc:
            raise ValueError(f"token {exc.args[0]!r} not in this basis") from None
        return x

    def from_int(self, x: int) -> F2Vector:
        out = []
        while x:
            b = x.bit_length() - 1
            out.append(self.tokens[b])
            x ^= 1 << b
        return F2Vector(out)

    @property
    def rank(self) -> int:
        return len(self.pivots)

    def _reduce_top(self, x: int, combo: int = 0) -> Tuple[int, int]:
        piv = self.pivots
        while x:
            b = x.bit_length() - 1
            row = piv.get(b)
            if row is None:
                break
            x ^= row
            if self.track:
                combo ^= self._combo[b]
        return x, combo

    def add(self, v) -> bool:
        """Insert a vector; return True iff it was independent."""
        x = v if isinstance(v, int) else self.to_int(v)
        combo = (1 << self._inserted) if self.track else 0
        self._inserted += 1
        x, combo = self._reduce_top(x, combo)
        if not x:
            return False
        b = x.bit_length() - 1
        self.pivots[b] = x
        if self.track:
            self._combo[b] = combo
        return True

    def extend(self, vectors: Iterable) -> None:
        rows = [v if isinstance(v, int) else self.to_int(v) for v in vectors]
        if not self.track and _use_dense(rows, len(self.tokens)):
            rows.extend(self.pivots.values())
            self.pivots = {r.bit_length() - 1: r for r in _kernel.rref(rows, len(self.tokens))}
            return
        for r in rows:
            self.add(r)

    def normal_form_int(self, x: int) -> int:
        piv = self.pivots
        out = 0
        while x:
            b = x.bit_length() - 1
            row = piv.get(b)
            if row is None:
                out |= 1 << b
                x ^= 1 << b
            else:
                x ^= row
        return out

    def normal_form(self, v) -> F2Vector:
        """Unique representative of ``v + span`` supported on standard tokens."""
        return self.from_int(self.normal_form_int(self.to_int(v)))

    def contains(self, v) -> bool:
        return self._reduce_top(self.to_int(v))[0] == 0

    def witness(self, v) -> Optional[List[int]]:
        """Indices of inserted vectors summing to ``v``, or None if v is outside the span."""
        if not self.track:
            raise ValueError("witnesses need track=True")
        x, combo = self._reduce_top(self.to_int(v), 0)
        if x:
            return None
        return [i for i in range(self._inserted) if combo >> i & 1]

    def standard_tokens(self) -> List[Hashable]:
        return [t for i, t in enumerate(self.tokens) if i not in self.pivots]


def _use_dense(rows: List[int], ncols: int) -> bool:
    if len(rows) < DENSE_MIN_ROWS or ncols == 0:
        return False
    bits = sum(bin(r).count("1") for r in rows[:DENSE_MIN_ROWS])
    return bits / (DENSE_MIN_ROWS * ncols) >= DENSE_MIN_DENSITY


def _columns_for(vectors: Sequence[F2Vector], basis: Optional[Sequence[Hashable]]):
    if basis is not None:
        return list(basis)
    cols: set = set()
    for v in vectors:
        cols |= v
    return sorted_tokens(cols)


def rank(vectors: Sequence[F2Vector], basis: Optional[Sequence[Hashable]] = None) -> int:
    """Rank of the F_2-span.  With ``basis`` given, foreign tokens are an error."""
    vectors = [F2Vector(v) for v in vectors]
    cols = _columns_for(vectors, basis)
    el = Eliminator(cols)
    el.extend(vectors)
    return el.rank


def quotient_dimension(ambient, ideal_vectors: Sequence) -> int:
    """dim(ambient) - rank(ideal_vectors).

    ``ambient`` is either a dimension n (vectors then hold integer indices in
    range(n)) or an explicit basis sequence.
    """
    if isinstance(ambient, int):
        if ambient < 0:
            raise ValueError("negative dimension")
        basis = range(ambient)
        for v in ideal_vectors:
            for t in v:
                if not isinstance(t, int) or not 0 <= t < ambient:
                    raise ValueError(f"index {t!r} out of range for dimension {ambient}")
    else:
        basis = list(ambient)
    return len(basis) - rank(ideal_vectors, basis)


def solve_membership(v, span: Sequence) -> Tuple[bool, List[int]]:
    """Is ``v`` in the span?  If so also return indices of a sublist summing to it."""
    span = [F2Vector(s) for s in span]
    v = F2Vector(v)
    el = Eliminator(_columns_for(span + [v], None), track=True)
    for s in span:
        el.add(s)
    w = el.witness(v)
    if w is None:
        return False, []
    return True, w


def rref_ints(rows: List[int], ncols: int, backend: str = "auto") -> List[int]:
    """Fully reduced echelon rows (leading bit pivots), highest pivot first."""
    if backend == "python":
        return _gf2_py.rref(rows, ncols)
    if backend == "cython" and BACKEND != "cython":
        raise RuntimeError("compiled kernel not available")
    return _kernel.rref(rows, ncols)
