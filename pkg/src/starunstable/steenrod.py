"""The mod 2 Steenrod algebra as a rewriting system on words Sq^{i_1}...Sq^{i_k}.

Words are tuples of positive ints; the empty tuple is Sq^0 = 1.  Elements are
``F2Vector`` sums of admissible words.
"""

from __future__ import annotations

import random
from functools import lru_cache
from itertools import product
from typing import Dict, Iterable, List, Optional, Tuple

from .gf2core import F2Vector, toggle

Word = Tuple[int, ...]


def binom_mod2(a: int, b: int) -> int:
    """binom(a, b) mod 2 by Lucas: 1 iff the bits of b are a subset of those of a."""
    if a < 0 or b < 0 or b > a:
        return 0
    return 1 if (a & b) == b else 0


def excess(word: Word) -> int:
    if not word:
        return 0
    return word[0] - sum(word[1:])


def is_admissible(word: Word) -> bool:
    return all(word[h] >= 2 * word[h + 1] for h in range(len(word) - 1))


def degree(word: Word) -> int:
    return sum(word)


def clean(word: Iterable[int]) -> Word:
    """Drop Sq^0 letters."""
    w = tuple(int(i) for i in word)
    if any(i < 0 for i in w):
        raise ValueError(f"negative Steenrod square in {w}")
    return tuple(i for i in w if i)


@lru_cache(maxsize=None)
def adem_pair(i: int, j: int) -> Tuple[Word, ...]:
    """Right hand side of the Adem relation for Sq^i Sq^j with 0 < i < 2j."""
    if not 0 < i < 2 * j:
        raise ValueError(f"Sq^{i}Sq^{j} is not an inadmissible pair")
    out = []
    for k in range(i // 2 + 1):
        if binom_mod2(j - k - 1, i - 2 * k):
            out.append(clean((i + j - k, k)))
    return tuple(out)


def moment(word: Word) -> int:
    return sum((h + 1) * i for h, i in enumerate(word))


def _first_bad(word: Word) -> int:
    for h in range(len(word) - 1):
        if word[h] < 2 * word[h + 1]:
            return h
    return -1


def _bad_positions(word: Word) -> List[int]:
    return [h for h in range(len(word) - 1) if word[h] < 2 * word[h + 1]]


def _rewrite(word: Word, h: int) -> List[Word]:
    m = moment(word)
    out = []
    for rhs in adem_pair(word[h], word[h + 1]):
        new = word[:h] + rhs + word[h + 2:]
        # the moment strictly drops at every rewrite step, so rewriting terminates
        assert moment(new) < m, (word, new)
        out.append(new)
    return out


@lru_cache(maxsize=None)
def _normalize_leftmost(word: Word) -> F2Vector:
    h = _first_bad(word)
    if h < 0:
        return F2Vector((word,))
    acc: set = set()
    for new in _rewrite(word, h):
        toggle(acc, _normalize_leftmost(new))
    return F2Vector(acc)


def adem_normalize(word: Iterable[int], rng: Optional[random.Random] = None) -> F2Vector:
    """Admissible expansion of a word.

    The default strategy rewrites the leftmost inadmissible pair first and is
    memoized.  Passing ``rng`` picks a random inadmissible pair at each step
    instead (no memo), which is how confluence gets exercised.
    """
    w = clean(word)
    if rng is None:
        return _normalize_leftmost(w)
    acc: set = set()
    stack = [w]
    while stack:
        cur = stack.pop()
        bad = _bad_positions(cur)
        if not bad:
            toggle(acc, (cur,))
            continue
        stack.extend(_rewrite(cur, rng.choice(bad)))
    return F2Vector(acc)


def multiply(a: Iterable[Word], b: Iterable[Word]) -> F2Vector:
    """Product of two Steenrod elements given as sums of words."""
    acc: set = set()
    for u in a:
        for v in b:
            toggle(acc, adem_normalize(u + v))
    return F2Vector(acc)


@lru_cache(maxsize=None)
def admissible_sequences(deg: int, max_excess: Optional[int] = None, max_first: Optional[int] = None) -> Tuple[Word, ...]:
    """Admissible words of total degree ``deg``, optional excess bound.

    Deterministic order: lexicographically decreasing in the letters.
    """
    if deg == 0:
        return ((),)
    out = []
    top = deg if max_first is None else min(deg, max_first)
    for i in range(top, 0, -1):
        for rest in admissible_sequences(deg - i, None, i // 2):
            w = (i,) + rest
            if max_excess is None or excess(w) <= max_excess:
                out.append(w)
    return tuple(out)


def steenrod_basis(deg: int) -> List[Word]:
    if deg < 0:
        raise ValueError("negative degree")
    return list(admissible_sequences(deg))


def fmt_word(word: Word) -> str:
    return " ".join(f"Sq^{i}" for i in word) if word else "1"


def fmt_element(v: Iterable[Word]) -> str:
    terms = sorted(v, reverse=True)
    return " + ".join(fmt_word(w) for w in terms) if terms else "0"


# --- independent oracle: action on F_2[x_1..x_k] with |x_i| = 1 -------------

Poly = Dict[Tuple[int, ...], int]


def _sq_monomial(i: int, exps: Tuple[int, ...]) -> F2Vector:
    # total Sq on x^e is x^e (1 + x)^e, so Sq^i x^e = binom(e, i) x^{e+i};
    # Cartan distributes i over the variables.
    acc: set = set()
    n = len(exps)

    def rec(pos: int, left: int, cur: List[int]):
        if pos == n:
            if left == 0:
                toggle(acc, (tuple(cur),))
            return
        e = exps[pos]
        for k in range(0, min(left, e) + 1):
            if binom_mod2(e, k):
                cur.append(e + k)
                rec(pos + 1, left - k, cur)
                cur.pop()

    rec(0, i, [])
    return F2Vector(acc)


def polynomial_action_oracle(word: Iterable[int], monomial: Tuple[int, ...], cap: Optional[int] = None) -> F2Vector:
    """Act by the word letter by letter (rightmost first) on a monomial.

    ``monomial`` is an exponent vector.  No Adem relation is used: each
    letter is applied through the Cartan formula and Sq x = x + x^2.
    """
    w = clean(word)
    start = tuple(monomial)
    if cap is not None and sum(start) + degree(w) > cap:
        raise ValueError("result degree above cap")
    cur = F2Vector((start,))
    for i in reversed(w):
        acc: set = set()
        for m in cur:
            toggle(acc, _sq_monomial(i, m))
        cur = F2Vector(acc)
    return cur


def act_letterwise(element: Iterable[Word], monomial: Tuple[int, ...]) -> F2Vector:
    """Action of a sum of words on a monomial, each word applied letter by letter."""
    acc: set = set()
    for w in element:
        toggle(acc, polynomial_action_oracle(w, monomial))
    return F2Vector(acc)


def words(max_degree: int, max_length: int) -> Iterable[Word]:
    """All words with positive letters, total degree and length bounded."""
    yield ()
    for k in range(1, max_length + 1):
        for w in product(range(1, max_degree + 1), repeat=k):
            if sum(w) <= max_degree:
                yield w
