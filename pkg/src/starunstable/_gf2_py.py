"""Pure-Python elimination kernel (fallback for the compiled one)."""


def rref(rows, ncols):
    """Reduced row echelon form of int-packed rows, leading bit as pivot.

    Returns the nonzero reduced rows ordered by decreasing pivot.
    """
    pivots = {}
    for x in rows:
        while x:
            b = x.bit_length() - 1
            row = pivots.get(b)
            if row is None:
                break
            x ^= row
        if x:
            pivots[x.bit_length() - 1] = x
    order = sorted(pivots, reverse=True)
    # back substitution, lowest pivot first so each row is cleared once
    for i in range(len(order) - 1, -1, -1):
        b = order[i]
        x = pivots[b]
        for c in order[i + 1:]:
            if x >> c & 1:
                x ^= pivots[c]
        pivots[b] = x
    return [pivots[b] for b in order]
