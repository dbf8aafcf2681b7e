"""Independent verification routes used only by the tests.

Nothing here touches the package's normal-form engine: ranks come from
Fraction-based Gaussian elimination over Q and from elimination mod p,
and the group (co)homology complexes are rebuilt from scratch with plain
itertools tuple enumeration.
"""

from fractions import Fraction
from itertools import product


def rational_rank(rows):
    """Rank over Q by straightforward Gaussian elimination."""
    m = [[Fraction(v) for v in row] for row in rows]
    rank = 0
    cols = len(m[0]) if m else 0
    row = 0
    for col in range(cols):
        piv = None
        for i in range(row, len(m)):
            if m[i][col]:
                piv = i
                break
        if piv is None:
            continue
        m[row], m[piv] = m[piv], m[row]
        inv = 1 / m[row][col]
        m[row] = [v * inv for v in m[row]]
        for i in range(len(m)):
            if i != row and m[i][col]:
                f = m[i][col]
                m[i] = [a - f * b for a, b in zip(m[i], m[row])]
        row += 1
        rank += 1
    return rank


def modp_rank(rows, p):
    """Rank over the field with p elements (p prime)."""
    m = [[v % p for v in row] for row in rows]
    rank = 0
    cols = len(m[0]) if m else 0
    row = 0
    for col in range(cols):
        piv = None
        for i in range(row, len(m)):
            if m[i][col] % p:
                piv = i
                break
        if piv is None:
            continue
        m[row], m[piv] = m[piv], m[row]
        inv = pow(m[row][col], p - 2, p)
        m[row] = [(v * inv) % p for v in m[row]]
        for i in range(len(m)):
            if i != row and m[i][col]:
                f = m[i][col]
                m[i] = [(a - f * b) % p for a, b in zip(m[i], m[row])]
        row += 1
        rank += 1
    return rank


def group_bar_boundaries(table, n_max):
    """Boundary matrices of the standard bar complex of a finite group
    with trivial integer coefficients, degrees 1..n_max+1.

    Tuples are enumerated with itertools.product, independent of the
    package's nerve machinery.
    """
    k = len(table)
    tuples = {0: [()]}
    for n in range(1, n_max + 2):
        tuples[n] = sorted(product(range(k), repeat=n))
    index = {n: {t: i for i, t in enumerate(ts)} for n, ts in tuples.items()}
    mats = {}
    for n in range(1, n_max + 2):
        rows = len(tuples[n - 1])
        mat = [[0] * len(tuples[n]) for _ in range(rows)]
        for j, t in enumerate(tuples[n]):
            faces = [t[1:]]
            for i in range(1, n):
                faces.append(t[:i - 1] + (table[t[i - 1]][t[i]],) + t[i + 1:])
            faces.append(t[:-1])
            sign = 1
            for f in faces:
                mat[index[n - 1][f]][j] += sign
                sign = -sign
        mats[n] = mat
    return mats


def group_cochain_deltas(table, n_max):
    """Coboundary matrices of classical group cohomology with trivial
    integer coefficients, degrees 0..n_max."""
    k = len(table)
    tuples = {0: [()]}
    for n in range(1, n_max + 2):
        tuples[n] = sorted(product(range(k), repeat=n))
    index = {n: {t: i for i, t in enumerate(ts)} for n, ts in tuples.items()}
    deltas = {}
    for n in range(n_max + 1):
        rows = len(tuples[n + 1])
        mat = [[0] * len(tuples[n]) for _ in range(rows)]
        for r, t in enumerate(tuples[n + 1]):
            # trivial action: first face is just the tail
            mat[r][index[n][t[1:]]] += 1
            sign = -1
            for i in range(1, n + 1):
                face = t[:i - 1] + (table[t[i - 1]][t[i]],) + t[i + 1:]
                mat[r][index[n][face]] += sign
                sign = -sign
            mat[r][index[n][t[:-1]]] += sign
        deltas[n] = mat
    return deltas


def betti_over_field(groups, p):
    """Predicted dimension over F_p of (H tensor F_p) + Tor(H_below, F_p)
    for the homology of a complex of free groups, in degree order."""
    out = []
    for n, g in enumerate(groups):
        dim = g.free_rank + sum(1 for t in g.torsion if t % p == 0)
        if n > 0:
            dim += sum(1 for t in groups[n - 1].torsion if t % p == 0)
        out.append(dim)
    return out


def betti_over_field_cochain(groups, p):
    """Same for the cohomology of a cochain complex of free groups, where
    the Tor correction comes from one degree above; the last degree needs
    the group above it, so only len(groups) - 1 entries are predicted."""
    out = []
    for n in range(len(groups) - 1):
        g = groups[n]
        dim = g.free_rank + sum(1 for t in g.torsion if t % p == 0)
        dim += sum(1 for t in groups[n + 1].torsion if t % p == 0)
        out.append(dim)
    return out


def complex_betti(mats_out, mats_in, dims, field_rank):
    """Homology dimensions of a complex from rank computations alone.

    mats_out[n], mats_in[n] are the outgoing/incoming matrices at degree
    n (either may be None for zero), dims[n] the chain dimension.
    """
    out = []
    for n, dim in enumerate(dims):
        r_out = field_rank(mats_out[n]) if mats_out[n] is not None else 0
        r_in = field_rank(mats_in[n]) if mats_in[n] is not None else 0
        out.append(dim - r_out - r_in)
    return out


def orbit_count(G):
    """Connected components of the unit space, by naive union-find."""
    parent = {u: u for u in G.units}

    def find(x):
        while parent[x] != x:
            x = parent[x]
        return x

    for g in range(G.n_arrows):
        a, b = find(G.src[g]), find(G.rng[g])
        if a != b:
            parent[a] = b
    return len({find(u) for u in G.units})
