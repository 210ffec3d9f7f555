"""Exact integer matrix normal forms: row HNF with pre-multiplier, column HNF
for lattice/ideal bases, Smith normal form, and kernels.

Matrices are lists of lists of Python ints (arbitrary precision).  Sizes here
are desk scale (a few hundred rows at most); entry growth is kept in check by
always pivoting on the smallest remaining entry.
"""

from dataclasses import dataclass

from .errors import RankDeficient


def identity(n):
    return [[1 if i == j else 0 for j in range(n)] for i in range(n)]


def mat_mul(A, B):
    rb = len(B)
    cb = len(B[0]) if B else 0
    return [[sum(A[i][k] * B[k][j] for k in range(rb)) for j in range(cb)]
            for i in range(len(A))]


def _row_sub(H, U, i, j, q):
    """H[i] -= q*H[j], mirrored on U."""
    if q == 0:
        return
    Hi, Hj = H[i], H[j]
    for t in range(len(Hi)):
        Hi[t] -= q * Hj[t]
    if U is not None:
        Ui, Uj = U[i], U[j]
        for t in range(len(Ui)):
            Ui[t] -= q * Uj[t]


def hnf_with_transform(M):
    """Row Hermite normal form H = U*M with U unimodular.

    H has positive pivots in column order, entries above each pivot reduced
    into [0, pivot), and zero rows collected at the bottom.  The determinant
    of U is tracked through the elementary operations and asserted +-1.
    """
    r = len(M)
    c = len(M[0]) if r else 0
    H = [[int(x) for x in row] for row in M]
    U = identity(r)
    det_u = 1
    pivot_row = 0
    for col in range(c):
        rows = [i for i in range(pivot_row, r) if H[i][col] != 0]
        if not rows:
            continue
        while len(rows) > 1:
            rows.sort(key=lambda i: abs(H[i][col]))
            i0 = rows[0]
            a = H[i0][col]
            for i in rows[1:]:
                _row_sub(H, U, i, i0, H[i][col] // a)
            rows = [i for i in rows if H[i][col] != 0]
        i0 = rows[0]
        if i0 != pivot_row:
            H[i0], H[pivot_row] = H[pivot_row], H[i0]
            U[i0], U[pivot_row] = U[pivot_row], U[i0]
            det_u = -det_u
        if H[pivot_row][col] < 0:
            H[pivot_row] = [-x for x in H[pivot_row]]
            U[pivot_row] = [-x for x in U[pivot_row]]
            det_u = -det_u
        p = H[pivot_row][col]
        for i in range(pivot_row):
            _row_sub(H, U, i, pivot_row, H[i][col] // p)
        pivot_row += 1
    assert det_u in (1, -1)
    return H, U


def left_kernel(M):
    """Basis of {v integer row : v*M = 0}, from the zero rows of the HNF."""
    H, U = hnf_with_transform(M)
    out = []
    for h, u in zip(H, U):
        if all(x == 0 for x in h):
            out.append(u)
    return out


def rank(M):
    H, _ = hnf_with_transform(M)
    return sum(1 for row in H if any(x != 0 for x in row))


def column_hnf(cols, n):
    """Upper-triangular column HNF of the lattice spanned by `cols` in Z^n.

    Returns n columns with col j supported on rows 0..j, positive diagonal,
    and 0 <= H[i][j] < H[i][i] for j > i.  Raises RankDeficient if the
    columns do not span a rank-n lattice.
    """
    work = [list(cv) for cv in cols]
    result = [None] * n
    for row in range(n - 1, -1, -1):
        active = [cv for cv in work if cv[row] != 0]
        rest = [cv for cv in work if cv[row] == 0]
        if not active:
            raise RankDeficient(f"no pivot for row {row}")
        while len(active) > 1:
            active.sort(key=lambda cv: abs(cv[row]))
            a = active[0]
            val = a[row]
            new_active = [a]
            for cv in active[1:]:
                q = cv[row] // val
                if q:
                    for t in range(n):
                        cv[t] -= q * a[t]
                if cv[row] != 0:
                    new_active.append(cv)
                else:
                    rest.append(cv)  # still carries data in rows < row
            active = new_active
        piv = active[0]
        if piv[row] < 0:
            piv = [-x for x in piv]
        assert all(piv[t] == 0 for t in range(row + 1, n))
        result[row] = piv
        work = rest
    # normalize off-diagonal entries: 0 <= H[i][j] < H[i][i] for j > i
    for j in range(1, n):
        cj = result[j]
        for i in range(j - 1, -1, -1):
            ci = result[i]
            q = cj[i] // ci[i]
            if q:
                for t in range(n):
                    cj[t] -= q * ci[t]
    return result


def smith_normal_form(M):
    """Diagonal entries d_1 | d_2 | ... of the Smith normal form (all, may
    include zeros for rank-deficient input)."""
    a = [[int(x) for x in row] for row in M]
    r = len(a)
    c = len(a[0]) if r else 0
    m = min(r, c)
    diag = []
    top = 0
    while top < m:
        # move the smallest nonzero entry of the block to (top, top); every
        # re-selection follows a strict decrease of that minimum, so the
        # loops below terminate
        piv = None
        best = None
        for i in range(top, r):
            for j in range(top, c):
                if a[i][j] != 0 and (best is None or abs(a[i][j]) < best):
                    piv, best = (i, j), abs(a[i][j])
        if piv is None:
            break
        i0, j0 = piv
        a[top], a[i0] = a[i0], a[top]
        for row in a:
            row[top], row[j0] = row[j0], row[top]
        p = a[top][top]
        clean = True
        for i in range(top + 1, r):
            if a[i][top] != 0:
                q = a[i][top] // p
                for t in range(c):
                    a[i][t] -= q * a[top][t]
                if a[i][top] != 0:
                    clean = False
        if not clean:
            continue
        for j in range(top + 1, c):
            if a[top][j] != 0:
                q = a[top][j] // p
                for i in range(r):
                    a[i][j] -= q * a[i][top]
                if a[top][j] != 0:
                    clean = False
        if not clean:
            continue
        d = abs(p)
        # divisibility: d must divide the rest of the block, else fold a bad
        # row into row `top` and redo this pivot
        bad = None
        for i in range(top + 1, r):
            for j in range(top + 1, c):
                if a[i][j] % d != 0:
                    bad = i
                    break
            if bad is not None:
                break
        if bad is not None:
            for t in range(c):
                a[top][t] += a[bad][t]
            continue
        diag.append(d)
        top += 1
    while len(diag) < m:
        diag.append(0)
    return diag


@dataclass(frozen=True)
class GroupStructure:
    """Finite abelian group invariants: d_1 | d_2 | ... (nontrivial only)."""
    elementary_divisors: tuple
    class_number: int

    def as_dict(self):
        return {"divisors": [str(d) for d in self.elementary_divisors],
                "class_number": str(self.class_number)}


def snf(M):
    """GroupStructure of coker(M) restricted to its torsion part."""
    diag = [d for d in smith_normal_form(M) if d != 0]
    divisors = tuple(d for d in diag if d != 1)
    h = 1
    for d in divisors:
        h *= d
    return GroupStructure(divisors, h)


def class_group_from_relations(R):
    """Group structure of Z^N modulo the row lattice of a relation matrix.

    Columns never touched by a relation are dropped; this is only legitimate
    for primes above the Bach bound, which is checked here.  Raises
    RankDeficient when the surviving columns are not of full rank (the caller
    must collect more relations).
    """
    ncols = len(R.columns)
    used = [False] * ncols
    rows = []
    for rel in R.rows:
        for idx in rel.exponents:
            used[idx] = True
    keep = [j for j in range(ncols) if used[j]]
    for j in range(ncols):
        if not used[j] and R.columns[j].norm <= R.bach_bound:
            raise RankDeficient(
                f"prime of norm {R.columns[j].norm} below the Bach bound "
                f"{R.bach_bound} appears in no relation")
    pos = {j: t for t, j in enumerate(keep)}
    for rel in R.rows:
        row = [0] * len(keep)
        for idx, e in rel.exponents.items():
            row[pos[idx]] = e
        rows.append(row)
    if not rows:
        raise RankDeficient("no relations")
    H, _ = hnf_with_transform(rows)
    nonzero = [row for row in H if any(x != 0 for x in row)]
    if len(nonzero) < len(keep):
        raise RankDeficient(
            f"relation lattice has rank {len(nonzero)} < {len(keep)}")
    h = 1
    for j in range(len(keep)):
        h *= nonzero[j][j]
    struct = snf(nonzero)
    assert struct.class_number == h
    return struct
