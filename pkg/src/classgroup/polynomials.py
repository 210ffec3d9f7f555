"""Exact univariate polynomial arithmetic over Z, Q and F_p.

Coefficient lists are stored constant-term first and kept normalized (no
trailing zeros, the zero polynomial is []).  Everything here is exact: big
integers, fractions.Fraction and integers mod p.  Sizes are desk scale
(degrees below ~50), so the quadratic algorithms are fine.
"""

import random
from fractions import Fraction

from .errors import Reducible


def normalize(c):
    c = list(c)
    while c and c[-1] == 0:
        c.pop()
    return c


def degree(c):
    return len(c) - 1


def add(a, b):
    n = max(len(a), len(b))
    return normalize([(a[i] if i < len(a) else 0) + (b[i] if i < len(b) else 0)
                      for i in range(n)])


def neg(a):
    return [-x for x in a]


def sub(a, b):
    return add(a, neg(b))


def mul(a, b):
    if not a or not b:
        return []
    out = [0] * (len(a) + len(b) - 1)
    for i, x in enumerate(a):
        if x == 0:
            continue
        for j, y in enumerate(b):
            out[i + j] += x * y
    return normalize(out)


def scale(a, s):
    return normalize([x * s for x in a])


def evaluate(a, x):
    acc = 0 * x if a else 0
    for c in reversed(a):
        acc = acc * x + c
    return acc


def derivative(a):
    return normalize([i * a[i] for i in range(1, len(a))])


def divmod_exact(a, b):
    """Polynomial division over a field (inputs may be int or Fraction)."""
    b = normalize(b)
    if not b:
        raise ZeroDivisionError("polynomial division by zero")
    a = [Fraction(x) for x in a]
    lead = Fraction(b[-1])
    q = [Fraction(0)] * max(0, len(a) - len(b) + 1)
    r = list(a)
    while len(r) >= len(b) and normalize(r):
        r = normalize(r)
        if len(r) < len(b):
            break
        k = len(r) - len(b)
        f = r[-1] / lead
        q[k] = f
        for i in range(len(b)):
            r[k + i] -= f * b[i]
        r.pop()
    return normalize(q), normalize(r)


def sylvester_resultant(f, g):
    """Resultant of two integer polynomials via Bareiss elimination."""
    f, g = normalize(f), normalize(g)
    if not f or not g:
        return 0
    m, n = degree(f), degree(g)
    if m == 0:
        return f[0] ** n
    if n == 0:
        return g[0] ** m
    size = m + n
    rows = []
    for i in range(n):
        row = [0] * size
        for j, c in enumerate(reversed(f)):
            row[i + j] = c
        rows.append(row)
    for i in range(m):
        row = [0] * size
        for j, c in enumerate(reversed(g)):
            row[i + j] = c
        rows.append(row)
    return bareiss_det(rows)


def bareiss_det(mat):
    """Exact determinant of an integer matrix (fraction-free Bareiss)."""
    a = [row[:] for row in mat]
    n = len(a)
    if n == 0:
        return 1
    sign = 1
    prev = 1
    for k in range(n - 1):
        if a[k][k] == 0:
            for i in range(k + 1, n):
                if a[i][k] != 0:
                    a[k], a[i] = a[i], a[k]
                    sign = -sign
                    break
            else:
                return 0
        for i in range(k + 1, n):
            for j in range(k + 1, n):
                a[i][j] = (a[i][j] * a[k][k] - a[i][k] * a[k][j]) // prev
        prev = a[k][k]
    return sign * a[n - 1][n - 1]


def discriminant(T):
    """Discriminant of a monic integer polynomial."""
    n = degree(T)
    res = sylvester_resultant(T, derivative(T))
    s = -1 if (n * (n - 1) // 2) % 2 else 1
    return s * res


# ---------------------------------------------------------------------------
# Irreducibility over Q (monic integer input)

def _divisors(n):
    n = abs(n)
    small, large = [], []
    d = 1
    while d * d <= n:
        if n % d == 0:
            small.append(d)
            if d != n // d:
                large.append(n // d)
        d += 1
    return small + large[::-1]


def rational_root(T):
    """An integer root of a monic integer polynomial, or None."""
    if not T or T[0] == 0:
        return 0
    for d in _divisors(T[0]):
        for r in (d, -d):
            if evaluate(T, r) == 0:
                return r
    return None


def _quadratic_factor(T):
    """A monic quadratic integer factor x^2 + a*x + b of T, or None.

    b must divide T(0) and |a| <= 2*C for the Cauchy root bound C, so the
    search is exhaustive for desk-scale coefficients.
    """
    n = degree(T)
    if n < 4:
        return None
    if T[0] == 0:
        return [0, 0, 1]
    cauchy = 1 + max(abs(c) for c in T[:-1])
    abound = 2 * cauchy + 1
    for b in _divisors(T[0]):
        for bs in (b, -b):
            for a in range(-abound, abound + 1):
                q, r = divmod_exact(T, [bs, a, 1])
                if not r and all(x.denominator == 1 for x in q):
                    return [bs, a, 1]
    return None


def _subset_sums(degrees):
    sums = {0}
    for d in degrees:
        sums |= {s + d for s in sums}
    return sums


def check_irreducible(T, trials=25):
    """Raise Reducible if T is provably reducible over Q.

    Screen: rational roots, then factorization degree patterns modulo several
    good primes (a degree pattern proof of irreducibility is rigorous), then a
    quadratic-factor search which settles every degree up to 5.  For larger
    degrees an inconclusive screen is accepted.
    """
    n = degree(T)
    if n <= 1:
        return
    if rational_root(T) is not None:
        raise Reducible(f"polynomial has rational root")
    disc = discriminant(T)
    if disc == 0:
        raise Reducible("polynomial has repeated roots")
    possible = set(range(1, n))
    p = 2
    tried = 0
    while tried < trials and possible:
        if disc % p != 0:
            tried += 1
            degs = [degree(g) * e for g, e in factor_mod_p(T, p)]
            sums = _subset_sums(degs)
            possible &= sums
            if not possible:
                return  # modular degree patterns rule out proper factors
        p = next_prime(p)
    if {1} & possible:
        pass  # already excluded by the rational-root test above
    if {2} & possible or n <= 5:
        if _quadratic_factor(T) is not None:
            raise Reducible("polynomial has a quadratic factor")
        possible -= {2, n - 2}
    if n <= 5 and possible - {1, n - 1}:
        # degrees <= 5 are fully settled by root + quadratic searches
        possible = set()
    # inconclusive for n >= 6 with surviving patterns: accept (screen contract)


# ---------------------------------------------------------------------------
# Real root isolation (Sturm sequences, exact rational arithmetic)

def sturm_chain(T):
    chain = [[Fraction(c) for c in normalize(T)]]
    chain.append([Fraction(c) for c in derivative(T)])
    while normalize(chain[-1]) and degree(normalize(chain[-1])) > 0:
        _, r = divmod_exact(chain[-2], chain[-1])
        if not r:
            break
        chain.append(neg(r))
    return [normalize(c) for c in chain if normalize(c)]


def _sign_changes(chain, x):
    signs = []
    for c in chain:
        v = evaluate(c, x)
        if v != 0:
            signs.append(1 if v > 0 else -1)
    return sum(1 for a, b in zip(signs, signs[1:]) if a != b)


def count_real_roots(T):
    bound = cauchy_bound(T)
    chain = sturm_chain(T)
    return _sign_changes(chain, -bound) - _sign_changes(chain, bound)


def cauchy_bound(T):
    """All complex roots of monic T lie strictly within this rational bound."""
    lead = T[-1]
    return Fraction(1) + max(Fraction(abs(c), abs(lead)) for c in T[:-1]) if len(T) > 1 else Fraction(1)


def isolate_real_roots(T):
    """Disjoint rational intervals (lo, hi], one real root each, sorted
    increasingly.  T must be squarefree."""
    bound = cauchy_bound(T)
    chain = sturm_chain(T)

    def var(x):
        return _sign_changes(chain, x)

    out = []

    def split(lo, hi, nlo, nhi):
        k = nlo - nhi
        if k == 0:
            return
        if k == 1:
            out.append((lo, hi))
            return
        mid = (lo + hi) / 2
        while evaluate(T, mid) == 0:
            mid = (lo + mid) / 2
        nmid = var(mid)
        split(lo, mid, nlo, nmid)
        split(mid, hi, nmid, nhi)

    split(-bound, bound, var(-bound), var(bound))
    return sorted(out)


def refine_root(T, lo, hi, width):
    """Bisect an isolating interval of squarefree T until hi - lo <= width."""
    flo = evaluate(T, lo)
    if flo == 0:
        return lo, lo
    sgn_lo = 1 if flo > 0 else -1
    while hi - lo > width:
        mid = (lo + hi) / 2
        fm = evaluate(T, mid)
        if fm == 0:
            eps = width / 4
            return mid - eps, mid + eps
        if (1 if fm > 0 else -1) == sgn_lo:
            lo = mid
        else:
            hi = mid
    return lo, hi


# ---------------------------------------------------------------------------
# Arithmetic and factorization over F_p

def pmod(c, p):
    return normalize([x % p for x in c])


def pmod_mul(a, b, p):
    if not a or not b:
        return []
    out = [0] * (len(a) + len(b) - 1)
    for i, x in enumerate(a):
        if x:
            for j, y in enumerate(b):
                out[i + j] = (out[i + j] + x * y) % p
    return normalize(out)


def pmod_divmod(a, b, p):
    b = normalize(b)
    inv = pow(b[-1], -1, p)
    r = list(a)
    q = [0] * max(0, len(a) - len(b) + 1)
    while len(r) >= len(b):
        r = normalize(r)
        if len(r) < len(b):
            break
        k = len(r) - len(b)
        f = (r[-1] * inv) % p
        q[k] = f
        for i in range(len(b)):
            r[k + i] = (r[k + i] - f * b[i]) % p
        r.pop()
    return normalize(q), normalize(r)


def pmod_gcd(a, b, p):
    a, b = pmod(a, p), pmod(b, p)
    while b:
        _, r = pmod_divmod(a, b, p)
        a, b = b, r
    if a:
        inv = pow(a[-1], -1, p)
        a = [(x * inv) % p for x in a]
    return a


def pmod_pow(base, e, mod, p):
    result = [1]
    base = pmod_divmod(base, mod, p)[1]
    while e:
        if e & 1:
            result = pmod_divmod(pmod_mul(result, base, p), mod, p)[1]
        base = pmod_divmod(pmod_mul(base, base, p), mod, p)[1]
        e >>= 1
    return result


def _sqf_decomp_modp(f, p):
    """[(g, m)] with f = prod g^m, each g squarefree, pairwise coprime."""
    f = pmod(f, p)
    if degree(f) <= 0:
        return []
    df = pmod(derivative(f), p)
    if not df:
        # f = g(x^p) = g(x)^p over F_p
        g = normalize([f[i] for i in range(0, len(f), p)])
        return [(h, m * p) for h, m in _sqf_decomp_modp(g, p)]
    out = []
    g = pmod_gcd(f, df, p)
    w = pmod_divmod(f, g, p)[0]
    i = 1
    while normalize(w) != [1]:
        y = pmod_gcd(w, g, p)
        z = pmod_divmod(w, y, p)[0]
        if normalize(z) != [1]:
            out.append((z, i))
        w = y
        g = pmod_divmod(g, y, p)[0]
        i += 1
    if normalize(g) != [1]:
        h = normalize([g[i] for i in range(0, len(g), p)])
        out.extend((q, m * p) for q, m in _sqf_decomp_modp(h, p))
    return out


def _ddf(f, p):
    """Distinct-degree factorization of squarefree monic f: [(product, d)]."""
    out = []
    h = [0, 1]  # x
    v = list(f)
    d = 0
    while degree(v) > 0:
        d += 1
        if 2 * d > degree(v):
            out.append((v, degree(v)))
            break
        h = pmod_pow(h, p, v, p)
        g = pmod_gcd(sub(h, [0, 1]), v, p)
        if degree(g) > 0:
            out.append((g, d))
            v = pmod_divmod(v, g, p)[0]
            h = pmod_divmod(h, v, p)[1]
    return out


def _edf(f, d, p, rng):
    """Cantor-Zassenhaus equal-degree split of squarefree f into degree-d
    irreducible factors."""
    n = degree(f)
    if n == d:
        return [f]
    while True:
        a = [rng.randrange(p) for _ in range(n)]
        a = normalize(a)
        if degree(a) < 1:
            continue
        if p == 2:
            # trace map: a + a^2 + a^4 + ... (2^(d-1) terms)
            t = list(a)
            acc = list(a)
            for _ in range(d - 1):
                acc = pmod_pow(acc, 2, f, p)
                t = pmod(add(t, acc), p)
            g = pmod_gcd(t, f, p)
        else:
            e = (p ** d - 1) // 2
            b = pmod_pow(a, e, f, p)
            g = pmod_gcd(sub(b, [1]), f, p)
        if 0 < degree(g) < n:
            left = _edf(g, d, p, rng)
            right = _edf(pmod_divmod(f, g, p)[0], d, p, rng)
            return left + right


def factor_mod_p(T, p):
    """Factor a monic integer polynomial modulo p.

    Returns [(g, e)] with g monic irreducible over F_p, sorted by (degree,
    coefficients), and prod g^e = T mod p.  Deterministic: the splitting RNG
    is seeded from (p, T).
    """
    f = pmod(T, p)
    if degree(f) != degree(T):
        raise ValueError("leading coefficient vanishes mod p (input not monic?)")
    rng = random.Random((p, tuple(f)).__repr__())
    factors = []
    for g, mult in _sqf_decomp_modp(f, p):
        for part, d in _ddf(g, p):
            for irr in _edf(part, d, p, rng):
                factors.append((irr, mult))
    factors.sort(key=lambda t: (degree(t[0]), t[0]))
    total = sum(degree(g) * e for g, e in factors)
    assert total == degree(T), "lost factors mod p"
    return factors


# ---------------------------------------------------------------------------
# Primes

def is_prime(n):
    """Deterministic Miller-Rabin for 64-bit-ish inputs."""
    if n < 2:
        return False
    for p in (2, 3, 5, 7, 11, 13, 17, 19, 23, 29, 31, 37):
        if n % p == 0:
            return n == p
    d = n - 1
    r = 0
    while d % 2 == 0:
        d //= 2
        r += 1
    for a in (2, 3, 5, 7, 11, 13, 17, 19, 23, 29, 31, 37):
        x = pow(a, d, n)
        if x in (1, n - 1):
            continue
        for _ in range(r - 1):
            x = x * x % n
            if x == n - 1:
                break
        else:
            return False
    return True


def next_prime(n):
    n += 1
    while not is_prime(n):
        n += 1
    return n


def primes_up_to(n):
    """All primes <= n by sieve."""
    if n < 2:
        return []
    flags = bytearray([1]) * (n + 1)
    flags[0] = flags[1] = 0
    i = 2
    while i * i <= n:
        if flags[i]:
            flags[i * i:n + 1:i] = bytearray(len(range(i * i, n + 1, i)))
        i += 1
    return [i for i in range(2, n + 1) if flags[i]]
