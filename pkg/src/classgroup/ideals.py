"""Prime ideals, ideal arithmetic in HNF representation, factor bases and
ideal smoothness tests.

Ideals are stored as full column-HNF Z-bases over the field's integral basis,
so products, norms, memberships and exact divisions are deterministic integer
linear algebra.  The prime ideals above p come from factoring the defining
polynomial mod p (valid since primes dividing the index are rejected); the
inverse-complement p*P^(-1) used for exact division is built from the mod-p
kernel of the multiplication matrix of the second generator, with its norm
asserted, so no splitting-theory edge case can silently corrupt a division.
"""

import json
import logging
import math
from dataclasses import dataclass

from . import polynomials as poly
from .errors import EmptyFactorBase, IndexDivisor
from .intlinalg import column_hnf
from .lattice import LatticeBasis, lattice_member
from .smoothness import smooth_part

logger = logging.getLogger(__name__)


@dataclass(frozen=True)
class Ideal:
    """Integral ideal: columns of hnf_basis are a Z-basis over the integral
    basis, in upper-triangular column HNF; norm equals the determinant."""
    hnf_basis: tuple  # tuple of column tuples
    norm: int

    def columns(self):
        return [list(c) for c in self.hnf_basis]

    def __eq__(self, other):
        return isinstance(other, Ideal) and self.hnf_basis == other.hnf_basis

    def __hash__(self):
        return hash(self.hnf_basis)


@dataclass(frozen=True)
class PrimeIdeal:
    p: int
    gen_poly: tuple  # second generator as a poly in theta, coeffs mod p
    ram_e: int
    res_f: int
    norm: int
    hnf_basis: tuple
    inv_basis: tuple  # HNF basis of p * P^(-1), for exact division

    def as_ideal(self):
        return Ideal(self.hnf_basis, self.norm)

    def __repr__(self):
        return f"PrimeIdeal(p={self.p}, e={self.ram_e}, f={self.res_f})"


def _hnf_ideal(cols, field):
    n = field.degree
    h = column_hnf(cols, n)
    norm = 1
    for j in range(n):
        norm *= h[j][j]
    return Ideal(tuple(tuple(c) for c in h), norm)


def unit_ideal(field):
    n = field.degree
    cols = [[1 if i == j else 0 for i in range(n)] for j in range(n)]
    return Ideal(tuple(tuple(c) for c in cols), 1)


def _element_of_gen_poly(gen_poly, field):
    """g(theta) as an AlgebraicNumber (g reduced mod T first; an inert prime
    has deg g = n and g(theta) lands in pO)."""
    n = field.degree
    _, rem = poly.divmod_exact([int(c) for c in gen_poly], list(field.poly))
    pb = list(rem) + [0] * (n - len(rem))
    coords = field._power_to_basis(pb[:n])
    x = field.element(coords)
    assert x.is_integral
    return x


def _mult_matrix_columns(x):
    """Integer columns x*omega_j over the integral basis."""
    m = x.mult_matrix()
    n = len(m)
    cols = []
    for j in range(n):
        col = []
        for i in range(n):
            v = m[i][j]
            assert v.denominator == 1
            col.append(v.numerator)
        cols.append(col)
    return cols


def ideal_from_element(x):
    """Principal ideal <x> for integral x; norm = |N(x)| (asserted)."""
    assert x.is_integral and not x.is_zero
    field = x.field
    ideal = _hnf_ideal(_mult_matrix_columns(x), field)
    nx = x.norm()
    assert ideal.norm == abs(nx), "HNF determinant must equal |N(x)|"
    return ideal


def ideal_mul(a, b, field):
    cols = []
    acols = a.columns()
    bcols = b.columns()
    aelts = [field.element(c) for c in acols]
    belts = [field.element(c) for c in bcols]
    for x in aelts:
        for y in belts:
            prod = x * y
            cols.append([c.numerator for c in prod.coords])
    out = _hnf_ideal(cols, field)
    assert out.norm == a.norm * b.norm, "ideal norms must multiply"
    return out


def ideal_pow(a, e, field):
    out = unit_ideal(field)
    base = a
    while e:
        if e & 1:
            out = ideal_mul(out, base, field)
        base = ideal_mul(base, base, field)
        e >>= 1
    return out


def element_in_ideal(x, ideal):
    coords = [c.numerator if c.denominator == 1 else None for c in x.coords]
    if any(c is None for c in coords):
        return False
    basis = LatticeBasis([list(c) for c in ideal.hnf_basis])
    return lattice_member(basis, coords) is not None


def ideal_contained_in(a, b):
    """a subset of b, i.e. b divides a."""
    basis = LatticeBasis([list(c) for c in b.hnf_basis])
    return all(lattice_member(basis, list(col)) is not None for col in a.hnf_basis)


# ---------------------------------------------------------------------------
# Prime splitting

def _modp_kernel(mat, p):
    """Basis of the kernel of an n x n integer matrix over F_p."""
    n = len(mat)
    a = [[mat[i][j] % p for j in range(n)] for i in range(n)]
    piv_col_of_row = []
    pivots = {}
    r = 0
    for c in range(n):
        piv = None
        for i in range(r, n):
            if a[i][c] % p:
                piv = i
                break
        if piv is None:
            continue
        a[r], a[piv] = a[piv], a[r]
        inv = pow(a[r][c], -1, p)
        a[r] = [(v * inv) % p for v in a[r]]
        for i in range(n):
            if i != r and a[i][c]:
                f = a[i][c]
                a[i] = [(x - f * y) % p for x, y in zip(a[i], a[r])]
        pivots[c] = r
        r += 1
    free = [c for c in range(n) if c not in pivots]
    kernel = []
    for fc in free:
        v = [0] * n
        v[fc] = 1
        for c, row in pivots.items():
            v[c] = (-a[row][fc]) % p
        kernel.append(v)
    return kernel


def _prime_from_gen(p, gen_poly, e, f, field):
    n = field.degree
    g = _element_of_gen_poly(gen_poly, field)
    cols = [[p if i == j else 0 for i in range(n)] for j in range(n)]
    cols.extend(_mult_matrix_columns(g))
    ideal = _hnf_ideal(cols, field)
    assert ideal.norm == p ** f, \
        f"prime ideal above {p} has determinant {ideal.norm}, expected {p**f}"
    # p * P^(-1) = (pO : P) = { x in O : x*g in pO } + pO, via mod-p kernel
    kern = _modp_kernel(_int_rows(g.mult_matrix()), p)
    inv_cols = [[p if i == j else 0 for i in range(n)] for j in range(n)]
    inv_cols.extend([list(v) for v in kern])
    inv_ideal = _hnf_ideal(inv_cols, field)
    assert inv_ideal.norm == p ** (n - f), \
        "inverse complement has wrong norm (index divisor leaked through?)"
    return PrimeIdeal(p=p, gen_poly=tuple(int(c) % p for c in gen_poly),
                      ram_e=e, res_f=f, norm=p ** f,
                      hnf_basis=ideal.hnf_basis, inv_basis=inv_ideal.hnf_basis)


def _int_rows(frac_matrix):
    out = []
    for row in frac_matrix:
        r = []
        for v in row:
            assert v.denominator == 1
            r.append(v.numerator)
        out.append(r)
    return out


def factor_prime(p, field):
    """Prime ideals above p, from the factorization of T mod p.

    Requires p coprime to the index [O_K : Z[theta]] (IndexDivisor otherwise).
    """
    if field.index % p == 0:
        raise IndexDivisor(p)
    out = []
    for g, e in poly.factor_mod_p(list(field.poly), p):
        f = poly.degree(g)
        out.append(_prime_from_gen(p, g, e, f, field))
    assert sum(P.ram_e * P.res_f for P in out) == field.degree
    out.sort(key=lambda P: (P.norm, P.gen_poly))
    return out


def ideal_divide_prime(ideal, P, field):
    """Exact division ideal * P^(-1); P must divide ideal."""
    inv = Ideal(P.inv_basis, P.p ** (field.degree - P.res_f))
    prod = ideal_mul(ideal, inv, field)
    cols = []
    for col in prod.hnf_basis:
        assert all(v % P.p == 0 for v in col), "prime does not divide ideal"
        cols.append([v // P.p for v in col])
    out = _hnf_ideal(cols, field)
    assert out.norm * P.norm == ideal.norm
    return out


def valuation(target, P, field=None):
    """Exact P-adic valuation of an Ideal or integral AlgebraicNumber."""
    if hasattr(target, "coords"):
        field = target.field
        target = ideal_from_element(target)
    assert field is not None
    v = 0
    current = target
    pid = P.as_ideal()
    while ideal_contained_in(current, pid):
        current = ideal_divide_prime(current, P, field)
        v += 1
    return v


# ---------------------------------------------------------------------------
# Factor base

@dataclass
class FactorBase:
    bound: int
    primes: list  # PrimeIdeal, sorted by (norm, p, gen_poly)
    bach_bound: int
    bach_prefix: int

    @property
    def size(self):
        return len(self.primes)

    def primes_above(self, p):
        return [P for P in self.primes if P.p == p]

    def index_of(self, P):
        return self._index[(P.p, P.gen_poly)]

    def __post_init__(self):
        self._index = {(P.p, P.gen_poly): i for i, P in enumerate(self.primes)}

    def dump_jsonl(self, fh):
        for P in self.primes:
            fh.write(json.dumps({"p": P.p, "f": P.res_f, "e": P.ram_e,
                                 "norm": P.norm,
                                 "gen_poly": list(P.gen_poly)}) + "\n")


def bach_bound(field):
    """ceil(12 (log |disc|)^2), the ERH generating bound for the class group."""
    return math.ceil(12 * math.log(abs(field.discriminant)) ** 2)


def build_factor_base(field, B):
    """All prime ideals of norm <= B.  Advisory warning when the size strays
    more than 50% from the Landau estimate B/log B."""
    if B < 2:
        raise EmptyFactorBase(f"no prime ideal has norm <= {B}")
    primes = []
    for p in poly.primes_up_to(B):
        for P in factor_prime(p, field):
            if P.norm <= B:
                primes.append(P)
    if not primes:
        raise EmptyFactorBase(f"no prime ideal has norm <= {B}")
    primes.sort(key=lambda P: (P.norm, P.p, P.gen_poly))
    bb = bach_bound(field)
    prefix = sum(1 for P in primes if P.norm <= bb)
    fb = FactorBase(bound=B, primes=primes, bach_bound=bb, bach_prefix=prefix)
    if B >= 8:
        landau = B / math.log(B)
        if not 0.5 * landau <= fb.size <= 1.5 * landau:
            logger.warning("factor base size %d outside +-50%% of Landau "
                           "estimate %.1f for B=%d", fb.size, landau, B)
    return fb


def ideal_from_power_product(fb, indices, exponents, field):
    """prod fb.primes[i]^e; empty product is the unit ideal."""
    assert len(indices) == len(exponents)
    out = unit_ideal(field)
    for i, e in zip(indices, exponents):
        assert e >= 1
        out = ideal_mul(out, ideal_pow(fb.primes[i].as_ideal(), e, field), field)
    return out


# ---------------------------------------------------------------------------
# Smoothness of ideals

def is_smooth_ideal(ideal, fb, field):
    """Exponent dict {factor base index: valuation} if the ideal factors
    completely over fb, else None.  Reconstruction is verified exactly:
    prod norm(P)^e must equal N(ideal)."""
    N = ideal.norm
    if N == 1:
        return {}
    res = smooth_part(N, fb.bound)
    if res.cofactor != 1:
        return None
    exps = {}
    check = 1
    for p in res.smooth_part:
        if field.index % p == 0:
            raise IndexDivisor(p)
        for P in fb.primes_above(p):
            v = valuation(ideal, P, field)
            if v:
                exps[fb.index_of(P)] = v
                check *= P.norm ** v
    if check != N:
        return None  # a prime of norm > B over a smooth p divides the ideal
    return exps


# ---------------------------------------------------------------------------
# Ideal lattices

def ideal_lattice(ideal, field):
    """Scaled-integer basis of the canonical embedding of the ideal.

    Columns are round(2^prec * sigma(g_j)) for the HNF generators g_j; the
    scale is recorded in the result.  Gram determinant of the unrounded
    embedding satisfies det = |disc| * N(ideal)^2 (Lemma-level contract,
    asserted in the tests via interval arithmetic).
    """
    n = field.degree
    s = field.precision
    cols = []
    for col in ideal.hnf_basis:
        x = field.element(list(col))
        emb = field.canonical_embedding(x)
        icol = []
        for v in emb:
            icol.append(_round_scaled(v, s))
        cols.append(icol)
    return LatticeBasis(cols, scale_bits=s)


def _round_scaled(interval, s):
    from fractions import Fraction

    from .errors import PrecisionExhausted
    from .field import iv_endpoints
    lo, hi = iv_endpoints(interval)
    if (hi - lo) * (1 << s) >= Fraction(1, 4):
        raise PrecisionExhausted("interval too wide for the lattice scale")
    mid = (lo + hi) / 2 * (1 << s) + Fraction(1, 2)
    return mid.numerator // mid.denominator
