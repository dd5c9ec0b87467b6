"""Exact rational linear algebra over systems of affine linear forms.

Forms are affine maps Z^d -> Z written as coefficient vectors plus a
constant.  The module builds the three standard condition families,
measures the codimension of collision subvarieties, computes the
collision index L of a system, and enumerates low-codimension subspaces
for restricted-form counting.
"""

import itertools
import math
from dataclasses import dataclass
from fractions import Fraction

import numpy as np

from .errors import DomainError, ResourceError, UnsupportedError

INFINITE_CODIM = math.inf


@dataclass(frozen=True)
class LinearForm:
    """Affine form coeffs . x + constant with integer data."""

    coeffs: tuple
    constant: int = 0

    def __post_init__(self):
        object.__setattr__(self, "coeffs", tuple(int(c) for c in self.coeffs))
        object.__setattr__(self, "constant", int(self.constant))

    @property
    def dim(self):
        return len(self.coeffs)

    def evaluate(self, x):
        return sum(c * int(v) for c, v in zip(self.coeffs, x)) + self.constant

    def functional(self):
        """The form as a length d+1 integer vector (coeffs, constant)."""
        return self.coeffs + (self.constant,)


@dataclass(frozen=True)
class LinearSystem:
    """Ordered tuple of pairwise distinct affine forms in d variables."""

    d: int
    forms: tuple

    def __post_init__(self):
        forms = tuple(self.forms)
        object.__setattr__(self, "forms", forms)
        if len(forms) < 1:
            raise DomainError("a system needs at least one form")
        for f in forms:
            if f.dim != self.d:
                raise DomainError(
                    f"form {f} has {f.dim} variables, system has d={self.d}"
                )
        if len({(f.coeffs, f.constant) for f in forms}) != len(forms):
            raise DomainError("forms must be pairwise distinct")

    @property
    def t(self):
        return len(self.forms)


@dataclass(frozen=True)
class FormPartition:
    """Partition of the form indices {0, ..., t-1} into disjoint atoms."""

    atoms: tuple

    def __post_init__(self):
        canon = tuple(sorted(tuple(sorted(int(i) for i in a)) for a in self.atoms))
        object.__setattr__(self, "atoms", canon)
        flat = [i for a in canon for i in a]
        if len(flat) != len(set(flat)):
            raise DomainError("partition atoms must be disjoint")
        if not flat or set(flat) != set(range(len(flat))):
            raise DomainError("partition atoms must cover 0..t-1 exactly")

    @property
    def size(self):
        return len(self.atoms)

    @property
    def t(self):
        return sum(len(a) for a in self.atoms)


@dataclass(frozen=True)
class Subspace:
    """Affine subspace in reduced row echelon form over the rationals.

    Each row (a_1, ..., a_d, rhs) encodes the constraint a . x = rhs.
    The echelon form is canonical, so the rows tuple doubles as a
    deduplication key.
    """

    rows: tuple
    codim: int
    feasible: bool


def _rref(rows, width):
    """Reduced row echelon form over Fraction; detects infeasible rows.

    Returns (canonical rows, pivot columns, feasible).  A pivot in the
    last column means 0 = nonzero, i.e. an empty affine subspace.
    """
    mat = [[Fraction(v) for v in r] for r in rows]
    pivots = []
    r = 0
    for col in range(width):
        piv = None
        for i in range(r, len(mat)):
            if mat[i][col] != 0:
                piv = i
                break
        if piv is None:
            continue
        mat[r], mat[piv] = mat[piv], mat[r]
        inv = mat[r][col]
        mat[r] = [v / inv for v in mat[r]]
        for i in range(len(mat)):
            if i != r and mat[i][col] != 0:
                factor = mat[i][col]
                mat[i] = [a - factor * b for a, b in zip(mat[i], mat[r])]
        pivots.append(col)
        r += 1
    feasible = not (pivots and pivots[-1] == width - 1)
    canon = tuple(tuple(row) for row in mat[:r])
    return canon, tuple(pivots), feasible


def _constraint_rows(sys, pi):
    """Within-atom difference constraints a . x = rhs for a partition."""
    rows = []
    for atom in pi.atoms:
        anchor = sys.forms[atom[0]]
        for idx in atom[1:]:
            f = sys.forms[idx]
            a = tuple(ci - cj for ci, cj in zip(f.coeffs, anchor.coeffs))
            rhs = -(f.constant - anchor.constant)
            rows.append(a + (rhs,))
    return rows


def subspace_of_partition(sys, pi):
    """Canonical Subspace cut out by equality within each atom of pi."""
    rows, pivots, feasible = _rref(_constraint_rows(sys, pi), sys.d + 1)
    return Subspace(rows=rows, codim=len(rows), feasible=feasible)


def codim_of_partition(sys, pi):
    """codim of the collision subvariety of pi; math.inf when empty."""
    if pi.t != sys.t:
        raise DomainError(
            f"partition covers {pi.t} forms, system has {sys.t}"
        )
    rows, pivots, feasible = _rref(_constraint_rows(sys, pi), sys.d + 1)
    return len(rows) if feasible else INFINITE_CODIM


def _functional_rows(subspace):
    """Rows of the subspace as vanishing functionals (a, -rhs) with pivots."""
    out = []
    for row in subspace.rows:
        func = row[:-1] + (-row[-1],)
        pivot = next(i for i, v in enumerate(func) if v != 0)
        out.append((func, pivot))
    return out


def induced_partition(sys, subspace):
    """Partition grouping forms that agree as functions on the subspace."""
    funcs = _functional_rows(subspace)
    groups = {}
    for idx, f in enumerate(sys.forms):
        residue = [Fraction(v) for v in f.functional()]
        for func, pivot in funcs:
            coef = residue[pivot]
            if coef != 0:
                residue = [a - coef * b for a, b in zip(residue, func)]
        groups.setdefault(tuple(residue), []).append(idx)
    return FormPartition(atoms=tuple(tuple(g) for g in groups.values()))


# ----------------------------------------------------------------- families

def psi_j(k, j):
    """The form sum over i of (j - i) s_i in k variables."""
    k = int(k)
    j = int(j)
    if k < 2:
        raise DomainError(f"k must be >= 2, got {k}")
    if not 1 <= j <= k:
        raise DomainError(f"j must be in [1, {k}], got {j}")
    return LinearForm(coeffs=tuple(j - i for i in range(1, k + 1)))


def first_family(k):
    """System of k 2^(k-1) forms in 2k variables built from psi_j.

    Variables are ordered s_1 .. s_k then the second copies s'_1 .. s'_k;
    each form applies psi_j with every choice of copy for the k-1 free
    variables.
    """
    k = int(k)
    if k < 2:
        raise DomainError(f"k must be >= 2, got {k}")
    forms = []
    for j in range(1, k + 1):
        others = [i for i in range(1, k + 1) if i != j]
        for omega in itertools.product((0, 1), repeat=k - 1):
            coeffs = [0] * (2 * k)
            for i, bit in zip(others, omega):
                coeffs[(i - 1) + bit * k] += j - i
            forms.append(LinearForm(coeffs=tuple(coeffs)))
    return LinearSystem(d=2 * k, forms=tuple(forms))


def second_family(k):
    """System of 2^k forms k! (s_1 + ... + s_k) with per-variable copies."""
    k = int(k)
    if k < 2:
        raise DomainError(f"k must be >= 2, got {k}")
    scale = math.factorial(k)
    forms = []
    for omega in itertools.product((0, 1), repeat=k):
        coeffs = [0] * (2 * k)
        for i, bit in enumerate(omega):
            coeffs[i + bit * k] = scale
        forms.append(LinearForm(coeffs=tuple(coeffs)))
    return LinearSystem(d=2 * k, forms=tuple(forms))


def third_family(k, j):
    """System of 2(k-1)+1 forms in 2 variables: zero plus (i-j) d_tau."""
    k = int(k)
    j = int(j)
    if k < 2:
        raise DomainError(f"k must be >= 2, got {k}")
    if not 1 <= j <= k:
        raise DomainError(f"j must be in [1, {k}], got {j}")
    forms = [LinearForm(coeffs=(0, 0))]
    for tau in (0, 1):
        for i in range(1, k + 1):
            if i == j:
                continue
            coeffs = [0, 0]
            coeffs[tau] = i - j
            forms.append(LinearForm(coeffs=tuple(coeffs)))
    return LinearSystem(d=2, forms=tuple(forms))


# ----------------------------------------------------------- collision index

@dataclass(frozen=True)
class LindexResult:
    """Collision index with the partition attaining it."""

    value: Fraction
    witness: object
    codim: int
    subspaces_explored: int


def _pair_generators(sys):
    """Deduplicated feasible codim-1 generators from pairwise differences."""
    seen = {}
    for i, j in itertools.combinations(range(sys.t), 2):
        fi, fj = sys.forms[i], sys.forms[j]
        a = tuple(ci - cj for ci, cj in zip(fi.coeffs, fj.coeffs))
        rhs = -(fi.constant - fj.constant)
        if all(v == 0 for v in a):
            continue
        rows, pivots, feasible = _rref([a + (rhs,)], sys.d + 1)
        seen[rows] = Subspace(rows=rows, codim=1, feasible=True)
    return list(seen.values())


def lindex(sys, max_subspaces=500000):
    """Collision index of the system with a maximizing partition.

    Searches the closure lattice generated by intersecting kernels of
    pairwise form differences.  For each subspace the induced partition
    (forms equal as functions there) is scored as
    (t - |pi|) / codim of the partition's own subvariety, and subspaces
    too deep to beat the best ratio are pruned.
    """
    t = sys.t
    if t < 2:
        raise DomainError(f"collision index needs t >= 2 forms, got t={t}")
    generators = _pair_generators(sys)
    best = Fraction(0)
    best_witness = None
    best_codim = 0
    seen = set()
    frontier = {}
    for g in generators:
        seen.add(g.rows)
        frontier[g.rows] = g
    explored = len(seen)

    def evaluate(subspace):
        nonlocal best, best_witness, best_codim
        pi = induced_partition(sys, subspace)
        if pi.size >= t:
            return
        c = codim_of_partition(sys, pi)
        if c is INFINITE_CODIM or c == 0:
            return
        ratio = Fraction(t - pi.size, c)
        if ratio > best:
            best = ratio
            best_witness = pi
            best_codim = c

    for g in generators:
        evaluate(g)
    while frontier:
        next_frontier = {}
        for rows, subspace in frontier.items():
            if best > 0 and Fraction(t - 1, subspace.codim + 1) <= best:
                continue
            for g in generators:
                new_rows, pivots, feasible = _rref(
                    list(rows) + list(g.rows), sys.d + 1
                )
                if not feasible or new_rows in seen:
                    continue
                codim = len(new_rows)
                if codim == subspace.codim:
                    continue
                seen.add(new_rows)
                explored += 1
                if explored > max_subspaces:
                    raise ResourceError(
                        f"closure lattice exceeded {max_subspaces} subspaces; "
                        "raise max_subspaces or cap the system size"
                    )
                child = Subspace(rows=new_rows, codim=codim, feasible=True)
                if best > 0 and Fraction(t - 1, codim) <= best:
                    evaluate(child)
                    continue
                evaluate(child)
                next_frontier[new_rows] = child
        frontier = next_frontier
    return LindexResult(value=best, witness=best_witness,
                        codim=best_codim, subspaces_explored=explored)


def iter_partitions(t):
    """All set partitions of {0, ..., t-1} as tuples of tuples."""
    def rec(elements):
        if not elements:
            yield []
            return
        first, rest = elements[0], elements[1:]
        for part in rec(rest):
            for i in range(len(part)):
                yield part[:i] + [[first] + part[i]] + part[i + 1:]
            yield [[first]] + part
    for part in rec(list(range(t))):
        yield tuple(tuple(sorted(a)) for a in part)


def lindex_bruteforce(sys):
    """Collision index by direct enumeration of all partitions (t <= 8)."""
    t = sys.t
    if t < 2:
        raise DomainError(f"collision index needs t >= 2 forms, got t={t}")
    if t > 8:
        raise UnsupportedError(
            f"brute force enumerates Bell({t}) partitions; limit is t=8"
        )
    best = Fraction(0)
    for atoms in iter_partitions(t):
        if len(atoms) >= t:
            continue
        pi = FormPartition(atoms=atoms)
        c = codim_of_partition(sys, pi)
        if c is INFINITE_CODIM or c == 0:
            continue
        ratio = Fraction(t - len(atoms), c)
        if ratio > best:
            best = ratio
    return best


# ------------------------------------------------- restricted form counting

@dataclass(frozen=True)
class MinDistinctResult:
    """Minimum number of distinct restricted forms with a witness subspace."""

    count: int
    witness: Subspace


def _int_reduce_step(mat, row):
    """Fraction-free quotient step: same injective map applied to all rows."""
    pivot = int(np.nonzero(row)[0][0])
    return row[pivot] * mat - np.outer(mat[:, pivot], row)


def _count_restricted(forms_mat, int_rows):
    mat = forms_mat.copy()
    for row in int_rows:
        mat = _int_reduce_step(mat, row)
    return len(np.unique(mat, axis=0))


def min_distinct_on_codim(sys, c):
    """Minimum count of distinct restricted forms over codim-c subspaces.

    Candidates are kernels of pairwise form differences (c = 1) and their
    pairwise intersections of codimension exactly 2 (c = 2): any collision
    on a subspace forces it inside some difference kernel, so these
    candidate sets realize the minima.
    """
    if c not in (1, 2):
        raise DomainError(f"codimension must be 1 or 2, got {c}")
    forms_mat = np.array([f.functional() for f in sys.forms], dtype=np.int64)
    hyper = {}
    for i, j in itertools.combinations(range(sys.t), 2):
        fi, fj = sys.forms[i], sys.forms[j]
        func = np.array(
            [a - b for a, b in zip(fi.functional(), fj.functional())],
            dtype=np.int64,
        )
        if not func[:-1].any():
            continue
        g = int(np.gcd.reduce(np.abs(func[func != 0])))
        func //= g
        lead = func[np.nonzero(func)[0][0]]
        if lead < 0:
            func = -func
        hyper[tuple(func.tolist())] = func
    if not hyper:
        raise DomainError("system has no feasible codim-1 collision subspaces")
    candidates = []
    if c == 1:
        for func in hyper.values():
            candidates.append([func])
    else:
        funcs = list(hyper.values())
        seen = set()
        for r1, r2 in itertools.combinations(funcs, 2):
            p1 = int(np.nonzero(r1)[0][0])
            r2p = r1[p1] * r2 - r2[p1] * r1
            if not r2p[:-1].any():
                continue
            rows, pivots, feasible = _rref(
                [tuple(r1.tolist()), tuple(r2.tolist())], sys.d + 1
            )
            if not feasible or len(rows) != 2 or rows in seen:
                continue
            seen.add(rows)
            g = int(np.gcd.reduce(np.abs(r2p[r2p != 0])))
            candidates.append([r1, r2p // g])
    best_count = None
    best_rows = None
    for rows in candidates:
        count = _count_restricted(forms_mat, rows)
        if best_count is None or count < best_count:
            best_count = count
            best_rows = rows
    canon, pivots, feasible = _rref(
        [tuple(np.asarray(r).tolist()) for r in best_rows], sys.d + 1
    )
    witness = Subspace(rows=canon, codim=len(canon), feasible=True)
    return MinDistinctResult(count=best_count, witness=witness)


# ----------------------------------------------------------- integer lattice

@dataclass(frozen=True)
class SolutionLattice:
    """Integer basis of the solutions of the within-atom difference system."""

    basis: np.ndarray
    dimension: int
    gram_det: int
    covolume: float


def _integer_kernel(rows, d):
    """Lattice basis of {x in Z^d : A x = 0} via unimodular column reduction."""
    mat = [list(map(int, r)) for r in rows]
    u = [[1 if i == j else 0 for j in range(d)] for i in range(d)]
    active = list(range(d))
    for r in range(len(mat)):
        live = [c for c in active if mat[r][c] != 0]
        while len(live) > 1:
            live.sort(key=lambda c: abs(mat[r][c]))
            c1 = live[0]
            for c2 in live[1:]:
                q = mat[r][c2] // mat[r][c1]
                if q:
                    for rr in range(len(mat)):
                        mat[rr][c2] -= q * mat[rr][c1]
                    for rr in range(d):
                        u[rr][c2] -= q * u[rr][c1]
            live = [c for c in active if mat[r][c] != 0]
        if live:
            active.remove(live[0])
    basis = [[u[i][c] for i in range(d)] for c in active]
    return basis


def _int_det(mat):
    """Exact determinant of a small integer matrix (Bareiss elimination)."""
    n = len(mat)
    if n == 0:
        return 1
    m = [row[:] for row in mat]
    sign = 1
    prev = 1
    for k in range(n - 1):
        if m[k][k] == 0:
            swap = next((i for i in range(k + 1, n) if m[i][k] != 0), None)
            if swap is None:
                return 0
            m[k], m[swap] = m[swap], m[k]
            sign = -sign
        for i in range(k + 1, n):
            for j in range(k + 1, n):
                m[i][j] = (m[i][j] * m[k][k] - m[i][k] * m[k][j]) // prev
        prev = m[k][k]
    return sign * m[-1][-1]


def solution_lattice(sys, pi):
    """Integer lattice of points where all within-atom differences vanish.

    The constant parts must be consistent (a partition with contradictory
    affine constraints has no solutions and is rejected); the lattice
    itself is the kernel of the homogeneous difference system.
    """
    if pi.t != sys.t:
        raise DomainError(f"partition covers {pi.t} forms, system has {sys.t}")
    rows = _constraint_rows(sys, pi)
    canon, pivots, feasible = _rref(rows, sys.d + 1)
    if not feasible:
        raise DomainError("partition forces an inconsistent affine constraint")
    hom = [r[:-1] for r in rows]
    basis = _integer_kernel(hom, sys.d)
    m = len(basis)
    gram = [[sum(a * b for a, b in zip(u, v)) for v in basis] for u in basis]
    gdet = _int_det(gram)
    arr = np.array(basis, dtype=np.int64).reshape(m, sys.d)
    return SolutionLattice(basis=arr, dimension=m, gram_det=gdet,
                           covolume=math.sqrt(float(gdet)))


# ------------------------------------------------------------- interchange

def format_system(sys):
    """Text interchange format, one form per line: "c0; c1 c2 ... cd"."""
    lines = []
    for f in sys.forms:
        lines.append(f"{f.constant}; " + " ".join(str(c) for c in f.coeffs))
    return "\n".join(lines) + "\n"


def parse_system(text):
    """Parse the interchange format produced by format_system."""
    forms = []
    d = None
    for lineno, raw in enumerate(text.splitlines(), start=1):
        line = raw.strip()
        if not line or line.startswith("#"):
            continue
        if ";" not in line:
            raise DomainError(f"line {lineno}: missing ';' separator")
        head, _, tail = line.partition(";")
        try:
            constant = int(head.strip())
            coeffs = tuple(int(v) for v in tail.split())
        except ValueError:
            raise DomainError(f"line {lineno}: non-integer entry") from None
        if d is None:
            d = len(coeffs)
        elif len(coeffs) != d:
            raise DomainError(
                f"line {lineno}: expected {d} coefficients, got {len(coeffs)}"
            )
        forms.append(LinearForm(coeffs=coeffs, constant=constant))
    if not forms:
        raise DomainError("no forms found in system text")
    return LinearSystem(d=d, forms=tuple(forms))
