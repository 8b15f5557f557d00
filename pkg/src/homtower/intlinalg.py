"""Exact linear algebra over Z and over prime fields.

Everything here works with arbitrary-precision Python integers; there is no
fixed-width fast path, so torsion orders are never silently corrupted by
overflow.  Matrices are stored sparsely but behave like ordinary dense
integer matrices (out-of-range access is an error, never an implicit zero).

The Smith normal form routine uses a fixed pivot strategy: among the
remaining entries, pick one of minimal absolute value, breaking ties by
lowest row then lowest column.  This makes every decomposition reproducible
and keeps intermediate entries small on the incidence-like matrices that
dominate our workload.
"""

import math
import random
from fractions import Fraction


class IntegerMatrix:
    """An immutable rows x cols matrix of Python ints, stored sparsely."""

    __slots__ = ("rows", "cols", "_data")

    def __init__(self, rows, cols, entries=None):
        if rows < 0 or cols < 0:
            raise ValueError("matrix dimensions must be nonnegative")
        self.rows = rows
        self.cols = cols
        data = {}
        if entries:
            for (i, j), v in entries.items():
                if not (0 <= i < rows and 0 <= j < cols):
                    raise IndexError(f"entry ({i}, {j}) outside {rows}x{cols} matrix")
                v = int(v)
                if v:
                    data[i, j] = v
        self._data = data

    @classmethod
    def from_rows(cls, row_lists):
        rows = len(row_lists)
        cols = len(row_lists[0]) if rows else 0
        entries = {}
        for i, row in enumerate(row_lists):
            if len(row) != cols:
                raise ValueError(f"ragged rows: row {i} has {len(row)} entries, expected {cols}")
            for j, v in enumerate(row):
                if v:
                    entries[i, j] = int(v)
        return cls(rows, cols, entries)

    @classmethod
    def zeros(cls, rows, cols):
        return cls(rows, cols)

    @classmethod
    def identity(cls, n):
        return cls(n, n, {(i, i): 1 for i in range(n)})

    def entry(self, i, j):
        if not (0 <= i < self.rows and 0 <= j < self.cols):
            raise IndexError(f"entry ({i}, {j}) outside {self.rows}x{self.cols} matrix")
        return self._data.get((i, j), 0)

    def __getitem__(self, key):
        i, j = key
        return self.entry(i, j)

    def items(self):
        """Iterate over ((i, j), value) for the nonzero entries."""
        return self._data.items()

    def nnz(self):
        return len(self._data)

    def is_zero(self):
        return not self._data

    def to_rows(self):
        out = [[0] * self.cols for _ in range(self.rows)]
        for (i, j), v in self._data.items():
            out[i][j] = v
        return out

    def to_decimal_rows(self):
        """Row-major entries as decimal strings (text round-trips exactly)."""
        return [[str(v) for v in row] for row in self.to_rows()]

    @classmethod
    def from_decimal_rows(cls, rows):
        return cls.from_rows([[int(s) for s in row] for row in rows])

    def transpose(self):
        return IntegerMatrix(self.cols, self.rows,
                             {(j, i): v for (i, j), v in self._data.items()})

    def columns(self):
        """The nonzero entries grouped by column: list of dicts row -> value."""
        cols = [dict() for _ in range(self.cols)]
        for (i, j), v in self._data.items():
            cols[j][i] = v
        return cols

    def column_norm_sq(self, j):
        if not 0 <= j < self.cols:
            raise IndexError(f"column {j} outside {self.rows}x{self.cols} matrix")
        return sum(v * v for (i, jj), v in self._data.items() if jj == j)

    def hstack(self, other):
        if self.rows != other.rows:
            raise ValueError("hstack needs matching row counts")
        entries = dict(self._data)
        for (i, j), v in other._data.items():
            entries[i, j + self.cols] = v
        return IntegerMatrix(self.rows, self.cols + other.cols, entries)

    def __matmul__(self, other):
        if not isinstance(other, IntegerMatrix):
            return NotImplemented
        if self.cols != other.rows:
            raise ValueError(f"cannot multiply {self.rows}x{self.cols} by {other.rows}x{other.cols}")
        by_col = {}
        for (i, k), v in self._data.items():
            by_col.setdefault(k, []).append((i, v))
        acc = {}
        for (k, j), w in other._data.items():
            for i, v in by_col.get(k, ()):
                acc[i, j] = acc.get((i, j), 0) + v * w
        return IntegerMatrix(self.rows, other.cols, acc)

    def __neg__(self):
        return IntegerMatrix(self.rows, self.cols,
                             {k: -v for k, v in self._data.items()})

    def __eq__(self, other):
        if not isinstance(other, IntegerMatrix):
            return NotImplemented
        return (self.rows, self.cols) == (other.rows, other.cols) and self._data == other._data

    __hash__ = None

    def __repr__(self):
        if self.rows * self.cols <= 36:
            return f"IntegerMatrix.from_rows({self.to_rows()!r})"
        return f"<IntegerMatrix {self.rows}x{self.cols}, {len(self._data)} nonzero>"


class FgAbelianGroup:
    """A finitely generated abelian group Z^r (+) Z/t_1 (+) ... (+) Z/t_s.

    The torsion coefficients are invariant factors: each t_i >= 2 and
    t_1 | t_2 | ... | t_s, which makes equality of groups literal equality
    of the data.
    """

    __slots__ = ("free_rank", "torsion")

    def __init__(self, free_rank, torsion=()):
        torsion = tuple(int(t) for t in torsion)
        if free_rank < 0:
            raise ValueError("free rank must be nonnegative")
        for t in torsion:
            if t < 2:
                raise ValueError(f"torsion coefficient {t} < 2")
        for a, b in zip(torsion, torsion[1:]):
            if b % a != 0:
                raise ValueError(f"torsion coefficients {torsion} violate the divisibility chain")
        self.free_rank = free_rank
        self.torsion = torsion

    @property
    def torsion_order(self):
        return math.prod(self.torsion)

    @property
    def log_torsion(self):
        return sum(math.log(t) for t in self.torsion)

    def dim_mod_p(self, p):
        """dim over F_p of (this group) tensor F_p."""
        return self.free_rank + sum(1 for t in self.torsion if t % p == 0)

    def is_trivial(self):
        return self.free_rank == 0 and not self.torsion

    def __eq__(self, other):
        if not isinstance(other, FgAbelianGroup):
            return NotImplemented
        return self.free_rank == other.free_rank and self.torsion == other.torsion

    def __hash__(self):
        return hash((self.free_rank, self.torsion))

    def pretty(self):
        """Render as 'Z^r + Z/t1 + ...'; the trivial group is '0'."""
        parts = []
        if self.free_rank == 1:
            parts.append("Z")
        elif self.free_rank > 1:
            parts.append(f"Z^{self.free_rank}")
        parts.extend(f"Z/{t}" for t in self.torsion)
        return " + ".join(parts) if parts else "0"

    def __repr__(self):
        return f"FgAbelianGroup({self.free_rank}, {self.torsion!r})"


class SmithDecomposition:
    """Invariant factors of an integer matrix, with optional transforms.

    divisors are the positive diagonal entries d_1 | d_2 | ... | d_r of the
    Smith normal form; rank == len(divisors).  When transforms are kept,
    U @ A @ V equals the diagonal form and U, V are unimodular; the inverses
    are carried along because callers routinely need coordinates both ways.
    """

    __slots__ = ("divisors", "rows", "cols", "U", "V", "U_inv", "V_inv")

    def __init__(self, divisors, rows, cols, U=None, V=None, U_inv=None, V_inv=None):
        self.divisors = tuple(divisors)
        self.rows = rows
        self.cols = cols
        self.U = U
        self.V = V
        self.U_inv = U_inv
        self.V_inv = V_inv
        for a, b in zip(self.divisors, self.divisors[1:]):
            if a <= 0 or b % a != 0:
                raise ValueError(f"divisors {self.divisors} violate the divisibility chain")
        if self.divisors and self.divisors[-1] <= 0:
            raise ValueError("divisors must be positive")

    @property
    def rank(self):
        return len(self.divisors)

    def diagonal(self):
        return IntegerMatrix(self.rows, self.cols,
                             {(i, i): d for i, d in enumerate(self.divisors)})

    def nontrivial_divisors(self):
        return tuple(d for d in self.divisors if d > 1)


class _SmithWorker:
    """Mutable sparse matrix with mirrored row/column maps and, optionally,
    dense transform matrices kept in sync with every elementary operation."""

    __slots__ = ("m", "n", "row", "col", "keep", "U", "V", "U_inv", "V_inv")

    def __init__(self, matrix, keep):
        self.m = matrix.rows
        self.n = matrix.cols
        self.row = [dict() for _ in range(self.m)]
        self.col = [dict() for _ in range(self.n)]
        for (i, j), v in matrix.items():
            self.row[i][j] = v
            self.col[j][i] = v
        self.keep = keep
        if keep:
            self.U = _dense_identity(self.m)
            self.U_inv = _dense_identity(self.m)
            self.V = _dense_identity(self.n)
            self.V_inv = _dense_identity(self.n)

    def _set(self, i, j, v):
        if v:
            self.row[i][j] = v
            self.col[j][i] = v
        else:
            self.row[i].pop(j, None)
            self.col[j].pop(i, None)

    def row_add(self, i, t, q):
        # row_i += q * row_t
        for j, v in list(self.row[t].items()):
            self._set(i, j, self.row[i].get(j, 0) + q * v)
        if self.keep:
            U, U_inv = self.U, self.U_inv
            Ut = U[t]
            Ui = U[i]
            for j in range(self.m):
                Ui[j] += q * Ut[j]
            for r in range(self.m):
                U_inv[r][t] -= q * U_inv[r][i]

    def col_add(self, j, t, q):
        # col_j += q * col_t
        for i, v in list(self.col[t].items()):
            self._set(i, j, self.row[i].get(j, 0) + q * v)
        if self.keep:
            V, V_inv = self.V, self.V_inv
            for r in range(self.n):
                V[r][j] += q * V[r][t]
            Vt = V_inv[t]
            Vj = V_inv[j]
            for c in range(self.n):
                Vt[c] -= q * Vj[c]

    def row_swap(self, i, j):
        if i == j:
            return
        for jj in set(self.row[i]) | set(self.row[j]):
            a = self.row[i].get(jj, 0)
            b = self.row[j].get(jj, 0)
            self._set(i, jj, b)
            self._set(j, jj, a)
        if self.keep:
            self.U[i], self.U[j] = self.U[j], self.U[i]
            for r in range(self.m):
                row = self.U_inv[r]
                row[i], row[j] = row[j], row[i]

    def col_swap(self, i, j):
        if i == j:
            return
        for ii in set(self.col[i]) | set(self.col[j]):
            a = self.col[i].get(ii, 0)
            b = self.col[j].get(ii, 0)
            self._set(ii, i, b)
            self._set(ii, j, a)
        if self.keep:
            for r in range(self.n):
                row = self.V[r]
                row[i], row[j] = row[j], row[i]
            self.V_inv[i], self.V_inv[j] = self.V_inv[j], self.V_inv[i]

    def row_negate(self, i):
        for j in list(self.row[i]):
            self._set(i, j, -self.row[i][j])
        if self.keep:
            self.U[i] = [-v for v in self.U[i]]
            for r in range(self.m):
                self.U_inv[r][i] = -self.U_inv[r][i]

    def find_pivot(self, t):
        """Nonzero entry of minimal |value| with row >= t, col >= t;
        ties broken by lowest row, then lowest column."""
        best = None
        for i in range(t, self.m):
            for j, v in self.row[i].items():
                if j < t:
                    continue
                key = (abs(v), i, j)
                if best is None or key < best:
                    best = key
            if best is not None and best[0] == 1:
                break  # no later row can beat a +-1 already found
        if best is None:
            return None
        return best[1], best[2]

    def find_nondivisible(self, t, p):
        for i in range(t + 1, self.m):
            for j, v in self.row[i].items():
                if j > t and v % p != 0:
                    return i, j
        return None


def _dense_identity(n):
    rows = [[0] * n for _ in range(n)]
    for i in range(n):
        rows[i][i] = 1
    return rows


def smith_normal_form(matrix, keep_transforms=False):
    """Smith normal form of an integer matrix.

    Returns a SmithDecomposition whose divisors satisfy d_1 | d_2 | ... | d_r.
    With keep_transforms, unimodular U (rows x rows) and V (cols x cols) with
    U @ A @ V = diag(divisors) are returned together with their inverses.
    """
    w = _SmithWorker(matrix, keep_transforms)
    divisors = []
    t = 0
    limit = min(w.m, w.n)
    while t < limit:
        pos = w.find_pivot(t)
        if pos is None:
            break
        w.row_swap(t, pos[0])
        w.col_swap(t, pos[1])
        while True:
            if w.row[t][t] < 0:
                w.row_negate(t)
            p = w.row[t][t]
            # Clear column t; nonzero remainders shrink below |p| and one of
            # them becomes the next, strictly smaller pivot.
            for i in [i for i in w.col[t] if i != t]:
                v = w.col[t].get(i)
                if v is None:
                    continue
                q = v // p
                if q:
                    w.row_add(i, t, -q)
            rem = [i for i in w.col[t] if i != t]
            if rem:
                i = min(rem, key=lambda r: (abs(w.col[t][r]), r))
                w.row_swap(t, i)
                continue
            for j in [j for j in w.row[t] if j != t]:
                v = w.row[t].get(j)
                if v is None:
                    continue
                q = v // p
                if q:
                    w.col_add(j, t, -q)
            rem = [j for j in w.row[t] if j != t]
            if rem:
                j = min(rem, key=lambda c: (abs(w.row[t][c]), c))
                w.col_swap(t, j)
                continue
            # Row and column are clear; enforce that the pivot divides the
            # rest of the matrix, else fold the offending row in and retry.
            p = w.row[t][t]
            if p != 1:
                bad = w.find_nondivisible(t, p)
                if bad is not None:
                    w.row_add(t, bad[0], 1)
                    continue
            break
        divisors.append(w.row[t][t])
        t += 1
    if keep_transforms:
        U = IntegerMatrix.from_rows(w.U) if w.m else IntegerMatrix(0, 0)
        U_inv = IntegerMatrix.from_rows(w.U_inv) if w.m else IntegerMatrix(0, 0)
        V = IntegerMatrix.from_rows(w.V) if w.n else IntegerMatrix(0, 0)
        V_inv = IntegerMatrix.from_rows(w.V_inv) if w.n else IntegerMatrix(0, 0)
        return SmithDecomposition(divisors, matrix.rows, matrix.cols, U, V, U_inv, V_inv)
    return SmithDecomposition(divisors, matrix.rows, matrix.cols)


def rank_over_rationals(matrix):
    """Rank of an integer matrix over Q by fraction-free (Bareiss) elimination.

    Independent of the Smith normal form code on purpose: the two are
    cross-checked against each other in the test suite.
    """
    m = matrix.to_rows()
    rows, cols = matrix.rows, matrix.cols
    rank = 0
    prev = 1
    for j in range(cols):
        pivot_row = None
        for i in range(rank, rows):
            if m[i][j]:
                pivot_row = i
                break
        if pivot_row is None:
            continue
        m[rank], m[pivot_row] = m[pivot_row], m[rank]
        p = m[rank][j]
        for i in range(rank + 1, rows):
            if not m[i][j] and prev == 1:
                continue
            for jj in range(j + 1, cols):
                m[i][jj] = (p * m[i][jj] - m[i][j] * m[rank][jj]) // prev
            m[i][j] = 0
        prev = p
        rank += 1
        if rank == rows:
            break
    return rank


def is_prime(p):
    if p < 2:
        return False
    if p < 4:
        return True
    if p % 2 == 0:
        return False
    d = 3
    while d * d <= p:
        if p % d == 0:
            return False
        d += 2
    return True


def rank_mod_p(matrix, p):
    """Rank of the matrix with entries reduced mod p, over the field F_p."""
    if not is_prime(p):
        raise ValueError(f"{p} is not prime")
    row = [dict() for _ in range(matrix.rows)]
    col = [dict() for _ in range(matrix.cols)]
    for (i, j), v in matrix.items():
        v %= p
        if v:
            row[i][j] = v
            col[j][i] = v
    live_rows = set(i for i in range(matrix.rows) if row[i])
    rank = 0
    while live_rows:
        # Markowitz-flavoured pivot: smallest fill estimate, ties by (i, j).
        best = None
        for i in live_rows:
            for j, v in row[i].items():
                key = (len(col[j]) + len(row[i]), i, j)
                if best is None or key < best:
                    best = key
        _, pi, pj = best
        inv = pow(row[pi][pj], -1, p)
        pivot_row = dict(row[pi])
        for jj in pivot_row:
            col[jj].pop(pi, None)
        row[pi] = {}
        live_rows.discard(pi)
        for i in list(col[pj]):
            factor = (col[pj][i] * inv) % p
            ri = row[i]
            for jj, v in pivot_row.items():
                nv = (ri.get(jj, 0) - factor * v) % p
                if nv:
                    ri[jj] = nv
                    col[jj][i] = nv
                else:
                    ri.pop(jj, None)
                    col[jj].pop(i, None)
            if not ri:
                live_rows.discard(i)
        rank += 1
    return rank


def cokernel_structure(matrix):
    """Structure of Z^rows / (column span of the matrix)."""
    snf = smith_normal_form(matrix)
    free = matrix.rows - snf.rank
    return FgAbelianGroup(free, snf.nontrivial_divisors())


def kernel_basis(matrix):
    """Columns forming a basis of the integer kernel lattice.

    The basis spans a direct summand of Z^cols (it comes from columns of a
    unimodular matrix), so coordinates with respect to it are integral.
    """
    snf = smith_normal_form(matrix, keep_transforms=True)
    r = snf.rank
    entries = {}
    for (i, j), v in snf.V.items():
        if j >= r:
            entries[i, j - r] = v
    return IntegerMatrix(matrix.cols, matrix.cols - r, entries)


def homology_at(d_out, d_in):
    """ker(d_out) / im(d_in) as an abelian group.

    d_out is the boundary leaving the degree in question and d_in the one
    arriving; d_out @ d_in must vanish (checked).  The torsion equals the
    nontrivial invariant factors of d_in: the quotient of Z^n/im(d_in) by
    ker(d_out)/im(d_in) embeds in the free module im(d_out), so all torsion
    of the cokernel already lives in the homology group.
    """
    if d_out.cols != d_in.rows:
        raise ValueError(
            f"shape mismatch: d_out is {d_out.rows}x{d_out.cols} "
            f"but d_in is {d_in.rows}x{d_in.cols}")
    product = d_out @ d_in
    if not product.is_zero():
        (i, j), v = min(product.items())
        raise ValueError(
            f"not a chain complex: (d_out @ d_in)[{i}, {j}] = {v} != 0")
    nullity = d_out.cols - smith_normal_form(d_out).rank
    snf_in = smith_normal_form(d_in)
    return FgAbelianGroup(nullity - snf_in.rank, snf_in.nontrivial_divisors())


def soule_torsion_bound(matrix):
    """log of the product of Euclidean column norms over a greedy column
    subset whose columns span the rational column space.

    The standard basis of the codomain is treated as orthonormal.  The
    returned value bounds log |tors coker| from above; the greedy subset is
    scanned left to right, keeping a column iff it raises the rational rank
    of the kept set.
    """
    echelon = []  # (lead index, Fraction vector) rows, reduced lazily
    log_bound = 0.0
    cols = matrix.columns()
    for j in range(matrix.cols):
        vec = [Fraction(0)] * matrix.rows
        for i, v in cols[j].items():
            vec[i] = Fraction(v)
        for lead, basis_vec in echelon:
            if vec[lead]:
                scale = vec[lead] / basis_vec[lead]
                for k in range(lead, matrix.rows):
                    vec[k] -= scale * basis_vec[k]
        lead = next((k for k in range(matrix.rows) if vec[k]), None)
        if lead is None:
            continue
        echelon.append((lead, vec))
        echelon.sort(key=lambda pair: pair[0])
        log_bound += 0.5 * math.log(matrix.column_norm_sq(j))
    return log_bound


class ExactnessViolation(AssertionError):
    """A torsion inequality that is a theorem failed on a concrete witness.

    This falsifies the implementation, not the theorem; the witness payload
    carries every matrix needed to replay the trial.
    """

    def __init__(self, witness):
        super().__init__(f"torsion exactness lemma violated: {witness}")
        self.witness = witness


def _random_matrix(rng, rows, cols, size_cap):
    entries = {}
    for i in range(rows):
        for j in range(cols):
            v = rng.randint(-size_cap, size_cap)
            if v:
                entries[i, j] = v
    return IntegerMatrix(rows, cols, entries)


def _torsion_order_of_quotient(matrix):
    return math.prod(smith_normal_form(matrix).nontrivial_divisors())


def verify_torsion_exactness_lemmas(trials, seed=0, size_cap=5):
    """Randomised check of the two torsion inequalities for exact sequences.

    Per trial, build B = Z^t / im(R) for a random R, then

    * pick random elements of B generating a subgroup A, set C = B/A, so
      0 -> A -> B -> C is exact by construction, and check
      |tors B| <= |tors A| * |tors C|;
    * pick a random finite A' with a homomorphism into B and C' = B / im,
      and check |tors B| <= |A'| * |tors C'|.

    Any violation raises ExactnessViolation carrying the witness matrices.
    Returns a report dict with trial counts.
    """
    if trials < 1:
        raise ValueError("trials must be >= 1")
    rng = random.Random(f"{seed}:exactness")
    for trial in range(trials):
        t = rng.randint(1, 4)
        u = rng.randint(0, 4)
        R = _random_matrix(rng, t, u, size_cap)
        snf_R = smith_normal_form(R, keep_transforms=True)
        tors_B = math.prod(snf_R.nontrivial_divisors())

        # Lemma on 0 -> A -> B -> C: A generated by s random elements of B.
        s = rng.randint(0, 3)
        G = _random_matrix(rng, t, s, size_cap)
        tors_C = _torsion_order_of_quotient(R.hstack(G))
        # ker(Z^s -> B) is the projection of ker[G | R] onto the G block.
        ker = kernel_basis(G.hstack(R))
        proj = IntegerMatrix(s, ker.cols,
                             {(i, j): v for (i, j), v in ker.items() if i < s})
        tors_A = cokernel_structure(proj).torsion_order
        if tors_B > tors_A * tors_C:
            raise ExactnessViolation({
                "lemma": "subgroup",
                "trial": trial,
                "R": R.to_decimal_rows(),
                "G": G.to_decimal_rows(),
                "tors_A": str(tors_A), "tors_B": str(tors_B), "tors_C": str(tors_C),
            })

        # Lemma on A' -> B -> C' with A' finite: images are elements of B
        # whose order divides the chosen cyclic orders.
        s2 = rng.randint(0, 3)
        orders = [rng.randint(1, size_cap + 1) for _ in range(s2)]
        divisors = snf_R.divisors
        image_entries = {}
        for jj, q in enumerate(orders):
            w = [0] * t
            for c, d in enumerate(divisors):
                g = math.gcd(d, q)
                w[c] = (d // g) * rng.randint(0, g - 1)
            # free coordinates stay zero so the element really has finite order
            for i in range(t):
                val = sum(snf_R.U_inv.entry(i, c) * w[c] for c in range(len(divisors)) if w[c])
                if val:
                    image_entries[i, jj] = val
        X = IntegerMatrix(t, s2, image_entries)
        tors_C2 = _torsion_order_of_quotient(R.hstack(X))
        order_A2 = math.prod(orders)
        if tors_B > order_A2 * tors_C2:
            raise ExactnessViolation({
                "lemma": "torsion-domain",
                "trial": trial,
                "R": R.to_decimal_rows(),
                "X": X.to_decimal_rows(),
                "order_A": str(order_A2), "tors_B": str(tors_B), "tors_C": str(tors_C2),
            })
    return {"trials": trials, "passes": trials, "failures": 0}
