"""Ground-truth enumeration over prime fields F_p.

Matrices are enumerated by index: matrix i has entry k (row-major) equal to the
k-th base-p digit of i, least significant first. Work is measured in field
multiplications and refused up front when it would exceed the budget.
"""

import logging
from concurrent.futures import ThreadPoolExecutor
from dataclasses import dataclass

import numpy as np

from .arith import is_prime
from .errors import BudgetExceededError, InconsistencyError, MatrixShapeError, UsageError
from .run_config import run_config

logger = logging.getLogger(__name__)

# Upper bound on matrices materialized per chunk (chunk rows x all columns for pairs).
CHUNK_CELLS = 1 << 18


@dataclass(frozen=True, eq=False)
class MatrixFp:
    """An n x n matrix over F_p with entries reduced to [0, p)."""

    n: int
    p: int
    entries: np.ndarray

    def __post_init__(self):
        entries = np.array(self.entries, dtype=np.int64).reshape(self.n, self.n)
        if entries.size and (entries.min() < 0 or entries.max() >= self.p):
            raise UsageError(f"Entries of a matrix over F_{self.p} must lie in [0, {self.p}).")
        entries.setflags(write=False)
        object.__setattr__(self, "entries", entries)

    @classmethod
    def from_rows(cls, rows, p: int) -> "MatrixFp":
        entries = np.asarray(rows, dtype=np.int64) % p
        return cls(entries.shape[0], p, entries)

    @classmethod
    def zeros(cls, n: int, p: int) -> "MatrixFp":
        return cls(n, p, np.zeros((n, n), dtype=np.int64))

    @classmethod
    def identity(cls, n: int, p: int) -> "MatrixFp":
        return cls(n, p, np.eye(n, dtype=np.int64))

    @classmethod
    def elementary(cls, n: int, p: int, i: int, j: int) -> "MatrixFp":
        """E_ij with 1-based indices: a single 1 in row i, column j."""
        entries = np.zeros((n, n), dtype=np.int64)
        entries[i - 1, j - 1] = 1
        return cls(n, p, entries)

    @classmethod
    def from_index(cls, index: int, n: int, p: int) -> "MatrixFp":
        return cls(n, p, decode_matrices(np.array([index]), n, p)[0])

    def __eq__(self, other) -> bool:
        if not isinstance(other, MatrixFp):
            return NotImplemented
        return (self.n, self.p) == (other.n, other.p) and np.array_equal(
            self.entries, other.entries
        )

    def __hash__(self):
        return hash((self.n, self.p, self.entries.tobytes()))


def mat_mul(a: MatrixFp, b: MatrixFp) -> MatrixFp:
    """Exact product a*b mod p.

    Raises:
        MatrixShapeError: If a and b differ in dimension or modulus.
    """
    if a.n != b.n or a.p != b.p:
        raise MatrixShapeError(
            f"Cannot multiply a {a.n}x{a.n} matrix over F_{a.p} "
            f"by a {b.n}x{b.n} matrix over F_{b.p}."
        )
    return MatrixFp(a.n, a.p, (a.entries @ b.entries) % a.p)


def is_nilpotent(a: MatrixFp) -> bool:
    """True iff a^n = 0; by Cayley-Hamilton the nilpotence index never exceeds n."""
    if a.n == 0:
        return True
    power = a.entries
    for _ in range(a.n - 1):
        power = (power @ a.entries) % a.p
    return not power.any()


# --- Enumeration helpers ---


def decode_matrices(indices: np.ndarray, n: int, p: int) -> np.ndarray:
    """Matrices for the given enumeration indices, shape (len(indices), n, n)."""
    if n == 0:
        return np.zeros((len(indices), 0, 0), dtype=np.int64)
    weights = np.array([p**k for k in range(n * n)], dtype=np.int64)
    digits = (np.asarray(indices, dtype=np.int64)[:, None] // weights) % p
    return digits.reshape(-1, n, n)


def enumerate_matrices(p: int, n: int, start: int = 0, stop: int | None = None):
    """Yield MatrixFp objects for indices in [start, stop)."""
    _check_field(p, n)
    stop = p ** (n * n) if stop is None else stop
    for entries in decode_matrices(np.arange(start, stop), n, p):
        yield MatrixFp(n, p, entries)


def _check_field(p: int, n: int) -> None:
    if not isinstance(p, int) or not is_prime(p):
        raise UsageError(f"The brute-force oracle works over prime fields; {p!r} is not prime.")
    if not isinstance(n, int) or n < 0:
        raise UsageError(f"The dimension must be a non-negative integer, got {n!r}.")


def _interval_chunks(total: int, size: int) -> list[tuple[int, int]]:
    size = max(1, size)
    return [(start, min(start + size, total)) for start in range(0, total, size)]


def _map_chunks(func, chunks, workers: int | None) -> int:
    """Apply func to disjoint (start, stop) intervals and sum the results."""
    workers = workers or run_config.workers
    if workers <= 1 or len(chunks) == 1:
        return sum(func(start, stop) for start, stop in chunks)
    with ThreadPoolExecutor(max_workers=workers) as pool:
        return sum(pool.map(lambda interval: func(*interval), chunks))


def estimate_cost(kind: str, p: int, n: int, num_nilpotent: int | None = None) -> int:
    """Field multiplications needed by an enumeration.

    kind is one of "pairs", "nilpotent", "nilpotent_pairs", "centralizers".
    """
    num_matrices = p ** (n * n)
    product = n**3
    if kind == "pairs":
        return num_matrices * num_matrices * 2 * product
    if kind == "nilpotent":
        return num_matrices * max(n - 1, 0) * product
    if kind == "nilpotent_pairs":
        k = num_nilpotent if num_nilpotent is not None else p ** (n * n - n)
        return estimate_cost("nilpotent", p, n) + k * k * 2 * product
    if kind == "centralizers":
        return num_matrices * n**6
    raise UsageError(f"Unknown enumeration kind {kind!r}.")


def _check_budget(operation: str, cost: int, budget: int | None) -> None:
    budget = budget or run_config.budget
    if cost > budget:
        raise BudgetExceededError(operation, cost, budget)
    logger.debug("%s: %d multiplications within budget %d", operation, cost, budget)


# --- Counts ---


def count_commuting_pairs(
    p: int, n: int, budget: int | None = None, workers: int | None = None
) -> int:
    """Number of ordered pairs (A, B) of n x n matrices over F_p with AB = BA.

    Raises:
        BudgetExceededError: If p^{2n^2} pairs cost more than the budget.
    """
    _check_field(p, n)
    _check_budget(f"Commuting pair scan over F_{p}, n={n}", estimate_cost("pairs", p, n), budget)
    if n == 0:
        return 1

    total = p ** (n * n)
    everything = decode_matrices(np.arange(total), n, p)

    def scan(start: int, stop: int) -> int:
        a = everything[start:stop]
        ab = np.einsum("aij,bjk->abik", a, everything) % p
        ba = np.einsum("bij,ajk->abik", everything, a) % p
        return int(np.all(ab == ba, axis=(2, 3)).sum())

    return _map_chunks(scan, _interval_chunks(total, CHUNK_CELLS // total), workers)


def _nilpotent_indices(p: int, n: int, workers: int | None) -> np.ndarray:
    """Enumeration indices of all nilpotent matrices, checking trace and determinant."""
    total = p ** (n * n)

    def scan(start: int, stop: int) -> list[int]:
        mats = decode_matrices(np.arange(start, stop), n, p)
        power = mats
        for _ in range(n - 1):
            power = np.matmul(power, mats) % p
        mask = ~power.any(axis=(1, 2))
        nilpotent = mats[mask]
        traces = np.trace(nilpotent, axis1=1, axis2=2) % p
        dets = np.rint(np.linalg.det(nilpotent)).astype(np.int64) % p if len(nilpotent) else []
        if np.any(traces) or np.any(dets):
            raise InconsistencyError(f"Found a nilpotent matrix over F_{p} with nonzero trace/det.")
        return list(np.arange(start, stop)[mask])

    chunks = _interval_chunks(total, CHUNK_CELLS // max(n * n, 1))
    workers = workers or run_config.workers
    if workers <= 1:
        found = [scan(start, stop) for start, stop in chunks]
    else:
        with ThreadPoolExecutor(max_workers=workers) as pool:
            found = list(pool.map(lambda interval: scan(*interval), chunks))
    return np.array([i for part in found for i in part], dtype=np.int64)


def count_nilpotent(p: int, n: int, budget: int | None = None, workers: int | None = None) -> int:
    """Number of nilpotent n x n matrices over F_p.

    Raises:
        BudgetExceededError: If scanning p^{n^2} matrices costs more than the budget.
    """
    _check_field(p, n)
    _check_budget(f"Nilpotent scan over F_{p}, n={n}", estimate_cost("nilpotent", p, n), budget)
    if n == 0:
        return 1
    return len(_nilpotent_indices(p, n, workers))


def count_commuting_nilpotent_pairs(
    p: int, n: int, budget: int | None = None, workers: int | None = None
) -> int:
    """Number of ordered pairs of commuting nilpotent n x n matrices over F_p."""
    _check_field(p, n)
    operation = f"Commuting nilpotent pair scan over F_{p}, n={n}"
    _check_budget(operation, estimate_cost("nilpotent_pairs", p, n), budget)
    if n == 0:
        return 1

    nilpotent = decode_matrices(_nilpotent_indices(p, n, workers), n, p)
    count = len(nilpotent)

    def scan(start: int, stop: int) -> int:
        a = nilpotent[start:stop]
        ab = np.einsum("aij,bjk->abik", a, nilpotent) % p
        ba = np.einsum("bij,ajk->abik", nilpotent, a) % p
        return int(np.all(ab == ba, axis=(2, 3)).sum())

    return _map_chunks(scan, _interval_chunks(count, CHUNK_CELLS // count), workers)


# --- Centralizers by linear algebra ---


def rank_mod_p(matrix: np.ndarray, p: int) -> int:
    """Rank of an integer matrix over F_p by Gaussian elimination."""
    m = np.array(matrix, dtype=np.int64) % p
    rows, cols = m.shape
    rank = 0
    for col in range(cols):
        pivot_rows = np.nonzero(m[rank:, col])[0]
        if len(pivot_rows) == 0:
            continue
        pivot = rank + pivot_rows[0]
        m[[rank, pivot]] = m[[pivot, rank]]
        m[rank] = (m[rank] * pow(int(m[rank, col]), -1, p)) % p
        others = np.nonzero(m[:, col])[0]
        for r in others:
            if r != rank:
                m[r] = (m[r] - m[r, col] * m[rank]) % p
        rank += 1
        if rank == rows:
            break
    return rank


def centralizer_size(a: MatrixFp) -> int:
    """|{B : AB = BA}| = p^{dim ker(X -> AX - XA)}."""
    n = a.n
    if n == 0:
        return 1
    identity = np.eye(n, dtype=np.int64)
    # vec(AX - XA) = (I kron A - A^T kron I) vec(X) for column-stacked vec.
    commutator = np.kron(identity, a.entries) - np.kron(a.entries.T, identity)
    return a.p ** (n * n - rank_mod_p(commutator, a.p))


def count_commuting_pairs_by_centralizers(p: int, n: int, budget: int | None = None) -> int:
    """Sum of |centralizer(A)| over all A; a second, independent route to the pair count."""
    _check_field(p, n)
    operation = f"Centralizer sum over F_{p}, n={n}"
    _check_budget(operation, estimate_cost("centralizers", p, n), budget)
    return sum(centralizer_size(a) for a in enumerate_matrices(p, n))
