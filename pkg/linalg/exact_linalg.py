#!/usr/bin/env python3
"""
Exact Linear Algebra for jordan-spectral

Sparse rational matrices, modular kernels with rank certificates, exact
kernels over Q for small systems, and span closures.

Pipeline for a constraint matrix M:
    1. split the columns into connected components of the row/column graph
    2. per component, eliminate mod p: sparse Markowitz pivoting, then dense
       elimination once the remaining rows are dense
    3. lift the modular kernel by CRT + rational reconstruction and verify
       every lifted vector exactly over Q
    4. certify: kernel dimension is at least rank_Q(verified vectors) and at
       most ncols - rank_p(M) for every prime p
"""

from __future__ import annotations

import heapq
import logging
import math
import os
import sys
from collections import deque
from concurrent.futures import ThreadPoolExecutor
from dataclasses import dataclass, field
from fractions import Fraction
from itertools import repeat
from typing import Iterable, Mapping, Sequence

import numpy as np
import scipy.sparse as sp
from scipy.sparse.csgraph import connected_components
from sympy import isprime
from sympy.ntheory.modular import crt

# Add parent directory to path
sys.path.insert(0, os.path.dirname(os.path.dirname(os.path.abspath(__file__))))
import config
from errors import (
    DimensionMismatchError,
    InconclusiveCertificateError,
    KernelCertificateError,
    PrimeDivisionError,
)

logger = logging.getLogger(__name__)

_HASH_MULTIPLIERS = (np.uint64(0x9E3779B97F4A7C15), np.uint64(0xC2B2AE3D27D4EB4F),
                     np.uint64(0x165667B19E3779F9), np.uint64(0x27D4EB2F165667C5))


# ===== Sparse rational matrices =====

@dataclass(frozen=True)
class SparseMatrix:
    """
    Rational matrix in coordinate form, entries sorted by (row, col)

    No (row, col) pair repeats, no stored entry is zero, denominators are
    positive.
    """
    nrows: int
    ncols: int
    rows: np.ndarray
    cols: np.ndarray
    nums: np.ndarray
    dens: np.ndarray

    @classmethod
    def from_coo(cls, nrows: int, ncols: int, rows, cols, nums, dens=None,
                 sum_duplicates: bool = False) -> SparseMatrix:
        """
        Build from coordinate arrays

        Args:
            nrows, ncols: Shape
            rows, cols, nums: Entry arrays
            dens: Denominators (default all 1)
            sum_duplicates: Add repeated (row, col) entries (integer entries only)

        Raises:
            DimensionMismatchError: index out of range, ragged arrays or
                repeated entries when sum_duplicates is False
        """
        rows = np.asarray(rows, dtype=np.int64)
        cols = np.asarray(cols, dtype=np.int64)
        nums = np.asarray(nums, dtype=np.int64)
        dens = np.ones_like(nums) if dens is None else np.asarray(dens, dtype=np.int64)
        if not (rows.shape == cols.shape == nums.shape == dens.shape):
            raise DimensionMismatchError("coordinate arrays differ in length")
        if rows.size and (rows.min() < 0 or rows.max() >= nrows or cols.min() < 0 or cols.max() >= ncols):
            raise DimensionMismatchError(f"entry index outside {nrows}×{ncols}")
        if np.any(dens == 0):
            raise ZeroDivisionError("zero denominator in sparse matrix")
        if sum_duplicates:
            if np.any(dens != 1):
                raise DimensionMismatchError("sum_duplicates needs integer entries")
            csr = sp.csr_matrix((nums, (rows, cols)), shape=(nrows, ncols), dtype=np.int64)
            csr.sum_duplicates()
            csr.eliminate_zeros()
            coo = csr.tocoo()
            rows, cols, nums = coo.row.astype(np.int64), coo.col.astype(np.int64), coo.data.astype(np.int64)
            dens = np.ones_like(nums)
        else:
            keys = rows * ncols + cols
            if np.unique(keys).size != keys.size:
                raise DimensionMismatchError("repeated (row, col) entry")
        negative = dens < 0
        nums = np.where(negative, -nums, nums)
        dens = np.abs(dens)
        keep = nums != 0
        rows, cols, nums, dens = rows[keep], cols[keep], nums[keep], dens[keep]
        g = np.gcd(nums, dens)
        nums, dens = nums // g, dens // g
        order = np.lexsort((cols, rows))
        return cls(nrows, ncols, rows[order], cols[order], nums[order], dens[order])

    @classmethod
    def from_entries(cls, nrows: int, ncols: int,
                     entries: Iterable[tuple[int, int, object]]) -> SparseMatrix:
        rows, cols, nums, dens = [], [], [], []
        for r, c, value in entries:
            value = Fraction(value)
            rows.append(r)
            cols.append(c)
            nums.append(value.numerator)
            dens.append(value.denominator)
        return cls.from_coo(nrows, ncols, rows, cols, nums, dens)

    @classmethod
    def from_rows(cls, rows: Sequence[Sequence]) -> SparseMatrix:
        ncols = len(rows[0]) if rows else 0
        return cls.from_entries(len(rows), ncols,
                                ((r, c, v) for r, row in enumerate(rows) for c, v in enumerate(row) if v))

    @property
    def nnz(self) -> int:
        return int(self.nums.size)

    @property
    def is_integral(self) -> bool:
        return bool(np.all(self.dens == 1))

    def entries(self):
        for r, c, n, d in zip(self.rows.tolist(), self.cols.tolist(), self.nums.tolist(), self.dens.tolist()):
            yield r, c, Fraction(n, d)

    def row_pointers(self) -> np.ndarray:
        return np.searchsorted(self.rows, np.arange(self.nrows + 1))

    def row_dicts(self) -> list[dict[int, Fraction]]:
        out: list[dict[int, Fraction]] = [dict() for _ in range(self.nrows)]
        for r, c, v in self.entries():
            out[r][c] = v
        return out

    def residual(self, vector: Mapping[int, Fraction]) -> dict[int, Fraction]:
        """
        Exact M·v

        Returns:
            dict: Nonzero rows of the product
        """
        if not vector:
            return {}
        values = {int(c): Fraction(v) for c, v in vector.items() if v}
        if any(not 0 <= c < self.ncols for c in values):
            raise DimensionMismatchError("vector index outside the column range")
        vec_den = 1
        for v in values.values():
            vec_den = vec_den * v.denominator // math.gcd(vec_den, v.denominator)
        scaled = {c: v.numerator * (vec_den // v.denominator) for c, v in values.items()}
        present = np.isin(self.cols, np.fromiter(scaled, dtype=np.int64, count=len(scaled)))
        if not present.any():
            return {}
        rows = self.rows[present]
        cols = self.cols[present]
        nums = self.nums[present]
        dens = self.dens[present]
        per_row = int(np.bincount(rows).max())
        big = max(abs(x) for x in scaled.values()) * int(np.abs(nums).max()) * per_row
        if big < (1 << 62) and np.all(dens == 1):
            lookup = np.zeros(self.ncols, dtype=np.int64)
            for c, x in scaled.items():
                lookup[c] = x
            acc = np.zeros(self.nrows, dtype=np.int64)
            np.add.at(acc, rows, nums * lookup[cols])
            bad = np.flatnonzero(acc)
            return {int(r): Fraction(int(acc[r]), vec_den) for r in bad}
        acc: dict[int, Fraction] = {}
        for r, c, n, d in zip(rows.tolist(), cols.tolist(), nums.tolist(), dens.tolist()):
            acc[r] = acc.get(r, 0) + Fraction(n * scaled[c], d)
        return {r: v / vec_den for r, v in acc.items() if v}

    def to_csr(self) -> sp.csr_matrix:
        if not self.is_integral:
            raise DimensionMismatchError("only integer matrices convert to CSR")
        return sp.csr_matrix((self.nums, (self.rows, self.cols)), shape=(self.nrows, self.ncols))


def _row_hashes(rows: np.ndarray, starts: np.ndarray, cols: np.ndarray, *values: np.ndarray) -> np.ndarray:
    h = cols.astype(np.uint64) * _HASH_MULTIPLIERS[0]
    for n, v in enumerate(values, start=1):
        h ^= (v.astype(np.uint64) + np.uint64(n)) * _HASH_MULTIPLIERS[n % 4]
        h = (h << np.uint64(13)) | (h >> np.uint64(51))
    row_h = np.add.reduceat(h, starts) if starts.size else np.zeros(0, dtype=np.uint64)
    lengths = np.diff(np.append(starts, rows.size)).astype(np.uint64)
    return row_h + lengths * _HASH_MULTIPLIERS[3]


def deduplicate_rows(matrix: SparseMatrix) -> tuple[SparseMatrix, int, int]:
    """
    Drop empty rows and exact duplicate rows, renumbering the survivors

    Candidate duplicates are grouped by a row hash and then compared entry
    by entry, so only true duplicates are dropped.

    Returns:
        tuple: (matrix, empty rows dropped, duplicate rows dropped)
    """
    if matrix.nnz == 0:
        return SparseMatrix.from_coo(0, matrix.ncols, [], [], []), matrix.nrows, 0
    starts = np.flatnonzero(np.r_[True, matrix.rows[1:] != matrix.rows[:-1]])
    row_ids = matrix.rows[starts]
    lengths = np.diff(np.append(starts, matrix.nnz))
    hashes = _row_hashes(matrix.rows, starts, matrix.cols, matrix.nums, matrix.dens)

    order = np.lexsort((row_ids, hashes))
    sorted_hash = hashes[order]
    group_start = np.r_[True, sorted_hash[1:] != sorted_hash[:-1]]
    group_id = np.cumsum(group_start) - 1
    first_in_group = order[np.flatnonzero(group_start)]
    rep = np.empty_like(order)
    rep[order] = first_in_group[group_id]

    candidate = np.flatnonzero((rep != np.arange(rep.size)) & (lengths == lengths[rep]))
    duplicate = np.zeros(rep.size, dtype=bool)
    if candidate.size:
        cand_len = lengths[candidate]
        offsets = np.arange(int(cand_len.sum())) - np.repeat(np.cumsum(cand_len) - cand_len, cand_len)
        mine = np.repeat(starts[candidate], cand_len) + offsets
        theirs = np.repeat(starts[rep[candidate]], cand_len) + offsets
        equal = ((matrix.cols[mine] == matrix.cols[theirs])
                 & (matrix.nums[mine] == matrix.nums[theirs])
                 & (matrix.dens[mine] == matrix.dens[theirs]))
        bounds = np.cumsum(cand_len) - cand_len
        duplicate[candidate] = np.logical_and.reduceat(equal, bounds)

    keep_rows = ~duplicate
    entry_keep = np.repeat(keep_rows, lengths)
    new_index = np.cumsum(keep_rows) - 1
    new_rows = np.repeat(new_index, lengths)[entry_keep]
    out = SparseMatrix(int(keep_rows.sum()), matrix.ncols, new_rows.astype(np.int64),
                       matrix.cols[entry_keep], matrix.nums[entry_keep], matrix.dens[entry_keep])
    return out, matrix.nrows - row_ids.size, int(duplicate.sum())


# ===== Modular elimination =====

def _inverse_array(values: np.ndarray, prime: int) -> np.ndarray:
    """Vectorized Fermat inverse a^(p-2) mod p"""
    result = np.ones_like(values)
    base = values % prime
    exponent = prime - 2
    while exponent:
        if exponent & 1:
            result = result * base % prime
        base = base * base % prime
        exponent >>= 1
    return result


def _modular_values(matrix: SparseMatrix, prime: int) -> np.ndarray:
    if prime >= (1 << 31):
        raise ValueError(f"prime {prime} too large for int64 residue products")
    if np.any(matrix.dens % prime == 0):
        bad = int(np.flatnonzero(matrix.dens % prime == 0)[0])
        raise PrimeDivisionError(
            f"denominator {int(matrix.dens[bad])} in row {int(matrix.rows[bad])} is divisible by {prime}")
    values = matrix.nums % prime
    if not matrix.is_integral:
        values = values * _inverse_array(matrix.dens % prime, prime) % prime
    return values


def column_components(nrows: int, ncols: int, rows: np.ndarray, cols: np.ndarray) -> tuple[int, np.ndarray]:
    """
    Connected components of the columns, two columns being linked when they share a row

    Returns:
        tuple: (number of components, component label per column; columns
               in no row get label -1)
    """
    if rows.size == 0:
        return 0, -np.ones(ncols, dtype=np.int64)
    starts = np.flatnonzero(np.r_[True, rows[1:] != rows[:-1]])
    lengths = np.diff(np.append(starts, rows.size))
    first_col = np.repeat(cols[starts], lengths)
    graph = sp.coo_matrix((np.ones(rows.size, dtype=np.int8), (first_col, cols)), shape=(ncols, ncols))
    _, labels = connected_components(graph, directed=False)
    used = np.zeros(ncols, dtype=bool)
    used[cols] = True
    labels = labels.astype(np.int64)
    # renumber so that components are ordered by their smallest column
    used_labels = labels[used]
    _, first = np.unique(used_labels, return_index=True)
    ordered = used_labels[np.sort(first)]
    remap = -np.ones(labels.max() + 1, dtype=np.int64)
    remap[ordered] = np.arange(ordered.size)
    out = np.where(used, remap[labels], -1)
    return int(ordered.size), out


def _dense_rref(block: np.ndarray, prime: int) -> tuple[np.ndarray, list[int]]:
    a = block % prime
    nrows, ncols = a.shape
    rank = 0
    pivot_cols: list[int] = []
    for c in range(ncols):
        if rank == nrows:
            break
        nz = np.flatnonzero(a[rank:, c])
        if nz.size == 0:
            continue
        r = rank + int(nz[0])
        if r != rank:
            a[[rank, r]] = a[[r, rank]]
        a[rank] = a[rank] * pow(int(a[rank, c]), prime - 2, prime) % prime
        factors = a[:, c].copy()
        factors[rank] = 0
        hit = np.flatnonzero(factors)
        if hit.size:
            a[hit] = (a[hit] - np.outer(factors[hit], a[rank]) % prime) % prime
        pivot_cols.append(c)
        rank += 1
    return a[:rank], pivot_cols


@dataclass
class _ComponentResult:
    rank: int
    sparse_pivots: list
    dense_cols: np.ndarray
    dense_rref: np.ndarray
    dense_pivots: list
    columns: np.ndarray
    rows_in: int
    rows_unique: int


def _eliminate_component(rows: np.ndarray, cols: np.ndarray, vals: np.ndarray,
                         prime: int, dense_switch: int) -> _ComponentResult:
    starts = np.flatnonzero(np.r_[True, rows[1:] != rows[:-1]])
    lengths = np.diff(np.append(starts, rows.size))
    inv_lead = _inverse_array(vals[starts], prime)
    normalized = vals * np.repeat(inv_lead, lengths) % prime
    hashes = _row_hashes(rows, starts, cols, normalized)
    _, first = np.unique(hashes, return_index=True)
    keep = np.sort(first)

    col_list = cols.tolist()
    val_list = normalized.tolist()
    start_list = starts.tolist()
    length_list = lengths.tolist()
    data = []
    for r in keep.tolist():
        s = start_list[r]
        e = s + length_list[r]
        data.append(dict(zip(col_list[s:e], val_list[s:e])))

    col_rows: dict[int, set] = {}
    for rid, row in enumerate(data):
        for c in row:
            col_rows.setdefault(c, set()).add(rid)
    heap = [(len(row), rid) for rid, row in enumerate(data)]
    heapq.heapify(heap)
    active = [True] * len(data)
    pivots = []

    while heap:
        nnz, rid = heapq.heappop(heap)
        if not active[rid] or len(data[rid]) != nnz:
            continue
        if nnz == 0:
            active[rid] = False
            continue
        if nnz > dense_switch:
            heapq.heappush(heap, (nnz, rid))
            break
        row = data[rid]
        pc = min(row, key=lambda c: (len(col_rows[c]), c))
        inv = pow(row[pc], prime - 2, prime)
        active[rid] = False
        for c in row:
            col_rows[c].discard(rid)
        prow = {c: v * inv % prime for c, v in row.items()}
        for other in sorted(col_rows[pc]):
            orow = data[other]
            f = orow[pc]
            for c, v in prow.items():
                if c == pc:
                    continue
                nv = (orow.get(c, 0) - f * v) % prime
                if nv:
                    if c not in orow:
                        col_rows[c].add(other)
                    orow[c] = nv
                elif c in orow:
                    del orow[c]
                    col_rows[c].discard(other)
            del orow[pc]
            heapq.heappush(heap, (len(orow), other))
        col_rows[pc] = set()
        pivots.append((pc, prow))

    remaining = [data[rid] for rid in range(len(data)) if active[rid] and data[rid]]
    dense_cols = np.array(sorted({c for row in remaining for c in row}), dtype=np.int64)
    dense_rref = np.zeros((0, dense_cols.size), dtype=np.int64)
    dense_pivots: list[int] = []
    if remaining:
        logger.debug(f"dense phase: {len(remaining)} rows × {dense_cols.size} columns")
        position = {int(c): i for i, c in enumerate(dense_cols.tolist())}
        block = np.zeros((len(remaining), dense_cols.size), dtype=np.int64)
        for i, row in enumerate(remaining):
            for c, v in row.items():
                block[i, position[c]] = v
        dense_rref, dense_pivots = _dense_rref(block, prime)

    return _ComponentResult(
        rank=len(pivots) + len(dense_pivots),
        sparse_pivots=pivots,
        dense_cols=dense_cols,
        dense_rref=dense_rref,
        dense_pivots=dense_pivots,
        columns=np.unique(cols),
        rows_in=int(starts.size),
        rows_unique=len(data),
    )


def _component_kernel(result: _ComponentResult, prime: int) -> list[dict[int, int]]:
    pivot_set = {pc for pc, _ in result.sparse_pivots}
    dense_pivot_cols = [int(result.dense_cols[j]) for j in result.dense_pivots]
    pivot_set.update(dense_pivot_cols)
    dense_index = {int(c): j for j, c in enumerate(result.dense_cols.tolist())}
    kernel = []
    for f in result.columns.tolist():
        if f in pivot_set:
            continue
        x = {f: 1}
        j = dense_index.get(f)
        if j is not None:
            for i, dc in enumerate(dense_pivot_cols):
                coefficient = int(result.dense_rref[i, j])
                if coefficient:
                    x[dc] = (-coefficient) % prime
        for pc, prow in reversed(result.sparse_pivots):
            s = 0
            for c, v in prow.items():
                if c != pc:
                    xc = x.get(c)
                    if xc:
                        s += v * xc
            s %= prime
            if s:
                x[pc] = (-s) % prime
        kernel.append(x)
    return kernel


@dataclass
class ModularKernel:
    """Rank and kernel basis of a matrix over F_p"""
    prime: int
    rank: int
    ncols: int
    kernel: list[dict[int, int]]
    free_columns: list[int]
    components: int
    rows_in: int
    rows_unique: int

    @property
    def kernel_dim(self) -> int:
        return self.ncols - self.rank


def kernel_mod_p(matrix: SparseMatrix, prime: int, threads: int | None = None,
                 with_kernel: bool = True) -> ModularKernel:
    """
    Rank and kernel basis of M over F_p

    Args:
        matrix: SparseMatrix over Q
        prime: Prime below 2^31
        threads: Worker threads for independent components
        with_kernel: Also return a kernel basis (free columns set to 1)

    Raises:
        PrimeDivisionError: if some denominator is divisible by prime
    """
    values = _modular_values(matrix, prime)
    keep = values != 0
    rows, cols, values = matrix.rows[keep], matrix.cols[keep], values[keep]
    n_comp, labels = column_components(matrix.nrows, matrix.ncols, rows, cols)
    workers = config.resolve_threads(threads)
    dense_switch = getattr(config, 'DENSE_SWITCH_ROW_NNZ', 48)

    entry_comp = labels[cols]
    order = np.lexsort((cols, rows, entry_comp))
    rows, cols, values, entry_comp = rows[order], cols[order], values[order], entry_comp[order]
    bounds = np.searchsorted(entry_comp, np.arange(n_comp + 1))
    pieces = [(rows[bounds[c]:bounds[c + 1]], cols[bounds[c]:bounds[c + 1]], values[bounds[c]:bounds[c + 1]])
              for c in range(n_comp)]

    def work(piece):
        return _eliminate_component(piece[0], piece[1], piece[2], prime, dense_switch)

    if workers > 1 and n_comp > 1:
        with ThreadPoolExecutor(max_workers=workers) as pool:
            results = list(pool.map(work, pieces))
    else:
        results = [work(piece) for piece in pieces]

    rank = sum(r.rank for r in results)
    kernel: list[dict[int, int]] = []
    if with_kernel:
        for r in results:
            kernel.extend(_component_kernel(r, prime))
        kernel.extend({int(c): 1} for c in np.flatnonzero(labels < 0))
        kernel.sort(key=_free_column)
    free = [_free_column(v) for v in kernel]
    logger.debug(f"mod {prime}: rank {rank} of {matrix.ncols} columns over {n_comp} components")
    return ModularKernel(
        prime=prime,
        rank=rank,
        ncols=matrix.ncols,
        kernel=kernel,
        free_columns=free,
        components=n_comp,
        rows_in=sum(r.rows_in for r in results),
        rows_unique=sum(r.rows_unique for r in results),
    )


def _free_column(vector: Mapping[int, int]) -> int:
    # back-substitution inserts the free column first
    return next(iter(vector))


# ===== Rational lifting =====

def rational_reconstruct(residue: int, modulus: int) -> Fraction | None:
    """
    Smallest-height fraction r/s ≡ residue (mod modulus), |r|, s ≤ sqrt(modulus/2)

    Returns:
        Fraction or None when no such fraction exists
    """
    residue %= modulus
    bound = math.isqrt(modulus // 2)
    r0, r1 = modulus, residue
    s0, s1 = 0, 1
    while r1 > bound:
        q = r0 // r1
        r0, r1 = r1, r0 - q * r1
        s0, s1 = s1, s0 - q * s1
    if s1 == 0 or abs(s1) > bound or math.gcd(abs(s1), modulus) != 1:
        return None
    return Fraction(r1, s1)


def _lift_kernels(kernels: Sequence[ModularKernel]) -> list[dict[int, Fraction]]:
    """CRT-combine kernels that share free columns, then rationally reconstruct"""
    if not kernels:
        return []
    reference = kernels[0]
    group = [k for k in kernels if k.free_columns == reference.free_columns and k.rank == reference.rank]
    moduli = [k.prime for k in group]
    modulus = math.prod(moduli)
    lifted = []
    for n in range(len(reference.kernel)):
        vectors = [k.kernel[n] for k in group]
        support = sorted(set().union(*vectors))
        out = {}
        ok = True
        for c in support:
            residues = [v.get(c, 0) for v in vectors]
            combined = residues[0] if len(group) == 1 else int(crt(moduli, residues)[0])
            value = rational_reconstruct(combined, modulus)
            if value is None:
                ok = False
                break
            if value:
                out[c] = value
        if ok and out:
            lifted.append(out)
    return lifted


# ===== Exact Q elimination =====

class EchelonBasis:
    """
    Row-echelon basis over Q (or F_p when modulus is set)

    Each stored row has leading coefficient 1 at its pivot column and no
    entries to the left of it. Optional payload vectors undergo the same
    row operations, which tracks a linear map defined on the inserted vectors.
    """

    def __init__(self, dim: int, modulus: int | None = None) -> None:
        self.dim = dim
        self.modulus = modulus
        self._pivots: dict[int, tuple[dict, dict | None]] = {}
        self._order: list[int] = []

    def __len__(self) -> int:
        return len(self._order)

    def _normalize(self, value):
        if self.modulus is None:
            return Fraction(value)
        if isinstance(value, Fraction):
            return value.numerator * pow(value.denominator, self.modulus - 2, self.modulus) % self.modulus
        return value % self.modulus

    def _axpy(self, target: dict, factor, row: dict, heap: list | None = None, queued: set | None = None) -> None:
        p = self.modulus
        for k, x in row.items():
            nv = target.get(k, 0) - factor * x
            if p is not None:
                nv %= p
            if nv:
                if heap is not None and k not in target and k not in queued:
                    heapq.heappush(heap, k)
                    queued.add(k)
                target[k] = nv
            else:
                target.pop(k, None)

    def reduce(self, vector: Mapping[int, object], payload: Mapping[int, object] | None = None):
        """
        Remainder of a vector against the basis

        Returns:
            tuple: (remainder dict, reduced payload dict or None)
        """
        v = {k: self._normalize(x) for k, x in vector.items()}
        v = {k: x for k, x in v.items() if x}
        pl = None if payload is None else {k: self._normalize(x) for k, x in payload.items() if x}
        heap = list(v)
        heapq.heapify(heap)
        queued = set(heap)
        while heap:
            c = heapq.heappop(heap)
            queued.discard(c)
            f = v.get(c)
            if not f:
                continue
            entry = self._pivots.get(c)
            if entry is None:
                continue
            row, row_payload = entry
            self._axpy(v, f, row, heap, queued)
            if pl is not None and row_payload is not None:
                self._axpy(pl, f, row_payload)
        return v, pl

    def insert(self, vector: Mapping[int, object], payload: Mapping[int, object] | None = None) -> bool:
        """Add a vector; returns False when it already lies in the span"""
        v, pl = self.reduce(vector, payload)
        if not v:
            return False
        lead = min(v)
        lead_value = v[lead]
        if self.modulus is None:
            v = {k: x / lead_value for k, x in v.items()}
            if pl is not None:
                pl = {k: x / lead_value for k, x in pl.items()}
        else:
            inv = pow(lead_value, self.modulus - 2, self.modulus)
            v = {k: x * inv % self.modulus for k, x in v.items()}
            if pl is not None:
                pl = {k: x * inv % self.modulus for k, x in pl.items()}
        self._pivots[lead] = (v, pl)
        self._order.append(lead)
        return True

    def contains(self, vector: Mapping[int, object]) -> bool:
        remainder, _ = self.reduce(vector)
        return not remainder

    def image_of(self, vector: Mapping[int, object]) -> dict:
        """
        Payload image of a vector in the span (the tracked linear map applied to it)

        Raises:
            DimensionMismatchError: if the vector is outside the span
        """
        remainder, payload = self.reduce(vector, {})
        if remainder:
            raise DimensionMismatchError("vector is not in the span")
        p = self.modulus
        return {k: (-x) % p if p is not None else -x for k, x in payload.items()}

    def rows(self) -> list[dict]:
        return [self._pivots[c][0] for c in self._order]

    def pairs(self) -> list[tuple[dict, dict | None]]:
        """Stored rows with their reduced payloads"""
        return [self._pivots[c] for c in self._order]

    def pivot_columns(self) -> list[int]:
        return list(self._order)

    def kernel_of_rows(self) -> list[dict]:
        """Kernel basis of the stored rows seen as a matrix (free columns set to 1)"""
        pivots = sorted(self._pivots)
        pivot_set = set(pivots)
        kernel = []
        for f in range(self.dim):
            if f in pivot_set:
                continue
            x = {f: Fraction(1) if self.modulus is None else 1}
            for pc in reversed(pivots):
                row = self._pivots[pc][0]
                s = 0
                for c, v in row.items():
                    if c != pc and c in x:
                        s += v * x[c]
                if self.modulus is not None:
                    s %= self.modulus
                if s:
                    x[pc] = -s if self.modulus is None else (-s) % self.modulus
            kernel.append(x)
        return kernel


def rank_of_span(vectors: Iterable[Mapping[int, object]], dim: int | None = None,
                 modulus: int | None = None) -> int:
    """Exact rank of a family of sparse vectors (over F_p when modulus is set)"""
    basis = EchelonBasis(dim or 0, modulus)
    for v in vectors:
        basis.insert(v)
    return len(basis)


def exact_kernel(matrix: SparseMatrix) -> list[dict[int, Fraction]]:
    """Kernel basis over Q by exact elimination; meant for small systems"""
    basis = EchelonBasis(matrix.ncols)
    for row in matrix.row_dicts():
        if row:
            basis.insert(row)
            if len(basis) == matrix.ncols:
                break
    return basis.kernel_of_rows()


# ===== Certificates =====

@dataclass
class KernelCertificate:
    """
    Kernel basis with rank certificate

    Attributes:
        kernel_basis: Exact, verified, independent kernel vectors
        primes: Primes used for the upper bound
        ranks_mod_p: {prime: rank of M over F_p}
        kernel_dim_bounds: (lower, upper) for dim ker M over Q
        ncols: Number of unknowns
        exact_q: True when the system was also eliminated exactly over Q
    """
    kernel_basis: list[dict[int, Fraction]]
    primes: list[int]
    ranks_mod_p: dict[int, int]
    kernel_dim_bounds: tuple[int, int]
    ncols: int
    exact_q: bool = False
    notes: list[str] = field(default_factory=list)

    @property
    def conclusive(self) -> bool:
        return self.kernel_dim_bounds[0] == self.kernel_dim_bounds[1]

    @property
    def kernel_dim(self) -> int:
        return self.kernel_dim_bounds[0]

    @property
    def rank_over_q_bounds(self) -> tuple[int, int]:
        lower, upper = self.kernel_dim_bounds
        return self.ncols - upper, self.ncols - lower

    def to_dict(self) -> dict:
        return {
            'kernel_dim': self.kernel_dim,
            'primes': list(self.primes),
            'ranks_mod_p': {str(p): r for p, r in sorted(self.ranks_mod_p.items())},
            'kernel_dim_bounds': list(self.kernel_dim_bounds),
            'rank_over_q_bounds': list(self.rank_over_q_bounds),
            'unknowns': self.ncols,
            'conclusive': self.conclusive,
            'exact_q': self.exact_q,
            'notes': list(self.notes),
        }


def verify_kernel_vectors(matrix: SparseMatrix, candidates: Sequence[Mapping[int, Fraction]]) -> None:
    """
    Raises:
        KernelCertificateError: naming the first violated row of the first bad candidate
    """
    for n, v in enumerate(candidates):
        residual = matrix.residual(v)
        if residual:
            row = min(residual)
            raise KernelCertificateError(f"candidate #{n} violates row {row} (value {residual[row]})", row=row)


def certify_kernel(matrix: SparseMatrix, candidates: Sequence[Mapping[int, Fraction]],
                   primes: Sequence[int] | None = None, threads: int | None = None,
                   ranks: Mapping[int, int] | None = None) -> KernelCertificate:
    """
    Certify dim ker M from verified candidates and modular ranks

    Args:
        matrix: Constraint matrix
        candidates: Proposed kernel vectors (verified exactly here)
        primes: At least two primes (default: configured primes)
        threads: Worker threads for modular elimination
        ranks: Precomputed {prime: rank} to reuse

    Returns:
        KernelCertificate; conclusive when ncols - max rank_p = rank_Q(candidates)

    Raises:
        KernelCertificateError: if a candidate is not in the kernel
    """
    primes = list(primes or config.PRIMES[:getattr(config, 'MIN_CERTIFICATE_PRIMES', 2)])
    if len(set(primes)) < 2:
        raise ValueError("a certificate needs at least two distinct primes")
    for p in primes:
        if not isprime(p):
            raise ValueError(f"{p} is not prime")
    verify_kernel_vectors(matrix, candidates)
    basis = EchelonBasis(matrix.ncols)
    independent = [dict(v) for v in candidates if basis.insert(v)]
    ranks = dict(ranks or {})
    for p in primes:
        if p not in ranks:
            ranks[p] = kernel_mod_p(matrix, p, threads, with_kernel=False).rank
    upper = matrix.ncols - max(ranks[p] for p in primes)
    return KernelCertificate(
        kernel_basis=independent,
        primes=primes,
        ranks_mod_p={p: ranks[p] for p in primes},
        kernel_dim_bounds=(len(independent), upper),
        ncols=matrix.ncols,
    )


def solve_kernel(matrix: SparseMatrix, candidates: Sequence[Mapping[int, Fraction]] = (),
                 primes: Sequence[int] | None = None, threads: int | None = None,
                 require_conclusive: bool = True) -> KernelCertificate:
    """
    Full kernel pipeline: modular kernels, lifting, exact verification, certificate

    A third prime is tried when the first two leave the bounds apart.

    Raises:
        InconclusiveCertificateError: bounds still apart after every prime
            (only when require_conclusive)
    """
    all_primes = list(primes or config.PRIMES)
    n_min = getattr(config, 'MIN_CERTIFICATE_PRIMES', 2)
    n_max = min(getattr(config, 'MAX_CERTIFICATE_PRIMES', 3), len(all_primes))
    pool = list(candidates)
    exact_q = False
    if (matrix.ncols <= getattr(config, 'EXACT_Q_MAX_COLUMNS', 5000)
            and matrix.nnz <= getattr(config, 'EXACT_Q_MAX_ENTRIES', 40000)):
        pool.extend(exact_kernel(matrix))
        exact_q = True

    modular: list[ModularKernel] = []
    certificate = None
    for count in range(n_min, n_max + 1):
        while len(modular) < count:
            p = all_primes[len(modular)]
            logger.info(f"🧮 Eliminating {matrix.nrows} rows × {matrix.ncols} unknowns mod {p}...")
            modular.append(kernel_mod_p(matrix, p, threads))
        lifted = []
        for v in _lift_kernels(modular):
            if not matrix.residual(v):
                lifted.append(v)
            else:
                logger.warning("⚠️  Lifted modular kernel vector failed exact verification; skipped")
        certificate = certify_kernel(matrix, pool + lifted, [k.prime for k in modular], threads,
                                     ranks={k.prime: k.rank for k in modular})
        certificate.exact_q = exact_q
        if certificate.conclusive:
            break
        logger.warning(f"⚠️  Certificate inconclusive with {count} primes, bounds {certificate.kernel_dim_bounds}")

    if certificate.conclusive:
        logger.info(f"✅ Kernel dimension {certificate.kernel_dim} certified with primes {certificate.primes}")
    elif require_conclusive:
        lower, upper = certificate.kernel_dim_bounds
        raise InconclusiveCertificateError("kernel certificate inconclusive", lower, upper)
    return certificate


# ===== Span closure =====

@dataclass
class SpanClosure:
    """Smallest generator-invariant subspace containing the seeds"""
    basis: EchelonBasis
    ambient_dim: int
    seed_rank: int
    candidates_tried: int
    modulus: int | None

    @property
    def dim(self) -> int:
        return len(self.basis)

    @property
    def full(self) -> bool:
        return self.dim == self.ambient_dim

    def to_dict(self) -> dict:
        return {
            'dim': self.dim,
            'ambient_dim': self.ambient_dim,
            'seed_rank': self.seed_rank,
            'candidates_tried': self.candidates_tried,
            'field': 'Q' if self.modulus is None else f"F_{self.modulus}",
        }


def span_closure(seeds: Sequence[Mapping[int, object]], generators: Sequence, ambient_dim: int,
                 modulus: int | None = None, seed_payloads: Sequence[Mapping] | None = None,
                 payload_generators: Sequence | None = None, upper_bound: int | None = None,
                 threads: int | None = None) -> SpanClosure:
    """
    Close span(seeds) under a family of linear maps

    Generators are applied to the vectors as they were generated (not to the
    reduced basis rows), which keeps them sparse. Stops as soon as the span
    fills the ambient space.

    Args:
        seeds: Sparse seed vectors
        generators: Objects with apply_sparse(vector, modulus) (LinearOperator)
        ambient_dim: Dimension of the ambient space
        modulus: Prime for a modular closure, None for exact Q
        seed_payloads, payload_generators: Optional paired vectors and maps,
            kept in step with the seeds and generators
        upper_bound: Known bound on the closure dimension; stops once reached
        threads: Worker threads for the generator images of each vector;
            insertion order does not depend on it

    Returns:
        SpanClosure
    """
    tracking = seed_payloads is not None
    basis = EchelonBasis(ambient_dim, modulus)
    queue: deque = deque()
    for n, seed in enumerate(seeds):
        payload = seed_payloads[n] if tracking else None
        vec = {k: basis._normalize(x) for k, x in seed.items()}
        if tracking:
            payload = {k: basis._normalize(x) for k, x in payload.items()}
        if basis.insert(vec, payload):
            queue.append((vec, payload))
    seed_rank = len(basis)
    tried = 0
    limit = ambient_dim if upper_bound is None else min(upper_bound, ambient_dim)
    workers = config.resolve_threads(threads)
    pool = ThreadPoolExecutor(max_workers=workers) if workers > 1 and len(generators) > 1 else None

    def apply(generator, vec):
        return generator.apply_sparse(vec, modulus)

    try:
        while queue and len(basis) < limit:
            vec, payload = queue.popleft()
            if pool is not None:
                images = list(pool.map(apply, generators, repeat(vec)))
            else:
                images = [apply(g, vec) for g in generators]
            for g_index, image in enumerate(images):
                if not image:
                    continue
                image_payload = payload_generators[g_index].apply_sparse(payload, modulus) if tracking else None
                tried += 1
                if basis.insert(image, image_payload):
                    queue.append((image, image_payload))
                    if len(basis) == limit:
                        break
    finally:
        if pool is not None:
            pool.shutdown()
    logger.info(f"✅ Span closure: dimension {len(basis)} of {ambient_dim} (seed rank {seed_rank})")
    return SpanClosure(basis, ambient_dim, seed_rank, tried, modulus)
