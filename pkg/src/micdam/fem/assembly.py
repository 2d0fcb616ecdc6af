"""Global assembly into a fixed CSR pattern and the direct sparse solve."""

from __future__ import annotations

import warnings
from collections.abc import Sequence
from concurrent.futures import ProcessPoolExecutor, ThreadPoolExecutor
from concurrent.futures.process import BrokenProcessPool
from dataclasses import dataclass
from functools import cache
from typing import Any

import numpy as np
import scipy.sparse as sp
from numpy.typing import NDArray
from scipy.sparse.linalg import MatrixRankWarning, splu

from micdam.errors import SingularSystem
from micdam.fem.element import ElementResult, element_residual_tangent
from micdam.types import ExecutorKind


@dataclass(frozen=True)
class SparsityPattern:
    """Symbolic phase: CSR structure and the scatter index of every element entry."""

    size: int
    indptr: NDArray[np.int64]
    indices: NDArray[np.int64]
    scatter: NDArray[np.int64]

    @classmethod
    def from_element_dofs(cls, element_dofs: NDArray[np.int64], size: int) -> SparsityPattern:
        n_local = element_dofs.shape[1]
        rows = np.repeat(element_dofs, n_local, axis=1).ravel()
        cols = np.tile(element_dofs, (1, n_local)).ravel()
        keys, scatter = np.unique(rows * size + cols, return_inverse=True)
        key_rows = keys // size
        indptr = np.searchsorted(key_rows, np.arange(size + 1)).astype(np.int64)
        return cls(size=size, indptr=indptr, indices=(keys % size).astype(np.int64), scatter=scatter)

    @property
    def nnz(self) -> int:
        return int(self.indices.size)

    def matrix(self, element_tangents: NDArray[np.float64]) -> sp.csr_matrix:
        data = np.bincount(self.scatter, weights=element_tangents.ravel(), minlength=self.nnz)
        return sp.csr_matrix((data, self.indices, self.indptr), shape=(self.size, self.size))


def scatter_vector(
    element_dofs: NDArray[np.int64], element_vectors: NDArray[np.float64], size: int
) -> NDArray[np.float64]:
    return np.bincount(element_dofs.ravel(), weights=element_vectors.ravel(), minlength=size)


ElementArguments = tuple[Any, ...]
"""Positional arguments of one ``element_residual_tangent`` call."""


def _evaluate_chunk(chunk: Sequence[ElementArguments]) -> list[ElementResult]:
    return [element_residual_tangent(*arguments) for arguments in chunk]


@cache
def _process_pool(workers: int) -> ProcessPoolExecutor:
    return ProcessPoolExecutor(max_workers=workers)


def map_elements(
    arguments: Sequence[ElementArguments], workers: int = 1, executor: ExecutorKind = "process"
) -> list[ElementResult]:
    """Evaluate every element, in element order regardless of worker count.

    Processes receive contiguous chunks, one per worker, from a pool that is
    kept alive across calls. Threads share the interpreter and only overlap
    inside numpy kernels.
    """
    if workers <= 1 or len(arguments) < 2:
        return _evaluate_chunk(arguments)
    if executor == "thread":
        with ThreadPoolExecutor(max_workers=workers) as threads:
            return list(threads.map(lambda a: element_residual_tangent(*a), arguments))
    bounds = np.linspace(0, len(arguments), min(workers, len(arguments)) + 1).astype(int)
    chunks = [arguments[lo:hi] for lo, hi in zip(bounds[:-1], bounds[1:], strict=True)]
    pool = _process_pool(workers)
    try:
        return [result for chunk in pool.map(_evaluate_chunk, chunks) for result in chunk]
    except BrokenProcessPool:
        _process_pool.cache_clear()
        raise


def assemble_results(
    pattern: SparsityPattern, element_dofs: NDArray[np.int64], results: Sequence[ElementResult]
) -> tuple[NDArray[np.float64], sp.csr_matrix]:
    """Scatter-add element residuals and tangents."""
    residuals = np.array([r.residual for r in results])
    tangents = np.array([r.tangent for r in results])
    return scatter_vector(element_dofs, residuals, pattern.size), pattern.matrix(tangents)


def linear_solve(tangent: sp.spmatrix, rhs: NDArray[np.float64]) -> NDArray[np.float64]:
    """Direct sparse LU solve.

    Raises:
        SingularSystem: If the factorization breaks down or the solution is not finite.
    """
    matrix = sp.csc_matrix(tangent)
    if matrix.shape[0] == 0:
        return np.zeros(0)
    try:
        with warnings.catch_warnings():
            warnings.simplefilter("error", MatrixRankWarning)
            solution = splu(matrix).solve(np.asarray(rhs, dtype=float))
    except (RuntimeError, MatrixRankWarning) as exc:
        raise SingularSystem(f"sparse factorization failed: {exc}", source="solver") from exc
    if not np.all(np.isfinite(solution)):
        raise SingularSystem("linear solve produced non-finite values", source="solver")
    scale = max(float(np.linalg.norm(rhs)), 1.0e-300)
    residual = float(np.linalg.norm(matrix @ solution - rhs)) / scale
    if residual > 1.0e-6:
        raise SingularSystem(
            "linear solve lost accuracy", source="solver", details={"relative_residual": residual}
        )
    return np.asarray(solution, dtype=float)
