"""Dense complex linear algebra for few-qubit joint systems.

Everything here works on plain ``numpy`` arrays of dtype ``complex128``.
Qubit ordering is big-endian: the leftmost tensor factor varies slowest.
"""

from __future__ import annotations

from functools import reduce
from typing import Callable, NamedTuple, Sequence

import numpy as np

HERMITIAN_TOL = 1e-10

SIGMA_X = np.array([[0, 1], [1, 0]], dtype=complex)
SIGMA_Y = np.array([[0, -1j], [1j, 0]], dtype=complex)
SIGMA_Z = np.array([[1, 0], [0, -1]], dtype=complex)
SIGMA_PLUS = np.array([[0, 1], [0, 0]], dtype=complex)  # (x + iy)/2, maps |1> to |0>
SIGMA_MINUS = np.array([[0, 0], [1, 0]], dtype=complex)
IDENTITY_2 = np.eye(2, dtype=complex)


class HermitianEigenSystem(NamedTuple):
    eigenvalues: np.ndarray
    eigenvectors: np.ndarray


def as_matrix(a) -> np.ndarray:
    m = np.asarray(a, dtype=complex)
    if m.ndim != 2 or m.shape[0] != m.shape[1] or m.shape[0] < 1:
        raise ValueError(f"expected a non-empty square matrix, got shape {m.shape}")
    return m


def kron(a, b) -> np.ndarray:
    return np.kron(as_matrix(a), as_matrix(b))


def kron_all(mats: Sequence) -> np.ndarray:
    if not mats:
        return np.eye(1, dtype=complex)
    return reduce(np.kron, [as_matrix(m) for m in mats])


def _check_dims(m: np.ndarray, dims: Sequence[int]) -> None:
    if int(np.prod(dims)) != m.shape[0]:
        raise ValueError(
            f"subsystem dims {list(dims)} (product {int(np.prod(dims))}) "
            f"do not match matrix dimension {m.shape[0]}"
        )


def partial_trace(rho, keep: Sequence[int], dims: Sequence[int]) -> np.ndarray:
    """Reduce ``rho`` onto the subsystems in ``keep``.

    Kept subsystems appear in ascending index order in the result, whatever
    the order of ``keep``.
    """
    m = as_matrix(rho)
    dims = [int(d) for d in dims]
    _check_dims(m, dims)
    keep = sorted(set(int(k) for k in keep))
    if not keep:
        raise ValueError("keep must name at least one subsystem")
    n = len(dims)
    if keep[0] < 0 or keep[-1] >= n:
        raise ValueError(f"subsystem index out of range for {n} subsystems: {keep}")
    t = m.reshape(dims + dims)
    # trace out from the highest index so remaining axis numbers stay valid
    current = n
    for i in reversed(range(n)):
        if i in keep:
            continue
        t = np.trace(t, axis1=i, axis2=i + current)
        current -= 1
    d = int(np.prod([dims[k] for k in keep]))
    return t.reshape(d, d)


def permute_subsystems(rho, perm: Sequence[int], dims: Sequence[int]) -> np.ndarray:
    """Reorder tensor factors so that new factor ``j`` is old factor ``perm[j]``."""
    m = as_matrix(rho)
    dims = [int(d) for d in dims]
    _check_dims(m, dims)
    n = len(dims)
    perm = [int(p) for p in perm]
    if sorted(perm) != list(range(n)):
        raise ValueError(f"not a permutation of {n} subsystems: {perm}")
    t = m.reshape(dims + dims).transpose(perm + [n + p for p in perm])
    return t.reshape(m.shape)


def hermiticity_residual(h) -> float:
    m = as_matrix(h)
    norm = np.linalg.norm(m)
    if norm == 0.0:
        return 0.0
    return float(np.linalg.norm(m - m.conj().T) / norm)


def is_hermitian(h, tol: float = HERMITIAN_TOL) -> bool:
    return hermiticity_residual(h) < tol


def herm_eig(h) -> HermitianEigenSystem:
    m = as_matrix(h)
    residual = hermiticity_residual(m)
    if residual >= HERMITIAN_TOL:
        raise ValueError(f"matrix is not Hermitian (relative residual {residual:.3e})")
    # symmetrize so eigh sees exactly Hermitian input
    w, v = np.linalg.eigh(0.5 * (m + m.conj().T))
    return HermitianEigenSystem(w, v)


def matrix_func(h, f: Callable[[np.ndarray], np.ndarray]) -> np.ndarray:
    """Apply a scalar function to a Hermitian matrix through its spectrum.

    ``f`` receives the real eigenvalue array and must return an array of the
    same length. Undefined values (``log(0)`` and the like) are the caller's
    problem.
    """
    w, v = herm_eig(h)
    fw = np.asarray(f(w))
    return (v * fw) @ v.conj().T


def commutator(a, b) -> np.ndarray:
    a = as_matrix(a)
    b = as_matrix(b)
    if a.shape != b.shape:
        raise ValueError(f"dimension mismatch: {a.shape} vs {b.shape}")
    return a @ b - b @ a


def nested_commutator(a, b, n: int) -> np.ndarray:
    """``[a, [a, ... [a, b]]]`` with ``n`` nested brackets."""
    if n < 1:
        raise ValueError("nesting order must be >= 1")
    out = as_matrix(b)
    for _ in range(n):
        out = commutator(a, out)
    return out


def frob_norm(a) -> float:
    return float(np.linalg.norm(as_matrix(a)))


def expectation(rho, op) -> complex:
    """``tr(rho @ op)`` without forming the product."""
    return complex(np.einsum("ij,ji->", as_matrix(rho), as_matrix(op)))
