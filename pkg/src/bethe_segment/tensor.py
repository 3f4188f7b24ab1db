"""Dense complex linear algebra on the 2^N quantum space.

Basis convention: lexicographic tensor basis, site 1 is the leftmost Kronecker
factor and spin-up is the first component of each local ``C^2``. The all-up
state is therefore the first basis vector.
"""

from __future__ import annotations

import os
from functools import reduce

import numpy as np

SIGMA_Z = np.array([[1, 0], [0, -1]], dtype=complex)
SIGMA_PLUS = np.array([[0, 1], [0, 0]], dtype=complex)
SIGMA_MINUS = np.array([[0, 0], [1, 0]], dtype=complex)
SIGMA_X = SIGMA_PLUS + SIGMA_MINUS
SIGMA_Y = 1j * (SIGMA_MINUS - SIGMA_PLUS)
ID2 = np.eye(2, dtype=complex)

# Tolerance policy
OPERATOR_TOL = 1e-10
FINITE_DIFF_TOL = 1e-8

# Dimension caps: operator builds and full eigensolves
MAX_OPERATOR_SITES = 8
MAX_EIGEN_SITES = 6

TOL_ENV_VAR = "BETHE_SEGMENT_TOL"


class DimensionError(ValueError):
    """Raised when an operator build would exceed the configured size cap."""


def operator_tol() -> float:
    """Default operator-identity tolerance, honouring ``BETHE_SEGMENT_TOL``."""
    raw = os.environ.get(TOL_ENV_VAR)
    if raw is None or raw.strip() == "":
        return OPERATOR_TOL
    try:
        value = float(raw)
    except ValueError as exc:
        raise ValueError(f"{TOL_ENV_VAR}={raw!r} is not a decimal number") from exc
    if not value > 0:
        raise ValueError(f"{TOL_ENV_VAR} must be positive, got {raw!r}")
    return value


def check_sites(n: int, cap: int = MAX_OPERATOR_SITES) -> None:
    if n < 0:
        raise ValueError(f"number of sites must be >= 0, got {n}")
    if n > cap:
        raise DimensionError(f"{n} sites exceeds the cap of {cap} (dimension 2^{cap})")


def kron(*blocks: np.ndarray) -> np.ndarray:
    """Kronecker product of any number of blocks, left to right."""
    if not blocks:
        return np.eye(1, dtype=complex)
    return reduce(np.kron, blocks)


def identity(n: int) -> np.ndarray:
    check_sites(n)
    return np.eye(2**n, dtype=complex)


def embed_local(op2: np.ndarray, site: int, n: int) -> np.ndarray:
    """Place the 2x2 matrix ``op2`` on ``site`` (1-based) of an ``n``-site chain."""
    check_sites(n)
    if not 1 <= site <= n:
        raise ValueError(f"site {site} out of range 1..{n}")
    op2 = np.asarray(op2, dtype=complex)
    if op2.shape != (2, 2):
        raise ValueError(f"local operator must be 2x2, got {op2.shape}")
    left = np.eye(2 ** (site - 1), dtype=complex)
    right = np.eye(2 ** (n - site), dtype=complex)
    return np.kron(np.kron(left, op2), right)


def total_spin_z(n: int) -> np.ndarray:
    """J^z = (1/2) sum_i sigma^z_i, diagonal in the computational basis."""
    if n < 1:
        raise ValueError("total_spin_z needs n >= 1")
    check_sites(n)
    return np.diag(0.5 * sector_magnetization(n)).astype(complex)


def sector_magnetization(n: int) -> np.ndarray:
    """Number of up spins minus down spins for each basis state."""
    idx = np.arange(2**n)
    downs = np.array([bin(i).count("1") for i in idx])
    return (n - 2 * downs).astype(float)


def sector_labels(n: int) -> np.ndarray:
    """Sector index M (number of down spins) for each basis state."""
    return np.array([bin(i).count("1") for i in range(2**n)])


def sector_projection(vec: np.ndarray, n: int, m: int) -> np.ndarray:
    """Component of ``vec`` in the J^z sector with ``m`` down spins."""
    mask = sector_labels(n) == m
    out = np.zeros_like(vec)
    out[mask] = vec[mask]
    return out


def spectrum(op: np.ndarray, cap: int = MAX_EIGEN_SITES) -> np.ndarray:
    """All eigenvalues of a general complex square matrix.

    Raises ``np.linalg.LinAlgError`` with the trace mismatch when LAPACK
    returns eigenvalues inconsistent with the trace.
    """
    op = np.asarray(op, dtype=complex)
    if op.ndim != 2 or op.shape[0] != op.shape[1]:
        raise ValueError(f"expected a square matrix, got shape {op.shape}")
    if op.shape[0] > 2**cap:
        raise DimensionError(f"dimension {op.shape[0]} exceeds eigen cap 2^{cap}")
    vals = np.linalg.eigvals(op)
    tr = np.trace(op)
    scale = max(1.0, float(np.sum(np.abs(vals))))
    achieved = abs(np.sum(vals) - tr) / scale
    if not np.all(np.isfinite(vals)) or achieved > 1e-8:
        raise np.linalg.LinAlgError(
            f"eigensolver did not converge: trace residual {achieved:.3e}"
        )
    return vals


def residual(lhs: np.ndarray, rhs: np.ndarray) -> float:
    """Relative Frobenius distance ||lhs - rhs|| / max(1, ||lhs||, ||rhs||)."""
    lhs = np.asarray(lhs)
    rhs = np.asarray(rhs)
    if lhs.shape != rhs.shape:
        raise ValueError(f"dimension mismatch: {lhs.shape} vs {rhs.shape}")
    diff = float(np.linalg.norm(lhs - rhs))
    if diff == 0.0:
        return 0.0
    scale = max(1.0, float(np.linalg.norm(lhs)), float(np.linalg.norm(rhs)))
    return diff / scale


def relative_residual(lhs: np.ndarray, rhs: np.ndarray) -> float:
    """Frobenius distance scaled by the larger norm only (no floor at 1).

    Used where the compared quantities may be uniformly tiny, as happens for
    products of many rational factors.
    """
    diff = float(np.linalg.norm(np.asarray(lhs) - np.asarray(rhs)))
    if diff == 0.0:
        return 0.0
    scale = max(float(np.linalg.norm(lhs)), float(np.linalg.norm(rhs)))
    return diff / scale if scale > 0 else diff


def commutator(a: np.ndarray, b: np.ndarray) -> np.ndarray:
    return a @ b - b @ a


def basis_vector(n: int, index: int) -> np.ndarray:
    check_sites(n)
    vec = np.zeros(2**n, dtype=complex)
    vec[index] = 1.0
    return vec
