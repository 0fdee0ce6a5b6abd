"""Finite-chain eigenvalues of the Fibonacci operator, solved in-repo.

Nothing here depends on the trace map: the potential comes straight from
the rotation formula and eigenvalues from Sturm sign counts, so the results
can be used to check the band covers independently.
"""

from __future__ import annotations

import json
import math
from dataclasses import dataclass

import numpy as np

ALPHA = (math.sqrt(5.0) - 1.0) / 2.0
EIG_TOL = 1e-10
MAX_BISECTIONS = 200
SQUARE_GUARD = 10**7


class ConvergenceFailure(RuntimeError):
    def __init__(self, message: str, index: int):
        super().__init__(message)
        self.index = index


class TooLarge(ValueError):
    pass


@dataclass(frozen=True)
class FibonacciPotential:
    V: float
    omega: float
    values: np.ndarray  # V * chi_[1-alpha, 1)(n*alpha + omega mod 1), n = 1..N

    @property
    def N(self) -> int:
        return int(self.values.size)

    def pattern(self) -> list[int]:
        """0/1 symbols of the potential (1 where the site carries V)."""
        return [int(b) for b in rotation_pattern(self.omega, self.N)]


@dataclass(frozen=True)
class ChainSpectrum:
    N: int
    eigenvalues: np.ndarray
    boundary: str

    def to_dict(self) -> dict:
        return {"N": self.N, "boundary": self.boundary, "eigenvalues": self.eigenvalues.tolist()}

    def to_json(self) -> str:
        return json.dumps(self.to_dict())


def rotation_pattern(omega: float, N: int) -> np.ndarray:
    # nα + ω mod 1 stays >= ~1/(3n) away from 1-α and from 0 for n <= 1e6,
    # far beyond the ~n * 1e-16 rounding error of double precision.
    n = np.arange(1, N + 1, dtype=float)
    frac = np.mod(n * ALPHA + omega, 1.0)
    return (frac >= 1.0 - ALPHA) & (frac < 1.0)


def potential(V: float, omega: float, N: int) -> FibonacciPotential:
    if N < 1:
        raise ValueError("N must be >= 1")
    vals = V * rotation_pattern(omega, N).astype(float)
    vals.setflags(write=False)
    return FibonacciPotential(float(V), float(omega), vals)


def fibonacci_word(length: int) -> str:
    """Prefix of the fixed point of a -> ab, b -> a."""
    w = "a"
    while len(w) < length:
        w = "".join("ab" if c == "a" else "a" for c in w)
    return w[:length]


def sturm_count(diag: np.ndarray, off: np.ndarray, lam) -> np.ndarray:
    """Number of eigenvalues strictly below each lam for a symmetric tridiagonal matrix."""
    lam = np.atleast_1d(np.asarray(lam, dtype=float))
    count, _ = _ldl_sweep(diag, off, lam)
    return count


def _ldl_sweep(diag, off, lam, border=None):
    """Pivots of T - lam; optionally also y^T D^-1 y for y = L^-1 border."""
    off2 = np.asarray(off, dtype=float) ** 2
    count = np.zeros(lam.shape, dtype=np.int64)
    tiny = np.finfo(float).tiny ** 0.5
    q = diag[0] - lam
    q = np.where(q == 0.0, -tiny, q)
    count += q < 0
    quad = None
    if border is not None:
        y = np.full(lam.shape, border[0])
        quad = y * y / q
    for i in range(1, diag.size):
        if border is not None:
            # multiplier l_{i-1} = off[i-1] / q_{i-1}
            y = border[i] - off[i - 1] / q * y
        q = diag[i] - lam - off2[i - 1] / q
        q = np.where(q == 0.0, -tiny, q)
        count += q < 0
        if border is not None:
            quad = quad + y * y / q
    return count, quad


def _periodic_count(diag, off, corner, lam):
    """Eigenvalue count below lam for a tridiagonal matrix plus corner entries.

    Order the last site as a border: A - lam = [[T - lam, b], [b^T, d - lam]]
    with T the leading (N-1) tridiagonal block and b = (corner, 0, ..., 0,
    off[-2]).  By Sylvester's law of inertia the negative count of A - lam is
    that of T - lam plus one if the Schur complement
    d - lam - b^T (T - lam)^{-1} b is negative.
    """
    n = diag.size
    border = np.zeros(n - 1)
    border[0] += corner
    border[-1] += off[-2]
    count, quad = _ldl_sweep(diag[:-1], off[:-2], lam, border)
    schur = diag[-1] - lam - quad
    return count + (schur < 0)


def _bisect_all(counter, N: int, lo: float, hi: float, tol: float) -> np.ndarray:
    idx = np.arange(N)
    a = np.full(N, lo)
    b = np.full(N, hi)
    for _ in range(MAX_BISECTIONS):
        if np.all(b - a <= tol):
            return 0.5 * (a + b)
        mid = 0.5 * (a + b)
        below = counter(mid) <= idx
        a = np.where(below, mid, a)
        b = np.where(below, b, mid)
    bad = int(np.argmax(b - a > tol))
    raise ConvergenceFailure(f"bisection for eigenvalue {bad} did not reach tol={tol}", bad)


def tridiagonal_eigenvalues(diag, off, periodic: bool = False, tol: float = EIG_TOL) -> np.ndarray:
    """All eigenvalues (ascending) of a real symmetric (periodic) tridiagonal matrix.

    ``off[i]`` couples sites i and i+1; with ``periodic=True`` an extra entry
    ``off[-1]`` couples the last site back to the first, so ``off`` has N
    entries instead of N-1.
    """
    diag = np.asarray(diag, dtype=float)
    off = np.asarray(off, dtype=float)
    N = diag.size
    if N == 0:
        return np.empty(0)
    if periodic:
        if off.size != N:
            raise ValueError("periodic chain needs N off-diagonal entries")
        if N == 1:
            return np.array([diag[0] + 2.0 * off[0]])
        if N == 2:
            return tridiagonal_eigenvalues(diag, np.array([off[0] + off[1]]), tol=tol)
    elif off.size != N - 1:
        raise ValueError("open chain needs N-1 off-diagonal entries")

    radius = np.zeros(N)
    if periodic:
        radius += np.abs(off) + np.abs(np.roll(off, 1))
    else:
        radius[:-1] += np.abs(off)
        radius[1:] += np.abs(off)
    lo = float(np.min(diag - radius)) - tol
    hi = float(np.max(diag + radius)) + tol

    if periodic:
        def counter(lam):
            return _periodic_count(diag, off, off[-1], lam)
    else:
        def counter(lam):
            return _ldl_sweep(diag, off, lam)[0]
    return _bisect_all(counter, N, lo, hi, tol)


def chain_eigenvalues(pot: FibonacciPotential, boundary: str = "dirichlet",
                      tol: float = EIG_TOL) -> ChainSpectrum:
    boundary = boundary.lower()
    N = pot.N
    if boundary == "dirichlet":
        eig = tridiagonal_eigenvalues(pot.values, np.ones(N - 1), tol=tol)
    elif boundary == "periodic":
        eig = tridiagonal_eigenvalues(pot.values, np.ones(N), periodic=True, tol=tol)
    else:
        raise ValueError(f"unknown boundary {boundary!r}")
    return ChainSpectrum(N, eig, boundary)


def square_spectrum(s: ChainSpectrum) -> np.ndarray:
    """Sorted pairwise sums: the spectrum of the N x N square-lattice truncation."""
    lam = s.eigenvalues
    if lam.size ** 2 > SQUARE_GUARD:
        raise TooLarge(f"{lam.size}^2 pairwise sums exceed the guard {SQUARE_GUARD}")
    return np.sort((lam[:, None] + lam[None, :]).ravel())
