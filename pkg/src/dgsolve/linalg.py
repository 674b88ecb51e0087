"""Dense linear-algebra core.

Problem instances, triangular and block splittings, LU solves with a
scale-invariant singularity cutoff, a Gelfand spectral-radius estimator and
the matrix-exponential flow of the preconditioned gradient system.

Everything here works on plain ``numpy.ndarray`` (float64).  Matrices are
2-D arrays, vectors are 1-D arrays.  Arrays stored on the dataclasses are
made read-only so instances can be shared freely.
"""

from __future__ import annotations

import enum
import math
import warnings
from dataclasses import dataclass, field
from typing import Sequence

import numpy as np
import scipy.linalg

from .errors import (
    DimensionMismatch,
    InvalidPartition,
    NotSpd,
    OutOfRange,
    Singular,
    SingularBlock,
)

PIVOT_RTOL = 1e-14


def _frozen(arr: np.ndarray) -> np.ndarray:
    arr.setflags(write=False)
    return arr


def as_vector(x, n: int | None = None, name: str = "x") -> np.ndarray:
    """Return ``x`` as a finite float64 vector, optionally of length ``n``."""
    v = np.asarray(x, dtype=np.float64)
    if v.ndim != 1:
        raise DimensionMismatch(f"{name} must be 1-D, got shape {v.shape}")
    if n is not None and v.shape[0] != n:
        raise DimensionMismatch(f"{name} has length {v.shape[0]}, expected {n}")
    if not np.all(np.isfinite(v)):
        raise ValueError(f"{name} has non-finite entries")
    return v


def as_matrix(m, name: str = "matrix", square: bool = True) -> np.ndarray:
    a = np.asarray(m, dtype=np.float64)
    if a.ndim != 2:
        raise DimensionMismatch(f"{name} must be 2-D, got shape {a.shape}")
    if square and a.shape[0] != a.shape[1]:
        raise DimensionMismatch(f"{name} must be square, got shape {a.shape}")
    if not np.all(np.isfinite(a)):
        raise ValueError(f"{name} has non-finite entries")
    return a


def certify_spd(m: np.ndarray, name: str = "matrix") -> np.ndarray:
    """Return the lower Cholesky factor of ``m`` or raise :class:`NotSpd`.

    Symmetry is checked exactly on the stored entries; positive
    definiteness is certified by the factorization succeeding.
    """
    a = as_matrix(m, name)
    if not np.array_equal(a, a.T):
        raise NotSpd(f"{name} is not exactly symmetric")
    try:
        chol = np.linalg.cholesky(a)
    except np.linalg.LinAlgError as exc:
        raise NotSpd(f"{name} is not positive definite ({exc})") from None
    if not np.all(np.isfinite(chol)) or np.any(np.diag(chol) <= 0.0):
        raise NotSpd(f"{name} is not positive definite")
    return chol


@dataclass(frozen=True, eq=False)
class SpdSystem:
    """Linear system ``a @ x = b`` with ``a`` symmetric positive definite.

    The exact solution is computed once from the Cholesky factor and cached
    as :attr:`solution`; it is the reference every solver is checked against.
    """

    a: np.ndarray
    b: np.ndarray
    chol: np.ndarray = field(init=False, repr=False)
    solution: np.ndarray = field(init=False, repr=False)

    def __post_init__(self):
        a = np.array(self.a, dtype=np.float64)
        chol = certify_spd(a, "A")
        b = np.array(as_vector(self.b, a.shape[0], "b"))
        y = scipy.linalg.solve_triangular(chol, b, lower=True)
        sol = scipy.linalg.solve_triangular(chol.T, y, lower=False)
        object.__setattr__(self, "a", _frozen(a))
        object.__setattr__(self, "b", _frozen(b))
        object.__setattr__(self, "chol", _frozen(chol))
        object.__setattr__(self, "solution", _frozen(sol))

    @property
    def n(self) -> int:
        return self.a.shape[0]

    def residual(self, x: np.ndarray) -> np.ndarray:
        return self.a @ x - self.b


@dataclass(frozen=True, eq=False)
class Splitting:
    """``A = D + L + U``; ``d`` holds the diagonal as a vector."""

    d: np.ndarray
    l: np.ndarray
    u: np.ndarray

    @property
    def dmat(self) -> np.ndarray:
        return np.diag(self.d)

    def reconstruct(self) -> np.ndarray:
        return self.dmat + self.l + self.u


def split(system: SpdSystem) -> Splitting:
    a = system.a
    return Splitting(
        d=_frozen(np.diag(a).copy()),
        l=_frozen(np.tril(a, -1)),
        u=_frozen(np.triu(a, 1)),
    )


@dataclass(frozen=True)
class LuFactor:
    """Partial-pivoting LU factorization as returned by :func:`lu_factor`."""

    lu: np.ndarray
    piv: np.ndarray

    def solve(self, rhs) -> np.ndarray:
        rhs = np.asarray(rhs, dtype=np.float64)
        if rhs.shape[0] != self.lu.shape[0]:
            raise DimensionMismatch(
                f"right-hand side has {rhs.shape[0]} rows, expected {self.lu.shape[0]}"
            )
        return scipy.linalg.lu_solve((self.lu, self.piv), rhs, check_finite=False)


def lu_factor(m) -> LuFactor:
    """Factor ``m`` with partial pivoting.

    Raises :class:`Singular` when a pivot magnitude falls below
    ``1e-14 * max|m_ij|``.
    """
    a = as_matrix(m)
    scale = float(np.max(np.abs(a))) if a.size else 0.0
    with warnings.catch_warnings():
        warnings.simplefilter("ignore", scipy.linalg.LinAlgWarning)
        lu, piv = scipy.linalg.lu_factor(a, check_finite=False)
    pivots = np.abs(np.diag(lu))
    threshold = PIVOT_RTOL * scale
    if scale == 0.0 or np.any(pivots < threshold) or np.any(pivots == 0.0):
        k = int(np.argmin(pivots))
        raise Singular(
            f"pivot {k} has magnitude {pivots[k]:.3e} below cutoff {threshold:.3e}"
        )
    return LuFactor(_frozen(lu), _frozen(piv))


def lu_solve(m, rhs) -> np.ndarray:
    """Solve ``m @ y = rhs`` by LU with partial pivoting.

    >>> lu_solve([[2.0, 1.0], [1.0, 2.0]], [3.0, 3.0])
    array([1., 1.])
    """
    return lu_factor(m).solve(rhs)


@dataclass(frozen=True, eq=False)
class BlockSplitting:
    """Contiguous block partition ``A = D_b + L_b + U_b``.

    ``boundaries`` are the 0-based start indices of every block except the
    first, so for n = 4 the partition {1,2},{3,4} is ``boundaries=(2,)``.
    Each diagonal block carries its LU factorization.
    """

    n: int
    boundaries: tuple[int, ...]
    slices: tuple[slice, ...]
    blocks: tuple[np.ndarray, ...]
    factors: tuple[LuFactor, ...]
    db: np.ndarray
    lb: np.ndarray
    ub: np.ndarray

    @property
    def p(self) -> int:
        return len(self.slices)

    def reconstruct(self) -> np.ndarray:
        return self.db + self.lb + self.ub

    def block_solve(self, i: int, rhs) -> np.ndarray:
        return self.factors[i].solve(rhs)


def check_boundaries(boundaries: Sequence[int], n: int) -> tuple[int, ...]:
    try:
        bounds = tuple(int(k) for k in boundaries)
    except (TypeError, ValueError):
        raise InvalidPartition(f"boundaries must be integers, got {boundaries!r}") from None
    if any(int(k) != k for k in boundaries):
        raise InvalidPartition(f"boundaries must be integers, got {boundaries!r}")
    prev = 0
    for k in bounds:
        if k <= prev or k >= n:
            raise InvalidPartition(
                f"boundaries {list(bounds)} must be strictly increasing within 1..{n - 1}"
            )
        prev = k
    return bounds


def block_split(system: SpdSystem, boundaries: Sequence[int]) -> BlockSplitting:
    n = system.n
    bounds = check_boundaries(boundaries, n)
    starts = (0,) + bounds
    ends = bounds + (n,)
    slices = tuple(slice(s, e) for s, e in zip(starts, ends))
    a = system.a
    db = np.zeros_like(a)
    lb = np.zeros_like(a)
    ub = np.zeros_like(a)
    blocks, factors = [], []
    for i, si in enumerate(slices):
        for j, sj in enumerate(slices):
            target = db if i == j else (lb if i > j else ub)
            target[si, sj] = a[si, sj]
        block = _frozen(a[si, si].copy())
        try:
            factors.append(lu_factor(block))
        except Singular as exc:
            raise SingularBlock(f"diagonal block {i} is singular: {exc}") from None
        blocks.append(block)
    return BlockSplitting(
        n=n,
        boundaries=bounds,
        slices=slices,
        blocks=tuple(blocks),
        factors=tuple(factors),
        db=_frozen(db),
        lb=_frozen(lb),
        ub=_frozen(ub),
    )


class PreconditionerKind(enum.Enum):
    IDENTITY = "identity"
    JACOBI = "jacobi"
    BLOCK_JACOBI = "block-jacobi"
    EXPLICIT = "explicit"


@dataclass(frozen=True, eq=False)
class Preconditioner:
    """The SPD matrix ``P`` of the gradient system ``x' = -P (A x - b)``.

    Use the constructors rather than instantiating directly.
    """

    kind: PreconditionerKind
    boundaries: tuple[int, ...] = ()
    explicit_matrix: np.ndarray | None = field(default=None, repr=False)

    @classmethod
    def identity(cls) -> "Preconditioner":
        return cls(PreconditionerKind.IDENTITY)

    @classmethod
    def jacobi(cls) -> "Preconditioner":
        return cls(PreconditionerKind.JACOBI)

    @classmethod
    def block_jacobi(cls, boundaries: Sequence[int]) -> "Preconditioner":
        return cls(PreconditionerKind.BLOCK_JACOBI, boundaries=tuple(int(k) for k in boundaries))

    @classmethod
    def explicit(cls, m) -> "Preconditioner":
        p = np.array(m, dtype=np.float64)
        certify_spd(p, "P")
        return cls(PreconditionerKind.EXPLICIT, explicit_matrix=_frozen(p))

    @property
    def is_diagonal(self) -> bool:
        return self.kind in (PreconditionerKind.IDENTITY, PreconditionerKind.JACOBI)

    def diagonal(self, system: SpdSystem) -> np.ndarray:
        """Diagonal of ``P`` for the identity and Jacobi kinds."""
        if self.kind is PreconditionerKind.IDENTITY:
            return np.ones(system.n)
        if self.kind is PreconditionerKind.JACOBI:
            return 1.0 / np.diag(system.a)
        raise ValueError(f"{self.kind.value} preconditioner is not diagonal")

    def matrix(self, system: SpdSystem) -> np.ndarray:
        n = system.n
        if self.is_diagonal:
            return np.diag(self.diagonal(system))
        if self.kind is PreconditionerKind.BLOCK_JACOBI:
            blocks = block_split(system, self.boundaries)
            p = np.zeros((n, n))
            for s, fac in zip(blocks.slices, blocks.factors):
                p[s, s] = fac.solve(np.eye(s.stop - s.start))
            return p
        if self.explicit_matrix.shape != (n, n):
            raise DimensionMismatch(
                f"P has shape {self.explicit_matrix.shape}, system has n={n}"
            )
        return np.array(self.explicit_matrix)


def spectral_radius(g, rtol: float = 1e-6, max_squarings: int = 24) -> float:
    """Estimate the spectral radius of ``g`` with Gelfand's formula.

    Uses ``rho ~ ||G^(2^m)||_F^(1/2^m)`` with the power renormalized after
    every squaring so nothing overflows.  Squaring stops once two successive
    estimates agree to ``rtol / 16`` (the estimate error is about twice
    the last change) or after ``max_squarings`` squarings.  Returns
    ``inf`` for matrices with non-finite entries.

    >>> round(spectral_radius([[0.5, 0.0], [0.0, -0.25]]), 9)
    0.5
    """
    b = np.array(g, dtype=np.float64)
    if b.ndim != 2 or b.shape[0] != b.shape[1]:
        raise DimensionMismatch(f"matrix must be square, got shape {b.shape}")
    if not np.all(np.isfinite(b)):
        return math.inf
    amax = float(np.max(np.abs(b)))
    if amax == 0.0:
        return 0.0
    b /= amax
    nrm = np.linalg.norm(b)
    log_power = math.log(amax) + math.log(nrm)
    b /= nrm
    estimate = math.exp(log_power)
    stop = rtol / 16.0
    for m in range(1, max_squarings + 1):
        b = b @ b
        nu = np.linalg.norm(b)
        if nu == 0.0:
            return 0.0
        if not math.isfinite(nu):
            return math.inf
        b /= nu
        log_power = 2.0 * log_power + math.log(nu)
        new = math.exp(log_power / 2.0**m)
        if abs(new - estimate) <= stop * new:
            return new
        estimate = new
    return estimate


def expm(m) -> np.ndarray:
    """Matrix exponential by scaling and squaring with a Taylor series.

    The scaled matrix has infinity norm at most 1/2 and the series runs
    until the next term is below double-precision relative size, which keeps
    the final absolute error well under 1e-12 for the flows used here.
    """
    a = as_matrix(m)
    n = a.shape[0]
    nrm = np.linalg.norm(a, np.inf)
    squarings = max(0, math.ceil(math.log2(nrm / 0.5))) if nrm > 0 else 0
    x = a / 2.0**squarings
    result = np.eye(n)
    term = np.eye(n)
    for k in range(1, 64):
        term = term @ x / k
        result += term
        if np.linalg.norm(term, np.inf) <= 1e-17 * np.linalg.norm(result, np.inf):
            break
    for _ in range(squarings):
        result = result @ result
    return result


def exact_flow(system: SpdSystem, p: Preconditioner, x0, t: float) -> np.ndarray:
    """Exact solution of ``x' = -P (A x - b)`` at time ``t``.

    ``x(t) = exp(-P A t) (x0 - A^{-1} b) + A^{-1} b``.
    """
    x0 = as_vector(x0, system.n, "x0")
    if not t >= 0.0:
        raise OutOfRange(f"time must be nonnegative, got {t}")
    if t == 0.0:
        return x0.copy()
    pa = p.matrix(system) @ system.a
    xs = system.solution
    return expm(-t * pa) @ (x0 - xs) + xs
