"""Reflection matrices, covariance matrices, and weakly completely-S
certificates, all in exact rational arithmetic.

Columns of the rectangular reflection matrix R are the mean one-step gap
corrections on each boundary cell; the principal d-1 columns admit closed
forms, and the full matrix is obtained from the exact enumeration kernel.
"""

from __future__ import annotations

from dataclasses import dataclass
from fractions import Fraction
from itertools import combinations

import numpy as np

from .bbs import DynamicsParams
from .exactlin import format_fraction, solve_nonneg_feasible
from .gaps import BoundaryCell, BoundaryPartition, exact_kernel

POSITIVITY_DELTA = Fraction(1, 10**6)


def analytic_principal_reflection(j: int, eps: Fraction, capacity, d: int) -> tuple[Fraction, ...]:
    """Closed-form mean correction on the codimension-1 cell where only
    gap j vanishes (j is 1-based).

    c >= 2: (1-eps) * (..., 1-eps at j-1, eps at j, -1 at j+1, ...);
    c == 1: (1-eps) * (..., eps at j, -eps at j+1, ...).
    Entries falling outside 1..d-1 are dropped.
    """
    if not 1 <= j <= d - 1:
        raise ValueError(f"principal index must lie in 1..{d - 1}")
    eps = Fraction(eps)
    col = [Fraction(0)] * (d - 1)
    unit = capacity == 1
    if not unit:
        if j - 2 >= 0:
            col[j - 2] = (1 - eps) * (1 - eps)
        col[j - 1] = (1 - eps) * eps
        if j <= d - 2:
            col[j] = -(1 - eps)
    else:
        col[j - 1] = (1 - eps) * eps
        if j <= d - 2:
            col[j] = -(1 - eps) * eps
    return tuple(col)


def empirical_reflection(cell: BoundaryCell, params: DynamicsParams) -> tuple[Fraction, ...]:
    """Exact E[Delta W | W in cell] from the 2^d enumeration kernel at the
    cell representative; no sampling."""
    kernel = exact_kernel(cell.representative, params)
    mean = [Fraction(0)] * (params.d - 1)
    for delta, prob in kernel.items():
        for r, dw in enumerate(delta):
            mean[r] += prob * dw
    return tuple(mean)


def _tridiag(size: int, lower, diag, upper) -> list[list[Fraction]]:
    m = [[Fraction(0)] * size for _ in range(size)]
    for i in range(size):
        m[i][i] = Fraction(diag)
        if i + 1 < size:
            m[i + 1][i] = Fraction(lower)
            m[i][i + 1] = Fraction(upper)
    return m


def standard_matrices(d: int, eps: Fraction, capacity):
    """(Sigma_PT, R_PT, hatR) for dimension d-1.

    Sigma_PT = tridiag(-1, 2, -1), R_PT = tridiag(-1, 1, 0); hatR is
    eps * R_PT at unit capacity and tridiag(-1, eps, 1-eps) otherwise.
    (1-eps) * hatR equals the first d-1 columns of the rectangular R.
    """
    if d < 2:
        raise ValueError("need d >= 2")
    eps = Fraction(eps)
    size = d - 1
    sigma_pt = _tridiag(size, -1, 2, -1)
    r_pt = _tridiag(size, -1, 1, 0)
    if capacity == 1:
        hat = [[eps * x for x in row] for row in r_pt]
    else:
        hat = _tridiag(size, -1, eps, 1 - eps)
    return sigma_pt, r_pt, hat


@dataclass
class ReflectionData:
    """Full reflection package for one (d, eps, c)."""

    d: int
    eps: Fraction
    capacity: int | float | None
    partition: BoundaryPartition
    columns: list[tuple[Fraction, ...]]  # (d-1) x k, one column per cell
    sigma_pt: list[list[Fraction]]
    r_pt: list[list[Fraction]]
    hat_r: list[list[Fraction]]

    def hat_columns(self) -> list[tuple[Fraction, ...]]:
        return self.columns[: self.d - 1]

    def f_map(self) -> dict[int, frozenset[int]]:
        return self.partition.f_map()

    def to_json(self) -> dict:
        fmt = lambda m: [[format_fraction(x) for x in row] for row in m]
        cols = [[format_fraction(x) for x in col] for col in self.columns]
        return {
            "d": self.d,
            "eps": format_fraction(self.eps),
            "capacity": "inf" if self.capacity in (None, float("inf")) else int(self.capacity),
            "k": self.partition.k,
            "R_columns": cols,
            "hatR": fmt(self.hat_r),
            "Sigma_PT": fmt(self.sigma_pt),
            "R_PT": fmt(self.r_pt),
            "f": {str(c.id): sorted(c.f) for c in self.partition.cells},
        }


def build_reflection(partition: BoundaryPartition, params: DynamicsParams) -> ReflectionData:
    columns = [empirical_reflection(cell, params) for cell in partition.cells]
    sigma_pt, r_pt, hat = standard_matrices(params.d, params.eps_exact, params.capacity)
    return ReflectionData(
        params.d, params.eps_exact, params.capacity, partition, columns, sigma_pt, r_pt, hat
    )


@dataclass
class SCertificate:
    """Exact certificates that R is weakly completely-S with respect to f.

    lambdas maps each nonempty coordinate subset I to a strictly positive
    rational vector over I with (lambda' R_{I,J_I})_j >= 1 for all j in J_I;
    failures maps subsets to a human-readable infeasibility witness.
    """

    d: int
    lambdas: dict[frozenset[int], tuple[Fraction, ...]]
    failures: dict[frozenset[int], str]

    @property
    def feasible(self) -> bool:
        return not self.failures

    def to_json(self) -> dict:
        key = lambda I: ",".join(map(str, sorted(I)))
        return {
            "d": self.d,
            "feasible": self.feasible,
            "lambdas": {key(I): [format_fraction(x) for x in lam] for I, lam in self.lambdas.items()},
            "failures": {key(I): msg for I, msg in self.failures.items()},
        }


def _constraint_submatrix(
    columns: list[tuple[Fraction, ...]], f: dict[int, frozenset[int]], I: tuple[int, ...]
) -> tuple[list[int], list[list[Fraction]]]:
    """J_I = columns whose f(j) is contained in I; rows restricted to I.

    Returns (J_I as 1-based ids, A) with A[j][i] = R[I_i, J_j] transposed so
    each row of A is one constraint lambda' R_col >= 1.
    """
    iset = set(I)
    J = [j for j in sorted(f) if f[j] <= iset]
    A = [[columns[j - 1][i - 1] for i in I] for j in J]
    return J, A


def _solve_positive(A: list[list[Fraction]], delta: Fraction) -> list[Fraction] | None:
    """lambda >= delta with A lambda >= 1, via the shift lambda = mu + delta."""
    if not A:
        return [delta] * 0
    nvar = len(A[0])
    b = [Fraction(1) - delta * sum(row) for row in A]
    mu = solve_nonneg_feasible(A, b)
    if mu is None:
        return None
    return [m + delta for m in mu]


def weakly_completely_s(
    columns: list[tuple[Fraction, ...]],
    f: dict[int, frozenset[int]],
    d: int,
) -> SCertificate:
    """Exact weakly completely-S check for a (d-1) x k rational matrix.

    For every nonempty I in {1..d-1} solve the feasibility problem
    lambda_I > 0, (lambda_I' R_{I,J_I})_j >= 1 on J_I with an exact phase-1
    simplex.  Strict positivity is imposed as lambda >= 1e-6 first; if that
    fails, the relaxed lambda >= 0 problem is solved and nudged positive.
    """
    lambdas: dict[frozenset[int], tuple[Fraction, ...]] = {}
    failures: dict[frozenset[int], str] = {}
    coords = range(1, d)
    for size in coords:
        for I in combinations(coords, size):
            J, A = _constraint_submatrix(columns, f, I)
            if not J:
                lambdas[frozenset(I)] = tuple(Fraction(1) for _ in I)
                continue
            lam = _solve_positive(A, POSITIVITY_DELTA)
            if lam is None:
                relaxed = solve_nonneg_feasible(A, [Fraction(1)] * len(A))
                lam = _perturb_positive(A, relaxed) if relaxed is not None else None
            if lam is None:
                failures[frozenset(I)] = (
                    f"no positive lambda with lambda'R >= 1 on columns {J} (phase-1 infeasible)"
                )
            else:
                _check_certificate(A, lam)
                lambdas[frozenset(I)] = tuple(lam)
    return SCertificate(d, lambdas, failures)


def _perturb_positive(A: list[list[Fraction]], lam: list[Fraction]) -> list[Fraction] | None:
    """Nudge a feasible lambda >= 0 strictly positive while keeping A lam >= 1."""
    if all(x > 0 for x in lam):
        return lam
    slack = [sum(a * x for a, x in zip(row, lam)) - 1 for row in A]
    ones_effect = [sum(row) for row in A]
    step = None
    for s, e in zip(slack, ones_effect):
        if e >= 0:
            continue
        bound = s / (-e)
        step = bound if step is None else min(step, bound)
    if step is not None and step == 0:
        return None
    delta = POSITIVITY_DELTA if step is None else min(POSITIVITY_DELTA, step / 2)
    return [x + delta for x in lam]


def _check_certificate(A: list[list[Fraction]], lam: list[Fraction]) -> None:
    if any(x <= 0 for x in lam):
        raise AssertionError("certificate is not strictly positive")
    for row in A:
        if sum(a * x for a, x in zip(row, lam)) < 1:
            raise AssertionError("certificate violates a constraint")


def completely_s(matrix: list[list[Fraction]]) -> SCertificate:
    """Classical completely-S test for a square matrix, phrased as the
    weakly completely-S test with the identity cell map."""
    size = len(matrix)
    columns = [tuple(matrix[r][j] for r in range(size)) for j in range(size)]
    f = {j + 1: frozenset({j + 1}) for j in range(size)}
    return weakly_completely_s(columns, f, size + 1)


def srbm_reflection_certified(matrix: np.ndarray) -> SCertificate:
    """Certify an SRBM reflection matrix (floats allowed; converted exactly)."""
    rows = [[Fraction(float(x)) for x in row] for row in np.asarray(matrix)]
    return completely_s(rows)
