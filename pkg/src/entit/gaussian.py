"""
Covariance-matrix engine for zero-mean Gaussian states.

Conventions
-----------
Quadratures are ordered (x1, p1, x2, p2, ...) with x = (a + a^dag)/sqrt(2),
so the vacuum has covariance 1/2 * identity. Mode labels in the public API
are 1-based, matching the four-mode layout of the two beam splitters
(modes 1-4 mix, modes 2-3 mix).
"""

from __future__ import annotations

import warnings
from dataclasses import dataclass, field

import numpy as np
from scipy.special import xlogy

SYM_TOL = 1e-12
PHYS_TOL = 1e-12

_SIGMA3 = np.diag([1.0, -1.0])
_ID2 = np.eye(2)


class UnphysicalCovarianceError(ValueError):
    pass


class GaussianFidelityWarning(UserWarning):
    """Fidelity formula evaluated with two mixed states."""


def symplectic_form(n_modes: int) -> np.ndarray:
    return np.kron(np.eye(n_modes), np.array([[0.0, 1.0], [-1.0, 0.0]]))


def symplectic_eigenvalues(matrix: np.ndarray) -> np.ndarray:
    """Sorted symplectic spectrum: moduli of the eigenvalues of i*Omega*Sigma."""
    n = matrix.shape[0] // 2
    ev = np.abs(np.linalg.eigvals(1j * symplectic_form(n) @ matrix))
    ev.sort()
    # eigenvalues come in +/- pairs
    return ev[::2]


@dataclass(frozen=True)
class QuadratureCovariance:
    """Symmetric second-moment matrix of an n-mode Gaussian state.

    Construction validates symmetry, positive definiteness and the
    uncertainty relation; pass ``check=False`` to skip it for
    intermediate matrices that are known to be physical.
    """

    matrix: np.ndarray
    check: bool = field(default=True, repr=False, compare=False)

    def __post_init__(self):
        m = np.array(self.matrix, dtype=float)
        if m.ndim != 2 or m.shape[0] != m.shape[1] or m.shape[0] % 2:
            raise UnphysicalCovarianceError(f"bad covariance shape {m.shape}")
        m.setflags(write=False)
        object.__setattr__(self, "matrix", m)
        if self.check:
            self.validate()

    @property
    def n_modes(self) -> int:
        return self.matrix.shape[0] // 2

    def validate(self) -> None:
        m = self.matrix
        asym = np.max(np.abs(m - m.T))
        if asym > SYM_TOL:
            raise UnphysicalCovarianceError(f"covariance not symmetric ({asym:.2e})")
        try:
            np.linalg.cholesky(m)
        except np.linalg.LinAlgError:
            raise UnphysicalCovarianceError("covariance not positive definite") from None
        nu = symplectic_eigenvalues(m)
        if nu.min() < 0.5 - PHYS_TOL:
            raise UnphysicalCovarianceError(
                f"uncertainty relation violated: min symplectic eigenvalue {nu.min():.6g}"
            )

    def block(self, h: int, k: int) -> np.ndarray:
        """2x2 block between modes h and k (1-based)."""
        return self.matrix[2 * (h - 1) : 2 * h, 2 * (k - 1) : 2 * k]

    def symplectic_eigenvalues(self) -> np.ndarray:
        return symplectic_eigenvalues(self.matrix)

    def determinant(self) -> float:
        return float(np.linalg.det(self.matrix))


@dataclass(frozen=True)
class SymplecticMap:
    """Phase-space matrix S acting as Sigma -> S^T Sigma S."""

    matrix: np.ndarray
    angles: tuple[float, float]

    def __post_init__(self):
        m = np.array(self.matrix, dtype=float)
        m.setflags(write=False)
        object.__setattr__(self, "matrix", m)

    def symplectic_defect(self) -> float:
        """max |S^T Omega S - Omega|."""
        om = symplectic_form(self.matrix.shape[0] // 2)
        return float(np.max(np.abs(self.matrix.T @ om @ self.matrix - om)))


@dataclass(frozen=True)
class ModePartition:
    kept: tuple[int, int]

    def __post_init__(self):
        h, k = self.kept
        if h == k or not {h, k} <= {1, 2, 3, 4}:
            raise ValueError(f"invalid mode pair {self.kept}")


def twb_covariance(r: float) -> QuadratureCovariance:
    """Covariance of the two-mode squeezed vacuum S(r)|0>.

    The off-diagonal blocks are +sinh(2r)/2 * sigma_3 on both sides.
    """
    c = np.cosh(2 * r) / 2
    s = np.sinh(2 * r) / 2
    m = np.block([[c * _ID2, s * _SIGMA3], [s * _SIGMA3, c * _ID2]])
    return QuadratureCovariance(m)


def vacuum_covariance(n_modes: int) -> QuadratureCovariance:
    return QuadratureCovariance(0.5 * np.eye(2 * n_modes))


def direct_sum(*covs: QuadratureCovariance) -> QuadratureCovariance:
    n = sum(c.matrix.shape[0] for c in covs)
    out = np.zeros((n, n))
    i = 0
    for c in covs:
        d = c.matrix.shape[0]
        out[i : i + d, i : i + d] = c.matrix
        i += d
    return QuadratureCovariance(out, check=False)


def four_mode_input_covariance(r: float, s: float) -> QuadratureCovariance:
    """Sigma_12(r) (+) Sigma_34(s)."""
    return direct_sum(twb_covariance(r), twb_covariance(s))


def bs_pair_symplectic(phi: float, psi: float) -> SymplecticMap:
    """Symplectic matrix of U_14(phi) x U_23(psi).

    Under Sigma -> S^T Sigma S the Heisenberg action is
    a1 -> a1 cos(phi) - a4 sin(phi), a4 -> a1 sin(phi) + a4 cos(phi),
    and likewise for (a2, a3) with psi.
    """
    c1, s1 = np.cos(phi), np.sin(phi)
    c2, s2 = np.cos(psi), np.sin(psi)
    z = np.zeros((2, 2))
    m = np.block(
        [
            [c1 * _ID2, z, z, s1 * _ID2],
            [z, c2 * _ID2, s2 * _ID2, z],
            [z, -s2 * _ID2, c2 * _ID2, z],
            [-s1 * _ID2, z, z, c1 * _ID2],
        ]
    )
    return SymplecticMap(m, (float(phi), float(psi)))


def evolve_covariance(cov: QuadratureCovariance, smap: SymplecticMap) -> QuadratureCovariance:
    if cov.matrix.shape != smap.matrix.shape:
        raise ValueError(
            f"dimension mismatch: covariance {cov.matrix.shape} vs map {smap.matrix.shape}"
        )
    s = smap.matrix
    out = s.T @ cov.matrix @ s
    return QuadratureCovariance(0.5 * (out + out.T))


def reduce(cov: QuadratureCovariance, part: ModePartition | tuple[int, int]) -> QuadratureCovariance:
    """Two-mode covariance [[Sigma]]_hk for the kept pair (h, k)."""
    if not isinstance(part, ModePartition):
        part = ModePartition(tuple(part))
    if cov.n_modes != 4:
        raise ValueError("reduce expects a four-mode covariance")
    h, k = part.kept
    idx = [2 * (h - 1), 2 * (h - 1) + 1, 2 * (k - 1), 2 * (k - 1) + 1]
    return QuadratureCovariance(cov.matrix[np.ix_(idx, idx)])


def partial_transpose(cov: QuadratureCovariance) -> np.ndarray:
    """Flip the momentum of the second mode of a two-mode covariance."""
    flip = np.diag([1.0, 1.0, 1.0, -1.0])
    return flip @ cov.matrix @ flip


def min_ppt_symplectic_eigenvalue(cov: QuadratureCovariance) -> float:
    """Smallest symplectic eigenvalue of the partially transposed state.

    The two-mode state is separable iff the result is >= 1/2.
    """
    if cov.n_modes != 2:
        raise ValueError("expected a two-mode covariance")
    if np.any(np.linalg.eigvalsh(cov.matrix) <= 0):
        raise UnphysicalCovarianceError("covariance not positive definite")
    return float(symplectic_eigenvalues(partial_transpose(cov)).min())


def purity(cov: QuadratureCovariance) -> float:
    """mu = (16 det Sigma)^(-1/2) for a two-mode state."""
    det = cov.determinant()
    if det <= 0:
        raise UnphysicalCovarianceError(f"non-positive determinant {det}")
    return float((16 * det) ** -0.5)


def entanglement_of_formation(kappa: float) -> float:
    """Entanglement of formation (nats) of a symmetric two-mode Gaussian state."""
    if kappa <= 0:
        raise ValueError(f"symplectic eigenvalue must be positive, got {kappa}")
    if kappa >= 0.5:
        return 0.0
    chi = (kappa**2 + 0.25) / (2 * kappa)
    # xlogy keeps 0 * log 0 = 0 when kappa rounds onto the threshold
    return float(xlogy(chi + 0.5, chi + 0.5) - xlogy(chi - 0.5, chi - 0.5))


def is_pure(cov: QuadratureCovariance, tol: float = 1e-9) -> bool:
    return abs(4**cov.n_modes * cov.determinant() - 1) < tol


def gaussian_fidelity(a: QuadratureCovariance, b: QuadratureCovariance) -> float:
    """F = det(Sigma_a + Sigma_b)^(-1/2), valid when either state is pure."""
    if a.matrix.shape != b.matrix.shape:
        raise ValueError("covariances of different size")
    if not (is_pure(a) or is_pure(b)):
        warnings.warn(
            "neither state is pure; determinant fidelity formula does not apply",
            GaussianFidelityWarning,
            stacklevel=2,
        )
    # symmetric sum keeps F(a, b) == F(b, a) bitwise
    det = np.linalg.det(a.matrix + b.matrix)
    if det <= 0:
        raise np.linalg.LinAlgError("singular covariance sum")
    return float(det**-0.5)
