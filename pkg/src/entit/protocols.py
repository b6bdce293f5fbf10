"""
Protocol-level analyses: transparency and double swapping, separability
scans, fidelity expansions and the lossy-channel recovery curves.
"""

from __future__ import annotations

import csv
import math
import os
from concurrent.futures import ThreadPoolExecutor
from dataclasses import dataclass, field

import numpy as np

from . import fock
from . import gaussian as g

SCAN_HEADER = ("x", "kappa12", "kappa13")
RECOVERY_HEADER = ("s", "Ef", "purity")
WORKERS_ENV = "ENTIT_WORKERS"


@dataclass(frozen=True)
class BeamSplitterPair:
    phi: float = math.pi / 4
    psi: float = math.pi / 4

    @property
    def t14(self) -> float:
        return math.cos(self.phi) ** 2

    @property
    def t23(self) -> float:
        return math.cos(self.psi) ** 2

    @classmethod
    def balanced(cls) -> BeamSplitterPair:
        return cls(math.pi / 4, math.pi / 4)


@dataclass(frozen=True)
class LossChannel:
    """Both beam splitters with transmissivity 1 - gamma."""

    gamma: float

    def __post_init__(self):
        if not 0.0 <= self.gamma <= 1.0:
            raise ValueError(f"loss parameter must lie in [0, 1], got {self.gamma}")

    @property
    def angle(self) -> float:
        return math.acos(math.sqrt(1 - self.gamma))

    def pair(self) -> BeamSplitterPair:
        return BeamSplitterPair(self.angle, self.angle)


@dataclass(frozen=True)
class OutputTwbCoefficients:
    """Coefficients of a1a2, a3a4, a1a3, a2a4 (creation operators) in the output exponent."""

    c12: float
    c34: float
    c13: float
    c24: float

    def as_tuple(self) -> tuple[float, float, float, float]:
        return (self.c12, self.c34, self.c13, self.c24)

    def exponent_matrix(self) -> np.ndarray:
        c = np.zeros((4, 4))
        for (i, j), v in zip(((0, 1), (2, 3), (0, 2), (1, 3)), self.as_tuple()):
            c[i, j] = c[j, i] = v
        return c


def output_twb_coefficients(r: float, s: float, phi: float, psi: float) -> OutputTwbCoefficients:
    cp, sp = math.cos(phi), math.sin(phi)
    cq, sq = math.cos(psi), math.sin(psi)
    return OutputTwbCoefficients(
        c12=r * cp * cq + s * sp * sq,
        c34=r * sp * sq + s * cp * cq,
        c13=r * cp * sq - s * sp * cq,
        c24=r * sp * cq - s * cp * sq,
    )


def covariance_from_coefficients(coeffs: OutputTwbCoefficients) -> g.QuadratureCovariance:
    """Covariance of exp(sum c_ij a_i^dag a_j^dag - h.c.)|0>.

    For a symmetric exponent matrix C the state has <xx> = e^{2C}/2,
    <pp> = e^{-2C}/2 and no x-p correlations.
    """
    c = coeffs.exponent_matrix()
    w, v = np.linalg.eigh(c)
    xx = (v * np.exp(2 * w)) @ v.T / 2
    pp = (v * np.exp(-2 * w)) @ v.T / 2
    m = np.zeros((8, 8))
    m[0::2, 0::2] = xx
    m[1::2, 1::2] = pp
    return g.QuadratureCovariance(m)


def output_covariance(r: float, s: float, phi: float, psi: float) -> g.QuadratureCovariance:
    return g.evolve_covariance(g.four_mode_input_covariance(r, s), g.bs_pair_symplectic(phi, psi))


def exact_fidelity(r: float, s: float, phi: float, psi: float) -> float:
    """Fidelity between the input and output states of modes 1, 2."""
    red = g.reduce(output_covariance(r, s, phi, psi), (1, 2))
    return g.gaussian_fidelity(g.twb_covariance(r), red)


def _workers() -> int:
    try:
        cap = int(os.environ.get(WORKERS_ENV, "0"))
    except ValueError:
        cap = 0
    n = os.cpu_count() or 1
    return max(1, min(n, cap) if cap > 0 else n)


def _map_ordered(fn, items):
    items = list(items)
    workers = min(_workers(), len(items)) or 1
    if workers == 1:
        return [fn(x) for x in items]
    with ThreadPoolExecutor(max_workers=workers) as ex:
        return list(ex.map(fn, items))


def _scan_point(r, pair, x):
    cov = output_covariance(r, x * r, pair.phi, pair.psi)
    return (
        float(x),
        g.min_ppt_symplectic_eigenvalue(g.reduce(cov, (1, 2))),
        g.min_ppt_symplectic_eigenvalue(g.reduce(cov, (1, 3))),
    )


def default_x_grid(n: int = 81) -> np.ndarray:
    return np.linspace(-1.0, 1.0, n)


def separability_scan(r: float, x_grid=None, pair: BeamSplitterPair | None = None) -> np.ndarray:
    """Rows (x, kappa12, kappa13) with s = x * r."""
    if r <= 0:
        raise ValueError("r must be positive")
    pair = pair or BeamSplitterPair.balanced()
    x_grid = default_x_grid() if x_grid is None else x_grid
    rows = _map_ordered(lambda x: _scan_point(r, pair, x), x_grid)
    return np.array(rows, dtype=float).reshape(-1, 3)


def entangled_everywhere_interval(table: np.ndarray) -> tuple[float, float] | None:
    """Extent of the x values where both partitions are entangled."""
    both = (table[:, 1] < 0.5) & (table[:, 2] < 0.5)
    if not both.any():
        return None
    xs = table[both, 0]
    return float(xs.min()), float(xs.max())


def fidelity_expansion_sq(r: float, s: float, phi: float) -> float:
    """Second-order expansion in s - r at equal angles with bracket 3 + sin^2(phi) cos(2 phi)."""
    return 1 - 0.5 * (3 + math.sin(phi) ** 2 * math.cos(2 * phi)) * (s - r) ** 2


def fidelity_expansion_sq_corrected(r: float, s: float, phi: float) -> float:
    """Second-order expansion in s - r with the coefficient of the exact fidelity."""
    return 1 - (1 + math.cos(phi) ** 2) * math.sin(phi) ** 2 * (s - r) ** 2


def equal_angle_fidelity(r: float, s: float, phi: float) -> float:
    return 1 / (1 + (1 + math.cos(phi) ** 2) * math.sin(phi) ** 2 * math.sinh(r - s) ** 2)


def fidelity_expansion_bs(r: float, s: float, phi: float, psi: float) -> float:
    """First-order expansion in phi - psi around the equal-angle fidelity."""
    f = equal_angle_fidelity(r, s, phi)
    return f + f**2 * math.sin(2 * phi) * math.cos(phi) ** 2 * math.sinh(r - s) ** 2 * (phi - psi)


def loglog_slope(eps, errors) -> float:
    return float(np.polyfit(np.log(np.asarray(eps)), np.log(np.abs(np.asarray(errors))), 1)[0])


def expansion_errors_sq(r=0.5, phi=math.pi / 4, eps=(1e-1, 1e-2, 1e-3), expansion=fidelity_expansion_sq):
    return [abs(exact_fidelity(r, r + e, phi, phi) - expansion(r, r + e, phi)) for e in eps]


def expansion_errors_bs(r=0.7, s=0.3, phi=math.pi / 4, deltas=(1e-1, 1e-2, 1e-3)):
    return [abs(exact_fidelity(r, s, phi, phi + d) - fidelity_expansion_bs(r, s, phi, phi + d)) for d in deltas]


def default_s_grid(r: float, n: int = 51) -> np.ndarray:
    return np.linspace(0.0, 1.5 * r, n)


def _recovery_point(r, angle, s):
    red = g.reduce(output_covariance(r, s, angle, angle), (1, 2))
    return float(s), g.entanglement_of_formation(g.min_ppt_symplectic_eigenvalue(red)), g.purity(red)


def bath_recovery_curve(r: float, gamma: float, s_grid=None) -> np.ndarray:
    """Rows (s, E_f, purity) of the (1, 2) output of a lossy channel with an engineered bath."""
    angle = LossChannel(gamma).angle
    s_grid = default_s_grid(r) if s_grid is None else s_grid
    rows = _map_ordered(lambda s: _recovery_point(r, angle, s), s_grid)
    return np.array(rows, dtype=float).reshape(-1, 3)


@dataclass
class EntitReport:
    r: float
    s: float
    phi: float
    psi: float
    cutoff: int
    classification: str
    cm_roundtrip_error: float
    eigen_residual: float
    overlap_in: float
    overlap_swap: float
    fidelity: float
    fidelity_fock: float
    failures: list[str] = field(default_factory=list)

    @property
    def ok(self) -> bool:
        return not self.failures

    def lines(self) -> list[str]:
        return [
            f"r={self.r:g} s={self.s:g} phi={self.phi:.6g} psi={self.psi:.6g} cutoff={self.cutoff}",
            f"classification: {self.classification}",
            f"cm_roundtrip_error: {self.cm_roundtrip_error:.3e}",
            f"fock_eigen_residual: {self.eigen_residual:.3e}",
            f"overlap_with_input: {self.overlap_in:.12f}",
            f"overlap_with_swapped: {self.overlap_swap:.12f}",
            f"fidelity_gaussian: {self.fidelity:.12f}",
            f"fidelity_fock: {self.fidelity_fock:.12f}",
        ] + [f"FAILED: {f}" for f in self.failures]


def entit_report(
    r: float,
    s: float,
    pair: BeamSplitterPair | None = None,
    cutoff: int = fock.DEFAULT_CUTOFF,
    tol: float = 1e-8,
    cross_tol: float = 1e-6,
) -> EntitReport:
    """Run both engines on one configuration and classify the outcome.

    Eigenstate and overlap checks use the pair-sector truncation, the
    fidelity cross-check uses per-mode truncation (see :mod:`entit.fock`).
    """
    pair = pair or BeamSplitterPair.balanced()
    phi, psi = pair.phi, pair.psi
    cov_in = g.four_mode_input_covariance(r, s)
    cov_out = g.evolve_covariance(cov_in, g.bs_pair_symplectic(phi, psi))
    cm_err = float(np.max(np.abs(cov_out.matrix - cov_in.matrix)))

    state = fock.twb_pair_state(r, s, cutoff, truncation="sector")
    out = fock.apply_bs_pair_fock(state, phi, psi)
    eig = float(np.linalg.norm(out.amps - state.amps))
    ov_in = abs(fock.overlap(state, out))
    swapped = fock.twb_pair_state(r, r, cutoff, pairs=((1, 3), (2, 4)), truncation="sector")
    ov_swap = abs(fock.overlap(swapped, out))

    fid = g.gaussian_fidelity(g.twb_covariance(r), g.reduce(cov_out, (1, 2)))
    box = fock.apply_bs_pair_fock(fock.twb_pair_state(r, s, cutoff, truncation="box"), phi, psi)
    fid_fock = fock.pure_state_expectation(box, fock.twb_fock(r, cutoff), (1, 2))

    if eig < tol and cm_err < tol:
        label = "transparent"
    elif abs(1 - ov_swap) < tol:
        label = "swapped"
    else:
        label = "generic"

    failures = []
    if abs(fid - fid_fock) > cross_tol:
        failures.append(f"fidelity cross-check {abs(fid - fid_fock):.2e} > {cross_tol:g}")
    return EntitReport(r, s, phi, psi, cutoff, label, cm_err, eig, ov_in, ov_swap, fid, fid_fock, failures)


def write_table(path, header, rows) -> None:
    with open(path, "w", newline="") as fh:
        w = csv.writer(fh)
        w.writerow(header)
        for row in rows:
            w.writerow([repr(float(v)) for v in row])
