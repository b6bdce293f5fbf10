"""
Four-qubit counterpart: Pauli-pair unitaries on qubits (1, 4) and (2, 3)
and the invariance of doubled two-qubit states under remote inversion.

Qubit order of every 16-vector is (1, 2, 3, 4), most significant first.
"""

from __future__ import annotations

import math
from dataclasses import dataclass
from functools import reduce

import numpy as np
from scipy.linalg import expm

PAULI = (
    np.eye(2, dtype=complex),
    np.array([[0, 1], [1, 0]], dtype=complex),
    np.array([[0, -1j], [1j, 0]], dtype=complex),
    np.array([[1, 0], [0, -1]], dtype=complex),
)
BRANCH_TOL = 1e-9

_S2 = 1 / math.sqrt(2)
BELL = {
    "phi+": np.array([_S2, 0, 0, _S2]),
    "phi-": np.array([_S2, 0, 0, -_S2]),
    "psi+": np.array([0, _S2, _S2, 0]),
    "psi-": np.array([0, _S2, -_S2, 0]),
}


def _kron(*ops):
    return reduce(np.kron, ops)


def _angles(x) -> np.ndarray:
    a = np.asarray(x, dtype=float)
    if a.shape != (4,) or not np.all(np.isfinite(a)):
        raise ValueError(f"expected four finite angles, got {x!r}")
    return a


def _g(k: int, n: int, m: int) -> int:
    if n == m:
        return 0
    if k != n and k != m:
        return 1
    return -1


def gk_coefficients(x) -> np.ndarray:
    """(G0, G1, G2, G3) with exp(-i sum_k x_k s_k (x) s_k) = G0 * 1 - sum_k G_k s_k (x) s_k."""
    x = _angles(x)
    pref = np.exp(-1j * (x[0] - x[1] - x[2] - x[3])) / 4
    out = np.empty(4, dtype=complex)
    for k in range(4):
        acc = 1.0 + 0j
        for n in range(1, 4):
            for m in range(1, 4):
                acc += 0.5 * _g(k, n, m) * np.exp(-2j * (x[n] + x[m]))
        out[k] = pref * acc
    return out


def pauli_pair_exponential(x) -> np.ndarray:
    """Brute-force 4x4 exp(-i sum_k x_k s_k (x) s_k)."""
    x = _angles(x)
    return expm(-1j * sum(x[k] * np.kron(PAULI[k], PAULI[k]) for k in range(4)))


def operator_from_gk(gk) -> np.ndarray:
    return gk[0] * np.eye(4) - sum(gk[k] * np.kron(PAULI[k], PAULI[k]) for k in range(1, 4))


def u14(theta) -> np.ndarray:
    gk = gk_coefficients(theta)
    i2 = PAULI[0]
    return gk[0] * np.eye(16) - sum(gk[k] * _kron(PAULI[k], i2, i2, PAULI[k]) for k in range(1, 4))


def u23(phi) -> np.ndarray:
    gk = gk_coefficients(phi)
    i2 = PAULI[0]
    return gk[0] * np.eye(16) - sum(gk[k] * _kron(i2, PAULI[k], PAULI[k], i2) for k in range(1, 4))


def u14_exponential(theta) -> np.ndarray:
    theta = _angles(theta)
    i2 = PAULI[0]
    return expm(-1j * sum(theta[k] * _kron(PAULI[k], i2, i2, PAULI[k]) for k in range(4)))


def u23_exponential(phi) -> np.ndarray:
    phi = _angles(phi)
    i2 = PAULI[0]
    return expm(-1j * sum(phi[k] * _kron(i2, PAULI[k], PAULI[k], i2) for k in range(4)))


def remote_unitary(theta, phi) -> np.ndarray:
    """U(theta, phi) = U_14(theta) U_23(phi)."""
    return u14(theta) @ u23(phi)


def ket_from_matrix(c) -> np.ndarray:
    """|C>> = sum_ij C_ij |i>|j>."""
    return np.asarray(c, dtype=complex).reshape(-1)


def from_pairs_14_23(v14_23) -> np.ndarray:
    """Reorder a vector given in qubit order (1, 4, 2, 3) to (1, 2, 3, 4)."""
    t = np.asarray(v14_23).reshape(2, 2, 2, 2)
    return t.transpose(0, 2, 3, 1).reshape(16)


def pauli_pair_state(k: int) -> np.ndarray:
    """|s_k/sqrt2>>_14 |s_k/sqrt2>>_23 in qubit order (1, 2, 3, 4); k=2 uses i*s_2."""
    m = PAULI[k] * (1j if k == 2 else 1) / math.sqrt(2)
    v = ket_from_matrix(m)
    return from_pairs_14_23(np.kron(v, v))


_BRACKET_SIGNS = {0: (1, -1, 1, -1), 1: (1, -1, -1, 1), 2: (1, 1, 1, 1), 3: (1, 1, -1, -1)}


def pauli_pair_eigenvalue(k: int, theta, phi) -> complex:
    """Eigenvalue of U(theta, phi) on :func:`pauli_pair_state` (k)."""
    sg = np.array(_BRACKET_SIGNS[k])
    return complex(np.dot(sg, gk_coefficients(theta)) * np.dot(sg, gk_coefficients(phi)))


@dataclass(frozen=True)
class TwoQubitAmplitudes:
    """Real amplitudes a[h, k] of sum a_hk |hk>."""

    a: np.ndarray

    def __post_init__(self):
        a = np.array(self.a, dtype=float).reshape(2, 2)
        if abs(np.sum(a**2) - 1) > 1e-12:
            raise ValueError(f"amplitudes not normalised: sum a^2 = {np.sum(a**2)}")
        a.setflags(write=False)
        object.__setattr__(self, "a", a)

    @classmethod
    def normalised(cls, a) -> TwoQubitAmplitudes:
        a = np.asarray(a, dtype=float)
        return cls(a / np.linalg.norm(a))

    def vector(self) -> np.ndarray:
        return self.a.reshape(4).astype(complex)


def doubled_state(psi) -> np.ndarray:
    """|psi>_12 (x) |psi>_34."""
    v = psi.vector() if isinstance(psi, TwoQubitAmplitudes) else np.asarray(psi, dtype=complex).reshape(4)
    return np.kron(v, v)


def invariance_residual(psi, theta, phi) -> tuple[float, float]:
    """(|| U|Psi> - |Psi> ||, min over gamma of || U|Psi> - e^{i gamma}|Psi> ||)."""
    v = doubled_state(psi)
    w = remote_unitary(theta, phi) @ v
    exact = float(np.linalg.norm(w - v))
    ov = np.vdot(v, w)
    # optimal phase aligns with the overlap; for unit vectors the minimum is sqrt(2 - 2|<v|w>|)
    phase = ov / abs(ov) if abs(ov) > 0 else 1.0
    return exact, float(np.linalg.norm(w - phase * v))


def bell_invariance_residual(bell: str, theta) -> float:
    theta = _angles(theta)
    return invariance_residual(BELL[bell], theta, -theta)[0]


# --- zoology ------------------------------------------------------------------


def _free(rng):
    return rng.uniform(-math.pi, math.pi, 4)


def _tied(i, j, sign):
    def sample(rng):
        t = _free(rng)
        t[j] = sign * t[i]
        return t

    def holds(t, tol=BRANCH_TOL):
        return abs(t[j] - sign * t[i]) <= tol

    return sample, holds


def _zero_sample(rng):
    t = np.zeros(4)
    t[0] = rng.uniform(-math.pi, math.pi)
    return t


def _zero_holds(t, tol=BRANCH_TOL):
    return bool(np.all(np.abs(t[1:]) <= tol))


@dataclass(frozen=True)
class ZoologyConstraint:
    """Invariance branch of a doubled real two-qubit state under phi = -theta.

    ``constraint`` is a readable relation on theta (``"none"`` for Bell
    inputs); ``sample`` draws theta satisfying it and ``holds`` tests it.
    """

    branch: str
    constraint: str
    sample: object
    holds: object

    def __repr__(self):
        return f"ZoologyConstraint({self.branch!r}, {self.constraint!r})"


def _make(branch, constraint, pair):
    return ZoologyConstraint(branch, constraint, *pair)


BRANCHES = {
    "bell": _make("bell", "none", (_free, lambda t, tol=BRANCH_TOL: True)),
    "basis-diagonal": _make("basis-diagonal", "theta1=theta2", _tied(1, 2, 1)),
    "basis-antidiagonal": _make("basis-antidiagonal", "theta1=-theta2", _tied(1, 2, -1)),
    "two-term-diagonal": _make("two-term-diagonal", "theta1=theta2", _tied(1, 2, 1)),
    "two-term-antidiagonal": _make("two-term-antidiagonal", "theta1=-theta2", _tied(1, 2, -1)),
    "four-term-pp": _make("four-term-pp", "theta2=theta3", _tied(2, 3, 1)),
    "four-term-mm": _make("four-term-mm", "theta2=-theta3", _tied(2, 3, -1)),
    "four-term-mp": _make("four-term-mp", "theta1=theta3", _tied(1, 3, 1)),
    "four-term-pm": _make("four-term-pm", "theta1=-theta3", _tied(1, 3, -1)),
    "other": _make("other", "theta=0", (_zero_sample, _zero_holds)),
}


def _is_bell(a, tol):
    return any(
        np.allclose(a.reshape(4), sign * b, atol=tol, rtol=0) for b in BELL.values() for sign in (1, -1)
    )


def zoology_constraints(psi: TwoQubitAmplitudes, tol: float = BRANCH_TOL) -> ZoologyConstraint:
    """Classify a real two-qubit state into its invariance branch, most specific first."""
    a = psi.a
    a00, a01, a10, a11 = a[0, 0], a[0, 1], a[1, 0], a[1, 1]
    zero = lambda v: abs(v) <= tol  # noqa: E731
    eq = lambda u, v: abs(u - v) <= tol  # noqa: E731

    if _is_bell(a, tol):
        return BRANCHES["bell"]
    if eq(abs(a00), 1) or eq(abs(a11), 1):
        return BRANCHES["basis-diagonal"]
    if eq(abs(a01), 1) or eq(abs(a10), 1):
        return BRANCHES["basis-antidiagonal"]
    if zero(a01) and zero(a10) and not zero(a00) and not zero(a11):
        return BRANCHES["two-term-diagonal"]
    if zero(a00) and zero(a11) and not zero(a01) and not zero(a10):
        return BRANCHES["two-term-antidiagonal"]
    if not any(zero(v) for v in (a00, a01, a10, a11)):
        if eq(a00, a11) and eq(a01, a10):
            return BRANCHES["four-term-pp"]
        if eq(a00, -a11) and eq(a01, -a10):
            return BRANCHES["four-term-mm"]
        if eq(a00, -a11) and eq(a01, a10):
            return BRANCHES["four-term-mp"]
        if eq(a00, a11) and eq(a01, -a10):
            return BRANCHES["four-term-pm"]
    return BRANCHES["other"]


def _sign(rng):
    return rng.choice((-1.0, 1.0))


def sample_branch_state(branch: str, rng: np.random.Generator) -> TwoQubitAmplitudes:
    """Random real state belonging to ``branch``."""
    if branch == "bell":
        return TwoQubitAmplitudes(_sign(rng) * BELL[rng.choice(list(BELL))])
    if branch in ("basis-diagonal", "basis-antidiagonal"):
        a = np.zeros(4)
        a[rng.choice((0, 3) if branch == "basis-diagonal" else (1, 2))] = _sign(rng)
        return TwoQubitAmplitudes(a)
    if branch in ("two-term-diagonal", "two-term-antidiagonal"):
        t = rng.uniform(0.1, math.pi / 4 - 0.1) + rng.integers(4) * math.pi / 2
        a = np.zeros(4)
        i, j = (0, 3) if branch == "two-term-diagonal" else (1, 2)
        a[i], a[j] = math.cos(t), math.sin(t)
        return TwoQubitAmplitudes(a)
    if branch.startswith("four-term"):
        p, q = rng.uniform(0.15, 1.0, 2) * np.array([_sign(rng), _sign(rng)])
        s11, s10 = {"pp": (1, 1), "mm": (-1, -1), "mp": (-1, 1), "pm": (1, -1)}[branch[-2:]]
        # keep clear of the Bell and product-state coincidences
        return TwoQubitAmplitudes.normalised([p, q, s10 * q, s11 * p])
    if branch == "other":
        while True:
            a = TwoQubitAmplitudes.normalised(rng.normal(size=4))
            if zoology_constraints(a).branch == "other":
                return a
    raise KeyError(branch)


@dataclass
class ZoologyRow:
    branch: str
    constraint: str
    draws: int
    max_exact_residual: float
    max_phase_residual: float
    min_violating_residual: float
    misclassified: int

    @property
    def exact_status(self) -> str:
        return "exact" if self.max_exact_residual < 1e-10 else "up-to-phase"

    def passed(self, sat_tol=1e-10, viol_tol=1e-6) -> bool:
        return (
            self.max_phase_residual < sat_tol
            and self.min_violating_residual > viol_tol
            and self.misclassified == 0
        )


ZOOLOGY_HEADER = ("branch", "draws", "max_exact_residual", "max_phase_residual")


def validate_zoology(rng: np.random.Generator, draws: int = 50) -> list[ZoologyRow]:
    """Satisfying and violating draws for every branch.

    Satisfying draws use phi = -theta with theta obeying the branch
    constraint. Violating draws use generic theta; for the Bell branch,
    which has no constraint, they use phi = +theta instead.
    """
    rows = []
    for name, br in BRANCHES.items():
        max_exact = max_phase = 0.0
        min_viol = math.inf
        wrong = 0
        for _ in range(draws):
            psi = sample_branch_state(name, rng)
            wrong += zoology_constraints(psi).branch != name
            theta = br.sample(rng)
            ex, ph = invariance_residual(psi, theta, -theta)
            max_exact, max_phase = max(max_exact, ex), max(max_phase, ph)

            psi = sample_branch_state(name, rng)
            theta = _free(rng)
            phi = theta if name == "bell" else -theta
            min_viol = min(min_viol, invariance_residual(psi, theta, phi)[1])
        rows.append(ZoologyRow(name, br.constraint, draws, max_exact, max_phase, min_viol, wrong))
    return rows
