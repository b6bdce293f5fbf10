"""
Truncated Fock-space simulation of the four-mode beam-splitter setup.

Amplitude tensors are indexed (n, m, h, k) for modes (1, 2, 3, 4). The two
beam splitters act on the pairs (1, 4) and (2, 3) and conserve the photon
number of each pair, so they are applied sector by sector.

Two truncations of product inputs are supported:

``"box"``
    every mode keeps 0..N photons, stored in a tensor of side 2N + 1 so the
    beam splitters never push amplitude out of the container;
``"sector"``
    each interacting pair keeps total photon number <= N. This subspace is
    invariant under both beam splitters, so eigenstate checks are exact to
    rounding; the discarded tail is recorded and the state renormalised.
"""

from __future__ import annotations

import csv
import math
from dataclasses import dataclass
from functools import lru_cache
from typing import Literal

import numpy as np
from scipy.linalg import expm

from .gaussian import QuadratureCovariance

DEFAULT_CUTOFF = 16
LEAK_TOL = 1e-6

Truncation = Literal["box", "sector"]
Method = Literal["exponential", "coefficient-formula"]


class CutoffOverflowError(RuntimeError):
    pass


class TruncationError(ValueError):
    pass


@dataclass(frozen=True)
class TwoModeAmplitudes:
    """Coefficients psi[n, m] of a two-mode pure state, 0 <= n, m <= cutoff.

    ``tail`` is the norm weight known to be missing beyond the cutoff.
    """

    amps: np.ndarray
    tail: float = 0.0

    def __post_init__(self):
        a = np.array(self.amps, dtype=complex)
        if a.ndim != 2 or a.shape[0] != a.shape[1]:
            raise ValueError(f"two-mode amplitudes must be square, got {a.shape}")
        norm = float(np.sum(np.abs(a) ** 2))
        if norm > 1 + 1e-12:
            raise ValueError(f"amplitude norm {norm} exceeds 1")
        a.setflags(write=False)
        object.__setattr__(self, "amps", a)

    @property
    def cutoff(self) -> int:
        return self.amps.shape[0] - 1

    def norm(self) -> float:
        return float(np.sum(np.abs(self.amps) ** 2))

    def is_photon_number_entangled(self, tol: float = 1e-12) -> bool:
        off = self.amps - np.diag(np.diag(self.amps))
        return bool(np.max(np.abs(off), initial=0.0) <= tol)

    def diagonal(self) -> np.ndarray:
        return np.diag(self.amps).copy()


@dataclass(frozen=True)
class FockTensor4:
    amps: np.ndarray
    truncation_loss: float = 0.0

    def __post_init__(self):
        a = np.array(self.amps, dtype=complex)
        if a.ndim != 4 or len(set(a.shape)) != 1:
            raise ValueError(f"expected a cubic rank-4 tensor, got {a.shape}")
        a.setflags(write=False)
        object.__setattr__(self, "amps", a)

    @property
    def dim(self) -> int:
        return self.amps.shape[0]

    @property
    def cutoff(self) -> int:
        return self.dim - 1

    def norm(self) -> float:
        return float(np.sum(np.abs(self.amps) ** 2))

    def normalized(self) -> FockTensor4:
        return FockTensor4(self.amps / math.sqrt(self.norm()), self.truncation_loss)


# --- construction -----------------------------------------------------------


def twb_fock(r: float, cutoff: int = DEFAULT_CUTOFF) -> TwoModeAmplitudes:
    """Twin beam S(r)|0> truncated at ``cutoff`` photons per mode."""
    if cutoff < 1:
        raise ValueError("cutoff must be >= 1")
    lam = math.tanh(r)
    n = np.arange(cutoff + 1)
    diag = math.sqrt(1 - lam**2) * lam**n
    return TwoModeAmplitudes(np.diag(diag), tail=lam ** (2 * (cutoff + 1)))


def vacuum_pair(cutoff: int = DEFAULT_CUTOFF) -> TwoModeAmplitudes:
    a = np.zeros((cutoff + 1, cutoff + 1))
    a[0, 0] = 1.0
    return TwoModeAmplitudes(a)


def pnes_amplitudes(diag, normalize: bool = True) -> TwoModeAmplitudes:
    """Photon-number-entangled state sum_n psi_n |n, n>."""
    d = np.asarray(diag, dtype=complex)
    if normalize:
        d = d / np.linalg.norm(d)
    return TwoModeAmplitudes(np.diag(d))


def product_state(
    a: TwoModeAmplitudes,
    b: TwoModeAmplitudes,
    *,
    pairs: tuple[tuple[int, int], tuple[int, int]] = ((1, 2), (3, 4)),
    truncation: Truncation = "box",
    leak_tol: float = LEAK_TOL,
) -> FockTensor4:
    """|a>_{pairs[0]} (x) |b>_{pairs[1]} as a four-mode tensor.

    ``pairs`` selects which modes carry each input, e.g. ``((1, 3), (2, 4))``
    for the double-swap target state.
    """
    if a.cutoff != b.cutoff:
        raise ValueError(f"cutoff mismatch: {a.cutoff} vs {b.cutoff}")
    n = a.cutoff
    order = [m - 1 for pair in pairs for m in pair]
    if sorted(order) != [0, 1, 2, 3]:
        raise ValueError(f"pairs {pairs} do not cover modes 1-4")
    t = np.einsum("ij,kl->ijkl", a.amps, b.amps)
    t = np.transpose(t, np.argsort(order))
    loss = 1 - (1 - a.tail) * (1 - b.tail)

    if truncation == "box":
        amps = np.zeros((2 * n + 1,) * 4, dtype=complex)
        amps[: n + 1, : n + 1, : n + 1, : n + 1] = t
    elif truncation == "sector":
        idx = np.arange(n + 1)
        nn, mm, hh, kk = np.meshgrid(idx, idx, idx, idx, indexing="ij", sparse=True)
        keep = (nn + kk <= n) & (mm + hh <= n)
        full = float(np.sum(np.abs(t) ** 2))
        amps = np.where(keep, t, 0)
        kept = float(np.sum(np.abs(amps) ** 2))
        if kept == 0:
            raise TruncationError("sector truncation removed the whole state")
        loss += (full - kept) / full
        amps = amps / math.sqrt(kept)
    else:
        raise ValueError(f"unknown truncation {truncation!r}")

    if loss > leak_tol:
        raise TruncationError(
            f"predicted truncation loss {loss:.3e} exceeds {leak_tol:.1e}; raise the cutoff"
        )
    return FockTensor4(amps, loss)


def twb_pair_state(
    r: float,
    s: float,
    cutoff: int = DEFAULT_CUTOFF,
    *,
    pairs=((1, 2), (3, 4)),
    truncation: Truncation = "sector",
) -> FockTensor4:
    return product_state(twb_fock(r, cutoff), twb_fock(s, cutoff), pairs=pairs, truncation=truncation)


# --- beam splitters ---------------------------------------------------------


def _sector_generator(total: int) -> np.ndarray:
    """a_b^dag a_a - a_a^dag a_b on span{|j, total - j>}, j = photons in mode a."""
    g = np.zeros((total + 1, total + 1))
    for j in range(total + 1):
        k = total - j
        if j > 0:
            g[j - 1, j] = math.sqrt(j * (k + 1))
        if k > 0:
            g[j + 1, j] = -math.sqrt((j + 1) * k)
    return g


def _sector_formula(angle: float, total: int) -> np.ndarray:
    """Same block from the binomial expansion of the rotated creation operators."""
    c, s = math.cos(angle), math.sin(angle)
    u = np.zeros((total + 1, total + 1))
    lf = [math.lgamma(i + 1) for i in range(total + 1)]
    for n in range(total + 1):
        k = total - n
        terms: dict[int, list[float]] = {}
        for ss in range(n + 1):
            for uu in range(k + 1):
                out = n - ss + uu
                mag = (
                    math.comb(n, ss)
                    * math.comb(k, uu)
                    * math.exp(0.5 * (lf[out] + lf[total - out] - lf[n] - lf[k]))
                    * c ** (n + k - ss - uu)
                    * s ** (ss + uu)
                )
                terms.setdefault(out, []).append(-mag if uu % 2 else mag)
        for out, vals in terms.items():
            u[out, n] = math.fsum(vals)
    return u


@lru_cache(maxsize=512)
def _sector_unitary(angle: float, total: int, method: str) -> np.ndarray:
    if method == "exponential":
        u = expm(angle * _sector_generator(total))
    elif method == "coefficient-formula":
        u = _sector_formula(angle, total)
    else:
        raise ValueError(f"unknown method {method!r}")
    u.setflags(write=False)
    return u


def _pair_blocks(angle: float, dim: int, method: str):
    """Yield (flat indices, block) for each photon-number sector of one pair."""
    for total in range(2 * dim - 1):
        lo, hi = max(0, total - dim + 1), min(total, dim - 1)
        j = np.arange(lo, hi + 1)
        u = _sector_unitary(float(angle), total, method)
        yield j * dim + (total - j), u[np.ix_(j, j)]


def pair_operator(angle: float, dim: int, method: Method = "exponential") -> np.ndarray:
    """Dense (dim^2, dim^2) matrix of one beam splitter on a truncated mode pair."""
    op = np.zeros((dim * dim, dim * dim))
    for idx, block in _pair_blocks(angle, dim, method):
        op[np.ix_(idx, idx)] = block
    return op


def apply_bs_pair_fock(
    state: FockTensor4,
    phi: float,
    psi: float,
    method: Method = "exponential",
    leak_tol: float = LEAK_TOL,
) -> FockTensor4:
    """Apply U_14(phi) (x) U_23(psi)."""
    d = state.dim
    # rows: (n, k) of pair 14, columns: (m, h) of pair 23
    x = np.transpose(state.amps, (0, 3, 1, 2)).reshape(d * d, d * d)
    y = np.zeros_like(x)
    for idx, block in _pair_blocks(phi, d, method):
        y[idx] = block @ x[idx]
    z = np.zeros_like(y)
    for idx, block in _pair_blocks(psi, d, method):
        z[:, idx] = y[:, idx] @ block.T
    out = z.reshape(d, d, d, d).transpose(0, 2, 3, 1)

    before = state.norm()
    lost = before - float(np.sum(np.abs(out) ** 2))
    if lost > leak_tol * max(before, 1e-300):
        raise CutoffOverflowError(
            f"beam splitters pushed weight {lost:.3e} past cutoff {state.cutoff}"
        )
    return FockTensor4(out, state.truncation_loss + max(lost, 0.0))


# --- transparency conditions --------------------------------------------------


def amplitude_1111_formula(a: TwoModeAmplitudes, b: TwoModeAmplitudes, phi: float, psi: float) -> complex:
    """Closed-form <1111|U_14(phi) U_23(psi)|a, b> from amplitudes with indices <= 2."""
    p, w = a.amps, b.amps
    c2p, s2p = math.cos(2 * phi), math.sin(2 * phi)
    c2q, s2q = math.cos(2 * psi), math.sin(2 * psi)
    r2 = math.sqrt(2)
    return (
        c2p * c2q * p[1, 1] * w[1, 1]
        - c2p * s2q / r2 * (p[1, 0] * w[2, 1] - p[1, 2] * w[0, 1])
        - s2p * c2q / r2 * (p[0, 1] * w[1, 2] - p[2, 1] * w[1, 0])
        + s2p * s2q / 2 * (p[2, 2] * w[0, 0] - p[0, 2] * w[0, 2] - p[2, 0] * w[2, 0] + p[0, 0] * w[2, 2])
    )


def transparency_residual_1111(a: TwoModeAmplitudes, b: TwoModeAmplitudes, phi: float, psi: float) -> float:
    if min(a.cutoff, b.cutoff) < 2:
        raise ValueError("need amplitudes up to index 2")
    lhs = a.amps[1, 1] * b.amps[1, 1]
    return float(abs(lhs - amplitude_1111_formula(a, b, phi, psi)))


def pnes_residual(psi_n, omega_n, phi: float, psi: float) -> float:
    """Residual of the transparency condition for photon-number-entangled inputs."""
    p = np.asarray(psi_n)
    w = np.asarray(omega_n)
    lhs = p[1] * w[1]
    rhs = math.cos(2 * phi) * math.cos(2 * psi) * p[1] * w[1] + 2 * math.cos(phi) * math.sin(
        phi
    ) * math.cos(psi) * math.sin(psi) * (p[2] * w[0] + p[0] * w[2])
    return float(abs(lhs - rhs))


def eigen_residual(state: FockTensor4, phi: float, psi: float, method: Method = "exponential") -> float:
    """|| U|in> - |in> || relative to the input norm."""
    out = apply_bs_pair_fock(state, phi, psi, method=method)
    return float(np.linalg.norm(out.amps - state.amps) / math.sqrt(state.norm()))


def probe_single_condition(rng: np.random.Generator, n_samples: int = 20, cutoff: int = 8, angle=None):
    """Search photon-number-entangled inputs that zero the 1111 condition.

    Draws psi_n = omega_n with psi_1^2 = psi_0 psi_2 (which zeroes the
    condition at equal angles) and random higher amplitudes, then checks
    whether the full state is an eigenvector. Returns a list of
    ``(diag, condition_residual, eigen_residual)`` for every draw.
    """
    results = []
    for _ in range(n_samples):
        lam = rng.uniform(0.2, 0.8)
        diag = np.empty(cutoff + 1)
        diag[:3] = [1.0, lam, lam**2]
        diag[3:] = rng.uniform(-1, 1, cutoff - 2) * lam ** np.arange(3, cutoff + 1)
        a = pnes_amplitudes(diag)
        theta = rng.uniform(0.1, math.pi / 2 - 0.1) if angle is None else angle
        cond = transparency_residual_1111(a, a, theta, theta)
        st = product_state(a, a, truncation="box")
        results.append((a.diagonal().real, cond, eigen_residual(st, theta, theta)))
    return results


# --- inner products and moments ---------------------------------------------


def overlap(a: FockTensor4, b: FockTensor4) -> complex:
    if a.amps.shape != b.amps.shape:
        raise ValueError(f"cutoff mismatch: {a.amps.shape} vs {b.amps.shape}")
    return complex(np.vdot(a.amps, b.amps))


def _kept_first(state: FockTensor4, pair) -> np.ndarray:
    i, j = pair
    if i == j or not {i, j} <= {1, 2, 3, 4}:
        raise ValueError(f"invalid mode pair {pair}")
    d = state.dim
    t = np.moveaxis(state.amps, (i - 1, j - 1), (0, 1))
    return t.reshape(d, d, d * d)


def _lower(t: np.ndarray, axis: int) -> np.ndarray:
    d = t.shape[axis]
    out = np.zeros_like(t)
    shape = [1] * t.ndim
    shape[axis] = d - 1
    sq = np.sqrt(np.arange(1, d)).reshape(shape)
    src = [slice(None)] * t.ndim
    dst = [slice(None)] * t.ndim
    src[axis] = slice(1, None)
    dst[axis] = slice(0, -1)
    out[tuple(dst)] = sq * t[tuple(src)]
    return out


def reduced_moments(state: FockTensor4, pair=(1, 2)) -> QuadratureCovariance:
    """Quadrature covariance of the kept mode pair, other modes traced out."""
    t = _kept_first(state, pair)
    norm = np.vdot(t, t).real
    low = [_lower(t, 0), _lower(t, 1)]
    mean = np.array([np.vdot(t, low[u]) for u in range(2)]) / norm
    m = np.array([[np.vdot(t, _lower(low[v], u)) for v in range(2)] for u in range(2)]) / norm
    nmat = np.array([[np.vdot(low[u], low[v]) for v in range(2)] for u in range(2)]) / norm

    half = 0.5 * np.eye(2)
    g = np.block([[m, nmat.T + half], [nmat + half, m.conj()]])
    r2 = 1 / math.sqrt(2)
    tmat = np.zeros((4, 4), dtype=complex)
    for u in range(2):
        tmat[2 * u, u], tmat[2 * u, u + 2] = r2, r2
        tmat[2 * u + 1, u], tmat[2 * u + 1, u + 2] = -1j * r2, 1j * r2
    xi_mean = np.concatenate([mean, mean.conj()])
    rbar = tmat @ xi_mean
    sigma = tmat @ g @ tmat.T - np.outer(rbar, rbar)
    return QuadratureCovariance(sigma.real)


def reduced_density_matrix(state: FockTensor4, pair=(1, 2)) -> np.ndarray:
    """rho of the kept pair as a (dim^2, dim^2) matrix, indices n_i * dim + n_j."""
    t = _kept_first(state, pair)
    d = state.dim
    flat = t.reshape(d * d, -1)
    rho = flat @ flat.conj().T
    return rho / np.trace(rho).real


def pure_state_expectation(state: FockTensor4, ref: TwoModeAmplitudes, pair=(1, 2)) -> float:
    """<ref| rho_pair |ref> for a pure two-mode reference state."""
    t = _kept_first(state, pair)
    d = state.dim
    c = np.zeros((d, d), dtype=complex)
    k = min(d, ref.cutoff + 1)
    c[:k, :k] = ref.amps[:k, :k]
    proj = np.einsum("ij,ijr->r", c.conj(), t)
    return float(np.vdot(proj, proj).real / np.vdot(t, t).real)


def tensor_to_csv(state: FockTensor4, path, threshold: float = 0.0) -> int:
    """Dump amplitudes with |amp| > threshold as rows (n, m, h, k, real, imag).

    Rows follow row-major index order. Returns the number of rows written.
    """
    idx = np.argwhere(np.abs(state.amps) > threshold)
    with open(path, "w", newline="") as fh:
        w = csv.writer(fh)
        w.writerow(["n", "m", "h", "k", "real", "imag"])
        for q in idx:
            v = state.amps[tuple(q)]
            w.writerow([*map(int, q), repr(float(v.real)), repr(float(v.imag))])
    return len(idx)
