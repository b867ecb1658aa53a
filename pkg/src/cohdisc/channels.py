"""Gates, Kraus channels and incoherence checkers."""
from __future__ import annotations

import math
from dataclasses import dataclass
from typing import Iterable, Sequence

import numpy as np

from .qcore import (
    ATOL_STATE, Gate, InvariantError, ProductBasis, QState, _check_indices, embed,
    haar_unitary, unitarity_residual,
)

OFFDIAG_TOL = 1e-9


@dataclass(frozen=True, eq=False)
class KrausChannel:
    kraus: tuple[np.ndarray, ...]
    dims: tuple[int, ...]

    def __post_init__(self):
        dims = tuple(int(d) for d in self.dims)
        D = math.prod(dims)
        ks = tuple(np.array(k, dtype=complex) for k in self.kraus)
        if not ks:
            raise InvariantError("channel needs at least one Kraus operator")
        for k in ks:
            if k.shape != (D, D):
                raise InvariantError(f"Kraus operator of shape {k.shape}, expected {(D, D)}")
        res = self.completeness_residual(ks, D)
        if res > ATOL_STATE:
            raise InvariantError(f"Kraus set not trace preserving: residual {res:.3e}")
        object.__setattr__(self, "kraus", ks)
        object.__setattr__(self, "dims", dims)

    @staticmethod
    def completeness_residual(kraus, D: int) -> float:
        total = sum(k.conj().T @ k for k in kraus)
        return float(np.max(np.abs(total - np.eye(D))))

    @classmethod
    def from_gate(cls, g: Gate, dims: Sequence[int]) -> "KrausChannel":
        return cls((embed(g.unitary, g.targets, dims),), tuple(dims))

    @classmethod
    def from_unitary(cls, u: np.ndarray, dims: Sequence[int]) -> "KrausChannel":
        return cls((np.asarray(u, dtype=complex),), tuple(dims))

    def __call__(self, s: QState) -> QState:
        return apply_channel(s, self)

    def then(self, other: "KrausChannel") -> "KrausChannel":
        """Channel applying ``self`` first and ``other`` second."""
        if other.dims != self.dims:
            raise InvariantError(f"cannot compose channels on {self.dims} and {other.dims}")
        return KrausChannel(tuple(b @ a for a in self.kraus for b in other.kraus), self.dims)

    def mix(self, other: "KrausChannel", weight: float) -> "KrausChannel":
        """``weight * self + (1 - weight) * other``."""
        if not 0 <= weight <= 1:
            raise ValueError(f"mixing weight {weight} outside [0, 1]")
        ks = [math.sqrt(weight) * k for k in self.kraus]
        ks += [math.sqrt(1 - weight) * k for k in other.kraus]
        return KrausChannel(tuple(ks), self.dims)


def apply_channel(s: QState, ch: KrausChannel) -> QState:
    if s.dims != ch.dims:
        raise InvariantError(f"channel dims {ch.dims} do not match state dims {s.dims}")
    out = sum(k @ s.mat @ k.conj().T for k in ch.kraus)
    return QState(s.dims, out)


# --- gates ----------------------------------------------------------------

def make_cz(control: int = 0, target: int = 1) -> Gate:
    return Gate(np.diag([1, 1, 1, -1]), (control, target))


def make_cx(control: int = 0, target: int = 1) -> Gate:
    u = np.array([[1, 0, 0, 0], [0, 1, 0, 0], [0, 0, 0, 1], [0, 0, 1, 0]])
    return Gate(u, (control, target))


def make_hadamard(target: int = 0) -> Gate:
    return Gate(np.array([[1, 1], [1, -1]]) / math.sqrt(2), (target,))


def make_controlled_u(u: np.ndarray, targets: Sequence[int] | None = None) -> Gate:
    """|0><0| (x) I + |1><1| (x) u; the control is the first target."""
    u = np.asarray(u, dtype=complex)
    if u.ndim != 2 or u.shape[0] != u.shape[1]:
        raise InvariantError(f"controlled operation must be square, got {u.shape}")
    res = unitarity_residual(u)
    if res > ATOL_STATE:
        raise InvariantError(f"u is not unitary: residual {res:.3e}")
    d = u.shape[0]
    cu = np.zeros((2 * d, 2 * d), dtype=complex)
    cu[:d, :d] = np.eye(d)
    cu[d:, d:] = u
    if targets is None:
        nq = int(round(math.log2(d)))
        if 2 ** nq != d:
            raise InvariantError("give explicit targets for a non-qubit register")
        targets = tuple(range(nq + 1))
    return Gate(cu, tuple(targets))


def weyl_operators(d: int) -> list[np.ndarray]:
    """The d^2 clock-and-shift unitaries X^a Z^b."""
    w = np.exp(2j * math.pi / d)
    X = np.roll(np.eye(d), 1, axis=0)
    Z = np.diag(w ** np.arange(d))
    return [np.linalg.matrix_power(X, a) @ np.linalg.matrix_power(Z, b)
            for a in range(d) for b in range(d)]


def completely_depolarizing(dims: Sequence[int]) -> KrausChannel:
    """rho -> Tr(rho) I/D, written with permutation-and-phase Kraus operators."""
    D = math.prod(dims)
    return KrausChannel(tuple(w / D for w in weyl_operators(D)), tuple(dims))


def depolarize_mix(g: Gate, p: float, dims: Sequence[int] = (2, 2)) -> KrausChannel:
    """rho -> p U rho U^dag + (1 - p) I/D."""
    if not 0 <= p <= 1:
        raise ValueError(f"p = {p} outside [0, 1]")
    dims = tuple(dims)
    gate = KrausChannel.from_gate(g, dims)
    if p == 1:
        return gate
    if p == 0:
        return completely_depolarizing(dims)
    return gate.mix(completely_depolarizing(dims), p)


# --- incoherence checkers -------------------------------------------------

@dataclass(frozen=True)
class CheckResult:
    """Outcome of an incoherence test; on failure ``witness`` locates the violation."""

    ok: bool
    witness: tuple | None = None
    magnitude: float = 0.0

    def __bool__(self):
        return self.ok


def _in_basis(ch: KrausChannel, b: ProductBasis) -> list[np.ndarray]:
    if b.dims != ch.dims:
        raise InvariantError(f"basis dims {b.dims} do not match channel dims {ch.dims}")
    u = b.full()
    return [u.conj().T @ k @ u for k in ch.kraus]


def check_mio(ch: KrausChannel, b: ProductBasis | None = None) -> CheckResult:
    """Does ``ch`` map every basis projector |i><i| to a state diagonal in ``b``?"""
    b = b or ProductBasis.computational(ch.dims)
    ks = _in_basis(ch, b)
    D = ks[0].shape[0]
    for i in range(D):
        out = sum(np.outer(k[:, i], k[:, i].conj()) for k in ks)
        off = np.abs(out - np.diag(np.diag(out)))
        worst = float(off.max())
        if worst > OFFDIAG_TOL:
            return CheckResult(False, (i,), worst)
    return CheckResult(True)


def check_kraus_incoherent(ch: KrausChannel, b: ProductBasis | None = None) -> CheckResult:
    """Kraus-level test: every operator has at most one nonzero entry per column."""
    b = b or ProductBasis.computational(ch.dims)
    for n, k in enumerate(_in_basis(ch, b)):
        big = np.abs(k) > OFFDIAG_TOL
        counts = big.sum(axis=0)
        bad = np.flatnonzero(counts > 1)
        if bad.size:
            col = int(bad[0])
            mags = np.sort(np.abs(k[:, col]))
            return CheckResult(False, (n, col), float(mags[-2]))
    return CheckResult(True)


def check_a_incoherent(ch: KrausChannel, a_indices: Iterable[int],
                       b: ProductBasis | None = None) -> CheckResult:
    """Does ``ch`` keep operators block diagonal in A's basis block diagonal?

    Checked on the spanning set |i><i|_A (x) |j><k|_B; the witness is
    ``(i, j, k)`` with multi-indices flattened over A and B respectively.
    """
    dims = ch.dims
    n = len(dims)
    a = _check_indices(a_indices, n)
    if not a or len(a) == n:
        raise InvariantError(f"A must be a proper nonempty subset, got {a}")
    b = b or ProductBasis.computational(dims)
    ks = _in_basis(ch, b)
    rest = [k for k in range(n) if k not in a]
    dA = math.prod(dims[k] for k in a)
    dB = math.prod(dims[k] for k in rest)
    order = list(a) + rest
    perm = np.argsort(order)
    D = dA * dB

    def to_full(op_ab: np.ndarray) -> np.ndarray:
        t = op_ab.reshape([dims[k] for k in order] * 2)
        return t.transpose(list(perm) + [n + p for p in perm]).reshape(D, D)

    def offdiag_a(op: np.ndarray) -> float:
        t = op.reshape(dims + dims).transpose(order + [n + k for k in order])
        t = t.reshape(dA, dB, dA, dB).copy()
        for i in range(dA):
            t[i, :, i, :] = 0
        return float(np.abs(t).max())

    for i in range(dA):
        for j in range(dB):
            for kk in range(dB):
                e = np.zeros((D, D), dtype=complex)
                e[i * dB + j, i * dB + kk] = 1.0
                x = to_full(e)
                out = sum(K @ x @ K.conj().T for K in ks)
                worst = offdiag_a(out)
                if worst > OFFDIAG_TOL:
                    return CheckResult(False, (i, j, kk), worst)
    return CheckResult(True)


# --- certified random incoherent operations --------------------------------

def random_incoherent_unitary(D: int, rng) -> np.ndarray:
    """Uniform random permutation composed with uniform random diagonal phases."""
    rng = np.random.default_rng(rng)
    perm = rng.permutation(D)
    phases = np.exp(2j * math.pi * rng.random(D))
    u = np.zeros((D, D), dtype=complex)
    u[perm, np.arange(D)] = phases
    return u


def random_diagonal_kraus(D: int, rng, count: int = 2) -> list[np.ndarray]:
    """Random complete family of diagonal Kraus operators."""
    rng = np.random.default_rng(rng)
    w = rng.random((count, D))
    w /= w.sum(axis=0)
    phases = np.exp(2j * math.pi * rng.random((count, D)))
    return [np.diag(np.sqrt(w[m]) * phases[m]) for m in range(count)]


def random_io_channel(dims: Sequence[int], rng, unitary_only: bool = False) -> KrausChannel:
    """Random member of a family whose Kraus operators are all incoherent.

    Either a permutation-and-phase unitary, or a convex mixture of one with
    diagonal-Kraus noise followed by a second permutation-and-phase unitary.
    """
    rng = np.random.default_rng(rng)
    dims = tuple(dims)
    D = math.prod(dims)
    u = random_incoherent_unitary(D, rng)
    if unitary_only or rng.random() < 0.5:
        return KrausChannel((u,), dims)
    q = rng.random()
    v = random_incoherent_unitary(D, rng)
    noise = [v @ k for k in random_diagonal_kraus(D, rng, count=int(rng.integers(1, 4)))]
    return KrausChannel(tuple([math.sqrt(q) * u] + [math.sqrt(1 - q) * k for k in noise]), dims)


def random_a_incoherent_unitary(dims: Sequence[int], a_indices: Iterable[int], rng) -> np.ndarray:
    """sum_i e^{i phi_i} |pi(i)><i|_A (x) V_i with Haar V_i, as a full-space matrix."""
    rng = np.random.default_rng(rng)
    dims = tuple(dims)
    n = len(dims)
    a = _check_indices(a_indices, n)
    rest = [k for k in range(n) if k not in a]
    dA = math.prod(dims[k] for k in a)
    dB = math.prod(dims[k] for k in rest)
    perm = rng.permutation(dA)
    phases = np.exp(2j * math.pi * rng.random(dA))
    big = np.zeros((dA * dB, dA * dB), dtype=complex)
    for i in range(dA):
        big[perm[i] * dB:(perm[i] + 1) * dB, i * dB:(i + 1) * dB] = phases[i] * haar_unitary(dB, rng)
    order = list(a) + rest
    inv = list(np.argsort(order))
    t = big.reshape([dims[k] for k in order] * 2).transpose(inv + [n + p for p in inv])
    return t.reshape(dA * dB, dA * dB)


def random_a_incoherent_channel(dims: Sequence[int], a_indices: Iterable[int], rng) -> KrausChannel:
    """A-incoherent unitary, or a convex mixture of two of them."""
    rng = np.random.default_rng(rng)
    dims = tuple(dims)
    u = random_a_incoherent_unitary(dims, a_indices, rng)
    if rng.random() < 0.5:
        return KrausChannel((u,), dims)
    q = rng.random()
    v = random_a_incoherent_unitary(dims, a_indices, rng)
    return KrausChannel((math.sqrt(q) * u, math.sqrt(1 - q) * v), dims)
