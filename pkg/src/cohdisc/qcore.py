"""Composite-system linear algebra on small density matrices.

Subsystems are ordered row-major: subsystem 0 is the slowest-varying tensor
index.  All entropies are in bits.
"""
from __future__ import annotations

import math
from dataclasses import dataclass, field
from typing import Iterable, Sequence

import numpy as np

ATOL_STATE = 1e-10
EIG_CLIP = 1e-12

# Returned by rel_entropy when supp(rho) is not inside supp(sigma).  Callers
# test for it with ``is_infinite`` rather than comparing against overflow.
INFINITE = math.inf


class InvariantError(ValueError):
    """An object violates one of its structural invariants."""


def is_infinite(x: float) -> bool:
    return x == INFINITE


def _check_square(mat: np.ndarray, side: int, what: str) -> None:
    if mat.ndim != 2 or mat.shape != (side, side):
        raise InvariantError(f"{what}: expected {side}x{side} matrix, got shape {mat.shape}")


def unitarity_residual(u: np.ndarray) -> float:
    u = np.asarray(u)
    return float(np.max(np.abs(u.conj().T @ u - np.eye(u.shape[0]))))


@dataclass(frozen=True, eq=False)
class QState:
    """Density matrix over an ordered list of subsystem dimensions."""

    dims: tuple[int, ...]
    mat: np.ndarray = field(repr=False)

    def __post_init__(self):
        dims = tuple(int(d) for d in self.dims)
        if not dims or any(d < 1 for d in dims):
            raise InvariantError(f"dims must be positive integers, got {self.dims}")
        mat = np.array(self.mat, dtype=complex)
        _check_square(mat, math.prod(dims), "QState")
        herm = float(np.max(np.abs(mat - mat.conj().T)))
        if herm > ATOL_STATE:
            raise InvariantError(f"not Hermitian: residual {herm:.3e}")
        mat = 0.5 * (mat + mat.conj().T)
        tr = float(abs(np.trace(mat) - 1.0))
        if tr > ATOL_STATE:
            raise InvariantError(f"trace not 1: residual {tr:.3e}")
        lmin = float(np.linalg.eigvalsh(mat)[0])
        if lmin < -ATOL_STATE:
            raise InvariantError(f"not positive semidefinite: smallest eigenvalue {lmin:.3e}")
        mat.setflags(write=False)
        object.__setattr__(self, "dims", dims)
        object.__setattr__(self, "mat", mat)

    @property
    def n(self) -> int:
        return len(self.dims)

    @property
    def dim(self) -> int:
        return self.mat.shape[0]

    @classmethod
    def from_ket(cls, psi, dims: Sequence[int] | None = None) -> "QState":
        psi = np.asarray(psi, dtype=complex).ravel()
        psi = psi / np.linalg.norm(psi)
        return cls(tuple(dims) if dims is not None else (psi.size,), np.outer(psi, psi.conj()))

    @classmethod
    def maximally_mixed(cls, dims: Sequence[int]) -> "QState":
        d = math.prod(dims)
        return cls(tuple(dims), np.eye(d) / d)

    @classmethod
    def basis_state(cls, index: Sequence[int], dims: Sequence[int]) -> "QState":
        psi = np.zeros(math.prod(dims), dtype=complex)
        psi[np.ravel_multi_index(tuple(index), tuple(dims))] = 1.0
        return cls(tuple(dims), np.outer(psi, psi))

    def allclose(self, other: "QState", atol: float = 1e-10) -> bool:
        return self.dims == other.dims and np.allclose(self.mat, other.mat, atol=atol, rtol=0)


@dataclass(frozen=True, eq=False)
class ProductBasis:
    """One unitary per subsystem; column j of ``locals[k]`` is basis vector j."""

    locals: tuple[np.ndarray, ...]

    def __post_init__(self):
        mats = []
        for k, u in enumerate(self.locals):
            u = np.array(u, dtype=complex)
            if u.ndim != 2 or u.shape[0] != u.shape[1]:
                raise InvariantError(f"local basis {k} is not square: {u.shape}")
            res = unitarity_residual(u)
            if res > ATOL_STATE:
                raise InvariantError(f"local basis {k} not unitary: residual {res:.3e}")
            u.setflags(write=False)
            mats.append(u)
        object.__setattr__(self, "locals", tuple(mats))

    @classmethod
    def computational(cls, dims: Sequence[int]) -> "ProductBasis":
        return cls(tuple(np.eye(d) for d in dims))

    @property
    def dims(self) -> tuple[int, ...]:
        return tuple(u.shape[0] for u in self.locals)

    def restrict(self, indices: Iterable[int]) -> "ProductBasis":
        return ProductBasis(tuple(self.locals[k] for k in sorted(indices)))

    def full(self) -> np.ndarray:
        out = np.ones((1, 1), dtype=complex)
        for u in self.locals:
            out = np.kron(out, u)
        return out


@dataclass(frozen=True, eq=False)
class Gate:
    """Unitary acting on the listed subsystems, in the listed order."""

    unitary: np.ndarray
    targets: tuple[int, ...]

    def __post_init__(self):
        u = np.array(self.unitary, dtype=complex)
        targets = tuple(int(t) for t in self.targets)
        if len(set(targets)) != len(targets) or not targets:
            raise InvariantError(f"gate targets must be distinct and nonempty: {self.targets}")
        if any(t < 0 for t in targets):
            raise InvariantError(f"negative gate target in {targets}")
        if u.ndim != 2 or u.shape[0] != u.shape[1]:
            raise InvariantError(f"gate matrix not square: {u.shape}")
        res = unitarity_residual(u)
        if res > ATOL_STATE:
            raise InvariantError(f"gate not unitary: residual {res:.3e}")
        u.setflags(write=False)
        object.__setattr__(self, "unitary", u)
        object.__setattr__(self, "targets", targets)

    def on(self, *targets: int) -> "Gate":
        return Gate(self.unitary, targets)


def _check_indices(indices: Iterable[int], n: int) -> tuple[int, ...]:
    idx = tuple(sorted({int(i) for i in indices}))
    bad = [i for i in idx if not 0 <= i < n]
    if bad:
        raise InvariantError(f"subsystem indices {bad} out of range for {n} subsystems")
    return idx


def embed(op: np.ndarray, targets: Sequence[int], dims: Sequence[int]) -> np.ndarray:
    """Full-space matrix of ``op`` acting on ``targets`` (identity elsewhere)."""
    dims = tuple(dims)
    n = len(dims)
    targets = tuple(targets)
    _check_indices(targets, n)
    tdims = [dims[t] for t in targets]
    if op.shape != (math.prod(tdims),) * 2:
        raise InvariantError(
            f"operator of side {op.shape[0]} does not match target dims {tdims}")
    rest = [k for k in range(n) if k not in targets]
    big = np.kron(op, np.eye(math.prod(dims[k] for k in rest)))
    order = list(targets) + rest
    cur = [dims[k] for k in order]
    t = big.reshape(cur + cur)
    inv = np.argsort(order)
    t = t.transpose(list(inv) + [n + i for i in inv])
    D = math.prod(dims)
    return t.reshape(D, D)


def tensor(a: QState, b: QState) -> QState:
    return QState(a.dims + b.dims, np.kron(a.mat, b.mat))


def tensor_all(states: Iterable[QState]) -> QState:
    states = list(states)
    out = states[0]
    for s in states[1:]:
        out = tensor(out, s)
    return out


def partial_trace(s: QState, keep: Iterable[int]) -> QState:
    keep = _check_indices(keep, s.n)
    if not keep:
        raise InvariantError("cannot trace out everything")
    n = s.n
    drop = [k for k in range(n) if k not in keep]
    t = s.mat.reshape(s.dims + s.dims)
    t = t.transpose(list(keep) + drop + [n + k for k in keep] + [n + k for k in drop])
    dk = math.prod(s.dims[k] for k in keep)
    dd = math.prod(s.dims[k] for k in drop)
    t = t.reshape(dk, dd, dk, dd)
    return QState(tuple(s.dims[k] for k in keep), np.einsum("ajbj->ab", t))


def _dephase_matrix(mat: np.ndarray, dims: tuple[int, ...], u: np.ndarray,
                    subset: tuple[int, ...]) -> np.ndarray:
    n = len(dims)
    rot = u.conj().T @ mat @ u
    mask = np.ones(dims + dims, dtype=bool)
    for k in subset:
        shape = [1] * (2 * n)
        shape[k] = shape[n + k] = dims[k]
        mask &= np.eye(dims[k], dtype=bool).reshape(shape)
    D = mat.shape[0]
    rot = np.where(mask.reshape(D, D), rot, 0)
    return u @ rot @ u.conj().T


def dephase(s: QState, b: ProductBasis, subset: Iterable[int] | None = None) -> QState:
    """Zero every element (in basis ``b``) that differs in an index of ``subset``.

    ``subset=None`` dephases every subsystem.
    """
    if b.dims != s.dims:
        raise InvariantError(f"basis dims {b.dims} do not match state dims {s.dims}")
    subset = tuple(range(s.n)) if subset is None else _check_indices(subset, s.n)
    if not subset:
        raise InvariantError("dephasing subset must be nonempty")
    return QState(s.dims, _dephase_matrix(s.mat, s.dims, b.full(), subset))


def entropy_of_spectrum(evals) -> float:
    """Shannon entropy in bits of an eigenvalue/probability vector."""
    lam = np.clip(np.asarray(evals, dtype=float), 0.0, 1.0)
    lam = lam[lam > EIG_CLIP]
    return float(-np.sum(lam * np.log2(lam)))


def vn_entropy(s: QState) -> float:
    return entropy_of_spectrum(np.linalg.eigvalsh(s.mat))


def rel_entropy(rho: QState, sigma: QState) -> float:
    """Quantum relative entropy S(rho||sigma) in bits; INFINITE on support mismatch."""
    if rho.dims != sigma.dims:
        raise InvariantError(f"dimension mismatch: {rho.dims} vs {sigma.dims}")
    lr, vr = np.linalg.eigh(rho.mat)
    ls, vs = np.linalg.eigh(sigma.mat)
    # weight of rho on each eigenvector of sigma
    overlap = np.real(np.einsum("ij,jk,ki->i", vs.conj().T, rho.mat, vs))
    null = ls <= EIG_CLIP
    if np.any(overlap[null] > EIG_CLIP):
        return INFINITE
    lr = np.clip(lr, 0.0, 1.0)
    pos = lr > EIG_CLIP
    neg_s = float(np.sum(lr[pos] * np.log2(lr[pos])))
    log_s = np.zeros_like(ls)
    log_s[~null] = np.log2(ls[~null])
    cross = float(np.sum(overlap[~null] * log_s[~null]))
    return max(neg_s - cross, 0.0)


def apply_unitary(s: QState, u: np.ndarray) -> QState:
    u = np.asarray(u, dtype=complex)
    _check_square(u, s.dim, "unitary")
    return QState(s.dims, u @ s.mat @ u.conj().T)


def apply_gate(s: QState, g: Gate) -> QState:
    if max(g.targets) >= s.n:
        raise InvariantError(f"gate targets {g.targets} out of range for {s.n} subsystems")
    return apply_unitary(s, embed(g.unitary, g.targets, s.dims))


def partial_transpose(s: QState, side: int) -> np.ndarray:
    (side,) = _check_indices([side], s.n)
    n = s.n
    t = s.mat.reshape(s.dims + s.dims)
    axes = list(range(2 * n))
    axes[side], axes[n + side] = axes[n + side], axes[side]
    return t.transpose(axes).reshape(s.dim, s.dim)


def negativity(s: QState, side: int = 1) -> float:
    if s.n != 2:
        raise InvariantError(f"negativity needs a bipartite state, got {s.n} subsystems")
    ev = np.linalg.eigvalsh(partial_transpose(s, side))
    return float(-np.sum(ev[ev < 0])) + 0.0


def bloch_basis(theta: float, phi: float) -> np.ndarray:
    c, sn = math.cos(theta), math.sin(theta)
    e = complex(math.cos(phi), math.sin(phi))
    return np.array([[c, -e.conjugate() * sn],
                     [e * sn, c]], dtype=complex)


def haar_unitary(d: int, seed=None) -> np.ndarray:
    """Haar-random unitary from the QR decomposition of a Ginibre matrix.

    ``seed`` may be an int or a ``numpy.random.Generator``.
    """
    if d < 1:
        raise ValueError(f"dimension must be >= 1, got {d}")
    rng = np.random.default_rng(seed)
    z = (rng.standard_normal((d, d)) + 1j * rng.standard_normal((d, d))) / math.sqrt(2)
    q, r = np.linalg.qr(z)
    ph = np.diag(r) / np.abs(np.diag(r))
    return q * ph


def random_density(d: int, seed=None, rank: int | None = None) -> np.ndarray:
    """Random density matrix G G† / Tr, G a d x rank Ginibre matrix."""
    rng = np.random.default_rng(seed)
    k = d if rank is None else rank
    g = rng.standard_normal((d, k)) + 1j * rng.standard_normal((d, k))
    rho = g @ g.conj().T
    return rho / np.trace(rho).real


def random_state(dims: Sequence[int], seed=None, rank: int | None = None) -> QState:
    return QState(tuple(dims), random_density(math.prod(dims), seed, rank))


def random_product_state(dims: Sequence[int], seed=None, pure: bool = False) -> QState:
    rng = np.random.default_rng(seed)
    return tensor_all(
        QState((d,), random_density(d, rng, rank=1 if pure else None)) for d in dims)
