"""Relative-entropy coherence and discord functionals.

The basis-dependent quantities (``coherence``, ``global_discord_at``, ...) are
evaluated directly from dephased states.  The minimized discords search over
product bases of qubits, each local basis written as ``bloch_basis(theta, phi)``.
"""
from __future__ import annotations

import logging
import math
import warnings
from dataclasses import dataclass
from typing import Callable, Iterable, Sequence

import numpy as np
from scipy.optimize import minimize

from .qcore import (
    InvariantError, ProductBasis, QState, bloch_basis, dephase, entropy_of_spectrum,
    partial_trace, vn_entropy, _check_indices,
)

log = logging.getLogger(__name__)

CLAMP_TOL = 1e-9
ERROR_TOL = 1e-6


@dataclass(frozen=True)
class OptimizerConfig:
    grid_points_per_angle: int = 12
    multistarts: int = 16
    refine_tol: float = 1e-9
    max_refine_iters: int = 500
    seed: int = 0

    def __post_init__(self):
        for name in ("grid_points_per_angle", "multistarts", "max_refine_iters"):
            if getattr(self, name) < 1:
                raise ValueError(f"{name} must be >= 1")
        if not self.refine_tol > 0:
            raise ValueError("refine_tol must be > 0")


@dataclass(frozen=True)
class MeasureResult:
    value: float
    argmin_basis: ProductBasis | None
    evaluations: int
    # True when the search was over caller-supplied candidates only.
    heuristic: bool = False

    def __float__(self):
        return self.value


def _clamp(x: float, what: str) -> float:
    if x >= 0:
        return x
    if x < -ERROR_TOL:
        raise InvariantError(f"{what} is negative beyond roundoff: {x:.3e}")
    if x < -CLAMP_TOL:
        warnings.warn(f"{what} = {x:.3e} below clamp tolerance", RuntimeWarning)
        return x
    return 0.0


def _proper_subset(a_indices, n: int) -> tuple[int, ...]:
    a = _check_indices(a_indices, n)
    if not a or len(a) == n:
        raise InvariantError(f"A must be a proper nonempty subset of {n} subsystems, got {a}")
    return a


def coherence(s: QState, b: ProductBasis | None = None) -> float:
    """Relative entropy of coherence S(Phi(rho)) - S(rho) in basis ``b``."""
    if b is None:
        b = ProductBasis.computational(s.dims)
    return _clamp(vn_entropy(dephase(s, b)) - vn_entropy(s), "coherence")


def coherence_b_given_a(s: QState, a_indices: Iterable[int],
                        b: ProductBasis | None = None) -> float:
    a = _proper_subset(a_indices, s.n)
    if b is None:
        b = ProductBasis.computational(s.dims)
    return _clamp(vn_entropy(dephase(s, b, a)) - vn_entropy(s), "C_B|A")


def global_discord_at(s: QState, b: ProductBasis | None = None) -> float:
    if s.n < 2:
        raise InvariantError("global discord needs at least two subsystems")
    if b is None:
        b = ProductBasis.computational(s.dims)
    local = sum(coherence(partial_trace(s, [k]), b.restrict([k])) for k in range(s.n))
    return _clamp(coherence(s, b) - local, "global discord")


def asym_discord_at(s: QState, a_indices: Iterable[int],
                    b: ProductBasis | None = None) -> float:
    a = _proper_subset(a_indices, s.n)
    if b is None:
        b = ProductBasis.computational(s.dims)
    return _clamp(coherence_b_given_a(s, a, b) - coherence(partial_trace(s, a), b.restrict(a)),
                  "asymmetric discord")


def relent_discord_at(s: QState, b: ProductBasis | None = None) -> float:
    return coherence(s, b)


# --- minimization over product bases -------------------------------------

class _Objective:
    """Fast evaluator of a discord functional as a function of local qubit bases.

    ``measured`` subsystems are dephased; the rest (``unmeasured``) are left
    alone.  Everything is computed from the blocks of the rotated state that
    are diagonal in the measured indices.
    """

    def __init__(self, s: QState, kind: str, measured: Sequence[int]):
        self.s = s
        self.kind = kind
        self.measured = tuple(measured)
        self.unmeasured = tuple(k for k in range(s.n) if k not in self.measured)
        self.dB = math.prod(s.dims[k] for k in self.unmeasured)
        self.mdims = tuple(s.dims[k] for k in self.measured)
        self.evaluations = 0
        s_rho = vn_entropy(s)
        if kind == "global":
            self.const = sum(vn_entropy(partial_trace(s, [k])) for k in range(s.n)) - s_rho
        elif kind == "relent":
            self.const = -s_rho
        elif kind == "asym":
            self.const = vn_entropy(partial_trace(s, self.measured)) - s_rho
        else:
            raise ValueError(kind)
        self._tensor = s.mat.reshape(s.dims + s.dims)

    def _rotated(self, locals_: dict[int, np.ndarray], skip: int | None = None) -> np.ndarray:
        """U^dag rho U as a 2n-index tensor, U the product of ``locals_`` except ``skip``."""
        t = self._tensor
        n = self.s.n
        for k, u in locals_.items():
            if k == skip:
                continue
            # ket index k -> u^dag, bra index n+k -> u
            t = np.moveaxis(np.tensordot(u.conj().T, t, axes=([1], [k])), 0, k)
            t = np.moveaxis(np.tensordot(t, u, axes=([n + k], [0])), -1, n + k)
        return t

    def _value_from_blocks(self, p: np.ndarray, block_entropy: np.ndarray | None) -> np.ndarray:
        """``p`` has shape (M, *mdims) with measured axes in ``self.measured`` order."""
        M = p.shape[0]
        flat = p.reshape(M, -1)
        H = _shannon_rows(flat)
        if self.kind == "relent":
            return H + self.const
        if self.kind == "global":
            nm = p.ndim - 1
            for j in range(nm):
                axes = tuple(a for a in range(1, nm + 1) if a != j + 1)
                H = H - _shannon_rows(p.sum(axis=axes))
            return H + self.const
        # asym: S(Phi_A rho) - H(p_A) - S(rho) + S(rho_A)
        return block_entropy - H + self.const

    def evaluate(self, locals_: dict[int, np.ndarray]) -> float:
        self.evaluations += 1
        w = np.ones((1, 1), dtype=complex)
        for k, d in enumerate(self.s.dims):
            w = np.kron(w, locals_[k] if k in locals_ else np.eye(d))
        if self.dB == 1:
            p = np.real(np.sum(w.conj() * (self.s.mat @ w), axis=0))
            return float(self._value_from_blocks(p.reshape((1,) + self.mdims), None)[0])
        n = self.s.n
        t = (w.conj().T @ self.s.mat @ w).reshape(self.s.dims + self.s.dims)
        m, u = list(self.measured), list(self.unmeasured)
        t = t.transpose(m + u + [n + k for k in m] + [n + k for k in u])
        dM = math.prod(self.mdims)
        blocks = np.einsum("iaib->iab", t.reshape(dM, self.dB, dM, self.dB))
        p = np.real(np.einsum("iaa->i", blocks))
        be = None
        if self.kind == "asym":
            be = np.array([entropy_of_spectrum(np.linalg.eigvalsh(blocks).ravel())])
        return float(self._value_from_blocks(p.reshape((1,) + self.mdims), be)[0])

    def scan(self, locals_: dict[int, np.ndarray], k: int, cands: np.ndarray) -> np.ndarray:
        """Objective for every candidate local basis ``cands[m]`` on subsystem ``k``."""
        M = cands.shape[0]
        self.evaluations += M
        n = self.s.n
        t = self._rotated(locals_, skip=k)
        others = [j for j in self.measured if j != k]
        u = list(self.unmeasured)
        order = others + [k] + u
        t = t.transpose(order + [n + j for j in order])
        R = math.prod(self.s.dims[j] for j in others)
        dk = self.s.dims[k]
        t = t.reshape(R, dk, self.dB, R, dk, self.dB)
        C = np.einsum("racrbd->rabcd", t)  # (R, dk, dk, dB, dB)
        X = np.einsum("mai,rabcd,mbi->mricd", cands.conj(), C, cands)
        p = np.real(np.einsum("mricc->mri", X))
        be = None
        if self.kind == "asym":
            ev = np.linalg.eigvalsh(X.reshape(M, -1, self.dB, self.dB))
            be = _shannon_rows(ev.reshape(M, -1))
        # reorder measured axes back to self.measured order
        p = p.reshape((M,) + tuple(self.s.dims[j] for j in others) + (dk,))
        pos = [others.index(j) + 1 if j != k else len(others) + 1 for j in self.measured]
        p = p.transpose([0] + pos)
        return self._value_from_blocks(p, be)


def _shannon_rows(p: np.ndarray) -> np.ndarray:
    q = np.where(p > 1e-12, np.minimum(p, 1.0), 1.0)
    return -np.sum(np.where(p > 1e-12, q * np.log2(q), 0.0), axis=-1)


def _angle_grid(G: int) -> np.ndarray:
    thetas = np.linspace(0.0, math.pi / 2, G)
    phis = np.linspace(0.0, math.pi, G, endpoint=False)
    return np.array([(th, ph) for th in thetas for ph in phis])


def _locals_from_x(x: np.ndarray, measured: Sequence[int]) -> dict[int, np.ndarray]:
    return {k: bloch_basis(x[2 * j], x[2 * j + 1]) for j, k in enumerate(measured)}


JOINT_GRID_MAX_QUBITS = 2
MAX_SWEEPS = 20


def _coordinate_descent(obj: _Objective, x: np.ndarray, grid: np.ndarray,
                        cands: np.ndarray, tol: float) -> tuple[np.ndarray, float]:
    x = x.copy()
    best = obj.evaluate(_locals_from_x(x, obj.measured))
    for _ in range(MAX_SWEEPS):
        start = best
        for j, k in enumerate(obj.measured):
            vals = obj.scan(_locals_from_x(x, obj.measured), k, cands)
            i = int(np.argmin(vals))
            if vals[i] < best:
                best = float(vals[i])
                x[2 * j:2 * j + 2] = grid[i]
        if start - best < tol:
            break
    return x, best


def _search(obj: _Objective, cfg: OptimizerConfig) -> np.ndarray:
    """Best angle vector found by grid search plus simplex refinement."""
    G = cfg.grid_points_per_angle
    grid = _angle_grid(G)
    cands = np.array([bloch_basis(th, ph) for th, ph in grid])
    m = len(obj.measured)
    ref = np.zeros(2 * m)

    if m <= JOINT_GRID_MAX_QUBITS:
        # joint grid in deterministic row-major order over the measured qubits
        if m == 1:
            vals = obj.scan({}, obj.measured[0], cands)
            points = grid
        else:
            k0, k1 = obj.measured
            rows = [obj.scan({k0: cands[i]}, k1, cands) for i in range(len(grid))]
            vals = np.concatenate(rows)
            points = np.array([np.concatenate([g0, g1]) for g0 in grid for g1 in grid])
        order = np.argsort(vals, kind="stable")[:cfg.multistarts]
        starts = [points[i] for i in order]
    else:
        rng = np.random.default_rng(cfg.seed)
        inits = [ref] + [rng.uniform(0, 1, 2 * m) * np.tile([math.pi / 2, math.pi], m)
                         for _ in range(cfg.multistarts - 1)]
        starts = [_coordinate_descent(obj, x0, grid, cands, cfg.refine_tol)[0] for x0 in inits]

    step = 0.5 * math.pi / max(G - 1, 1)
    best_x, best_v = ref, obj.evaluate(_locals_from_x(ref, obj.measured))
    for x0 in starts:
        x1, v1 = _refine(obj, x0, step, cfg)
        if v1 < best_v - 1e-15:
            best_x, best_v = x1, v1
    return best_x


def _refine(obj: _Objective, x0: np.ndarray, step: float, cfg: OptimizerConfig):
    dim = x0.size
    simplex = np.vstack([x0] + [x0 + step * np.eye(dim)[i] for i in range(dim)])
    f = lambda x: obj.evaluate(_locals_from_x(x, obj.measured))
    res = minimize(f, x0, method="Nelder-Mead",
                   options=dict(initial_simplex=simplex, fatol=cfg.refine_tol,
                                xatol=math.inf, maxiter=cfg.max_refine_iters))
    v0 = f(x0)
    if res.fun <= v0:
        return res.x, float(res.fun)
    return x0, v0


def _require_qubits(s: QState, indices: Iterable[int]) -> None:
    bad = [k for k in indices if s.dims[k] != 2]
    if bad:
        raise InvariantError(
            f"subsystems {bad} are not qubits; pass candidate bases for d > 2")


def _best_candidate(f: Callable[[ProductBasis], float],
                    candidates: Sequence[ProductBasis]) -> MeasureResult:
    best_v, best_b = math.inf, None
    for b in candidates:
        v = f(b)
        if v < best_v:
            best_v, best_b = v, b
    return MeasureResult(best_v, best_b, len(candidates), heuristic=True)


def _minimize(s: QState, kind: str, measured: tuple[int, ...], cfg: OptimizerConfig,
              exact: Callable[[ProductBasis], float]) -> MeasureResult:
    obj = _Objective(s, kind, measured)
    x = _search(obj, cfg)
    locals_ = [np.eye(d, dtype=complex) for d in s.dims]
    for k, u in _locals_from_x(x, measured).items():
        locals_[k] = u
    found = ProductBasis(tuple(locals_))
    ref = ProductBasis.computational(s.dims)
    v_found, v_ref = exact(found), exact(ref)
    # the reference basis is grid cell 0; it wins ties
    if v_ref <= v_found:
        found, v_found = ref, v_ref
    log.debug("%s discord: %.12g after %d evaluations", kind, v_found, obj.evaluations)
    return MeasureResult(v_found, found, obj.evaluations + 2)


def global_discord(s: QState, cfg: OptimizerConfig | None = None,
                   candidates: Sequence[ProductBasis] | None = None) -> MeasureResult:
    """Global discord minimized over product bases of all subsystems."""
    cfg = cfg or OptimizerConfig()
    if s.n < 2:
        raise InvariantError("global discord needs at least two subsystems")
    if candidates is not None:
        return _best_candidate(lambda b: global_discord_at(s, b), candidates)
    _require_qubits(s, range(s.n))
    return _minimize(s, "global", tuple(range(s.n)), cfg, lambda b: global_discord_at(s, b))


def asym_discord(s: QState, a_indices: Iterable[int], cfg: OptimizerConfig | None = None,
                 candidates: Sequence[ProductBasis] | None = None) -> MeasureResult:
    """Discord of B given dephasing on A, minimized over bases of A only."""
    cfg = cfg or OptimizerConfig()
    a = _proper_subset(a_indices, s.n)
    exact = lambda b: asym_discord_at(s, a, b)
    if candidates is not None:
        return _best_candidate(exact, candidates)
    _require_qubits(s, a)
    return _minimize(s, "asym", a, cfg, exact)


def rel_entropy_discord(s: QState, cfg: OptimizerConfig | None = None,
                        candidates: Sequence[ProductBasis] | None = None) -> MeasureResult:
    """Relative entropy of discord: coherence minimized over product bases."""
    cfg = cfg or OptimizerConfig()
    exact = lambda b: coherence(s, b)
    if candidates is not None:
        return _best_candidate(exact, candidates)
    _require_qubits(s, range(s.n))
    if s.n == 1:
        # a single system can always be dephased in its eigenbasis
        return MeasureResult(0.0, ProductBasis((np.linalg.eigh(s.mat)[1],)), 1)
    return _minimize(s, "relent", tuple(range(s.n)), cfg, exact)


MEASURES: dict[str, Callable[[QState, ProductBasis], float]] = {
    "coherence": coherence,
    "global_discord": global_discord_at,
    "relent_discord": relent_discord_at,
}


def consumption(before: QState, after: QState, measure="coherence",
                b: ProductBasis | None = None) -> float:
    """Consumption X(before) - X(after); negative values mean production.

    ``measure`` is a key of ``MEASURES`` or any callable ``f(state, basis)``.
    """
    if before.dims != after.dims:
        raise InvariantError(f"dimension mismatch: {before.dims} vs {after.dims}")
    f = MEASURES[measure] if isinstance(measure, str) else measure
    return f(before, b) - f(after, b)
