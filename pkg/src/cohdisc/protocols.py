"""Worked scenarios: Werner construction, controlled-Z state preparation, DQC1,
and randomized checks of the three coherence-to-discord bounds."""
from __future__ import annotations

import math
from dataclasses import dataclass, field
from typing import Any

import numpy as np
from scipy.linalg import schur

from . import channels as ch
from .measures import (
    OptimizerConfig, asym_discord, coherence, global_discord, global_discord_at,
    rel_entropy_discord,
)
from .qcore import (
    ATOL_STATE, InvariantError, ProductBasis, QState, apply_gate, dephase, negativity,
    partial_trace, random_density, rel_entropy, tensor, tensor_all, unitarity_residual,
)

SLACK_TOL = 1e-6


def binary_entropy(x: float) -> float:
    if x <= 0 or x >= 1:
        return 0.0
    return -x * math.log2(x) - (1 - x) * math.log2(1 - x)


@dataclass
class BoundReport:
    """One instance of an inequality lhs <= rhs."""

    lhs: float
    rhs: float
    basis: ProductBasis | None = None
    detail: dict[str, Any] = field(default_factory=dict)
    seed: int | None = None

    @property
    def slack(self) -> float:
        return self.rhs - self.lhs

    @property
    def violated(self) -> bool:
        return self.slack < -SLACK_TOL

    def to_dict(self) -> dict:
        out = {"lhs": self.lhs, "rhs": self.rhs, "slack": self.slack, "seed": self.seed,
               "detail": self.detail}
        if self.basis is not None:
            out["basis"] = [[[float(z.real), float(z.imag)] for z in row]
                            for u in self.basis.locals for row in u]
        return out


# --- controlled-Z state preparation ---------------------------------------

@dataclass(frozen=True)
class StatePrepConfig:
    n: int
    p: float
    theta: float

    def __post_init__(self):
        if self.n < 2:
            raise ValueError(f"need at least 2 qubits, got n={self.n}")
        if not 0 <= self.p <= 1:
            raise ValueError(f"p = {self.p} outside [0, 1]")
        if not 0 <= self.theta <= math.pi:
            raise ValueError(f"theta = {self.theta} outside [0, pi]")


def theta_ket(theta: float) -> np.ndarray:
    return np.array([math.cos(theta), math.sin(theta)], dtype=complex)


def stateprep_initial(cfg: StatePrepConfig) -> QState:
    th = np.outer(theta_ket(cfg.theta), theta_ket(cfg.theta))
    control = QState((2,), cfg.p * np.eye(2) / 2 + (1 - cfg.p) * th)
    return tensor_all([control] + [QState((2,), th)] * (cfg.n - 1))


def stateprep_state(cfg: StatePrepConfig, l: int) -> QState:
    """State after ``l`` controlled-Z gates from qubit 0 to qubits 1..l."""
    if not 0 <= l <= cfg.n - 1:
        raise ValueError(f"gate count l={l} outside [0, {cfg.n - 1}]")
    s = stateprep_initial(cfg)
    for k in range(1, l + 1):
        s = apply_gate(s, ch.make_cz(0, k))
    return s


def stateprep_marginal_control(cfg: StatePrepConfig, l: int) -> QState:
    """Closed-form reduced state of the control qubit after ``l`` gates."""
    if not 0 <= l <= cfg.n - 1:
        raise ValueError(f"gate count l={l} outside [0, {cfg.n - 1}]")
    p, c, s = cfg.p, math.cos(cfg.theta), math.sin(cfg.theta)
    off = (1 - p) * s * c * math.cos(2 * cfg.theta) ** l
    return QState((2,), [[p / 2 + (1 - p) * c * c, off],
                         [off, p / 2 + (1 - p) * s * s]])


def stateprep_marginal_target(cfg: StatePrepConfig) -> QState:
    """Closed-form reduced state of any target qubit that has received its gate.

    With a noisy control the two branches |theta>, |-theta> are weighted by
    p/2 + (1 - p) cos^2(theta) and p/2 + (1 - p) sin^2(theta).
    """
    p, c, s = cfg.p, math.cos(cfg.theta), math.sin(cfg.theta)
    plus = np.outer(theta_ket(cfg.theta), theta_ket(cfg.theta))
    minus = np.outer(theta_ket(-cfg.theta), theta_ket(-cfg.theta))
    w_plus = p / 2 + (1 - p) * c * c
    return QState((2,), w_plus * plus + (1 - w_plus) * minus)


def stateprep_bound_series(cfg: StatePrepConfig, opt: OptimizerConfig | None = None,
                           upto: int | None = None) -> list[BoundReport]:
    """Global discord after each gate against the coherence consumed by the qubits."""
    if cfg.n > 8:
        raise ValueError(f"n={cfg.n} too large for the optimized global discord (max 8)")
    opt = opt or OptimizerConfig()
    upto = cfg.n - 1 if upto is None else upto
    if not 1 <= upto <= cfg.n - 1:
        raise ValueError(f"upto={upto} outside [1, {cfg.n - 1}]")
    s0 = stateprep_initial(cfg)
    c_control0 = coherence(partial_trace(s0, [0]))
    c_target0 = coherence(partial_trace(s0, [1]))
    reports = []
    for l in range(1, upto + 1):
        s = stateprep_state(cfg, l)
        d_control = c_control0 - coherence(partial_trace(s, [0]))
        d_targets = [c_target0 - coherence(partial_trace(s, [k])) for k in range(1, l + 1)]
        d_target = d_targets[0]
        res = global_discord(s, opt)
        reports.append(BoundReport(
            lhs=res.value,
            rhs=l * d_target + d_control,
            basis=res.argmin_basis,
            seed=opt.seed,
            detail={
                "l": l,
                "deltaC_control": d_control,
                "deltaC_target": d_target,
                "target_spread": max(d_targets) - min(d_targets),
                "reference_discord": global_discord_at(s),
                "evaluations": res.evaluations,
            },
        ))
    return reports


# --- Werner construction ---------------------------------------------------

def werner_state(p: float) -> QState:
    phi = np.zeros(4)
    phi[[0, 3]] = 1 / math.sqrt(2)
    return QState((2, 2), p * np.outer(phi, phi) + (1 - p) * np.eye(4) / 4)


def werner_demo(p: float, opt: OptimizerConfig | None = None) -> BoundReport:
    """Discord created from |+>|0> by the noisy CNOT channel, against C(|+>)."""
    if not 0 <= p <= 1:
        raise ValueError(f"p = {p} outside [0, 1]")
    opt = opt or OptimizerConfig()
    plus = QState.from_ket([1, 1])
    rho_in = tensor(plus, QState.basis_state([0], [2]))
    out = ch.depolarize_mix(ch.make_cx(), p)(rho_in)
    res = rel_entropy_discord(out, opt)
    return BoundReport(
        lhs=res.value, rhs=coherence(plus), basis=res.argmin_basis, seed=opt.seed,
        detail={"p": p, "negativity": negativity(out),
                "werner_residual": float(np.max(np.abs(out.mat - werner_state(p).mat)))},
    )


# --- DQC1 ------------------------------------------------------------------

@dataclass(frozen=True, eq=False)
class DQC1Config:
    n: int
    u: np.ndarray
    seed: int = 0

    def __post_init__(self):
        u = np.asarray(self.u, dtype=complex)
        if self.n < 1:
            raise ValueError("register needs at least one qubit")
        if 2 ** (self.n + 1) > 512:
            raise ValueError(f"total dimension 2^{self.n + 1} exceeds 512")
        if u.shape != (2 ** self.n, 2 ** self.n):
            raise InvariantError(f"u has shape {u.shape}, expected {(2 ** self.n,) * 2}")
        res = unitarity_residual(u)
        if res > ATOL_STATE:
            raise InvariantError(f"u is not unitary: residual {res:.3e}")
        object.__setattr__(self, "u", u)


def dqc1_frame(u: np.ndarray) -> tuple[np.ndarray, np.ndarray]:
    """(V, eigenvalues) with u = V diag(eigenvalues) V^dag."""
    t, v = schur(np.asarray(u, dtype=complex), output="complex")
    return v, np.diag(t).copy()


def _dqc1_states(cfg: DQC1Config) -> tuple[QState, QState]:
    """Ancilla-plus-register state before and after controlled-u, in u's eigenframe."""
    _, lam = dqc1_frame(cfg.u)
    dims = (2,) * (cfg.n + 1)
    a = apply_gate(QState.basis_state([0], [2]), ch.make_hadamard(0))
    before = tensor(a, QState.maximally_mixed(dims[1:]))
    cu = ch.make_controlled_u(np.diag(lam))
    return before, apply_gate(before, cu)


def dqc1_final_state(cfg: DQC1Config) -> QState:
    return _dqc1_states(cfg)[1]


def dqc1_trace_estimate(cfg: DQC1Config) -> complex:
    """<sigma_x> + i <sigma_y> of the ancilla, which equals Tr(u) / 2^n."""
    rho_a = partial_trace(dqc1_final_state(cfg), [0]).mat
    sx = np.array([[0, 1], [1, 0]])
    sy = np.array([[0, -1j], [1j, 0]])
    return complex(np.trace(rho_a @ sx).real + 1j * np.trace(rho_a @ sy).real)


@dataclass
class DQC1Report:
    global_bound: BoundReport
    asym_bound: BoundReport
    delta_c: float
    delta_c_closed_form: float
    trace_estimate: complex
    trace_exact: complex
    # False when the global discord is the reference-basis upper bound only.
    global_optimized: bool

    def to_dict(self) -> dict:
        return {
            "frame": "register basis = eigenbasis of u (Schur vectors)",
            "global": self.global_bound.to_dict(),
            "global_optimized": self.global_optimized,
            "asym": self.asym_bound.to_dict(),
            "deltaC": self.delta_c,
            "deltaC_closed_form": self.delta_c_closed_form,
            "trace_estimate": [self.trace_estimate.real, self.trace_estimate.imag],
            "trace_exact": [self.trace_exact.real, self.trace_exact.imag],
        }


def dqc1_report(cfg: DQC1Config, opt: OptimizerConfig | None = None) -> DQC1Report:
    opt = opt or OptimizerConfig(seed=cfg.seed)
    before, after = _dqc1_states(cfg)
    delta_c = coherence(partial_trace(before, [0])) - coherence(partial_trace(after, [0]))
    tr = complex(np.trace(cfg.u)) / 2 ** cfg.n
    closed = binary_entropy((1 - abs(tr)) / 2)

    if cfg.n <= 2:
        g = global_discord(after, opt)
        g_val, g_basis, g_opt = g.value, g.argmin_basis, True
    else:
        g_val, g_basis, g_opt = global_discord_at(after), ProductBasis.computational(after.dims), False
    a = asym_discord(after, [0], opt)
    return DQC1Report(
        global_bound=BoundReport(g_val, delta_c, g_basis, {"measure": "global discord"}, cfg.seed),
        asym_bound=BoundReport(a.value, delta_c, a.argmin_basis,
                               {"measure": "asymmetric discord, A = ancilla"}, cfg.seed),
        delta_c=delta_c,
        delta_c_closed_form=closed,
        trace_estimate=dqc1_trace_estimate(cfg),
        trace_exact=tr,
        global_optimized=g_opt,
    )


# --- randomized verification of the three bounds -----------------------------

VERIFY_CONFIG = OptimizerConfig(grid_points_per_angle=8, multistarts=3)


def trial_rng(seed: int, trial: int) -> np.random.Generator:
    return np.random.default_rng(np.random.SeedSequence([seed, trial]))


def _random_diag_state(rng) -> QState:
    w = rng.random(2)
    return QState((2,), np.diag(w / w.sum()))


def _reset_b_channel() -> ch.KrausChannel:
    """Replace qubit B by |0>, leaving A alone."""
    k0 = np.kron(np.eye(2), [[1, 0], [0, 0]])
    k1 = np.kron(np.eye(2), [[0, 1], [0, 0]])
    return ch.KrausChannel((k0, k1), (2, 2))


def coherence_direct(s: QState, b: ProductBasis | None = None) -> float:
    """S(rho || Phi(rho)) from the relative-entropy definition, not the pinching shortcut."""
    b = b or ProductBasis.computational(s.dims)
    return rel_entropy(s, dephase(s, b))


def _result1_trial(rng, opt) -> BoundReport:
    case = ["cnot", "reset_cnot", "werner_channel", "io", "io"][int(rng.integers(5))]
    pure = case == "cnot"
    rho_a = QState((2,), random_density(2, rng, rank=1 if pure else None))
    tau_b = QState.basis_state([0], [2]) if pure else _random_diag_state(rng)
    rho = tensor(rho_a, tau_b)
    cx = ch.KrausChannel.from_gate(ch.make_cx(), (2, 2))
    if case in ("cnot",):
        op = cx
    elif case == "reset_cnot":
        op = _reset_b_channel().then(cx)
    elif case == "werner_channel":
        op = ch.depolarize_mix(ch.make_cx(), float(rng.random()))
    else:
        op = ch.random_io_channel((2, 2), rng)
    out = op(rho)
    res = rel_entropy_discord(out, opt)
    return BoundReport(res.value, coherence(rho_a), res.argmin_basis,
                       {"case": case, "coherence_out": coherence(out)})


def _result2_trial(rng, opt, n: int) -> BoundReport:
    parts = [QState((2,), random_density(2, rng)) for _ in range(n)]
    rho = tensor_all(parts)
    op = ch.random_io_channel((2,) * n, rng)
    out = op(rho)
    res = global_discord(out, opt)
    consumed = [coherence(parts[k]) - coherence(partial_trace(out, [k])) for k in range(n)]
    # decomposition identity, left side through the relative-entropy definition
    ident = max(
        abs(coherence_direct(s) - sum(coherence_direct(partial_trace(s, [k])) for k in range(n))
            - global_discord_at(s))
        for s in (rho, out))
    return BoundReport(res.value, float(sum(consumed)), res.argmin_basis,
                       {"n": n, "consumption": consumed, "identity_residual": ident,
                        "reference_discord": global_discord_at(out)})


def _result3_trial(rng, opt) -> BoundReport:
    rho_a = QState((2,), random_density(2, rng))
    rho_b = QState((2,), random_density(2, rng))
    op = ch.random_a_incoherent_channel((2, 2), [0], rng)
    out = op(tensor(rho_a, rho_b))
    res = asym_discord(out, [0], opt)
    rhs = coherence(rho_a) - coherence(partial_trace(out, [0]))
    return BoundReport(res.value, rhs, res.argmin_basis, {"kraus_count": len(op.kraus)})


def verify_result(which: int, trials: int, seed: int,
                  opt: OptimizerConfig | None = None) -> list[BoundReport]:
    """Sample ``trials`` random instances of bound ``which`` (1, 2 or 3).

    Each trial draws from its own generator seeded by ``(seed, trial)``.
    Violations are reported through ``BoundReport.violated``, never raised.
    """
    if which not in (1, 2, 3):
        raise ValueError(f"unknown result {which}")
    if trials < 1:
        raise ValueError("need at least one trial")
    opt = opt or VERIFY_CONFIG
    out = []
    for t in range(trials):
        rng = trial_rng(seed, t)
        if which == 1:
            rep = _result1_trial(rng, opt)
        elif which == 2:
            rep = _result2_trial(rng, opt, 2 + t % 2)
        else:
            rep = _result3_trial(rng, opt)
        rep.seed = seed
        rep.detail["trial"] = t
        out.append(rep)
    return out


def summarize(reports: list[BoundReport]) -> dict:
    slacks = [r.slack for r in reports]
    return {"trials": len(reports), "min_slack": min(slacks),
            "violations": sum(r.violated for r in reports)}
