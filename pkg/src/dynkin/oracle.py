"""Independent checks for the game solver.

value_iteration
    Uniformize the chain at rate ``L`` (``P = I + Q/L``) and iterate the
    discrete-time game operator ``W -> min(phi, max(psi, alpha P W))`` with
    ``alpha = L / (L + beta)``.  Since ``Q W - beta W = (L + beta)(alpha P W - W)``,
    the sign of the defect at ``x`` is the sign of ``alpha (P W)(x) - W(x)``, so
    the continuous-time value is the fixed point of this contraction.

enumerate_equilibria
    Brute force over every pair of disjoint hitting sets on small chains.

simulate_hitting_payoff
    Monte Carlo estimate of ``R_x(h(B), h(C))`` from the jump chain with
    exponential holding times.

construct_phi_c
    Lower ``phi`` to ``V`` on part of the continuation region; the game
    value does not move.
"""
import itertools
import math
from dataclasses import dataclass, field

import numpy as np

from . import numeric
from .ctmc import uniformize
from .errors import MaxIterExceeded, OverlappingSets, SubsetViolation, TooManyStates
from .game import verify_equilibrium
from .resolvent import GameSpec, hitting_payoff, stopping_set

__all__ = [
    "value_iteration",
    "enumerate_equilibria",
    "SimulationConfig",
    "PayoffEstimate",
    "default_horizon",
    "simulate_hitting_payoff",
    "construct_phi_c",
    "RNG_ALGORITHM",
]

RNG_ALGORITHM = "PCG64 (numpy.random.Generator) seeded via SeedSequence(seed).spawn"


def value_iteration(spec, tol=1e-10, max_iter=10_000_000, one_player=False, residuals=None):
    """Fixed point of ``W -> min(phi, max(psi, alpha P W))`` within ``tol`` in sup norm.

    Starts from ``W = psi`` and stops once a sweep changes ``W`` by at most
    ``tol (1 - alpha) / alpha``.  With ``one_player=True`` the ``phi`` clamp is
    dropped and the result is the one-player value ``V0``.  If ``residuals``
    is a list, the sup-norm change of every sweep is appended to it.
    """
    spec = spec.to_float()
    chain = uniformize(spec.Q)
    alpha = chain.L / (chain.L + spec.beta)
    P = chain.P
    psi, phi = spec.psi, spec.phi
    stop_at = tol * (1.0 - alpha) / alpha
    W = psi.copy()
    for _ in range(max_iter):
        W_next = np.maximum(psi, alpha * (P @ W))
        if not one_player:
            W_next = np.minimum(phi, W_next)
        change = float(np.max(np.abs(W_next - W)))
        if residuals is not None:
            residuals.append(change)
        W = W_next
        if change <= stop_at:
            return W
    raise MaxIterExceeded(f"value iteration did not converge in {max_iter} sweeps (alpha={alpha})")


def enumerate_equilibria(spec, max_states=7):
    """All ``(A, B, V)`` passing the equilibrium conditions, by exhaustive search.

    Each state outside ``{phi = psi}`` goes to ``A``, to ``B`` or to neither;
    ``V`` is the payoff of ``(h(A), h(B | {phi = psi}))``.
    """
    if spec.n > max_states:
        raise TooManyStates(f"{spec.n} states exceeds the enumeration cap of {max_states}")
    eq = spec.equal_set()
    free = [x for x in range(spec.n) if x not in eq]
    found = []
    for labels in itertools.product((0, 1, 2), repeat=len(free)):
        A = frozenset(x for x, lab in zip(free, labels) if lab == 1)
        B = frozenset(x for x, lab in zip(free, labels) if lab == 2)
        V = hitting_payoff(spec, A, B | eq)
        if verify_equilibrium(spec, A, B, V).passed:
            found.append((A, B, V))
    return found


@dataclass(frozen=True)
class SimulationConfig:
    paths: int = 100_000
    seed: int = 0
    horizon: float = None  # None: default_horizon(spec)
    confidence_z: float = 3.0
    batch_size: int = 65_536

    def __post_init__(self):
        if self.paths <= 0:
            raise ValueError("paths must be positive")
        if not 0 <= self.seed < 2**64:
            raise ValueError("seed must be a 64-bit unsigned integer")
        if self.horizon is not None and not self.horizon > 0:
            raise ValueError("horizon must be positive")


@dataclass(frozen=True)
class PayoffEstimate:
    mean: float
    stderr: float
    bias_bound: float
    paths_used: int
    horizon: float
    truncated: int = 0
    rng: str = field(default=RNG_ALGORITHM)


def default_horizon(spec, eps=1e-4):
    """Horizon ``T`` with truncation bias ``exp(-beta T) max(1, max phi) <= eps``."""
    top = max(1.0, float(np.max(numeric.as_array(spec.phi))))
    return math.log(top / eps) / float(spec.beta)


def simulate_hitting_payoff(spec, B, C, x, cfg=SimulationConfig()):
    """Monte Carlo estimate of ``R_x(h(B), h(C))`` for disjoint ``B``, ``C``.

    Paths start at ``x``, wait an exponential time of rate ``|Q(y,y)|`` in
    each state ``y`` and jump according to the off-diagonal rates.  A path is
    paid ``exp(-beta t) psi`` on entering ``B``, ``exp(-beta t) phi`` on
    entering ``C`` and ``0`` if it is absorbed elsewhere or still running at
    the horizon.  Paths are processed in batches, each with its own stream
    spawned from ``cfg.seed``, so the result depends only on the inputs.
    """
    spec = spec.to_float()
    n = spec.n
    B = stopping_set(B, n)
    C = stopping_set(C, n)
    if B & C:
        raise OverlappingSets(B & C)
    horizon = default_horizon(spec) if cfg.horizon is None else float(cfg.horizon)
    beta = float(spec.beta)
    bias = math.exp(-beta * horizon) * float(np.max(spec.phi))

    payout = np.zeros(n)
    payout[sorted(B)] = spec.psi[sorted(B)]
    payout[sorted(C)] = spec.phi[sorted(C)]
    target = np.zeros(n, dtype=bool)
    target[sorted(B | C)] = True

    if target[x]:
        return PayoffEstimate(float(payout[x]), 0.0, bias, cfg.paths, horizon)
    if not target.any():
        # nobody ever stops: every path pays 0
        return PayoffEstimate(0.0, 0.0, bias, cfg.paths, horizon, cfg.paths)

    Q = spec.Q.entries
    rate = -np.diag(Q).astype(float)
    jumps = np.where(np.eye(n, dtype=bool), 0.0, Q)
    with np.errstate(invalid="ignore", divide="ignore"):
        cum = np.cumsum(jumps, axis=1) / rate[:, None]
    cum[rate == 0] = 1.0
    cum[:, -1] = 1.0

    total = 0.0
    total_sq = 0.0
    truncated = 0
    sizes = [cfg.batch_size] * (cfg.paths // cfg.batch_size)
    if cfg.paths % cfg.batch_size:
        sizes.append(cfg.paths % cfg.batch_size)
    streams = np.random.SeedSequence(cfg.seed).spawn(len(sizes))
    for m, ss in zip(sizes, streams):
        rng = np.random.Generator(np.random.PCG64(ss))
        vals, cut = _simulate_batch(rng, m, x, rate, cum, target, payout, beta, horizon)
        total += float(np.sum(vals))
        total_sq += float(np.sum(vals * vals))
        truncated += cut
    N = cfg.paths
    mean = total / N
    var = max(total_sq / N - mean * mean, 0.0) * N / (N - 1) if N > 1 else 0.0
    return PayoffEstimate(mean, math.sqrt(var / N), bias, N, horizon, truncated)


def _simulate_batch(rng, m, x, rate, cum, target, payout, beta, horizon):
    state = np.full(m, x, dtype=np.int64)
    t = np.zeros(m)
    value = np.zeros(m)
    alive = np.arange(m)
    truncated = 0
    while alive.size:
        s = state[alive]
        r = rate[s]
        # absorbed outside the targets: never stopped, pays 0
        keep = r > 0
        alive, s, r = alive[keep], s[keep], r[keep]
        if not alive.size:
            break
        t[alive] += rng.exponential(1.0, alive.size) / r
        late = t[alive] > horizon
        truncated += int(np.count_nonzero(late))
        alive, s = alive[~late], s[~late]
        u = rng.random(alive.size)
        nxt = _vector_pick(cum, s, u)
        state[alive] = nxt
        hit = target[nxt]
        done = alive[hit]
        value[done] = np.exp(-beta * t[done]) * payout[state[done]]
        alive = alive[~hit]
    return value, truncated


def _vector_pick(cum, s, u):
    # first column whose cumulative jump probability exceeds u
    return np.argmax(cum[s] > u[:, None], axis=1)


def construct_phi_c(spec, V, I, tol=None):
    """Spec with ``phi`` replaced by ``V`` on ``I``, where ``I`` lies strictly
    inside ``{psi < V < phi}``."""
    I = stopping_set(I, spec.n)
    tol = spec.tol if tol is None else tol
    V = numeric.as_array(V, exact=spec.exact)
    bad = sorted(
        x for x in I if not (spec.psi[x] + tol < V[x] < spec.phi[x] - tol)
    )
    if bad:
        raise SubsetViolation(f"states {bad} are not strictly between psi and phi")
    phi = spec.phi.copy()
    for x in I:
        phi[x] = V[x]
    return GameSpec(states=spec.states, Q=spec.Q, beta=spec.beta, psi=spec.psi, phi=phi)
