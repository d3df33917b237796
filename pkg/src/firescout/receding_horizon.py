"""Receding-horizon baseline: coordinate descent on bank-action sequences.

Plans against a frozen snapshot of the true fire map and frozen peer
positions, scores candidate trajectories with the dense observation
rewards, executes a prefix, then re-plans. Each aircraft plans
independently; there is no joint action space.

Candidate scoring is vectorized across the trajectory's steps: the
planner simulates the state sequence, then samples the fire map at every
(step, range bin, sector) point in one shot. A descent flip at position
p reuses the per-step rewards before p unchanged, so candidate scores
are bit-identical to scoring the whole candidate from scratch.
"""

from __future__ import annotations

from dataclasses import dataclass, field

import numpy as np

from .aircraft import Action, AircraftState, apply_action, integrate
from .fire import FireGrid
from .rewards import RewardWeights
from .sensing import RangeBins, build_range_bins


@dataclass(frozen=True)
class RHConfig:
    horizon_steps: int = 50       # T, planned actions per optimization
    execute_steps: int = 10       # tau, actions flown before re-planning
    restarts: int = 10
    weights: RewardWeights = RewardWeights()
    n_range_bins: int = 40
    n_angle_bins: int = 30
    max_range_m: float = 500.0
    dt: float = 0.1

    def __post_init__(self):
        if not 0 < self.execute_steps < self.horizon_steps:
            raise ValueError("need 0 < execute_steps < horizon_steps")
        if self.restarts < 1:
            raise ValueError("restarts must be at least 1")

    def bins(self) -> RangeBins:
        return build_range_bins(self.n_range_bins, self.max_range_m)


def _trajectory(start: AircraftState, actions: list[Action],
                dt: float) -> list[AircraftState]:
    states = []
    state = start
    for a in actions:
        state = integrate(apply_action(state, a), dt)
        states.append(state)
    return states


def _batch_rewards(grid: FireGrid, states: list[AircraftState],
                   peers: list[AircraftState], w: RewardWeights,
                   bins: RangeBins, n_angle_bins: int) -> np.ndarray:
    """Per-step dense reward for every state at once, shape (len(states),).

    Semantics match the scalar reward functions: nearest burning bin
    center (full range when nothing burns in view), cold bins inside r0,
    squared bank, and exp-of-range separation to each frozen peer.
    """
    n = len(states)
    if n == 0:
        return np.zeros(0)
    xs = np.array([s.x for s in states])
    ys = np.array([s.y for s in states])
    psis = np.array([s.psi for s in states])
    phis = np.array([s.phi for s in states])

    sector = 2.0 * np.pi / n_angle_bins
    bearings = psis[:, None] + (np.arange(n_angle_bins) + 0.5)[None, :] * sector
    radii = bins.centers
    px = xs[:, None, None] + radii[None, :, None] * np.cos(bearings)[:, None, :]
    py = ys[:, None, None] + radii[None, :, None] * np.sin(bearings)[:, None, :]
    ix = np.floor(px / grid.cell_size).astype(np.int64)
    iy = np.floor(py / grid.cell_size).astype(np.int64)
    inside = (ix >= 0) & (ix < grid.width) & (iy >= 0) & (iy < grid.height)
    values = np.zeros((n, bins.n_bins, n_angle_bins), dtype=bool)
    values[inside] = grid.burning[iy[inside], ix[inside]]

    burning_rows = values.any(axis=2)
    nearest = np.where(burning_rows, radii[None, :], np.inf).min(axis=1)
    r1 = -w.lambda1 * np.where(np.isinf(nearest), bins.max_range, nearest)
    near_rows = radii < w.r0
    r2 = -w.lambda2 * (~values[:, near_rows, :]).sum(axis=(1, 2))
    r3 = -w.lambda3 * phis * phis
    total = r1 + r2 + r3
    for p in peers:
        rho = np.hypot(xs - p.x, ys - p.y)
        total = total - w.lambda4 * np.exp(-rho / w.c)
    return total


def rollout_score(grid: FireGrid, start: AircraftState, actions: list[Action],
                  peers: list[AircraftState], w: RewardWeights, bins: RangeBins,
                  n_angle_bins: int = 30, dt: float = 0.1) -> float:
    """Total dense reward of flying the sequence over the unchanged fire map.

    Peers stay put for the separation term. An empty sequence scores 0.
    """
    states = _trajectory(start, actions, dt)
    return float(_batch_rewards(grid, states, peers, w, bins, n_angle_bins).sum())


def _flipped(a: Action) -> Action:
    return Action(1 - int(a))


def _descend(grid, start, actions, peers, w, bins, n_angle_bins, dt):
    """Positional sweeps until no single flip strictly improves the score.

    A flip at position p leaves steps 0..p-1 untouched, so only the tail
    is re-scored; per-step rewards are independent across steps, making
    the spliced score equal to rollout_score on the candidate.
    """
    states = _trajectory(start, actions, dt)
    rewards = _batch_rewards(grid, states, peers, w, bins, n_angle_bins)
    score = float(rewards.sum())
    improved = True
    while improved:
        improved = False
        for pos in range(len(actions)):
            tail_start = states[pos - 1] if pos > 0 else start
            tail_actions = [_flipped(actions[pos])] + actions[pos + 1:]
            tail_states = _trajectory(tail_start, tail_actions, dt)
            tail_rewards = _batch_rewards(grid, tail_states, peers, w, bins,
                                          n_angle_bins)
            cand_rewards = np.concatenate([rewards[:pos], tail_rewards])
            cand = float(cand_rewards.sum())
            if cand > score:
                actions = actions[:pos] + tail_actions
                states = states[:pos] + tail_states
                rewards = cand_rewards
                score = cand
                improved = True
    return actions, score


def optimize_trajectory(grid: FireGrid, start: AircraftState,
                        peers: list[AircraftState], cfg: RHConfig,
                        rng: np.random.Generator) -> tuple[list[Action], float]:
    """Coordinate descent from uniform random starts; best restart wins.

    Ties keep the earliest restart, so the result is deterministic for a
    given rng state.
    """
    bins = cfg.bins()
    best_actions: list[Action] | None = None
    best_score = -np.inf
    for _ in range(cfg.restarts):
        init = [Action(int(a)) for a in rng.integers(2, size=cfg.horizon_steps)]
        actions, score = _descend(grid, start, init, peers, cfg.weights, bins,
                                  cfg.n_angle_bins, cfg.dt)
        if score > best_score:
            best_actions, best_score = actions, score
    return best_actions, float(best_score)


@dataclass
class RHController:
    """Per-aircraft plan buffer; empty means a re-plan is due."""

    pending: list[Action] = field(default_factory=list)


def rh_step(controller: RHController, grid: FireGrid, aircraft: AircraftState,
            peers: list[AircraftState], cfg: RHConfig,
            rng: np.random.Generator) -> Action:
    """Emit the next action, planning a fresh trajectory when the buffer
    of the previous plan's first execute_steps actions runs out.
    """
    if not controller.pending:
        plan, _ = optimize_trajectory(grid, aircraft, peers, cfg, rng)
        controller.pending = list(plan[:cfg.execute_steps])
    return controller.pending.pop(0)
