"""Train the observation-image Q-network on the desk scenario.

One environment step per gradient step, batch 64, target network synced
every 500 iterations. With the default iteration count this takes a few
minutes on one core; pass a number to train longer.

    python3 demos/train_desk.py [iterations]

Writes weights.bin plus curve.csv under demos/out/train and finishes
with a 20-episode greedy evaluation against the untrained net and
against random steering.
"""

import os
import sys
import time

import numpy as np

from firescout.dqn import (
    evaluate_policy,
    evaluate_random,
    run_training,
    write_curve_csv,
)
from firescout.harness import desk_scenario, profile_net_config, profile_training_config
from firescout.nn import QNetwork, save_weights

OUT = os.path.join(os.path.dirname(__file__), "out", "train")
os.makedirs(OUT, exist_ok=True)

iterations = int(sys.argv[1]) if len(sys.argv) > 1 else None
SEED = 2

sim = desk_scenario().sim
net_cfg = profile_net_config("desk", "observation", sim)
cfg = profile_training_config("desk", "observation", iterations)
print(f"{cfg.total_iterations} iterations, gamma {cfg.gamma}, "
      f"epsilon {cfg.epsilon_start} -> {cfg.epsilon_end} over "
      f"{cfg.decay_iters}, replay {cfg.replay_capacity}")

t0 = time.time()
net, curve = run_training(sim, net_cfg, cfg, np.random.default_rng(SEED))
print(f"trained in {time.time() - t0:.0f} s")
for p in curve:
    print(f"  iter {p.iteration:6d}  eval {p.mean_reward:6.2f} "
          f"+- {p.stderr:5.2f}  eps {p.epsilon:.2f}  loss {p.loss:8.3f}")

save_weights(net, os.path.join(OUT, "weights.bin"))
write_curve_csv(os.path.join(OUT, "curve.csv"), curve)

# Score all three policies on the same 20 seeded episodes.
untrained = QNetwork(net_cfg, np.random.default_rng(SEED).spawn(4)[0])
trained_m, trained_se = evaluate_policy(net, sim, 20, np.random.default_rng(42))
init_m, init_se = evaluate_policy(untrained, sim, 20, np.random.default_rng(42))
rand_m, rand_se = evaluate_random(sim, 20, np.random.default_rng(42))
print(f"\ntrained   {trained_m:6.2f} +- {trained_se:.2f}")
print(f"untrained {init_m:6.2f} +- {init_se:.2f}")
print(f"random    {rand_m:6.2f} +- {rand_se:.2f}")
print(f"\nweights and curve in {OUT}")
