"""Print what the polar fire sensor sees from a few vantage points.

Builds the desk scenario (20x20 grid at 50 m cells, fire pregrown from
the center), parks an aircraft at three poses and renders the range/
bearing observation each time, as ASCII with one row per range bin.
Farther rows are wider bins, so a distant front fills fewer characters.
"""

import math

import numpy as np

from firescout.aircraft import AircraftState
from firescout.harness import desk_scenario
from firescout.env import SurveillanceSim
from firescout.rewards import (
    RewardWeights,
    bank_penalty,
    cold_cells_penalty,
    fire_distance_penalty,
)
from firescout.sensing import build_range_bins, render_observation

sc = desk_scenario()
sim = SurveillanceSim(sc.sim)
sim.reset(np.random.default_rng(3))
grid = sim.grid
print(f"fire holds {int(grid.burning.sum())} cells after "
      f"{sc.sim.pregrow_seconds:.0f} s of pregrowth")

bins = build_range_bins(sc.sim.n_range_bins, sc.sim.max_range_m)
weights = RewardWeights()

poses = [
    ("600 m east of the fire, facing it", AircraftState(x=1100.0, y=500.0, psi=math.pi)),
    ("overhead, flying north", AircraftState(x=500.0, y=500.0, psi=math.pi / 2)),
    ("corner of the map, facing away", AircraftState(x=50.0, y=50.0, psi=-3 * math.pi / 4)),
]

for label, pose in poses:
    obs = render_observation(grid, pose, bins, sc.sim.n_angle_bins)
    img = obs.values
    print(f"\n{label}  (x={pose.x:.0f}, y={pose.y:.0f})")
    print("  sector ->  " + " ".join(f"{j}" for j in range(img.shape[1])))
    for i in range(img.shape[0] - 1, -1, -1):
        row = " ".join("#" if v else "." for v in img[i])
        print(f"  {bins.centers[i]:5.0f} m   {row}")
    near = fire_distance_penalty(obs, bins, weights)
    cold = cold_cells_penalty(obs, bins, weights)
    bank = bank_penalty(pose.phi, weights)
    print(f"  shaping terms: nearest fire {near:.2f}, cold cells {cold:.2f}, "
          f"bank {bank:.2f}")

print("\nsector 0 starts just left of the nose and wraps counterclockwise;")
print("'#' marks a range/bearing cell whose sampled ground cell is burning")
