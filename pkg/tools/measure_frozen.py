"""Re-measure the regression-frozen constants stored in artifact/frozen.py.

Run from the repository root:  python tools/measure_frozen.py
Prints the raw measurements; the checked-in caps are these values plus 50%.
"""

import numpy as np

from artifact import frozen
from artifact.config import make_ic
from artifact.diagnostics import TimeDerivativeEnergy
from artifact.experiments import chemorepulsion_crosscheck, epsilon_sweep
from artifact.mild import picard_iterate
from artifact.model import Bistable, Grid, ModelParams, Monostable
from artifact.stepper import StepperConfig, coupled_factory, integrate, run


def l2(grid, v):
    return float(np.sqrt(grid.integrate(v**2)))


def main():
    g = Grid(401)
    x = g.x
    u0 = 1 + 0.3 * np.cos(np.pi * x)

    sweep = epsilon_sweep(u0, g, ModelParams(0.1, 0.1, 0.0, Monostable()), StepperConfig(1e-4),
                          2.0, [0.1, 0.05, 0.025, 0.0125], workers=4)
    print("sweep errors", sweep.errors)

    print("chemorepulsion deviation n=401",
          chemorepulsion_crosscheck(u0, g, 0.1, 0.05, StepperConfig(1e-4), 2.0))

    p = ModelParams(0.1, 0.1, 0.0, Monostable())
    diffs = []
    for spec in frozen.PICARD_BATTERY:
        v0 = make_ic(spec, g)
        pic = picard_iterate(v0, g, p, frozen.PICARD_T, M=8)
        ref = run(v0, g, p, StepperConfig(frozen.PICARD_STEPPER_DT), frozen.PICARD_T,
                  sample_every=10**6, diagnostics=False)
        diffs.append(l2(g, pic.final - ref.final.u))
        print(spec, "ratio", pic.ratio, "diff", diffs[-1])
    print("picard max diff", max(diffs))

    pb = ModelParams(0.1, 0.01, 1.0, Bistable(0.3))
    res = run(0.6 + 0.2 * np.cos(np.pi * x), g, pb, StepperConfig(1e-4), 20.0, sample_every=100)
    recs = res.records
    t = np.array([r.t for r in recs])
    grad = np.array([r.grad_u_l2sq + r.phi_l2sq + (r.phi_h1sq - r.phi_l2sq) / pb.epsilon for r in recs])
    print("bistable max ||u||_2", max(np.sqrt(r.l2sq) for r in recs))
    print("bistable int (|u_x|^2 + |phi|_W12^2)", np.trapezoid(grad, t))

    pm = ModelParams(0.1, 0.01, 1.0, Monostable())
    energy = TimeDerivativeEnergy()
    integrate(coupled_factory(g, pm, StepperConfig(1e-3)), 0.6 + 0.2 * np.cos(np.pi * x), g, 1e-3,
              50.0, 1, on_sample=energy)
    print("monostable int |u_t|^2", energy.cumulative[-1], "tail", energy.between(40, 50))


if __name__ == "__main__":
    main()
