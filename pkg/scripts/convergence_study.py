"""How the terminal fidelity and the residual feedback fields depend on kappa3 and the horizon.

    python scripts/convergence_study.py

Decay of |0> into the wrong dark state is incoherent, so the closed loop can
settle on a mixture of |D1> and |D2> with no coherences left to feed the
controller. The residual weight on the wrong dark state shrinks as kappa3
grows; this script tabulates it for the fig6 initial state (target D1) and
the fig4 beta1 = 0 state with the h3 variant (target D2).
"""

import argparse
from dataclasses import replace

import numpy as np

from lyapdfs.config import preset_config
from lyapdfs.runner import simulate


def table(cfg, kappas, horizons):
    longest = max(horizons)
    print("kappa3 " + " ".join(f"{f't={h:g}':>10}" for h in horizons) + "   tail|f| at t_max")
    for k in kappas:
        c = replace(cfg, control=replace(cfg.control, kappa3=float(k)),
                    integrate=replace(cfg.integrate, t_final=float(longest)))
        traj = simulate(c)
        vals = [traj.fid_target[np.argmin(np.abs(traj.t - h))] for h in horizons]
        tail = traj.t >= longest - 3
        print(f"{k:6g} " + " ".join(f"{v:10.5f}" for v in vals) + f"   {np.abs(traj.fields[tail, 1:]).max():.2e}")


def main():
    ap = argparse.ArgumentParser(description=__doc__, formatter_class=argparse.RawDescriptionHelpFormatter)
    ap.add_argument("--kappas", type=float, nargs="*", default=[1, 5, 15, 30, 50, 100])
    ap.add_argument("--horizons", type=float, nargs="*", default=[30, 100, 200])
    args = ap.parse_args()

    print("fig6 initial state, target D1")
    table(preset_config("fig6"), args.kappas, args.horizons)
    fig4 = preset_config("fig4")
    print("\nfig4, beta1 = 0, h3 variant, target D2")
    table(replace(fig4, scenario=replace(fig4.scenario, use_h3_variant=True)), args.kappas, args.horizons)


if __name__ == "__main__":
    main()
