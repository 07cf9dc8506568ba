"""How often each certificate holds as the outlier ratio grows.

For each lambda, samples instances from the random model and records the
fraction certified by the principal condition, the dual condition and
the dual-response test.

    python3 scripts/prc_vs_drc.py --D 10 --d0 3 --s0 15 --trials 100
"""
import argparse
from dataclasses import dataclass

from subsparse.conditions import analyze_conditions
from subsparse.randomized import RandomModelParams, sample_instance, trial_seeds


@dataclass
class SweepConfig:
    D: int = 10
    d0: int = 3
    s0: int = 15
    lambdas: tuple = (0.5, 1.0, 2.0, 4.0, 8.0)
    trials: int = 100
    seed: int = 0


def sweep(cfg: SweepConfig):
    rows = []
    for lam in cfg.lambdas:
        params = RandomModelParams(cfg.D, cfg.d0, cfg.s0, lam)
        prc = drc = resp = 0
        for s in trial_seeds(cfg.seed, cfg.trials):
            rep = analyze_conditions(sample_instance(params, s), vertex_method="auto")
            prc += rep.prc_holds
            drc += rep.drc_holds
            resp += rep.dual_response_holds
        rows.append((lam, prc / cfg.trials, drc / cfg.trials, resp / cfg.trials))
    return rows


if __name__ == "__main__":
    ap = argparse.ArgumentParser(description=__doc__.splitlines()[0])
    for name, default in (("D", 10), ("d0", 3), ("s0", 15), ("trials", 100), ("seed", 0)):
        ap.add_argument(f"--{name}", type=int, default=default)
    args = ap.parse_args()
    cfg = SweepConfig(args.D, args.d0, args.s0, trials=args.trials, seed=args.seed)
    print("lambda,prc,drc,dual_response")
    for lam, p, d, r in sweep(cfg):
        print(f"{lam},{p},{d},{r}")
