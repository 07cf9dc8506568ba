"""Classification accuracy on random unions of subspaces, with the certificate verdict.

    python3 scripts/src_experiment.py --D 40 --dims 2,3 --counts 30,40 --models 20
"""
import argparse
from dataclasses import dataclass, field

import numpy as np

from subsparse.classifier import (
    check_classification_condition,
    classification_probability_bound,
    run_classification_experiment,
    sample_union_model,
)
from subsparse.errors import DomainError


@dataclass
class SRCConfig:
    D: int = 40
    dims: list = field(default_factory=lambda: [2, 3])
    counts: list = field(default_factory=lambda: [30, 40])
    models: int = 20
    queries: int = 20
    seed: int = 0


def main(cfg: SRCConfig):
    rng = np.random.default_rng(cfg.seed)
    print("model,certified,bp_accuracy,omp_accuracy")
    for m in range(cfg.models):
        model = sample_union_model(cfg.D, cfg.dims, cfg.counts, int(rng.integers(2**32)))
        cert = check_classification_condition(model, vertex_method="auto").holds
        exp = run_classification_experiment(model, cfg.queries, int(rng.integers(2**32)))
        acc = {}
        for method in ("bp", "omp"):
            recs = [r for r in exp.records if r.method == method]
            acc[method] = sum(r.predicted == r.true_group for r in recs) / len(recs)
        print(f"{m},{cert},{acc['bp']},{acc['omp']}")
    try:
        print(f"# probability bound: {classification_probability_bound(cfg.D, cfg.dims, cfg.counts)}")
    except DomainError as exc:
        print(f"# probability bound not applicable: {exc}")


if __name__ == "__main__":
    ap = argparse.ArgumentParser(description=__doc__.splitlines()[0])
    ap.add_argument("--D", type=int, default=40)
    ap.add_argument("--dims", default="2,3")
    ap.add_argument("--counts", default="30,40")
    ap.add_argument("--models", type=int, default=20)
    ap.add_argument("--queries", type=int, default=20)
    ap.add_argument("--seed", type=int, default=0)
    a = ap.parse_args()
    main(SRCConfig(a.D, [int(x) for x in a.dims.split(",")],
                   [int(x) for x in a.counts.split(",")], a.models, a.queries, a.seed))
