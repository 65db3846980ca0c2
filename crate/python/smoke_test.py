"""Smoke test for the pysparsereg extension module.

Build and install first:

    pip install --no-build-isolation -e crates/python

then run `python python/smoke_test.py`.
"""

import math
import sys

import pysparsereg as sr


def check(name, ok, detail=""):
    print(f"{'ok  ' if ok else 'FAIL'} {name} {detail}")
    return ok


def main():
    results = []
    data = sr.sample_dataset(300, 20, 4, snr=10.0, rho=0.2, seed=1)
    truth = data.true_support
    results.append(check("dataset", (data.n, data.p) == (300, 20) and len(truth) == 4, repr(data)))

    exact = sr.cutting_plane_solve(data, 4, 1.0, time_limit=30.0)
    results.append(check("exact subset", exact.certified and exact.support == truth, repr(exact)))

    relaxed = sr.subgradient_solve(data, 4, sr.gamma0(data))
    results.append(check("relaxation", relaxed.support == truth, repr(relaxed)))

    path = sr.fit_path(data, "lasso")
    sizes = [len(pt.support) for pt in path]
    results.append(check("lasso path", sizes[0] == 0 and sizes[-1] >= 4, f"{len(path)} points"))

    mcp = sr.fit_path(data, "mcp", concavity=3.0)
    hit = next((pt for pt in mcp if len(pt.support) == 4), None)
    a = sr.selection_metrics(hit.coefficients, data.w_true)[0] if hit else math.nan
    results.append(check("mcp at k=4", hit is not None and a == 1.0, f"A={a}"))

    labels = sr.sample_dataset(400, 10, 3, snr=10.0, task="classification", seed=2)
    fit = sr.fit_single(labels, 0.01, "enet", loss="logistic")
    scores = [fit.intercept + sum(w * v for w, v in zip(fit.coefficients, row)) for row in labels.x]
    auc = sr.auc(scores, labels.y)
    results.append(check("logistic enet", auc > 0.8, f"train AUC={auc:.3f}"))

    try:
        sr.cutting_plane_solve(data, 0, 1.0)
        results.append(check("bad budget rejected", False))
    except ValueError as e:
        results.append(check("bad budget rejected", True, str(e)))

    return 0 if all(results) else 1


if __name__ == "__main__":
    sys.exit(main())
