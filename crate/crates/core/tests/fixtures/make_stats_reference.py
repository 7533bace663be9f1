"""Regenerates stats_reference.json with numpy/scipy.

The fixture is committed; this script documents its provenance and is not
run by the test suite.
"""
import json

import numpy as np
from scipy import stats

rng = np.random.default_rng(20240611)
cases = []
for k in range(100):
    na, nb = rng.integers(2, 41, size=2)
    a = rng.normal(rng.uniform(-50, 50), rng.uniform(0.1, 20), size=na)
    b = rng.normal(rng.uniform(-50, 50), rng.uniform(0.1, 20), size=nb)
    if k % 10 == 0:
        # heavy ties and positive skew, like optimizer outcomes
        a = np.round(rng.exponential(30, size=na), 0) + 1
        b = np.round(rng.exponential(30, size=nb), 0) + 1

    def summary(x):
        m, s = x.mean(), x.std(ddof=1)
        return {
            "n": int(len(x)), "mean": m, "std": s, "min": x.min(), "max": x.max(),
            "median": float(np.median(x)), "cv": s / m if m != 0 else None,
        }

    welch = stats.ttest_ind(a, b, equal_var=False)
    va, vb = a.var(ddof=1) / na, b.var(ddof=1) / nb
    dof = (va + vb) ** 2 / (va**2 / (na - 1) + vb**2 / (nb - 1))
    pooled = np.sqrt(((na - 1) * a.var(ddof=1) + (nb - 1) * b.var(ddof=1)) / (na + nb - 2))
    mw = stats.mannwhitneyu(a, b, alternative="less", use_continuity=True, method="asymptotic")
    cases.append({
        "a": a.tolist(), "b": b.tolist(),
        "summary_a": summary(a), "summary_b": summary(b),
        "t": float(welch.statistic), "dof": float(dof), "p_value": float(welch.pvalue),
        "cohens_d": float((a.mean() - b.mean()) / pooled),
        "mann_whitney_u": float(mw.statistic), "mann_whitney_p_less": float(mw.pvalue),
    })

with open("stats_reference.json", "w") as fh:
    json.dump({"generator": "numpy/scipy " + np.__version__ + "/" + __import__("scipy").__version__, "cases": cases}, fh, indent=1)
