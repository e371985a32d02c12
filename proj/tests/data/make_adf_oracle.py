#!/usr/bin/env python3
"""Freezes statsmodels adfuller results used as an external oracle.

Run from this directory: python3 make_adf_oracle.py
"""
import json
import math

import numpy as np
import statsmodels
from statsmodels.tsa.stattools import adfuller

rng = np.random.default_rng(7)


def series():
    e = rng.normal(size=400)
    yield "random_walk", np.cumsum(e)[:250]
    yield "white_noise", rng.normal(size=120)
    ar = np.zeros(300)
    for t in range(1, 300):
        ar[t] = 0.9 * ar[t - 1] + e[t]
    yield "ar1_0.9", ar
    t = np.arange(200)
    yield "trend_stationary", 0.05 * t + rng.normal(size=200)
    yield "short_walk", np.cumsum(rng.normal(size=40))


cases = []
for name, y in series():
    T = len(y)
    max_lag = math.floor(12 * (T / 100) ** 0.25)
    while max_lag > 0 and max_lag >= (T - 10) / 2:
        max_lag -= 1
    for reg, det in (("n", "none"), ("c", "constant"), ("ct", "constant_trend")):
        for mode in ("aic", "fixed"):
            if mode == "aic":
                res = adfuller(y, maxlag=max_lag, regression=reg, autolag="AIC")
            else:
                res = adfuller(y, maxlag=2, regression=reg, autolag=None)
            stat, p, lag, nobs, crit = res[:5]
            cases.append({
                "name": name, "deterministic": det, "lag_mode": mode,
                "max_lag": max_lag if mode == "aic" else 2,
                "t_stat": float(stat), "p_value": float(p), "lag": int(lag), "nobs": int(nobs),
                "crit": [float(crit["1%"]), float(crit["5%"]), float(crit["10%"])],
                "y": [float(v) for v in y],
            })

with open("adf_oracle.json", "w") as fh:
    json.dump({"generator": "statsmodels " + statsmodels.__version__, "cases": cases}, fh, indent=1)
print(len(cases), "cases")
