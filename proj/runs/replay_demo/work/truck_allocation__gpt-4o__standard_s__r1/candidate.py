import json
from statistics import NormalDist

mu = {"storeA": 100.0, "storeB": 150.0}
sigma = {"storeA": 10.0, "storeB": 15.0}
alpha = {"storeA": 0.95, "storeB": 0.90}
var = {"storeA": "x1", "storeB": "x2"}

need = {s: mu[s] + NormalDist().inv_cdf(alpha[s]) * sigma[s] for s in mu}

lines = ["Minimize", " obj: x1 + x2", "Subject To"]
for s in mu:
    lines.append(f" {s}: {var[s]} >= {need[s]!r}")
lines.append("End")
with open("model.lp", "w") as f:
    f.write("\n".join(lines) + "\n")

values = {var[s]: need[s] for s in mu}
with open("solution.json", "w") as f:
    json.dump({"status": "OPTIMAL", "objective": sum(values.values()), "values": values}, f)
