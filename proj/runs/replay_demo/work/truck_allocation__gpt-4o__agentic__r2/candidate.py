import json
from statistics import NormalDist

z = NormalDist().inv_cdf
need = {"x1": 100 + z(0.95) * 10, "x2": 150 + z(0.90) * 15
with open("solution.json", "w") as f:
    json.dump({"status": "OPTIMAL", "objective": sum(need.values()), "values": need}, f)
