import json

import gurobipy as gp
from gurobipy import GRB

model = gp.Model("stochastic_model")
model.Params.OutputFlag = 0

# Sets and parameters
products = ["p1", "p2"]
cost = {"p1": 2.0, "p2": 3.0}

# Decision variables
x = model.addVars(products, lb=0.0, name="x")

# Objective
model.setObjective(gp.quicksum(cost[p] * x[p] for p in products), GRB.MINIMIZE)

# Constraints
model.addConstr(x["p1"] + x["p2"] >= 10, name="demand")

model.optimize()

# Keep the lines below: the evaluation reads model.lp and solution.json.
model.write("model.lp")
optimal = model.Status == GRB.OPTIMAL
with open("solution.json", "w") as f:
    json.dump(
        {
            "status": model.Status,
            "objective": model.ObjVal if optimal else None,
            "values": {v.VarName: v.X for v in model.getVars()} if optimal else {},
        },
        f,
    )
