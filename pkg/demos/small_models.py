"""Two hand-sized models where the optimum is easy to check by hand.

coin flip: one action, half the mass falls into a trap, so p* = 0.5.
choice: 'careful' reaches the good region 90% of the time, 'risky' 50%;
the strategy picks 'careful' and then alternates between a and b.
"""
import json

from ltlmdp import load_environment, synthesize
from ltlmdp.sim import estimate_satisfaction, simulate


def model(vertices, motion, props, actions):
    return load_environment(json.dumps({
        "vertices": [{"id": v, "edges": e, "enabled": a, "obs": o}
                     for v, (e, a, o) in vertices.items()],
        "actions": actions, "propositions": props, "initial": next(iter(vertices)),
        "motion": [{"from": a, "action": u, "to": b, "prob": p} for a, u, b, p in motion],
    }))


COIN = model(
    {"v0": (["safe", "trap"], ["go"], {}), "safe": (["safe"], ["go"], {}),
     "trap": (["trap"], ["go"], {"bad": 1.0})},
    [("v0", "go", "safe", 0.5), ("v0", "go", "trap", 0.5),
     ("safe", "go", "safe", 1.0), ("trap", "go", "trap", 1.0)],
    ["bad"], ["go"])

CHOICE = model(
    {"v0": (["ga", "trap"], ["risky", "careful"], {}),
     "ga": (["ga", "gb"], ["stay", "move"], {"a": 1.0}),
     "gb": (["ga", "gb"], ["stay", "move"], {"b": 1.0}),
     "trap": (["trap"], ["stay"], {})},
    [("v0", "risky", "ga", 0.5), ("v0", "risky", "trap", 0.5),
     ("v0", "careful", "ga", 0.9), ("v0", "careful", "trap", 0.1),
     ("ga", "stay", "ga", 1.0), ("ga", "move", "gb", 1.0),
     ("gb", "stay", "gb", 1.0), ("gb", "move", "ga", 1.0),
     ("trap", "stay", "trap", 1.0)],
    ["a", "b"], ["risky", "careful", "stay", "move"])


def main():
    for name, m, formula in [("coin flip", COIN, "G !bad"),
                             ("choice", CHOICE, "G F a && G F b")]:
        r = synthesize(m, formula)
        est = estimate_satisfaction(m, r.strategy(), 4000, 50, seed=7)
        lo, hi = est.wilson()
        print(f"{name:<10} {formula:<16} p* = {r.probability:.4f}  "
              f"simulated {est.fraction:.4f} [{lo:.4f}, {hi:.4f}]")

    r = synthesize(CHOICE, "G F a && G F b")
    tr = simulate(CHOICE, r.strategy(), seed=3, horizon=8)
    print("\nchoice, one run:", " ".join(f"{st.vertex}-{st.action}" for st in tr.steps))


if __name__ == "__main__":
    main()
