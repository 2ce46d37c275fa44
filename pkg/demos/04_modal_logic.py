"""The reactive Hennessy-Milner logic and distinguishing formulas.

Satisfaction comes in two flavours: triggered (the environment is between
allowed sets) and under a set Y it currently allows.  Two branching
fragments match the two equivalences, and whenever a check refutes a pair,
a formula in the right fragment can be synthesised as evidence.
"""

from ccspt import (alphabet, build_lts, distinguish, in_fragment,
                   parse_formula, parse_term, render, sat, sat_env)

lts = build_lts(parse_term("a.t.b.0"))

# [{X}] is an idling period under X; <t> the time-out it permits.
phi = parse_formula("<a>[{}]<t><b>T")
print(f"a.t.b.0 |= {render(phi)}: {sat(lts, 0, phi)}")

# 'stable' says a tau-free state is weakly reachable.
div = build_lts(parse_term("<x|{x = tau.x}>"))
print("divergent |= stable:", sat(div, 0, parse_formula("stable")))

# Under an environment, visible actions need permission or idleness.
busy = build_lts(parse_term("a.0 + b.0"), sigma={"a", "b"})
phi = parse_formula("<a>T")
print("a+b |=_{b} <a>T:", sat_env(busy, 0, {"b"}, phi))
print("a+b |=_{a} <a>T:", sat_env(busy, 0, {"a"}, phi))

# Synthesised evidence: inequivalent processes yield a fragment formula
# that holds on exactly one side.
t1, t2 = parse_term("a.0 + b.0"), parse_term("tau.a.0 + b.0")
sig = alphabet(t1) | alphabet(t2)
l1, l2 = build_lts(t1, sigma=sig), build_lts(t2, sigma=sig)
f = distinguish(l1, 0, l2, 0, fragment="Lb", sigma=sig)
print("\nwitness formula:", render(f))
print("  in the weak fragment:", in_fragment(f, "Lb"))
print("  holds left / right:", sat(l1, 0, f), "/", sat(l2, 0, f))

f = distinguish(l1, 0, l2, 0, fragment="Lbr", sigma=sig)
print("rooted witness:", render(f), "->", sat(l1, 0, f), "/", sat(l2, 0, f))
