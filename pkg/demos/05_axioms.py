"""Equational axioms, head-normal forms, and the soundness harness.

Every schema can be instantiated with concrete processes and checked
against its designated equivalence; the harness does that with random
bindings and reports failures as data.
"""

import json

from ccspt import (head_normal_form, instantiate, named_schema, parse_term,
                   render, soundness_raa, soundness_suite)

# The branching axiom soaks up an internal step before a stable choice.
schema = named_schema("branching")
lhs, rhs = instantiate(schema, {"alpha": "a", "x": parse_term("b.0"),
                                "y": parse_term("c.0")})
print(f"{schema.name}: {render(lhs)}  =  {render(rhs)}")

# Its time-out twin collapses a rest before the same choice.
schema = named_schema("t-branching")
lhs, rhs = instantiate(schema, {"alpha": "a", "x": parse_term("b.0"), "ys": []})
print(f"{schema.name}: {render(lhs)}  =  {render(rhs)}")

# Head-normal form: the sum of prefixed derivatives.
hnf = head_normal_form(parse_term("a.0 ||{} b.0"))
print("hnf of a.0 ||{} b.0:", render(hnf))

# A quick randomized soundness run over the reactive axiom family.
report = soundness_suite("Axr", samples=10, seed=1)
rows = [(ax["axiom"], ax["passes"], len(ax["failures"]))
        for ax in report["axioms"]]
print("\naxiom                 passes failures")
for name, passes, failures in rows:
    print(f"{name:<22}{passes:>5}{failures:>9}")

# The conditional axiom: agreement under every committed environment
# forces agreement outright.
p, q = parse_term("tau.a.0 + t.b.0"), parse_term("tau.a.0")
print("\nreactive approximation holds on the priority law:",
      soundness_raa(p, q))
