"""Terms, single steps, and transition systems.

The term language has visible actions, the hidden action ``tau``, and the
time-out action ``t``.  A time-out models the end of an unquantified waiting
period: it can only fire while the system idles, but the raw transition
relation below keeps it like any other action -- the *equivalences* are what
give tau priority over t.
"""

from ccspt import build_lts, initials, parse_term, render, step, to_aut

# A process that does a, rests for a while, then does b.
proc = parse_term("a.t.b.0")
print("term:", render(proc))

print("single steps:")
for label, target in step(proc):
    print(f"  --{label}--> {render(target)}")

# Initial actions exclude the time-out: I(P) only collects A and tau.
lazy = parse_term("tau.a.0 + t.b.0")
print("initials of", render(lazy), "=", sorted(initials(lazy)))

# Recursion: one state, one loop.
clock = parse_term("<x|{x = tick.t.x}>")
lts = build_lts(clock)
print(f"clock: {lts.num_states} states, {lts.num_transitions} transitions")

# Export in Aldebaran format for external tools.
print(to_aut(build_lts(proc)))
