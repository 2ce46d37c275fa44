"""Branching reactive bisimilarity and its sibling characterisations.

The headline behaviour: consecutive time-outs collapse.  ``a.t.b.0`` and
``a.t.t.b.0`` both do a, rest a positive but unquantified amount of time,
then do b -- so they are equivalent, although a concrete variant that counts
time-outs tells them apart.
"""

from ccspt import (alphabet, brb_check, build_lts, cbrb_check, encode,
                   gbrb_check, parse_term, tb_check, tob_check)


def systems(s1, s2):
    t1, t2 = parse_term(s1), parse_term(s2)
    sig = alphabet(t1) | alphabet(t2)
    return build_lts(t1, sigma=sig), build_lts(t2, sigma=sig), sig


l1, l2, sig = systems("a.t.b.0", "a.t.t.b.0")
print("one rest vs two rests:")
print("  branching reactive :", brb_check(l1, 0, l2, 0, sigma=sig).equivalent)
print("  generalised        :", gbrb_check(l1, 0, l2, 0, sigma=sig).equivalent)
print("  binary time-out    :", tob_check(l1, 0, l2, 0, sigma=sig).equivalent)
e1, e2 = encode(l1, sigma=sig), encode(l2, sigma=sig)
print("  encoded, t-branching:", tb_check(e1, e1.initial, e2, e2.initial).equivalent)
print("  concrete (counts t):", cbrb_check(l1, 0, l2, 0, sigma=sig).equivalent)

# tau gets priority over t: the t-branch of the left process is dead code.
l1, l2, sig = systems("tau.a.0 + t.b.0", "tau.a.0")
print("\ntau priority law, rooted:",
      brb_check(l1, 0, l2, 0, rooted=True, sigma=sig).equivalent)

# The classic congruence failure of weak equivalences, reproduced here:
# plain equivalence ignores an initial tau, the rooted version does not.
l1, l2, sig = systems("a.0", "tau.a.0")
print("\na vs tau.a  plain :", brb_check(l1, 0, l2, 0, sigma=sig).equivalent)
print("a vs tau.a  rooted:", brb_check(l1, 0, l2, 0, rooted=True, sigma=sig).equivalent)
l1, l2, sig = systems("a.0 + b.0", "tau.a.0 + b.0")
print("in a choice context:", brb_check(l1, 0, l2, 0, sigma=sig).equivalent)

# A refutation names the clause and move that cannot be matched.
verdict = brb_check(l1, 0, l2, 0, sigma=sig)
print("\nrefutation record:", verdict.refutation[0])
