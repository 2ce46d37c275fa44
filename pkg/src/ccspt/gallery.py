"""Hand-built transition systems exercising corner cases of the equivalences.

Two families:

* ``visible_choice_pair`` -- a pair differing in one extra root action whose
  only possible match forces eliding a tau, which a time-out then refutes;
  it separates systems that any tau-only first clause would conflate, also
  under the one-way-switch parallel context.
* ``divergent_timeout_trio`` -- three systems around a time-out into a tau
  cycle, showing that reaching stability must be respected; includes the
  explicit witness relation for the equivalent pair.
"""

from __future__ import annotations

from typing import Dict, Tuple

from .bisim import RelationStore, make_store
from .semantics import Lts
from .terms import Term
from .parser import parse_term


def visible_choice_pair() -> Dict[str, Lts]:
    """States: 0 root, 1 tau.a.b+a, 2 0, 3 t.b+a.b, 4 b (after a), 5 a.b, 6 b after t, 7 0.

    ``with_root_a`` is a.0 + tau.(t.b.0 + a.b.0) + tau.(tau.a.b.0 + a.0);
    ``without_root_a`` drops the root a-transition.
    """
    tags = ["root", "tau_a_b_plus_a", "nil", "t_b_plus_a_b",
            "b_after_a", "a_b", "b_after_t", "done"]
    transitions = [
        (0, "tau", 1),     # towards tau.a.b.0 + a.0
        (1, "tau", 5),
        (1, "a", 2),
        (0, "tau", 3),     # towards t.b.0 + a.b.0
        (3, "a", 4),
        (3, "t", 6),
        (4, "b", 7),
        (5, "a", 4),
        (6, "b", 7),
    ]
    with_a = Lts(tags, transitions + [(0, "a", 2)], 0, sigma={"a", "b"})
    without_a = Lts(tags, transitions, 0, sigma={"a", "b"})
    return {"with_root_a": with_a, "without_root_a": without_a}


def visible_choice_terms() -> Tuple[Term, Term]:
    with_a = parse_term("a.0 + tau.(t.b.0 + a.b.0) + tau.(tau.a.b.0 + a.0)")
    without_a = parse_term("tau.(t.b.0 + a.b.0) + tau.(tau.a.b.0 + a.0)")
    return with_a, without_a


def divergent_timeout_trio() -> Dict[str, Lts]:
    """Three systems over the alphabet {a}.

    * ``stable_after_t``: 0 -a-> 1, 0 -t-> 2 with 2 stable and 2 -a-> 3.
    * ``cycle_with_exit``: the t lands on a tau cycle 2 <-> 3 whose far side
      offers a, but no stable state is ever reached.
    * ``cycle_plain``: the t lands on a bare tau cycle.

    The t-derivative of ``cycle_with_exit`` is entered with a blocked, the
    cycle never idles, so its a-exit stays invisible: it is equivalent to
    ``cycle_plain`` but not to ``stable_after_t``.
    """
    stable_after_t = Lts(
        ["p0", "p1", "p2", "p3"],
        [(0, "a", 1), (0, "t", 2), (2, "a", 3)],
        0, sigma={"a"})
    cycle_with_exit = Lts(
        ["q0", "q1", "q2", "q2x", "q3"],
        [(0, "a", 1), (0, "t", 2),
         (2, "tau", 3), (3, "tau", 2), (3, "a", 4)],
        0, sigma={"a"})
    cycle_plain = Lts(
        ["r0", "r1", "r2", "r2x"],
        [(0, "a", 1), (0, "t", 2), (2, "tau", 3), (3, "tau", 2)],
        0, sigma={"a"})
    return {"stable_after_t": stable_after_t,
            "cycle_with_exit": cycle_with_exit,
            "cycle_plain": cycle_plain}


def divergent_timeout_witness() -> RelationStore:
    """The explicit relation between ``cycle_with_exit`` and ``cycle_plain``:
    both roots and their a-derivatives as pairs and under every environment,
    the cycle states under the empty environment only."""
    systems = divergent_timeout_trio()
    q, r = systems["cycle_with_exit"], systems["cycle_plain"]
    pairs = [(0, 0), (1, 1)]
    triples = [(0, (), 0), (0, ("a",), 0),
               (1, (), 1), (1, ("a",), 1),
               (2, (), 2), (3, (), 3)]
    return make_store(q, r, "brb", pairs=pairs, triples=triples, sigma={"a"})
