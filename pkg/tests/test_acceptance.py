"""Acceptance suite: golden fixtures plus randomized property campaigns.

Each criterion prints one PASS/FAIL line (run with ``pytest -s`` to see them
live).  Sample counts and tolerances are fixed here; every randomized
campaign demands a 100% pass rate.
"""

import random
import time


from ccspt import (alphabet, brb_X_check, brb_check, build_lts, cbrb_check,
                   distinguish, encode, enumerate_fragment, gbrb_check,
                   in_fragment, parse_term, render, revalidate, sat, sat_env,
                   strong_bisim, tb_check, tob_check)
from ccspt.axioms import (rooted_brb_equiv,
                          soundness_suite)
from ccspt.gallery import (divergent_timeout_trio, divergent_timeout_witness,
                           visible_choice_pair, visible_choice_terms)
from ccspt.modal import Evaluator
from ccspt.sampling import (equivalent_variant, random_context,
                            random_process)
from ccspt.terms import par as mk_par, theta_x, hide as mk_hide, rename as mk_rename


def report(number, description, ok):
    print(f"{'PASS' if ok else 'FAIL'} criterion {number}: {description}")
    assert ok, f"criterion {number}: {description}"


def _pair(s1, s2, sigma=()):
    t1 = parse_term(s1) if isinstance(s1, str) else s1
    t2 = parse_term(s2) if isinstance(s2, str) else s2
    sig = frozenset(sigma) | alphabet(t1) | alphabet(t2)
    return build_lts(t1, sigma=sig), build_lts(t2, sigma=sig), sig


def _sample_pair(rng, i, depth=4, max_states=10):
    sigma = ("a",) if i % 6 == 0 else (("a", "b") if i % 3 else ("a", "b", "c"))
    t1, _ = random_process(rng, sigma, depth=depth, max_states=max_states)
    if rng.random() < 0.45:
        t2 = equivalent_variant(rng, t1)
        try:
            build_lts(t2)
        except Exception:
            t2, _ = random_process(rng, sigma, depth=depth, max_states=max_states)
    else:
        t2, _ = random_process(rng, sigma, depth=depth, max_states=max_states)
    sig = frozenset(sigma) | alphabet(t1) | alphabet(t2)
    return t1, t2, build_lts(t1, sigma=sig), build_lts(t2, sigma=sig), sig


def test_criterion_1_golden_equivalences():
    cases = [
        ("a.t.b.0", "a.t.t.b.0", dict(), True),
        ("a.t.b.0", "a.t.tau.t.b.0", dict(), True),
        ("tau.a.0 + t.b.0", "tau.a.0", dict(rooted=True), True),
        ("a.0", "tau.a.0", dict(), True),
        ("a.0", "tau.a.0", dict(rooted=True), False),
        ("a.0 + b.0", "tau.a.0 + b.0", dict(), False),
    ]
    ok = True
    for s1, s2, kw, expected in cases:
        l1, l2, sig = _pair(s1, s2)
        start = time.perf_counter()
        got = brb_check(l1, 0, l2, 0, sigma=sig, **kw).equivalent
        elapsed = time.perf_counter() - start
        ok = ok and got == expected and elapsed < 1.0
    report(1, "golden equivalences, each under one second", ok)


def test_criterion_2_counterexample_fixtures():
    ok = True
    g = visible_choice_pair()
    ok &= not brb_check(g["with_root_a"], 0, g["without_root_a"], 0).equivalent
    wa, woa = visible_choice_terms()
    ctx = parse_term("tau.0 + a.0")
    l1, l2, sig = _pair(mk_par({"a"}, wa, ctx), mk_par({"a"}, woa, ctx), {"a", "b"})
    ok &= not brb_check(l1, 0, l2, 0, sigma=sig).equivalent
    trio = divergent_timeout_trio()
    p, q, r = trio["stable_after_t"], trio["cycle_with_exit"], trio["cycle_plain"]
    ok &= not brb_check(p, 0, q, 0).equivalent
    ok &= brb_check(q, 0, r, 0).equivalent
    ok &= revalidate(divergent_timeout_witness(), "brb")
    report(2, "counterexample fixtures: exact verdicts and listed witness", ok)


def test_criterion_3_cross_characterisation_agreement():
    rng = random.Random(20240)
    disagreements = []
    n = 500
    for i in range(n):
        t1, t2, l1, l2, sig = _sample_pair(rng, i)
        for rooted in (False, True):
            votes = {
                "brb": brb_check(l1, 0, l2, 0, rooted=rooted, sigma=sig).equivalent,
                "gbrb": gbrb_check(l1, 0, l2, 0, rooted=rooted, sigma=sig).equivalent,
                "tob": tob_check(l1, 0, l2, 0, rooted=rooted, sigma=sig).equivalent,
            }
            e1 = encode(l1, rooted=rooted, sigma=sig)
            e2 = encode(l2, rooted=rooted, sigma=sig)
            votes["tb"] = tb_check(e1, e1.initial, e2, e2.initial,
                                   rooted=rooted).equivalent
            if len(set(votes.values())) != 1:
                disagreements.append((str(t1), str(t2), rooted, votes))
    report(3, f"four characterisations agree on {n} random pairs, both modes "
              f"({len(disagreements)} disagreements)", not disagreements)


def test_criterion_4_equivalence_and_congruence():
    rng = random.Random(77)
    bad = 0
    n_triples = 200
    for i in range(n_triples):
        base, _ = random_process(rng, ("a", "b"), depth=3, max_states=8)
        ts = [base]
        for _ in range(2):
            v = equivalent_variant(rng, base) if rng.random() < 0.7 else \
                random_process(rng, ("a", "b"), depth=3, max_states=8)[0]
            try:
                build_lts(v)
                ts.append(v)
            except Exception:
                ts.append(base)
        sig = frozenset().union(*(alphabet(t) for t in ts)) | {"a", "b"}
        ls = [build_lts(t, sigma=sig) for t in ts]

        def eq(x, y):
            return brb_check(ls[x], 0, ls[y], 0, sigma=sig).equivalent

        if not eq(0, 0):
            bad += 1
        if eq(0, 1) != eq(1, 0):
            bad += 1
        if eq(0, 1) and eq(1, 2) and not eq(0, 2):
            bad += 1
    triples_ok = bad == 0

    n_ctx = 200
    done = 0
    ctx_bad = 0
    while done < n_ctx:
        t1, _ = random_process(rng, ("a", "b"), depth=3, max_states=6)
        t2 = equivalent_variant(rng, t1)
        try:
            build_lts(t2)
        except Exception:
            continue
        sig = alphabet(t1) | alphabet(t2) | {"a", "b"}
        if not rooted_brb_equiv(t1, t2, sig):
            continue
        ctx = random_context(rng, ("a", "b"), depth=2)
        c1, c2 = ctx(t1), ctx(t2)
        try:
            n1 = build_lts(c1).num_states
            n2 = build_lts(c2).num_states
            if max(n1, n2) > 40:
                continue
        except Exception:
            continue
        done += 1
        if not rooted_brb_equiv(c1, c2, alphabet(c1) | alphabet(c2)):
            ctx_bad += 1
    report(4, f"equivalence laws on {n_triples} triples and rooted congruence "
              f"under {n_ctx} contexts ({bad}+{ctx_bad} failures)",
           triples_ok and ctx_bad == 0)


def test_criterion_5_axiom_soundness():
    failures = []
    rep = soundness_suite("Axr", samples=50, seed=501)
    failures += [(ax["axiom"], "Axr", len(ax["failures"]))
                 for ax in rep["axioms"] if ax["failures"]]
    rep = soundness_suite("Ax", samples=50, seed=502)
    failures += [(ax["axiom"], "Ax", len(ax["failures"]))
                 for ax in rep["axioms"] if ax["failures"]]
    rep = soundness_suite("derived", checker=rooted_brb_equiv, samples=50, seed=503)
    failures += [(ax["axiom"], "derived", len(ax["failures"]))
                 for ax in rep["axioms"] if ax["failures"]]

    rng = random.Random(504)
    # RDP under strong bisimilarity on sampled well-guarded specs
    from ccspt.sampling import guarded_spec_pool
    from ccspt.terms import RecCall, spec_apply
    rdp_bad = 0
    for i in range(50):
        sigma = ("a", "b") if i % 2 else ("a", "b", "c")
        pool = guarded_spec_pool(list(sigma))
        sp = rng.choice(pool)
        var = rng.choice(sorted(sp.vars))
        call = RecCall(var, sp)
        unf = spec_apply(sp.body(var), sp)
        l1, l2, sig = _pair(call, unf, sigma)
        if not strong_bisim(l1, 0, l2, 0).equivalent:
            rdp_bad += 1
    if rdp_bad:
        failures.append(("rdp-strong", "strong", rdp_bad))

    # wrapped-operator laws under strong bisimilarity
    law_bad = 0
    for i in range(50):
        t, _ = random_process(rng, ("a", "b"), depth=3, max_states=8)
        x = frozenset(a for a in ("a", "b") if rng.random() < 0.5)
        sig = alphabet(t) | {"a", "b"}
        pairs = [(theta_x(x, t), theta_x(x, theta_x(x, t)))]
        i_set = frozenset(a for a in ("a", "b") if rng.random() < 0.5)
        pairs.append((theta_x(x, mk_hide(i_set, t)),
                      theta_x(x, mk_hide(i_set, theta_x(x | i_set, t)))))
        ren = frozenset((a, rng.choice(("a", "b"))) for a in ("a", "b")
                        if rng.random() < 0.5)
        inv = frozenset(a for (a, b) in ren if b in x)
        pairs.append((theta_x(x, mk_rename(ren, t)),
                      theta_x(x, mk_rename(ren, theta_x(inv, t)))))
        for lhs, rhs in pairs:
            l1, l2, s = _pair(lhs, rhs, sig)
            if not strong_bisim(l1, 0, l2, 0).equivalent:
                law_bad += 1
    if law_bad:
        failures.append(("wrapped-operator-laws", "strong", law_bad))

    report(5, f"axiom soundness at 50 samples per schema plus derived and "
              f"strong-level laws ({failures or 'no failures'})", not failures)


def test_criterion_6_modal_coherence():
    rng = random.Random(660)
    enum_cache = {}
    eq_bad = 0
    done = 0
    while done < 100:
        sigma = ("a",) if done % 3 == 0 else ("a", "b")
        t1, _ = random_process(rng, sigma, depth=3, max_states=8)
        t2 = equivalent_variant(rng, t1)
        try:
            build_lts(t2)
        except Exception:
            continue
        sig = frozenset(sigma) | alphabet(t1) | alphabet(t2)
        l1, l2 = build_lts(t1, sigma=sig), build_lts(t2, sigma=sig)
        if not brb_check(l1, 0, l2, 0, sigma=sig).equivalent:
            continue
        done += 1
        key = tuple(sorted(sig))
        if key not in enum_cache:
            enum_cache[key] = enumerate_fragment(key, 5, "Lb")
        e1, e2 = Evaluator(l1), Evaluator(l2)
        for f in enum_cache[key]:
            if e1.sat(0, f, None) != e2.sat(0, f, None):
                eq_bad += 1
                break

    dist_bad = 0
    done = 0
    while done < 100:
        i = done
        t1, t2, l1, l2, sig = _sample_pair(rng, i, depth=3, max_states=8)
        mode = done % 3
        if mode == 0:
            frag, env = "Lb", None
            inequal = not brb_check(l1, 0, l2, 0, sigma=sig).equivalent
        elif mode == 1:
            frag, env = "Lbr", None
            inequal = not brb_check(l1, 0, l2, 0, rooted=True, sigma=sig).equivalent
        else:
            frag = "Lb"
            env = frozenset(a for a in sig if rng.random() < 0.5)
            inequal = not brb_X_check(l1, 0, l2, 0, env, sigma=sig).equivalent
        if not inequal:
            continue
        done += 1
        f = distinguish(l1, 0, l2, 0, fragment=frag, env=env, sigma=sig)
        if f is None or not in_fragment(f, frag):
            dist_bad += 1
            continue
        if env is None:
            separated = sat(l1, 0, f) != sat(l2, 0, f)
        else:
            separated = sat_env(l1, 0, env, f) != sat_env(l2, 0, env, f)
        if not separated:
            dist_bad += 1
    report(6, f"modal coherence: 100 equivalent pairs against the size-5 "
              f"enumeration and 100 synthesised distinguishers "
              f"({eq_bad}+{dist_bad} failures)", eq_bad == 0 and dist_bad == 0)


def test_criterion_7_environment_canonicalisation():
    rng = random.Random(770)
    bad = 0
    for i in range(100):
        sigma = ("a", "b") if i % 2 else ("a", "b", "c")
        t1, _ = random_process(rng, sigma, depth=3, max_states=8)
        t2, _ = random_process(rng, sigma, depth=3, max_states=8)
        sig = frozenset(sigma) | alphabet(t1) | alphabet(t2)
        big = sig | {"zfresh"}
        l1, l2 = build_lts(t1, sigma=sig), build_lts(t2, sigma=sig)
        b1, b2 = build_lts(t1, sigma=big), build_lts(t2, sigma=big)
        x = frozenset(a for a in sig if rng.random() < 0.5)
        plain = brb_X_check(l1, 0, l2, 0, x, sigma=sig).equivalent
        fresh = brb_X_check(b1, 0, b2, 0, x | {"zfresh"}, sigma=big).equivalent
        if plain != fresh:
            bad += 1
    report(7, f"X-verdicts invariant under injected fresh action on 100 "
              f"samples ({bad} failures)", bad == 0)


def test_criterion_8_concrete_variant_separation():
    l1, l2, sig = _pair("a.t.b.0", "a.t.t.b.0")
    concrete = cbrb_check(l1, 0, l2, 0, sigma=sig).equivalent
    branching = brb_check(l1, 0, l2, 0, sigma=sig).equivalent
    # pre-registered oracle: one mandatory time-out against two
    ok = (concrete is False) and (branching is True)
    report(8, "concrete variant separates the time-out chain that the "
              "branching relation elides", ok)
