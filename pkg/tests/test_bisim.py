import pytest

from ccspt import (LabelUniverseMismatch, StateBudgetExceeded, brb_X_check,
                   brb_check, cbrb_check, encode, gbrb_check, make_store,
                   parse_term, revalidate, strong_bisim, tb_check, tob_check)
from ccspt.gallery import (divergent_timeout_trio, divergent_timeout_witness,
                           visible_choice_pair, visible_choice_terms)
from conftest import lts_of, pair_lts


def verdict(checker, s1, s2, sigma=(), **kw):
    l1, l2, sig = pair_lts(s1, s2, sigma)
    return checker(l1, 0, l2, 0, sigma=sig, **kw)


# ---------------------------------------------------------------------------
# strong bisimilarity


def test_strong_goldens():
    assert strong_bisim(lts_of("0"), 0, lts_of("0"), 0).equivalent
    l1, l2, _ = pair_lts("a.0", "a.0 + a.0")
    assert strong_bisim(l1, 0, l2, 0).equivalent
    l1, l2, _ = pair_lts("a.0", "tau.a.0")
    assert not strong_bisim(l1, 0, l2, 0).equivalent


def test_strong_label_universe_mismatch():
    l1 = lts_of("a.0")
    l2 = lts_of("b.0")
    with pytest.raises(LabelUniverseMismatch):
        strong_bisim(l1, 0, l2, 0)


# ---------------------------------------------------------------------------
# branching reactive bisimilarity


def test_brb_elides_timeouts():
    assert verdict(brb_check, "a.t.b.0", "a.t.t.b.0").equivalent
    assert verdict(brb_check, "a.t.b.0", "a.t.tau.t.b.0").equivalent


def test_brb_rooted_tau_priority_law():
    assert verdict(brb_check, "tau.a.0 + t.b.0", "tau.a.0", rooted=True).equivalent


def test_brb_choice_context_separates():
    assert not verdict(brb_check, "a.0 + b.0", "tau.a.0 + b.0").equivalent


def test_brb_tau_prefix_plain_vs_rooted():
    assert verdict(brb_check, "a.0", "tau.a.0").equivalent
    assert not verdict(brb_check, "a.0", "tau.a.0", rooted=True).equivalent


def test_brb_visible_first_clause_fixture():
    g = visible_choice_pair()
    assert not brb_check(g["with_root_a"], 0, g["without_root_a"], 0).equivalent


def test_brb_visible_first_clause_parallel_context():
    from ccspt.terms import par
    wa, woa = visible_choice_terms()
    ctx = parse_term("tau.0 + a.0")
    l1 = lts_of(par({"a"}, wa, ctx), sigma={"a", "b"})
    l2 = lts_of(par({"a"}, woa, ctx), sigma={"a", "b"})
    assert not brb_check(l1, 0, l2, 0, sigma={"a", "b"}).equivalent


def test_brb_stability_fixture():
    trio = divergent_timeout_trio()
    p, q, r = trio["stable_after_t"], trio["cycle_with_exit"], trio["cycle_plain"]
    assert not brb_check(p, 0, q, 0).equivalent
    assert brb_check(q, 0, r, 0).equivalent


def test_brb_rejects_encoded_inputs():
    enc = encode(lts_of("a.0"))
    with pytest.raises(LabelUniverseMismatch):
        brb_check(enc, 0, enc, 0)


def test_brb_triple_budget():
    lts = lts_of("a.0", sigma=[f"x{i}" for i in range(30)])
    with pytest.raises(StateBudgetExceeded):
        brb_check(lts, 0, lts, 0, sigma=lts.sigma)


# ---------------------------------------------------------------------------
# X-indexed verdicts


def test_brb_X_goldens():
    # pre-registered oracle: idling under {} forces the triggered pair, whose
    # first clause must match the visible a; hence inequivalent
    assert not verdict(brb_X_check, "a.0", "b.0", env=frozenset()).equivalent
    assert not verdict(brb_X_check, "t.b.0 + a.b.0", "tau.a.b.0 + a.0",
                       env=frozenset()).equivalent
    lts = lts_of("a.t.b.0")
    assert brb_X_check(lts, 0, lts, 0, frozenset({"a", "b"})).equivalent


def test_brb_X_canonicalises_against_sigma():
    l1, l2, sig = pair_lts("t.b.0", "t.t.b.0")
    v1 = brb_X_check(l1, 0, l2, 0, frozenset(), sigma=sig)
    v2 = brb_X_check(l1, 0, l2, 0, frozenset({"zzz"}), sigma=sig)
    assert v1.equivalent == v2.equivalent


# ---------------------------------------------------------------------------
# generalised / concrete / time-out / encoded characterisations


def test_gbrb_matches_brb_on_goldens():
    cases = [("a.t.b.0", "a.t.t.b.0"), ("0", "0"), ("a.0", "tau.a.0"),
             ("a.0 + b.0", "tau.a.0 + b.0"), ("tau.a.0 + t.b.0", "tau.a.0")]
    for s1, s2 in cases:
        for rooted in (False, True):
            assert (verdict(gbrb_check, s1, s2, rooted=rooted).equivalent
                    == verdict(brb_check, s1, s2, rooted=rooted).equivalent), (s1, s2)


def test_cbrb_counts_timeouts():
    assert not verdict(cbrb_check, "a.t.b.0", "a.t.t.b.0").equivalent
    assert verdict(cbrb_check, "a.t.b.0", "a.t.b.0").equivalent
    # rooted variant keeps the tau-priority law: the time-out side never idles
    assert verdict(cbrb_check, "tau.a.0 + t.b.0", "tau.a.0", rooted=True).equivalent


def test_tob_matches_brb_on_goldens():
    cases = [("a.t.b.0", "a.t.t.b.0"), ("a.0", "tau.a.0"),
             ("a.0 + b.0", "tau.a.0 + b.0"), ("tau.a.0 + t.b.0", "tau.a.0")]
    for s1, s2 in cases:
        for rooted in (False, True):
            assert (verdict(tob_check, s1, s2, rooted=rooted).equivalent
                    == verdict(brb_check, s1, s2, rooted=rooted).equivalent), (s1, s2)


def test_tob_environment_entry():
    l1, l2, sig = pair_lts("t.a.0", "t.t.a.0")
    assert tob_check(l1, 0, l2, 0, sigma=sig, env=frozenset()).equivalent
    assert brb_X_check(l1, 0, l2, 0, frozenset(), sigma=sig).equivalent


def test_tb_on_encodings():
    l1, l2, sig = pair_lts("a.t.b.0", "a.t.t.b.0")
    e1, e2 = encode(l1, sigma=sig), encode(l2, sigma=sig)
    assert tb_check(e1, e1.initial, e2, e2.initial).equivalent
    assert tb_check(e1, e1.initial, e1, e1.initial).equivalent


def test_tb_reduces_to_branching_without_timeouts():
    # on timeout-free systems, plain tb over raw labels is stability-respecting
    # branching bisimilarity
    l1, l2, sig = pair_lts("a.0", "tau.a.0")
    assert tb_check(l1, 0, l2, 0).equivalent
    l1, l2, sig = pair_lts("a.0 + b.0", "tau.a.0 + b.0")
    assert not tb_check(l1, 0, l2, 0).equivalent


def test_tb_label_universe_mismatch():
    l1, l2, sig = pair_lts("a.0", "a.0")
    e1 = encode(l1, sigma=sig)
    with pytest.raises(LabelUniverseMismatch):
        tb_check(e1, 0, encode(l2, sigma=sig | {"z"}), 0)


# ---------------------------------------------------------------------------
# witnesses, refutations, revalidation


def test_witness_revalidates():
    # one tau elided, same number of time-outs: accepted by all four
    for checker in (brb_check, gbrb_check, cbrb_check, tob_check):
        v = verdict(checker, "a.tau.t.b.0", "a.t.b.0")
        assert v.equivalent, checker
        assert revalidate(v.witness, v.relation)


def test_rooted_witness_revalidates():
    v = verdict(brb_check, "tau.a.0 + t.b.0", "tau.a.0", rooted=True)
    assert v.equivalent
    assert revalidate(v.witness, "brb-rooted")


def test_damaged_witness_fails():
    v = verdict(brb_check, "a.t.b.0", "a.t.t.b.0")
    store = v.witness
    entry = next(iter(sorted(store.pairs)))
    store.pairs.discard(entry)
    assert not revalidate(store, "brb")


def test_manual_witness_from_the_gallery():
    assert revalidate(divergent_timeout_witness(), "brb")


def test_manual_witness_missing_triples_fails():
    trio = divergent_timeout_trio()
    q, r = trio["cycle_with_exit"], trio["cycle_plain"]
    store = make_store(q, r, "brb", pairs=[(0, 0), (1, 1)],
                       triples=[(0, (), 0), (1, (), 1)], sigma={"a"})
    assert not revalidate(store, "brb")


def test_refutation_records():
    v = verdict(brb_check, "a.0 + b.0", "tau.a.0 + b.0")
    assert not v.equivalent
    assert v.refutation
    record = v.refutation[0]
    assert {"lhs", "rhs", "env", "clause", "detail"} <= set(record)
    assert v.to_json()


def test_verdict_json_schema():
    import json
    v = verdict(brb_check, "a.t.b.0", "a.t.t.b.0")
    data = json.loads(v.to_json())
    assert set(data) == {"relation", "equivalent", "sigma", "entries_checked",
                         "iterations", "refutation", "witness_size"}
    assert data["equivalent"] is True
    assert data["witness_size"] > 0


def test_deterministic_reports():
    a = verdict(brb_check, "a.0 + b.0", "tau.a.0 + b.0").to_json()
    b = verdict(brb_check, "a.0 + b.0", "tau.a.0 + b.0").to_json()
    assert a == b


# ---------------------------------------------------------------------------
# relation laws on small samples (the full-size versions live in acceptance)


def test_inclusion_chain(rng):
    from ccspt.sampling import random_process
    from ccspt.terms import alphabet
    from ccspt.semantics import build_lts
    for _ in range(15):
        t1, _ = random_process(rng, ("a", "b"), depth=3, max_states=8)
        t2, _ = random_process(rng, ("a", "b"), depth=3, max_states=8)
        sig = alphabet(t1) | alphabet(t2) | {"a", "b"}
        l1, l2 = build_lts(t1, sigma=sig), build_lts(t2, sigma=sig)
        strong = strong_bisim(l1, 0, l2, 0).equivalent
        rooted = brb_check(l1, 0, l2, 0, rooted=True, sigma=sig).equivalent
        plain = brb_check(l1, 0, l2, 0, sigma=sig).equivalent
        assert not strong or rooted
        assert not rooted or plain


def test_stuttering_lemma_on_witnesses(rng):
    from ccspt.sampling import random_process, equivalent_variant
    from ccspt.terms import alphabet
    from ccspt.semantics import build_lts, weak_reach
    checked = 0
    for _ in range(20):
        t1, _ = random_process(rng, ("a", "b"), depth=3, max_states=8)
        t2 = equivalent_variant(rng, t1)
        try:
            build_lts(t2)
        except Exception:
            continue
        sig = alphabet(t1) | alphabet(t2) | {"a", "b"}
        l1, l2 = build_lts(t1, sigma=sig), build_lts(t2, sigma=sig)
        v = brb_check(l1, 0, l2, 0, sigma=sig)
        if not v.equivalent:
            continue
        store, arena = v.witness, v.witness.arena
        for (p, q) in list(store.pairs):
            for p1 in arena.weak[p]:
                if (p1, q) in store.pairs:
                    continue
                # p => p1 => p2 with both ends related to q forces p1 related
                assert not any((p2, q) in store.pairs for p2 in arena.weak[p1]), \
                    (str(t1), str(t2))
                checked += 1
    assert checked >= 0


def test_stable_pairs_share_initials(rng):
    from ccspt.sampling import random_process, equivalent_variant
    from ccspt.terms import alphabet
    from ccspt.semantics import build_lts
    for _ in range(15):
        t1, _ = random_process(rng, ("a", "b"), depth=3, max_states=8)
        t2 = equivalent_variant(rng, t1)
        try:
            build_lts(t2)
        except Exception:
            continue
        sig = alphabet(t1) | alphabet(t2) | {"a", "b"}
        l1, l2 = build_lts(t1, sigma=sig), build_lts(t2, sigma=sig)
        v = brb_check(l1, 0, l2, 0, sigma=sig)
        if not v.equivalent:
            continue
        arena = v.witness.arena
        for (p, q) in v.witness.pairs:
            if not arena.has_tau[p] and not arena.has_tau[q]:
                assert arena.vis_mask[p] == arena.vis_mask[q]


def test_random_witnesses_revalidate(rng):
    from ccspt.sampling import random_process, equivalent_variant
    from ccspt.terms import alphabet
    from ccspt.semantics import build_lts
    done = 0
    while done < 8:
        t1, _ = random_process(rng, ("a", "b"), depth=3, max_states=8)
        t2 = equivalent_variant(rng, t1)
        try:
            build_lts(t2)
        except Exception:
            continue
        sig = alphabet(t1) | alphabet(t2) | {"a", "b"}
        l1, l2 = build_lts(t1, sigma=sig), build_lts(t2, sigma=sig)
        checks = [
            ("brb", brb_check(l1, 0, l2, 0, sigma=sig)),
            ("gbrb", gbrb_check(l1, 0, l2, 0, sigma=sig)),
            ("cbrb", cbrb_check(l1, 0, l2, 0, sigma=sig)),
            ("tob", tob_check(l1, 0, l2, 0, sigma=sig)),
            ("brb-rooted", brb_check(l1, 0, l2, 0, rooted=True, sigma=sig)),
        ]
        if not all(v.equivalent for _, v in checks):
            continue
        done += 1
        for relation, v in checks:
            assert revalidate(v.witness, relation), (relation, str(t1), str(t2))


def test_timeout_free_coincidence(rng):
    # without time-outs the reactive relation degenerates: plain tb over the
    # raw labels must agree, giving a fifth cross-check on that fragment
    from ccspt.sampling import random_process
    from ccspt.terms import alphabet
    from ccspt.semantics import build_lts
    done = 0
    while done < 40:
        t1, _ = random_process(rng, ("a", "b"), depth=3, max_states=8)
        t2, _ = random_process(rng, ("a", "b"), depth=3, max_states=8)
        sig = alphabet(t1) | alphabet(t2) | {"a", "b"}
        l1, l2 = build_lts(t1, sigma=sig), build_lts(t2, sigma=sig)
        if any(lab == "t" for _, lab, _ in l1.transitions + l2.transitions):
            continue
        done += 1
        reactive = brb_check(l1, 0, l2, 0, sigma=sig).equivalent
        raw = tb_check(l1, 0, l2, 0).equivalent
        assert reactive == raw, (str(t1), str(t2))
