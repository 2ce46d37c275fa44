"""Reactive Hennessy-Milner logic: formulas, satisfaction, fragments,
and distinguishing-formula synthesis.

Satisfaction is evaluated either in a triggered environment (``env=None``)
or under a set Y of currently allowed visible actions.  The two branching
fragments are ``Lb`` (weak observations built from stuttering steps,
environment-indexed time-out paths, and stability) and ``Lbr`` (a strong
first observation whose continuation lives in ``Lb``).
"""

from __future__ import annotations

from dataclasses import dataclass
from typing import Dict, Iterable, List, Optional, Tuple

from . import bisim as _bisim
from .errors import FragmentUnsupported
from .semantics import TAU, TIMEOUT, Lts, weak_reach


class Formula:
    """Base class; subclasses are frozen dataclasses with structural equality."""

    __slots__ = ()

    def key(self):
        k = self.__dict__.get("_key")
        if k is None:
            k = _fkey(self)
            object.__setattr__(self, "_key", k)
        return k

    def __eq__(self, other):
        if self is other:
            return True
        if not isinstance(other, Formula):
            return NotImplemented
        return self.key() == other.key()

    def __ne__(self, other):
        eq = self.__eq__(other)
        return eq if eq is NotImplemented else not eq

    def __hash__(self):
        return hash(self.key())

    def __str__(self):
        from .parser import render
        return render(self)

    def __repr__(self):
        return f"<Formula {self}>"


def _fnode(cls):
    return dataclass(frozen=True, eq=False, repr=False)(cls)


@_fnode
class Top(Formula):
    pass


@_fnode
class And(Formula):
    parts: tuple


@_fnode
class Not(Formula):
    sub: Formula


@_fnode
class Diamond(Formula):
    action: str
    sub: Formula


@_fnode
class EnvBox(Formula):
    """An idling period under an environment allowing exactly the given set."""

    allowed: frozenset
    sub: Formula


# Derived modalities.

@_fnode
class Eps(Formula):
    sub: Formula


@_fnode
class HatDiamond(Formula):
    action: str
    sub: Formula


@_fnode
class TimeoutDiamond(Formula):
    allowed: frozenset
    sub: Formula


@_fnode
class EpsX(Formula):
    """left <eps_X> right: a time-out path under X whose stations satisfy left."""

    left: Formula
    allowed: frozenset
    right: Formula


@_fnode
class EpsStep(Formula):
    """eps(left <a^> right): reach a state satisfying left that steps into right."""

    left: Formula
    action: str
    right: Formula


@_fnode
class Stable(Formula):
    pass


def _fkey(f: Formula):
    if isinstance(f, Top):
        return ("T",)
    if isinstance(f, Stable):
        return ("stable",)
    if isinstance(f, And):
        return ("and", tuple(p.key() for p in f.parts))
    if isinstance(f, Not):
        return ("not", f.sub.key())
    if isinstance(f, Diamond):
        return ("dia", f.action, f.sub.key())
    if isinstance(f, HatDiamond):
        return ("hat", f.action, f.sub.key())
    if isinstance(f, EnvBox):
        return ("env", tuple(sorted(f.allowed)), f.sub.key())
    if isinstance(f, TimeoutDiamond):
        return ("tdia", tuple(sorted(f.allowed)), f.sub.key())
    if isinstance(f, Eps):
        return ("eps", f.sub.key())
    if isinstance(f, EpsX):
        return ("epsx", f.left.key(), tuple(sorted(f.allowed)), f.right.key())
    if isinstance(f, EpsStep):
        return ("epsstep", f.left.key(), f.action, f.right.key())
    raise TypeError(f"not a formula: {f!r}")


def conj(parts: Iterable[Formula]) -> Formula:
    seen = {}
    for p in parts:
        if isinstance(p, Top):
            continue
        seen.setdefault(p.key(), p)
    items = tuple(seen.values())
    if not items:
        return Top()
    if len(items) == 1:
        return items[0]
    return And(items)


# ---------------------------------------------------------------------------
# Fragments


def in_fragment(f: Formula, which: str) -> bool:
    """Grammar membership for the branching fragments ``Lb`` and ``Lbr``."""
    if which == "Lb":
        if isinstance(f, (Top, Stable)):
            return True
        if isinstance(f, And):
            return all(in_fragment(p, "Lb") for p in f.parts)
        if isinstance(f, Not):
            return in_fragment(f.sub, "Lb")
        if isinstance(f, EpsStep):
            return (f.action != TIMEOUT
                    and in_fragment(f.left, "Lb") and in_fragment(f.right, "Lb"))
        if isinstance(f, EpsX):
            return in_fragment(f.left, "Lb") and in_fragment(f.right, "Lb")
        return False
    if which == "Lbr":
        if isinstance(f, Top):
            return True
        if isinstance(f, And):
            return all(in_fragment(p, "Lbr") for p in f.parts)
        if isinstance(f, Not):
            return in_fragment(f.sub, "Lbr")
        if isinstance(f, Diamond):
            return f.action != TIMEOUT and in_fragment(f.sub, "Lb")
        if isinstance(f, TimeoutDiamond):
            return in_fragment(f.sub, "Lb")
        return False
    raise FragmentUnsupported(f"unknown fragment {which!r}")


# ---------------------------------------------------------------------------
# Satisfaction


class Evaluator:
    """Memoising satisfaction checker for one LTS."""

    def __init__(self, lts: Lts):
        self.lts = lts
        self.weak = weak_reach(lts)
        self._memo: Dict[tuple, bool] = {}
        self._pin: Dict[int, Formula] = {}  # memo keys use id(); keep them alive

    def idle(self, s: int, allowed: frozenset) -> bool:
        return (not self.lts.has_tau(s)
                and not (self.lts.initials_visible(s) & allowed))

    def sat(self, s: int, f: Formula, env: Optional[frozenset] = None) -> bool:
        self._pin.setdefault(id(f), f)
        key = (s, env, id(f))
        hit = self._memo.get(key)
        if hit is not None:
            return hit
        val = self._eval(s, f, env)
        self._memo[key] = val
        return val

    def _eval(self, s, f, env) -> bool:
        lts = self.lts
        if isinstance(f, Top):
            return True
        if isinstance(f, And):
            return all(self.sat(s, p, env) for p in f.parts)
        if isinstance(f, Not):
            return not self.sat(s, f.sub, env)
        if isinstance(f, Diamond):
            a = f.action
            if a == TAU or a == TIMEOUT:
                return any(self.sat(d, f.sub, env) for d in lts.succ(s, a))
            # a visible action under an environment needs permission or idling
            # and triggers the environment; triggered stays triggered
            if env is not None and a not in env and not self.idle(s, env):
                return False
            return any(self.sat(d, f.sub, None) for d in lts.succ(s, a))
        if isinstance(f, HatDiamond):
            if f.action == TAU and self.sat(s, f.sub, env):
                return True
            return self.sat(s, Diamond(f.action, f.sub), env)
        if isinstance(f, EnvBox):
            x = f.allowed
            gate = x if env is None else (x | env)
            return self.idle(s, gate) and self.sat(s, f.sub, x)
        if isinstance(f, TimeoutDiamond):
            x = f.allowed
            gate = x if env is None else (x | env)
            return self.idle(s, gate) and any(
                self.sat(d, f.sub, x) for d in lts.succ(s, TIMEOUT))
        if isinstance(f, Eps):
            return any(self.sat(u, f.sub, env) for u in self.weak[s])
        if isinstance(f, EpsStep):
            inner = And((f.left, HatDiamond(f.action, f.right)))
            return any(self.sat(u, inner, env) for u in self.weak[s])
        if isinstance(f, Stable):
            return any(not lts.has_tau(u) for u in self.weak[s])
        if isinstance(f, EpsX):
            return self._eps_x(s, f, env)
        raise TypeError(f"not a formula: {f!r}")

    def _eps_x(self, s, f: EpsX, env) -> bool:
        lts = self.lts
        x = f.allowed
        stack: List[int] = []
        for s1 in self.weak[s]:
            if not self.idle(s1, x):
                continue
            if env is not None and not self.idle(s1, env):
                continue
            if not self.sat(s1, f.left, x):
                continue
            if self.sat(s1, f.right, x):
                return True
            for s2 in lts.succ(s1, TIMEOUT):
                if self.sat(s2, f.right, x):
                    return True
                if self.sat(s2, f.left, x):
                    stack.append(s2)
        seen = set()
        while stack:
            u = stack.pop()
            if u in seen:
                continue
            seen.add(u)
            for s1 in self.weak[u]:
                if not self.idle(s1, x) or not self.sat(s1, f.left, x):
                    continue
                if self.sat(s1, f.right, x):
                    return True
                for s2 in lts.succ(s1, TIMEOUT):
                    if self.sat(s2, f.right, x):
                        return True
                    if self.sat(s2, f.left, x) and s2 not in seen:
                        stack.append(s2)
        return False


def sat(lts: Lts, s: int, f: Formula) -> bool:
    """Satisfaction in a triggered environment."""
    return Evaluator(lts).sat(s, f, None)


def sat_env(lts: Lts, s: int, allowed: Iterable[str], f: Formula) -> bool:
    """Satisfaction while the environment allows exactly the given actions."""
    return Evaluator(lts).sat(s, f, frozenset(allowed))


# ---------------------------------------------------------------------------
# Formula enumeration (for the characterisation tests)


def enumerate_fragment(sigma: Iterable[str], max_size: int,
                       which: str = "Lb") -> List[Formula]:
    """All fragment formulas up to ``max_size`` nodes, structurally deduplicated."""
    sigma = sorted(set(sigma))
    subsets = [frozenset()]
    for a in sigma:
        subsets += [x | {a} for x in subsets]
    actions = sigma + [TAU]
    by_size: Dict[int, List[Formula]] = {n: [] for n in range(max_size + 1)}
    seen = set()

    def add(n, f):
        k = f.key()
        if k not in seen:
            seen.add(k)
            by_size[n].append(f)

    if max_size >= 1:
        add(1, Top())
        add(1, Stable())
    for n in range(2, max_size + 1):
        for f in by_size[n - 1]:
            add(n, Not(f))
        for n1 in range(1, n - 1):
            for f in by_size[n1]:
                for g in by_size[n - 1 - n1]:
                    add(n, conj((f, g)) if which == "Lb" else And((f, g)))
        for n1 in range(1, n - 1):
            for f in by_size[n1]:
                for g in by_size[n - 1 - n1]:
                    for a in actions:
                        add(n, EpsStep(f, a, g))
                    for x in subsets:
                        add(n, EpsX(f, x, g))
    if which == "Lb":
        return [f for size in by_size.values() for f in size]
    # Lbr: strong first step over Lb continuations
    lb = [f for size in by_size.values() for f in size]
    out: List[Formula] = []
    outseen = set()

    def addr(f):
        k = f.key()
        if k not in outseen:
            outseen.add(k)
            out.append(f)

    addr(Top())
    for f in lb:
        for a in actions:
            addr(Diamond(a, f))
        for x in subsets:
            addr(TimeoutDiamond(x, f))
    for f in list(out):
        addr(Not(f))
    return out


# ---------------------------------------------------------------------------
# Distinguishing formulas


class _Builder:
    """Extracts distinguishing formulas from the refutation ranks of a fixpoint.

    An entry deleted at round k failed its clause against the relation that
    survived round k-1, so the formula for it only needs formulas of entries
    that died strictly earlier; the recursion is well-founded on ranks.
    """

    def __init__(self, arena: "_bisim.Arena", store: "_bisim.RelationStore"):
        self.a = arena
        self.st = store
        self.memo: Dict[tuple, Formula] = {}
        self._ttreach: Dict[int, Tuple[int, ...]] = {}

    def _dead_before(self, entry, k) -> bool:
        return self.st.rank.get(entry, 1 << 60) < k

    def ttreach(self, q) -> Tuple[int, ...]:
        got = self._ttreach.get(q)
        if got is None:
            seen = {q}
            stack = [q]
            while stack:
                u = stack.pop()
                for v in self.a.tau_succ[u] + self.a.t_succ[u]:
                    if v not in seen:
                        seen.add(v)
                        stack.append(v)
            got = tuple(sorted(seen))
            self._ttreach[q] = got
        return got

    def pair(self, p, q) -> Formula:
        key = ("p", p, q)
        got = self.memo.get(key)
        if got is None:
            why = self.st.fail.get((p, q))
            if why is None:
                got = Not(self.pair(q, p))
            else:
                got = self._pair_formula(p, q, why, self.st.rank[(p, q)])
            self.memo[key] = got
        return got

    def triple(self, p, x, q) -> Formula:
        key = ("t", p, x, q)
        got = self.memo.get(key)
        if got is None:
            why = self.st.fail.get((p, x, q))
            if why is None:
                got = Not(self.triple(q, x, p))
            else:
                got = self._triple_formula(p, x, q, why, self.st.rank[(p, x, q)])
            self.memo[key] = got
        return got

    def _pair_formula(self, p, q, why, k) -> Formula:
        a = self.a
        clause, info = why
        if clause == "1a":
            lab, p2 = info["action"], info["derivative"]
            left = conj(self.pair(p, q1) for q1 in a.weak[q]
                        if self._dead_before((p, q1), k))
            rights = []
            for q1 in a.weak[q]:
                targets = a.out[q1].get(lab, ())
                if lab == TAU:
                    targets = targets + (q1,)
                for q2 in targets:
                    if self._dead_before((p2, q2), k):
                        rights.append(self.pair(p2, q2))
            return EpsStep(left, lab, conj(rights))
        if clause == "1b":
            x, p2 = info["env"], info["derivative"]
            dom = self.ttreach(q)
            left = conj(self.triple(p, x, u) for u in dom
                        if self._dead_before((p, x, u), k))
            right = conj(self.triple(p2, x, u) for u in dom
                         if self._dead_before((p2, x, u), k))
            return EpsX(left, frozenset(a.mask_names(x)), right)
        if clause == "1c":
            return Stable()
        raise FragmentUnsupported(f"no construction for clause {clause}")

    def _triple_formula(self, p, x, q, why, k) -> Formula:
        a = self.a
        clause, info = why
        if clause == "2a":
            p2 = info["derivative"]
            left = conj(self.triple(p, x, q1) for q1 in a.weak[q]
                        if self._dead_before((p, x, q1), k))
            rights = []
            for q1 in a.weak[q]:
                for q2 in a.tau_succ[q1] + (q1,):
                    if self._dead_before((p2, x, q2), k):
                        rights.append(self.triple(p2, x, q2))
            return EpsStep(left, TAU, conj(rights))
        if clause == "2b":
            lab, p2 = info["action"], info["derivative"]
            left = conj(self.triple(p, x, q1) for q1 in a.weak[q]
                        if self._dead_before((p, x, q1), k))
            rights = []
            for q1 in a.weak[q]:
                for q2 in a.out[q1].get(lab, ()):
                    if self._dead_before((p2, q2), k):
                        rights.append(self.pair(p2, q2))
            return EpsStep(left, lab, conj(rights))
        if clause == "2c":
            y, p2 = info["env"], info["derivative"]
            dom = self.ttreach(q)
            left = conj(self.triple(p, y, u) for u in dom
                        if self._dead_before((p, y, u), k))
            right = conj(self.triple(p2, y, u) for u in dom
                         if self._dead_before((p2, y, u), k))
            return EpsX(left, frozenset(a.mask_names(y)), right)
        if clause == "2d-stable":
            return Stable()
        raise FragmentUnsupported(f"no construction for clause {clause}")


class _RootedBuilder:
    """Strong-first-step distinguishers over plain continuations."""

    def __init__(self, arena, rooted_store, plain_builder):
        self.a = arena
        self.st = rooted_store
        self.plain = plain_builder
        self.memo: Dict[tuple, Formula] = {}

    def pair(self, p, q) -> Formula:
        key = ("p", p, q)
        got = self.memo.get(key)
        if got is None:
            why = self.st.fail.get((p, q))
            if why is None:
                got = Not(self.pair(q, p))
            else:
                got = self._formula(p, q, why, env=None)
            self.memo[key] = got
        return got

    def triple(self, p, x, q) -> Formula:
        key = ("t", p, x, q)
        got = self.memo.get(key)
        if got is None:
            why = self.st.fail.get((p, x, q))
            if why is None:
                got = Not(self.triple(q, x, p))
            else:
                got = self._formula(p, q, why, env=x)
            self.memo[key] = got
        return got

    def _formula(self, p, q, why, env) -> Formula:
        a, plain = self.a, self.plain
        clause, info = why
        if clause in ("r1a", "r2b"):
            lab, p2 = info["action"], info["derivative"]
            body = conj(plain.pair(p2, q2)
                        for q2 in a.out[q].get(lab, ())
                        if not plain.st.has_pair(p2, q2))
            return Diamond(lab, body)
        if clause == "r2a":
            p2 = info["derivative"]
            body = conj(plain.triple(p2, env, q2)
                        for q2 in a.tau_succ[q]
                        if not plain.st.has_triple(p2, env, q2))
            return Diamond(TAU, body)
        if clause in ("r1b", "r2c"):
            x, p2 = info["env"], info["derivative"]
            body = conj(plain.triple(p2, x, q2)
                        for q2 in a.t_succ[q]
                        if not plain.st.has_triple(p2, x, q2))
            return TimeoutDiamond(frozenset(a.mask_names(x)), body)
        raise FragmentUnsupported(f"no construction for clause {clause}")


def distinguish(l1: Lts, p: int, l2: Lts, q: int, fragment: str = "Lb",
                env: Optional[Iterable[str]] = None,
                sigma: Iterable[str] = ()) -> Optional[Formula]:
    """A fragment formula telling the two states apart, or None when equivalent.

    With ``fragment="Lb"`` the verdict follows branching reactive
    bisimilarity (triggered, or under the ``env`` set); with ``"Lbr"`` the
    rooted version.  The produced formula is built from the refutation tree
    of the generalised fixpoint and holds on exactly one of the two states.
    """
    if fragment not in ("Lb", "Lbr"):
        raise FragmentUnsupported(f"unknown fragment {fragment!r}")
    arena = _bisim.Arena(l1, None if l2 is l1 else l2, sigma)
    plain = _bisim._reactive_fixpoint(arena, p, q, "gbrb", _bisim.GbrbChecker)
    gq = arena.state2(q)
    xmask = None if env is None else arena.mask_of(env)
    plain_builder = _Builder(arena, plain)
    if fragment == "Lb":
        if xmask is None:
            return None if plain.has_pair(p, gq) else plain_builder.pair(p, gq)
        if plain.has_triple(p, xmask, gq):
            return None
        return plain_builder.triple(p, xmask, gq)
    rooted = _bisim._rooted_layer(arena, p, q, plain, "gbrb-rooted",
                                  _bisim.RootedGbrbChecker)
    builder = _RootedBuilder(arena, rooted, plain_builder)
    if xmask is None:
        return None if rooted.has_pair(p, gq) else builder.pair(p, gq)
    if rooted.has_triple(p, xmask, gq):
        return None
    return builder.triple(p, xmask, gq)
