"""Operational semantics: single steps, LTS construction, and graph queries.

``step`` derives the outgoing transitions of a closed valid term.  The
time-out action is an ordinary transition here; the priority of tau over t is
the business of the equivalences, not of the transition relation.
"""

from __future__ import annotations

import sys
from dataclasses import dataclass
from typing import Dict, Iterable, List, Optional, Sequence, Tuple

from .errors import (ParseError, StateBudgetExceeded,
                     UnfoldingDiverged)
from .terms import (TAU, TIMEOUT, Hide, Nil, Par, Prefix, Psi, RecCall,
                    Rename, Term, Theta, Choice, Var, alphabet, is_visible,
                    unfold)

if sys.getrecursionlimit() < 20_000:
    sys.setrecursionlimit(20_000)

DEFAULT_MAX_STATES = 50_000
DEFAULT_UNFOLD_FUSE = 10_000

# Labels carried by encoded systems only.
T_EPS = "t_eps"


def eps_label(members: Iterable[str]) -> str:
    return "eps_{%s}" % ",".join(sorted(members))


def t_label(members: Iterable[str]) -> str:
    return "t_{%s}" % ",".join(sorted(members))


def label_kind(label: str) -> Tuple[str, Optional[frozenset]]:
    """Classify a transition label.

    Returns one of ``("tau", None)``, ``("timeout", None)``,
    ``("visible", None)``, ``("t_eps", None)``, ``("eps_set", X)``,
    ``("t_set", X)``.
    """
    if label == TAU:
        return ("tau", None)
    if label == TIMEOUT:
        return ("timeout", None)
    if label == T_EPS:
        return ("t_eps", None)
    for prefix, kind in (("eps_{", "eps_set"), ("t_{", "t_set")):
        if label.startswith(prefix) and label.endswith("}"):
            inner = label[len(prefix):-1]
            members = frozenset(n for n in inner.split(",") if n)
            return (kind, members)
    return ("visible", None)


def is_encoded_label(label: str) -> bool:
    return label_kind(label)[0] in ("t_eps", "eps_set", "t_set")


@dataclass(frozen=True)
class ExplorationLimits:
    max_states: int = DEFAULT_MAX_STATES
    max_depth: int = 1_000_000

    def __post_init__(self):
        if self.max_states <= 0 or self.max_depth <= 0:
            raise ValueError("exploration limits must be positive")


# ---------------------------------------------------------------------------
# Single steps


class _StepCtx:
    __slots__ = ("budget", "active")

    def __init__(self, budget):
        self.budget = budget
        self.active = set()


def step(term: Term, fuse: int = DEFAULT_UNFOLD_FUSE) -> Tuple[Tuple[str, Term], ...]:
    """All SOS-derivable transitions of a closed valid term, deduplicated."""
    return _step(term, _StepCtx([fuse]))


def initials(term: Term, fuse: int = DEFAULT_UNFOLD_FUSE) -> frozenset:
    """Initial actions: labels of outgoing transitions restricted to A and tau."""
    return frozenset(l for l, _ in step(term, fuse) if l != TIMEOUT)


def _dedup(moves):
    out = {}
    for mv in moves:
        out.setdefault(mv, None)
    return tuple(out)


def _step(term: Term, ctx: _StepCtx) -> Tuple[Tuple[str, Term], ...]:
    if isinstance(term, Nil):
        return ()
    if isinstance(term, Prefix):
        return ((term.action, term.body),)
    if isinstance(term, Choice):
        return _dedup(_step(term.left, ctx) + _step(term.right, ctx))
    if isinstance(term, Par):
        left = _step(term.left, ctx)
        right = _step(term.right, ctx)
        moves = []
        for lab, nxt in left:
            if lab not in term.sync:
                moves.append((lab, Par(term.sync, nxt, term.right)))
        for lab, nxt in right:
            if lab not in term.sync:
                moves.append((lab, Par(term.sync, term.left, nxt)))
        for lab, nl in left:
            if lab in term.sync:
                for lab2, nr in right:
                    if lab2 == lab:
                        moves.append((lab, Par(term.sync, nl, nr)))
        return _dedup(moves)
    if isinstance(term, Hide):
        moves = []
        for lab, nxt in _step(term.body, ctx):
            out = TAU if lab in term.hidden else lab
            moves.append((out, Hide(term.hidden, nxt)))
        return _dedup(moves)
    if isinstance(term, Rename):
        moves = []
        for lab, nxt in _step(term.body, ctx):
            if lab in (TAU, TIMEOUT):
                moves.append((lab, Rename(term.pairs, nxt)))
            else:
                for a, b in term.pairs:
                    if a == lab:
                        moves.append((b, Rename(term.pairs, nxt)))
        return _dedup(moves)
    if isinstance(term, Theta):
        inner = _step(term.body, ctx)
        idles = _idles(inner, term.low)
        moves = []
        for lab, nxt in inner:
            if lab == TAU:
                moves.append((TAU, Theta(term.low, term.high, nxt)))
            if lab in term.high:
                moves.append((lab, nxt))
            if idles:
                moves.append((lab, nxt))
        return _dedup(moves)
    if isinstance(term, Psi):
        inner = _step(term.body, ctx)
        idles = _idles(inner, term.allowed)
        moves = []
        for lab, nxt in inner:
            if lab != TIMEOUT:
                moves.append((lab, nxt))
            elif idles:
                moves.append((TIMEOUT, Theta(term.allowed, term.allowed, nxt)))
        return _dedup(moves)
    if isinstance(term, RecCall):
        added = []
        try:
            body: Term = term
            while isinstance(body, RecCall):
                key = body.key()
                if key in ctx.active:
                    raise UnfoldingDiverged(f"unguarded recursion at {body!r}")
                if ctx.budget[0] <= 0:
                    raise UnfoldingDiverged("recursion unfolded past the fuse")
                ctx.budget[0] -= 1
                ctx.active.add(key)
                added.append(key)
                body = unfold(body)
            return _step(body, ctx)
        finally:
            for key in added:
                ctx.active.discard(key)
    if isinstance(term, Var):
        raise ValueError(f"cannot step an open term: {term!r}")
    raise TypeError(f"not a term: {term!r}")


def _idles(moves, allowed) -> bool:
    """Whether the initial actions avoid tau and the allowed set."""
    for lab, _ in moves:
        if lab == TAU or lab in allowed:
            return False
    return True


# ---------------------------------------------------------------------------
# Labelled transition systems


class Lts:
    """A finite LTS with indexed states and a fixed label universe.

    ``tags`` carries one descriptive object per state (a term, an encoding
    tag, or a plain name).  Derived tables (successors, weak reachability,
    stability) are computed once and cached.
    """

    def __init__(self, tags: Sequence, transitions: Iterable[Tuple[int, str, int]],
                 initial: int = 0, sigma: Iterable[str] = (),
                 labels: Optional[Iterable[str]] = None):
        self.tags = list(tags)
        self.transitions = tuple(dict.fromkeys(transitions))
        self.initial = initial
        n = len(self.tags)
        for s, lab, d in self.transitions:
            if not (0 <= s < n and 0 <= d < n):
                raise ValueError(f"transition ({s},{lab!r},{d}) out of range")
        seen = {lab for _, lab, _ in self.transitions}
        base = set(sigma) | {l for l in seen if label_kind(l)[0] == "visible"}
        self.sigma = frozenset(base)
        universe = set(labels) if labels is not None else set()
        universe |= seen | self.sigma | {TAU, TIMEOUT}
        self.labels = frozenset(universe)
        self._out: List[Dict[str, Tuple[int, ...]]] = [dict() for _ in range(n)]
        grouped: Dict[Tuple[int, str], List[int]] = {}
        for s, lab, d in self.transitions:
            grouped.setdefault((s, lab), []).append(d)
        for (s, lab), ds in grouped.items():
            self._out[s][lab] = tuple(dict.fromkeys(ds))
        self._weak: Optional[List[Tuple[int, ...]]] = None

    # -- basic queries ------------------------------------------------------
    def __len__(self):
        return len(self.tags)

    @property
    def num_states(self) -> int:
        return len(self.tags)

    @property
    def num_transitions(self) -> int:
        return len(self.transitions)

    def out(self, s: int) -> Dict[str, Tuple[int, ...]]:
        return self._out[s]

    def succ(self, s: int, label: str) -> Tuple[int, ...]:
        return self._out[s].get(label, ())

    def has_tau(self, s: int) -> bool:
        return bool(self._out[s].get(TAU))

    def initials_visible(self, s: int) -> frozenset:
        return frozenset(l for l in self._out[s]
                         if label_kind(l)[0] == "visible")

    def with_sigma(self, sigma: Iterable[str]) -> "Lts":
        return Lts(self.tags, self.transitions, self.initial,
                   sigma=self.sigma | frozenset(sigma), labels=self.labels)


def weak_reach(lts: Lts) -> List[Tuple[int, ...]]:
    """Reflexive-transitive closure of the tau edges, one tuple per state."""
    if lts._weak is not None:
        return lts._weak
    n = len(lts)
    closure: List[Tuple[int, ...]] = [()] * n
    for s in range(n):
        seen = {s}
        stack = [s]
        while stack:
            u = stack.pop()
            for v in lts.succ(u, TAU):
                if v not in seen:
                    seen.add(v)
                    stack.append(v)
        closure[s] = tuple(sorted(seen))
    lts._weak = closure
    return closure


def stable_reachable(lts: Lts, s: int) -> bool:
    """Whether some tau-free state is reachable from ``s`` over tau edges."""
    return any(not lts.has_tau(u) for u in weak_reach(lts)[s])


def is_strongly_guarded(lts: Lts) -> bool:
    """No cycle in the subgraph of tau and t edges (hence no infinite such path)."""
    n = len(lts)
    colour = [0] * n  # 0 unseen, 1 on stack, 2 done

    def edges(u):
        return lts.succ(u, TAU) + lts.succ(u, TIMEOUT)

    for root in range(n):
        if colour[root]:
            continue
        stack = [(root, iter(edges(root)))]
        colour[root] = 1
        while stack:
            u, it = stack[-1]
            advanced = False
            for v in it:
                if colour[v] == 1:
                    return False
                if colour[v] == 0:
                    colour[v] = 1
                    stack.append((v, iter(edges(v))))
                    advanced = True
                    break
            if not advanced:
                colour[u] = 2
                stack.pop()
    return True


def build_lts(term: Term, limits: Optional[ExplorationLimits] = None,
              sigma: Iterable[str] = (),
              fuse: int = DEFAULT_UNFOLD_FUSE) -> Lts:
    """Breadth-first closure of ``step`` with term-keyed state identity."""
    limits = limits or ExplorationLimits()
    index: Dict[object, int] = {term.key(): 0}
    tags: List[Term] = [term]
    transitions: List[Tuple[int, str, int]] = []
    frontier = [(0, term)]
    depth = 0
    while frontier:
        depth += 1
        if depth > limits.max_depth:
            raise StateBudgetExceeded(len(tags), limits.max_depth)
        nxt = []
        for idx, t in frontier:
            for lab, target in step(t, fuse):
                key = target.key()
                j = index.get(key)
                if j is None:
                    j = len(tags)
                    if j >= limits.max_states:
                        raise StateBudgetExceeded(j + 1, limits.max_states)
                    index[key] = j
                    tags.append(target)
                    nxt.append((j, target))
                transitions.append((idx, lab, j))
        frontier = nxt
    return Lts(tags, transitions, 0, sigma=frozenset(sigma) | alphabet(term))


# ---------------------------------------------------------------------------
# Import/export


def tag_name(tag) -> str:
    if isinstance(tag, Term):
        return str(tag)
    return str(tag)


def to_aut(lts: Lts) -> str:
    """Aldebaran format: ``des (initial, transitions, states)`` plus one line per edge."""
    lines = [f"des ({lts.initial}, {lts.num_transitions}, {lts.num_states})"]
    for s, lab, d in lts.transitions:
        lines.append(f'({s},"{lab}",{d})')
    return "\n".join(lines) + "\n"


def from_aut(text: str) -> Lts:
    lines = [l.strip() for l in text.splitlines() if l.strip()]
    if not lines or not lines[0].startswith("des"):
        raise ParseError("not an aut file: missing des header", 1, 1)
    header = lines[0][lines[0].index("(") + 1:lines[0].rindex(")")]
    try:
        initial, m, n = (int(x.strip()) for x in header.split(","))
    except ValueError:
        raise ParseError(f"bad aut header {lines[0]!r}", 1, 1)
    transitions = []
    for lineno, line in enumerate(lines[1:], start=2):
        if not (line.startswith("(") and line.endswith(")")):
            raise ParseError(f"bad aut line {line!r}", lineno, 1)
        body = line[1:-1]
        try:
            src_s, rest = body.split(",", 1)
            label, dst_s = rest.rsplit(",", 1)
            label = label.strip()
            if label.startswith('"') and label.endswith('"'):
                label = label[1:-1]
            transitions.append((int(src_s), label, int(dst_s)))
        except ValueError:
            raise ParseError(f"bad aut line {line!r}", lineno, 1)
    if len(transitions) != m:
        raise ParseError(f"aut header promises {m} transitions, found {len(transitions)}", 1, 1)
    return Lts([f"s{i}" for i in range(n)], transitions, initial)


def to_dot(lts: Lts, name: str = "lts") -> str:
    lines = [f"digraph {name} {{", "  rankdir=LR;",
             f'  init [shape=point]; init -> n{lts.initial};']
    for i, tag in enumerate(lts.tags):
        label = tag_name(tag).replace('"', r'\"')
        lines.append(f'  n{i} [shape=circle,label="{label}"];')
    for s, lab, d in lts.transitions:
        lines.append(f'  n{s} -> n{d} [label="{lab}"];')
    lines.append("}")
    return "\n".join(lines) + "\n"
