"""Abstract syntax for process expressions with time-outs.

The term language has prefixing over visible actions, the hidden action
``tau`` and the time-out action ``t``, binary choice, alphabetised parallel
composition, abstraction (hiding), relational renaming, the two environment
operators ``theta`` / ``psi``, and calls into recursive specifications.

Terms are immutable.  Equality and hashing go through a canonical key that
numbers specification-bound variables by their binding structure, so terms
that differ only in the names of bound variables compare equal.  That is the
state identity used by the LTS builder.
"""

from __future__ import annotations

import itertools
from dataclasses import dataclass
from typing import Iterable, Mapping, Tuple, Union

from .errors import InvalidResult

TAU = "tau"
TIMEOUT = "t"
RESERVED_NAMES = (TAU, TIMEOUT)

ActionSet = frozenset

_fresh_counter = itertools.count()


def is_visible(action: str) -> bool:
    return action not in RESERVED_NAMES


def visible_set(actions: Iterable[str]) -> frozenset:
    """Freeze a collection of visible action names, rejecting tau/t."""
    out = frozenset(actions)
    for a in out:
        if not is_visible(a):
            raise ValueError(f"{a!r} is not a visible action name")
    return out


class Term:
    """Base class; subclasses are frozen dataclasses."""

    __slots__ = ()

    def key(self):
        """Canonical structural key, invariant under renaming of bound variables."""
        k = self.__dict__.get("_key")
        if k is None:
            k = _canon(self, (), frozenset())
            object.__setattr__(self, "_key", k)
        return k

    def __eq__(self, other):
        if self is other:
            return True
        if not isinstance(other, Term):
            return NotImplemented
        return self.key() == other.key()

    def __ne__(self, other):
        eq = self.__eq__(other)
        return eq if eq is NotImplemented else not eq

    def __hash__(self):
        h = self.__dict__.get("_hash")
        if h is None:
            h = hash(self.key())
            object.__setattr__(self, "_hash", h)
        return h

    def __str__(self):
        from .parser import render
        return render(self)

    def __repr__(self):
        return f"<{type(self).__name__} {self}>"


def _node(cls):
    return dataclass(frozen=True, eq=False, repr=False)(cls)


@_node
class Nil(Term):
    pass


@_node
class Var(Term):
    name: str


@_node
class Prefix(Term):
    action: str
    body: Term


@_node
class Choice(Term):
    left: Term
    right: Term


@_node
class Par(Term):
    sync: frozenset
    left: Term
    right: Term


@_node
class Hide(Term):
    hidden: frozenset
    body: Term


@_node
class Rename(Term):
    pairs: frozenset  # of (old, new) visible-name pairs
    body: Term


@_node
class Theta(Term):
    low: frozenset
    high: frozenset
    body: Term

    def __post_init__(self):
        if not self.low <= self.high:
            raise ValueError("theta requires its lower set to be included in the upper set")


@_node
class Psi(Term):
    allowed: frozenset
    body: Term


@dataclass(frozen=True, eq=False, repr=False)
class RecSpec:
    """A set of recursive equations ``x = body`` binding the variables on the left."""

    equations: Tuple[Tuple[str, Term], ...]

    def __post_init__(self):
        seen = set()
        for name, _ in self.equations:
            if name in seen:
                raise ValueError(f"duplicate equation for {name!r}")
            seen.add(name)

    @property
    def vars(self) -> frozenset:
        return frozenset(name for name, _ in self.equations)

    def body(self, name: str) -> Term:
        for n, b in self.equations:
            if n == name:
                return b
        raise KeyError(name)

    def __eq__(self, other):
        if self is other:
            return True
        if not isinstance(other, RecSpec):
            return NotImplemented
        return self._cmp_key() == other._cmp_key()

    def _cmp_key(self):
        k = self.__dict__.get("_ckey")
        if k is None:
            first = self.equations[0][0] if self.equations else None
            k = _spec_key(self, first, (), frozenset()) if first else ("spec",)
            object.__setattr__(self, "_ckey", k)
        return k

    def __hash__(self):
        return hash(self._cmp_key())

    def __repr__(self):
        eqs = "; ".join(f"{n} = {b}" for n, b in self.equations)
        return f"<RecSpec {eqs}>"


def spec(equations: Union[Mapping[str, Term], Iterable[Tuple[str, Term]]]) -> RecSpec:
    if isinstance(equations, Mapping):
        equations = equations.items()
    return RecSpec(tuple(equations))


@_node
class RecCall(Term):
    var: str
    spec: RecSpec

    def __post_init__(self):
        if self.var not in self.spec.vars:
            raise ValueError(f"{self.var!r} is not bound by the specification")


NIL = Nil()


# ---------------------------------------------------------------------------
# Canonical keys


def _spec_order(sp: RecSpec, entry: str):
    """Deterministic ordering of a specification's variables, entry point first.

    Variables are numbered in the order they are first referenced, breadth
    first over equations; unreferenced equations follow sorted by name.
    """
    order = [entry]
    seen = {entry}
    queue = [entry]
    while queue:
        v = queue.pop(0)
        for ref in _spec_refs(sp.body(v), sp.vars, frozenset()):
            if ref not in seen:
                seen.add(ref)
                order.append(ref)
                queue.append(ref)
    for name, _ in sorted(sp.equations):
        if name not in seen:
            seen.add(name)
            order.append(name)
    return order


def _spec_refs(term: Term, names: frozenset, shadow: frozenset):
    """Yield references to ``names`` in ``term`` in a deterministic order."""
    if isinstance(term, Var):
        if term.name in names and term.name not in shadow:
            yield term.name
    elif isinstance(term, Prefix):
        yield from _spec_refs(term.body, names, shadow)
    elif isinstance(term, (Choice, Par)):
        yield from _spec_refs(term.left, names, shadow)
        yield from _spec_refs(term.right, names, shadow)
    elif isinstance(term, (Hide, Rename, Theta, Psi)):
        yield from _spec_refs(term.body, names, shadow)
    elif isinstance(term, RecCall):
        inner = shadow | term.spec.vars
        for _, body in term.spec.equations:
            yield from _spec_refs(body, names, inner)


def _spec_key(sp: RecSpec, entry: str, env, env_names):
    order = _spec_order(sp, entry)
    idx = {name: i for i, name in enumerate(order)}
    env2 = env + (idx,)
    names2 = env_names | sp.vars
    return tuple((idx[name], _canon(sp.body(name), env2, names2))
                 for name in order)


def _canon(term: Term, env, env_names):
    """Canonical key of ``term`` with bound variables resolved through ``env``.

    ``env`` is a tuple of per-binder maps (innermost last); a bound variable
    becomes (distance-to-binder, index-within-binder).
    """
    if not (env_names and free_vars(term) & env_names):
        cached = term.__dict__.get("_key")
        if cached is not None:
            return cached
        key = _canon_raw(term, (), frozenset())
        object.__setattr__(term, "_key", key)
        return key
    return _canon_raw(term, env, env_names)


def _canon_raw(term: Term, env, env_names):
    if isinstance(term, Nil):
        return ("0",)
    if isinstance(term, Var):
        name = term.name
        for dist, scope in enumerate(reversed(env)):
            if name in scope:
                return ("b", dist, scope[name])
        return ("v", name)
    if isinstance(term, Prefix):
        return ("pre", term.action, _canon(term.body, env, env_names))
    if isinstance(term, Choice):
        return ("+", _canon(term.left, env, env_names), _canon(term.right, env, env_names))
    if isinstance(term, Par):
        return ("par", tuple(sorted(term.sync)),
                _canon(term.left, env, env_names), _canon(term.right, env, env_names))
    if isinstance(term, Hide):
        return ("hide", tuple(sorted(term.hidden)), _canon(term.body, env, env_names))
    if isinstance(term, Rename):
        return ("ren", tuple(sorted(term.pairs)), _canon(term.body, env, env_names))
    if isinstance(term, Theta):
        return ("theta", tuple(sorted(term.low)), tuple(sorted(term.high)),
                _canon(term.body, env, env_names))
    if isinstance(term, Psi):
        return ("psi", tuple(sorted(term.allowed)), _canon(term.body, env, env_names))
    if isinstance(term, RecCall):
        order = _spec_order(term.spec, term.var)
        idx = {name: i for i, name in enumerate(order)}
        env2 = env + (idx,)
        names2 = env_names | term.spec.vars
        return ("rec", tuple(_canon(term.spec.body(name), env2, names2) for name in order))
    raise TypeError(f"not a term: {term!r}")


# ---------------------------------------------------------------------------
# Free variables, validity, alphabet


def free_vars(term: Term) -> frozenset:
    """Variables with at least one free occurrence."""
    cached = term.__dict__.get("_fv")
    if cached is not None:
        return cached
    if isinstance(term, Nil):
        fv = frozenset()
    elif isinstance(term, Var):
        fv = frozenset((term.name,))
    elif isinstance(term, Prefix):
        fv = free_vars(term.body)
    elif isinstance(term, (Choice, Par)):
        fv = free_vars(term.left) | free_vars(term.right)
    elif isinstance(term, (Hide, Rename, Theta, Psi)):
        fv = free_vars(term.body)
    elif isinstance(term, RecCall):
        fv = frozenset()
        for _, body in term.spec.equations:
            fv |= free_vars(body)
        fv -= term.spec.vars
    else:
        raise TypeError(f"not a term: {term!r}")
    object.__setattr__(term, "_fv", fv)
    return fv


def is_closed(term: Term) -> bool:
    return not free_vars(term)


def is_valid(term: Term) -> bool:
    """False iff a theta/psi argument has a free variable bound by an enclosing binder."""
    return _valid(term, frozenset())


def _valid(term: Term, bound: frozenset) -> bool:
    if isinstance(term, (Nil, Var)):
        return True
    if isinstance(term, Prefix):
        return _valid(term.body, bound)
    if isinstance(term, (Choice, Par)):
        return _valid(term.left, bound) and _valid(term.right, bound)
    if isinstance(term, (Hide, Rename)):
        return _valid(term.body, bound)
    if isinstance(term, (Theta, Psi)):
        if free_vars(term.body) & bound:
            return False
        return _valid(term.body, bound)
    if isinstance(term, RecCall):
        inner = bound | term.spec.vars
        return all(_valid(body, inner) for _, body in term.spec.equations)
    raise TypeError(f"not a term: {term!r}")


def alphabet(term: Term) -> frozenset:
    """Union of all visible action names occurring syntactically."""
    cached = term.__dict__.get("_alpha")
    if cached is not None:
        return cached
    if isinstance(term, (Nil, Var)):
        out = frozenset()
    elif isinstance(term, Prefix):
        out = alphabet(term.body)
        if is_visible(term.action):
            out |= {term.action}
    elif isinstance(term, Choice):
        out = alphabet(term.left) | alphabet(term.right)
    elif isinstance(term, Par):
        out = term.sync | alphabet(term.left) | alphabet(term.right)
    elif isinstance(term, Hide):
        out = term.hidden | alphabet(term.body)
    elif isinstance(term, Rename):
        out = alphabet(term.body)
        for a, b in term.pairs:
            out |= {a, b}
    elif isinstance(term, Theta):
        out = term.low | term.high | alphabet(term.body)
    elif isinstance(term, Psi):
        out = term.allowed | alphabet(term.body)
    elif isinstance(term, RecCall):
        out = frozenset()
        for _, body in term.spec.equations:
            out |= alphabet(body)
    else:
        raise TypeError(f"not a term: {term!r}")
    object.__setattr__(term, "_alpha", out)
    return out


# ---------------------------------------------------------------------------
# Substitution


def substitute(term: Term, mapping: Mapping[str, Term]) -> Term:
    """Capture-avoiding simultaneous substitution; the result must stay valid."""
    out = _subst(term, dict(mapping))
    if not is_valid(out):
        raise InvalidResult(f"substitution produced an invalid expression: {out!r}")
    return out


def _subst(term: Term, mapping) -> Term:
    if not mapping:
        return term
    if isinstance(term, Nil):
        return term
    if isinstance(term, Var):
        return mapping.get(term.name, term)
    if isinstance(term, Prefix):
        return Prefix(term.action, _subst(term.body, mapping))
    if isinstance(term, Choice):
        return Choice(_subst(term.left, mapping), _subst(term.right, mapping))
    if isinstance(term, Par):
        return Par(term.sync, _subst(term.left, mapping), _subst(term.right, mapping))
    if isinstance(term, Hide):
        return Hide(term.hidden, _subst(term.body, mapping))
    if isinstance(term, Rename):
        return Rename(term.pairs, _subst(term.body, mapping))
    if isinstance(term, Theta):
        return Theta(term.low, term.high, _subst(term.body, mapping))
    if isinstance(term, Psi):
        return Psi(term.allowed, _subst(term.body, mapping))
    if isinstance(term, RecCall):
        live = {v: t for v, t in mapping.items()
                if v not in term.spec.vars and v in free_vars(term)}
        if not live:
            return term
        clashes = term.spec.vars & frozenset().union(
            *(free_vars(t) for t in live.values()))
        sp = term.spec
        var = term.var
        if clashes:
            ren = {v: f"{v}~{next(_fresh_counter)}" for v in clashes}
            renaming = {v: Var(n) for v, n in ren.items()}
            sp = RecSpec(tuple((ren.get(n, n), _subst(b, renaming))
                               for n, b in sp.equations))
            var = ren.get(var, var)
        sp = RecSpec(tuple((n, _subst(b, live)) for n, b in sp.equations))
        return RecCall(var, sp)
    raise TypeError(f"not a term: {term!r}")


def unfold(call: RecCall) -> Term:
    """The body of a recursion call with every bound variable re-tied to the spec."""
    sp = call.spec
    return _subst(sp.body(call.var), {v: RecCall(v, sp) for v in sp.vars})


def spec_apply(term: Term, sp: RecSpec) -> Term:
    """Substitute a call for each of the specification's variables in ``term``."""
    return substitute(term, {v: RecCall(v, sp) for v in sp.vars})


# ---------------------------------------------------------------------------
# Syntactic well-guardedness


def is_well_guarded(sp: RecSpec) -> bool:
    """Whether repeated substitution can make every variable visibly guarded.

    Detected by a dependency analysis: an occurrence of a bound variable not
    under a visible-action prefix induces an edge, and the specification is
    accepted iff that graph is acyclic and no hiding operator occurs in it.
    tau and t do not guard.
    """
    edges = {name: set() for name, _ in sp.equations}
    for name, body in sp.equations:
        if _has_hide(body):
            return False
        _unguarded(body, sp.vars, frozenset(), False, edges[name])
    # cycle detection over the unguarded-dependency graph
    state = {}  # 0 visiting, 1 done

    def dfs(v):
        state[v] = 0
        for w in edges[v]:
            if state.get(w) == 0:
                return False
            if w not in state and not dfs(w):
                return False
        state[v] = 1
        return True

    return all(dfs(v) for v in edges if v not in state)


def _has_hide(term: Term) -> bool:
    if isinstance(term, Hide):
        return True
    if isinstance(term, (Nil, Var)):
        return False
    if isinstance(term, Prefix):
        return _has_hide(term.body)
    if isinstance(term, (Choice, Par)):
        return _has_hide(term.left) or _has_hide(term.right)
    if isinstance(term, (Rename, Theta, Psi)):
        return _has_hide(term.body)
    if isinstance(term, RecCall):
        return any(_has_hide(b) for _, b in term.spec.equations)
    raise TypeError(f"not a term: {term!r}")


def _unguarded(term, names, shadow, guarded, out):
    if isinstance(term, Var):
        if term.name in names and term.name not in shadow and not guarded:
            out.add(term.name)
    elif isinstance(term, Prefix):
        _unguarded(term.body, names, shadow, guarded or is_visible(term.action), out)
    elif isinstance(term, (Choice, Par)):
        _unguarded(term.left, names, shadow, guarded, out)
        _unguarded(term.right, names, shadow, guarded, out)
    elif isinstance(term, (Hide, Rename, Theta, Psi)):
        _unguarded(term.body, names, shadow, guarded, out)
    elif isinstance(term, RecCall):
        inner = shadow | term.spec.vars
        for _, body in term.spec.equations:
            _unguarded(body, names, inner, guarded, out)


def is_guarded(term: Term) -> bool:
    """Every recursive specification occurring in the term is well-guarded."""
    if isinstance(term, (Nil, Var)):
        return True
    if isinstance(term, Prefix):
        return is_guarded(term.body)
    if isinstance(term, (Choice, Par)):
        return is_guarded(term.left) and is_guarded(term.right)
    if isinstance(term, (Hide, Rename, Theta, Psi)):
        return is_guarded(term.body)
    if isinstance(term, RecCall):
        return is_well_guarded(term.spec) and all(
            is_guarded(b) for _, b in term.spec.equations)
    raise TypeError(f"not a term: {term!r}")


# ---------------------------------------------------------------------------
# Convenience constructors


def prefix(action: str, body: Term = NIL) -> Term:
    return Prefix(action, body)


def seq(*actions: str) -> Term:
    """a.b.c.0 style chains."""
    out: Term = NIL
    for a in reversed(actions):
        out = Prefix(a, out)
    return out


def choice(*parts: Term) -> Term:
    if not parts:
        return NIL
    out = parts[0]
    for p in parts[1:]:
        out = Choice(out, p)
    return out


def par(sync: Iterable[str], left: Term, right: Term) -> Term:
    return Par(visible_set(sync), left, right)


def hide(hidden: Iterable[str], body: Term) -> Term:
    return Hide(visible_set(hidden), body)


def rename(pairs: Iterable[Tuple[str, str]], body: Term) -> Term:
    frozen = frozenset(pairs)
    for a, b in frozen:
        if not (is_visible(a) and is_visible(b)):
            raise ValueError("renamings relate visible actions only")
    return Rename(frozen, body)


def theta(low: Iterable[str], high: Iterable[str], body: Term) -> Term:
    return Theta(visible_set(low), visible_set(high), body)


def theta_x(allowed: Iterable[str], body: Term) -> Term:
    x = visible_set(allowed)
    return Theta(x, x, body)


def psi(allowed: Iterable[str], body: Term) -> Term:
    return Psi(visible_set(allowed), body)


def rec(var: str, equations) -> RecCall:
    return RecCall(var, equations if isinstance(equations, RecSpec) else spec(equations))
