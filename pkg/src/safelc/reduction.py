r"""Substitution and reduction.

Two substitution disciplines live here.  `subst_capture_avoiding` is the
classical one: it renames bound variables out of the way and serves as the
oracle.  `subst_no_rename` replaces variables textually and never renames;
instead it reports whether a capture happened.  On terms that stay inside
the safety discipline the two agree and the flag stays false, which is the
whole point of the restriction.

The step functions differ in how much of a redex they consume:

>>> from safelc.syntax import parse, pretty
>>> t = parse(r"(\f:o->o x:o. f x) g a")
>>> pretty(beta_step(t))
'(\\x:o. g x) a'
>>> pretty(safe_step(t))
'g a'

`beta_step` peels a single binder per step, so it walks through states
that can fall outside the safe fragment even when start and finish are
both safe.  `safe_step` contracts the whole block in one simultaneous
substitution and preserves safety; if its no-rename substitution ever
reports a capture, something violated the discipline and we abort loudly
rather than return a wrong term.
"""

from __future__ import annotations

import enum
from dataclasses import dataclass
from typing import Iterator, Mapping, NamedTuple, Optional

from .safety import TypeCheckError, eta_long, simple_type_of
from .syntax import Abs, App, Term, TypeEnv, Var, alpha_eq, mk_abs, mk_app, primed

Substitution = Mapping[str, Term]


class CaptureViolation(Exception):
    """A no-rename contraction captured a free variable of an argument.

    Raised by safe_step; never raised for terms that actually satisfy the
    safety discipline, so seeing one means the input did not.
    """

    def __init__(self, names: frozenset[str], message: str):
        super().__init__(message)
        self.names = names


class BudgetExceededError(Exception):
    def __init__(self, steps: int, size: int, message: str):
        super().__init__(message)
        self.steps = steps
        self.size = size


@dataclass(frozen=True)
class ReductionBudget:
    max_steps: int = 100_000
    max_term_size: int = 1_000_000

    def __post_init__(self):
        if self.max_steps < 1 or self.max_term_size < 1:
            raise ValueError("budget limits must be positive")


DEFAULT_BUDGET = ReductionBudget()


class Strategy(enum.Enum):
    PLAIN = "plain"
    SAFE = "safe"


def _coerce_strategy(strategy: "Strategy | str") -> Strategy:
    if isinstance(strategy, Strategy):
        return strategy
    try:
        return Strategy(str(strategy).lower())
    except ValueError:
        raise ValueError(f"unknown strategy: {strategy!r}") from None


# --------------------------------------------------------------------------
# substitution


class SubstResult(NamedTuple):
    term: Term
    captured: bool


def _subst_textual(term: Term, mapping: Substitution) -> tuple[Term, frozenset[str]]:
    # returns the substituted term plus the set of binder names that
    # captured a free variable of some landed image
    no_capture: frozenset[str] = frozenset()
    if not mapping:
        return term, no_capture
    if isinstance(term, Var):
        image = mapping.get(term.name)
        return (term if image is None else image), no_capture
    if isinstance(term, App):
        head, captured = _subst_textual(term.head, mapping)
        args = []
        changed = head is not term.head
        for a in term.args:
            new, c = _subst_textual(a, mapping)
            captured |= c
            changed = changed or new is not a
            args.append(new)
        if not changed:
            return term, captured
        return mk_app(head, tuple(args)), captured
    assert isinstance(term, Abs)
    shadowed = term.binder_names
    active = {
        x: u
        for x, u in mapping.items()
        if x in term.body.free_names and x not in shadowed
    }
    if not active:
        return term, no_capture
    captured = frozenset(
        y for y in shadowed if any(y in u.free_names for u in active.values())
    )
    body, inner = _subst_textual(term.body, active)
    captured |= inner
    if body is term.body:
        return term, captured
    return mk_abs(term.binders, body), captured


def subst_no_rename(term: Term, s: Substitution) -> SubstResult:
    """Textual simultaneous substitution, no renaming ever.

    The `captured` flag is true when some substituted occurrence landed
    under a binder that also names a free variable of the image.  Inside
    the safety discipline the flag provably stays false; on arbitrary
    terms the caller must check it.
    """
    out, names = _subst_textual(term, s)
    return SubstResult(out, bool(names))


def subst_capture_avoiding(term: Term, s: Substitution) -> Term:
    """Classical simultaneous substitution (the oracle).

    Bound variables are renamed only when a capture would occur; fresh
    names come from the deterministic primed scheme (y, y'1, y'2, ...).
    """
    if not s:
        return term
    if isinstance(term, Var):
        return s.get(term.name, term)
    if isinstance(term, App):
        head = subst_capture_avoiding(term.head, s)
        args = tuple(subst_capture_avoiding(a, s) for a in term.args)
        if head is term.head and all(n is o for n, o in zip(args, term.args)):
            return term
        return mk_app(head, args)
    assert isinstance(term, Abs)
    shadowed = term.binder_names
    active = {
        x: u for x, u in s.items() if x in term.body.free_names and x not in shadowed
    }
    if not active:
        return term
    clashing = {
        y for y in shadowed if any(y in u.free_names for u in active.values())
    }
    if not clashing:
        body = subst_capture_avoiding(term.body, active)
        return term if body is term.body else mk_abs(term.binders, body)
    used = set(term.body.free_names) | set(shadowed) | set(active)
    for u in active.values():
        used |= u.free_names
    renaming: dict[str, Term] = {}
    binders = []
    for y, ty in term.binders:
        if y in clashing:
            fresh = primed(y, used)
            used.add(fresh)
            renaming[y] = Var(fresh)
            binders.append((fresh, ty))
        else:
            binders.append((y, ty))
    body = subst_capture_avoiding(term.body, {**active, **renaming})
    return mk_abs(tuple(binders), body)


# --------------------------------------------------------------------------
# single steps

# Both strategies contract the leftmost-outermost redex; they differ only
# in how much of it one step consumes.


def _step(term: Term, contract) -> Optional[Term]:
    if isinstance(term, App):
        if isinstance(term.head, Abs):
            return contract(term.head, term.args)
        head = _step(term.head, contract)
        if head is not None:
            return mk_app(head, term.args)
        for i, a in enumerate(term.args):
            new = _step(a, contract)
            if new is not None:
                return App(term.head, term.args[:i] + (new,) + term.args[i + 1 :])
        return None
    if isinstance(term, Abs):
        body = _step(term.body, contract)
        return None if body is None else mk_abs(term.binders, body)
    return None


def _contract_plain(head: Abs, args: tuple[Term, ...]) -> Term:
    x, _ = head.binders[0]
    rest = mk_abs(head.binders[1:], head.body)
    return mk_app(subst_capture_avoiding(rest, {x: args[0]}), args[1:])


def _contract_safe(head: Abs, args: tuple[Term, ...]) -> Term:
    j = min(len(head.binders), len(args))
    used, remaining = head.binders[:j], head.binders[j:]
    mapping = {x: a for (x, _), a in zip(used, args)}
    body, captured = _subst_textual(head.body, mapping)
    if remaining:
        # a partial contraction re-wraps the leftover binders around the
        # substituted body, which can bind argument variables just as an
        # inner binder can
        landed: set[str] = set()
        for (x, _), a in zip(used, args):
            if x in head.body.free_names:
                landed |= a.free_names
        captured |= landed & {y for y, _ in remaining}
    if captured:
        names = ", ".join(sorted(captured))
        raise CaptureViolation(
            frozenset(captured),
            f"no-rename contraction captured free variable(s): {names}",
        )
    return mk_app(mk_abs(remaining, body), args[j:])


def beta_step(term: Term) -> Optional[Term]:
    """One leftmost-outermost beta step: one binder, one argument.

    Remaining binders and arguments are re-grouped around the result.
    Uses capture-avoiding substitution, so it is sound on any term.
    Returns None on a beta-normal form.
    """
    return _step(term, _contract_plain)


def safe_step(term: Term) -> Optional[Term]:
    """One safe-reduction step: the whole redex block at once.

    At the leftmost-outermost redex (\\x1..xn. M) N1..Nk all j = min(n, k)
    available arguments are substituted in ONE simultaneous no-rename
    substitution.  With k < n the leftover binders re-wrap the body; with
    k > n the leftover arguments re-apply to it.  Returns None on a normal
    form; raises CaptureViolation if the no-rename discipline fails, which
    cannot happen on safe input.
    """
    return _step(term, _contract_safe)


# --------------------------------------------------------------------------
# normalization


def reduction_sequence(
    term: Term,
    strategy: "Strategy | str" = Strategy.PLAIN,
    budget: ReductionBudget = DEFAULT_BUDGET,
) -> Iterator[Term]:
    """Yield the reduction chain starting at `term` (the term included)."""
    step = beta_step if _coerce_strategy(strategy) is Strategy.PLAIN else safe_step
    current = term
    yield current
    steps = 0
    while True:
        nxt = step(current)
        if nxt is None:
            return
        if steps >= budget.max_steps:
            raise BudgetExceededError(
                steps,
                current.size,
                f"no normal form within {budget.max_steps} steps "
                f"(current term size {current.size})",
            )
        steps += 1
        if nxt.size > budget.max_term_size:
            raise BudgetExceededError(
                steps,
                nxt.size,
                f"term size {nxt.size} exceeds budget {budget.max_term_size} "
                f"after {steps} steps",
            )
        yield nxt
        current = nxt


def normalize(
    term: Term,
    strategy: "Strategy | str" = Strategy.PLAIN,
    budget: ReductionBudget = DEFAULT_BUDGET,
) -> Term:
    """Beta-normal form under the chosen strategy.

    Both strategies reach the same normal form up to alpha equivalence;
    the safe strategy additionally expects a term inside the safety
    discipline and raises CaptureViolation when that trust is betrayed.
    """
    last = term
    for last in reduction_sequence(term, strategy, budget):
        pass
    return last


def beta_eta_equal(
    env: TypeEnv,
    a: Term,
    b: Term,
    budget: ReductionBudget = DEFAULT_BUDGET,
) -> bool:
    """Beta-eta equality: normalize, eta-expand fully, compare up to alpha."""
    ta = simple_type_of(env, a)
    tb = simple_type_of(env, b)
    if ta != tb:
        raise TypeCheckError(
            f"compared terms have different types: {ta} vs {tb}"
        )
    na = normalize(a, Strategy.PLAIN, budget)
    nb = normalize(b, Strategy.PLAIN, budget)
    return alpha_eq(eta_long(env, na), eta_long(env, nb))
