r"""Computation trees and traversals.

A well-typed term unfolds, after full eta-expansion, into a computation
tree whose levels alternate between lambda nodes and variable/application
nodes.  Walking the tree under the traversal rules simulates evaluation
without performing a single substitution; justification pointers do the
bookkeeping that renaming would otherwise do.  The cores of the maximal
traversals spell out the branches of the beta-eta-normal form, which is
how `traversal_normal_form` computes normal forms, and `uncover` /
`reconstruct_p_pointers` probe when the pointers carried by variable
occurrences are redundant.

The root lambda node stands in for the context: free variables answer to
it, and its order accounts for the types of the free names so that order
comparisons against it behave as if the context were abstracted.
"""

from dataclasses import dataclass, field
from collections import deque
from typing import NamedTuple, Optional, Union

from .reduction import BudgetExceededError
from .safety import eta_long, simple_type_of
from .syntax import (
    Abs,
    Binder,
    SimpleType,
    Term,
    TypeEnv,
    Var,
    mk_abs,
    mk_app,
)


@dataclass(eq=False)
class LambdaNode:
    binders: tuple[Binder, ...]
    order: int
    id: int
    children: tuple["TreeNode", ...] = ()

    @property
    def label(self) -> str:
        names = " ".join(n for n, _ in self.binders)
        return "\\" + names if names else "\\"


@dataclass(eq=False)
class AppNode:
    order: int
    id: int
    children: tuple["TreeNode", ...] = ()

    label = "@"


@dataclass(eq=False)
class VarNode:
    name: str
    ty: SimpleType
    binder: Optional[LambdaNode]  # None = free in the source term
    order: int
    id: int
    children: tuple["TreeNode", ...] = ()

    @property
    def label(self) -> str:
        return self.name


TreeNode = Union[LambdaNode, AppNode, VarNode]


@dataclass(frozen=True)
class ComputationTree:
    root: LambdaNode
    nodes: tuple[TreeNode, ...]  # pre-order; nodes[i].id == i
    term: Term  # the eta-long form the tree was built from
    env: dict


def build_computation_tree(env: TypeEnv, term: Term) -> ComputationTree:
    """Tree of the eta-long form of `term`, with binder links resolved.

    Lambda nodes alternate with variable/application nodes; ground-typed
    arguments get an empty lambda node above them so the alternation
    holds everywhere.  Type errors surface before any node is built.
    """
    expanded = eta_long(env, term)
    ty = simple_type_of(env, expanded)
    nodes: list[TreeNode] = []

    def lam(t: Term, at: SimpleType, scope: dict) -> LambdaNode:
        if isinstance(t, Abs):
            binders, body = t.binders, t.body
        else:
            binders, body = (), t
        node = LambdaNode(binders=binders, order=at.order, id=len(nodes))
        nodes.append(node)
        inner = dict(scope)
        for name, bty in binders:
            inner[name] = (node, bty)
        node.children = (operator(body, inner),)
        return node

    def variable(v: Var, args: tuple[Term, ...], scope: dict) -> VarNode:
        if v.name in scope:
            binder, vty = scope[v.name]
        else:
            binder, vty = None, env[v.name]
        node = VarNode(
            name=v.name, ty=vty, binder=binder, order=vty.order, id=len(nodes)
        )
        nodes.append(node)
        node.children = tuple(
            lam(a, aty, scope) for a, aty in zip(args, vty.arguments)
        )
        return node

    def operator(t: Term, scope: dict) -> TreeNode:
        if isinstance(t, Var):
            return variable(t, (), scope)
        if isinstance(t.head, Var):
            return variable(t.head, t.args, scope)
        # redex: the operator is an abstraction, kept under an @ node
        head = t.head
        head_ty = SimpleType(tuple(bty for _, bty in head.binders))
        node = AppNode(order=0, id=len(nodes))
        nodes.append(node)
        node.children = (lam(head, head_ty, scope),) + tuple(
            lam(a, aty, scope) for a, aty in zip(t.args, head_ty.arguments)
        )
        return node

    free = expanded.free_names
    root_order = max([ty.order] + [env[n].order + 1 for n in free])
    root = lam(expanded, SimpleType(), {})
    root.order = root_order
    return ComputationTree(root, tuple(nodes), expanded, dict(env))


# --------------------------------------------------------------------------
# traversals


class Occurrence(NamedTuple):
    node: TreeNode
    justifier: Optional[int]  # back-index; None only for the root
    rule: str  # which rule licensed this occurrence


@dataclass(frozen=True)
class Traversal:
    occurrences: tuple[Occurrence, ...]
    maximal: bool = True  # False when cut off by the length budget

    def __len__(self) -> int:
        return len(self.occurrences)


def parity(node: TreeNode) -> str:
    """Lambda occurrences are O-moves, everything else is a P-move."""
    return "O" if isinstance(node, LambdaNode) else "P"


def p_view_indices(occurrences) -> list[int]:
    """Indices of the P-view of the sequence, ending at its last element.

    Walk backwards: from a lambda occurrence jump to its justifier, from
    any other occurrence step to the element just before it; stop at the
    initial occurrence.
    """
    if not occurrences:
        return []
    i = len(occurrences) - 1
    out = [i]
    while occurrences[i].justifier is not None:
        if isinstance(occurrences[i].node, LambdaNode):
            i = occurrences[i].justifier
        else:
            i -= 1
        out.append(i)
    out.reverse()
    return out


def _binder_occurrence(occurrences, node: VarNode, root: LambdaNode):
    target = node.binder if node.binder is not None else root
    for i in reversed(p_view_indices(occurrences)):
        if occurrences[i].node is target:
            return i
    return None


def _is_input(occurrences, position: int) -> bool:
    """A variable occurrence is an input when its justification chain
    reaches the root without crossing an @ occurrence."""
    j = occurrences[position].justifier
    while j is not None:
        if isinstance(occurrences[j].node, AppNode):
            return False
        j = occurrences[j].justifier
    return True


def _extensions(occurrences: tuple[Occurrence, ...], root: LambdaNode):
    """All one-step extensions the rules license, in child order."""
    if not occurrences:
        return [Occurrence(root, None, "root")]
    here = len(occurrences) - 1
    node = occurrences[here].node
    if isinstance(node, LambdaNode):
        child = node.children[0]
        if isinstance(child, AppNode):
            return [Occurrence(child, here, "lam")]
        at = _binder_occurrence(occurrences, child, root)
        if at is None:
            raise ValueError(f"binder of {child.name} missing from the view")
        return [Occurrence(child, at, "lam")]
    if isinstance(node, AppNode):
        return [Occurrence(node.children[0], here, "app")]
    if _is_input(occurrences, here):
        # the environment answers: any argument of the variable may come next
        return [Occurrence(c, here, "ivar") for c in node.children]
    # internal variable: the next node is the argument standing for it,
    # found under the occurrence its binder points back to
    binder_at = occurrences[here].justifier
    parent_at = occurrences[binder_at].justifier
    parent = occurrences[parent_at].node
    block = occurrences[binder_at].node.binders
    index = next(i for i, (n, _) in enumerate(block) if n == node.name)
    if isinstance(parent, AppNode):
        child = parent.children[index + 1]
    else:
        child = parent.children[index]
    return [Occurrence(child, here, "var")]


def enumerate_traversals(
    tree: ComputationTree, max_len: int = 200
) -> tuple[Traversal, ...]:
    """Breadth-first enumeration of the maximal traversals, children in
    tree order, so the result order is canonical.  Traversals that could
    still grow at max_len come back with maximal=False."""
    if max_len < 1:
        raise ValueError("max_len must be positive")
    done: list[Traversal] = []
    frontier: deque[tuple[Occurrence, ...]] = deque([()])
    while frontier:
        occs = frontier.popleft()
        exts = _extensions(occs, tree.root)
        if not exts:
            done.append(Traversal(occs, maximal=True))
        elif len(occs) >= max_len:
            done.append(Traversal(occs, maximal=False))
        else:
            for e in exts:
                frontier.append(occs + (e,))
    return tuple(done)


def core_indices(t: Traversal) -> list[int]:
    """Positions whose justification chain never crosses an @ occurrence.

    The core is the external part of the traversal: it spells a branch of
    the normal form, pointers staying within the core."""
    keep: list[bool] = []
    out: list[int] = []
    for i, occ in enumerate(t.occurrences):
        ok = not isinstance(occ.node, AppNode) and (
            occ.justifier is None or keep[occ.justifier]
        )
        keep.append(ok)
        if ok:
            out.append(i)
    return out


# --------------------------------------------------------------------------
# uncovering and pointer reconstruction


class PlayEntry(NamedTuple):
    node: TreeNode
    justifier: Optional[int]  # erased (None) on P entries
    parity: str
    rule: str


@dataclass(frozen=True)
class UncoveredPlay:
    entries: tuple[PlayEntry, ...]
    maximal: bool = True

    def __len__(self) -> int:
        return len(self.entries)


class ReconstructionError(Exception):
    def __init__(self, position: int, message: str):
        super().__init__(f"at position {position}: {message}")
        self.position = position


def uncover(t: Traversal) -> UncoveredPlay:
    """Erase the justifiers of P occurrences, keeping O justifiers and
    recording each occurrence's parity.  Length is preserved."""
    entries = []
    for occ in t.occurrences:
        p = parity(occ.node)
        entries.append(
            PlayEntry(occ.node, occ.justifier if p == "O" else None, p, occ.rule)
        )
    return UncoveredPlay(tuple(entries), t.maximal)


def reconstruct_p_pointers(
    play: UncoveredPlay, tree: ComputationTree
) -> Traversal:
    """Reassign the erased P justifiers.

    @ occurrences answer the lambda just before them, and hidden variable
    occurrences (those under an @ in the chain) have their pointer forced
    by the tree structure.  The interesting case is a variable occurrence
    in the core: its pointer is recomputed purely by order comparison,
    taking the most recent core lambda occurrence in the P-view whose
    order strictly exceeds the variable's.  For traversals of safe terms that
    choice always lands on the binder, so uncovering loses nothing; where
    it lands elsewhere, the pointer was genuinely informative.
    """
    occs: list[Occurrence] = []
    core: list[bool] = []
    for i, entry in enumerate(play.entries):
        node = entry.node
        if isinstance(node, LambdaNode):
            j = entry.justifier
        elif isinstance(node, AppNode):
            j = i - 1
        else:
            j = _var_pointer(occs, core, node, tree.root, i)
        occs.append(Occurrence(node, j, entry.rule))
        core.append(
            not isinstance(node, AppNode) and (j is None or core[j])
        )
    return Traversal(tuple(occs), play.maximal)


def _var_pointer(occs, core, node: VarNode, root: LambdaNode, position: int):
    binder_at = _binder_occurrence(occs, node, root)
    if binder_at is None:
        raise ReconstructionError(
            position, f"binder of {node.name} not in the view"
        )
    if not core[binder_at]:
        return binder_at  # hidden occurrence: no choice to reconstruct
    for i in reversed(p_view_indices(occs)):
        occ = occs[i]
        if (
            isinstance(occ.node, LambdaNode)
            and core[i]
            and occ.node.order > node.order
        ):
            return i
    raise ReconstructionError(
        position,
        f"no pending lambda of order above {node.order} for {node.name}",
    )


# --------------------------------------------------------------------------
# normalization by traversal


@dataclass
class _TrieLam:
    node: LambdaNode
    var: Optional["_TrieVar"] = None


@dataclass
class _TrieVar:
    node: VarNode
    pointer: int  # core position of the lambda occurrence answered to
    children: dict = field(default_factory=dict)  # LambdaNode -> _TrieLam


def traversal_normal_form(tree: ComputationTree, budget: int = 200) -> Term:
    """Assemble the beta-eta-long normal form from traversal cores.

    Every maximal traversal contributes one branch; the branches merge on
    their common prefixes.  Raises BudgetExceededError when some
    traversal is still extendable at the length budget.
    """
    traversals = enumerate_traversals(tree, budget)
    cut = sum(1 for t in traversals if not t.maximal)
    if cut:
        raise BudgetExceededError(
            budget,
            cut,
            f"{cut} traversal(s) still extendable at length {budget}",
        )
    trie = _TrieLam(tree.root)
    for t in traversals:
        kept = core_indices(t)
        remap = {orig: k for k, orig in enumerate(kept)}
        cur = trie
        for k, orig in enumerate(kept):
            occ = t.occurrences[orig]
            if k == 0:
                continue  # the shared root
            if k % 2 == 1:  # variable position
                pointer = remap[occ.justifier]
                if cur.var is None:
                    cur.var = _TrieVar(occ.node, pointer)
                elif cur.var.node is not occ.node or cur.var.pointer != pointer:
                    raise ValueError("traversal cores disagree on a prefix")
            else:  # lambda position: branch on which argument was explored
                cur = cur.var.children.setdefault(
                    occ.node, _TrieLam(occ.node)
                )
    used = set(tree.env) | set(tree.term.free_names)
    counter = [0]

    def fresh() -> str:
        while True:
            counter[0] += 1
            name = f"n{counter[0]}"
            if name not in used:
                used.add(name)
                return name

    def assemble(t: _TrieLam, stack: list) -> Term:
        renamed = tuple((fresh(), bty) for _, bty in t.node.binders)
        stack.append(renamed)
        v = t.var
        if v is None:
            raise ValueError("incomplete core: ends at a lambda")
        if v.node.binder is None:
            name = v.node.name
        else:
            block = [n for n, _ in v.node.binder.binders]
            name = stack[v.pointer // 2][block.index(v.node.name)][0]
        position = {id(c): k for k, c in enumerate(v.node.children)}
        branches = sorted(v.children.items(), key=lambda kv: position[id(kv[0])])
        if len(branches) != len(v.node.children):
            raise ValueError(f"unexplored argument under {v.node.name}")
        args = tuple(assemble(sub, stack) for _, sub in branches)
        stack.pop()
        return mk_abs(renamed, mk_app(Var(name), args))

    return assemble(trie, [])
