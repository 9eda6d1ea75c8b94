"""Term trees with (depth, level index) addressing."""
from __future__ import annotations

import enum
from collections import deque
from dataclasses import dataclass, field
from typing import Optional

from .terms import App, Arrow, Fix, Forall, Fun, Let, Match, Name, Sort, Var, render


class GallinaToken(enum.Enum):
    FORALL = "forall"
    FUN = "fun"
    ARROW = "arrow"
    LET = "let"
    FIX = "fix"
    MATCH = "match"
    AT_SIGN = "at_sign"

    @property
    def symbol(self):
        return {"arrow": "->", "at_sign": "@"}.get(self.value, self.value)


@dataclass
class TreeNode:
    id: int
    token: Optional[GallinaToken] = None   # set for Gallina nodes
    term: object = None                    # term component of a term:type node
    type: object = None                    # type component of a term:type node
    parent: Optional[int] = None
    children: list = field(default_factory=list)
    depth: int = 0
    level_index: int = 0

    @property
    def is_gallina(self):
        return self.token is not None

    @property
    def label(self):
        if self.is_gallina:
            return self.token.symbol
        return f"{render(self.term)} : {render(self.type)}"


@dataclass
class TermTree:
    nodes: list
    root: int = 0

    def __len__(self):
        return len(self.nodes)

    def levels(self):
        out = []
        for node in self.nodes:
            while len(out) <= node.depth:
                out.append([])
            out[node.depth].append(node)
        for level in out:
            level.sort(key=lambda n: n.level_index)
        return out

    def parent_of(self, node):
        return self.nodes[node.parent] if node.parent is not None else None

    def dump(self):
        """One line per node: ``d=<depth> j=<index> p=<parent index> <label>``."""
        lines = []
        for level in self.levels():
            for node in level:
                parent = self.parent_of(node)
                p = parent.level_index if parent is not None else -1
                lines.append(f"d={node.depth} j={node.level_index} p={p} {node.label}")
        return "\n".join(lines)


# Nested (node, [children]) shape is built first, then numbered breadth first.

def _leaf(term, ty):
    return TreeNode(-1, term=term, type=ty), []


def _gallina(token, children):
    return TreeNode(-1, token=token), children


def _binder(v, ty):
    return _leaf(v, ty)


def _shape(t):
    if isinstance(t, Sort):
        return _leaf(t, t.sort_type())
    if isinstance(t, (Name, Var)):
        return _leaf(t, t.type)
    if isinstance(t, (Forall, Fun)):
        token = GallinaToken.FORALL if isinstance(t, Forall) else GallinaToken.FUN
        return _gallina(token, [_binder(v, ty) for v, ty in t.binders] + [_shape(t.body)])
    if isinstance(t, Arrow):
        return _gallina(GallinaToken.ARROW, [_shape(t.src), _shape(t.dst)])
    if isinstance(t, Let):
        return _gallina(GallinaToken.LET, [_leaf(t.var, t.var.type), _shape(t.value), _shape(t.body)])
    if isinstance(t, App):
        if isinstance(t.head, Name):
            node, _ = _leaf(t.head, t.head.type)
            return node, [_shape(a) for a in t.args]
        return _gallina(GallinaToken.AT_SIGN, [_shape(t.head)] + [_shape(a) for a in t.args])
    if isinstance(t, Fix):
        return _gallina(
            GallinaToken.FIX,
            [_leaf(t.name, t.name.type)] + [_binder(v, ty) for v, ty in t.binders] + [_shape(t.body)],
        )
    if isinstance(t, Match):
        arms = [_gallina(GallinaToken.ARROW, [_shape(p) for p in b.patterns] + [_shape(b.rhs)])
                for b in t.branches]
        return _gallina(GallinaToken.MATCH, [_shape(s) for s in t.scrutinees] + arms)
    raise TypeError(f"not a term: {t!r}")


def build_term_tree(t):
    """Term tree of a resolved term.

    Sorts, names and variables become single ``term : type`` nodes; binders,
    arrows, let, fix and match become Gallina nodes over their parts; an
    application headed by a name is rooted at that name, any other head gets
    an ``@`` node.
    """
    nodes = []
    queue = deque([(_shape(t), None, 0)])
    counts = []
    while queue:
        (node, kids), parent, depth = queue.popleft()
        node.id = len(nodes)
        node.parent = parent
        node.depth = depth
        if len(counts) <= depth:
            counts.append(0)
        node.level_index = counts[depth]
        counts[depth] += 1
        nodes.append(node)
        if parent is not None:
            nodes[parent].children.append(node.id)
        for kid in kids:
            queue.append((kid, node.id, depth + 1))
    return TermTree(nodes, 0)


def tree_dims(tree):
    """(number of levels, size of the widest level)."""
    levels = tree.levels()
    return len(levels), max(len(level) for level in levels)


def node_at(tree, depth, level_index):
    for node in tree.nodes:
        if node.depth == depth and node.level_index == level_index:
            return node
    return None
