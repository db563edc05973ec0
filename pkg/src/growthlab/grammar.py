"""The meta-grammar: a probabilistic context-free grammar over growth rules.

Rule strings are derived from ``Start`` by choosing, at every step, one of
the applicable productions uniformly at random; the turn angle is drawn
uniformly from a discrete angle set.  The prior probability of an L-system
is the total probability of all derivations that yield its F-rule, times
the angle factor.
"""

from __future__ import annotations

import math
from dataclasses import dataclass, field
from importlib import resources

import numpy as np

from .errors import NotInSupport, RejectionLimitExceeded, SupportTooLarge
from .lsystem import LSystem, symbol_length, validate_stimulus_constraints

TERMINALS = frozenset("FG+- ")

#: Hard guard against pathological sample growth (terminal count).
_SAMPLE_TERMINAL_CAP = 4096


@dataclass(frozen=True)
class MetaGrammar:
    """Productions plus the discrete angle set.

    ``productions`` maps each nonterminal to a tuple of alternatives; every
    alternative is a tuple of symbols, each either a terminal character
    from {F, G, +, -, " "} or another nonterminal name.
    """

    productions: dict
    angles: tuple
    start: str = "Start"

    def __post_init__(self):
        if self.start not in self.productions:
            raise ValueError(f"start symbol {self.start!r} has no productions")
        if not self.angles:
            raise ValueError("angle set must be nonempty")
        for nt, alts in self.productions.items():
            if nt in TERMINALS:
                raise ValueError(f"nonterminal name {nt!r} collides with a terminal")
            if not alts:
                raise ValueError(f"nonterminal {nt!r} has no productions")
            for rhs in alts:
                for sym in rhs:
                    if sym not in TERMINALS and sym not in self.productions:
                        raise ValueError(f"unknown symbol {sym!r} in rule for {nt!r}")
        object.__setattr__(self, "_min_yield", _min_yields(self.productions))

    @property
    def min_yield(self) -> dict:
        """Minimal separator-free terminal count derivable per nonterminal."""
        return self._min_yield

    def alternatives(self, nt: str):
        return self.productions[nt]


def _terminal_weight(sym: str) -> int:
    return 0 if sym == " " else 1


def _min_yields(productions) -> dict:
    my = {nt: math.inf for nt in productions}
    changed = True
    while changed:
        changed = False
        for nt, alts in productions.items():
            for rhs in alts:
                total = 0
                for sym in rhs:
                    total += _terminal_weight(sym) if sym in TERMINALS else my[sym]
                if total < my[nt]:
                    my[nt] = total
                    changed = True
    bad = [nt for nt, v in my.items() if v == math.inf]
    if bad:
        raise ValueError(f"nonterminals {bad!r} can never terminate")
    return my


@dataclass(frozen=True)
class Node:
    """One applied production in a derivation; children cover the RHS
    nonterminals in order.  Yield, generation log-probability and subtree
    size are precomputed."""

    symbol: str
    prod_index: int
    children: tuple
    yield_str: str
    logp: float
    size: int


def make_node(g: MetaGrammar, symbol: str, prod_index: int, children: tuple) -> Node:
    rhs = g.productions[symbol][prod_index]
    parts = []
    logp = -math.log(len(g.productions[symbol]))
    size = 1
    it = iter(children)
    for sym in rhs:
        if sym in TERMINALS:
            parts.append(sym)
        else:
            child = next(it)
            if child.symbol != sym:
                raise ValueError(f"child {child.symbol!r} does not match RHS {sym!r}")
            parts.append(child.yield_str)
            logp += child.logp
            size += child.size
    return Node(symbol, prod_index, tuple(children), "".join(parts), logp, size)


class _SampleTooBig(Exception):
    pass


def _sample_node(g: MetaGrammar, nt: str, rng: np.random.Generator, budget: list) -> Node:
    alts = g.productions[nt]
    k = int(rng.integers(len(alts)))
    children = []
    for sym in alts[k]:
        if sym in TERMINALS:
            budget[0] -= 1
            if budget[0] < 0:
                raise _SampleTooBig
        else:
            children.append(_sample_node(g, sym, rng, budget))
    return make_node(g, nt, k, tuple(children))


def sample_node(g: MetaGrammar, nt: str, rng: np.random.Generator) -> Node:
    """Sample one derivation subtree rooted at ``nt`` from the grammar."""
    while True:
        try:
            return _sample_node(g, nt, rng, [_SAMPLE_TERMINAL_CAP])
        except _SampleTooBig:
            # vanishingly rare under any sane grammar; retry keeps the
            # proposal distribution a hair short of exact at the far tail
            continue


@dataclass(frozen=True)
class DerivationTree:
    """A full derivation of an L-system: rule tree plus angle choice."""

    root: Node
    angle_deg: float
    n_angles: int

    @property
    def log_prob(self) -> float:
        return self.root.logp - math.log(self.n_angles)

    @property
    def f_rule(self) -> str:
        return self.root.yield_str

    def lsystem(self) -> LSystem:
        return LSystem(axiom="F", angle_deg=self.angle_deg,
                       f_rule=self.root.yield_str, g_rule="G")

    @property
    def size(self) -> int:
        return self.root.size


def sample_tree(g: MetaGrammar, rng: np.random.Generator) -> DerivationTree:
    angle = float(g.angles[int(rng.integers(len(g.angles)))])
    return DerivationTree(sample_node(g, g.start, rng), angle, len(g.angles))


def sample_lsystem(g: MetaGrammar, rng: np.random.Generator, mode: str = "raw",
                   rejection_limit: int = 10000):
    """Draw (LSystem, DerivationTree) from the prior.

    mode "raw": no constraints.  mode "shape": resample until the rule
    preserves global shape.  mode "stimulus": resample until all stimulus
    constraints hold.
    """
    if mode not in ("raw", "shape", "stimulus"):
        raise ValueError(f"unknown sampling mode {mode!r}")
    failing = None
    for _ in range(rejection_limit):
        tree = sample_tree(g, rng)
        system = tree.lsystem()
        if mode == "raw":
            return system, tree
        report = validate_stimulus_constraints(system)
        if mode == "shape":
            if report.shape_preserving:
                return system, tree
            failing = "shape_preserving"
            continue
        if report.ok:
            return system, tree
        for name in ("shape_preserving", "no_adjacent_forwards",
                     "upward_growth", "non_self_crossing"):
            if not getattr(report, name):
                failing = name
                break
    raise RejectionLimitExceeded(
        f"no {mode!r}-valid sample in {rejection_limit} draws"
        + (f" (last failing constraint: {failing})" if failing else ""),
        constraint=failing,
    )


def _preorder(node: Node, out: list) -> list:
    out.append(node)
    for ch in node.children:
        _preorder(ch, out)
    return out


def tree_nodes(t: DerivationTree) -> list:
    """All derivation nodes in preorder."""
    return _preorder(t.root, [])


def _replace_preorder(node: Node, g: MetaGrammar, k: int, new_sub: Node):
    """Replace the k-th preorder node (0 = this node)."""
    if k == 0:
        return new_sub
    k -= 1
    children = list(node.children)
    for i, ch in enumerate(children):
        if k < ch.size:
            children[i] = _replace_preorder(ch, g, k, new_sub)
            return make_node(g, node.symbol, node.prod_index, tuple(children))
        k -= ch.size
    raise IndexError("node index out of range")


def _select_logp(k: int, n: int, root_bias: float) -> float:
    """Log-probability of picking preorder node ``k`` out of ``n`` under the
    root-biased mixture: root with probability ``root_bias``, otherwise a
    uniform node."""
    p = (1.0 - root_bias) / n
    if k == 0:
        p += root_bias
    return math.log(p) if p > 0.0 else -math.inf


def regenerate_subtree(g: MetaGrammar, t: DerivationTree, rng: np.random.Generator,
                       root_bias: float = 0.0):
    """Resample one subtree; returns (new tree, chosen preorder index,
    forward and reverse proposal log-densities) for an exact
    Metropolis-Hastings correction.

    The subtree root is a uniformly chosen node; with probability
    ``root_bias`` the whole tree is redrawn instead (an independence
    proposal, off by default).  The
    replaced node keeps its preorder index, so the reverse selection
    probability uses the same index against the new tree's node count.
    """
    nodes = tree_nodes(t)
    if rng.random() < root_bias:
        k = 0
    else:
        k = int(rng.integers(len(nodes)))
    old_sub = nodes[k]
    new_sub = sample_node(g, old_sub.symbol, rng)
    new_root = _replace_preorder(t.root, g, k, new_sub)
    new_tree = DerivationTree(new_root, t.angle_deg, t.n_angles)
    forward_logq = _select_logp(k, len(nodes), root_bias) + new_sub.logp
    reverse_logq = _select_logp(k, new_root.size, root_bias) + old_sub.logp
    return new_tree, k, forward_logq, reverse_logq


def _stack_min(g: MetaGrammar, stack) -> int:
    total = 0
    for sym in stack:
        total += _terminal_weight(sym) if sym in TERMINALS else g.min_yield[sym]
    return total


def parse_scripts(g: MetaGrammar, target: str, max_results: int = 1_000_000):
    """All leftmost derivations of ``target``, as (logp, choice script)."""
    results = []
    n_target = len(target)

    def rec(stack, i, logp, script):
        while True:
            if not stack:
                if i == n_target:
                    results.append((logp, script))
                return
            head = stack[0]
            if head in TERMINALS:
                if i < n_target and target[i] == head:
                    stack = stack[1:]
                    i += 1
                    continue
                return
            break
        if len(results) >= max_results:
            raise SupportTooLarge(f"more than {max_results} parses")
        alts = g.productions[head]
        rest = stack[1:]
        sepless_i = i - target[:i].count(" ")
        sepless_n = n_target - target.count(" ")
        for k, rhs in enumerate(alts):
            new_stack = tuple(rhs) + rest
            if sepless_i + _stack_min(g, new_stack) > sepless_n:
                continue
            rec(new_stack, i, logp - math.log(len(alts)), script + ((head, k),))

    rec((g.start,), 0, 0.0, ())
    return results


def tree_from_script(g: MetaGrammar, script) -> Node:
    """Rebuild a derivation tree from a leftmost choice sequence."""
    pos = [0]

    def build(nt):
        sym, k = script[pos[0]]
        if sym != nt:
            raise ValueError("script does not match grammar walk")
        pos[0] += 1
        children = tuple(build(s) for s in g.productions[nt][k] if s not in TERMINALS)
        return make_node(g, nt, k, children)

    root = build(g.start)
    if pos[0] != len(script):
        raise ValueError("script not fully consumed")
    return root


def parse_trees(g: MetaGrammar, target: str) -> list:
    """All derivation trees (Nodes) whose yield equals ``target``."""
    return [tree_from_script(g, script) for _, script in parse_scripts(g, target)]


def log_prior(g: MetaGrammar, system: LSystem) -> float:
    """Exact log P(system): sum over all derivations of its F-rule, plus
    the uniform angle factor."""
    if system.axiom != "F" or system.g_rule != "G":
        raise NotInSupport("grammar hypotheses have axiom 'F' and G-rule 'G'")
    if not any(abs(system.angle_deg - a) < 1e-9 for a in g.angles):
        raise NotInSupport(f"angle {system.angle_deg} not in the angle set")
    parses = parse_scripts(g, system.f_rule)
    if not parses:
        raise NotInSupport(f"F-rule {system.f_rule!r} is not derivable")
    logps = np.array([lp for lp, _ in parses])
    m = logps.max()
    return float(m + np.log(np.exp(logps - m).sum())) - math.log(len(g.angles))


def enumerate_rules(g: MetaGrammar, max_len: int, max_count: int = 100_000):
    """All derivable rule strings with separator-free length <= max_len,
    mapped to their exact derivation-sum log-probability."""
    totals = {}

    def rec(stack, produced, sepless_len, logp):
        while True:
            if not stack:
                key = "".join(produced)
                if key in totals:
                    totals[key] = np.logaddexp(totals[key], logp)
                else:
                    if len(totals) >= max_count:
                        raise SupportTooLarge(f"more than {max_count} strings")
                    totals[key] = logp
                return
            head = stack[0]
            if head in TERMINALS:
                produced = produced + [head]
                sepless_len += _terminal_weight(head)
                if sepless_len > max_len:
                    return
                stack = stack[1:]
                continue
            break
        alts = g.productions[head]
        rest = stack[1:]
        for k, rhs in enumerate(alts):
            new_stack = tuple(rhs) + rest
            if sepless_len + _stack_min(g, new_stack) > max_len:
                continue
            rec(new_stack, produced, sepless_len, logp - math.log(len(alts)))

    rec((g.start,), [], 0, 0.0)
    return {k: float(v) for k, v in totals.items()}


def enumerate_support(g: MetaGrammar, max_len: int, max_count: int = 100_000):
    """All derivable (LSystem, log_prior) pairs with rule length <= max_len."""
    rules = enumerate_rules(g, max_len, max_count)
    angle_term = math.log(len(g.angles))
    out = []
    for rule, lp in sorted(rules.items()):
        for a in g.angles:
            out.append((LSystem(axiom="F", angle_deg=float(a), f_rule=rule,
                                g_rule="G"), lp - angle_term))
    return out


# ---------------------------------------------------------------------------
# grammar file format:
#   angles: 30 45 60 90
#   Start -> C | C _ C
#   C -> F | G C G | + C + | - C -
# Tokens are whitespace separated; '_' writes the space terminal and 'eps'
# an empty alternative.  The first production's left-hand side is the start
# symbol.  '#' starts a comment.
# ---------------------------------------------------------------------------

def parse_grammar(text: str) -> MetaGrammar:
    productions: dict = {}
    angles = None
    start = None
    for raw in text.splitlines():
        line = raw.split("#", 1)[0].strip()
        if not line:
            continue
        if line.lower().startswith("angles:"):
            angles = tuple(float(tok) for tok in line.split(":", 1)[1].split())
            continue
        if "->" not in line:
            raise ValueError(f"bad grammar line: {raw!r}")
        lhs, rhs = line.split("->", 1)
        nt = lhs.strip()
        if start is None:
            start = nt
        alts = productions.setdefault(nt, [])
        for alt in rhs.split("|"):
            toks = alt.split()
            if toks == ["eps"]:
                alts.append(())
            else:
                alts.append(tuple(" " if tok == "_" else tok for tok in toks))
    if angles is None:
        raise ValueError("grammar file has no 'angles:' line")
    if start is None:
        raise ValueError("grammar file has no productions")
    return MetaGrammar({nt: tuple(a) for nt, a in productions.items()}, angles, start)


def format_grammar(g: MetaGrammar) -> str:
    lines = ["angles: " + " ".join(f"{a:g}" for a in g.angles)]
    order = [g.start] + [nt for nt in g.productions if nt != g.start]
    for nt in order:
        alts = []
        for rhs in g.productions[nt]:
            if not rhs:
                alts.append("eps")
            else:
                alts.append(" ".join("_" if s == " " else s for s in rhs))
        lines.append(f"{nt} -> " + " | ".join(alts))
    return "\n".join(lines) + "\n"


def load_grammar(path) -> MetaGrammar:
    with open(path, "r", encoding="utf-8") as f:
        return parse_grammar(f.read())


def default_grammar() -> MetaGrammar:
    text = resources.files("growthlab.data").joinpath("default_grammar.txt").read_text()
    return parse_grammar(text)
