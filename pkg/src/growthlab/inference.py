"""Metropolis-Hastings posterior inference over (L-system, depth).

The chain state is a derivation tree from the meta-grammar, an angle, and
(for single-image problems) a latent recursion depth.  Proposals mix
subtree regeneration, angle resampling and a depth random walk; hypotheses
whose expansion would exceed the symbol cap are scored at the deepest
legal expansion instead.
"""

from __future__ import annotations

import math
from dataclasses import dataclass, field, replace

import numpy as np

from . import grammar as gr
from . import render
from .errors import CapExceeded, DimensionMismatch
from .lsystem import MAX_SYMBOLS, LSystem, expand_to_depth, expansions_up_to

#: Uniform prior over recursion depths 0..4 for single-image problems.
DEPTH_RANGE = (0, 4)

#: Proposal mixture: subtree regeneration, angle resample, depth move.
PROPOSAL_MIX = (0.7, 0.2, 0.1)

#: Probability that a subtree move redraws the whole tree instead of a
#: uniformly chosen node (an occasional independence jump).
ROOT_BIAS = 0.2


@dataclass(frozen=True)
class InferenceProblem:
    """Observed binary images, either at known depths or one image at an
    unknown depth."""

    images: tuple
    depths: tuple | None = None
    max_depth: int = DEPTH_RANGE[1]

    def __post_init__(self):
        images = tuple(np.asarray(img, dtype=bool) for img in self.images)
        object.__setattr__(self, "images", images)
        shape = images[0].shape
        for img in images:
            if img.shape != shape:
                raise DimensionMismatch("observed images must share one resolution")
        if self.depths is not None:
            if len(self.depths) != len(images):
                raise ValueError("one depth per observed image")
        elif len(images) != 1:
            raise ValueError("unknown-depth mode takes exactly one image")

    @property
    def unknown_depth(self) -> bool:
        return self.depths is None

    @property
    def resolution(self) -> int:
        return self.images[0].shape[0]


def _black_index(image: np.ndarray) -> np.ndarray:
    return np.flatnonzero(np.asarray(image, dtype=bool).ravel())


def bernoulli_loglik(black_idx: np.ndarray, mean: np.ndarray, eps: float) -> float:
    """Fast exact Bernoulli log-likelihood given precomputed black pixels.

    Exploits the fact that background pixels carry probability exactly
    ``eps`` so only inked pixels need a fresh log.
    """
    mf = mean.ravel()
    active = np.flatnonzero(mf != eps)
    base = (mf.size - active.size) * math.log1p(-eps) + np.log1p(-mf[active]).sum()
    mb = mf[black_idx]
    return float(base + np.log(mb).sum() - np.log1p(-mb).sum())


class Scorer:
    """Renders and scores hypotheses for one problem, with memoization.

    Log-likelihoods are cached per (expanded string, angle); string
    expansions per f_rule.  Keying on the expansion rather than the rule
    lets hypotheses that yield the same string (every rule at depth 0, for
    instance) share one render.  All renders are deterministic so cached
    values are exact.
    """

    def __init__(self, problem: InferenceProblem, ink: render.InkParams | None = None,
                 max_symbols: int = MAX_SYMBOLS, max_cache: int = 200_000):
        self.problem = problem
        self.ink = ink or render.InkParams()
        self.max_symbols = max_symbols
        self.max_cache = max_cache
        self._black = [_black_index(img) for img in problem.images]
        self._expansions: dict = {}
        self._ll: dict = {}
        if problem.unknown_depth:
            self._needed = max(problem.max_depth + 1, DEPTH_RANGE[1] + 1)
        else:
            self._needed = max(problem.depths) + 1

    def expansions(self, f_rule: str) -> list:
        """[S_0, ..., S_k]: expansions up to the deepest needed depth that
        stays under the symbol cap."""
        got = self._expansions.get(f_rule)
        if got is None:
            system = LSystem(axiom="F", angle_deg=90.0, f_rule=f_rule, g_rule="G")
            got = expansions_up_to(system, self._needed, self.max_symbols)
            if len(self._expansions) < self.max_cache:
                self._expansions[f_rule] = got
        return got

    def effective_depth(self, f_rule: str, depth: int) -> int:
        """Requested depth, decremented until the expansion is legal."""
        return min(depth, len(self.expansions(f_rule)) - 1)

    def mean_image(self, f_rule: str, angle_deg: float, depth: int) -> np.ndarray:
        s = self.expansions(f_rule)[self.effective_depth(f_rule, depth)]
        return render.render_mean(s, angle_deg, self.ink, self.problem.resolution)

    def _logliks_at(self, f_rule: str, angle_deg: float, depth: int) -> np.ndarray:
        """Log-likelihood of every observed image against the render of
        this hypothesis at (capped) ``depth``."""
        depth = self.effective_depth(f_rule, depth)
        key = (self.expansions(f_rule)[depth], angle_deg)
        got = self._ll.get(key)
        if got is None:
            mean = self.mean_image(f_rule, angle_deg, depth)
            got = np.array([
                bernoulli_loglik(b, mean, self.ink.noise_floor) for b in self._black
            ])
            if len(self._ll) < self.max_cache:
                self._ll[key] = got
        return got

    def log_likelihood(self, f_rule: str, angle_deg: float,
                       depth_j: int | None) -> float:
        """Total data log-likelihood of a hypothesis."""
        if self.problem.unknown_depth:
            return float(self._logliks_at(f_rule, angle_deg, depth_j)[0])
        total = 0.0
        for i, d in enumerate(self.problem.depths):
            total += self._logliks_at(f_rule, angle_deg, d)[i]
        return total

    def predictive_mean(self, f_rule: str, angle_deg: float,
                        depth_j: int | None) -> np.ndarray:
        """Mean image of the hypothesis one step past the observed data.

        The symbol cap is a scoring device (over-cap hypotheses are
        evaluated at the deepest legal depth); the predicted continuation
        itself is rendered in full whenever that is tractable, falling back
        to the capped render only for truly runaway expansions.
        """
        if self.problem.unknown_depth:
            nxt = self.effective_depth(f_rule, depth_j) + 1
        else:
            nxt = max(self.problem.depths) + 1
        exp = self.expansions(f_rule)
        if nxt >= len(exp):
            system = LSystem(axiom="F", angle_deg=90.0, f_rule=f_rule, g_rule="G")
            try:
                s = expand_to_depth(system, nxt, max_symbols=8 * self.max_symbols)
            except CapExceeded:
                s = exp[-1]
            return render.render_mean(s, angle_deg, self.ink,
                                      self.problem.resolution)
        return self.mean_image(f_rule, angle_deg, nxt)

    def score_candidate(self, candidate: np.ndarray, mean: np.ndarray) -> float:
        candidate = np.asarray(candidate, dtype=bool)
        if candidate.shape != mean.shape:
            raise DimensionMismatch("candidate resolution mismatch")
        return bernoulli_loglik(_black_index(candidate), mean, self.ink.noise_floor)


@dataclass(frozen=True)
class ChainState:
    """One MCMC sample: derivation, latent depth, and cached scores."""

    tree: gr.DerivationTree
    depth: int | None
    log_lik: float
    log_post: float

    @property
    def lsystem(self) -> LSystem:
        return self.tree.lsystem()

    @property
    def f_rule(self) -> str:
        return self.tree.f_rule

    @property
    def angle_deg(self) -> float:
        return self.tree.angle_deg


def _log_post(tree: gr.DerivationTree, depth: int | None, log_lik: float,
              unknown: bool) -> float:
    lp = tree.log_prob + log_lik
    if unknown:
        lp += -math.log(DEPTH_RANGE[1] - DEPTH_RANGE[0] + 1)
    return lp


def make_state(tree: gr.DerivationTree, depth: int | None, scorer: Scorer) -> ChainState:
    ll = scorer.log_likelihood(tree.f_rule, tree.angle_deg, depth)
    return ChainState(tree, depth, ll,
                      _log_post(tree, depth, ll, scorer.problem.unknown_depth))


def init_state(g: gr.MetaGrammar, scorer: Scorer, rng: np.random.Generator) -> ChainState:
    """Fresh draw from the prior (unconstrained hypothesis space)."""
    tree = gr.sample_tree(g, rng)
    depth = None
    if scorer.problem.unknown_depth:
        depth = int(rng.integers(DEPTH_RANGE[0], DEPTH_RANGE[1] + 1))
    return make_state(tree, depth, scorer)


def mh_step(g: gr.MetaGrammar, state: ChainState, scorer: Scorer,
            rng: np.random.Generator, mix=PROPOSAL_MIX) -> tuple:
    """One Metropolis-Hastings transition.  Returns (state, accepted).

    The subtree move occasionally redraws the whole tree (an independence
    jump that keeps short chains from stalling in local modes); the
    selection probability enters the Hastings ratio exactly.  Whole-tree
    redraws always come with a fresh angle, partial redraws half the time,
    so a wrong angle cannot gate otherwise-good structural proposals; the
    uniform angle redraw is symmetric given the chosen node, leaving the
    Hastings ratio that of the subtree move alone.
    """
    unknown = scorer.problem.unknown_depth
    w_sub, w_ang, w_dep = mix
    if not unknown:
        # fold the depth-move mass into the first two proportionally
        scale = (w_sub + w_ang + w_dep) / (w_sub + w_ang)
        w_sub, w_ang, w_dep = w_sub * scale, w_ang * scale, 0.0

    u = rng.random() * (w_sub + w_ang + w_dep)
    log_hastings = 0.0
    tree, depth = state.tree, state.depth
    if u < w_sub:
        tree, k, fwd, rev = gr.regenerate_subtree(g, state.tree, rng,
                                                  root_bias=ROOT_BIAS)
        log_hastings = rev - fwd
        if k == 0 or rng.random() < 0.5:
            angle = float(g.angles[int(rng.integers(len(g.angles)))])
            tree = replace(tree, angle_deg=angle)
        if unknown and (k == 0 or rng.random() < 0.5):
            # joint depth redraw (uniform, symmetric): a new structure can
            # carry its own depth instead of being gated by the current one
            depth = int(rng.integers(DEPTH_RANGE[0], DEPTH_RANGE[1] + 1))
    elif u < w_sub + w_ang:
        angle = float(g.angles[int(rng.integers(len(g.angles)))])
        tree = replace(state.tree, angle_deg=angle)
    else:
        step = -1 if rng.random() < 0.5 else 1
        depth = min(max(state.depth + step, DEPTH_RANGE[0]), DEPTH_RANGE[1])

    proposal = make_state(tree, depth, scorer)
    log_alpha = proposal.log_post - state.log_post + log_hastings
    if math.log(rng.random() + 1e-300) < log_alpha:
        return proposal, True
    return state, False


@dataclass
class ChainResult:
    final: ChainState
    best: ChainState
    records: list = field(default_factory=list)


def run_chain(problem: InferenceProblem, g: gr.MetaGrammar, n_steps: int, seed,
              ink: render.InkParams | None = None, scorer: Scorer | None = None,
              mix=PROPOSAL_MIX, record: bool = False, thin: int = 1,
              debug_check_every: int | None = None,
              init: ChainState | None = None) -> ChainResult:
    """Run one chain from a prior draw; fully reproducible per seed.

    ``record`` keeps one light record per ``thin`` steps: (step, f_rule,
    angle, depth, log_post, accepted).  ``debug_check_every`` recomputes
    the log-posterior from scratch periodically and asserts cache
    coherence.
    """
    rng = np.random.default_rng(seed)
    if scorer is None:
        scorer = Scorer(problem, ink)
    state = init if init is not None else init_state(g, scorer, rng)
    best = state
    records = []
    for step in range(n_steps):
        state, accepted = mh_step(g, state, scorer, rng, mix)
        if state.log_post > best.log_post:
            best = state
        if record and step % thin == 0:
            records.append((step, state.f_rule, state.angle_deg, state.depth,
                            state.log_post, accepted))
        if debug_check_every and (step + 1) % debug_check_every == 0:
            fresh = Scorer(problem, scorer.ink, scorer.max_symbols)
            ll = fresh.log_likelihood(state.f_rule, state.angle_deg, state.depth)
            lp = _log_post(state.tree, state.depth, ll, problem.unknown_depth)
            scale = max(abs(lp), 1.0)
            if abs(lp - state.log_post) / scale > 1e-9:
                raise AssertionError(
                    f"cache incoherence at step {step}: {lp} vs {state.log_post}")
    return ChainResult(final=state, best=best, records=records)


def posterior_predictive_score(state: ChainState, candidate: np.ndarray,
                               scorer: Scorer) -> float:
    """Log-probability of a candidate image under the state's next-step
    render."""
    mean = scorer.predictive_mean(state.f_rule, state.angle_deg, state.depth)
    return scorer.score_candidate(candidate, mean)


def _as_seedseq(seed) -> np.random.SeedSequence:
    if isinstance(seed, np.random.SeedSequence):
        return seed
    return np.random.SeedSequence(seed)


def _decide(results: list, decision: str) -> ChainState:
    if decision == "last":
        return results[-1].final
    if decision == "map":
        return max((r.best for r in results), key=lambda s: s.log_post)
    raise ValueError(f"unknown decision rule {decision!r}")


def classify(problem: InferenceProblem, candidates, g: gr.MetaGrammar, n_steps: int,
             seed, ink: render.InkParams | None = None, decision: str = "last",
             n_chains: int = 1) -> tuple:
    """Six-way classification: run chains, score every candidate under the
    decision state's posterior predictive, return (index, scores).

    Ties break toward the lowest index.
    """
    if len(candidates) != 6:
        raise ValueError("classification trials have exactly six candidates")
    scorer = Scorer(problem, ink)
    seeds = _as_seedseq(seed).spawn(n_chains)
    results = [run_chain(problem, g, n_steps, s, scorer=scorer) for s in seeds]
    state = _decide(results, decision)
    mean = scorer.predictive_mean(state.f_rule, state.angle_deg, state.depth)
    scores = np.array([scorer.score_candidate(c, mean) for c in candidates])
    return int(np.argmax(scores)), scores


def implied_assignment(state: ChainState, scorer: Scorer, interface) -> tuple | None:
    """The toggle pattern the state itself predicts, or None.

    The state explains the mature exemplar as its own expansion at the
    mature depth; when that string has the same number of drawable segments
    as the interface, its F/G pattern reads off directly as an assignment
    (segment order equals drawing order).  Structurally incompatible
    explanations yield None.
    """
    if scorer.problem.unknown_depth:
        mature_depth = state.depth
    else:
        mature_depth = max(scorer.problem.depths)
    eff = scorer.effective_depth(state.f_rule, mature_depth)
    explained = scorer.expansions(state.f_rule)[eff]
    bits = tuple(c == "F" for c in explained if c in ("F", "G"))
    if len(bits) != len(interface.positions):
        return None
    return bits


def generate_via_interface(problem: InferenceProblem, interface, g: gr.MetaGrammar,
                           n_steps: int, seed, ink: render.InkParams | None = None,
                           decision: str = "last", n_chains: int = 1,
                           order: str = "random") -> tuple:
    """Greedy segment-toggle response under the posterior predictive.

    The assignment starts at the decision state's own implied toggle
    pattern (all-inert when the state is structurally incompatible with
    the interface), then visits every toggleable segment once (seeded
    random order, or string order with ``order="fixed"``) and keeps
    whichever of the two states of that segment scores higher, holding the
    others fixed.  Ties keep the segment inert.
    """
    scorer = Scorer(problem, ink)
    ss = _as_seedseq(seed)
    chain_seeds = ss.spawn(n_chains + 1)
    results = [run_chain(problem, g, n_steps, s, scorer=scorer)
               for s in chain_seeds[:n_chains]]
    state = _decide(results, decision)
    mean = scorer.predictive_mean(state.f_rule, state.angle_deg, state.depth)
    return _greedy_toggle(state, scorer, interface, mean, chain_seeds[-1], order)


def _greedy_toggle(state: ChainState, scorer: Scorer, interface,
                   mean: np.ndarray, order_seed, order: str = "random") -> tuple:
    m = len(interface.positions)
    assignment = list(implied_assignment(state, scorer, interface)
                      or interface.initial_assignment)
    if order == "random":
        visit = np.random.default_rng(order_seed).permutation(m)
    elif order == "fixed":
        visit = np.arange(m)
    else:
        raise ValueError(f"unknown visit order {order!r}")
    for pos in visit:
        scores = {}
        for bit in (False, True):
            assignment[pos] = bit
            img = interface.render_next(assignment, scorer.ink, scorer.problem.resolution)
            scores[bit] = scorer.score_candidate(img, mean)
        assignment[pos] = scores[True] > scores[False]
    return tuple(assignment)
