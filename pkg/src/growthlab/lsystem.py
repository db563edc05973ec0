"""L-systems over the turtle alphabet: parallel rewriting, depth expansion,
segment toggling, and stimulus constraint checks.

Symbol strings are plain Python strings over the five terminals
``F`` (growable forward), ``G`` (inert forward), ``+`` / ``-`` (turns) and
the space separator.  Separators are legal everywhere but carry no turtle
action and are excluded from length accounting.
"""

from __future__ import annotations

from dataclasses import dataclass

from .errors import CapExceeded, NotAForwardSymbol

ALPHABET = "FG+- "
FORWARD_SYMBOLS = "FG"
TURN_SYMBOLS = "+-"
SEPARATOR = " "

#: Global cap on expanded string length (separators excluded).  The longest
#: concept used in the experiments has 470 symbols; 512 is the smallest
#: convenient power of two above that.
MAX_SYMBOLS = 512


def check_symbols(s: str) -> str:
    bad = set(s) - set(ALPHABET)
    if bad:
        raise ValueError(f"illegal symbols {sorted(bad)!r} in {s!r}")
    return s


def strip_separators(s: str) -> str:
    return s.replace(SEPARATOR, "")


def symbol_length(s: str) -> int:
    """Length of a symbol string, separators excluded."""
    return len(s) - s.count(SEPARATOR)


def count_forward(s: str) -> int:
    return s.count("F") + s.count("G")


def count_turns(s: str) -> int:
    return s.count("+") + s.count("-")


def forward_positions(s: str) -> list[int]:
    """Indices of all F/G symbols, in string order."""
    return [i for i, c in enumerate(s) if c in FORWARD_SYMBOLS]


@dataclass(frozen=True)
class LSystem:
    """A deterministic parallel rewriting system.

    ``axiom`` is the depth-0 string; each expansion replaces every F with
    ``f_rule`` and every G with ``g_rule`` simultaneously.
    """

    axiom: str = "F"
    angle_deg: float = 90.0
    f_rule: str = "F"
    g_rule: str = "G"

    def __post_init__(self):
        for name in ("axiom", "f_rule", "g_rule"):
            check_symbols(getattr(self, name))
        if count_forward(self.f_rule) < 1:
            raise ValueError("f_rule must contain at least one forward symbol")


def expand_once(s: str, system: LSystem, max_symbols: int | None = MAX_SYMBOLS) -> str:
    """One parallel rewrite pass: F -> f_rule, G -> g_rule, rest copied.

    Raises CapExceeded when the result (separators excluded) is longer than
    ``max_symbols``; pass ``None`` to disable the check.
    """
    out = []
    for c in s:
        if c == "F":
            out.append(system.f_rule)
        elif c == "G":
            out.append(system.g_rule)
        else:
            out.append(c)
    result = "".join(out)
    if max_symbols is not None and symbol_length(result) > max_symbols:
        raise CapExceeded(
            f"expansion has {symbol_length(result)} symbols (cap {max_symbols})"
        )
    return result


def expand_to_depth(system: LSystem, depth: int, max_symbols: int | None = MAX_SYMBOLS) -> str:
    """Apply the rewrite rules ``depth`` times starting from the axiom."""
    if depth < 0:
        raise ValueError("depth must be nonnegative")
    s = system.axiom
    for d in range(depth):
        try:
            s = expand_once(s, system, max_symbols)
        except CapExceeded as e:
            raise CapExceeded(str(e), depth=d + 1) from None
    return s


def expansions_up_to(system: LSystem, max_depth: int,
                     max_symbols: int | None = MAX_SYMBOLS) -> list[str]:
    """[S_0, ..., S_k] where k is the largest depth <= max_depth under the cap."""
    out = [system.axiom]
    for _ in range(max_depth):
        try:
            out.append(expand_once(out[-1], system, max_symbols))
        except CapExceeded:
            break
    return out


def toggle_segment(s: str, index: int) -> str:
    """Swap F <-> G at ``index``; everything else is untouched."""
    c = s[index]
    if c == "F":
        new = "G"
    elif c == "G":
        new = "F"
    else:
        raise NotAForwardSymbol(f"symbol at index {index} is {c!r}, not F/G")
    return s[:index] + new + s[index + 1 :]


def apply_assignment(s: str, assignment) -> str:
    """Set every forward symbol of ``s`` to F (True) or G (False)."""
    positions = forward_positions(s)
    if len(assignment) != len(positions):
        raise ValueError(
            f"assignment has {len(assignment)} bits for {len(positions)} segments"
        )
    chars = list(s)
    for pos, on in zip(positions, assignment):
        chars[pos] = "F" if on else "G"
    return "".join(chars)


@dataclass(frozen=True)
class ConstraintReport:
    """Boolean flags for the stimulus constraints, plus an overall verdict."""

    upward_growth: bool
    non_self_crossing: bool
    no_adjacent_forwards: bool
    shape_preserving: bool

    @property
    def ok(self) -> bool:
        return (
            self.upward_growth
            and self.non_self_crossing
            and self.no_adjacent_forwards
            and self.shape_preserving
        )


def has_adjacent_forwards(rule: str) -> bool:
    stripped = strip_separators(rule)
    return any(
        a in FORWARD_SYMBOLS and b in FORWARD_SYMBOLS
        for a, b in zip(stripped, stripped[1:])
    )


def validate_stimulus_constraints(system: LSystem) -> ConstraintReport:
    """Check the constraints imposed on sampled stimulus concepts.

    upward_growth: the depth-2 trajectory extends above the baseline path.
    non_self_crossing: no two non-adjacent depth-2 segments intersect, and
    adjacent segments do not retrace each other.
    no_adjacent_forwards: the f_rule never puts two forward symbols
    side by side (separators ignored).
    shape_preserving: tracing the f_rule yields zero net rotation and a
    strictly positive net displacement along the initial heading.
    """
    from . import render  # local import; render depends on this module

    no_adjacent = not has_adjacent_forwards(system.f_rule)
    shape_ok = render.rule_preserves_shape(system.f_rule, system.angle_deg)

    try:
        s2 = expand_to_depth(system, 2)
    except CapExceeded:
        return ConstraintReport(False, False, no_adjacent, shape_ok)
    traj = render.trace(s2, system.angle_deg)
    upward = render.extends_above_baseline(traj)
    non_crossing = not render.self_intersects(traj)
    return ConstraintReport(upward, non_crossing, no_adjacent, shape_ok)
