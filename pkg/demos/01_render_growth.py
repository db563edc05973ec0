"""Render the growth stages of a recursive L-system.

A concept is a rewrite rule plus a turn angle.  Each expansion replaces
every growable segment (F) with the rule and leaves inert segments (G) in
place, so the figure sprouts the same motif at every scale.  This script
expands one concept to depth 3 and writes each stage as a portable bitmap.

Run:  python demos/01_render_growth.py [outdir]
"""

import sys
from pathlib import Path

from growthlab.imageio import write_pbm
from growthlab.lsystem import (LSystem, count_forward, expand_to_depth,
                               validate_stimulus_constraints)
from growthlab.render import InkParams, render_binary

out = Path(sys.argv[1] if len(sys.argv) > 1 else "demo_out/growth")
out.mkdir(parents=True, exist_ok=True)

# a bump motif: turn away, sidestep, sprout, sidestep back -- the net
# rotation is zero, so every copy of the motif grows in a straight line
concept = LSystem(axiom="F", angle_deg=60.0, f_rule="F-G+F+G-F", g_rule="G")
print(f"rule: F -> {concept.f_rule}   angle: {concept.angle_deg} deg")
print("stimulus-valid:", validate_stimulus_constraints(concept))

ink = InkParams()
for depth in range(4):
    s = expand_to_depth(concept, depth)
    img = render_binary(s, concept.angle_deg, ink, 200)
    path = out / f"depth{depth}.pbm"
    write_pbm(path, img)
    print(f"depth {depth}: {count_forward(s):3d} segments, "
          f"{int(img.sum()):5d} black pixels -> {path}")
