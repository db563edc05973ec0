"""Run configuration: one JSON document that pins every knob an experiment
run depends on, so reruns with the same config and seed are identical."""

from __future__ import annotations

import json
from dataclasses import asdict, dataclass, field
from pathlib import Path

from . import grammar as gr
from . import render
from .lsystem import MAX_SYMBOLS


@dataclass
class RunConfig:
    """Everything a pipeline stage needs besides its inputs.

    ``grammar_path``/``ink_path`` of None select the packaged defaults.
    Chain lengths model resource-bounded participants per condition; the
    ideal observer overrides them from the command line.
    """

    resolution: int = render.RESOLUTION
    grammar_path: str | None = None
    ink_path: str | None = None
    max_symbols: int = MAX_SYMBOLS
    seed: int = 0
    chain_steps: dict = field(default_factory=lambda: {"incremental": 160,
                                                       "block": 80})
    n_chains: int = 1
    suite_sizes: dict = field(default_factory=lambda: {"classification": 24,
                                                       "generation": 13})
    condition: str = "incremental"

    def __post_init__(self):
        if self.resolution < 8:
            raise ValueError("resolution must be at least 8")
        for name, steps in self.chain_steps.items():
            if int(steps) < 1:
                raise ValueError(f"chain length for {name!r} must be >= 1")
        if self.condition not in ("incremental", "block"):
            raise ValueError(f"unknown condition {self.condition!r}")
        for path in (self.grammar_path, self.ink_path):
            if path is not None and not Path(path).exists():
                raise FileNotFoundError(path)

    def grammar(self) -> gr.MetaGrammar:
        if self.grammar_path is None:
            return gr.default_grammar()
        return gr.load_grammar(self.grammar_path)

    def ink(self) -> render.InkParams:
        if self.ink_path is None:
            return render.InkParams()
        with open(self.ink_path) as fh:
            return render.InkParams(**json.load(fh))

    def to_json(self) -> str:
        return json.dumps(asdict(self), indent=2) + "\n"

    @classmethod
    def from_json(cls, text: str) -> "RunConfig":
        return cls(**json.loads(text))


def load_config(path) -> RunConfig:
    with open(path) as fh:
        return RunConfig.from_json(fh.read())


def save_config(config: RunConfig, path):
    Path(path).write_text(config.to_json())
