"""Bounded check of the valid-encoding criteria for Linda and Spi programs."""
from __future__ import annotations

from collections import deque
from dataclasses import dataclass, field

from . import linda, spi
from .process import canonical_key, has_success, prune_dead, reductions


@dataclass
class Language:
    name: str
    reduce: object          # source -> list of source reducts
    encode: object          # source -> Process
    success: object         # source -> bool
    show: object
    prune: bool             # compare targets modulo dead restricted cases


LINDA = Language("linda", linda.linda_reduce, linda.encode_linda, linda.has_success, linda.show, False)
SPI = Language("spi", spi.spi_reduce, spi.encode_spi_proc, spi.has_success, spi.show, True)
LANGUAGES = {"linda": LINDA, "spi": SPI}


@dataclass
class Violation:
    clause: str
    trace: list          # source states (printed) from the root
    detail: str

    def as_dict(self) -> dict:
        return {"clause": self.clause, "trace": self.trace, "detail": self.detail}


@dataclass
class Report:
    language: str
    steps: int
    states: int = 0
    violations: list = field(default_factory=list)
    clauses: dict = field(default_factory=lambda: {c: True for c in CLAUSES})

    @property
    def ok(self) -> bool:
        return not self.violations

    def fail(self, clause: str, trace: list, detail: str) -> None:
        self.clauses[clause] = False
        self.violations.append(Violation(clause, trace, detail))

    def as_dict(self) -> dict:
        return {
            "language": self.language,
            "steps": self.steps,
            "states": self.states,
            "valid": self.ok,
            "clauses": dict(self.clauses),
            "violations": [v.as_dict() for v in self.violations],
        }

    def text(self) -> str:
        lines = [f"{self.language}: {self.states} source states explored to depth {self.steps}"]
        for c in CLAUSES:
            lines.append(f"  {c}: {'ok' if self.clauses[c] else 'VIOLATED'}")
        for v in self.violations:
            lines.append(f"  [{v.clause}] {v.detail}")
            for i, s in enumerate(v.trace):
                lines.append(f"    {i}: {s}")
        return "\n".join(lines)


CLAUSES = ("preservation", "reflection", "success", "divergence")


def _norm(lang: Language, P) -> str:
    return canonical_key(prune_dead(P) if lang.prune else P)


def _layers(step, start, depth: int, key) -> int:
    """Length of the longest reduction path, capped at ``depth``."""
    layer = {key(start): start}
    for d in range(depth):
        nxt = {}
        for s in layer.values():
            for t in step(s):
                nxt.setdefault(key(t), t)
        if not nxt:
            return d
        layer = nxt
    return depth


def check_encoding(language: str, program, steps: int) -> Report:
    """Explore ``program`` to ``steps`` reductions and test the four clauses.

    Source states are identified through their encoding up to structural
    congruence (after pruning dead cases for Spi).
    """
    lang = LANGUAGES[language]
    report = Report(language, steps)
    root_key = _norm(lang, lang.encode(program))
    seen = {root_key}
    queue = deque([(program, 0, [lang.show(program)])])
    while queue:
        S, d, trace = queue.popleft()
        report.states += 1
        enc = lang.encode(S)
        if lang.success(S) != has_success(enc):
            report.fail("success", trace, f"success marker differs: source {lang.success(S)}")
        if d == steps:
            continue
        src = lang.reduce(S)
        src_keys = {}
        for S2 in src:
            src_keys.setdefault(_norm(lang, lang.encode(S2)), S2)
        tgt_keys = {_norm(lang, Q) for Q in reductions(enc)}
        missing = set(src_keys) - tgt_keys
        extra = tgt_keys - set(src_keys)
        if missing:
            S2 = src_keys[sorted(missing)[0]]
            report.fail("preservation", trace + [lang.show(S2)],
                        f"{len(missing)} source step(s) without a matching encoded step")
        if extra:
            report.fail("reflection", trace,
                        f"{len(extra)} encoded step(s) not reflected by a source step: {sorted(extra)[0]}")
        for k, S2 in sorted(src_keys.items()):
            if k not in seen:
                seen.add(k)
                queue.append((S2, d + 1, trace + [lang.show(S2)]))

    src_ok = _succeeds(lang.reduce, lang.success, program, steps, lambda P: _norm(lang, lang.encode(P)))
    tgt_ok = _succeeds(reductions, has_success, lang.encode(program), steps, lambda P: _norm(lang, P))
    if src_ok != tgt_ok:
        report.fail("success", [lang.show(program)],
                    f"source succeeds={src_ok} but encoding succeeds={tgt_ok} within {steps} steps")

    src_len = _layers(lang.reduce, program, steps, lambda P: _norm(lang, lang.encode(P)))
    tgt_len = _layers(reductions, lang.encode(program), steps, lambda P: _norm(lang, P))
    if tgt_len == steps and src_len < steps:
        report.fail("divergence", [lang.show(program)],
                    f"encoding runs {steps} steps but the source stops after {src_len}")
    return report


def _succeeds(step, success, start, depth, key) -> bool:
    seen = {key(start)}
    frontier = [start]
    for d in range(depth + 1):
        if any(success(s) for s in frontier):
            return True
        if d == depth:
            break
        nxt = []
        for s in frontier:
            for t in step(s):
                k = key(t)
                if k not in seen:
                    seen.add(k)
                    nxt.append(t)
        frontier = nxt
    return False
