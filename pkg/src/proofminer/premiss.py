"""Premiss selection: reuse the tactic scripts of cluster-mates on a new goal.

For a target lemma T:

1. look up the cluster of T,
2. collect the proof scripts of the other members,
3. try every script as is,
4. then try variants where lemma arguments are swapped for members of the
   argument's own cluster and hypothesis arguments for the binders of T.

Candidates go to an external checker one at a time (see ``run_checker``).
"""
from __future__ import annotations

import heapq
import itertools
import json
import logging
import shlex
import subprocess
from concurrent.futures import ThreadPoolExecutor
from dataclasses import dataclass, field
from typing import Optional

from .errors import CheckerFailure, TargetNotClustered, UnknownLemma
from .terms import TacticArg, TacticScript, TacticStep, global_names, top_binders

log = logging.getLogger(__name__)

LEMMA, HYPOTHESIS, LITERAL = "lemma", "hypothesis", "literal"


@dataclass
class CheckerConfig:
    command: object                 # argv list or a shell-style string
    timeout: float = 30.0           # seconds per call; a timeout counts as a rejection
    budget: int = 1000
    workers: int = 1                # >1 turns on the parallel mode

    def __post_init__(self):
        if self.budget < 1:
            raise ValueError(f"budget must be >= 1, got {self.budget}")
        if self.workers < 1:
            raise ValueError(f"workers must be >= 1, got {self.workers}")

    def argv(self):
        if isinstance(self.command, str):
            return shlex.split(self.command)
        return list(self.command)


@dataclass(frozen=True)
class Candidate:
    script: TacticScript
    source: str
    substitutions: tuple = ()       # (original, replacement) pairs, lemma and hypothesis args alike
    rank: int = 0
    kinds: tuple = ()               # arg kind of each substitution

    @property
    def lemma_substitutions(self):
        return [s for s, kind in zip(self.substitutions, self.kinds) if kind == LEMMA]

    def to_json(self):
        return {
            "rank": self.rank,
            "source": self.source,
            "script": self.script.to_json(),
            "rendered": self.script.render(),
            "substitutions": [
                {"kind": k, "original": a, "replacement": b}
                for (a, b), k in zip(self.substitutions, self.kinds)
            ],
        }


@dataclass
class SuggestionReport:
    target: str
    tried: int = 0
    accepted: Optional[Candidate] = None
    candidates_ranked: list = field(default_factory=list)
    attempts: list = field(default_factory=list)   # (rank, outcome) in call order
    budget: int = 0

    def to_json(self):
        return {
            "target": self.target,
            "budget": self.budget,
            "tried": self.tried,
            "accepted": None if self.accepted is None else self.accepted.to_json(),
            "attempts": [{"rank": r, "outcome": o} for r, o in self.attempts],
            "candidates_ranked": [c.to_json() for c in self.candidates_ranked],
        }


def _members_by_proximity(model, j, exclude=None):
    idx = [i for i in model.members(j) if model.names[i] != exclude]
    idx.sort(key=lambda i: (-model.proximities[i], i))
    return [model.names[i] for i in idx]


def find_cluster_of(target, model):
    """Other members of target's cluster, closest to the centroid first."""
    if model.names is None or target not in model.names:
        raise TargetNotClustered(target)
    j, _ = model.cluster_of(target)
    return _members_by_proximity(model, j, exclude=target)


def candidate_substitutions(arg_lemma, model):
    """arg_lemma itself, then the rest of its cluster by descending proximity."""
    if model.names is None or arg_lemma not in model.names:
        raise UnknownLemma(arg_lemma)
    j, _ = model.cluster_of(arg_lemma)
    return [arg_lemma] + _members_by_proximity(model, j, exclude=arg_lemma)


def _rerank(options, target_symbols, symbols):
    """Keep the original first; order the replacements by shared symbols with the target."""
    if not target_symbols or symbols is None:
        return options
    head, rest = options[:1], options[1:]
    overlap = {name: len(target_symbols & symbols.get(name, set())) for name in rest}
    # stable sort keeps proximity order among equal overlaps
    return head + sorted(rest, key=lambda name: -overlap[name])


def _arg_options(arg, model, target_hyps, target_symbols, symbols):
    if arg.kind == LEMMA:
        try:
            options = candidate_substitutions(arg.value, model)
        except UnknownLemma:
            return [arg.value]
        return _rerank(options, target_symbols, symbols)
    if arg.kind == HYPOTHESIS:
        return [arg.value] + [h for h in target_hyps if h != arg.value]
    return [arg.value]


def _rebuild(script, slots, choice):
    values = dict(zip(slots, choice))
    return TacticScript(tuple(
        TacticStep(step.tactic, tuple(
            TacticArg(a.kind, values.get((si, ai), a.value)) for ai, a in enumerate(step.args)))
        for si, step in enumerate(script.steps)
    ))


def _slots(script, model, target_hyps, target_symbols, symbols):
    slots, kinds, options = [], [], []
    for si, step in enumerate(script.steps):
        for ai, a in enumerate(step.args):
            opts = _arg_options(a, model, target_hyps, target_symbols, symbols)
            if len(opts) > 1:
                slots.append((si, ai))
                kinds.append(a.kind)
                options.append(opts)
    return slots, kinds, options


def _tier(options, count):
    """Keys (cost, choice, changed, picks) of every variant changing exactly ``count`` args."""
    for changed in itertools.combinations(range(len(options)), count):
        ranges = [range(1, len(options[k])) if k in changed else (0,) for k in range(len(options))]
        for picks in itertools.product(*ranges):
            choice = tuple(options[k][p] for k, p in enumerate(picks))
            yield sum(picks), choice, changed


def _source_variants(source, script, model, target_hyps, target_symbols, symbols, want, seen):
    """Up to ``want`` new substituted variants of one script, in rank order.

    Variants are produced one tier (number of substituted args) at a time and
    only the cheapest ones of a tier are materialised, so a script with many
    arguments does not expand its whole cartesian product.
    """
    slots, kinds, options = _slots(script, model, target_hyps, target_symbols, symbols)
    out = []
    for count in range(1, len(options) + 1):
        k = want - len(out)
        while k > 0:
            best = heapq.nsmallest(k, _tier(options, count))
            for cost, choice, changed in best:
                cand = Candidate(_rebuild(script, slots, choice), source,
                                 tuple((options[i][0], choice[i]) for i in changed), 0,
                                 tuple(kinds[i] for i in changed))
                if cand.script in seen:
                    continue
                seen.add(cand.script)
                out.append(cand)
                if len(out) >= want:
                    return out
            if len(best) < k:
                break  # tier exhausted
            # duplicates were skipped: look further into the same tier
            k = 2 * k
        if len(out) >= want:
            break
    return out


def generate_candidates(scripts, model, target_hyps, budget, target_symbols=None, symbols=None):
    """Ordered candidate scripts for a target.

    ``scripts`` is a list of (source lemma, TacticScript).  All verbatim
    scripts come first, then for each source in descending proximity the
    substituted variants, ordered by number of substitutions, then by the
    summed positions of the picked replacements in their option lists, then
    lexicographically.  When ``target_symbols`` and ``symbols`` (name -> set
    of global names in its statement) are given, lemma replacements that
    share more symbols with the target are tried earlier.  Duplicate scripts
    keep their first position.  The list is cut at ``budget``.
    """
    def prox(name):
        if model.names is not None and name in model.names:
            return float(model.proximities[model.index(name)])
        return 0.0

    order = sorted(range(len(scripts)), key=lambda i: (-prox(scripts[i][0]), scripts[i][0], i))
    out, seen = [], set()
    for i in order:
        source, script = scripts[i]
        if script not in seen and len(out) < budget:
            seen.add(script)
            out.append(Candidate(script, source))
    for i in order:
        if len(out) >= budget:
            break
        source, script = scripts[i]
        out.extend(_source_variants(source, script, model, list(target_hyps), target_symbols,
                                    symbols, budget - len(out), seen))
    return [Candidate(c.script, c.source, c.substitutions, r, c.kinds) for r, c in enumerate(out)]


def run_checker(config, library_path, target, script):
    """True if the checker accepts, False on rejection or timeout; CheckerFailure otherwise."""
    payload = json.dumps({"library": library_path, "target": target, "script": script.to_json()})
    try:
        proc = subprocess.run(config.argv(), input=payload, capture_output=True, text=True,
                              timeout=config.timeout)
    except subprocess.TimeoutExpired:
        log.info("checker timed out after %ss", config.timeout)
        return None
    except OSError as exc:
        raise CheckerFailure(f"cannot run checker {config.argv()!r}: {exc}", None) from exc
    if proc.returncode == 0:
        return True
    if proc.returncode == 1:
        return False
    raise CheckerFailure(
        f"checker exited with {proc.returncode}: {proc.stderr.strip()[:500]}", proc.returncode)


_OUTCOME = {True: "accepted", False: "rejected", None: "timeout"}


def _symbols_table(lib):
    return {o.name: set(global_names(o.statement)) for o in lib.objects}


def suggest(target, lib, model, checker, library_path=None, rank_by_symbols=True):
    """Look for a proof of ``target`` among recombined cluster-mate scripts.

    Stops at the first accepted candidate.  In parallel mode (``checker.workers > 1``)
    candidates go out in rank-ordered batches and the lowest accepted rank wins.
    """
    try:
        obj = lib.get(target)
    except KeyError:
        raise UnknownLemma(target) from None
    mates = find_cluster_of(target, model)
    scripts = [(m, lib.get(m).proof_script) for m in mates
               if m in lib.names and lib.get(m).proof_script is not None]
    symbols = _symbols_table(lib) if rank_by_symbols else None
    target_symbols = set(global_names(obj.statement)) if rank_by_symbols else None
    cands = generate_candidates(scripts, model, top_binders(obj.statement), checker.budget,
                                target_symbols, symbols)
    log.info("%s: %d cluster-mates, %d scripts, %d candidates", target, len(mates), len(scripts), len(cands))

    report = SuggestionReport(target, candidates_ranked=cands, budget=checker.budget)
    path = None if library_path is None else str(library_path)
    if checker.workers == 1:
        for c in cands:
            verdict = run_checker(checker, path, target, c.script)
            report.tried += 1
            report.attempts.append((c.rank, _OUTCOME[verdict]))
            if verdict:
                report.accepted = c
                break
        return report

    with ThreadPoolExecutor(max_workers=checker.workers) as pool:
        for start in range(0, len(cands), checker.workers):
            batch = cands[start:start + checker.workers]
            verdicts = list(pool.map(lambda c: run_checker(checker, path, target, c.script), batch))
            report.tried += len(batch)
            report.attempts.extend((c.rank, _OUTCOME[v]) for c, v in zip(batch, verdicts))
            hits = [c for c, v in zip(batch, verdicts) if v]
            if hits:
                report.accepted = min(hits, key=lambda c: c.rank)
                break
    return report


def substitution_pairs(candidate):
    """Lemma substitutions of a candidate as a plain list of (original, replacement)."""
    return [list(p) for p in candidate.lemma_substitutions]


__all__ = [
    "CheckerConfig", "Candidate", "SuggestionReport", "find_cluster_of", "candidate_substitutions",
    "generate_candidates", "run_checker", "suggest", "substitution_pairs",
]

