import json
import sys

import numpy as np
import pytest
from hypothesis import given, settings
from hypothesis import strategies as st

from conftest import clustered
from proofminer.checker import accepts
from proofminer.checker import main as stub_main
from proofminer.errors import CheckerFailure, TargetNotClustered, UnknownLemma
from proofminer.fixtures import fixture_path, load_fixture
from proofminer.kmeans import ClusterModel
from proofminer.premiss import (CheckerConfig, candidate_substitutions, find_cluster_of, generate_candidates,
                                substitution_pairs, suggest)
from proofminer.terms import TacticArg, TacticScript, TacticStep

ACCEPTED = "move=> m n p q; rewrite maxnA maxnAC n"


def stub(tmp_path, rules, **kw):
    path = tmp_path / "rules.json"
    path.write_text(json.dumps(rules))
    return CheckerConfig([sys.executable, "-m", "proofminer.checker", str(path)], **kw)


def model_of(groups, prox=None):
    """ClusterModel from a list of name groups; proximities default to descending by position."""
    names, assignment, proximities = [], [], []
    for j, group in enumerate(groups):
        for i, n in enumerate(group):
            names.append(n)
            assignment.append(j)
            proximities.append(prox[n] if prox else 1.0 - 0.1 * i)
    k = len(groups)
    return ClusterModel(np.zeros((k, 1)), np.array(assignment), np.array(proximities), np.zeros(k), names)


def script(*steps):
    return TacticScript(tuple(TacticStep(t, tuple(TacticArg(k, v) for k, v in args)) for t, args in steps))


@pytest.fixture(scope="module")
def scenario():
    return load_fixture("interchange"), clustered("interchange", 5).model


# -- find_cluster_of / candidate_substitutions --------------------------------------

def test_cluster_of_target(scenario):
    _, model = scenario
    assert set(find_cluster_of("maxnACA", model)) == {"addnACA", "minnACA", "mulnACA"}


def test_singleton_cluster_has_no_mates():
    model = model_of([["a"], ["b", "c"]])
    assert find_cluster_of("a", model) == []
    with pytest.raises(TargetNotClustered):
        find_cluster_of("zzz", model)


def test_mates_by_proximity():
    model = model_of([["t", "far", "near"]], prox={"t": 0.5, "far": 0.1, "near": 0.9})
    assert find_cluster_of("t", model) == ["near", "far"]


def test_substitution_clusters(scenario):
    _, model = scenario
    subs = candidate_substitutions("addnA", model)
    assert subs[0] == "addnA" and set(subs) == {"minnA", "mulnA", "maxnA", "addnA"}
    subs = candidate_substitutions("addnCA", model)
    assert subs[0] == "addnCA" and set(subs) == {"minnAC", "mulnAC", "maxnAC", "addnCA"}
    assert candidate_substitutions("a", model_of([["a"], ["b"]])) == ["a"]
    with pytest.raises(UnknownLemma):
        candidate_substitutions("nope", model)


# -- generate_candidates ---------------------------------------------------------------

def test_scenario_candidates_include_the_proof(scenario):
    lib, model = scenario
    cands = generate_candidates([("addnACA", lib.get("addnACA").proof_script)], model, ["m", "n", "p", "q"], 1000)
    rendered = [c.script.render() for c in cands]
    assert ACCEPTED in rendered
    hit = cands[rendered.index(ACCEPTED)]
    assert substitution_pairs(hit) == [["addnA", "maxnA"], ["addnCA", "maxnAC"]]


def test_no_args_only_verbatim():
    s = script(("done", []))
    cands = generate_candidates([("x", s)], model_of([["x"]]), ["h"], 100)
    assert [c.script for c in cands] == [s]


def test_literals_untouched():
    s = script(("move=>", [("literal", "m")]))
    cands = generate_candidates([("x", s)], model_of([["x"]]), ["m", "n"], 100)
    assert len(cands) == 1


def test_two_args_of_four():
    model = model_of([["a1", "a2", "a3", "a4"], ["b1", "b2", "b3", "b4"]])
    s = script(("rewrite", [("lemma", "a1"), ("lemma", "b1")]))
    cands = generate_candidates([("src", s)], model, [], 1000)
    assert cands[0].script == s and cands[0].substitutions == ()
    assert len(cands) - 1 == 15  # 4 * 4 combinations minus the verbatim one
    assert [len(c.substitutions) for c in cands[1:]] == [1] * 6 + [2] * 9


def test_budget_truncates():
    model = model_of([["a1", "a2", "a3", "a4"], ["b1", "b2", "b3", "b4"]])
    s = script(("rewrite", [("lemma", "a1"), ("lemma", "b1")]))
    assert len(generate_candidates([("src", s)], model, [], 5)) == 5
    assert [c.rank for c in generate_candidates([("src", s)], model, [], 5)] == list(range(5))


def test_sources_in_proximity_order():
    model = model_of([["t", "low", "high"]], prox={"t": 1.0, "low": 0.2, "high": 0.8})
    s_low = script(("apply", [("hypothesis", "h1")]))
    s_high = script(("apply", [("hypothesis", "h2")]))
    cands = generate_candidates([("low", s_low), ("high", s_high)], model, ["h1", "h2"], 100)
    assert [c.source for c in cands[:2]] == ["high", "low"]


def test_many_arguments_do_not_expand_everything():
    groups = [[f"l{j}_{i}" for i in range(10)] for j in range(12)]
    model = model_of(groups)
    s = script(("rewrite", [("lemma", g[0]) for g in groups]))
    cands = generate_candidates([("src", s)], model, [], 50)
    assert len(cands) == 50
    assert all(len(c.substitutions) <= 1 for c in cands)


# -- suggest ----------------------------------------------------------------------------

def test_scenario_is_proved(tmp_path, scenario):
    lib, model = scenario
    checker = stub(tmp_path, {"maxnACA": [ACCEPTED]})
    report = suggest("maxnACA", lib, model, checker, fixture_path("interchange"))
    assert report.accepted is not None
    assert report.accepted.script.render() == ACCEPTED
    pairs = substitution_pairs(report.accepted)
    src = report.accepted.source
    assert pairs == [[src.replace("ACA", "A"), "maxnA"], [lib.get(src).proof_script.steps[1].args[1].value, "maxnAC"]]
    assert report.tried <= 20
    assert report.tried == len(report.attempts)


def test_verbatim_acceptance(tmp_path, scenario):
    lib, model = scenario
    verbatim = lib.get(find_cluster_of("maxnACA", model)[0]).proof_script
    checker = stub(tmp_path, {"maxnACA": [verbatim.to_json()]})
    report = suggest("maxnACA", lib, model, checker)
    assert report.tried == 1 and report.accepted.substitutions == ()


def test_exhaustion(tmp_path, scenario):
    lib, model = scenario
    report = suggest("maxnACA", lib, model, CheckerConfig(["false"], budget=10))
    assert report.accepted is None and report.tried == 10
    assert [o for _, o in report.attempts] == ["rejected"] * 10


def test_checker_failure(scenario):
    lib, model = scenario
    with pytest.raises(CheckerFailure) as info:
        suggest("maxnACA", lib, model, CheckerConfig([sys.executable, "-c", "import sys; sys.exit(3)"]))
    assert info.value.returncode == 3


def test_timeout_counts_as_rejection(tmp_path, scenario):
    lib, model = scenario
    checker = stub(tmp_path, {"sleep": 5, "*": ["*"]}, timeout=0.2, budget=2)
    report = suggest("maxnACA", lib, model, checker)
    assert report.accepted is None and report.tried == 2
    assert [o for _, o in report.attempts] == ["timeout", "timeout"]


def test_parallel_reports_lowest_rank(tmp_path, scenario):
    lib, model = scenario
    serial = suggest("maxnACA", lib, model, stub(tmp_path, {"maxnACA": [ACCEPTED]}))
    # accept the target script and everything ranked after it as well
    later = [c.script.to_json() for c in serial.candidates_ranked[serial.accepted.rank:]]
    checker = stub(tmp_path, {"maxnACA": later}, workers=4)
    par = suggest("maxnACA", lib, model, checker)
    assert par.accepted.rank == serial.accepted.rank
    assert par.tried <= checker.budget


def test_checker_config_validation():
    with pytest.raises(ValueError):
        CheckerConfig(["x"], budget=0)
    assert CheckerConfig("a 'b c'").argv() == ["a", "b c"]


def test_unknown_target(scenario):
    lib, model = scenario
    with pytest.raises(UnknownLemma):
        suggest("nope", lib, model, CheckerConfig(["false"]))


# -- stub checker -------------------------------------------------------------------------

def test_stub_rules(tmp_path, monkeypatch, capsys):
    s = script(("rewrite", [("lemma", "maxnA")]))
    assert accepts({"t": ["rewrite max*"]}, "t", s)
    assert not accepts({"t": ["rewrite min*"]}, "t", s)
    assert accepts({"*": [s.to_json()]}, "other", s)
    rules = tmp_path / "r.json"
    rules.write_text(json.dumps({"t": ["rewrite maxnA"]}))
    import io
    monkeypatch.setattr(sys, "stdin", io.StringIO(json.dumps({"library": None, "target": "t",
                                                              "script": s.to_json()})))
    assert stub_main([str(rules)]) == 0
    monkeypatch.setattr(sys, "stdin", io.StringIO("not json"))
    assert stub_main([str(rules)]) == 2
    assert stub_main([]) == 2


# -- properties ------------------------------------------------------------------------------

lemma_names = [f"L{i}" for i in range(8)]


@st.composite
def setups(draw):
    labels = draw(st.lists(st.integers(0, 3), min_size=len(lemma_names), max_size=len(lemma_names)))
    groups = [[n for n, l in zip(lemma_names, labels) if l == j] for j in range(4)]
    groups = [g for g in groups if g]
    model = model_of(groups)
    hyps = draw(st.lists(st.sampled_from(["x", "y", "z", "w"]), unique=True, max_size=4))
    arg = st.one_of(
        st.tuples(st.just("lemma"), st.sampled_from(lemma_names)),
        st.tuples(st.just("hypothesis"), st.sampled_from(["x", "y", "z", "w"])),
        st.tuples(st.just("literal"), st.sampled_from(["1", "foo"])),
    )
    steps = st.lists(st.tuples(st.sampled_from(["rewrite", "apply"]), st.lists(arg, max_size=3)),
                     min_size=1, max_size=2)
    scripts = draw(st.lists(st.tuples(st.sampled_from(lemma_names), steps.map(lambda ss: script(*ss))),
                            min_size=1, max_size=3, unique_by=lambda p: p[0]))
    budget = draw(st.integers(1, 60))
    return model, hyps, scripts, budget


@settings(max_examples=150, deadline=None)
@given(setups())
def test_substitution_soundness(setup):
    model, hyps, scripts, budget = setup
    for c in generate_candidates(scripts, model, hyps, budget):
        for (orig, repl), kind in zip(c.substitutions, c.kinds):
            if kind == "lemma":
                assert model.cluster_of(orig)[0] == model.cluster_of(repl)[0]
            else:
                assert kind == "hypothesis" and repl in hyps
        originals = [a for st_ in dict(scripts)[c.source].steps for a in st_.args]
        produced = [a for st_ in c.script.steps for a in st_.args]
        for a, b in zip(originals, produced):
            if a.kind == "literal":
                assert a == b


@settings(max_examples=150, deadline=None)
@given(setups())
def test_verbatim_first_and_budget(setup):
    model, hyps, scripts, budget = setup
    cands = generate_candidates(scripts, model, hyps, budget)
    assert len(cands) <= budget
    assert [c.rank for c in cands] == list(range(len(cands)))
    assert len({c.script for c in cands}) == len(cands)
    seen_substituted = False
    for c in cands:
        if c.substitutions:
            seen_substituted = True
        else:
            assert not seen_substituted
    for c in cands:
        if c.substitutions:
            verbatim = dict(scripts)[c.source]
            rank = [x.rank for x in cands if x.script == verbatim]
            assert rank and rank[0] < c.rank


@settings(max_examples=150, deadline=None)
@given(setups())
def test_reproducible_order(setup):
    model, hyps, scripts, budget = setup
    assert generate_candidates(scripts, model, hyps, budget) == generate_candidates(scripts, model, hyps, budget)


@settings(max_examples=10, deadline=None)
@given(st.integers(1, 12))
def test_budget_safety_with_real_calls(budget):
    lib, model = load_fixture("interchange"), clustered("interchange", 5).model
    report = suggest("maxnACA", lib, model, CheckerConfig(["false"], budget=budget))
    assert report.tried == budget == len(report.attempts)
