"""Generator reproducibility and coverage, plus the property suite driver
and its ability to catch an injected engine bug."""

from lamp.derivations import (
    Rule, all_sequents, check_channel_linearity, check_derivation,
)
from lamp.reconstruct import reconstruct
from lamp.reduction import Redex, apply_redex, comm_size, normalize
from lamp.terms import App, Send, replace_at, subterm_at
from lamp.testlab import (
    GenConfig, _node_count, gen_derivation, gen_mll, run_property_suite,
)


def test_reproducible():
    cfg = GenConfig(seed=42, max_nodes=12)
    assert gen_derivation(cfg) == gen_derivation(cfg)
    assert gen_mll(cfg) == gen_mll(cfg)


def test_generated_derivations_check():
    for seed in range(60):
        check_derivation(gen_derivation(GenConfig(seed=seed, max_nodes=11)))


def test_size_one_yields_an_axiom():
    for seed in range(10):
        d = gen_derivation(GenConfig(seed=seed, max_nodes=1))
        assert d.rule is Rule.AX


def test_size_cap_respected():
    for seed in range(40):
        d = gen_derivation(GenConfig(seed=seed, max_nodes=7))
        assert _node_count(d) <= 7


def test_every_internal_sequent_is_linear():
    for seed in range(40):
        d = gen_derivation(GenConfig(seed=seed, max_nodes=11))
        for s in all_sequents(d):
            check_channel_linearity(s)


def test_generated_conclusions_reconstruct():
    for seed in range(80):
        d = gen_derivation(GenConfig(seed=seed, max_nodes=11))
        d2 = reconstruct(d.conclusion)
        check_derivation(d2)
        assert d2.conclusion == d.conclusion


def test_normalization_length_formula_on_generated():
    for seed in range(40):
        d = gen_derivation(GenConfig(seed=seed, max_nodes=11))
        t = d.conclusion.joined_term()
        tr = normalize(t)
        assert len(tr.steps) == comm_size(t) - comm_size(tr.final)


def test_rule_coverage_over_many_cases():
    seen = set()
    for seed in range(1000):
        d = gen_derivation(GenConfig(seed=seed, max_nodes=9))
        stack = [d]
        while stack:
            n = stack.pop()
            seen.add(n.rule)
            stack.extend(n.premises)
        if len(seen) == len(Rule):
            break
    assert seen == set(Rule)


def test_empty_suite_passes():
    report = run_property_suite(0, GenConfig(seed=0))
    assert report.passed
    assert all(r.cases == 0 for r in report.results)


def test_suite_passes():
    report = run_property_suite(100, GenConfig(seed=5, max_nodes=12))
    assert report.passed, report.render()


def test_corrupted_reducer_is_caught():
    # a comm that drops the receiver replacement breaks linearity, and the
    # subject reduction suite must notice
    def corrupted(t, r: Redex):
        if r.kind == "comm":
            node = subterm_at(t, r.activator)
            assert isinstance(node, App) and isinstance(node.fun, Send)
            return replace_at(t, r.activator, node.fun.body)
        return apply_redex(t, r)

    report = run_property_suite(40, GenConfig(seed=11, max_nodes=11),
                                reducer=corrupted)
    by_name = {r.name: r for r in report.results}
    assert by_name["subject-reduction"].failures > 0
    assert by_name["subject-reduction"].first_failing_seed is not None


def test_report_render_format():
    report = run_property_suite(3, GenConfig(seed=2, max_nodes=8))
    for line in report.render().splitlines():
        assert "cases=" in line and "failures=" in line
