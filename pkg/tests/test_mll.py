"""Sequent calculus checking and the two derivation translations."""

import pytest

from lamp.derivations import Derivation, Rule, check_derivation
from lamp.mll import (
    MllDerivation, MllRule, MllRuleViolation, MllSequent, check_mll,
    mll_to_nmll, nmll_to_mll, type_erasure,
)
from lamp.parser import parse_program
from lamp.reconstruct import reconstruct
from lamp.terms import (
    Atom, BOT, Close, DeltaEntry, Lolli, ParT, Sequent, Var,
)
from lamp.testlab import GenConfig, gen_derivation, gen_mll
from tests.conftest import corpus_text

A, B = Atom("A"), Atom("B")


def ax_id(ty):
    return MllDerivation(MllRule.AX_ID, MllSequent((ty,), (ty,)))


def test_identity_axiom_checks():
    check_mll(ax_id(A))


def test_bottom_axiom_checks():
    check_mll(MllDerivation(MllRule.AX_BOT, MllSequent((BOT,), ())))


def test_cut_with_mismatched_formula_rejected():
    bad = MllDerivation(
        MllRule.CUT, MllSequent((), ()),
        (ax_id(A), ax_id(B)))
    with pytest.raises(MllRuleViolation):
        check_mll(bad)


def test_cut_checks():
    cut = MllDerivation(MllRule.CUT, MllSequent((A,), (A,)),
                        (ax_id(A), ax_id(A)))
    check_mll(cut)


def test_lolli_left_display_instance():
    node = MllDerivation(
        MllRule.LOLLI_L, MllSequent((A, Lolli(A, B)), (B,)),
        (ax_id(A), ax_id(B)))
    check_mll(node)


def test_axiom_translates_to_identity():
    d = Derivation(Rule.AX, Sequent((("x", A),), (DeltaEntry(Var("x"), A),)))
    m = nmll_to_mll(d)
    assert m == ax_id(A)


def test_close_translates_to_cut_against_bottom_axiom():
    ax = Derivation(Rule.AX, Sequent((("x", BOT),),
                                     (DeltaEntry(Var("x"), BOT),)))
    d = Derivation(Rule.BOT_E,
                   Sequent((("x", BOT),), (DeltaEntry(Close(Var("x")), None),)),
                   (ax,))
    m = nmll_to_mll(d)
    check_mll(m)
    assert m.rule is MllRule.CUT
    assert m.conclusion == MllSequent((BOT,), ())
    assert m.premises[1].rule is MllRule.AX_BOT


def test_excluded_middle_translates():
    prog = parse_program(corpus_text("excluded_middle"))
    d = reconstruct(prog.sequent, prog.annotations)
    m = nmll_to_mll(d)
    check_mll(m)
    assert m.conclusion == MllSequent((), (ParT(A, Lolli(A, BOT)),))


def test_corpus_translations_check():
    for name in ["client_server_request", "cyclic", "channel_transmission",
                 "client_server_dialogue"]:
        prog = parse_program(corpus_text(name))
        d = reconstruct(prog.sequent, prog.annotations)
        m = nmll_to_mll(d)
        check_mll(m)
        assert m.conclusion == type_erasure(d.conclusion)


def test_bottom_axiom_translates_to_close():
    m = MllDerivation(MllRule.AX_BOT, MllSequent((BOT,), ()))
    d = mll_to_nmll(m)
    check_derivation(d)
    assert isinstance(d.conclusion.delta[0].term, Close)
    assert type_erasure(d.conclusion) == m.conclusion


def test_cut_translates_to_applied_output():
    cut = MllDerivation(MllRule.CUT, MllSequent((A,), (A,)),
                        (ax_id(A), ax_id(A)))
    d = mll_to_nmll(cut)
    check_derivation(d)
    assert type_erasure(d.conclusion) == cut.conclusion


def test_par_right_translates_rule_to_rule():
    inner = MllDerivation(MllRule.BOT_R, MllSequent((A,), (A, BOT)),
                          (ax_id(A),))
    m = MllDerivation(MllRule.PARR_R, MllSequent((A,), (ParT(A, BOT),)),
                      (inner,))
    d = mll_to_nmll(m)
    check_derivation(d)
    assert d.rule is Rule.PARR_I
    assert type_erasure(d.conclusion) == m.conclusion


def test_translations_deterministic():
    m = gen_mll(GenConfig(seed=7, max_nodes=9))
    assert mll_to_nmll(m) == mll_to_nmll(m)


@pytest.mark.parametrize("seed", range(40))
def test_generated_nmll_round(seed):
    d = gen_derivation(GenConfig(seed=seed, max_nodes=10))
    m = nmll_to_mll(d)
    check_mll(m)
    assert m.conclusion == type_erasure(d.conclusion)


@pytest.mark.parametrize("seed", range(40))
def test_generated_mll_round(seed):
    m = gen_mll(GenConfig(seed=seed, max_nodes=9))
    check_mll(m)
    d = mll_to_nmll(m)
    check_derivation(d)
    assert type_erasure(d.conclusion) == m.conclusion
