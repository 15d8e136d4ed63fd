"""Context-naming machines: rules, legality, and the embedding of plain
lambda terms."""

import pytest

from headlab.control import (
    CApp,
    CCommand,
    CPush,
    CStuckCo,
    CVar,
    CarS,
    Case,
    CoVar,
    Mu,
    as_krivine_command,
    control_halt,
    control_load,
    control_proj_step,
    control_step,
    embed_term,
    is_legal_command,
    legality_status,
    subst_command,
    unembed_term,
)
from headlab.parse import parse_term
from headlab.syntax import alpha_eq
from headlab.weakhead import krivine_load, krivine_step


def T(src):
    return parse_term(src)


def case_identity(x="x", a="a"):
    # The embedding of \x.x with co-binder a.
    return Case(x, a, CCommand(CVar(x), CoVar(a)))


class TestPlainMachineRules:
    def test_mu_captures_context(self):
        command = CCommand(Mu("a", CCommand(CVar("x"), CoVar("a"))),
                           CPush(CVar("y"), CStuckCo(0)))
        rule, nxt = control_step(command)
        assert rule == "mu"
        assert nxt == CCommand(CVar("x"), CPush(CVar("y"), CStuckCo(0)))

    def test_case_consumes_stack_frame(self):
        command = CCommand(case_identity(), CPush(CVar("y"), CStuckCo(0)))
        rule, nxt = control_step(command)
        assert rule == "beta"
        assert nxt == CCommand(CVar("y"), CStuckCo(0))

    def test_case_on_covariable_is_stuck(self):
        command = CCommand(Case("x", "b", CCommand(CVar("x"), CoVar("b"))), CoVar("a"))
        assert control_step(command) is None
        kind, reason = control_halt(command, projective=False)
        assert kind == "stuck" and "co-variable" in reason

    def test_case_on_top_is_stuck_in_plain_machine(self):
        command = CCommand(case_identity(), CStuckCo(0))
        assert control_step(command) is None
        kind, _ = control_halt(command, projective=False)
        assert kind == "stuck"


class TestProjectiveMachineRules:
    def test_case_splits_top(self):
        command = CCommand(case_identity(), CStuckCo(0))
        rule, nxt = control_proj_step(command)
        assert rule == "split"
        assert nxt == CCommand(CarS(0), CStuckCo(1))

    def test_eta_shaped_case_splits_stuck_coterm(self):
        # case[(x . a).<v || x . a>] against a stuck co-term steps to
        # <v || car S . cdr S>.
        v = CVar("v")
        body = CCommand(v, CPush(CVar("x"), CoVar("a")))
        command = CCommand(Case("x", "a", body), CStuckCo(2))
        rule, nxt = control_proj_step(command)
        assert rule == "split"
        assert nxt == CCommand(v, CPush(CarS(2), CStuckCo(3)))

    def test_eta_shaped_case_consumes_push(self):
        v = CVar("v")
        body = CCommand(v, CPush(CVar("x"), CoVar("a")))
        pushed = CPush(CVar("w"), CStuckCo(0))
        command = CCommand(Case("x", "a", body), pushed)
        rule, nxt = control_proj_step(command)
        assert rule == "beta"
        assert nxt == CCommand(v, pushed)

    def test_call_stack_rule_unchanged(self):
        command = CCommand(case_identity(), CPush(CVar("y"), CStuckCo(0)))
        assert control_proj_step(command) == control_step(command)

    def test_projection_heads_halt(self):
        command = CCommand(CarS(0), CStuckCo(1))
        assert control_proj_step(command) is None
        assert control_halt(command, projective=True) == ("normal", "")


class TestSubstitution:
    def test_simultaneous_substitution_does_not_chain(self):
        # Substituting x := (a term mentioning y) and y := (another term)
        # in one pass must not rewrite the first payload's y.
        body = CCommand(CApp(CVar("x"), CVar("y")), CStuckCo(0))
        result = subst_command(body, {"x": CVar("y"), "y": CVar("z")}, {})
        assert result == CCommand(CApp(CVar("y"), CVar("z")), CStuckCo(0))

    def test_covariable_capture_avoided(self):
        # Pushing a co-term with a free co-variable under a Mu binding the
        # same name must rename the Mu binder.
        inner = Mu("a", CCommand(CVar("x"), CoVar("b")))
        command = CCommand(inner, CoVar("ignored"))
        substituted = subst_command(command, {}, {"b": CoVar("a")})
        mu = substituted.term
        assert isinstance(mu, Mu)
        assert mu.covar != "a"
        assert mu.body.coterm == CoVar("a")

    def test_term_variable_capture_avoided(self):
        case = Case("x", "a", CCommand(CApp(CVar("x"), CVar("y")), CoVar("a")))
        command = CCommand(case, CoVar("k"))
        substituted = subst_command(command, {"y": CVar("x")}, {})
        out = substituted.term
        assert isinstance(out, Case)
        assert out.binder != "x"
        assert out.body.term == CApp(CVar(out.binder), CVar("x"))

    def test_rename_cascades_past_colliding_inner_binder(self):
        # Renaming the outer binder y must not let an inner binder that
        # already carries the fresh name capture the renamed occurrences.
        inner = Case("y1", "b", CCommand(CVar("y"), CoVar("b")))
        cmd = CCommand(Case("y", "a", CCommand(CApp(CVar("w"), inner), CoVar("a"))), CoVar("k"))
        out = subst_command(cmd, {"w": CVar("y")}, {}).term
        assert isinstance(out, Case)
        inner_out = out.body.term.arg
        assert inner_out.binder != out.binder
        assert inner_out.body.term == CVar(out.binder)


class TestLegality:
    def test_split_result_is_legal(self):
        assert is_legal_command(CCommand(CarS(0), CStuckCo(1)))

    def test_projection_at_top_depth_is_illegal(self):
        assert not is_legal_command(CCommand(CarS(0), CStuckCo(0)))

    def test_stacked_projections_legal(self):
        command = CCommand(CVar("x"), CPush(CarS(1), CStuckCo(2)))
        assert is_legal_command(command)

    def test_covariable_ended_commands_not_applicable(self):
        command = CCommand(CarS(5), CoVar("a"))
        assert legality_status(command) == "not-applicable"
        assert is_legal_command(command)

    def test_preserved_by_projective_steps(self, corpus120):
        checked = 0
        for term in corpus120:
            state = control_load(embed_term(term))
            for _ in range(60):
                assert is_legal_command(state)
                nxt = control_proj_step(state)
                if nxt is None:
                    break
                state = nxt[1]
                checked += 1
        assert checked > 200


class TestEmbedding:
    def test_lambda_becomes_case(self):
        embedded = embed_term(T(r"\x.x"))
        assert isinstance(embedded, Case)
        assert embedded.body == CCommand(CVar("x"), CoVar(embedded.cobinder))

    def test_round_trip(self, corpus120):
        for term in corpus120:
            assert unembed_term(embed_term(term)) == term

    def test_unembed_rejects_mu(self):
        with pytest.raises(ValueError):
            unembed_term(Mu("a", CCommand(CVar("x"), CoVar("a"))))

    def test_plain_machine_bisimulates_krivine(self, corpus120):
        # Step the embedded term and the plain Krivine machine side by
        # side: state-for-state the control run projects onto the Krivine
        # run, pushes match pushes, betas match betas, and Mu never fires.
        for term in corpus120:
            control_state = control_load(embed_term(term))
            krivine_state = krivine_load(term)
            for _ in range(80):
                assert as_krivine_command(control_state) == krivine_state
                control_next = control_step(control_state)
                krivine_next = krivine_step(krivine_state)
                if control_next is None or krivine_next is None:
                    # The machines stop in matching situations: the control
                    # machine is stuck on tp exactly when the Krivine
                    # machine terminates on a lambda, and halts on a
                    # variable exactly together.
                    assert (control_next is None) == (krivine_next is None)
                    break
                control_rule, control_state = control_next
                krivine_rule, krivine_state = krivine_next
                assert control_rule != "mu"
                assert {"push": "push", "beta": "beta"}[control_rule] == krivine_rule

    def test_projective_run_matches_head_engines(self, corpus120):
        from headlab.engines import evaluate
        for term in corpus120[:60]:
            control_out, _ = evaluate(term, "control-proj", 200)
            head_out, _ = evaluate(term, "head-proj", 200)
            if type(control_out).__name__ == "Normal" and type(head_out).__name__ == "Normal":
                assert alpha_eq(control_out.result, head_out.result)
            else:
                assert type(control_out).__name__ == type(head_out).__name__
