"""End-to-end checks of the python bindings."""

from pathlib import Path

import pytest

import rbnet

ASSETS = Path(__file__).resolve().parents[2] / "assets"


@pytest.fixture(scope="module")
def fig1():
    return rbnet.Protocol.load(str(ASSETS / "fig1.rbn"))


@pytest.fixture(scope="module")
def fig2(fig1):
    return rbnet.load_trace(str(ASSETS / "fig2.trace.json"), fig1)


def test_protocol_shape(fig1):
    assert fig1.num_states == 10
    assert fig1.num_messages == 4
    assert [fig1.state_name(s) for s in fig1.initial_states] == ["q0"]
    assert sorted(fig1.state_name(s) for s in fig1.target_set) == ["q4", "q6", "q8"]


def test_saturation(fig1):
    cert = rbnet.decide_synchronization_unconstrained(fig1)
    assert cert.synchronizable
    assert len(cert.final_set) == 9
    assert cert.iterations == 2


def test_trace_replay_and_json(fig1, fig2):
    configs = rbnet.replay(fig1, fig2)
    assert len(configs) == 8
    assert rbnet.all_target(fig1, configs[-1])
    again = rbnet.trace_from_json(rbnet.trace_to_json(fig2, fig1), fig1)
    assert again == fig2


def test_validation(fig1, fig2):
    ok = rbnet.validate_execution(fig1, fig2, rbnet.ConstraintPolicy.k_constrained(2))
    assert ok.ok
    assert ok.num_comm == 4
    bad = rbnet.validate_execution(fig1, fig2, rbnet.ConstraintPolicy.k_constrained(1))
    assert not bad.ok
    failing = [c for c in bad.checks if not c.ok]
    assert failing and failing[0].first_violation == 1


def test_search(fig1):
    result = rbnet.search_synchronizing_execution(
        fig1, 3, rbnet.ConstraintPolicy.k_constrained(2)
    )
    assert result.verdict == rbnet.Verdict.FoundWitness
    assert result.witness.num_comm_steps == 4
    nothing = rbnet.search_synchronizing_execution(
        fig1, 2, rbnet.ConstraintPolicy.unconstrained()
    )
    assert nothing.verdict == rbnet.Verdict.ExhaustedNoWitness


def test_transform(fig1, fig2):
    out = rbnet.to_one_locally_constrained(fig1, fig2)
    assert out.initial.num_nodes == 6
    report = rbnet.validate_execution(
        fig1, out, rbnet.ConstraintPolicy.k_locally_constrained(1)
    )
    assert report.ok
    assert rbnet.visits_target(fig1, out)


def test_petri():
    proto = rbnet.Protocol.parse(
        "states s0 s1 s2\n"
        "msg x y\n"
        "init s0\n"
        "target s2\n"
        "s0 !x s1\n"
        "s1 !y s2\n"
        "s0 ?x s0\n"
        "s0 ?y s0\n"
        "s1 ?x s1\n"
        "s1 ?y s1\n"
        "s2 ?x s2\n"
        "s2 ?y s2\n"
    )
    net = rbnet.compile_to_petri(proto, 2)
    assert len(net.places) == 15
    assert rbnet.import_net(rbnet.export_net(net, "pnml"), "pnml") == net
    reach = rbnet.bounded_marking_reachability(net, 2)
    assert reach.status == rbnet.PetriReachability.Status.Reached
    assert rbnet.replay_firing(net, reach.firing) == net.final_marking


def test_minsky():
    machine = rbnet.MinskyMachine.parse("L0: inc c1 -> H\nH: halt\n")
    proto = rbnet.encode_minsky(machine)
    assert proto.num_states == 47
    assert proto.num_messages == 28


def test_errors():
    with pytest.raises(rbnet.Error):
        rbnet.Protocol.parse("states a\nmsg m\ninit b\n")
    with pytest.raises(rbnet.Error):
        rbnet.Bound.parse("cubic")
