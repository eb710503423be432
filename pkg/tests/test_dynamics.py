import random

import numpy as np
import pytest
from hypothesis import given, settings
from hypothesis import strategies as st

from daosim.dynamics import (
    A,
    B,
    DynamicsParams,
    PerformanceMeasure,
    Schedule,
    StateVector,
    Termination,
    global_performance,
    neighborhood_share,
    parse_states,
    run,
    step_async,
    step_sequential,
    step_sync,
)
from daosim.errors import ValidationError
from daosim.graph import NetworkSpec, from_edges, generate_network

from oracles import case_rule_step, mean_field_map


def sv(text):
    return parse_states(text)


def dense(net):
    a = [[0.0] * net.n for _ in range(net.n)]
    for i, j, w in net.edges:
        a[i][j] = a[j][i] = w
    return a


# strategies -------------------------------------------------------------

@st.composite
def instances(draw, max_n=9, weighted=True):
    n = draw(st.integers(1, max_n))
    pairs = [(i, j) for i in range(n) for j in range(i + 1, n)]
    chosen = draw(st.lists(st.sampled_from(pairs), unique=True)) if pairs else []
    if weighted:
        ws = draw(st.lists(st.floats(0.01, 10), min_size=len(chosen), max_size=len(chosen)))
    else:
        ws = [1.0] * len(chosen)
    net = from_edges(n, [(i, j, w) for (i, j), w in zip(chosen, ws)])
    states = StateVector(tuple(draw(st.lists(st.sampled_from([A, B]), min_size=n, max_size=n))))
    return net, states


dyadic = st.integers(0, 64).map(lambda k: k / 64)


# neighborhood_share ------------------------------------------------------

def test_share_half(path3):
    assert neighborhood_share(path3, sv("ABB"), 1, A) == 0.5


def test_share_unanimity():
    net = generate_network(NetworkSpec("erdos_renyi", 12, p=0.5), 4)
    states = sv("A" * 12)
    for i in range(12):
        if net.degree(i):
            assert neighborhood_share(net, states, i, A) == 1.0


def test_share_weighted_star(weighted_star):
    # hand evaluation: 2.5 / (2.5 + 1.0)
    assert neighborhood_share(weighted_star, sv("BAB"), 0, A) == pytest.approx(0.714286, abs=1e-6)
    assert neighborhood_share(weighted_star, sv("BAB"), 0, A) == 2.5 / 3.5


def test_share_isolated_raises():
    with pytest.raises(ValidationError, match="isolated"):
        neighborhood_share(from_edges(3, [(1, 2)]), sv("ABA"), 0, A)


@settings(max_examples=200)
@given(instances())
def test_shares_sum_to_one(inst):
    net, states = inst
    for i in range(net.n):
        if net.degree(i):
            total = neighborhood_share(net, states, i, A) + neighborhood_share(net, states, i, B)
            assert abs(total - 1.0) <= 1e-12


# step_sync ---------------------------------------------------------------

def test_step_sync_path_example(path3):
    out = step_sync(path3, sv("ABB"), DynamicsParams(0.5, 0, 0))
    assert str(out) == "BBB"
    assert out.t == 1


def test_step_sync_does_not_mutate(path3):
    states = sv("ABB")
    step_sync(path3, states, DynamicsParams(0.5))
    assert str(states) == "ABB" and states.t == 0


def test_step_sync_length_mismatch(path3):
    with pytest.raises(ValidationError):
        step_sync(path3, sv("AB"), DynamicsParams(0.5))


@pytest.mark.parametrize("q,ca,cb", [(0.0, 0.0, 0.0), (1.0, 0.0, 0.0), (0.3, 2.0, 0.1)])
def test_complete_all_a_absorbing(q, ca, cb):
    net = generate_network(NetworkSpec("complete", 6), 0)
    assert str(step_sync(net, sv("AAAAAA"), DynamicsParams(q, ca, cb))) == "AAAAAA"


@settings(max_examples=200)
@given(instances())
def test_q_zero_no_b_switches(inst):
    net, states = inst
    out = step_sync(net, states, DynamicsParams(0.0, 0.3, 0.0))
    for before, after in zip(states.states, out.states):
        if before is B:
            assert after is B


@settings(max_examples=300)
@given(instances(), dyadic, dyadic, dyadic)
def test_step_sync_matches_case_rule(inst, q, ca, cb):
    net, states = inst
    expected = case_rule_step(dense(net), [s.value for s in states.states], q, ca, cb)
    got = step_sync(net, states, DynamicsParams(q, ca, cb))
    # weighted sums may differ in the last bit from the dense oracle; skip near-boundary cases
    a = dense(net)
    for i in range(net.n):
        deg = sum(a[i])
        if deg:
            x = sum(a[i][j] for j in range(net.n) if states.states[j] is states.states[i]) / deg
            thr = 1 - q - ca if states.states[i] is A else q - cb
            if abs(x - thr) < 1e-9:
                return
    assert [s.value for s in got.states] == expected


def test_simultaneity_against_reversed_iteration():
    rng = random.Random(11)
    for _ in range(200):
        net = generate_network(NetworkSpec("erdos_renyi", 10, p=0.4), rng.randrange(2**32))
        states = StateVector(tuple(rng.choice([A, B]) for _ in range(10)))
        params = DynamicsParams(rng.randrange(65) / 64, rng.randrange(33) / 64, rng.randrange(33) / 64)
        out = step_sync(net, states, params)
        # recompute from the old vector, visiting agents in reverse order
        for i in reversed(range(10)):
            own = states.states[i]
            if net.degree(i) == 0:
                assert out.states[i] is own
                continue
            x = neighborhood_share(net, states, i, own)
            thr = params.threshold_A if own is A else params.threshold_B
            assert out.states[i] is (own.other if x < thr else own)
        expected = case_rule_step(dense(net), [s.value for s in states.states], params.q, params.c_A, params.c_B)
        assert [s.value for s in out.states] == expected


@settings(max_examples=300)
@given(instances(), dyadic, dyadic, dyadic)
def test_label_swap_symmetry(inst, q, ca, cb):
    net, states = inst
    direct = step_sync(net, states, DynamicsParams(q, ca, cb)).swapped()
    swapped = step_sync(net, states.swapped(), DynamicsParams(1 - q, cb, ca))
    assert direct.states == swapped.states


@settings(max_examples=300)
@given(instances(), dyadic, dyadic, dyadic, st.floats(0, 1))
def test_switching_cost_monotone(inst, q, ca, cb, delta):
    net, states = inst

    def switchers(params, origin):
        out = step_sync(net, states, params)
        return {i for i, (s0, s1) in enumerate(zip(states.states, out.states)) if s0 is origin and s1 is not origin}

    assert switchers(DynamicsParams(q, ca + delta, cb), A) <= switchers(DynamicsParams(q, ca, cb), A)
    assert switchers(DynamicsParams(q, ca, cb + delta), B) <= switchers(DynamicsParams(q, ca, cb), B)


# step_async ---------------------------------------------------------------

def test_step_sequential_fixed_order(path3):
    assert str(step_sequential(path3, sv("ABB"), DynamicsParams(0.5), (2, 1, 0))) == "BBB"


def test_step_sequential_sees_partial_updates(path3):
    # agent 0 switches first, so agent 1 sees a B-share of 0.5 and holds
    params = DynamicsParams(0.5, 0.0, 0.0)
    assert str(step_sequential(path3, sv("ABA"), params, (0, 1, 2))) == "BBB"
    assert str(step_sync(path3, sv("ABA"), params)) == "BAB"


def test_step_async_unanimity_and_isolated():
    rng = np.random.default_rng(0)
    net = generate_network(NetworkSpec("erdos_renyi", 15, p=0.3), 1)
    assert str(step_async(net, sv("A" * 15), DynamicsParams(0.9, 0, 0), rng)) == "A" * 15
    single = from_edges(1, [])
    assert str(step_async(single, sv("B"), DynamicsParams(1.0), rng)) == "B"


def test_step_sequential_rejects_bad_order(path3):
    with pytest.raises(ValidationError):
        step_sequential(path3, sv("ABB"), DynamicsParams(0.5), (0, 0, 1))


# run ------------------------------------------------------------------------

def test_run_all_a_fixed_point():
    net = generate_network(NetworkSpec("complete", 5), 0)
    traj = run(net, sv("AAAAA"), DynamicsParams(0.5), seed=1)
    assert traj.termination is Termination.FIXED_POINT
    assert len(traj.history) == 2
    assert traj.final.t == 1


def test_run_path_example(path3):
    traj = run(path3, sv("ABB"), DynamicsParams(0.5, 0, 0), seed=1)
    assert traj.termination is Termination.FIXED_POINT
    assert str(traj.final) == "BBB"
    assert traj.final.t <= 2
    assert traj.performance_series == [1 / 3, 0.0, 0.0]


def test_run_isolated_coexistence():
    traj = run(from_edges(2, []), sv("AB"), DynamicsParams(0.5), seed=0)
    assert traj.termination is Termination.FIXED_POINT
    assert str(traj.final) == "AB"


def test_run_detects_two_cycle():
    # a single edge with contrarian thresholds flips both agents every step
    net = from_edges(2, [(0, 1)])
    traj = run(net, sv("AB"), DynamicsParams(0.5, 0, 0), seed=0)
    assert traj.termination is Termination.CYCLE
    assert traj.period == 2
    assert traj.history[-1].states == traj.history[-3].states


def test_run_max_steps():
    net = generate_network(NetworkSpec("ring_lattice", 12, k=2), 0)
    # from a single A, the A-region grows by one per side each step; it cannot finish in 2 steps
    traj = run(net, sv("A" + "B" * 11), DynamicsParams(1.0, 0, 0, max_steps=2), seed=0)
    assert traj.termination is Termination.MAX_STEPS
    assert traj.steps == 2


@settings(max_examples=100, deadline=None)
@given(instances(max_n=8), dyadic, dyadic, dyadic, st.sampled_from(list(Schedule)), st.integers(0, 2**64 - 1))
def test_run_trajectory_invariants(inst, q, ca, cb, schedule, seed):
    net, init = inst
    params = DynamicsParams(q, ca, cb, schedule, max_steps=50)
    traj = run(net, init, params, seed)
    again = run(net, init, params, seed)
    assert [h.states for h in traj.history] == [h.states for h in again.history]
    assert [h.t for h in traj.history] == list(range(len(traj.history)))
    assert all(len(h) == net.n for h in traj.history)
    if schedule is Schedule.SYNCHRONOUS:
        for before, after in zip(traj.history, traj.history[1:]):
            assert after.states == step_sync(net, before, params).states
    if traj.termination is Termination.FIXED_POINT:
        assert traj.history[-1].states == traj.history[-2].states
    elif traj.termination is Termination.CYCLE:
        assert traj.period >= 2
        assert traj.history[-1].states == traj.history[-1 - traj.period].states
    if len(set(init.states)) == 1:
        assert all(h.states == init.states for h in traj.history)


@pytest.mark.parametrize("n", [5, 20, 100])
def test_mean_field_matches_map(n):
    rng = random.Random(n)
    net = generate_network(NetworkSpec("complete", n), 0)
    for _ in range(10):
        q, ca, cb = rng.random(), rng.random() * 0.5, rng.random() * 0.5
        k = rng.randrange(n + 1)
        agents = rng.sample(range(n), k)
        init = StateVector(tuple(A if i in agents else B for i in range(n)))
        traj = run(net, init, DynamicsParams(q, ca, cb), seed=0)
        expected = [k]
        for _ in traj.history[1:]:
            expected.append(mean_field_map(expected[-1], n, q, ca, cb))
        assert [h.count(A) for h in traj.history] == expected


# global performance -------------------------------------------------------------

def test_global_performance():
    assert global_performance(sv("AAAA")) == 1.0
    assert global_performance(sv("ABBB")) == 0.25
    assert global_performance(sv("ABBB"), PerformanceMeasure.INDICATOR_B) == 0.75
    with pytest.raises(ValidationError):
        global_performance(StateVector(()))


@given(st.text(alphabet="AB", min_size=1, max_size=30))
def test_global_performance_partition(text):
    s = sv(text)
    assert global_performance(s, PerformanceMeasure.INDICATOR_A) + global_performance(s, PerformanceMeasure.INDICATOR_B) == pytest.approx(1.0, abs=1e-15)


@pytest.mark.parametrize(
    "kwargs",
    [dict(q=-0.1), dict(q=1.1), dict(q=0.5, c_A=-1), dict(q=0.5, c_B=-0.01), dict(q=0.5, max_steps=0),
     dict(q=0.5, isolated_policy="adopt")],
)
def test_params_validation(kwargs):
    with pytest.raises(ValidationError):
        DynamicsParams(**kwargs)


def test_parse_states():
    assert str(parse_states("A\nB\nB\n")) == "ABB"
    with pytest.raises(ValidationError):
        parse_states("ABC")
    with pytest.raises(ValidationError):
        parse_states("")


def test_trajectory_exports(path3):
    traj = run(path3, sv("ABB"), DynamicsParams(0.5), seed=0)
    csv_text = traj.to_csv()
    assert csv_text.splitlines()[0] == "t,agent_id,state"
    assert len(csv_text.splitlines()) == 1 + 3 * len(traj.history)
    assert traj.summary() == {"termination": "fixed_point", "period": None, "steps": 2, "final_C": 0.0, "final_state": "BBB"}
