import numpy as np
import pytest

from brute import brute_feasible, brute_max_flow_by_enumeration, brute_min_cut, check_flow, random_network
from divclust.diversity import f_test
from divclust.errors import DivClustError
from divclust.flow import FlowNetwork, feasible_flow_with_lower_bounds, max_flow
from divclust.instance import threshold_graph


def _net(n, arcs):
    net = FlowNetwork(n)
    for arc in arcs:
        net.add_arc(*arc)
    return net


def test_single_path():
    net = _net(3, [(0, 1, 0, 1), (1, 2, 0, 1)])
    assert max_flow(net, 0, 2).value == 1


def test_diamond():
    s, a, b, t = range(4)
    net = _net(4, [(s, a, 0, 2), (s, b, 0, 2), (a, t, 0, 1), (b, t, 0, 1)])
    flow = max_flow(net, s, t)
    assert flow.value == 2 == brute_max_flow_by_enumeration(net, s, t)
    check_flow(net, flow, s, t, 2)


def test_no_path():
    assert max_flow(_net(3, [(0, 1, 0, 5)]), 0, 2).value == 0


def test_unbounded_arcs():
    net = _net(3, [(0, 1), (1, 2, 0, 4)])
    assert max_flow(net, 0, 2).value == 4
    assert net.unbounded_sentinel(2) == 4 + 2 + 1


def test_max_flow_errors():
    with pytest.raises(ValueError):
        max_flow(_net(2, [(0, 1, 0, 1)]), 0, 0)
    with pytest.raises(ValueError):
        max_flow(_net(2, [(0, 1, 1, 1)]), 0, 1)
    with pytest.raises(DivClustError):
        _net(2, [(0, 5, 0, 1)])
    with pytest.raises(DivClustError):
        _net(2, [(0, 1, 3, 1)])


def test_circulation_forced_by_lower_bound():
    u, v = 0, 1
    net = _net(2, [(u, v, 1, 2), (v, u, 0, 3)])
    flow = feasible_flow_with_lower_bounds(net)
    assert flow is not None and flow.values == (1, 1)


def test_circulation_infeasible():
    assert feasible_flow_with_lower_bounds(_net(2, [(0, 1, 2, 3), (1, 0, 0, 1)])) is None


def test_demand_and_arguments():
    net = _net(3, [(0, 1, 0, 2), (1, 2, 1, 2)])
    assert feasible_flow_with_lower_bounds(net, 0, 2, demand=0) is None
    flow = feasible_flow_with_lower_bounds(net, 0, 2, demand=2)
    check_flow(net, flow, 0, 2, 2)
    assert feasible_flow_with_lower_bounds(net, 0, 2, demand=3) is None
    with pytest.raises(ValueError):
        feasible_flow_with_lower_bounds(net, 0, None)
    with pytest.raises(ValueError):
        feasible_flow_with_lower_bounds(net, 0, 2, demand=-1)


def test_f_test_network_fix1(fix1):
    g = threshold_graph(fix1, 1)
    semi = f_test(g, {0, 2}, 2)
    assert semi is not None
    assert semi.stars() == {0: (0, 1), 2: (2, 3)}


@pytest.mark.parametrize("seed", range(150))
def test_feasibility_matches_enumeration(seed):
    rng = np.random.default_rng(seed)
    net = random_network(rng)
    if rng.random() < 0.3:
        flow = feasible_flow_with_lower_bounds(net)
        assert (flow is not None) == brute_feasible(net)
        if flow is not None:
            check_flow(net, flow)
        return
    s, t = (int(x) for x in rng.choice(net.n_nodes, 2, replace=False))
    demand = int(rng.integers(0, 5))
    flow = feasible_flow_with_lower_bounds(net, s, t, demand)
    assert (flow is not None) == brute_feasible(net, s, t, demand)
    if flow is not None:
        check_flow(net, flow, s, t, demand)


@pytest.mark.parametrize("seed", range(150))
def test_max_flow_matches_min_cut(seed):
    rng = np.random.default_rng(10_000 + seed)
    net = random_network(rng, lower_prob=0.0)
    s, t = (int(x) for x in rng.choice(net.n_nodes, 2, replace=False))
    flow = max_flow(net, s, t)
    assert flow.value == brute_min_cut(net, s, t) == brute_max_flow_by_enumeration(net, s, t)
    check_flow(net, flow, s, t, flow.value)
