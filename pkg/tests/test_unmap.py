import json

import pytest
from hypothesis import given, strategies as st

from quditc.benchmarks import benchmarks
from quditc.pipeline import TranspileConfig, output_distribution, reference_distribution, to_samples, transpile_qasm
from quditc.qudit import REGIMES, Mapping, QuditParams, default_mapping
from quditc.unmap import MeasureMap, SampleTable, UnmapError, UnmapMode, load_samples, parse_state, unmap

QUTRIT = QuditParams(3, 1)


def samples(entries, d):
    return load_samples(json.dumps(entries), d)


LEAKY = [{"state": "012", "count": 5}, {"state": "010", "count": 7}]


def test_strict_drops_leaked_states():
    out = unmap(samples(LEAKY, 3), default_mapping(3, 1), QUTRIT, MeasureMap.identity(3), UnmapMode.STRICT)
    assert out == {"010": 7}


def test_nonstrict_clamps():
    out = unmap(samples(LEAKY, 3), default_mapping(3, 1), QUTRIT, MeasureMap.identity(3), UnmapMode.NON_STRICT)
    assert out == {"010": 7, "011": 5}


def test_ququart_digit_splits_into_slots():
    out = unmap(samples([{"state": "3", "count": 9}], 4), default_mapping(2, 2), QuditParams(4, 2), MeasureMap.identity(2), UnmapMode.STRICT)
    assert out == {"11": 9}


def test_slot_order_is_lsb_first():
    params = QuditParams(4, 2)
    out = unmap(samples([{"state": "1", "count": 2}, {"state": "2", "count": 3}], 4), default_mapping(2, 2), params, MeasureMap.identity(2), UnmapMode.STRICT)
    assert out == {"01": 2, "10": 3}


def test_list_states_are_indexed_by_qudit():
    assert parse_state([2, 1, 0]) == parse_state("012")


def test_measure_map_routes_bits():
    # qubit 0 -> clbit 1, qubit 2 -> clbit 0, qubit 1 unmeasured
    mm = MeasureMap({0: 1, 2: 0}, 2)
    out = unmap(samples([{"state": "101", "count": 4}, {"state": "011", "count": 1}], 2), default_mapping(3, 1), QuditParams(2, 1), mm, UnmapMode.STRICT)
    assert out == {"11": 4, "10": 1}


def test_empty_samples():
    assert unmap(SampleTable({}), default_mapping(2, 1), QUTRIT, MeasureMap.identity(2), UnmapMode.STRICT) == {}


@pytest.mark.parametrize(
    "entries,d",
    [
        ([{"state": "0a", "count": 1}], 3),
        ([{"state": "03", "count": 1}], 3),
        ([{"state": "01", "count": -1}], 3),
        ([{"state": "01", "count": 1}, {"state": [1, 0], "count": 2}], 3),
        ({"state": "0"}, 3),
    ],
)
def test_bad_samples(entries, d):
    with pytest.raises(UnmapError):
        samples(entries, d)


def test_length_mismatch():
    with pytest.raises(UnmapError, match="3 dits, circuit has 2 qudits"):
        unmap(samples([{"state": "000", "count": 1}], 3), default_mapping(2, 1), QUTRIT, MeasureMap.identity(2), UnmapMode.STRICT)


def test_measure_map_injective():
    with pytest.raises(UnmapError):
        MeasureMap({0: 0, 1: 0}, 1)


@st.composite
def sample_tables(draw):
    d, b = draw(st.sampled_from([(2, 1), (3, 1), (4, 1), (4, 2)]))
    n_qubits = draw(st.integers(1, 5))
    mapping = default_mapping(n_qubits, b)
    m = mapping.n_qudits
    states = draw(st.lists(st.tuples(*[st.integers(0, d - 1)] * m), unique=True, max_size=20))
    counts = {s: draw(st.integers(0, 50)) for s in states}
    return SampleTable(counts), mapping, QuditParams(d, b)


@given(sample_tables())
def test_count_conservation(data):
    table, mapping, params = data
    mm = MeasureMap.identity(mapping.n_qubits)
    loose = unmap(table, mapping, params, mm, UnmapMode.NON_STRICT)
    strict = unmap(table, mapping, params, mm, UnmapMode.STRICT)
    top = params.qubit_levels - 1
    excluded = sum(c for s, c in table.counts.items() if max(s) > top)
    assert sum(loose.values()) == table.total()
    assert sum(strict.values()) == table.total() - excluded
    assert set(k for k, v in strict.items() if v) <= set(loose)
    assert list(loose) == sorted(loose)


@given(sample_tables())
def test_json_round_trip(data):
    table, _, params = data
    assert load_samples(table.to_json(), params.d).counts == table.counts


def total_variation(p, q):
    return 0.5 * sum(abs(p.get(k, 0.0) - q.get(k, 0.0)) for k in set(p) | set(q))


SHOTS = 10**13


@pytest.mark.parametrize("regime", list(REGIMES))
@pytest.mark.parametrize("bm", benchmarks(), ids=lambda b: b.name)
def test_simulated_samples_unmap_to_reference(bm, regime):
    params = REGIMES[regime]
    result = transpile_qasm(bm.qasm, bm.name, TranspileConfig(params=params, mapping=bm.mapping_for(params.b), optimize=True))
    counts = to_samples(output_distribution(result), SHOTS)
    table = SampleTable({parse_state(k): v for k, v in counts.items()})
    out = unmap(table, result.mapping, params, result.measures, UnmapMode.STRICT)
    total = sum(out.values())
    dist = {k: v / total for k, v in out.items()}
    assert total_variation(dist, reference_distribution(result)) < 1e-9


def test_ququart_bell_pair():
    text = 'include "qelib1.inc"; qreg q[2]; h q[0]; cx q[0], q[1];'
    params = QuditParams(4, 2)
    result = transpile_qasm(text, "bell", TranspileConfig(params=params))
    probs = output_distribution(result)
    table = SampleTable({parse_state(k): v for k, v in to_samples(probs, 1000).items()})
    assert unmap(table, result.mapping, params, result.measures, UnmapMode.STRICT) == {"00": 500, "11": 500}
    assert isinstance(result.mapping, Mapping)
