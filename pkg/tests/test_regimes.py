import json
import math

import pytest
from hypothesis import given, settings
from hypothesis import strategies as st

from deathlab.regimes import (
    Constant,
    InitialPower,
    JointPower,
    RegimeError,
    StatePower,
    Table,
    describe,
    from_json,
    kernel_code,
    min_mortality,
    mortality,
    mortality_vector,
    parse_inline,
    to_json,
)


def test_constant_evaluation():
    assert mortality(Constant(0.3), 5, 10) == 0.3


def test_joint_power_evaluation():
    assert mortality(JointPower(1.0, 4.0), 2, 10) == pytest.approx(2e-4, rel=1e-15)


def test_initial_power_evaluation():
    assert mortality(InitialPower(1.0, 3.0), 7, 10) == pytest.approx(1e-3, rel=1e-15)


def test_state_power_evaluation():
    assert mortality(StatePower(0.5, 2.0), 4, 10) == pytest.approx(0.5 / 16, rel=1e-15)


def test_constant_and_initial_independent_of_current_state():
    for regime in (Constant(0.42), InitialPower(2.0, 1.5)):
        values = {mortality(regime, k, 12) for k in range(1, 13)}
        assert len(values) == 1  # exact equality across k


def test_constant_and_state_independent_of_initial_state():
    for regime in (Constant(0.42), StatePower(0.5, 2.0)):
        values = {mortality(regime, 3, n) for n in range(3, 20)}
        assert len(values) == 1


def test_joint_power_at_top_state():
    regime = JointPower(1.0, 4.0)
    for n in (2, 5, 17):
        assert mortality(regime, n, n) == pytest.approx(float(n) ** (1.0 - 4.0), rel=1e-15)


def test_joint_power_corner_evaluates_to_one():
    # k = n = 1 gives k^a/n^b = 1 for the whole family
    assert mortality(JointPower(1.0, 4.0), 1, 1) == 1.0


@pytest.mark.parametrize(
    "build",
    [
        lambda: Constant(0.0),
        lambda: Constant(1.0),
        lambda: Constant(-0.2),
        lambda: InitialPower(0.0, 1.0),
        lambda: InitialPower(1.0, -1.0),
        lambda: StatePower(-1.0, 2.0),
        lambda: JointPower(2.0, 1.0),  # beta < alpha
        lambda: JointPower(0.0, 1.0),
        lambda: Table({(1, 1): 0.0}),
        lambda: Table({(3, 2): 0.5}),  # k > n
    ],
)
def test_invalid_construction(build):
    with pytest.raises(RegimeError):
        build()


def test_table_allows_certain_death():
    regime = Table({(1, 1): 1.0})
    assert mortality(regime, 1, 1) == 1.0


def test_table_miss_raises():
    with pytest.raises(RegimeError):
        mortality(Table({(1, 1): 0.5}), 1, 2)


def test_out_of_range_states():
    with pytest.raises(RegimeError):
        mortality(Constant(0.5), 0, 5)
    with pytest.raises(RegimeError):
        mortality(Constant(0.5), 6, 5)


def test_power_regime_rejects_value_above_one():
    with pytest.raises(RegimeError):
        mortality(StatePower(2.0, 1.0), 1, 5)  # c_1 = 2


def test_mortality_vector_and_min():
    regime = StatePower(0.5, 1.0)
    vec = mortality_vector(regime, 4)
    assert vec == [0.5, 0.25, 0.5 / 3, 0.125]
    assert min_mortality(regime, 4) == 0.125
    assert min_mortality(Constant(0.3), 9) == 0.3
    assert min_mortality(JointPower(1.0, 4.0), 4) == mortality(JointPower(1.0, 4.0), 1, 4)


def test_kernel_code_roundtrip():
    from deathlab import kernels

    assert kernel_code(Constant(0.3)) == (kernels.CONSTANT, 0.3, 0.0)
    assert kernel_code(JointPower(1.0, 4.0)) == (kernels.JOINT_POWER, 1.0, 4.0)
    with pytest.raises(RegimeError):
        kernel_code(Table({(1, 1): 0.5}))


@pytest.mark.parametrize(
    "regime",
    [
        Constant(0.3),
        InitialPower(1.0, 3.0),
        StatePower(0.1, 2.5),
        JointPower(1.0, 4.0),
        Table({(1, 2): 0.25, (2, 2): 0.75}),
    ],
)
def test_json_roundtrip_is_bit_exact(regime):
    text = to_json(regime)
    assert from_json(text) == regime
    assert to_json(from_json(text)) == text


def test_json_tagged_union_encoding():
    assert json.loads(to_json(Constant(0.3))) == {"type": "constant", "c": 0.3}


@pytest.mark.parametrize(
    "payload,fragment",
    [
        ('{"type": "nope", "c": 0.3}', "type"),
        ('{"type": "constant"}', "missing"),
        ('{"type": "constant", "c": 0.3, "extra": 1}', "extra"),
        ('{"type": "constant", "c": "high"}', "c"),
        ('{"type": "table", "values": [[1, 2]]}', "triple"),
        ("[1, 2]", "object"),
        ("not json", "JSON"),
    ],
)
def test_json_errors_name_the_problem(payload, fragment):
    with pytest.raises(RegimeError) as err:
        from_json(payload)
    assert fragment.lower() in str(err.value).lower()


def test_parse_inline():
    assert parse_inline("constant:0.3") == Constant(0.3)
    assert parse_inline("joint_power:1,4") == JointPower(1.0, 4.0)
    assert parse_inline("initial-power:1,3") == InitialPower(1.0, 3.0)
    with pytest.raises(RegimeError):
        parse_inline("constant:0.3,0.4")
    with pytest.raises(RegimeError):
        parse_inline("mystery:1")


def test_describe_is_short():
    for regime in (Constant(0.3), JointPower(1.0, 4.0), Table({(1, 1): 0.5})):
        assert len(describe(regime)) < 40


@settings(max_examples=60, deadline=None)
@given(c=st.floats(min_value=1e-9, max_value=1.0 - 1e-9, allow_nan=False))
def test_constant_roundtrip_property(c):
    regime = Constant(c)
    assert from_json(to_json(regime)) == regime


@settings(max_examples=60, deadline=None)
@given(
    alpha=st.floats(min_value=0.01, max_value=5, allow_nan=False),
    extra=st.floats(min_value=0.0, max_value=5, allow_nan=False),
    k=st.integers(min_value=1, max_value=50),
    n=st.integers(min_value=1, max_value=50),
)
def test_joint_power_in_unit_interval_property(alpha, extra, k, n):
    regime = JointPower(alpha, alpha + extra)
    if k > n:
        k, n = n, k
    value = mortality(regime, k, n)
    assert 0.0 < value <= 1.0
    assert math.isfinite(value)
