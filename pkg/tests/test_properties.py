import pytest
from hypothesis import given, settings, strategies as st

import props

seeds = st.integers(min_value=0, max_value=2**40)


@pytest.mark.parametrize("prop", list(props.PROPERTIES.values()), ids=list(props.PROPERTIES))
@settings(max_examples=80, deadline=None)
@given(seed=seeds)
def test_property(prop, seed):
    prop(seed)


@settings(max_examples=300, deadline=None)
@given(seed=seeds)
def test_checker_matches_oracle(seed):
    props.oracle_agreement(seed)


@settings(max_examples=300, deadline=None)
@given(seed=seeds)
def test_checker_matches_oracle_everywhere(seed):
    props.oracle_agreement_everywhere(seed)
