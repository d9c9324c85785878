import pytest
from hypothesis import given, settings
from hypothesis import strategies as st

from ringlab.ringspec import GF, Mat, Prod, SpecError, ZMod, parse_ring_spec


def test_examples():
    assert parse_ring_spec("mat(2, gf(2))") == Mat(2, GF(2))
    assert parse_ring_spec("prod(zmod(2), zmod(3))") == Prod((ZMod(2), ZMod(3)))


def test_case_and_whitespace_insensitive():
    assert parse_ring_spec("  MAT ( 2 ,GF(2) ) ") == Mat(2, GF(2))


@pytest.mark.parametrize("text, pos", [("gf(6)", 3), ("zmod(4", None), ("foo(2)", 0), ("prod()", None)])
def test_errors(text, pos):
    with pytest.raises(SpecError) as e:
        parse_ring_spec(text)
    if pos is not None:
        assert e.value.pos == pos


def test_gf_message():
    with pytest.raises(SpecError, match="6 is not a prime power"):
        parse_ring_spec("gf(6)")


def test_trailing_garbage():
    with pytest.raises(SpecError):
        parse_ring_spec("zmod(4) x")


base = st.one_of(
    st.integers(2, 12).map(lambda n: f"zmod({n})"),
    st.sampled_from([2, 3, 4, 5, 7, 8, 9, 11, 13, 16]).map(lambda q: f"gf({q})"),
)


def _extend(children):
    return st.one_of(
        st.tuples(st.integers(1, 3), children).map(lambda t: f"mat({t[0]},{t[1]})"),
        st.tuples(st.integers(1, 3), children).map(lambda t: f"ut({t[0]},{t[1]})"),
        children.map(lambda c: f"nil({c})"),
        st.lists(children, min_size=1, max_size=3).map(lambda cs: "prod(" + ", ".join(cs) + ")"),
    )


@settings(max_examples=200)
@given(st.recursive(base, _extend, max_leaves=5))
def test_print_parse_round_trip(text):
    ast = parse_ring_spec(text)
    assert parse_ring_spec(str(ast)) == ast
