import numpy as np
import pytest
import scipy.io
from hypothesis import given, settings
from hypothesis import strategies as st
from hypothesis.extra import numpy as hnp

from dgsolve.errors import ParseError, UnsupportedField
from dgsolve.mmio import format_matrix_market, load_matrix_market, read_matrix_market, write_matrix_market

SYM = """%%MatrixMarket matrix coordinate real symmetric
% a comment
2 2 3
1 1 2
2 1 1
2 2 2
"""


def parse(text):
    return read_matrix_market(text.splitlines(keepends=True))


def test_symmetric_coordinate_expanded():
    np.testing.assert_array_equal(parse(SYM), [[2.0, 1.0], [1.0, 2.0]])


def test_array_vector(tmp_path):
    path = tmp_path / "b.mtx"
    path.write_text("%%MatrixMarket matrix array real general\n2 1\n3\n3\n")
    b = load_matrix_market(path)
    assert b.shape == (2,)
    np.testing.assert_array_equal(b, [3.0, 3.0])
    assert load_matrix_market(path, vector=False).shape == (2, 1)


def test_array_is_column_major():
    m = parse("%%MatrixMarket matrix array real general\n2 3\n1\n2\n3\n4\n5\n6\n")
    np.testing.assert_array_equal(m, [[1.0, 3.0, 5.0], [2.0, 4.0, 6.0]])


def test_symmetric_array_lower_triangle():
    m = parse("%%MatrixMarket matrix array real symmetric\n2 2\n4\n1\n5\n")
    np.testing.assert_array_equal(m, [[4.0, 1.0], [1.0, 5.0]])


def test_integer_field_and_case():
    m = parse("%%MatrixMarket MATRIX Coordinate Integer General\n1 1 1\n1 1 7\n")
    np.testing.assert_array_equal(m, [[7.0]])


@pytest.mark.parametrize("field", ["complex", "pattern"])
def test_unsupported_field(field):
    with pytest.raises(UnsupportedField):
        parse(f"%%MatrixMarket matrix coordinate {field} general\n1 1 1\n1 1 1 0\n")


def test_unsupported_symmetry():
    with pytest.raises(UnsupportedField):
        parse("%%MatrixMarket matrix coordinate real skew-symmetric\n2 2 1\n2 1 1\n")


@pytest.mark.parametrize(
    "text, lineno",
    [
        ("not a header\n", 1),
        ("%%MatrixMarket matrix coordinate real general\n2 2\n", 2),
        ("%%MatrixMarket matrix coordinate real general\n2 2 1\n3 1 1.0\n", 3),
        ("%%MatrixMarket matrix coordinate real general\n2 2 1\n1 1 abc\n", 3),
        ("%%MatrixMarket matrix coordinate real general\n2 2 1\n1 1 1\n2 2 2\n", 4),
        ("%%MatrixMarket matrix coordinate real symmetric\n2 2 1\n1 2 1\n", 3),
        ("%%MatrixMarket matrix array real general\n2 1\n1\n2\n3\n", 5),
        ("%%MatrixMarket matrix coordinate real general\n1 1 1\n\n%c\n1 1 nan\n", 5),
    ],
)
def test_parse_errors_carry_line_numbers(text, lineno):
    with pytest.raises(ParseError) as err:
        parse(text)
    assert err.value.lineno == lineno
    assert f"line {lineno}" in str(err.value)


def test_too_few_entries():
    with pytest.raises(ParseError):
        parse("%%MatrixMarket matrix coordinate real general\n2 2 2\n1 1 1\n")


def test_missing_file(tmp_path):
    with pytest.raises(OSError):
        load_matrix_market(tmp_path / "missing.mtx")


finite = st.floats(allow_nan=False, allow_infinity=False, width=64)


@given(hnp.arrays(np.float64, hnp.array_shapes(min_dims=2, max_dims=2, max_side=6), elements=finite))
@settings(max_examples=100, deadline=None)
def test_matrix_round_trip_bit_exact(m):
    back = parse(format_matrix_market(m))
    assert back.shape == m.shape
    assert np.array_equal(back, m)


@given(hnp.arrays(np.float64, hnp.array_shapes(min_dims=1, max_dims=1, max_side=8), elements=finite))
@settings(max_examples=100, deadline=None)
def test_vector_round_trip_bit_exact(v):
    back = parse(format_matrix_market(v))[:, 0]
    assert np.array_equal(back, v)


def test_symmetric_written_as_lower_triangle(tmp_path):
    a = np.array([[2.0, 1.0 / 3.0], [1.0 / 3.0, 2.0]])
    path = tmp_path / "a.mtx"
    write_matrix_market(path, a)
    text = path.read_text()
    assert text.startswith("%%MatrixMarket matrix coordinate real symmetric")
    assert "1 2 " not in text
    assert np.array_equal(load_matrix_market(path, vector=False), a)


def test_scipy_reads_our_files(tmp_path):
    rng = np.random.default_rng(0)
    m = rng.standard_normal((4, 4))
    s = m + m.T
    for arr, name in ((m, "g.mtx"), (s, "s.mtx"), (rng.standard_normal(5), "v.mtx")):
        path = tmp_path / name
        write_matrix_market(path, arr)
        theirs = scipy.io.mmread(str(path))
        theirs = theirs.toarray() if hasattr(theirs, "toarray") else np.asarray(theirs)
        np.testing.assert_array_equal(theirs.reshape(np.shape(arr) if arr.ndim == 2 else (-1, 1)), arr.reshape(theirs.shape))


def test_we_read_scipy_files(tmp_path):
    rng = np.random.default_rng(1)
    m = rng.standard_normal((3, 4))
    path = tmp_path / "dense.mtx"
    scipy.io.mmwrite(str(path), m, precision=17)
    np.testing.assert_array_equal(load_matrix_market(path, vector=False), m)
