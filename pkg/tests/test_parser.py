import random

import pytest

from superdiff import parser as fmt
from superdiff.errors import DimensionError, ParseError
from superdiff.sampling import (
    random_derivation,
    random_grassmann,
    random_grassmann_morphism,
    random_point,
    random_superfunction,
)


def roundtrip_sf(text):
    return fmt.format_superfunction(fmt.parse_superfunction(text))


def test_tokenizer_offsets():
    tokens = fmt.tokenize("x1 + th[2]*t[1]")
    kinds = [(t.kind, t.offset) for t in tokens]
    assert kinds[0] == ("xvar", 0)
    assert kinds[1] == ("+", 3)
    assert kinds[2] == ("th", 5)
    assert tokens[-1].kind == "end"


def test_expression_basics():
    f = fmt.parse_superfunction("3/2*x1^2 - x2 + 1")
    assert fmt.format_superfunction(f) == "1 - x2 + 3/2*x1^2"
    g = fmt.parse_superfunction("th[1,2]*t[2] - th[1]")
    assert fmt.format_superfunction(g) == "-th[1] + th[1,2]*t[2]"
    assert fmt.parse_superfunction("0").is_zero()


def test_sugar_forms_agree():
    assert fmt.parse_superfunction("th1", n=2) == fmt.parse_superfunction(
        "th[1]", n=2
    )
    assert fmt.parse_superfunction("t2", p=3) == fmt.parse_superfunction(
        "t[2]", p=3
    )


def test_parenthesized_products():
    f = fmt.parse_superfunction("(x1 + x2)*(x1 - x2)")
    g = fmt.parse_superfunction("x1^2 - x2^2")
    assert f == g


def test_derivation_parsing():
    d = fmt.parse_derivation("(x1 + th[1,2])*d/dx1 - 2*d/dth1")
    assert d.m == 1 and d.n == 2
    assert fmt.parse_derivation("0").is_zero()
    with pytest.raises(ParseError):
        fmt.parse_derivation("x1 + 2")  # nonzero function is not an operator


def test_operator_position_errors():
    with pytest.raises(ParseError):
        fmt.parse_expression_text("d/dx1*x1")  # operator must end the product
    with pytest.raises(ParseError):
        fmt.parse_expression_text("d/dx1^2")
    with pytest.raises(ParseError):
        fmt.parse_expression_text("x1 + d/dx1")


def test_diagnostics_carry_offset_and_expectations():
    try:
        fmt.parse_superfunction("x1 + ")
    except ParseError as exc:
        assert exc.offset == 5
        assert "(" in exc.expected
    else:
        raise AssertionError("should not parse")
    try:
        fmt.parse_superfunction("th[2,1]")
    except ParseError as exc:
        assert "increasing" in str(exc)
    else:
        raise AssertionError("should not parse")


def test_dimension_bounds_enforced():
    with pytest.raises(DimensionError):
        fmt.parse_superfunction("x3", m=2)
    with pytest.raises(DimensionError):
        fmt.parse_superfunction("th[3]", n=1)


def test_morphism_parsing_and_checks():
    phi = fmt.parse_morphism("x1 -> x1 + th[1]*t[1]\nth1 -> th1")
    assert (phi.m, phi.n, phi.p) == (1, 1, 1)
    with pytest.raises(ParseError):
        fmt.parse_morphism("x1 -> x1\nx1 -> x2\nth1 -> th1")  # duplicate
    with pytest.raises(ParseError):
        fmt.parse_morphism("x2 -> x2\nth1 -> th1")  # missing x1
    with pytest.raises(ParseError):
        fmt.parse_morphism("x1 -> x1\nt[1] -> t[1]")  # mixed kinds


def test_morphism_rank_header():
    phi = fmt.parse_morphism("p: 2\nx1 -> x1\nth1 -> th1")
    assert phi.p == 2
    text = fmt.format_morphism(phi)
    assert text.splitlines()[0] == "p: 2"
    again = fmt.parse_morphism(text)
    assert again.p == 2


def test_inverse_block_becomes_hint():
    phi = fmt.parse_morphism(
        "x1 -> 2*x1\nth1 -> th1\ninverse:\nx1 -> 1/2*x1\nth1 -> th1"
    )
    assert phi.inverse_hint is not None
    assert phi.inverse_hint.images_x[0] == fmt.parse_superfunction(
        "1/2*x1", m=1, n=1
    )


def test_grassmann_morphism_parsing():
    gm = fmt.parse_morphism("t[1] -> t[2] + t[1,2,3]\nt[2] -> t[1]")
    assert gm.source_n == 2 and gm.target_n == 3
    text = fmt.format_grassmann_morphism(gm)
    again = fmt.parse_morphism(text)
    assert fmt.format_grassmann_morphism(again) == text
    wide = fmt.parse_morphism("target: 4\nt[1] -> t[1]")
    assert wide.target_n == 4


def test_factored_form_round_trip():
    text = "\n".join(
        [
            "p: 2",
            "phi0: {",
            "x1 -> 1 + x1",
            "th1 -> th[1]",
            "}",
            "X[1]: th[1]*d/dx1",
            "X[1,2]: d/dth1",
        ]
    )
    body, fields, p = fmt.parse_factored(text)
    assert p == 2 and set(fields) == {(1,), (1, 2)}
    out = fmt.format_factored(body, fields, p)
    assert fmt.format_factored(*fmt.parse_factored(out)) == out


def test_factored_rejects_external_in_components():
    text = "p: 1\nphi0: {\nx1 -> x1\n}\nX[1]: t[1]*d/dx1"
    with pytest.raises(ParseError):
        fmt.parse_factored(text)


def test_parse_any_detection():
    assert fmt.parse_any("x1 + 1")[0] == "superfunction"
    assert fmt.parse_any("d/dx1")[0] == "derivation"
    assert fmt.parse_any("x1 -> x1")[0] == "morphism"
    assert fmt.parse_any("t[1] -> t[1]")[0] == "grassmann_morphism"
    assert fmt.parse_any("phi0: {\nx1 -> x1\n}")[0] == "factored"


def test_grassmann_element_round_trip():
    rng = random.Random(90)
    for _ in range(100):
        a = random_grassmann(rng, 4)
        text = fmt.format_grassmann(a)
        assert fmt.parse_grassmann(text, n=4) == a
        assert fmt.format_grassmann(fmt.parse_grassmann(text)) == text


def test_superfunction_fixpoint_fuzzed():
    rng = random.Random(91)
    for _ in range(300):
        f = random_superfunction(rng, 2, 2, 2, degree=2, terms=4)
        text = fmt.format_superfunction(f)
        g = fmt.parse_superfunction(text)
        assert fmt.format_superfunction(g) == text
        # parsing the canonical text recovers the terms up to dimensions
        assert g.embed(2, 2, 2) == f


def test_derivation_fixpoint_fuzzed():
    rng = random.Random(92)
    for _ in range(200):
        d = random_derivation(rng, 2, 2, 2, degree=1)
        text = fmt.format_derivation(d)
        assert fmt.format_derivation(fmt.parse_derivation(text)) == text


def test_morphism_fixpoint_fuzzed():
    rng = random.Random(93)
    for _ in range(15):
        point = random_point(rng, 2, 2, 2, degree=1)
        from superdiff.cli import _point_morphism

        phi = _point_morphism(point)
        text = fmt.format_morphism(phi)
        assert fmt.format_morphism(fmt.parse_morphism(text)) == text


def test_format_fraction_forms():
    f = fmt.parse_superfunction("-1/2 + x1 - 3*x2")
    assert fmt.format_superfunction(f) == "-1/2 + x1 - 3*x2"
    g = fmt.parse_superfunction("-th[1]")
    assert fmt.format_superfunction(g) == "-th[1]"


def test_whitespace_and_newline_handling():
    f = fmt.parse_superfunction("  x1   +\t2 ")
    assert fmt.format_superfunction(f) == "2 + x1"
    phi = fmt.parse_morphism("x1 -> x1;; th1 -> th1")
    assert phi.n == 1
