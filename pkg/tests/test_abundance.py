import io

import pytest

from gibbs_partitions.abundance import AbundanceError, parse_abundance


@pytest.mark.parametrize(
    "text,mult",
    [
        ("a,3\nb,1\n", (3, 1)),
        ("species,count\na,3\nb,1\n", (3, 1)),
        ("2\n2\n1\n", (2, 2, 1)),
        ("\n5\n\n1\n", (5, 1)),
    ],
)
def test_parse(text, mult):
    s = parse_abundance(io.StringIO(text))
    assert s.multiplicities == mult
    assert s.n == sum(mult) and s.j == len(mult)


@pytest.mark.parametrize(
    "text,line",
    [
        ("a,0\n", 1),
        ("species,count\na,2\nb,-1\n", 3),
        ("a,2\nb,1\na,4\n", 3),
        ("3\nx\n", 2),
        ("a,1\nb,2,3\n", 2),
    ],
)
def test_errors_report_line(text, line):
    with pytest.raises(AbundanceError) as info:
        parse_abundance(io.StringIO(text))
    assert info.value.line == line
    assert f"line {line}" in str(info.value)


def test_empty():
    with pytest.raises(AbundanceError):
        parse_abundance(io.StringIO("species,count\n"))


def test_path(tmp_path):
    p = tmp_path / "ab.csv"
    p.write_text("species,count\nfoo,4\nbar,2\n", encoding="utf-8")
    assert parse_abundance(p).multiplicities == (4, 2)
