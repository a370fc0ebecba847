import json

import pytest

from polgow.groups import make_cyclic
from polgow.verification import ANCHORS, CHECKS, build_pol2, dumps_report, verify_paper


@pytest.fixture(scope="module")
def report():
    return verify_paper(seed=0)


def test_report_schema(report):
    assert [e["name"] for e in report] == list(ANCHORS)
    assert len(report) == len(CHECKS) == 12
    for e in report:
        assert set(e) == {"name", "paper_anchor", "status", "measured", "tolerance"}
        assert e["status"] in ("pass", "fail")
        assert e["paper_anchor"] == ANCHORS[e["name"]]


def test_report_is_byte_deterministic(report):
    assert dumps_report(report) == dumps_report(verify_paper(seed=0))
    json.loads(dumps_report(report))


def test_known_failures_only(report):
    failed = {e["name"] for e in report if e["status"] == "fail"}
    assert failed == {"pol2_structure", "appendix_suite"}


def test_tamper_names_the_cocycle_identity():
    with pytest.raises(ValueError, match="2-cocycle"):
        build_pol2(make_cyclic(3), tamper=True)
    bad = [e for e in verify_paper(seed=0, tamper=True) if e["status"] == "fail"]
    assert any("2-cocycle" in str(e["measured"]) for e in bad)
