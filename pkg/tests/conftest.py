import os

import pytest
from hypothesis import settings

from dsetp.treebank import parse_tree

os.environ.setdefault("OMP_NUM_THREADS", "1")

settings.register_profile("dsetp", deadline=None)
settings.load_profile("dsetp")

REF_LINE = ("(SBARQ (RB 0=So) (SQ (VP (VP (WHNP (WP 1=what)) (VB 6=do)) (TO 5=to)) "
        "(VBZ 2='s) (NP (DT 3=a) (NN 4=parent))) (. 7=?))")

REF_DERIVATION = ("SHIFT NOLABEL SHIFT LABEL-WHNP SHIFT NOLABEL SHIFT NOLABEL SHIFT NOLABEL "
          "COMB-3 LABEL-NP COMB-2 NOLABEL SHIFT NOLABEL SHIFT NOLABEL COMB-1 LABEL-VP "
          "COMB-5 LABEL-VP COMB-2 LABEL-SQ COMB-0 NOLABEL SHIFT NOLABEL COMB-0 LABEL-SBARQ")


@pytest.fixture
def ref_tree():
    return parse_tree(REF_LINE)


# -- acceptance report -------------------------------------------------------

_RESULTS = {}


def pytest_configure(config):
    config.addinivalue_line("markers", "criterion(number, title): acceptance criterion")


def pytest_runtest_makereport(item, call):
    marker = item.get_closest_marker("criterion")
    if marker is None:
        return
    number, title = marker.args
    if call.when == "setup" and call.excinfo is not None:
        _RESULTS[number] = (title, "ERROR", str(call.excinfo.value).splitlines()[0][:100])
    if call.when != "call":
        return
    notes = [v for k, v in item.user_properties if k == "detail"]
    if call.excinfo is None:
        status, detail = "PASS", "; ".join(notes)
    elif call.excinfo.errisinstance(pytest.xfail.Exception):
        status, detail = "FAIL (non-blocking)", str(call.excinfo.value)[:120]
    elif call.excinfo.errisinstance(pytest.skip.Exception):
        status, detail = "SKIP", str(call.excinfo.value)[:120]
    else:
        status, detail = "FAIL", (str(call.excinfo.value).splitlines() or [""])[0][:120]
    _RESULTS[number] = (title, status, detail)


def pytest_terminal_summary(terminalreporter):
    if not _RESULTS:
        return
    terminalreporter.section("acceptance criteria")
    for number in sorted(_RESULTS):
        title, status, detail = _RESULTS[number]
        line = "criterion %2d  %-4s  %s" % (number, status, title)
        if detail:
            line += "  [%s]" % detail
        terminalreporter.write_line(line)
