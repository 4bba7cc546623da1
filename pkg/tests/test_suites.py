import pytest

from config import Config
from corpus import WORKED_RUN
from errors import SuiteError
from exhaustibility import Exhaustible, Unknown
from suite_loader import ItemResult, SuiteBase, SuiteContext, SuiteLoader, SuiteReport, describe_item

SUITE_NAMES = [
    "adequacy", "balance", "diagrams", "diamond", "divergence", "exhaust", "goi",
    "length", "lifting", "monotone", "reading", "reversible", "soundness",
]


@pytest.fixture(scope="module")
def loader():
    loader = SuiteLoader("suites")
    loader.load_all()
    return loader


@pytest.fixture
def context():
    return SuiteContext(seed=5, count=10, max_size=6, fuel=2000, lhe_fuel=2000, depth=2,
                        exhaust_fuel=500, kmax=6, workers=2)


class BrokenSuite(SuiteBase):

    @property
    def name(self) -> str:
        return "broken"

    @property
    def version(self) -> str:
        return "0.1.0"

    @property
    def description(self) -> str:
        return "第二项抛出异常"

    def items(self, context):
        return [1, 2, 3]

    def check(self, context, item) -> ItemResult:
        if item == 2:
            raise RuntimeError("坏项")
        result = ItemResult(checked=1)
        if item == 3:
            result.flag(item=item)
        return result


def test_load_all(loader):
    assert sorted(info["name"] for info in loader.list_suites()) == SUITE_NAMES
    assert all(info["version"] == "1.0.0" for info in loader.list_suites())


def test_unknown_suite(loader, context):
    assert loader.get_suite("nope") is None
    with pytest.raises(SuiteError):
        loader.run_suite("nope", context)


@pytest.mark.parametrize("name", SUITE_NAMES)
def test_suite_passes(loader, context, name):
    report = loader.run_suite(name, context)
    assert report.checked > 0
    assert report.ok, report.failures


@pytest.mark.parametrize("verdict,kind", [
    (Unknown(None, "燃料 1 内未完成"), "unknown"),
    (Exhaustible((), truncated=True), "truncated"),
])
def test_exhaust_fails_on_inconclusive_verdicts(loader, monkeypatch, verdict, kind):
    suite = loader.get_suite("exhaust")
    monkeypatch.setitem(type(suite).check.__globals__, "certify", lambda *args: verdict)
    report = suite.run(SuiteContext(terms=[WORKED_RUN], ks=(1,), workers=1, exhaust_fuel=100))
    assert not report.ok
    assert report.failures[0]["kind"] == kind


def test_duplicate_name_replaces_and_unload(tmp_path):
    body = (
        "from suite_loader import ItemResult, SuiteBase\n"
        "\n"
        "class TinySuite(SuiteBase):\n"
        "    name = 'tiny'\n"
        "    version = '{version}'\n"
        "    description = 'tiny'\n"
        "\n"
        "    def check(self, context, item):\n"
        "        return ItemResult(checked=1)\n"
    )
    (tmp_path / "a_suite.py").write_text(body.format(version="0.0.1"), encoding="utf-8")
    (tmp_path / "b_suite.py").write_text(body.format(version="0.0.2"), encoding="utf-8")
    (tmp_path / "_ignored.py").write_text("raise RuntimeError\n", encoding="utf-8")
    loader = SuiteLoader(str(tmp_path))
    loader.load_all()
    assert loader.list_suites() == [{"name": "tiny", "version": "0.0.2", "description": "tiny"}]
    loader.unload_suite("tiny")
    loader.unload_suite("tiny")
    assert loader.list_suites() == []


def test_load_suite_reports_errors(tmp_path):
    bad = tmp_path / "bad_suite.py"
    bad.write_text("import no_such_module_here\n", encoding="utf-8")
    empty = tmp_path / "empty_suite.py"
    empty.write_text("VALUE = 1\n", encoding="utf-8")
    loader = SuiteLoader(str(tmp_path))
    assert not loader.load_suite(str(bad))
    assert not loader.load_suite(str(empty))


def test_missing_directory(tmp_path):
    loader = SuiteLoader(str(tmp_path / "absent"))
    loader.load_all()
    assert loader.list_suites() == []


def test_exception_becomes_failure(context):
    report = BrokenSuite().run(context)
    assert report.checked == 3
    assert report.failure_count == 1
    assert report.flagged_count == 1
    assert report.failures[0]["error"] == "坏项"
    assert not report.ok


def test_report_to_dict():
    report = SuiteReport("demo", 7)
    item = ItemResult(checked=2)
    item.fail(kind="x")
    report.absorb(item)
    assert report.to_dict() == {
        "suite": "demo", "seed": 7, "ok": False, "checked": 2, "failures": 1, "flagged": 0,
        "failure_details": [{"kind": "x"}], "flagged_details": [],
    }


def test_report_caps_details():
    report = SuiteReport("demo", 0)
    item = ItemResult(checked=30)
    for i in range(30):
        item.fail(i=i)
    report.absorb(item)
    assert report.failure_count == 30
    assert len(report.failures) == 20


def test_map_keeps_order(context):
    assert context.map(lambda x: x * x, range(50)) == [x * x for x in range(50)]
    context.workers = 1
    assert context.map(str, [3, 1, 2]) == ["3", "1", "2"]


def test_context_from_config():
    cfg = Config()
    context = SuiteContext.from_config(cfg, seed=99, count=None, unknown=1)
    assert context.seed == 99
    assert context.count == cfg.IAM_CORPUS_SIZE
    assert context.kmax == cfg.IAM_KMAX


def test_corpus_is_cached(context):
    first = context.corpus()
    assert len(first) == 10
    assert context.corpus() is first


def test_describe_item():
    assert describe_item(WORKED_RUN) == r"(\z.\x.x) w (\y.y)"
    assert describe_item(3) == "3"
