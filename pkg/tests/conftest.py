import pytest

from ovprobe.synth import SynthConfig, generate_synthetic

SMALL = SynthConfig(n_base=3, n_novel=2, train_images=30, test_images=15,
                    objects_per_image=2, d_cls=24, d_emb=12)


@pytest.fixture(scope="session")
def small_ds():
    return generate_synthetic(SMALL, seed=7)


@pytest.fixture(scope="session")
def default_ds():
    return generate_synthetic(SynthConfig(), seed=0)


@pytest.fixture(scope="session")
def default_run(default_ds):
    from ovprobe.config import PipelineConfig
    from ovprobe.pipeline import run_all

    return run_all(default_ds, PipelineConfig())


_CRITERIA = []


def pytest_configure(config):
    config.addinivalue_line("markers", "criterion(number, text): acceptance criterion checked by this test")


@pytest.hookimpl(wrapper=True)
def pytest_runtest_makereport(item, call):
    report = yield
    mark = item.get_closest_marker("criterion")
    if mark is not None and (report.when == "call" or (report.when == "setup" and report.failed)):
        _CRITERIA.append((mark.args[0], mark.args[1], report.outcome, report.duration))
    return report


def pytest_terminal_summary(terminalreporter):
    if not _CRITERIA:
        return
    terminalreporter.section("acceptance criteria")
    for number, text, outcome, duration in sorted(_CRITERIA):
        status = "PASS" if outcome == "passed" else "FAIL"
        terminalreporter.write_line(f"criterion {number}: {status}  {text}  ({duration:.2f} s)")
