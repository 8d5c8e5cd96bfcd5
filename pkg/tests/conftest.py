import numpy as np
import pytest

from dyowa.image import normalize
from dyowa.imgio import save_pgm

# 512x512 photographs bundled with scikit-image.  ``moon`` is left out: it is a
# pixel-doubled 256x256 image, so 2x2 block reduction reproduces it exactly.
NATURAL_IMAGES = ("astronaut", "brick", "camera", "grass", "gravel")

_criteria: dict[int, dict] = {}


def _load_natural(name):
    data = pytest.importorskip("skimage.data")
    arr = getattr(data, name)()
    if arr.ndim == 3:
        from skimage.color import rgb2gray

        arr = np.round(rgb2gray(arr) * 255).astype(np.int64)
    return arr


@pytest.fixture(scope="session")
def natural_corpus(tmp_path_factory):
    """Directory of 8-bit 512x512 grayscale PGMs."""
    root = tmp_path_factory.mktemp("natural")
    for name in NATURAL_IMAGES:
        raster = _load_natural(name)
        assert raster.shape == (512, 512)
        save_pgm(normalize(raster, 255), root / f"{name}.pgm")
    return root


@pytest.fixture
def record(request):
    """Attach a measured value to the acceptance summary line."""

    def _record(text):
        request.node.user_properties.append(("detail", text))

    return _record


def pytest_configure(config):
    config.addinivalue_line("markers", "acceptance(number, title): exit criterion")


@pytest.hookimpl(hookwrapper=True)
def pytest_runtest_makereport(item, call):
    outcome = yield
    report = outcome.get_result()
    marker = item.get_closest_marker("acceptance")
    if marker is None or (report.when != "call" and report.passed):
        return
    number, title = marker.args
    entry = _criteria.setdefault(number, {"title": title, "ok": True, "details": []})
    if report.failed or report.skipped:
        entry["ok"] = False
    if report.when == "call":
        entry["details"] += [v for k, v in item.user_properties if k == "detail"]


def pytest_terminal_summary(terminalreporter):
    if not _criteria:
        return
    terminalreporter.section("acceptance criteria")
    for number in sorted(_criteria):
        entry = _criteria[number]
        status = "PASS" if entry["ok"] else "FAIL"
        detail = "; ".join(entry["details"])
        line = f"[{status}] {number:>2}. {entry['title']}"
        terminalreporter.write_line(line + (f" ({detail})" if detail else ""))
