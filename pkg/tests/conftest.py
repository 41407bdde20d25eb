import itertools
import sys

from hypothesis import HealthCheck, settings

from qstrip.geometry import StripGeometry
from qstrip.quantization import Basepoint

settings.register_profile("qstrip", deadline=None, suppress_health_check=[HealthCheck.too_slow])
settings.load_profile("qstrip")


def geometry_matrix(rs=range(3), fs=range(-2, 3)):
    """Symbolic strips over (r, s) and f, with the basepoints defined for each."""
    for r, s, f in itertools.product(rs, rs, fs):
        geom = StripGeometry.generic(r, s, f)
        for bp in (Basepoint.INF, Basepoint.ONE):
            if bp is Basepoint.ONE and f < -1:
                continue
            yield geom, bp


def pytest_terminal_summary(terminalreporter):
    mod = sys.modules.get("test_acceptance")
    lines = getattr(mod, "RESULTS", None)
    if lines:
        terminalreporter.section("acceptance criteria")
        for line in lines:
            terminalreporter.write_line(line)
