import os

# Qt needs a platform plugin even though nothing is shown
os.environ.setdefault("QT_QPA_PLATFORM", "offscreen")


def pytest_configure(config):
    config.addinivalue_line("markers", "slow: exhaustive and randomized oracle agreement suites")
