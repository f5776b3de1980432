"""Suite-wide options.

`--kernel-backend {auto,compiled,pure}` pins the kernel backend for the
whole run; the default exercises whatever the import selected (compiled
when the extension built).  Run the suite once per backend to check parity.
"""

import pytest

from freespec import _kernels


def pytest_addoption(parser):
    parser.addoption(
        "--kernel-backend",
        choices=("auto", "compiled", "pure"),
        default="auto",
        help="pin the freespec kernel backend for this run",
    )


def pytest_configure(config):
    choice = config.getoption("--kernel-backend")
    if choice != "auto":
        _kernels.set_backend(choice)


def pytest_report_header(config):
    return f"freespec kernel backend: {_kernels.backend_name()}"
