import pytest

import zernkit as zk


def radial_sweep(n_max):
    """All (n, m >= 0) modes with n <= n_max, the radial accuracy-study set."""
    return tuple(
        zk.Mode(n, m) for n in range(n_max + 1) for m in range(n % 2, n + 1, 2)
    )


@pytest.fixture(scope="session")
def grid100():
    return zk.linear_radial_grid(100)


@pytest.fixture(scope="session")
def rational100():
    return zk.rational_radial_grid(100)
