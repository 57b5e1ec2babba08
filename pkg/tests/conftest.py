import pytest

from epencircle.model import SystemParams, cw_exceptional_point, helium_preset


@pytest.fixture(scope="session")
def helium() -> SystemParams:
    return helium_preset()


@pytest.fixture(scope="session")
def helium_real(helium) -> SystemParams:
    """Helium with the small imaginary dipole part dropped (symmetric variant)."""
    return SystemParams(omega_r=helium.omega_r, gamma=helium.gamma,
                        mu=complex(helium.mu.real, 0.0))


@pytest.fixture(scope="session")
def eps0_ep(helium) -> float:
    return cw_exceptional_point(helium)[1]
