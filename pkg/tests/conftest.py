import math

import pytest

from leocov.channel import ChannelParams, LinkBudget
from leocov.scenario import ConstellationSpec, Scenario

# Reference figure-of-merit scenario used throughout the suite: suburban
# S-band uplink, 1000-satellite shell at 500 km, 90 degree beam, 0.04
# devices per km^2 at 1% duty cycle. Noise floor -144 dBW (about kTB for a
# 1 MHz channel) and pure random access (kappa = 1) unless a test says
# otherwise.
REFERENCE_NOISE_DBW = -144.0


def reference_scenario(n_sats=1000, altitude_km=500.0, psi_deg=90.0,
                       density_per_km2=0.04, duty_cycle=0.01, kappa=1.0,
                       noise_dbw=REFERENCE_NOISE_DBW, kind="random_bpp",
                       target_sinr_db=-20.0, **spec_kw) -> Scenario:
    return Scenario(
        constellation=ConstellationSpec(n_sats=n_sats, altitude_km=altitude_km,
                                        kind=kind, **spec_kw),
        channel=ChannelParams(),
        budget=LinkBudget(noise_dbw=noise_dbw, kappa=kappa,
                          target_sinr_db=target_sinr_db),
        user_density_per_km2=density_per_km2,
        duty_cycle=duty_cycle,
        psi_rad=math.radians(psi_deg),
    )


@pytest.fixture
def table1():
    return reference_scenario()
