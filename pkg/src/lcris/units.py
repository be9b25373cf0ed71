"""dB/linear conversions and physical constants."""

import numpy as np

SPEED_OF_LIGHT = 299792458.0  # m/s


def db_to_linear(db):
    return 10.0 ** (np.asarray(db, dtype=float) / 10.0)


def linear_to_db(x):
    return 10.0 * np.log10(x)


def dbm_to_watts(dbm):
    return 10.0 ** ((np.asarray(dbm, dtype=float) - 30.0) / 10.0)


def watts_to_dbm(w):
    return 10.0 * np.log10(w) + 30.0


def noise_power_watts(bandwidth_hz, noise_psd_dbm_hz, noise_figure_db):
    """Thermal noise power sigma^2 = W * N0 * Nf in watts."""
    dbm = noise_psd_dbm_hz + 10.0 * np.log10(bandwidth_hz) + noise_figure_db
    return float(dbm_to_watts(dbm))
