"""Unit helpers shared across the radio modules."""

import scipy.constants

SPEED_OF_LIGHT = scipy.constants.c  # m/s


def db_to_linear(db: float) -> float:
    return 10.0 ** (db / 10.0)


def linear_to_db(x: float) -> float:
    import math

    return 10.0 * math.log10(x)


def dbm_to_watt(dbm: float) -> float:
    return 10.0 ** ((dbm - 30.0) / 10.0)


def watt_to_dbm(w: float) -> float:
    import math

    return 10.0 * math.log10(w) + 30.0
