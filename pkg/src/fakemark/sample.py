"""Deterministic synthetic traffic-violation table used as the default carrier."""

from __future__ import annotations

import numpy as np

from .store import Schema, Table

KEY_COLUMN = "id"
COLUMNS = (
    KEY_COLUMN,
    "date",
    "time",
    "description",
    "location",
    "latitude",
    "longitude",
    "vehicle",
    "state",
)
_DESCRIPTIONS = (
    "EXCEEDING THE POSTED SPEED LIMIT",
    "FAILURE TO STOP AT STOP SIGN",
    "DRIVING WITHOUT LICENSE",
    "FAILURE TO DISPLAY REGISTRATION CARD",
    "DRIVER USING HANDS TO USE HANDHELD TELEPHONE",
    "PERSON DRIVING MOTOR VEHICLE ON HIGHWAY WITHOUT REQUIRED LICENSE",
    "FAILURE OF INDIVIDUAL DRIVING ON HIGHWAY TO DISPLAY LICENSE",
    "DRIVING VEHICLE IN EXCESS OF REASONABLE AND PRUDENT SPEED",
    "FAILURE TO OBEY PROPERLY PLACED TRAFFIC CONTROL DEVICE",
    "DISPLAYING EXPIRED REGISTRATION PLATE",
    "HEADLIGHTS INOPERATIVE",
    "FAILURE TO YIELD RIGHT OF WAY",
)
_ROADS = (
    "GEORGIA AVE", "ROCKVILLE PIKE", "CONNECTICUT AVE", "UNIVERSITY BLVD", "RANDOLPH RD",
    "VEIRS MILL RD", "COLESVILLE RD", "NEW HAMPSHIRE AVE", "OLD GEORGETOWN RD", "RIVER RD",
    "SHADY GROVE RD", "FREDERICK RD", "CLOPPER RD", "DARNESTOWN RD", "WISCONSIN AVE",
)
_CROSS = ("@", "AT", "/", "NEAR")
_VEHICLES = ("02 - AUTOMOBILE", "28 - OTHER", "05 - LIGHT DUTY TRUCK", "06 - HEAVY DUTY TRUCK", "01 - MOTORCYCLE")
_VEHICLE_P = (0.78, 0.06, 0.11, 0.03, 0.02)
_STATES = ("MD", "VA", "DC", "PA", "FL", "NY", "WV")
_STATE_P = (0.82, 0.07, 0.04, 0.02, 0.02, 0.02, 0.01)


def sample_table(n: int = 10_000, seed: int = 0) -> Table:
    """``n`` plausible traffic-violation rows with a synthetic primary key ``id``."""
    rng = np.random.default_rng(seed)
    days = rng.integers(0, 365 * 3, size=n)
    minutes = rng.integers(0, 24 * 60, size=n)
    desc = rng.integers(0, len(_DESCRIPTIONS), size=n)
    road_a = rng.integers(0, len(_ROADS), size=n)
    road_b = rng.integers(0, len(_ROADS), size=n)
    cross = rng.integers(0, len(_CROSS), size=n)
    lat = 39.0 + rng.normal(0.08, 0.07, size=n)
    lon = -77.1 + rng.normal(0.0, 0.09, size=n)
    vehicle = rng.choice(len(_VEHICLES), size=n, p=_VEHICLE_P)
    state = rng.choice(len(_STATES), size=n, p=_STATE_P)
    start = np.datetime64("2021-01-01")
    rows = []
    for i in range(n):
        rows.append(
            (
                str(100000 + i),
                str(start + int(days[i])),
                f"{minutes[i] // 60:02d}:{minutes[i] % 60:02d}:00",
                _DESCRIPTIONS[desc[i]],
                f"{_ROADS[road_a[i]]} {_CROSS[cross[i]]} {_ROADS[road_b[i]]}",
                f"{lat[i]:.7f}",
                f"{lon[i]:.7f}",
                _VEHICLES[vehicle[i]],
                _STATES[state[i]],
            )
        )
    return Table(Schema(COLUMNS), tuple(rows))
