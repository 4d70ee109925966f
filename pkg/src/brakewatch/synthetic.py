"""Synthetic fleet telemetry standing in for proprietary turbine data.

Real SCADA feeds are not available here, so this module fabricates a small
fleet: stationary noisy sensor series per turbine, brakepad failure episodes
arriving as a Poisson process over the whole fleet, and a pre-failure drift
on the brake-related channels (caliper temperature climbs, pad thickness
falls). Rows inside the pre-failure window carry label 1.

Everything is driven by one seed through spawned substreams, so a given
parameter set reproduces byte-identical datasets, and raising the failure
rate only shortens the same inter-arrival draws (episode counts grow
monotonically for a fixed seed).
"""

from __future__ import annotations

from dataclasses import dataclass

import numpy as np

from .errors import ConfigError
from .features import (CatalogEntry, FeatureCatalog, OneHotGroup, Rename,
                       TransformSpec)
from .store import Dataset, EntityRow

# Fixed origin for row timestamps: 2024-01-01 00:00:00 UTC.
START_EPOCH = 1704067200
DAY_SECONDS = 86400
# A "month" of fleet operation, for converting the failure rate.
MONTH_DAYS = 30.0
# Peak drift amplitude at the moment of failure, in units of channel noise.
DRIFT_SIGMA = 3.0

MODE_COLUMNS = ("mode_normal", "mode_curtailed", "mode_service")
FIRMWARE_VERSIONS = ("v2.1", "v2.4", "v3.0")

# (base level, noise scale) per known numeric channel.
CHANNEL_LEVELS = {
    "brake_caliper_temp_c": (62.0, 4.0),
    "brake_pad_thickness_mm": (18.0, 0.8),
    "brake_fluid_pressure_bar": (110.0, 6.0),
    "gearbox_oil_temp_c": (55.0, 3.5),
    "generator_winding_temp_c": (70.0, 5.0),
    "vib_axial_mm_s": (2.4, 0.5),
    "vib_radial_mm_s": (3.1, 0.6),
    "rotor_speed_rpm": (14.0, 1.5),
    "ambient_temp_c": (12.0, 2.0),
}
MISSING_FRACTION = 0.02


@dataclass(frozen=True)
class SyntheticParams:
    n_turbines: int = 5
    n_days: int = 30
    readings_per_day: int = 4
    failure_rate_per_month: float = 1.0
    seed: int = 0
    label_window_days: float = 14.0

    def __post_init__(self):
        if self.n_turbines < 1 or self.n_days < 1 or self.readings_per_day < 1:
            raise ConfigError("n_turbines, n_days, and readings_per_day must all be >= 1")
        if self.readings_per_day > DAY_SECONDS:
            raise ConfigError("readings_per_day cannot exceed one per second")
        if not self.failure_rate_per_month > 0:
            raise ConfigError("failure_rate_per_month must be > 0")
        if not self.label_window_days > 0:
            raise ConfigError("label_window_days must be > 0")


@dataclass(frozen=True)
class FailureEpisode:
    turbine_index: int
    time: int  # epoch seconds


def default_catalog() -> FeatureCatalog:
    return FeatureCatalog([
        CatalogEntry("brake_caliper_temp_c", "Brake caliper temperature", "brake", "numeric", "°C"),
        CatalogEntry("brake_pad_thickness_mm", "Brake pad thickness", "brake", "numeric", "mm"),
        CatalogEntry("brake_fluid_pressure_bar", "Brake fluid pressure", "brake", "numeric", "bar"),
        CatalogEntry("gearbox_oil_temp_c", "Gearbox oil temperature", "drivetrain", "numeric", "°C"),
        CatalogEntry("generator_winding_temp_c", "Generator winding temperature", "drivetrain", "numeric", "°C"),
        CatalogEntry("vib_axial_mm_s", "Axial vibration", "vibration", "numeric", "mm/s"),
        CatalogEntry("vib_radial_mm_s", "Radial vibration", "vibration", "numeric", "mm/s"),
        CatalogEntry("rotor_speed_rpm", "Rotor speed", "operation", "numeric", "rpm"),
        CatalogEntry("wind_speed_m_s", "Wind speed", "environment", "numeric", "m/s"),
        CatalogEntry("ambient_temp_c", "Ambient temperature", "environment", "numeric", "°C"),
        CatalogEntry("mode_normal", "Operating mode: normal", "operation", "boolean", None),
        CatalogEntry("mode_curtailed", "Operating mode: curtailed", "operation", "boolean", None),
        CatalogEntry("mode_service", "Operating mode: service", "operation", "boolean", None),
        CatalogEntry("grid_fault_recent", "Recent grid fault", "operation", "boolean", None),
        CatalogEntry("controller_firmware", "Controller firmware", "operation", "categorical", None),
    ])


def default_transforms() -> TransformSpec:
    return TransformSpec((
        OneHotGroup(name="turbine_mode", columns=MODE_COLUMNS),
        Rename(column="vib_axial_mm_s", name="axial_vibration"),
        Rename(column="vib_radial_mm_s", name="radial_vibration"),
    ))


def entity_name(index: int, n_turbines: int) -> str:
    width = max(2, len(str(n_turbines)))
    return f"T{index + 1:0{width}d}"


def draw_failure_episodes(params: SyntheticParams) -> list[FailureEpisode]:
    """Poisson arrivals over the fleet horizon, assigned to turbines.

    Inter-arrival gaps are standard exponentials divided by the daily rate,
    drawn lazily from a dedicated substream: scaling the rate up compresses
    the same gap sequence, so the episode count never drops.
    """
    root = np.random.SeedSequence(params.seed)
    episode_seq = root.spawn(1)[0]
    rng = np.random.default_rng(episode_seq)
    rate_per_day = params.failure_rate_per_month / MONTH_DAYS
    episodes = []
    at = 0.0
    while True:
        at += rng.exponential(1.0) / rate_per_day
        if at >= params.n_days:
            break
        turbine = int(rng.integers(params.n_turbines))
        episodes.append(FailureEpisode(turbine_index=turbine,
                                       time=START_EPOCH + int(round(at * DAY_SECONDS))))
    return episodes


def _channel_level(name: str) -> tuple[float, float]:
    if name in CHANNEL_LEVELS:
        return CHANNEL_LEVELS[name]
    return (0.0, 1.0)


def _drift_direction(name: str) -> float:
    return -1.0 if "thickness" in name else 1.0


def generate_synthetic(params: SyntheticParams, catalog: FeatureCatalog | None = None) -> Dataset:
    if catalog is None:
        catalog = default_catalog()
    episodes = draw_failure_episodes(params)

    root = np.random.SeedSequence(params.seed)
    # child 0 is the episode stream consumed by draw_failure_episodes
    turbine_seqs = root.spawn(1 + params.n_turbines)[1:]

    window_seconds = params.label_window_days * DAY_SECONDS
    spacing = DAY_SECONDS // params.readings_per_day
    times = [START_EPOCH + day * DAY_SECONDS + slot * spacing
             for day in range(params.n_days)
             for slot in range(params.readings_per_day)]
    n_rows = len(times)

    drift_columns = [e.name for e in catalog
                     if e.category == "brake" and e.value_type == "numeric"]

    rows = []
    for t in range(params.n_turbines):
        rng = np.random.default_rng(turbine_seqs[t])
        eid = entity_name(t, params.n_turbines)

        windows = [(ep.time - window_seconds, ep.time)
                   for ep in episodes if ep.turbine_index == t]
        ramp = np.zeros(n_rows)
        labels = np.zeros(n_rows, dtype=int)
        for i, u in enumerate(times):
            for lo, hi in windows:
                if lo <= u < hi:
                    labels[i] = 1
                    ramp[i] = max(ramp[i], (u - lo) / (hi - lo))

        columns: dict[str, list] = {}
        for entry in catalog:
            if entry.value_type == "numeric":
                base, sigma = _channel_level(entry.name)
                offset = rng.normal(0.0, 0.3 * sigma)
                if entry.name == "wind_speed_m_s":
                    series = rng.weibull(2.0, n_rows) * 6.0
                else:
                    series = base + offset + rng.normal(0.0, sigma, n_rows)
                if entry.name == "ambient_temp_c":
                    hours = (np.asarray(times) - START_EPOCH) / 3600.0
                    series = series + 3.0 * np.sin(2 * np.pi * hours / 24.0)
                if entry.name in drift_columns:
                    _, sigma = _channel_level(entry.name)
                    series = series + ramp * DRIFT_SIGMA * sigma * _drift_direction(entry.name)
                gaps = rng.random(n_rows) < MISSING_FRACTION
                columns[entry.name] = [None if gaps[i] else float(series[i]) for i in range(n_rows)]
            elif entry.name in MODE_COLUMNS:
                if MODE_COLUMNS[0] not in columns:
                    picks = rng.choice(3, size=n_rows, p=[0.90, 0.07, 0.03])
                    for m, mode in enumerate(MODE_COLUMNS):
                        columns[mode] = [float(picks[i] == m) for i in range(n_rows)]
            elif entry.value_type == "boolean":
                flips = rng.random(n_rows) < 0.02
                columns[entry.name] = [float(flips[i]) for i in range(n_rows)]
            else:
                version = str(rng.choice(FIRMWARE_VERSIONS))
                columns[entry.name] = [version] * n_rows

        for i, u in enumerate(times):
            values = tuple(columns[entry.name][i] for entry in catalog)
            rows.append(EntityRow(entity_id=eid, row_id=u, values=values, label=int(labels[i])))

    return Dataset(rows, catalog)
