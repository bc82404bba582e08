"""Regenerate the synthetic example inputs in this directory.

Weather: 24 h at a 10 s cadence with a diurnal temperature cycle, clear-sky
solar with passing cloud, and gusty low wind. Tracer: two decay records and
their measurement context. Everything is seeded, so reruns are identical.
"""

import math
import random
from datetime import datetime, timedelta, timezone
from pathlib import Path

HERE = Path(__file__).resolve().parent
START = datetime(2019, 4, 15, tzinfo=timezone.utc)


def iso(t):
    return (START + timedelta(seconds=t)).strftime("%Y-%m-%dT%H:%M:%S")


def weather(rng):
    rows = ["timestamp,temp_c,wind_speed_ms,wind_dir_deg,solar_wm2"]
    cloud = 1.0
    gust = 0.0
    direction = 180.0
    for k in range(24 * 360):
        t = 10.0 * k
        hour = t / 3600.0
        temp = 30.0 + 4.0 * math.sin(2.0 * math.pi * (hour - 9.0) / 24.0) + rng.gauss(0.0, 0.15)
        cloud = min(1.0, max(0.4, cloud + rng.gauss(0.0, 0.02)))
        clear = max(0.0, 900.0 * math.sin(math.pi * (hour - 6.0) / 12.0))
        solar = clear * cloud
        gust = 0.98 * gust + rng.gauss(0.0, 0.12)
        base = 1.6 + 0.8 * math.sin(2.0 * math.pi * (hour - 14.0) / 24.0)
        wind = max(0.0, base + gust)
        direction = (direction + rng.gauss(0.0, 3.0)) % 360.0
        rows.append(f"{iso(t)},{temp:.3f},{wind:.3f},{direction:.1f},{solar:.1f}")
    # One sensor dropout, kept to exercise row rejection.
    rows[1000] = rows[1000].rsplit(",", 1)[0] + ","
    return "\n".join(rows) + "\n"


def decay(rng, t0, ach, n=1200):
    """1 Hz record: 30 s of rising mixing then exponential decay with noise."""
    rows = ["timestamp,concentration"]
    lam = ach / 3600.0
    for k in range(n):
        if k < 30:
            c = 400.0 + 20.0 * k
        else:
            c = 1000.0 * math.exp(-lam * (k - 30))
        c *= 1.0 + rng.gauss(0.0, 0.002)
        rows.append(f"{iso(t0 + k)},{c:.4f}")
    return "\n".join(rows) + "\n"


def main():
    rng = random.Random(20190415)
    (HERE / "example_weather.csv").write_text(weather(rng))
    day = 13 * 3600
    night = 22 * 3600
    (HERE / "decay_day.csv").write_text(decay(rng, day, 6.0))
    (HERE / "decay_night.csv").write_text(decay(rng, night, 11.0))
    ctx = [
        "start,end,u_wind_ms,t_in_c,t_out_c,config_name",
        f"{iso(day + 120)},{iso(day + 600)},1.4,32.1,33.6,window_roof_vent",
        f"{iso(night + 120)},{iso(night + 600)},1.1,29.4,27.2,skylight_window",
    ]
    (HERE / "tracer_context.csv").write_text("\n".join(ctx) + "\n")


if __name__ == "__main__":
    main()
