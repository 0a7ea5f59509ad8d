#!/usr/bin/env python3
"""Writes the scenario fixtures (GeoJSON, mapping, error model, config).

Geometry is authored in meters east/north of each scenario origin and
converted with the same equirectangular projection the library uses, so
cell-level expectations in the manifests can be reasoned about in meters.
Rules and manifests are hand-written files next to the generated ones.
"""

import json
import math
import os

R_EARTH = 6371000.0
HERE = os.path.dirname(os.path.abspath(__file__))


def to_lonlat(origin, x, y):
    lat0, lon0 = origin
    lat = lat0 + math.degrees(y / R_EARTH)
    lon = lon0 + math.degrees(x / (R_EARTH * math.cos(math.radians(lat0))))
    return [round(lon, 9), round(lat, 9)]


def feature(origin, kind, coords, props):
    if kind == "Point":
        geometry = {"type": "Point", "coordinates": to_lonlat(origin, *coords)}
    elif kind == "LineString":
        geometry = {"type": "LineString", "coordinates": [to_lonlat(origin, *p) for p in coords]}
    else:
        ring = [to_lonlat(origin, *p) for p in coords]
        ring.append(ring[0])
        geometry = {"type": "Polygon", "coordinates": [ring]}
    return {"type": "Feature", "properties": props, "geometry": geometry}


def rect(x0, y0, x1, y1):
    return [(x0, y0), (x1, y0), (x1, y1), (x0, y1)]


def collection(features):
    return {"type": "FeatureCollection", "features": features}


def write(name, filename, data):
    d = os.path.join(HERE, name)
    os.makedirs(d, exist_ok=True)
    with open(os.path.join(d, filename), "w") as f:
        json.dump(data, f, indent=1)
        f.write("\n")


# All map features get t ~ N(0, diag(10, 10)); the operator / base station
# position is the agent's own telemetry and is taken as exact.
ERRORS = {
    "default": {"translation_cov": [[10.0, 0.0], [0.0, 10.0]]},
    "operator": {},
    "base": {},
}


def scenario_config(name, origin, extent, resolution, maps):
    return {
        "name": name,
        "maps": maps,
        "mapping": "mapping.json",
        "errors": "errors.json",
        "rules": "rules.pl",
        "grid": {
            "origin_lat": origin[0],
            "origin_lon": origin[1],
            "width_m": extent,
            "height_m": extent,
            "rows": resolution,
            "cols": resolution,
        },
        "ensemble_size": 100,
        "samples": 2500,
        "seed": 7,
        "tiling": 0,
    }


def park():
    o = (49.0069, 8.4037)
    f = [
        # 120 x 120 m park around the operator
        feature(o, "Polygon", rect(-60, -60, 60, 60), {"leisure": "park", "name": "Stadtgarten"}),
        feature(o, "LineString", [(-200, 150), (200, 150)], {"highway": "primary", "name": "north road"}),
        feature(o, "LineString", [(150, -200), (150, 140)], {"highway": "primary", "name": "east road"}),
        feature(o, "LineString", [(-200, -120), (-120, -200)], {"highway": "primary", "name": "southwest road"}),
        feature(o, "Polygon", rect(-150, 80, -110, 120), {"building": "yes"}),
        feature(o, "Polygon", rect(-60, 90, -20, 120), {"building": "yes"}),
        feature(o, "Polygon", rect(80, 170, 120, 195), {"building": "yes"}),
        feature(o, "Polygon", rect(170, -40, 195, 20), {"building": "yes"}),
        feature(o, "Polygon", rect(-180, -60, -140, -20), {"building": "yes"}),
    ]
    write("park", "map.geojson", collection(f))
    write("park", "operator.geojson", collection([feature(o, "Point", (0, 0), {"role": "operator"})]))
    write("park", "mapping.json", [
        {"match": "leisure=park", "type": "park"},
        {"match": "highway=primary", "type": "primary", "line_width_m": 12},
        {"match": "highway=secondary", "type": "secondary", "line_width_m": 8},
        {"match": "highway=tertiary", "type": "tertiary", "line_width_m": 6},
        {"match": "building=yes", "type": "building"},
        {"match": "role=operator", "type": "operator"},
    ])
    write("park", "errors.json", ERRORS)
    write("park", "scenario.json", scenario_config("park", o, 400.0, 50, ["map.geojson", "operator.geojson"]))


def bay():
    o = (37.8085, -122.4100)
    # Shoreline at x = 0: water to the east, land with service roads to the west.
    f = [
        feature(o, "Polygon", [(0, -600), (600, -600), (600, 600), (0, 600)], {"natural": "water"}),
        feature(o, "LineString", [(-600, -200), (-40, -200)], {"highway": "service"}),
        feature(o, "LineString", [(-300, -600), (-300, 600)], {"highway": "service"}),
        feature(o, "LineString", [(-40, -600), (-40, 600)], {"highway": "service"}),
        feature(o, "Polygon", rect(-250, 100, -150, 180), {"building": "yes"}),
    ]
    write("bay", "map.geojson", collection(f))
    write("bay", "operator.geojson", collection([feature(o, "Point", (-20, 0), {"role": "operator"})]))
    write("bay", "mapping.json", [
        {"match": "natural=water", "type": "water"},
        {"match": "highway=service", "type": "service", "line_width_m": 6},
        {"match": "building=yes", "type": "building"},
        {"match": "role=operator", "type": "operator"},
    ])
    write("bay", "errors.json", ERRORS)
    write("bay", "scenario.json", scenario_config("bay", o, 1200.0, 50, ["map.geojson", "operator.geojson"]))


def crossing():
    o = (52.5163, 13.3777)
    f = [
        feature(o, "LineString", [(-150, 0), (150, 0)], {"highway": "primary"}),
        feature(o, "LineString", [(0, -150), (0, 150)], {"highway": "primary"}),
        feature(o, "Polygon", rect(-12, -12, 12, 12), {"footway": "crossing", "crossing": "traffic_signals"}),
    ]
    for sx in (-1, 1):
        for sy in (-1, 1):
            xs = sorted((sx * 60, sx * 120))
            ys = sorted((sy * 60, sy * 120))
            f.append(feature(o, "Polygon", rect(xs[0], ys[0], xs[1], ys[1]), {"building": "yes"}))
    write("crossing", "map.geojson", collection(f))
    write("crossing", "operator.geojson", collection([feature(o, "Point", (-30, -30), {"role": "operator"})]))
    write("crossing", "mapping.json", [
        {"match": "highway=primary", "type": "primary", "line_width_m": 14},
        {"match": "footway=crossing", "type": "crossing"},
        {"match": "building=yes", "type": "building"},
        {"match": "role=operator", "type": "operator"},
    ])
    write("crossing", "errors.json", ERRORS)
    write("crossing", "scenario.json", scenario_config("crossing", o, 300.0, 50, ["map.geojson", "operator.geojson"]))


def rails():
    o = (48.1402, 11.5600)
    f = [
        feature(o, "LineString", [(-400, -20), (400, -20)], {"railway": "rail"}),
        feature(o, "LineString", [(-400, 20), (400, 20)], {"railway": "rail"}),
        feature(o, "LineString", [(0, 20), (300, 400)], {"railway": "rail", "service": "spur"}),
        feature(o, "Polygon", rect(-300, 150, -150, 300), {"building": "yes"}),
    ]
    write("rails", "map.geojson", collection(f))
    write("rails", "base.geojson", collection([feature(o, "Point", (0, -60), {"role": "base"})]))
    write("rails", "mapping.json", [
        {"match": "railway=rail", "type": "rail", "line_width_m": 8},
        {"match": "building=yes", "type": "building"},
        {"match": "role=base", "type": "base"},
    ])
    write("rails", "errors.json", ERRORS)
    write("rails", "scenario.json", scenario_config("rails", o, 800.0, 50, ["map.geojson", "base.geojson"]))


if __name__ == "__main__":
    park()
    bay()
    crossing()
    rails()
