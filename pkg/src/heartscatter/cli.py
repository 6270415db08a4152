"""Batch front-end: parse a problem config, run the pipeline, emit tables,
theta functions, mirror equations, and 2D slice renderings.

Config format (JSON, explicit integer arrays):

    {
      "rank": 3,
      "fan": {"rays": [[1,0,0], ...], "maximal_cones": [[0,1,2], ...]},
      "kink_class": "L",                  # or "kinks": {"0,1": "L", ...}
      "centers": [{"ray": 0, "label": "E1", "pn_degree": 1}],
      "cutoff": 4,
      "base_cone": 0,
      "endpoint": null                    # optional rational coordinates
    }

A center is given by a fan ray index, an exceptional-class label, and either
a "pn_degree" convenience block (every codimension-one cone containing the
ray gets that intersection number) or explicit "intersections":
[[[ray indices], mult], ...].
"""

from __future__ import annotations

import argparse
import json
import sys
from fractions import Fraction
from pathlib import Path

from .curves import cc
from .heart import BlowupData, Center, Component, HeartError, build_initial, refine, to_heart
from .lattice import Cone, Fan, LatticeError
from .render import RenderError, render_slice
from .scattering import (
    BudgetExceeded,
    ScatteringError,
    complete,
    wall_table_json,
    wall_table_text,
)
from .series import SeriesError
from .thetas import (
    NonGenericEndpoint,
    ThetaError,
    default_endpoint,
    mirror_presentation,
    theta,
)

COMMANDS = ("scatter", "heart", "thetas", "mirror", "render")


class ConfigError(ValueError):
    pass


def load_config(path: Path) -> dict:
    try:
        raw = json.loads(path.read_text(encoding="utf-8"))
    except OSError as exc:
        raise ConfigError(f"cannot read config: {exc}") from exc
    except json.JSONDecodeError as exc:
        raise ConfigError(f"config is not valid JSON: {exc}") from exc
    for key in ("rank", "fan", "cutoff"):
        if key not in raw:
            raise ConfigError(f"config missing {key!r}")
    if raw["rank"] not in (2, 3):
        raise ConfigError("rank must be 2 or 3")
    if not isinstance(raw["cutoff"], int) or raw["cutoff"] < 1:
        raise ConfigError("cutoff must be an integer >= 1")
    return raw


def build_problem(raw: dict):
    try:
        fan = Fan.build(raw["fan"]["rays"], [tuple(c) for c in raw["fan"]["maximal_cones"]])
        fan.check_complete()
    except (LatticeError, KeyError, TypeError) as exc:
        raise ConfigError(f"invalid fan: {exc}") from exc
    if any(len(r) != raw["rank"] for r in raw["fan"]["rays"]):
        raise ConfigError("fan rays do not match the configured rank")
    kinks = {}
    if "kinks" in raw:
        for key, name in raw["kinks"].items():
            idxs = tuple(int(i) for i in key.split(","))
            facet = tuple(sorted(fan.rays[i] for i in idxs))
            kinks[facet] = cc({name: 1})
    else:
        name = raw.get("kink_class", "L")
        for facet in fan._facets():
            kinks[facet] = cc({name: 1})
    centers = []
    for spec in raw.get("centers", []):
        try:
            ray_index = int(spec["ray"])
            label = str(spec["label"])
        except (KeyError, ValueError) as exc:
            raise ConfigError(f"invalid center: {exc}") from exc
        inter = {}
        if "pn_degree" in spec:
            d = int(spec["pn_degree"])
            if d < 0:
                raise ConfigError("pn_degree must be >= 0")
            ray = fan.rays[ray_index]
            for facet in fan._facets():
                if Cone(facet).contains(ray):
                    inter[facet] = d
        elif "intersections" in spec:
            for idxs, mult in spec["intersections"]:
                facet = tuple(sorted(fan.rays[i] for i in idxs))
                inter[facet] = int(mult)
        else:
            raise ConfigError("center needs pn_degree or intersections")
        centers.append(Center(ray_index, (Component(label, tuple(sorted(inter.items()))),)))
    base_cone = int(raw.get("base_cone", 0))
    if not 0 <= base_cone < len(fan.maximal_cones):
        raise ConfigError("base_cone out of range")
    return BlowupData.build(fan, centers, kinks, int(raw["cutoff"]), base_cone), raw


def _endpoint(bd: BlowupData, raw: dict, seed: int):
    if raw.get("endpoint"):
        return tuple(Fraction(str(x)) for x in raw["endpoint"])
    base = int(raw.get("base_cone", 0))
    return default_endpoint(bd.fan, base, seed)


def _write(out_dir: Path, name: str, content: str) -> Path:
    out_dir.mkdir(parents=True, exist_ok=True)
    path = out_dir / name
    with open(path, "w", encoding="utf-8", newline="\n") as fh:
        fh.write(content)
    return path


def run(config_path: Path, command: str, order=None, out_dir=None, slice_arg=None,
        seed_endpoint: int = 0) -> int:
    raw = load_config(config_path)
    bd, raw = build_problem(raw)
    if order is not None:
        bd = BlowupData(bd.fan, bd.centers, bd.psi, int(order))
    out_dir = Path(out_dir) if out_dir else Path.cwd()
    initial = build_initial(bd)
    completed = complete(initial)
    if command == "scatter":
        _write(out_dir, "walls_toric.json", wall_table_json(completed))
        _write(out_dir, "walls_toric.txt", wall_table_text(completed))
        return 0
    heart_ws = to_heart(refine(completed, bd.fan), bd)
    if command == "heart":
        _write(out_dir, "walls_heart.json", wall_table_json(heart_ws))
        _write(out_dir, "walls_heart.txt", wall_table_text(heart_ws))
        return 0
    if command == "render":
        if not slice_arg:
            raise ConfigError("render needs --slice RAY_A,RAY_B")
        a, b = (int(x) for x in slice_arg.split(","))
        _write(out_dir, "slice.svg", render_slice(heart_ws, a, b))
        return 0
    p = _endpoint(bd, raw, seed_endpoint)
    base = int(raw.get("base_cone", 0))
    if command == "thetas":
        rows = []
        text = []
        for i, ray in enumerate(bd.fan.rays):
            th = theta(heart_ws, ray, p, base_cone=base)
            rows.append({"direction": list(ray), "series": th.canonical_text()})
            text.append(f"ϑ{i + 1}  (direction {tuple(ray)}):  {th.pretty()}")
        _write(out_dir, "thetas.json", json.dumps(rows, indent=2, sort_keys=True) + "\n")
        _write(out_dir, "thetas.txt", "\n".join(text) + "\n")
        return 0
    if command == "mirror":
        pres = mirror_presentation(bd, heart_ws, p, base_cone=base)
        _write(out_dir, "mirror.txt", pres.text + "\n")
        payload = {
            "generators": list(pres.generators),
            "relation": pres.text,
            "polynomial": [
                {"coefficient": str(c), "class": list(k), "exponents": list(e)}
                for c, k, e in pres.polynomial
            ],
        }
        _write(out_dir, "mirror.json", json.dumps(payload, indent=2, sort_keys=True) + "\n")
        return 0
    raise ConfigError(f"unknown command {command!r}")


def main(argv=None) -> int:
    parser = argparse.ArgumentParser(
        prog="heartscatter",
        description="wall structures, theta functions, and mirror equations "
                    "for blow-ups of toric varieties along boundary hypersurfaces",
    )
    parser.add_argument("command", choices=COMMANDS)
    parser.add_argument("--config", required=True, type=Path)
    parser.add_argument("--order", type=int, default=None,
                        help="override the config cutoff")
    parser.add_argument("--out", type=Path, default=None, help="output directory")
    parser.add_argument("--slice", dest="slice_arg", default=None,
                        help="two fan ray indices spanning the render plane, e.g. 0,1")
    parser.add_argument("--seed-endpoint", type=int, default=0,
                        help="perturbation index for the default endpoint")
    args = parser.parse_args(argv)
    try:
        return run(args.config, args.command, args.order, args.out, args.slice_arg,
                   args.seed_endpoint)
    except (ConfigError, LatticeError) as exc:
        _emit_error("config", exc)
        return 1
    except (ScatteringError, SeriesError, ThetaError, NonGenericEndpoint,
            BudgetExceeded, RenderError, HeartError) as exc:
        _emit_error("computation", exc)
        return 2


def _emit_error(kind: str, exc: Exception) -> None:
    sys.stderr.write(json.dumps({"error": kind, "message": str(exc)}) + "\n")


if __name__ == "__main__":
    sys.exit(main())
