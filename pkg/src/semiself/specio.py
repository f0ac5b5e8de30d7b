"""JSON spec schema, CSV export and run manifests.

A triplet spec is a JSON object

    {"gauss": [[...]], "drift": [...], "levy": [component, ...]}

with component kinds "atoms", "lattice", "radial" (a named density form from
the registry) and "semistable" (expands to its exact scale lattice; the
strict drift it induces is added to the triplet drift unless the component
sets "strict_drift": false).  Infinite lattice bounds serialize as the
strings "-inf" / "inf".  All writers are atomic (temp file + rename) and every
output can carry the sha256 hash of the spec it came from.
"""

from __future__ import annotations

import hashlib
import json
import math
import os
import platform
import tempfile
from dataclasses import dataclass, field

import numpy as np

from . import measures as ms
from . import triplets as tp
from .errors import SemiselfError

SCHEMA_VERSION = 1


class SpecError(SemiselfError):
    """The JSON spec does not match the schema."""


# ---------------------------------------------------------------------------
# named radial density forms (serializable subset of RadialDensity)


def _power_exp(params):
    w = float(params.get("w", 1.0))
    p = float(params.get("p", 1.0))
    a = float(params.get("a", 1.0))

    def h(s):
        s = np.asarray(s, dtype=float)
        return w * s ** (-p) * np.exp(-a * s)

    return h


def _log_tail(params):
    """Density ~ w / (s log(s)^q) beyond e, 0 inside; log-moment boundary probe."""
    w = float(params.get("w", 1.0))
    q = float(params.get("q", 3.0))

    def h(s):
        s = np.asarray(s, dtype=float)
        out = np.zeros_like(s)
        sel = s > math.e
        out[sel] = w / (s[sel] * np.log(s[sel]) ** q)
        return out

    return h


RADIAL_FORMS = {"power_exp": _power_exp, "log_tail": _log_tail}


# ---------------------------------------------------------------------------
# triplet <-> dict


def _bound_to_json(v):
    if v == ms.NEG_INF:
        return "-inf"
    if v == ms.POS_INF:
        return "inf"
    return int(v)


def _bound_from_json(v):
    if v == "-inf":
        return ms.NEG_INF
    if v == "inf":
        return ms.POS_INF
    return int(v)


def _component_to_dict(comp) -> dict:
    if isinstance(comp, ms.Atoms):
        return {"kind": "atoms", "points": comp.points.tolist(),
                "weights": comp.weights.tolist()}
    if isinstance(comp, ms.ScaleLattice):
        return {"kind": "lattice", "direction": comp.direction.tolist(),
                "base": comp.base, "anchor": comp.anchor,
                "segments": [{"w": s.w, "r": s.r,
                              "kmin": _bound_to_json(s.kmin),
                              "kmax": _bound_to_json(s.kmax),
                              "power": s.power} for s in comp.segments]}
    if isinstance(comp, ms.RadialDensity):
        if comp.name not in RADIAL_FORMS:
            raise SpecError(f"radial form {comp.name!r} is not serializable")
        return {"kind": "radial", "direction": comp.direction.tolist(),
                "form": comp.name, "params": comp.params}
    raise SpecError(f"unknown component type {type(comp)!r}")


def _component_from_dict(obj: dict):
    """Returns (component or None, extra drift or None)."""
    kind = obj.get("kind")
    if kind == "atoms":
        return ms.Atoms(obj["points"], obj["weights"]), None
    if kind == "lattice":
        segs = tuple(ms.Segment(w=float(s["w"]), r=float(s["r"]),
                                kmin=_bound_from_json(s.get("kmin", "-inf")),
                                kmax=_bound_from_json(s.get("kmax", "inf")),
                                power=int(s.get("power", 0)))
                     for s in obj["segments"])
        return ms.ScaleLattice(direction=obj["direction"], base=float(obj["base"]),
                               segments=segs,
                               anchor=float(obj.get("anchor", 1.0))), None
    if kind == "radial":
        form = obj.get("form")
        if form not in RADIAL_FORMS:
            raise SpecError(f"unknown radial form {form!r}")
        params = dict(obj.get("params", {}))
        return ms.RadialDensity(obj["direction"], RADIAL_FORMS[form](params),
                                name=form, params=params), None
    if kind == "semistable":
        from . import nested
        spec = nested.SemiStableSpec(
            b=float(obj["b"]), alpha=float(obj["alpha"]),
            direction=tuple(obj.get("direction", (1.0,))),
            w=float(obj.get("w", 1.0)), r0=float(obj.get("r0", 1.0)))
        trip = nested.semi_stable_triplet(spec)
        drift = trip.drift if obj.get("strict_drift", True) else None
        return trip.levy.components[0], drift
    raise SpecError(f"unknown component kind {kind!r}")


def triplet_to_dict(triplet: tp.LevyTriplet) -> dict:
    return {"schema": SCHEMA_VERSION,
            "gauss": triplet.gauss.tolist(),
            "drift": triplet.drift.tolist(),
            "levy": [_component_to_dict(c) for c in triplet.levy.components]}


def triplet_from_dict(obj: dict) -> tp.LevyTriplet:
    try:
        comps = []
        extra_drift = None
        for c in obj.get("levy", []):
            comp, drift = _component_from_dict(c)
            comps.append(comp)
            if drift is not None:
                extra_drift = drift if extra_drift is None else extra_drift + drift
        levy = ms.LevyMeasure(tuple(comps))
        d = levy.dim or (len(obj["drift"]) if "drift" in obj else 1)
        gauss = np.asarray(obj.get("gauss", np.zeros((d, d))), dtype=float)
        drift = np.asarray(obj.get("drift", np.zeros(d)), dtype=float)
        if extra_drift is not None:
            drift = drift + extra_drift
        return tp.LevyTriplet(gauss, levy, drift)
    except (KeyError, TypeError, ValueError) as exc:
        raise SpecError(f"malformed triplet spec: {exc}") from exc


def load_triplet(path: str) -> tp.LevyTriplet:
    try:
        with open(path) as fh:
            obj = json.load(fh)
    except (OSError, json.JSONDecodeError) as exc:
        raise SpecError(f"cannot read spec {path}: {exc}") from exc
    if not isinstance(obj, dict):
        raise SpecError("spec must be a JSON object")
    return triplet_from_dict(obj)


def spec_hash(obj) -> str:
    """sha256 of the canonical (sorted-keys) JSON encoding."""
    if isinstance(obj, tp.LevyTriplet):
        obj = triplet_to_dict(obj)
    payload = json.dumps(obj, sort_keys=True, separators=(",", ":"))
    return hashlib.sha256(payload.encode()).hexdigest()


# ---------------------------------------------------------------------------
# atomic writers


def write_text_atomic(path: str, text: str) -> None:
    directory = os.path.dirname(os.path.abspath(path))
    fd, tmp = tempfile.mkstemp(dir=directory, suffix=".tmp")
    try:
        with os.fdopen(fd, "w") as fh:
            fh.write(text)
        os.replace(tmp, path)
    except BaseException:
        if os.path.exists(tmp):
            os.unlink(tmp)
        raise


def write_json(path: str, obj) -> None:
    write_text_atomic(path, json.dumps(obj, indent=2, sort_keys=True) + "\n")


def write_csv(path: str, columns, rows, manifest_hash: str = "") -> None:
    lines = []
    if manifest_hash:
        lines.append(f"# manifest: {manifest_hash}")
    lines.append(",".join(columns))
    for row in rows:
        lines.append(",".join(repr(float(v)) if isinstance(v, float)
                              else str(v) for v in row))
    write_text_atomic(path, "\n".join(lines) + "\n")


def cumulant_csv_rows(grid: tp.CumulantGrid):
    d = grid.grid.shape[1]
    cols = [f"z{i}" for i in range(d)] + ["re", "im", "err_bound"]
    rows = [tuple(grid.grid[i]) + (float(grid.values[i].real),
                                   float(grid.values[i].imag),
                                   float(grid.err_bound[i]))
            for i in range(grid.grid.shape[0])]
    return cols, rows


def paths_csv_rows(bundle):
    """Rows (path, epoch, time, state..., increment...) for a PathBundle."""
    d = bundle.dim
    cols = (["path", "epoch", "time"] + [f"z{i}" for i in range(d)]
            + [f"dx{i}" for i in range(d)])
    times = bundle.times()
    rows = []
    for p in range(bundle.n_paths):
        for k in range(bundle.epochs + 1):
            inc = (bundle.increments[p, k - 1] if k > 0 else np.zeros(d))
            rows.append((p, bundle.epoch0 + k, float(times[k]))
                        + tuple(bundle.states[p, k]) + tuple(inc))
    return cols, rows


def batch_csv_rows(batch):
    d = batch.dim
    cols = [f"x{i}" for i in range(d)]
    return cols, [tuple(batch.values[i]) for i in range(batch.n)]


# ---------------------------------------------------------------------------
# run manifest


@dataclass(frozen=True)
class RunManifest:
    command: list
    spec_hashes: dict
    seed: int | None
    tolerances: dict
    wall_time: float
    versions: dict = field(default_factory=dict)

    def to_dict(self) -> dict:
        v = dict(self.versions)
        if not v:
            from . import __version__
            v = {"semiself": __version__, "numpy": np.__version__,
                 "python": platform.python_version()}
        return {"command": list(self.command), "spec_hashes": self.spec_hashes,
                "seed": self.seed, "tolerances": self.tolerances,
                "wall_time": self.wall_time, "versions": v}

    def hash(self) -> str:
        # wall time excluded so reruns of the same invocation match
        obj = self.to_dict()
        obj.pop("wall_time", None)
        return spec_hash(obj)
