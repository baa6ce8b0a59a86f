"""Batch front-end: config in, CSV/JSON artifacts out, with a manifest.

Every run reads one JSON config document, validates it fully (all problems
reported at once, exit 2 on any), executes one subcommand, and writes its
artifacts into a directory named by a content hash of the resolved config,
so sweeps never trample each other and identical configs land in the same
place.  Numeric output is formatted with 17 significant digits, which makes
repeated runs byte-identical and golden-file comparisons exact.  A
manifest.json records the fully-resolved config (every default expanded),
library versions, the effective seed, wall time, and artifact checksums;
wall time is the one intentionally non-reproducible field, so the manifest
is the one file excluded from byte-level comparisons.  Numerical failures
(as opposed to config errors) write failure.json and exit 3.

The config schema is documented in the README; configs/ holds a worked
example per subcommand.
"""

import argparse
import hashlib
import json
import os
import sys
import time

import numpy as np
import scipy

from . import __version__, collective, foliation, radar, relquant, restframe
from .errors import ConfigError, InstantFormError

__all__ = ["main", "parse_config", "run"]

SUBCOMMANDS = (
    "validate-foliation",
    "radar",
    "centers",
    "tube",
    "evolve",
    "reconstruct",
    "spectrum",
)

_EXIT_OK = 0
_EXIT_CONFIG = 2
_EXIT_NUMERICAL = 3


def _fmt(x):
    """Round-trippable decimal formatting used for every numeric cell."""
    return format(float(x), ".17g")


def _atomic_write(path, data):
    tmp = path + ".tmp"
    with open(tmp, "w", encoding="utf-8", newline="") as fh:
        fh.write(data)
    os.replace(tmp, path)


def _write_csv(path, header, rows):
    """RFC-4180 CSV with LF line endings and minimal quoting."""
    import csv
    import io

    buf = io.StringIO()
    writer = csv.writer(buf, lineterminator="\n")
    writer.writerow(header)
    for row in rows:
        writer.writerow(row)
    _atomic_write(path, buf.getvalue())


def _write_json(path, obj):
    _atomic_write(path, json.dumps(obj, indent=2, sort_keys=True) + "\n")


def _jsonable(x):
    if isinstance(x, np.ndarray):
        return [_jsonable(v) for v in x.tolist()]
    if isinstance(x, (np.floating, float)):
        return float(x)
    if isinstance(x, (np.integer, int)):
        return int(x)
    if isinstance(x, (np.bool_, bool)):
        return bool(x)
    if isinstance(x, dict):
        return {k: _jsonable(v) for k, v in x.items()}
    if isinstance(x, (list, tuple)):
        return [_jsonable(v) for v in x]
    return x


# -- config validation -------------------------------------------------------
#
# Each checker appends "path: message" strings; nothing raises until the end,
# so a bad config reports every problem in one pass.


class _Checker:
    def __init__(self, raw, subcommand):
        self.raw = raw
        self.sub = subcommand
        self.problems = []
        self.used = set()

    def fail(self, path, message):
        self.problems.append(f"{path}: {message}")

    def get(self, key, default=None, required=False):
        self.used.add(key)
        if key in self.raw:
            return self.raw[key]
        if required:
            self.fail(key, "required field is missing")
        return default

    def number(self, key, default=None, required=False, positive=False,
               nonnegative=False, integer=False, minimum=None):
        val = self.get(key, default, required)
        if val is None:
            return None
        if isinstance(val, bool) or not isinstance(val, (int, float)):
            self.fail(key, f"expected a number, got {type(val).__name__}")
            return None
        if integer and not float(val).is_integer():
            self.fail(key, f"expected an integer, got {val}")
            return None
        if not np.isfinite(val):
            self.fail(key, "must be finite")
            return None
        if positive and not val > 0:
            self.fail(key, f"must be > 0, got {val}")
            return None
        if nonnegative and val < 0:
            self.fail(key, f"must be >= 0, got {val}")
            return None
        if minimum is not None and val < minimum:
            self.fail(key, f"must be >= {minimum}, got {val}")
            return None
        return int(val) if integer else float(val)

    def choice(self, key, options, default=None, required=False):
        val = self.get(key, default, required)
        if val is None:
            return None
        if val not in options:
            self.fail(key, f"must be one of {list(options)}, got {val!r}")
            return None
        return val

    def check_unknown(self):
        for key in self.raw:
            if key not in self.used:
                self.fail(key, "unknown key")


def _vec3_field(chk, key, default=None, required=False):
    """Top-level 3-vector field on the checker's own document."""
    val = chk.get(key, default=None, required=required)
    if val is None:
        return default
    if (
        not isinstance(val, list)
        or len(val) != 3
        or not all(isinstance(v, (int, float)) and not isinstance(v, bool) for v in val)
        or not np.all(np.isfinite(np.asarray(val, dtype=float)))
    ):
        chk.fail(key, "expected a list of 3 finite numbers")
        return None
    return [float(v) for v in val]


def _resolve_vector3(chk, container, key, path, default=None, required=False):
    if key in container:
        val = container[key]
        arr = val if isinstance(val, list) else None
        if (
            arr is None
            or len(arr) != 3
            or not all(isinstance(v, (int, float)) and not isinstance(v, bool) for v in arr)
            or not np.all(np.isfinite(np.asarray(arr, dtype=float)))
        ):
            chk.fail(f"{path}.{key}", "expected a list of 3 finite numbers")
            return None
        return [float(v) for v in arr]
    if required:
        chk.fail(f"{path}.{key}", "required field is missing")
        return None
    return default


def _validate_particles(chk, allow_potential=True):
    """Particle list + potential block shared by centers/tube."""
    resolved = {}
    particles = chk.get("particles", required=True)
    out = []
    if particles is not None:
        if not isinstance(particles, list) or not particles:
            chk.fail("particles", "expected a non-empty list")
        else:
            for i, p in enumerate(particles):
                path = f"particles[{i}]"
                if not isinstance(p, dict):
                    chk.fail(path, "expected an object")
                    continue
                for key in p:
                    if key not in ("m", "x", "p", "q"):
                        chk.fail(f"{path}.{key}", "unknown key")
                m = p.get("m")
                if not isinstance(m, (int, float)) or isinstance(m, bool) or not m > 0:
                    chk.fail(f"{path}.m", f"mass must be a number > 0, got {m!r}")
                    m = None
                x = _resolve_vector3(chk, p, "x", path, required=True)
                mom = _resolve_vector3(chk, p, "p", path, default=[0.0, 0.0, 0.0])
                q = p.get("q", 0.0)
                if not isinstance(q, (int, float)) or isinstance(q, bool):
                    chk.fail(f"{path}.q", "charge must be a number")
                    q = None
                out.append({"m": m, "x": x, "p": mom, "q": float(q) if q is not None else None})
    potential = "none"
    if allow_potential:
        potential = chk.choice("potential", restframe.POTENTIALS, default="none")
    x0 = chk.number("x0", default=0.0)
    resolved["particles"] = out
    resolved["potential"] = potential
    resolved["x0"] = x0
    # mirror the ParticleSystem coincidence invariant at validation time
    if potential in ("coulomb", "coulomb+darwin"):
        seen = {}
        for i, p in enumerate(out):
            if p["x"] is None or p.get("q") in (None, 0.0):
                continue
            key = tuple(p["x"])
            if key in seen:
                chk.fail(
                    f"particles[{i}].x",
                    f"coincides with particles[{seen[key]}].x; "
                    f"singular with potential={potential!r}",
                )
            seen[key] = i
    return resolved


def _build_system(resolved, c):
    parts = resolved["particles"]
    return collective.ParticleSystem(
        masses=np.array([p["m"] for p in parts], dtype=float),
        positions=np.array([p["x"] for p in parts], dtype=float),
        momenta=np.array([p["p"] for p in parts], dtype=float),
        charges=np.array([p["q"] for p in parts], dtype=float),
        potential=resolved["potential"],
        x0=resolved["x0"],
        c=c,
    )


def parse_config(text, subcommand, seed_override=None):
    """Validate a JSON config document for one subcommand.

    Returns the fully-resolved config (all defaults expanded) or raises
    ConfigError carrying every problem found, each tagged with its key path.
    """
    try:
        raw = json.loads(text)
    except json.JSONDecodeError as exc:
        raise ConfigError([f"<document>: not valid JSON ({exc})"]) from exc
    if not isinstance(raw, dict):
        raise ConfigError(["<document>: top level must be an object"])

    chk = _Checker(raw, subcommand)
    resolved = {"subcommand": subcommand}
    resolved["sgn"] = chk.choice("sgn", (1, -1), default=1)
    resolved["c"] = chk.number("c", default=1.0, positive=True)
    seed = chk.number("seed", default=0, integer=True, nonnegative=True)
    if seed_override is not None:
        seed = seed_override
    resolved["seed"] = seed

    if subcommand == "validate-foliation":
        emb = chk.get("embedding", required=True)
        block = {"kind": None}
        if emb is not None:
            if not isinstance(emb, dict):
                chk.fail("embedding", "expected an object")
            else:
                sub = _Checker(emb, subcommand)
                kind = sub.choice(
                    "kind", ("identity", "tilted", "rigid", "differential"),
                    required=True,
                )
                block["kind"] = kind
                if kind == "tilted":
                    block["velocity"] = _vec3_field(sub, "velocity", required=True)
                elif kind in ("rigid", "differential"):
                    block["omega"] = sub.number("omega", required=True)
                    if kind == "differential":
                        block["r0"] = sub.number("r0", required=True, positive=True)
                sub.check_unknown()
                chk.problems.extend(
                    f"embedding.{p}" for p in sub.problems
                )
        resolved["embedding"] = block
        grid = chk.get("grid", default={})
        gblock = {}
        if not isinstance(grid, dict):
            chk.fail("grid", "expected an object")
        else:
            sub = _Checker(grid, subcommand)
            gblock["tau_min"] = sub.number("tau_min", default=0.0)
            gblock["tau_max"] = sub.number("tau_max", default=1.0)
            gblock["n_tau"] = sub.number("n_tau", default=3, integer=True, minimum=1)
            gblock["sigma_extent"] = sub.number("sigma_extent", default=2.0, positive=True)
            gblock["n_sigma"] = sub.number("n_sigma", default=9, integer=True, minimum=2)
            sub.check_unknown()
            chk.problems.extend(f"grid.{p}" for p in sub.problems)
            if (
                gblock.get("tau_min") is not None
                and gblock.get("tau_max") is not None
                and not gblock["tau_max"] >= gblock["tau_min"]
            ):
                chk.fail("grid.tau_max", "must be >= tau_min")
        resolved["grid"] = gblock
        resolved["asymptotic_tol"] = chk.number(
            "asymptotic_tol", default=1e-3, positive=True
        )

    elif subcommand == "radar":
        wl = chk.get("worldline", required=True)
        block = {"kind": None}
        if wl is not None:
            if not isinstance(wl, dict):
                chk.fail("worldline", "expected an object")
            else:
                sub = _Checker(wl, subcommand)
                kind = sub.choice("kind", ("inertial", "rindler"), required=True)
                block["kind"] = kind
                if kind == "inertial":
                    # spatial anchor; proper time zero sits at lab time zero
                    block["origin"] = [0.0] + (
                        _vec3_field(sub, "origin", default=[0.0, 0.0, 0.0])
                        or [0.0] * 3
                    )
                    block["h"] = _vec3_field(sub, "h", default=[0.0, 0.0, 0.0])
                    block["domain"] = [
                        sub.number("domain_min", default=-100.0),
                        sub.number("domain_max", default=100.0),
                    ]
                else:
                    block["accel"] = sub.number("accel", required=True, positive=True)
                    block["domain"] = [
                        sub.number("domain_min", default=-10.0),
                        sub.number("domain_max", default=10.0),
                    ]
                sub.check_unknown()
                chk.problems.extend(f"worldline.{p}" for p in sub.problems)
        resolved["worldline"] = block
        events = chk.get("events")
        rand = chk.get("random_events")
        if events is None and rand is None:
            chk.fail("events", "provide either events or random_events")
        if events is not None:
            ok = isinstance(events, list) and events
            if ok:
                for i, ev in enumerate(events):
                    if (
                        not isinstance(ev, list)
                        or len(ev) != 4
                        or not all(
                            isinstance(v, (int, float)) and not isinstance(v, bool)
                            for v in ev
                        )
                    ):
                        chk.fail(f"events[{i}]", "expected a list of 4 numbers")
                        ok = False
            else:
                chk.fail("events", "expected a non-empty list")
            resolved["events"] = events if ok else None
        if rand is not None:
            if not isinstance(rand, dict):
                chk.fail("random_events", "expected an object")
            else:
                sub = _Checker(rand, subcommand)
                resolved["random_events"] = {
                    "n": sub.number("n", default=16, integer=True, minimum=1),
                    "time_scale": sub.number("time_scale", default=1.0, positive=True),
                    "space_scale": sub.number("space_scale", default=1.0, positive=True),
                    "space_offset": _vec3_field(
                        sub, "space_offset", default=[0.0, 0.0, 0.0]
                    ),
                }
                sub.used.add("space_offset")
                sub.check_unknown()
                chk.problems.extend(f"random_events.{p}" for p in sub.problems)
        resolved["scan_points"] = chk.number(
            "scan_points", default=512, integer=True, minimum=16
        )

    elif subcommand in ("centers", "tube"):
        resolved.update(_validate_particles(chk))
        if subcommand == "tube":
            resolved["n_frames"] = chk.number(
                "n_frames", default=200, integer=True, minimum=1
            )
            resolved["rapidity_max"] = chk.number(
                "rapidity_max", default=3.0, positive=True
            )

    elif subcommand in ("evolve", "reconstruct"):
        for key, default in (("m1", None), ("m2", None)):
            resolved[key] = chk.number(key, default=default, required=True, positive=True)
        resolved["charge_product"] = chk.number("charge_product", default=0.0)
        resolved["rho0"] = _vec3_field(chk, "rho0", required=True)
        resolved["pi0"] = _vec3_field(chk, "pi0", default=[0.0, 0.0, 0.0])
        resolved["potential"] = chk.choice(
            "potential", restframe.POTENTIALS, default="coulomb"
        )
        resolved["dtau"] = chk.number("dtau", required=True, positive=True)
        resolved["n_steps"] = chk.number(
            "n_steps", required=True, integer=True, minimum=1
        )
        resolved["sample_every"] = chk.number(
            "sample_every", default=1, integer=True, minimum=1
        )
        if (
            resolved["rho0"] is not None
            and resolved["potential"] in ("coulomb", "coulomb+darwin")
            and resolved["charge_product"] == 0.0
        ):
            chk.fail("charge_product", "must be nonzero for a coulomb potential")
        if subcommand == "reconstruct":
            resolved["z"] = _vec3_field(chk, "z", default=[0.0, 0.0, 0.0])
            resolved["h"] = _vec3_field(chk, "h", default=[0.0, 0.0, 0.0])

    elif subcommand == "spectrum":
        resolved["n_points"] = chk.number(
            "n_points", default=2048, integer=True, minimum=16
        )
        resolved["length"] = chk.number("length", required=True, positive=True)
        resolved["m1"] = chk.number("m1", required=True, positive=True)
        resolved["m2"] = chk.number("m2", required=True, positive=True)
        resolved["alpha"] = chk.number("alpha", required=True, positive=True)
        resolved["kinetic"] = chk.choice(
            "kinetic", relquant.KINETIC_KINDS, default="salpeter"
        )
        resolved["ell"] = chk.number("ell", default=0, integer=True, nonnegative=True)
        soft = chk.number("softening", default=None, nonnegative=True)
        if soft is None and resolved["n_points"] and resolved["length"]:
            soft = resolved["length"] / (4.0 * resolved["n_points"])
        resolved["softening"] = soft
        resolved["n_levels"] = chk.number(
            "n_levels", default=6, integer=True, minimum=1
        )

    else:  # pragma: no cover - argparse restricts choices
        raise ValueError(f"unknown subcommand {subcommand!r}")

    chk.check_unknown()
    if chk.problems:
        raise ConfigError(chk.problems)
    return resolved


# -- subcommand handlers -----------------------------------------------------


def _make_embedding(block, c):
    kind = block["kind"]
    if kind == "identity":
        return foliation.identity_embedding()
    if kind == "tilted":
        return foliation.tilted_embedding(np.asarray(block["velocity"]))
    return foliation.make_rotating_embedding(
        kind="rigid" if kind == "rigid" else "differential",
        omega=block["omega"],
        r0=block.get("r0", 1.0),
        c=c,
    )


def _run_validate_foliation(cfg, run_dir, rng):
    emb = _make_embedding(cfg["embedding"], cfg["c"])
    g = cfg["grid"]
    grid = foliation.GridSpec(
        tau_min=g["tau_min"], tau_max=g["tau_max"], n_tau=g["n_tau"],
        sigma_extent=g["sigma_extent"], n_sigma=g["n_sigma"],
    )
    report = foliation.check_admissibility(
        emb, grid, sgn=cfg["sgn"], asym_tol=cfg["asymptotic_tol"]
    )
    rows = [
        (v.condition, _fmt(v.tau), _fmt(v.sigma[0]), _fmt(v.sigma[1]),
         _fmt(v.sigma[2]), _fmt(v.witness))
        for v in report.violations
    ]
    _write_csv(
        os.path.join(run_dir, "violations.csv"),
        ("condition", "tau", "s1", "s2", "s3", "witness"),
        rows,
    )
    _write_json(
        os.path.join(run_dir, "report.json"),
        {
            "passed": bool(report.passed),
            "conditions_passed": _jsonable(report.conditions_passed),
            "n_nodes": int(report.n_nodes),
            "n_violations": len(report.violations),
            "asymptotic_normal": _jsonable(report.asymptotic_normal),
        },
    )
    return ["violations.csv", "report.json"]


def _run_radar(cfg, run_dir, rng):
    block = cfg["worldline"]
    if block["kind"] == "inertial":
        wline = radar.inertial_worldline(
            origin=np.asarray(block["origin"]),
            h=np.asarray(block["h"]),
            domain=tuple(block["domain"]),
        )
    else:
        wline = radar.rindler_worldline(
            accel=block["accel"], domain=tuple(block["domain"])
        )
    events = cfg.get("events")
    if events is None:
        rand = cfg["random_events"]
        n = rand["n"]
        times = rand["time_scale"] * rng.uniform(-1.0, 1.0, n)
        space = np.asarray(rand["space_offset"]) + rand["space_scale"] * rng.uniform(
            -1.0, 1.0, (n, 3)
        )
        events = np.concatenate((times[:, None], space), axis=1)
    else:
        events = np.asarray(events, dtype=float)

    rows = []
    for ev in events:
        try:
            res = radar.einstein_sync(wline, ev, scan_points=cfg["scan_points"])
            rows.append(
                tuple(_fmt(v) for v in ev)
                + (_fmt(res.tau), _fmt(res.s_emit), _fmt(res.s_absorb),
                   _fmt(res.residuals[0]), _fmt(res.residuals[1]), "ok")
            )
        except radar.NoSolutionError as exc:
            rows.append(
                tuple(_fmt(v) for v in ev)
                + ("nan", "nan", "nan", "nan", "nan", f"no_solution:{exc.missing}")
            )
    _write_csv(
        os.path.join(run_dir, "radar.csv"),
        ("t", "x", "y", "z", "tau", "s_emit", "s_absorb",
         "residual_emit", "residual_absorb", "status"),
        rows,
    )
    return ["radar.csv"]


def _run_centers(cfg, run_dir, rng):
    sys_ = _build_system(cfg, cfg["c"])
    g = collective.poincare_generators(sys_, sgn=cfg["sgn"])
    mc, h, s_bar = collective.invariant_mass_spin(g)
    x_e = collective.center_of_energy(g)
    fp = collective.fokker_pryce_worldline(g)
    x_nw, z, _ = collective.newton_wigner_and_jacobi(g)
    fp0 = fp(0.0)
    rows = [
        ("center_of_energy",) + tuple(_fmt(v) for v in x_e),
        ("fokker_pryce_tau0",) + tuple(_fmt(v) for v in fp0[1:]),
        ("newton_wigner",) + tuple(_fmt(v) for v in x_nw),
    ]
    _write_csv(os.path.join(run_dir, "centers.csv"), ("center", "x", "y", "z"), rows)
    _write_json(
        os.path.join(run_dir, "invariants.json"),
        {
            "Mc": float(mc),
            "h": _jsonable(h),
            "S_bar": _jsonable(s_bar),
            "tube_radius": float(np.linalg.norm(s_bar) / mc),
            "jacobi_z": _jsonable(z),
        },
    )
    return ["centers.csv", "invariants.json"]


def _run_tube(cfg, run_dir, rng):
    sys_ = _build_system(cfg, cfg["c"])
    sample = collective.moller_tube_sample(
        sys_,
        n_frames=cfg["n_frames"],
        rapidity_max=cfg["rapidity_max"],
        seed=cfg["seed"],
        sgn=cfg["sgn"],
    )
    rows = [
        (_fmt(sample.rapidities[i]),)
        + tuple(_fmt(v) for v in sample.directions[i])
        + (_fmt(sample.distances[i]),)
        for i in range(sample.distances.shape[0])
    ]
    _write_csv(
        os.path.join(run_dir, "tube.csv"),
        ("rapidity", "nx", "ny", "nz", "distance"),
        rows,
    )
    _write_json(
        os.path.join(run_dir, "tube.json"),
        {
            "bound": float(sample.bound),
            "max_distance": float(sample.max_distance),
            "n_frames": int(sample.distances.shape[0]),
            "within_bound": bool(np.all(sample.distances <= sample.bound * (1 + 1e-12))),
        },
    )
    return ["tube.csv", "tube.json"]


def _make_relative(cfg):
    return restframe.RelativeState(
        m1=cfg["m1"], m2=cfg["m2"],
        rho=np.asarray(cfg["rho0"]), pi=np.asarray(cfg["pi0"]),
        charge_product=cfg["charge_product"], c=cfg["c"],
    )


def _run_evolve(cfg, run_dir, rng):
    rel = _make_relative(cfg)
    traj = restframe.evolve(rel, cfg["potential"], cfg["dtau"], cfg["n_steps"])
    every = cfg["sample_every"]
    idx = np.arange(0, traj.tau.shape[0], every)
    if idx[-1] != traj.tau.shape[0] - 1:
        idx = np.append(idx, traj.tau.shape[0] - 1)
    rows = [
        (_fmt(traj.tau[k]),)
        + tuple(_fmt(v) for v in traj.rho[k])
        + tuple(_fmt(v) for v in traj.pi[k])
        + (_fmt(traj.H[k]), _fmt(np.linalg.norm(traj.L[k])))
        for k in idx
    ]
    _write_csv(
        os.path.join(run_dir, "trajectory.csv"),
        ("tau", "rho_x", "rho_y", "rho_z", "pi_x", "pi_y", "pi_z", "H", "L"),
        rows,
    )
    _write_json(
        os.path.join(run_dir, "evolve.json"),
        {
            "scheme": traj.scheme,
            "energy_drift": float(traj.energy_drift),
            "H0": float(traj.H[0]),
            "n_steps": int(cfg["n_steps"]),
            "max_fixed_point_sweeps": traj.meta.get("max_fixed_point_sweeps", 0),
        },
    )
    return ["trajectory.csv", "evolve.json"], traj


def _run_reconstruct(cfg, run_dir, rng):
    artifacts, traj = _run_evolve(cfg, run_dir, rng)
    rec = restframe.reconstruct_worldlines(
        traj, z=np.asarray(cfg["z"]), h=np.asarray(cfg["h"]), sgn=cfg["sgn"]
    )
    every = cfg["sample_every"]
    idx = np.arange(0, rec.tau.shape[0], every)
    if idx[-1] != rec.tau.shape[0] - 1:
        idx = np.append(idx, rec.tau.shape[0] - 1)
    rows = []
    for i in range(2):
        for k in idx:
            rows.append(
                (str(i + 1), _fmt(rec.tau[k]))
                + tuple(_fmt(v) for v in rec.events[i, k])
            )
    _write_csv(
        os.path.join(run_dir, "worldlines.csv"),
        ("particle", "tau", "t", "x", "y", "z"),
        rows,
    )
    _write_json(
        os.path.join(run_dir, "reconstruct.json"),
        {
            "all_segments_causal": bool(rec.all_timelike),
            "Mc": float(rec.Mc),
            "h": _jsonable(rec.h),
        },
    )
    return artifacts + ["worldlines.csv", "reconstruct.json"]


def _run_spectrum(cfg, run_dir, rng):
    mu = cfg["m1"] * cfg["m2"] / (cfg["m1"] + cfg["m2"])
    levels = relquant.radial_levels(
        cfg["n_points"], cfg["length"], cfg["m1"], cfg["m2"], cfg["alpha"],
        c=cfg["c"], kinetic=cfg["kinetic"], ell=cfg["ell"],
        softening=cfg["softening"], n_levels=cfg["n_levels"],
    )
    rest = (cfg["m1"] + cfg["m2"]) * cfg["c"] ** 2
    rows = []
    for n, binding in enumerate(levels, start=1):
        bohr = -mu * cfg["c"] ** 2 * cfg["alpha"] ** 2 / (2.0 * (n + cfg["ell"]) ** 2)
        rows.append(
            (str(n), _fmt(rest + binding), _fmt(binding), _fmt(binding / bohr))
        )
    _write_csv(
        os.path.join(run_dir, "levels.csv"),
        ("n", "E_n", "binding", "bohr_ratio"),
        rows,
    )
    half = relquant.radial_levels(
        cfg["n_points"] // 2, cfg["length"], cfg["m1"], cfg["m2"], cfg["alpha"],
        c=cfg["c"], kinetic=cfg["kinetic"], ell=cfg["ell"],
        softening=cfg["softening"], n_levels=1,
    )
    change = abs(levels[0] - half[0]) / abs(levels[0])
    _write_json(
        os.path.join(run_dir, "convergence.json"),
        {
            "ground_binding": float(levels[0]),
            "ground_binding_half_resolution": float(half[0]),
            "relative_change": float(change),
            "n_points": int(cfg["n_points"]),
        },
    )
    return ["levels.csv", "convergence.json"]


_HANDLERS = {
    "validate-foliation": _run_validate_foliation,
    "radar": _run_radar,
    "centers": _run_centers,
    "tube": _run_tube,
    "evolve": lambda cfg, d, r: _run_evolve(cfg, d, r)[0],
    "reconstruct": _run_reconstruct,
    "spectrum": _run_spectrum,
}


def run(cfg, out_base):
    """Execute a resolved config; returns (exit_code, run_dir)."""
    canonical = json.dumps(_jsonable(cfg), sort_keys=True, separators=(",", ":"))
    digest = hashlib.sha256(canonical.encode("utf-8")).hexdigest()[:12]
    run_dir = os.path.join(out_base, digest)
    os.makedirs(run_dir, exist_ok=True)
    rng = np.random.default_rng(cfg["seed"])

    start = time.monotonic()
    try:
        artifacts = _HANDLERS[cfg["subcommand"]](cfg, run_dir, rng)
    except (InstantFormError, FloatingPointError, np.linalg.LinAlgError) as exc:
        _write_json(
            os.path.join(run_dir, "failure.json"),
            {
                "error": type(exc).__name__,
                "message": str(exc),
                "subcommand": cfg["subcommand"],
            },
        )
        print(f"numerical failure: {exc}", file=sys.stderr)
        return _EXIT_NUMERICAL, run_dir

    wall = time.monotonic() - start
    checksums = {}
    for name in artifacts:
        with open(os.path.join(run_dir, name), "rb") as fh:
            checksums[name] = hashlib.sha256(fh.read()).hexdigest()
    _write_json(
        os.path.join(run_dir, "manifest.json"),
        {
            "subcommand": cfg["subcommand"],
            "config": _jsonable(cfg),
            "config_hash": digest,
            "seed": int(cfg["seed"]),
            "wall_time_s": wall,
            "versions": {
                "instantform": __version__,
                "numpy": np.__version__,
                "scipy": scipy.__version__,
                "python": sys.version.split()[0],
            },
            "artifacts": checksums,
        },
    )
    return _EXIT_OK, run_dir


def main(argv=None):
    parser = argparse.ArgumentParser(
        prog="instantform",
        description="Rest-frame instant form toolkit batch runner.",
    )
    sub = parser.add_subparsers(dest="subcommand", required=True)
    for name in SUBCOMMANDS:
        p = sub.add_parser(name)
        p.add_argument("--config", required=True, help="path to a JSON config")
        p.add_argument("--out", default="out", help="base output directory")
        p.add_argument("--seed", type=int, default=None,
                       help="override the config seed")
    args = parser.parse_args(argv)

    try:
        with open(args.config, "r", encoding="utf-8") as fh:
            text = fh.read()
    except OSError as exc:
        print(f"cannot read config: {exc}", file=sys.stderr)
        return _EXIT_CONFIG

    try:
        cfg = parse_config(text, args.subcommand, seed_override=args.seed)
    except ConfigError as exc:
        for problem in exc.problems:
            print(f"config error: {problem}", file=sys.stderr)
        return _EXIT_CONFIG

    code, run_dir = run(cfg, args.out)
    if code == _EXIT_OK:
        print(run_dir)
    return code


if __name__ == "__main__":
    sys.exit(main())
