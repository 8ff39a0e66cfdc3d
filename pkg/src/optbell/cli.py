"""Command-line entry point.

Subcommands: ``sweep``, ``single``, ``grating``, ``validate``, ``scene``.
Exit status is 0 on success, 1 when validation fails and 2 for bad
configuration.
"""

from __future__ import annotations

import argparse
import json
import logging
import math
import sys
from dataclasses import dataclass, field, fields, replace
from pathlib import Path
from typing import Any, Optional, Sequence

from . import emitters
from .encoding import (
    DEFAULT_PITCH,
    SceneGeometry,
    encode_two_qubit,
    intensity_image,
    mixture_members,
    named_state,
)
from .experiment import Backend, bell_point, bell_sweep, sample_shots, theta_grid, violation_report
from .measurement import joint_probabilities, region_intensities
from .optics import (
    QUBIT_A,
    QUBIT_B,
    GratingSpec,
    PhasePlate,
    grating_for,
    grating_phase_profile,
    order_amplitudes,
    phase_image,
    phi_for_theta,
    propagate_4f,
)
from .quantum import TWO_PI

log = logging.getLogger("optbell")

EXIT_OK, EXIT_VALIDATION, EXIT_CONFIG = 0, 1, 2


class ConfigError(ValueError):
    pass


@dataclass
class RunConfig:
    q: float = 1.0
    theta_min: float = 0.0
    theta_max: float = TWO_PI
    steps: int = 128
    backend: str = "oracle"
    geometry: dict = field(default_factory=dict)
    out: str = "-"
    svg: Optional[str] = None
    emit_scenes: Optional[str] = None
    seed: int = 0
    table1_literal: bool = False

    def validate(self) -> SceneGeometry:
        """Check every field against the module preconditions; returns the geometry."""
        if not 0.0 <= self.q <= 1.0:
            raise ConfigError(f"q must lie in [0, 1], got {self.q}")
        if self.steps < 1:
            raise ConfigError("steps must be at least 1")
        if not 0.0 <= self.theta_min < self.theta_max <= TWO_PI + 1e-12:
            raise ConfigError("theta range must satisfy 0 <= theta_min < theta_max <= 2*pi")
        try:
            Backend(self.backend)
        except ValueError:
            raise ConfigError(f"unknown backend {self.backend!r}") from None
        try:
            return SceneGeometry.from_dict(self.geometry)
        except (ValueError, TypeError) as exc:
            raise ConfigError(f"invalid geometry: {exc}") from None

    @classmethod
    def from_file(cls, path: str) -> "RunConfig":
        try:
            data = json.loads(Path(path).read_text(encoding="utf-8"))
        except (OSError, json.JSONDecodeError) as exc:
            raise ConfigError(f"cannot read config {path}: {exc}") from None
        if not isinstance(data, dict):
            raise ConfigError("config file must hold a JSON object")
        names = {f.name for f in fields(cls)}
        unknown = set(data) - names
        if unknown:
            raise ConfigError(f"unknown config keys: {sorted(unknown)}")
        return cls(**data)


def _geometry_overrides(args: argparse.Namespace) -> dict:
    return {k: v for k, v in (("N", args.N), ("L", args.L), ("a", args.a), ("b", args.b))
            if v is not None}


def build_config(args: argparse.Namespace) -> RunConfig:
    """Config file values first, then any flag given on the command line."""
    cfg = RunConfig.from_file(args.config) if getattr(args, "config", None) else RunConfig()
    updates: dict[str, Any] = {}
    for name in ("q", "theta_min", "theta_max", "steps", "backend", "out", "svg",
                 "emit_scenes", "seed"):
        value = getattr(args, name, None)
        if value is not None:
            updates[name] = value
    if getattr(args, "table1_literal", False):
        updates["table1_literal"] = True
    geometry = dict(cfg.geometry)
    geometry.update(_geometry_overrides(args))
    if "N" in geometry and "L" not in geometry and "L" not in cfg.geometry:
        geometry["L"] = geometry["N"] * DEFAULT_PITCH
    updates["geometry"] = geometry
    return replace(cfg, **updates)


def _write_text(text: str, path: str) -> None:
    if path == "-":
        sys.stdout.write(text)
        return
    try:
        Path(path).write_text(text, encoding="utf-8", newline="")
    except OSError as exc:
        raise ConfigError(f"cannot write {path}: {exc}") from None


# --- subcommands ----------------------------------------------------------

def cmd_sweep(args: argparse.Namespace) -> int:
    cfg = build_config(args)
    geometry = cfg.validate()
    thetas = theta_grid(cfg.steps, cfg.theta_min, cfg.theta_max)
    curve = bell_sweep(cfg.q, thetas, Backend(cfg.backend), geometry, cfg.table1_literal)
    _write_text(emitters.curve_to_csv(curve), cfg.out)
    if cfg.svg:
        _write_text(emitters.curve_svg(curve), cfg.svg)
    if cfg.emit_scenes:
        _emit_scenes(cfg, geometry)
    if cfg.steps > 1 and (cfg.theta_max - cfg.theta_min) / cfg.steps < 0.05:
        log.info("violation: %s", json.dumps(violation_report(curve).to_dict()))
    return EXIT_OK


def _emit_scenes(cfg: RunConfig, geometry: SceneGeometry) -> None:
    """Input scene plus sigma_z(x)sigma_x and sigma_x(x)sigma_x outputs for each member."""
    out_dir = Path(cfg.emit_scenes)
    try:
        out_dir.mkdir(parents=True, exist_ok=True)
    except OSError as exc:
        raise ConfigError(f"cannot create {out_dir}: {exc}") from None
    phi_h = phi_for_theta(math.pi / 2, cfg.table1_literal)
    for k, (psi, _) in enumerate(mixture_members(cfg.q)):
        scene = encode_two_qubit(psi, geometry)
        zx = propagate_4f(scene, [grating_for(phi_h, geometry, QUBIT_B)], PhasePlate(qubit_b=True))
        xx = propagate_4f(scene, [grating_for(phi_h, geometry, QUBIT_A),
                                  grating_for(phi_h, geometry, QUBIT_B)], PhasePlate(True, True))
        for tag, s in (("input", scene), ("zx", zx), ("xx", xx)):
            emitters.write_pgm(intensity_image(s), out_dir / f"member{k}_{tag}.pgm")


def cmd_single(args: argparse.Namespace) -> int:
    cfg = build_config(args)
    geometry = cfg.validate()
    theta = args.theta
    lines = [f"q={cfg.q:g} theta={theta:.9g} phi_B={phi_for_theta(theta, cfg.table1_literal):.9g}",
             f"{'backend':<9} {'E_AB':>13} {'E_AC':>13} {'E_CB':>13} {'O':>13} {'O_theory':>13}"]
    for backend in Backend:
        r = bell_point(cfg.q, theta, backend, geometry, cfg.table1_literal)
        lines.append(f"{backend.value:<9} {r.e_ab:13.9f} {r.e_ac:13.9f} {r.e_cb:13.9f} "
                     f"{r.o:13.9f} {r.o_theory:13.9f}")
    if args.shots:
        lines.append(f"shot estimates (matrix backend, n={args.shots}, seed={cfg.seed}):")
        lines.extend(_shot_lines(cfg.q, theta, args.shots, cfg.seed, cfg.table1_literal))
    _write_text("\n".join(lines) + "\n", cfg.out)
    return EXIT_OK


def _shot_lines(q: float, theta: float, shots: int, seed: int, literal: bool) -> list[str]:
    """Sample each member's joint distribution, weight the estimates by the mixture."""
    import numpy as np

    from .experiment import matrix_operator
    from .optics import two_qubit_transfer
    from .quantum import SIGMA_X, SIGMA_Z, observable_from_angle

    b = observable_from_angle(theta)
    out = []
    for label, oa, ob in (("E_AB", SIGMA_X, b), ("E_AC", SIGMA_X, SIGMA_Z), ("E_CB", SIGMA_Z, b)):
        est, var = 0.0, 0.0
        for k, (psi, w) in enumerate(mixture_members(q)):
            amps = two_qubit_transfer(matrix_operator(oa, literal), matrix_operator(ob, literal)) @ psi
            s = sample_shots(joint_probabilities(np.abs(amps) ** 2), shots, seed + k)
            est += w * s.estimate
            var += (w * s.std_error) ** 2
        out.append(f"  {label} = {est:.6f} +- {math.sqrt(var):.6f}")
    return out


def cmd_grating(args: argparse.Namespace) -> int:
    cfg = build_config(args)
    geometry = cfg.validate()
    p = geometry.grating_half_period
    g = GratingSpec(phi=args.phi, p=p, f_c=args.f_c * p, orientation=QUBIT_B)
    coeffs = order_amplitudes(g, args.n_max)
    lines = [f"phi={g.phi:.9g} p={p:.9g} f_c={g.f_c:.9g}",
             f"{'n':>3} {'|C_n|':>13} {'arg C_n':>13}"]
    for n, c in coeffs.items():
        lines.append(f"{n:>3} {abs(c):13.9f} {math.atan2(c.imag, c.real):13.9f}")
    lines.append(f"closed form: |C_0| = {abs(math.cos(g.phi / 2)):.9f}, "
                 f"|C_+-1| = {2 / math.pi * abs(math.sin(g.phi / 2)):.9f}")
    _write_text("\n".join(lines) + "\n", cfg.out)
    if args.pgm:
        gratings = [g]
        if args.phi_a is not None:
            gratings.append(GratingSpec(phi=args.phi_a, p=p, f_c=args.f_c * p, orientation=QUBIT_A))
        try:
            emitters.write_pgm(phase_image(grating_phase_profile(gratings, geometry)), args.pgm)
        except OSError as exc:
            raise ConfigError(f"cannot write {args.pgm}: {exc}") from None
    return EXIT_OK


def cmd_validate(args: argparse.Namespace) -> int:
    from .validation import format_line, report, run_checks

    cfg = build_config(args)
    geometry = cfg.validate()
    results = run_checks(geometry, cfg.table1_literal, steps=args.steps, seed=cfg.seed,
                         include_physical=not args.skip_physical)
    rep = report(results, geometry, cfg.table1_literal)
    for r in results:
        print(format_line(r), file=sys.stderr)
    _write_text(json.dumps(rep, indent=2) + "\n", cfg.out)
    return EXIT_OK if rep["passed"] else EXIT_VALIDATION


def cmd_scene(args: argparse.Namespace) -> int:
    cfg = build_config(args)
    geometry = cfg.validate()
    try:
        psi = named_state(args.state)
    except ValueError as exc:
        raise ConfigError(str(exc)) from None
    scene = encode_two_qubit(psi, geometry)
    try:
        emitters.write_pgm(intensity_image(scene), args.output)
    except OSError as exc:
        raise ConfigError(f"cannot write {args.output}: {exc}") from None
    i = region_intensities(scene)
    print("region intensities (00, 01, 10, 11): " + ", ".join(f"{x:.6g}" for x in i), file=sys.stderr)
    return EXIT_OK


# --- parser ---------------------------------------------------------------

def _add_common(p: argparse.ArgumentParser, out: bool = True) -> None:
    p.add_argument("--config", help="JSON config file; flags override its values")
    p.add_argument("--N", type=int, help="samples per axis (power of two, >= 256)")
    p.add_argument("--L", type=float, help="plane width (defaults to N * 0.5)")
    p.add_argument("--a", type=float, help="slice-center offset")
    p.add_argument("--b", type=float, help="slice width")
    p.add_argument("--table1-literal", action="store_true",
                   help="use tan(phi/2) = (2/pi) tan(theta/2) instead of the balanced depth")
    p.add_argument("--seed", type=int)
    if out:
        p.add_argument("--out", help="output path ('-' for stdout)")


def build_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(prog="optbell", description=__doc__.splitlines()[0])
    parser.add_argument("-v", "--verbose", action="store_true")
    sub = parser.add_subparsers(dest="command", required=True)

    p = sub.add_parser("sweep", help="<O>(theta) curve as CSV")
    _add_common(p)
    p.add_argument("--q", type=float)
    p.add_argument("--backend", choices=[b.value for b in Backend])
    p.add_argument("--steps", type=int)
    p.add_argument("--theta-min", type=float)
    p.add_argument("--theta-max", type=float)
    p.add_argument("--svg", help="also write an SVG plot here")
    p.add_argument("--emit-scenes", metavar="DIR", help="write PGM input/output scenes here")
    p.set_defaults(func=cmd_sweep)

    p = sub.add_parser("single", help="one (q, theta) through every backend")
    _add_common(p)
    p.add_argument("--q", type=float)
    p.add_argument("--theta", type=float, required=True)
    p.add_argument("--shots", type=int, default=0, help="add shot-noise estimates")
    p.set_defaults(func=cmd_single)

    p = sub.add_parser("grating", help="diffraction-order amplitudes for a depth phi")
    _add_common(p)
    p.add_argument("--phi", type=float, required=True)
    p.add_argument("--f-c", type=float, default=-0.5, help="pulse center in units of p")
    p.add_argument("--n-max", type=int, default=3)
    p.add_argument("--phi-a", type=float, help="add an orthogonal grating to the PGM")
    p.add_argument("--pgm", help="write the grating phase profile as PGM")
    p.set_defaults(func=cmd_grating)

    p = sub.add_parser("validate", help="cross-backend invariant suite (JSON report)")
    _add_common(p)
    p.add_argument("--steps", type=int, default=64)
    p.add_argument("--skip-physical", action="store_true")
    p.set_defaults(func=cmd_validate)

    p = sub.add_parser("scene", help="PGM image of an encoded state")
    _add_common(p, out=False)
    p.add_argument("state", help="bell, mixed00, mixed11 or a basis label (00, 01, 10, 11)")
    p.add_argument("output", help="PGM path")
    p.set_defaults(func=cmd_scene)
    return parser


def main(argv: Optional[Sequence[str]] = None) -> int:
    parser = build_parser()
    args = parser.parse_args(argv)
    logging.basicConfig(level=logging.INFO if args.verbose else logging.WARNING,
                        format="%(levelname)s %(message)s")
    try:
        return args.func(args)
    except ConfigError as exc:
        print(f"optbell: error: {exc}", file=sys.stderr)
        return EXIT_CONFIG


if __name__ == "__main__":
    sys.exit(main())
