"""Command-line front end.

Every command writes into ``--out`` (default ``$QUSIX_OUT`` or ``.``) and
records a ``manifest.json`` with SHA-256 hashes of the files it produced.
Exit codes: 0 success, 1 validation failure, 2 usage error.
"""

from __future__ import annotations

import argparse
import hashlib
import json
import os
import sys
import time
from pathlib import Path

import numpy as np

from . import __version__

EXIT_OK, EXIT_FAIL, EXIT_USAGE = 0, 1, 2


class UsageError(Exception):
    pass


class Run:
    """Output directory plus the manifest of what was written into it."""

    def __init__(self, out: Path, command: str, params: dict, seed=None):
        self.out = out
        self.out.mkdir(parents=True, exist_ok=True)
        self.command = command
        self.params = params
        self.seed = seed
        self.started = time.time()
        self.files: list[Path] = []

    def path(self, name: str) -> Path:
        p = self.out / name
        self.files.append(p)
        return p

    def write_text(self, name: str, text: str) -> Path:
        p = self.path(name)
        p.write_text(text)
        return p

    def write_json(self, name: str, doc) -> Path:
        return self.write_text(name, json.dumps(doc, indent=2, sort_keys=True) + "\n")

    def add(self, *paths: Path):
        self.files.extend(Path(p) for p in paths)

    def finish(self) -> Path:
        seen, outputs = set(), []
        for p in self.files:
            if p in seen:
                continue
            seen.add(p)
            outputs.append({"path": p.name, "sha256": sha256(p)})
        manifest = {
            "command": self.command,
            "parameters": self.params,
            "seed": self.seed,
            "version": __version__,
            "started": self.started,
            "finished": time.time(),
            "outputs": outputs,
        }
        mp = self.out / "manifest.json"
        mp.write_text(json.dumps(manifest, indent=2, sort_keys=True) + "\n")
        return mp


def sha256(path) -> str:
    return hashlib.sha256(Path(path).read_bytes()).hexdigest()


def verify_manifest(path) -> list[str]:
    """Names of listed outputs that are missing or whose hash changed."""
    path = Path(path)
    doc = json.loads(path.read_text())
    bad = []
    for entry in doc["outputs"]:
        p = path.parent / entry["path"]
        if not p.exists() or sha256(p) != entry["sha256"]:
            bad.append(entry["path"])
    return bad


def _grid(args):
    from .kinoform import KINOFORM_GRID
    from .optics import GridSpec

    try:
        return GridSpec(args.grid_size or KINOFORM_GRID.n, args.window or KINOFORM_GRID.window)
    except ValueError as exc:
        raise UsageError(str(exc)) from None


def cmd_bases(args) -> int:
    from .mub import dumps, mub_set_for_dim, verify_mub_set

    if args.dim < 1:
        raise UsageError(f"--dim must be a positive integer, got {args.dim}")
    s = mub_set_for_dim(args.dim)
    rep = verify_mub_set(s, args.tol)
    run = Run(args.out, "bases", {"dim": args.dim, "tol": args.tol})
    run.write_text(f"bases_d{args.dim}.json", dumps(s, indent=2) + "\n")
    run.write_json(
        f"verify_d{args.dim}.json",
        {
            "dim": s.dim,
            "bases": s.labels,
            "passed": rep.passed,
            "max_deviation": rep.max_deviation,
            "location": list(rep.location),
            "tol": rep.tol,
        },
    )
    run.finish()
    print(f"d={s.dim} bases={','.join(s.labels)} max_dev={rep.max_deviation:.3e} "
          f"{'PASS' if rep.passed else 'FAIL'}")
    return EXIT_OK if rep.passed else EXIT_FAIL


def cmd_kinoform(args) -> int:
    from .kinoform import (
        TargetMode,
        first_order,
        gaussian_beam,
        kinoform_png,
        make_kinoform,
    )
    from .optics import field_overlap, intensity_png, phase_map, phase_png, save_raw, synthesize_mode
    from .states import UnknownStateError, parse_coeffs, resolve_superposition

    if (args.state is None) == (args.coeffs is None):
        raise UsageError("give exactly one of --state or --coeffs")
    try:
        sup = resolve_superposition(args.state, args.encoding) if args.state else parse_coeffs(args.coeffs)
    except UnknownStateError as exc:
        raise UsageError(f"unknown state label: {exc.args[0]}") from None
    except ValueError as exc:
        raise UsageError(str(exc)) from None
    spec = _grid(args)
    ideal = synthesize_mode(sup, spec)
    k = make_kinoform(TargetMode.from_field(ideal), args.grating_period, spec)
    run = Run(args.out, "kinoform", {
        "state": args.state, "coeffs": args.coeffs, "encoding": args.encoding,
        "grating_period": args.grating_period, "grid_size": spec.n, "window": spec.window,
        "simulate": args.simulate, "input": args.input,
    })
    kinoform_png(k, run.path("kinoform.png"))
    run.add(*save_raw(k.phase, spec, run.path("kinoform.f32"), grating_period=k.grating_period))
    intensity_png(ideal, run.path("intensity.png"))
    phase_png(phase_map(ideal), run.path("phase.png"))
    report = {"terms": [[m, [c.real, c.imag]] for m, c in sup.terms]}
    if args.simulate:
        inp = gaussian_beam(spec) if args.input == "gaussian" else None
        g, eff = first_order(k, inp)
        report["fidelity"] = field_overlap(ideal, g)
        report["first_order_efficiency"] = eff
        intensity_png(g, run.path("generated_intensity.png"))
        phase_png(phase_map(g), run.path("generated_phase.png"))
        print(f"fidelity={report['fidelity']:.6f} efficiency={eff:.4f}")
    run.write_json("report.json", report)
    run.finish()
    return EXIT_OK


def cmd_experiment(args) -> int:
    from .experiment import matrix_csv, run_experiment
    from .states import qusix_encoding

    enc = qusix_encoding(args.encoding)
    res = run_experiment(enc, args.model, args.rate, args.exposure, args.seed, args.grating_period, _grid(args))
    run = Run(args.out, "experiment", {
        "encoding": args.encoding, "model": args.model, "rate": args.rate,
        "exposure": args.exposure, "grating_period": args.grating_period,
    }, seed=args.seed)
    labels = enc.labels
    run.write_text("P_ideal.csv", matrix_csv(res.ideal, labels))
    run.write_text("P_model.csv", matrix_csv(res.model_matrix, labels))
    run.write_text("P_hat.csv", matrix_csv(res.estimate, labels))
    run.write_text("counts.csv", matrix_csv(res.counts.counts, labels, "{:d}"))
    run.write_json("summary.json", res.summary())
    run.finish()
    print(f"S={res.S:.6f}")
    return EXIT_OK


def _tomography_rows(args, enc, ps):
    """Yield ``(state, counts_list)`` pairs, one count vector per repeat."""
    from .tomography import pure_density, simulate_counts

    if args.counts:
        from .tomography import read_counts_csv

        state = enc.state(args.state) if args.state else None
        yield state, [read_counts_csv(Path(args.counts).read_text(), ps)]
        return
    for i, s in enumerate(enc.states):
        rho = pure_density(s.vector)
        if args.simulate == "noiseless":
            yield s, [simulate_counts(rho, ps, args.rate, args.exposure)]
        else:
            reps = []
            for r in range(args.repeats):
                rng = np.random.default_rng([args.seed, i, r])
                reps.append(simulate_counts(rho, ps, args.rate, args.exposure, rng))
            yield s, reps


def cmd_tomography(args) -> int:
    from .states import UnknownStateError, qusix_encoding
    from .tomography import (
        TomographyError,
        build_projector_set,
        density_csv,
        density_json,
        fidelity,
        mle_reconstruction,
    )

    enc = qusix_encoding("hybrid")
    ps = build_projector_set()
    run = Run(args.out, "tomography", {
        "counts": args.counts, "state": args.state, "simulate": args.simulate, "rate": args.rate,
        "exposure": args.exposure, "repeats": args.repeats,
    }, seed=args.seed)
    table = ["basis,state,label,fidelity,spread"]
    means = []
    try:
        for s, reps in _tomography_rows(args, enc, ps):
            fits = [mle_reconstruction(c, ps) for c in reps]
            tag = s.label.replace(":", "_") if s else "input"
            fids = [fidelity(f.rho, s.vector) for f in fits] if s else []
            extra = {"iterations": fits[0].iterations, "loglik": fits[0].loglik}
            if fids:
                extra["fidelity"] = fids[0]
                means.append(float(np.mean(fids)))
            run.write_text(f"rho_{tag}.json", density_json(fits[0].rho, **extra) + "\n")
            run.write_text(f"rho_{tag}.csv", density_csv(fits[0].rho))
            if s:
                spread = float(np.std(fids, ddof=1)) if len(fids) > 1 else 0.0
                table.append(f"{s.label.split(':')[0]},{s.name},{s.label},{np.mean(fids):.6f},{spread:.6f}")
    except UnknownStateError as exc:
        raise UsageError(f"unknown state label: {exc.args[0]}") from None
    except TomographyError as exc:
        print(f"error: {exc}", file=sys.stderr)
        return EXIT_FAIL
    if means:
        table.append(f",Average Fidelity,,{np.mean(means):.6f},{np.std(means, ddof=1) / np.sqrt(len(means)) if len(means) > 1 else 0.0:.6f}")
        run.write_text("fidelity_table.csv", "\n".join(table) + "\n")
        print(f"mean fidelity={np.mean(means):.6f} over {len(means)} states")
    if args.plot:
        _plot_densities(run)
    run.finish()
    return EXIT_OK


def _plot_densities(run: Run):
    """Real/imaginary bar charts for each reconstructed matrix."""
    import matplotlib

    matplotlib.use("Agg")
    import matplotlib.pyplot as plt

    for p in [p for p in run.files if p.name.startswith("rho_") and p.suffix == ".json"]:
        doc = json.loads(p.read_text())
        fig = plt.figure(figsize=(8, 4))
        for k, key in enumerate(("rho_re", "rho_im")):
            ax = fig.add_subplot(1, 2, k + 1, projection="3d")
            m = np.array(doc[key])
            xs, ys = np.meshgrid(np.arange(m.shape[0]), np.arange(m.shape[1]), indexing="ij")
            ax.bar3d(xs.ravel(), ys.ravel(), np.zeros(m.size), 0.6, 0.6, m.ravel(), shade=True)
            ax.set_title("Re" if k == 0 else "Im")
            ax.set_zlim(-0.5, 1.0)
        fig.savefig(run.path(p.stem + ".png"), dpi=80)
        plt.close(fig)


def cmd_search(args) -> int:
    from .mub import MubSet, mub_set_for_dim, oam_qutrit_mubs, polarization_mubs, qusix_mubs
    from .search import SearchConfig, search_extension_vector, search_full_mub_set, search_report

    try:
        cfg = SearchConfig(args.restarts, args.max_iterations, args.tol, args.seed)
    except ValueError as exc:
        raise UsageError(str(exc)) from None
    run = Run(args.out, "search", {
        "dim": args.dim, "extend": args.extend, "full": args.full, "restarts": args.restarts,
        "max_iterations": args.max_iterations, "tol": args.tol,
    }, seed=args.seed)
    if args.full:
        res = search_full_mub_set(args.dim, args.full, cfg)
        doc = {
            "dim": args.dim, "target_count": args.full, "restarts": args.restarts,
            "best_residual": res.residual, "converged": res.converged,
            "bases": [[[[z.real, z.imag] for z in col] for col in b.matrix.T] for b in res.bases],
        }
        run.write_json("search.json", doc)
        run.finish()
        print(f"d={args.dim} bases={args.full} best_residual={res.residual:.3e}")
        return EXIT_OK
    pool = {b.label: b for s in (polarization_mubs(), oam_qutrit_mubs(), qusix_mubs(), mub_set_for_dim(args.dim))
            for b in s.bases if b.dim == args.dim}
    labels = [x.strip() for x in (args.extend or "").split(",") if x.strip()]
    if not labels:
        raise UsageError("--extend needs at least one basis label")
    unknown = [x for x in labels if x not in pool]
    if unknown:
        raise UsageError(f"unknown basis label(s) for d={args.dim}: {', '.join(unknown)}")
    s = MubSet(args.dim, tuple(pool[x] for x in labels))
    res = search_extension_vector(s, cfg)
    run.write_json("search.json", search_report(s, res))
    run.finish()
    print(f"d={args.dim} extend={','.join(labels)} best_residual={res.residual:.3e}")
    return EXIT_OK


def build_parser() -> argparse.ArgumentParser:
    p = argparse.ArgumentParser(prog="qusix", description=__doc__.splitlines()[0])
    p.add_argument("--version", action="version", version=__version__)
    sub = p.add_subparsers(dest="command", required=True)

    def common(sp):
        sp.add_argument("--out", type=Path, default=Path(os.environ.get("QUSIX_OUT", ".")),
                        help="output directory (default: $QUSIX_OUT or .)")

    def optics(sp):
        sp.add_argument("--grating-period", type=float, default=16.0)
        sp.add_argument("--grid-size", type=int, default=None)
        sp.add_argument("--window", type=float, default=None, help="half-width in waists")

    b = sub.add_parser("bases", help="emit and verify a MUB set")
    b.add_argument("--dim", type=int, required=True)
    b.add_argument("--tol", type=float, default=1e-12)
    common(b)
    b.set_defaults(func=cmd_bases)

    k = sub.add_parser("kinoform", help="render a kinoform and the ideal mode")
    k.add_argument("--state", help="state label, e.g. O2:alpha1 or I:3")
    k.add_argument("--coeffs", help='explicit "charge:coeff" list, e.g. "-1:1,1:1"')
    k.add_argument("--encoding", choices=("hybrid", "pure-oam"), default="hybrid")
    k.add_argument("--simulate", action="store_true", help="simulate the first diffraction order")
    k.add_argument("--input", choices=("plane", "gaussian"), default="plane")
    optics(k)
    common(k)
    k.set_defaults(func=cmd_kinoform)

    e = sub.add_parser("experiment", help="18x18 probability matrices with shot noise")
    e.add_argument("--encoding", choices=("hybrid", "pure-oam"), default="hybrid")
    e.add_argument("--model", choices=("ideal", "simulated-optics"), default="ideal")
    e.add_argument("--rate", type=float, default=7000.0)
    e.add_argument("--exposure", type=float, default=1.0)
    e.add_argument("--seed", type=int, default=0)
    optics(e)
    common(e)
    e.set_defaults(func=cmd_experiment)

    t = sub.add_parser("tomography", help="72-projector reconstruction of the qusix states")
    t.add_argument("--counts", help="CSV of 'label,count' rows for one state")
    t.add_argument("--state", help="label of the state the counts belong to (for the fidelity)")
    t.add_argument("--simulate", choices=("noiseless", "poisson"), default="noiseless")
    t.add_argument("--rate", type=float, default=7000.0)
    t.add_argument("--exposure", type=float, default=1.0)
    t.add_argument("--repeats", type=int, default=1)
    t.add_argument("--seed", type=int, default=0)
    t.add_argument("--plot", action="store_true", help="draw Re/Im bar charts (needs matplotlib)")
    common(t)
    t.set_defaults(func=cmd_tomography)

    s = sub.add_parser("search", help="numerical search for unbiased extensions")
    s.add_argument("--dim", type=int, required=True)
    s.add_argument("--extend", help="comma-separated basis labels, e.g. O1,O2,O3")
    s.add_argument("--full", type=int, default=None, help="search this many bases from scratch instead")
    s.add_argument("--restarts", type=int, default=20)
    s.add_argument("--max-iterations", type=int, default=2000)
    s.add_argument("--tol", type=float, default=1e-10)
    s.add_argument("--seed", type=int, default=0)
    common(s)
    s.set_defaults(func=cmd_search)
    return p


def main(argv=None) -> int:
    parser = build_parser()
    try:
        args = parser.parse_args(argv)
    except SystemExit as exc:
        return int(exc.code or 0)
    try:
        return args.func(args)
    except UsageError as exc:
        print(f"qusix {args.command}: error: {exc}", file=sys.stderr)
        return EXIT_USAGE


if __name__ == "__main__":
    sys.exit(main())
