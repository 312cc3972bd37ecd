"""Command-line front end.

    qgscatter list
    qgscatter show Q
    qgscatter sweep "S(Q,X,Q)" --range 2 4 --samples 4001 --adaptive --out sqxq.csv
    qgscatter compare Q X
    qgscatter bands Q --tau 0.01
    qgscatter poles "S(X,X)" --im-max 0.5
    qgscatter peaks "S(Q,X,Q)" --range 2 4

Graph sources are catalog names, circuit expressions or ``@path`` to a
JSON graph document.  Output goes to stdout unless ``--out`` is given, in
which case it is written to a temporary file and renamed on success.
"""
from __future__ import annotations

import argparse
import json
import math
import os
import sys
import tempfile
from dataclasses import dataclass
from pathlib import Path
from typing import Sequence

from . import spectra
from .estimators import check_graph, check_range
from .graph import CATALOG, GraphError, build_named, graph_to_dict
from .linsolve import SingularMatrixError
from .rational import format_poly
from .scattering import SolverError, transmission_rational

__all__ = ["RunConfig", "build_parser", "main", "run"]

K_MAX = 4 * math.pi
COMMANDS = ("list", "show", "sweep", "compare", "bands", "poles", "peaks")


@dataclass(frozen=True)
class RunConfig:
    command: str
    sources: tuple[str, ...] = ()
    k_range: tuple[float, float] = (0.0, spectra.TWO_PI)
    samples: int = 2001
    adaptive: bool = False
    tau: float = 1e-2
    out: str | None = None
    format: str = "csv"
    jobs: int = 1
    im_max: float = math.inf
    min_height: float = 0.5

    def __post_init__(self):
        if self.command not in COMMANDS:
            raise ValueError(f"unknown command {self.command!r}")
        wanted = {"list": 0, "compare": 2}.get(self.command, 1)
        if len(self.sources) != wanted:
            raise ValueError(f"{self.command} takes {wanted} graph source(s), got {len(self.sources)}")
        check_range(*self.k_range, max_span=K_MAX)
        if self.samples < 2:
            raise ValueError("--samples must be at least 2")
        if not 0 < self.tau < 1:
            raise ValueError("--tau must lie in (0, 1)")
        if self.jobs < 1:
            raise ValueError("--jobs must be positive")


def build_parser() -> argparse.ArgumentParser:
    p = argparse.ArgumentParser(prog="qgscatter", description="Transmission through equilateral quantum graphs.")
    sub = p.add_subparsers(dest="command", required=True)

    def common(sp, n_sources: int, formats=("csv", "text")):
        if n_sources == 1:
            sp.add_argument("source", help="catalog name, circuit expression or @path")
        elif n_sources == 2:
            sp.add_argument("source_a")
            sp.add_argument("source_b")
        sp.add_argument("--out", help="output file (default stdout)")
        sp.add_argument("--format", choices=formats, default=formats[0])
        return sp

    def ranged(sp):
        sp.add_argument("--range", nargs=2, type=float, metavar=("LO", "HI"), dest="k_range")
        sp.add_argument("--samples", type=int, default=2001)
        sp.add_argument("--jobs", type=int, default=os.cpu_count() or 1)
        return sp

    common(sub.add_parser("list", help="catalog graphs with vertex and edge counts"), 0)

    common(sub.add_parser("show", help="exact T(z) and the graph document"), 1, formats=("json", "text"))

    sp = ranged(common(sub.add_parser("sweep", help="sample |T|^2 over a kl range"), 1))
    sp.add_argument("bounds", nargs="*", type=float, help="optional LO HI [N] instead of --range/--samples")
    sp.add_argument("--adaptive", action="store_true")

    sp = ranged(common(sub.add_parser("compare", help="difference of two spectra and its zero crossings"), 2))
    sp.add_argument("--adaptive", action="store_true", help=argparse.SUPPRESS)

    sp = ranged(common(sub.add_parser("bands", help="suppression bands below --tau"), 1))
    sp.add_argument("--tau", type=float, default=1e-2)

    sp = common(sub.add_parser("poles", help="resonance poles of the exact T"), 1)
    sp.add_argument("--range", nargs=2, type=float, metavar=("LO", "HI"), dest="k_range")
    sp.add_argument("--im-max", type=float, default=math.inf)

    sp = ranged(common(sub.add_parser("peaks", help="transmission peaks with FWHM"), 1))
    sp.add_argument("--min-height", type=float, default=0.5)
    return p


def config_from_args(ns: argparse.Namespace) -> RunConfig:
    if ns.command == "compare":
        sources = (ns.source_a, ns.source_b)
    elif ns.command == "list":
        sources = ()
    else:
        sources = (ns.source,)
    k_range = tuple(ns.k_range) if getattr(ns, "k_range", None) else (0.0, spectra.TWO_PI)
    samples = getattr(ns, "samples", 2001)
    bounds = getattr(ns, "bounds", None) or []
    if bounds:
        if len(bounds) not in (2, 3):
            raise ValueError("positional bounds must be LO HI [N]")
        k_range = (bounds[0], bounds[1])
        if len(bounds) == 3:
            if bounds[2] != int(bounds[2]):
                raise ValueError("sample count must be an integer")
            samples = int(bounds[2])
    return RunConfig(
        command=ns.command,
        sources=sources,
        k_range=k_range,
        samples=samples,
        adaptive=getattr(ns, "adaptive", False),
        tau=getattr(ns, "tau", 1e-2),
        out=ns.out,
        format=ns.format,
        jobs=getattr(ns, "jobs", 1),
        im_max=getattr(ns, "im_max", math.inf),
        min_height=getattr(ns, "min_height", 0.5),
    )


# -- commands -----------------------------------------------------------------

def _fmt(x: float) -> str:
    return f"{x:.12g}"


def _text_table(header: Sequence[str], rows) -> str:
    lines = ["# " + " ".join(header)]
    lines += [" ".join(_fmt(x) if isinstance(x, float) else str(x) for x in row) for row in rows]
    return "\n".join(lines) + "\n"


def cmd_list(cfg: RunConfig) -> str:
    rows = [(n, len(g.vertices), len(g.edges)) for n, g in ((n, build_named(n)) for n in CATALOG)]
    if cfg.format == "csv":
        return "name,vertices,edges\n" + "".join(f"{n},{v},{e}\n" for n, v, e in rows)
    return "".join(f"{n} {v} {e}\n" for n, v, e in rows)


def cmd_show(cfg: RunConfig) -> str:
    g = check_graph(cfg.sources[0])
    if not g.is_neumann_kirchhoff():
        raise GraphError("closed form needs Neumann-Kirchhoff vertices (all alpha = 0)")
    T = transmission_rational(g)
    if cfg.format == "text":
        return (f"graph {g.name or cfg.sources[0]}: {len(g.vertices)} vertices, {len(g.edges)} edges\n"
                f"T(z) = {T}\n")
    doc = {
        "name": g.name or cfg.sources[0],
        "transmission": {
            "text": str(T),
            "num": [str(c) for c in T.num.coeffs],
            "den": [str(c) for c in T.den.coeffs],
            "num_text": format_poly(T.num),
            "den_text": format_poly(T.den),
        },
        "graph": graph_to_dict(g),
    }
    return json.dumps(doc, indent=2) + "\n"


def _sweep(cfg: RunConfig, source: str) -> spectra.Spectrum:
    g = check_graph(source)
    return spectra.sweep(g, *cfg.k_range, cfg.samples, cfg.adaptive, jobs=cfg.jobs)


def cmd_sweep(cfg: RunConfig) -> str:
    s = _sweep(cfg, cfg.sources[0])
    if cfg.format == "csv":
        return spectra.spectrum_to_csv(s)
    return _text_table(("kl", "t2", "refined"), ((float(k), float(t), int(r)) for k, t, r in zip(s.kl, s.t2, s.refined)))


def cmd_compare(cfg: RunConfig) -> str:
    sa, sb = (_sweep(cfg, src) for src in cfg.sources)
    d = spectra.difference(sa, sb)
    xs = spectra.zero_crossings(d)
    if cfg.format == "csv":
        return spectra.delta_to_csv(d, xs)
    return _text_table(("crossing",), ((float(x),) for x in xs))


def cmd_bands(cfg: RunConfig) -> str:
    bands = spectra.suppression_bands(_sweep(cfg, cfg.sources[0]), cfg.tau)
    if cfg.format == "csv":
        return spectra.bands_to_csv(bands)
    return _text_table(("lo", "hi", "max_t2", "threshold"), ((b.lo, b.hi, b.max_t2_inside, b.threshold) for b in bands))


def cmd_poles(cfg: RunConfig) -> str:
    rs = spectra.find_poles(check_graph(cfg.sources[0]), cfg.k_range, cfg.im_max)
    if cfg.format == "csv":
        return spectra.resonances_to_csv(rs)
    return _text_table(("re_kl", "im_kl", "width", "residual"),
                       ((r.kl_complex.real, r.kl_complex.imag, r.width, r.residual) for r in rs))


def cmd_peaks(cfg: RunConfig) -> str:
    peaks = spectra.find_peaks(check_graph(cfg.sources[0]), cfg.k_range, cfg.min_height,
                               n_base=cfg.samples, jobs=cfg.jobs)
    if cfg.format == "csv":
        return spectra.peaks_to_csv(peaks)
    return _text_table(("kl", "t2", "fwhm"), ((p.kl, p.t2, p.fwhm) for p in peaks))


_DISPATCH = {
    "list": cmd_list,
    "show": cmd_show,
    "sweep": cmd_sweep,
    "compare": cmd_compare,
    "bands": cmd_bands,
    "poles": cmd_poles,
    "peaks": cmd_peaks,
}


def write_output(text: str, out: str | None, stream=None) -> None:
    if out is None:
        (stream or sys.stdout).write(text)
        return
    target = Path(out)
    fd, tmp = tempfile.mkstemp(prefix=f".{target.name}.", dir=target.parent or ".")
    try:
        with os.fdopen(fd, "w", newline="") as fh:
            fh.write(text)
        os.replace(tmp, target)
    except BaseException:
        Path(tmp).unlink(missing_ok=True)
        raise


def run(cfg: RunConfig) -> str:
    return _DISPATCH[cfg.command](cfg)


def main(argv: Sequence[str] | None = None) -> int:
    parser = build_parser()
    ns = parser.parse_args(argv)
    try:
        cfg = config_from_args(ns)
        write_output(run(cfg), cfg.out)
    except (GraphError, ValueError, TypeError, SolverError, SingularMatrixError, OSError, ZeroDivisionError) as exc:
        print(f"qgscatter {ns.command}: error: {exc}", file=sys.stderr)
        return 1
    return 0


if __name__ == "__main__":
    sys.exit(main())
