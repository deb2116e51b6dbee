"""Command-line pipelines: construct, verify, compute spectra, compare
against limit laws, and emit CSV/JSON/SVG with a digest manifest.

Exit codes: 0 success, 1 bad configuration, 2 size budget exceeded,
3 a requested verification failed.
"""

from __future__ import annotations

import argparse
import hashlib
import json
import math
import os
import sys
import time
from dataclasses import dataclass, field as dc_field
from pathlib import Path
from typing import Optional

import numpy as np

from . import __version__
from .errors import (
    BadCongruence,
    BadParameter,
    CayleySumError,
    CheckFailed,
    CompositeModulus,
    EmptySet,
    FieldMismatch,
    NotPrimeField,
    SizeExceeded,
    WrongFamily,
)
from .ffield import make_field
from . import sidon as sd
from . import cayley as cg
from . import spectrum as sp
from . import dist as ds
from . import expsum as es
from . import render

PARTIAL_SUM_BOUND_CONST = 1.25  # calibrated: max observed ratio 1.148 (p <= 503)

_CONFIG_ERRORS = (
    BadParameter,
    BadCongruence,
    CompositeModulus,
    FieldMismatch,
    NotPrimeField,
    EmptySet,
    WrongFamily,
)


# ---------------------------------------------------------------------------
# configuration and manifest
# ---------------------------------------------------------------------------

@dataclass
class ExperimentConfig:
    family: str
    p: int = 0
    n: int = 1
    t: float = 0.5
    seed: int = 1
    bins: int = 60
    out: Path = Path(".")
    fmt: str = "json"
    checks: tuple[str, ...] = ()
    allow_large: bool = False
    law: Optional[str] = None
    samples: int = 100_000
    degree: int = 0
    er_n: int = 0

    def validate(self):
        families = ("kloosterman", "birch", "kt", "kplus", "er")
        if self.family not in families:
            raise BadParameter(f"family must be one of {families}")
        if self.family == "er":
            if self.er_n < 2 or self.degree < 1:
                raise BadParameter("random-graph runs need --n-vertices and --degree")
            if self.er_n > 2048 and not self.allow_large:
                raise SizeExceeded("pass --allow-large for random graphs beyond n = 2048")
            return
        if self.p < 2:
            raise BadParameter("a prime p is required")
        field = make_field(self.p, self.n)  # raises on composite/oversize
        if self.family == "kt" and not 0 < self.t <= 1:
            raise BadParameter("kt needs t in (0, 1]")
        if self.family in ("kt", "kplus") and self.n != 1:
            raise NotPrimeField(f"{self.family} is defined over prime fields")
        if self.family == "kplus" and self.p % 4 != 3:
            raise BadCongruence(f"kplus needs p = 3 mod 4, got {self.p}")
        if field.q > 1500 and not self.allow_large:
            raise SizeExceeded(f"pass --allow-large for q = {field.q} > 1500")
        if self.samples > 2_000_000 and not self.allow_large:
            raise SizeExceeded("pass --allow-large for more than 2e6 samples")

    def echo(self) -> dict:
        d = {
            "family": self.family, "p": self.p, "n": self.n, "seed": self.seed,
            "bins": self.bins, "format": self.fmt, "checks": list(self.checks),
            "allow_large": self.allow_large, "samples": self.samples,
        }
        if self.family == "kt":
            d["t"] = self.t
        if self.family == "er":
            d["n_vertices"] = self.er_n
            d["degree"] = self.degree
        if self.law:
            d["law"] = self.law
        return d


class RunManifest:
    """Config echo, per-stage timings, summary statistics and the sha256
    digests of every emitted file."""

    def __init__(self, command: str, config: ExperimentConfig):
        self.data = {
            "command": command,
            "config": config.echo(),
            "version": __version__,
            "timings": {},
            "summary": {},
            "files": {},
        }
        self._t0 = time.perf_counter()
        self._stage_start = self._t0

    def stage(self, name: str):
        now = time.perf_counter()
        self.data["timings"][name] = round(now - self._stage_start, 6)
        self._stage_start = now

    def add_file(self, path: Path):
        digest = hashlib.sha256(path.read_bytes()).hexdigest()
        self.data["files"][path.name] = digest

    def write(self, out_dir: Path):
        self.data["timings"]["total"] = round(time.perf_counter() - self._t0, 6)
        path = out_dir / "manifest.json"
        path.write_text(json.dumps(self.data, indent=2, sort_keys=True) + "\n")
        return path


def _out_dir(cfg: ExperimentConfig) -> Path:
    cfg.out.mkdir(parents=True, exist_ok=True)
    return cfg.out


def _write_json(path: Path, obj) -> None:
    path.write_text(json.dumps(obj, indent=2, sort_keys=True) + "\n")


def _write_rows(path: Path, rows) -> None:
    path.write_text("\n".join(rows) + "\n")


def _make_sum_set(cfg: ExperimentConfig) -> sd.SumSet:
    field = make_field(cfg.p, cfg.n)
    if cfg.family == "kloosterman":
        return sd.make_K(field)
    if cfg.family == "birch":
        return sd.make_B(field)
    if cfg.family == "kt":
        return sd.make_Kt(field, cfg.t)
    if cfg.family == "kplus":
        return sd.make_Kplus(field)
    raise BadParameter(f"no sum set for family {cfg.family}")


# ---------------------------------------------------------------------------
# checks
# ---------------------------------------------------------------------------

def _run_checks(cfg: ExperimentConfig, sum_set: sd.SumSet, graph: cg.CayleySumGraph) -> dict:
    """Run the requested verifications; each check records its findings and
    raises CheckFailed when a theory-backed expectation does not hold."""
    out: dict = {}
    char = sum_set.field.p
    zero = (0, 0)
    for check in cfg.checks:
        if check == "sidon":
            if cfg.family == "kloosterman":
                v = sd.is_symmetric_sidon(sum_set, zero)
                out["symmetric_sidon"] = v.holds
                if not v.holds:
                    raise CheckFailed("hyperbola set is not a symmetric Sidon set")
            elif cfg.family == "birch":
                v = sd.is_symmetric_sidon(sum_set, zero)
                out["symmetric_sidon"] = v.holds
                if v.holds != (char != 3):
                    raise CheckFailed("cubic-curve Sidon verdict disagrees with theory")
            elif cfg.family == "kt":
                v = sd.is_partial_symmetric_sidon(sum_set, zero)
                out["partial_symmetric_sidon"] = v.holds
                full = sd.is_sidon(sum_set)
                out["sidon"] = full.holds
                if not v.holds or (cfg.t <= 0.5 and not full.holds):
                    raise CheckFailed("partial hyperbola Sidon verdict disagrees with theory")
            elif cfg.family == "kplus":
                v = sd.is_sidon(sum_set)
                out["sidon"] = v.holds
                if not v.holds:
                    raise CheckFailed("residue hyperbola is not a Sidon set")
        elif check == "subgraphs":
            k23 = cg.count_K23(graph)
            c4 = cg.count_C4(graph)
            out["k23"] = k23
            out["c4"] = c4
            expect_k23_free = cfg.family in ("kloosterman", "kt", "kplus") or (
                cfg.family == "birch" and char != 3
            )
            if expect_k23_free and k23 != 0:
                raise CheckFailed(f"expected no K_2,3 subgraphs, found {k23}")
            expect_c4_free = (cfg.family == "kt" and cfg.t <= 0.5) or cfg.family == "kplus"
            if expect_c4_free and c4 != 0:
                raise CheckFailed(f"expected no 4-cycles, found {c4}")
        elif check == "weil":
            field = sum_set.field
            bound = 2 * math.sqrt(field.q) + 1e-6
            if cfg.family == "kloosterman":
                worst = es.kloosterman_table(field).max_abs_nontrivial()
            elif cfg.family == "birch":
                worst = es.birch_table(field).max_abs_nontrivial()
            else:
                meas = sp.spectrum_from_characters(sum_set)
                worst = meas.max_nontrivial_abs()
                if cfg.family == "kt":
                    bound = PARTIAL_SUM_BOUND_CONST * math.sqrt(field.q) * math.log(field.q)
            out["max_nontrivial"] = worst
            out["bound"] = bound
            if worst > bound:
                raise CheckFailed(f"eigenvalue bound violated: {worst} > {bound}")
        elif check == "oracle":
            meas = sp.spectrum_from_characters(sum_set)
            oracle = sp.spectrum_dense_oracle(graph)
            dev = float(np.abs(np.sort(meas.expand()) - oracle).max())
            out["oracle_max_dev"] = dev
            if dev > 1e-6:
                raise CheckFailed(f"character spectrum deviates from the oracle by {dev}")
        else:
            raise BadParameter(f"unknown check {check!r}")
    return out


# ---------------------------------------------------------------------------
# commands
# ---------------------------------------------------------------------------

def cmd_build(cfg: ExperimentConfig) -> int:
    cfg.validate()
    out_dir = _out_dir(cfg)
    manifest = RunManifest("build", cfg)
    sum_set = _make_sum_set(cfg)
    graph = cg.build(sum_set)
    manifest.stage("construct")
    summary = graph.summary()
    if graph.n <= 4096:
        rep = cg.structure_report(graph)
        summary["components"] = [
            {"size": c.size, "kind": c.kind, "label": c.label} for c in rep.components
        ]
        summary["components_tally"] = rep.tally()
    manifest.stage("structure")
    summary.update(_run_checks(cfg, sum_set, graph))
    manifest.stage("checks")
    path = out_dir / f"build_{cfg.family}_q{sum_set.field.q}.json"
    _write_json(path, summary)
    manifest.add_file(path)
    if cfg.fmt == "csv":
        set_path = out_dir / f"sumset_{cfg.family}_q{sum_set.field.q}.json"
        _write_json(set_path, sum_set.to_json_dict())
        manifest.add_file(set_path)
    manifest.write(out_dir)
    print(json.dumps(summary, sort_keys=True))
    return 0


def cmd_spectrum(cfg: ExperimentConfig, svg: bool = False, oracle: bool = False,
                 raw: bool = False) -> int:
    cfg.validate()
    out_dir = _out_dir(cfg)
    manifest = RunManifest("spectrum", cfg)
    sum_set = _make_sum_set(cfg)
    meas = sp.spectrum_from_characters(sum_set)
    manifest.stage("spectrum")
    summary = meas.meta()
    if oracle:
        oracle_vals = sp.spectrum_dense_oracle(cg.build(sum_set))
        dev = float(np.abs(np.sort(meas.expand()) - oracle_vals).max())
        summary["oracle_max_dev"] = dev
        manifest.stage("oracle")
        if dev > 1e-6:
            manifest.write(out_dir)
            raise CheckFailed(f"character spectrum deviates from the oracle by {dev}")
    out_meas = meas if raw else sp.normalized_spectrum(meas, exclude_trivial=True)
    stem = f"spectrum_{cfg.family}_q{sum_set.field.q}"
    csv_path = out_dir / f"{stem}.csv"
    _write_rows(csv_path, out_meas.csv_rows())
    manifest.add_file(csv_path)
    if svg:
        emp = ds.spectral_to_empirical(out_meas, exclude_trivial=False)
        lo, hi = float(emp.values[0]) - 0.1, float(emp.values[-1]) + 0.1
        law = ds.SemicircleLaw() if not raw and cfg.family in ("kloosterman", "birch") else None
        doc = render.svg_histogram(emp, cfg.bins, lo, hi, law=law,
                                   title=f"{cfg.family} q={sum_set.field.q}")
        svg_path = out_dir / f"{stem}.svg"
        svg_path.write_text(doc)
        manifest.add_file(svg_path)
    summary["distinct_normalized"] = int(len(out_meas.values))
    manifest.stage("emit")
    manifest.write(out_dir)
    print(json.dumps(summary, sort_keys=True))
    return 0


def _er_dist(cfg: ExperimentConfig, out_dir: Path, manifest: RunManifest) -> dict:
    p_edge = cfg.degree / (cfg.er_n - 1)
    rg = cg.sample_er(cfg.er_n, p_edge, cfg.seed)
    k23 = cg.count_K23(rg)
    manifest.stage("construct")
    evals = np.linalg.eigvalsh(rg.graph().adjacency_matrix())
    nontrivial = np.sort(evals)[:-1] / math.sqrt(cfg.degree)
    emp = ds.EmpiricalMeasure.from_samples(nontrivial)
    w1 = ds.w1_vs_law(emp, ds.SemicircleLaw())
    manifest.stage("spectrum")
    return {
        "n": cfg.er_n, "edge_probability": p_edge, "edges": len(rg.edges),
        "seed": cfg.seed, "k23": k23, "w1_semicircle": w1, "law": "semicircle",
    }


def cmd_dist(cfg: ExperimentConfig, moments: bool = False, append: bool = False,
             trunc: int | None = None) -> int:
    cfg.validate()
    out_dir = _out_dir(cfg)
    manifest = RunManifest("dist", cfg)
    if cfg.family == "er":
        summary = _er_dist(cfg, out_dir, manifest)
        q_label = f"er{cfg.er_n}"
    else:
        sum_set = _make_sum_set(cfg)
        meas = sp.spectrum_from_characters(sum_set)
        emp = ds.spectral_to_empirical(
            sp.normalized_spectrum(meas, exclude_trivial=True), exclude_trivial=False
        )
        manifest.stage("spectrum")
        law_kind = cfg.law or {
            "kloosterman": "semicircle", "birch": "semicircle",
            "kt": "kt-series", "kplus": "sc-plus-sa",
        }[cfg.family]
        summary = {"family": cfg.family, "q": sum_set.field.q, "law": law_kind}
        if law_kind in ("semicircle", "kesten-mckay"):
            law = ds.make_law(law_kind, d=len(sum_set))
            summary["w1"] = ds.w1_vs_law(emp, law)
        else:
            if law_kind == "kt-series":
                law = ds.KtSeriesLaw(cfg.t, trunc)
                summary["series_truncation"] = law.trunc
                summary["tail_std_bound"] = law.tail_std
            else:
                law = ds.make_law(law_kind)
            draws = law.sample(cfg.samples, cfg.seed)
            summary["w1"] = ds.w1_two_sample(emp, ds.EmpiricalMeasure.from_samples(draws))
            summary["samples"] = cfg.samples
            summary["seed"] = cfg.seed
        manifest.stage("w1")
        if moments:
            if cfg.family == "kloosterman":
                summary["m4"] = ds.m4_check(sum_set.field)
            e = ds.spectral_to_empirical(
                sp.normalized_spectrum(meas, True) if meas.norm == 1.0 else meas, False)
            summary["m2"] = ds.moment(e, 2)
            manifest.stage("moments")
        q_label = f"q{sum_set.field.q}"
    path = out_dir / f"dist_{cfg.family}_{q_label}.json"
    _write_json(path, summary)
    manifest.add_file(path)
    if append:
        trend = out_dir / "w1_trend.csv"
        if not trend.exists():
            trend.write_text("family,q,law,w1\n")
        with trend.open("a") as fh:
            fh.write(f"{cfg.family},{summary.get('q', cfg.er_n)},{summary['law']},"
                     f"{summary['w1']!r}\n")
        manifest.add_file(trend)
    manifest.write(out_dir)
    print(json.dumps(summary, sort_keys=True))
    return 0


def cmd_table(cfg: ExperimentConfig, kind: str, reduced: bool = False) -> int:
    cfg.validate()
    out_dir = _out_dir(cfg)
    manifest = RunManifest("table", cfg)
    field = make_field(cfg.p, cfg.n)
    if kind == "kloosterman":
        table = es.kloosterman_table(field)
    elif kind == "birch":
        table = es.birch_table(field)
    elif kind == "salie":
        table = es.salie_table(field)
    elif kind == "kt":
        table = es.partial_kloosterman_table(field, cfg.t)
    else:
        raise BadParameter(f"unknown table kind {kind!r}")
    manifest.stage("table")
    suffix = "_reduced" if reduced else ""
    path = out_dir / f"table_{kind}_q{field.q}{suffix}.csv"
    header = ["m,re,im"] if reduced else ["a,b,re,im"]
    _write_rows(path, header + list(table.csv_rows(reduced=reduced)))
    manifest.add_file(path)
    manifest.stage("emit")
    manifest.write(out_dir)
    print(json.dumps({"kind": kind, "q": field.q, "file": path.name,
                      "max_nontrivial": table.max_abs_nontrivial()}, sort_keys=True))
    return 0


FIGURE_PANELS = (
    [("kloosterman", p, 1) for p in (127, 251, 601, 1117)]
    + [("birch", p, 1) for p in (127, 251, 601, 1117)]
    + [("birch", 5, 4), ("birch", 2, 10)]  # finite-monodromy degenerate panels
)


def cmd_reproduce_figures(out: Path, bins: int = 60) -> int:
    cfg = ExperimentConfig(family="kloosterman", p=127, out=out, bins=bins,
                           allow_large=True)
    out_dir = _out_dir(cfg)
    manifest = RunManifest("reproduce-figures", cfg)
    summaries = []
    for family, p, n in FIGURE_PANELS:
        field = make_field(p, n)
        sum_set = sd.make_K(field) if family == "kloosterman" else sd.make_B(field)
        meas = sp.normalized_spectrum(sp.spectrum_from_characters(sum_set),
                                      exclude_trivial=True)
        emp = ds.spectral_to_empirical(meas, exclude_trivial=False)
        stem = f"figure_{family}_q{field.q}"
        csv_path = out_dir / f"{stem}.csv"
        _write_rows(csv_path, meas.csv_rows())
        manifest.add_file(csv_path)
        degenerate = field.p < 7 and family == "birch"
        law = None if degenerate else ds.SemicircleLaw()
        lo, hi = float(emp.values[0]) - 0.1, float(emp.values[-1]) + 0.1
        doc = render.svg_histogram(emp, bins, lo, hi, law=law,
                                   title=f"{family} q={field.q}")
        svg_path = out_dir / f"{stem}.svg"
        svg_path.write_text(doc)
        manifest.add_file(svg_path)
        summaries.append({
            "family": family, "q": field.q,
            "distinct_normalized": int(len(meas.values)),
            "degenerate": degenerate,
        })
        manifest.stage(stem)
    index_path = out_dir / "figures_index.json"
    _write_json(index_path, summaries)
    manifest.add_file(index_path)
    manifest.write(out_dir)
    print(json.dumps({"panels": len(FIGURE_PANELS), "out": str(out_dir)}, sort_keys=True))
    return 0


# ---------------------------------------------------------------------------
# argument parsing
# ---------------------------------------------------------------------------

def _default_out() -> Path:
    return Path(os.environ.get("CAYLEYSUM_OUT", "cayleysum_out"))


def _add_common(sub):
    sub.add_argument("--family", required=True,
                     choices=["kloosterman", "birch", "kt", "kplus", "er"])
    sub.add_argument("--p", type=int, default=0, help="field characteristic")
    sub.add_argument("--n", type=int, default=1, help="field extension degree")
    sub.add_argument("--t", type=float, default=0.5, help="partial-hyperbola fraction")
    sub.add_argument("--seed", type=int, default=1)
    sub.add_argument("--bins", type=int, default=60)
    sub.add_argument("--out", type=Path, default=None)
    sub.add_argument("--format", dest="fmt", choices=["json", "csv", "svg"], default="json")
    sub.add_argument("--allow-large", action="store_true")


def _cfg_from_args(args) -> ExperimentConfig:
    return ExperimentConfig(
        family=args.family,
        p=args.p,
        n=args.n,
        t=args.t,
        seed=args.seed,
        bins=args.bins,
        out=args.out if args.out is not None else _default_out(),
        fmt=args.fmt,
        checks=tuple(c for c in (args.check or "").split(",") if c) if hasattr(args, "check") else (),
        allow_large=args.allow_large,
        law=getattr(args, "law", None),
        samples=getattr(args, "samples", 100_000),
        degree=getattr(args, "degree", 0),
        er_n=getattr(args, "n_vertices", 0),
    )


def build_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(
        prog="cayleysum",
        description="Cayley sum graphs over finite fields: spectra, Sidon sets, limit laws",
    )
    parser.add_argument("--version", action="version", version=__version__)
    subs = parser.add_subparsers(dest="command", required=True)

    b = subs.add_parser("build", help="construct a graph and run combinatorial checks")
    _add_common(b)
    b.add_argument("--check", default="", help="comma list: sidon,subgraphs,weil,oracle")
    b.set_defaults(func=lambda a: cmd_build(_cfg_from_args(a)))

    s = subs.add_parser("spectrum", help="exact spectrum via character sums")
    _add_common(s)
    s.add_argument("--svg", action="store_true")
    s.add_argument("--oracle", action="store_true", help="cross-check the dense eigensolver")
    s.add_argument("--raw", action="store_true", help="emit unnormalized eigenvalues")
    s.set_defaults(func=lambda a: cmd_spectrum(_cfg_from_args(a), svg=a.svg,
                                               oracle=a.oracle, raw=a.raw))

    d = subs.add_parser("dist", help="Wasserstein/moment comparison against a limit law")
    _add_common(d)
    d.add_argument("--law", choices=["semicircle", "kesten-mckay", "kt-series",
                                     "sc-plus-sa", "salie-modulus"], default=None)
    d.add_argument("--samples", type=int, default=100_000)
    d.add_argument("--trunc", type=int, default=None,
                   help="series truncation override for --law kt-series")
    d.add_argument("--moments", action="store_true")
    d.add_argument("--append", action="store_true", help="append to w1_trend.csv")
    d.add_argument("--degree", type=int, default=0, help="target degree for --family er")
    d.add_argument("--n-vertices", type=int, default=0, help="vertex count for --family er")
    d.set_defaults(func=lambda a: cmd_dist(_cfg_from_args(a), moments=a.moments,
                                           append=a.append, trunc=a.trunc))

    t = subs.add_parser("table", help="dump an exponential-sum table as CSV")
    _add_common(t)
    t.add_argument("--kind", choices=["kloosterman", "birch", "salie", "kt"],
                   default="kloosterman")
    t.add_argument("--reduced", action="store_true", help="emit the m -> value column")
    t.set_defaults(func=lambda a: cmd_table(_cfg_from_args(a), kind=a.kind,
                                            reduced=a.reduced))

    r = subs.add_parser("reproduce-figures",
                        help="normalized-spectrum panels for the standard prime sweep")
    r.add_argument("--out", type=Path, default=None)
    r.add_argument("--bins", type=int, default=60)
    r.set_defaults(func=lambda a: cmd_reproduce_figures(
        a.out if a.out is not None else _default_out(), bins=a.bins))

    return parser


def main(argv=None) -> int:
    parser = build_parser()
    try:
        args = parser.parse_args(argv)
        return args.func(args)
    except _CONFIG_ERRORS as exc:
        print(f"error: {exc}", file=sys.stderr)
        return 1
    except SizeExceeded as exc:
        print(f"error: {exc}", file=sys.stderr)
        return 2
    except CheckFailed as exc:
        print(f"check failed: {exc}", file=sys.stderr)
        return 3


if __name__ == "__main__":
    sys.exit(main())
