"""Command-line interface: ``fesprint <command>``.

Machine-readable output (JSON/CSV) goes to stdout or the named output file;
diagnostics go to stderr. Exit status is 0 on success, 2 on invalid input or
usage, 1 on an unexpected internal error.
"""

import csv
import io
import json
import math
import os
import sys
from concurrent.futures import ThreadPoolExecutor
from pathlib import Path

import click

from . import analysis
from .config import PipelineConfig, load_config, spectrum_of
from .errors import FesError
from .fingerprint import BINARY, TERNARY, binary_fingerprint, local_slopes, read_fingerprint, ternary_fingerprint
from .ingest import FORMATS, load_timeseries, write_timeseries
from .spectral import WINDOWS, SEGMENT_DETRENDS, WelchConfig, read_spectrum, restrict_band, write_loglog, write_spectrum
from .synth import load_spec, synthesize

LIBRARY_ENV = "FES_LIBRARY"
DEFAULT_LIBRARY = Path.home() / ".fesprint" / "references.json"


class _Group(click.Group):
    def invoke(self, ctx):
        try:
            return super().invoke(ctx)
        except (click.exceptions.ClickException, click.exceptions.Exit, click.exceptions.Abort):
            raise
        except (FesError, FileNotFoundError) as exc:
            click.echo(f"error: {type(exc).__name__}: {exc}", err=True)
            ctx.exit(2)
        except Exception as exc:  # noqa: BLE001
            click.echo(f"internal error: {type(exc).__name__}: {exc}", err=True)
            ctx.exit(1)


def _dump(obj):
    return json.dumps(obj, indent=1)


def _is_spectrum_file(path):
    path = Path(path)
    if path.suffix.lower() == ".json":
        return True
    if path.suffix.lower() in (".bin", ".f64", ".raw"):
        return False
    with open(path, encoding="utf-8", errors="replace") as fh:
        for line in fh:
            text = line.strip()
            if not text or text.startswith("#"):
                continue
            return text.replace(" ", "") == "frequency_hz,psd"
    return False


def _resolve_config(config_path, **flags):
    cfg = load_config(config_path) if config_path else PipelineConfig()
    welch_flags = {
        "segment_length": flags.pop("segment_length", None),
        "overlap_fraction": flags.pop("overlap", None),
        "window": flags.pop("window", None),
        "per_segment_detrend": flags.pop("segment_detrend", None),
    }
    welch_flags = {k: v for k, v in welch_flags.items() if v is not None}
    if welch_flags:
        merged = {**cfg.welch.to_dict(), **welch_flags}
        cfg = cfg.updated(welch=WelchConfig.from_dict(merged))
    band = flags.pop("band", None)
    return cfg.updated(band=tuple(band) if band else None, **flags)


def pipeline_options(func):
    options = [
        click.option("--config", "config_path", type=click.Path(dir_okay=False), help="JSON pipeline config file."),
        click.option("--rate", type=float, help="Sample rate in Hz (required for time-series input)."),
        click.option("--format", "fmt", type=click.Choice(FORMATS), help="Time-series file format."),
        click.option("--band", nargs=2, type=float, help="Analysis band F_LO F_HI in Hz."),
        click.option("--n-bands", type=int, help="Number of sub-bands."),
        click.option("--tolerance", type=float, help="Ternary slope tolerance."),
        click.option("--detrend", "detrend_mode", type=click.Choice(["mean", "linear"])),
        click.option("--segment-length", type=int, help="Welch segment length (power of two)."),
        click.option("--overlap", type=float, help="Welch overlap fraction."),
        click.option("--window", type=click.Choice(sorted(WINDOWS))),
        click.option("--segment-detrend", type=click.Choice(sorted(SEGMENT_DETRENDS))),
    ]
    for opt in reversed(options):
        func = opt(func)
    return func


def _config_from(kw):
    return _resolve_config(
        kw.pop("config_path"),
        band=kw.pop("band"),
        n_bands=kw.pop("n_bands"),
        tolerance=kw.pop("tolerance"),
        detrend_mode=kw.pop("detrend_mode"),
        segment_length=kw.pop("segment_length"),
        overlap=kw.pop("overlap"),
        window=kw.pop("window"),
        segment_detrend=kw.pop("segment_detrend"),
    )


def _profile_from_file(path, cfg, rate, fmt, label=None):
    """Slope profile of a time-series or spectrum file."""
    path = Path(path)
    if not path.exists():
        raise FileNotFoundError(f"no such file: {path}")
    if _is_spectrum_file(path):
        sp = read_spectrum(path)
        profile = local_slopes(sp, cfg.partition())
    else:
        ts = load_timeseries(path, fmt, rate, label=label)
        cfg.check_nyquist(ts.sample_rate_hz)
        profile = local_slopes(spectrum_of(ts, cfg), cfg.partition())
    if label is not None or not profile.source_label:
        profile = type(profile)(profile.partition, profile.global_slope, profile.local_slopes, label or path.stem)
    return profile


def _library(ctx):
    path = ctx.obj.get("library") or os.environ.get(LIBRARY_ENV) or DEFAULT_LIBRARY
    return analysis.ReferenceLibrary.open(path)


def _resolve_reference(ctx, ref, cfg, rate, fmt):
    if Path(ref).exists():
        return _profile_from_file(ref, cfg, rate, fmt, label=Path(ref).stem)
    lib = _library(ctx)
    profile = lib.profile(ref)
    return type(profile)(profile.partition, profile.global_slope, profile.local_slopes, ref)


def _bar_text(fp, source):
    lines = [f"{source}: {fp.kind} fingerprint"]
    for i, lo, hi, s in fp.bar_rows():
        bar = {1: "    |####", -1: "####|    ", 0: "    |    "}[s]
        lines.append(f"  band {i}  {lo:>12.6g} - {hi:<12.6g} {s:+d}  {bar}")
    return "\n".join(lines)


def _bar_rows(fp, source, reference):
    compared = fp.local_slopes * 0 + fp.global_slope if reference is None else reference.local_slopes
    for (i, lo, hi, s), local, other in zip(fp.bar_rows(), fp.local_slopes, compared):
        yield [source, i, repr(lo), repr(hi), s, repr(float(local)), repr(float(other))]


@click.group(cls=_Group)
@click.option("--library", type=click.Path(dir_okay=False), help=f"Reference library file (overrides ${LIBRARY_ENV}).")
@click.pass_context
def main(ctx, library):
    """Fluctuation-enhanced sensing fingerprints from sensor noise spectra."""
    ctx.ensure_object(dict)
    ctx.obj["library"] = library


@main.command()
@click.argument("input_path", type=click.Path(dir_okay=False))
@click.option("-o", "--output", required=True, type=click.Path(dir_okay=False), help="Spectrum file (.csv or .json).")
@pipeline_options
def pds(input_path, output, rate, fmt, **kw):
    """Estimate the power density spectrum of a time series.

    Also writes OUTPUT.loglog.dat, a two-column log10 table for plotting.
    When a band is configured the spectrum is restricted to it.
    """
    cfg = _config_from(kw)
    ts = load_timeseries(input_path, fmt, rate)
    cfg.check_nyquist(ts.sample_rate_hz)
    sp = spectrum_of(ts, cfg)
    if cfg.band is not None:
        sp = restrict_band(sp, *cfg.band)
    out = write_spectrum(sp, output)
    write_loglog(sp, out.with_name(out.name + ".loglog.dat"))
    click.echo(f"wrote {len(sp)} bins to {out}", err=True)


@main.command()
@click.argument("inputs", nargs=-1, required=True, type=click.Path(dir_okay=False))
@click.option("--mode", type=click.Choice([BINARY, TERNARY]), default=BINARY, show_default=True)
@click.option("--reference", help="Reference library label or time-series/spectrum file (ternary mode).")
@click.option("-o", "--output", type=click.Path(dir_okay=False), help="Write JSON here instead of stdout.")
@click.option("--bars", type=click.Path(dir_okay=False), help="Write per-band bar data as CSV.")
@click.option("--jobs", type=int, default=1, show_default=True, help="Parallel workers for several inputs.")
@click.option("--quiet", is_flag=True, help="Suppress the text bar chart on stderr.")
@pipeline_options
@click.pass_context
def fingerprint(ctx, inputs, mode, reference, output, bars, jobs, quiet, rate, fmt, **kw):
    """Binary or ternary fingerprint of one or more recordings."""
    cfg = _config_from(kw)
    ref_name = reference or cfg.reference_label
    ref_profile = None
    if mode == TERNARY:
        if not ref_name:
            raise click.UsageError("ternary mode needs --reference (or reference_label in the config)")
        ref_profile = _resolve_reference(ctx, ref_name, cfg, rate, fmt)

    def run(path):
        profile = _profile_from_file(path, cfg, rate, fmt)
        if ref_profile is None:
            return binary_fingerprint(profile)
        return ternary_fingerprint(profile, ref_profile, cfg.tolerance)

    if jobs > 1 and len(inputs) > 1:
        with ThreadPoolExecutor(max_workers=jobs) as pool:
            fps = list(pool.map(run, inputs))
    else:
        fps = [run(p) for p in inputs]

    if not quiet:
        for path, fp in zip(inputs, fps):
            click.echo(_bar_text(fp, path), err=True)
    if bars:
        buf = io.StringIO()
        writer = csv.writer(buf, lineterminator="\n")
        writer.writerow(["source", "band", "f_lo_hz", "f_hi_hz", "symbol", "local_slope", "compared_slope"])
        for path, fp in zip(inputs, fps):
            writer.writerows(_bar_rows(fp, path, ref_profile))
        Path(bars).write_text(buf.getvalue(), encoding="utf-8")

    doc = fps[0].to_dict() if len(fps) == 1 else [fp.to_dict() for fp in fps]
    text = _dump(doc)
    if output:
        Path(output).write_text(text + "\n", encoding="utf-8")
    else:
        click.echo(text)


@main.command()
@click.argument("files", nargs=-1, required=True, type=click.Path(dir_okay=False))
@click.option("--text", "as_text", is_flag=True, help="Aligned-column text instead of JSON.")
def compare(files, as_text):
    """Pairwise similarity and reproducibility of fingerprint files."""
    if len(files) < 2:
        raise click.UsageError("compare needs at least two fingerprint files")
    fps = [read_fingerprint(f) for f in files]
    report = analysis.comparison_report(fps, labels=[Path(f).name for f in files])
    click.echo(analysis.format_report_text(report) if as_text else _dump(report))


@main.command()
@click.argument("files", nargs=-1, required=True, type=click.Path(dir_okay=False))
@click.option("--per-position", is_flag=True, help="Average per-position entropies instead of pooling.")
def entropy(files, per_position):
    """Empirical Shannon entropy of fingerprint symbols (bits per symbol)."""
    fps = [read_fingerprint(f) for f in files]
    bits = analysis.empirical_entropy(fps, per_position=per_position)
    kind = fps[0].kind
    click.echo(
        _dump(
            {
                "schema_version": 1,
                "kind": kind,
                "n_fingerprints": len(fps),
                "per_position": per_position,
                "bits_per_symbol": bits,
                "max_bits_per_symbol": math.log2(3 if kind == TERNARY else 2),
            }
        )
    )


@main.command()
@click.option("--spec", "spec_src", required=True, help="Spectrum spec as inline JSON or a JSON file path.")
@click.option("-n", "--n-samples", type=int, required=True)
@click.option("--rate", type=float, required=True, help="Sample rate in Hz.")
@click.option("--seed", type=click.IntRange(0, 2**64 - 1), required=True)
@click.option("-o", "--output", required=True, type=click.Path(dir_okay=False), help=".csv or .bin/.f64 file.")
def synth(spec_src, n_samples, rate, seed, output):
    """Synthesize noise with a piecewise power-law spectrum."""
    spec = load_spec(spec_src)
    ts = synthesize(spec, n_samples, rate, seed)
    write_timeseries(ts, output)
    click.echo(
        _dump(
            {
                "output": str(output),
                "n_samples": len(ts),
                "sample_rate_hz": ts.sample_rate_hz,
                "seed": seed,
                "mean": float(ts.samples.mean()),
                "variance": float(ts.samples.var()),
            }
        )
    )


@main.group(cls=_Group)
def ref():
    """Manage the reference library."""


@ref.command("add")
@click.argument("label")
@click.argument("input_path", type=click.Path(dir_okay=False))
@click.option("--meta", multiple=True, help="KEY=VALUE acquisition metadata (repeatable).")
@pipeline_options
@click.pass_context
def ref_add(ctx, label, input_path, meta, rate, fmt, **kw):
    """Store the slope profile of INPUT_PATH under LABEL."""
    cfg = _config_from(kw)
    metadata = {}
    for item in meta:
        key, sep, value = item.partition("=")
        if not sep:
            raise click.BadParameter(f"expected KEY=VALUE, got {item!r}", param_hint="--meta")
        metadata[key] = value
    metadata.setdefault("source", str(input_path))
    profile = _profile_from_file(input_path, cfg, rate, fmt, label=label)
    lib = _library(ctx)
    lib.add(label, profile, metadata)
    click.echo(f"added {label!r} to {lib.storage_path}", err=True)


@ref.command("get")
@click.argument("label")
@click.pass_context
def ref_get(ctx, label):
    """Print a stored reference as JSON."""
    entry = _library(ctx).get(label)
    click.echo(
        _dump(
            {
                "label": label,
                "profile": entry["profile"].to_dict(),
                "fingerprint": entry["fingerprint"].to_dict(),
                "metadata": entry["metadata"],
            }
        )
    )


@ref.command("list")
@click.pass_context
def ref_list(ctx):
    """Print the stored labels as a JSON array."""
    click.echo(_dump(_library(ctx).list()))


@ref.command("remove")
@click.argument("label")
@click.pass_context
def ref_remove(ctx, label):
    lib = _library(ctx)
    lib.remove(label)
    click.echo(f"removed {label!r} from {lib.storage_path}", err=True)


if __name__ == "__main__":
    sys.exit(main())
