"""Command-line driver: precompute tables, fit layer distributions, build
quantizers, encode tensors, and produce method-comparison reports.

Exit codes: 0 success, 1 one or more layers failed, 2 invalid arguments,
3 I/O or file-format errors.
"""
from __future__ import annotations

import argparse
import csv
import io
import json
import sys
from concurrent.futures import ThreadPoolExecutor
from pathlib import Path

import numpy as np

from . import baselines, codec, quantizer, tables, tensorio
from .distributions import DistributionModel, ModelKind, select_distribution
from .errors import (DfqError, FileFormatError, InvalidBitWidth,
                     ManifestError)
from ._util import atomic_write_bytes

METHODS = ("optimal", "uniform", "apot")

EXIT_OK = 0
EXIT_PARTIAL = 1
EXIT_USAGE = 2
EXIT_IO = 3

DEFAULT_TABLES_MAX_ITER = 1_000_000


def parse_bits(text: str) -> list[int]:
    """Accept '8', '4,6,8' or '4..8'."""
    text = text.strip()
    if ".." in text:
        lo, hi = text.split("..", 1)
        bits = list(range(int(lo), int(hi) + 1))
    else:
        bits = [int(p) for p in text.split(",") if p.strip()]
    if not bits:
        raise ValueError(f"empty bit range: {text!r}")
    for b in bits:
        if not 1 <= b <= quantizer.MAX_BITS:
            raise InvalidBitWidth(f"bit width must be in [1, 16], got {b}")
    return bits


def _f9(x: float) -> str:
    return format(float(x), ".9g")


def _sanitize(name: str) -> str:
    return name.replace("/", "__").replace("\\", "__")


def _spec_for(method: str, kind: ModelKind, bits: int, tol: float):
    if method == "optimal":
        spec, _ = quantizer.standard_spec(kind, bits, tol)
        return spec
    if method == "uniform":
        return baselines.uniform_spec(kind, bits)
    if method == "apot":
        return baselines.apot_spec(kind, bits)
    raise ValueError(f"unknown method {method!r}")


def _layer_rows(entry, manifest, bits_list, methods, tol):
    tensor = tensorio.read_qtns(manifest.tensor_path(entry))
    report = select_distribution(tensor.values)
    loc, scale = report.selected_params
    rows = []
    for bits in bits_list:
        for method in methods:
            spec = _spec_for(method, report.selected, bits, tol)
            placed = spec.with_transform(loc, scale)
            recon = codec.decode(codec.encode(tensor, placed))
            analytic = quantizer.codebook_distortion(
                report.selected, spec.levels) * scale**2
            rows.append({
                "layer": entry.name,
                "bits": bits,
                "method": method,
                "fitted_kind": report.selected.value,
                "ks_gaussian": report.ks_gaussian,
                "ks_laplace": report.ks_laplace,
                "analytic_mse": analytic,
                "empirical_mse": codec.empirical_mse(tensor, recon),
            })
    return rows


def _map_layers(manifest, worker, jobs: int):
    """Run worker over manifest entries, isolating per-layer failures.

    Returns (results, errors): results[i] is the worker output or None;
    errors[i] is None or an error string.
    """
    entries = manifest.tensors
    results = [None] * len(entries)
    errors = [None] * len(entries)

    def run(i, entry):
        try:
            results[i] = worker(entry)
        except DfqError as exc:
            errors[i] = f"{type(exc).__name__}: {exc}"

    if jobs > 1 and len(entries) > 1:
        with ThreadPoolExecutor(max_workers=jobs) as pool:
            futures = [pool.submit(run, i, e) for i, e in enumerate(entries)]
            for fut in futures:
                fut.result()
    else:
        for i, entry in enumerate(entries):
            run(i, entry)
    return results, errors


# ---------------------------------------------------------------------------
# Commands
# ---------------------------------------------------------------------------

def cmd_tables(args) -> int:
    bits_list = parse_bits(args.bits)
    records = []
    for kind in (ModelKind.GAUSSIAN, ModelKind.LAPLACE):
        for bits in bits_list:
            spec, trace = quantizer.standard_spec(kind, bits, args.tol,
                                                  args.max_iter)
            total = quantizer.distortion(spec, DistributionModel(kind)).total
            records.append(tables.spec_record(
                spec, method="optimal", tol=args.tol,
                iterations=trace.iteration_count, distortion=total))
    atomic_write_bytes(args.out, tables.dump_tables(records).encode("utf-8"))
    print(f"wrote {len(records)} specs to {args.out}")
    return EXIT_OK


def cmd_fit(args) -> int:
    manifest = tensorio.load_manifest(args.manifest)

    def worker(entry):
        tensor = tensorio.read_qtns(manifest.tensor_path(entry))
        report = select_distribution(tensor.values)
        return {
            "name": entry.name,
            "gaussian_params": list(report.gaussian_params),
            "laplace_params": list(report.laplace_params),
            "ks_gaussian": report.ks_gaussian,
            "ks_laplace": report.ks_laplace,
            "selected": report.selected.value,
        }

    results, errors = _map_layers(manifest, worker, args.jobs)
    layers = []
    for entry, result, error in zip(manifest.tensors, results, errors):
        layers.append(result if error is None else
                      {"name": entry.name, "error": error})
    doc = {"model_name": manifest.model_name, "layers": layers}
    atomic_write_bytes(args.out,
                       (json.dumps(doc, indent=2) + "\n").encode("utf-8"))
    failed = sum(e is not None for e in errors)
    print(f"fit {len(layers) - failed}/{len(layers)} layers -> {args.out}")
    return EXIT_PARTIAL if failed else EXIT_OK


def cmd_quantize(args) -> int:
    bits = int(args.bits)
    if not 1 <= bits <= quantizer.MAX_BITS:
        raise InvalidBitWidth(f"bit width must be in [1, 16], got {bits}")
    manifest = tensorio.load_manifest(args.manifest)
    out_dir = Path(args.out)
    out_dir.mkdir(parents=True, exist_ok=True)

    def worker(entry):
        tensor = tensorio.read_qtns(manifest.tensor_path(entry))
        report = select_distribution(tensor.values)
        loc, scale = report.selected_params
        spec = _spec_for(args.method, report.selected, bits, args.tol)
        placed = spec.with_transform(loc, scale)
        quantized = codec.encode(tensor, placed)
        fname = _sanitize(entry.name) + ".qdfq"
        codec.write_qdfq(out_dir / fname, quantized)
        recon = codec.decode(quantized)
        return {
            "name": entry.name,
            "file": fname,
            "bits": bits,
            "method": args.method,
            "fitted_kind": report.selected.value,
            "ks_gaussian": report.ks_gaussian,
            "ks_laplace": report.ks_laplace,
            "analytic_mse": quantizer.codebook_distortion(
                report.selected, spec.levels) * scale**2,
            "empirical_mse": codec.empirical_mse(tensor, recon),
        }

    results, errors = _map_layers(manifest, worker, args.jobs)
    layers = []
    for entry, result, error in zip(manifest.tensors, results, errors):
        layers.append(result if error is None else
                      {"name": entry.name, "error": error})
    doc = {
        "model_name": manifest.model_name,
        "bits": bits,
        "method": args.method,
        "seed": args.seed,
        "layers": layers,
    }
    atomic_write_bytes(out_dir / "report.json",
                       (json.dumps(doc, indent=2) + "\n").encode("utf-8"))
    failed = sum(e is not None for e in errors)
    print(f"quantized {len(layers) - failed}/{len(layers)} layers -> {out_dir}")
    return EXIT_PARTIAL if failed else EXIT_OK


def cmd_compare(args) -> int:
    bits_list = parse_bits(args.bits)
    manifest = tensorio.load_manifest(args.manifest)

    def worker(entry):
        return _layer_rows(entry, manifest, bits_list, METHODS, args.tol)

    results, errors = _map_layers(manifest, worker, args.jobs)
    rows = [row for result in results if result for row in result]

    columns = ["layer", "bits", "method", "fitted_kind", "ks_gaussian",
               "ks_laplace", "analytic_mse", "empirical_mse"]
    buf = io.StringIO()
    writer = csv.writer(buf)
    writer.writerow(columns)
    for row in rows:
        writer.writerow([
            row["layer"], row["bits"], row["method"], row["fitted_kind"],
            _f9(row["ks_gaussian"]), _f9(row["ks_laplace"]),
            _f9(row["analytic_mse"]), _f9(row["empirical_mse"]),
        ])
    out_csv = Path(args.out)
    atomic_write_bytes(out_csv, buf.getvalue().encode("utf-8"))
    twin = out_csv.with_suffix(".json")
    doc = {"model_name": manifest.model_name, "seed": args.seed, "rows": rows}
    failures = [{"name": e.name, "error": err}
                for e, err in zip(manifest.tensors, errors) if err]
    if failures:
        doc["failures"] = failures
    atomic_write_bytes(twin, (json.dumps(doc, indent=2) + "\n").encode("utf-8"))
    print(f"wrote {len(rows)} rows to {out_csv} (+ {twin.name})")
    return EXIT_PARTIAL if failures else EXIT_OK


def cmd_synth(args) -> int:
    """Generate a synthetic manifest of Gaussian/Laplace layers (fixtures
    for benchmarking and reproducible runs)."""
    out_dir = Path(args.out)
    out_dir.mkdir(parents=True, exist_ok=True)
    rng = np.random.default_rng(args.seed)
    entries = []
    for i in range(args.layers):
        kind = ModelKind.GAUSSIAN if i % 2 == 0 else ModelKind.LAPLACE
        loc = float(rng.uniform(-0.05, 0.05))
        scale = float(rng.uniform(0.02, 0.3))
        if kind is ModelKind.GAUSSIAN:
            values = rng.normal(loc, scale, size=args.n)
        else:
            values = rng.laplace(loc, scale, size=args.n)
        name = f"layer{i:02d}.{kind.value}"
        tensor = codec.Tensor(name, (args.n,), values.astype(np.float32))
        fname = _sanitize(name) + ".qtns"
        tensorio.write_qtns(out_dir / fname, tensor)
        entries.append(tensorio.ManifestEntry(
            name, tensor.shape, fname, tensorio.sha256_file(out_dir / fname)))
    manifest_path = out_dir / "manifest.json"
    tensorio.save_manifest(manifest_path, f"synthetic-seed{args.seed}", entries)
    print(f"wrote {len(entries)} layers -> {manifest_path}")
    return EXIT_OK


# ---------------------------------------------------------------------------
# Parser
# ---------------------------------------------------------------------------

def build_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(
        prog="dfq",
        description="MSE-optimal scalar quantization of weight tensors")
    sub = parser.add_subparsers(dest="command", required=True)

    p = sub.add_parser("tables", help="precompute standard-model quantizer tables")
    p.add_argument("--bits", default="4..8", help="bit widths, e.g. 8, 4,6, 4..8")
    p.add_argument("--out", required=True, help="output JSON path")
    p.add_argument("--tol", type=float, default=quantizer.DEFAULT_TOL)
    p.add_argument("--max-iter", type=int, default=DEFAULT_TABLES_MAX_ITER)
    p.set_defaults(func=cmd_tables)

    p = sub.add_parser("fit", help="fit and select per-layer distributions")
    p.add_argument("--manifest", required=True)
    p.add_argument("--out", required=True, help="output JSON path")
    p.add_argument("--jobs", type=int, default=1)
    p.set_defaults(func=cmd_fit)

    p = sub.add_parser("quantize", help="quantize all layers of a manifest")
    p.add_argument("--manifest", required=True)
    p.add_argument("--bits", required=True)
    p.add_argument("--method", choices=METHODS, default="optimal")
    p.add_argument("--out", required=True, help="output directory")
    p.add_argument("--jobs", type=int, default=1)
    p.add_argument("--seed", type=int, default=42)
    p.add_argument("--tol", type=float, default=quantizer.DEFAULT_TOL)
    p.set_defaults(func=cmd_quantize)

    p = sub.add_parser("compare", help="per-layer MSE across methods and widths")
    p.add_argument("--manifest", required=True)
    p.add_argument("--bits", default="4..8")
    p.add_argument("--out", required=True, help="output CSV path")
    p.add_argument("--jobs", type=int, default=1)
    p.add_argument("--seed", type=int, default=42)
    p.add_argument("--tol", type=float, default=quantizer.DEFAULT_TOL)
    p.set_defaults(func=cmd_compare)

    p = sub.add_parser("synth", help="generate a synthetic test manifest")
    p.add_argument("--layers", type=int, default=5)
    p.add_argument("--n", type=int, default=65536)
    p.add_argument("--seed", type=int, default=42)
    p.add_argument("--out", required=True, help="output directory")
    p.set_defaults(func=cmd_synth)

    return parser


def main(argv=None) -> int:
    args = build_parser().parse_args(argv)
    try:
        return args.func(args)
    except InvalidBitWidth as exc:
        print(f"error: {exc}", file=sys.stderr)
        return EXIT_USAGE
    except (ManifestError, FileFormatError, OSError) as exc:
        print(f"error: {exc}", file=sys.stderr)
        return EXIT_IO
    except DfqError as exc:
        print(f"error: {exc}", file=sys.stderr)
        return EXIT_PARTIAL


if __name__ == "__main__":
    sys.exit(main())
