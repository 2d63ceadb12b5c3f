"""Command-line entry point.

Subcommands: ``transpile`` (circuit JSON -> transpiled JSON), ``bench-warmup``
(monolithic vs stitched over random Pauli measurement suffixes),
``bench-layerwise`` (growing-circuit transpile timings), and ``train`` (the
two bundled classification tasks).

Exit codes: 0 success, 2 input error, 3 pipeline error. Outputs are
deterministic for a fixed seed; wall-clock fields are printed as ``time=...s``
/ ``speedup=...x`` tokens and CSV timing columns so they can be masked when
comparing runs. ``RIVETLITE_SEED`` supplies the seed when no explicit one is
given.
"""

from __future__ import annotations

import argparse
import csv
import dataclasses
import json
import os
import statistics
import sys
from pathlib import Path

import numpy as np

from . import backend, circuit as circ, encode, layerwise, pauli, sim, stitch
from . import transpiler as tp
from .exceptions import CircuitError, RivetLiteError

WARMUP_SCHEMA = ("trial", "method", "pauli_index", "seconds",
                 "depth", "cx_count", "fidelity")
LAYERWISE_SCHEMA = ("step", "method", "cumulative_seconds", "depth", "cx_count")

_TASKS = {
    "iris": ("iris_binary.csv", {}),
    "digits": ("digits_3v6_4x4.csv", {"num_steps": 4, "encoding": "amplitude"}),
}


def _default_seed() -> int:
    return int(os.environ.get("RIVETLITE_SEED", "42"))


def _resolve_seed(value: int | None) -> int:
    return _default_seed() if value is None else value


def write_csv(path, schema, rows) -> None:
    with open(path, "w", newline="") as fh:
        w = csv.writer(fh)
        w.writerow(schema)
        w.writerows(rows)


def check_csv_schema(path, schema) -> None:
    """Reject files whose header drifted from the published schema."""
    with open(path, newline="") as fh:
        header = next(csv.reader(fh), None)
    if header != list(schema):
        raise CircuitError(
            f"{path}: header {header} does not match schema {list(schema)}")


def _fail(code: int, message: str) -> int:
    print(f"error: {message}", file=sys.stderr)
    return code


# --- transpile ----------------------------------------------------------------

def cmd_transpile(args) -> int:
    try:
        text = Path(args.input).read_text()
    except OSError as e:
        return _fail(2, str(e))
    try:
        c = circ.from_json(text)
    except (RivetLiteError, json.JSONDecodeError, KeyError, TypeError,
            ValueError) as e:
        return _fail(2, f"{args.input}: {e}")
    try:
        device = backend.load(args.backend)
    except (RivetLiteError, OSError) as e:
        return _fail(2, str(e))
    opts = tp.TranspileOptions(optimization_level=args.level,
                               seed=_resolve_seed(args.seed))
    tc = tp.transpile(c, device, opts)
    out = args.output or str(Path(args.input).with_suffix(".transpiled.json"))
    Path(out).write_text(
        json.dumps(tp.to_dict(tc), indent=2, sort_keys=True) + "\n")
    depth, two_q, total = circ.stats(tc.physical)
    print(f"depth {depth}, 2q gates {two_q}, total gates {total}")
    print(f"elapsed time={tc.elapsed_seconds:.6f}s")
    print(f"wrote {out}")
    return 0


# --- warm-up benchmark -----------------------------------------------------------

def _sampled(physical: Circuit, shots: int, seed: int) -> sim.CountsDistribution:
    small, _ = circ.compact(physical)
    return sim.sample(small, shots, seed)


def cmd_bench_warmup(args) -> int:
    seed = _resolve_seed(args.seed)
    if min(args.qubits, args.depth, args.paulis, args.trials) < 1:
        return _fail(2, "qubits, depth, paulis and trials must be positive")
    if args.shots < 1:
        return _fail(2, "shots must be positive")
    try:
        device = backend.load(args.backend)
    except (RivetLiteError, OSError) as e:
        return _fail(2, str(e))
    if args.qubits > device.num_physical:
        return _fail(2, f"{args.qubits} qubits exceed device width "
                        f"{device.num_physical}")
    opts = tp.TranspileOptions(seed=seed)
    rows = []
    mono_total = 0.0
    stitched_total = 0.0
    speedups = []
    min_fid = 1.0
    for trial in range(args.trials):
        base = circ.random_circuit(args.qubits, args.depth, seed + trial)
        prefix = tp.transpile(base, device, opts)
        trial_st = prefix.elapsed_seconds
        trial_mono = 0.0
        d, cx, _ = circ.stats(prefix.physical)
        rows.append((trial, "prefix", -1, f"{prefix.elapsed_seconds:.9f}",
                     d, cx, ""))
        for k in range(args.paulis):
            p = pauli.random_pauli(args.qubits,
                                   seed + 1 + trial * args.paulis + k)
            rot = circ.measure_all(
                pauli.create_rotation_circuit(args.qubits, p))
            combined = circ.append(base, rot)
            mono = tp.transpile(combined, device, opts)
            st = stitch.transpile_right(prefix, rot, device, opts)
            trial_mono += mono.elapsed_seconds
            trial_st += st.elapsed_seconds
            shot_seed = seed + 1 + trial * args.paulis + k
            fid = sim.hellinger_fidelity(
                _sampled(mono.physical, args.shots, shot_seed),
                _sampled(st.physical, args.shots, shot_seed))
            min_fid = min(min_fid, fid)
            dm, cxm, _ = circ.stats(mono.physical)
            ds, cxs, _ = circ.stats(st.physical)
            rows.append((trial, "monolithic", k, f"{mono.elapsed_seconds:.9f}",
                         dm, cxm, f"{fid:.6f}"))
            rows.append((trial, "stitched", k, f"{st.elapsed_seconds:.9f}",
                         ds, cxs, f"{fid:.6f}"))
        mono_total += trial_mono
        stitched_total += trial_st
        speedups.append(trial_mono / trial_st)
    write_csv(args.csv, WARMUP_SCHEMA, rows)
    check_csv_schema(args.csv, WARMUP_SCHEMA)
    print(f"wrote {args.csv} ({len(rows)} rows)")
    print(f"monolithic total time={mono_total:.6f}s")
    print(f"stitched total time={stitched_total:.6f}s")
    print(f"overall speedup={mono_total / stitched_total:.3f}x "
          f"median speedup={statistics.median(speedups):.3f}x")
    print(f"min fidelity {min_fid:.6f}")
    return 0


# --- layerwise benchmark -----------------------------------------------------------

def _bench_features(encoding: str, qubits: int, seed: int) -> np.ndarray:
    rng = np.random.Generator(np.random.Philox(seed))
    if encoding == "amplitude":
        return rng.uniform(0.1, 1.0, 1 << qubits)
    return rng.uniform(0.0, np.pi, qubits)


def cmd_bench_layerwise(args) -> int:
    seed = _resolve_seed(args.seed)
    if min(args.qubits, args.steps, args.layers_per_step) < 1:
        return _fail(2, "qubits, steps and layers-per-step must be positive")
    if args.encoding not in ("angle", "amplitude", "zz"):
        return _fail(2, f"unknown encoding {args.encoding!r}")
    if args.encoding == "amplitude" and args.qubits > sim.MAX_SIM_QUBITS:
        return _fail(2, f"amplitude encoding is limited to "
                        f"{sim.MAX_SIM_QUBITS} qubits")
    if args.verify and args.qubits > sim.MAX_SIM_QUBITS:
        return _fail(2, f"--verify needs at most {sim.MAX_SIM_QUBITS} qubits")
    try:
        device = backend.load(args.backend)
    except (RivetLiteError, OSError) as e:
        return _fail(2, str(e))
    if args.qubits > device.num_physical:
        return _fail(2, f"{args.qubits} qubits exceed device width "
                        f"{device.num_physical}")
    opts = tp.TranspileOptions(seed=seed)
    x = _bench_features(args.encoding, args.qubits, seed)
    virtual = encode.encoder_for(args.encoding, x)
    prefix = tp.transpile(virtual, device, opts)
    cum_st = prefix.elapsed_seconds
    cum_mono = 0.0
    rows = []
    for step in range(1, args.steps + 1):
        block = circ.Circuit(args.qubits)
        for layer in range((step - 1) * args.layers_per_step,
                           step * args.layers_per_step):
            block = circ.append(block, encode.pqc_layer(args.qubits, layer))
        virtual = circ.append(virtual, block)
        mono = tp.transpile(virtual, device, opts)
        cum_mono += mono.elapsed_seconds
        prefix = stitch.transpile_right(prefix, block, device, opts)
        cum_st += prefix.elapsed_seconds
        ds, cxs, _ = circ.stats(prefix.physical)
        dm, cxm, _ = circ.stats(mono.physical)
        rows.append((step, "stitched", f"{cum_st:.9f}", ds, cxs))
        rows.append((step, "monolithic", f"{cum_mono:.9f}", dm, cxm))
        if args.verify:
            rng = np.random.Generator(np.random.Philox(seed + step))
            binding = {s: float(v) for s, v in
                       zip(sorted(virtual.free_symbols),
                           rng.uniform(0.0, 2.0 * np.pi,
                                       len(virtual.free_symbols)))}
            bound_virtual = circ.bind(virtual, binding)
            for label, tc in (("stitched", prefix), ("monolithic", mono)):
                bound = dataclasses.replace(
                    tc, physical=circ.bind(tc.physical, binding))
                ok = tp.virtual_equivalent(bound, bound_virtual)
                if ok is None:
                    return _fail(3, f"step {step}: {label} circuit is too "
                                    f"wide to verify")
                if not ok:
                    return _fail(3, f"step {step}: {label} circuit deviates "
                                    f"from the virtual one")
    write_csv(args.csv, LAYERWISE_SCHEMA, rows)
    check_csv_schema(args.csv, LAYERWISE_SCHEMA)
    print(f"wrote {args.csv} ({len(rows)} rows)")
    print(f"monolithic cumulative time={cum_mono:.6f}s")
    print(f"stitched cumulative time={cum_st:.6f}s")
    print(f"speedup={cum_mono / cum_st:.3f}x")
    if args.verify:
        print(f"verified {args.steps} steps against the exact simulator")
    return 0


# --- training experiments ------------------------------------------------------------

def _load_task(task: str, overrides: dict) -> tuple[layerwise.LLConfig,
                                                    layerwise.Dataset]:
    fixture, defaults = _TASKS[task]
    merged = {**defaults, **overrides}
    if "seed" not in merged:
        merged["seed"] = _default_seed()
    known = {f.name for f in dataclasses.fields(layerwise.LLConfig)}
    unknown = sorted(set(merged) - known)
    if unknown:
        raise CircuitError(f"unknown config keys {unknown}")
    cfg = layerwise.LLConfig(**merged)
    X, y = layerwise.load_fixture(fixture)
    if cfg.encoding in ("angle", "zz"):
        X = layerwise.scale_minmax(X)
    return cfg, layerwise.split_dataset(X, y, seed=cfg.seed)


def _train_summary_md(task: str, cfg, result: dict) -> str:
    lines = [f"# {task} training summary", "",
             "| metric | value |", "| --- | --- |",
             f"| encoding | {cfg.encoding} |",
             f"| qubits | {cfg.n_qubits} |",
             f"| layers | {cfg.total_layers} |",
             f"| parameters | {cfg.n_qubits * cfg.total_layers} |",
             f"| epochs | {len(result['losses'])} |",
             f"| final loss | {result['losses'][-1]:.6f} |",
             f"| final test accuracy | {result['final_accuracy']:.6f} |"]
    if "regular_accuracy" in result:
        lines.append(f"| regular test accuracy "
                     f"| {result['regular_accuracy']:.6f} |")
    lines += [f"| stitched transpile total "
              f"| time={sum(result['stitched_seconds']):.6f}s |",
              f"| monolithic transpile total "
              f"| time={sum(result['monolithic_seconds']):.6f}s |", ""]
    return "\n".join(lines)


def cmd_train(args) -> int:
    overrides = {}
    if args.config:
        try:
            overrides = json.loads(Path(args.config).read_text())
        except (OSError, json.JSONDecodeError) as e:
            return _fail(2, f"{args.config}: {e}")
        if not isinstance(overrides, dict):
            return _fail(2, f"{args.config}: expected a JSON object")
    try:
        cfg, ds = _load_task(args.task, overrides)
    except (RivetLiteError, TypeError) as e:
        return _fail(2, str(e))
    params, trace = layerwise.train_phase1(cfg, ds)
    params, phase2 = layerwise.train_phase2(cfg, params, ds)
    trace.extend(phase2)
    result = {"task": args.task, "config": dataclasses.asdict(cfg),
              "final_accuracy": trace.accuracies[-1], **trace.to_dict()}
    if args.task == "digits":
        _, regular = layerwise.train_regular(cfg, ds)
        result["regular_accuracy"] = regular.accuracies[-1]
        result["regular_losses"] = regular.losses
    out = args.output or f"{args.task}_trace.json"
    Path(out).write_text(json.dumps(result, indent=2, sort_keys=True) + "\n")
    md = str(Path(out).with_suffix(".md"))
    Path(md).write_text(_train_summary_md(args.task, cfg, result))
    print(f"{args.task}: {cfg.n_qubits * cfg.total_layers} parameters, "
          f"{len(trace.accuracies)} checkpoints")
    print(f"final test accuracy {result['final_accuracy']:.6f}")
    print(f"final train loss {result['losses'][-1]:.6f}")
    if "regular_accuracy" in result:
        print(f"regular test accuracy {result['regular_accuracy']:.6f}")
    print(f"wrote {out} and {md}")
    return 0


# --- wiring -------------------------------------------------------------------------

def build_parser() -> argparse.ArgumentParser:
    ap = argparse.ArgumentParser(
        prog="rivetlite",
        description="incremental quantum-circuit transpilation toolkit")
    sub = ap.add_subparsers(dest="command", required=True)

    t = sub.add_parser("transpile", help="transpile a circuit JSON file")
    t.add_argument("input")
    t.add_argument("--backend", default="heavyhex-27",
                   help="builtin topology name or JSON path")
    t.add_argument("--level", type=int, default=3, choices=(0, 1, 2, 3))
    t.add_argument("--seed", type=int, default=None)
    t.add_argument("-o", "--output", default=None)
    t.set_defaults(func=cmd_transpile)

    w = sub.add_parser("bench-warmup",
                       help="monolithic vs stitched Pauli-suffix benchmark")
    w.add_argument("--qubits", type=int, default=6)
    w.add_argument("--depth", type=int, default=10)
    w.add_argument("--paulis", type=int, default=10)
    w.add_argument("--seed", type=int, default=None)
    w.add_argument("--shots", type=int, default=100000)
    w.add_argument("--trials", type=int, default=5)
    w.add_argument("--backend", default="heavyhex-27")
    w.add_argument("--csv", default="warmup.csv")
    w.set_defaults(func=cmd_bench_warmup)

    b = sub.add_parser("bench-layerwise",
                       help="growing-circuit transpile-time benchmark")
    b.add_argument("--encoding", default="angle",
                   choices=("angle", "amplitude", "zz"))
    b.add_argument("--qubits", type=int, default=6)
    b.add_argument("--steps", type=int, default=10)
    b.add_argument("--layers-per-step", type=int, default=2)
    b.add_argument("--seed", type=int, default=None)
    b.add_argument("--backend", default="heavyhex-27")
    b.add_argument("--csv", default="layerwise.csv")
    b.add_argument("--verify", action="store_true",
                   help="check every step against the exact simulator")
    b.set_defaults(func=cmd_bench_layerwise)

    r = sub.add_parser("train", help="run a bundled training task")
    r.add_argument("task", choices=sorted(_TASKS))
    r.add_argument("--config", default=None,
                   help="JSON file overriding LLConfig fields")
    r.add_argument("-o", "--output", default=None)
    r.set_defaults(func=cmd_train)
    return ap


def main(argv=None) -> int:
    args = build_parser().parse_args(argv)
    try:
        return args.func(args)
    except RivetLiteError as e:
        return _fail(3, str(e))


if __name__ == "__main__":
    sys.exit(main())
