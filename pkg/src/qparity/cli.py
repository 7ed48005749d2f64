"""Command-line front end.

Each demonstration runs as one reproducible command emitting JSON or
CSV.  Qubits/photons are numbered from 1 on the command line, matching
the usual photon labels; outputs embed a schema version so downstream
tooling can pin formats.

Exit codes: 0 success, 2 invalid configuration, 3 simulation
precondition violated (illegal loss pattern, destroyed logical qubit).
"""

from __future__ import annotations

import argparse
import csv
import io
import json
import math
import sys

import numpy as np

from .errors import ConfigError, PreconditionError
from .photonics import (
    SourceParams,
    apply_visibility_noise,
    chained_postselect_factor,
    coincidence_rate,
    encode_shor_noisy,
    monte_carlo_coincidence,
    noisy_block_fidelity,
    shor_encoder_sites,
    snr_hv,
)
from .rates import optimize, sweep
from .rgs import (
    PauliString,
    Scenario,
    bare_loss_scenario,
    encoded_loss_scenario,
    connect_scenario,
    run_connection,
)
from .shor import (
    LogicalInput,
    apply_flip_channel,
    decode_readout,
    encode_shor,
    measure_syndromes,
    stabilizers,
)
from .sim import expectation

SCHEMA_VERSION = 1
SYNDROME_COLUMNS = ["SZ1", "SZ2", "SZ3", "SZ4", "SZ5", "SZ6", "SX1", "SX2"]
WITNESS_COLUMNS = ["branch", "probability", "outcomes", "correction",
                   "xx", "yy", "zz", "fidelity", "witness"]


def _fmt(x) -> str:
    """Deterministic text form for CSV cells."""
    if isinstance(x, float):
        return repr(x)
    return str(x)


def _write_csv(rows: list, header: list, schema: str) -> str:
    buf = io.StringIO()
    buf.write(f"# schema: {schema}/v{SCHEMA_VERSION}\n")
    writer = csv.writer(buf, lineterminator="\n")
    writer.writerow(header)
    for row in rows:
        writer.writerow([_fmt(x) for x in row])
    return buf.getvalue()


def _write_json(payload: dict) -> str:
    payload = {"schema_version": SCHEMA_VERSION, **payload}
    return json.dumps(payload, indent=2, sort_keys=True) + "\n"


def _emit(text: str, out: str | None) -> None:
    if out:
        with open(out, "w") as fh:
            fh.write(text)
    else:
        sys.stdout.write(text)


def _parse_floats(text: str) -> list:
    try:
        return [float(x) for x in text.split(",") if x.strip() != ""]
    except ValueError as exc:
        raise ConfigError(f"bad float list {text!r}") from exc


def _parse_qubits(text: str) -> list:
    """Comma list of 1-based photon numbers -> 0-based indices."""
    try:
        nums = [int(x) for x in text.split(",") if x.strip() != ""]
    except ValueError as exc:
        raise ConfigError(f"bad qubit list {text!r}") from exc
    for q in nums:
        if not (1 <= q <= 9):
            raise ConfigError(f"photon number {q} outside 1..9")
    return [q - 1 for q in nums]


def _angles_input(theta: float, phi: float) -> LogicalInput:
    if not (math.isfinite(theta) and math.isfinite(phi)):
        raise ConfigError("theta/phi must be finite")
    return LogicalInput.from_angles(theta, phi)


def _check_noise(v: float | None) -> float | None:
    if v is None:
        return None
    if not (0.0 <= v <= 1.0):
        raise ConfigError(f"--noise visibility {v} outside [0, 1]")
    return v


# ---------------------------------------------------------------------------
# commands
# ---------------------------------------------------------------------------

def cmd_encode(args) -> None:
    inp = _angles_input(args.theta, args.phi)
    noise = _check_noise(args.noise)
    state = encode_shor(inp)
    payload = {
        "command": "encode",
        "input": {"theta": args.theta, "phi": args.phi},
        "stabilizers": [s.label() for s in stabilizers()],
    }
    if noise is None:
        payload["stabilizer_expectations"] = [
            expectation(state, s) for s in stabilizers()]
        payload["nonzero_amplitudes"] = {
            format(i, "09b"): [a.real, a.imag]
            for i, a in enumerate(state.amplitudes) if abs(a) > 1e-12
        }
    else:
        rho = encode_shor_noisy(inp, noise)
        payload["noise"] = {"visibility": noise}
        payload["stabilizer_expectations"] = [
            expectation(rho, s) for s in stabilizers()]
        probs = np.diag(rho.matrix).real
        payload["basis_probabilities"] = {
            format(i, "09b"): float(p)
            for i, p in enumerate(probs) if p > 1e-12
        }
        snr = snr_hv(rho, state)
        payload["snr_hv"] = "clean" if math.isinf(snr) else snr
    _emit(_write_json(payload), args.out)


def cmd_syndrome_scan(args) -> None:
    kind = args.channel
    if kind not in ("bit-flip", "phase-flip"):
        raise ConfigError(f"--channel must be bit-flip or phase-flip, "
                          f"got {kind!r}")
    default_qubit = 4 if kind == "bit-flip" else 2
    qubit = args.qubit if args.qubit is not None else default_qubit
    if not (1 <= qubit <= 9):
        raise ConfigError(f"--qubit {qubit} outside 1..9")
    p_values = _parse_floats(args.p_values)
    for p in p_values:
        if not (0.0 <= p <= 1.0):
            raise ConfigError(f"channel probability {p} outside [0, 1]")
    inp = _angles_input(args.theta, args.phi)
    word = encode_shor(inp)
    rows = []
    for p in p_values:
        rho = apply_flip_channel(word, qubit - 1, kind, p)
        record, _ = measure_syndromes(rho, mode="expectation")
        rows.append([p] + list(record.values))
    text = _write_csv(rows, ["p"] + SYNDROME_COLUMNS, "syndrome-scan")
    _emit(text, args.out)


def cmd_loss_readout(args) -> None:
    inp = _angles_input(args.theta, args.phi)
    noise = _check_noise(args.noise)
    losses = _parse_qubits(args.lose) if args.lose else []
    state = encode_shor(inp) if noise is None else encode_shor_noisy(inp,
                                                                     noise)
    branches = decode_readout(state, losses=losses, mode="enumerate")
    rows = [
        [i, b.probability, b.correction, b.fidelity_to(inp), b.degraded]
        for i, b in enumerate(branches)
    ]
    header = ["branch", "probability", "correction", "fidelity", "degraded"]
    if args.format == "csv":
        _emit(_write_csv(rows, header, "loss-readout"), args.out)
        return
    payload = {
        "command": "loss-readout",
        "input": {"theta": args.theta, "phi": args.phi},
        "lost_photons": sorted(q + 1 for q in losses),
        "noise_visibility": noise,
        "branches": [b.to_json_dict(inp) for b in branches],
    }
    _emit(_write_json(payload), args.out)


def _scenario_noise_sites(scenario: Scenario) -> list:
    """Interference sites of a scenario's RGS, in global photon indices."""
    order = scenario.photon_order()
    idx = {label: i for i, label in enumerate(order)}
    sites = []
    if scenario.rgs.kind == "partial":
        sites.append(PauliString({idx["10'"]: "Z"}))
        sites.append(PauliString({idx[p]: "X" for p in ("4'", "5'", "6'")}))
    elif scenario.rgs.kind == "encoded":
        sites.append(PauliString({idx[p]: "X" for p in ("4'", "5'", "6'")}))
        for p in ("2'", "5'", "8'"):
            sites.append(PauliString({idx[p]: "Z"}))
    else:
        sites.append(PauliString({idx["10'"]: "Z"}))
    return sites


def _run_witness_command(args, scenario_factory, command: str) -> None:
    noise = _check_noise(args.noise)
    scenario = scenario_factory(args.loss)
    initial = None
    if noise is not None:
        initial = apply_visibility_noise(scenario.initial_state(),
                                         _scenario_noise_sites(scenario),
                                         noise)
    branches = run_connection(scenario, mode="enumerate",
                              initial_state=initial)
    rows = [
        [i, b.probability, " ".join(b.outcomes), "".join(b.correction),
         b.witness.xx, b.witness.yy, b.witness.zz, b.witness.fidelity,
         b.witness.witness]
        for i, b in enumerate(branches)
    ]
    if args.format == "csv":
        _emit(_write_csv(rows, WITNESS_COLUMNS, command), args.out)
        return
    payload = {
        "command": command,
        "loss_count": args.loss,
        "noise_visibility": noise,
        "scenario": scenario.to_json_dict(),
        "branches": [b.to_json_dict() for b in branches],
    }
    _emit(_write_json(payload), args.out)


def cmd_connect(args) -> None:
    _run_witness_command(args, connect_scenario, "connect")


def cmd_rgs_loss(args) -> None:
    _run_witness_command(args, encoded_loss_scenario, "rgs-loss")


def cmd_bare_control(args) -> None:
    _run_witness_command(args, bare_loss_scenario, "bare-control")


def cmd_rate(args) -> None:
    if args.n_max < 1 or args.m_max < 1:
        raise ConfigError("--n-max and --m-max must be >= 1")
    if not (0.0 <= args.eta <= 1.0) or not (0.0 <= args.q <= 1.0):
        raise ConfigError("--eta and --q must lie in [0, 1]")
    rows = [
        [args.eta, args.q, r.n, r.m, r.p_side, r.p_connect, r.efficiency]
        for r in sweep(args.eta, args.q, args.n_max, args.m_max)
    ]
    text = _write_csv(rows, ["eta", "q", "n", "m", "p_side", "p_connect",
                             "efficiency"], "rate")
    n, m, best = optimize(args.eta, args.q, args.n_max, args.m_max,
                          args.metric)
    report = _write_json({
        "command": "rate",
        "eta": args.eta,
        "q": args.q,
        "metric": args.metric,
        "optimum": best.to_json_dict(),
    })
    if args.out:
        _emit(text, args.out)
        json_path = (args.out[:-4] if args.out.endswith(".csv")
                     else args.out) + ".json"
        _emit(report, json_path)
    else:
        sys.stdout.write(text)
        sys.stdout.write(report)


def cmd_photonics_rate(args) -> None:
    for name, val in (("--pair-prob", args.pair_prob),
                      ("--eta-pair", args.eta_pair),
                      ("--factor", args.factor)):
        if not (0.0 <= val <= 1.0):
            raise ConfigError(f"{name} {val} outside [0, 1]")
    if args.rep_rate <= 0:
        raise ConfigError("--rep-rate must be positive")
    if args.sources < 1:
        raise ConfigError("--sources must be >= 1")
    noise = _check_noise(args.noise)
    params = SourceParams(args.pair_prob, args.eta_pair, args.rep_rate)
    payload = {
        "command": "photonics-rate",
        "sources": args.sources,
        "pair_prob": args.pair_prob,
        "eta_pair": args.eta_pair,
        "rep_rate": args.rep_rate,
        "postselect_factor": args.factor,
        "encoder_stage_factors": [0.5] * int(round(math.log(args.factor, 0.5)))
        if 0 < args.factor < 1 else [],
        "predicted_rate_hz": coincidence_rate(params, args.sources,
                                              args.factor),
    }
    if args.shots:
        if args.seed is None:
            raise ConfigError("--shots needs --seed for reproducibility")
        est, se = monte_carlo_coincidence(params, args.sources, args.factor,
                                          args.shots, args.seed)
        payload["monte_carlo"] = {"pulses": args.shots, "seed": args.seed,
                                  "rate_hz": est, "rate_se_hz": se}
    if noise is not None:
        inp = LogicalInput.from_angles(math.pi / 2, 0.0)
        rho = encode_shor_noisy(inp, noise)
        snr = snr_hv(rho, encode_shor(inp))
        payload["noise"] = {
            "visibility": noise,
            "snr_hv": "clean" if math.isinf(snr) else snr,
            "block_fidelity": noisy_block_fidelity(noise),
            "interference_sites": [s.label() for s in shor_encoder_sites()],
        }
    _emit(_write_json(payload), args.out)


# ---------------------------------------------------------------------------
# argument plumbing
# ---------------------------------------------------------------------------

def _add_common(parser: argparse.ArgumentParser, formats=("json", "csv"),
                default_format="json") -> None:
    parser.add_argument("--out", help="output file (stdout when omitted)")
    parser.add_argument("--format", choices=formats, default=default_format)
    parser.add_argument("--config",
                        help="JSON file of defaults; explicit flags win")


def build_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(
        prog="qparity",
        description="Loss-tolerant quantum-parity-code repeater toolkit")
    sub = parser.add_subparsers(dest="command", required=True)

    p = sub.add_parser("encode", help="encode a qubit into the 9-qubit code")
    p.add_argument("--theta", type=float, default=math.pi / 2)
    p.add_argument("--phi", type=float, default=0.0)
    p.add_argument("--noise", type=float, default=None,
                   help="encoder interference visibility V")
    _add_common(p, formats=("json",))
    p.set_defaults(func=cmd_encode)

    p = sub.add_parser("syndrome-scan",
                       help="stabilizer expectations vs channel strength")
    p.add_argument("--channel", default="bit-flip")
    p.add_argument("--qubit", type=int, default=None,
                   help="photon number 1..9 (defaults: 4 bit-flip, "
                        "2 phase-flip)")
    p.add_argument("--p-values", default="0,0.25,0.5,0.75,1")
    p.add_argument("--theta", type=float, default=math.pi / 2)
    p.add_argument("--phi", type=float, default=0.0)
    _add_common(p, formats=("csv",), default_format="csv")
    p.set_defaults(func=cmd_syndrome_scan)

    p = sub.add_parser("loss-readout",
                       help="read the encoded qubit back out under loss")
    p.add_argument("--theta", type=float, default=math.pi / 2)
    p.add_argument("--phi", type=float, default=0.0)
    p.add_argument("--lose", default="",
                   help="comma list of lost photon numbers, e.g. 4,6")
    p.add_argument("--noise", type=float, default=None)
    _add_common(p)
    p.set_defaults(func=cmd_loss_readout)

    for name, helptext, fn in (
            ("connect", "entanglement connection across the encoded RGS",
             cmd_connect),
            ("rgs-loss", "witness between intact logical qubits under loss",
             cmd_rgs_loss),
            ("bare-control", "bare GHZ control run", cmd_bare_control)):
        p = sub.add_parser(name, help=helptext)
        p.add_argument("--loss", type=int, default=0,
                       help="photons lost from the protected logical qubit")
        p.add_argument("--noise", type=float, default=None)
        _add_common(p)
        p.set_defaults(func=fn)

    p = sub.add_parser("rate", help="connection-rate sweep and optimum")
    p.add_argument("--eta", type=float, required=True)
    p.add_argument("--q", type=float, default=0.5)
    p.add_argument("--n-max", type=int, default=5)
    p.add_argument("--m-max", type=int, default=5)
    p.add_argument("--metric", choices=("p_connect", "efficiency"),
                   default="p_connect")
    _add_common(p, formats=("csv",), default_format="csv")
    p.set_defaults(func=cmd_rate)

    p = sub.add_parser("photonics-rate",
                       help="predicted coincidence rate of the source chain")
    p.add_argument("--pair-prob", type=float, default=0.06)
    p.add_argument("--eta-pair", type=float, default=0.38)
    p.add_argument("--rep-rate", type=float, default=80e6)
    p.add_argument("--sources", type=int, default=5)
    p.add_argument("--factor", type=float,
                   default=chained_postselect_factor(4))
    p.add_argument("--shots", type=int, default=None,
                   help="Monte-Carlo pulses (needs --seed)")
    p.add_argument("--seed", type=int, default=None)
    p.add_argument("--noise", type=float, default=None)
    _add_common(p, formats=("json",))
    p.set_defaults(func=cmd_photonics_rate)

    return parser


def _apply_config_file(parser: argparse.ArgumentParser, argv) -> list:
    """Fold --config file values in as defaults; explicit flags win."""
    if "--config" not in argv:
        return list(argv)
    i = argv.index("--config")
    if i + 1 >= len(argv):
        raise ConfigError("--config needs a path")
    path = argv[i + 1]
    try:
        with open(path) as fh:
            values = json.load(fh)
    except (OSError, json.JSONDecodeError) as exc:
        raise ConfigError(f"cannot read config file {path}: {exc}") from exc
    if not isinstance(values, dict):
        raise ConfigError("config file must hold a JSON object")
    merged = list(argv)
    for key, val in sorted(values.items()):
        flag = "--" + key.replace("_", "-")
        if flag in argv:
            continue
        merged.extend([flag, str(val)])
    return merged


def main(argv=None) -> int:
    argv = list(sys.argv[1:] if argv is None else argv)
    parser = build_parser()
    try:
        argv = _apply_config_file(parser, argv)
        args = parser.parse_args(argv)
        args.func(args)
    except ConfigError as exc:
        print(f"error: {exc}", file=sys.stderr)
        return 2
    except PreconditionError as exc:
        print(f"error: {exc}", file=sys.stderr)
        return 3
    return 0


if __name__ == "__main__":
    sys.exit(main())
