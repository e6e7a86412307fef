"""Scenario runner.

    phaseoracle run --scenario scenarios/dj_zero_case_b.json [--seed N] [--trials N]
                    [--out PATH] [--format json|csv] [--n-max N] [--dump-state]
                    [--shots N]

A scenario is one JSON document; see ``scenarios/README.md`` for the schema.
Exit status: 0 success, 2 invalid scenario, 3 protocol violation, 4 I/O error.
"""

from __future__ import annotations

import argparse
import csv
import io
import json
import math
import sys
from dataclasses import dataclass, field, replace
from pathlib import Path

import numpy as np

from . import rng
from .classical import (
    DEFAULT_BUDGET,
    build_halting_table,
    check_tree,
    classical_query,
    halting_table_to_json,
    optimal_decision_tree,
    transcripts_indistinguishable,
)
from .errors import ConfigurationError, PhaseOracleError, ProtocolViolation
from .hilbert import N_MAX
from .oracle import (
    MembershipTable,
    OracleSpec,
    PhaseKind,
    PhaseProfile,
    bit_string,
    load_oracle,
    make_phase_profile,
)
from .protocols import DJConfig, dj_run, readout_run

PROTOCOLS = ("dj", "readout", "classical_sweep", "lower_bound", "halting_demo")
CSV_COLUMNS = (
    "scenario", "trial", "n", "regime", "inner_re", "inner_im",
    "probability", "verdict", "oracle_calls", "seed",
)
MEMBERSHIP_KINDS = ("all", "none", "top_half", "balanced_random")

EXIT_CONFIG = 2
EXIT_PROTOCOL = 3
EXIT_IO = 4


class ScenarioError(ConfigurationError):
    def __init__(self, message: str, source: str = "<scenario>", line: int = 1):
        super().__init__(f"{source}:{line}: {message}")
        self.line = line


@dataclass
class ScenarioConfig:
    name: str
    protocol: str
    n: int
    oracle: dict | None = None
    oracle_file: str | None = None
    middle_op: str = "sign_flip"
    second_call: str = "forward_U"
    seed: int | None = None
    trials: int = 1
    budget: int = DEFAULT_BUDGET
    z: int | None = None
    shots: int | None = None
    output: dict = field(default_factory=dict)
    base_dir: Path = field(default=Path("."), repr=False)

    @property
    def phase_doc(self) -> dict:
        return (self.oracle or {}).get("phases", {"kind": "zero"})

    @property
    def regime(self) -> str:
        if self.protocol == "dj":
            return f"{self.phase_doc.get('kind', 'zero')}+{self.middle_op}+{self.second_call}"
        if self.protocol in ("readout", "halting_demo"):
            return "encode_function"
        if self.protocol == "lower_bound":
            return "exhaustive_decision_tree"
        return "classical"

    def is_stochastic(self) -> bool:
        phases = self.phase_doc
        f = (self.oracle or {}).get("f")
        h = phases.get("h")
        return (
            (phases.get("kind") == "uniform_random" and "seed" not in phases)
            or (isinstance(f, dict) and f.get("kind") == "balanced_random")
            or (isinstance(h, dict) and h.get("kind") == "random")
            or bool(self.shots)
        )


def _line_of(text: str, key: str) -> int:
    needle = f'"{key}"'
    for lineno, line in enumerate(text.splitlines(), start=1):
        if needle in line:
            return lineno
    return 1


def parse_scenario(text: str, source: str = "<scenario>", base_dir: Path = Path(".")) -> ScenarioConfig:
    try:
        doc = json.loads(text)
    except json.JSONDecodeError as exc:
        raise ScenarioError(exc.msg, source, exc.lineno) from exc
    if not isinstance(doc, dict):
        raise ScenarioError("scenario must be a JSON object", source)

    def fail(key: str, message: str):
        raise ScenarioError(message, source, _line_of(text, key))

    known = {f for f in ScenarioConfig.__dataclass_fields__ if f != "base_dir"}
    for key in doc:
        if key not in known:
            fail(key, f"unknown scenario field {key!r}")
    for key in ("name", "protocol", "n"):
        if key not in doc:
            raise ScenarioError(f"missing required field {key!r}", source)
    if doc["protocol"] not in PROTOCOLS:
        fail("protocol", f"protocol must be one of {', '.join(PROTOCOLS)}")
    for key in ("n", "trials", "budget", "seed", "z", "shots"):
        value = doc.get(key)
        if value is not None and (isinstance(value, bool) or not isinstance(value, int)):
            fail(key, f"{key} must be an integer")
    if doc["n"] < 1:
        fail("n", "n must be at least 1")
    if doc.get("trials", 1) < 1:
        fail("trials", "trials must be at least 1")
    if doc.get("oracle") is not None and doc.get("oracle_file") is not None:
        fail("oracle_file", "give either an inline oracle or oracle_file, not both")
    if doc.get("middle_op", "sign_flip") not in ("sign_flip", "identity"):
        fail("middle_op", "middle_op must be sign_flip or identity")
    if doc.get("second_call", "forward_U") not in ("forward_U", "inverse_U"):
        fail("second_call", "second_call must be forward_U or inverse_U")
    oracle = doc.get("oracle")
    if oracle is not None:
        if not isinstance(oracle, dict):
            fail("oracle", "oracle must be an object")
        f = oracle.get("f")
        if isinstance(f, dict) and f.get("kind") not in MEMBERSHIP_KINDS:
            fail("f", f"membership kind must be one of {', '.join(MEMBERSHIP_KINDS)}")
        phases = oracle.get("phases", {"kind": "zero"})
        if phases.get("kind") not in {k.value for k in PhaseKind}:
            fail("kind", f"unknown phase kind {phases.get('kind')!r}")
    output = doc.get("output", {})
    if output.get("format", "json") not in ("json", "csv"):
        fail("format", "output format must be json or csv")

    config = ScenarioConfig(**doc, base_dir=base_dir)
    if config.oracle_file is not None and not (base_dir / config.oracle_file).exists():
        fail("oracle_file", f"oracle file {config.oracle_file!r} does not exist")
    if config.protocol in ("dj", "readout", "classical_sweep") and oracle is None and config.oracle_file is None:
        raise ScenarioError(f"protocol {config.protocol} needs an oracle", source)
    if config.is_stochastic() and config.seed is None:
        raise ScenarioError("scenario has random elements but no seed", source)
    return config


def load_scenario(path: str | Path) -> ScenarioConfig:
    path = Path(path)
    try:
        text = path.read_text()
    except OSError as exc:
        raise ScenarioError(f"cannot read scenario: {exc.strerror}", str(path)) from exc
    return parse_scenario(text, str(path), path.parent)


# -- oracle construction -----------------------------------------------------


def _membership(desc, n: int, seed: int | None) -> MembershipTable:
    if isinstance(desc, str):
        return MembershipTable(n, desc)
    kind = desc["kind"]
    size = 1 << n
    if kind == "all":
        return MembershipTable(n, np.ones(size, dtype=np.uint8))
    if kind == "none":
        return MembershipTable(n, np.zeros(size, dtype=np.uint8))
    if kind == "top_half":
        return MembershipTable(n, (np.arange(size) >> (n - 1)) & 1)
    members = rng.generator(seed, rng.STREAM_MEMBERSHIP).permutation(size)[: size // 2]
    return MembershipTable.from_set(n, members.tolist())


def _function_table(desc, n: int, seed: int | None, budget: int) -> tuple[np.ndarray, int | None]:
    """Returns (h, z); z is None when the description leaves the special string to the caller."""
    if isinstance(desc, str):
        return MembershipTable(n, desc).f.copy(), None
    if desc.get("kind") == "halting":
        return build_halting_table(n, desc.get("budget", budget)), 0
    if desc.get("kind") == "random":
        gen = rng.generator(seed, rng.STREAM_FUNCTION)
        h = gen.integers(0, 2, size=1 << n, dtype=np.uint8)
        z = int(desc["z"]) if "z" in desc else int(gen.integers(0, 1 << n))
        h[z] = 1
        return h, z
    raise ConfigurationError(f"unknown h specification {desc!r}")


@dataclass
class BuiltOracle:
    oracle: OracleSpec
    h: np.ndarray | None = None
    z: int | None = None


def build_oracle(config: ScenarioConfig, trial_seed: int | None) -> BuiltOracle:
    n = config.n
    if config.oracle_file is not None:
        oracle = load_oracle(config.base_dir / config.oracle_file)
        if oracle.n != n:
            raise ConfigurationError(f"oracle file has n={oracle.n}, scenario says n={n}")
        return BuiltOracle(oracle)
    doc = config.oracle or {}
    membership = _membership(doc.get("f", {"kind": "none"}), n, trial_seed)
    phases = config.phase_doc
    kind = PhaseKind(phases.get("kind", "zero"))
    h = z = None
    if kind is PhaseKind.EXPLICIT:
        profile = PhaseProfile(n, phases["phi0"], phases["phi1"])
    elif kind is PhaseKind.ENCODE_FUNCTION:
        h, z = _function_table(phases["h"], n, trial_seed, config.budget)
        profile = make_phase_profile(n, kind, h=h)
    else:
        seed = phases.get("seed", trial_seed)
        profile = make_phase_profile(n, kind, membership=membership, seed=seed)
    return BuiltOracle(OracleSpec(membership, profile), h, z)


# -- running -------------------------------------------------------------------


@dataclass
class ResultSet:
    scenario: str
    protocol: str
    records: list = field(default_factory=list)
    summary: dict = field(default_factory=dict)
    states: list = field(default_factory=list)


def _record(config, trial, seed, *, inner=None, probability=None, verdict, oracle_calls, **extra) -> dict:
    rec = {
        "scenario": config.name,
        "trial": trial,
        "protocol": config.protocol,
        "n": config.n,
        "regime": config.regime,
        "inner": None if inner is None else [float(inner.real), float(inner.imag)],
        "probability": None if probability is None else float(probability),
        "verdict": verdict,
        "oracle_calls": oracle_calls,
        "seed": seed,
    }
    rec.update(extra)
    return rec


def _shots(probability: float, shots: int | None, seed: int | None, index: int) -> dict:
    if not shots:
        return {}
    gen = rng.generator(rng.derive_seed(seed, index), rng.STREAM_SHOTS)
    return {"shots": shots, "shots_yes": int(gen.binomial(shots, min(max(probability, 0.0), 1.0)))}


def _readout_records(config, built, trial, seed, results, dump):
    z = config.z if config.z is not None else built.z
    if z is None:
        raise ConfigurationError("readout needs a special string z (scenario field 'z')")
    recovered = np.ones(1 << config.n, dtype=np.uint8)
    for x in range(1 << config.n):
        if x == z:
            continue
        try:
            out = readout_run(built.oracle, z, x, built.h)
        except ProtocolViolation as exc:
            raise ProtocolViolation(
                f"{exc}; record: {json.dumps(_record(config, trial, seed, verdict=None, oracle_calls=1, query=x))}"
            ) from exc
        recovered[x] = out.bit
        results.records.append(_record(
            config, trial, seed, inner=out.inner, probability=out.probability,
            verdict=str(out.bit), oracle_calls=out.oracle_calls, query=x,
            **_shots(out.probability, config.shots, seed, x),
        ))
        if dump and not results.states:
            results.states.append(out.final_state.to_json())
    return z, recovered


def _classical_records(config, built, trial, seed, results):
    answers = np.array([classical_query(built.oracle, x) for x in range(1 << config.n)], dtype=np.uint8)
    for x, a in enumerate(answers):
        rec = _record(config, trial, seed, verdict=str(int(a)), oracle_calls=1, query=x)
        rec["regime"] = "classical"
        results.records.append(rec)
    twin = OracleSpec(built.oracle.membership, make_phase_profile(config.n, "zero"))
    same = transcripts_indistinguishable(built.oracle, twin, range(1 << config.n))
    return answers, same


def run_scenario(config: ScenarioConfig, n_max: int = N_MAX, dump_state: bool = False) -> ResultSet:
    if config.n > n_max:
        raise ConfigurationError(f"n={config.n} exceeds n_max={n_max}")
    results = ResultSet(config.name, config.protocol)
    summary = results.summary
    summary["rng"] = rng.RNG_NAME
    summary["master_seed"] = config.seed

    if config.protocol == "lower_bound":
        tree = optimal_decision_tree(config.n)
        depth = tree.depth()
        results.records.append(_record(config, 0, None, verdict=str(depth), oracle_calls=depth))
        summary.update(
            min_classical_queries=depth,
            closed_form=2 ** (config.n - 1) + 1,
            quantum_oracle_calls=2,
            certificate_valid=check_tree(tree, config.n),
            certificate=tree.to_json(),
        )
        return results

    if config.protocol == "halting_demo":
        h = build_halting_table(config.n, config.budget)
        oracle = OracleSpec(
            MembershipTable(config.n, np.zeros(1 << config.n, dtype=np.uint8)),
            make_phase_profile(config.n, "encode_function", h=h),
        )
        built = BuiltOracle(oracle, h, 0)
        z, recovered = _readout_records(config, built, 0, config.seed, results, dump_state)
        answers, same = _classical_records(config, built, 0, config.seed, results)
        summary.update(
            halting_table=halting_table_to_json(h, config.n, config.budget),
            special_string=z,
            recovered_h=bit_string(recovered),
            recovered_matches=bool(np.array_equal(recovered, h)),
            quantum_oracle_calls=(1 << config.n) - 1,
            classical_answers=bit_string(answers),
            classical_all_zero=bool(not answers.any()),
            classical_indistinguishable_from_phase_free=same,
        )
        return results

    trial_summaries = []
    for trial in range(config.trials):
        seed = rng.derive_seed(config.seed, trial) if config.seed is not None else None
        built = build_oracle(config, seed)
        if config.protocol == "dj":
            dj_config = DJConfig(config.middle_op, config.second_call, config.regime)
            out = dj_run(built.oracle, dj_config, n_max)
            results.records.append(_record(
                config, trial, seed, inner=out.inner, probability=out.probability,
                verdict=out.verdict.value, oracle_calls=out.oracle_calls,
                membership_size=built.oracle.membership.size,
                **_shots(out.probability, config.shots, seed, 0),
            ))
            if dump_state and not results.states:
                results.states.append(out.final_state.to_json())
        elif config.protocol == "readout":
            z, recovered = _readout_records(config, built, trial, seed, results, dump_state)
            entry = {"trial": trial, "special_string": z, "recovered_h": bit_string(recovered)}
            if built.h is not None:
                entry["recovered_matches"] = bool(np.array_equal(recovered, built.h))
            trial_summaries.append(entry)
        else:
            answers, same = _classical_records(config, built, trial, seed, results)
            trial_summaries.append({
                "trial": trial,
                "answers": bit_string(answers),
                "indistinguishable_from_phase_free": same,
            })

    probs = [r["probability"] for r in results.records if r["probability"] is not None]
    if probs:
        summary["probability_mean"] = float(np.mean(probs))
        summary["probability_stderr"] = (
            float(np.std(probs, ddof=1) / math.sqrt(len(probs))) if len(probs) > 1 else 0.0
        )
    counts: dict[str, int] = {}
    for r in results.records:
        counts[r["verdict"]] = counts.get(r["verdict"], 0) + 1
    summary["verdict_counts"] = dict(sorted(counts.items()))
    summary["records"] = len(results.records)
    if trial_summaries:
        summary["trials"] = trial_summaries
    return results


# -- reporting ---------------------------------------------------------------


def _fmt(value) -> str:
    if value is None:
        return ""
    if isinstance(value, float):
        return repr(value)
    return str(value)


def render_csv(results: ResultSet) -> str:
    buf = io.StringIO()
    writer = csv.writer(buf, lineterminator="\n")
    writer.writerow(CSV_COLUMNS)
    for r in results.records:
        inner = r["inner"] or [None, None]
        writer.writerow([
            _fmt(r["scenario"]), _fmt(r["trial"]), _fmt(r["n"]), _fmt(r["regime"]),
            _fmt(inner[0]), _fmt(inner[1]), _fmt(r["probability"]), _fmt(r["verdict"]),
            _fmt(r["oracle_calls"]), _fmt(r["seed"]),
        ])
    if len(results.records) > 1:
        for key, value in results.summary.items():
            if isinstance(value, (dict, list)):
                value = json.dumps(value, sort_keys=True)
            buf.write(f"# {key}={_fmt(value)}\n")
    return buf.getvalue()


def render_json(results: ResultSet) -> str:
    doc = {
        "scenario": results.scenario,
        "protocol": results.protocol,
        "records": results.records,
        "summary": results.summary,
    }
    return json.dumps(doc, indent=2) + "\n"


def emit_report(results: ResultSet, fmt: str = "json", path: str | Path | None = None) -> str:
    if not results.records:
        raise ConfigurationError("nothing to report: empty result set")
    if fmt not in ("json", "csv"):
        raise ConfigurationError(f"unknown report format {fmt!r}")
    text = render_csv(results) if fmt == "csv" else render_json(results)
    if path is not None:
        with open(path, "w", newline="") as fh:
            fh.write(text)
    return text


# -- entry point ---------------------------------------------------------------


def build_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(prog="phaseoracle", description=__doc__.split("\n")[0])
    sub = parser.add_subparsers(dest="command", required=True)
    run = sub.add_parser("run", help="run one scenario file")
    run.add_argument("--scenario", required=True, type=Path)
    run.add_argument("--seed", type=int, help="override the scenario's master seed")
    run.add_argument("--trials", type=int, help="override the scenario's trial count")
    run.add_argument("--out", type=Path, help="output path (default: scenario output.path, else stdout)")
    run.add_argument("--format", choices=("json", "csv"))
    run.add_argument("--n-max", type=int, default=N_MAX, help=f"largest register width allowed (default {N_MAX})")
    run.add_argument("--dump-state", action="store_true", help="write the first final state as JSON to stderr")
    run.add_argument("--shots", type=int, help="also sample this many projector measurements per record")
    return parser


def main(argv=None) -> int:
    args = build_parser().parse_args(argv)
    try:
        config = load_scenario(args.scenario)
        overrides = {}
        if args.seed is not None:
            overrides["seed"] = args.seed
        if args.trials is not None:
            if args.trials < 1:
                raise ConfigurationError("--trials must be at least 1")
            overrides["trials"] = args.trials
        if args.shots is not None:
            overrides["shots"] = args.shots
        config = replace(config, **overrides)
        if config.is_stochastic() and config.seed is None:
            raise ConfigurationError("scenario has random elements but no seed")
        results = run_scenario(config, n_max=args.n_max, dump_state=args.dump_state)
    except ProtocolViolation as exc:
        print(f"protocol violation: {exc}", file=sys.stderr)
        return EXIT_PROTOCOL
    except (PhaseOracleError, AttributeError, KeyError, TypeError, ValueError) as exc:
        print(f"error: {exc}", file=sys.stderr)
        return EXIT_CONFIG

    fmt = args.format or config.output.get("format", "json")
    out = args.out
    if out is None and config.output.get("path"):
        out = config.base_dir / config.output["path"]
    try:
        text = emit_report(results, fmt, out)
    except OSError as exc:
        print(f"error: cannot write {out}: {exc.strerror}", file=sys.stderr)
        return EXIT_IO
    if out is None:
        sys.stdout.write(text)
    for state in results.states:
        print(json.dumps(state), file=sys.stderr)
    return 0


if __name__ == "__main__":
    sys.exit(main())
