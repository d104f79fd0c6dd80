"""Command-line front end.

Subcommands::

    ssbsim verify      --tol 1e-12 --samples 1000 --seed 7
    ssbsim simulate    --experiment bell-reversal --model unitary-ssb --seed 42 --out r.json
    ssbsim tomography  --input counts.csv --target psi+ --out t.json

Exit codes: 0 success, 1 verification failure, 2 I/O failure,
3 configuration error, 4 data error.
"""

from __future__ import annotations

import argparse
import json
import math
import sys
from dataclasses import dataclass, replace
from typing import Optional, Sequence

from .errors import ConfigError, ContractViolation, CountsFormatError, IncompleteDataError
from .experiments import (
    ExperimentConfig,
    compare_models,
    run_experiment,
)
from .identities import verify_identities
from .measurement import MeasurementModel, bell_state
from .qcore import Ket
from .tomography import CountsTable, expectations_from_counts, missing_strings, reconstruct

EXIT_OK = 0
EXIT_VERIFY_FAILED = 1
EXIT_IO = 2
EXIT_CONFIG = 3
EXIT_DATA = 4

DEFAULT_TRIALS = 100_000
DEFAULT_TOMOGRAPHY_SHOTS = 10_000

# keys accepted in config files; each mirrors a simulate flag
_CONFIG_KEYS = ("experiment", "model", "reversal", "trials", "seed", "tomography_shots",
                "exact", "out", "format", "compare")
_INT_KEYS = ("trials", "seed", "tomography_shots")
_BOOL_KEYS = ("exact", "compare")


def _fmt_float(x: float) -> str:
    if not math.isfinite(x):
        raise ValueError(f"cannot serialize non-finite float {x!r}")
    return format(x, ".17g")


def canonical_json(obj, indent: int = 2) -> str:
    """Sorted keys, floats at 17 significant digits, trailing newline."""

    def enc(o, level):
        pad = " " * (indent * (level + 1))
        end = " " * (indent * level)
        if o is None:
            return "null"
        if isinstance(o, bool):
            return "true" if o else "false"
        if isinstance(o, int):
            return str(o)
        if isinstance(o, float):
            return _fmt_float(o)
        if isinstance(o, str):
            return json.dumps(o)
        if isinstance(o, dict):
            if not o:
                return "{}"
            items = [f"{pad}{json.dumps(str(k))}: {enc(o[k], level + 1)}" for k in sorted(o)]
            return "{\n" + ",\n".join(items) + "\n" + end + "}"
        if isinstance(o, (list, tuple)):
            if not o:
                return "[]"
            if not any(isinstance(v, (dict, list, tuple)) for v in o):
                return "[" + ", ".join(enc(v, level + 1) for v in o) + "]"
            items = [pad + enc(v, level + 1) for v in o]
            return "[\n" + ",\n".join(items) + "\n" + end + "]"
        if hasattr(o, "item"):  # numpy scalar
            return enc(o.item(), level)
        raise TypeError(f"cannot serialize {type(o).__name__}")

    return enc(obj, 0) + "\n"


class _Parser(argparse.ArgumentParser):
    def error(self, message):
        raise ConfigError("arguments", message)


@dataclass(frozen=True)
class RunConfig:
    experiment: ExperimentConfig
    output_path: str = "-"
    format: str = "json"
    compare: bool = False

    def __post_init__(self):
        if self.format not in ("json", "csv"):
            raise ConfigError("format", f"unknown format {self.format!r}; expected json or csv")
        if self.format == "csv":
            if self.experiment.tomography_exact or self.experiment.tomography_shots == 0:
                raise ConfigError("format", "csv output writes the tomography counts table; needs tomography_shots > 0 without --exact")
            if self.compare:
                raise ConfigError("compare", "comparison is only reported in json output")


def _add_simulate_flags(p):
    p.add_argument("--config", help="flat key=value configuration file")
    p.add_argument("--experiment", help="single-qubit-null | bell-reversal")
    p.add_argument("--model", help="projective | unitary-ssb")
    p.add_argument("--reversal", help="conditioned | unconditioned | none")
    p.add_argument("--trials")
    p.add_argument("--seed")
    p.add_argument("--tomography-shots", dest="tomography_shots")
    p.add_argument("--exact", action="store_const", const="true", default=None,
                   help="run tomography on exact expectations instead of sampled counts")
    p.add_argument("--compare", action="store_const", const="true", default=None,
                   help="also run the other model and report a comparison")
    p.add_argument("--out", help="output path, '-' for stdout")
    p.add_argument("--format", help="json | csv")


def build_parser() -> argparse.ArgumentParser:
    parser = _Parser(prog="ssbsim", description="Projective vs unitary measurement simulator")
    sub = parser.add_subparsers(dest="command", parser_class=_Parser)

    v = sub.add_parser("verify", help="check the operator identity catalogue")
    v.add_argument("--tol", default="1e-12")
    v.add_argument("--samples", default="1000")
    v.add_argument("--seed")
    v.add_argument("--out", default="-")

    s = sub.add_parser("simulate", help="run a Monte Carlo experiment")
    _add_simulate_flags(s)

    t = sub.add_parser("tomography", help="reconstruct a state from a counts CSV")
    t.add_argument("--input", required=True)
    t.add_argument("--target", required=True, help="psi+, psi-, phi+, phi-, 0, 1, +, -, +i, -i")
    t.add_argument("--out", default="-")
    return parser


def read_config_file(path: str) -> dict:
    """Parse ``key = value`` lines; ``#`` starts a comment."""
    with open(path, encoding="utf-8") as fh:
        text = fh.read()
    values = {}
    for n, raw in enumerate(text.splitlines(), start=1):
        line = raw.split("#", 1)[0].strip()
        if not line:
            continue
        if "=" not in line:
            raise ConfigError("config", f"line {n}: expected key=value")
        key, value = (x.strip() for x in line.split("=", 1))
        key = key.replace("-", "_")
        if key not in _CONFIG_KEYS:
            raise ConfigError(key, f"unknown configuration key (config line {n})")
        values[key] = value
    return values


def _as_int(name, value) -> int:
    try:
        return int(str(value).replace("_", ""), 10)
    except ValueError:
        raise ConfigError(name, f"expected an integer, got {value!r}") from None


def _as_bool(name, value) -> bool:
    v = str(value).strip().lower()
    if v in ("1", "true", "yes", "on"):
        return True
    if v in ("0", "false", "no", "off"):
        return False
    raise ConfigError(name, f"expected a boolean, got {value!r}")


def parse_config(argv: Sequence[str]) -> RunConfig:
    """Build a RunConfig from ``simulate`` arguments; flags override file values."""
    p = _Parser(prog="ssbsim simulate")
    _add_simulate_flags(p)
    ns = p.parse_args(list(argv))
    return _run_config(ns)


def _run_config(ns) -> RunConfig:
    values = {}
    if ns.config:
        values.update(read_config_file(ns.config))
    for key in _CONFIG_KEYS:
        flag = getattr(ns, key, None)
        if flag is not None:
            values[key] = flag
    if "seed" not in values:
        raise ConfigError("seed", "seed is mandatory for reproducibility")
    for key in ("experiment", "model"):
        if key not in values:
            raise ConfigError(key, "is required")
    ints = {k: _as_int(k, values[k]) for k in _INT_KEYS if k in values}
    bools = {k: _as_bool(k, values[k]) for k in _BOOL_KEYS if k in values}
    exp = ExperimentConfig(
        experiment=values["experiment"],
        model=values["model"],
        trials=ints.get("trials", DEFAULT_TRIALS),
        seed=ints["seed"],
        reversal_policy=values.get("reversal", "conditioned"),
        tomography_shots=ints.get("tomography_shots", DEFAULT_TOMOGRAPHY_SHOTS),
        tomography_exact=bools.get("exact", False),
    )
    return RunConfig(
        experiment=exp,
        output_path=values.get("out", "-"),
        format=values.get("format", "json"),
        compare=bools.get("compare", False),
    )


def _write(path: str, text: str, stdout) -> None:
    if path == "-":
        stdout.write(text)
        return
    with open(path, "w", encoding="utf-8", newline="\n") as fh:
        fh.write(text)


def _other_model(model: MeasurementModel) -> MeasurementModel:
    if model is MeasurementModel.PROJECTIVE:
        return MeasurementModel.UNITARY_SSB
    return MeasurementModel.PROJECTIVE


def simulate_document(cfg: RunConfig) -> str:
    result = run_experiment(cfg.experiment)
    if cfg.format == "csv":
        return result.tomography.counts.to_csv()
    doc = result.to_dict()
    doc["comparison"] = None
    if cfg.compare:
        other_cfg = replace(cfg.experiment, model=_other_model(cfg.experiment.model))
        doc["comparison"] = compare_models(result, run_experiment(other_cfg)).to_dict()
    return canonical_json(doc)


_QUBIT_TARGETS = {
    "0": [1, 0],
    "1": [0, 1],
    "+": [1 / math.sqrt(2), 1 / math.sqrt(2)],
    "-": [1 / math.sqrt(2), -1 / math.sqrt(2)],
    "+i": [1 / math.sqrt(2), 1j / math.sqrt(2)],
    "-i": [1 / math.sqrt(2), -1j / math.sqrt(2)],
}


def named_state(name: str) -> Ket:
    if name in _QUBIT_TARGETS:
        return Ket(_QUBIT_TARGETS[name])
    try:
        return bell_state(name)
    except ContractViolation:
        raise ConfigError("target", f"unknown target state {name!r}") from None


def tomography_document(csv_text: str, target_name: str) -> str:
    target = named_state(target_name)
    counts = CountsTable.from_csv(csv_text)
    missing = missing_strings(counts.counts, counts.nqubits)
    if missing:
        raise IncompleteDataError(missing)
    if target.dim != 2 ** counts.nqubits:
        raise CountsFormatError(f"target {target_name} does not match {counts.nqubits}-qubit data")
    result = reconstruct(expectations_from_counts(counts), counts.nqubits, target,
                         counts.shots_per_setting)
    doc = result.to_dict()
    doc["target"] = target_name
    doc["settings"] = sorted(counts.counts)
    return canonical_json(doc)


def main(argv: Optional[Sequence[str]] = None, stdout=None, stderr=None) -> int:
    stdout = stdout or sys.stdout
    stderr = stderr or sys.stderr
    parser = build_parser()
    try:
        ns = parser.parse_args(list(argv) if argv is not None else None)
        if ns.command is None:
            raise ConfigError("command", "expected one of verify, simulate, tomography")

        if ns.command == "verify":
            if ns.seed is None:
                raise ConfigError("seed", "seed is mandatory for reproducibility")
            try:
                tol = float(ns.tol)
            except ValueError:
                raise ConfigError("tol", f"expected a number, got {ns.tol!r}") from None
            if not tol > 0:
                raise ConfigError("tol", "must be positive")
            samples = _as_int("samples", ns.samples)
            if samples < 1:
                raise ConfigError("samples", "must be positive")
            report = verify_identities(tol, samples, _as_int("seed", ns.seed))
            _write(ns.out, canonical_json(report.to_dict()), stdout)
            return EXIT_OK if report.overall else EXIT_VERIFY_FAILED

        if ns.command == "simulate":
            cfg = _run_config(ns)
            _write(cfg.output_path, simulate_document(cfg), stdout)
            return EXIT_OK

        with open(ns.input, encoding="utf-8") as fh:
            text = fh.read()
        _write(ns.out, tomography_document(text, ns.target), stdout)
        return EXIT_OK

    except ConfigError as exc:
        print(f"config error: {exc}", file=stderr)
        return EXIT_CONFIG
    except IncompleteDataError as exc:
        print(f"data error: {exc}", file=stderr)
        return EXIT_DATA
    except CountsFormatError as exc:
        print(f"data error: {exc}", file=stderr)
        return EXIT_DATA
    except OSError as exc:
        print(f"I/O error: {exc}", file=stderr)
        return EXIT_IO


if __name__ == "__main__":
    sys.exit(main())
