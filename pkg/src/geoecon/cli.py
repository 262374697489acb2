"""``geoecon`` command line: indices, figures, simulate, synth.

Exit codes: 0 success, 1 computation error, 2 input or configuration error.
"""

from __future__ import annotations

import argparse
import csv
import logging
import os
import sys
from dataclasses import dataclass, field
from pathlib import Path

import numpy as np

from . import reports
from .complexity import complexity_report
from .errors import GeoeconError, IngestError
from .ingest import FilterParams, InvestmentSlice, build_tensor, load_taxonomy
from .specialization import (
    VARIANTS,
    SpecializationMatrix,
    binarize,
    compute_rva,
    round_up_variant,
    windowed_variant,
)
from .strategy import bloc_experiment, find_ssset, parse_rule
from .synth import SynthParams, generate

log = logging.getLogger("geoecon")

LOG_LEVELS = {"error": logging.ERROR, "warn": logging.WARNING, "info": logging.INFO, "debug": logging.DEBUG}


class ConfigError(GeoeconError):
    """Bad flags, config file entries or unreadable paths (exit code 2)."""


# key -> (type, default); keys double as config-file keys and flag names
OPTIONS: dict[str, tuple[type, object]] = {
    "deals": (str, None),
    "classifications": (str, None),
    "taxonomy": (str, None),
    "matrix": (str, None),
    "year": (int, None),
    "variant": (str, "plain"),
    "window": (int, 2),
    "quantum": (float, 1e8),
    "threshold": (float, 0.5),
    "top_n": (int, 3000),
    "min_raise": (float, 1e6),
    "min_firms": (int, 500),
    "split_dual_domain": (str, "false"),
    "out": (str, "."),
    "bloc": (str, None),
    "rule": (str, "any"),
    "seed": (int, None),
    "countries": (int, 8),
    "domains": (int, 10),
    "firms_per_country": (int, 600),
    "nestedness": (float, 1.0),
}


@dataclass
class RunConfig:
    command: str
    deals: Path | None = None
    classifications: Path | None = None
    taxonomy: Path | None = None
    matrix: Path | None = None
    year: int | None = None
    variant: str = "plain"
    window: int = 2
    quantum: float = 1e8
    filters: FilterParams = field(default_factory=FilterParams)
    out: Path = Path(".")
    bloc: list[str] | None = None
    rule: str = "any"
    seed: int | None = None
    countries: int = 8
    domains: int = 10
    firms_per_country: int = 600
    nestedness: float = 1.0


def read_config_file(path: str) -> dict[str, str]:
    """Flat ``key=value`` lines; ``#`` starts a comment."""
    try:
        text = Path(path).read_text(encoding="utf-8")
    except OSError as exc:
        raise ConfigError(f"cannot read config file {path}: {exc.strerror}") from None
    out = {}
    for n, line in enumerate(text.splitlines(), start=1):
        line = line.split("#", 1)[0].strip()
        if not line:
            continue
        if "=" not in line:
            raise ConfigError(f"{path}:{n}: expected key=value")
        key, value = (s.strip() for s in line.split("=", 1))
        key = key.replace("-", "_")
        if key not in OPTIONS:
            raise ConfigError(f"{path}:{n}: unknown key {key!r}")
        out[key] = value
    return out


def _convert(key: str, raw):
    kind, _ = OPTIONS[key]
    if raw is None or not isinstance(raw, str):
        return raw
    try:
        return kind(raw)
    except ValueError:
        raise ConfigError(f"{key}: cannot parse {raw!r} as {kind.__name__}") from None


def _as_bool(key: str, raw: str) -> bool:
    value = str(raw).strip().lower()
    if value in ("1", "true", "yes", "on"):
        return True
    if value in ("0", "false", "no", "off"):
        return False
    raise ConfigError(f"{key}: expected true or false, got {raw!r}")


def build_config(args: argparse.Namespace) -> RunConfig:
    merged = {k: default for k, (_, default) in OPTIONS.items()}
    if args.config:
        merged.update(read_config_file(args.config))
    for key in OPTIONS:
        value = getattr(args, key, None)
        if value is not None:
            merged[key] = value
    v = {k: _convert(k, raw) for k, raw in merged.items()}

    if v["variant"] not in VARIANTS:
        raise ConfigError(f"variant must be one of {', '.join(VARIANTS)}, got {v['variant']!r}")
    if v["bloc"] is not None:
        members = [m.strip() for m in v["bloc"].split(",") if m.strip()]
        if not members:
            raise ConfigError("--bloc needs at least one country")
    else:
        members = None
    try:
        parse_rule(v["rule"])
        filters = FilterParams(
            top_n_firms=v["top_n"],
            min_raise_usd=v["min_raise"],
            min_classified_firms=v["min_firms"],
            probability_threshold=v["threshold"],
            split_dual_domain=_as_bool("split_dual_domain", v["split_dual_domain"]),
        )
    except GeoeconError as exc:
        raise ConfigError(str(exc)) from None

    def path(key):
        return Path(v[key]) if v[key] is not None else None

    return RunConfig(
        command=args.command,
        deals=path("deals"),
        classifications=path("classifications"),
        taxonomy=path("taxonomy"),
        matrix=path("matrix"),
        year=v["year"],
        variant=v["variant"],
        window=v["window"],
        quantum=v["quantum"],
        filters=filters,
        out=Path(v["out"]),
        bloc=members,
        rule=v["rule"],
        seed=v["seed"],
        countries=v["countries"],
        domains=v["domains"],
        firms_per_country=v["firms_per_country"],
        nestedness=v["nestedness"],
    )


def _open(path: Path):
    try:
        return open(path, encoding="utf-8", newline="")
    except OSError as exc:
        raise ConfigError(f"cannot read {path}: {exc.strerror}") from None


def read_matrix_csv(path: Path, year: int | None, variant: str) -> SpecializationMatrix:
    with _open(path) as fh:
        rows = list(csv.reader(fh))
    if not rows or not rows[0] or rows[0][0] != "country":
        raise IngestError(f"{path}: first column must be 'country'")
    domains = rows[0][1:]
    countries, values = [], []
    for n, row in enumerate(rows[1:], start=2):
        if len(row) != len(domains) + 1:
            raise IngestError(f"{path}: line {n}: expected {len(domains) + 1} fields, got {len(row)}")
        try:
            values.append([int(x) for x in row[1:]])
        except ValueError:
            raise IngestError(f"{path}: line {n}: entries must be 0 or 1") from None
        countries.append(row[0])
    return SpecializationMatrix(countries, domains, np.array(values, dtype=np.int64).reshape(len(countries), len(domains)),
                                year or 0, variant)


def load_inputs(cfg: RunConfig):
    """Return (investment slice or None, rva or None, M)."""
    if cfg.matrix is not None:
        return None, None, read_matrix_csv(cfg.matrix, cfg.year, cfg.variant)
    for key in ("deals", "classifications"):
        if getattr(cfg, key) is None:
            raise ConfigError(f"--{key} is required (or pass --matrix)")
    if cfg.taxonomy is not None:
        with _open(cfg.taxonomy) as fh:
            taxonomy = load_taxonomy(fh)
    else:
        taxonomy = load_taxonomy()
    with _open(cfg.deals) as deals, _open(cfg.classifications) as cls:
        tensor = build_tensor(deals, cls, taxonomy, cfg.filters)
    if not tensor.years:
        raise IngestError(f"{cfg.deals}: no deals survive the filters")
    year = cfg.year if cfg.year is not None else max(tensor.years)
    if year not in tensor.years:
        raise ConfigError(f"year {year} not in data (years {tensor.years[0]}..{tensor.years[-1]})")
    log.info("tensor: %d countries, %d domains, years %s", *tensor.raw_values.shape[:2], tensor.years)

    if cfg.variant == "rounded":
        sl = round_up_variant(tensor, year, cfg.quantum)
    elif cfg.variant == "windowed":
        if cfg.window < 1:
            raise ConfigError(f"window must be >= 1, got {cfg.window}")
        missing = [y for y in range(year - cfg.window + 1, year + 1) if y not in tensor.years]
        if missing:
            raise ConfigError(f"window ending {year} needs missing years {missing}")
        sl = windowed_variant(tensor, year, cfg.window)
    else:
        sl = tensor.slice(year)
    rva = compute_rva(sl)
    return sl, rva, binarize(rva)


def _prepare_out(cfg: RunConfig) -> Path:
    try:
        cfg.out.mkdir(parents=True, exist_ok=True)
    except OSError as exc:
        raise ConfigError(f"cannot create output directory {cfg.out}: {exc.strerror}") from None
    return cfg.out


def cmd_indices(cfg: RunConfig) -> list[Path]:
    _, rva, M = load_inputs(cfg)
    report = complexity_report(M)
    out = _prepare_out(cfg)
    written = []
    if rva is not None:
        reports.atomic_write(out / "rva.csv", reports.rva_csv(rva))
        written.append(out / "rva.csv")
    reports.atomic_write(out / "matrix.csv", reports.matrix_csv(M))
    reports.atomic_write(out / "indices.json", reports.to_json(reports.indices_dict(report)))
    return written + [out / "matrix.csv", out / "indices.json"]


def cmd_figures(cfg: RunConfig) -> list[Path]:
    _, _, M = load_inputs(cfg)
    out = _prepare_out(cfg)
    reports.atomic_write(out / "heatmap.csv", reports.heatmap_csv(M))
    reports.atomic_write(out / "scatter.csv", reports.scatter_csv(M))
    return [out / "heatmap.csv", out / "scatter.csv"]


def cmd_simulate(cfg: RunConfig) -> list[Path]:
    sl, _, M = load_inputs(cfg)
    out = _prepare_out(cfg)
    if cfg.bloc is not None:
        rule, k = parse_rule(cfg.rule)
        result = bloc_experiment(M, cfg.bloc, rule, k, investment=sl)
    ssset = find_ssset(M)
    reports.atomic_write(out / "ssset.csv", reports.ssset_csv(ssset))
    written = [out / "ssset.csv"]
    if cfg.bloc is not None:
        reports.atomic_write(out / "bloc.json", reports.bloc_json(result))
        written.append(out / "bloc.json")
    return written


def cmd_synth(cfg: RunConfig) -> list[Path]:
    if cfg.seed is None:
        raise ConfigError("synth needs --seed")
    try:
        params = SynthParams(cfg.seed, cfg.countries, cfg.domains, cfg.firms_per_country,
                             cfg.nestedness, cfg.year if cfg.year is not None else 2024)
    except GeoeconError as exc:
        raise ConfigError(str(exc)) from None
    out = _prepare_out(cfg)
    written = []
    for name, text in generate(params).items():
        reports.atomic_write(out / name, text)
        written.append(out / name)
    return written


COMMANDS = {"indices": cmd_indices, "figures": cmd_figures, "simulate": cmd_simulate, "synth": cmd_synth}


def make_parser() -> argparse.ArgumentParser:
    common = argparse.ArgumentParser(add_help=False)
    common.add_argument("--config", help="flat key=value file; flags override it")
    common.add_argument("--deals")
    common.add_argument("--classifications")
    common.add_argument("--taxonomy", help="taxonomy JSON (default: the shipped 18 domains)")
    common.add_argument("--matrix", help="start from a saved matrix.csv instead of raw deals")
    common.add_argument("--year", type=int)
    common.add_argument("--variant", choices=VARIANTS)
    common.add_argument("--window", type=int)
    common.add_argument("--quantum", type=float)
    common.add_argument("--threshold", type=float)
    common.add_argument("--top-n", dest="top_n", type=int)
    common.add_argument("--min-raise", dest="min_raise", type=float)
    common.add_argument("--min-firms", dest="min_firms", type=int)
    common.add_argument("--split-dual-domain", dest="split_dual_domain", action="store_const", const="true")
    common.add_argument("--out")
    common.add_argument("--bloc", help="comma-separated member countries")
    common.add_argument("--rule", help="any | k:N")
    common.add_argument("--seed", type=int)
    common.add_argument("--countries", type=int)
    common.add_argument("--domains", type=int)
    common.add_argument("--firms-per-country", dest="firms_per_country", type=int)
    common.add_argument("--nestedness", type=float)

    parser = argparse.ArgumentParser(prog="geoecon", description=__doc__.splitlines()[0])
    sub = parser.add_subparsers(dest="command", required=True)
    sub.add_parser("indices", parents=[common], help="RVA, specialization matrix and ETGCI/GCI")
    sub.add_parser("figures", parents=[common], help="heatmap and diversity/ubiquity scatter data")
    sub.add_parser("simulate", parents=[common], help="single-step additions and bloc experiments")
    sub.add_parser("synth", parents=[common], help="generate a synthetic nested fixture")
    return parser


def _setup_logging() -> None:
    level = os.environ.get("GEOECON_LOG", "warn").strip().lower()
    if level not in LOG_LEVELS:
        raise ConfigError(f"GEOECON_LOG must be one of {', '.join(LOG_LEVELS)}, got {level!r}")
    logging.basicConfig(level=LOG_LEVELS[level], format="%(levelname)s %(name)s: %(message)s", stream=sys.stderr)
    logging.captureWarnings(True)


def main(argv: list[str] | None = None) -> int:
    parser = make_parser()
    try:
        args = parser.parse_args(argv)
    except SystemExit as exc:  # argparse already printed usage
        return 2 if exc.code else 0
    try:
        _setup_logging()
        cfg = build_config(args)
        written = COMMANDS[cfg.command](cfg)
    except (ConfigError, IngestError) as exc:
        print(f"geoecon: error: {exc}", file=sys.stderr)
        return 2
    except GeoeconError as exc:
        print(f"geoecon: error: {exc}", file=sys.stderr)
        return 1
    for path in written:
        log.info("wrote %s", path)
    return 0


if __name__ == "__main__":
    sys.exit(main())
