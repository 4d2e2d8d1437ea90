"""Command-line front end: ``nrthreat {grid,threat,simulate,defend}``.

Exit status is 0 when every artifact was written, 2 for configuration
errors and 3 for failures while running.
"""

from __future__ import annotations

import argparse
import csv
import dataclasses
import datetime as dt
import hashlib
import io
import json
import logging
import math
import os
import sys
from pathlib import Path
from typing import Any, Callable

from . import __version__
from .config import build, check_keys, digest, load_json, number_list, positive_int
from .defense import (
    AttackerModel,
    CellBeacon,
    ScenarioRandomization,
    SearchConfig,
    blacklist_growth,
    sweep_power_offset,
)
from .errors import ConfigConflict, ConfigParse, NRThreatError, UnknownSpacing, UnsupportedCombination
from .grid import (
    DOWNLINK_KINDS,
    UPLINK_KINDS,
    ChannelKind,
    Direction,
    GridConfig,
    build_grid,
    occupancy_map,
    re_counts,
    to_csv,
    to_json,
)
from .jamsim import (
    LinkConfig,
    crossing_db,
    failure_curve,
    qpsk_theoretical_ber,
    simulate_ber,
    threshold_from_curve,
)
from .jamsim.link import DOS_FAILURE_LEVEL
from .threat import (
    DEFAULT_ATTACKS,
    ATTACKS_BY_NAME,
    assess,
    override_attacks,
    ranking_scatter,
    raw_csv,
    scatter_csv,
    spoofing_re_count,
    table_csv,
)

log = logging.getLogger("nrthreat")

# validation failures that stem from the config rather than the run
_CONFIG_ERRORS = (ConfigParse, ConfigConflict, UnknownSpacing, UnsupportedCombination)

EXIT_OK, EXIT_CONFIG, EXIT_RUNTIME = 0, 2, 3


def _jsonable(x: Any) -> Any:
    if isinstance(x, float) and math.isinf(x):
        return "inf" if x > 0 else "-inf"
    if isinstance(x, dict):
        return {str(k): _jsonable(v) for k, v in x.items()}
    if isinstance(x, (list, tuple)):
        return [_jsonable(v) for v in x]
    return x


def _dump(doc: Any) -> str:
    return json.dumps(_jsonable(doc), indent=2, sort_keys=True) + "\n"


def _csv(header, rows) -> str:
    buf = io.StringIO()
    w = csv.writer(buf, lineterminator="\n")
    w.writerow(header)
    w.writerows(rows)
    return buf.getvalue()


def _num(x: float) -> str:
    return repr(float(x))


def _timestamp() -> str:
    # SOURCE_DATE_EPOCH pins the manifest time for byte-identical reruns
    epoch = os.environ.get("SOURCE_DATE_EPOCH")
    when = (dt.datetime.fromtimestamp(int(epoch), dt.timezone.utc) if epoch
            else dt.datetime.now(dt.timezone.utc).replace(microsecond=0))
    return when.isoformat()


class Writer:
    """Collects artifacts and writes them with an accompanying manifest."""

    def __init__(self, out_dir: Path):
        self.out_dir = out_dir
        self.files: dict[str, str] = {}

    def add(self, name: str, text: str) -> None:
        self.files[name] = text

    def flush(self, command: str, config: dict, seed: int | None) -> None:
        self.out_dir.mkdir(parents=True, exist_ok=True)
        for name, text in self.files.items():
            with open(self.out_dir / name, "w", encoding="utf-8", newline="\n") as fh:
                fh.write(text)
        manifest = {
            "command": command,
            "config_digest": digest(_jsonable(config)),
            "seed": seed,
            "tool_version": __version__,
            "timestamp": _timestamp(),
            "outputs": {
                name: hashlib.sha256(text.encode("utf-8")).hexdigest()
                for name, text in sorted(self.files.items())
            },
        }
        with open(self.out_dir / "manifest.json", "w", encoding="utf-8", newline="\n") as fh:
            fh.write(_dump(manifest))


# ---------------------------------------------------------------------------
# grid


def _grid_config(doc: dict | None, section: str = "grid") -> GridConfig:
    return build(GridConfig, section, doc)


def cmd_grid(cfg: dict, args, out: Writer) -> None:
    grid = build_grid(_grid_config(cfg))
    occ = occupancy_map(grid)
    out.add("occupancy.csv", to_csv(occ))
    out.add("occupancy.json", to_json(occ, grid.dims) + "\n")
    counts = re_counts(grid)
    kinds = DOWNLINK_KINDS if grid.config.direction is Direction.DOWNLINK else UPLINK_KINDS
    rows = [
        (k.name, counts[k], _num(counts[k] / grid.dims.res_per_frame), f"{100 * counts[k] / grid.dims.res_per_frame:.2f}")
        for k in ChannelKind
        if k in kinds and (k is not ChannelKind.UNUSED or counts[k])
    ]
    out.add("sparsity.csv", _csv(("channel", "re_count", "re_fraction", "percent"), rows))


# ---------------------------------------------------------------------------
# threat


def cmd_threat(cfg: dict, args, out: Writer) -> None:
    check_keys("threat", cfg, ("grid", "overrides", "n_fake_pss", "spoof_period_ms"))
    grid_cfg = _grid_config(cfg.get("grid"))
    overrides = dict(cfg.get("overrides", {}))
    check_keys("threat.overrides", overrides, ATTACKS_BY_NAME)
    allowed = {"js_ch_db", "sync_required", "params_required", "occupancy_override"}
    for name, fields in overrides.items():
        check_keys(f"threat.overrides.{name}", fields, allowed)
    if "n_fake_pss" in cfg or "spoof_period_ms" in cfg:
        count = spoofing_re_count(int(cfg.get("n_fake_pss", 3)), float(cfg.get("spoof_period_ms", 20.0)))
        overrides.setdefault("PSS (Spoofing)", {})
        overrides["PSS (Spoofing)"] = {"occupancy_override": count, **overrides["PSS (Spoofing)"]}
    try:
        attacks = override_attacks(DEFAULT_ATTACKS, overrides)
    except (KeyError, TypeError, ValueError) as exc:
        raise ConfigParse(f"threat.overrides: {exc}") from exc
    entries = assess(grid_cfg, attacks)
    out.add("threat_table.csv", table_csv(entries))
    out.add("threat_table_raw.csv", raw_csv(entries))
    out.add("ranking_scatter.csv", scatter_csv(ranking_scatter(entries)))


# ---------------------------------------------------------------------------
# simulate

_SIM_KEYS = ("seed", "trials", "snr_db", "ber", "bler", "pss", "sss", "thresholds")


def _sweep_rows(points):
    return [
        (_num(p.j_s_ch_db), _num(p.result.point_estimate), _num(p.failure),
         _num(p.result.confidence_halfwidth_95), int(p.result.ci_valid), p.result.trials)
        for p in points
    ]


_SWEEP_HEADER = ("j_s_ch_db", "metric", "failure", "ci_halfwidth_95", "ci_valid", "trials")


def cmd_simulate(cfg: dict, args, out: Writer) -> None:
    check_keys("simulate", cfg, _SIM_KEYS)
    seed = int(args.seed if args.seed is not None else cfg.get("seed", 0))
    trials = positive_int("simulate.trials", args.trials if args.trials is not None else cfg.get("trials", 1000))
    snr_db = float(cfg.get("snr_db", 10.0))
    records: list[dict] = []
    curves = {}

    if "ber" in cfg:
        sec = cfg["ber"]
        check_keys("simulate.ber", sec, ("ebn0_db", "n_bits"))
        n_bits = positive_int("simulate.ber.n_bits", sec.get("n_bits", 1_000_000))
        rows = []
        for e in number_list("simulate.ber.ebn0_db", sec.get("ebn0_db", [0, 2, 4, 6, 8])):
            res = simulate_ber(e, n_bits, seed)
            theory = float(qpsk_theoretical_ber(e))
            rows.append((_num(e), _num(res.point_estimate), _num(res.confidence_halfwidth_95),
                         int(res.ci_valid), _num(theory), int(abs(res.point_estimate - theory) <= res.confidence_halfwidth_95)))
            records.append({"kind": "ber", "config": {"ebn0_db": e, "n_bits": n_bits}, "seed": seed,
                            "estimate": res.point_estimate, "ci": res.confidence_halfwidth_95,
                            "trials": res.trials, "samples": res.samples})
        out.add("ber_sweep.csv", _csv(("ebn0_db", "ber", "ci_halfwidth_95", "ci_valid", "theory", "within_ci"), rows))

    code_keys = ("js_db", "polar_n", "polar_k", "design_snr_db")
    link = LinkConfig(snr_db=snr_db, trials=trials, seed=seed)
    if "bler" in cfg:
        sec = cfg["bler"]
        check_keys("simulate.bler", sec, code_keys + ("channel",))
        try:
            link = dataclasses.replace(link, **{k: sec[k] for k in ("polar_n", "polar_k", "design_snr_db") if k in sec})
        except NRThreatError as exc:
            raise ConfigParse(f"simulate.bler: {exc}") from exc
        channel = _channel(sec.get("channel", "PBCH"))
        pts = failure_curve(channel, link, number_list("simulate.bler.js_db", sec.get("js_db", list(range(-5, 16)))))
        curves[channel] = pts
        out.add("bler_sweep.csv", _csv(_SWEEP_HEADER, _sweep_rows(pts)))

    for key, channel in (("pss", ChannelKind.PSS), ("sss", ChannelKind.SSS)):
        if key in cfg:
            sec = cfg[key]
            check_keys(f"simulate.{key}", sec, ("js_db",))
            pts = failure_curve(channel, link, number_list(f"simulate.{key}.js_db", sec.get("js_db", list(range(-10, 31)))))
            curves[channel] = pts
            out.add(f"{key}_detection_sweep.csv", _csv(_SWEEP_HEADER, _sweep_rows(pts)))

    for channel, pts in curves.items():
        for p in pts:
            records.append({"kind": f"{channel.name.lower()}_sweep", "config": {
                "j_s_ch_db": p.j_s_ch_db, "snr_db": link.snr_db,
                "polar_n": link.polar_n, "polar_k": link.polar_k}, "seed": seed,
                "estimate": p.result.point_estimate, "ci": p.result.confidence_halfwidth_95,
                "trials": p.result.trials})

    if "thresholds" in cfg:
        sec = cfg["thresholds"]
        check_keys("simulate.thresholds", sec, ("channels", "lo_db", "hi_db", "step_db"))
        lo, hi, step = float(sec.get("lo_db", -10)), float(sec.get("hi_db", 20)), float(sec.get("step_db", 1))
        from .jamsim import sweep_range
        rows = []
        for name in sec.get("channels", ["PBCH", "PSS"]):
            channel = _channel(name)
            pts = failure_curve(channel, link, sweep_range(lo, hi, step))
            try:
                thr = _num(threshold_from_curve(pts))
            except NRThreatError:
                thr = ""
            half = crossing_db(pts, 0.5)
            rows.append((channel.name, thr, "" if half is None else _num(half), _num(lo), _num(hi), _num(step)))
        out.add("dos_thresholds.csv", _csv(
            ("channel", "dos_threshold_db", "js_50_db", "sweep_lo_db", "sweep_hi_db", "step_db"), rows))

    out.add("results.json", _dump({"failure_level": DOS_FAILURE_LEVEL, "records": records}))


def _channel(name: str) -> ChannelKind:
    try:
        return ChannelKind[str(name).upper()]
    except KeyError:
        raise ConfigParse(f"unknown channel {name!r}") from None


# ---------------------------------------------------------------------------
# defend

_DEFEND_KEYS = ("beacons", "attacker", "search", "randomization", "trials", "seed",
                "power_offsets_db", "blacklist_growth")


def _float_or_inf(x):
    if isinstance(x, str) and x.lower() in ("inf", "infinity"):
        return math.inf
    return float(x)


def cmd_defend(cfg: dict, args, out: Writer) -> None:
    check_keys("defend", cfg, _DEFEND_KEYS)
    seed = int(args.seed if args.seed is not None else cfg.get("seed", 0))
    trials = positive_int("defend.trials", args.trials if args.trials is not None else cfg.get("trials", 1000))
    # omitted means the default attacker; an explicit null means none
    attacker_doc = cfg.get("attacker", {})
    attacker = AttackerModel.absent() if attacker_doc is None else build(AttackerModel, "defend.attacker", attacker_doc)
    search = build(SearchConfig, "defend.search", cfg.get("search"), decay_ms=_float_or_inf)
    rand = build(ScenarioRandomization, "defend.randomization", cfg.get("randomization"),
                 legit_power_window_db=lambda v: tuple(float(x) for x in v))
    environment = None
    if "beacons" in cfg:
        if not isinstance(cfg["beacons"], list):
            raise ConfigParse("defend.beacons: expected a list")
        environment = [build(CellBeacon, f"defend.beacons[{i}]", b) for i, b in enumerate(cfg["beacons"])]
    offsets = number_list("defend.power_offsets_db", cfg.get("power_offsets_db", [attacker.power_offset_db]))

    results = sweep_power_offset(offsets, attacker, search, rand, trials, seed, environment)
    rows, records = [], []
    for off, arms in results:
        rec = {"power_offset_db": off}
        row = [_num(off)]
        for arm in ("unmitigated", "mitigated"):
            r = arms[arm]
            row += [_num(r.point_estimate), _num(r.confidence_halfwidth_95)]
            rec[arm] = r.to_record()
        rows.append(row)
        records.append(rec)
    out.add("defense_sweep.csv", _csv(
        ("power_offset_db", "p_dos_unmitigated", "ci_unmitigated", "p_dos_mitigated", "ci_mitigated"), rows))

    doc = {
        "attacker": dataclasses.asdict(attacker),
        "search": dataclasses.asdict(search),
        "randomization": dataclasses.asdict(rand),
        "trials": trials,
        "seed": seed,
        "results": records,
    }
    if "blacklist_growth" in cfg:
        sec = cfg["blacklist_growth"]
        check_keys("defend.blacklist_growth", sec, ("duration_ms", "decay_ms", "timing_bucket_samples"))
        duration = float(sec.get("duration_ms", 10_000.0))
        growth = []
        for decay in sec.get("decay_ms", [100.0, "inf"]):
            cfg_g = dataclasses.replace(search, decay_ms=_float_or_inf(decay),
                                        timing_bucket_samples=int(sec.get("timing_bucket_samples", search.timing_bucket_samples)))
            o = blacklist_growth(dataclasses.replace(attacker, rotate_each_frame=True, n_fake_pss=max(attacker.n_fake_pss, 1)),
                                 cfg_g, duration, seed)
            growth.append({"decay_ms": cfg_g.decay_ms, "final_size": o.blacklist_size,
                           "peak_size": o.peak_blacklist_size, "elapsed_ms": o.elapsed_ms})
        doc["blacklist_growth"] = growth
    out.add("defense.json", _dump(doc))


# ---------------------------------------------------------------------------

COMMANDS: dict[str, Callable[[dict, argparse.Namespace, Writer], None]] = {
    "grid": cmd_grid,
    "threat": cmd_threat,
    "simulate": cmd_simulate,
    "defend": cmd_defend,
}


def make_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(prog="nrthreat", description=__doc__.splitlines()[0])
    parser.add_argument("--version", action="version", version=f"%(prog)s {__version__}")
    sub = parser.add_subparsers(dest="command", required=True)
    for name in COMMANDS:
        p = sub.add_parser(name)
        p.add_argument("config_path", nargs="?", help="JSON config (same as --config)")
        p.add_argument("--config", dest="config", help="JSON config file")
        p.add_argument("--out", default="out", help="output directory (default: ./out)")
        p.add_argument("--seed", type=int, default=None)
        p.add_argument("--trials", type=int, default=None)
    return parser


def main(argv: list[str] | None = None) -> int:
    logging.basicConfig(level=logging.WARNING, format="%(levelname)s %(name)s: %(message)s")
    args = make_parser().parse_args(argv)
    config_path = args.config or args.config_path
    writer = Writer(Path(args.out))
    try:
        cfg = load_json(config_path)
        if args.command == "defend" and config_path is None:
            raise ConfigParse("defend needs a scenario file")
        COMMANDS[args.command](cfg, args, writer)
        writer.flush(args.command, cfg, args.seed if args.seed is not None else cfg.get("seed"))
    except _CONFIG_ERRORS as exc:
        print(f"nrthreat {args.command}: config error: {exc}", file=sys.stderr)
        return EXIT_CONFIG
    except NRThreatError as exc:
        print(f"nrthreat {args.command}: {exc}", file=sys.stderr)
        return EXIT_RUNTIME
    except OSError as exc:
        print(f"nrthreat {args.command}: cannot write outputs: {exc}", file=sys.stderr)
        return EXIT_RUNTIME
    return EXIT_OK


if __name__ == "__main__":
    sys.exit(main())
