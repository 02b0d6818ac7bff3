"""
Command-line front end.

    eitnoise SUBCOMMAND [--preset NAME] [--config PATH] [--output PATH]
                        [--format csv|jsonl] [--model offdiag|popexch]
                        [--dump-config] [--include-vacuum-transit]

Exit status: 0 success, 2 configuration error, 3 solver failure, 4 when
``consistency`` finds the selected model inconsistent with the weak-probe
premise (the expected outcome for the population-exchange model).
"""

from __future__ import annotations

import argparse
import contextlib
import csv
import io
import sys

import numpy as np

from .config import PRESETS, ConfigError, build_config, parse_config, preset_values
from .entanglement_cv import entanglement_delay_report
from .errors import EITError
from .lambda_system import NoiseModel, Verdict, steady_state, weak_probe_consistency
from .linear_response import power_transmission, propagation_exponent
from .noise_spectra import (
    Quadrature,
    SpectrumSeries,
    output_spectrum,
    squeezed_input,
    squeezing_db,
    squeezing_delay_report,
)
from .oracle_integrator import oracle_propagation_exponent, relax

EXIT_OK = 0
EXIT_CONFIG = 2
EXIT_SOLVER = 3
EXIT_INCONSISTENT = 4

COLUMNS = {
    "susceptibility": ("omega", "re_lambda", "im_lambda", "transmission"),
    "spectrum": ("omega", "model", "s_in_amplitude", "s_out_amplitude",
                 "s_in_phase", "s_out_phase"),
    "squeezing": ("omega", "s_in_squeezed", "s_out_squeezed", "s_in_antisqueezed",
                  "s_out_antisqueezed", "squeezing_db_out", "delay_s", "preservation_ratio"),
    "entanglement": ("omega", "duan", "reid"),
    "consistency": ("model", "epsilon", "population_deficit", "verdict"),
    "verify": ("omega", "re_lambda_closed", "im_lambda_closed", "re_lambda_oracle",
               "im_lambda_oracle", "rel_dev"),
}

VERIFY_POINTS = 5
VERIFY_TOL = 1e-3


def _fmt(value):
    if isinstance(value, (float, np.floating)):
        return format(float(value), ".17g")
    if isinstance(value, (int, np.integer)):
        return str(int(value))
    return str(value)


def write_table(stream, columns, rows, fmt="csv"):
    """Write rows as CSV (``\\n`` line endings) or JSON Lines, numbers to 17 digits."""
    if fmt == "csv":
        writer = csv.writer(stream, lineterminator="\n")
        writer.writerow(columns)
        for row in rows:
            writer.writerow([_fmt(v) for v in row])
    elif fmt == "jsonl":
        import json

        for row in rows:
            parts = []
            for key, v in zip(columns, row):
                text = _fmt(v) if isinstance(v, (int, float, np.integer, np.floating)) else json.dumps(str(v))
                parts.append(f"{json.dumps(key)}: {text}")
            stream.write("{" + ", ".join(parts) + "}\n")
    else:
        raise ConfigError(f"unknown format {fmt!r}")


def _susceptibility(cfg, args):
    p = cfg.params
    w = cfg.omega_grid
    deph = p.gamma_bc_popexch if cfg.model is NoiseModel.POPULATION_EXCHANGE else None
    lam = propagation_exponent(p, w, dephasing=deph)
    T = power_transmission(p, w, dephasing=deph)
    return [(wi, li.real, li.imag, ti) for wi, li, ti in zip(w, lam, T)], [], EXIT_OK


def _spectrum(cfg, args):
    p = cfg.params
    w = cfg.omega_grid
    s_x = squeezed_input(w, cfg.squeezing_r)
    s_p = squeezed_input(w, cfg.squeezing_r, antisqueezed=True)
    out_x = output_spectrum(cfg.model, s_x, p)
    out_p = output_spectrum(cfg.model, s_p, p)
    tag = cfg.model.value
    rows = [(wi, tag, a, b, c, d) for wi, a, b, c, d in
            zip(w, s_x.values, out_x.values, s_p.values, out_p.values)]
    return rows, [], EXIT_OK


def _squeezing(cfg, args):
    p = cfg.params
    w = cfg.omega_grid
    rep = squeezing_delay_report(cfg.squeezing_r, p, omega_grid=w,
                                 include_vacuum_transit=args.include_vacuum_transit)
    s_in = squeezed_input(w, cfg.squeezing_r).values
    a_in = squeezed_input(w, cfg.squeezing_r, antisqueezed=True).values
    rows = [(wi, si, so, ai, ao, squeezing_db(so), rep.delay_s, rep.preservation_ratio)
            for wi, si, so, ai, ao in zip(w, s_in, rep.s_out_squeezed.values, a_in,
                                          rep.s_out_antisqueezed.values)]
    summary = [f"delay_s={_fmt(rep.delay_s)} preservation_ratio={_fmt(rep.preservation_ratio)}"]
    return rows, summary, EXIT_OK


def _entanglement(cfg, args):
    if cfg.squeezing_r <= 0:
        raise ConfigError("entanglement needs squeezing_r > 0")
    rep = entanglement_delay_report(cfg.squeezing_r, cfg.params, omega_grid=cfg.omega_grid)
    delay = rep.delay_s
    if args.include_vacuum_transit:
        delay += cfg.length / cfg.c_light
    rows = list(zip(rep.omega_grid, rep.duan, rep.reid))
    summary = [f"delay_s={_fmt(delay)} entangled_bandwidth={_fmt(rep.entangled_bandwidth)}"]
    return rows, summary, EXIT_OK


def _consistency(cfg, args):
    p = cfg.params
    rows, summary = [], []
    selected = None
    for model in (NoiseModel.OFF_DIAGONAL, NoiseModel.POPULATION_EXCHANGE):
        rep = weak_probe_consistency(p, cfg.probe_amplitude, model)
        rows.append((model.value, rep.epsilon, rep.population_deficit, rep.verdict.value))
        summary.append(f"{model.value}: epsilon={_fmt(rep.epsilon)} "
                       f"population_deficit={_fmt(rep.population_deficit)} verdict={rep.verdict.value}")
        if model is cfg.model:
            selected = rep
    code = EXIT_INCONSISTENT if selected.verdict is Verdict.INCONSISTENT else EXIT_OK
    return rows, summary, code


def _verify(cfg, args):
    p = cfg.params
    grid = cfg.omega_grid
    idx = np.unique(np.linspace(0, grid.size - 1, VERIFY_POINTS).round().astype(int))
    rows = []
    worst = 0.0
    for wi in grid[idx]:
        closed = propagation_exponent(p, wi)
        oracle = oracle_propagation_exponent(p, wi)
        dev = abs(oracle - closed) / abs(closed) if closed != 0 else abs(oracle)
        worst = max(worst, dev)
        rows.append((wi, closed.real, closed.imag, oracle.real, oracle.imag, dev))
    summary = [f"max relative deviation (Lambda, closed form vs time domain): {_fmt(worst)}"]
    if p.omega_c != 0 and cfg.probe_amplitude > 0:
        algebraic = steady_state(p, cfg.probe_amplitude)
        settled = relax(p, cfg.probe_amplitude)
        d_alg = algebraic.sigma_aa + algebraic.sigma_cc
        d_int = 1.0 - settled[0].real
        dev = abs(d_int - d_alg) / d_alg if d_alg else abs(d_int)
        summary.append(f"max relative deviation (steady-state deficit): {_fmt(dev)}")
        worst = max(worst, dev)
    return rows, summary, EXIT_OK if worst <= VERIFY_TOL else EXIT_SOLVER


HANDLERS = {
    "susceptibility": _susceptibility,
    "spectrum": _spectrum,
    "squeezing": _squeezing,
    "entanglement": _entanglement,
    "consistency": _consistency,
    "verify": _verify,
}


def build_parser():
    parser = argparse.ArgumentParser(
        prog="eitnoise",
        description="Quadrature noise, delay and entanglement of a weak probe in a Lambda EIT medium.")
    parser.add_argument("subcommand", choices=sorted(HANDLERS), nargs="?")
    parser.add_argument("--config", metavar="PATH", help="flat key = value parameter file")
    parser.add_argument("--preset", metavar="NAME", help=f"one of: {', '.join(sorted(PRESETS))}")
    parser.add_argument("--output", metavar="PATH", help="data file (default: stdout)")
    parser.add_argument("--format", choices=("csv", "jsonl"))
    parser.add_argument("--model", choices=("offdiag", "popexch"))
    parser.add_argument("--dump-config", action="store_true",
                        help="print the resolved configuration and exit")
    parser.add_argument("--include-vacuum-transit", action="store_true",
                        help="add L/c to reported delays")
    parser.add_argument("--list-presets", action="store_true")
    return parser


def resolve_config(args):
    values = preset_values(args.preset) if args.preset else {}
    if args.config:
        try:
            with open(args.config, encoding="utf-8") as fh:
                text = fh.read()
        except OSError as exc:
            raise ConfigError(f"cannot read config: {exc}") from None
        cfg = parse_config(text, values)
    else:
        cfg = build_config(values)
    overrides = {}
    if args.model:
        overrides["model"] = NoiseModel.parse(args.model)
    if args.format:
        overrides["format"] = args.format
    if args.output:
        overrides["output_path"] = args.output
    return cfg.replace(**overrides) if overrides else cfg


@contextlib.contextmanager
def _open_output(path):
    if path:
        with open(path, "w", encoding="utf-8", newline="") as fh:
            yield fh
    else:
        yield sys.stdout


def main(argv=None):
    parser = build_parser()
    args = parser.parse_args(argv)
    if args.list_presets:
        for name in sorted(PRESETS):
            print(name)
        return EXIT_OK
    try:
        cfg = resolve_config(args)
    except ConfigError as exc:
        print(f"eitnoise: config error: {exc}", file=sys.stderr)
        return EXIT_CONFIG
    if args.dump_config:
        sys.stdout.write(cfg.to_text())
        return EXIT_OK
    if args.subcommand is None:
        parser.print_usage(sys.stderr)
        print("eitnoise: a subcommand is required", file=sys.stderr)
        return EXIT_CONFIG
    try:
        rows, summary, code = HANDLERS[args.subcommand](cfg, args)
    except (ConfigError, ValueError) as exc:
        print(f"eitnoise: config error: {exc}", file=sys.stderr)
        return EXIT_CONFIG
    except EITError as exc:
        print(f"eitnoise: solver failure: {exc}", file=sys.stderr)
        return EXIT_SOLVER
    buf = io.StringIO()
    write_table(buf, COLUMNS[args.subcommand], rows, cfg.format)
    with _open_output(cfg.output_path) as fh:
        fh.write(buf.getvalue())
    note = sys.stdout if cfg.output_path else sys.stderr
    for line in summary:
        print(line, file=note)
    return code


if __name__ == "__main__":
    sys.exit(main())
