"""Command-line entry point.

    nonlocal-jacobi converge --kernel gaussian --basis chebyshev --N 4,6,8 --out table.csv
    nonlocal-jacobi compat --N 8,16,32,64
    nonlocal-jacobi quadcheck --N 2,16
    nonlocal-jacobi --config run.cfg --delta 0.1

Settings come from built-in defaults, then an optional ``key = value``
config file, then command-line flags (flags win).
"""

from __future__ import annotations

import argparse
import logging
import sys

from .errors import ConfigError, NonlocalJacobiError
from .harness import COMMANDS, KERNELS, RHS_MODES, RunConfig, run

log = logging.getLogger(__name__)

EXIT_OK = 0
EXIT_CONFIG = 2
EXIT_NUMERICAL = 3
EXIT_IO = 4

# config-file key -> (RunConfig field, parser)
_KEYS = {
    "command": ("command", str),
    "kernel": ("kernel_name", str),
    "mu": ("mu", float),
    "delta": ("delta", float),
    "basis": ("basis", str),
    "N": ("n_list", None),
    "M": ("M", str),
    "rhs": ("rhs_mode", str),
    "samples": ("samples", int),
    "out": ("output_path", str),
    "exact": ("exact", str),
    "c_delta": ("c_delta_mode", str),
}


def parse_n_list(text: str) -> tuple[int, ...]:
    try:
        return tuple(int(t) for t in str(text).split(",") if t.strip())
    except ValueError:
        raise ConfigError(f"N: expected a comma-separated list of integers, got {text!r}") from None


def _convert(key, raw):
    field_name, conv = _KEYS[key]
    if key == "N":
        return field_name, parse_n_list(raw)
    try:
        return field_name, conv(raw)
    except ValueError:
        raise ConfigError(f"{key}: cannot parse {raw!r}") from None


def read_config_file(path: str) -> dict:
    """Parse ``key = value`` lines; ``#`` starts a comment."""
    values = {}
    try:
        with open(path, encoding="utf-8") as fh:
            lines = fh.readlines()
    except OSError as exc:
        raise ConfigError(f"config: cannot read {path}: {exc.strerror}") from None
    for lineno, line in enumerate(lines, 1):
        line = line.split("#", 1)[0].strip()
        if not line:
            continue
        if "=" not in line:
            raise ConfigError(f"config: line {lineno} is not 'key = value': {line!r}")
        key, raw = (t.strip() for t in line.split("=", 1))
        if key not in _KEYS:
            raise ConfigError(f"config: unknown key {key!r} (line {lineno})")
        name, value = _convert(key, raw)
        values[name] = value
    return values


def build_parser() -> argparse.ArgumentParser:
    d = RunConfig()
    p = argparse.ArgumentParser(
        prog="nonlocal-jacobi",
        description="Jacobi spectral collocation for weakly singular nonlocal diffusion.",
    )
    p.add_argument("command", nargs="?", choices=COMMANDS,
                   help=f"what to run (default: {d.command})")
    p.add_argument("--config", help="key = value settings file; flags override it")
    p.add_argument("--kernel", choices=KERNELS, help=f"default: {d.kernel_name}")
    p.add_argument("--mu", type=float, help=f"singularity exponent in (0,1) (default: {d.mu})")
    p.add_argument("--delta", type=float,
                   help=f"horizon radius, ignored by compat where delta=1/N (default: {d.delta})")
    p.add_argument("--basis", help=f"legendre, chebyshev or jacobi:a,b (default: {d.basis})")
    p.add_argument("--N", dest="N", help="comma-separated degrees (default: %s)"
                   % ",".join(map(str, d.n_list)))
    p.add_argument("--M", dest="M",
                   help=f"quadrature points per half-horizon: integer, N, N+k or N-k (default: {d.M})")
    p.add_argument("--rhs", choices=RHS_MODES,
                   help=f"closed-form source or adaptive-oracle source (default: {d.rhs_mode})")
    p.add_argument("--exact", help="exact solution: xexp or quadratic (default: xexp for the "
                   "constant kernel, quadratic for the gaussian one)")
    p.add_argument("--c-delta", dest="c_delta", choices=("discrete", "exact"),
                   help=f"diagonal term: quadrature-consistent or exact integral (default: {d.c_delta_mode})")
    p.add_argument("--samples", type=int, help=f"uniform points for the max-norm error (default: {d.samples})")
    p.add_argument("--out", help="output CSV path, - for stdout (default: -)")
    p.add_argument("-v", "--verbose", action="store_true")
    return p


def parse_config(argv, config_path: str | None = None) -> RunConfig:
    """Merge defaults, config file and flags into a validated :class:`RunConfig`."""
    args = build_parser().parse_args(argv)
    values = {}
    path = args.config or config_path
    if path:
        values.update(read_config_file(path))
    for key in _KEYS:
        raw = getattr(args, key, None)
        if raw is not None:
            name, value = _convert(key, raw) if isinstance(raw, str) else (_KEYS[key][0], raw)
            values[name] = value
    return RunConfig(**values)


def main(argv=None) -> int:
    argv = sys.argv[1:] if argv is None else argv
    verbose = "-v" in argv or "--verbose" in argv
    logging.basicConfig(level=logging.INFO if verbose else logging.WARNING,
                        format="%(levelname)s %(name)s: %(message)s")
    try:
        config = parse_config(argv)
    except ConfigError as exc:
        print(f"error: {exc}", file=sys.stderr)
        return EXIT_CONFIG
    log.info("running %s", config)
    try:
        table = run(config)
    except ConfigError as exc:
        print(f"error: {exc}", file=sys.stderr)
        return EXIT_CONFIG
    except NonlocalJacobiError as exc:
        print(f"numerical error: {exc}", file=sys.stderr)
        return EXIT_NUMERICAL
    try:
        table.write(config.output_path)
    except OSError as exc:
        print(f"I/O error: cannot write {config.output_path}: {exc.strerror}", file=sys.stderr)
        return EXIT_IO
    return EXIT_OK


if __name__ == "__main__":
    sys.exit(main())
