"""Command-line front end.

Commands: polymul, ntt, intt, pwm (run the cycle-accurate core),
gen-roms (emit twiddle/address ROM images + manifest), verify
(differential testing against the slow oracles), table (latency and
BRAM summaries across the shipped configurations).

Exit codes: 0 success, 1 verification failure, 2 malformed input file,
3 configuration error, 4 I/O error.

Polynomial files are line-oriented text: a header
"scheme=<kyber|dilithium> n=256 domain=<normal|ntt|ntt-br>" followed by
exactly 256 decimal coefficients, one per line.
"""

from __future__ import annotations

import argparse
import os
import random
import sys

from .core_arith import SCHEMES
from .ntt_reference import (
    DOMAINS,
    DOMAIN_NORMAL,
    DOMAIN_NTT_BR,
    Polynomial,
    reference_pwm,
    schoolbook_negacyclic,
)
from .bfu import fast_ntt
from .memory_map import DESIGNS, build_rom_images, estimate_bram_usage
from .pipeline_sim import (
    OP_POLYMUL,
    SIM_OPS,
    CoreConfig,
    latency_model,
    run_op,
    run_polymul,
)

EXIT_OK = 0
EXIT_VERIFY = 1
EXIT_INPUT = 2
EXIT_CONFIG = 3
EXIT_IO = 4


class CliError(Exception):
    def __init__(self, code: int, message: str) -> None:
        super().__init__(message)
        self.code = code


# ---------------------------------------------------------------------------
# Polynomial file I/O.
# ---------------------------------------------------------------------------

def read_poly(path: str) -> Polynomial:
    try:
        with open(path, "r", encoding="utf-8") as f:
            lines = [ln.strip() for ln in f if ln.strip()]
    except OSError as e:
        raise CliError(EXIT_IO, f"{path}: {e.strerror or e}")
    if not lines:
        raise CliError(EXIT_INPUT, f"{path}: empty file")
    header = dict(
        tok.split("=", 1) for tok in lines[0].split() if "=" in tok)
    scheme = header.get("scheme")
    domain = header.get("domain")
    if scheme not in SCHEMES:
        raise CliError(EXIT_INPUT, f"{path}:1: bad or missing scheme in header")
    if header.get("n") != "256":
        raise CliError(EXIT_INPUT, f"{path}:1: header must declare n=256")
    if domain not in DOMAINS:
        raise CliError(EXIT_INPUT, f"{path}:1: bad or missing domain in header")
    body = lines[1:]
    if len(body) != 256:
        raise CliError(EXIT_INPUT,
                       f"{path}: expected 256 coefficient lines, got {len(body)}")
    q = SCHEMES[scheme].q
    coeffs = []
    for i, ln in enumerate(body, start=2):
        try:
            v = int(ln, 10)
        except ValueError:
            raise CliError(EXIT_INPUT, f"{path}:{i}: not a decimal integer: {ln!r}")
        if not 0 <= v < q:
            raise CliError(EXIT_INPUT, f"{path}:{i}: value {v} outside [0, {q})")
        coeffs.append(v)
    return Polynomial(tuple(coeffs), scheme, domain)


def write_poly(path: str, a: Polynomial) -> None:
    text = "\n".join(
        [f"scheme={a.scheme} n=256 domain={a.domain}"]
        + [str(c) for c in a.coeffs]) + "\n"
    _write_text(path, text)


def _write_text(path: str, text: str) -> None:
    try:
        if path == "-":
            sys.stdout.write(text)
        else:
            with open(path, "w", encoding="utf-8") as f:
                f.write(text)
    except OSError as e:
        raise CliError(EXIT_IO, f"{path}: {e.strerror or e}")


# ---------------------------------------------------------------------------
# Shared helpers.
# ---------------------------------------------------------------------------

def _config(args) -> CoreConfig:
    try:
        return CoreConfig.for_design(args.design)
    except (KeyError, ValueError) as e:
        raise CliError(EXIT_CONFIG, f"bad design: {e}")


def _check_scheme(cfg: CoreConfig, scheme: str) -> str:
    if scheme not in cfg.schemes:
        raise CliError(EXIT_CONFIG,
                       f"design {cfg.design} has no {scheme} datapath")
    return scheme


def _resolve_scheme(args, cfg: CoreConfig, *polys: Polynomial) -> str:
    schemes = {p.scheme for p in polys}
    if len(schemes) > 1:
        raise CliError(EXIT_INPUT, "operand files disagree on scheme")
    scheme = schemes.pop()
    if args.scheme and args.scheme != scheme:
        raise CliError(EXIT_CONFIG,
                       f"--scheme {args.scheme} contradicts file scheme {scheme}")
    return _check_scheme(cfg, scheme)


def _rom_override(args, design: str, scheme: str):
    """Parse a (possibly corrupted) twiddle image back into value tuples."""
    if not getattr(args, "rom_override", None):
        return None
    try:
        with open(args.rom_override, "r", encoding="utf-8") as f:
            lines = [ln.strip() for ln in f if ln.strip()]
    except OSError as e:
        raise CliError(EXIT_IO, f"{args.rom_override}: {e.strerror or e}")
    manifest = build_rom_images(design)["manifest"]
    p = SCHEMES[scheme]
    off = manifest[f"{scheme}_twiddle_offset"]
    per_word = manifest[f"{scheme}_twiddle_values_per_word"]
    counts = (1 << p.layers, 1 << p.layers,
              128 if scheme == "kyber" else 0)
    try:
        words = [int(ln, 16) for ln in lines]
    except ValueError as e:
        raise CliError(EXIT_INPUT, f"{args.rom_override}: bad hex line ({e})")
    mask = (1 << p.coeff_bits) - 1
    values = []
    need = sum(counts)
    for w in words[off:]:
        for i in range(per_word):
            values.append((w >> (i * p.coeff_bits)) & mask)
            if len(values) == need:
                break
        if len(values) == need:
            break
    if len(values) < need:
        raise CliError(EXIT_INPUT,
                       f"{args.rom_override}: too short for {scheme} twiddles")
    fwd = tuple(values[: counts[0]])
    inv = tuple(values[counts[0]: counts[0] + counts[1]])
    psi = tuple(values[counts[0] + counts[1]:])
    return fwd, inv, psi


def _emit_report(args, report) -> None:
    if getattr(args, "report", None):
        _write_text(args.report, report.to_text())


# ---------------------------------------------------------------------------
# Commands.
# ---------------------------------------------------------------------------

def cmd_polymul(args) -> int:
    cfg = _config(args)
    a = read_poly(args.a)
    b = read_poly(args.b)
    scheme = _resolve_scheme(args, cfg, a, b)
    override = _rom_override(args, cfg.design, scheme)
    try:
        out, report = run_polymul(cfg, scheme, a, b, rom_override=override)
    except ValueError as e:
        raise CliError(EXIT_INPUT, str(e))
    if args.out:
        write_poly(args.out, out)
    _emit_report(args, report)
    return EXIT_OK


def cmd_transform(args) -> int:
    cfg = _config(args)
    a = read_poly(args.a)
    b = read_poly(args.b) if args.op == "pwm" else None
    polys = (a, b) if b is not None else (a,)
    scheme = _resolve_scheme(args, cfg, *polys)
    override = _rom_override(args, cfg.design, scheme)
    try:
        out, report = run_op(cfg, scheme, args.op, a, b, rom_override=override)
    except ValueError as e:
        raise CliError(EXIT_INPUT, str(e))
    if args.out:
        write_poly(args.out, out)
    _emit_report(args, report)
    return EXIT_OK


def cmd_gen_roms(args) -> int:
    cfg = _config(args)
    if args.scheme:
        _check_scheme(cfg, args.scheme)
    images = build_rom_images(cfg.design)
    try:
        os.makedirs(args.outdir, exist_ok=True)
    except OSError as e:
        raise CliError(EXIT_IO, f"{args.outdir}: {e.strerror or e}")
    base = os.path.join(args.outdir, cfg.design)
    for kind in ("twiddle", "addr"):
        lines, _width = images[kind]
        _write_text(f"{base}-{kind}.hex", "\n".join(lines) + "\n")
    manifest = images["manifest"]
    _write_text(f"{base}-manifest.txt",
                "".join(f"{k}={v}\n" for k, v in manifest.items()))
    print(f"wrote {base}-twiddle.hex, {base}-addr.hex, {base}-manifest.txt")
    return EXIT_OK


def cmd_verify(args) -> int:
    if args.trials < 1:
        raise CliError(EXIT_CONFIG, "--trials must be at least 1")
    cfg = _config(args)
    schemes = [args.scheme] if args.scheme else list(cfg.schemes)
    for s in schemes:
        _check_scheme(cfg, s)
    failures = 0
    for scheme in schemes:
        p = SCHEMES[scheme]
        override = _rom_override(args, cfg.design, scheme)
        ok = 0
        for i in range(args.trials):
            rng = random.Random(f"{args.seed}/{scheme}/{i}")
            a = Polynomial.random(scheme, rng)
            b = Polynomial.random(scheme, rng)
            try:
                got, _ = run_polymul(cfg, scheme, a, b, rom_override=override)
                want = schoolbook_negacyclic(a, b)
                if got.coeffs != want.coeffs:
                    raise AssertionError(
                        "product mismatch at coefficient "
                        f"{next(k for k in range(256) if got.coeffs[k] != want.coeffs[k])}")
                fa, _ = run_op(cfg, scheme, "ntt", a, rom_override=override)
                if fa.coeffs != fast_ntt(a, p).coeffs:
                    raise AssertionError("forward transform mismatch")
                back, _ = run_op(cfg, scheme, "intt", fa, rom_override=override)
                if back.coeffs != a.coeffs:
                    raise AssertionError("roundtrip mismatch")
                fb = fast_ntt(b, p)
                pw, _ = run_op(cfg, scheme, "pwm", fa, fb, rom_override=override)
                if pw.coeffs != reference_pwm(fa, fb).coeffs:
                    raise AssertionError("pointwise mismatch")
            except AssertionError as e:
                print(f"FAIL {scheme} trial {i} (seed {args.seed}): {e}")
                failures += 1
                break
            ok += 1
        if ok == args.trials:
            print(f"ok {scheme}: {ok}/{args.trials} trials "
                  f"(design {cfg.design}, depth {cfg.pipeline_depth})")
    return EXIT_VERIFY if failures else EXIT_OK


def cmd_table(args) -> int:
    if args.which == "latency":
        print(f"{'design':22s} {'scheme':10s} {'ntt':>6s} {'intt':>6s} "
              f"{'pwm':>6s} {'polymul':>8s}")
        for name in DESIGNS:
            cfg = CoreConfig.for_design(name)
            for scheme in cfg.schemes:
                cells = [latency_model(cfg, scheme, op)
                         for op in (*SIM_OPS, OP_POLYMUL)]
                print(f"{name:22s} {scheme:10s} {cells[0]:6d} {cells[1]:6d} "
                      f"{cells[2]:6d} {cells[3]:8d}")
    else:
        print(f"{'design':22s} {'total':>6s}  breakdown")
        for name in DESIGNS:
            est = estimate_bram_usage(name)
            parts = ", ".join(f"{m.label}={m.units:g}" for m in est.memories)
            print(f"{name:22s} {est.total_units:6.1f}  {parts}")
    return EXIT_OK


# ---------------------------------------------------------------------------
# Parser.
# ---------------------------------------------------------------------------

def _add_common(sp, scheme=True, design=True, seed=False):
    if scheme:
        sp.add_argument("--scheme", choices=sorted(SCHEMES))
    if design:
        sp.add_argument("--design", default="d1", choices=sorted(DESIGNS))
    if seed:
        sp.add_argument("--seed", type=int, default=0)


def build_parser() -> argparse.ArgumentParser:
    ap = argparse.ArgumentParser(
        prog="kdntt",
        description="Bit-exact unified Kyber/Dilithium polynomial "
                    "multiplication core: simulator, ROM generator, checker.")
    sub = ap.add_subparsers(dest="command", required=True)

    mul = sub.add_parser("polymul", help="negacyclic product of two files")
    mul.add_argument("a")
    mul.add_argument("b")
    mul.add_argument("--out")
    mul.add_argument("--report", help="write run telemetry ('-' for stdout)")
    mul.add_argument("--rom-override", help="twiddle image replacing the ROM")
    _add_common(mul)
    mul.set_defaults(func=cmd_polymul)

    for op, help_text in (("ntt", "forward transform of a file"),
                          ("intt", "inverse transform of a file"),
                          ("pwm", "pointwise product of two spectral files")):
        tp = sub.add_parser(op, help=help_text)
        tp.add_argument("a")
        if op == "pwm":
            tp.add_argument("b")
        tp.add_argument("--out")
        tp.add_argument("--report")
        tp.add_argument("--rom-override")
        _add_common(tp)
        tp.set_defaults(func=cmd_transform, op=op)

    gen = sub.add_parser("gen-roms", help="emit ROM images and manifest")
    gen.add_argument("--outdir", required=True)
    _add_common(gen)
    gen.set_defaults(func=cmd_gen_roms)

    ver = sub.add_parser("verify", help="differential test vs slow oracles")
    ver.add_argument("--trials", type=int, default=20)
    ver.add_argument("--rom-override")
    _add_common(ver, seed=True)
    ver.set_defaults(func=cmd_verify)

    tab = sub.add_parser("table", help="latency or BRAM summary")
    tab.add_argument("--which", choices=("latency", "bram"), default="latency")
    tab.set_defaults(func=cmd_table)

    return ap


def main(argv=None) -> int:
    args = build_parser().parse_args(argv)
    try:
        return args.func(args)
    except CliError as e:
        print(f"error: {e}", file=sys.stderr)
        return e.code


if __name__ == "__main__":
    sys.exit(main())
