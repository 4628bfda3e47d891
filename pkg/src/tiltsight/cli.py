from __future__ import annotations

import argparse
import json
import sys
from pathlib import Path
from typing import Any

from tiltsight.complexes import InvariantViolation
from tiltsight.dem import check_presentation, is_d_self_injective, omega_power, projective_presentation, sigma_power
from tiltsight.morita import DEFAULT_ENUMERATION_BOUND, MoritaContext, build_context, verify_equivalence
from tiltsight.orbit import ClusterCategory, ScanWindowExceeded, build
from tiltsight.outputs import (
    golden_diff,
    golden_observation,
    homs_payload,
    homs_text,
    lambda_payload,
    objects_payload,
    objects_text,
    quiver_to_dot,
    write_json,
    write_text,
)
from tiltsight.quivers import algebras_isomorphic, enumerate_basis
from tiltsight.quotient import QuotientCategory, quotient_by
from tiltsight.registry import ConfigError, SessionConfig, example_path, load_config, load_golden, merge


EXIT_OK = 0
EXIT_FAILED = 1
EXIT_USAGE = 2
EXIT_INVARIANT = 3


def main(argv: list[str] | None = None) -> int:
    parser = argparse.ArgumentParser(prog="tiltsight")
    common = argparse.ArgumentParser(add_help=False)
    common.add_argument("--config", type=Path, default=None, help="TOML session file; flags win over it.")
    common.add_argument("--example", default=None, help="Load data/examples/<name>.toml.")
    common.add_argument("--n", type=int, default=None)
    common.add_argument("--d", type=int, default=None)
    common.add_argument("--M", default=None, help='Cluster-tilting object, e.g. "P(0,1)+P(2,1)".')
    common.add_argument("--field", default=None, help="Q or Fp:p.")
    common.add_argument("--out-dir", type=Path, default=Path("out"))
    common.add_argument("--format", default=None, choices=["json", "dot", "text"])
    common.add_argument("--depth", type=int, default=None, help="Semi-free resolution depth (default d+2).")
    common.add_argument("--scan-window", type=int, default=None, help="Largest F-orbit tag scanned.")
    common.add_argument("--bar-length", type=int, default=None)
    common.add_argument("--force", action="store_true", help="Accept an M that is not cluster-tilting.")
    subcommands = parser.add_subparsers(dest="command", required=True)

    subcommands.add_parser("build", parents=[common], help="Enumerate indecomposables and write objects.json, ar.dot.")
    subcommands.add_parser("ct-check", parents=[common], help="Certify that M is cluster-tilting.")
    subcommands.add_parser("quotient", parents=[common], help="Write quotient_ar.dot and homs.json for 𝒞/[add M].")
    subcommands.add_parser("lambda", parents=[common], help="Extract τ^{>-d}End(M) and write lambda.json.")
    subcommands.add_parser("dem", parents=[common], help="Transport the surviving objects and write dem.json.")
    verify_parser = subcommands.add_parser("verify", parents=[common], help="Run every bridge check and write verify_report.json.")
    verify_parser.add_argument("--golden", type=Path, default=None)
    verify_parser.add_argument(
        "--enumerate",
        type=int,
        nargs="?",
        const=DEFAULT_ENUMERATION_BOUND,
        default=None,
        help=f"Brute-force modules over F_2 up to this total dimension (default {DEFAULT_ENUMERATION_BOUND}).",
    )
    verify_parser.add_argument("--skip-ar", action="store_true", help="Skip the Λ-side AR quiver comparison.")
    subcommands.add_parser("selfinj", parents=[common], help="Test d-self-injectivity of Λ against the Frobenius check.")

    args = parser.parse_args(argv)
    try:
        config = session_config(args)
        if args.command == "build":
            return cmd_build(config, args.out_dir)
        if args.command == "ct-check":
            return cmd_ct_check(config, args.out_dir)
        if args.command == "quotient":
            return cmd_quotient(config, args.out_dir)
        if args.command == "lambda":
            return cmd_lambda(config, args.out_dir)
        if args.command == "dem":
            return cmd_dem(config, args.out_dir)
        if args.command == "verify":
            golden = args.golden or config.golden
            return cmd_verify(config, args.out_dir, golden, args.enumerate, not args.skip_ar)
        if args.command == "selfinj":
            return cmd_selfinj(config, args.out_dir)
    except InvariantViolation as exc:
        print(f"tiltsight: invariant violated: {exc}", file=sys.stderr)
        return EXIT_INVARIANT
    except (ConfigError, ValueError, ScanWindowExceeded) as exc:
        print(f"tiltsight: {exc}", file=sys.stderr)
        return EXIT_USAGE
    raise AssertionError(args.command)


def session_config(args: argparse.Namespace) -> SessionConfig:
    config = SessionConfig()
    if args.example:
        config = load_config(example_path(args.example))
    if args.config:
        config = load_config(args.config)
    overrides = {
        "n": args.n,
        "d": args.d,
        "M": args.M,
        "field": args.field,
        "format": args.format,
        "depth": args.depth,
        "scan_window": args.scan_window,
        "bar_length": args.bar_length,
        "force": args.force,
    }
    return merge(config, overrides)


def _category(config: SessionConfig) -> ClusterCategory:
    n, d = config.require_category()
    return build(n, d, config.domain(), config.scan_window)


def _quotient(config: SessionConfig, category: ClusterCategory | None = None) -> QuotientCategory:
    category = category or _category(config)
    return quotient_by(category, config.require_summands(), force=config.force)


def _emit(config: SessionConfig, payload: dict[str, Any], text: str | None = None, dot: str | None = None) -> None:
    if config.format == "text" and text is not None:
        print(text, end="", flush=True)
    elif config.format == "dot" and dot is not None:
        print(dot, end="", flush=True)
    else:
        print(json.dumps(payload, indent=2, ensure_ascii=False, sort_keys=True), flush=True)


def cmd_build(config: SessionConfig, out_dir: Path) -> int:
    category = _category(config)
    payload = objects_payload(category)
    dot = quiver_to_dot(category.ar_quiver(), f"A{category.n}_d{category.d}")
    write_json(out_dir / "objects.json", payload)
    write_text(out_dir / "ar.dot", dot)
    _emit(config, payload, objects_text(payload), dot)
    return EXIT_OK


def cmd_ct_check(config: SessionConfig, out_dir: Path) -> int:
    category = _category(config)
    report = category.is_cluster_tilting(config.require_summands())
    payload = {"schema": "tiltsight.ct_check.v1", "M": sorted(category.object(name).name for name in config.M), **report.to_json()}
    write_json(out_dir / "ct_check.json", payload)
    _emit(config, payload)
    return EXIT_OK if report.holds else EXIT_FAILED


def cmd_quotient(config: SessionConfig, out_dir: Path) -> int:
    quotient = _quotient(config)
    payload = homs_payload(quotient)
    dot = quiver_to_dot(quotient.ar_quiver(), "quotient")
    write_json(out_dir / "homs.json", payload)
    write_text(out_dir / "quotient_ar.dot", dot)
    _emit(config, payload, homs_text(payload), dot)
    return EXIT_OK


def _context(config: SessionConfig) -> MoritaContext:
    return build_context(_quotient(config), config.depth)


def cmd_lambda(config: SessionConfig, out_dir: Path) -> int:
    ctx = _context(config)
    match: tuple[int, ...] | None | bool = False
    if config.presentation is not None:
        match = algebras_isomorphic(enumerate_basis(config.presentation, ctx.algebra.field), ctx.algebra)
    payload = lambda_payload(ctx, match)
    write_json(out_dir / "lambda.json", payload)
    _emit(config, payload)
    return EXIT_FAILED if match is None else EXIT_OK


def cmd_dem(config: SessionConfig, out_dir: Path) -> int:
    ctx = _context(config)
    d = ctx.d
    modules = {}
    failed = False
    for name, module in ctx.transport_table().items():
        presentation = projective_presentation(module, d)
        failures = check_presentation(presentation, module, d)
        truncated = omega_power(module, d).is_acyclic() and sigma_power(module, d, d).is_acyclic()
        failed = failed or bool(failures) or not truncated or not module.in_dem(d)
        modules[name] = {
            "module": module.to_json(),
            "presentation": presentation.to_json(),
            "presentation_failures": failures,
            "loops_vanish": truncated,
        }
        print(f"{name}: total dimension {module.total_dimension()}", file=sys.stderr, flush=True)
    payload = {"schema": "tiltsight.dem.v1", "M": ctx.summands, "d": d, "modules": modules}
    write_json(out_dir / "dem.json", payload)
    _emit(config, payload)
    return EXIT_FAILED if failed else EXIT_OK


def _oracle_rows(quotient: QuotientCategory, length: int | None) -> list[dict[str, Any]]:
    rows = []
    for source in quotient.surviving():
        for target in quotient.surviving():
            bar = quotient.bar_hom0(source, target, length)
            rows.append(
                {
                    "source": source,
                    "target": target,
                    "factoring": quotient.hom(source, target, 0),
                    "bar": bar,
                    "stable": bar == quotient.bar_hom0(source, target, (length or quotient.default_bar_length) + 1),
                }
            )
    return rows


def _witness_count(quotient: QuotientCategory) -> int:
    """Evaluate both d-mono and d-epi characterizations on every degree-0 basis morphism."""
    category = quotient.category
    count = 0
    for source in quotient.surviving():
        for target in quotient.surviving():
            for morphism in category.hom(source, target, 0).basis():
                quotient.d_mono_witness(morphism)
                quotient.d_epi_witness(morphism)
                count += 1
    return count


def cmd_verify(config: SessionConfig, out_dir: Path, golden: Path | None, enumeration: int | None, ar_quiver: bool) -> int:
    category = _category(config)
    quotient = _quotient(config, category)
    ctx = build_context(quotient, config.depth)
    report = verify_equivalence(ctx, enumeration_bound=enumeration, ar_quiver=ar_quiver)
    print(f"bridge: {len(report.pairs)} hom dimensions compared, {len(report.failures)} failures", file=sys.stderr, flush=True)

    oracle = _oracle_rows(quotient, config.bar_length)
    oracle_failures = [f"bar oracle {row['source']}->{row['target']}: {row['bar']} vs {row['factoring']}" for row in oracle if row["bar"] != row["factoring"]]
    oracle_failures += [f"bar oracle {row['source']}->{row['target']} not stable" for row in oracle if not row["stable"]]
    witnesses = _witness_count(quotient)

    frobenius = quotient.frobenius_check()
    verdict = is_d_self_injective(ctx.algebra, ctx.d)
    selfinj_failures = [] if verdict.self_injective == frobenius else [f"self-injectivity search says {verdict.self_injective}, Frobenius check says {frobenius}"]

    presentation_match: tuple[int, ...] | None | bool = False
    presentation_failures = []
    if config.presentation is not None:
        presentation_match = algebras_isomorphic(enumerate_basis(config.presentation, ctx.algebra.field), ctx.algebra)
        if presentation_match is None:
            presentation_failures.append("Λ is not isomorphic to the configured presentation")

    golden_failures = []
    if golden is not None:
        golden_failures = golden_diff(load_golden(golden), golden_observation(category, quotient, ctx))

    failures = report.failures + oracle_failures + selfinj_failures + presentation_failures + golden_failures
    payload = {
        "schema": "tiltsight.verify_report.v1",
        "bridge": report.to_json(),
        "bar_oracle": oracle,
        "witnesses_checked": witnesses,
        "frobenius": frobenius,
        "self_injectivity": verdict.to_json(),
        "lambda": lambda_payload(ctx, presentation_match),
        "golden": str(golden) if golden else None,
        "golden_diff": golden_failures,
        "failures": failures,
        "passed": not failures,
    }
    write_json(out_dir / "verify_report.json", payload)
    _emit(config, payload)
    return EXIT_OK if not failures else EXIT_FAILED


def cmd_selfinj(config: SessionConfig, out_dir: Path) -> int:
    quotient = _quotient(config)
    ctx = build_context(quotient, config.depth)
    verdict = is_d_self_injective(ctx.algebra, ctx.d)
    frobenius = quotient.frobenius_check()
    payload = {"schema": "tiltsight.selfinj.v1", "M": ctx.summands, "frobenius": frobenius, "search": verdict.to_json(), "agree": verdict.self_injective == frobenius}
    write_json(out_dir / "selfinj.json", payload)
    _emit(config, payload)
    return EXIT_OK if payload["agree"] else EXIT_FAILED


if __name__ == "__main__":
    raise SystemExit(main())
