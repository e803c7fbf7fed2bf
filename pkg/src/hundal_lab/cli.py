"""``hundal-lab`` command line entry point."""
import logging
import sys

from .experiment import EXIT_USAGE, ConfigError, parse_config, run_experiment


def main(argv=None) -> int:
    argv = sys.argv[1:] if argv is None else list(argv)
    if "-h" in argv or "--help" in argv:
        from .experiment import build_parser

        build_parser().print_help()
        return 0
    logging.basicConfig(
        level=logging.INFO if ("-v" in argv or "--verbose" in argv) else logging.WARNING,
        format="%(levelname)s %(name)s: %(message)s",
    )
    try:
        config = parse_config(argv)
    except ConfigError as exc:
        print(f"hundal-lab: error: {exc}", file=sys.stderr)
        return EXIT_USAGE

    result = run_experiment(config)
    if result.message:
        print(f"hundal-lab: error: {result.message}", file=sys.stderr)
    summary = result.summary
    for check in summary.get("checks", []):
        status = "PASS" if check["passed"] else "FAIL"
        print(f"[{status}] {check['name']}: {check['value']:.3e} (tol {check['tolerance']:.0e})")
    for name, m in summary.get("measured", {}).items():
        print(f"{name}: min norm {m['norm_floor']:.17g} at n={m['norm_floor_at']}")
    if "refinement" in summary:
        for d in summary["refinement"]["deltas"]:
            print(f"step {d['step_coarse']:g} -> {d['step_fine']:g}: max |norm delta| = {d['max_norm_delta']:.3e}")
    if result.path:
        print(f"wrote {result.path}")
    return result.status


if __name__ == "__main__":
    sys.exit(main())
