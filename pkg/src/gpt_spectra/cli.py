"""Command-line front end.

    gpt-spectra model --model quantum --d 3
    gpt-spectra axioms --model bipyramid --check spectrality
    gpt-spectra entropy --model quantum --d 2 --state state.json --base 2
    gpt-spectra majorize --model ball --k 3 --trials 500 --seed 7
    gpt-spectra expand --model quantum --d 2 --element elem.json
    gpt-spectra perfection --model classical --n 4 --report out.json
    gpt-spectra vonneumann --model quantum --d 2 --state in.json --temp 300
    gpt-spectra polytope analyze square.json
    gpt-spectra schema entropy
"""

import argparse
import json
import logging
import sys
from pathlib import Path
from typing import Any, Callable, Optional, Sequence

import numpy as np
from pydantic import BaseModel, Field, ValidationError

from .configuration import RunConfig
from .core import SystemModel
from .errors import ConfigError, GPTSpectraError, LatticeTooLarge, ModelUnsupported
from .majorization import group_average_majorization, measurement_entropy, verify_theorem_majorization
from .models import make_polytope, model_from_spec
from .observables import RiemannReport, riemann_stabilization_demo, spectral_expand, spectral_family
from .perfection import OrthotracialReport, SelfDualityReport, orthotracial_subspace, perfection_pipeline, phi_for
from .projective import check_lemma_distinguishability, check_orthomodular_identities, check_projectivity, check_STP
from .reports import CheckReport, ModelSummary, PolytopeFile, Report, load_vector, to_list, write_report
from .seeding import rng_for
from .spectral import check_axiom_S, check_weak_spectrality, decompose, spectral_entropy, spectrum
from .thermo import WorkLedger, run_von_neumann

logger = logging.getLogger(__name__)

CHECKS = ("ws", "spectrality", "projectivity", "stp", "lemma1", "orthomodular", "perfection")
DEFAULT_CHECKS = ("ws", "spectrality", "projectivity", "stp", "perfection")

# Expected outcome per catalog model; None means exploratory and never compared.
EXPECTATIONS: dict[str, dict[str, Optional[bool]]] = {
    "classical": dict.fromkeys(CHECKS, True),
    "quantum": dict.fromkeys(CHECKS, True),
    "ball": dict.fromkeys(CHECKS, True),
    "ellipse": dict.fromkeys(CHECKS, True),
    "puffed_triangle": {
        "ws": True,
        "spectrality": False,
        "projectivity": True,
        "stp": False,
        "lemma1": True,
        "orthomodular": True,
        "perfection": False,
    },
    "square_bit": {
        "ws": False,
        "spectrality": False,
        "projectivity": False,
        "stp": False,
        "lemma1": None,
        "orthomodular": None,
        "perfection": False,
    },
    "bipyramid": {
        "ws": False,
        "spectrality": False,
        "projectivity": False,
        "stp": False,
        "lemma1": None,
        "orthomodular": None,
        "perfection": None,
    },
}


# --- report models ------------------------------------------------------------


class AxiomsReport(Report):
    model: dict[str, Any]
    seed: int
    checks: list[CheckReport]
    expected: dict[str, Optional[bool]] = Field(description="Expected outcome per check, null when exploratory")
    mismatches: list[str] = Field(default_factory=list, description="Checks whose outcome differs from the expectation")
    passed: bool = Field(description="Every compared check matched its expectation")


class EntropyReport(Report):
    model: dict[str, Any]
    state: list[float]
    spectrum: list[float] = Field(description="Descending spectrum padded to n_max")
    entropy: float = Field(description="Spectral entropy in the requested base")
    entropy_nats: float
    log_base: str
    certified_distinguishable: bool
    measurement_entropy: Optional[float] = Field(None, description="Smallest sampled outcome entropy, when trials > 0")


class MajorizeReport(Report):
    model: dict[str, Any]
    seed: int
    spectrum: list[float]
    trials: int
    violations: int
    worst_margin: Optional[float] = Field(description="Smallest partial-sum slack over all measurements")
    majorization: CheckReport
    group_average: Optional[CheckReport] = None


class ExpandReport(Report):
    model: dict[str, Any]
    element: list[float]
    coefficients: list[float]
    units: list[list[float]]
    nondegenerate: bool
    orthogonal: bool
    reconstruction_error: float
    thresholds: list[float] = Field(description="Jump points of the spectral family, ascending")
    family_length: int
    riemann: Optional[RiemannReport] = None


class PerfectionReport(Report):
    self_duality: SelfDualityReport
    orthotracial: Optional[OrthotracialReport] = None
    notes: list[str] = Field(default_factory=list)


class PolytopeReport(Report):
    model: dict[str, Any]
    n_vertices: int
    n_facets: int
    facets: list[list[float]]
    face_counts: dict[str, int] = Field(description="Number of faces per rank")
    checks: list[CheckReport]


SCHEMAS: dict[str, type[BaseModel]] = {
    "model": ModelSummary,
    "axioms": AxiomsReport,
    "check": CheckReport,
    "entropy": EntropyReport,
    "majorize": MajorizeReport,
    "expand": ExpandReport,
    "perfection": PerfectionReport,
    "vonneumann": WorkLedger,
    "polytope": PolytopeReport,
}


# --- helpers ------------------------------------------------------------------


def _model_overrides(args: argparse.Namespace) -> Optional[dict[str, Any]]:
    if not args.model:
        return None
    spec: dict[str, Any] = {"model": args.model}
    for name in ("d", "n", "k", "a", "b", "e3", "e2"):
        value = getattr(args, name, None)
        if value is not None:
            spec[name] = value
    if args.vertices:
        spec["vertices"] = PolytopeFile.model_validate_json(Path(args.vertices).read_text(encoding="utf-8")).vertices
    return spec


def _config(args: argparse.Namespace) -> RunConfig:
    return RunConfig.from_sources(
        config_file=args.config,
        overrides={
            "model": _model_overrides(args),
            "seed": args.seed,
            "output": args.report,
            "report_format": args.format,
            "log_base": args.base,
            "threads": args.threads,
            "temperature": getattr(args, "temp", None),
        },
    )


def _system(config: RunConfig) -> SystemModel:
    return model_from_spec(
        config.model,
        chord_resolution=config.budgets.chord_resolution,
        enumeration_budget=config.budgets.enumeration_budget,
    )


def _state(path: Optional[str], system: SystemModel, seed: int) -> np.ndarray:
    if path:
        return load_vector(path, system)
    return system.sample_state(rng_for(seed))


def _emit(report: BaseModel, config: RunConfig) -> None:
    text = write_report(report, config.output, config.report_format)
    if not config.output:
        sys.stdout.write(text)


def _guarded(name: str, run: Callable[[], CheckReport]) -> CheckReport:
    """Run a checker, turning precondition errors into a failed report."""
    try:
        return run()
    except GPTSpectraError as exc:
        logger.warning("[cli] %s could not run: %s", name, exc)
        return CheckReport(check=name, holds=False, notes=[f"{type(exc).__name__}: {exc}"])


def _perfection_check(system: SystemModel, config: RunConfig) -> CheckReport:
    report = perfection_pipeline(system, config.seed, config.budgets.bases, config.budgets.face_cap, config.tolerances)
    return CheckReport(
        check="perfection",
        holds=report.perfect,
        samples=len(report.face_reports),
        worst_margin=report.cone_margin,
        method="exact" if report.method == "exact" else "sampled",
        notes=[f"phi: {report.phi_label}", *report.notes],
    )


def run_checks(system: SystemModel, config: RunConfig, names: Sequence[str]) -> list[CheckReport]:
    budgets = config.budgets
    seed = config.seed
    tol = config.tolerances
    runners: dict[str, Callable[[], CheckReport]] = {
        "ws": lambda: check_weak_spectrality(system, budgets.samples, seed, config.threads, tol),
        "spectrality": lambda: check_axiom_S(system, budgets.samples, seed, tol.sampled, config.threads),
        "projectivity": lambda: check_projectivity(system, budgets.face_cap, seed, budgets.net_size, tol),
        "stp": lambda: check_STP(system, budgets.samples, seed, tol),
        "lemma1": lambda: check_lemma_distinguishability(system, budgets.samples, seed, tol),
        "orthomodular": lambda: check_orthomodular_identities(system, budgets.lattice_cap, seed, tol),
        "perfection": lambda: _perfection_check(system, config),
    }
    return [_guarded(name, runners[name]) for name in names]


def _parse_checks(raw: Optional[str]) -> list[str]:
    if not raw:
        return list(DEFAULT_CHECKS)
    names = [name.strip().lower() for name in raw.split(",") if name.strip()]
    unknown = [name for name in names if name not in CHECKS]
    if unknown:
        raise ConfigError(f"unknown checks {unknown}; choose from {', '.join(CHECKS)}")
    return names


def _riemann_grids(norm: float) -> list[list[float]]:
    edge = norm + 0.5
    return [to_list(np.linspace(-edge, edge, n + 1)) for n in (4, 32, 256)]


# --- subcommands --------------------------------------------------------------


def cmd_model(args: argparse.Namespace, config: RunConfig) -> int:
    system = _system(config)
    rng = rng_for(config.seed)
    _emit(
        ModelSummary(
            system=system.spec(),
            dim=system.dim,
            unit=to_list(system.unit),
            n_max=system.n_max,
            sample_pure_states=[to_list(system.sample_pure(rng)) for _ in range(args.samples)],
        ),
        config,
    )
    return 0


def cmd_axioms(args: argparse.Namespace, config: RunConfig) -> int:
    names = _parse_checks(args.check)
    system = _system(config)
    reports = run_checks(system, config, names)
    table = EXPECTATIONS.get(system.kind.value, {})
    expected = {name: table.get(name) for name in names}
    mismatches = [
        name
        for name, r in zip(names, reports)
        if expected[name] is not None and r.holds != expected[name]
    ]
    report = AxiomsReport(
        model=system.spec(),
        seed=config.seed,
        checks=reports,
        expected=expected,
        mismatches=mismatches,
        passed=not mismatches,
    )
    _emit(report, config)
    if mismatches:
        logger.warning("[cli] checks differ from the expectation table: %s", ", ".join(mismatches))
        return 1
    return 0


def cmd_entropy(args: argparse.Namespace, config: RunConfig) -> int:
    system = _system(config)
    x = _state(args.state, system, config.seed)
    dec = decompose(x, system, tol=config.tolerances)
    probs = spectrum(x, system).descending
    minimum = None
    if args.trials:
        minimum = measurement_entropy(
            x, system, args.trials, config.seed, log_base=config.log_base, tol=config.tolerances
        )
    _emit(
        EntropyReport(
            model=system.spec(),
            state=to_list(x),
            spectrum=to_list(probs),
            entropy=spectral_entropy(x, system, config.log_base),
            entropy_nats=spectral_entropy(x, system),
            log_base=config.log_base,
            certified_distinguishable=dec.certified_distinguishable,
            measurement_entropy=minimum,
        ),
        config,
    )
    return 0


def cmd_majorize(args: argparse.Namespace, config: RunConfig) -> int:
    system = _system(config)
    x = _state(args.state, system, config.seed)
    trials = args.trials or config.budgets.trials
    check = verify_theorem_majorization(system, x, trials, config.seed, config.threads, config.tolerances)
    group = None
    if args.group:
        group = _guarded(
            "group_average",
            lambda: group_average_majorization(
                system, x, config.budgets.group_samples, seed=config.seed, tol=config.tolerances
            ),
        )
    violations = int((check.witness or {}).get("violations", 0))
    _emit(
        MajorizeReport(
            model=system.spec(),
            seed=config.seed,
            spectrum=to_list(spectrum(x, system).descending),
            trials=trials,
            violations=violations,
            worst_margin=check.worst_margin,
            majorization=check,
            group_average=group,
        ),
        config,
    )
    table = EXPECTATIONS.get(system.kind.value, {})
    applies = all(table.get(name) for name in ("spectrality", "projectivity", "stp"))
    return 1 if violations and applies else 0


def cmd_expand(args: argparse.Namespace, config: RunConfig) -> int:
    system = _system(config)
    if args.element:
        a = load_vector(args.element, system)
    else:
        a = rng_for(config.seed).normal(size=system.dim)
    expansion = spectral_expand(a, system, tol=config.tolerances)
    family = spectral_family(a, system, tol=config.tolerances)
    riemann = None
    if args.riemann:
        lo, hi = system.effect_range(a)
        riemann = riemann_stabilization_demo(a, system, _riemann_grids(max(abs(lo), abs(hi))), config.tolerances)
    _emit(
        ExpandReport(
            model=system.spec(),
            element=to_list(a),
            coefficients=to_list(expansion.coefficients),
            units=to_list(expansion.units),
            nondegenerate=expansion.nondegenerate,
            orthogonal=expansion.orthogonal,
            reconstruction_error=expansion.reconstruction_error,
            thresholds=to_list(family.thresholds),
            family_length=family.length,
            riemann=riemann,
        ),
        config,
    )
    return 0


def cmd_perfection(args: argparse.Namespace, config: RunConfig) -> int:
    system = _system(config)
    report = perfection_pipeline(system, config.seed, config.budgets.bases, config.budgets.face_cap, config.tolerances)
    ortho = None
    notes: list[str] = []
    if args.orthotracial:
        try:
            ortho = orthotracial_subspace(
                system, phi_for(system, config.seed), config.budgets.lattice_cap, config.seed, config.tolerances
            )
        except (LatticeTooLarge, ModelUnsupported) as exc:
            notes.append(f"orthotracial subspace not computed: {exc}")
    _emit(PerfectionReport(self_duality=report, orthotracial=ortho, notes=notes), config)
    return 0


def cmd_vonneumann(args: argparse.Namespace, config: RunConfig) -> int:
    system = _system(config)
    omega = _state(args.state, system, config.seed)
    sigma = load_vector(args.target, system) if args.target else system.reference_pure_state()
    ledger = run_von_neumann(
        omega, sigma, system, temperature=config.temperature, volume=config.volume, tol=config.tolerances
    )
    _emit(ledger, config)
    return 0


def cmd_polytope(args: argparse.Namespace, config: RunConfig) -> int:
    polytope = PolytopeFile.model_validate_json(Path(args.file).read_text(encoding="utf-8"))
    system = make_polytope(polytope.vertices, enumeration_budget=config.budgets.enumeration_budget)
    counts: dict[str, int] = {}
    try:
        for face in system.lattice_faces(config.budgets.lattice_cap, rng_for(config.seed)):
            counts[str(face.rank)] = counts.get(str(face.rank), 0) + 1
    except LatticeTooLarge as exc:
        logger.warning("[cli] face counts skipped: %s", exc)
    _emit(
        PolytopeReport(
            model=system.spec(),
            n_vertices=len(system.vertices),
            n_facets=len(system.facets),
            facets=to_list(system.facets),
            face_counts=dict(sorted(counts.items())),
            checks=run_checks(system, config, _parse_checks(args.check)),
        ),
        config,
    )
    return 0


def cmd_schema(args: argparse.Namespace, config: Optional[RunConfig]) -> int:
    sys.stdout.write(json.dumps(SCHEMAS[args.name].model_json_schema(), indent=2, sort_keys=True) + "\n")
    return 0


# --- parser -------------------------------------------------------------------


def _common() -> argparse.ArgumentParser:
    common = argparse.ArgumentParser(add_help=False)
    common.add_argument("--config", type=str, default=None, help="TOML or JSON configuration file")
    common.add_argument("--seed", type=int, default=None, help="Seed for every randomized step")
    common.add_argument("--report", "-o", type=str, default=None, help="Write the report here instead of stdout")
    common.add_argument("--format", type=str, choices=["json", "csv"], default=None, help="Report format")
    common.add_argument("--base", type=str, choices=["e", "2"], default=None, help="Logarithm base for entropies")
    common.add_argument("--threads", type=int, default=None, help="Worker threads (capped by GPT_SPECTRA_THREADS)")
    common.add_argument("--verbose", "-v", action="store_true", help="Debug logging on stderr")
    model = common.add_argument_group("model")
    model.add_argument("--model", type=str, default=None, help="Catalog model tag, e.g. quantum or ball")
    model.add_argument("--d", type=int, default=None, help="Quantum dimension")
    model.add_argument("--n", type=int, default=None, help="Number of classical outcomes")
    model.add_argument("--k", type=int, default=None, help="Ball dimension")
    model.add_argument("--a", type=float, default=None, help="Ellipse semi-axis a")
    model.add_argument("--b", type=float, default=None, help="Ellipse semi-axis b")
    model.add_argument("--e3", type=float, default=None, help="Puffed triangle outward bulge")
    model.add_argument("--e2", type=float, default=None, help="Puffed triangle edge bulge")
    model.add_argument("--vertices", type=str, default=None, help="Polytope vertex file for --model polyhedral")
    return common


def build_parser() -> argparse.ArgumentParser:
    common = _common()
    parser = argparse.ArgumentParser(prog="gpt-spectra", description="Spectral and majorization analysis of GPT systems")
    sub = parser.add_subparsers(dest="command", required=True)

    p = sub.add_parser("model", parents=[common], help="Summarize a catalog model")
    p.add_argument("--samples", type=int, default=3, help="Number of sample pure states")
    p.set_defaults(handler=cmd_model)

    p = sub.add_parser("axioms", parents=[common], help="Run axiom checkers against the expectation table")
    p.add_argument("--check", type=str, default=None, help=f"Comma-separated subset of {','.join(CHECKS)}")
    p.set_defaults(handler=cmd_axioms)

    p = sub.add_parser("entropy", parents=[common], help="Spectrum and spectral entropy of a state")
    p.add_argument("--state", type=str, default=None, help="State record; a seeded random state when omitted")
    p.add_argument("--trials", type=int, default=0, help="Also search this many fine-grained measurements")
    p.set_defaults(handler=cmd_entropy)

    p = sub.add_parser("majorize", parents=[common], help="Spectrum against sampled fine-grained measurements")
    p.add_argument("--state", type=str, default=None, help="State record; a seeded random state when omitted")
    p.add_argument("--trials", type=int, default=None, help="Number of sampled measurements")
    p.add_argument("--group", action="store_true", help="Also check the group-average corollary")
    p.set_defaults(handler=cmd_majorize)

    p = sub.add_parser("expand", parents=[common], help="Spectral expansion of a dual-space element")
    p.add_argument("--element", type=str, default=None, help="Effect record; a seeded random element when omitted")
    p.add_argument("--riemann", action="store_true", help="Include Riemann sums over three uniform grids")
    p.set_defaults(handler=cmd_expand)

    p = sub.add_parser("perfection", parents=[common], help="Self-dualizing inner product and perfection")
    p.add_argument("--orthotracial", action="store_true", help="Also compute the orthotracial subspace")
    p.set_defaults(handler=cmd_perfection)

    p = sub.add_parser("vonneumann", parents=[common], help="Work ledger of the membrane protocol")
    p.add_argument("--state", type=str, default=None, help="Initial state record")
    p.add_argument("--target", type=str, default=None, help="Target state record; a pure state when omitted")
    p.add_argument("--temp", type=float, default=None, help="Bath temperature in kelvin")
    p.set_defaults(handler=cmd_vonneumann)

    p = sub.add_parser("polytope", help="Polytope tools")
    poly = p.add_subparsers(dest="action", required=True)
    p = poly.add_parser("analyze", parents=[common], help="Facets, face counts and axiom checks of a polytope")
    p.add_argument("file", type=str, help='JSON file {"vertices": [[...], ...]}')
    p.add_argument("--check", type=str, default=None, help=f"Comma-separated subset of {','.join(CHECKS)}")
    p.set_defaults(handler=cmd_polytope)

    p = sub.add_parser("schema", help="Print the JSON schema of a report")
    p.add_argument("name", choices=sorted(SCHEMAS), help="Report name")
    p.set_defaults(handler=cmd_schema)
    return parser


def main(argv: Optional[Sequence[str]] = None) -> int:
    args = build_parser().parse_args(argv)
    logging.basicConfig(
        level=logging.DEBUG if getattr(args, "verbose", False) else logging.WARNING,
        format="%(levelname)s %(name)s: %(message)s",
        stream=sys.stderr,
    )
    if args.handler is cmd_schema:
        return cmd_schema(args, None)
    try:
        config = _config(args)
        return int(args.handler(args, config))
    except (ConfigError, ValidationError, OSError) as exc:
        logger.error("[cli] configuration error: %s", exc)
        return 2
    except GPTSpectraError as exc:
        logger.error("[cli] %s: %s", type(exc).__name__, exc)
        return 1


if __name__ == "__main__":
    sys.exit(main())
