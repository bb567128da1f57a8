"""Command-line front end.

Exit codes: 0 success / wall / equivalent / member, 3 negative verdict, 1 error.
"""
import argparse
import hashlib
import json
import logging
import sys
from dataclasses import dataclass, field
from fractions import Fraction
from pathlib import Path

from pydantic import BaseModel

from . import settings
from .discriminant import disc_image, discriminant_group
from .errors import BadParam, ParseError, WallkitError
from .isometries import is_isometry, mapping_isometry, orbit_equivalent
from .lattice import divisibility, load_lattice, load_vector, standard_lattice
from .monodromy import (
    KUMMER_RULE,
    MARKMAN_CITATION,
    kummer_proof_trace,
    load_og10_fixture,
    mon_membership_kummer,
    og10_certificate,
    sample_kummer_isometries,
)
from .schemas import (
    CertificateReport,
    CheckEntry,
    ErrorReport,
    IsometryDocument,
    LatticeReport,
    MonReport,
    OrbitReport,
    TraceBundle,
    TraceReport,
    WallReport,
    fraction_text,
    read_document,
)
from .walls import CRITERIA

logger = logging.getLogger(__name__)

_constants = json.loads((Path(__file__).resolve().parent.parent.parent / "constants.json").read_text())
TOOL_VERSION = _constants["TOOL_VERSION"]
EXIT_OK = _constants["EXIT_OK"]
EXIT_ERROR = _constants["EXIT_ERROR"]
EXIT_NEGATIVE = _constants["EXIT_NEGATIVE"]


@dataclass
class JobConfig:
    command: str
    inputs: list[str] = field(default_factory=list)
    seed: int = settings.DEFAULT_SEED
    output: str | None = None
    format: str = "json"

    def validate(self) -> None:
        for path in self.inputs:
            if _looks_like_file(path) and not Path(path).is_file():
                raise ParseError(f"input file {path} does not exist")


def _looks_like_file(value: str) -> bool:
    return value.endswith(".json") or "/" in value


def _hashes(paths) -> dict[str, str]:
    digests = {}
    for path in paths:
        if path and Path(path).is_file():
            digests[str(path)] = hashlib.sha256(Path(path).read_bytes()).hexdigest()
    return digests


def _resolve_lattice(name: str):
    # bare fixture names from WALLKIT_FIXTURE_FILES resolve against the fixture directory
    if name in settings.EXTRA_FIXTURE_FILES:
        return load_lattice(settings.fixture_path(name))
    return load_lattice(name)


# ---- commands ----

def cmd_lattice_info(job: JobConfig, source: str) -> tuple[BaseModel, int]:
    lattice = _resolve_lattice(source)
    form = discriminant_group(lattice)
    report = LatticeReport(
        tool_version=TOOL_VERSION,
        inputs=_hashes([source]),
        label=lattice.label,
        rank=lattice.rank,
        det=lattice.det,
        signature=lattice.signature,
        even=lattice.is_even,
        disc=list(form.invariant_factors),
        q=[fraction_text(q) for q in form.q_values],
    )
    return report, EXIT_OK


def cmd_wall(job: JobConfig, criterion: str, v_path: str, d_path: str) -> tuple[BaseModel, int]:
    v = load_vector(v_path)
    d = load_vector(d_path, v.lattice)
    verdict = CRITERIA[criterion](v, d)
    report = WallReport(
        tool_version=TOOL_VERSION,
        inputs=_hashes([v_path, d_path]),
        criterion=criterion,
        is_wall=verdict.is_wall,
        clause=verdict.clause.value,
        witness=list(verdict.witness.coords) if verdict.witness is not None else None,
        T_gram=[list(row) for row in verdict.T.induced_gram],
        candidates=[list(w.coords) for w in verdict.candidates],
    )
    return report, EXIT_OK if verdict.is_wall else EXIT_NEGATIVE


def cmd_orbit(job: JobConfig, action: str, lattice_source: str, x_path: str, y_path: str) -> tuple[BaseModel, int]:
    lattice = _resolve_lattice(lattice_source)
    x = load_vector(x_path, lattice)
    y = load_vector(y_path, lattice)
    form = discriminant_group(lattice)
    equivalent = orbit_equivalent(lattice, x, y)
    fields = dict(
        tool_version=TOOL_VERSION,
        inputs=_hashes([lattice_source, x_path, y_path]),
        lattice=lattice.label,
        x=list(x.coords),
        y=list(y.coords),
        squares=(x.square, y.square),
        divisibilities=(divisibility(lattice, x), divisibility(lattice, y)),
        disc_images=(list(disc_image(lattice, x, form)), list(disc_image(lattice, y, form))),
        equivalent=equivalent,
    )
    if action == "map" and equivalent:
        g = mapping_isometry(lattice, x, y)
        fields.update(matrix=[list(row) for row in g.matrix], determinant=g.det,
                      orientation_preserving=g.orientation == 1)
    return OrbitReport(**fields), EXIT_OK if equivalent else EXIT_NEGATIVE


def _load_isometry(path: str):
    doc = read_document(path, IsometryDocument)
    return is_isometry(standard_lattice(doc.lattice), doc.matrix, (Path(path).name,))


def cmd_mon_check(job: JobConfig, n: int, isometry_path: str) -> tuple[BaseModel, int]:
    g = _load_isometry(isometry_path)
    verdict = mon_membership_kummer(n, g)
    report = MonReport(
        tool_version=TOOL_VERSION,
        inputs=_hashes([isometry_path]),
        n=n,
        in_monodromy=verdict.in_monodromy,
        orientation=verdict.orientation,
        chi=verdict.chi.value,
        det=verdict.det,
        reason=verdict.reason,
        citations=[KUMMER_RULE, MARKMAN_CITATION],
    )
    return report, EXIT_OK if verdict.in_monodromy else EXIT_NEGATIVE


def _trace_report(trace, word) -> TraceReport:
    return TraceReport(
        n=trace.n,
        k=trace.k,
        l=list(trace.l.coords),
        t_integral=trace.t_integral,
        t_prime_integral=trace.t_prime_integral,
        k_mod=trace.k_mod,
        type_of_image=trace.type_of_image.value,
        div_of_image=trace.div_of_image,
        wall_clause=trace.wall_clause.value,
        pell=trace.pell,
        word=list(word),
    )


def cmd_scenario_kummer(job: JobConfig, n: int, isometry_path: str | None, sample: int | None) -> tuple[BaseModel, int]:
    if isometry_path:
        isometries = [_load_isometry(isometry_path)]
    elif sample:
        isometries = sample_kummer_isometries(n, sample, job.seed)
    else:
        raise BadParam("kummer-proof needs --isometry or --sample")
    traces, findings = [], []
    for g in isometries:
        trace = kummer_proof_trace(n, g)
        traces.append(_trace_report(trace, g.word))
        if trace.wall_clause.value != "none" and not trace.is_unit_residue:
            findings.append(
                f"g(δ) is a {trace.type_of_image.value} wall of divisibility {trace.div_of_image} "
                f"with k ≡ {trace.k_mod} mod {2 * n + 2}; neither ±1"
            )
    report = TraceBundle(
        tool_version=TOOL_VERSION,
        inputs=_hashes([isometry_path]),
        n=n,
        seed=None if isometry_path else job.seed,
        traces=traces,
        findings=findings,
    )
    return report, EXIT_OK


def cmd_scenario_og10(job: JobConfig, fixture_path: str | None, embedding_path: str | None,
                      f_path: str | None) -> tuple[BaseModel, int]:
    fixture = load_og10_fixture(fixture_path, embedding_path)
    F = load_vector(f_path, fixture.lattice) if f_path else None
    cert = og10_certificate(fixture, F)
    report = CertificateReport(
        tool_version=TOOL_VERSION,
        inputs=_hashes([fixture_path or settings.fixture_path("og10.json"), embedding_path, f_path]),
        w=list(cert.w.coords),
        s=list(cert.s.coords),
        D=list(cert.D.coords),
        D_hat=list(cert.D_hat.coords),
        F=list(cert.F.coords),
        F_source=cert.F_source,
        matrix=[list(row) for row in cert.g.matrix],
        determinant=cert.g.det,
        orientation_preserving=cert.g.orientation == 1,
        disc_action=[list(row) for row in cert.g.action.matrix],
        trivial=cert.trivial,
        checks=[CheckEntry(name=c.name, passed=c.passed, detail=c.detail) for c in cert.checks],
        premises=list(cert.premises),
        all_passed=cert.all_passed,
    )
    return report, EXIT_OK if cert.all_passed else EXIT_ERROR


# ---- output ----

def _text(report: BaseModel) -> str:
    data = report.model_dump()
    lines = []
    if "checks" in data:
        for check in data["checks"]:
            mark = "ok  " if check["passed"] else "FAIL"
            lines.append(f"{mark} {check['name']}" + (f"  [{check['detail']}]" if check["detail"] else ""))
        lines.extend(f"premise: {p}" for p in data["premises"])
        return "\n".join(lines)
    if "traces" in data:
        for t in data["traces"]:
            lines.append(
                f"k={t['k']} pell={t['pell']} t:{t['t_integral']} t′:{t['t_prime_integral']} "
                f"k mod {2 * t['n'] + 2} = {t['k_mod']} {t['wall_clause']} {t['type_of_image']} div {t['div_of_image']}"
            )
        lines.extend(f"finding: {f}" for f in data["findings"])
        return "\n".join(lines)
    if "q" in data:
        data["q"] = [f"{q} ≡ {fraction_text(_centered(Fraction(q)))}" for q in data["q"]]
    for key, value in data.items():
        if key in ("tool_version", "inputs"):
            continue
        lines.append(f"{key}: {value}")
    return "\n".join(lines)


def _centered(value: Fraction) -> Fraction:
    # representative of a value mod 2 in (-1, 1]
    return value - 2 if value > 1 else value


def _emit(job: JobConfig, report: BaseModel) -> None:
    body = report.model_dump_json(indent=2) if job.format == "json" else _text(report)
    if job.output:
        Path(job.output).write_text(body + "\n")
    else:
        sys.stdout.write(body + "\n")


# ---- parser ----

def build_parser() -> argparse.ArgumentParser:
    common = argparse.ArgumentParser(add_help=False)
    common.add_argument("--format", choices=["json", "text"], default="json")
    common.add_argument("--seed", type=int, default=settings.DEFAULT_SEED)
    common.add_argument("--output", default=None)

    parser = argparse.ArgumentParser(prog="wallkit", description="Exact lattice computations for wall divisors and monodromy")
    sub = parser.add_subparsers(dest="command", required=True)

    lattice = sub.add_parser("lattice").add_subparsers(dest="action", required=True)
    info = lattice.add_parser("info", parents=[common])
    info.add_argument("lattice", help="lattice JSON file or standard name such as kummer(5)")

    wall = sub.add_parser("wall").add_subparsers(dest="criterion", required=True)
    for name in CRITERIA:
        p = wall.add_parser(name, parents=[common])
        p.add_argument("--v", required=True)
        p.add_argument("--d", required=True)

    orbit = sub.add_parser("orbit").add_subparsers(dest="action", required=True)
    for name in ("check", "map"):
        p = orbit.add_parser(name, parents=[common])
        p.add_argument("--lattice", required=True)
        p.add_argument("--x", required=True)
        p.add_argument("--y", required=True)

    mon = sub.add_parser("mon").add_subparsers(dest="action", required=True)
    check = mon.add_parser("check", parents=[common])
    check.add_argument("--n", type=int, required=True)
    check.add_argument("--isometry", required=True)

    scenario = sub.add_parser("scenario").add_subparsers(dest="name", required=True)
    kummer = scenario.add_parser("kummer-proof", parents=[common])
    kummer.add_argument("--n", type=int, required=True)
    source = kummer.add_mutually_exclusive_group()
    source.add_argument("--isometry")
    source.add_argument("--sample", type=int)
    og10 = scenario.add_parser("og10", parents=[common])
    og10.add_argument("--fixture")
    og10.add_argument("--embedding")
    og10.add_argument("--F", dest="F")
    return parser


def _dispatch(args) -> tuple[JobConfig, tuple[BaseModel, int]]:
    if args.command == "lattice":
        job = JobConfig("lattice info", [args.lattice], args.seed, args.output, args.format)
        job.validate()
        return job, cmd_lattice_info(job, args.lattice)
    if args.command == "wall":
        job = JobConfig(f"wall {args.criterion}", [args.v, args.d], args.seed, args.output, args.format)
        job.validate()
        return job, cmd_wall(job, args.criterion, args.v, args.d)
    if args.command == "orbit":
        job = JobConfig(f"orbit {args.action}", [args.lattice, args.x, args.y], args.seed, args.output, args.format)
        job.validate()
        return job, cmd_orbit(job, args.action, args.lattice, args.x, args.y)
    if args.command == "mon":
        job = JobConfig("mon check", [args.isometry], args.seed, args.output, args.format)
        job.validate()
        return job, cmd_mon_check(job, args.n, args.isometry)
    if args.name == "kummer-proof":
        job = JobConfig("scenario kummer-proof", [p for p in [args.isometry] if p], args.seed, args.output, args.format)
        job.validate()
        return job, cmd_scenario_kummer(job, args.n, args.isometry, args.sample)
    job = JobConfig("scenario og10", [p for p in (args.fixture, args.embedding, args.F) if p],
                    args.seed, args.output, args.format)
    job.validate()
    return job, cmd_scenario_og10(job, args.fixture, args.embedding, args.F)


def main(argv=None) -> int:
    logging.basicConfig(level=settings.LOG_LEVEL, format="%(levelname)s %(name)s %(message)s")
    args = build_parser().parse_args(argv)
    job = JobConfig(args.command, seed=args.seed, output=args.output, format=args.format)
    try:
        job, (report, code) = _dispatch(args)
    except WallkitError as exc:
        logger.info("[cli] %s failed: %s", job.command, exc)
        _emit(job, ErrorReport(tool_version=TOOL_VERSION, **exc.to_dict()))
        return EXIT_ERROR
    except Exception as exc:
        logger.exception("[cli] unexpected failure in %s", job.command)
        _emit(job, ErrorReport(tool_version=TOOL_VERSION, error="internal", message=str(exc)))
        return EXIT_ERROR
    _emit(job, report)
    return code


if __name__ == "__main__":
    sys.exit(main())
