"""
Komut satırı arayüzü - validate, bands, solve, verify, simulate alt komutları

Çıkış kodları:
    0  başarılı
    1  alan hatası (geçersiz model, karşı örnek, yakınsamama, ...)
    2  kullanım ya da ayrıştırma hatası

Makine çıktısı stdout'a (ya da --out dosyasına) yazılır; günlükler stderr'e gider.
"""

import argparse
import logging
import sys
from dataclasses import asdict
from pathlib import Path
from typing import Callable, Dict, List, Optional, Sequence

import numpy as np
import pandas as pd

from app.errors import ConeSpectraError, ModelFormatError
from app.models.disorder import DisorderMode, DisorderSpec
from app.models.formatters import FormatterFactory
from app.models.trial import Boundary, TrialConfig
from app.services.contraction import ConstantsCalculator
from app.services.disorder import DisorderSampler
from app.services.file_handler import FileIORegistry
from app.services.greens import BandDetector, GreenSolver, TransitionBuilder
from app.services.manifest import ManifestBuilder, file_digest
from app.services.model_persistence import ModelDocument, ModelPersistence
from app.services.montecarlo import MonteCarloEngine
from app.services.substitution import PermutationEnumerator, SubstitutionAnalyzer, TreeBuilder
from app.services.verification import SuiteRegistry, Verifier
from app.settings import Settings
from app.version import VERSION

logger = logging.getLogger(__name__)

EXIT_OK = 0
EXIT_DOMAIN = 1
EXIT_USAGE = 2

DEFAULT_DISORDER_WIDTH = 0.5


class UsageError(Exception):
    """Bayrak birleşimi geçersiz (çıkış kodu 2)"""


class Services:
    """Ayarlardan kurulan servis kümesi"""

    def __init__(self, settings: Settings):
        self.settings = settings
        self.solver = GreenSolver(
            tol=settings.solver_tol,
            max_iter=settings.max_iter,
            newton_max_iter=settings.newton_max_iter,
        )
        self.bands = BandDetector(self.solver, threads=settings.threads)
        self.substitution = SubstitutionAnalyzer()
        self.tree_builder = TreeBuilder(max_vertices=settings.max_vertices)
        self.transitions = TransitionBuilder(
            self.substitution, tol=settings.power_tol, max_iter=settings.power_max_iter
        )

    def constants_calculator(self) -> ConstantsCalculator:
        return ConstantsCalculator(
            solver=self.solver,
            band_detector=self.bands,
            analyzer=self.substitution,
            energy_points=self.settings.constants_energy_points,
            eta_halvings=self.settings.constants_eta_halvings,
            grid_step=self.settings.grid_step,
            threads=self.settings.threads,
        )

    def verifier(self) -> Verifier:
        return Verifier(
            solver=self.solver,
            constants_calculator=self.constants_calculator(),
            substitution=self.substitution,
            enumerator=PermutationEnumerator(self.settings.max_permutations),
        )

    def engine(self) -> MonteCarloEngine:
        return MonteCarloEngine(
            solver=self.solver,
            sampler=DisorderSampler(),
            tree_builder=self.tree_builder,
            transition_builder=self.transitions,
            depth_cap=self.settings.depth_cap,
            depth_tol=self.settings.depth_tol,
            threads=self.settings.threads,
        )


# ============ Yardımcılar ============


def _load_model(path: str) -> ModelDocument:
    return ModelPersistence().load(Path(path))


def _emit(
    builder: ManifestBuilder,
    payload: dict,
    out: Optional[str],
    output_digests: Optional[Dict[str, str]] = None,
) -> None:
    """Raporu --out dosyasına ya da stdout'a yazar"""
    if out:
        builder.write_json(payload, Path(out), output_digests)
    else:
        sys.stdout.write(builder.dumps(payload, output_digests))


def _write_table(builder: ManifestBuilder, df: pd.DataFrame, out: str) -> Dict[str, str]:
    """Tabloyu manifest özeti sütunuyla yazar; {yol: sha256} döndürür"""
    path = Path(out)
    FileIORegistry.write_file(builder.stamp_table(df), path)
    return {str(path): file_digest(path)}


def _require_table_path(out: Optional[str]) -> str:
    if not out or not FileIORegistry.is_extension_supported(Path(out).suffix):
        extensions = ", ".join(FileIORegistry.get_extensions())
        raise UsageError(f"Tablo dosyası şu uzantılardan biri olmalı: {extensions}")
    return out


def _float_list(text: str) -> List[float]:
    try:
        return [float(item) for item in text.split(",") if item.strip()]
    except ValueError as exc:
        raise argparse.ArgumentTypeError(f"virgülle ayrılmış sayı listesi bekleniyordu: {text!r}") from exc


def _model_config(document: ModelDocument) -> dict:
    model = document.model
    return {
        "alphabet": list(model.alphabet),
        "matrix": [list(row) for row in model.matrix],
        "v_per": list(model.v_per),
        "root_label": model.root_label,
        "disorder": document.disorder.to_dict() if document.disorder else None,
    }


def _settings_config(settings: Settings) -> dict:
    config = asdict(settings)
    config.pop("log_level", None)
    config.pop("threads", None)
    return config


# ============ Alt komutlar ============


def cmd_validate(args: argparse.Namespace, services: Services) -> int:
    """Modelin (M0), (M1*), (M2) koşullarını kontrol eder"""
    document = _load_model(args.model)
    report = services.substitution.validate(document.model)

    if args.json:
        builder = ManifestBuilder("validate", {"model": _model_config(document)}, seed=0)
        payload = report.to_dict()
        payload["valid"] = report.is_valid
        payload["violations"] = report.violations()
        sys.stdout.write(builder.dumps(payload))
    else:
        formatter = FormatterFactory.get_formatter("BOOLEAN")
        for name, ok in (("(M0)", report.m0), ("(M1)", report.m1), ("(M1*)", report.m1star), ("(M2)", report.m2)):
            print(f"{name:6} {formatter.format_value(ok)}")
        for violation in report.violations():
            print(violation)

    return EXIT_OK if report.is_valid else EXIT_DOMAIN


def cmd_bands(args: argparse.Namespace, services: Services) -> int:
    """Bant tespiti; JSON rapor ve isteğe bağlı tarama tablosu"""
    document = _load_model(args.model)
    settings = services.settings
    grid_step = args.grid_step or settings.grid_step
    eta_floor = args.eta_floor or settings.eta_floor
    im_threshold = args.im_threshold or settings.im_threshold

    config = {
        "model": _model_config(document),
        "grid_step": grid_step,
        "eta_floor": eta_floor,
        "im_threshold": im_threshold,
        "settings": _settings_config(settings),
    }
    builder = ManifestBuilder("bands", config, seed=0)
    bands = services.bands.detect_bands(document.model, grid_step, eta_floor, im_threshold)

    digests = {}
    if args.table:
        table = _require_table_path(args.table)
        scan = services.bands.scan_table(document.model, grid_step, eta_floor)
        digests = _write_table(builder, scan, table)

    interval_formatter = FormatterFactory.get_formatter("INTERVAL")
    for interval in bands.intervals:
        logger.info("Bant: %s", interval_formatter.format_value(interval))

    _emit(builder, bands.to_dict(), args.out, digests)
    return EXIT_OK


def cmd_solve(args: argparse.Namespace, services: Services) -> int:
    """Γ_k(E + iη): tek nokta (JSON) ya da enerji ızgarası (tablo)"""
    document = _load_model(args.model)
    config = {
        "model": _model_config(document),
        "energy": args.energy,
        "eta": args.eta,
        "emin": args.emin,
        "emax": args.emax,
        "points": args.points,
        "settings": _settings_config(services.settings),
    }
    builder = ManifestBuilder("solve", config, seed=0)

    if args.emin is not None or args.emax is not None:
        if args.emin is None or args.emax is None or args.points < 2:
            raise UsageError("Izgara modu --emin, --emax ve --points ≥ 2 gerektirir")
        out = _require_table_path(args.out)
        energies = np.linspace(args.emin, args.emax, args.points)
        df = services.solver.green_table(document.model, energies, args.eta)
        _emit(builder, {"rows": len(df)}, None, _write_table(builder, df, out))
        return EXIT_OK

    if args.energy is None:
        raise UsageError("--energy ya da --emin/--emax verilmeli")
    if args.eta >= 1.0:
        vector = services.solver.solve_gamma(document.model, complex(args.energy, args.eta))
    else:
        vector = services.solver.solve_gamma_boundary(document.model, args.energy, args.eta)

    payload = vector.to_dict()
    payload["full_green_at_root"] = services.solver.full_green_at_root(document.model, vector)
    _emit(builder, payload, args.out)
    return EXIT_OK


def cmd_verify(args: argparse.Namespace, services: Services) -> int:
    """Eşitsizlik paketleri; karşı örnek varsa çıkış kodu 1"""
    document = _load_model(args.model)
    suites = [name.strip() for name in args.suites.split(",")] if args.suites else None
    interval = (min(args.interval), max(args.interval))

    config = {
        "model": _model_config(document),
        "interval": list(interval),
        "p": args.p,
        "lambda": args.lam,
        "samples": args.samples,
        "suites": suites or SuiteRegistry.names(),
        "settings": _settings_config(services.settings),
    }
    builder = ManifestBuilder("verify", config, seed=args.seed)
    report = services.verifier().run(
        document.model,
        interval,
        p_exp=args.p,
        lam=args.lam,
        samples=args.samples,
        seed=args.seed,
        suites=suites,
    )
    _emit(builder, report.to_dict(), args.out)

    if not report.passed:
        logger.warning("Karşı örnek bulunan paketler: %s", ", ".join(report.failed_suites()))
        return EXIT_DOMAIN
    return EXIT_OK


def cmd_simulate(args: argparse.Namespace, services: Services) -> int:
    """Monte Carlo: tek nokta (JSON) ya da λ/η taraması (tablo)"""
    document = _load_model(args.model)
    disorder = document.disorder
    if disorder is None or args.disorder_mode:
        mode = DisorderMode(args.disorder_mode or DisorderMode.IID_BOTH.value)
        disorder = DisorderSpec.uniform(mode, args.width, document.model.alphabet_size)

    cfg = TrialConfig(
        model=document.model,
        disorder=disorder,
        energy=args.energy,
        eta=args.eta,
        lam=args.lam,
        p_exp=args.p,
        n_trials=args.trials,
        seed=args.seed,
        depth=args.depth,
        boundary=Boundary(args.boundary),
    )
    config = cfg.to_dict()
    config["lambdas"] = args.lambdas
    config["etas"] = args.etas
    config["settings"] = _settings_config(services.settings)
    builder = ManifestBuilder("simulate", config, seed=args.seed)
    engine = services.engine()

    if args.lambdas or args.etas:
        out = _require_table_path(args.out)
        df = engine.sweep(cfg, args.lambdas or [args.lam], args.etas or [args.eta])
        _emit(builder, {"rows": len(df)}, None, _write_table(builder, df, out))
        return EXIT_OK

    result = engine.simulate(cfg)
    _emit(builder, result.to_dict(), args.out)
    return EXIT_OK


# ============ Ayrıştırıcı ============


def build_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(
        prog="conespectra",
        description="Sonlu koni tipli ağaçlarda Green fonksiyonları, bantlar ve Monte Carlo",
    )
    parser.add_argument("--version", action="version", version=f"%(prog)s {VERSION}")
    parser.add_argument("--log-level", default=None, help="DEBUG, INFO, WARNING, ERROR")
    parser.add_argument("--threads", type=int, default=None, help="İş parçacığı sayısı")
    subparsers = parser.add_subparsers(dest="command", required=True)

    validate = subparsers.add_parser("validate", help="Model koşullarını kontrol et")
    validate.add_argument("model", help="Model dosyası (JSON)")
    validate.add_argument("--json", action="store_true", help="Makine okunur çıktı")

    bands = subparsers.add_parser("bands", help="Spektral bantları bul")
    bands.add_argument("--model", required=True)
    bands.add_argument("--grid-step", type=float, default=None)
    bands.add_argument("--eta-floor", type=float, default=None)
    bands.add_argument("--im-threshold", type=float, default=None)
    bands.add_argument("--table", default=None, help="Tarama tablosu (CSV/JSON/Parquet)")
    bands.add_argument("--out", default=None, help="JSON rapor dosyası")

    solve = subparsers.add_parser("solve", help="Γ_k(E + iη) hesapla")
    solve.add_argument("--model", required=True)
    solve.add_argument("--energy", type=float, default=None)
    solve.add_argument("--eta", type=float, default=1e-2)
    solve.add_argument("--emin", type=float, default=None)
    solve.add_argument("--emax", type=float, default=None)
    solve.add_argument("--points", type=int, default=101)
    solve.add_argument("--out", default=None)

    verify = subparsers.add_parser("verify", help="Eşitsizlik paketlerini çalıştır")
    verify.add_argument("--model", required=True)
    verify.add_argument("--interval", type=float, nargs=2, required=True, metavar=("A", "B"))
    verify.add_argument("--p", type=float, default=2.0)
    verify.add_argument("--lambda", dest="lam", type=float, default=0.0)
    verify.add_argument("--samples", type=int, default=100_000)
    verify.add_argument("--seed", type=int, default=0)
    verify.add_argument("--suites", default=None, help=f"Virgülle ayrılmış: {','.join(SuiteRegistry.names())}")
    verify.add_argument("--out", default=None)

    simulate = subparsers.add_parser("simulate", help="Monte Carlo moment tahmini")
    simulate.add_argument("--model", required=True)
    simulate.add_argument("--lambda", dest="lam", type=float, default=0.1)
    simulate.add_argument("--energy", type=float, default=0.0)
    simulate.add_argument("--eta", type=float, default=1e-2)
    simulate.add_argument("--p", type=float, default=1.5)
    simulate.add_argument("--depth", type=int, default=None)
    simulate.add_argument("--trials", type=int, default=1000)
    simulate.add_argument("--seed", type=int, default=0)
    simulate.add_argument("--boundary", choices=[b.value for b in Boundary], default=Boundary.FREE.value)
    simulate.add_argument(
        "--disorder-mode", choices=[m.value for m in DisorderMode], default=None,
        help="Model dosyasındaki düzensizlik bloğunu geçersiz kılar",
    )
    simulate.add_argument("--width", type=float, default=DEFAULT_DISORDER_WIDTH)
    simulate.add_argument("--lambdas", type=_float_list, default=None, help="Tarama: λ listesi")
    simulate.add_argument("--etas", type=_float_list, default=None, help="Tarama: η listesi")
    simulate.add_argument("--out", default=None)

    return parser


_COMMANDS: Dict[str, Callable[[argparse.Namespace, Services], int]] = {
    "validate": cmd_validate,
    "bands": cmd_bands,
    "solve": cmd_solve,
    "verify": cmd_verify,
    "simulate": cmd_simulate,
}


def configure_logging(level: str) -> None:
    """Kök günlükleyiciyi stderr'e bağlar"""
    logging.basicConfig(
        level=getattr(logging, level.upper(), logging.WARNING),
        format="%(asctime)s %(levelname)s %(name)s: %(message)s",
        stream=sys.stderr,
        force=True,
    )


def main(argv: Optional[Sequence[str]] = None) -> int:
    """Komut satırı giriş noktası; çıkış kodunu döndürür"""
    parser = build_parser()
    try:
        args = parser.parse_args(argv)
    except SystemExit as exc:
        return int(exc.code or 0)

    settings = Settings.from_env().with_overrides(threads=args.threads, log_level=args.log_level)
    configure_logging(settings.log_level)
    if settings.threads < 1:
        print("--threads pozitif olmalı", file=sys.stderr)
        return EXIT_USAGE

    try:
        return _COMMANDS[args.command](args, Services(settings))
    except UsageError as exc:
        parser.print_usage(sys.stderr)
        print(f"{parser.prog}: hata: {exc}", file=sys.stderr)
        return EXIT_USAGE
    except ModelFormatError as exc:
        print(f"Model dosyası hatası: {exc}", file=sys.stderr)
        return EXIT_USAGE
    except ConeSpectraError as exc:
        print(f"Hata: {exc}", file=sys.stderr)
        return EXIT_DOMAIN
    except ValueError as exc:
        print(f"Geçersiz parametre: {exc}", file=sys.stderr)
        return EXIT_USAGE
