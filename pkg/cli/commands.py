"""
CLI Commands

Each command takes a validated ScenarioConfig, writes its result document and
returns the process exit code: 0 on success, 1 on configuration or I/O
errors, 2 when the protocol aborted or a verification check failed.
"""

import csv
import io
import json
import sys
from typing import Any, Dict, List, Optional, Sequence

from adversary.collective import InconsistentParams, analytic_distinguishability
from adversary.strategies import HonestStrategy, StrategyError, dump_strategy
from analysis.monte_carlo import estimate_detection, within_sigma
from analysis.oracle import HONEST_CASE_WEIGHTS, basis_angle_detection, enumerate_branches
from analysis.statistics import InsufficientData, chi_square_case_test, detection_curve, efficiency_expected
from cli.scenario import ScenarioConfig, ScenarioError
from config.settings import configured_seed
from protocol.schema import ProtocolConfig
from protocol.sifting import EmptyRun
from registry.strategy_registry import StrategyRegistry, StrategyRegistryError
from runner.simulation_runner import SimulationRunner
from storage.transcript_log import TranscriptLogError, write_log
from utils.logger import SimulationLogger

EXIT_OK = 0
EXIT_CONFIG = 1
EXIT_MISMATCH = 2

EXACT_TOLERANCE = 1e-12
# Monte Carlo rows of verify; wider than the report's 3 sigma to keep the
# fixed-seed matrix stable across many strategies
VERIFY_SIGMA = 4.0
PERTURBATION = 1.0 / 64.0

CONFIG_ERRORS = (
    ScenarioError,
    StrategyRegistryError,
    StrategyError,
    InconsistentParams,
    EmptyRun,
    TranscriptLogError,
    OSError,
)


def render_json(payload: Any) -> str:
    return json.dumps(payload, sort_keys=True, indent=2) + "\n"


def render_csv(header: Sequence[str], rows: Sequence[Sequence[Any]]) -> str:
    buffer = io.StringIO()
    writer = csv.writer(buffer, lineterminator="\n")
    writer.writerow(header)
    writer.writerows(rows)
    return buffer.getvalue()


def write_output(scenario: ScenarioConfig, text: str) -> None:
    if scenario.output.path is None:
        sys.stdout.write(text)
        sys.stdout.flush()
        return
    with open(scenario.output.path, "w", encoding="utf-8", newline="\n") as f:
        f.write(text)


def _positive_rounds(scenario: ScenarioConfig) -> ProtocolConfig:
    if scenario.rounds == 0:
        raise EmptyRun("rounds must be at least 1")
    return scenario.protocol_config()


def cmd_run(scenario: ScenarioConfig) -> int:
    """Run the protocol and write the sifting summary"""
    log = SimulationLogger("run")
    try:
        cfg = _positive_rounds(scenario)
        strategy = scenario.build_strategy()
        runner = SimulationRunner(cfg, strategy, workers=scenario.worker_count)
        result = runner.run()
        if scenario.transcript_log:
            write_log(scenario.transcript_log, result.transcripts)

        outcome = result.outcome
        summary: Dict[str, Any] = {
            "rounds": cfg.rounds,
            "seed": cfg.master_seed,
            "strategy": dump_strategy(strategy),
            "key_length": outcome.key_length,
            "error_rates": outcome.per_situation_error_rate,
            "situation_counts": outcome.situation_counts,
            "situation_error_counts": outcome.situation_error_counts,
            "case_counts": outcome.counts,
            "undefined_count": outcome.undefined_count,
            "situation4_announcements": outcome.situation4_announcements,
            "efficiency": result.efficiency,
            "efficiency_expected": efficiency_expected(cfg),
            "aborted": outcome.aborted,
            "abort_reason": outcome.abort_reason.value,
        }
        if scenario.include_keys:
            summary["raw_key_alice"] = outcome.raw_key_alice
            summary["raw_key_bob"] = outcome.raw_key_bob

        if scenario.output.format == "csv":
            rows = []
            for name in sorted(summary):
                value = summary[name]
                if isinstance(value, list):
                    rows.extend((f"{name}.{i + 1}", v) for i, v in enumerate(value))
                elif isinstance(value, dict):
                    rows.append((name, json.dumps(value, sort_keys=True)))
                else:
                    rows.append((name, value))
            write_output(scenario, render_csv(("metric", "value"), rows))
        else:
            write_output(scenario, render_json(summary))
    except CONFIG_ERRORS as e:
        log.error(f"run failed: {e}")
        return EXIT_CONFIG

    return EXIT_MISMATCH if outcome.aborted else EXIT_OK


def cmd_attack(scenario: ScenarioConfig) -> int:
    """Oracle and Monte Carlo detection of one attack strategy"""
    log = SimulationLogger("attack")
    try:
        cfg = _positive_rounds(scenario)
        strategy = scenario.build_strategy()
        if isinstance(strategy, HonestStrategy):
            raise ScenarioError("strategy: attack needs a non-honest strategy")
        report = estimate_detection(strategy, cfg, scenario.n_values or [1], workers=scenario.worker_count)

        if scenario.output.format == "csv":
            rows = [
                (g.n, g.analytic, "" if g.empirical is None else g.empirical, g.groups,
                 "" if g.consistent is None else g.consistent)
                for g in report.grouped
            ]
            write_output(scenario, render_csv(("N", "analytic", "empirical", "groups", "consistent"), rows))
        else:
            write_output(scenario, render_json(report.model_dump(mode="json")))
    except CONFIG_ERRORS + (InsufficientData,) as e:
        log.error(f"attack failed: {e}")
        return EXIT_CONFIG

    if report.analytic_distinguishability is not None and report.analytic_distinguishability <= 1e-10:
        log.info(f"{report.strategy_label}: no key information (distinguishability 0)")
    return EXIT_OK


def cmd_sweep(scenario: ScenarioConfig) -> int:
    """Analytic and empirical detection curves over N, or over basis angles"""
    log = SimulationLogger("sweep")
    try:
        if not scenario.n_values:
            raise ScenarioError("n_values: sweep needs at least one N")
        if any(n < 1 for n in scenario.n_values):
            raise ScenarioError("n_values: every N must be >= 1")
        cfg = _positive_rounds(scenario)

        if scenario.angles:
            header = ["theta", "per_round"] + [f"N={n}" for n in scenario.n_values]
            rows = []
            for theta in scenario.angles:
                p = basis_angle_detection(theta, cfg)
                rows.append([theta, p] + detection_curve(p, scenario.n_values))
            document = {"angles": [dict(zip(header, row)) for row in rows]}
        else:
            strategy = scenario.build_strategy()
            report = estimate_detection(
                strategy, cfg, scenario.n_values, workers=scenario.worker_count, with_distinguishability=False
            )
            header = ["N", "analytic", "empirical"]
            rows = [[g.n, g.analytic, "" if g.empirical is None else g.empirical] for g in report.grouped]
            document = {
                "strategy": report.strategy_label,
                "per_round_detection": report.per_round_detection,
                "curve": [g.model_dump(mode="json") for g in report.grouped],
            }

        if scenario.output.format == "csv":
            write_output(scenario, render_csv(header, rows))
        else:
            write_output(scenario, render_json(document))
    except CONFIG_ERRORS + (InsufficientData,) as e:
        log.error(f"sweep failed: {e}")
        return EXIT_CONFIG
    return EXIT_OK


def _row(check: str, expected: float, observed: float, passed: bool, log: SimulationLogger) -> Dict[str, Any]:
    log.log_verification_row(check, expected, observed, passed)
    return {"check": check, "expected": expected, "observed": observed, "passed": passed}


def verification_rows(
    registry: StrategyRegistry,
    cfg: ProtocolConfig,
    perturb: bool = False,
    workers: int = 1,
) -> List[Dict[str, Any]]:
    """Every oracle-versus-expected and Monte Carlo comparison of verify"""
    log = SimulationLogger("verify")
    shift = PERTURBATION if perturb else 0.0
    rows = []

    honest = enumerate_branches(HonestStrategy(), cfg)
    for case, (expected, observed) in enumerate(zip(HONEST_CASE_WEIGHTS, honest.case_weights()), start=1):
        expected += shift
        rows.append(_row(f"case {case} weight", expected, observed,
                         abs(observed - expected) <= EXACT_TOLERANCE, log))

    default_cfg = ProtocolConfig(rounds=1)
    expected = 1.0 / 8.0 + shift
    observed = efficiency_expected(default_cfg)
    rows.append(_row("efficiency", expected, observed, abs(observed - expected) <= EXACT_TOLERANCE, log))

    for entry in registry.verification_entries():
        strategy = entry.build()
        expected = entry.expected_detection + shift
        oracle = enumerate_branches(strategy, cfg).flagged_weight
        rows.append(_row(f"{entry.name} oracle detection", expected, oracle,
                         abs(oracle - expected) <= EXACT_TOLERANCE, log))

        if entry.expected_distinguishability is not None:
            observed = analytic_distinguishability(strategy, cfg)
            rows.append(_row(f"{entry.name} distinguishability", entry.expected_distinguishability, observed,
                             abs(observed - entry.expected_distinguishability) <= 1e-10, log))

        report = estimate_detection(strategy, cfg, [1], workers=workers, with_distinguishability=False)
        rows.append(_row(f"{entry.name} monte carlo detection", oracle, report.empirical_estimate,
                         within_sigma(report.empirical_estimate, oracle, cfg.rounds, VERIFY_SIGMA), log))

    return rows


def cmd_verify(scenario: ScenarioConfig, registry: Optional[StrategyRegistry] = None) -> int:
    """Reproduce every expected value and print the pass/fail matrix"""
    log = SimulationLogger("verify")
    try:
        registry = registry or StrategyRegistry()
        rounds = scenario.protocol.rounds or registry.registry_config.get("verify_rounds", 20000)
        if scenario.protocol.master_seed is None:
            # explicit seed, then MSQKD_SEED, then the registry's verify seed
            seed = configured_seed()
            if seed is None:
                seed = registry.registry_config.get("verify_seed")
            if seed is not None:
                scenario = scenario.model_copy(update={
                    "protocol": scenario.protocol.model_copy(update={"master_seed": seed})
                })
        cfg = scenario.protocol_config(rounds=rounds)
        rows = verification_rows(registry, cfg, perturb=scenario.perturb_expected, workers=scenario.worker_count)

        honest_run = SimulationRunner(cfg, HonestStrategy(), workers=scenario.worker_count).run()
        try:
            chi = chi_square_case_test(honest_run.outcome.counts,
                                       situation4_announcements=honest_run.outcome.situation4_announcements)
            rows.append(_row("honest case distribution chi-square p-value", chi.alpha, chi.p_value, chi.passed, log))
        except InsufficientData as e:
            log.warning(f"chi-square skipped: {e}")

        if scenario.output.format == "csv":
            text = render_csv(("check", "expected", "observed", "passed"),
                              [(r["check"], r["expected"], r["observed"], r["passed"]) for r in rows])
        else:
            text = render_json({"rounds": cfg.rounds, "seed": cfg.master_seed, "checks": rows,
                                "passed": all(r["passed"] for r in rows)})
        write_output(scenario, text)
    except CONFIG_ERRORS + (InsufficientData,) as e:
        log.error(f"verify failed: {e}")
        return EXIT_CONFIG

    failed = [r["check"] for r in rows if not r["passed"]]
    if failed:
        log.warning(f"{len(failed)} checks failed: {', '.join(failed)}")
        return EXIT_MISMATCH
    return EXIT_OK


def cmd_list(scenario: ScenarioConfig, registry: Optional[StrategyRegistry] = None) -> int:
    """Print the built-in strategies"""
    log = SimulationLogger("list")
    try:
        registry = registry or StrategyRegistry()
        entries = [
            {
                "name": e.name,
                "description": e.description,
                "expected_detection": e.expected_detection,
            }
            for e in registry.entries.values()
        ]
        if scenario.output.format == "csv":
            rows = [(e["name"], "" if e["expected_detection"] is None else e["expected_detection"], e["description"])
                    for e in entries]
            write_output(scenario, render_csv(("name", "expected_detection", "description"), rows))
        else:
            write_output(scenario, render_json({"strategies": entries}))
    except CONFIG_ERRORS as e:
        log.error(f"list failed: {e}")
        return EXIT_CONFIG
    return EXIT_OK
