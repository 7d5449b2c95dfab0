"""Acceptance suite: one test per exit criterion, each printing a
pass/fail line. Run with ``pytest tests/test_acceptance.py -s`` to see
the per-criterion summary."""

import random
import time

from msaconform.automaton import (
    StateMachine,
    accepts,
    parse_state_machine,
    serialize_state_machine,
)
from msaconform.cli import run
from msaconform.detector import detect, extract_dynamic_view, extract_static_view
from msaconform.evaluator import evaluate
from msaconform.events import Trace, extract_traces, parse_event_log
from msaconform.learner import LearnerConfig, build_pta, learn
from msaconform.report import render_architecture_puml
from msaconform.scenario import ScenarioSpec, generate
from msaconform.static_model import parse_static_model, serialize_static_model

from test_automaton import random_machine
from test_detector import brute_force_detect, random_view
from test_report import fixture_tagged_view
from test_static_model import random_model


def report(criterion: str, ok: bool):
    print(f"[{'PASS' if ok else 'FAIL'}] {criterion}")
    assert ok


def full_pipeline(model, log_text):
    events = parse_event_log(log_text)
    traces = extract_traces(events, 1000, scope="both")
    machines = [learn(v, LearnerConfig(), name=k) for k, v in traces.items()]
    return detect(extract_static_view(model), extract_dynamic_view(machines))


def test_criterion_1_injected_fault_recovery():
    """20 seeded scenarios: detection equals ground truth exactly."""
    rng = random.Random(1001)
    ok = True
    for i in range(20):
        n = 3 + (i * 17) % 18  # spans 3..20
        max_edges = n * (n - 1)
        n_edges = min(max_edges - 2, n - 1 + rng.randint(0, n))
        spec = ScenarioSpec(
            n_services=n,
            n_edges=n_edges,
            n_injected_static_nc=rng.randint(0, min(2, n_edges)),
            n_injected_dynamic_nc=rng.randint(0, min(2, max_edges - n_edges)),
            n_events=3 * n_edges + rng.randint(0, 300),
            rng_seed=1000 + i,
        )
        model, log, truth = generate(spec)
        _tv, ncs = full_pipeline(model, log)
        ok = ok and tuple(ncs) == truth.expected
    report("1. injected-fault recovery over 20 seeded scenarios", ok)


def test_criterion_2_one_state_machine_metrics():
    """Forced 1-state machine: recall 0.0, specificity 1.0, BA 0.5 exactly."""
    rng = random.Random(2002)
    alphabet = [f"sym{i}" for i in range(6)]  # >= 5 symbols
    traces = [
        Trace(tuple(rng.choice(alphabet) for _ in range(rng.randint(2, 6))))
        for _ in range(50)
    ]
    loop = StateMachine(frozenset({0}), 0, {(0, "off-alphabet-loop"): (0, 1)})
    metrics = evaluate(traces, LearnerConfig(), k=10, rng_seed=0, model_fn=lambda _t: loop)
    report(
        "2. forced 1-state machine yields recall 0.0, specificity 1.0, BA 0.5",
        metrics.recall == 0.0
        and metrics.specificity == 1.0
        and metrics.balanced_accuracy == 0.5,
    )


def test_criterion_3_accuracy_trend():
    """Alpha sweep: BA non-decreasing (0.05 slack), <=0.6 start, >=0.9 end, plateau."""
    spec = ScenarioSpec(n_services=8, n_edges=14, n_events=7000, rng_seed=42)
    model, log, _truth = generate(spec)
    traces = extract_traces(parse_event_log(log), 1000, scope="global")["global"]
    assert len(traces) >= 500
    alphas = [1e-300, 1e-100, 1e-40, 1e-10, 1.0]
    bas = [
        evaluate(traces, LearnerConfig(alpha=a), k=10, rng_seed=3).balanced_accuracy
        for a in alphas
    ]
    non_decreasing = all(b >= a - 0.05 for a, b in zip(bas, bas[1:]))
    ok = (
        non_decreasing
        and bas[0] <= 0.6
        and bas[-1] >= 0.9
        and abs(bas[-1] - bas[-2]) < 0.05
    )
    report(f"3. accuracy trend over alpha sweep (BA: {[round(b, 3) for b in bas]})", ok)


def test_criterion_4_runtime_bound(tmp_path):
    """Full analysis of 20 services / 5000 events in < 5 seconds."""
    spec = ScenarioSpec(
        n_services=20, n_edges=40, n_injected_static_nc=3,
        n_injected_dynamic_nc=3, n_events=5000, rng_seed=4,
    )
    model, log, _truth = generate(spec)
    static_path = tmp_path / "static_model.json"
    static_path.write_text(serialize_static_model(model), "utf-8")
    dyn = tmp_path / "dyn"
    dyn.mkdir()
    (dyn / "events.jsonl").write_text(log, "utf-8")
    t0 = time.perf_counter()
    code = run(
        [
            "--static_model_path", str(static_path),
            "--dynamic_models_path", str(dyn),
            "--output_path", str(tmp_path / "out"),
        ]
    )
    elapsed = time.perf_counter() - t0
    report(f"4. runtime bound ({elapsed:.2f}s < 5s)", code == 0 and elapsed < 5.0)


def test_criterion_5_detector_oracle_equivalence():
    """1000 random view pairs: detect matches the brute-force oracle."""
    rng = random.Random(5005)
    mismatches = 0
    for _ in range(1000):
        a, b = random_view(rng), random_view(rng)
        _tv, ncs = detect(a, b)
        got = [(n.kind.value, n.subject_type, tuple(n.names)) for n in ncs]
        if got != brute_force_detect(a, b):
            mismatches += 1
    report("5. detector equals brute-force oracle on 1000 view pairs", mismatches == 0)


def test_criterion_6_learner_soundness():
    """Learned machines accept all training traces; PTA bounds state count."""
    rng = random.Random(6006)
    ok = True
    for _ in range(30):
        symbols = [f"sym{i}" for i in range(rng.randint(2, 5))]
        traces = [
            [rng.choice(symbols) for _ in range(rng.randint(1, 7))]
            for _ in range(rng.randint(3, 25))
        ]
        pta_states = len(build_pta(traces).states)
        for alpha in (1e-12, 0.05, 0.5, 1.0):
            for min_freq in (0, 2):
                sm = learn(traces, LearnerConfig(alpha=alpha, min_freq=min_freq))
                ok = ok and all(accepts(sm, t) for t in traces)
                ok = ok and len(sm.states) <= pta_states
    report("6. learner soundness (training acceptance + PTA size bound)", ok)


def test_criterion_7_rendering_contract():
    """Color/style tokens follow the tag mapping; output is reproducible."""
    tv = fixture_tagged_view()
    text = render_architecture_puml(tv)
    ok = text == render_architecture_puml(tv)
    for name, tag in tv.nodes.items():
        line = next(l for l in text.splitlines() if f'"{name}"' in l)
        ok = ok and _tokens_match(line, tag.value)
    for (s, r), tag in tv.edges.items():
        line = next(
            l for l in text.splitlines() if l.startswith(f"c_{s} -[") and l.endswith(f"> c_{r}")
        )
        ok = ok and _tokens_match(line, tag.value)
    report("7. rendering contract (blue+dotted / orange+dashed tokens)", ok)


def _tokens_match(line: str, tag: str) -> bool:
    if tag == "static-only":
        return "blue" in line and "dotted" in line
    if tag == "dynamic-only":
        return "orange" in line and "dashed" in line
    return "blue" not in line and "orange" not in line


def test_criterion_8_round_trips():
    """parse∘serialize identity on 100 random machines and static models."""
    rng = random.Random(8008)
    ok = True
    for _ in range(100):
        sm = random_machine(rng)
        ok = ok and parse_state_machine(serialize_state_machine(sm)) == sm
    for _ in range(100):
        m = random_model(rng)
        ok = ok and parse_static_model(serialize_static_model(m)) == m
    report("8. parse∘serialize round-trips (machines + static models)", ok)


def test_criterion_9_cli_contract(tmp_path, capsys):
    """Summary template with pluralization; exit codes on the 3-case matrix."""
    ok = True

    # case 1: findings
    spec = ScenarioSpec(
        n_services=5, n_edges=6, n_injected_static_nc=2,
        n_injected_dynamic_nc=1, n_events=200, rng_seed=7,
    )
    model, log, _truth = generate(spec)
    (tmp_path / "static.json").write_text(serialize_static_model(model), "utf-8")
    dyn = tmp_path / "dyn"
    dyn.mkdir()
    (dyn / "events.jsonl").write_text(log, "utf-8")
    code = run(
        [
            "--static_model_path", str(tmp_path / "static.json"),
            "--dynamic_models_path", str(dyn),
            "--output_path", str(tmp_path / "out1"),
        ]
    )
    out = capsys.readouterr().out
    ok = ok and code == 0
    ok = ok and (
        "Detected 2 static non-conformances and 1 dynamic non-conformance "
        "between implementation and deployment of the system!" in out
    )

    # case 2: clean
    spec = ScenarioSpec(n_services=4, n_edges=5, n_events=100, rng_seed=3)
    model, log, _truth = generate(spec)
    (tmp_path / "clean.json").write_text(serialize_static_model(model), "utf-8")
    dyn2 = tmp_path / "dyn2"
    dyn2.mkdir()
    (dyn2 / "events.jsonl").write_text(log, "utf-8")
    code = run(
        [
            "--static_model_path", str(tmp_path / "clean.json"),
            "--dynamic_models_path", str(dyn2),
            "--output_path", str(tmp_path / "out2"),
        ]
    )
    out = capsys.readouterr().out
    ok = ok and code == 0
    ok = ok and "Detected 0 static non-conformances and 0 dynamic non-conformances" in out

    # case 3: invalid input
    (tmp_path / "bad.json").write_text("{oops", "utf-8")
    code = run(
        [
            "--static_model_path", str(tmp_path / "bad.json"),
            "--dynamic_models_path", str(dyn),
            "--output_path", str(tmp_path / "out3"),
        ]
    )
    capsys.readouterr()
    ok = ok and code == 2

    report("9. CLI contract (summary line + exit code matrix)", ok)
