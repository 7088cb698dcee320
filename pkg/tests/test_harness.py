import pytest

from paircomp import (
    CSV_HEADER,
    ExperimentSpec,
    TrialRecord,
    degree_functional,
    derive_seed,
    fit_slope,
    make_topology,
    mean_errors,
    parse_config,
    records_from_csv,
    records_to_csv,
    run_sweep,
    run_trial,
    summarize,
)
from paircomp.cli import main as cli_main


def small_spec(**overrides):
    base = dict(
        graph_family="two_cliques",
        n_values=(8, 16),
        model="ns",
        lambda_star=0.4,
        estimator="asp",
        trials=3,
        master_seed=99,
        mode="bernoulli",
    )
    base.update(overrides)
    return ExperimentSpec(**base)


def test_spec_validation():
    with pytest.raises(ValueError):
        small_spec(trials=0)
    with pytest.raises(ValueError):
        small_spec(n_values=(16, 8))
    with pytest.raises(ValueError):
        small_spec(model="btl")
    with pytest.raises(ValueError):
        small_spec(estimator="mle")
    with pytest.raises(ValueError):
        small_spec(lambda_star=0.7)


def test_derive_seed_is_deterministic_and_spread():
    seeds = {derive_seed(1, n, t) for n in range(50) for t in range(50)}
    assert len(seeds) == 2500
    assert derive_seed(1, 8, 3) == derive_seed(1, 8, 3)
    assert derive_seed(1, 8, 3) != derive_seed(2, 8, 3)


def test_run_trial_expectation_complete_is_exact():
    spec = small_spec(graph_family="complete", mode="expectation", n_values=(12,))
    rec = run_trial(spec, 12, 0)
    assert rec.error is None
    assert rec.frob_err < 1e-12
    assert rec.kt_dist == 0
    assert rec.lambda_hat == pytest.approx(0.4, abs=1e-15)


def test_run_trial_lambda_zero_expectation():
    spec = small_spec(lambda_star=0.0, mode="expectation", n_values=(8,))
    rec = run_trial(spec, 8, 0)
    assert rec.frob_err == 0.0
    assert rec.lambda_hat == 0.0


def test_run_trial_repeatable():
    spec = small_spec()
    a = run_trial(spec, 16, 2)
    b = run_trial(spec, 16, 2)
    # identical except wall-clock runtime
    assert (a.frob_err, a.kt_dist, a.lambda_hat, a.seed) == (
        b.frob_err,
        b.kt_dist,
        b.lambda_hat,
        b.seed,
    )
    assert a.degree_functional == degree_functional(make_topology("two_cliques", 16))


def test_run_trial_records_failures():
    # p small enough that some vertex is isolated: estimator precondition fails
    spec = small_spec(graph_family="erdos_renyi", n_values=(16,))
    spec = ExperimentSpec(**{**spec.__dict__, "edge_probability": 0.01})
    recs = [run_trial(spec, 16, t) for t in range(5)]
    failed = [r for r in recs if r.error is not None]
    assert failed, "expected at least one failed trial at p=0.01"
    assert all(r.frob_err is None for r in failed)
    text = summarize(recs)
    assert "failed trials" in text


def test_run_sweep_shape_and_order():
    spec = small_spec()
    recs = run_sweep(spec)
    assert len(recs) == 6
    assert [(r.n, r.trial_index) for r in recs] == [
        (8, 0),
        (8, 1),
        (8, 2),
        (16, 0),
        (16, 1),
        (16, 2),
    ]


def test_sweep_rerun_and_parallel_byte_identical():
    spec = small_spec(trials=4)
    serial_1 = records_to_csv(run_sweep(spec, workers=1))
    serial_2 = records_to_csv(run_sweep(spec, workers=1))
    parallel = records_to_csv(run_sweep(spec, workers=2))
    assert serial_1 == serial_2 == parallel


def test_bap_trial_smoke():
    spec = small_spec(model="sst", estimator="bap", n_values=(8,), trials=2)
    recs = run_sweep(spec)
    assert all(r.error is None for r in recs)
    assert all(r.kt_dist is None and r.lambda_hat is None for r in recs)
    assert all(0 <= r.frob_err <= 1 for r in recs)


# ---------------------------------------------------------------------------
# slope fitting
# ---------------------------------------------------------------------------


def synthetic_records(err_of_n, ns=(64, 128, 256, 512)):
    return [
        TrialRecord(
            graph_family="two_cliques",
            n=n,
            trial_index=t,
            seed=0,
            estimator="asp",
            model="ns",
            frob_err=err_of_n(n),
            kt_dist=None,
            lambda_hat=None,
            degree_functional=None,
            runtime_ms=None,
        )
        for n in ns
        for t in range(3)
    ]


def test_fit_slope_recovers_power_law():
    fit = next(iter(fit_slope(synthetic_records(lambda n: 0.9 * n**-0.5)).values()))
    assert fit.slope == pytest.approx(-0.5, abs=1e-12)
    assert fit.r_squared == pytest.approx(1.0)


def test_fit_slope_constant_error():
    fit = next(iter(fit_slope(synthetic_records(lambda n: 0.25)).values()))
    assert fit.slope == pytest.approx(0.0, abs=1e-12)


def test_fit_slope_two_points():
    recs = synthetic_records(lambda n: {64: 0.04, 256: 0.02}[n], ns=(64, 256))
    fit = next(iter(fit_slope(recs).values()))
    assert fit.slope == pytest.approx(-0.5, abs=1e-12)


def test_fit_slope_exact_group_excluded():
    fit = next(iter(fit_slope(synthetic_records(lambda n: 0.0)).values()))
    assert fit.status == "exact"
    assert fit.slope is None


def test_fit_slope_needs_two_sizes():
    with pytest.raises(ValueError):
        fit_slope(synthetic_records(lambda n: 0.1, ns=(64,)))


# ---------------------------------------------------------------------------
# CSV and config
# ---------------------------------------------------------------------------


def test_csv_round_trip():
    recs = run_sweep(small_spec())
    text = records_to_csv(recs)
    assert text.splitlines()[0] == CSV_HEADER
    parsed = records_from_csv(text)
    assert len(parsed) == len(recs)
    for a, b in zip(parsed, recs):
        assert (a.graph_family, a.n, a.trial_index, a.seed) == (
            b.graph_family,
            b.n,
            b.trial_index,
            b.seed,
        )
        assert a.frob_err == b.frob_err
        assert a.kt_dist == b.kt_dist
    assert mean_errors(parsed) == mean_errors(recs)


def test_csv_runtime_opt_in():
    recs = run_sweep(small_spec(n_values=(8,), trials=1))
    without = records_to_csv(recs).splitlines()[1]
    with_rt = records_to_csv(recs, include_runtime=True).splitlines()[1]
    assert without.endswith(",")
    assert not with_rt.endswith(",")


def test_parse_config():
    spec = parse_config(
        """
        # scaling run
        graph = two_cliques
        n_list = 64,128,256
        model = ns
        lambda = 0.4
        estimator = asp
        trials = 10
        seed = 7
        mode = bernoulli
        """
    )
    assert spec.graph_family == "two_cliques"
    assert spec.n_values == (64, 128, 256)
    assert spec.master_seed == 7
    with pytest.raises(ValueError):
        parse_config("nonsense = 1")
    with pytest.raises(ValueError):
        parse_config("graph = path")  # n_list missing


# ---------------------------------------------------------------------------
# CLI
# ---------------------------------------------------------------------------


def test_cli_simulate_and_slope(tmp_path, capsys):
    out = tmp_path / "r.csv"
    code = cli_main(
        [
            "simulate",
            "--graph",
            "two_cliques",
            "--n-list",
            "8,16",
            "--model",
            "ns",
            "--lambda",
            "0.4",
            "--estimator",
            "asp",
            "--trials",
            "2",
            "--seed",
            "5",
            "--mode",
            "bernoulli",
            "--out",
            str(out),
        ]
    )
    assert code == 0
    text = out.read_text()
    assert text.splitlines()[0] == CSV_HEADER
    captured = capsys.readouterr()
    assert "mean frob_err" in captured.err

    code = cli_main(["slope", "--input", str(out)])
    assert code == 0
    assert "slope=" in capsys.readouterr().out


def test_cli_sweep_from_config(tmp_path):
    cfg = tmp_path / "exp.cfg"
    cfg.write_text("graph = path\nn_list = 8,12\ntrials = 2\nseed = 3\n")
    out = tmp_path / "sweep.csv"
    assert cli_main(["sweep", "--config", str(cfg), "--out", str(out)]) == 0
    assert len(out.read_text().splitlines()) == 5


def test_cli_diagnose(capsys):
    assert cli_main(["diagnose", "--graph", "star", "--n", "5"]) == 0
    out = capsys.readouterr().out
    assert "alpha = 4" in out
    assert cli_main(["diagnose", "--graph", "star", "--n", "5", "--json"]) == 0
    assert '"minimax_lb"' in capsys.readouterr().out


def test_cli_stdout_csv(capsys):
    code = cli_main(
        ["simulate", "--graph", "path", "--n", "8", "--trials", "1", "--seed", "1"]
    )
    assert code == 0
    captured = capsys.readouterr()
    assert captured.out.splitlines()[0] == CSV_HEADER


def test_cli_timings_flag(capsys):
    args = ["simulate", "--graph", "path", "--n", "8", "--trials", "1", "--seed", "1"]
    assert cli_main(args) == 0
    without = capsys.readouterr().out.splitlines()[1]
    assert cli_main(args + ["--timings"]) == 0
    with_rt = capsys.readouterr().out.splitlines()[1]
    assert without.endswith(",")
    assert not with_rt.endswith(",")
    assert float(with_rt.rsplit(",", 1)[1]) > 0
