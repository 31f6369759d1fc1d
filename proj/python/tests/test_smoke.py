from fractions import Fraction
from math import comb

import pytest

import gpass


def exact_tail(n, c, k, j_min):
    return sum(Fraction(comb(c, j) * comb(n - c, k - j), comb(n, k)) for j in range(j_min, k + 1))


def test_metrics_match_exact_fractions():
    assert gpass.pass_at_k(80, 8, 16) == pytest.approx(float(1 - Fraction(comb(72, 16), comb(80, 16))), abs=1e-12)
    assert gpass.g_pass_at_k(48, 24, 16) == pytest.approx(float(exact_tail(48, 24, 16, 16)), abs=1e-12)
    assert gpass.g_pass_at_k_tau(48, 24, 16, 0.5) == pytest.approx(float(exact_tail(48, 24, 16, 8)), abs=1e-12)
    mg = Fraction(2, 16) * sum(exact_tail(48, 36, 16, i) for i in range(9, 17))
    assert gpass.mg_pass_at_k(48, 36, 16) == pytest.approx(float(mg), abs=1e-12)
    assert gpass.threshold_count(0.5, 16) == 8


def test_invalid_arguments_raise():
    with pytest.raises(ValueError):
        gpass.pass_at_k(4, 5, 2)
    with pytest.raises(ValueError):
        gpass.g_pass_at_k_tau(10, 5, 4, 1.5)


def test_compute_report():
    r = gpass.compute_report([("a", 48, 48), ("b", 48, 0)], k_values=[16], tau_values=[1.0])
    assert r["aggregate"] == {"G-Pass@16_{->0}": 0.5, "G-Pass@16_{1}": 0.5, "mG-Pass@16": 0.5}
    assert [q["question_id"] for q in r["per_question"]] == ["a", "b"]
    assert r["warnings"] == []
    with pytest.raises(ValueError):
        gpass.compute_report([("a", 8, 3)], k_values=[16])


def test_simulation_is_seeded():
    a = gpass.unbiasedness_study(n_values=[16, 48], trials=500, seed=3)
    b = gpass.unbiasedness_study(n_values=[16, 48], trials=500, seed=3, threads=2)
    assert a == b
    assert len(a) == 8
    assert gpass.true_expected_g_pass(1.0, 16, 16, 1.0) == 1.0


def test_report_helpers():
    assert gpass.format_percent(gpass.drop_percentage(18.1, 0.8)) == "95.6"
    assert gpass.drop_percentage(0.0, 0.0) is None
    assert gpass.format_percent(None) == "—"
    assert gpass.tau_slope([(0.0, 1.0), (1.0, 0.0)]) == pytest.approx(-1.0)


def test_judge_prompt_and_verdicts():
    prompt = gpass.render_judge_prompt("Compute $1+1$.", "2", "The answer is $2$.")
    assert prompt.endswith("Examinee's Answer: The answer is $2$.\n\nAnalysis:")
    assert gpass.render_judge_prompt("q", "r", "c", "cn").endswith("分析：")
    assert gpass.parse_verdict("so \\boxed{yes}") == "yes"
    assert gpass.parse_verdict("no box") == "unparseable"
    with pytest.raises(ValueError):
        gpass.render_judge_prompt("q", "r", "c", "fr")
