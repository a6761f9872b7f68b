"""Evaluation metrics against hand computations and a brute-force oracle."""

import numpy as np
import pytest
from hypothesis import given, settings
from hypothesis import strategies as st

from ekmanlab.corpus import CoarseLabel
from ekmanlab.metrics import (
    MetricsError,
    aggregate,
    class_prf,
    compare,
    comparison_csv,
    comparison_text,
    confusion,
    evaluate,
    report_from_predictions,
)

from oracles import prf_reference

JOY = int(CoarseLabel.JOY)
ANGER = int(CoarseLabel.ANGER)


class TestConfusion:
    def test_identical_vectors_diagonal(self):
        y = [0, 1, 2, 3, 4, 5, 6]
        cm = confusion(y, y)
        assert np.array_equal(cm, np.eye(7, dtype=np.int64))

    def test_single_off_diagonal(self):
        cm = confusion([JOY], [ANGER])
        assert cm[JOY, ANGER] == 1 and cm.sum() == 1

    def test_empty_rejected(self):
        with pytest.raises(MetricsError):
            confusion([], [])

    def test_length_mismatch_rejected(self):
        with pytest.raises(MetricsError):
            confusion([0, 1], [0])


class TestClassPrf:
    def test_hand_case(self):
        # y_true = [joy, joy, anger]; y_pred = [joy, anger, anger]
        cm = confusion([JOY, JOY, ANGER], [JOY, ANGER, ANGER])
        joy = class_prf(cm, JOY)
        assert joy["precision"] == pytest.approx(1.0)
        assert joy["recall"] == pytest.approx(0.5)
        assert joy["f1"] == pytest.approx(2 / 3)
        assert joy["support"] == 2
        anger = class_prf(cm, ANGER)
        assert anger["precision"] == pytest.approx(0.5)
        assert anger["recall"] == pytest.approx(1.0)
        assert anger["f1"] == pytest.approx(2 / 3)

    def test_absent_class_zero_convention(self):
        cm = confusion([JOY], [JOY])
        fear = class_prf(cm, int(CoarseLabel.FEAR))
        assert fear == {"precision": 0.0, "recall": 0.0, "f1": 0.0, "support": 0}

    def test_perfect_predictions(self):
        y = [0, 1, 2, 3, 4, 5, 6] * 3
        cm = confusion(y, y)
        for label in range(7):
            pc = class_prf(cm, label)
            assert pc["precision"] == pc["recall"] == pc["f1"] == 1.0


class TestAggregate:
    def test_hand_case(self):
        cm = confusion([JOY, JOY, ANGER], [JOY, ANGER, ANGER])
        per_class = [class_prf(cm, k) for k in range(7)]
        agg = aggregate(per_class, cm)
        assert agg["accuracy"] == pytest.approx(2 / 3)
        assert agg["macro"]["f1"] == pytest.approx((2 / 3 + 2 / 3) / 7)

    def test_single_class_perfect(self):
        y = [JOY] * 10
        cm = confusion(y, y)
        per_class = [class_prf(cm, k) for k in range(7)]
        agg = aggregate(per_class, cm)
        assert agg["accuracy"] == 1.0
        assert agg["weighted"]["f1"] == pytest.approx(1.0)
        assert agg["macro"]["f1"] == pytest.approx(1 / 7)

    def test_macro_can_exclude_zero_support_classes(self):
        y = [JOY] * 10
        cm = confusion(y, y)
        per_class = [class_prf(cm, k) for k in range(7)]
        agg = aggregate(per_class, cm, macro_includes_zero_support=False)
        assert agg["macro"]["f1"] == pytest.approx(1.0)

    def test_uniform_random_accuracy_near_one_seventh(self):
        rng = np.random.default_rng(123)
        n = 10000
        y_true = rng.integers(0, 7, n)
        y_pred = rng.integers(0, 7, n)
        report = report_from_predictions(y_true, y_pred)
        assert report.accuracy == pytest.approx(1 / 7, abs=0.02)


class TestBruteForceOracle:
    def test_exact_match_on_100_random_vectors(self):
        rng = np.random.default_rng(0)
        for trial in range(100):
            n = int(rng.integers(1, 60))
            y_true = rng.integers(0, 7, n)
            y_pred = rng.integers(0, 7, n)
            report = report_from_predictions(y_true, y_pred)
            ref_pc, ref_macro, ref_weighted, ref_acc = prf_reference(
                list(y_true), list(y_pred), 7
            )
            assert report.accuracy == ref_acc
            for k, name in enumerate(report.label_names):
                for key in ("precision", "recall", "f1", "support"):
                    assert report.per_class[name][key] == ref_pc[k][key]
            for key in ("precision", "recall", "f1"):
                assert report.macro[key] == ref_macro[key]
                assert report.weighted[key] == ref_weighted[key]

    def test_weighted_recall_equals_accuracy(self):
        rng = np.random.default_rng(1)
        for trial in range(25):
            n = int(rng.integers(5, 200))
            y_true = rng.integers(0, 7, n)
            y_pred = rng.integers(0, 7, n)
            report = report_from_predictions(y_true, y_pred)
            assert abs(report.weighted["recall"] - report.accuracy) <= 1e-12

    @settings(max_examples=50, deadline=None)
    @given(st.lists(st.tuples(st.integers(0, 6), st.integers(0, 6)), min_size=1, max_size=40))
    def test_all_values_in_unit_interval(self, pairs):
        y_true = [t for t, _ in pairs]
        y_pred = [p for _, p in pairs]
        report = report_from_predictions(y_true, y_pred)
        values = [report.accuracy]
        values += [report.macro[k] for k in ("precision", "recall", "f1")]
        values += [report.weighted[k] for k in ("precision", "recall", "f1")]
        for pc in report.per_class.values():
            values += [pc["precision"], pc["recall"], pc["f1"]]
        assert all(0.0 <= v <= 1.0 for v in values)
        assert sum(pc["support"] for pc in report.per_class.values()) == len(pairs)


class _ConstantModel:
    def __init__(self, label, k=7):
        self.label = label
        self.k = k

    def predict(self, X):
        return np.full(X.shape[0], self.label)


class TestEvaluate:
    def test_constant_model_on_its_class(self):
        X = np.zeros((5, 2))
        y = np.full(5, JOY)
        report = evaluate(_ConstantModel(JOY), X, y, "const", "test")
        assert report.accuracy == 1.0
        assert report.macro["f1"] == pytest.approx(1 / 7)
        assert report.model_name == "const" and report.split_name == "test"

    def test_dimension_mismatch(self):
        with pytest.raises(MetricsError):
            evaluate(_ConstantModel(0), np.zeros((3, 2)), np.zeros(4, dtype=int))


class TestCompare:
    def _report(self, name, acc_pairs):
        y_true, y_pred = acc_pairs
        return report_from_predictions(y_true, y_pred, model_name=name, split_name="test")

    def test_single_report(self):
        table = compare([self._report("m", ([0, 1], [0, 1]))])
        assert len(table["rows"]) == 1

    def test_sorted_by_accuracy_desc(self):
        good = self._report("good", ([0, 1, 2], [0, 1, 2]))
        bad = self._report("bad", ([0, 1, 2], [1, 1, 2]))
        table = compare([bad, good])
        assert [r["model"] for r in table["rows"]] == ["good", "bad"]

    def test_tie_broken_by_name(self):
        a = self._report("beta", ([0], [0]))
        b = self._report("alpha", ([1], [1]))
        table = compare([a, b])
        assert [r["model"] for r in table["rows"]] == ["alpha", "beta"]

    def test_csv_header_fixed(self):
        table = compare([self._report("m", ([0], [0]))])
        lines = comparison_csv(table).splitlines()
        assert lines[0] == "model,accuracy,precision,recall,f1"
        assert len(lines) == 2

    def test_text_has_paper_table_columns(self):
        table = compare([self._report("m", ([0], [0]))])
        header = comparison_text(table).splitlines()[0]
        for column in ("model", "accuracy", "precision", "recall", "f1"):
            assert column in header
