import csv
import io
import json

import pytest

from modalip import parse, size_dag, size_string
from modalip.bench import BenchRow, chi_hat, lower_bound_family, rows_to_csv, rows_to_json, run_bench
from modalip.errors import PreconditionError
from modalip.verify import check_craig, is_valid_implication


class TestFamily:
    def test_n1_shapes(self):
        phi, psi, chi = lower_bound_family(1)
        assert phi is parse("<>s & ((p1 -> [](s -> p1)) & (~p1 -> [](s -> ~p1)))")
        assert chi is parse("~p1 & <>~p1 | p1 & <>p1")
        assert is_valid_implication(phi, psi)
        assert check_craig(chi, phi, psi).ok

    def test_rejects_zero(self):
        with pytest.raises(PreconditionError):
            lower_bound_family(0)

    def test_inputs_grow_linearly_target_exponentially(self):
        sizes = [lower_bound_family(n) for n in range(1, 7)]
        phi_sizes = [size_string(t[0]) for t in sizes]
        psi_sizes = [size_string(t[1]) for t in sizes]
        for seq in (phi_sizes, psi_sizes):
            steps = {b - a for a, b in zip(seq, seq[1:])}
            assert len(steps) == 1
        for n, (_, _, chi) in enumerate(sizes, start=1):
            assert size_dag(chi) >= 2 ** n

    def test_nested_noncontingency_sizes(self):
        for n in range(7):
            assert size_string(chi_hat(n)) == 14 * 2 ** n - 6
        dags = [size_dag(chi_hat(n)) for n in range(7)]
        assert all(b - a == 4 for a, b in zip(dags, dags[1:]))


class TestRunBench:
    def test_n1_all_methods(self):
        rows = run_bench(1)
        assert [r.method for r in rows] == ["quasimodel", "nabla", "automata", "sequent"]
        for r in rows:
            assert r.verified and r.equivalent_to_target
            assert r.size_dag >= 2

    def test_n2_nabla(self):
        (row,) = run_bench(2, ["nabla"], n_min=2)
        assert row.verified and row.size_dag >= 4

    def test_empty_and_unknown(self):
        assert run_bench(2, []) == []
        with pytest.raises(PreconditionError):
            run_bench(1, ["magic"])

    def test_timeout_is_recorded(self):
        (row,) = run_bench(3, ["sequent"], n_min=3, timeout_ms=1)
        assert not row.verified and row.error

    def test_parallel_rows(self):
        rows = run_bench(1, ["quasimodel", "nabla"], jobs=2)
        assert all(r.verified for r in rows)

    def test_exports(self):
        rows = [BenchRow(1, "nabla", 10, 5, 1.25, True)]
        table = list(csv.reader(io.StringIO(rows_to_csv(rows))))
        assert table[0] == ["n", "method", "size_string", "size_dag", "millis", "verified"]
        assert table[1] == ["1", "nabla", "10", "5", "1.2", "True"]
        assert json.loads(rows_to_json(rows))[0]["size_dag"] == 5
