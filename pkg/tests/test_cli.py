import csv
import io
import os
import sys
import tempfile
import unittest
from contextlib import redirect_stderr, redirect_stdout
from pathlib import Path
from unittest.mock import patch

ENGINE_SRC = Path(__file__).resolve().parents[1] / "src"
sys.path.insert(0, str(ENGINE_SRC))

from crpq_engine import config as engine_config
from crpq_engine.cli import EXIT_CYCLIC, EXIT_GUARD, EXIT_OK, EXIT_PARSE, main

Q2 = "free: Y1 Y2 Y3\natom: X a Y1\natom: X b Y2\natom: X c Y3\n"
CYCLIC = "free: X Y\natom: X a Y\natom: Y b X\n"


@patch('crpq_engine.config.load_dotenv')
class CliTests(unittest.TestCase):
    def setUp(self):
        self._original_env = os.environ.copy()
        for name in list(os.environ):
            if name.startswith("CRPQ_"):
                del os.environ[name]
        engine_config._config = None
        self._tmp = tempfile.TemporaryDirectory()
        self.tmp = Path(self._tmp.name)

    def tearDown(self):
        os.environ.clear()
        os.environ.update(self._original_env)
        engine_config._config = None
        self._tmp.cleanup()

    def run_cli(self, *argv):
        stdout, stderr = io.StringIO(), io.StringIO()
        with redirect_stdout(stdout), redirect_stderr(stderr):
            code = main([str(a) for a in argv])
        return code, stdout.getvalue(), stderr.getvalue()

    def write(self, name, text):
        path = self.tmp / name
        path.write_text(text, encoding='utf-8')
        return path

    def gen_star(self, n):
        graph = self.tmp / "star.tsv"
        code, _, _ = self.run_cli("gen", "--family", "star", "--n", n, "--out", graph)
        self.assertEqual(code, EXIT_OK)
        return graph, graph.with_suffix('.crpq')

    def test_gen_and_eval_star(self, mock_load_dotenv):
        graph, query = self.gen_star(3)
        self.assertTrue(query.exists())
        code, out, err = self.run_cli("eval", graph, query)
        self.assertEqual(code, EXIT_OK)
        self.assertEqual(out, "u_0\tz_1\tz_2\n")
        self.assertIn("1 rows", err)
        self.assertIn("engine=optimal", err)

    def test_engines_agree(self, mock_load_dotenv):
        graph, query = self.gen_star(5)
        outputs = {engine: self.run_cli("eval", graph, query, "--engine", engine)[1]
                   for engine in ("optimal", "baseline", "oracle")}
        self.assertEqual(len(set(outputs.values())), 1)

    def test_eval_to_file(self, mock_load_dotenv):
        graph, query = self.gen_star(2)
        result = self.tmp / "answer.tsv"
        code, out, _ = self.run_cli("eval", graph, query, "--out", result, "--parallel")
        self.assertEqual(code, EXIT_OK)
        self.assertEqual(out, "")
        self.assertEqual(result.read_text(encoding='utf-8'), "u_0\tz_1\tz_2\n")

    def test_eval_compact_query(self, mock_load_dotenv):
        graph, _ = self.gen_star(2)
        query = self.write("compact.crpq", "free: X1 X2 X3\natom: X1 a*aa X\natom: X2 b X\natom: X3 c X\n")
        code, out, _ = self.run_cli("eval", graph, query, "--compact")
        self.assertEqual(code, EXIT_OK)
        self.assertEqual(out, "u_0\tz_1\tz_2\n")

    def test_eval_cyclic(self, mock_load_dotenv):
        graph, _ = self.gen_star(2)
        code, _, err = self.run_cli("eval", graph, self.write("cyclic.crpq", CYCLIC))
        self.assertEqual(code, EXIT_CYCLIC)
        self.assertIn("cyclic query", err)

    def test_oracle_row_guard(self, mock_load_dotenv):
        os.environ["CRPQ_ORACLE_ROW_LIMIT"] = "10"
        graph, query = self.gen_star(10)
        code, _, err = self.run_cli("eval", graph, query, "--engine", "oracle")
        self.assertEqual(code, EXIT_GUARD)
        self.assertIn("resource guard", err)

    def test_bad_query(self, mock_load_dotenv):
        graph, _ = self.gen_star(2)
        code, _, err = self.run_cli("eval", graph, self.write("bad.crpq", "free: X\natom: X 'a |' Y\n"))
        self.assertEqual(code, EXIT_PARSE)
        self.assertIn("line 2", err)

    def test_bad_graph(self, mock_load_dotenv):
        graph = self.write("bad.tsv", "u\ta\n")
        code, _, err = self.run_cli("eval", graph, self.write("q.crpq", Q2))
        self.assertEqual(code, EXIT_PARSE)
        self.assertIn("error", err)

    def test_missing_graph_file(self, mock_load_dotenv):
        code, _, _ = self.run_cli("eval", self.tmp / "missing.tsv", self.write("q.crpq", Q2))
        self.assertEqual(code, EXIT_PARSE)

    def test_analyze(self, mock_load_dotenv):
        code, out, _ = self.run_cli("analyze", self.write("q.crpq", Q2))
        self.assertEqual(code, EXIT_OK)
        self.assertIn("acyclic:     yes", out)
        self.assertIn("fn-fhtw:     3", out)

    def test_analyze_machine(self, mock_load_dotenv):
        code, out, _ = self.run_cli("analyze", self.write("q.crpq", Q2), "--machine")
        self.assertEqual(code, EXIT_OK)
        self.assertTrue(out.startswith("acyclic=1 fn_fhtw=3 "))

    def test_analyze_predicted_cost(self, mock_load_dotenv):
        query = self.write("q.crpq", Q2)
        code, out, _ = self.run_cli("analyze", query, "--graph-size", 100, "--output-size", 8)
        self.assertEqual(code, EXIT_OK)
        self.assertIn("cost:        508  (N=100, OUT=8)", out)
        code, out, _ = self.run_cli("analyze", query, "--machine", "--graph-size", 100, "--output-size", 8)
        self.assertTrue(out.strip().endswith(" predicted_cost=508"))
        _, out, _ = self.run_cli("analyze", query, "--machine")
        self.assertNotIn("predicted_cost", out)

    def test_analyze_cyclic(self, mock_load_dotenv):
        code, out, _ = self.run_cli("analyze", self.write("c.crpq", CYCLIC), "--machine")
        self.assertEqual(code, EXIT_CYCLIC)
        self.assertEqual(out.strip(), "acyclic=0 reason=parallel")

    def test_gen_random_is_reproducible(self, mock_load_dotenv):
        first, second = self.tmp / "r1.tsv", self.tmp / "r2.tsv"
        for path in (first, second):
            code, _, _ = self.run_cli("gen", "--family", "random", "--n", 20, "--seed", 4, "--out", path)
            self.assertEqual(code, EXIT_OK)
        self.assertEqual(first.read_text(encoding='utf-8'), second.read_text(encoding='utf-8'))
        self.assertFalse(first.with_suffix('.crpq').exists())

    def test_bench_csv(self, mock_load_dotenv):
        out = self.tmp / "bench.csv"
        code, _, _ = self.run_cli("bench", "--n", "4,8", "--engines", "optimal", "--reps", 1, "--out", out)
        self.assertEqual(code, EXIT_OK)
        with open(out, encoding='utf-8', newline='') as stream:
            rows = list(csv.reader(stream))
        self.assertEqual(rows[0], ['n', 'engine', 'rep', 'wall_ns', 'N', 'OUT', 'OUT_a', 'rounds'])
        self.assertEqual([(r[0], r[1], r[5], r[6]) for r in rows[1:]], [('4', 'optimal', '1', ''), ('8', 'optimal', '1', '')])

    def test_bench_bad_sizes(self, mock_load_dotenv):
        code, _, _ = self.run_cli("bench", "--n", "2^5..2^3", "--engines", "optimal")
        self.assertEqual(code, EXIT_PARSE)

    def test_invalid_configuration(self, mock_load_dotenv):
        os.environ["CRPQ_LOG_LEVEL"] = "chatty"
        code, _, err = self.run_cli("analyze", self.write("q.crpq", Q2))
        self.assertEqual(code, EXIT_PARSE)
        self.assertIn("configuration error", err)


if __name__ == '__main__':
    unittest.main()
