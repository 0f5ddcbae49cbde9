import random
import sys
import unittest
from pathlib import Path

sys.path.insert(0, str(Path(__file__).resolve().parent))

from helpers import (
    brute_force_answer, graph_from_edges, names_of, naive_rpq_pairs, random_graph, random_regex, random_regex_text,
)

from crpq_engine.baseline import baseline_eval, materialize_rpq, oracle_eval
from crpq_engine.errors import CyclicQueryError, ResourceGuardError
from crpq_engine.graph import gen_star_instance
from crpq_engine.query import STAR_QUERY, parse_query
from crpq_engine.regex import parse_regex

AB = ["a", "b"]
TRIANGLE = [("p", "a", "q"), ("q", "a", "r"), ("r", "a", "p")]


class MaterializeTests(unittest.TestCase):
    def test_single_edge(self):
        g = graph_from_edges([("u", "a", "v")])
        rpq = materialize_rpq(parse_regex("a"), g)
        self.assertEqual(names_of(g, rpq.relation.rows), {("u", "v")})
        self.assertEqual(rpq.relation.schema, ("X", "Y"))

    def test_star_on_cycle_is_complete(self):
        g = graph_from_edges(TRIANGLE)
        self.assertEqual(materialize_rpq(parse_regex("a*"), g).size, 9)

    def test_epsilon_is_identity(self):
        g = graph_from_edges(TRIANGLE)
        rows = materialize_rpq(parse_regex("<eps>"), g).relation.rows
        self.assertEqual(rows, {(v, v) for v in range(3)})

    def test_star_instance_is_quadratic(self):
        for n in (4, 16):
            size = materialize_rpq(parse_regex("a* a a"), gen_star_instance(n)).size
            self.assertGreaterEqual(size, n * n)

    def test_matches_naive_relation(self):
        rng = random.Random(51)
        for _ in range(40):
            g = random_graph(rng, max_vertices=12, max_edges=30, alphabet_size=3)
            regex = random_regex(rng, ["a", "b", "c"])
            self.assertEqual(set(materialize_rpq(regex, g).relation.rows), naive_rpq_pairs(regex, g))

    def test_row_limit(self):
        g = graph_from_edges(TRIANGLE)
        with self.assertRaises(ResourceGuardError):
            materialize_rpq(parse_regex("a*"), g, row_limit=4)


class OracleTests(unittest.TestCase):
    def test_accepts_cyclic_queries(self):
        g = graph_from_edges(TRIANGLE)
        q = parse_query("free: X Y Z\natom: X a Y\natom: Y a Z\natom: Z a X\n")
        self.assertEqual(len(oracle_eval(q, g)), 3)

    def test_self_loop_atom(self):
        g = graph_from_edges(TRIANGLE + [("s", "a", "p")])
        q = parse_query("free: X\natom: X 'a a a' X\n")
        self.assertEqual(names_of(g, oracle_eval(q, g).rows), {("p",), ("q",), ("r",)})

    def test_boolean(self):
        g = graph_from_edges([("u", "a", "v")])
        self.assertEqual(oracle_eval(parse_query("free:\natom: X a Y\n"), g).rows, frozenset({()}))
        self.assertEqual(len(oracle_eval(parse_query("free:\natom: X b Y\n"), g)), 0)

    def test_row_guard(self):
        g = gen_star_instance(30)
        with self.assertRaises(ResourceGuardError):
            oracle_eval(parse_query(STAR_QUERY), g, row_limit=100)

    def test_matches_brute_force_on_cyclic_queries(self):
        rng = random.Random(61)
        for _ in range(20):
            g = random_graph(rng, max_vertices=8, max_edges=20, alphabet_size=2)
            text = (f"free: X Z\natom: X '{random_regex_text(rng, AB)}' Y\n"
                    f"atom: Y '{random_regex_text(rng, AB)}' Z\natom: Z '{random_regex_text(rng, AB)}' X\n")
            q = parse_query(text)
            self.assertEqual(set(oracle_eval(q, g).rows), brute_force_answer(q, g))


class BaselineTests(unittest.TestCase):
    def test_star_query(self):
        g = gen_star_instance(20)
        report = baseline_eval(parse_query(STAR_QUERY), g)
        self.assertEqual(report.named_rows(g.names), [("u_0", "z_1", "z_2")])
        self.assertEqual(report.engine, 'baseline')
        self.assertGreaterEqual(report.out_a, 20 * 20)

    def test_rejects_cyclic(self):
        with self.assertRaises(CyclicQueryError):
            baseline_eval(parse_query("free: X\natom: X a X\n"), graph_from_edges(TRIANGLE))

    def test_agrees_with_oracle(self):
        rng = random.Random(71)
        for _ in range(30):
            g = random_graph(rng, max_vertices=10, max_edges=25, alphabet_size=3)
            text = "free: X Y\natom: X '{}' Z\natom: Z '{}' Y\natom: Z '{}' W\n".format(
                *(random_regex_text(rng, AB) for _ in range(3)))
            q = parse_query(text)
            self.assertEqual(baseline_eval(q, g).output, oracle_eval(q, g).rows)


if __name__ == '__main__':
    unittest.main()
