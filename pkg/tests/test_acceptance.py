"""Acceptance criteria, one test each; every test prints a PASS/FAIL line."""
import math
import os
import random
import subprocess
import sys
import time
from contextlib import contextmanager
from pathlib import Path

import pytest

from curvetop.fixtures import (
    REFERENCE_COMMUTING, REFERENCE_MATRIX, REFERENCE_RELATIONS, reference_graph)
from curvetop.graph import classify, validate
from curvetop.lattice import (
    determinant, intersection_matrix, is_negative_definite, multiplicity_vector, tridiagonal)
from curvetop.mcg import (
    TwistParam, compare_endos, dehn_twist_endo, generator_catalogue, inner_automorphism,
    twist_word)
from curvetop.meridian import (
    OracleError, brute_force_chain, chain_coefficients, chain_meridians, det, hj_chain,
    satisfies_chain_conditions)
from curvetop.pi1 import abelianization, check_relations_abelian, presentation
from curvetop.random_curves import random_curve
from curvetop.resolution import parse_branches, resolve

DATA = Path(__file__).resolve().parent.parent / "data"


@pytest.fixture
def criterion(request):
    reporter = request.config.pluginmanager.getplugin("terminalreporter")

    @contextmanager
    def run(number, title, budget=None):
        start = time.perf_counter()
        detail = ""
        try:
            yield
            elapsed = time.perf_counter() - start
            detail = f"{elapsed:.2f}s"
            if budget is not None:
                detail += f" (budget {budget:g}s)"
                assert elapsed < budget, f"took {elapsed:.2f}s, budget {budget}s"
        except BaseException as exc:
            reporter.write_line(f"FAIL criterion {number}: {title} -- {exc!r}")
            raise
        reporter.write_line(f"PASS criterion {number}: {title} [{detail}]")

    return run


def test_criterion_1_reference_regression(criterion):
    with criterion(1, "reference curve regression", budget=1.0):
        ee = [list(r) for r in REFERENCE_MATRIX]
        assert determinant(ee) == -1
        assert is_negative_definite(ee)

        g = reference_graph()
        cls = classify(g)
        assert cls.rupture == ("E3", "E5")
        assert [(d.tail, d.attach) for d in cls.dead_branches] == [
            (("E1",), "E3"), (("E2",), "E3"), (("E4",), "E5")]
        assert [(c.end0, c.end1, c.length) for c in cls.chains] == [("E3", "E5", 0)]

        assert multiplicity_vector(g).total == (4, 6, 12, 13, 26)

        pres = presentation(g)
        got = set()
        for rel in pres.product_relators():
            lhs, rhs = pres.normalized(rel)
            got.add(frozenset((lhs.syllables, rhs.syllables)))
        assert got == {frozenset((l, r)) for l, r in REFERENCE_RELATIONS}
        assert {frozenset(r.edge) for r in pres.commutator_relators()} == {
            frozenset(p) for p in REFERENCE_COMMUTING}

        h1 = abelianization(pres, g)
        assert h1.rank == 1 and h1.torsion == ()

        cat = generator_catalogue(g)
        assert len(cat.artin) == 2 and all(b.effectively_trivial for b in cat.artin)
        assert len(cat.twists) == 1

        endo = dehn_twist_endo(g, pres, TwistParam("C1", 2, 3))
        inner = inner_automorphism(pres, twist_word(pres, ("E3", "E5"), 2, 3))
        verdicts = compare_endos(endo, inner, pres, summary=h1)
        assert {x for x, v in verdicts.items() if v == "equal_syntactic"} == {
            "c1", "c2", "b2", "d"}
        assert {x for x, v in verdicts.items() if v == "equal_abelianized"} == {"a1", "b1"}


@pytest.mark.parametrize("name, self_ints, nu", [
    ("cusp", [-3, -2, -1], (2, 3, 6)),
    ("tacnode", [-2, -1], (2, 4)),
    ("smooth", [-1], (1,)),
])
def test_criterion_2_resolution_pipeline(criterion, name, self_ints, nu):
    doc = (DATA / f"{name}.json").read_text()
    with criterion(2, f"resolution of the {name}", budget=1.0):
        g = resolve(parse_branches(doc))
        assert [g.self_intersection(e) for e in g.exceptional_ids()] == self_ints
        assert multiplicity_vector(g).total == nu


def test_criterion_3_chain_calculus(criterion):
    rng = random.Random(20261016)
    cases = 10_000
    with criterion(3, f"chain calculus on {cases} random e-vectors", budget=10.0):
        for _ in range(cases):
            e = [rng.randint(-9, -2) for _ in range(rng.randint(0, 8))]
            c = chain_meridians(e).vectors
            for j in range(len(c) - 1):
                assert det(c[j], c[j + 1]) == 1
            for j in range(1, len(c) - 1):
                assert det(c[j - 1], c[j + 1]) == -e[j - 1]
            expected = abs(determinant(tridiagonal(e))) if e else 1
            assert chain_coefficients(e).abs_a == expected


def test_criterion_4_hj_chains_against_oracle(criterion):
    box = range(-12, 13)
    vectors = [(x, y) for x in box for y in box if math.gcd(x, y) == 1]
    with criterion(4, "HJ chains agree with exhaustive search", budget=30.0):
        compared = inconclusive = 0
        for a in vectors:
            for b in vectors:
                if not 0 < det(a, b) <= 30:
                    continue
                chain = hj_chain(a, b)
                assert satisfies_chain_conditions(chain), (a, b, chain)
                try:
                    oracle = brute_force_chain(a, b)
                except OracleError:
                    inconclusive += 1
                    continue
                assert oracle == chain, (a, b)
                compared += 1
        assert compared > 20_000 and inconclusive == 0


def test_criterion_5_random_resolved_curves(criterion):
    rng = random.Random(5)
    count = 500
    with criterion(5, f"graph invariants on {count} random curves"):
        for _ in range(count):
            branches = random_curve(rng, max_branches=4, max_denominator=5, max_terms=3)
            g = resolve(branches)
            report = validate(g)
            assert report.ok, report.violations
            ee = intersection_matrix(g).ee_list()
            assert abs(determinant(ee)) == 1
            assert is_negative_definite(ee)
            pres = presentation(g)
            h1 = abelianization(pres, g)
            assert h1.rank == len(branches)
            assert check_relations_abelian(pres, h1)


CLI_CASES = [
    ["resolve", "-i", "cusp.json"],
    ["resolve", "-i", "tacnode.json", "--format", "dot"],
    ["classify", "-i", "reference_graph.json"],
    ["jsj", "-i", "reference_graph.json"],
    ["matrix", "-i", "reference_graph.json", "--format", "json"],
    ["mult", "-i", "cusp.json"],
    ["pi1", "-i", "reference_graph.json"],
    ["h1", "-i", "reference_graph.json", "--format", "json"],
    ["meridians", "-i", "reference_graph.json", "--chain", "C1"],
    ["hj", "--from", "3,-2", "--to", "1,5"],
    ["seifert", "-i", "reference_graph.json"],
    ["mcg", "-i", "reference_graph.json", "--format", "json"],
    ["twist", "-i", "reference_graph.json", "--chain", "C1", "-p", "2", "-q", "3",
     "--compare-inner"],
    ["autos", "-i", "tacnode.json", "--format", "json"],
    ["verify-example"],
    ["selftest", "--seed", "11", "--count", "25"],
]


def test_criterion_6_cli_determinism(criterion):
    with criterion(6, f"{len(CLI_CASES)} CLI invocations byte-identical across runs"):
        for argv in CLI_CASES:
            outputs = []
            for hash_seed in ("1", "2"):
                env = dict(os.environ, PYTHONHASHSEED=hash_seed)
                proc = subprocess.run([sys.executable, "-m", "curvetop", *argv],
                                      cwd=DATA, env=env, capture_output=True, check=True)
                outputs.append(proc.stdout)
            assert outputs[0] == outputs[1], argv
            assert outputs[0], argv
