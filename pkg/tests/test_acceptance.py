"""End-to-end acceptance checks, one test per published claim.

Each test prints a single "criterion NN ...: PASS/FAIL" line (visible
with `pytest -s` or in the captured output), and `pytest -v` likewise
shows one line per criterion.
"""

import functools
import itertools
import random
import time
from fractions import Fraction

from conftest import model_path
from pqnet.dsl import load_model, parse_model, parse_statements, serialize
from pqnet.formula import (
    eval_formula,
    parse_formula,
    to_f2_polynomial,
    to_real_polynomial,
)
from pqnet.inference import expectation, full_joint, query
from pqnet.network import Constraint, Parameter
from pqnet.optimize import build_program, solve
from pqnet.polynomial import (
    F2Polynomial,
    Polynomial,
    reset_registry,
    var_name,
)
from pqnet.search import (
    IsZero,
    SearchSpec,
    enumerate_spec,
    filter_rows,
    instantiate_model,
)


def criterion(number, title):
    def decorate(fn):
        @functools.wraps(fn)
        def wrapper(*args, **kwargs):
            try:
                fn(*args, **kwargs)
            except BaseException:
                print(f"criterion {number:02d} ({title}): FAIL")
                raise
            print(f"criterion {number:02d} ({title}): PASS")

        return wrapper

    return decorate


def basic1():
    return load_model(model_path("basic1.pql"))


@criterion(1, "symbolic inference")
def test_criterion_01_symbolic_inference():
    model = basic1()
    assert [str(v) for v in query(model, ["R"]).values] == [
        "1 - x + x*y",
        "x - x*y",
    ]
    assert [str(v) for v in query(model, ["Q"], ["P"]).values] == [
        "(x*y) / (x)",
        "(x - x*y) / (x)",
        "(z - x*z) / (1 - x)",
        "(1 - x - z + x*z) / (1 - x)",
    ]
    joint = full_joint(model)
    nonzero = {
        i: str(v) for i, v in enumerate(joint.values, start=1) if not v.is_zero()
    }
    assert len(joint) == 128
    assert nonzero == {
        13: "x*y",
        55: "x - x*y",
        74: "z - x*z",
        103: "1 - x - z + x*z",
    }


@criterion(2, "unless-form display")
def test_criterion_02_unless_display():
    table = query(basic1(), ["Q"], ["P", "R"])
    lines = table.format(index=True, show_all=True, unless=True).splitlines()
    assert lines[2:] == [
        "1\t| T\tT\tT\t| 1 unless x*y = 0\t",
        "2\t| T\tT\tF\t| 0 unless x*y = 0\t",
        "3\t| T\tF\tT\t| 0 unless x*y = x\t",
        "4\t| T\tF\tF\t| 1 unless x*y = x\t",
        "5\t| F\tT\tT\t| z unless x = 1\t",
        "6\t| F\tT\tF\t| (1 - x - z + x*z) / (1 - x)\t",
        "7\t| F\tF\tT\t| 0/0\t",
        "8\t| F\tF\tF\t| 0/0\t",
    ]


@criterion(3, "exact algebra")
def test_criterion_03_algebra():
    model = basic1()
    pr_r = query(model, ["R"]).values[0]
    pr_q_given_p = query(model, ["Q"], ["P"]).values[0]
    difference = pr_r - pr_q_given_p
    assert str(difference) == "(x - x^2 - x*y + x^2*y) / (x)"
    x = Polynomial.variable("x")
    y = Polynomial.variable("y")
    z = Polynomial.variable("z")
    assert expectation(model, "B") == 1 + z + 2 * x * y - x * z


@criterion(4, "polynomial optimization")
def test_criterion_04_polynomial_optimization():
    model = basic1()
    objective = expectation(model, "B")
    x = Polynomial.variable("x")
    y = Polynomial.variable("y")
    bound = Constraint(
        Polynomial.constant(Fraction(1, 4)) + x * y, "<=", x
    )
    for sense, optimum in (("min", Fraction(1)), ("max", Fraction(5, 2))):
        start = time.monotonic()
        solution = solve(build_program(model, sense, objective, [bound]))
        elapsed = time.monotonic() - start
        assert solution.lower <= optimum <= solution.upper
        assert solution.upper - solution.lower <= Fraction(1, 100)
        assert elapsed <= 10


@criterion(5, "combinatorial search")
def test_criterion_05_search():
    source = open(model_path("basic1.pql")).read().replace(
        'probability ( R | P Q ) { function = "R <-> P -> Q ? 1 : 0"; }',
        "probability ( R | P Q ) { parametric(t); }",
    )
    model = parse_model(source, name="basic1-star")
    table = query(model, ["B"])
    labels = [s.label for s in model.variables["B"].states]
    targets = dict(zip(labels, table.values))
    spec = SearchSpec(
        [(f"t{i}", [Fraction(0), Fraction(1)]) for i in range(1, 5)],
        targets,
        model.constraints(),
    )
    rows = enumerate_spec(spec)
    matching = filter_rows(rows, IsZero("0") & IsZero("2"))
    assert matching == [10]
    assignment = rows.assignment(10)
    assert assignment == {"t1": 1, "t2": 0, "t3": 0, "t4": 1}
    instantiated = instantiate_model(model, assignment)
    assert [str(v) for v in query(instantiated, ["B"]).values] == [
        "0",
        "1 - x*y",
        "0",
        "x*y",
    ]


@criterion(6, "modus ponens, both moods")
def test_criterion_06_modus_ponens():
    model = basic1()
    # subjunctive: condition inside the query
    table = query(model, ["Q"], ["P", "R"])
    assert (
        table.format(index=True, unless=True).splitlines()[2]
        == "1\t| T\tT\tT\t| 1 unless x*y = 0\t"
    )
    # imperative: condition as optimization constraints
    x = Polynomial.variable("x")
    y = Polynomial.variable("y")
    objective = query(model, ["Q"]).values[0]
    constraints = [
        Constraint(x, "=", Polynomial.constant(1)),
        Constraint(x, "=", x * y),
    ]
    solution = solve(build_program(model, "min", objective, constraints))
    assert solution.upper == 1
    assert solution.lower <= 1 <= solution.upper + Fraction(1, 100)
    assert solution.point["y"] == 1
    assert all(
        c.satisfied(solution.point)
        for c in build_program(model, "min", objective, constraints).constraints
    )


@criterion(7, "ace and king")
def test_criterion_07_ace_king():
    # propositional simplification over the binary field
    env = {"K": F2Polynomial.variable("K"), "A": F2Polynomial.variable("A")}
    simplified = to_f2_polynomial(parse_formula("(K <-> A) <-> K"), env)
    assert simplified == env["A"]
    # subjunctive: fractional objective
    reset_registry()
    model = load_model(model_path("ace-king.pql"))
    difference = (
        query(model, ["A"], ["P"]).values[0]
        - query(model, ["K"], ["P"]).values[0]
    )
    assert str(difference) == "(x2) / (x1 + x2)"
    low = solve(build_program(model, "min", difference))
    high = solve(build_program(model, "max", difference))
    assert low.exact_value() == 0
    assert high.exact_value() == 1
    # indicative: plain linear objective with the condition as constraint
    x1 = Polynomial.variable("x1")
    x2 = Polynomial.variable("x2")
    x3 = Polynomial.variable("x3")
    condition = [Constraint(x1 + x2, "=", Polynomial.constant(1))]
    low = solve(build_program(model, "min", x2 - x3, condition))
    high = solve(build_program(model, "max", x2 - x3, condition))
    assert low.exact_value() == 0
    assert high.exact_value() == 1


@criterion(8, "maximal consistency")
def test_criterion_08_maximal_consistency():
    model = load_model(model_path("amphibian.pql"))
    table = query(model, ["S_1", "S_2", "S_3"])
    zero_labels = [
        label
        for label, value in zip(table.row_labels(), table.values)
        if value.is_zero()
    ]
    assert zero_labels == [("T", "T", "T"), ("T", "F", "F")]
    # eta: max threshold attainable by S1, S2, S3 simultaneously
    model.add_parameter(Parameter("threshold"))
    threshold = Polynomial.variable("threshold")
    aims = [
        Constraint(query(model, [name]).values[0], ">=", threshold)
        for name in ("S_1", "S_2", "S_3")
    ]
    eta = solve(build_program(model, "max", threshold, aims)).exact_value()
    assert eta == Fraction(2, 3)
    # zeta: max probability of each query formula once the set holds eta
    floor = [
        Constraint(
            query(model, [name]).values[0], ">=", Polynomial.constant(eta)
        )
        for name in ("S_1", "S_2", "S_3")
    ]
    zeta = [
        solve(
            build_program(model, "max", query(model, [name]).values[0], floor)
        ).exact_value()
        for name in ("S_4", "S_5", "S_6", "S_7", "S_8")
    ]
    assert zeta == [
        Fraction(2, 3),
        Fraction(1),
        Fraction(2, 3),
        Fraction(1, 3),
        Fraction(0),
    ]


@criterion(9, "counterfactual implications")
def test_criterion_09_goodman():
    model = load_model(model_path("butter.pql"))
    x = Polynomial.variable("x")
    y = Polynomial.variable("y")
    pr_c1 = query(model, ["C_1"]).values[0]
    pr_c2 = query(model, ["C_2"]).values[0]
    assert pr_c1 == 1 - x + x * y
    assert pr_c2 == 1 - x * y
    joint = query(model, ["H", "C_1", "C_2"])
    cells = dict(zip(joint.row_labels(), joint.values))
    assert cells[("T", "T", "T")].is_zero()
    # the two implication probabilities coincide exactly when
    # x * (2y - 1) = 0, i.e. x = 0 or y = 1/2
    assert pr_c1 - pr_c2 == x * (2 * y - 1)
    for point in ({"x": 0, "y": Fraction(3, 4)}, {"x": Fraction(1, 2), "y": Fraction(1, 2)}):
        assert pr_c1.evaluate(point) == pr_c2.evaluate(point)
    assert pr_c1.evaluate({"x": 1, "y": 1}) != pr_c2.evaluate({"x": 1, "y": 1})


@criterion(10, "knights and knaves")
def test_criterion_10_knights():
    model = load_model(model_path("knight2.pql"))
    table = query(model, ["A", "B"], ["R"])
    # under R=F only (A=F, B=T) has a nonzero numerator
    assert [str(v) for v in table.values[4:]] == [
        "(0) / (x3)",
        "(0) / (x3)",
        "(x3) / (x3)",
        "(0) / (x3)",
    ]


@criterion(11, "zombie interrogation")
def test_criterion_11_zombies():
    model = load_model(model_path("zombie1.pql"))
    table = query(model, ["R", "H"])
    assert [str(v) for v in table.values] == [
        "x2 + t1*x1 - t2*x2",
        "x3 - t3*x3 + t4*x4",
        "x1 - t1*x1 + t2*x2",
        "x4 + t3*x3 - t4*x4",
    ]
    targets = dict(zip(["TT", "TF", "FT", "FF"], table.values))
    spec = SearchSpec(
        [(f"t{i}", [Fraction(0), Fraction(1)]) for i in range(1, 5)],
        targets,
        model.constraints(),
    )
    rows = enumerate_spec(spec)
    settles = (IsZero("TF") & IsZero("FT")) | (IsZero("TT") & IsZero("FF"))
    assert filter_rows(rows, settles) == [6, 11]
    assert rows.assignment(6) == {"t1": 0, "t2": 1, "t3": 0, "t4": 1}
    assert rows.assignment(11) == {"t1": 1, "t2": 0, "t3": 1, "t4": 0}
    instantiated = instantiate_model(model, rows.assignment(11))
    assert [str(v) for v in query(instantiated, ["R", "H"]).values] == [
        "x1 + x2",
        "0",
        "0",
        "x3 + x4",
    ]


@criterion(12, "property suites")
def test_criterion_12_properties():
    rng = random.Random(2026)
    filenames = [
        "basic1.pql",
        "butter.pql",
        "zombie1.pql",
        "knight2.pql",
        "ace-king.pql",
    ]
    for filename in filenames:
        reset_registry()
        model = load_model(model_path(filename))
        variables = model.variable_order()
        checked = 0
        attempts = 0
        while checked < 25 and attempts < 2000:
            attempts += 1
            point = {}
            for name, param in model.parameters.items():
                point[name] = Fraction(rng.randint(0, 16), 16)
            for table in model.tables:
                if table.joint:
                    names = [sorted(c.variables())[0] for c in table.entries]
                    weights = [Fraction(rng.randint(1, 9)) for _ in names]
                    total = sum(weights)
                    for cell, w in zip(names, weights):
                        point[cell] = w / total
            if not all(c.satisfied(point) for c in model.constraints()):
                continue
            checked += 1
            # (a) symbolic-vs-numeric equivalence on a random marginal
            keep = rng.randint(1, len(variables))
            principal = [v.name for v in variables[:keep]]
            symbolic = query(model, principal)
            numeric = {}
            for combo in itertools.product(
                *(range(v.arity()) for v in variables)
            ):
                assignment = dict(
                    zip((v.name for v in variables), combo)
                )
                weight = Fraction(1)
                for table in model.tables:
                    weight *= table.entry(assignment).evaluate(point)
                numeric[combo[:keep]] = numeric.get(combo[:keep], Fraction(0)) + weight
            combos = itertools.product(
                *(range(v.arity()) for v in variables[:keep])
            )
            for combo, value in zip(combos, symbolic.values):
                assert value.evaluate(point) == numeric[combo]
            # (b) normalization of unconditional queries
            assert (
                sum((v.evaluate(point) for v in symbolic.values), Fraction(0))
                == 1
            )
        assert checked == 25, f"{filename}: only {checked} feasible points"
    # (c) translation correctness for all 16 binary Boolean functions
    reset_registry()
    minterm_texts = ["P && Q", "P && !Q", "!P && Q", "!P && !Q"]
    env_r = {"P": Polynomial.variable("p"), "Q": Polynomial.variable("q")}
    env_f2 = {
        "P": F2Polynomial.variable("P"),
        "Q": F2Polynomial.variable("Q"),
    }
    for truth in itertools.product((0, 1), repeat=4):
        terms = [t for t, bit in zip(minterm_texts, truth) if bit]
        text = " || ".join(terms) if terms else "0"
        node = parse_formula(text)
        real = to_real_polynomial(node, env_r)
        binary = to_f2_polynomial(node, env_f2)
        for (p, q), expected in zip(
            [(1, 1), (1, 0), (0, 1), (0, 0)], truth
        ):
            assert real.evaluate({"p": p, "q": q}) == expected
            assert eval_formula(node, {"P": p, "Q": q}) == expected
            total = 0
            for monomial in binary.terms:
                product = 1
                for index in monomial:
                    product *= {"P": p, "Q": q}[var_name(index)]
                total ^= product
            assert total == expected
    # (d) linear-form theorem on clique-prior models
    reset_registry()
    model = load_model(model_path("ace-king.pql"))
    for principal, conditioning in (
        (["A"], []),
        (["K"], []),
        (["A"], ["P"]),
        (["A", "K"], ["P"]),
    ):
        result = query(model, principal, conditioning)
        for value in result.values:
            if isinstance(value, Polynomial):
                assert value.total_degree() <= 1
            else:
                assert value.numerator.total_degree() <= 1
                assert value.denominator.total_degree() <= 1


@criterion(13, "corpus parsing and round-trip")
def test_criterion_13_parsing():
    filenames = [
        "ace-king.pql",
        "amphibian.pql",
        "basic1.pql",
        "butter.pql",
        "knight2.pql",
        "zombie1.pql",
        "zombie1-search.pql",
    ]
    for filename in filenames:
        reset_registry()
        model = load_model(model_path(filename))
        assert model.validate() == [], filename
        text = serialize(model)
        reset_registry()
        again = parse_model(text, name=model.name)
        assert again.validate() == [], filename
        assert list(again.variables) == list(model.variables), filename
        assert sorted(again.parameters) == sorted(model.parameters), filename
        for a, b in zip(model.tables, again.tables):
            assert [str(e) for e in a.entries] == [str(e) for e in b.entries]
