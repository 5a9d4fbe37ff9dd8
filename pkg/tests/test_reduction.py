import random
from fractions import Fraction as F

import pytest

from errors import (
    CountOutOfRange,
    InputError,
    InstanceTooLarge,
    InvalidParams,
    NotSymmetric,
    NotWidth2,
    OccurrenceBound,
    TooManyVariables,
)
from models.cnf import Cnf
from services.reduction import (
    constructive_policy_value,
    count_sat_bruteforce,
    digit_load,
    is_symmetric,
    reduction_instance,
    reduction_value,
    restricted_policy_search,
    symmetrize_2cnf,
)
from utils.cnf_reader import parse_dimacs

OR = Cnf(2, ((1, 2),))
# (x1 v x2) and (~x1 v ~x2): exactly one of them true
XOR = Cnf(2, ((1, 2), (-1, -2)))
# x1, written as a width-2 clause
UNIT = Cnf(1, ((1, 1),))


def test_count_sat():
    assert count_sat_bruteforce(OR) == 3
    assert count_sat_bruteforce(XOR) == 2
    assert count_sat_bruteforce(Cnf(1, ((1, 1), (-1, -1)))) == 0


def test_count_sat_no_clauses():
    assert count_sat_bruteforce(Cnf(3, ())) == 8


def test_count_sat_matches_evaluate():
    phi = Cnf(4, ((1, -2, 3), (-1, 4), (2, -3, -4)))
    direct = sum(phi.evaluate([(k >> i) & 1 == 1 for i in range(4)]) for k in range(16))
    assert count_sat_bruteforce(phi) == direct


def test_count_sat_variable_limit():
    with pytest.raises(TooManyVariables):
        count_sat_bruteforce(Cnf(5, ((1, 2),)), max_vars=4)


def test_symmetrize_or():
    out = symmetrize_2cnf(OR)
    assert out.n_vars == 3
    assert out.widths == {4}
    # the only cross clause is a tautology and goes away
    assert out.clauses == ((1, 1, 2, 3), (-1, -1, -2, -3))
    assert count_sat_bruteforce(out) == 2 * count_sat_bruteforce(OR)
    assert is_symmetric(out)


@pytest.mark.parametrize("phi", [OR, XOR, UNIT, Cnf(3, ((1, -2), (2, 3), (-1, -3)))])
def test_symmetrize_doubles_count(phi):
    out = symmetrize_2cnf(phi)
    assert count_sat_bruteforce(out) == 2 * count_sat_bruteforce(phi)
    assert is_symmetric(out)
    assert out.widths <= {4}


def test_symmetrize_needs_width_two():
    with pytest.raises(NotWidth2):
        symmetrize_2cnf(Cnf(3, ((1, 2, 3),)))


def test_is_symmetric():
    assert not is_symmetric(Cnf(2, ((1, 1, 2, 2),)))
    assert is_symmetric(Cnf(2, ((1, 1, 2, 2), (-1, -1, -2, -2))))


@pytest.mark.parametrize(
    "n, s, value",
    [(1, 0, F(11, 4)), (1, 2, F(9, 4)), (2, 0, F(21, 8)), (2, 4, F(19, 8)), (3, 6, F(79, 32))],
)
def test_reduction_value(n, s, value):
    assert reduction_value(n, s) == value


@pytest.mark.parametrize("s", [-1, 5])
def test_reduction_value_range(s):
    with pytest.raises(CountOutOfRange):
        reduction_value(2, s)


# --- the instance ---


@pytest.fixture
def or_art():
    return reduction_instance(symmetrize_2cnf(OR))


def test_capacity_digit_blocks(or_art):
    n, m = 3, 2
    assert str(or_art.capacity) == "1" * n + "1" * n + "1" * (2 * n) + "4" * m
    assert or_art.instance.capacity == or_art.capacity
    assert or_art.instance.penalty == 10


def test_item_roles(or_art):
    # fmt: off
    assert or_art.roles == (
        "X1", "X1'", "X2", "X2'", "X3", "X3'",
        "c1", "d1", "c2", "d2", "c3", "d3",
        "f1", "g1", "h1", "f2", "g2", "h2",
        "h",
    )
    # fmt: on
    assert or_art.random_count() == 6
    x1 = or_art.instance.items[0]
    assert x1.values == (or_art.numbers["a1"], or_art.numbers["b1"])
    assert x1.probs == (F(1, 2), F(1, 2))


def test_no_digit_carries(or_art):
    assert max(digit_load(or_art)) <= 9


def _total(art, pick):
    """Sum of all items with X_i, X_i' fixed by pick(i) -> (first, second)."""
    num = art.numbers
    n = art.n_vars
    total = sum(num[w + str(i)] for i in range(1, n + 1) for w in pick(i))
    total += sum(num[f"{s}{i}"] for i in range(1, n + 1) for s in "cd")
    total += sum(num[f"{s}{j}"] for j in range(1, len(art.cnf.clauses) + 1) for s in "fgh")
    return total + num["h"]


def test_items_fill_two_bins_exactly(or_art):
    assert _total(or_art, lambda i: ("a", "b")) == 2 * or_art.capacity


def test_collision_on_b_overfills(or_art):
    assert _total(or_art, lambda i: ("b", "b") if i == 1 else ("a", "b")) > 2 * or_art.capacity


def test_collision_on_a_underfills(or_art):
    assert _total(or_art, lambda i: ("a", "a") if i == 1 else ("a", "b")) < 2 * or_art.capacity


def test_reduction_input_checks():
    with pytest.raises(InvalidParams):
        reduction_instance(OR)
    with pytest.raises(OccurrenceBound):
        reduction_instance(Cnf(1, ((1, 1, 1, -1),)))
    with pytest.raises(NotSymmetric):
        reduction_instance(Cnf(2, ((1, 1, 2, 2),)))


def test_custom_penalty():
    art = reduction_instance(symmetrize_2cnf(UNIT), penalty=3)
    assert art.instance.penalty == 3


# --- optimum and the explicit policy ---


@pytest.mark.parametrize("phi", [UNIT, OR])
def test_search_matches_closed_form(phi):
    sym = symmetrize_2cnf(phi)
    art = reduction_instance(sym)
    expected = reduction_value(sym.n_vars, count_sat_bruteforce(sym))
    assert restricted_policy_search(art) == expected
    assert constructive_policy_value(art) == expected


def test_unit_values():
    art = reduction_instance(symmetrize_2cnf(UNIT))
    # (x0 v x1)(~x0 v ~x1) has two models
    assert restricted_policy_search(art) == F(5, 2)


def test_search_limit(or_art):
    with pytest.raises(InstanceTooLarge):
        restricted_policy_search(or_art, max_vars=2)


def _random_2cnf(rng):
    clauses = []
    for _ in range(rng.randint(1, 2)):
        lits = [v if rng.random() < 0.5 else -v for v in (1, 2)]
        clauses.append(tuple(lits))
    return Cnf(2, tuple(clauses))


@pytest.mark.slow
@pytest.mark.parametrize("phi", [XOR] + [_random_2cnf(random.Random(s)) for s in range(5)])
def test_search_matches_closed_form_two_clauses(phi):
    sym = symmetrize_2cnf(phi)
    art = reduction_instance(sym)
    expected = reduction_value(sym.n_vars, count_sat_bruteforce(sym))
    assert restricted_policy_search(art) == expected
    assert constructive_policy_value(art) == expected


# --- DIMACS ---


def test_parse_dimacs():
    text = "c a comment\np cnf 3 2\n1 -2 0\n2 3\n-1 0\n"
    phi = parse_dimacs(text)
    assert phi == Cnf(3, ((1, -2), (2, 3, -1)))
    assert parse_dimacs(phi.to_dimacs()) == phi


def test_parse_dimacs_errors():
    with pytest.raises(InputError):
        parse_dimacs("p dnf 2 1\n1 2 0\n")
    with pytest.raises(InputError):
        parse_dimacs("p cnf 1 1\n1 2 0\n")
