import pytest
from sympy.polys.domains import QQ, QQ_I

from gcdeform import ring as R
from gcdeform.errors import ComplexError, ContextMismatchError, DomainError, SchemaError


@pytest.fixture
def xy():
    return R.poly_ring(("x", "y"))


def test_to_qq_accepts_exact_text():
    assert R.to_qq("3/4") == QQ(3, 4)
    assert R.to_qq(" -2 ") == QQ(-2)
    assert R.to_qq(5) == QQ(5)


@pytest.mark.parametrize("bad", [1.5, "0.5", "1/0", True, "x"])
def test_to_qq_rejects(bad):
    with pytest.raises(SchemaError) as err:
        R.to_qq(bad, "/coef")
    assert err.value.path == "/coef"


def test_scalar_text_forms():
    assert R.qq_str(QQ(-3, 6)) == "-1/2"
    assert R.scalar_str(QQ(7)) == "7"
    assert R.scalar_str(QQ_I(1, -2)) == "1 - 2*I"
    assert R.scalar_str(QQ_I(QQ(0), QQ(1, 2))) == "1/2*I"
    assert R.scalar_str(QQ_I(3, 0)) == "3"


def test_parse_poly(xy):
    x, y = xy.gens
    assert R.parse_poly("x^2 + 1/2*y", xy) == x**2 + y * QQ_I(QQ(1, 2), QQ(0))
    assert R.parse_poly("(x - y)*(x + y)", xy) == x**2 - y**2
    assert R.parse_poly("I*x", xy) == x * QQ_I(0, 1)
    assert R.parse_poly(3, xy) == xy.ground_new(QQ_I(3, 0))


def test_parse_poly_rejects_foreign_input(xy):
    with pytest.raises(SchemaError) as err:
        R.parse_poly("x + z", xy, "/functions/f")
    assert err.value.path == "/functions/f"
    assert "z" in err.value.reason
    with pytest.raises(SchemaError):
        R.parse_poly("__import__('os')", xy)
    with pytest.raises(SchemaError):
        R.parse_poly("x; y", xy)
    with pytest.raises(SchemaError):
        R.parse_poly(1.5, xy)


def test_poly_json(xy):
    x, y = xy.gens
    p = x**2 * QQ_I(0, 1) - y * QQ_I(QQ(1, 3), QQ(0))
    assert R.poly_from_json(R.poly_to_json(p), xy) == p
    other = R.poly_ring(("y", "x"))
    with pytest.raises(ContextMismatchError):
        R.poly_from_json(R.poly_to_json(p), other)
    with pytest.raises(SchemaError) as err:
        R.poly_from_json({"vars": ["x", "y"], "terms": [{"exp": [1], "coef": 1}]}, xy, "/p")
    assert err.value.path == "/p/terms/0/exp"


def test_degree_and_monomials(xy):
    x, y = xy.gens
    assert R.poly_degree(xy.zero) == -1
    assert R.poly_degree(x**2 * y + y) == 3
    assert R.monomials_up_to(2, 2) == [(0, 0), (1, 0), (0, 1), (2, 0), (1, 1), (0, 2)]
    assert R.monomials_up_to(3, -1) == []
    assert R.monomials_up_to(3, 2)[4:] == [(2, 0, 0), (1, 1, 0), (1, 0, 1), (0, 2, 0), (0, 1, 1), (0, 0, 2)]


def test_kernel_and_solve():
    rows = [[1, 2, 3], [2, 4, 6]]
    assert R.rank(rows, 3) == 1
    ker = R.kernel(rows, 3)
    assert len(ker) == 2
    for v in ker:
        assert R.is_zero_vector(R.mat_vec(rows, v))
    sol = R.solve([[1, 1], [1, -1]], 2, [3, 1])
    assert sol == [QQ(2), QQ(1)]
    assert R.solve([[1, 1], [2, 2]], 2, [1, 3]) is None


def test_coordinates_in_span():
    basis = [[1, 0, 1], [0, 1, 1]]
    assert R.coordinates(basis, [2, 3, 5]) == [QQ(2), QQ(3)]
    assert R.coordinates(basis, [0, 0, 1]) is None
    assert R.coordinates([], [0, 0]) == []


def test_quotient_dim():
    dim, reps = R.quotient_dim([[1, 0, 0]], [[1, 0, 0], [0, 1, 0]], 3)
    assert dim == 1
    assert R.rank([[1, 0, 0]] + reps, 3) == 2
    with pytest.raises(ComplexError):
        R.quotient_dim([[0, 0, 1]], [[1, 0, 0]], 3)


def test_inverse():
    inv = R.inverse([[2, 1], [1, 1]])
    assert R.mat_mul([[2, 1], [1, 1]], inv) == [[QQ(1), QQ(0)], [QQ(0), QQ(1)]]
    with pytest.raises(DomainError):
        R.inverse([[1, 2], [2, 4]])


def test_gaussian_linear_algebra():
    i = QQ_I(0, 1)
    rows = [[QQ_I(1, 0), i]]
    ker = R.kernel(rows, 2, QQ_I)
    assert len(ker) == 1
    assert R.is_zero_vector(R.mat_vec(rows, ker[0], QQ_I))


def test_empty_ring_rejected():
    with pytest.raises(DomainError):
        R.poly_ring(())


@pytest.mark.parametrize("text", [
    "(x + y + 1)^400",
    "x^17",
    "x*x^16",
    "x^2^3",
    "x**2**3",
    "x^(2)",
    "x^-1",
    "((x + 1)^4)^5",
    "(2^16)^16",
])
def test_parse_poly_caps_degree(xy, text):
    with pytest.raises(SchemaError) as err:
        R.parse_poly(text, xy, "/functions/f")
    assert err.value.path == "/functions/f"


def test_parse_poly_degree_cap_is_configurable(xy, monkeypatch):
    x, y = xy.gens
    assert R.parse_poly("(x + y)^16", xy) == (x + y)**16
    assert R.parse_poly("(x^2 + y)*(x + 1)^3", xy) == (x**2 + y) * (x + 1)**3
    monkeypatch.setenv("GCDEFORM_MAX_POLY_DEG", "4")
    assert R.parse_poly("x^4", xy) == x**4
    with pytest.raises(SchemaError):
        R.parse_poly("x^5", xy)
    with pytest.raises(SchemaError):
        R.parse_poly("(x + y)^2*(x - y)^3", xy)


def test_leibniz_rule(xy, rng):
    for _ in range(10):
        p, q = (xy.from_dict({m: QQ_I(rng.randint(-3, 3), rng.randint(-1, 1)) for m in R.monomials_up_to(2, 3)})
                for _ in range(2))
        for var in ("x", "y"):
            lhs = R.poly_partial(R.poly_mul(p, q), var)
            rhs = R.poly_mul(R.poly_partial(p, var), q) + R.poly_mul(p, R.poly_partial(q, var))
            assert lhs == rhs
    with pytest.raises(DomainError):
        R.poly_partial(xy.gens[0], "z")
    with pytest.raises(ContextMismatchError):
        R.poly_mul(xy.gens[0], R.poly_ring(("y", "x")).gens[0])


def test_parse_rational():
    assert R.parse_rational("-6/4") == QQ(-3, 2)
    assert R.to_text(R.parse_rational("-6/4")) == "-3/2"
    with pytest.raises(DomainError):
        R.parse_rational("1.5")
