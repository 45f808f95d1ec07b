import sympy
from hypothesis import settings
from hypothesis import strategies as st

from voasheaf.ratfunc import MultiPoly, RatFunc

settings.register_profile("default", max_examples=60, deadline=None)
settings.load_profile("default")

X = sympy.symbols("x1:4")


def to_sympy(f):
    """Independent reading of printed output."""
    text = str(f).replace("^", "**")
    return sympy.sympify(text, locals={f"x{i + 1}": X[i] for i in range(3)})


@st.composite
def polys(draw, nvars=2, max_terms=3, max_deg=2):
    n = draw(st.integers(0, max_terms))
    terms = {}
    for _ in range(n):
        exp = tuple(draw(st.integers(0, max_deg)) for _ in range(nvars))
        terms[exp] = draw(st.integers(-4, 4))
    return MultiPoly(terms, nvars)


@st.composite
def ratfuncs(draw, nvars=2, nonzero=False):
    num = draw(polys(nvars))
    den = draw(polys(nvars).filter(lambda p: not p.is_zero()))
    f = RatFunc(num, den)
    if nonzero and f.is_zero():
        f = f + 1
    return f


ACCEPTANCE_LINES: list[str] = []


def pytest_terminal_summary(terminalreporter):
    if ACCEPTANCE_LINES:
        terminalreporter.section("acceptance criteria")
        for line in ACCEPTANCE_LINES:
            terminalreporter.write_line(line)
