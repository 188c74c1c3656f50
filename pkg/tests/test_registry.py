import pytest

from avarith.reference import PolySpec
from avarith.registry import (
    COMPONENT_IDS,
    LOW_LEVEL,
    SUBROUTINE_IDS,
    SubroutineSpec,
    canonical_id,
    input_space,
    lookup,
)
from avarith.simulator import verify_exhaustive, verify_sampled

SMALL = {
    "increment": 3, "cincrement": 3, "cshift1": 3, "toffoli_copy": 3, "k_not": 3, "og_adder": 3,
    "cas_adder": 3, "cog_adder": 3, "comparator": 3, "multiply": 3, "square": 3, "csquare": 3,
    "cheap_multiply": 4, "fused_multiply_add": 4, "sqrt": 4, "ppe": 6, "arcsine": 6, "log": 5,
    "label": 5, "next": 5,
}


def test_every_id_is_covered():
    assert set(SMALL) == set(SUBROUTINE_IDS + COMPONENT_IDS)
    assert set(LOW_LEVEL) <= set(SUBROUTINE_IDS)


@pytest.mark.parametrize("sid", sorted(SMALL))
def test_every_subroutine_verifies(sid):
    spec = lookup(sid).default_spec(SMALL[sid])
    report = verify_exhaustive(spec)
    assert report.passed, report.failures[:3]
    assert report.cases > 0


@pytest.mark.parametrize("alias,sid", [("cas", "cas_adder"), ("cmp", "comparator"), ("fma", "fused_multiply_add"),
                                       ("mult", "multiply"), ("og", "og_adder"), ("cog", "cog_adder")])
def test_aliases(alias, sid):
    assert canonical_id(alias) == sid
    assert SubroutineSpec(alias, 4).id == sid


def test_unknown_id():
    with pytest.raises(KeyError):
        SubroutineSpec("divide", 4)


def test_default_spec_respects_validity():
    assert lookup("sqrt").default_spec(5) is None
    assert lookup("increment").default_spec(1) is None
    spec = lookup("ppe").default_spec(8)
    assert isinstance(spec.get("poly"), PolySpec)


def test_describe_summarises_polynomial():
    spec = lookup("ppe").default_spec(8)
    d = spec.describe()
    assert d["n"] == 8 and d["M"] == 2 and d["q"] == 2


def test_input_space():
    assert input_space(SubroutineSpec("cas", 4)) == 2 * 16 * 16
    assert input_space(SubroutineSpec("log", 6, {"h": 1})) == 16


def test_sampled_check_metrics_for_cheap_multiply():
    r = verify_sampled(SubroutineSpec("cheap_multiply", 10, {"p": 4}), samples=500, seed=3)
    assert r.passed
    assert r.metrics["max_error"] <= r.metrics["error_bound"] == 10 / 2**6
