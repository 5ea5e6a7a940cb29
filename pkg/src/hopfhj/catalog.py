"""Built-in problem catalog used by the CLI and the test goldens."""

from __future__ import annotations

from .conjugate import ConvexData
from .errors import ConfigError
from .hopf import (
    CONVEX_IN_P,
    STRICTLY_CONCAVE_IN_P,
    HJProblem,
    Separable,
)

__all__ = ["CATALOG_NAMES", "make_problem"]


def _paper_example():
    return dict(
        n=1,
        T=2.0,
        H="-2*t*ln(1+p1^2)",
        sigma_text="x1^2/2",
        x_box=[[-12.0, 12.0]],
        sigma_star="q1^2/2",
        q_box=[[-10.0, 10.0]],
        a2=("separable", "-2*t", "ln(1+p1^2)", "0"),
    )


def _transport():
    return dict(
        n=1,
        T=2.0,
        H="p1",
        sigma_text="x1^2/2",
        x_box=[[-12.0, 12.0]],
        sigma_star="q1^2/2",
        q_box=[[-10.0, 10.0]],
        a2=("separable", "1", "p1", "0"),
    )


def _zero():
    return dict(
        n=1,
        T=2.0,
        H="0",
        sigma_text="x1^2/2",
        x_box=[[-12.0, 12.0]],
        sigma_star="q1^2/2",
        q_box=[[-10.0, 10.0]],
        a2=(CONVEX_IN_P,),
    )


def _anti_burgers():
    return dict(
        n=1,
        T=0.9,
        H="-p1^2/2",
        sigma_text="x1^2/2",
        x_box=[[-60.0, 60.0]],
        sigma_star="q1^2/2",
        q_box=[[-50.0, 50.0]],
        a2=(STRICTLY_CONCAVE_IN_P,),
    )


def _lipschitz_sigma():
    return dict(
        n=1,
        T=2.0,
        H="p1^2/2",
        sigma_text="sqrt(1+x1^2)",
        x_box=[[-40.0, 40.0]],
        sigma_star="-sqrt(1-q1^2)",
        sigma_star_domain=[[-1.0, 1.0]],
        q_box=[[-2.0, 2.0]],
        a2=(CONVEX_IN_P,),
    )


_BUILDERS = {
    "paper-example": _paper_example,
    "transport": _transport,
    "zero": _zero,
    "anti-burgers": _anti_burgers,
    "lipschitz-sigma": _lipschitz_sigma,
}

CATALOG_NAMES = tuple(sorted(_BUILDERS))


def make_problem(name: str, **overrides) -> HJProblem:
    """Instantiate a catalog problem; keyword overrides replace entry fields.

    Recognized overrides: T, q_box, x_box, sigma_star, sigma_star_domain.
    """
    builder = _BUILDERS.get(name)
    if builder is None:
        raise ConfigError(f"unknown catalog problem {name!r} (have: {', '.join(CATALOG_NAMES)})")
    spec = builder()
    for key, val in overrides.items():
        if key not in ("T", "q_box", "x_box", "sigma_star", "sigma_star_domain"):
            raise ConfigError(f"unsupported catalog override {key!r}")
        spec[key] = val
    a2 = spec["a2"]
    if a2[0] == "separable":
        a2_class = Separable.from_strings(a2[1], a2[2], a2[3], spec["n"])
    else:
        a2_class = a2[0]
    return HJProblem(
        n=spec["n"],
        T=spec["T"],
        H=spec["H"],
        sigma=ConvexData(spec["sigma_text"], spec["x_box"]),
        q_box=spec["q_box"],
        sigma_star=spec.get("sigma_star"),
        sigma_star_domain=spec.get("sigma_star_domain"),
        a2_class=a2_class,
        name=name,
    )
