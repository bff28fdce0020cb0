import math

import pytest

from symschro.errors import GridError, IncompatibleSystemError, SingularAmplitudeError
from symschro.families import (constant_potential, energy_relation, energy_shifted, free_particle,
                               inverse_square, linear_planewave, power_exponential,
                               quadratic_potential)
from symschro.residuals import (Grid, VerifyConfig, all_passed, default_step, finite_diff,
                                residual_field, verify)

EPS = 2.220446049250313e-16

# every shipped family in the reading whose declared systems hold
PASS_SET = {
    "free": free_particle(1.0, 0.0, 1.0, 2.0),
    "free_phantom": free_particle(1.0, 2.0, 1.0, 1.0),
    "free_degenerate": free_particle(1.0, 1.0, 1.0, 1.5),
    "constant_barrier": constant_potential(-1, 2.0, 2.0, 1.0, 1.0, 0.5, 0.5),
    "constant_well": constant_potential(1, 2.0, 1.0, 0.0, 1.0, 0.0, 0.5, domain=(-1.0, 1.0)),
    "inverse_square_up": inverse_square(2.0, 0.5, 1, 1.0, 1.0, 0.0),
    "inverse_square_down": inverse_square(2.0, 0.5, -1, 1.0, 1.0, 0.0),
    "inverse_square_log": inverse_square(-0.25, 0.5, 1, 1.0, 1.0, 0.0),
    "quadratic_plus": quadratic_potential(2.0, 4.0, 1, 0.0, 1.0, 0.0, 0.5),
    "quadratic_minus": quadratic_potential(2.0, 4.0, -1, 0.0, 1.0, 0.0, 0.5),
    "power_exponential_2": power_exponential(2.0, -0.25, 1.0, 1.0, 0.0, 0.0, 1.0, 1.0),
    "power_exponential_1": power_exponential(1.0, 0.3, 1.0, 1.0, 0.0, 0.0, 1.0, 1.0),
    "shifted_inverse_square": energy_shifted(inverse_square(2.0, 0.5, 1, 1.0, 1.0, 0.0), 5.0, 1.0),
    "shifted_constant": energy_shifted(constant_potential(-1, 2.0, 2.0, 1.0, 1.0, 0.5, 0.5), 1.0, 2.0),
    "linear_k0": linear_planewave(1.0, 0.0, energy_relation(1.0, 0.0, 1.0, 1.0).E, 1.0, 0.0, 1.0),
}


# ---------------------------------------------------------------- stencils

def test_polynomial_exactness():
    for h in (0.1, 1e-2, 1e-3):
        err = abs(finite_diff(lambda x: x * x, 0.3, 2, h) - 2.0)
        assert err <= 64 * EPS / h ** 2


def test_sin_slope_at_zero():
    assert abs(finite_diff(math.sin, 0.0, 1, 1e-3) - 1.0) <= 1e-12


@pytest.mark.xfail(strict=True, reason=(
    "4th-order stencil at h=1e-3: truncation ~h**4*e/90 is 3e-14, but rounding "
    "~16*eps*e/(3*h**2) is ~3e-9 (measured 5.4e-10); no h reaches 1e-11 "
    "(best ~1.6e-11 near h=5e-3)"))
def test_exp_curvature_at_one():
    assert abs(finite_diff(math.exp, 1.0, 2, 1e-3) - math.e) <= 1e-11


def test_exp_curvature_best_step():
    assert abs(finite_diff(math.exp, 1.0, 2, 5e-3) - math.e) <= 5e-11


@pytest.mark.parametrize("order,f,exact", [
    (1, math.sin, math.cos),
    (2, math.sin, lambda x: -math.sin(x)),
    (1, math.exp, math.exp),
    (2, math.exp, math.exp),
])
def test_convergence_order(order, f, exact):
    x = 0.7
    errs = [abs(finite_diff(f, x, order, h) - exact(x)) for h in (0.2, 0.1, 0.05)]
    for coarse, fine in zip(errs, errs[1:]):
        assert math.log2(coarse / fine) >= 3.5


def test_bad_order():
    with pytest.raises(ValueError):
        finite_diff(math.sin, 0.0, 3, 1e-3)


def test_default_step_scales():
    assert default_step(0.0) == default_step(0.5)
    assert default_step(100.0) == 100.0 * default_step(1.0)


# -------------------------------------------------------------------- grids

def test_grid_parse_and_points():
    g = Grid.parse("-1:1:9")
    assert g.points()[0] == -1.0 and g.points()[4] == 0.0 and g.points()[-1] == 1.0


@pytest.mark.parametrize("text", ["1:0:11", "0:1:5", "0:1", "a:b:c"])
def test_grid_rejects(text):
    with pytest.raises(GridError):
        Grid.parse(text)


def test_grid_must_clear_support():
    sol = inverse_square(2.0, 0.5, 1, 1.0, 1.0, 0.0)
    with pytest.raises(GridError):
        residual_field(sol, "amplitude_only", Grid(0.0, 1.0))
    residual_field(sol, "amplitude_only", Grid(0.01, 1.0))


# ------------------------------------------------------------ residual field

def test_free_particle_exact():
    sol = free_particle(1.0, 0.0, 1.0, 2.0)
    rep = residual_field(sol, "full_1d", Grid(-2.0, 5.0, 33), t=1.3)
    assert rep.max_abs <= 1e-12 * rep.scale
    assert rep.passed


def test_paper_free_particle_residual():
    sol = free_particle(1.0, 0.0, 1.0, 2.0, mode="paper")
    rep = residual_field(sol, "full_1d")
    # 2 eta p**2 A0 with eta = -1
    assert all(r == pytest.approx(-8.0, abs=1e-12) for r in rep.per_point)
    assert not rep.passed


def test_paper_constant_residual_is_flat():
    sol = constant_potential(1, 2.0, 1.0, 1.0, 0.0, 0.0, 0.5, mode="paper")
    for source in ("analytic", "finite_difference"):
        rep = residual_field(sol, "amplitude_only", derivative_source=source)
        assert rep.verdict == "fail"
        assert all(abs(p.r - 2.0) <= 1e-9 + p.noise for p in rep.points)


def test_paper_quadratic_phase_relation():
    sol = quadratic_potential(2.0, 4.0, 1, 0.0, 1.0, 0.0, 0.5, mode="paper")
    rep = residual_field(sol, "phase_relation")
    assert all(r == pytest.approx(-2.0, abs=1e-12) for r in rep.per_point)


def test_power_exponential_cubic():
    sol = power_exponential(2.0, -0.25, 1.0, 1.0, 0.0, 0.0, 1.0, 1.0)
    rep = residual_field(sol, "cubic_amplitude", Grid(0.5, 2.0, 101), derivative_source="finite_difference")
    assert rep.relative <= 1e-8


def test_incompatible_systems():
    with pytest.raises(IncompatibleSystemError):
        residual_field(free_particle(1.0, 0.0, 1.0, 1.0), "cubic_amplitude")
    with pytest.raises(IncompatibleSystemError):
        residual_field(free_particle(1.0, 0.0, 1.0, 1.0), "schrodinger_3d")


def test_singular_amplitude():
    sol = constant_potential(-1, 2.0, 1.0, -1.0, 1.0, 0.0, 0.5, mode="paper")
    with pytest.raises(SingularAmplitudeError):
        residual_field(sol, "phase_only", Grid(-1.0, 1.0, 9))
    residual_field(sol, "amplitude_only", Grid(-1.0, 1.0, 9))  # no division by A


def test_bad_derivative_source():
    with pytest.raises(ValueError):
        residual_field(free_particle(1.0, 0.0, 1.0, 1.0), "full_1d", derivative_source="spectral")


def test_report_serialization():
    rep = residual_field(inverse_square(2.0, 0.5, 1, 1.0, 1.0, 0.0), "phase_only", Grid(1.0, 2.0, 9))
    doc = rep.to_dict()
    assert list(doc) == ["system", "max_abs", "rms", "scale", "verdict", "points"]
    assert list(doc["points"][0]) == ["x", "t", "r"]
    lines = rep.to_csv().splitlines()
    assert lines[0] == "x,t,residual" and len(lines) == 10


# ------------------------------------------------------------------- verify

def test_verify_examples():
    reps = verify(inverse_square(2.0, 0.5, 1, 1.0, 1.0, 0.0))
    verdicts = {r.system: r.verdict for r in reps}
    assert verdicts["amplitude_only"] == verdicts["phase_only"] == "pass"
    assert all_passed(verify(quadratic_potential(2.0, 4.0, 1, 0.0, 1.0, 0.0, 0.5)))
    only_phase = verify(free_particle(1.0, 0.0, 1.0, 1.0), VerifyConfig(systems=["phase_only"]))
    assert only_phase[0].max_abs == 0.0


@pytest.mark.parametrize("name", sorted(PASS_SET))
@pytest.mark.parametrize("source", ["analytic", "finite_difference"])
def test_pass_set(name, source):
    reps = verify(PASS_SET[name], VerifyConfig(t=0.7, derivative_source=source))
    assert all_passed(reps), [(r.system, r.relative) for r in reps]


@pytest.mark.parametrize("name", sorted(PASS_SET))
def test_mode_agreement(name):
    """Analytic and finite-difference residuals agree to 1e-7 of the term scale.

    Where a derivative is buried in rounding (a phase flattening to a
    constant, say) the carried rounding bound widens the allowance.
    """
    sol = PASS_SET[name]
    for system in sol.systems:
        an = residual_field(sol, system, t=0.7)
        fd = residual_field(sol, system, t=0.7, derivative_source="finite_difference")
        for pa, pf in zip(an.points, fd.points):
            assert abs(pa.r - pf.r) <= 1e-7 * an.scale + pf.noise
