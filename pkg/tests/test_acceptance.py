"""Acceptance criteria, one test each.

Every test prints a single ``[criterion N] PASS|FAIL`` line (bypassing
pytest's capture so it lands in the test log) and then asserts.
"""
import json
import math
import subprocess
import sys

import numpy as np
import pytest

from symschro.algebra import EtaElement, MixedUnit, matrix_rep, mul, planar_norm2, plane_coords
from symschro.families import (constant_potential, energy_relation, energy_shifted, free_particle,
                               inverse_square, linear_planewave, phase_from_amplitude,
                               planewave_energy, planewave_residual, power_exponential,
                               quadratic_potential)
from symschro.ode import compare_with_closed_form, quadrature, solve_from_closed_form
from symschro.residuals import Grid, VerifyConfig, finite_diff, residual_field, residual_grid, verify
from symschro.trig import cs_eval, erf
from symschro.wavefunction import algebraic_norm2, evaluate_psi, square_norm

SEED = 20240611


@pytest.fixture
def record(capsys):
    def emit(number, title, ok, detail):
        with capsys.disabled():
            print(f"\n[criterion {number:2d}] {'PASS' if ok else 'FAIL'}  {title}: {detail}")
        assert ok, f"criterion {number}: {detail}"
    return emit


def test_c01_matrix_homomorphism(record):
    # per entry, relative to (|X| |Y|)_ij: the magnitude the entry is built from,
    # so entries that cancel towards zero are judged on their own inputs
    rng = np.random.default_rng(SEED)
    worst = 0.0
    for _ in range(500):
        x = EtaElement(*rng.uniform(-10, 10, 4))
        y = EtaElement(*rng.uniform(-10, 10, 4))
        X, Y = np.array(matrix_rep(x)), np.array(matrix_rep(y))
        lhs = np.array(matrix_rep(mul(x, y)))
        worst = max(worst, float(np.max(np.abs(lhs - X @ Y) / (np.abs(X) @ np.abs(Y)))))
    record(1, "rep(x*y) = rep(x) rep(y), 500 pairs", worst <= 1e-13, f"max rel err {worst:.2e} <= 1e-13")


def test_c02_mixed_unit_square(record):
    rng = np.random.default_rng(SEED + 1)
    worst = 0.0
    for delta, sigma in rng.uniform(-3, 3, (100, 2)):
        u = MixedUnit(delta, sigma)
        sq = mul(u.embed(), u.embed())
        err = max(abs(sq.a - (sigma ** 2 - delta ** 2)), abs(sq.b), abs(sq.c), abs(sq.d))
        worst = max(worst, err)
    record(2, "(delta i + sigma eps)**2 = sigma**2 - delta**2", worst <= 1e-15,
           f"max abs err {worst:.2e} <= 1e-15")


def test_c03_trig_identity(record):
    rng = np.random.default_rng(SEED + 2)
    worst = {"series": 0.0, "closed": 0.0}
    for S, eta in zip(rng.uniform(-10, 10, 1000), rng.uniform(-4, 4, 1000)):
        for method in worst:
            worst[method] = max(worst[method], abs(cs_eval(S, eta, method).identity_residual()))
    ok = max(worst.values()) <= 1e-11
    record(3, "c**2 - eta s**2 = 1, 1000 (S, eta)", ok,
           f"series {worst['series']:.2e}, closed {worst['closed']:.2e} <= 1e-11")


def test_c04_derivative_laws(record):
    # S(q) = 0.8 q + 0.3 q**2, differentiated through the pair by a 4th-order stencil
    rng = np.random.default_rng(SEED + 3)
    worst = 0.0
    for q, eta in zip(rng.uniform(-2, 2, 200), rng.uniform(-4, 4, 200)):
        S, Sq = 0.8 * q + 0.3 * q * q, 0.8 + 0.6 * q
        pair = cs_eval(S, eta)
        fd_s = finite_diff(lambda p: cs_eval(0.8 * p + 0.3 * p * p, eta).s, q, 1, 1e-3)
        fd_c = finite_diff(lambda p: cs_eval(0.8 * p + 0.3 * p * p, eta).c, q, 1, 1e-3)
        scale = max(1.0, abs(pair.c * Sq), abs(eta * pair.s * Sq))
        worst = max(worst, abs(fd_s - pair.c * Sq) / scale, abs(fd_c - eta * pair.s * Sq) / scale)
    record(4, "ds = c S', dc = eta s S', 200 points", worst <= 1e-8, f"max rel err {worst:.2e} <= 1e-8")


def test_c05_norm_law(record):
    # the algebraic route computes c**2 - eta s**2 times A**2, so its rounding
    # is measured against the largest of those squared terms
    rng = np.random.default_rng(SEED + 4)
    worst = 0.0
    for A, S, delta, sigma in zip(rng.uniform(0.1, 5, 100), rng.uniform(-3, 3, 100),
                                  rng.uniform(-2, 2, 100), rng.uniform(-2, 2, 100)):
        psi = evaluate_psi(A, S, MixedUnit(delta, sigma))
        a, y = plane_coords(psi.value, psi.plane)
        scale = max(a * a, abs(psi.plane.effective_eta) * y * y, A * A)
        paths = (square_norm(psi), algebraic_norm2(psi), planar_norm2(a, y, psi.plane))
        worst = max(worst, max(abs(p - A * A) for p in paths) / scale)
        # the returned norm must not depend on S at all
        assert square_norm(evaluate_psi(A, S + 1.0, psi.plane)) == square_norm(psi) == A * A
    record(5, "|psi|**2 = A**2, 100 samples", worst <= 1e-12, f"max rel disagreement {worst:.2e} <= 1e-12")


def test_c06_energy_relation(record):
    mu, p = 1.0, 2.0
    classical = energy_relation(1.0, 0.0, mu, p).E
    other = energy_relation(-1.0, math.sqrt(2.0), mu, p).E
    zero = energy_relation(1.0, 1.0, mu, p).E
    phantom = energy_relation(1.0, 2.0, mu, p).E
    ok = classical == p * p / (2 * mu) and other == p * p / (2 * mu) and zero == 0.0 and phantom < 0.0
    record(6, "energy relation branches", ok,
           f"E(1,0)={classical!r}, E(-1,sqrt2)={other!r}, E(1,1)={zero!r}, E(1,2)={phantom!r}")


PASS_SET = [
    free_particle(1.0, 0.0, 1.0, 2.0),
    free_particle(1.0, 2.0, 1.0, 1.0),
    constant_potential(-1, 2.0, 2.0, 1.0, 1.0, 0.5, 0.5),
    constant_potential(1, 2.0, 1.0, 0.0, 1.0, 0.0, 0.5, domain=(-1.0, 1.0)),
    inverse_square(2.0, 0.5, 1, 1.0, 1.0, 0.0),
    inverse_square(2.0, 0.5, -1, 1.0, 1.0, 0.0),
    quadratic_potential(2.0, 4.0, 1, 0.0, 1.0, 0.0, 0.5),
    quadratic_potential(2.0, 4.0, -1, 0.0, 1.0, 0.0, 0.5),
    power_exponential(2.0, -0.25, 1.0, 1.0, 0.0, 0.0, 1.0, 1.0),
    energy_shifted(inverse_square(2.0, 0.5, 1, 1.0, 1.0, 0.0), 5.0, 1.0),
    linear_planewave(1.0, 0.0, energy_relation(1.0, 0.0, 1.0, 1.0).E, 1.0, 0.0, 1.0),
]


def test_c07_family_verdicts(record):
    failures = []
    checked = 0
    for sol in PASS_SET:
        for rep in verify(sol, VerifyConfig(tolerance=1e-8, t=0.7)):
            checked += 1
            if len(rep.points) != 101 or not rep.passed:
                failures.append(f"{sol.family}/{rep.system} {rep.relative:.1e}")
    # predicted failure: literal (paper-mode) form, C2 = 1, eta_sign = +1, k**2 = 2 mu V0 = 2
    paper = constant_potential(1, 2.0, 1.0, 1.0, 0.0, 0.0, 0.5, mode="paper")
    rep = residual_field(paper, "amplitude_only")
    predicted = 1 * 2.0 * 1.0
    spread = max(abs(r - predicted) for r in rep.per_point)
    ok = not failures and rep.verdict == "fail" and spread <= 1e-9
    record(7, "declared systems pass, paper constant case fails as predicted", ok,
           f"{checked} reports pass (failures: {failures or 'none'}); paper residual "
           f"= {predicted} +- {spread:.1e} (<= 1e-9), verdict {rep.verdict}")


def test_c08_quadratic_phase(record):
    sol = quadratic_potential(2.0, 4.0, 1, 0.0, 1.0, 0.0, 0.5)
    worst = 0.0
    for x in np.linspace(-1.0, 1.0, 41):
        closed = sol.S(x) - sol.S(-1.0)
        quad = phase_from_amplitude(sol.A, 1.0, 0.0, -1.0, float(x))
        worst = max(worst, abs(closed - quad))
    record(8, "erf phase vs B1 * int A**-2 on [-1, 1]", worst <= 1e-9, f"max abs diff {worst:.2e} <= 1e-9")


def test_c09_ode_round_trip(record):
    cases = {
        "inverse_square n=2": inverse_square(2.0, 0.5, 1, 1.0, 1.0, 0.0),
        # eta = -1 plane: with eta = +1 the cubic equation is exponentially
        # ill-conditioned on this span (see test_ode)
        "power_exponential n=2 k=-0.25": power_exponential(2.0, -0.25, 1.0, 1.0, 0.0, 1.0, 0.0, 1.0),
        "quadratic_potential": quadratic_potential(2.0, 4.0, 1, 0.0, 1.0, 0.0, 0.5),
    }
    results = {}
    for name, sol in cases.items():
        num = solve_from_closed_form(sol, rel_tol=1e-9)
        results[name] = compare_with_closed_form(num, sol, np.linspace(*sol.domain, 101))
    ok = max(results.values()) <= 1e-7
    record(9, "integrate_amplitude vs closed form, rel_tol 1e-9", ok,
           ", ".join(f"{k}: {v:.1e}" for k, v in results.items()) + " (<= 1e-7)")


def test_c10_linear_planewave(record):
    sol = linear_planewave(1.0, 0.5, 0.3, 1.0, 0.0, 1.0)
    xs = list(np.linspace(-3.0, 3.0, 21))
    ts = list(np.linspace(0.0, 2.0, 21))
    rows = residual_grid(sol, "plane_wave_consistency", xs, ts)
    x_spread = max(max(row) - min(row) for row in rows)
    t_match = max(abs(row[0] - planewave_residual(sol, t)) for row, t in zip(rows, ts))
    # k = 0: the relation collapses to the free-particle energy values
    reduced = {}
    for delta, sigma in ((1.0, 0.0), (-1.0, math.sqrt(2.0)), (1.0, 1.0), (1.0, 2.0)):
        flat = linear_planewave(2.0, 0.0, 0.0, delta, sigma, 1.0)
        reduced[(delta, sigma)] = planewave_energy(flat, 1.7)
    k0_ok = (reduced[(1.0, 0.0)] == 2.0 and reduced[(-1.0, math.sqrt(2.0))] == 2.0
             and reduced[(1.0, 1.0)] == 0.0 and reduced[(1.0, 2.0)] < 0.0)
    ok = x_spread <= 1e-12 and t_match <= 1e-12 and k0_ok
    record(10, "linear potential: x-terms cancel on 21x21 grid, k=0 limit", ok,
           f"x spread {x_spread:.1e} <= 1e-12; k=0 energies {list(reduced.values())}")


def test_c11_erf(record):
    worst = 0.0
    for x in np.linspace(-5.0, 5.0, 50):
        oracle = 2.0 / math.sqrt(math.pi) * quadrature(lambda t: math.exp(-t * t), 0.0, float(x), abs_tol=1e-14)
        worst = max(worst, abs(erf(float(x)) - oracle))
    tails = max(abs(erf(6.0) - 1.0), abs(erf(-6.0) + 1.0))
    ok = worst <= 1e-12 and tails <= 1e-12
    record(11, "erf vs quadrature on [-5, 5], tails at +-6", ok,
           f"max abs err {worst:.1e}, tail err {tails:.1e} (<= 1e-12)")


def _cli(*argv):
    return subprocess.run([sys.executable, "-m", "symschro", *argv], capture_output=True)


def test_c12_cli_contract(record):
    inverse = ["verify", "--family", "inverse_square", "--grid", "0.5:3:101",
               "--params", '{"V0": 2, "mu": 0.5, "branch": 1, "C": 1, "B1": 1, "B2": 0}']
    first, second = _cli(*inverse), _cli(*inverse)
    identical = first.stdout == second.stdout and len(first.stdout) > 0
    failing = _cli("verify", "--family", "constant_potential", "--mode", "paper",
                   "--params", '{"eta_sign": 1, "V0": 2, "C1": 1, "C2": 1, "B1": 0, "B2": 0, "mu": 0.5}')
    bad_flag = _cli("verify", "--family", "inverse_square", "--params", "{}", "--colour", "red")
    # A = cosh(2x) - 1 vanishes at x = 0, where the phase equations divide by A
    singular = _cli("verify", "--family", "constant_potential", "--mode", "paper", "--grid", "-1:1:9",
                    "--params", '{"eta_sign": -1, "V0": 2, "C1": 1, "C2": -1, "B1": 1, "B2": 0, "mu": 0.5}')
    codes = (first.returncode, failing.returncode, bad_flag.returncode, singular.returncode)
    one_line = len(singular.stderr.decode().strip().splitlines()) == 1
    reported = json.loads(failing.stdout)["reports"][0]["points"][0]["r"]
    ok = identical and codes == (0, 1, 2, 3) and one_line
    record(12, "CLI determinism and exit codes", ok,
           f"byte-identical={identical}, codes (pass, fail, usage, singular)={codes}, "
           f"fail case residual {reported:.3f}")
