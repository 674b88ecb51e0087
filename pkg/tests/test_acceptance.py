"""Exit criteria for the package, one test per criterion.

Each test prints a ``[PASS]``/``[FAIL]`` line; the lines are repeated in
the pytest terminal summary under "acceptance criteria".
"""

import json
import sys
from fractions import Fraction

import numpy as np
import pytest

from dgsolve.classical import ClassicalMethod, ClassicalSpec, classical_iteration_matrix
from dgsolve.cli import main
from dgsolve.discrete_gradients import BlockItohAbe, DiscreteGradient, check_axioms, discrete_gradient
from dgsolve.energy import component_decrement, component_update
from dgsolve.equivalence import check_equivalence, omega_to_h
from dgsolve.linalg import Preconditioner, SpdSystem, block_split, exact_flow, spectral_radius
from dgsolve.mmio import load_matrix_market
from dgsolve.problems import generate, laplacian1d, laplacian2d, ones_rhs
from dgsolve.schemes import Method, SchemeSpec, iteration_matrix, run

from conftest import random_system, record_criterion

OMEGAS = (0.5, 1.0, 1.5, 1.9)


def instance(k, n_min=2, n_max=20):
    """k-th acceptance instance: varied size, conditioning and scale."""
    rng = np.random.default_rng([2024, k])
    n = int(rng.integers(n_min, n_max + 1))
    cond = float(rng.choice([2.0, 10.0, 100.0, 1000.0]))
    scale = float(rng.choice([0.01, 1.0, 100.0]))
    return random_system(n, 10_000 + k, cond=cond, scale=scale), rng


def random_partition(n, rng, max_blocks=4):
    p = int(rng.integers(2, max_blocks + 1)) if n > 1 else 1
    p = min(p, n)
    return sorted(rng.choice(np.arange(1, n), size=p - 1, replace=False).tolist()) if p > 1 else []


def test_criterion_01_sor_iteration_matrices():
    worst = 0.0
    ok = True
    for k in range(100):
        system, _ = instance(k)
        for omega in OMEGAS:
            rep = check_equivalence("sor", system, omega, k=0)
            ok &= rep.matrix_gap <= rep.matrix_tol and rep.vector_gap <= rep.vector_tol
            worst = max(worst, rep.matrix_gap / rep.matrix_tol, rep.vector_gap / rep.vector_tol)
    record_criterion(1, "G_DG = G_SOR and c_DG = c_SOR under h = 2w/(2-w)", ok, f"worst gap/tol = {worst:.2e}")
    assert ok


def test_criterion_02_sequence_equivalence():
    worst = 0.0
    ok = True
    for k in range(20):
        system, rng = instance(100 + k)
        x0 = rng.standard_normal(system.n) * 10
        for omega in OMEGAS:
            rep = check_equivalence("sor", system, omega, x0=x0, k=200)
            ok &= rep.sequence_gap <= rep.sequence_tol
            worst = max(worst, rep.sequence_gap / rep.sequence_tol)
    record_criterion(2, "200 iterates of the Jacobi-scaled Itoh-Abe scheme match SOR", ok, f"worst gap/tol = {worst:.2e}")
    assert ok


def test_criterion_03_gauss_seidel_two_by_two():
    system = SpdSystem([[2.0, 1.0], [1.0, 2.0]], [3.0, 3.0])
    g, c = iteration_matrix(SchemeSpec(Method.DG_ITOH_ABE, 2.0, Preconditioner.jacobi()), system)
    gap_g = float(np.max(np.abs(g - np.array([[0.0, -0.5], [0.0, 0.25]]))))
    gap_c = float(np.max(np.abs(c - np.array([1.5, 0.75]))))
    ok = gap_g <= 1e-14 and gap_c <= 1e-14
    record_criterion(3, "h = 2 reproduces the hand-derived Gauss-Seidel matrices", ok, f"gaps {gap_g:.1e}, {gap_c:.1e}")
    assert ok


def test_criterion_04_symmetric_and_block():
    ok = True
    worst = 0.0
    singleton_runs = 0
    for k in range(50):
        system, rng = instance(200 + k, n_max=24)
        omega = OMEGAS[k % 4]
        x0 = rng.standard_normal(system.n)
        ssor = check_equivalence("ssor", system, omega, x0=x0)
        if k % 5 == 0:
            bounds = list(range(1, system.n))
            singleton_runs += 1
        else:
            bounds = random_partition(system.n, rng)
        block = check_equivalence("block-sor", system, omega, x0=x0, blocks=block_split(system, bounds))
        for rep in (ssor, block):
            ok &= rep.passed
            worst = max(worst, rep.matrix_gap / rep.matrix_tol, rep.vector_gap / rep.vector_tol,
                        rep.sequence_gap / rep.sequence_tol)
    record_criterion(4, "symmetric DG = SSOR and block DG = block SOR", ok,
                     f"50 instances each, {singleton_runs} singleton partitions, worst gap/tol = {worst:.2e}")
    assert ok


def test_criterion_05_discrete_gradient_axioms():
    ok = True
    worst = 0.0
    worst_gz = 0.0
    for pair in range(1000):
        if pair % 50 == 0:
            system, rng = instance(300 + pair // 50)
            kinds = list(DiscreteGradient) + [BlockItohAbe(block_split(system, random_partition(system.n, rng)))]
        x, y = rng.standard_normal(system.n), rng.standard_normal(system.n)
        for kind in kinds:
            rep = check_axioms(kind, system, x, y)
            ok &= rep.passed
            worst = max(worst, rep.chain_rule_residual / rep.tolerance, rep.consistency_residual / rep.tolerance)
        gz = discrete_gradient(DiscreteGradient.GONZALEZ, system, x, y)
        avf = discrete_gradient(DiscreteGradient.AVERAGE_VECTOR_FIELD, system, x, y)
        gap = float(np.max(np.abs(gz - avf))) / (1 + float(np.max(np.abs(avf))))
        worst_gz = max(worst_gz, gap)
    ok &= worst_gz <= 1e-12
    record_criterion(5, "chain rule and consistency for all five discrete gradients; Gonzalez = AVF", ok,
                     f"worst residual/tol = {worst:.2e}, Gonzalez-AVF = {worst_gz:.1e}")
    assert ok


def _dg_specs(system, h, rng):
    jac, ident = Preconditioner.jacobi(), Preconditioner.identity()
    specs = []
    for m in (Method.DG_ITOH_ABE, Method.DG_ITOH_ABE_REVERSE, Method.DG_SYMMETRIC, Method.DG_MIDPOINT):
        specs += [SchemeSpec(m, h, jac), SchemeSpec(m, h, ident)]
    specs.append(SchemeSpec.block(block_split(system, random_partition(system.n, rng)), h))
    return specs


def test_criterion_06_dissipation_and_unconditional_convergence():
    ok = True
    failures = []
    runs = 0
    for k in range(20):
        rng = np.random.default_rng([77, k])
        n = int(rng.integers(2, 31))
        system = random_system(n, 500 + k, cond=10.0)
        x0 = 5 * rng.standard_normal(n)
        tol = 1e-8 / max(1.0, float(np.linalg.norm(system.b)))
        for h in (0.01, 0.5, 2.0, 8.0, 64.0):
            for spec in _dg_specs(system, h, rng):
                runs += 1
                trace = run(spec, system, x0=x0, tol=tol, max_iters=20000)
                e = np.array(trace.energies)
                monotone = bool(np.all(np.diff(e) <= 1e-12 * (1 + np.abs(e[:-1]))))
                if not (trace.converged and trace.final_residual <= 1e-8 and monotone):
                    failures.append((k, spec.method.value, spec.preconditioner.kind.value, h))
    ok &= not failures

    two = SpdSystem([[2.0, 1.0], [1.0, 2.0]], [3.0, 3.0])
    euler = run(SchemeSpec(Method.EXPLICIT_EULER, 1.0, Preconditioner.identity()), two, tol=1e-8, max_iters=100)
    blew_up = any(r > 1e6 for r in euler.residual_norms)
    dg = run(SchemeSpec(Method.DG_ITOH_ABE, 1.0, Preconditioner.identity()), two, tol=1e-8, max_iters=100)
    ok &= blew_up and not euler.converged and dg.converged
    record_criterion(6, "DG methods dissipate and converge for every h; explicit Euler diverges", ok,
                     f"{runs} DG runs, failures={failures[:3]}, Euler max residual {max(euler.residual_norms):.1e}")
    assert ok


def _exact_energy(a, b, x):
    xs = [Fraction(v) for v in x]
    quad = sum(Fraction(a[i, j]) * xs[i] * xs[j] for i in range(len(xs)) for j in range(len(xs)))
    return quad / 2 - sum(Fraction(bi) * xi for bi, xi in zip(b, xs))


def test_criterion_07_component_decrement():
    # the oracle is f(after) - f(before) in exact rational arithmetic on the
    # floating-point states, so cancellation in f cannot mask or fake a gap
    ok = True
    worst = 0.0
    for k in range(500):
        if k % 25 == 0:
            system, rng = instance(400 + k // 25)
        new, old = rng.standard_normal(system.n), rng.standard_normal(system.n)
        i = int(rng.integers(system.n))
        before = np.concatenate([new[:i], old[i:]])
        f_before = _exact_energy(system.a, system.b, before)
        for h in (0.5, 2.0, 10.0):
            after = component_update(system, new, old, i, h)
            direct = float(_exact_energy(system.a, system.b, after) - f_before)
            worst = max(worst, abs(component_decrement(system, new, old, i, h) - direct))
        best = abs(component_decrement(system, new, old, i, 2.0))
        ok &= all(best >= abs(component_decrement(system, new, old, i, h)) for h in (0.5, 1.0, 1.5, 2.5, 4.0, 10.0))
    ok &= worst <= 1e-10
    record_criterion(7, "per-component decrement identity, maximal at h = 2", ok, f"worst |closed - direct| = {worst:.1e}")
    assert ok


def test_criterion_08_sor_window():
    systems = [instance(600 + k, n_max=30)[0] for k in range(40)]
    systems += [SpdSystem(laplacian1d(n), np.ones(n)) for n in (5, 20, 30)]
    systems += [SpdSystem(laplacian2d(m), np.ones(m * m)) for m in (3, 5)]
    ok = True
    max_inside, min_at_two = 0.0, np.inf
    for system in systems:
        for omega in OMEGAS:
            rho = spectral_radius(classical_iteration_matrix(ClassicalSpec(ClassicalMethod.SOR, omega), system)[0])
            max_inside = max(max_inside, rho)
            ok &= rho < 1.0
        rho2 = spectral_radius(classical_iteration_matrix(ClassicalSpec(ClassicalMethod.SOR, 2.0), system)[0])
        min_at_two = min(min_at_two, rho2)
        ok &= rho2 >= 1.0 - 1e-9
    record_criterion(8, "rho(G_SOR) < 1 inside (0, 2) and >= 1 at omega = 2", ok,
                     f"{len(systems)} instances, max rho inside = {max_inside:.6f}, min rho at 2 = {min_at_two:.10f}")
    assert ok


def test_criterion_09_continuous_flow_limit():
    ok = True
    worst = 0.0
    for k in range(10):
        rng = np.random.default_rng([9, k])
        n = int(rng.integers(1, 11))
        # eigenvalues in [1, 2] keep the slowest mode of D^{-1} A at rate >= 1/2
        system = random_system(n, 700 + k, cond=2.0)
        x0 = 10 * rng.standard_normal(n)
        for p in (Preconditioner.identity(), Preconditioner.jacobi()):
            err = float(np.max(np.abs(exact_flow(system, p, x0, 50.0) - system.solution)))
            worst = max(worst, err)
            ok &= err <= 1e-8
    record_criterion(9, "exact flow at t = 50 reaches A^-1 b", ok, f"worst error = {worst:.1e}")
    assert ok


def test_criterion_10_cli_round_trip(tmp_path, capsys):
    outputs = []
    for attempt in range(2):
        work = tmp_path / f"run{attempt}"
        work.mkdir()
        assert main(["gen", "--gen", "random-spd", "--n", "12", "--seed", "7", "--out-dir", str(work), "--name", "p"]) == 0
        capsys.readouterr()
        a = load_matrix_market(work / "p_A.mtx", vector=False)
        b = load_matrix_market(work / "p_b.mtx")
        original = generate("random-spd", 12, seed=7)
        assert np.array_equal(a, original.a) and np.array_equal(b, original.b)
        code = main([
            "solve", "--matrix", str(work / "p_A.mtx"), "--rhs", str(work / "p_b.mtx"),
            "--method", "dg-ia", "--p", "jacobi", "--omega", "1.5", "--tol", "1e-10",
            "--trace", str(work / "trace.json"), "--format", "json", "--summary", str(work / "summary.json"),
        ])
        stdout = capsys.readouterr().out
        assert code == 0
        outputs.append(((work / "summary.json").read_bytes(), (work / "trace.json").read_bytes(), stdout))
    summary = json.loads(outputs[0][0])
    ok = outputs[0] == outputs[1] and summary["converged"] and summary["parameter"] == {"h": omega_to_h(1.5)}
    record_criterion(10, "gen -> load -> solve gives byte-identical JSON across runs", ok,
                     f"{summary['iterations']} iterations, rho = {summary['spectral_radius']:.4f}")
    assert ok


if __name__ == "__main__":
    sys.exit(pytest.main([__file__, "-q", "-s"]))
