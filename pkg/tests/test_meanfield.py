import math

import numpy as np
import pytest

from dickebh.hamiltonian import ModelParams, basis_index, build_mean_field_matrix
from dickebh.eig import ground_state
from dickebh.dressed import dressed_triple, lobe_boundary_zero_hopping
from dickebh.meanfield import (
    Phase,
    ground_energy_at_psi,
    minimize_over_psi,
    mean_excitations,
    density_probe,
    convergence_study,
    first_converged,
    ground_manifold_weights,
    PSI_THRESHOLD,
)


def params(**kwargs):
    base = dict(N=2, omega=10.0, n_max=30)
    base.update(kwargs)
    return ModelParams(**base)


class TestGroundEnergy:
    def test_zero_hopping_independent_of_psi(self):
        values = [ground_energy_at_psi(params(kappa=0.0, mu=9.1, psi=s)) for s in (0.0, 0.7, 2.0)]
        np.testing.assert_allclose(values, values[0], atol=1e-12)

    def test_zero_psi_equals_minimum_block_energy(self):
        # at psi=0 and mu=0 every manifold energy is nonnegative; the vacuum wins
        e = ground_energy_at_psi(params(kappa=0.4, mu=0.0, psi=0.0))
        branch_minima = [0.0] + [dressed_triple(n, 10.0).e_minus for n in range(1, 31)]
        assert e == pytest.approx(min(branch_minima), abs=1e-10)

    def test_matches_public_matrix_route(self):
        p = params(kappa=0.05, mu=9.15, psi=0.42)
        assert ground_energy_at_psi(p) == pytest.approx(
            ground_state(build_mean_field_matrix(p)).value, abs=1e-11
        )


class TestMinimize:
    def test_zero_hopping_is_mott(self):
        for mu_rel in (-1.3, -0.85, -0.65):
            sol = minimize_over_psi(params(kappa=0.0, mu=10.0 + mu_rel))
            assert sol.psi_min == 0.0
            assert sol.phase is Phase.MottInsulator

    def test_strong_hopping_is_superfluid(self):
        sol = minimize_over_psi(params(kappa=1.0, mu=9.5))
        assert sol.phase is Phase.Superfluid

    def test_small_hopping_inside_first_lobe_is_mott(self):
        # mu strictly inside the first nonempty zero-hopping interval
        lo = lobe_boundary_zero_hopping(1, 10.0)
        hi = lobe_boundary_zero_hopping(2, 10.0)
        mu = 0.5 * (lo + hi)
        sol = minimize_over_psi(params(kappa=1e-3, mu=mu))
        assert sol.phase is Phase.MottInsulator
        # the Mott ground state is the manifold-2 lower branch; its mean
        # excitation value carries the weight of the singly-excited component
        weights = ground_manifold_weights(params(kappa=1e-3, mu=mu))
        assert int(np.argmax(weights)) == 2
        assert 2.0 < sol.rho < 2.5

    def test_energy_never_above_zero_psi_value(self):
        for kappa, mu_rel in [(0.0, -0.85), (0.03, -0.85), (0.08, -0.9), (0.3, -0.5)]:
            p = params(kappa=kappa, mu=10.0 + mu_rel)
            sol = minimize_over_psi(p)
            e0 = ground_energy_at_psi(p)  # psi defaults to 0
            assert sol.e_ground <= e0 + 1e-12
            if sol.phase is Phase.MottInsulator:
                assert sol.e_ground == pytest.approx(e0, abs=1e-12)

    def test_superfluid_point_detail(self):
        sol = minimize_over_psi(params(kappa=0.05, mu=9.15))
        assert sol.phase is Phase.Superfluid
        assert sol.psi_min == pytest.approx(0.4232, abs=2e-3)
        assert sol.converged
        assert sol.top_manifold_weight <= 1e-6

    def test_truncation_guard_flags_small_cutoff(self):
        sol = minimize_over_psi(params(kappa=0.5, mu=9.8, n_max=6))
        assert not sol.converged
        assert sol.top_manifold_weight > 1e-6

    def test_phase_threshold_definition(self):
        sol = minimize_over_psi(params(kappa=0.05, mu=9.15))
        assert (sol.psi_min > PSI_THRESHOLD) == (sol.phase is Phase.Superfluid)


class TestMeanExcitations:
    def test_vacuum_lobe_density_is_zero(self):
        rho = mean_excitations(params(kappa=1e-3, mu=8.5))
        assert rho == pytest.approx(0.0, abs=1e-9)

    def test_zero_hopping_matches_expectation_value(self):
        # -dE/dmu equals the ground-state expectation of (p + m(N-m+1));
        # independent oracle: eigenvector of the dense matrix
        p = params(kappa=0.0, mu=9.15)
        rho_fd = mean_excitations(p)
        pair = ground_state(build_mean_field_matrix(p))
        weight = pair.vector**2
        expectation = sum(
            weight[basis_index(m, ph, p.n_max)] * (ph + m * (p.N - m + 1))
            for m in range(p.N + 1)
            for ph in range(p.n_max + 1)
        )
        assert rho_fd == pytest.approx(expectation, abs=1e-7)

    def test_density_is_not_integer_inside_excited_lobes(self):
        # the chemical potential couples to p + m(N-m+1), which the atom-photon
        # ladder does not conserve, so Mott plateaus sit between integers
        rho = mean_excitations(params(kappa=1e-3, mu=9.15))
        assert abs(rho - round(rho)) > 0.3

    def test_density_jumps_at_lobe_boundary(self):
        x = 10.0
        boundary = lobe_boundary_zero_hopping(2, x)
        below = mean_excitations(params(kappa=0.0, mu=boundary - 1e-3))
        above = mean_excitations(params(kappa=0.0, mu=boundary + 1e-3))
        assert above - below > 0.9  # manifold 2 -> 3

    def test_probe_flags_large_psi_jump(self, monkeypatch):
        # the transition here is continuous, so force a jump to exercise the flag
        import dickebh.meanfield as mf

        real = mf.minimize_over_psi

        def jumpy(p):
            sol = real(p)
            if p.mu > 9.15:
                return mf.MeanFieldSolution(
                    psi_min=sol.psi_min + 0.5, e_ground=sol.e_ground, rho=sol.rho,
                    phase=Phase.Superfluid, n_max_used=sol.n_max_used,
                    converged=sol.converged, top_manifold_weight=sol.top_manifold_weight,
                )
            return sol

        monkeypatch.setattr(mf, "minimize_over_psi", jumpy)
        probe = mf.density_probe(params(kappa=1e-3, mu=9.15))
        assert probe.discontinuous

    def test_smooth_region_probe_is_continuous(self):
        probe = density_probe(params(kappa=1e-3, mu=9.15))
        assert not probe.discontinuous


class TestConvergence:
    def test_monotone_nonincreasing(self):
        points = convergence_study(params(kappa=0.05, mu=9.15), range(6, 26, 3))
        energies = [e for _, e in points]
        assert all(b <= a + 1e-12 for a, b in zip(energies, energies[1:]))

    def test_zero_hopping_converges_at_occupied_manifold(self):
        # at kappa=0 the ground state lives in one manifold; any cutoff that
        # contains it gives the exact energy
        points = convergence_study(params(kappa=0.0, mu=9.15), [2, 3, 4, 5, 6])
        energies = [e for _, e in points]
        np.testing.assert_allclose(energies, energies[0], atol=1e-13)
        assert first_converged(points) == 3

    def test_requires_increasing_cutoffs(self):
        with pytest.raises(ValueError):
            convergence_study(params(), [5, 5, 6])

    def test_first_converged_none_when_still_moving(self):
        points = [(2, -1.0), (3, -2.0), (4, -3.0)]
        assert first_converged(points) is None


def test_manifold_weights_sum_to_one():
    w = ground_manifold_weights(params(kappa=0.05, mu=9.15, psi=0.4))
    assert w.sum() == pytest.approx(1.0, abs=1e-12)
    assert w.min() >= 0.0
