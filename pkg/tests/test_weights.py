import math
from fractions import Fraction

import mpmath
import pytest

from sgt import builtin, classify, from_values, load_weights, save_weights, size_biased, span
from sgt.errors import ValidationError
from sgt.weights import phi_series, psi


def zeta_oracle_nu(alpha):
    # independent route: nu = zeta(alpha-1) / (1 + zeta(alpha))
    with mpmath.workprec(128):
        return float(mpmath.zeta(alpha - 1) / (1 + mpmath.zeta(alpha)))


class TestClassify:
    def test_uniform_is_critical_geometric(self):
        law = classify(builtin("uniform"))
        assert law.type_tag == "I"
        assert law.tau == Fraction(1, 2)
        assert law.mu == 1
        assert law.sigma2 == 2
        assert law.exact
        # pi_k = 2^-(k+1), closed form from phi = 1/(1-z)
        for k in range(10):
            assert law.pmf(k) == Fraction(1, 2 ** (k + 1))

    def test_powerlaw3_is_subcritical(self):
        law = classify(builtin("powerlaw", alpha=3))
        assert law.type_tag == "II"
        assert law.tau == Fraction(1)
        nu = zeta_oracle_nu(3)
        assert float(law.nu) == pytest.approx(nu, abs=1e-13)
        assert float(law.mu) == pytest.approx(0.7469988920304526, abs=1e-12)
        assert law.sigma2 == math.inf
        # pi_0 = 1/(1 + zeta(3))
        with mpmath.workprec(128):
            pi0 = float(1 / (1 + mpmath.zeta(3)))
        assert law.pmf(0) == pytest.approx(pi0, abs=1e-14)

    def test_factorial_collapses_to_point_mass(self):
        law = classify(builtin("factorial", alpha=1))
        assert law.weights.weight(4) == 24
        assert law.weights.radius == 0
        assert law.type_tag == "III"
        assert law.pmf(0) == 1
        assert law.mu == 0

    def test_motzkin_fullbinary_cayley(self):
        m = classify(builtin("motzkin"))
        assert (m.type_tag, m.tau, m.sigma2) == ("I", 1, Fraction(2, 3))
        assert m.pmf(1) == Fraction(1, 3)
        b = classify(builtin("fullbinary"))
        assert (b.type_tag, b.tau, b.sigma2) == ("I", 1, 1)
        assert b.pmf(0) == b.pmf(2) == Fraction(1, 2)
        c = classify(builtin("cayley"))
        assert c.type_tag == "I"
        assert c.pmf(0) == pytest.approx(math.exp(-1), abs=1e-14)
        assert float(c.sigma2) == pytest.approx(1.0, abs=1e-12)

    def test_bisection_families(self):
        # alpha in (2, 3] with nu > 1 forces a strictly interior root
        law = classify(builtin("powerlaw", alpha=2.5))
        assert law.type_tag == "I"
        assert 0 < float(law.tau) < 1
        assert abs(float(psi(law.weights, law.tau)) - 1) < 1e-10
        # finite-support custom weights, root solved numerically
        law2 = classify(from_values({0: 1, 2: Fraction(1, 2), 4: Fraction(1, 4)}))
        assert law2.type_tag == "I"
        assert abs(float(psi(law2.weights, law2.tau)) - 1) < 1e-10

    def test_deterministic(self):
        a = classify(builtin("powerlaw", alpha=3))
        b = classify(builtin("powerlaw", alpha=3))
        assert (a.tau, a.nu, a.mu, a.sigma2, a.phi_tau) == (b.tau, b.nu, b.mu, b.sigma2, b.phi_tau)
        assert a.pmf_upto(50) == b.pmf_upto(50)

    def test_validation(self):
        with pytest.raises(ValidationError):
            from_values({0: 0, 2: 1})  # omega_0 must be positive
        with pytest.raises(ValidationError):
            from_values({0: 1, 1: 1})  # no k >= 2
        with pytest.raises(ValidationError):
            from_values({0: 1, 2: -1})
        with pytest.raises(ValidationError):
            builtin("nope")


class TestSizeBiased:
    def test_geometric(self):
        sb = size_biased(classify(builtin("uniform")))
        assert sb.infinity_mass == 0
        assert sb.finite_pmf(1) == Fraction(1, 4)

    def test_type_iii_all_infinity(self):
        sb = size_biased(classify(builtin("factorial", alpha=1)))
        assert sb.infinity_mass == 1

    def test_powerlaw3_infinity_mass(self):
        sb = size_biased(classify(builtin("powerlaw", alpha=3)))
        assert float(sb.infinity_mass) == pytest.approx(1 - zeta_oracle_nu(3), abs=1e-12)
        assert float(sb.infinity_mass) == pytest.approx(0.2530011079695474, abs=1e-12)

    def test_masses_sum_to_one(self):
        for fam in ("uniform", "motzkin"):
            law = classify(builtin(fam))
            sb = size_biased(law)
            total = sum(sb.finite_pmf(k) for k in range(1, 200)) + sb.infinity_mass
            assert abs(float(total) - 1) < 1e-10


class TestSpan:
    def test_examples(self):
        assert span(from_values({0: 1, 2: 1})) == 2
        assert span(builtin("uniform")) == 1
        assert span(from_values({0: 1, 3: 1, 6: 1})) == 3

    def test_admissible(self):
        w = from_values({0: 1, 2: 1})
        assert [n for n in range(1, 9) if w.admissible(n)] == [1, 3, 5, 7]


class TestBuiltin:
    def test_uniform(self):
        w = builtin("uniform")
        assert w.weight(17) == 1 and w.radius == 1

    def test_factorial(self):
        w = builtin("factorial", alpha=1)
        assert w.weight(5) == 120 and w.radius == 0

    def test_powerlaw(self):
        w = builtin("powerlaw", alpha=3)
        assert w.weight(0) == 1 and w.weight(2) == Fraction(1, 8) and w.radius == 1

    def test_parameter_ranges(self):
        with pytest.raises(ValidationError):
            builtin("powerlaw", alpha=1)
        with pytest.raises(ValidationError):
            builtin("factorial", alpha=0)


class TestInvariants:
    TYPE_I = ("uniform", "motzkin", "fullbinary", "cayley")

    def test_psi_at_tau(self):
        for fam in self.TYPE_I:
            law = classify(builtin(fam))
            assert abs(float(psi(law.weights, law.tau)) - 1) <= 1e-10, fam

    def test_pmf_sums_with_tail(self):
        for fam in self.TYPE_I + ("powerlaw",):
            law = classify(builtin(fam) if fam != "powerlaw" else builtin("powerlaw", alpha=3))
            K = law.truncation_k or 512
            partial = sum(law.pmf_upto(K))
            if law.weights.finite_support:
                tail = 0.0
            else:
                corr, bound = law.weights.tail_bound(law.tau, K, 0)
                tail = (float(corr) + float(bound)) / float(law.phi_tau)
            assert abs(float(partial) + tail - 1) <= 1e-10, fam

    def test_mu_recomputed_type_ii(self):
        # direct summation of k pi_k with an integral tail bracket
        law = classify(builtin("powerlaw", alpha=3))
        K = 20000  # bracket width ~ K^-2, far below the 1e-8 gate
        with mpmath.workprec(80):
            phi = 1 + mpmath.zeta(3)
            partial = sum(k * mpmath.mpf(k) ** -3 for k in range(1, K + 1)) / phi
            lo = partial + mpmath.mpf(K + 1) ** -1 / phi
            hi = partial + mpmath.mpf(K) ** -1 / phi
        assert float(lo) - 1e-8 <= float(law.mu) <= float(hi) + 1e-8

    def test_mu_is_min_nu_one(self):
        for fam, alpha in (("uniform", None), ("powerlaw", 3), ("powerlaw", 2.5), ("factorial", 1)):
            law = classify(builtin(fam) if alpha is None else builtin(fam, alpha=alpha))
            assert float(law.mu) == pytest.approx(min(float(law.nu), 1.0), abs=1e-14)


class TestWeightFiles:
    def test_round_trip(self, tmp_path):
        w = from_values({0: 1, 2: Fraction(1, 2), 5: Fraction("0.125")})
        path = tmp_path / "w.tsv"
        save_weights(w, path)
        w2 = load_weights(path)
        assert w2.values == w.values
        assert w2.radius == w.radius

    def test_decimal_and_rational_entries(self, tmp_path):
        path = tmp_path / "w.tsv"
        path.write_text("radius=1\n0\t1\n3\t3/4\n4\t0.25\n")
        w = load_weights(path)
        assert w.values[3] == Fraction(3, 4)
        assert w.values[4] == Fraction(1, 4)
        assert w.radius == 1

    def test_missing_radius(self, tmp_path):
        path = tmp_path / "w.tsv"
        path.write_text("0\t1\n2\t1\n")
        with pytest.raises(ValidationError):
            load_weights(path)

    def test_bad_line(self, tmp_path):
        path = tmp_path / "w.tsv"
        path.write_text("radius=inf\n0 1\n")
        with pytest.raises(ValidationError):
            load_weights(path)
