#include <cmath>
#include <sstream>

#include <gtest/gtest.h>

#include <squidbath/spectroscopy.hpp>

using namespace squidbath;

namespace {

DeviceInputs harmonic() {
    DeviceInputs in;
    in.josephson_energy_J = 0.0;
    return in;
}

SweepSpec small_spec() {
    SweepSpec s;
    s.phi_grid = linspace(0.0, 1.0, 11);
    s.g_grid = {1.0, 1.8};
    s.levels = 3;
    s.space = FockSpace(48, 12);
    return s;
}

}  // namespace

TEST(Linspace, Endpoints) {
    const auto v = linspace(0.0, 1.0, 21);
    ASSERT_EQ(v.size(), 21u);
    EXPECT_EQ(v.front(), 0.0);
    EXPECT_EQ(v.back(), 1.0);
    EXPECT_EQ(v[10], 0.5);
    EXPECT_EQ(linspace(0.3, 0.9, 1), std::vector<double>{0.3});
}

TEST(Csv, FormatAndLayout) {
    EXPECT_EQ(format_double(1.0), "1.0000000000000000e+00");
    EXPECT_EQ(format_double(-0.1), "-1.0000000000000001e-01");
    EXPECT_EQ(format_double(NAN), "nan");
    CsvTable t;
    t.add_meta("k", "v");
    t.columns = {"a", "b"};
    t.rows = {{"1", "2"}};
    EXPECT_EQ(to_csv_string(t), "# k=v\na,b\n1,2\n");
}

TEST(SpectrumSweep, RejectsBadSpecs) {
    SweepSpec s = small_spec();
    s.phi_grid = {0.2, 0.1};
    EXPECT_THROW(spectrum_sweep(s, DeviceInputs{}), std::invalid_argument);
    s = small_spec();
    s.g_grid.clear();
    EXPECT_THROW(spectrum_sweep(s, DeviceInputs{}), std::invalid_argument);
    s = small_spec();
    s.levels = 0;
    EXPECT_THROW(spectrum_sweep(s, DeviceInputs{}), std::invalid_argument);
    s.levels = 49;
    EXPECT_THROW(spectrum_sweep(s, DeviceInputs{}), std::invalid_argument);
}

TEST(SpectrumSweep, HarmonicLevelsAreFlat) {
    SweepSpec s = small_spec();
    s.include = TermSet::none();
    const SweepResult r = spectrum_sweep(s, harmonic());
    ASSERT_EQ(r.rows.size(), 11u * 2u * 3u);
    for (const auto& row : r.rows) EXPECT_NEAR(row.energy, row.level + 0.5, 1e-9);
}

TEST(SpectrumSweep, HarmonicWithCorrectionsIsFluxIndependent) {
    SweepSpec s = small_spec();
    const SweepResult r = spectrum_sweep(s, harmonic());
    for (const auto& row : r.rows) {
        const auto& ref = r.rows[(row.g == 1.0 ? 0 : 33) + row.level];
        EXPECT_EQ(row.energy, ref.energy);
    }
}

TEST(SpectrumSweep, OrderingSortedAndDeterministicAcrossThreads) {
    const SweepSpec s = small_spec();
    const SweepResult a = spectrum_sweep(s, DeviceInputs{}, SineCoupling::kJosephsonScaled, 1);
    const SweepResult b = spectrum_sweep(s, DeviceInputs{}, SineCoupling::kJosephsonScaled, 3);
    const SquidParams p = derive_params(DeviceInputs{});
    EXPECT_EQ(to_csv_string(a.to_csv(p)), to_csv_string(b.to_csv(p)));
    EXPECT_TRUE(a.failures.empty());
    for (std::size_t i = 0; i < a.rows.size(); ++i) {
        if (a.rows[i].level > 0) EXPECT_LE(a.rows[i - 1].energy, a.rows[i].energy);
    }
    EXPECT_EQ(a.rows.front().g, 1.0);
    EXPECT_EQ(a.rows[3].phi, 0.1);
}

TEST(SpectrumSweep, MirrorSymmetricGrid) {
    SweepSpec s = small_spec();
    s.g_grid = {1.8};
    s.levels = 5;
    const SweepResult r = spectrum_sweep(s, DeviceInputs{});
    const std::size_t n = s.phi_grid.size();
    for (std::size_t i = 0; i < n; ++i) {
        for (std::size_t k = 0; k < 5; ++k) {
            const double a = r.rows[i * 5 + k].energy;
            const double b = r.rows[(n - 1 - i) * 5 + k].energy;
            EXPECT_NEAR(a, b, 1e-9 * std::max(1.0, std::abs(a)));
        }
    }
}

TEST(SpectrumSweep, ReferenceGroundEnergy) {
    SweepSpec s;
    s.phi_grid = {0.5};
    s.g_grid = {1.8};
    s.levels = 1;
    const SweepResult r = spectrum_sweep(s, DeviceInputs{});
    ASSERT_EQ(r.rows.size(), 1u);
    EXPECT_NEAR(r.rows[0].energy, 3.8, 0.15);
}

TEST(SpectrumSweep, FlagsUnboundedSqueezing) {
    SweepSpec s = small_spec();
    s.phi_grid = {0.5};
    s.g_grid = {1.8, 3.0};
    const SweepResult r = spectrum_sweep(s, DeviceInputs{});
    EXPECT_EQ(r.unbounded_g, std::vector<double>{3.0});
    EXPECT_TRUE(squeezing_unbounded(derive_params(DeviceInputs{}).with_coupling(3.0)));
    EXPECT_FALSE(squeezing_unbounded(derive_params(DeviceInputs{}).with_coupling(2.87)));
    EXPECT_TRUE(squeezing_unbounded(derive_params(DeviceInputs{}).with_coupling(2.875)));
    s.include = TermSet{false, true, true};
    EXPECT_TRUE(spectrum_sweep(s, DeviceInputs{}).unbounded_g.empty());
}

TEST(Spiderweb, ReferenceValuesInAxisOrder) {
    const SpiderwebResult r = spiderweb(DeviceInputs{}, FockSpace(128, 32));
    const std::array<double, 8> expected = {3.8, 5.6, 5.7, 4.7, 5.4, 4.8, 3.8, 5.5};
    const auto& order = spiderweb_configurations();
    for (std::size_t i = 0; i < 8; ++i) {
        EXPECT_EQ(r.entries[i].include, order[i]);
        EXPECT_NEAR(r.entries[i].energy, expected[i], 0.15) << order[i].label();
    }
    EXPECT_EQ(order[0], TermSet::all());
    EXPECT_EQ(order[1], TermSet::none());
    // Contributions are not additive.
    EXPECT_GT(std::abs(r.residual_xp_ps), 1e-3);
    EXPECT_NE(r.residual_xp_xs, 0.0);
}

TEST(Spiderweb, CsvHasEightRows) {
    const SpiderwebResult r = spiderweb(DeviceInputs{}, FockSpace(64, 16), SineCoupling::kJosephsonScaled, 2);
    const CsvTable t = r.to_csv(derive_params(DeviceInputs{}), FockSpace(64, 16));
    ASSERT_EQ(t.rows.size(), 8u);
    EXPECT_EQ(t.rows[0][0], "full");
    EXPECT_EQ(t.rows[1][0], "H0");
}

TEST(Susceptibility, HarmonicIsZero) {
    SusceptibilityOptions o;
    o.space = FockSpace(48, 12);
    const auto r = susceptibility(harmonic(), linspace(0.0, 1.0, 5), {0.5, 1.8}, o);
    for (const auto& row : r.rows) {
        EXPECT_LE(std::abs(row.chi0), 1e-10);
        EXPECT_LE(std::abs(row.chi0_sum_over_states), 1e-10);
        EXPECT_FALSE(row.step_too_large);
    }
}

TEST(Susceptibility, RejectsBadStep) {
    SusceptibilityOptions o;
    o.fd_step = 0.1;
    EXPECT_THROW(susceptibility(DeviceInputs{}, {0.5}, {1.8}, o), std::invalid_argument);
    o.fd_step = 0.0;
    EXPECT_THROW(susceptibility(DeviceInputs{}, {0.5}, {1.8}, o), std::invalid_argument);
}

TEST(Susceptibility, AgreesWithSumOverStates) {
    SusceptibilityOptions o;
    o.space = FockSpace(64, 16);
    const auto r = susceptibility(DeviceInputs{}, {0.2, 0.35, 0.5}, {1.0, 1.8}, o);
    ASSERT_EQ(r.rows.size(), 6u);
    for (const auto& row : r.rows) {
        EXPECT_LE(row.self_consistency, 0.01);
        EXPECT_FALSE(row.step_too_large);
        // Resolved step error plus second-order FD bias.
        EXPECT_NEAR(row.chi0, row.chi0_sum_over_states, 1e-2 * std::abs(row.chi0_sum_over_states))
            << row.phi << " " << row.g;
        EXPECT_NEAR(row.chi0_over_L, row.chi0 / 3e-10, 1e-12 * std::abs(row.chi0_over_L));
    }
    // Tunnelling doublet at half flux: sharp positive peak.
    EXPECT_GT(r.rows[2].chi0, 1e3);
    EXPECT_LT(r.rows[2].fd_step, 1.0 / 400.0);
    EXPECT_EQ(r.rows[0].fd_step, 1.0 / 400.0);
}

TEST(Susceptibility, UnresolvableDoubletIsFlagged) {
    // Doublet splitting ~1e-11 at g = 2.5: below what double-precision differences resolve.
    const auto r = susceptibility(DeviceInputs{}, {0.5}, {2.5});
    ASSERT_EQ(r.rows.size(), 1u);
    EXPECT_TRUE(r.rows[0].step_too_large);
    EXPECT_TRUE(r.any_step_too_large());
    EXPECT_TRUE(std::isfinite(r.rows[0].richardson_error));
    EXPECT_GT(r.rows[0].chi0_sum_over_states, 0.0);
    const CsvTable t = r.to_csv(derive_params(DeviceInputs{}), SusceptibilityOptions{});
    EXPECT_EQ(t.rows[0][7], "1");
}

TEST(Convergence, HarmonicExact) {
    const auto rows = convergence_audit(harmonic(), {8, 16, 32}, 4, TermSet::none());
    for (const auto& r : rows) EXPECT_NEAR(r.energies[0], 0.5, 1e-12);
    EXPECT_TRUE(std::isnan(rows[0].delta_e0));
}

TEST(Convergence, ReferenceDevice) {
    const auto rows = convergence_audit(DeviceInputs{}, {32, 48, 64, 128, 192}, 32);
    ASSERT_EQ(rows.size(), 5u);
    EXPECT_LT(std::abs(rows[4].energies[0] - rows[3].energies[0]), 1e-6);
    for (std::size_t k = 0; k < 5; ++k) EXPECT_LT(std::abs(rows[4].energies[k] - rows[3].energies[k]), 1e-6);
    // |dE0| shrinks until it reaches roundoff.
    for (std::size_t i = 2; i < rows.size(); ++i) {
        EXPECT_LE(std::abs(rows[i].delta_e0), 1.1 * std::abs(rows[i - 1].delta_e0) + 1e-12);
    }
    EXPECT_THROW(convergence_audit(DeviceInputs{}, {64, 32}, 8), std::invalid_argument);
    const CsvTable t = convergence_csv(rows, derive_params(DeviceInputs{}), 32);
    EXPECT_EQ(t.rows.size(), 5u);
    EXPECT_EQ(t.columns.size(), 7u);
}
