#pragma once

// Built-in evaluation engine for synchronous buck designs. Two independent
// routes produce the same PerformanceRecord: a closed-form CCM analysis and
// a time-stepped periodic steady-state simulation of the switched network.
// Both are pure functions; identical inputs give bit-identical outputs.

#include "buckopt/catalog.hpp"
#include "buckopt/common.hpp"

#include <optional>
#include <string>
#include <vector>

namespace buckopt {

/// Operating conditions, parameter ranges and constraint limits.
struct DesignSpec {
    double v_in = 48.0;        ///< input voltage, V
    double v_o = 12.0;         ///< output voltage, V
    double p_o = 100.0;        ///< rated output power, W
    double fs_min = 20e3;      ///< switching frequency range, Hz
    double fs_max = 200e3;
    double l_min_uh = 30.0;    ///< inductance range, uH
    double l_max_uh = 2000.0;
    double c_min_uf = 20.0;    ///< capacitance range, uF
    double c_max_uf = 1000.0;
    double vol_lim_cm3 = 7.0;  ///< L+C volume budget
    double dvo_lim = 0.01;     ///< output voltage ripple limit, fraction of V_o
    double dil_lim = 0.10;     ///< inductor current ripple limit, fraction of I_o
    double dead_time_s = 200e-9;

    [[nodiscard]] double i_o() const { return p_o / v_o; }
    void validate() const;
};

/// MOSFET pair parameters; defaults approximate a 100 V / 5.6 mOhm device.
struct SwitchParams {
    double r_dson = 5.6e-3;  ///< channel on-resistance, ohm
    double v_sd = 1.0;       ///< body-diode forward drop, V
    double t_r = 100e-9;     ///< voltage/current overlap rise time, s
    double t_f = 100e-9;     ///< overlap fall time, s
    double q_rr = 170e-9;    ///< reverse-recovery charge, C
    double c_oss = 430e-12;  ///< output capacitance, F

    void validate() const;
};

/// One candidate design: frequency plus concrete catalog picks.
struct DesignPoint {
    double fs_hz = 0.0;
    InductorEntry inductor;
    CapBankEntry capacitor;
};

/// Loss terms, ripples and volume of an evaluated design.
struct PerformanceRecord {
    double p_ls1 = 0.0;    ///< high-side switch loss, W
    double p_ls2 = 0.0;    ///< low-side switch loss (incl. body diode), W
    double p_lcu = 0.0;    ///< inductor copper loss, W
    double p_lfe = 0.0;    ///< inductor core loss, W
    double p_lc = 0.0;     ///< capacitor ESR loss, W
    double dvo_pct = 0.0;  ///< output voltage ripple, fraction of V_o
    double dil_pct = 0.0;  ///< inductor current ripple, fraction of I_o
    double vol_cm3 = 0.0;  ///< inductor + capacitor volume
    double eta = 0.0;      ///< P_o / (P_o + total loss)
    double duty = 0.0;
    bool ccm = true;       ///< false when the current valley reaches zero

    [[nodiscard]] double total_loss() const { return p_ls1 + p_ls2 + p_lcu + p_lfe + p_lc; }
};

/// Transient integrator settings.
struct SimConfig {
    int steps_per_cycle = 1000;
    int max_cycles = 5000;
    double periodicity_tol = 1e-6;  ///< relative state change per cycle

    void validate() const;
};

/// Extra bookkeeping from the transient run, for conservation checks.
struct TransientDiagnostics {
    double mean_input_w = 0.0;      ///< source power over the settled cycle
    double mean_output_w = 0.0;     ///< load dissipation
    double integrated_loss_w = 0.0; ///< conduction + diode + copper + ESR
    double balance_rel_err = 0.0;   ///< |in - out - losses| / in
    int cycles_run = 0;
    int duty_updates = 0;
};

/// Sampled waveforms of the settled cycle (optional debug output).
struct Waveform {
    std::vector<double> t, i_l, v_c, v_o, i_c;
};

/// Closed-form evaluation. The duty cycle comes from a fixed-point solve of
/// the loss-inclusive volt-second balance; ripple uses the piecewise off-phase
/// slopes at mean current, so it tracks the transient engine. Designs whose
/// current valley dips below zero are flagged ccm = false; the synchronous
/// low-side switch keeps the CCM waveform shape valid for them.
[[nodiscard]] PerformanceRecord analytic_evaluate(const DesignPoint& point, const DesignSpec& spec,
                                                  const SwitchParams& sw);

/// Trapezoidal integration of the two-state switched network (S1 on, dead
/// time, S2 on, dead time) until start and end states of a cycle agree within
/// periodicity_tol, with an outer loop trimming the duty cycle so the mean
/// output voltage hits V_o. Throws SimError when max_cycles is exhausted.
[[nodiscard]] PerformanceRecord transient_evaluate(const DesignPoint& point, const DesignSpec& spec,
                                                   const SwitchParams& sw, const SimConfig& cfg,
                                                   TransientDiagnostics* diag = nullptr,
                                                   Waveform* wave = nullptr);

/// Writes a settled-cycle waveform as CSV (t, i_L, v_C, v_o, i_C).
void dump_waveform_csv(const Waveform& wave, const std::string& path);

/// Peak flux density check against the core's saturation limit.
struct SaturationCheck {
    double b_pk = 0.0;
    double b_sat = 0.0;
    bool warning = false;  ///< set above 0.9 * B_sat
};

[[nodiscard]] SaturationCheck check_saturation(const DesignPoint& point,
                                               const PerformanceRecord& record,
                                               const DesignSpec& spec);

}  // namespace buckopt
