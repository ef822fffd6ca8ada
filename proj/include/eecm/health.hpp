#pragma once

#include "eecm/params.hpp"

namespace eecm {

struct HealthReport {
    double t_s = 0.0;
    double lam_p_pct = 0.0;
    double lam_n_pct = 0.0;
    double lli_pct = 0.0;
    double q_cell_ah = 0.0;
    double soh = 0.0;
    double n_li_mol = 0.0;
    bool negative_mode_flag = false; // any mode below -1 % (estimation noise)
};

// LAM = (1 - q_aged/q_fresh) * 100. Throws ArgumentError when q_fresh <= 0.
double lam_pct(double q_aged_ah, double q_fresh_ah);

// n_Li = 3600/F (z_p Qp + z_n Qn), with the electrode SOLs mapped from the
// given SOC through the windows. SOC-invariant when the windows balance.
double lithium_inventory_mol(const EsohParams& esoh, double soc);

// LLI = (1 - n_aged/n_fresh) * 100. Negative values are reported as-is.
double lli_pct(double n_aged_mol, double n_fresh_mol);

// SOH = Q_aged/Q_fresh with Q from the useful electrode capacity.
double soh_fraction(const EsohParams& aged, double q_fresh_ah);

HealthReport make_report(const EsohParams& estimated, const EsohParams& fresh, double t_s);

} // namespace eecm
