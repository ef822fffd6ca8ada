#include "eecm/health.hpp"

#include "eecm/errors.hpp"

namespace eecm {

double lam_pct(double q_aged_ah, double q_fresh_ah) {
    if (!(q_fresh_ah > 0.0)) throw ArgumentError("fresh capacity must be positive");
    return (1.0 - q_aged_ah / q_fresh_ah) * 100.0;
}

double lithium_inventory_mol(const EsohParams& esoh, double soc) {
    if (soc < 0.0 || soc > 1.0) throw ArgumentError("soc must lie in [0,1]");
    esoh.validate();
    const SolPair z = sol_from_soc(esoh, soc);
    return 3600.0 / kFaraday * (z.thp * esoh.qp_ah + z.thn * esoh.qn_ah);
}

double lli_pct(double n_aged_mol, double n_fresh_mol) {
    if (!(n_fresh_mol > 0.0)) throw ArgumentError("fresh inventory must be positive");
    return (1.0 - n_aged_mol / n_fresh_mol) * 100.0;
}

double soh_fraction(const EsohParams& aged, double q_fresh_ah) {
    if (!(q_fresh_ah > 0.0)) throw ArgumentError("fresh capacity must be positive");
    return aged.useful_capacity_ah() / q_fresh_ah;
}

HealthReport make_report(const EsohParams& estimated, const EsohParams& fresh, double t_s) {
    HealthReport r;
    r.t_s = t_s;
    r.lam_p_pct = lam_pct(estimated.qp_ah, fresh.qp_ah);
    r.lam_n_pct = lam_pct(estimated.qn_ah, fresh.qn_ah);
    r.n_li_mol = lithium_inventory_mol(estimated, 0.0);
    r.lli_pct = lli_pct(r.n_li_mol, lithium_inventory_mol(fresh, 0.0));
    r.q_cell_ah = estimated.useful_capacity_ah();
    r.soh = soh_fraction(estimated, fresh.useful_capacity_ah());
    r.negative_mode_flag =
        r.lam_p_pct < -1.0 || r.lam_n_pct < -1.0 || r.lli_pct < -1.0;
    return r;
}

} // namespace eecm
