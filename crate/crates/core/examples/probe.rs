use voliv::edgeworth::atm_asymptotics;
use voliv::models::{CgmyReturnParams, GammaReturnParams, ModelSpec};
use voliv::pricer::{figure_theta_grid, term_structure, TermStructureConfig};
use voliv::numerics::QuadratureSpec;

fn main() {
    let cfg = TermStructureConfig::default();
    let quad = QuadratureSpec::default();
    let grid = figure_theta_grid();
    let mut models: Vec<(String, ModelSpec)> = Vec::new();
    for ab in [-0.1, 0.4, 0.6] {
        models.push((format!("gamma abar={ab}"), ModelSpec::GammaReturn(GammaReturnParams {
            c_k: 3.0, c_kbar: 0.5, c_gamma: 0.1, alpha: -0.2, alpha_bar: ab })));
    }
    for ag in [-0.5, 0.0, 0.2] {
        models.push((format!("cgmy ag={ag}"), ModelSpec::CgmyReturn(CgmyReturnParams {
            c_c: 0.1, c_g: 0.5, c_m: 5.0, alpha_m: -0.6, alpha_g: ag, y: 1.5 })));
    }
    for (name, model) in &models {
        let (ts, _) = term_structure(model, &grid, &cfg).unwrap();
        println!("== {name}");
        for i in 0..ts.thetas.len() {
            let theta = ts.thetas[i];
            let c = model.cumulants(theta, &quad).unwrap();
            let (skew, _) = atm_asymptotics(&c);
            // exponents of the two skew terms
            let e3 = c.beta1 - c.beta0;
            let e4 = c.beta2;
            let leading = if (e3 - e4).abs() < 1e-12 {
                skew.value
            } else if e3 < e4 {
                skew.term("kappa3").unwrap()
            } else {
                skew.term("kappa4").unwrap()
            };
            let rel_full = (ts.skew_numeric[i] - ts.skew_asym[i]).abs() / ts.skew_numeric[i].abs();
            let rel_lead = (ts.skew_numeric[i] - leading).abs() / ts.skew_numeric[i].abs();
            if theta <= 0.056 {
                println!("  theta {:9.6} num {:12.6} full-asym rel {:8.5} leading-asym rel {:8.5}",
                    theta, ts.skew_numeric[i], rel_full, rel_lead);
            }
        }
    }
}
