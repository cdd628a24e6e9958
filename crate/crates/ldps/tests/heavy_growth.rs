//! One heavy-growth parameter point (1/α > 3, support mean ~ 10⁷): the
//! windowed machinery must stay accurate where brute-force scans cannot.

use ldps::deviation::{scaled_cgf, RateModel};
use ldps::family::{presets, GrowthSpec};

#[test]
fn heavy_growth_law_stays_consistent() {
    let (fam, _) = presets::p2(2.21, &[], 0.3, 0.9854693442646655).unwrap();
    let growth = GrowthSpec::power(0.3, 2.21).unwrap();
    let rm = RateModel::new(growth).unwrap();
    let t = 41.46242077493051;
    let mean = fam.family_mean(t).unwrap();
    let v = rm.speed(&fam, t);
    assert!(mean > 1e6, "mean {mean}");
    // the scaled mean sits near Λ'(0) once v is this large
    let ratio = mean / v;
    assert!(
        (ratio - rm.d1()).abs() / rm.d1() < 0.01,
        "mean/v = {ratio} vs {}",
        rm.d1()
    );
    let theta = 0.25;
    let cgf = scaled_cgf(&fam, &rm, theta, t).unwrap();
    let lam = rm.lambda_of_theta(theta);
    assert!((cgf - lam).abs() / lam < 0.01, "cgf {cgf} vs {lam}");
}
