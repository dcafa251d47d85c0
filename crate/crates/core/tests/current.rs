use std::f64::consts::PI;

use ds2_core::current::{dual_field, relative_spread, slice_charge, smear, EvalGrid, KappaConvention};
use ds2_core::geometry::{DsParams, DsPoint};
use ds2_core::kernels::KernelConvention;
use ds2_core::testfn::{bump, GridSpec, Resolution};
use num_complex::Complex64;
use proptest::prelude::*;

fn slices(g: &GridSpec) -> Vec<f64> {
    let (a, b) = g.admissible_tau();
    (0..6).map(|i| a + (b - a) * (i as f64 + 0.5) / 6.0).collect()
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(8))]

    #[test]
    fn corrected_charge_is_conserved(
        r in prop::sample::select(vec![0.5, 1.0, 2.0]),
        (t, q) in (-0.15..0.15f64, 0.0..2.0 * PI),
        (wt, wq) in (0.55..0.75f64, 1.5..2.5f64),
        (m, ph) in (0.5..1.5f64, 0.0..2.0 * PI),
    ) {
        let g = GridSpec::standard(r, Resolution::Default).unwrap();
        let c = DsPoint::from_conformal(t * r, q, &DsParams::new(r).unwrap()).unwrap();
        let f = bump(&g, &c, (wt * r, wq), Complex64::from_polar(m, ph)).unwrap();
        let sf = smear(&f, KernelConvention::SeriesLimit).unwrap();
        let taus = slices(&g);
        let js = slice_charge(&sf, &taus, 2 * g.n_theta, Some(KappaConvention::Derived));
        prop_assert!(relative_spread(&js) < 1e-4, "spread {}", relative_spread(&js));
        // the charge only sees the zero-mode coefficient
        let want = -Complex64::i() * sf.c0 / (16.0 * PI);
        prop_assert!((js[0] - want).norm() < 1e-6 * want.norm());
    }
}

#[test]
fn kappa_conventions_agree_only_at_unit_radius() {
    let run = |r: f64, kappa| {
        let g = GridSpec::standard(r, Resolution::Default).unwrap();
        let c = DsPoint::from_conformal(0.1 * r, 2.0, &DsParams::new(r).unwrap()).unwrap();
        let f = bump(&g, &c, (0.6 * r, 1.5), Complex64::new(1.3, 0.4)).unwrap();
        let sf = smear(&f, KernelConvention::SeriesLimit).unwrap();
        relative_spread(&slice_charge(&sf, &slices(&g), 2 * g.n_theta, Some(kappa)))
    };
    assert!(run(1.0, KappaConvention::Paper) < 1e-4);
    assert!(run(2.0, KappaConvention::Derived) < 1e-4);
    assert!(run(2.0, KappaConvention::Paper) > 1e-3);
    assert!(run(1.0, KappaConvention::Derived) < 1e-4);
}

#[test]
fn dual_potential_winds_by_minus_eight_pi_charge() {
    let g = GridSpec::standard(1.5, Resolution::Default).unwrap();
    let c = DsPoint::from_conformal(0.0, 4.0, &DsParams::new(1.5).unwrap()).unwrap();
    let f = bump(&g, &c, (0.9, 2.0), Complex64::new(0.4, -1.1)).unwrap();
    let sf = smear(&f, KernelConvention::PaperClosedForm).unwrap();
    let taus = slices(&g);
    let eval = EvalGrid::new(g.r, taus[0], taus[5], 6, g.n_theta).unwrap();
    let d = dual_field(&sf, &eval, (taus[0], 0.0), KappaConvention::Derived).unwrap();
    let j = slice_charge(&sf, &taus[2..3], 2 * g.n_theta, Some(KappaConvention::Derived))[0];
    assert!((d.winding + 8.0 * PI * j).norm() < 1e-4 * j.norm(), "{} vs {}", d.winding, -8.0 * PI * j);
}
