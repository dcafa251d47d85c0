use std::f64::consts::PI;

use ds2_core::geometry::{DsParams, DsPoint};
use ds2_core::kernels::KernelConvention;
use ds2_core::testfn::io::{from_bytes, from_json, to_bytes, to_json};
use ds2_core::testfn::pairing::pair_indef_regularized;
use ds2_core::testfn::{bump, integral, laplace_beltrami, pair_indef, GridSpec, ModeBasis, Resolution, TestFunction};
use num_complex::Complex64;
use proptest::prelude::*;

fn grid() -> GridSpec {
    GridSpec::standard(1.0, Resolution::Half).unwrap()
}

fn bump_at(g: &GridSpec, (t, q): (f64, f64), widths: (f64, f64), amp: Complex64) -> TestFunction {
    let c = DsPoint::from_conformal(t * g.r, q, &DsParams::new(g.r).unwrap()).unwrap();
    bump(g, &c, (widths.0 * g.r, widths.1), amp).unwrap()
}

fn bump_strategy() -> impl Strategy<Value = ((f64, f64), (f64, f64), Complex64)> {
    (
        (-0.15..0.15f64, 0.0..2.0 * PI),
        (0.55..0.75f64, 1.5..2.5f64),
        (0.5..1.5f64, 0.0..2.0 * PI).prop_map(|(m, a)| Complex64::from_polar(m, a)),
    )
}

#[test]
fn mode_sum_agrees_with_position_space_sum() {
    let g = GridSpec::standard(1.0, Resolution::Default).unwrap();
    // spacelike-separated supports, so the unregularized kernel is smooth on them
    let f = bump_at(&g, (0.0, 1.0), (0.5, 1.0), Complex64::new(1.0, 0.3));
    let h = bump_at(&g, (0.0, 1.0 + PI), (0.5, 1.0), Complex64::new(0.7, -0.2));
    let conv = KernelConvention::SeriesLimit;
    let modal = pair_indef(&f, &h, conv).unwrap();
    let direct = pair_indef_regularized(&f, &h, 1e-9, conv).unwrap();
    assert!((modal - direct).norm() < 1e-6 * modal.norm(), "{modal} vs {direct}");
}

#[test]
fn convention_shift_is_rank_one() {
    // The two additive constants differ by ln 4 / (4 pi), which only sees the integrals.
    let g = grid();
    let f = bump_at(&g, (0.1, 0.5), (0.6, 2.0), Complex64::new(1.2, 0.0));
    let h = bump_at(&g, (-0.1, 2.5), (0.7, 1.8), Complex64::new(0.0, 0.8));
    let a = pair_indef(&f, &h, KernelConvention::SeriesLimit).unwrap();
    let b = pair_indef(&f, &h, KernelConvention::PaperClosedForm).unwrap();
    let want = integral(&f).conj() * integral(&h) * (4.0f64.ln() / (4.0 * PI));
    assert!((a - b - want).norm() < 1e-10 * want.norm(), "{} vs {want}", a - b);
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(12))]

    #[test]
    fn pairing_is_hermitian((c1, w1, a1) in bump_strategy(), (c2, w2, a2) in bump_strategy()) {
        let g = grid();
        let f = bump_at(&g, c1, w1, a1);
        let h = bump_at(&g, c2, w2, a2);
        let m = ModeBasis::new(&g, KernelConvention::SeriesLimit).unwrap();
        let (pf, ph) = (m.profile(&f).unwrap(), m.profile(&h).unwrap());
        let (fh, hf) = (m.pair(&pf, &ph), m.pair(&ph, &pf));
        prop_assert!((fh - hf.conj()).norm() < 1e-12 * (1.0 + fh.norm()));
        prop_assert!(m.pair(&pf, &pf).im.abs() < 1e-12 * m.pair(&pf, &pf).norm());
    }

    #[test]
    fn wave_operator_sees_only_the_integrals((c1, w1, a1) in bump_strategy(), (c2, w2, a2) in bump_strategy()) {
        let g = GridSpec::standard(1.0, Resolution::Default).unwrap();
        let f = bump_at(&g, c1, w1, a1);
        let h = bump_at(&g, c2, w2, a2);
        let lhs = pair_indef(&laplace_beltrami(&f).unwrap(), &h, KernelConvention::SeriesLimit).unwrap();
        let want = -integral(&f).conj() * integral(&h) / (4.0 * PI);
        prop_assert!((lhs - want).norm() < 1e-6 * want.norm(), "{} vs {}", lhs, want);
    }

    #[test]
    fn serialization_round_trips((c1, w1, a1) in bump_strategy(), real in any::<bool>()) {
        let g = grid();
        let amp = if real { Complex64::new(a1.norm(), 0.0) } else { a1 };
        let f = bump_at(&g, c1, w1, amp);
        let j = from_json(&to_json(&f).unwrap()).unwrap();
        prop_assert_eq!(j.values(), f.values());
        prop_assert_eq!(j.is_real(), f.is_real());
        let b = from_bytes(&to_bytes(&f)).unwrap();
        prop_assert_eq!(b.values(), f.values());
        prop_assert_eq!(b.is_real(), f.is_real());
    }
}

#[test]
fn corrupt_bytes_are_rejected() {
    let f = bump_at(&grid(), (0.0, 1.0), (0.6, 1.5), Complex64::new(1.0, 0.0));
    let b = to_bytes(&f);
    assert!(from_bytes(&b[..b.len() - 1]).is_err());
    let mut bad = b.clone();
    bad[0] ^= 0xff;
    assert!(from_bytes(&bad).is_err());
    assert!(from_json("{\"grid\": 1}").is_err());
}
