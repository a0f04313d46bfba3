use acslm::cone_solver::*;
use acslm::indicial::{dim_H0, Branch};
use acslm::link_spectrum::{sphere_spectrum, EigenPair, LinkSpectrum};
use acslm::Error;
use proptest::prelude::*;

fn s2(c: f64, lambda_max: f64) -> LinkSpectrum {
    sphere_spectrum(2, c, lambda_max).unwrap()
}

fn neck() -> AcProfile {
    AcProfile::smoothed_neck(3, s2(1.0, 12.0)).unwrap()
}

/// Mode-0 neck solution with limits (1, 0) at (−∞, +∞).
fn arctan_oracle(t: f64) -> f64 {
    0.5 - t.atan() / std::f64::consts::PI
}

#[test]
fn radial_coefficients() {
    let cone = AcProfile::exact_cone(4, s2(1.0, 12.0)).unwrap();
    let op = radial_operator(&cone, 2.0).unwrap();
    for t in [1.0, 3.5, 40.0] {
        assert!((op.p(t) + 3.0 / t).abs() < 1e-15);
        assert!((op.q(t) - 2.0 / (t * t)).abs() < 1e-15);
    }
    let nk = neck();
    let op = radial_operator(&nk, 0.0).unwrap();
    for t in [-7.0, -0.3, 0.0, 2.0, 100.0] {
        assert!((op.p(t) + 2.0 * t / (1.0 + t * t)).abs() < 1e-14);
        assert_eq!(op.apply(t, 3.0, 0.0, 0.0), 0.0);
        let h = 1e-5;
        let fd = (op.p(t + h) - op.p(t - h)) / (2.0 * h);
        assert!((op.dp(t) - fd).abs() < 1e-7);
    }
    // the closed-form neck solution is annihilated
    let op = radial_operator(&nk, 0.0).unwrap();
    for t in [-3.0, 0.5, 9.0] {
        let pi = std::f64::consts::PI;
        let d1 = -1.0 / (pi * (1.0 + t * t));
        let d2 = 2.0 * t / (pi * (1.0 + t * t).powi(2));
        assert!(op.apply(t, arctan_oracle(t), d1, d2).abs() < 1e-15);
    }
    assert!(radial_operator(&nk, -1.0).is_err());
}

#[test]
fn radial_bases() {
    let b = harmonic_radial_basis(0.0, 3).unwrap();
    assert_eq!((b.a_plus, b.a_minus), (0.0, -1.0));
    let b = harmonic_radial_basis(2.0, 3).unwrap();
    assert!((b.a_plus - 1.0).abs() < 1e-15 && (b.a_minus + 2.0).abs() < 1e-15);
    let b = harmonic_radial_basis(6.0, 3).unwrap();
    assert!((b.a_plus - 2.0).abs() < 1e-15 && (b.a_minus + 3.0).abs() < 1e-15);
    assert!((b.eval(Branch::APlus, 3.0) - 9.0).abs() < 1e-12);
    assert!((b.eval(Branch::AMinus, 2.0) - 0.125).abs() < 1e-15);
}

#[test]
fn exact_cone_exponents() {
    for n in [3, 4, 5] {
        let cone = AcProfile::exact_cone(n, sphere_spectrum(n - 1, 1.0, 40.0).unwrap()).unwrap();
        for lambda in [2.0 * (n - 1) as f64, 0.7, 12.0] {
            let b = harmonic_radial_basis(lambda, n).unwrap();
            for (br, want) in [(Branch::APlus, b.a_plus), (Branch::AMinus, b.a_minus)] {
                let got = fit_radial_exponent(&cone, lambda, br, 1000.0).unwrap();
                assert!((got - want).abs() <= 1e-6 * want.abs(), "n={n} λ={lambda} {br:?}: {got} vs {want}");
            }
        }
    }
    assert!(fit_radial_exponent(&neck(), 0.0, Branch::APlus, 100.0).is_err());
}

#[test]
fn neck_counts_match_indicial() {
    let nk = neck();
    for (delta, want) in [(-1.1, 8), (-0.9, 2), (-0.5, 2), (0.5, 0)] {
        let r = bounded_harmonic_dim(&nk, delta, 6.0, 50.0).unwrap();
        assert_eq!(r.total, want, "δ={delta}");
        assert_eq!(r.total, dim_H0(delta, &nk.ends).unwrap());
        assert_eq!(r.modes.len(), 3);
    }
    assert_eq!(bounded_harmonic_dim(&nk, -1.1, 2.5, 50.0).unwrap().total, 8);
    assert_eq!(bounded_harmonic_dim(&nk, -0.9, 1.0, 50.0).unwrap().total, 2);
    // the decaying lines from the two ends stay transverse
    let r = bounded_harmonic_dim(&nk, 0.5, 6.0, 100.0).unwrap();
    assert!(r.modes.iter().all(|m| m.sine.map_or(true, |s| s > 1e-2)));
}

#[test]
fn capped_cone_counts_match_indicial() {
    for (n, c) in [(3, 1.0), (3, 2.0), (4, 1.0), (3, 0.7)] {
        let link = sphere_spectrum(n - 1, c, 40.0).unwrap();
        for amp in [0.0, 0.8] {
            let p = AcProfile::capped_cone(n, link.clone(), 1.5, amp).unwrap();
            for delta in [-2.3, -1.7, -1.2, -0.45, -0.2, 0.3, 0.8] {
                let Ok(want) = dim_H0(delta, &p.ends) else { continue };
                let got = bounded_harmonic_dim(&p, delta, 40.0, 60.0).unwrap();
                assert_eq!(got.total, want, "n={n} c={c} amp={amp} δ={delta}");
            }
        }
    }
}

#[test]
fn counting_preconditions() {
    let nk = neck();
    assert!(matches!(bounded_harmonic_dim(&nk, -1.0, 6.0, 50.0), Err(Error::ExceptionalWeight { .. })));
    assert!(matches!(bounded_harmonic_dim(&nk, -0.5, 6.0, 20.0), Err(Error::Argument(_))));
    assert!(matches!(bounded_harmonic_dim(&nk, -1.1, 1.0, 50.0), Err(Error::OutOfValidity { .. })));
    assert!(matches!(bounded_harmonic_dim(&nk, -0.5, 20.0, 50.0), Err(Error::Argument(_))));
    let cone = AcProfile::exact_cone(3, s2(1.0, 12.0)).unwrap();
    assert!(bounded_harmonic_dim(&cone, 0.5, 6.0, 50.0).is_err());
}

#[test]
fn profiles() {
    let other = s2(2.0, 12.0);
    let ends = acslm::indicial::EndSpectra::new(3, vec![s2(1.0, 12.0), other]).unwrap();
    assert!(matches!(AcProfile::new(Warp::SmoothedNeck, ends), Err(Error::Validation { .. })));
    assert!(AcProfile::capped_cone(3, s2(1.0, 12.0), -1.0, 0.5).is_err());
    let p = AcProfile::capped_cone(3, s2(1.0, 12.0), 2.0, 0.6).unwrap();
    let (w0, dw0, _) = p.w_derivs(0.0);
    assert_eq!((w0, dw0), (0.0, 1.0));
    for t in [2.0, 2.5, 30.0] {
        assert_eq!(p.w_derivs(t), (t, 1.0, 0.0));
    }
    assert!(p.w(1.0) > 1.0);
    let h = 1e-5;
    for t in [0.3, 1.2, 1.9] {
        let (_, dw, ddw) = p.w_derivs(t);
        assert!((dw - (p.w(t + h) - p.w(t - h)) / (2.0 * h)).abs() < 1e-8);
        let (_, dwp, _) = p.w_derivs(t + h);
        let (_, dwm, _) = p.w_derivs(t - h);
        assert!((ddw - (dwp - dwm) / (2.0 * h)).abs() < 1e-6);
    }
    let json = serde_json::to_string(&p.warp).unwrap();
    assert_eq!(json, r#"{"kind":"capped_cone","t0":2.0,"amp":0.6}"#);
}

#[test]
fn gluing_principle() {
    let g = glue_harmonic(&neck(), [1.0, 0.0], 1000.0).unwrap();
    let s = &g.solution;
    let mid = s.grid.len() / 2;
    assert_eq!(s.grid[mid], 0.0);
    assert!((s.values[mid] - 0.5).abs() <= 1e-6);
    let beta = g.decay_exponent.unwrap();
    assert!((beta + 1.0).abs() <= 0.1, "β = {beta}");
    assert!(g.fit_points >= 10);
    assert!(s.residual <= 1e-8);
    for (&t, &f) in s.grid.iter().zip(&s.values) {
        assert!((f - arctan_oracle(t)).abs() < 1e-5, "t={t}");
    }
    // discrete maximum principle: monotone, extremes at the cuts
    assert!(s.values.windows(2).all(|w| w[1] <= w[0]));
    let (lo, hi) = (s.values[s.values.len() - 1], s.values[0]);
    assert!(s.values.iter().all(|&f| f >= lo && f <= hi));
    assert!(hi <= 1.0 && lo >= 0.0);
}

#[test]
fn gluing_trivial_data() {
    let g = glue_harmonic(&neck(), [2.5, 2.5], 200.0).unwrap();
    assert!(g.solution.values.iter().all(|&f| (f - 2.5).abs() < 1e-10));
    assert_eq!(g.decay_exponent, None);
    let g = glue_harmonic(&neck(), [0.0, 0.0], 200.0).unwrap();
    assert!(g.solution.values.iter().all(|&f| f == 0.0));
}

#[test]
fn gluing_errors_and_export() {
    let cap = AcProfile::capped_cone(3, s2(1.0, 12.0), 1.0, 0.0).unwrap();
    assert!(glue_harmonic(&cap, [1.0, 0.0], 200.0).is_err());
    assert!(glue_harmonic(&neck(), [f64::NAN, 0.0], 200.0).is_err());
    // [10, T/4] holds too few nodes on a coarse grid
    let coarse = GlueOptions { points: 101, ..Default::default() };
    assert!(matches!(glue_harmonic_with(&neck(), [1.0, 0.0], 45.0, &coarse), Err(Error::Numeric(_))));

    let g = glue_harmonic(&neck(), [1.0, 0.0], 100.0).unwrap();
    let mut buf = Vec::new();
    g.solution.write_csv(&mut buf).unwrap();
    let text = String::from_utf8(buf).unwrap();
    let lines: Vec<&str> = text.lines().collect();
    assert_eq!(lines[0], "t,f");
    assert_eq!(lines.len(), g.solution.grid.len() + 1);
    let (t, f) = lines[1].split_once(',').unwrap();
    assert_eq!(t.parse::<f64>().unwrap(), -100.0);
    assert_eq!(f.parse::<f64>().unwrap(), g.solution.values[0]);
    assert!((g.solution.eval(0.0).unwrap() - 0.5).abs() < 1e-12);
    assert!(g.solution.eval(101.0).is_none());
}

#[test]
fn gluing_in_higher_dimension() {
    let nk = AcProfile::smoothed_neck(4, sphere_spectrum(3, 1.0, 10.0).unwrap()).unwrap();
    let g = glue_harmonic(&nk, [0.0, 1.0], 1000.0).unwrap();
    let beta = g.decay_exponent.unwrap();
    assert!((beta + 2.0).abs() <= 0.2, "β = {beta}");
    assert!((g.solution.eval(0.0).unwrap() - 0.5).abs() < 1e-9);
}

fn probe_cap() -> AcProfile {
    AcProfile::capped_cone(3, s2(1.0, 12.0), 2.0, 0.0).unwrap()
}

#[test]
fn probe_trends() {
    let r = fredholm_window_probe(&probe_cap(), 0.0, &[0.5, -0.5], &[50.0, 100.0, 200.0]).unwrap();
    assert_eq!(r.entries.len(), 2 * 3 * 3);
    assert_eq!(r.verdicts[0].trend, Trend::NonDegenerating);
    assert_eq!(r.verdicts[1].trend, Trend::Degenerating);
    assert!(r.verdicts.iter().all(|v| v.reproducible));
    // the decay below the window follows r^δ
    let s: Vec<f64> = r.entries.iter().filter(|e| e.delta == -0.5 && e.seed == 0).map(|e| e.sigma_min).collect();
    let slope = (s[2] / s[0]).ln() / 4f64.ln();
    assert!((slope + 0.5).abs() < 0.1, "slope {slope}");
}

#[test]
fn probe_rejects_exceptional_weights() {
    let p = probe_cap();
    for d in [0.0, 1.0, 1.03, -0.98] {
        assert!(
            matches!(fredholm_window_probe(&p, 0.0, &[d], &[50.0, 100.0]), Err(Error::ExceptionalWeight { .. })),
            "δ={d}"
        );
    }
    assert!(fredholm_window_probe(&p, 0.3, &[0.5], &[50.0, 100.0]).is_err());
    assert!(fredholm_window_probe(&neck(), 0.0, &[0.5], &[50.0, 100.0]).is_err());
    assert!(fredholm_window_probe(&p, 0.0, &[0.5], &[100.0, 50.0]).is_err());
}

#[test]
fn probe_higher_mode() {
    // mode λ=2: weights −1 and 2, so 0.5 sits inside the window
    let r = fredholm_window_probe(&probe_cap(), 2.0, &[0.5], &[50.0, 100.0, 200.0]).unwrap();
    assert_eq!(r.verdicts[0].trend, Trend::NonDegenerating);
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(24))]

    #[test]
    fn gluing_is_linear(a in -3.0f64..3.0, b in -3.0f64..3.0, c in -2.0f64..2.0, d in -2.0f64..2.0) {
        let nk = neck();
        let opts = GlueOptions { points: 801, ..Default::default() };
        let f1 = glue_harmonic_with(&nk, [1.0, 0.0], 200.0, &opts).unwrap().solution.values;
        let f2 = glue_harmonic_with(&nk, [c, d], 200.0, &opts).unwrap().solution.values;
        let mix = glue_harmonic_with(&nk, [a + b * c, b * d], 200.0, &opts).unwrap().solution.values;
        for j in 0..mix.len() {
            prop_assert!((mix[j] - (a * f1[j] + b * f2[j])).abs() <= 1e-10 * (1.0 + a.abs() + b.abs()));
        }
    }

    #[test]
    fn counts_match_indicial(c in 0.5f64..2.5, delta in -2.5f64..0.9, amp in 0.0f64..1.0) {
        let p = AcProfile::capped_cone(3, s2(c, 60.0), 1.0, amp).unwrap();
        if let Ok(want) = dim_H0(delta, &p.ends) {
            match bounded_harmonic_dim(&p, delta, 60.0, 60.0) {
                Ok(r) => prop_assert_eq!(r.total, want),
                Err(Error::ExceptionalWeight { .. }) => {}
                Err(e) => return Err(TestCaseError::fail(format!("{e}"))),
            }
        }
    }

    #[test]
    fn constants_are_fixed(g in -10.0f64..10.0) {
        let nk = neck();
        let opts = GlueOptions { points: 401, ..Default::default() };
        let r = glue_harmonic_with(&nk, [g, g], 100.0, &opts).unwrap();
        prop_assert!(r.solution.values.iter().all(|&f| (f - g).abs() <= 1e-12 * (1.0 + g.abs())));
    }
}

#[test]
fn supplied_link_needs_covering_truncation() {
    let link = LinkSpectrum::supplied(vec![EigenPair { lambda: 0.0, multiplicity: 1 }, EigenPair { lambda: 2.0, multiplicity: 3 }], 3.0).unwrap();
    let nk = AcProfile::smoothed_neck(3, link).unwrap();
    assert_eq!(bounded_harmonic_dim(&nk, -1.1, 3.0, 50.0).unwrap().total, 8);
    assert!(bounded_harmonic_dim(&nk, -1.1, 6.0, 50.0).is_err());
}
