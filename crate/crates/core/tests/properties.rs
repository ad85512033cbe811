use std::f64::consts::PI;

use hyperturb_core::diagnostics::{field_totals, fit_order};
use hyperturb_core::model::{
    dissipation_matrix, flux_jacobian, pd_constraint, pd_constraint_ratio, source, symmetrizer, unscale_map,
    wave_speeds, NVAR,
};
use hyperturb_core::solver::{run_simulation, TimeControls};
use hyperturb_core::{EosParams, Field, Grid, ModelParams, PhysState, RescaledState, Sym6};
use nalgebra::{DMatrix, SymmetricEigen};
use proptest::prelude::*;

fn sym6() -> impl Strategy<Value = Sym6> {
    prop::array::uniform6(-0.3..0.3f64).prop_map(Sym6)
}

fn admissible_state() -> impl Strategy<Value = RescaledState> {
    (
        -0.4..0.4f64,
        prop::array::uniform3(-0.57..0.57f64),
        sym6(),
        0.0..2.0f64,
        prop::array::uniform3(-0.5..0.5f64),
    )
        .prop_map(|(phi, u, sigma, k, y)| RescaledState { phi, u, sigma, k, y })
}

fn unit_vector() -> impl Strategy<Value = [f64; 3]> {
    (-1.0..1.0f64, 0.0..(2.0 * PI)).prop_map(|(z, t)| {
        let r = (1.0 - z * z).sqrt();
        [r * t.cos(), r * t.sin(), z]
    })
}

fn epsilon() -> impl Strategy<Value = f64> {
    prop_oneof![Just(1.0), Just(0.5), Just(0.1), Just(0.05)]
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(100))]

    #[test]
    fn pressure_inverts_density_from_pressure(p in 0.1..10.0f64, c in 0.5..3.0f64) {
        let eos = EosParams::new(c, 1.0).unwrap();
        let back = eos.pressure(eos.density_from_pressure(p).unwrap()).unwrap();
        prop_assert!((back - p).abs() <= 1e-14 * p);
    }

    #[test]
    fn equilibrium_entropy_is_strictly_concave(v in 0.1..10.0f64) {
        let eos = EosParams::default();
        let h = 1e-4 * v;
        let d2 = (eos.s_eq(v + h).unwrap() - 2.0 * eos.s_eq(v).unwrap() + eos.s_eq(v - h).unwrap()) / (h * h);
        prop_assert!(d2 <= -eos.c * eos.c / (2.0 * v * v));
    }

    #[test]
    fn compressibility_matches_sound_speed(rho in 0.1..10.0f64) {
        let eos = EosParams::default();
        let q = eos.q_of_p(eos.pressure(rho).unwrap()).unwrap();
        prop_assert!((q * rho * eos.c * eos.c - 1.0).abs() <= 1e-14);
    }

    #[test]
    fn weighted_contraction_matches_tensor(a in sym6(), b in sym6()) {
        let (ta, tb) = (a.to_tensor(), b.to_tensor());
        let mut full = 0.0;
        for i in 0..3 {
            for j in 0..3 {
                full += ta[i][j] * tb[i][j];
            }
        }
        prop_assert!((a.contract(&b) - full).abs() <= 1e-15 * (1.0 + full.abs()));
        prop_assert_eq!(Sym6::from_tensor(&ta), a);
    }

    #[test]
    fn symmetrizer_symmetrizes(s in admissible_state(), n in unit_vector(), eps in epsilon()) {
        let p = ModelParams { epsilon: eps, ..Default::default() };
        let m = symmetrizer(&s, &p).unwrap() * flux_jacobian(&s, &n, &p).unwrap();
        prop_assert!(m.asymmetry_inf() <= 1e-12 * m.norm_inf());
    }

    #[test]
    fn wave_speeds_match_independent_eigensolvers(s in admissible_state(), n in unit_vector(), eps in epsilon()) {
        let p = ModelParams { epsilon: eps, ..Default::default() };
        let a = flux_jacobian(&s, &n, &p).unwrap();
        let ours = wave_speeds(&s, &n, &p).unwrap();
        let dm = DMatrix::from_fn(NVAR, NVAR, |i, j| a[(i, j)]);

        // symmetric solve of A0^{1/2} A A0^{-1/2}
        let d = symmetrizer(&s, &p).unwrap();
        let sym = DMatrix::from_fn(NVAR, NVAR, |i, j| (d[(i, i)] / d[(j, j)]).sqrt() * a[(i, j)]);
        let sym = (&sym + sym.transpose()) * 0.5;
        let mut reference: Vec<f64> = SymmetricEigen::new(sym).eigenvalues.iter().copied().collect();
        reference.sort_by(f64::total_cmp);
        let scale = reference.iter().fold(1.0_f64, |m, x| m.max(x.abs()));
        for (x, y) in ours.iter().zip(&reference) {
            prop_assert!((x - y).abs() <= 1e-10 * scale, "{x} vs {y}");
        }

        // unsymmetrized Schur form, when the QR iteration converges
        if let Some(schur) = dm.try_schur(1e-15, 100_000) {
            let ev = schur.complex_eigenvalues();
            let mut re: Vec<f64> = ev.iter().map(|z| z.re).collect();
            re.sort_by(f64::total_cmp);
            for z in ev.iter() {
                prop_assert!(z.im.abs() <= 1e-6 * scale, "imaginary part {}", z.im);
            }
            for (x, y) in ours.iter().zip(&re) {
                prop_assert!((x - y).abs() <= 1e-6 * scale, "{x} vs {y}");
            }
        }
    }

    #[test]
    fn source_vanishes_only_at_equilibrium(s in admissible_state()) {
        let p = ModelParams::default();
        let eq = RescaledState { sigma: Sym6::ZERO, k: 0.0, y: [0.0; 3], ..s };
        prop_assert_eq!(source(&eq, &p).unwrap(), [0.0; NVAR]);
        let off = source(&s, &p).unwrap();
        let moved = s.sigma != Sym6::ZERO || s.k > 0.0 || s.y != [0.0; 3];
        prop_assert_eq!(off.iter().any(|&x| x != 0.0), moved);
    }

    #[test]
    fn constraint_implies_positive_definite_dissipation(
        rho in 0.5..2.0f64, sigma in sym6(), k in 0.01..2.0f64, shrink in 0.0..3.0f64,
    ) {
        let p = ModelParams::default();
        let mut s = PhysState { rho, u: [0.0; 3], sigma, k, y: [0.0; 3] };
        let r = pd_constraint_ratio(&s, &p).unwrap();
        if r > 0.0 {
            s.sigma = sigma.scale(shrink / r.sqrt());
        }
        let m = dissipation_matrix(&s, &p).unwrap();
        let dm = DMatrix::from_fn(10, 10, |i, j| m[(i, j)]);
        let eig = SymmetricEigen::new(dm.clone()).eigenvalues;
        let min = eig.iter().copied().fold(f64::INFINITY, f64::min);
        let norm = dm.norm();
        if pd_constraint(&s, &p).unwrap() {
            prop_assert!(min >= -1e-12 * norm, "min eig {min}");
        }
        if pd_constraint_ratio(&s, &p).unwrap() >= 4.0 {
            prop_assert!(min < 0.0);
        }
    }

    #[test]
    fn fit_order_recovers_noisy_power_laws(
        rate in 0.5..3.0f64,
        c in 0.01..100.0f64,
        noise in prop::collection::vec(-0.05..0.05f64, 5),
    ) {
        let eps: [f64; 5] = [0.4, 0.2, 0.1, 0.05, 0.025];
        let errs: Vec<f64> = eps.iter().zip(&noise).map(|(e, n)| c * e.powf(rate) * (1.0 + n)).collect();
        let (slope, _) = fit_order(&eps, &errs).unwrap();
        prop_assert!((slope - rate).abs() < 0.1);
    }
}

#[test]
fn strongly_violated_constraint_exposes_a_negative_eigenvalue() {
    let p = ModelParams::default();
    let base = PhysState { rho: 1.0, u: [0.0; 3], sigma: Sym6([0.2, 0.1, 0.0, -0.1, 0.0, 0.05]), k: 1.0, y: [0.0; 3] };
    let r = pd_constraint_ratio(&base, &p).unwrap();
    let s = PhysState { sigma: base.sigma.scale((2.5 / r).sqrt()), ..base };
    assert!(pd_constraint_ratio(&s, &p).unwrap() >= 2.0);
    let m = dissipation_matrix(&s, &p).unwrap();
    let eig = SymmetricEigen::new(DMatrix::from_fn(10, 10, |i, j| m[(i, j)])).eigenvalues;
    assert!(eig.iter().any(|&e| e < 0.0));
}

/// Mass drift of the non-conservative scheme, frozen as a regression bound:
/// `|M(t) - M(0)| <= C dx` for a smooth run up to t = 1.
#[test]
fn mass_drift_is_first_order_in_dx() {
    const C: f64 = 1e-2;
    let p = ModelParams { epsilon: 0.5, ..Default::default() };
    for n in [32, 64, 128] {
        let g = Grid::new_1d(n, 1.0).unwrap();
        let f = Field::from_fn(g, |x, _| RescaledState {
            phi: 0.2 * (2.0 * PI * x).sin(),
            u: [0.1 * (2.0 * PI * x).cos(), 0.05, 0.0],
            k: 1.0 + 0.3 * (2.0 * PI * x).sin(),
            ..Default::default()
        });
        let tr = run_simulation(&f, &p, &TimeControls { t_final: 1.0, ..Default::default() }).unwrap();
        let m0 = field_totals(&f, &p).unwrap().mass;
        let drift = (field_totals(&tr.field, &p).unwrap().mass - m0).abs();
        assert!(drift <= C * g.dx(), "n = {n}: drift {drift:e}");
    }
}

#[test]
fn rescaled_state_round_trips_through_unscale_map() {
    let p = ModelParams { epsilon: 0.1, ..Default::default() };
    let s = RescaledState { phi: 0.3, u: [0.1, -0.2, 0.3], sigma: Sym6([0.1; 6]), k: 0.8, y: [0.05, 0.0, -0.05] };
    let back = hyperturb_core::model::scale_map(&unscale_map(&s, &p).unwrap(), &p).unwrap();
    for (a, b) in back.to_array().iter().zip(s.to_array().iter()) {
        assert!((a - b).abs() <= 1e-14 * (1.0 + b.abs()));
    }
}
