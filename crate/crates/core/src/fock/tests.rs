use super::*;
use crate::gauss::GaussianPure;
use crate::resource::SqueezedBellResource;
use proptest::prelude::*;

fn c(re: f64, im: f64) -> Complex64 {
    Complex64::new(re, im)
}

fn policy(cutoff: usize) -> TruncationPolicy {
    TruncationPolicy::with_cutoff(cutoff).unwrap()
}

#[test]
fn cutoff_must_hold_a_photon() {
    assert_eq!(TruncationPolicy::with_cutoff(1), Err(Error::CutoffTooSmall { cutoff: 1, min: 2 }));
    assert!(FockVector::zeros(&[3, 1], 1e-12).is_err());
}

#[test]
fn identity_cases() {
    let vac = FockVector::vacuum(1, &policy(20));
    assert_eq!(apply_squeeze_1m(&vac, c(0.0, 0.0)).unwrap(), vac);
    assert_eq!(apply_displace_1m(&vac, c(0.0, 0.0)).unwrap(), vac);
    let vac2 = FockVector::vacuum(2, &policy(10));
    assert_eq!(apply_two_mode_squeeze(&vac2, c(0.0, 0.0)).unwrap(), vac2);
}

#[test]
fn squeezed_vacuum_amplitudes() {
    let sq = apply_squeeze_1m(&FockVector::vacuum(1, &policy(60)), c(0.5, 0.0)).unwrap();
    let s: f64 = 0.5;
    let expect = (1.0 / s.cosh()).sqrt() * (-s.tanh()) * 2f64.sqrt() / 2.0;
    assert!((sq.amplitudes()[2] - expect).norm() < 1e-13);
}

#[test]
fn squeezing_preserves_norm_at_adequate_cutoff() {
    // s = 1 leaves ~1e-7 in the top six levels of a 60-level basis
    let p = TruncationPolicy::new(60, 1e-6).unwrap();
    let sq = apply_squeeze_1m(&FockVector::vacuum(1, &p), c(1.0, 0.0)).unwrap();
    let n = sq.norm_sqr();
    assert!(n <= 1.0 + 1e-12 && n >= 1.0 - 1e-10, "{n}");
    // the default tolerance rejects the same state
    let strict = apply_squeeze_1m(&FockVector::vacuum(1, &policy(60)), c(1.0, 0.0));
    assert!(matches!(strict, Err(Error::TailTooLarge { .. })));
}

#[test]
fn coherent_state_is_poissonian() {
    let a = c(1.2, -0.7);
    let coh = apply_displace_1m(&FockVector::vacuum(1, &policy(60)), a).unwrap();
    let mut log_fact = 0.0;
    for n in 0..30 {
        if n > 0 {
            log_fact += (n as f64).ln();
        }
        let poisson = (-a.norm_sqr() + n as f64 * a.norm_sqr().ln() - log_fact).exp();
        assert!((coh.amplitudes()[n].norm_sqr() - poisson).abs() < 1e-13);
    }
}

#[test]
fn displacement_is_unitary() {
    let base = apply_squeeze_1m(&FockVector::vacuum(1, &policy(60)), c(0.2, 0.1)).unwrap();
    for a in [c(2.0, 0.0), c(-1.0, 1.0), c(0.0, -1.9)] {
        let out = apply_displace_1m(&base, a).unwrap();
        assert!((out.norm_sqr() - 1.0).abs() < 1e-10);
    }
}

#[test]
fn two_mode_squeezed_vacuum_is_geometric() {
    let (r, phi) = (0.7, 1.3);
    let tmsv = apply_two_mode_squeeze(&FockVector::vacuum(2, &policy(70)), Complex64::from_polar(r, phi)).unwrap();
    let ratio = -Complex64::from_polar(r.tanh(), phi);
    for n in 0..40 {
        let expect = ratio.powi(n) / r.cosh();
        assert!((tmsv.amplitude(&[n as usize, n as usize]).unwrap() - expect).norm() < 1e-10);
    }
}

#[test]
fn two_mode_squeeze_conserves_number_difference() {
    let seed = FockVector::basis(&[3, 1], &[40, 40], 1e-12).unwrap();
    let out = apply_two_mode_squeeze(&seed, c(0.4, -0.3)).unwrap();
    for (i, a) in out.amplitudes().iter().enumerate() {
        let occ = out.occupation(i);
        if occ[0] as isize - occ[1] as isize != 2 {
            assert_eq!(*a, c(0.0, 0.0));
        }
    }
    assert!((out.norm_sqr() - 1.0).abs() < 1e-11);
}

#[test]
fn single_photon_splits_evenly() {
    let one = FockVector::basis(&[1, 0], &[3, 3], 1e-12).unwrap();
    let out = apply_beam_splitter(&one, 0, 1, 0.5).unwrap();
    let h = std::f64::consts::FRAC_1_SQRT_2;
    assert!((out.amplitude(&[1, 0]).unwrap() - h).norm() < 1e-15);
    assert!((out.amplitude(&[0, 1]).unwrap().norm() - h).abs() < 1e-15);
}

#[test]
fn beam_splitter_rejects_bad_modes() {
    let st = FockVector::vacuum(2, &policy(4));
    assert_eq!(
        apply_beam_splitter(&st, 0, 2, 0.5),
        Err(Error::ModeIndexOutOfRange { index: 2, modes: 2 })
    );
    assert!(apply_beam_splitter(&st, 1, 1, 0.5).is_err());
}

#[test]
fn splitter_chain_makes_product_of_coherent_states() {
    let n = 3;
    let alpha = c(0.6, 0.3);
    let cut = 14;
    let single = apply_displace_1m(&FockVector::vacuum(1, &policy(cut)), alpha).unwrap();
    let mut state = FockVector::zeros(&vec![cut; n], 1e-12).unwrap();
    for k in 0..cut {
        let idx = state.flat_index(&[k, 0, 0]).unwrap();
        state.amplitudes_mut()[idx] = single.amplitudes()[k];
    }
    let out = oracle::split(&state, n).unwrap();
    let part = apply_displace_1m(&FockVector::vacuum(1, &policy(cut)), alpha / (n as f64).sqrt()).unwrap();
    let p = part.amplitudes();
    for a in 0..5 {
        for b in 0..5 {
            for d in 0..5 {
                // only totals inside the input cutoff are represented
                if a + b + d < cut {
                    let got = out.amplitude(&[a, b, d]).unwrap();
                    assert!((got - p[a] * p[b] * p[d]).norm() < 1e-10);
                }
            }
        }
    }
}

#[test]
fn projection_examples() {
    let st = FockVector::basis(&[0, 1], &[3, 3], 1e-12).unwrap();
    let (rest, p) = project_and_renormalize(&st, 1, 0).unwrap();
    assert_eq!(p, 0.0);
    assert_eq!(rest.norm_sqr(), 0.0);
    let (rest, p) = project_and_renormalize(&st, 0, 0).unwrap();
    assert_eq!(p, 1.0);
    assert_eq!(rest.amplitude(&[1]).unwrap(), c(1.0, 0.0));

    let h = std::f64::consts::FRAC_1_SQRT_2;
    let sup = FockVector::from_amplitudes(vec![c(h, 0.0), c(h, 0.0)], &[2], 1e-12).unwrap();
    let (vac, p) = project_and_renormalize(&sup, 0, 0).unwrap();
    assert!((p - 0.5).abs() < 1e-15);
    assert_eq!(vac.modes(), 0);
    assert!((vac.norm_sqr() - 1.0).abs() < 1e-15);
}

#[test]
fn ar_oracle_passes_vacuum() {
    for n in 1..=4 {
        let rep = oracle_ar_teleport(&GaussianPure::vacuum(), n, &policy(20)).unwrap();
        assert!((rep.fidelity - 1.0).abs() < 1e-14);
        assert!((rep.success_prob - 1.0).abs() < 1e-14);
    }
    assert!(matches!(
        oracle_ar_teleport(&GaussianPure::vacuum(), 7, &policy(20)),
        Err(Error::BranchCountUnsupported { branches: 7, .. })
    ));
}

#[test]
fn ar_oracle_output_amplitudes_follow_binomial_weights() {
    let input = GaussianPure::new(c(0.4, -0.2), 0.3, 0.5);
    let n = 3;
    let out = oracle_ar_output(&input, n, &policy(40)).unwrap();
    let psi = input.fock_amplitudes(n + 1);
    let weights = [1.0, 1.0, 2.0 / 3.0, 2.0 / 9.0];
    for k in 0..=n {
        assert!((out.amplitudes()[k] - weights[k] * psi[k]).norm() < 1e-12, "k={k}");
    }
}

#[test]
fn vbk_oracle_vacuum_resource_gives_half() {
    let rep = oracle_vbk_teleport(
        &GaussianPure::coherent(c(0.5, -0.3)),
        &SqueezedBellResource::new(0.0, 0.0, 0.0, 0.0).unwrap(),
        1.0,
        &policy(30),
        &OracleVbkSettings::default(),
    )
    .unwrap();
    assert!((rep.fidelity - 0.5).abs() < 1e-10, "{}", rep.fidelity);
}

#[test]
fn vbk_oracle_strong_tmsv_coherent_input() {
    // unit gain: F = 1/(1 + e^{−2r})
    let r = 1.2;
    let rep = oracle_vbk_teleport(
        &GaussianPure::coherent(c(0.4, 0.2)),
        &SqueezedBellResource::tmsv(r),
        1.0,
        &TruncationPolicy::new(120, 1e-12).unwrap(),
        &OracleVbkSettings::default(),
    )
    .unwrap();
    let expect = 1.0 / (1.0 + (-2.0 * r).exp());
    assert!((rep.fidelity - expect).abs() < 1e-8, "{} vs {expect}", rep.fidelity);
}

#[test]
fn schmidt_coefficients_of_product_and_entangled_states() {
    let prod = FockVector::basis(&[1, 0], &[3, 3], 1e-12).unwrap();
    let l = schmidt_coefficients(&prod).unwrap();
    assert!((l[0] - 1.0).abs() < 1e-15 && l[1..].iter().all(|&x| x.abs() < 1e-15));
    let h = std::f64::consts::FRAC_1_SQRT_2;
    let mut bell = FockVector::zeros(&[2, 2], 1e-12).unwrap();
    bell.amplitudes_mut()[1] = c(h, 0.0);
    bell.amplitudes_mut()[2] = c(h, 0.0);
    let l = schmidt_coefficients(&bell).unwrap();
    assert!((entropy_bits(&l) - 1.0).abs() < 1e-12);
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(24))]

    #[test]
    fn beam_splitter_conserves_photons(t in 0.0f64..=1.0, a in 0usize..4, b in 0usize..4, d in 0usize..3) {
        let st = FockVector::basis(&[a, b, d], &[8, 8, 8], 1e-12).unwrap();
        let out = apply_beam_splitter(&st, 0, 1, t).unwrap();
        let total = a + b + d;
        for (i, amp) in out.amplitudes().iter().enumerate() {
            if out.occupation(i).iter().sum::<usize>() != total {
                prop_assert_eq!(*amp, c(0.0, 0.0));
            }
        }
        prop_assert!((out.norm_sqr() - 1.0).abs() < 1e-13);
    }

    #[test]
    fn projection_outcomes_are_complete(ar in -0.8f64..0.8, ai in -0.8f64..0.8, r in 0.0f64..0.5) {
        let st = apply_two_mode_squeeze(&FockVector::vacuum(2, &policy(40)), c(r, 0.0)).unwrap();
        let st = apply_displace(&st, 1, c(ar, ai)).unwrap();
        let total: f64 = (0..40).map(|k| project_and_renormalize(&st, 1, k).unwrap().1).sum();
        prop_assert!((total - st.norm_sqr()).abs() < 1e-12);
    }

    #[test]
    fn operators_preserve_norm(re in -1.2f64..1.2, im in -1.2f64..1.2, s in 0.0f64..0.6) {
        let p = policy(80);
        let st = apply_squeeze_1m(&FockVector::vacuum(1, &p), c(s, 0.3)).unwrap();
        let st = apply_displace_1m(&st, c(re, im)).unwrap();
        prop_assert!((st.norm_sqr() - 1.0).abs() < 10.0 * p.tail_tol);
    }
}
