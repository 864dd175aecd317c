mod common;

use std::collections::HashMap;

use bellpauli::*;
use common::random_state;

fn m_alpha(s: &PureState, a: f64) -> f64 {
    stabilizer_entropy(&pauli_distribution(s).unwrap(), a).unwrap()
}

#[test]
fn t_doped_examples() {
    let mut rng = rng_from_seed(1);
    let s = make_t_doped(5, 0, &mut rng).unwrap();
    for a in [0.0, 1.0, 2.0] {
        assert!(m_alpha(&s, a).abs() < 1e-9);
    }
    let t = make_t_doped_with(1, 1, &Clifford::identity(1)).unwrap();
    assert_eq!(t, PureState::t_state());
    assert!((m_alpha(&t, 1.0) - 0.5).abs() < 1e-12);
    let s4 = make_t_doped(6, 4, &mut rng).unwrap();
    assert!((m_alpha(&s4, 1.0) - 2.0).abs() < 1e-9);
    assert!(make_t_doped(3, 4, &mut rng).is_err());
}

fn clifford_key(c: &Clifford) -> (bool, String, bool, String) {
    let x = c.conjugate(&"X".parse().unwrap()).unwrap();
    let z = c.conjugate(&"Z".parse().unwrap()).unwrap();
    (x.negative, x.pauli.letters(), z.negative, z.pauli.letters())
}

#[test]
fn single_qubit_cliffords_uniform() {
    let mut rng = rng_from_seed(2);
    let n = 10_000;
    let mut tally: HashMap<_, usize> = HashMap::new();
    for _ in 0..n {
        *tally.entry(clifford_key(&Clifford::random(1, &mut rng))).or_default() += 1;
    }
    assert_eq!(tally.len(), 24);
    let p = 1.0 / 24.0;
    let sigma = (p * (1.0 - p) / n as f64).sqrt();
    for (k, c) in tally {
        let f = c as f64 / n as f64;
        assert!((f - p).abs() <= 3.0 * sigma, "{k:?}: {f}");
    }
}

#[test]
fn cliffords_map_paulis_to_paulis() {
    let mut rng = rng_from_seed(3);
    for n in 1..=4 {
        let c = Clifford::random(n, &mut rng);
        let z1 = PauliString::single(n, 0, 'Z').unwrap();
        let img = c.conjugate(&z1).unwrap();
        // check against the state action: C Z1 C^dag (C|0..0>) = C|0..0> since Z1|0> = |0>
        let mut s = PureState::zero(n).unwrap();
        c.apply(&mut s).unwrap();
        let e = expectation(&s, &img.pauli).unwrap();
        assert!((e - if img.negative { -1.0 } else { 1.0 }).abs() < 1e-10);
        assert!((s.norm_sqr() - 1.0).abs() < 1e-12);
    }
}

#[test]
fn magic_is_clifford_invariant() {
    let mut rng = rng_from_seed(4);
    for i in 0..20 {
        let n = 1 + i % 5;
        let psi = random_state(n, &mut rng);
        let mut phi = psi.clone();
        Clifford::random(n, &mut rng).apply(&mut phi).unwrap();
        for a in [0.0, 1.0, 2.0] {
            assert!((m_alpha(&psi, a) - m_alpha(&phi, a)).abs() < 1e-9, "alpha={a}");
        }
    }
}

#[test]
fn schmidt_ranks_invariant_under_local_cliffords() {
    let mut rng = rng_from_seed(5);
    for _ in 0..10 {
        let psi = make_subset_phase(5, 6, &mut rng).unwrap();
        let phi = make_local_clifford_rotated(&psi, &mut rng).unwrap();
        let a = entropies(&psi, &[]).unwrap().schmidt_s0;
        let b = entropies(&phi, &[]).unwrap().schmidt_s0;
        assert_eq!(a, b);
    }
}

#[test]
fn recipes_are_deterministic() {
    let kinds = [
        StateKind::TDoped { n: 5, t: 2 },
        StateKind::SubsetPhase { n: 4, subset_size: 5 },
        StateKind::LocalCliffordRotated { base: Box::new(StateKind::SubsetPhase { n: 3, subset_size: 3 }) },
    ];
    for k in kinds {
        let a = StateRecipe::new(k.clone(), 77).build().unwrap();
        let b = StateRecipe::new(k.clone(), 77).build().unwrap();
        let c = StateRecipe::new(k, 78).build().unwrap();
        assert_eq!(a, b);
        assert_ne!(a, c);
    }
}

#[test]
fn subset_phase_states_are_real() {
    let mut rng = rng_from_seed(6);
    for _ in 0..20 {
        let s = make_subset_phase(5, 7, &mut rng).unwrap();
        assert!(s.amplitudes().iter().all(|a| a.im == 0.0));
        assert!(imaginarity(&s).abs() < 1e-12);
    }
}

#[test]
fn subset_phase_small_scale_record() {
    let mut rng = rng_from_seed(7);
    let s = make_subset_phase(8, 16, &mut rng).unwrap();
    let m2 = m_alpha(&s, 2.0);
    let rho = bellpauli::marginals::reduced_density(&s, &[0, 1, 2, 3]);
    let s2 = -(&rho * &rho).trace().re.log2();
    println!("subset phase n=8 |S|=16: M2 = {m2:.4}, S2(half) = {s2:.4}");
    assert!(m2.is_finite() && s2.is_finite());
    // S2 <= S0 <= log2 |S|
    assert!(s2 <= 4.0 + 1e-9);
}

#[test]
fn tilted_states() {
    let base = PureState::zero(3).unwrap();
    let t = make_tilted(&base, 0.5, 0.0).unwrap();
    assert!((t.norm_sqr() - 1.0).abs() < 1e-12);
    assert!(make_tilted(&base, 0.0, 0.0).is_err());
    assert!(make_tilted(&base, 1.0, 0.0).is_err());

    let plus = PureState::product("+0+").unwrap();
    let t = make_tilted(&plus, 0.3, 1.0).unwrap();
    assert_eq!(schmidt_rank(&t, &[0]).unwrap().rank, 2);

    let mut rng = rng_from_seed(8);
    for _ in 0..10 {
        let b = make_subset_phase(4, 5, &mut rng).unwrap();
        let t = make_tilted(&b, 0.4, 0.7).unwrap();
        for k in 1..5 {
            let r = if k == 1 { 1 } else { schmidt_rank(&b, &(0..k - 1).collect::<Vec<_>>()).unwrap().rank };
            let s0 = schmidt_rank(&t, &(0..k).collect::<Vec<_>>()).unwrap().s0;
            assert!(s0 <= ((r + 1) as f64).log2() + 1e-12);
        }
    }
}

#[test]
fn phi_tau_expectation_table() {
    let (n, tau) = (4, 0.3);
    let s = make_phi_tau(n, tau).unwrap();
    let m = factory::phi_tau_m(n, tau);
    let k = 1.0 + 2.0 * m;
    let xxxx: PauliString = "XXXX".parse().unwrap();
    let zizi: PauliString = "ZIZI".parse().unwrap();
    assert!((expectation(&s, &xxxx).unwrap() - (1.0 - tau + 2.0 * m) / k).abs() < 1e-12);
    assert!((expectation(&s, &"XIIX".parse().unwrap()).unwrap() - (1.0 - tau + 2.0 * m) / k).abs() < 1e-12);
    assert!((expectation(&s, &zizi).unwrap() - (tau + 2.0 * m) / k).abs() < 1e-12);
    // odd number of Y factors: zero
    assert!(expectation(&s, &"YIII".parse().unwrap()).unwrap().abs() < 1e-12);
    assert!(make_phi_tau(4, 0.6).is_err());
}

#[test]
fn phi_tau_properties_at_n9() {
    let n = 9;
    let tau = 1.0 / (n as f64).sqrt();
    let s = make_phi_tau(n, tau).unwrap();
    let d = pauli_distribution(&s).unwrap();
    let f = cdf_from(&d, tau * tau).unwrap();
    assert!(f <= 2.0 * tau * (1.0 - tau));
    assert!(stabilizer_entropy(&d, 0.0).unwrap() > (n - 1) as f64);
    assert!(stabilizer_entropy(&d, 1.0).unwrap() > (n as f64).sqrt());
}

#[test]
fn bell_pairs_and_cluster() {
    let b = make_bell_pairs(4).unwrap();
    assert_eq!(schmidt_rank(&b, &[0, 1]).unwrap().rank, 4);
    assert_eq!(schmidt_rank(&b, &[0, 2]).unwrap().rank, 1);
    let c = make_cluster2d(2).unwrap();
    assert_eq!(schmidt_rank(&c, &[0, 1]).unwrap().rank, 4);
    assert!(make_cluster2d(0).is_err());
}

#[test]
fn rotated_ensemble_transpose_overlap_gap() {
    let n = 6;
    let mut rng = rng_from_seed(9);
    let vals: Vec<f64> = (0..200)
        .map(|_| {
            let base = make_subset_phase(n, 16, &mut rng).unwrap();
            transpose_overlap(&make_local_clifford_rotated(&base, &mut rng).unwrap())
        })
        .collect();
    let mean = vals.iter().sum::<f64>() / 200.0;
    let var = vals.iter().map(|v| (v - mean).powi(2)).sum::<f64>() / 199.0;
    let sigma = (var / 200.0).sqrt();
    assert!(mean <= (2.0f64 / 3.0).powi(n as i32) + 5.0 * sigma, "mean {mean}");
}

#[test]
fn noise_channel_sampling() {
    let zero = PureState::zero(1).unwrap();
    let ch = PauliNoiseChannel::new(1, vec![("X".parse().unwrap(), 0.1)]).unwrap();
    let mut rng = rng_from_seed(10);
    let draws = 10_000;
    let flipped = (0..draws).filter(|_| sample_noisy_copy(&zero, &ch, &mut rng).unwrap() != zero).count();
    let f = flipped as f64 / draws as f64;
    assert!((f - 0.1).abs() <= 3.0 * (0.09f64 / draws as f64).sqrt());
    let quiet = PauliNoiseChannel::noiseless(1);
    assert!((0..100).all(|_| sample_noisy_copy(&zero, &quiet, &mut rng).unwrap() == zero));
}

#[test]
fn noisy_mixture_keeps_expectations() {
    let n = 2;
    let mut rng = rng_from_seed(11);
    let sigma = random_state(n, &mut rng);
    let ch = PauliNoiseChannel::new(
        n,
        vec![("XI".parse().unwrap(), 0.02), ("IZ".parse().unwrap(), 0.02), ("YY".parse().unwrap(), 0.01)],
    )
    .unwrap();
    let xi = ch.total();
    let copies: Vec<PureState> = (0..20_000).map(|_| sample_noisy_copy(&sigma, &ch, &mut rng).unwrap()).collect();
    for idx in 0..16 {
        let p = PauliString::from_index(n, idx);
        let mean = copies.iter().map(|c| expectation(c, &p).unwrap()).sum::<f64>() / copies.len() as f64;
        let slack = 3.0 / (copies.len() as f64).sqrt();
        assert!(mean.abs() >= (1.0 - 2.0 * xi) * expectation(&sigma, &p).unwrap().abs() - slack);
    }
}
