use enwidth_core::bounds::uncertainty_check;
use enwidth_core::collective_spin::{analytic_sigma, eigenweight_distribution, exact_central_moment};
use enwidth_core::exact_lattice::{build_spin_hamiltonian, connected_pair_correlators};
use enwidth_core::ising_entangle::{
    correlator_by_enumeration, correlator_hypergeometric, dicke_entanglement, spin_multiplicity, DickeSplit,
    DomainWallEnsemble, EntropyMethod, Multiplicity, MultiplicityMethod,
};
use enwidth_core::nonequil_observables::{kernel_average, SmearKernel};
use enwidth_core::{DriveSchedule, LatticeSpec, MatrixOperator, QuantumState, SpinSector, WeightedValue};
use ndarray::{Array1, Array2};
use num_bigint::BigUint;
use num_complex::Complex64;
use proptest::prelude::*;

/// `(N, 2S, 2m)` with `N ≥ 2S`, `N − 2S` even, `S ≥ ½`.
fn sector(max_two_s: u32) -> impl Strategy<Value = SpinSector> {
    (1..=max_two_s, 0u32..4).prop_flat_map(|(two_s, extra)| {
        (0..=two_s).prop_map(move |k| {
            SpinSector::from_doubled(two_s + 2 * extra, two_s, 2 * k as i64 - two_s as i64).unwrap()
        })
    })
}

fn unit_state(re: Vec<f64>, im: Vec<f64>) -> Option<QuantumState> {
    let v: Array1<Complex64> = re.iter().zip(&im).map(|(&a, &b)| Complex64::new(a, b)).collect();
    let n = v.iter().map(|z| z.norm_sqr()).sum::<f64>().sqrt();
    (n > 1e-3).then(|| QuantumState::new(v.mapv(|z| z / n)).unwrap())
}

fn hermitian(dim: usize, entries: &[(f64, f64)]) -> Array2<Complex64> {
    let mut a = Array2::<Complex64>::zeros((dim, dim));
    let mut it = entries.iter().cycle();
    for i in 0..dim {
        a[[i, i]] = Complex64::new(it.next().unwrap().0, 0.0);
        for j in i + 1..dim {
            let &(re, im) = it.next().unwrap();
            a[[i, j]] = Complex64::new(re, im);
            a[[j, i]] = Complex64::new(re, -im);
        }
    }
    a
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(64))]

    #[test]
    fn analytic_width_is_the_eigenweight_std(s in sector(400), theta in 0.0..std::f64::consts::PI, b_z in -2.0..2.0f64) {
        let sched = DriveSchedule::rotation(theta, b_z).unwrap();
        let a = analytic_sigma(&s, &sched, 1.0).unwrap();
        let d = eigenweight_distribution(&s, theta, b_z, 0.0).unwrap();
        prop_assert!((a - d.std_dev()).abs() < 1e-10, "{a} vs {}", d.std_dev());
    }

    #[test]
    fn eigenweights_are_a_probability(s in sector(300), theta in -3.0..3.0f64) {
        let d = eigenweight_distribution(&s, theta, 1.0, 0.0).unwrap();
        let pts = d.points().unwrap();
        prop_assert!(pts.iter().all(|p| p.weight >= 0.0));
        prop_assert!((pts.iter().map(|p| p.weight).sum::<f64>() - 1.0).abs() < 1e-12);
    }

    #[test]
    fn ladder_moments_match_rotation_weights(s in sector(60), theta in 0.0..3.1f64, p in 1u32..7) {
        // ladder recursion versus moments of the Wigner-d weights
        let sched = DriveSchedule::rotation(theta, 1.0).unwrap();
        let ladder = exact_central_moment(&s, &sched, 1.0, p).unwrap();
        let weights = eigenweight_distribution(&s, theta, 1.0, 0.0).unwrap().central_moment(p);
        let scale = (s.s_tot() / s.n_sites() as f64).powi(p as i32);
        prop_assert!((ladder - weights).abs() < 1e-11 * scale.max(1e-300) + 1e-14);
    }

    #[test]
    fn robertson_never_violated(
        k in 1usize..=6,
        a in prop::collection::vec((-1.0..1.0f64, -1.0..1.0f64), 2080),
        b in prop::collection::vec((-1.0..1.0f64, -1.0..1.0f64), 2080),
        re in prop::collection::vec(-1.0..1.0f64, 64),
        im in prop::collection::vec(-1.0..1.0f64, 64),
    ) {
        let dim = 1 << k;
        let Some(psi) = unit_state(re[..dim].to_vec(), im[..dim].to_vec()) else { return Ok(()); };
        let h = MatrixOperator::new(hermitian(dim, &a), k, "A").unwrap();
        let t = MatrixOperator::new(hermitian(dim, &b), k, "B").unwrap();
        let r = uncertainty_check(&psi, &h, &t, k).unwrap();
        prop_assert!(r.commutator.slack >= -1e-12);
        prop_assert!((r.commutator.rhs - r.rate.rhs).abs() < 1e-12);
    }

    #[test]
    fn variance_identity_on_random_states(
        n in 2usize..=5,
        seed in any::<u64>(),
        re in prop::collection::vec(-1.0..1.0f64, 32),
        im in prop::collection::vec(-1.0..1.0f64, 32),
    ) {
        use rand::SeedableRng;
        let mut rng = rand_chacha::ChaCha8Rng::seed_from_u64(seed);
        let lat = LatticeSpec::random(n, &mut rng).unwrap();
        let h = build_spin_hamiltonian(&lat).unwrap();
        let dim = 1 << n;
        let Some(psi) = unit_state(re[..dim].to_vec(), im[..dim].to_vec()) else { return Ok(()); };
        let r = connected_pair_correlators(&psi, &h).unwrap();
        prop_assert!(r.identity_defect < 1e-12);
        let (_, sd) = h.density_stats(&psi).unwrap();
        prop_assert!((sd * sd - r.sigma_sq).abs() < 1e-12);
    }

    #[test]
    fn enumeration_equals_hypergeometric(l in 2usize..=12, k_frac in 0.0..1.0f64, d_frac in 0.0..1.0f64) {
        let b = l - 1;
        let k = ((b as f64) * k_frac).floor() as usize;
        let d = 1 + ((b - 1) as f64 * d_frac).round() as usize;
        let e = DomainWallEnsemble::new(l, k, 1.0).unwrap();
        prop_assert_eq!(correlator_by_enumeration(&e, d).unwrap(), correlator_hypergeometric(&e, d).unwrap());
    }

    #[test]
    fn dicke_entropy_symmetries(n in 2u32..80, up_frac in 0.0..=1.0f64, la_frac in 0.0..1.0f64) {
        let up = (n as f64 * up_frac).round() as u32;
        let la = 1 + ((n - 2) as f64 * la_frac).round() as u32;
        let m = up as f64 - n as f64 / 2.0;
        let s = |m: f64, la: u32| dicke_entanglement(&DickeSplit::new(n, m, la).unwrap(), EntropyMethod::Exact).unwrap();
        prop_assert_eq!(s(m, la), s(m, n - la));
        prop_assert_eq!(s(m, la), s(-m, la));
    }

    #[test]
    fn kernel_average_is_linear(mean in -2.0..2.0f64, sigma in 0.05..1.5f64, a in -3.0..3.0f64, c in -3.0..3.0f64, mix in 0.0..1.0f64) {
        let g = SmearKernel::gaussian(mean, sigma).unwrap();
        let f = |q: f64| q.cos();
        let h = |q: f64| q * q * q;
        let lhs = kernel_average(&g, |q| a * f(q) + c * h(q)).unwrap();
        let rhs = a * kernel_average(&g, f).unwrap() + c * kernel_average(&g, h).unwrap();
        prop_assert!((lhs - rhs).abs() < 1e-8 * (1.0 + rhs.abs()));

        let atoms = vec![WeightedValue { value: mean, weight: mix }, WeightedValue { value: -mean, weight: 1.0 - mix }];
        let e = SmearKernel::empirical(atoms).unwrap();
        let mixture = mix * f(mean) + (1.0 - mix) * f(-mean);
        prop_assert!((kernel_average(&e, f).unwrap() - mixture).abs() < 1e-15);
    }
}

#[test]
fn multiplicity_sum_rule_up_to_64_sites() {
    for n in 1u64..=64 {
        let mut total = BigUint::from(0u32);
        for two_s in (n % 2..=n).step_by(2) {
            let Multiplicity::Exact(m) = spin_multiplicity(n, two_s, MultiplicityMethod::Exact).unwrap() else {
                unreachable!()
            };
            total += m * (two_s + 1);
        }
        assert_eq!(total, BigUint::from(1u32) << n, "N = {n}");
    }
}
