use fdbia::linalg::{ComplexVector, C64};
use fdbia::network::{apply_channel, sample_channels_for_trial, ChannelRealization, ModeSchedule, NetworkConfig};
use fdbia::rng::{complex_gaussian, stream_rng, Stream};
use proptest::prelude::*;

fn random_vec(seed: u64, trial: u64, n: usize) -> ComplexVector {
    let mut rng = stream_rng(seed, trial, Stream::Symbols);
    ComplexVector::from_fn(n, |_, _| complex_gaussian(&mut rng))
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(64))]

    #[test]
    fn received_signals_are_linear_in_inputs(seed in any::<u64>(), kd in 1usize..=3, ku in 1usize..=3, md in 1usize..=3, mu in 1usize..=3, n in 1usize..=6) {
        let cfg = NetworkConfig::new(kd, ku, md, mu).unwrap();
        let cr = sample_channels_for_trial(cfg, seed, 0);
        let alpha: Vec<usize> = (0..n).map(|t| t % md).collect();
        let beta: Vec<usize> = (0..n).map(|t| (t * 7 + 1) % mu).collect();
        let sched = ModeSchedule::new(alpha, beta, md, mu).unwrap();
        let zd = vec![ComplexVector::zeros(n); kd];
        let zu = ComplexVector::zeros(n);
        let xd1 = random_vec(seed, 1, n);
        let xd2 = random_vec(seed, 2, n);
        let xu1: Vec<_> = (0..ku).map(|j| random_vec(seed, 10 + j as u64, n)).collect();
        let xu2: Vec<_> = (0..ku).map(|j| random_vec(seed, 20 + j as u64, n)).collect();
        let (a, b) = (C64::new(0.3, -1.2), C64::new(-2.0, 0.5));
        let o1 = apply_channel(&cr, &sched, &xd1, &xu1, &zd, &zu).unwrap();
        let o2 = apply_channel(&cr, &sched, &xd2, &xu2, &zd, &zu).unwrap();
        let xd = &xd1 * a + &xd2 * b;
        let xu: Vec<_> = xu1.iter().zip(&xu2).map(|(u, v)| u * a + v * b).collect();
        let o = apply_channel(&cr, &sched, &xd, &xu, &zd, &zu).unwrap();
        for i in 0..kd {
            prop_assert!((&o.y_d[i] - (&o1.y_d[i] * a + &o2.y_d[i] * b)).norm() < 1e-10);
        }
        prop_assert!((&o.y_u - (&o1.y_u * a + &o2.y_u * b)).norm() < 1e-10);
    }

    #[test]
    fn dump_round_trips(seed in any::<u64>(), kd in 0usize..=3, ku in 0usize..=3, md in 1usize..=3, mu in 1usize..=3) {
        let cfg = NetworkConfig::new(kd, ku, md, mu).unwrap();
        let cr = sample_channels_for_trial(cfg, seed, 3);
        let back = ChannelRealization::from_dump(&cr.to_dump()).unwrap();
        prop_assert_eq!(back, cr);
    }
}
