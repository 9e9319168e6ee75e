use num_complex::Complex64;
use polar_pilot_core::channel::{jakes_autocorr, transmit, FadingGenerator, FadingScenario};
use polar_pilot_core::estimation::{interpolate_linear, ls_estimate, EstimatorConfig, EstimatorKind, PilotEstimator};
use polar_pilot_core::gf2::IndexSet;
use proptest::prelude::*;
use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;

const T: f64 = 1.0 / 256_000.0;

fn scenario(fd_hz: f64, ebno_db: f64, rate: f64) -> FadingScenario {
    FadingScenario::new(fd_hz, T, ebno_db, rate, 0).unwrap()
}

/// Lag-k autocorrelation normalised by lag-0 power, pooled within blocks.
fn sample_autocorr(fd_hz: f64, block: usize, blocks: usize, max_lag: usize, seed: u64) -> Vec<f64> {
    let s = scenario(fd_hz, 10.0, 0.5);
    let mut gen = FadingGenerator::new(&s);
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let mut acc = vec![Complex64::new(0.0, 0.0); max_lag + 1];
    let mut counts = vec![0usize; max_lag + 1];
    for _ in 0..blocks {
        let h = gen.generate(&s, block, &mut rng).unwrap().h;
        for k in 0..=max_lag.min(block - 1) {
            for i in 0..block - k {
                acc[k] += h[i + k] * h[i].conj();
            }
            counts[k] += block - k;
        }
    }
    let p0 = acc[0].re / counts[0] as f64;
    acc.iter().zip(&counts).map(|(a, &c)| a.re / c as f64 / p0).collect()
}

#[test]
fn autocorrelation_follows_jakes() {
    // 3906 blocks of 256 symbols ≈ 10^6 samples per Doppler
    for fd in [0.0, 10.0, 50.0] {
        let r = sample_autocorr(fd, 256, 3906, 32, 1);
        for (k, &v) in r.iter().enumerate().skip(1) {
            let want = jakes_autocorr(k as i64, fd, T);
            assert!((v - want).abs() < 0.02, "fd = {fd}, lag {k}: {v} vs {want}");
        }
    }
}

#[test]
fn fast_fading_lag_one_and_power() {
    // f_d·T = 0.5
    let fd = 0.5 / T;
    let s = scenario(fd, 10.0, 0.5);
    let mut gen = FadingGenerator::new(&s);
    let mut rng = ChaCha8Rng::seed_from_u64(2);
    let (mut lag1, mut pairs, mut power, mut samples) = (0.0, 0usize, 0.0, 0usize);
    for _ in 0..15_625 {
        let h = gen.generate(&s, 64, &mut rng).unwrap().h;
        for w in h.windows(2) {
            lag1 += (w[1] * w[0].conj()).re;
            pairs += 1;
        }
        power += h.iter().map(|z| z.norm_sqr()).sum::<f64>();
        samples += h.len();
    }
    let lag1 = lag1 / pairs as f64;
    let power = power / samples as f64;
    assert!((lag1 - jakes_autocorr(1, fd, T)).abs() < 0.01, "{lag1}");
    assert!((jakes_autocorr(1, fd, T) + 0.304).abs() < 1e-3);
    assert!((power - 1.0).abs() < 0.01, "{power}");
}

#[test]
fn envelope_is_rayleigh() {
    let s = scenario(50.0, 10.0, 0.5);
    let mut gen = FadingGenerator::new(&s);
    let mut rng = ChaCha8Rng::seed_from_u64(3);
    let n = 100_000;
    let mut r: Vec<f64> = (0..n).map(|_| gen.generate(&s, 1, &mut rng).unwrap().h[0].norm()).collect();
    r.sort_by(f64::total_cmp);
    // Rayleigh with σ = 1/√2: F(r) = 1 - exp(-r²)
    let d = r
        .iter()
        .enumerate()
        .map(|(i, &x)| {
            let f = 1.0 - (-x * x).exp();
            (f - i as f64 / n as f64).abs().max(((i + 1) as f64 / n as f64 - f).abs())
        })
        .fold(0.0, f64::max);
    assert!(d < 1.628 / (n as f64).sqrt(), "KS distance {d}");
}

#[test]
fn noise_variance_matches_n0() {
    let s = scenario(50.0, 10.0, 0.5);
    let mut gen = FadingGenerator::new(&s);
    let mut rng = ChaCha8Rng::seed_from_u64(4);
    let (mut sum, mut count) = (0.0, 0usize);
    for _ in 0..3_907 {
        let real = gen.generate(&s, 256, &mut rng).unwrap();
        let y = transmit(&[0u8; 256], &real, &mut rng).unwrap();
        sum += y.iter().zip(&real.h).map(|(y, h)| (y - h).norm_sqr()).sum::<f64>();
        count += 256;
    }
    let var = sum / count as f64;
    assert!((var / 0.2 - 1.0).abs() < 0.02, "{var}");
}

#[test]
fn same_seed_is_bit_identical() {
    let s = scenario(10.0, 5.0, 0.5);
    let run = || {
        let mut gen = FadingGenerator::new(&s);
        let mut rng = ChaCha8Rng::seed_from_u64(99);
        (0..5).flat_map(|_| gen.generate(&s, 100, &mut rng).unwrap().h).collect::<Vec<_>>()
    };
    let (a, b) = (run(), run());
    assert!(a.iter().zip(&b).all(|(x, y)| x.re.to_bits() == y.re.to_bits() && x.im.to_bits() == y.im.to_bits()));
}

fn pilot_mse(kind: EstimatorKind, ebno_db: f64, frames: usize, seed: u64) -> (f64, f64) {
    let rate = 0.5;
    let s = scenario(50.0, ebno_db, rate);
    let positions = IndexSet::new(256, (1..=64).map(|k| 4 * k)).unwrap();
    let cfg = EstimatorConfig::new(kind, ebno_db, rate, 50.0, T).unwrap();
    let est = PilotEstimator::new(&cfg, positions.clone()).unwrap();
    let mut gen = FadingGenerator::new(&s);
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let symbols = vec![1.0; 64];
    let (mut at, mut full) = (0.0, 0.0);
    for _ in 0..frames {
        let real = gen.generate(&s, 256, &mut rng).unwrap();
        let y = transmit(&[0u8; 256], &real, &mut rng).unwrap();
        let e = est.estimate(&y, &symbols, &real.h).unwrap();
        at += positions.iter().zip(&e.at_pilots).map(|(p, v)| (v - real.h[p - 1]).norm_sqr()).sum::<f64>();
        full += e.full.iter().zip(&real.h).map(|(v, h)| (v - h).norm_sqr()).sum::<f64>();
    }
    (at / (64 * frames) as f64, full / (256 * frames) as f64)
}

#[test]
fn ls_mse_is_n0() {
    // 15625 frames × 64 pilots = 10^6 pilot uses
    let (mse, _) = pilot_mse(EstimatorKind::Ls, 10.0, 15_625, 5);
    assert!((mse / 0.2 - 1.0).abs() < 0.03, "{mse}");
}

#[test]
fn mmse_beats_ls_at_low_snr() {
    let (ls, _) = pilot_mse(EstimatorKind::Ls, 5.0, 2_000, 6);
    let (mmse, _) = pilot_mse(EstimatorKind::Mmse, 5.0, 2_000, 6);
    assert!(mmse < ls, "{mmse} vs {ls}");
}

#[test]
fn dense_pilots_interpolate_slow_fading() {
    let s = scenario(10.0, 10.0, 0.5);
    let mut gen = FadingGenerator::new(&s);
    let mut rng = ChaCha8Rng::seed_from_u64(7);
    let positions = IndexSet::new(256, (1..=64).map(|k| 4 * k)).unwrap();
    let mut worst: Vec<f64> = (0..201)
        .map(|_| {
            let h = gen.generate(&s, 256, &mut rng).unwrap().h;
            let at: Vec<Complex64> = positions.iter().map(|p| h[p - 1]).collect();
            let full = interpolate_linear(&positions, &at, 256).unwrap();
            full.iter().zip(&h).map(|(a, b)| (a - b).norm()).fold(0.0, f64::max)
        })
        .collect();
    worst.sort_by(f64::total_cmp);
    assert!(worst[100] < 0.01, "median max error {}", worst[100]);
}

proptest! {
    #[test]
    fn interpolation_is_exact_on_affine_channels(
        pilots in proptest::collection::btree_set(1usize..=64, 2..=12),
        a in -2.0f64..2.0, b in -2.0f64..2.0, c in -0.1f64..0.1, d in -0.1f64..0.1,
    ) {
        let set = IndexSet::new(64, pilots).unwrap();
        let h = |i: usize| Complex64::new(a + c * i as f64, b + d * i as f64);
        let est: Vec<Complex64> = set.iter().map(h).collect();
        let full = interpolate_linear(&set, &est, 64).unwrap();
        let (first, last) = (set.as_slice()[0], *set.as_slice().last().unwrap());
        for i in first..=last {
            prop_assert!((full[i - 1] - h(i)).norm() < 1e-12);
        }
    }

    #[test]
    fn ls_divides_out_the_symbol(re in -3.0f64..3.0, im in -3.0f64..3.0, neg in any::<bool>()) {
        let s = if neg { -1.0 } else { 1.0 };
        let h = Complex64::new(re, im);
        prop_assert_eq!(ls_estimate(&[h * s], &[s]).unwrap()[0], h);
    }
}
