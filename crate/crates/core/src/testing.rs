//! Seeded generators shared by the test suites and the verification command.

use rand::Rng;

use crate::piecewise::BandwidthProfile;
use crate::spectral::SpectralSet;

/// The worked three-interval example used across the docs and tests:
/// knots at ±3, levels (1, 1/4, 1).
pub fn figure_profile() -> BandwidthProfile<f64> {
    BandwidthProfile::new(vec![-3.0, 3.0], vec![1.0, 0.25, 1.0]).expect("valid profile")
}

/// Its companion spectrum `Λ = [0, π²]`, giving critical density 1.
pub fn figure_spectrum() -> SpectralSet<f64> {
    SpectralSet::up_to(std::f64::consts::PI.powi(2)).expect("valid spectrum")
}

/// Random profile with `n` jumps, knots in `knot_range` separated by at
/// least 1% of the range, levels in `level_range`.
pub fn random_profile<R: Rng>(
    rng: &mut R,
    n: usize,
    knot_range: (f64, f64),
    level_range: (f64, f64),
) -> BandwidthProfile<f64> {
    let span = knot_range.1 - knot_range.0;
    let min_gap = span * 0.01;
    let knots = loop {
        let mut k: Vec<f64> = (0..n)
            .map(|_| rng.gen_range(knot_range.0..knot_range.1))
            .collect();
        k.sort_by(|a, b| a.partial_cmp(b).unwrap());
        if k.windows(2).all(|w| w[1] - w[0] >= min_gap) {
            break k;
        }
    };
    let levels = (0..=n)
        .map(|_| rng.gen_range(level_range.0..level_range.1))
        .collect();
    BandwidthProfile::new(knots, levels).expect("generated profile is valid")
}

/// Random two-jump profile with knots at ±T/2, the shape the closed-form
/// kernel needs.
pub fn random_centered_two_jump<R: Rng>(
    rng: &mut R,
    half_width_range: (f64, f64),
    level_range: (f64, f64),
) -> BandwidthProfile<f64> {
    let half = rng.gen_range(half_width_range.0..half_width_range.1);
    let levels: Vec<f64> = (0..3)
        .map(|_| rng.gen_range(level_range.0..level_range.1))
        .collect();
    BandwidthProfile::new(vec![-half, half], levels).expect("generated profile is valid")
}

#[cfg(test)]
mod tests {
    use super::*;
    use rand::SeedableRng;

    #[test]
    fn generated_profiles_are_valid() {
        let mut rng = rand_chacha::ChaCha8Rng::seed_from_u64(0);
        for n in 0..=6 {
            let p = random_profile(&mut rng, n, (-10.0, 10.0), (0.1, 10.0));
            assert_eq!(p.num_jumps(), n);
        }
        let c = random_centered_two_jump(&mut rng, (0.5, 4.0), (0.25, 4.0));
        assert_eq!(c.num_jumps(), 2);
        assert_eq!(c.knots()[0], -c.knots()[1]);
    }
}
