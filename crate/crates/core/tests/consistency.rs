//! Cross-route oracle checks: independently derived closed forms against
//! the assembled machinery.

use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

use varband::kernel::{KernelEvaluator, KernelMode};
use varband::linalg::symmetric_eigen;
use varband::sampling::kernel_gram;
use varband::scalar::sinc;
use varband::spectral::{JMode, SpectralSet};
use varband::testing::{figure_profile, figure_spectrum, random_profile};
use varband::transfer::{connection_table, phi, uniform_bound_minus, uniform_bound_plus, SolutionSign};
use varband::BandwidthProfile;

const PI: f64 = std::f64::consts::PI;

/// Elementary sinc form of the one-jump kernel: with a single knot `t1`
/// and reflection coefficient `ρ = (q0-q1)/(q0+q1)`, each block is a pair
/// of sincs (direct and mirrored across the knot).
fn one_jump_oracle(q0: f64, q1: f64, t1: f64, w: f64, x: f64, y: f64) -> f64 {
    let rho = (q0 - q1) / (q0 + q1);
    if x <= t1 && y <= t1 {
        q0 * w / PI * (sinc(q0 * w * (x - y)) - rho * sinc(q0 * w * (x + y - 2.0 * t1)))
    } else if x > t1 && y > t1 {
        q1 * w / PI * (sinc(q1 * w * (x - y)) + rho * sinc(q1 * w * (x + y - 2.0 * t1)))
    } else if x <= t1 {
        2.0 * q0 * q1 * w / (PI * (q0 + q1)) * sinc(w * (q0 * (x - t1) - q1 * (y - t1)))
    } else {
        one_jump_oracle(q0, q1, t1, w, y, x)
    }
}

#[test]
fn one_jump_kernel_matches_elementary_sincs() {
    let (q0, q1, t1) = (1.0, 0.5, 0.8);
    let levels = vec![1.0 / (q0 * q0), 1.0 / (q1 * q1)];
    let profile = BandwidthProfile::new(vec![t1], levels).unwrap();
    let w = PI;
    let ev = KernelEvaluator::new(profile, SpectralSet::up_to(w * w).unwrap()).unwrap();
    for ix in -8..=8 {
        for iy in -8..=8 {
            let (x, y) = (ix as f64 * 0.9, iy as f64 * 0.9);
            let got = ev.eval(x, y).unwrap();
            let want = one_jump_oracle(q0, q1, t1, w, x, y);
            assert!(
                (got - want).abs() < 1e-9,
                "({x},{y}): {got} vs oracle {want}"
            );
        }
    }
}

#[test]
fn figure_kernel_center_value_is_the_local_density() {
    // k(0,0) = local bandwidth q_1 √Ω / π = 2 for the worked example
    let ev = KernelEvaluator::new(figure_profile(), figure_spectrum()).unwrap();
    assert!((ev.eval(0.0, 0.0).unwrap() - 2.0).abs() < 1e-9);
    assert!((ev.diagonal(0.0).unwrap() - 2.0).abs() < 1e-9);
    // far in the outer intervals the diagonal relaxes to √Ω/π = 1
    assert!((ev.diagonal(40.0).unwrap() - 1.0).abs() < 0.05);
}

#[test]
fn random_centered_profiles_agree_across_routes() {
    let mut rng = ChaCha8Rng::seed_from_u64(17);
    for _ in 0..2 {
        let half = rng.gen_range(0.8..3.0);
        let levels: Vec<f64> = (0..3).map(|_| rng.gen_range(0.25..4.0)).collect();
        let profile = BandwidthProfile::new(vec![-half, half], levels).unwrap();
        let omega = rng.gen_range(2.0..12.0);
        let sset = SpectralSet::up_to(omega).unwrap();
        let closed = KernelEvaluator::with_modes(
            profile.clone(),
            sset.clone(),
            Some(KernelMode::ClosedFormN2),
            None,
        )
        .unwrap();
        let generic = KernelEvaluator::with_modes(
            profile,
            sset,
            Some(KernelMode::Generic),
            Some(JMode::Quadrature),
        )
        .unwrap();
        for ix in -4..=4 {
            for iy in -4..=4 {
                let (x, y) = (ix as f64 * 1.7, iy as f64 * 1.7);
                let a = closed.eval(x, y).unwrap();
                let b = generic.eval(x, y).unwrap();
                assert!((a - b).abs() < 1e-8, "({x},{y}): {a} vs {b}");
            }
        }
    }
}

#[test]
fn fundamental_solutions_bounded_for_random_profiles() {
    let mut rng = ChaCha8Rng::seed_from_u64(23);
    for _ in 0..6 {
        let n = rng.gen_range(0..=5);
        let profile = random_profile(&mut rng, n, (-8.0, 8.0), (0.2, 5.0));
        let table = connection_table(&profile);
        let bp = uniform_bound_plus(&profile);
        let bm = uniform_bound_minus(&profile);
        let q0 = profile.q_first();
        let qn = profile.q_last();
        let lower = 1.0 / (q0 * qn);
        for _ in 0..40 {
            let u = rng.gen_range(0.01..15.0);
            let x = rng.gen_range(-12.0..12.0);
            let vp = phi(&profile, &table, SolutionSign::Plus, u, x).unwrap().norm();
            let vm = phi(&profile, &table, SolutionSign::Minus, u, x).unwrap().norm();
            assert!(vp <= bp && vm <= bm, "|Φ| out of bound: {vp} vs {bp}, {vm} vs {bm}");
            let kappa = table.aplus[0].eval(u).norm_sqr() / (q0 * q0);
            assert!(kappa >= lower - 1e-12, "kappa {kappa} below {lower}");
        }
    }
}

#[test]
fn band_pass_spectrum_gives_difference_of_sincs() {
    // p ≡ 1 with Λ = [1,4] ∪ [9,16]: the kernel is the band-pass
    // difference (1/π) Σ_i [b_i sinc(b_i Δ) − a_i sinc(a_i Δ)] over the
    // square-root intervals
    let sset = SpectralSet::new(vec![(1.0, 4.0), (9.0, 16.0)]).unwrap();
    let ev = KernelEvaluator::new(BandwidthProfile::constant(1.0).unwrap(), sset).unwrap();
    let oracle = |d: f64| -> f64 {
        let part = |lo: f64, hi: f64| hi * sinc(hi * d) - lo * sinc(lo * d);
        (part(1.0, 2.0) + part(3.0, 4.0)) / PI
    };
    for ix in -6..=6 {
        for iy in -6..=6 {
            let (x, y) = (1.3 * ix as f64, 1.3 * iy as f64);
            let got = ev.eval(x, y).unwrap();
            let want = oracle(x - y);
            assert!((got - want).abs() < 1e-9, "({x},{y}): {got} vs {want}");
        }
    }
    // diagonal picks up the total square-root measure
    assert!((ev.diagonal(2.2).unwrap() - 2.0 / PI).abs() < 1e-9);
}

#[test]
fn gram_on_sixty_points_is_psd() {
    let ev = KernelEvaluator::new(figure_profile(), figure_spectrum()).unwrap();
    let mut rng = ChaCha8Rng::seed_from_u64(31);
    let pts: Vec<f64> = (0..60).map(|_| rng.gen_range(-15.0..15.0)).collect();
    let gram = kernel_gram(&ev, &pts).unwrap();
    let eig = symmetric_eigen(&gram).unwrap();
    assert!(eig.lambda_min() >= -1e-8 * eig.lambda_max());
}
