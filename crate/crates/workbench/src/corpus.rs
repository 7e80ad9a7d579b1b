//! The pinned test corpus: fixed seeds, shipped systems, and deterministic
//! samplers for random systems and series.
//!
//! Every suite draws its randomness from ChaCha12 streams seeded with the
//! constants below, so reruns are byte-identical and failures are
//! reproducible from the report alone.

use gowers_core::linear_systems::{LinearForm, LinearSystem};
use gowers_core::series::{generate, GeneratorKind, GeneratorSpec, Series};
use rand::Rng;
use rand_chacha::rand_core::SeedableRng;
use rand_chacha::ChaCha12Rng;

/// Base seed; suite-specific streams offset from it.
pub const BASE_SEED: u64 = 0x9e37_79b9_7f4a_7c15;

/// Pinned irrational phase multipliers (fractional parts are what matter).
pub const IRRATIONAL_PHASES: [f64; 5] = [
    std::f64::consts::SQRT_2,
    1.732_050_807_568_877_2, // sqrt(3)
    2.236_067_977_499_79,    // sqrt(5)
    std::f64::consts::E,
    std::f64::consts::PI,
];

/// The k-term arithmetic-progression system `(x, x+y, …, x+(k−1)y)`.
pub fn ap_system(k: usize) -> LinearSystem {
    LinearSystem::arithmetic_progression(k as u32).expect("k ≥ 2 by construction")
}

/// The shipped non-flag example `(x, y, x+y, x−y)`: its degree-1 span is not
/// contained in its degree-2 span, so flag checking reports violation (1, 2).
pub fn non_flag_system() -> LinearSystem {
    LinearSystem::from_rows(&[&[1, 0], &[0, 1], &[1, 1], &[1, -1]])
        .expect("rows are valid nonzero forms")
}

/// The violating pair the shipped non-flag system must report, stably.
pub const NON_FLAG_VIOLATION: (u32, u32) = (1, 2);

/// A deterministic stream for a named suite.
pub fn suite_rng(salt: u64) -> ChaCha12Rng {
    ChaCha12Rng::seed_from_u64(BASE_SEED ^ salt)
}

/// Draws a random system with `2..=t_max` forms in dimension `1..=d_max`,
/// coefficients in `[-coeff_bound, coeff_bound]`, every form nonzero.
pub fn random_system(
    rng: &mut ChaCha12Rng,
    t_max: usize,
    d_max: usize,
    coeff_bound: i64,
) -> LinearSystem {
    loop {
        let d = rng.random_range(1..=d_max);
        let t = rng.random_range(2..=t_max);
        let mut forms = Vec::with_capacity(t);
        for _ in 0..t {
            let coeffs: Vec<i64> = (0..d)
                .map(|_| rng.random_range(-coeff_bound..=coeff_bound))
                .collect();
            if coeffs.iter().all(|&c| c == 0) {
                continue;
            }
            forms.push(LinearForm::new(coeffs).expect("nonzero by the check above"));
        }
        if forms.len() == t {
            return LinearSystem::new(forms).expect("equal dimensions by construction");
        }
    }
}

/// Draws a random translation-invariant system: every form has first
/// coefficient 1, so the image contains `(1, …, 1)` (evaluate at the first
/// unit vector).
pub fn random_translation_invariant_system(
    rng: &mut ChaCha12Rng,
    t_max: usize,
    d_max: usize,
    coeff_bound: i64,
) -> LinearSystem {
    let d = rng.random_range(2..=d_max.max(2));
    let t = rng.random_range(2..=t_max);
    let forms: Vec<LinearForm> = (0..t)
        .map(|_| {
            let mut coeffs = vec![1i64];
            coeffs.extend((1..d).map(|_| rng.random_range(-coeff_bound..=coeff_bound)));
            LinearForm::new(coeffs).expect("first coefficient is 1")
        })
        .collect();
    LinearSystem::new(forms).expect("equal dimensions by construction")
}

/// A seeded 1-bounded series on `[lo, hi]`; even seeds draw unimodular
/// values, odd seeds random signs, so the corpus mixes both textures.
pub fn bounded_series(seed: u64, lo: i64, hi: i64) -> Series {
    let kind = if seed % 2 == 0 {
        GeneratorKind::RandomUnimodular
    } else {
        GeneratorKind::RandomPm1
    };
    generate(&GeneratorSpec::new(kind, seed), lo, hi).expect("nonempty window")
}

/// A seeded unimodular series on `[lo, hi]`.
pub fn unimodular_series(seed: u64, lo: i64, hi: i64) -> Series {
    generate(
        &GeneratorSpec::new(GeneratorKind::RandomUnimodular, seed),
        lo,
        hi,
    )
    .expect("nonempty window")
}

/// `n ↦ e(Σ_d coeffs[d] n^{d+1})` on `[lo, hi]`.
pub fn phase_series(coeffs: &[f64], lo: i64, hi: i64) -> Series {
    generate(
        &GeneratorSpec::new(
            GeneratorKind::PolynomialPhase {
                coeffs: coeffs.to_vec(),
            },
            0,
        ),
        lo,
        hi,
    )
    .expect("nonempty window")
}
